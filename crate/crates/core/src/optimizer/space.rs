use std::fmt;
use std::str::FromStr;

use rand::Rng;
use thiserror::Error;

use crate::placement::QxxParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParamName {
    MaxDepth,
    MaxChildren,
    B,
    C,
    MovementFactor,
    EdgeCost,
}

impl ParamName {
    pub const ALL: [ParamName; 6] = [
        ParamName::MaxDepth,
        ParamName::MaxChildren,
        ParamName::B,
        ParamName::C,
        ParamName::MovementFactor,
        ParamName::EdgeCost,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        QxxParams::NAMES[self.index()]
    }

    pub fn value(self, p: &QxxParams) -> f64 {
        p.to_array()[self.index()]
    }
}

impl fmt::Display for ParamName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ParamName {
    type Err = SpaceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s.chars().filter(|c| *c != '_' && *c != '-').collect::<String>().to_lowercase();
        Ok(match key.as_str() {
            "maxdepth" => ParamName::MaxDepth,
            "maxchildren" | "maxchild" | "maxbreadth" => ParamName::MaxChildren,
            "b" => ParamName::B,
            "c" => ParamName::C,
            "movementfactor" | "mf" => ParamName::MovementFactor,
            "edgecost" | "ec" => ParamName::EdgeCost,
            _ => return Err(SpaceError::UnknownParam(s.to_string())),
        })
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SpaceError {
    #[error("parameter {0} has no values")]
    EmptyDimension(ParamName),
    #[error("parameter {param} value {value} is outside its valid range")]
    OutOfRange { param: ParamName, value: f64 },
    #[error("unknown parameter {0:?}")]
    UnknownParam(String),
    #[error("unknown space preset {0:?} (expected table1 or table3)")]
    UnknownPreset(String),
}

/// Inclusive arithmetic grid `min, min+step, ..., max`.
pub fn grid(min: f64, max: f64, step: f64) -> Vec<f64> {
    let count = ((max - min) / step).round() as usize + 1;
    (0..count).map(|k| ((min + k as f64 * step) * 1e10).round() / 1e10).collect()
}

/// A finite value list per parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpace {
    dims: [Vec<f64>; 6],
}

impl ParamSpace {
    pub fn new(dims: [Vec<f64>; 6]) -> Result<Self, SpaceError> {
        for (k, values) in dims.iter().enumerate() {
            let param = ParamName::ALL[k];
            if values.is_empty() {
                return Err(SpaceError::EmptyDimension(param));
            }
            for &v in values {
                let mut probe = QxxParams::new(1, 1, 0.0, 0.0, 1, 1.0).to_array();
                probe[k] = v;
                let integral = matches!(param, ParamName::MaxDepth | ParamName::MaxChildren | ParamName::MovementFactor);
                if (integral && v.fract() != 0.0) || QxxParams::from_array(probe).validate().is_err() {
                    return Err(SpaceError::OutOfRange { param, value: v });
                }
            }
        }
        Ok(Self { dims })
    }

    /// The full space: MaxDepth, MaxChildren, MovementFactor in 1..=55;
    /// B in 0..=500 step 0.1; C in 0..=1 step 0.01; EdgeCost in 0.1..=1 step 0.1.
    pub fn table1() -> Self {
        Self::new([
            grid(1.0, 55.0, 1.0),
            grid(1.0, 55.0, 1.0),
            grid(0.0, 500.0, 0.1),
            grid(0.0, 1.0, 0.01),
            grid(1.0, 55.0, 1.0),
            grid(0.1, 1.0, 0.1),
        ])
        .expect("preset is valid")
    }

    /// The reduced exhaustive-search grid: 3 x 3 x 11 x 5 x 3 x 3 = 4455 points.
    pub fn table3() -> Self {
        Self::new([
            grid(1.0, 9.0, 4.0),
            grid(1.0, 9.0, 4.0),
            grid(0.0, 20.0, 2.0),
            grid(0.0, 1.0, 0.25),
            grid(2.0, 10.0, 4.0),
            grid(0.2, 1.0, 0.4),
        ])
        .expect("preset is valid")
    }

    pub fn preset(name: &str) -> Result<Self, SpaceError> {
        match name.to_ascii_lowercase().as_str() {
            "table1" | "full" => Ok(Self::table1()),
            "table3" | "exhaustive" => Ok(Self::table3()),
            _ => Err(SpaceError::UnknownPreset(name.to_string())),
        }
    }

    /// The same space with `param` restricted to `values`.
    pub fn with_values(&self, param: ParamName, values: Vec<f64>) -> Result<Self, SpaceError> {
        let mut dims = self.dims.clone();
        dims[param.index()] = values;
        Self::new(dims)
    }

    pub fn values(&self, param: ParamName) -> &[f64] {
        &self.dims[param.index()]
    }

    pub fn dims(&self) -> &[Vec<f64>; 6] {
        &self.dims
    }

    /// Product of the dimension sizes.
    pub fn cardinality(&self) -> usize {
        self.dims.iter().map(Vec::len).product()
    }

    pub fn point(&self, idx: [usize; 6]) -> QxxParams {
        let mut v = [0.0; 6];
        for k in 0..6 {
            v[k] = self.dims[k][idx[k]];
        }
        QxxParams::from_array(v)
    }

    /// Uniform index draw, one dimension at a time in canonical order.
    pub fn sample_indices<R: Rng>(&self, rng: &mut R) -> [usize; 6] {
        let mut idx = [0; 6];
        for k in 0..6 {
            idx[k] = rng.gen_range(0..self.dims[k].len());
        }
        idx
    }

    /// Grid points in lexicographic order, MaxDepth outermost.
    pub fn iter(&self) -> impl Iterator<Item = [usize; 6]> + '_ {
        let total = self.cardinality();
        (0..total).map(move |mut flat| {
            let mut idx = [0; 6];
            for k in (0..6).rev() {
                let len = self.dims[k].len();
                idx[k] = flat % len;
                flat /= len;
            }
            idx
        })
    }
}
