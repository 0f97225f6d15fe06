use serde::{Deserialize, Serialize};

use super::SurrogateError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnnParams {
    pub k: usize,
    /// Minkowski exponent, 1 (Manhattan) or 2 (Euclidean).
    pub p: u32,
}

/// k-nearest-neighbour regressor over already scaled inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Knn {
    params: KnnParams,
    x: Vec<Vec<f64>>,
    y: Vec<f64>,
}

impl Knn {
    pub fn fit(x: &[Vec<f64>], y: &[f64], params: KnnParams) -> Result<Self, SurrogateError> {
        if x.is_empty() || x.len() != y.len() {
            return Err(SurrogateError::Data(format!("{} rows for {} targets", x.len(), y.len())));
        }
        if params.k == 0 || params.k > x.len() {
            return Err(SurrogateError::Hyper(format!("k = {} with {} training rows", params.k, x.len())));
        }
        if params.p != 1 && params.p != 2 {
            return Err(SurrogateError::Hyper(format!("minkowski p = {} (expected 1 or 2)", params.p)));
        }
        Ok(Self { params, x: x.to_vec(), y: y.to_vec() })
    }

    pub fn params(&self) -> KnnParams {
        self.params
    }

    fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        match self.params.p {
            1 => a.iter().zip(b).map(|(u, v)| (u - v).abs()).sum(),
            _ => a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt(),
        }
    }

    /// Indices of the `k` nearest rows, nearest first; equal distances are
    /// ranked by row index.
    pub fn neighbors(&self, query: &[f64]) -> Vec<usize> {
        let mut d: Vec<(f64, usize)> = self.x.iter().enumerate().map(|(i, r)| (self.distance(query, r), i)).collect();
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        let k = self.params.k;
        if k < d.len() {
            d.select_nth_unstable_by(k - 1, cmp);
            d.truncate(k);
        }
        d.sort_by(cmp);
        d.into_iter().map(|(_, i)| i).collect()
    }

    pub fn predict(&self, query: &[f64]) -> f64 {
        let nb = self.neighbors(query);
        nb.iter().map(|&i| self.y[i]).sum::<f64>() / nb.len() as f64
    }
}
