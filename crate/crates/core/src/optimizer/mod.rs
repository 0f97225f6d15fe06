//! Search over the six placement parameters.
//!
//! Every search strategy talks to an [`Objective`], which turns one
//! parameter configuration into a [`TrialRecord`]. The real objective,
//! [`SuiteObjective`], lays out every circuit of a benchmark suite; the
//! surrogate module provides a learned stand-in.

pub mod forest;
pub mod search;
pub mod space;

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::benchgen::Benchmark;
use crate::device::Device;
use crate::placement::{place, PlacementError, QxxParams};
use crate::router::{ratio, route};
use crate::seed::derive_seed;

pub use search::{
    best_index, exhaustive, importance, random_search, wrs, ImportanceWeights, SearchOutcome, WrsConfig,
    MIN_PROBABILITY,
};
pub use space::{grid, ParamName, ParamSpace, SpaceError};

/// Result of laying out one circuit under one configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CircuitOutcome {
    Done { ratio: f64 },
    TimedOut,
}

impl CircuitOutcome {
    pub fn ratio(&self) -> Option<f64> {
        match self {
            CircuitOutcome::Done { ratio } => Some(*ratio),
            CircuitOutcome::TimedOut => None,
        }
    }
}

/// How timed-out circuits enter a trial's mean ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimeoutPolicy {
    /// Leave them out of the mean.
    #[default]
    Exclude,
    /// Score them with the worst ratio among the trial's completed circuits.
    Worst,
}

impl std::str::FromStr for TimeoutPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "exclude" => Ok(TimeoutPolicy::Exclude),
            "worst" => Ok(TimeoutPolicy::Worst),
            _ => Err(format!("unknown timeout policy {s:?} (expected exclude or worst)")),
        }
    }
}

/// One evaluated parameter configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial_index: usize,
    pub params: QxxParams,
    pub per_circuit: Vec<CircuitOutcome>,
    /// `None` when no circuit produced a ratio.
    pub mean_ratio: Option<f64>,
    pub wall_time: Duration,
    pub timeout_count: usize,
}

impl TrialRecord {
    pub fn from_outcomes(
        trial_index: usize,
        params: QxxParams,
        per_circuit: Vec<CircuitOutcome>,
        wall_time: Duration,
        policy: TimeoutPolicy,
    ) -> Self {
        let done: Vec<f64> = per_circuit.iter().filter_map(CircuitOutcome::ratio).collect();
        let timeout_count = per_circuit.len() - done.len();
        let mean_ratio = if done.is_empty() {
            None
        } else {
            let (sum, count) = match policy {
                TimeoutPolicy::Exclude => (done.iter().sum::<f64>(), done.len()),
                TimeoutPolicy::Worst => {
                    let worst = done.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    (done.iter().sum::<f64>() + worst * timeout_count as f64, per_circuit.len())
                }
            };
            Some(sum / count as f64)
        };
        Self { trial_index, params, per_circuit, mean_ratio, wall_time, timeout_count }
    }

    /// Value minimized by the searches; invalid trials score `+inf`.
    pub fn objective(&self) -> f64 {
        self.mean_ratio.unwrap_or(f64::INFINITY)
    }

    pub fn is_valid(&self) -> bool {
        self.mean_ratio.is_some()
    }
}

pub trait Objective: Sync {
    fn evaluate(&self, trial_index: usize, params: &QxxParams) -> TrialRecord;
}

/// Wraps a plain function of the parameters as a one-circuit objective.
pub struct FnObjective<F>(pub F);

impl<F> Objective for FnObjective<F>
where
    F: Fn(&QxxParams) -> f64 + Sync,
{
    fn evaluate(&self, trial_index: usize, params: &QxxParams) -> TrialRecord {
        let started = Instant::now();
        let value = (self.0)(params);
        TrialRecord::from_outcomes(
            trial_index,
            *params,
            vec![CircuitOutcome::Done { ratio: value }],
            started.elapsed(),
            TimeoutPolicy::Exclude,
        )
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SuiteError {
    #[error("benchmark suite is empty")]
    Empty,
    #[error("circuit {name}: {reason}")]
    Unusable { name: String, reason: String },
}

/// Place, route and score every circuit of a suite.
pub struct SuiteObjective<'a> {
    suite: &'a [Benchmark],
    device: &'a Device,
    pub deadline: Option<Duration>,
    pub swap_weight: u32,
    pub seed: u64,
    pub policy: TimeoutPolicy,
}

impl<'a> SuiteObjective<'a> {
    pub fn new(suite: &'a [Benchmark], device: &'a Device, seed: u64) -> Result<Self, SuiteError> {
        if suite.is_empty() {
            return Err(SuiteError::Empty);
        }
        for b in suite {
            let unusable = |reason: String| SuiteError::Unusable { name: b.name.clone(), reason };
            if b.circuit.num_qubits() > device.num_registers() {
                return Err(unusable(format!(
                    "{} qubits do not fit on {} registers",
                    b.circuit.num_qubits(),
                    device.num_registers()
                )));
            }
            if b.circuit.is_empty() {
                return Err(unusable("circuit has no gates".into()));
            }
        }
        Ok(Self {
            suite,
            device,
            deadline: None,
            swap_weight: crate::circuit::DEFAULT_SWAP_WEIGHT,
            seed,
            policy: TimeoutPolicy::Exclude,
        })
    }

    pub fn suite(&self) -> &[Benchmark] {
        self.suite
    }

    /// Lays out circuit `i` under `params`.
    pub fn layout_one(&self, i: usize, params: &QxxParams) -> CircuitOutcome {
        let b = &self.suite[i];
        let placement = match place(&b.circuit, self.device, params, self.deadline) {
            Ok(p) => p,
            Err(PlacementError::TimedOut(_)) => return CircuitOutcome::TimedOut,
            Err(e) => panic!("circuit {} was validated but placement failed: {e}", b.name),
        };
        let routed = route(&b.circuit, self.device, &placement.registers(), derive_seed(self.seed, i as u64))
            .expect("placement yields a complete injective mapping");
        let r = ratio(&b.circuit, &routed.circuit, self.swap_weight).expect("circuit has gates");
        CircuitOutcome::Done { ratio: r }
    }
}

impl Objective for SuiteObjective<'_> {
    fn evaluate(&self, trial_index: usize, params: &QxxParams) -> TrialRecord {
        let started = Instant::now();
        let per_circuit: Vec<CircuitOutcome> =
            (0..self.suite.len()).into_par_iter().map(|i| self.layout_one(i, params)).collect();
        TrialRecord::from_outcomes(trial_index, *params, per_circuit, started.elapsed(), self.policy)
    }
}

/// Runs `f` on a dedicated pool of `workers` threads.
pub fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> R {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool builds");
    pool.install(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchgen::generate_suite;
    use crate::circuit::Circuit;

    fn params(md: u32, mc: u32) -> QxxParams {
        QxxParams::new(md, mc, 1.0, 0.5, 2, 1.0)
    }

    #[test]
    fn timeout_policies() {
        let outcomes = vec![
            CircuitOutcome::Done { ratio: 1.0 },
            CircuitOutcome::TimedOut,
            CircuitOutcome::Done { ratio: 2.0 },
        ];
        let p = params(1, 1);
        let ex = TrialRecord::from_outcomes(0, p, outcomes.clone(), Duration::ZERO, TimeoutPolicy::Exclude);
        assert_eq!(ex.mean_ratio, Some(1.5));
        assert_eq!(ex.timeout_count, 1);
        let worst = TrialRecord::from_outcomes(0, p, outcomes, Duration::ZERO, TimeoutPolicy::Worst);
        assert_eq!(worst.mean_ratio, Some(5.0 / 3.0));
        let none = TrialRecord::from_outcomes(0, p, vec![CircuitOutcome::TimedOut], Duration::ZERO, TimeoutPolicy::Worst);
        assert!(!none.is_valid());
        assert_eq!(none.objective(), f64::INFINITY);
    }

    #[test]
    fn presatisfied_suite_scores_one() {
        // Every gate acts on (0,1); any placement puts them on an edge.
        let device = Device::linear(4);
        let circuit = Circuit::from_pairs(2, &[(0, 1), (1, 0), (0, 1)]).unwrap();
        let suite = vec![
            Benchmark { name: "a".into(), circuit: circuit.clone(), optimal_mapping: None, optimal_depth: 3 },
            Benchmark { name: "b".into(), circuit, optimal_mapping: None, optimal_depth: 3 },
        ];
        let obj = SuiteObjective::new(&suite, &device, 1).unwrap();
        let rec = obj.evaluate(0, &params(1, 1));
        assert_eq!(rec.mean_ratio, Some(1.0));
        assert_eq!(rec.timeout_count, 0);
    }

    #[test]
    fn suite_evaluation_is_deterministic() {
        let device = Device::aspen16();
        let suite = generate_suite(&device, &[5, 10], 2, 0.5, 3).unwrap();
        let obj = SuiteObjective::new(&suite, &device, 11).unwrap();
        let a = obj.evaluate(4, &params(1, 1));
        let b = with_workers(2, || obj.evaluate(4, &params(1, 1)));
        assert_eq!(a.per_circuit, b.per_circuit);
        assert_eq!(a.trial_index, 4);
        assert!(a.mean_ratio.unwrap() >= 1.0);
    }

    #[test]
    fn rejects_unusable_suites() {
        let device = Device::linear(3);
        assert!(matches!(SuiteObjective::new(&[], &device, 0), Err(SuiteError::Empty)));
        let big = Circuit::from_pairs(4, &[(0, 3)]).unwrap();
        let suite = vec![Benchmark { name: "big".into(), circuit: big, optimal_mapping: None, optimal_depth: 1 }];
        assert!(matches!(SuiteObjective::new(&suite, &device, 0), Err(SuiteError::Unusable { .. })));
    }
}
