//! Exhaustive grid search, uniform random search and weighted random search.
//!
//! Weighted random search starts with `n0` uniform trials, estimates how much
//! of the objective's variance each parameter explains, and then proposes new
//! trials by copying the incumbent and resampling each parameter with a
//! probability proportional to its importance.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::forest::{RegressionForest, TreeConfig};
use super::space::ParamSpace;
use super::{with_workers, Objective, TrialRecord};
use crate::seed::derive_seed;

/// Smallest probability of change, so every parameter can still move.
pub const MIN_PROBABILITY: f64 = 0.01;

const FOREST_TREES: usize = 30;

#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceWeights {
    /// Percent of objective variance explained by each parameter alone.
    pub weights: [f64; 6],
    pub probabilities: [f64; 6],
}

impl ImportanceWeights {
    /// Probabilities are `weight / max(weight)`, floored at
    /// [`MIN_PROBABILITY`]. All-zero weights give probability 1 everywhere.
    pub fn from_weights(weights: [f64; 6]) -> Self {
        let max = weights.iter().copied().fold(0.0, f64::max);
        let probabilities = if max > 0.0 {
            weights.map(|w| (w / max).max(MIN_PROBABILITY))
        } else {
            [1.0; 6]
        };
        Self { weights, probabilities }
    }

    pub fn uniform() -> Self {
        Self::from_weights([100.0 / 6.0; 6])
    }
}

/// Main-effect importance of each parameter over `history`.
///
/// Trials without a mean ratio are ignored. Fewer than two usable trials or
/// a constant objective give uniform weights.
pub fn importance(history: &[TrialRecord], space: &ParamSpace, seed: u64) -> ImportanceWeights {
    let usable: Vec<&TrialRecord> = history.iter().filter(|t| t.is_valid()).collect();
    if usable.len() < 2 {
        return ImportanceWeights::uniform();
    }
    let x: Vec<[f64; 6]> = usable.iter().map(|t| t.params.to_array()).collect();
    let y: Vec<f64> = usable.iter().map(|t| t.objective()).collect();
    let forest = RegressionForest::fit(&x, &y, FOREST_TREES, TreeConfig::default(), seed);
    match forest.main_effects(space.dims()) {
        Some(fractions) => ImportanceWeights::from_weights(fractions.map(|f| 100.0 * f)),
        None => ImportanceWeights::uniform(),
    }
}

/// Index of the first trial with the strictly lowest objective.
pub fn best_index(history: &[TrialRecord]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, t) in history.iter().enumerate() {
        if t.is_valid() && best.is_none_or(|b| t.objective() < history[b].objective()) {
            best = Some(i);
        }
    }
    best
}

#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub history: Vec<TrialRecord>,
    pub best: Option<usize>,
    /// Incumbent objective after each trial.
    pub incumbent_trace: Vec<f64>,
    /// Weights used by the second phase of weighted random search.
    pub weights: Option<ImportanceWeights>,
}

impl SearchOutcome {
    fn from_history(history: Vec<TrialRecord>, weights: Option<ImportanceWeights>) -> Self {
        let mut incumbent_trace = Vec::with_capacity(history.len());
        let mut best = f64::INFINITY;
        for t in &history {
            best = best.min(t.objective());
            incumbent_trace.push(best);
        }
        Self { best: best_index(&history), history, incumbent_trace, weights }
    }

    pub fn best_record(&self) -> Option<&TrialRecord> {
        self.best.map(|i| &self.history[i])
    }

    pub fn best_objective(&self) -> f64 {
        self.best_record().map_or(f64::INFINITY, TrialRecord::objective)
    }
}

fn evaluate_all(
    space: &ParamSpace,
    objective: &dyn Objective,
    points: &[[usize; 6]],
    first_index: usize,
) -> Vec<TrialRecord> {
    points
        .par_iter()
        .enumerate()
        .map(|(i, &idx)| objective.evaluate(first_index + i, &space.point(idx)))
        .collect()
}

/// Every grid point, in lexicographic order.
pub fn exhaustive(space: &ParamSpace, objective: &dyn Objective, workers: usize) -> Vec<TrialRecord> {
    let points: Vec<[usize; 6]> = space.iter().collect();
    with_workers(workers, || evaluate_all(space, objective, &points, 0))
}

/// `n_total` independent uniform draws from the grid.
pub fn random_search(
    space: &ParamSpace,
    objective: &dyn Objective,
    n_total: usize,
    seed: u64,
    workers: usize,
) -> SearchOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<[usize; 6]> = (0..n_total).map(|_| space.sample_indices(&mut rng)).collect();
    let history = with_workers(workers, || evaluate_all(space, objective, &points, 0));
    SearchOutcome::from_history(history, None)
}

#[derive(Debug, Clone)]
pub struct WrsConfig {
    /// Uniform trials before importance weighting starts.
    pub n0: usize,
    pub n_total: usize,
    pub seed: u64,
    /// Proposals drawn from the same incumbent snapshot and evaluated together.
    pub batch_size: usize,
    /// Fixed probabilities of change; computed from the first phase when `None`.
    pub probabilities: Option<[f64; 6]>,
}

impl WrsConfig {
    pub fn new(n0: usize, n_total: usize, seed: u64) -> Self {
        Self { n0, n_total, seed, batch_size: 1, probabilities: None }
    }
}

fn index_of(values: &[f64], v: f64) -> usize {
    values
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - v).abs().total_cmp(&(b.1 - v).abs()))
        .map(|(i, _)| i)
        .expect("dimension is nonempty")
}

/// Weighted random search. Deterministic for a given configuration,
/// independent of `workers`.
pub fn wrs(space: &ParamSpace, objective: &dyn Objective, config: &WrsConfig, workers: usize) -> SearchOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n0 = config.n0.min(config.n_total);
    let first: Vec<[usize; 6]> = (0..n0).map(|_| space.sample_indices(&mut rng)).collect();
    with_workers(workers, || {
        let mut history = evaluate_all(space, objective, &first, 0);
        let weights = match config.probabilities {
            Some(p) => ImportanceWeights { weights: p.map(|v| 100.0 * v), probabilities: p },
            None => importance(&history, space, derive_seed(config.seed, 0x5752_5346)),
        };
        let dims = space.dims();
        let batch = config.batch_size.max(1);
        while history.len() < config.n_total {
            let incumbent = best_index(&history).map(|b| {
                let p = history[b].params.to_array();
                let mut idx = [0; 6];
                for k in 0..6 {
                    idx[k] = index_of(&dims[k], p[k]);
                }
                idx
            });
            let count = batch.min(config.n_total - history.len());
            let proposals: Vec<[usize; 6]> = (0..count)
                .map(|_| match incumbent {
                    None => space.sample_indices(&mut rng),
                    Some(inc) => {
                        let mut idx = inc;
                        for k in 0..6 {
                            let p = weights.probabilities[k];
                            if p >= 1.0 || rng.gen_bool(p.max(0.0)) {
                                idx[k] = rng.gen_range(0..dims[k].len());
                            }
                        }
                        idx
                    }
                })
                .collect();
            let start = history.len();
            history.extend(evaluate_all(space, objective, &proposals, start));
        }
        SearchOutcome::from_history(history, Some(weights))
    })
}
