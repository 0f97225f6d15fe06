//! k-fold splitting, grid search and nested cross-validation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Hyper, Model, Scaler, SurrogateError};
use crate::seed::derive_seed;

/// Shuffled partition of `0..n` into `k` folds whose sizes differ by at most one.
pub fn kfold(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>, SurrogateError> {
    if k < 2 || n < k {
        return Err(SurrogateError::Data(format!("cannot split {n} rows into {k} folds")));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut folds = vec![Vec::with_capacity(n / k + 1); k];
    for (pos, i) in idx.into_iter().enumerate() {
        folds[pos % k].push(i);
    }
    Ok(folds)
}

fn split(folds: &[Vec<usize>], holdout: usize) -> (Vec<usize>, &[usize]) {
    let train = folds.iter().enumerate().filter(|(f, _)| *f != holdout).flat_map(|(_, v)| v.iter().copied()).collect();
    (train, &folds[holdout])
}

fn gather(x: &[Vec<f64>], y: &[f64], idx: &[usize]) -> (Vec<Vec<f64>>, Vec<f64>) {
    (idx.iter().map(|&i| x[i].clone()).collect(), idx.iter().map(|&i| y[i]).collect())
}

/// Fits scaler and model on the training rows, returns the MSE on the
/// validation rows.
pub fn holdout_mse(
    x: &[Vec<f64>],
    y: &[f64],
    train: &[usize],
    validate: &[usize],
    hyper: &Hyper,
) -> Result<f64, SurrogateError> {
    let (tx, ty) = gather(x, y, train);
    let scaler = Scaler::fit(&tx);
    let model = Model::fit(hyper, &scaler.transform_all(&tx), &ty)?;
    let sse: f64 = validate
        .iter()
        .map(|&i| {
            let e = model.predict(&scaler.transform(&x[i])) - y[i];
            e * e
        })
        .sum();
    Ok(sse / validate.len() as f64)
}

/// Mean k-fold MSE per grid entry, and the index of the lowest (first on ties).
pub fn grid_search(
    x: &[Vec<f64>],
    y: &[f64],
    grid: &[Hyper],
    folds: usize,
    seed: u64,
) -> Result<(usize, Vec<f64>), SurrogateError> {
    if grid.is_empty() {
        return Err(SurrogateError::EmptyGrid);
    }
    let parts = kfold(x.len(), folds, seed)?;
    let mut scores = Vec::with_capacity(grid.len());
    for h in grid {
        let mut total = 0.0;
        for f in 0..folds {
            let (train, val) = split(&parts, f);
            total += holdout_mse(x, y, &train, val, h)?;
        }
        scores.push(total / folds as f64);
    }
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if *s < scores[best] {
            best = i;
        }
    }
    Ok((best, scores))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub fold_mse: Vec<f64>,
    pub mean_mse: f64,
    /// Sample standard deviation of `fold_mse`.
    pub sd_mse: f64,
    /// Grid entry picked by the inner search of each outer fold.
    pub fold_best: Vec<Hyper>,
    /// Grid entry picked by an inner-style search over all rows.
    pub best: Hyper,
    /// Population variance of the targets, the MSE of a constant predictor.
    pub target_variance: f64,
}

/// Outer `outer`-fold estimate of the error of "grid search with
/// `inner`-fold CV, then refit". Scalers only ever see training rows.
pub fn cross_validate(
    x: &[Vec<f64>],
    y: &[f64],
    grid: &[Hyper],
    outer: usize,
    inner: usize,
    seed: u64,
) -> Result<CvReport, SurrogateError> {
    if grid.is_empty() {
        return Err(SurrogateError::EmptyGrid);
    }
    if x.len() != y.len() {
        return Err(SurrogateError::Data(format!("{} rows for {} targets", x.len(), y.len())));
    }
    let parts = kfold(x.len(), outer, seed)?;
    let folds: Vec<(f64, Hyper)> = (0..outer)
        .into_par_iter()
        .map(|f| {
            let (train, test) = split(&parts, f);
            let (tx, ty) = gather(x, y, &train);
            let (best, _) = grid_search(&tx, &ty, grid, inner, derive_seed(seed, f as u64 + 1))?;
            let mse = holdout_mse(x, y, &train, test, &grid[best])?;
            Ok((mse, grid[best].clone()))
        })
        .collect::<Result<_, SurrogateError>>()?;
    let (best, _) = grid_search(x, y, grid, inner, derive_seed(seed, 0))?;

    let fold_mse: Vec<f64> = folds.iter().map(|f| f.0).collect();
    let k = fold_mse.len() as f64;
    let mean_mse = fold_mse.iter().sum::<f64>() / k;
    let sd_mse = (fold_mse.iter().map(|m| (m - mean_mse).powi(2)).sum::<f64>() / (k - 1.0)).sqrt();
    let ym = y.iter().sum::<f64>() / y.len() as f64;
    let target_variance = y.iter().map(|v| (v - ym).powi(2)).sum::<f64>() / y.len() as f64;
    Ok(CvReport {
        fold_mse,
        mean_mse,
        sd_mse,
        fold_best: folds.into_iter().map(|f| f.1).collect(),
        best: grid[best].clone(),
        target_variance,
    })
}
