//! Bagged regression trees and their main-effect variance decomposition.
//!
//! For each tree the domain is the uniform distribution over the parameter
//! grid. The tree is piecewise constant on axis-aligned boxes, so its mean,
//! total variance and single-parameter marginals are computed exactly from
//! the leaf boxes. A parameter's importance is the variance of its marginal
//! divided by the tree's total variance, averaged over trees.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
enum Node {
    Leaf(f64),
    Split { dim: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Debug, Clone)]
pub struct RegressionTree {
    nodes: Vec<Node>,
}

#[derive(Debug, Clone, Copy)]
pub struct TreeConfig {
    pub min_samples_leaf: usize,
    pub max_depth: usize,
}

impl Default for TreeConfig {
    fn default() -> Self {
        Self { min_samples_leaf: 2, max_depth: 16 }
    }
}

impl RegressionTree {
    pub fn fit(x: &[[f64; 6]], y: &[f64], rows: &[usize], config: TreeConfig) -> Self {
        let mut tree = Self { nodes: Vec::new() };
        let mut rows = rows.to_vec();
        tree.grow(x, y, &mut rows, 0, config);
        tree
    }

    fn grow(&mut self, x: &[[f64; 6]], y: &[f64], rows: &mut [usize], depth: usize, config: TreeConfig) -> usize {
        let id = self.nodes.len();
        let mean = rows.iter().map(|&r| y[r]).sum::<f64>() / rows.len() as f64;
        self.nodes.push(Node::Leaf(mean));
        if depth >= config.max_depth || rows.len() < 2 * config.min_samples_leaf {
            return id;
        }
        let Some((dim, threshold)) = best_split(x, y, rows, config.min_samples_leaf) else {
            return id;
        };
        rows.sort_by(|&a, &b| x[a][dim].total_cmp(&x[b][dim]));
        let cut = rows.partition_point(|&r| x[r][dim] <= threshold);
        let (lo, hi) = rows.split_at_mut(cut);
        let left = self.grow(x, y, lo, depth + 1, config);
        let right = self.grow(x, y, hi, depth + 1, config);
        self.nodes[id] = Node::Split { dim, threshold, left, right };
        id
    }

    pub fn predict(&self, point: &[f64; 6]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                Node::Leaf(v) => return v,
                Node::Split { dim, threshold, left, right } => {
                    at = if point[dim] <= threshold { left } else { right };
                }
            }
        }
    }

    /// Leaf boxes as `(value, per-dim (lo, hi])`.
    fn leaves(&self) -> Vec<(f64, [(f64, f64); 6])> {
        let mut out = Vec::new();
        let mut stack = vec![(0usize, [(f64::NEG_INFINITY, f64::INFINITY); 6])];
        while let Some((at, bounds)) = stack.pop() {
            match self.nodes[at] {
                Node::Leaf(v) => out.push((v, bounds)),
                Node::Split { dim, threshold, left, right } => {
                    let mut lb = bounds;
                    lb[dim].1 = lb[dim].1.min(threshold);
                    let mut rb = bounds;
                    rb[dim].0 = rb[dim].0.max(threshold);
                    stack.push((right, rb));
                    stack.push((left, lb));
                }
            }
        }
        out
    }

    /// Per-dimension main-effect variance fractions over the uniform grid
    /// `domain`. `None` when the tree is constant over the domain.
    pub fn variance_fractions(&self, domain: &[Vec<f64>; 6]) -> Option<[f64; 6]> {
        // index range of grid values inside (lo, hi]
        let range = |k: usize, (lo, hi): (f64, f64)| {
            let vals = &domain[k];
            let start = vals.partition_point(|&v| v <= lo);
            let end = vals.partition_point(|&v| v <= hi);
            (start, end.max(start))
        };
        let leaves: Vec<(f64, [(usize, usize); 6])> = self
            .leaves()
            .into_iter()
            .map(|(v, b)| {
                let mut r = [(0, 0); 6];
                for k in 0..6 {
                    r[k] = range(k, b[k]);
                }
                (v, r)
            })
            .collect();
        let frac = |k: usize, (s, e): (usize, usize)| (e - s) as f64 / domain[k].len() as f64;

        let mut mean = 0.0;
        let mut second = 0.0;
        for (v, r) in &leaves {
            let vol: f64 = (0..6).map(|k| frac(k, r[k])).product();
            mean += vol * v;
            second += vol * v * v;
        }
        let total = second - mean * mean;
        if total <= 1e-14 * second.abs().max(1e-300) {
            return None;
        }

        let mut out = [0.0; 6];
        for k in 0..6 {
            let len = domain[k].len();
            let mut diff = vec![0.0; len + 1];
            for (v, r) in &leaves {
                let (s, e) = r[k];
                if s == e {
                    continue;
                }
                let weight: f64 = (0..6).filter(|&j| j != k).map(|j| frac(j, r[j])).product();
                diff[s] += v * weight;
                diff[e] -= v * weight;
            }
            let mut acc = 0.0;
            let mut var = 0.0;
            for d in diff.iter().take(len) {
                acc += d;
                var += (acc - mean) * (acc - mean);
            }
            out[k] = (var / len as f64) / total;
        }
        Some(out)
    }
}

fn best_split(x: &[[f64; 6]], y: &[f64], rows: &[usize], min_leaf: usize) -> Option<(usize, f64)> {
    let n = rows.len();
    let total: f64 = rows.iter().map(|&r| y[r]).sum();
    let total_sq: f64 = rows.iter().map(|&r| y[r] * y[r]).sum();
    let parent_sse = total_sq - total * total / n as f64;
    let mut best: Option<(f64, usize, f64)> = None;
    let mut sorted = rows.to_vec();
    for dim in 0..6 {
        sorted.sort_by(|&a, &b| x[a][dim].total_cmp(&x[b][dim]));
        let mut left_sum = 0.0;
        let mut left_sq = 0.0;
        for i in 0..n - 1 {
            let yi = y[sorted[i]];
            left_sum += yi;
            left_sq += yi * yi;
            let nl = i + 1;
            let nr = n - nl;
            let (xa, xb) = (x[sorted[i]][dim], x[sorted[i + 1]][dim]);
            if nl < min_leaf || nr < min_leaf || xa == xb {
                continue;
            }
            let right_sum = total - left_sum;
            let right_sq = total_sq - left_sq;
            let sse = (left_sq - left_sum * left_sum / nl as f64) + (right_sq - right_sum * right_sum / nr as f64);
            if best.is_none_or(|(b, _, _)| sse < b) {
                best = Some((sse, dim, 0.5 * (xa + xb)));
            }
        }
    }
    match best {
        Some((sse, dim, thr)) if sse < parent_sse - 1e-12 * parent_sse.abs() => Some((dim, thr)),
        _ => None,
    }
}

#[derive(Debug, Clone)]
pub struct RegressionForest {
    trees: Vec<RegressionTree>,
}

impl RegressionForest {
    /// Fits `n_trees` trees on bootstrap resamples.
    pub fn fit(x: &[[f64; 6]], y: &[f64], n_trees: usize, config: TreeConfig, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = x.len();
        let trees = (0..n_trees)
            .map(|_| {
                let rows: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
                RegressionTree::fit(x, y, &rows, config)
            })
            .collect();
        Self { trees }
    }

    pub fn predict(&self, point: &[f64; 6]) -> f64 {
        self.trees.iter().map(|t| t.predict(point)).sum::<f64>() / self.trees.len() as f64
    }

    /// Mean per-tree main-effect fractions; `None` if every tree is constant.
    pub fn main_effects(&self, domain: &[Vec<f64>; 6]) -> Option<[f64; 6]> {
        let mut acc = [0.0; 6];
        let mut used = 0;
        for t in &self.trees {
            if let Some(f) = t.variance_fractions(domain) {
                for k in 0..6 {
                    acc[k] += f[k];
                }
                used += 1;
            }
        }
        if used == 0 {
            return None;
        }
        Some(acc.map(|a| a / used as f64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_domain() -> [Vec<f64>; 6] {
        [
            vec![0.0, 1.0, 2.0, 3.0],
            vec![0.0, 1.0],
            vec![0.0, 1.0, 2.0],
            vec![0.0, 1.0],
            vec![0.0, 1.0],
            vec![0.0, 1.0],
        ]
    }

    fn full_grid(domain: &[Vec<f64>; 6]) -> Vec<[f64; 6]> {
        let mut pts = vec![[0.0; 6]];
        for k in 0..6 {
            pts = pts
                .into_iter()
                .flat_map(|p| {
                    domain[k].iter().map(move |&v| {
                        let mut q = p;
                        q[k] = v;
                        q
                    })
                })
                .collect();
        }
        pts
    }

    #[test]
    fn tree_reproduces_training_grid() {
        let domain = small_domain();
        let x = full_grid(&domain);
        let y: Vec<f64> = x.iter().map(|p| p[0] * 2.0 + p[2]).collect();
        let rows: Vec<usize> = (0..x.len()).collect();
        let tree = RegressionTree::fit(&x, &y, &rows, TreeConfig { min_samples_leaf: 1, max_depth: 32 });
        for (p, t) in x.iter().zip(&y) {
            assert!((tree.predict(p) - t).abs() < 1e-9);
        }
    }

    #[test]
    fn exact_fractions_for_additive_function() {
        // f = g(x0) + h(x2): main effects carry all of the variance,
        // split in proportion to Var g and Var h over the grid.
        let domain = small_domain();
        let x = full_grid(&domain);
        let g = |v: f64| v * 2.0; // values 0,2,4,6: variance 5
        let h = |v: f64| v; // values 0,1,2: variance 2/3
        let y: Vec<f64> = x.iter().map(|p| g(p[0]) + h(p[2])).collect();
        let rows: Vec<usize> = (0..x.len()).collect();
        let tree = RegressionTree::fit(&x, &y, &rows, TreeConfig { min_samples_leaf: 1, max_depth: 32 });
        let f = tree.variance_fractions(&domain).unwrap();
        let total = 5.0 + 2.0 / 3.0;
        assert!((f[0] - 5.0 / total).abs() < 1e-9);
        assert!((f[2] - (2.0 / 3.0) / total).abs() < 1e-9);
        for k in [1, 3, 4, 5] {
            assert!(f[k].abs() < 1e-12);
        }
    }

    #[test]
    fn constant_target_has_no_effects() {
        let domain = small_domain();
        let x = full_grid(&domain);
        let y = vec![3.0; x.len()];
        let forest = RegressionForest::fit(&x, &y, 5, TreeConfig::default(), 1);
        assert!(forest.main_effects(&domain).is_none());
        assert_eq!(forest.predict(&x[0]), 3.0);
    }
}
