//! Count and Rank importance metrics, and mean-ratio tables by depth.
//!
//! Both metrics work on a layout table. For one benchmark depth and one
//! MaxDepth value, every configuration's ratios are averaged over the
//! circuits of that depth, and the 100 lowest averages form the sample.
//! Count is how many sampled configurations set a parameter to a value;
//! Rank sums Count over MaxDepth 1, 5 and 9.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::optimizer::ParamName;
use crate::results::LayoutRow;

pub const SAMPLE_SIZE: usize = 100;
pub const RANK_MAX_DEPTHS: [u32; 3] = [1, 5, 9];

const VALUE_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("no results for benchmark depth {tfl_depth} at MaxDepth {max_depth}")]
    MissingSlice { tfl_depth: usize, max_depth: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Count {
    pub count: usize,
    /// Configurations in the sample; above 100 only with ties at the cut.
    pub sample: usize,
}

fn config_key(r: &LayoutRow) -> [u64; 6] {
    r.params().to_array().map(f64::to_bits)
}

/// Configurations of one slice with their mean ratio, ascending, ties in
/// first-appearance order.
fn slice_averages(rows: &[LayoutRow], tfl_depth: usize, max_depth: u32) -> Vec<(f64, &LayoutRow)> {
    let mut groups: BTreeMap<[u64; 6], (usize, f64, usize, &LayoutRow)> = BTreeMap::new();
    let mut order = 0;
    for r in rows.iter().filter(|r| r.optimal_depth == tfl_depth && r.max_depth == max_depth) {
        let e = groups.entry(config_key(r)).or_insert_with(|| {
            order += 1;
            (order, 0.0, 0, r)
        });
        if let Some(v) = r.ratio {
            e.1 += v;
            e.2 += 1;
        }
    }
    let mut avgs: Vec<(usize, f64, &LayoutRow)> =
        groups.into_values().filter(|g| g.2 > 0).map(|(o, s, n, r)| (o, s / n as f64, r)).collect();
    avgs.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    avgs.into_iter().map(|(_, v, r)| (v, r)).collect()
}

/// The lowest-average sample of a slice, extended to include every
/// configuration tied with the last one.
fn sample(rows: &[LayoutRow], tfl_depth: usize, max_depth: u32) -> Result<Vec<(f64, &LayoutRow)>, MetricsError> {
    let mut avgs = slice_averages(rows, tfl_depth, max_depth);
    if avgs.is_empty() {
        return Err(MetricsError::MissingSlice { tfl_depth, max_depth });
    }
    if avgs.len() < SAMPLE_SIZE {
        log::warn!(
            "only {} configurations at depth {tfl_depth}, MaxDepth {max_depth}; counting all of them",
            avgs.len()
        );
        return Ok(avgs);
    }
    let cut = avgs[SAMPLE_SIZE - 1].0;
    let end = avgs.iter().position(|a| a.0 > cut).unwrap_or(avgs.len());
    avgs.truncate(end);
    Ok(avgs)
}

pub fn count(
    rows: &[LayoutRow],
    param: ParamName,
    value: f64,
    tfl_depth: usize,
    max_depth: u32,
) -> Result<Count, MetricsError> {
    let s = sample(rows, tfl_depth, max_depth)?;
    let count = s.iter().filter(|(_, r)| (param.value(&r.params()) - value).abs() < VALUE_TOL).count();
    Ok(Count { count, sample: s.len() })
}

pub fn rank(rows: &[LayoutRow], param: ParamName, value: f64, tfl_depth: usize) -> Result<usize, MetricsError> {
    RANK_MAX_DEPTHS.iter().map(|&md| count(rows, param, value, tfl_depth, md).map(|c| c.count)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GroupBy {
    /// One curve per parameter configuration.
    Config,
    /// One curve per value of a parameter, pooling everything else.
    Param(ParamName),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub depth: usize,
    pub label: String,
    pub mean_ratio: f64,
    /// Ratios averaged; timed-out layouts are not counted.
    pub n: usize,
}

/// Mean ratio per (benchmark depth, label), sorted by depth and then by
/// first appearance of the label.
pub fn report(rows: &[LayoutRow], group_by: GroupBy) -> Vec<ReportRow> {
    let mut labels: BTreeMap<String, usize> = BTreeMap::new();
    let mut acc: BTreeMap<(usize, usize), (String, f64, usize)> = BTreeMap::new();
    for r in rows {
        let label = match group_by {
            GroupBy::Config => r.params().to_string(),
            GroupBy::Param(p) => format!("{}={}", p, p.value(&r.params())),
        };
        let next = labels.len();
        let id = *labels.entry(label.clone()).or_insert(next);
        let e = acc.entry((r.optimal_depth, id)).or_insert((label, 0.0, 0));
        if let Some(v) = r.ratio {
            e.1 += v;
            e.2 += 1;
        }
    }
    acc.into_iter()
        .filter(|(_, (_, _, n))| *n > 0)
        .map(|((depth, _), (label, sum, n))| ReportRow { depth, label, mean_ratio: sum / n as f64, n })
        .collect()
}
