//! CSV tables written by sweeps and searches.
//!
//! Two tables exist. The trial table has one row per configuration. The
//! layout table has one row per (configuration, circuit) and carries the
//! circuit's graph features, which makes it the surrogate's training set.

use std::io;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::benchgen::Benchmark;
use crate::optimizer::TrialRecord;
use crate::placement::QxxParams;
use crate::surrogate::GraphFeatures;

#[derive(Debug, Error)]
pub enum ResultsError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("trial {trial} has {got} outcomes for a suite of {want} circuits")]
    SuiteMismatch { trial: usize, got: usize, want: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial_index: usize,
    pub max_depth: u32,
    pub max_children: u32,
    pub b: f64,
    pub c: f64,
    pub movement_factor: u32,
    pub edge_cost: f64,
    pub mean_ratio: Option<f64>,
    pub timeouts: usize,
    pub wall_ms: u64,
}

impl TrialRow {
    /// `wall_ms` is zeroed unless `timing` is set, keeping files reproducible.
    pub fn from_record(t: &TrialRecord, timing: bool) -> Self {
        let p = t.params;
        Self {
            trial_index: t.trial_index,
            max_depth: p.max_depth,
            max_children: p.max_children,
            b: p.b,
            c: p.c,
            movement_factor: p.movement_factor,
            edge_cost: p.edge_cost,
            mean_ratio: t.mean_ratio,
            timeouts: t.timeout_count,
            wall_ms: if timing { t.wall_time.as_millis() as u64 } else { 0 },
        }
    }

    pub fn params(&self) -> QxxParams {
        QxxParams::new(self.max_depth, self.max_children, self.b, self.c, self.movement_factor, self.edge_cost)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutRow {
    pub trial_index: usize,
    pub circuit: String,
    pub optimal_depth: usize,
    /// Empty when the layout timed out.
    pub ratio: Option<f64>,
    pub max_page_rank: f64,
    pub nr_conn_comp: f64,
    pub edges: f64,
    pub nodes: f64,
    pub efficiency: f64,
    pub smetric: f64,
    pub max_depth: u32,
    pub max_children: u32,
    pub b: f64,
    pub c: f64,
    pub movement_factor: u32,
    pub edge_cost: f64,
}

impl LayoutRow {
    pub fn params(&self) -> QxxParams {
        QxxParams::new(self.max_depth, self.max_children, self.b, self.c, self.movement_factor, self.edge_cost)
    }

    pub fn graph_features(&self) -> GraphFeatures {
        GraphFeatures {
            max_page_rank: self.max_page_rank,
            nr_conn_comp: self.nr_conn_comp,
            edges: self.edges,
            nodes: self.nodes,
            efficiency: self.efficiency,
            smetric: self.smetric,
        }
    }
}

/// One row per circuit of `record`. `features[i]` belongs to `suite[i]`.
pub fn layout_rows(
    record: &TrialRecord,
    suite: &[Benchmark],
    features: &[GraphFeatures],
) -> Result<Vec<LayoutRow>, ResultsError> {
    if record.per_circuit.len() != suite.len() || features.len() != suite.len() {
        return Err(ResultsError::SuiteMismatch {
            trial: record.trial_index,
            got: record.per_circuit.len(),
            want: suite.len(),
        });
    }
    let p = record.params;
    Ok(record
        .per_circuit
        .iter()
        .zip(suite)
        .zip(features)
        .map(|((outcome, bench), f)| LayoutRow {
            trial_index: record.trial_index,
            circuit: bench.name.clone(),
            optimal_depth: bench.optimal_depth,
            ratio: outcome.ratio(),
            max_page_rank: f.max_page_rank,
            nr_conn_comp: f.nr_conn_comp,
            edges: f.edges,
            nodes: f.nodes,
            efficiency: f.efficiency,
            smetric: f.smetric,
            max_depth: p.max_depth,
            max_children: p.max_children,
            b: p.b,
            c: p.c,
            movement_factor: p.movement_factor,
            edge_cost: p.edge_cost,
        })
        .collect())
}

pub fn write_rows<W: io::Write, T: Serialize>(writer: W, rows: &[T]) -> Result<(), ResultsError> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_rows<R: io::Read, T: for<'de> Deserialize<'de>>(reader: R) -> Result<Vec<T>, ResultsError> {
    let mut r = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for row in r.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::time::Duration;

    use super::*;
    use crate::circuit::Circuit;
    use crate::optimizer::{CircuitOutcome, TimeoutPolicy};

    fn record() -> TrialRecord {
        TrialRecord::from_outcomes(
            3,
            QxxParams::new(5, 9, 2.0, 0.25, 6, 0.6),
            vec![CircuitOutcome::Done { ratio: 1.5 }, CircuitOutcome::TimedOut],
            Duration::from_millis(42),
            TimeoutPolicy::Exclude,
        )
    }

    #[test]
    fn trial_rows_round_trip() {
        let rows = vec![TrialRow::from_record(&record(), true), TrialRow::from_record(&record(), false)];
        assert_eq!(rows[0].wall_ms, 42);
        assert_eq!(rows[1].wall_ms, 0);
        let mut buf = Vec::new();
        write_rows(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with(
            "trial_index,max_depth,max_children,b,c,movement_factor,edge_cost,mean_ratio,timeouts,wall_ms\n"
        ));
        let back: Vec<TrialRow> = read_rows(buf.as_slice()).unwrap();
        assert_eq!(back, rows);
        assert_eq!(back[0].params(), record().params);
    }

    #[test]
    fn layout_rows_mark_timeouts_empty() {
        let c = Circuit::from_pairs(3, &[(0, 1), (1, 2)]).unwrap();
        let suite: Vec<Benchmark> = ["x", "y"]
            .iter()
            .map(|n| Benchmark { name: n.to_string(), circuit: c.clone(), optimal_mapping: None, optimal_depth: 2 })
            .collect();
        let feats = vec![GraphFeatures::of(&c); 2];
        let rows = layout_rows(&record(), &suite, &feats).unwrap();
        assert_eq!(rows[0].ratio, Some(1.5));
        assert_eq!(rows[1].ratio, None);
        let mut buf = Vec::new();
        write_rows(&mut buf, &rows).unwrap();
        let back: Vec<LayoutRow> = read_rows(buf.as_slice()).unwrap();
        assert_eq!(back, rows);
        assert!(layout_rows(&record(), &suite[..1], &feats[..1]).is_err());
    }
}
