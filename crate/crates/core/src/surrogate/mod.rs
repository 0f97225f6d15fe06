//! Learned predictors of the depth ratio.
//!
//! Inputs are twelve features: six describing the circuit's interaction
//! graph, followed by the six placement parameters (see
//! [`features::FEATURE_NAMES`]). Features are min-max scaled with ranges
//! learned on the training rows, then fed to a KNN or MLP regressor.

pub mod cv;
pub mod features;
pub mod knn;
pub mod mlp;
pub mod scaler;

use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::benchgen::Benchmark;
use crate::optimizer::{CircuitOutcome, Objective, TimeoutPolicy, TrialRecord};
use crate::placement::QxxParams;
use crate::results::LayoutRow;

pub use cv::{cross_validate, grid_search, kfold, CvReport};
pub use features::{feature_vector, GraphFeatures, FEATURE_NAMES};
pub use knn::{Knn, KnnParams};
pub use mlp::{Activation, Mlp, MlpConfig};
pub use scaler::Scaler;

#[derive(Debug, Error)]
pub enum SurrogateError {
    #[error("bad training data: {0}")]
    Data(String),
    #[error("bad hyperparameters: {0}")]
    Hyper(String),
    #[error("training diverged (non-finite loss) in epoch {epoch}; lower the learning rate")]
    Diverged { epoch: usize },
    #[error("hyperparameter grid is empty")]
    EmptyGrid,
    #[error("model file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("model expects {want} features, got {got}")]
    FeatureCount { want: usize, got: usize },
}

/// A model family together with its hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Hyper {
    Knn(KnnParams),
    Mlp(MlpConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Model {
    Knn(Knn),
    Mlp(Mlp),
}

impl Model {
    /// Fits on already scaled inputs.
    pub fn fit(hyper: &Hyper, x: &[Vec<f64>], y: &[f64]) -> Result<Self, SurrogateError> {
        Ok(match hyper {
            Hyper::Knn(p) => Model::Knn(Knn::fit(x, y, *p)?),
            Hyper::Mlp(c) => Model::Mlp(Mlp::train(x, y, c)?),
        })
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        match self {
            Model::Knn(m) => m.predict(x),
            Model::Mlp(m) => m.predict(x),
        }
    }
}

/// A trained scaler + model pair, serialized as the model file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Surrogate {
    pub feature_names: Vec<String>,
    pub scaler: Scaler,
    pub hyper: Hyper,
    pub training_rows: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cv: Option<CvReport>,
    pub model: Model,
}

impl Surrogate {
    pub fn train(x: &[Vec<f64>], y: &[f64], hyper: &Hyper) -> Result<Self, SurrogateError> {
        if x.is_empty() || x.len() != y.len() {
            return Err(SurrogateError::Data(format!("{} rows for {} targets", x.len(), y.len())));
        }
        let scaler = Scaler::fit(x);
        let model = Model::fit(hyper, &scaler.transform_all(x), y)?;
        let dim = x[0].len();
        let feature_names = if dim == FEATURE_NAMES.len() {
            FEATURE_NAMES.iter().map(|s| s.to_string()).collect()
        } else {
            (0..dim).map(|i| format!("x{i}")).collect()
        };
        Ok(Self { feature_names, scaler, hyper: hyper.clone(), training_rows: x.len(), cv: None, model })
    }

    pub fn predict(&self, features: &[f64]) -> Result<f64, SurrogateError> {
        if features.len() != self.feature_names.len() {
            return Err(SurrogateError::FeatureCount { want: self.feature_names.len(), got: features.len() });
        }
        Ok(self.model.predict(&self.scaler.transform(features)))
    }

    pub fn predict_layout(&self, graph: &GraphFeatures, params: &QxxParams) -> f64 {
        self.model.predict(&self.scaler.transform(&feature_vector(graph, params)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, SurrogateError> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Feature rows and ratio targets from a layout table; timed-out layouts
/// have no target and are skipped.
pub fn dataset(rows: &[LayoutRow]) -> (Vec<Vec<f64>>, Vec<f64>) {
    rows.iter()
        .filter_map(|r| r.ratio.map(|t| (feature_vector(&r.graph_features(), &r.params()), t)))
        .unzip()
}

/// Scores a configuration by the mean predicted ratio over a suite.
pub struct SurrogateObjective<'a> {
    model: &'a Surrogate,
    features: Vec<GraphFeatures>,
}

impl<'a> SurrogateObjective<'a> {
    pub fn new(model: &'a Surrogate, suite: &[Benchmark]) -> Self {
        Self { model, features: suite.iter().map(|b| GraphFeatures::of(&b.circuit)).collect() }
    }
}

impl Objective for SurrogateObjective<'_> {
    fn evaluate(&self, trial_index: usize, params: &QxxParams) -> TrialRecord {
        let started = Instant::now();
        let per_circuit = self
            .features
            .iter()
            .map(|f| CircuitOutcome::Done { ratio: self.model.predict_layout(f, params) })
            .collect();
        TrialRecord::from_outcomes(trial_index, *params, per_circuit, started.elapsed(), TimeoutPolicy::Exclude)
    }
}
