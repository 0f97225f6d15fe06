//! One-hidden-layer perceptron regressor trained with minibatch SGD.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SurrogateError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Tanh,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Tanh => z.tanh(),
        }
    }

    /// Derivative expressed through the activation output `a`.
    fn slope(self, z: f64, a: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Tanh => 1.0 - a * a,
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Activation::Relu => "relu",
            Activation::Tanh => "tanh",
        })
    }
}

impl FromStr for Activation {
    type Err = SurrogateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "relu" => Ok(Activation::Relu),
            "tanh" => Ok(Activation::Tanh),
            _ => Err(SurrogateError::Hyper(format!("unknown activation {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MlpConfig {
    pub hidden: usize,
    pub activation: Activation,
    pub epochs: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        Self {
            hidden: 100,
            activation: Activation::Relu,
            epochs: 100,
            learning_rate: 0.01,
            momentum: 0.9,
            batch_size: 32,
            seed: 0,
        }
    }
}

/// `input -> hidden -> 1` network with an identity output. Targets are
/// standardized internally; predictions are in the original units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    input_dim: usize,
    hidden: usize,
    activation: Activation,
    /// Row-major `hidden x input_dim`.
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: f64,
    y_mean: f64,
    y_std: f64,
}

impl Mlp {
    /// Glorot-uniform weights, zero biases, identity target scaling.
    pub fn init(input_dim: usize, hidden: usize, activation: Activation, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l1 = (6.0 / (input_dim + hidden) as f64).sqrt();
        let l2 = (6.0 / (hidden + 1) as f64).sqrt();
        let w1 = (0..hidden * input_dim).map(|_| rng.gen_range(-l1..l1)).collect();
        let w2 = (0..hidden).map(|_| rng.gen_range(-l2..l2)).collect();
        Self { input_dim, hidden, activation, w1, b1: vec![0.0; hidden], w2, b2: 0.0, y_mean: 0.0, y_std: 1.0 }
    }

    pub fn train(x: &[Vec<f64>], y: &[f64], config: &MlpConfig) -> Result<Self, SurrogateError> {
        if x.is_empty() || x.len() != y.len() {
            return Err(SurrogateError::Data(format!("{} rows for {} targets", x.len(), y.len())));
        }
        if config.hidden == 0 || config.batch_size == 0 {
            return Err(SurrogateError::Hyper("hidden size and batch size must be positive".into()));
        }
        let dim = x[0].len();
        let mut net = Self::init(dim, config.hidden, config.activation, config.seed);
        let n = y.len() as f64;
        net.y_mean = y.iter().sum::<f64>() / n;
        let var = y.iter().map(|v| (v - net.y_mean).powi(2)).sum::<f64>() / n;
        net.y_std = if var > 0.0 { var.sqrt() } else { 1.0 };
        let ys: Vec<f64> = y.iter().map(|v| (v - net.y_mean) / net.y_std).collect();

        let mut rng = ChaCha8Rng::seed_from_u64(config.seed ^ 0xA5A5_A5A5);
        let mut order: Vec<usize> = (0..x.len()).collect();
        let mut velocity = vec![0.0; net.num_parameters()];
        let mut params = net.parameters();
        let mut bx = Vec::with_capacity(config.batch_size);
        let mut by = Vec::with_capacity(config.batch_size);
        for epoch in 0..config.epochs {
            order.shuffle(&mut rng);
            let mut epoch_loss = 0.0;
            for chunk in order.chunks(config.batch_size) {
                bx.clear();
                by.clear();
                for &i in chunk {
                    bx.push(x[i].as_slice());
                    by.push(ys[i]);
                }
                let (loss, grad) = net.batch_loss_and_gradient(&bx, &by);
                if !loss.is_finite() {
                    return Err(SurrogateError::Diverged { epoch });
                }
                epoch_loss += loss * chunk.len() as f64;
                for ((p, v), g) in params.iter_mut().zip(velocity.iter_mut()).zip(&grad) {
                    *v = config.momentum * *v - config.learning_rate * g;
                    *p += *v;
                }
                net.set_parameters(&params);
            }
            if !epoch_loss.is_finite() {
                return Err(SurrogateError::Diverged { epoch });
            }
        }
        Ok(net)
    }

    pub fn num_parameters(&self) -> usize {
        self.w1.len() + self.b1.len() + self.w2.len() + 1
    }

    /// Flattened weights: `w1`, `b1`, `w2`, `b2`.
    pub fn parameters(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.num_parameters());
        p.extend_from_slice(&self.w1);
        p.extend_from_slice(&self.b1);
        p.extend_from_slice(&self.w2);
        p.push(self.b2);
        p
    }

    pub fn set_parameters(&mut self, p: &[f64]) {
        let (a, rest) = p.split_at(self.w1.len());
        let (b, rest) = rest.split_at(self.hidden);
        let (c, d) = rest.split_at(self.hidden);
        self.w1.copy_from_slice(a);
        self.b1.copy_from_slice(b);
        self.w2.copy_from_slice(c);
        self.b2 = d[0];
    }

    fn forward(&self, x: &[f64], z: &mut [f64], a: &mut [f64]) -> f64 {
        let mut out = self.b2;
        for h in 0..self.hidden {
            let row = &self.w1[h * self.input_dim..(h + 1) * self.input_dim];
            let s: f64 = self.b1[h] + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>();
            z[h] = s;
            a[h] = self.activation.apply(s);
            out += self.w2[h] * a[h];
        }
        out
    }

    /// Half mean squared error against standardized targets, and its
    /// gradient in [`Mlp::parameters`] order.
    pub fn loss_and_gradient(&self, x: &[Vec<f64>], y_standardized: &[f64]) -> (f64, Vec<f64>) {
        let rows: Vec<&[f64]> = x.iter().map(Vec::as_slice).collect();
        self.batch_loss_and_gradient(&rows, y_standardized)
    }

    fn batch_loss_and_gradient(&self, x: &[&[f64]], y: &[f64]) -> (f64, Vec<f64>) {
        let (nh, ni) = (self.hidden, self.input_dim);
        let mut grad = vec![0.0; self.num_parameters()];
        let (gw1, rest) = grad.split_at_mut(nh * ni);
        let (gb1, rest) = rest.split_at_mut(nh);
        let (gw2, gb2) = rest.split_at_mut(nh);
        let mut z = vec![0.0; nh];
        let mut a = vec![0.0; nh];
        let m = x.len() as f64;
        let mut loss = 0.0;
        for (row, &t) in x.iter().zip(y) {
            let out = self.forward(row, &mut z, &mut a);
            let err = out - t;
            loss += 0.5 * err * err;
            let e = err / m;
            gb2[0] += e;
            for h in 0..nh {
                gw2[h] += e * a[h];
                let delta = e * self.w2[h] * self.activation.slope(z[h], a[h]);
                if delta != 0.0 {
                    gb1[h] += delta;
                    let g = &mut gw1[h * ni..(h + 1) * ni];
                    for (gi, xi) in g.iter_mut().zip(row.iter()) {
                        *gi += delta * xi;
                    }
                }
            }
        }
        (loss / m, grad)
    }

    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut z = vec![0.0; self.hidden];
        let mut a = vec![0.0; self.hidden];
        self.forward(x, &mut z, &mut a) * self.y_std + self.y_mean
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }
}
