//! Benchmark circuits with a known optimal depth and a known optimal mapping.
//!
//! Each layer is a random matching over device edges, so under the generating
//! mapping every gate is executable without SWAPs. One register takes part in
//! every layer, forcing the depth to equal the number of layers. Logical
//! labels are scrambled afterwards.

use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, CircuitError, Gate};
use crate::device::Device;
use crate::seed::derive_seed;

pub const DEFAULT_GATE_DENSITY: f64 = 0.5;

/// Optimal depths of the standard suite: 5, 10, ..., 45.
pub const SUITE_DEPTHS: [usize; 9] = [5, 10, 15, 20, 25, 30, 35, 40, 45];
pub const SUITE_PER_DEPTH: usize = 10;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("target depth must be at least 1")]
    ZeroDepth,
    #[error("gate density {0} must lie in (0, 1]")]
    Density(f64),
    #[error("device has no edges, no gate can be placed")]
    NoEdges,
    #[error("io error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Circuit { path: PathBuf, source: CircuitError },
    #[error("{path}: malformed sidecar: {source}")]
    Sidecar { path: PathBuf, source: serde_json::Error },
}

/// Contents of the `<name>.optimal.json` sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimalSidecar {
    pub optimal_mapping: Vec<usize>,
    pub optimal_depth: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Benchmark {
    pub name: String,
    pub circuit: Circuit,
    /// `optimal_mapping[q]` is the register of logical qubit `q`.
    pub optimal_mapping: Option<Vec<usize>>,
    pub optimal_depth: usize,
}

pub fn generate(
    device: &Device,
    target_depth: usize,
    gate_density: f64,
    seed: u64,
) -> Result<(Circuit, Vec<usize>), BenchError> {
    if target_depth == 0 {
        return Err(BenchError::ZeroDepth);
    }
    if !(gate_density > 0.0 && gate_density <= 1.0) {
        return Err(BenchError::Density(gate_density));
    }
    let edges: Vec<(usize, usize)> = device.edges().collect();
    if edges.is_empty() {
        return Err(BenchError::NoEdges);
    }
    let n = device.num_registers();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per_layer = ((gate_density * n as f64 / 2.0).round() as usize).max(1);
    let spine = rng.gen_range(0..n);

    let mut register_gates = Vec::new();
    let mut busy = vec![false; n];
    let mut shuffled = edges.clone();
    for _ in 0..target_depth {
        busy.iter_mut().for_each(|b| *b = false);
        let mut layer = Vec::with_capacity(per_layer);
        let spine_edge = *device
            .neighbors(spine)
            .choose(&mut rng)
            .map(|&other| (spine, other))
            .as_ref()
            .expect("connected device with edges");
        layer.push(spine_edge);
        busy[spine_edge.0] = true;
        busy[spine_edge.1] = true;
        shuffled.shuffle(&mut rng);
        for &(a, b) in &shuffled {
            if layer.len() >= per_layer {
                break;
            }
            if !busy[a] && !busy[b] {
                busy[a] = true;
                busy[b] = true;
                layer.push((a, b));
            }
        }
        layer.shuffle(&mut rng);
        for (a, b) in layer {
            let g = if rng.gen_bool(0.5) { Gate::cnot(a, b) } else { Gate::cnot(b, a) };
            register_gates.push(g);
        }
    }

    // optimal_mapping[q] = register; the circuit is written in logical labels.
    let mut optimal_mapping: Vec<usize> = (0..n).collect();
    optimal_mapping.shuffle(&mut rng);
    let mut logical_of = vec![0; n];
    for (q, &r) in optimal_mapping.iter().enumerate() {
        logical_of[r] = q;
    }
    let gates = register_gates
        .into_iter()
        .map(|g| Gate::cnot(logical_of[g.control], logical_of[g.target]))
        .collect();
    let circuit = Circuit::new(n, gates).expect("labels are a permutation");
    Ok((circuit, optimal_mapping))
}

/// `per_depth` benchmarks for every depth in `depths`, each with its own
/// seed stream derived from `seed`.
pub fn generate_suite(
    device: &Device,
    depths: &[usize],
    per_depth: usize,
    gate_density: f64,
    seed: u64,
) -> Result<Vec<Benchmark>, BenchError> {
    let mut suite = Vec::with_capacity(depths.len() * per_depth);
    for &depth in depths {
        for i in 0..per_depth {
            let stream = (depth as u64) << 32 | i as u64;
            let (circuit, mapping) = generate(device, depth, gate_density, derive_seed(seed, stream))?;
            suite.push(Benchmark {
                name: format!("qk_d{:02}_{:02}", depth, i),
                circuit,
                optimal_mapping: Some(mapping),
                optimal_depth: depth,
            });
        }
    }
    Ok(suite)
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> BenchError + '_ {
    move |source| BenchError::Io { path: path.to_path_buf(), source }
}

/// Writes `<name>.json` and `<name>.optimal.json` for every benchmark.
pub fn write_suite(dir: &Path, suite: &[Benchmark]) -> Result<(), BenchError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    for b in suite {
        let path = dir.join(format!("{}.json", b.name));
        fs::write(&path, b.circuit.emit()).map_err(io_err(&path))?;
        if let Some(mapping) = &b.optimal_mapping {
            let side = OptimalSidecar { optimal_mapping: mapping.clone(), optimal_depth: b.optimal_depth };
            let path = dir.join(format!("{}.optimal.json", b.name));
            let text = serde_json::to_string(&side).expect("sidecar serializes");
            fs::write(&path, text).map_err(io_err(&path))?;
        }
    }
    Ok(())
}

/// Loads every circuit file in `dir` (sorted by name). Circuits without a
/// sidecar use their own CNOT depth as the reference depth.
pub fn load_suite(dir: &Path) -> Result<Vec<Benchmark>, BenchError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io_err(dir))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
            name.ends_with(".json") && !name.ends_with(".optimal.json")
        })
        .collect();
    paths.sort();
    let mut suite = Vec::with_capacity(paths.len());
    for path in paths {
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        let circuit =
            Circuit::parse(&text).map_err(|source| BenchError::Circuit { path: path.clone(), source })?;
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
        let side_path = path.with_file_name(format!("{}.optimal.json", name));
        let (optimal_mapping, optimal_depth) = if side_path.exists() {
            let text = fs::read_to_string(&side_path).map_err(io_err(&side_path))?;
            let side: OptimalSidecar = serde_json::from_str(&text)
                .map_err(|source| BenchError::Sidecar { path: side_path.clone(), source })?;
            (Some(side.optimal_mapping), side.optimal_depth)
        } else {
            let d = circuit.depth(1);
            (None, d)
        };
        suite.push(Benchmark { name, circuit, optimal_mapping, optimal_depth });
    }
    Ok(suite)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::router::{ratio, route};

    #[test]
    fn depth_is_exact() {
        let d = Device::aspen16();
        for seed in 0..20 {
            let (c, _) = generate(&d, 5, 0.5, seed).unwrap();
            assert_eq!(c.depth(1), 5);
            assert_eq!(c.depth(3), 5);
        }
    }

    #[test]
    fn optimal_mapping_puts_gates_on_edges() {
        let d = Device::grid(4, 4);
        for seed in 0..10 {
            let (c, m) = generate(&d, 12, 0.8, seed).unwrap();
            for g in c.gates() {
                assert!(d.is_edge(m[g.control], m[g.target]));
            }
            let r = route(&c, &d, &m, seed).unwrap();
            assert_eq!(r.swap_count(), 0);
            assert_eq!(ratio(&c, &r.circuit, 3).unwrap(), 1.0);
        }
    }

    #[test]
    fn bad_inputs() {
        let d = Device::linear(4);
        assert!(matches!(generate(&d, 0, 0.5, 0), Err(BenchError::ZeroDepth)));
        assert!(matches!(generate(&d, 3, 0.0, 0), Err(BenchError::Density(_))));
        assert!(matches!(generate(&d, 3, 1.5, 0), Err(BenchError::Density(_))));
        assert!(matches!(generate(&Device::linear(1), 3, 0.5, 0), Err(BenchError::NoEdges)));
    }

    #[test]
    fn suite_shape_and_determinism() {
        let d = Device::aspen16();
        let a = generate_suite(&d, &SUITE_DEPTHS, SUITE_PER_DEPTH, DEFAULT_GATE_DENSITY, 7).unwrap();
        assert_eq!(a.len(), 90);
        for depth in SUITE_DEPTHS {
            assert_eq!(a.iter().filter(|b| b.optimal_depth == depth).count(), 10);
        }
        let b = generate_suite(&d, &SUITE_DEPTHS, SUITE_PER_DEPTH, DEFAULT_GATE_DENSITY, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|b| b.circuit.depth(1) == b.optimal_depth));
    }

    #[test]
    fn suite_files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let d = Device::aspen16();
        let suite = generate_suite(&d, &[5, 10], 3, 0.5, 1).unwrap();
        write_suite(dir.path(), &suite).unwrap();
        assert_eq!(load_suite(dir.path()).unwrap(), suite);
    }
}
