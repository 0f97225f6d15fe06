//! Device connectivity, hop distances and the EdgeCost-scaled distance used
//! by the placement cost model.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::Graph;

#[derive(Debug, Error, PartialEq)]
pub enum DeviceError {
    #[error("device needs at least one register")]
    Empty,
    #[error("edge ({0}, {1}) references a register outside 0..{2}")]
    RegisterOutOfRange(usize, usize, usize),
    #[error("self-loop on register {0}")]
    SelfLoop(usize),
    #[error("device graph is disconnected ({0} components)")]
    Disconnected(usize),
    #[error("register {register} out of range for {num_registers} registers")]
    InvalidRegister { register: usize, num_registers: usize },
    #[error("malformed device JSON: {0}")]
    Json(String),
    #[error("unknown built-in device {0:?}")]
    UnknownBuiltin(String),
}

#[derive(Debug, Serialize, Deserialize)]
struct DeviceFile {
    registers: usize,
    edges: Vec<[usize; 2]>,
}

/// Register connectivity graph plus its all-pairs hop matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Device {
    graph: Graph,
    hops: Vec<Vec<u32>>,
}

impl Device {
    pub fn new(num_registers: usize, edges: &[(usize, usize)]) -> Result<Self, DeviceError> {
        if num_registers == 0 {
            return Err(DeviceError::Empty);
        }
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            if a >= num_registers || b >= num_registers {
                return Err(DeviceError::RegisterOutOfRange(a, b, num_registers));
            }
            if a == b {
                return Err(DeviceError::SelfLoop(a));
            }
            set.insert((a.min(b), a.max(b)));
        }
        let graph = Graph::from_edges(num_registers, set);
        if !graph.is_connected() {
            return Err(DeviceError::Disconnected(graph.connected_components()));
        }
        let hops = graph
            .hop_matrix()
            .into_iter()
            .map(|row| row.into_iter().map(|d| d.expect("connected")).collect())
            .collect();
        Ok(Self { graph, hops })
    }

    /// Registers `0..n` in a line.
    pub fn linear(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(n, &edges).expect("a path is connected")
    }

    /// `rows × cols` nearest-neighbour grid, row-major register numbering.
    pub fn grid(rows: usize, cols: usize) -> Self {
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                let v = r * cols + c;
                if c + 1 < cols {
                    edges.push((v, v + 1));
                }
                if r + 1 < rows {
                    edges.push((v, v + cols));
                }
            }
        }
        Self::new(rows * cols, &edges).expect("a grid is connected")
    }

    /// 16 registers as two 8-register rings (0..8 and 8..16) joined by two
    /// bridges, the connectivity of a 16-qubit Aspen-style chip.
    pub fn aspen16() -> Self {
        let mut edges = Vec::new();
        for ring in [0, 8] {
            for i in 0..8 {
                edges.push((ring + i, ring + (i + 1) % 8));
            }
        }
        edges.push((1, 14));
        edges.push((2, 13));
        Self::new(16, &edges).expect("two bridged rings are connected")
    }

    /// Resolves `aspen16`, `grid:RxC` (or `grid4x4`) and `linear:N`.
    pub fn builtin(name: &str) -> Result<Self, DeviceError> {
        let unknown = || DeviceError::UnknownBuiltin(name.to_string());
        let lower = name.to_ascii_lowercase();
        if lower == "aspen16" || lower == "aspen" {
            return Ok(Self::aspen16());
        }
        if lower == "grid4x4" {
            return Ok(Self::grid(4, 4));
        }
        if let Some(dims) = lower.strip_prefix("grid:") {
            let (r, c) = dims.split_once('x').ok_or_else(unknown)?;
            let r: usize = r.parse().map_err(|_| unknown())?;
            let c: usize = c.parse().map_err(|_| unknown())?;
            if r * c == 0 {
                return Err(DeviceError::Empty);
            }
            return Ok(Self::grid(r, c));
        }
        if let Some(n) = lower.strip_prefix("linear:") {
            let n: usize = n.parse().map_err(|_| unknown())?;
            if n == 0 {
                return Err(DeviceError::Empty);
            }
            return Ok(Self::linear(n));
        }
        Err(unknown())
    }

    pub fn parse(text: &str) -> Result<Self, DeviceError> {
        let file: DeviceFile =
            serde_json::from_str(text).map_err(|e| DeviceError::Json(e.to_string()))?;
        let edges: Vec<_> = file.edges.iter().map(|e| (e[0], e[1])).collect();
        Self::new(file.registers, &edges)
    }

    pub fn emit(&self) -> String {
        let file = DeviceFile {
            registers: self.num_registers(),
            edges: self.graph.edges().map(|(a, b)| [a, b]).collect(),
        };
        serde_json::to_string(&file).expect("device serializes")
    }

    pub fn num_registers(&self) -> usize {
        self.graph.num_vertices()
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.graph.edges()
    }

    pub fn neighbors(&self, r: usize) -> &[usize] {
        self.graph.neighbors(r)
    }

    pub fn is_edge(&self, a: usize, b: usize) -> bool {
        self.graph.has_edge(a, b)
    }

    pub fn hops(&self, a: usize, b: usize) -> u32 {
        self.hops[a][b]
    }

    pub fn hop_matrix(&self) -> &[Vec<u32>] {
        &self.hops
    }

    /// Movement cost between two registers: zero when they coincide or are
    /// adjacent, otherwise hop count times `edge_cost`.
    pub fn dist(&self, a: usize, b: usize, edge_cost: f64) -> Result<f64, DeviceError> {
        let n = self.num_registers();
        for r in [a, b] {
            if r >= n {
                return Err(DeviceError::InvalidRegister { register: r, num_registers: n });
            }
        }
        Ok(self.cost(a, b, edge_cost))
    }

    /// Unchecked [`Device::dist`] for hot loops.
    #[inline]
    pub(crate) fn cost(&self, a: usize, b: usize, edge_cost: f64) -> f64 {
        let h = self.hops[a][b];
        if h <= 1 {
            0.0
        } else {
            f64::from(h) * edge_cost
        }
    }
}
