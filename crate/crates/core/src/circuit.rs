//! Two-qubit circuit IR, its JSON form, and ASAP depth.
//!
//! Circuits hold only two-qubit gates. Single-qubit gates are rejected at
//! parse time instead of being silently dropped.

use std::collections::BTreeSet;
use std::fmt;

use serde_json::{json, Value};
use thiserror::Error;

use crate::graph::Graph;

/// Depth contribution of a SWAP when nothing else is requested.
pub const DEFAULT_SWAP_WEIGHT: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    Cnot,
    Swap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gate {
    pub control: usize,
    pub target: usize,
    pub kind: GateKind,
}

impl Gate {
    pub fn cnot(control: usize, target: usize) -> Self {
        Self { control, target, kind: GateKind::Cnot }
    }

    pub fn swap(a: usize, b: usize) -> Self {
        Self { control: a, target: b, kind: GateKind::Swap }
    }

    /// The qubit pair ordered as (low, high).
    pub fn ordered(&self) -> (usize, usize) {
        if self.control < self.target {
            (self.control, self.target)
        } else {
            (self.target, self.control)
        }
    }

    pub fn touches(&self, q: usize) -> bool {
        self.control == q || self.target == q
    }

    pub fn is_swap(&self) -> bool {
        self.kind == GateKind::Swap
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum CircuitError {
    #[error("malformed circuit JSON: {0}")]
    Json(String),
    #[error("gate {gate}: qubit {qubit} out of range for {num_qubits} qubits")]
    QubitOutOfRange { gate: usize, qubit: usize, num_qubits: usize },
    #[error("gate {gate}: control and target are both qubit {qubit}")]
    DegenerateGate { gate: usize, qubit: usize },
    #[error("gate {gate}: single-qubit gates are not supported")]
    SingleQubitGate { gate: usize },
    #[error("gate {gate}: {reason}")]
    MalformedGate { gate: usize, reason: String },
}

/// An ordered list of two-qubit gates over `num_qubits` qubits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: usize, gates: Vec<Gate>) -> Result<Self, CircuitError> {
        for (i, g) in gates.iter().enumerate() {
            for q in [g.control, g.target] {
                if q >= num_qubits {
                    return Err(CircuitError::QubitOutOfRange { gate: i, qubit: q, num_qubits });
                }
            }
            if g.control == g.target {
                return Err(CircuitError::DegenerateGate { gate: i, qubit: g.control });
            }
        }
        Ok(Self { num_qubits, gates })
    }

    /// Builds a CNOT-only circuit from `(control, target)` pairs.
    pub fn from_pairs(num_qubits: usize, pairs: &[(usize, usize)]) -> Result<Self, CircuitError> {
        Self::new(num_qubits, pairs.iter().map(|&(c, t)| Gate::cnot(c, t)).collect())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn swap_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_swap()).count()
    }

    /// Longest chain under as-soon-as-possible layering. A CNOT advances both
    /// of its qubits by one layer, a SWAP by `swap_weight` layers.
    pub fn depth(&self, swap_weight: u32) -> usize {
        let swap_weight = swap_weight.max(1) as usize;
        let mut ready = vec![0usize; self.num_qubits];
        let mut depth = 0;
        for g in &self.gates {
            let start = ready[g.control].max(ready[g.target]);
            let end = start + if g.is_swap() { swap_weight } else { 1 };
            ready[g.control] = end;
            ready[g.target] = end;
            depth = depth.max(end);
        }
        depth
    }

    /// Qubit interaction graph: one vertex per qubit, one edge per distinct
    /// interacting pair.
    pub fn interaction_graph(&self) -> Graph {
        let edges: BTreeSet<(usize, usize)> = self.gates.iter().map(Gate::ordered).collect();
        Graph::from_edges(self.num_qubits, edges)
    }

    /// Qubits in order of their first appearance in the gate list, followed
    /// by idle qubits in index order.
    pub fn qubits_by_first_use(&self) -> Vec<usize> {
        let mut seen = vec![false; self.num_qubits];
        let mut order = Vec::with_capacity(self.num_qubits);
        for g in &self.gates {
            for q in [g.control, g.target] {
                if !seen[q] {
                    seen[q] = true;
                    order.push(q);
                }
            }
        }
        order.extend((0..self.num_qubits).filter(|&q| !seen[q]));
        order
    }

    /// Relabels every qubit `q` as `perm[q]`.
    pub fn relabel(&self, perm: &[usize], num_qubits: usize) -> Result<Circuit, CircuitError> {
        let gates = self
            .gates
            .iter()
            .map(|g| Gate { control: perm[g.control], target: perm[g.target], kind: g.kind })
            .collect();
        Circuit::new(num_qubits, gates)
    }

    pub fn to_json(&self) -> Value {
        let gates: Vec<Value> = self
            .gates
            .iter()
            .map(|g| match g.kind {
                GateKind::Cnot => json!([g.control, g.target]),
                GateKind::Swap => json!([g.control, g.target, "swap"]),
            })
            .collect();
        json!({ "qubits": self.num_qubits, "gates": gates })
    }

    /// Compact JSON text, e.g. `{"qubits":2,"gates":[[0,1]]}`.
    pub fn emit(&self) -> String {
        self.to_json().to_string()
    }

    pub fn parse(text: &str) -> Result<Self, CircuitError> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| CircuitError::Json(e.to_string()))?;
        Self::from_json(&value)
    }

    pub fn from_json(value: &Value) -> Result<Self, CircuitError> {
        let obj = value
            .as_object()
            .ok_or_else(|| CircuitError::Json("top level must be an object".into()))?;
        let num_qubits = obj
            .get("qubits")
            .and_then(Value::as_u64)
            .ok_or_else(|| CircuitError::Json("\"qubits\" must be a non-negative integer".into()))?
            as usize;
        let raw = obj
            .get("gates")
            .and_then(Value::as_array)
            .ok_or_else(|| CircuitError::Json("\"gates\" must be an array".into()))?;

        let mut gates = Vec::with_capacity(raw.len());
        for (i, entry) in raw.iter().enumerate() {
            let items = entry.as_array().ok_or_else(|| CircuitError::MalformedGate {
                gate: i,
                reason: "gate must be an array".into(),
            })?;
            let index = |k: usize| {
                items[k].as_u64().map(|v| v as usize).ok_or_else(|| CircuitError::MalformedGate {
                    gate: i,
                    reason: format!("qubit {} is not a non-negative integer", k),
                })
            };
            let gate = match items.len() {
                0 => {
                    return Err(CircuitError::MalformedGate { gate: i, reason: "empty gate".into() })
                }
                1 => return Err(CircuitError::SingleQubitGate { gate: i }),
                2 => Gate::cnot(index(0)?, index(1)?),
                3 => match items[2].as_str() {
                    Some("swap") => Gate::swap(index(0)?, index(1)?),
                    Some("cx") | Some("cnot") => Gate::cnot(index(0)?, index(1)?),
                    _ => {
                        return Err(CircuitError::MalformedGate {
                            gate: i,
                            reason: format!("unknown gate kind {}", items[2]),
                        })
                    }
                },
                n => {
                    return Err(CircuitError::MalformedGate {
                        gate: i,
                        reason: format!("expected 2 or 3 entries, found {}", n),
                    })
                }
            };
            gates.push(gate);
        }
        Circuit::new(num_qubits, gates)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.emit())
    }
}
