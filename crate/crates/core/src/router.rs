//! Seeded greedy-stochastic SWAP router and a semantic checker for its
//! output.
//!
//! Gates are processed in program order. While the two registers holding a
//! gate's qubits are not adjacent, a SWAP is applied on an edge incident to
//! one of them, chosen uniformly among the moves with the largest distance
//! decrease.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::circuit::{Circuit, Gate, GateKind};
use crate::device::Device;

#[derive(Debug, Error, PartialEq)]
pub enum RouteError {
    #[error("initial mapping has {got} entries, circuit has {want} qubits")]
    MappingSize { got: usize, want: usize },
    #[error("initial mapping is not an injective map into the device registers")]
    InvalidMapping,
    #[error("input circuit has zero depth")]
    ZeroDepth,
}

/// A circuit over device registers, containing the original gates plus the
/// inserted SWAPs.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutedCircuit {
    pub circuit: Circuit,
    /// `initial_mapping[q]` is the register holding logical qubit `q` before
    /// the first gate.
    pub initial_mapping: Vec<usize>,
    pub seed: u64,
}

impl RoutedCircuit {
    pub fn swap_count(&self) -> usize {
        self.circuit.swap_count()
    }
}

fn check_mapping(num_qubits: usize, mapping: &[usize], device: &Device) -> Result<(), RouteError> {
    if mapping.len() != num_qubits {
        return Err(RouteError::MappingSize { got: mapping.len(), want: num_qubits });
    }
    let mut used = vec![false; device.num_registers()];
    for &r in mapping {
        if r >= used.len() || used[r] {
            return Err(RouteError::InvalidMapping);
        }
        used[r] = true;
    }
    Ok(())
}

pub fn route(
    circuit: &Circuit,
    device: &Device,
    initial_mapping: &[usize],
    seed: u64,
) -> Result<RoutedCircuit, RouteError> {
    check_mapping(circuit.num_qubits(), initial_mapping, device)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = device.num_registers();
    let mut reg_of: Vec<usize> = initial_mapping.to_vec();
    let mut qubit_at: Vec<Option<usize>> = vec![None; n];
    for (q, &r) in reg_of.iter().enumerate() {
        qubit_at[r] = Some(q);
    }

    let mut out = Vec::with_capacity(circuit.len());
    let mut moves = Vec::new();
    for gate in circuit.gates() {
        loop {
            let (ra, rb) = (reg_of[gate.control], reg_of[gate.target]);
            let current = device.hops(ra, rb);
            if current <= 1 {
                break;
            }
            moves.clear();
            let mut best_gain = 0;
            for (from, other) in [(ra, rb), (rb, ra)] {
                for &to in device.neighbors(from) {
                    let after = device.hops(to, other);
                    if after >= current {
                        continue;
                    }
                    let gain = current - after;
                    if gain > best_gain {
                        best_gain = gain;
                        moves.clear();
                    }
                    if gain == best_gain {
                        moves.push((from, to));
                    }
                }
            }
            let &(from, to) = moves.choose(&mut rng).expect("a connected device always has a shortening move");
            let (qa, qb) = (qubit_at[from], qubit_at[to]);
            qubit_at[from] = qb;
            qubit_at[to] = qa;
            if let Some(q) = qa {
                reg_of[q] = to;
            }
            if let Some(q) = qb {
                reg_of[q] = from;
            }
            out.push(Gate::swap(from, to));
        }
        out.push(Gate {
            control: reg_of[gate.control],
            target: reg_of[gate.target],
            kind: gate.kind,
        });
    }
    let circuit = Circuit::new(n, out).expect("registers are in range and distinct");
    Ok(RoutedCircuit { circuit, initial_mapping: initial_mapping.to_vec(), seed })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    /// The emitted gate acts on a non-adjacent register pair.
    NotOnEdge,
    /// The emitted gate touches a register that holds no logical qubit.
    EmptyRegister,
    /// The emitted gate is not the next gate of the original circuit.
    Mismatch { expected: Option<Gate>, found: Gate },
    /// The routed circuit ends before every original gate was executed.
    MissingGates { executed: usize, expected: usize },
    /// The initial mapping itself is unusable.
    BadMapping,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("routed gate {gate_index}: {kind:?}")]
pub struct Violation {
    pub gate_index: usize,
    pub kind: ViolationKind,
}

/// Checks that every emitted gate sits on a device edge and that replaying
/// the SWAPs over the initial mapping turns the emitted non-SWAP gates into
/// exactly the original gate sequence.
pub fn verify(routed: &RoutedCircuit, original: &Circuit, device: &Device) -> Result<(), Violation> {
    if check_mapping(original.num_qubits(), &routed.initial_mapping, device).is_err() {
        return Err(Violation { gate_index: 0, kind: ViolationKind::BadMapping });
    }
    let mut qubit_at: Vec<Option<usize>> = vec![None; device.num_registers()];
    for (q, &r) in routed.initial_mapping.iter().enumerate() {
        qubit_at[r] = Some(q);
    }
    let expected = original.gates();
    let mut next = 0;
    for (i, g) in routed.circuit.gates().iter().enumerate() {
        let violation = |kind| Err(Violation { gate_index: i, kind });
        if g.control >= qubit_at.len() || g.target >= qubit_at.len() || !device.is_edge(g.control, g.target) {
            return violation(ViolationKind::NotOnEdge);
        }
        match g.kind {
            GateKind::Swap => qubit_at.swap(g.control, g.target),
            GateKind::Cnot => {
                let (Some(c), Some(t)) = (qubit_at[g.control], qubit_at[g.target]) else {
                    return violation(ViolationKind::EmptyRegister);
                };
                let logical = Gate::cnot(c, t);
                if expected.get(next) != Some(&logical) {
                    return violation(ViolationKind::Mismatch {
                        expected: expected.get(next).copied(),
                        found: logical,
                    });
                }
                next += 1;
            }
        }
    }
    if next != expected.len() {
        return Err(Violation {
            gate_index: routed.circuit.len(),
            kind: ViolationKind::MissingGates { executed: next, expected: expected.len() },
        });
    }
    Ok(())
}

/// `depth(c_out) / depth(c_in)` with SWAPs weighted by `swap_weight`.
pub fn ratio(c_in: &Circuit, c_out: &Circuit, swap_weight: u32) -> Result<f64, RouteError> {
    let din = c_in.depth(swap_weight);
    if din == 0 {
        return Err(RouteError::ZeroDepth);
    }
    Ok(c_out.depth(swap_weight) as f64 / din as f64)
}
