//! QXX initial placement.
//!
//! Logical qubits are placed one per tree level. Every node is scored with
//! GDepth, a Gaussian-weighted sum of estimated movement costs over the gates
//! whose two qubits are already mapped. Each node keeps at most
//! `max_children` of its cheapest children, and every `max_depth` levels the
//! tree collapses onto the path of the cheapest leaf.
//!
//! Only the leaves at the end of each `max_depth` window influence the
//! result, so each window is explored depth-first while remembering the best
//! leaf seen so far. Children are visited in (cost, register) order, which
//! makes the first-best leaf identical to what a level-by-level expansion
//! would pick.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{Circuit, Gate};
use crate::device::Device;

const UNMAPPED: usize = usize::MAX;

#[derive(Debug, Error, PartialEq)]
pub enum PlacementError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("circuit has {qubits} qubits but the device only {registers} registers")]
    TooManyQubits { qubits: usize, registers: usize },
    #[error("no gate has both qubits mapped")]
    NoMappedGates,
    #[error("placement exceeded its deadline after {0:?}")]
    TimedOut(Duration),
    #[error("mapping is not injective: register {0} used twice")]
    NotInjective(usize),
    #[error("mapping size mismatch: {0}")]
    Shape(String),
}

/// The six QXX tunables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QxxParams {
    pub max_depth: u32,
    pub max_children: u32,
    pub b: f64,
    pub c: f64,
    pub movement_factor: u32,
    pub edge_cost: f64,
}

impl QxxParams {
    pub const NAMES: [&'static str; 6] =
        ["max_depth", "max_children", "b", "c", "movement_factor", "edge_cost"];

    pub fn new(
        max_depth: u32,
        max_children: u32,
        b: f64,
        c: f64,
        movement_factor: u32,
        edge_cost: f64,
    ) -> Self {
        Self { max_depth, max_children, b, c, movement_factor, edge_cost }
    }

    /// Checks the full-space ranges: integer knobs in 1..=55, B in [0, 500],
    /// C in [0, 1], EdgeCost in [0.1, 1].
    pub fn validate(&self) -> Result<(), PlacementError> {
        const EPS: f64 = 1e-9;
        let bad = |what: &str| Err(PlacementError::InvalidParams(what.to_string()));
        if !(1..=55).contains(&self.max_depth) {
            return bad("max_depth must lie in 1..=55");
        }
        if !(1..=55).contains(&self.max_children) {
            return bad("max_children must lie in 1..=55");
        }
        if !(1..=55).contains(&self.movement_factor) {
            return bad("movement_factor must lie in 1..=55");
        }
        if !(self.b >= -EPS && self.b <= 500.0 + EPS) {
            return bad("b must lie in [0, 500]");
        }
        if !(self.c >= -EPS && self.c <= 1.0 + EPS) {
            return bad("c must lie in [0, 1]");
        }
        if !(self.edge_cost >= 0.1 - EPS && self.edge_cost <= 1.0 + EPS) {
            return bad("edge_cost must lie in [0.1, 1]");
        }
        Ok(())
    }

    /// Values in the canonical order MaxDepth, MaxChildren, B, C,
    /// MovementFactor, EdgeCost.
    pub fn to_array(&self) -> [f64; 6] {
        [
            f64::from(self.max_depth),
            f64::from(self.max_children),
            self.b,
            self.c,
            f64::from(self.movement_factor),
            self.edge_cost,
        ]
    }

    pub fn from_array(v: [f64; 6]) -> Self {
        Self {
            max_depth: v[0].round() as u32,
            max_children: v[1].round() as u32,
            b: v[2],
            c: v[3],
            movement_factor: v[4].round() as u32,
            edge_cost: v[5],
        }
    }
}

impl fmt::Display for QxxParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{},{},{}",
            self.max_depth, self.max_children, self.b, self.c, self.movement_factor, self.edge_cost
        )
    }
}

impl FromStr for QxxParams {
    type Err = PlacementError;

    /// Parses the comma sextuple `MaxDepth,MaxChildren,B,C,MovementFactor,EdgeCost`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 6 {
            return Err(PlacementError::InvalidParams(format!(
                "expected 6 comma-separated values, found {}",
                parts.len()
            )));
        }
        let int = |i: usize| {
            parts[i].parse::<u32>().map_err(|_| {
                PlacementError::InvalidParams(format!("{} must be an integer", Self::NAMES[i]))
            })
        };
        let real = |i: usize| {
            parts[i].parse::<f64>().map_err(|_| {
                PlacementError::InvalidParams(format!("{} must be a number", Self::NAMES[i]))
            })
        };
        let p = Self::new(int(0)?, int(1)?, real(2)?, real(3)?, int(4)?, real(5)?);
        p.validate()?;
        Ok(p)
    }
}

/// Injective partial assignment of logical qubits to device registers,
/// with per-qubit accumulated movement offsets.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialMapping {
    assignment: Vec<Option<usize>>,
    used: Vec<bool>,
    offsets: Vec<f64>,
}

impl PartialMapping {
    pub fn new(num_qubits: usize, num_registers: usize) -> Self {
        Self {
            assignment: vec![None; num_qubits],
            used: vec![false; num_registers],
            offsets: vec![0.0; num_qubits],
        }
    }

    /// A complete mapping where qubit `q` sits on `registers[q]`.
    pub fn from_registers(registers: &[usize], num_registers: usize) -> Result<Self, PlacementError> {
        let mut m = Self::new(registers.len(), num_registers);
        for (q, &r) in registers.iter().enumerate() {
            m.assign(q, r)?;
        }
        Ok(m)
    }

    pub fn assign(&mut self, qubit: usize, register: usize) -> Result<(), PlacementError> {
        if qubit >= self.assignment.len() || register >= self.used.len() {
            return Err(PlacementError::Shape(format!(
                "qubit {} / register {} outside {}x{}",
                qubit,
                register,
                self.assignment.len(),
                self.used.len()
            )));
        }
        if self.used[register] {
            return Err(PlacementError::NotInjective(register));
        }
        if let Some(old) = self.assignment[qubit] {
            self.used[old] = false;
        }
        self.assignment[qubit] = Some(register);
        self.used[register] = true;
        Ok(())
    }

    pub fn register_of(&self, qubit: usize) -> Option<usize> {
        self.assignment[qubit]
    }

    pub fn num_qubits(&self) -> usize {
        self.assignment.len()
    }

    pub fn num_registers(&self) -> usize {
        self.used.len()
    }

    pub fn mapped_count(&self) -> usize {
        self.assignment.iter().filter(|r| r.is_some()).count()
    }

    pub fn is_complete(&self) -> bool {
        self.assignment.iter().all(Option::is_some)
    }

    /// `M[q] = r` for every qubit, if complete.
    pub fn registers(&self) -> Option<Vec<usize>> {
        self.assignment.iter().copied().collect()
    }

    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }

    pub fn set_offsets(&mut self, offsets: Vec<f64>) {
        assert_eq!(offsets.len(), self.assignment.len());
        self.offsets = offsets;
    }

    fn raw_assignment(&self) -> Vec<usize> {
        self.assignment.iter().map(|r| r.unwrap_or(UNMAPPED)).collect()
    }
}

/// Adds the movement implied by one gate: the lower-indexed qubit moves
/// `1/movement_factor` of the distance, the higher-indexed one the rest.
pub fn update_offsets(offsets: &mut [f64], gate: &Gate, effective_dist: f64, movement_factor: u32) {
    let (low, high) = gate.ordered();
    let mf = f64::from(movement_factor.max(1));
    offsets[low] += effective_dist / mf;
    offsets[high] += effective_dist * (mf - 1.0) / mf;
}

/// GDepth with offsets starting from the mapping's stored offsets.
pub fn gdepth(
    circuit: &Circuit,
    mapping: &PartialMapping,
    device: &Device,
    params: &QxxParams,
) -> Result<f64, PlacementError> {
    gdepth_with_offsets(circuit, mapping, device, params).map(|(cost, _)| cost)
}

/// GDepth together with the offsets accumulated by the evaluation.
pub fn gdepth_with_offsets(
    circuit: &Circuit,
    mapping: &PartialMapping,
    device: &Device,
    params: &QxxParams,
) -> Result<(f64, Vec<f64>), PlacementError> {
    check_shape(circuit, mapping, device)?;
    let mut offsets = mapping.offsets.clone();
    let cost = evaluate(circuit.gates(), &mapping.raw_assignment(), device, params, &mut offsets)
        .ok_or(PlacementError::NoMappedGates)?;
    Ok((cost, offsets))
}

fn check_shape(circuit: &Circuit, mapping: &PartialMapping, device: &Device) -> Result<(), PlacementError> {
    if mapping.num_qubits() != circuit.num_qubits() || mapping.num_registers() != device.num_registers() {
        return Err(PlacementError::Shape(format!(
            "mapping is {}x{}, circuit/device need {}x{}",
            mapping.num_qubits(),
            mapping.num_registers(),
            circuit.num_qubits(),
            device.num_registers()
        )));
    }
    Ok(())
}

/// Core GDepth loop. `assign[q]` is the register of `q` or `UNMAPPED`;
/// `offsets` is both the starting point and the accumulator. Returns `None`
/// when no gate is fully mapped.
fn evaluate(
    gates: &[Gate],
    assign: &[usize],
    device: &Device,
    params: &QxxParams,
    offsets: &mut [f64],
) -> Option<f64> {
    let mapped = |g: &Gate| assign[g.control] != UNMAPPED && assign[g.target] != UNMAPPED;
    let nc = gates.iter().filter(|g| mapped(g)).count();
    if nc == 0 {
        return None;
    }
    let nc_f = nc as f64;
    let mut total = 0.0;
    let mut i = 0usize;
    for g in gates.iter().filter(|g| mapped(g)) {
        i += 1;
        let raw = device.cost(assign[g.control], assign[g.target], params.edge_cost);
        let d = (raw - offsets[g.control] - offsets[g.target]).max(0.0);
        if d > 0.0 {
            let x = i as f64 / nc_f - params.c;
            total += d * (-params.b * x * x).exp();
            update_offsets(offsets, g, d, params.movement_factor);
        }
    }
    Some(total)
}

/// A complete placement and its GDepth.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    pub mapping: PartialMapping,
    pub cost: f64,
    /// Tree nodes whose children were generated.
    pub expansions: u64,
}

impl Placement {
    pub fn registers(&self) -> Vec<usize> {
        self.mapping.registers().expect("placement is complete")
    }
}

#[derive(Clone, Copy)]
struct Candidate {
    register: usize,
    cost: f64,
}

struct Search<'a> {
    gates: &'a [Gate],
    device: &'a Device,
    params: &'a QxxParams,
    order: Vec<usize>,
    assign: Vec<usize>,
    used: Vec<bool>,
    scratch: Vec<f64>,
    deadline: Option<Instant>,
    started: Instant,
    expansions: u64,
    path: Vec<usize>,
    best: Option<(f64, Vec<usize>)>,
}

impl Search<'_> {
    fn node_cost(&mut self) -> f64 {
        self.scratch.iter_mut().for_each(|o| *o = 0.0);
        evaluate(self.gates, &self.assign, self.device, self.params, &mut self.scratch).unwrap_or(0.0)
    }

    /// Explores the subtree below the current assignment down to level
    /// `end`, recording the first cheapest leaf.
    fn descend(&mut self, level: usize, end: usize, cost: f64) -> Result<(), PlacementError> {
        if level == end {
            if self.best.as_ref().is_none_or(|(best, _)| cost < *best) {
                self.best = Some((cost, self.path.clone()));
            }
            return Ok(());
        }
        if let Some(deadline) = self.deadline {
            if Instant::now() > deadline {
                return Err(PlacementError::TimedOut(self.started.elapsed()));
            }
        }
        self.expansions += 1;

        let qubit = self.order[level];
        let mut children = Vec::with_capacity(self.used.len());
        for register in 0..self.used.len() {
            if self.used[register] {
                continue;
            }
            self.assign[qubit] = register;
            let cost = self.node_cost();
            children.push(Candidate { register, cost });
        }
        self.assign[qubit] = UNMAPPED;
        // stable: equal costs stay in register order
        children.sort_by(|a, b| a.cost.total_cmp(&b.cost));
        children.truncate(self.params.max_children as usize);

        for child in children {
            self.assign[qubit] = child.register;
            self.used[child.register] = true;
            self.path.push(child.register);
            let result = self.descend(level + 1, end, child.cost);
            self.path.pop();
            self.used[child.register] = false;
            self.assign[qubit] = UNMAPPED;
            result?;
        }
        Ok(())
    }
}

/// Runs the QXX tree search and returns the cheapest complete mapping.
///
/// Qubits are placed in order of first appearance in the gate list. The
/// search is deterministic: equal-cost children are ranked by register
/// index, and the earliest cheapest leaf wins. `deadline` is checked before
/// every node expansion.
pub fn place(
    circuit: &Circuit,
    device: &Device,
    params: &QxxParams,
    deadline: Option<Duration>,
) -> Result<Placement, PlacementError> {
    params.validate()?;
    let q = circuit.num_qubits();
    let n = device.num_registers();
    if q > n {
        return Err(PlacementError::TooManyQubits { qubits: q, registers: n });
    }
    let started = Instant::now();
    let mut search = Search {
        gates: circuit.gates(),
        device,
        params,
        order: circuit.qubits_by_first_use(),
        assign: vec![UNMAPPED; q],
        used: vec![false; n],
        scratch: vec![0.0; q],
        deadline: deadline.and_then(|d| started.checked_add(d)),
        started,
        expansions: 0,
        path: Vec::new(),
        best: None,
    };

    let window = params.max_depth as usize;
    let mut level = 0;
    while level < q {
        let end = ((level / window + 1) * window).min(q);
        search.best = None;
        search.descend(level, end, 0.0)?;
        let (_, path) = search.best.take().expect("every window yields a leaf");
        for (k, &register) in path.iter().enumerate() {
            let qubit = search.order[level + k];
            search.assign[qubit] = register;
            search.used[register] = true;
        }
        level = end;
    }

    let mut mapping = PartialMapping::new(q, n);
    for (qubit, &register) in search.assign.iter().enumerate() {
        mapping.assign(qubit, register)?;
    }
    let mut offsets = vec![0.0; q];
    let cost = evaluate(circuit.gates(), &search.assign, device, params, &mut offsets).unwrap_or(0.0);
    mapping.set_offsets(offsets);
    Ok(Placement { mapping, cost, expansions: search.expansions })
}
