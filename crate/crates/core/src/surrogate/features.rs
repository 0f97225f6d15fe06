//! Interaction-graph features of a circuit.

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::graph::Graph;
use crate::placement::QxxParams;

pub const PAGERANK_DAMPING: f64 = 0.85;
const PAGERANK_TOL: f64 = 1e-9;
const PAGERANK_MAX_ITER: usize = 10_000;

/// Column order of a full feature vector.
pub const FEATURE_NAMES: [&str; 12] = [
    "max_page_rank",
    "nr_conn_comp",
    "edges",
    "nodes",
    "efficiency",
    "smetric",
    "max_depth",
    "max_children",
    "b",
    "c",
    "movement_factor",
    "edge_cost",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphFeatures {
    pub max_page_rank: f64,
    pub nr_conn_comp: f64,
    pub edges: f64,
    pub nodes: f64,
    pub efficiency: f64,
    pub smetric: f64,
}

impl GraphFeatures {
    pub fn of(circuit: &Circuit) -> Self {
        Self::of_graph(&circuit.interaction_graph())
    }

    pub fn of_graph(g: &Graph) -> Self {
        let pr = pagerank(g);
        Self {
            max_page_rank: pr.iter().copied().fold(0.0, f64::max),
            nr_conn_comp: g.connected_components() as f64,
            edges: g.num_edges() as f64,
            nodes: g.num_vertices() as f64,
            efficiency: global_efficiency(g),
            smetric: s_metric(g),
        }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [self.max_page_rank, self.nr_conn_comp, self.edges, self.nodes, self.efficiency, self.smetric]
    }
}

/// Graph features followed by the parameters, in [`FEATURE_NAMES`] order.
pub fn feature_vector(graph: &GraphFeatures, params: &QxxParams) -> Vec<f64> {
    let mut v = graph.to_array().to_vec();
    v.extend_from_slice(&params.to_array());
    v
}

/// PageRank by power iteration. Each undirected edge is followed in both
/// directions; the mass of isolated vertices is spread uniformly.
pub fn pagerank(g: &Graph) -> Vec<f64> {
    let n = g.num_vertices();
    if n == 0 {
        return Vec::new();
    }
    let nf = n as f64;
    let mut x = vec![1.0 / nf; n];
    let mut next = vec![0.0; n];
    for _ in 0..PAGERANK_MAX_ITER {
        let dangling: f64 = (0..n).filter(|&v| g.degree(v) == 0).map(|v| x[v]).sum();
        let base = (1.0 - PAGERANK_DAMPING) / nf + PAGERANK_DAMPING * dangling / nf;
        next.iter_mut().for_each(|t| *t = base);
        for v in 0..n {
            let deg = g.degree(v);
            if deg == 0 {
                continue;
            }
            let share = PAGERANK_DAMPING * x[v] / deg as f64;
            for &u in g.neighbors(v) {
                next[u] += share;
            }
        }
        let err: f64 = x.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
        std::mem::swap(&mut x, &mut next);
        if err < nf * PAGERANK_TOL {
            break;
        }
    }
    x
}

/// Mean of `1/d(u,v)` over ordered pairs of distinct vertices, unreachable
/// pairs contributing 0.
pub fn global_efficiency(g: &Graph) -> f64 {
    let n = g.num_vertices();
    if n < 2 {
        return 0.0;
    }
    let mut sum = 0.0;
    for s in 0..n {
        for (t, d) in g.bfs(s).into_iter().enumerate() {
            if t != s {
                if let Some(d) = d {
                    sum += 1.0 / f64::from(d);
                }
            }
        }
    }
    sum / (n * (n - 1)) as f64
}

/// Sum over edges of the product of endpoint degrees.
pub fn s_metric(g: &Graph) -> f64 {
    g.edges().map(|(a, b)| (g.degree(a) * g.degree(b)) as f64).sum()
}
