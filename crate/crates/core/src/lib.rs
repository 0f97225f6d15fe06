//! QXX: search-based initial placement for quantum circuit layout.
//!
//! The crate covers the whole layout pipeline:
//!
//! - [`circuit`] and [`device`]: two-qubit circuit IR and device connectivity.
//! - [`placement`]: the Gaussian-weighted tree search that picks the initial
//!   qubit-to-register mapping.
//! - [`router`]: a seeded SWAP-inserting scheduler plus a semantic checker.
//! - [`benchgen`]: benchmark circuits whose optimal depth is known.
//! - [`optimizer`]: exhaustive, random and weighted random search over the
//!   placement parameters.
//! - [`surrogate`]: graph features, KNN and MLP regressors predicting the
//!   depth ratio, with nested cross-validation.
//! - [`metrics`]: Count/Rank importance metrics and plot-ready tables.

pub mod benchgen;
pub mod circuit;
pub mod device;
pub mod graph;
pub mod metrics;
pub mod optimizer;
pub mod placement;
pub mod results;
pub mod router;
pub mod seed;
pub mod surrogate;

pub use circuit::{Circuit, Gate, GateKind, DEFAULT_SWAP_WEIGHT};
pub use device::Device;
pub use placement::{gdepth, place, PartialMapping, Placement, QxxParams};
pub use router::{ratio, route, verify, RoutedCircuit};
