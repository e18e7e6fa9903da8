//! Networks whose nodes are parametric LP/QP programs wired by affine edges.

mod compose;
mod concat;
mod graph;
mod program;
pub(crate) mod serial;

pub use compose::{parallel, series};
pub use concat::concatenate;
pub use graph::{
    Audit, Complexity, Guard, LayerStats, NetEdge, NetNode, NetworkBuilder, NodeTrace, Readout, ReadoutTerm, Selector,
    SolutionNetwork, Source, Workspace, DEFAULT_GUARD_ETA,
};
pub use program::{Affine, AffineArray, AffineTerm, Input, ParamProgram};
pub use serial::{network_from_json, network_to_json, FORMAT_VERSION};

use thiserror::Error;

use crate::lp::LpError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetError {
    #[error("expected {expected} inputs, got {got}")]
    InputDimension { expected: usize, got: usize },
    #[error("node {node} ({name}) is infeasible at this input")]
    NodeInfeasible { node: usize, name: String },
    #[error("node {node} ({name}) is unbounded at this input")]
    NodeUnbounded { node: usize, name: String },
    #[error("input within the guard band of node {node} ({label}), value {value:e}")]
    DomainBoundary { node: usize, label: String, value: f64 },
    #[error("invalid wiring: {0}")]
    InvalidEdge(String),
    #[error("graph contains a cycle")]
    Cycle,
    #[error("incompatible bounds: {0}")]
    IncompatibleBounds(String),
    #[error("cannot merge LP and QP nodes")]
    MixedProgramKinds,
    #[error("schema violation: {0}")]
    SchemaViolation(String),
    #[error(transparent)]
    Solver(#[from] LpError),
}
