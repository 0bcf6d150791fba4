//! Exact-arithmetic invariants of negative-definite plumbed 3-manifolds:
//! lattice cohomology via weight-table reduction, Seiberg-Witten invariants
//! via Euler characteristics and periodic constants of the topological
//! Poincare series, and equivariant Ehrhart lattice-point counts.
//!
//! Everything is computed over arbitrary-precision integers and rationals;
//! there is no floating point anywhere in the core.

pub mod arith;
pub mod ehrhart;
pub mod homology;
pub mod laufer;
pub mod par;
pub mod plumbing;
pub mod reduction;
pub mod series;

use std::sync::OnceLock;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: duplicate vertex id `{id}`")]
    DuplicateVertex { id: String, line: usize },
    #[error("line {line}: edge references unknown vertex id `{id}`")]
    UnknownVertex { id: String, line: usize },
    #[error("not a tree")]
    NotATree,
    #[error("not negative definite")]
    NotNegativeDefinite,
    #[error("leg at `{0}` is not a normalizable chain")]
    LegNotChain(String),
    #[error("expected {expected} node(s), found {found}")]
    WrongNodeCount { expected: usize, found: usize },
    #[error("invalid bad vertex set: {0}")]
    InvalidBadSet(String),
    #[error("step cap exceeded ({0} iterations); raise LATCOH_STEP_CAP")]
    StepCapExceeded(u64),
    #[error("generator search cap exceeded")]
    VSearchCapExceeded,
    #[error("nonzero fit residual: {0}")]
    FitResidual(String),
    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Iteration guard for Laufer-type ascents, overridable via LATCOH_STEP_CAP.
pub fn step_cap() -> u64 {
    static CAP: OnceLock<u64> = OnceLock::new();
    *CAP.get_or_init(|| {
        std::env::var("LATCOH_STEP_CAP")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(1_000_000)
    })
}
