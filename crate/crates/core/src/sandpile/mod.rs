//! Sandpile states, legal topplings, relaxation with odometer tracking, the
//! least-action check and deviation-locus extraction.

mod least_action;
mod locus;
mod relax;
mod state;

use thiserror::Error;

use crate::lattice::LatticePoint;

pub use least_action::{discrete_laplacian, verify_least_action, LeastActionReport};
pub use locus::{deviation_set, DeviationLocus, LocusSite};
pub use relax::{relax_naive, relax_queue, relax_queue_observed, RelaxOptions, DEFAULT_CEILING};
pub use state::{Odometer, RelaxationResult, SandState, Topology, NO_SITE};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("{0} is not a site of the domain")]
    NotASite(LatticePoint),
    #[error("perturbation lands on {0}, which is not a site")]
    PointOutsideDomain(LatticePoint),
    #[error("toppling at {site} is illegal: height {height} < 4")]
    IllegalToppling { site: LatticePoint, height: u32 },
    #[error("relaxation exceeded the toppling ceiling after {topplings} topplings")]
    NonTermination { topplings: u64 },
    #[error("expected {expected} per-site values, got {got}")]
    SizeMismatch { expected: usize, got: usize },
}
