//! Min-plus polynomials in two variables, their corner loci as weighted
//! balanced graphs, and curves inside a lattice polygon.

mod corner;
mod curve;
mod omega;
mod polynomial;

use thiserror::Error;

use crate::lattice::{LatticePoint, PlanePoint};

pub use corner::corner_locus;
pub use curve::{check_balancing, distance_to_curve, residual, passes_through, tropical_area, BalancingReport, CurveEdge, EdgeEnd, PassReport, TropicalCurve};
pub use omega::{outer_labels, restrict_to_polygon, solve_side_labels, vanishes_on_boundary, OmegaTropicalCurve};
pub use polynomial::{Evaluation, TropicalPolynomial};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TropicalError {
    #[error("a tropical polynomial needs at least one monomial")]
    Empty,
    #[error("monomial {0} appears twice")]
    DuplicateMonomial(LatticePoint),
    #[error("one monomial dominates everywhere, the corner locus is empty")]
    EmptyCurve,
    #[error("edge {0} is unbounded")]
    UnboundedEdge(usize),
    #[error("edge {edge} has direction {dir}, which is not primitive")]
    NonPrimitiveDirection { edge: usize, dir: LatticePoint },
    #[error("edge {edge} references missing vertex {vertex}")]
    BadVertexIndex { edge: usize, vertex: usize },
    #[error("edge {0} has zero weight")]
    ZeroWeight(usize),
    #[error("edge {edge} does not point along its direction")]
    MisalignedEdge { edge: usize },
    #[error("side labels at polygon vertex {vertex} are not positive integers")]
    NoSolution { vertex: usize },
    #[error("the two endpoints of side {side} disagree on its label ({first} vs {second})")]
    Inconsistent { side: usize, first: i64, second: i64 },
    #[error("curve meets the polygon boundary away from its vertices at {0}")]
    BoundaryViolation(PlanePoint),
    #[error("curve does not reach polygon vertex {0}")]
    MissingCorner(usize),
    #[error("interior vertex {vertex} is unbalanced, residual {residual}")]
    Unbalanced { vertex: usize, residual: LatticePoint },
    #[error("malformed curve or polynomial: {0}")]
    Format(String),
}
