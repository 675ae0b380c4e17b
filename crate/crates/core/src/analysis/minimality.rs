use num_traits::Zero;
use serde::Serialize;

use crate::lattice::{LatticePoint, LatticePolygon, PlanePoint};
use crate::rational::{format_rational, to_f64, Rational};
use crate::tropical::{
    corner_locus, passes_through, solve_side_labels, vanishes_on_boundary, EdgeEnd, TropicalCurve, TropicalPolynomial,
};

/// Why a polynomial is or is not the polynomial of an admissible curve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Admissibility {
    Admissible,
    /// Not identically zero on the polygon boundary.
    BoundaryNonzero,
    /// The corner locus is not a valid curve in the polygon.
    CurveInvalid(String),
    /// The curve misses one of the points.
    MissesPoints,
}

/// Admissibility of `poly`: zero on `∂Ω`, corner locus an Ω-tropical curve,
/// and the curve passing exactly through `points`.
pub fn admissibility(poly: &TropicalPolynomial, polygon: &LatticePolygon, points: &[PlanePoint]) -> Admissibility {
    if !vanishes_on_boundary(poly, polygon) {
        return Admissibility::BoundaryNonzero;
    }
    let curve = match corner_locus(poly).and_then(|c| solve_side_labels(&c, polygon)) {
        Ok(c) => c,
        Err(e) => return Admissibility::CurveInvalid(e.to_string()),
    };
    if passes_through(&curve.graph, points, 0.0).passed() {
        Admissibility::Admissible
    } else {
        Admissibility::MissesPoints
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonomialProbe {
    pub monomial: LatticePoint,
    pub coefficient: String,
    /// Outcome after raising the coefficient by the step.
    pub raised: Admissibility,
    /// Outcome after lowering the coefficient by the step.
    pub lowered: Admissibility,
}

impl MonomialProbe {
    pub fn raise_breaks(&self) -> bool {
        self.raised != Admissibility::Admissible
    }

    pub fn lower_breaks(&self) -> bool {
        self.lowered != Admissibility::Admissible
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimalityReport {
    /// The unperturbed polynomial is admissible for the snapped points.
    pub precondition: Admissibility,
    pub snapped_points: Vec<(f64, f64)>,
    pub probes: Vec<MonomialProbe>,
}

impl MinimalityReport {
    pub fn raise_ok(&self) -> bool {
        self.probes.iter().all(MonomialProbe::raise_breaks)
    }

    pub fn lower_ok(&self) -> bool {
        self.probes.iter().all(MonomialProbe::lower_breaks)
    }

    pub fn passed(&self) -> bool {
        self.precondition == Admissibility::Admissible && !self.probes.is_empty() && self.raise_ok() && self.lower_ok()
    }
}

fn nearest_on_curve(curve: &TropicalCurve, p: &PlanePoint) -> Option<(PlanePoint, f64)> {
    let pf = p.to_f64();
    let d = |q: &PlanePoint| {
        let qf = q.to_f64();
        ((qf.0 - pf.0).powi(2) + (qf.1 - pf.1).powi(2)).sqrt()
    };
    let mut best: Option<(PlanePoint, f64)> = None;
    let mut consider = |q: PlanePoint| {
        let dq = d(&q);
        if best.as_ref().map_or(true, |(_, b)| dq < *b) {
            best = Some((q, dq));
        }
    };
    for v in &curve.vertices {
        consider(v.clone());
    }
    for (i, e) in curve.edges.iter().enumerate() {
        let a = &curve.vertices[e.start];
        let (dx, dy) = (Rational::from_integer(e.dir.x as i128), Rational::from_integer(e.dir.y as i128));
        let mut t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / (dx * dx + dy * dy);
        if t < Rational::zero() {
            continue;
        }
        if let (EdgeEnd::Vertex(_), Some(span)) = (e.end, curve.edge_span(i)) {
            if t > span {
                t = span;
            }
        }
        consider(PlanePoint::new(a.x + t * dx, a.y + t * dy));
    }
    best
}

/// Necessary condition of pointwise minimality: raising or lowering any one
/// coefficient by `step` must break admissibility. Points within
/// `snap_tol` of the fitted curve are first moved onto it.
pub fn minimality_probe(
    poly: &TropicalPolynomial,
    polygon: &LatticePolygon,
    points: &[PlanePoint],
    step: Rational,
    snap_tol: f64,
) -> MinimalityReport {
    let curve = corner_locus(poly).and_then(|c| solve_side_labels(&c, polygon));
    let snapped: Vec<PlanePoint> = match &curve {
        Ok(c) => points
            .iter()
            .map(|p| match nearest_on_curve(&c.graph, p) {
                Some((q, d)) if d <= snap_tol => q,
                _ => p.clone(),
            })
            .collect(),
        Err(_) => points.to_vec(),
    };
    let precondition = admissibility(poly, polygon, &snapped);
    let probes = poly
        .terms()
        .map(|(k, a)| {
            let mut up = poly.clone();
            up.set_coefficient(k, a + step);
            let mut down = poly.clone();
            down.set_coefficient(k, a - step);
            MonomialProbe {
                monomial: k,
                coefficient: format_rational(&a),
                raised: admissibility(&up, polygon, &snapped),
                lowered: admissibility(&down, polygon, &snapped),
            }
        })
        .collect();
    MinimalityReport {
        precondition,
        snapped_points: snapped.iter().map(|p| (to_f64(&p.x), to_f64(&p.y))).collect(),
        probes,
    }
}
