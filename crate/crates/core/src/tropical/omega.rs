use num_traits::{Signed, Zero};

use crate::lattice::{side_value, LatticePoint, LatticePolygon, Location, PlanePoint};
use crate::rational::Rational;

use super::curve::{residual, tropical_area, CurveEdge, EdgeEnd, TropicalCurve};
use super::polynomial::TropicalPolynomial;
use super::TropicalError;

fn r(v: i64) -> Rational {
    Rational::from_integer(v as i128)
}

fn point_at(p: &PlanePoint, d: LatticePoint, t: Rational) -> PlanePoint {
    PlanePoint::new(p.x + t * r(d.x), p.y + t * r(d.y))
}

/// Clips every edge to the closed polygon, drops pieces lying on its
/// boundary, and splits edges at polygon vertices they pass through.
pub fn restrict_to_polygon(curve: &TropicalCurve, polygon: &LatticePolygon) -> TropicalCurve {
    let mut out = TropicalCurve::default();
    for v in polygon.vertices() {
        out.vertices.push(PlanePoint::from_lattice(*v));
    }
    'edges: for (i, e) in curve.edges.iter().enumerate() {
        let s = &curve.vertices[e.start];
        let mut lo = Rational::zero();
        let mut hi = curve.edge_span(i);
        for side in polygon.sides() {
            let f0 = side_value(side, s);
            let f1 = side_value(side, &point_at(s, e.dir, Rational::from_integer(1))) - f0;
            if f1.is_zero() {
                if f0 <= Rational::zero() {
                    // outside, or running along the side
                    continue 'edges;
                }
                continue;
            }
            let t = -f0 / f1;
            if f1.is_positive() {
                lo = lo.max(t);
            } else {
                hi = Some(hi.map_or(t, |h| h.min(t)));
            }
        }
        let hi = hi.expect("a bounded polygon caps every ray");
        if lo >= hi {
            continue;
        }
        let a = out.vertices.len();
        out.vertices.push(point_at(s, e.dir, lo));
        out.vertices.push(point_at(s, e.dir, hi));
        out.edges.push(CurveEdge { start: a, end: EdgeEnd::Vertex(a + 1), dir: e.dir, weight: e.weight });
    }
    out.normalize()
}

/// A bounded balanced curve in `Ω` with its side labels `d_s`, indexed like
/// the polygon's sides.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaTropicalCurve {
    pub polygon: LatticePolygon,
    pub graph: TropicalCurve,
    pub side_labels: Vec<i64>,
}

impl OmegaTropicalCurve {
    pub fn area(&self) -> f64 {
        tropical_area(&self.graph).expect("restricted curves are bounded")
    }

    /// Graph vertex index of each polygon vertex.
    pub fn corner_vertices(&self) -> Vec<usize> {
        self.polygon
            .vertices()
            .iter()
            .map(|v| {
                let p = PlanePoint::from_lattice(*v);
                self.graph.vertices.iter().position(|q| *q == p).expect("corners are graph vertices")
            })
            .collect()
    }
}

/// Restricts `curve` to `polygon`, checks that it meets the boundary
/// exactly at the polygon's vertices and is balanced inside, and solves
/// the outer balancing systems for the side labels.
pub fn solve_side_labels(curve: &TropicalCurve, polygon: &LatticePolygon) -> Result<OmegaTropicalCurve, TropicalError> {
    let graph = restrict_to_polygon(curve, polygon);
    let n = polygon.vertices().len();
    let mut corner_index = vec![None; n];
    for (vi, p) in graph.vertices.iter().enumerate() {
        match polygon.locate(p) {
            Location::Interior => {
                let res = residual(&graph, vi);
                if !res.is_zero() {
                    return Err(TropicalError::Unbalanced { vertex: vi, residual: res });
                }
            }
            Location::Vertex => corner_index[polygon.vertex_index(p).expect("located as vertex")] = Some(vi),
            Location::Edge | Location::Outside => return Err(TropicalError::BoundaryViolation(p.clone())),
        }
    }
    let sides = polygon.sides();
    // labels[i] = (from the start vertex of side i, from its end vertex)
    let mut from_start = vec![0i64; n];
    let mut from_end = vec![0i64; n];
    for i in 0..n {
        let vi = corner_index[i].ok_or(TropicalError::MissingCorner(i))?;
        let s = residual(&graph, vi);
        let la = sides[i].primitive;
        let lb = sides[(i + n - 1) % n].primitive.neg();
        let (da, db) = outer_labels(s, la, lb).ok_or(TropicalError::NoSolution { vertex: i })?;
        from_start[i] = da;
        from_end[(i + n - 1) % n] = db;
    }
    for i in 0..n {
        if from_start[i] != from_end[i] {
            return Err(TropicalError::Inconsistent { side: i, first: from_start[i], second: from_end[i] });
        }
    }
    Ok(OmegaTropicalCurve { polygon: polygon.clone(), graph, side_labels: from_start })
}

/// Positive integers `(d_a, d_b)` with `d_a·l_a + d_b·l_b = flux`, if any.
/// The side primitives must be linearly independent.
pub fn outer_labels(flux: LatticePoint, l_a: LatticePoint, l_b: LatticePoint) -> Option<(i64, i64)> {
    let det = l_a.cross(l_b);
    let (na, nb) = (flux.cross(l_b), l_a.cross(flux));
    if det == 0 || na % det != 0 || nb % det != 0 || na / det <= 0 || nb / det <= 0 {
        return None;
    }
    Some((na / det, nb / det))
}

/// Whether `poly` is identically zero on `∂Ω` (and hence non-negative on `Ω`):
/// every monomial is non-negative at every polygon vertex, and each side
/// carries a monomial vanishing at both of its endpoints.
pub fn vanishes_on_boundary(poly: &TropicalPolynomial, polygon: &LatticePolygon) -> bool {
    let corners: Vec<PlanePoint> = polygon.vertices().iter().map(|v| PlanePoint::from_lattice(*v)).collect();
    let nonneg = poly
        .terms()
        .all(|(k, a)| corners.iter().all(|p| !TropicalPolynomial::monomial_at(k, &a, p).is_negative()));
    nonneg
        && polygon.sides().iter().all(|s| {
            let (p, q) = (PlanePoint::from_lattice(s.from), PlanePoint::from_lattice(s.to));
            poly.terms().any(|(k, a)| {
                TropicalPolynomial::monomial_at(k, &a, &p).is_zero() && TropicalPolynomial::monomial_at(k, &a, &q).is_zero()
            })
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::tropical::corner_locus;

    fn unit_square() -> LatticePolygon {
        LatticePolygon::from_coords(&[(0, 0), (1, 0), (1, 1), (0, 1)]).unwrap()
    }

    fn x_poly() -> TropicalPolynomial {
        TropicalPolynomial::from_terms(&[((1, 0), int(0)), ((0, 1), int(0)), ((-1, 0), int(1)), ((0, -1), int(1))])
            .unwrap()
    }

    #[test]
    fn diagonals_of_square_get_unit_labels() {
        let c = corner_locus(&x_poly()).unwrap();
        let o = solve_side_labels(&c, &unit_square()).unwrap();
        assert_eq!(o.side_labels, vec![1, 1, 1, 1]);
        assert_eq!(o.graph.edges.len(), 4);
        assert!((o.area() - 4.0).abs() < 1e-12);
        assert!(vanishes_on_boundary(&x_poly(), &unit_square()));
    }

    #[test]
    fn star_with_midlines_touches_sides() {
        // both diagonals plus the two midlines through the center
        let c = TropicalCurve {
            vertices: vec![PlanePoint::new(rat(1, 2), rat(1, 2))],
            edges: [(1, 1), (-1, -1), (1, -1), (-1, 1), (1, 0), (-1, 0), (0, 1), (0, -1)]
                .iter()
                .map(|&d| CurveEdge { start: 0, end: EdgeEnd::Ray, dir: d.into(), weight: 1 })
                .collect(),
        };
        let err = solve_side_labels(&c, &unit_square()).unwrap_err();
        assert!(matches!(err, TropicalError::BoundaryViolation(_)));
    }

    #[test]
    fn steep_corner_edge_reads_off_labels() {
        // edge (1,2) out of the origin corner of [0,4]²
        let sq = LatticePolygon::from_coords(&[(0, 0), (4, 0), (4, 4), (0, 4)]).unwrap();
        let c = TropicalCurve {
            vertices: vec![PlanePoint::new(int(0), int(0)), PlanePoint::new(int(1), int(2))],
            edges: vec![CurveEdge { start: 0, end: EdgeEnd::Vertex(1), dir: (1, 2).into(), weight: 1 }],
        };
        let g = restrict_to_polygon(&c, &sq);
        let corner = g.vertices.iter().position(|p| *p == PlanePoint::new(int(0), int(0))).unwrap();
        let s = residual(&g, corner);
        assert_eq!(s, LatticePoint::new(1, 2));
        assert_eq!(outer_labels(s, LatticePoint::new(1, 0), LatticePoint::new(0, 1)), Some((1, 2)));
        assert_eq!(outer_labels(LatticePoint::new(-1, 2), LatticePoint::new(1, 0), LatticePoint::new(0, 1)), None);
        assert_eq!(outer_labels(LatticePoint::new(1, 1), LatticePoint::new(2, 0), LatticePoint::new(0, 1)), None);
        // the open end at (1, 2) is an unbalanced interior vertex
        assert!(matches!(solve_side_labels(&c, &sq), Err(TropicalError::Unbalanced { .. })));
    }

    #[test]
    fn missing_corner_is_reported() {
        // a single diagonal misses two corners
        let c = TropicalCurve {
            vertices: vec![PlanePoint::new(int(0), int(0))],
            edges: vec![CurveEdge { start: 0, end: EdgeEnd::Ray, dir: (1, 1).into(), weight: 1 }],
        };
        assert_eq!(solve_side_labels(&c, &unit_square()), Err(TropicalError::MissingCorner(1)));
    }

    #[test]
    fn clipping_is_exact() {
        let f = TropicalPolynomial::from_terms(&[((1, 0), int(0)), ((0, 1), int(0)), ((0, 0), rat(1, 3))]).unwrap();
        let c = restrict_to_polygon(&corner_locus(&f).unwrap(), &unit_square());
        // vertex (1/3, 1/3): arms up to (1/3, 1), right to (1, 1/3), and the diagonal down to the origin
        assert!(c.vertices.contains(&PlanePoint::new(rat(1, 3), int(1))));
        assert!(c.vertices.contains(&PlanePoint::new(int(0), int(0))));
        assert!(c.is_bounded());
    }

    #[test]
    fn boundary_vanishing_detects_offsets() {
        let sq = unit_square();
        assert!(!vanishes_on_boundary(&x_poly().shifted(rat(1, 8)), &sq));
        let mut f = x_poly();
        f.set_coefficient(LatticePoint::new(0, 0), rat(1, 4));
        assert!(vanishes_on_boundary(&f, &sq));
        f.set_coefficient(LatticePoint::new(0, 0), rat(-1, 4));
        assert!(!vanishes_on_boundary(&f, &sq));
    }
}
