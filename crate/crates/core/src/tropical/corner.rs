use std::collections::BTreeMap;

use num_traits::Zero;

use crate::lattice::{lattice_length, primitive_vector, LatticePoint, PlanePoint};
use crate::rational::Rational;

use super::curve::{CurveEdge, EdgeEnd, TropicalCurve};
use super::polynomial::TropicalPolynomial;
use super::TropicalError;

fn r(v: i64) -> Rational {
    Rational::from_integer(v as i128)
}

/// Corner locus of `poly` as a normalized weighted curve. Edges are dual to
/// the edges of the regular subdivision of the support; weights are the
/// lattice lengths of the dual edges.
pub fn corner_locus(poly: &TropicalPolynomial) -> Result<TropicalCurve, TropicalError> {
    let terms: Vec<(LatticePoint, Rational)> = poly.terms().collect();
    if terms.len() < 2 {
        return Err(TropicalError::EmptyCurve);
    }
    let base = terms[0].0;
    let spans_plane = terms.iter().any(|(k, _)| terms.iter().any(|(m, _)| (*k - base).cross(*m - base) != 0));
    let curve = if spans_plane { planar_locus(poly, &terms) } else { linear_locus(&terms) }?;
    Ok(curve.normalize())
}

/// Support on a line: the curve is a family of parallel lines.
fn linear_locus(terms: &[(LatticePoint, Rational)]) -> Result<TropicalCurve, TropicalError> {
    let base = terms[0].0;
    let q = terms
        .iter()
        .find(|(k, _)| *k != base)
        .map(|(k, _)| primitive_vector(*k - base).expect("distinct exponents"))
        .expect("two monomials");
    // m = base + t·q; restricted to the line, F = base·x + min_t (t·s + a_t) with s = q·x
    let mut pts: Vec<(i64, Rational)> =
        terms.iter().map(|(k, a)| ((*k - base).dot(q) / q.dot(q), *a)).collect();
    pts.sort();
    let mut hull: Vec<(i64, Rational)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b unless it lies strictly below segment a–p
            if (b.1 - a.1) * r(p.0 - a.0) >= (p.1 - a.1) * r(b.0 - a.0) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    if hull.len() < 2 {
        return Err(TropicalError::EmptyCurve);
    }
    let dir = LatticePoint::new(-q.y, q.x);
    let qq = r(q.dot(q));
    let mut curve = TropicalCurve::default();
    for w in hull.windows(2) {
        let ((t1, a1), (t2, a2)) = (w[0], w[1]);
        // t1·s + a1 = t2·s + a2
        let s = (a1 - a2) / r(t2 - t1);
        let foot = PlanePoint::new(s * r(q.x) / qq, s * r(q.y) / qq);
        let v = curve.vertices.len();
        curve.vertices.push(foot);
        let weight = (t2 - t1) as u64;
        curve.edges.push(CurveEdge { start: v, end: EdgeEnd::Ray, dir, weight });
        curve.edges.push(CurveEdge { start: v, end: EdgeEnd::Ray, dir: dir.neg(), weight });
    }
    Ok(curve)
}

/// Full-dimensional support: vertices from triple ties, edges from the
/// hulls of the tie sets.
fn planar_locus(poly: &TropicalPolynomial, terms: &[(LatticePoint, Rational)]) -> Result<TropicalCurve, TropicalError> {
    let n = terms.len();
    let mut vertices: BTreeMap<PlanePoint, Vec<LatticePoint>> = BTreeMap::new();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (ki, ai) = terms[i];
                let (kj, aj) = terms[j];
                let (kk, ak) = terms[k];
                let (u, w) = (ki - kj, ki - kk);
                let det = u.cross(w);
                if det == 0 {
                    continue;
                }
                // u·x = aj − ai, w·x = ak − ai
                let (b1, b2) = (aj - ai, ak - ai);
                let det = r(det);
                let x = (b1 * r(w.y) - b2 * r(u.y)) / det;
                let y = (r(u.x) * b2 - r(w.x) * b1) / det;
                let p = PlanePoint::new(x, y);
                if vertices.contains_key(&p) {
                    continue;
                }
                let ev = poly.evaluate(&p);
                if ev.value == TropicalPolynomial::monomial_at(ki, &ai, &p) {
                    vertices.insert(p, ev.argmin);
                }
            }
        }
    }
    let mut curve = TropicalCurve::default();
    // hull edge (extreme exponents) → (vertex, outgoing direction, weight)
    let mut half_edges: BTreeMap<(LatticePoint, LatticePoint), Vec<(usize, LatticePoint, u64)>> = BTreeMap::new();
    for (p, ties) in vertices {
        let v = curve.vertices.len();
        curve.vertices.push(p);
        let hull = strict_hull(ties);
        for idx in 0..hull.len() {
            let (a, b) = (hull[idx], hull[(idx + 1) % hull.len()]);
            let e = b - a;
            let dir = primitive_vector(LatticePoint::new(-e.y, e.x)).expect("distinct hull points");
            let key = if a < b { (a, b) } else { (b, a) };
            half_edges.entry(key).or_default().push((v, dir, lattice_length(e) as u64));
        }
    }
    for (key, ends) in half_edges {
        match ends.as_slice() {
            [(v, dir, m)] => curve.edges.push(CurveEdge { start: *v, end: EdgeEnd::Ray, dir: *dir, weight: *m }),
            [(v, dir, m), (w, dir2, _)] => {
                debug_assert_eq!(*dir, dir2.neg());
                let (s, e, d) = orient(&curve.vertices, *v, *w, *dir);
                curve.edges.push(CurveEdge { start: s, end: EdgeEnd::Vertex(e), dir: d, weight: *m });
            }
            _ => unreachable!("subdivision edge {key:?} has {} dual endpoints", ends.len()),
        }
    }
    Ok(curve)
}

fn orient(vertices: &[PlanePoint], v: usize, w: usize, dir: LatticePoint) -> (usize, usize, LatticePoint) {
    let dx = vertices[w].x - vertices[v].x;
    let dy = vertices[w].y - vertices[v].y;
    let forward = dx * r(dir.x) + dy * r(dir.y) > Rational::zero();
    if forward {
        (v, w, dir)
    } else {
        (w, v, dir.neg())
    }
}

/// Counterclockwise hull without collinear points.
fn strict_hull(mut pts: Vec<LatticePoint>) -> Vec<LatticePoint> {
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let half = |iter: &mut dyn Iterator<Item = LatticePoint>| {
        let mut out: Vec<LatticePoint> = Vec::new();
        for p in iter {
            while out.len() >= 2 && (out[out.len() - 1] - out[out.len() - 2]).cross(p - out[out.len() - 1]) <= 0 {
                out.pop();
            }
            out.push(p);
        }
        out.pop();
        out
    };
    let mut lower = half(&mut pts.clone().into_iter());
    let upper = half(&mut pts.into_iter().rev());
    lower.extend(upper);
    lower
}
