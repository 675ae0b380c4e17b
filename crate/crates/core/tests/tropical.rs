mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use tropical_sandpile::lattice::{LatticePoint, LatticePolygon, PlanePoint};
use tropical_sandpile::rational::{int, rat, Rational};

use tropical_sandpile::tropical::{
    check_balancing, corner_locus, solve_side_labels, tropical_area, CurveEdge, EdgeEnd, TropicalCurve,
    TropicalPolynomial,
};

fn poly_strategy() -> impl Strategy<Value = TropicalPolynomial> {
    prop::collection::btree_map((-4i64..=4, -4i64..=4), (-40i128..=40, 1i128..=8), 2..=6).prop_map(|m| {
        TropicalPolynomial::new(m.into_iter().map(|((k, l), (p, q))| (LatticePoint::new(k, l), rat(p, q)))).unwrap()
    })
}

/// Sum of weighted ray directions grouped by direction.
fn ray_flux(c: &TropicalCurve) -> BTreeMap<LatticePoint, u64> {
    let mut m = BTreeMap::new();
    for e in c.edges.iter().filter(|e| !e.is_bounded()) {
        *m.entry(e.dir).or_insert(0) += e.weight;
    }
    m
}

/// Inward normals of the support hull edges, weighted by lattice length.
fn hull_flux(poly: &TropicalPolynomial) -> BTreeMap<LatticePoint, u64> {
    let mut pts: Vec<LatticePoint> = poly.support().collect();
    pts.sort();
    let cross = |o: LatticePoint, a: LatticePoint, b: LatticePoint| (a - o).cross(b - o);
    let mut hull: Vec<LatticePoint> = Vec::new();
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &LatticePoint>> = if pass == 0 { Box::new(pts.iter()) } else { Box::new(pts.iter().rev()) };
        for &p in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    let mut m = BTreeMap::new();
    let n = hull.len();
    let collinear = n == 2;
    for i in 0..n {
        let e = hull[(i + 1) % n] - hull[i];
        let g = tropical_sandpile::rational::gcd_i64(e.x, e.y);
        let normal = LatticePoint::new(-e.y / g, e.x / g);
        *m.entry(normal).or_insert(0) += g as u64;
        if collinear {
            break;
        }
    }
    if collinear {
        // a segment support gives lines: both normals, same weight
        let (k, w) = m.iter().next().map(|(k, w)| (*k, *w)).unwrap();
        m.insert(k.neg(), w);
    }
    m
}

/// Lines are stored with an arbitrary base point; replace each pure line by
/// its direction, weight and offset `dir × p` so equal loci compare equal.
fn line_form(c: &TropicalCurve) -> (Vec<(LatticePoint, u64, Rational)>, TropicalCurve) {
    let mut lines = Vec::new();
    let mut rest = c.clone();
    rest.edges.clear();
    for v in 0..c.vertices.len() {
        let inc: Vec<&CurveEdge> = c.edges.iter().filter(|e| e.start == v || e.end == EdgeEnd::Vertex(v)).collect();
        let pure = inc.len() == 2 && inc.iter().all(|e| !e.is_bounded()) && inc[0].dir == inc[1].dir.neg();
        if pure {
            let d = inc[0].dir.max(inc[1].dir);
            let p = &c.vertices[v];
            lines.push((d, inc[0].weight, int(d.x) * p.y - int(d.y) * p.x));
        } else {
            rest.edges.extend(inc.into_iter().filter(|e| e.start == v).copied());
        }
    }
    lines.sort();
    (lines, rest.normalize())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(80))]

    #[test]
    fn locus_is_balanced_and_matches_scan(poly in poly_strategy()) {
        let c = corner_locus(&poly).unwrap();
        prop_assert!(check_balancing(&c, &[]).passed());
        prop_assert!(c.edges.iter().all(|e| e.weight > 0));
        common::check_against_scan(&poly, &c).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn rays_carry_the_support_boundary(poly in poly_strategy()) {
        let c = corner_locus(&poly).unwrap();
        prop_assert_eq!(ray_flux(&c), hull_flux(&poly));
    }

    #[test]
    fn coefficient_translation_moves_the_locus(poly in poly_strategy(), t1 in -6i128..6, t2 in -6i128..6, q in 1i128..4, c in -9i128..9) {
        let t = PlanePoint::new(rat(t1, q), rat(t2, q));
        let base = corner_locus(&poly).unwrap();
        let moved = corner_locus(&poly.translated(&t)).unwrap();
        let expected = TropicalCurve {
            vertices: base.vertices.iter().map(|v| PlanePoint::new(v.x - t.x, v.y - t.y)).collect(),
            edges: base.edges.clone(),
        }
        .normalize();
        prop_assert_eq!(line_form(&moved), line_form(&expected));
        prop_assert_eq!(corner_locus(&poly.shifted(rat(c, q))).unwrap(), base);
    }

    #[test]
    fn area_ignores_collinear_refinement(k in 1i64..6, w in 1u64..4, dx in -3i64..4, dy in 1i64..4) {
        let g = tropical_sandpile::rational::gcd_i64(dx, dy);
        let dir = LatticePoint::new(dx / g, dy / g);
        let whole = TropicalCurve::new(
            vec![PlanePoint::new(int(0), int(0)), PlanePoint::new(int(dir.x * k), int(dir.y * k))],
            vec![CurveEdge { start: 0, end: EdgeEnd::Vertex(1), dir, weight: w }],
        ).unwrap();
        let verts: Vec<PlanePoint> = (0..=k).map(|i| PlanePoint::new(int(dir.x * i), int(dir.y * i))).collect();
        let edges = (0..k as usize).map(|i| CurveEdge { start: i, end: EdgeEnd::Vertex(i + 1), dir, weight: w }).collect();
        let split = TropicalCurve::new(verts, edges).unwrap();
        prop_assert!((tropical_area(&whole).unwrap() - tropical_area(&split).unwrap()).abs() < 1e-9);
        prop_assert_eq!(split.normalize(), whole.normalize());
    }
}

#[test]
fn figure_three_style_polynomial_has_weight_two_edges() {
    let omega = LatticePolygon::from_coords(&[(0, 0), (2, 1), (1, 3), (-1, 2)]).unwrap();
    // side monomials plus the four axis monomials meeting at the centre
    let f = TropicalPolynomial::from_terms(&[
        ((-1, 2), int(0)),
        ((-2, -1), int(5)),
        ((1, -2), int(5)),
        ((2, 1), int(0)),
        ((1, 0), int(1)),
        ((-1, 0), int(2)),
        ((0, 1), int(0)),
        ((0, -1), int(3)),
    ])
    .unwrap();
    assert!(tropical_sandpile::tropical::vanishes_on_boundary(&f, &omega));
    let c = corner_locus(&f).unwrap();
    let o = solve_side_labels(&c, &omega).unwrap();
    assert!(o.side_labels.iter().all(|&d| d > 0));
    assert!(check_balancing(&o.graph, &o.corner_vertices()).passed());
    let centre = PlanePoint::new(rat(1, 2), rat(3, 2));
    assert!(o.graph.vertices.contains(&centre));
    assert_eq!(o.graph.edges.iter().filter(|e| e.weight == 2).count(), 4);
}
