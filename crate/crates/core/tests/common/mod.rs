#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::Arc;

use rand::Rng;
use tropical_sandpile::lattice::{LatticePoint, LatticePolygon, PlanePoint, ScaledDomain};
use tropical_sandpile::rational::{int, rat, to_f64, Rational};
use tropical_sandpile::sandpile::Odometer;
use tropical_sandpile::tropical::{passes_through, TropicalCurve, TropicalPolynomial};

/// Strict convex hull (monotone chain), counterclockwise.
pub fn convex_hull(mut pts: Vec<LatticePoint>) -> Vec<LatticePoint> {
    pts.sort();
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<LatticePoint> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && (lower[lower.len() - 1] - lower[lower.len() - 2]).cross(p - lower[lower.len() - 1]) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<LatticePoint> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && (upper[upper.len() - 1] - upper[upper.len() - 2]).cross(p - upper[upper.len() - 1]) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Random non-degenerate lattice polygon with vertices in `[0, extent]²`.
pub fn random_polygon<R: Rng>(rng: &mut R, extent: i64) -> LatticePolygon {
    loop {
        let k = rng.gen_range(3..8);
        let pts = (0..k).map(|_| LatticePoint::new(rng.gen_range(0..=extent), rng.gen_range(0..=extent))).collect();
        let hull = convex_hull(pts);
        if hull.len() >= 3 {
            if let Ok(p) = LatticePolygon::new(hull) {
                return p;
            }
        }
    }
}

/// Exact argmin-tie scan on a grid of spacing 1/4 around the curve's
/// vertices, checked against the computed locus in both directions.
pub fn check_against_scan(poly: &TropicalPolynomial, curve: &TropicalCurve) -> Result<(), String> {
    let h = rat(1, 4);
    let (mut lo, mut hi) = (int(-3), int(3));
    for v in &curve.vertices {
        lo = lo.min(v.x.min(v.y) - int(2));
        hi = hi.max(v.x.max(v.y) + int(2));
    }
    let lo = (lo / h).floor() * h;
    let steps = (((hi - lo) / h).ceil().to_integer() as i64).min(160);
    let at = |i: i64, j: i64| PlanePoint::new(lo + h * int(i), lo + h * int(j));
    for i in 0..=steps {
        for j in 0..=steps {
            let p = at(i, j);
            if poly.evaluate(&p).argmin.len() >= 2 && !passes_through(curve, &[p.clone()], 0.0).passed() {
                return Err(format!("tie at {p} is off the computed locus"));
            }
        }
    }
    // every edge sample falls in a grid cell whose corners do not share one strict argmin
    let (hf, lof) = (0.25, to_f64(&lo));
    for ei in 0..curve.edges.len() {
        let (a, b) = curve.edge_segment_f64(ei, 40.0);
        for s in 1..20 {
            let t = s as f64 / 20.0;
            let q = (a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1));
            let (ci, cj) = (((q.0 - lof) / hf).floor() as i64, ((q.1 - lof) / hf).floor() as i64);
            if ci < 0 || cj < 0 || ci >= steps || cj >= steps {
                continue;
            }
            let corners: Vec<Vec<LatticePoint>> =
                [(0, 0), (1, 0), (0, 1), (1, 1)].iter().map(|&(di, dj)| poly.evaluate(&at(ci + di, cj + dj)).argmin).collect();
            if corners.iter().all(|c| c.len() == 1 && c == &corners[0]) {
                return Err(format!("edge {ei} sample {q:?} sits inside a linear region"));
            }
        }
    }
    Ok(())
}

/// Odometer-like data `N·F(v/N)` shifted to be non-negative. Coefficients
/// must have denominators dividing `N`.
pub fn synthesize_odometer(poly: &TropicalPolynomial, domain: Arc<ScaledDomain>) -> Odometer {
    let n = domain.scale();
    let vals: Vec<i128> = domain
        .sites()
        .map(|v| {
            let x = poly.value(&PlanePoint::scaled_site(v, n)) * Rational::from_integer(n as i128);
            assert!(x.is_integer(), "coefficient denominators must divide N");
            x.to_integer()
        })
        .collect();
    let lo = vals.iter().copied().min().unwrap_or(0);
    Odometer::new(domain, vals.into_iter().map(|x| (x - lo) as u64).collect()).unwrap()
}

/// Per monomial `k`, the largest 4-connected set of interior sites (at
/// least `band` from the boundary) whose whole block `v + [-1, 2]²` has `k`
/// in the argmin.
pub fn interior_cell_sizes(poly: &TropicalPolynomial, domain: &ScaledDomain, band: i64) -> BTreeMap<LatticePoint, usize> {
    let n = domain.scale();
    let mut argmin: HashMap<LatticePoint, Vec<LatticePoint>> = HashMap::new();
    let mut cells: BTreeMap<LatticePoint, HashSet<LatticePoint>> = poly.support().map(|k| (k, HashSet::new())).collect();
    for v in domain.sites() {
        let deep = (-band..=band).all(|dx| (-band..=band).all(|dy| domain.contains(v + LatticePoint::new(dx, dy))));
        if !deep {
            continue;
        }
        let mut common: Option<Vec<LatticePoint>> = None;
        for dx in -1..=2 {
            for dy in -1..=2 {
                let w = v + LatticePoint::new(dx, dy);
                let am = argmin.entry(w).or_insert_with(|| poly.evaluate(&PlanePoint::scaled_site(w, n)).argmin);
                common = Some(match common {
                    None => am.clone(),
                    Some(c) => c.into_iter().filter(|k| am.contains(k)).collect(),
                });
            }
        }
        for k in common.unwrap() {
            cells.get_mut(&k).unwrap().insert(v);
        }
    }
    cells.into_iter().map(|(k, set)| (k, largest_component(&set))).collect()
}

fn largest_component(set: &HashSet<LatticePoint>) -> usize {
    let mut seen = HashSet::new();
    let mut best = 0;
    for &start in set {
        if !seen.insert(start) {
            continue;
        }
        let (mut stack, mut size) = (vec![start], 0);
        while let Some(v) = stack.pop() {
            size += 1;
            for d in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
                let w = v + LatticePoint::new(d.0, d.1);
                if set.contains(&w) && seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        best = best.max(size);
    }
    best
}
