use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::lattice::{primitive_vector, LatticePoint, PlanePoint};
use crate::rational::{format_rational, parse_rational, to_f64, Rational};

use super::TropicalError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EdgeEnd {
    Vertex(usize),
    /// Unbounded in the edge's direction.
    Ray,
}

/// An edge leaving vertex `start` in primitive direction `dir`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CurveEdge {
    pub start: usize,
    pub end: EdgeEnd,
    pub dir: LatticePoint,
    pub weight: u64,
}

impl CurveEdge {
    pub fn is_bounded(&self) -> bool {
        matches!(self.end, EdgeEnd::Vertex(_))
    }
}

/// A weighted planar graph with rational vertices and primitive integer
/// edge directions.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TropicalCurve {
    pub vertices: Vec<PlanePoint>,
    pub edges: Vec<CurveEdge>,
}

fn r(v: i64) -> Rational {
    Rational::from_integer(v as i128)
}

/// Offset `p − q` as a rational vector.
fn diff(p: &PlanePoint, q: &PlanePoint) -> (Rational, Rational) {
    (p.x - q.x, p.y - q.y)
}

/// `t ≥ 0` with `p − q = t·d`, if any.
fn along(p: &PlanePoint, q: &PlanePoint, d: LatticePoint) -> Option<Rational> {
    let (dx, dy) = diff(p, q);
    if dx * r(d.y) != dy * r(d.x) {
        return None;
    }
    let t = if d.x != 0 { dx / r(d.x) } else { dy / r(d.y) };
    (!t.is_negative()).then_some(t)
}

impl TropicalCurve {
    pub fn new(vertices: Vec<PlanePoint>, edges: Vec<CurveEdge>) -> Result<Self, TropicalError> {
        let c = Self { vertices, edges };
        c.validate()?;
        Ok(c)
    }

    /// Structural checks: indices, primitive directions, positive weights,
    /// and bounded edges pointing along their direction.
    pub fn validate(&self) -> Result<(), TropicalError> {
        let nv = self.vertices.len();
        for (i, e) in self.edges.iter().enumerate() {
            if e.start >= nv {
                return Err(TropicalError::BadVertexIndex { edge: i, vertex: e.start });
            }
            if e.weight == 0 {
                return Err(TropicalError::ZeroWeight(i));
            }
            if e.dir.is_zero() || primitive_vector(e.dir).ok() != Some(e.dir) {
                return Err(TropicalError::NonPrimitiveDirection { edge: i, dir: e.dir });
            }
            if let EdgeEnd::Vertex(j) = e.end {
                if j >= nv {
                    return Err(TropicalError::BadVertexIndex { edge: i, vertex: j });
                }
                match along(&self.vertices[j], &self.vertices[e.start], e.dir) {
                    Some(t) if t > Rational::zero() => {}
                    _ => return Err(TropicalError::MisalignedEdge { edge: i }),
                }
            }
        }
        Ok(())
    }

    /// Exact length parameter of a bounded edge: `end − start = t·dir`.
    pub fn edge_span(&self, i: usize) -> Option<Rational> {
        let e = &self.edges[i];
        match e.end {
            EdgeEnd::Vertex(j) => along(&self.vertices[j], &self.vertices[e.start], e.dir),
            EdgeEnd::Ray => None,
        }
    }

    /// Euclidean length of a bounded edge.
    pub fn edge_length(&self, i: usize) -> Option<f64> {
        self.edge_span(i).map(|t| to_f64(&t) * self.edges[i].dir.norm())
    }

    /// Endpoints as floats; rays end at `start + reach·dir`.
    pub fn edge_segment_f64(&self, i: usize, reach: f64) -> ((f64, f64), (f64, f64)) {
        let e = &self.edges[i];
        let a = self.vertices[e.start].to_f64();
        let b = match e.end {
            EdgeEnd::Vertex(j) => self.vertices[j].to_f64(),
            EdgeEnd::Ray => (a.0 + reach * e.dir.x as f64, a.1 + reach * e.dir.y as f64),
        };
        (a, b)
    }

    /// Outward weighted directions `(m_e, l_e)` of every edge incident to `v`.
    pub fn incident(&self, v: usize) -> Vec<(u64, LatticePoint)> {
        let mut out = Vec::new();
        for e in &self.edges {
            if e.start == v {
                out.push((e.weight, e.dir));
            }
            if e.end == EdgeEnd::Vertex(v) {
                out.push((e.weight, e.dir.neg()));
            }
        }
        out
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incident(v).len()
    }

    pub fn is_bounded(&self) -> bool {
        self.edges.iter().all(CurveEdge::is_bounded)
    }

    /// Canonical form: merge coincident vertices, split edges at vertices in
    /// their interior, merge coincident edges adding weights, erase
    /// two-valent straight vertices of equal weight, drop isolated vertices,
    /// and sort.
    pub fn normalize(&self) -> Self {
        // distinct vertices
        let mut order: BTreeMap<PlanePoint, usize> = BTreeMap::new();
        for p in &self.vertices {
            let k = order.len();
            order.entry(p.clone()).or_insert(k);
        }
        let mut verts: Vec<PlanePoint> = vec![PlanePoint::new(Rational::zero(), Rational::zero()); order.len()];
        for (p, &i) in &order {
            verts[i] = p.clone();
        }
        let remap = |i: usize| order[&self.vertices[i]];
        // split at interior vertices, keyed by (start, end, dir) in a canonical orientation
        let mut pieces: BTreeMap<(usize, EdgeEnd, LatticePoint), u64> = BTreeMap::new();
        for e in &self.edges {
            let s = remap(e.start);
            let end_t = match e.end {
                EdgeEnd::Vertex(j) => Some(along(&verts[remap(j)], &verts[s], e.dir).unwrap_or_else(Rational::zero)),
                EdgeEnd::Ray => None,
            };
            let mut stops: Vec<(Rational, usize)> = verts
                .iter()
                .enumerate()
                .filter_map(|(k, p)| along(p, &verts[s], e.dir).map(|t| (t, k)))
                .filter(|(t, _)| *t > Rational::zero() && end_t.map_or(true, |et| *t < et))
                .collect();
            stops.sort();
            let mut cur = s;
            for (_, k) in stops {
                add_piece(&mut pieces, cur, EdgeEnd::Vertex(k), e.dir, e.weight);
                cur = k;
            }
            let last = match e.end {
                EdgeEnd::Vertex(j) => EdgeEnd::Vertex(remap(j)),
                EdgeEnd::Ray => EdgeEnd::Ray,
            };
            if last != EdgeEnd::Vertex(cur) {
                add_piece(&mut pieces, cur, last, e.dir, e.weight);
            }
        }
        let mut edges: Vec<CurveEdge> =
            pieces.into_iter().map(|((start, end, dir), weight)| CurveEdge { start, end, dir, weight }).collect();
        // erase straight two-valent vertices
        loop {
            let mut merged = false;
            for v in 0..verts.len() {
                let inc: Vec<usize> =
                    (0..edges.len()).filter(|&i| edges[i].start == v || edges[i].end == EdgeEnd::Vertex(v)).collect();
                if inc.len() != 2 {
                    continue;
                }
                let (mut a, mut b) = (edges[inc[0]], edges[inc[1]]);
                if a.weight != b.weight || a.dir.cross(b.dir) != 0 {
                    continue;
                }
                if !a.is_bounded() {
                    std::mem::swap(&mut a, &mut b);
                }
                if !a.is_bounded() {
                    continue;
                }
                // orient as  p --a--> v --b--> q
                let first = if a.end == EdgeEnd::Vertex(v) {
                    (a.start, a.dir)
                } else {
                    match a.end {
                        EdgeEnd::Vertex(j) => (j, a.dir.neg()),
                        EdgeEnd::Ray => unreachable!(),
                    }
                };
                let second = if b.start == v { (b.end, b.dir) } else { (EdgeEnd::Vertex(b.start), b.dir.neg()) };
                if first.1 != second.1 {
                    continue;
                }
                let (old_a, old_b) = (a, b);
                let joined = CurveEdge { start: first.0, end: second.0, dir: first.1, weight: a.weight };
                edges.retain(|e| *e != old_a && *e != old_b);
                edges.push(joined);
                merged = true;
                break;
            }
            if !merged {
                break;
            }
        }
        // drop isolated vertices and sort everything
        let mut used: Vec<usize> = edges
            .iter()
            .flat_map(|e| {
                let mut u = vec![e.start];
                if let EdgeEnd::Vertex(j) = e.end {
                    u.push(j);
                }
                u
            })
            .collect();
        used.sort_by(|&i, &j| verts[i].cmp(&verts[j]));
        used.dedup();
        let mut new_index = vec![usize::MAX; verts.len()];
        for (k, &i) in used.iter().enumerate() {
            new_index[i] = k;
        }
        let vertices: Vec<PlanePoint> = used.iter().map(|&i| verts[i].clone()).collect();
        let mut edges: Vec<CurveEdge> = edges
            .into_iter()
            .map(|e| {
                let mut e = CurveEdge {
                    start: new_index[e.start],
                    end: match e.end {
                        EdgeEnd::Vertex(j) => EdgeEnd::Vertex(new_index[j]),
                        EdgeEnd::Ray => EdgeEnd::Ray,
                    },
                    ..e
                };
                if let EdgeEnd::Vertex(j) = e.end {
                    if j < e.start {
                        e = CurveEdge { start: j, end: EdgeEnd::Vertex(e.start), dir: e.dir.neg(), weight: e.weight };
                    }
                }
                e
            })
            .collect();
        edges.sort();
        Self { vertices, edges }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&CurveJson::from(self)).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self, TropicalError> {
        let j: CurveJson = serde_json::from_str(s).map_err(|e| TropicalError::Format(e.to_string()))?;
        j.try_into()
    }
}

fn add_piece(
    pieces: &mut BTreeMap<(usize, EdgeEnd, LatticePoint), u64>,
    start: usize,
    end: EdgeEnd,
    dir: LatticePoint,
    weight: u64,
) {
    let key = match end {
        EdgeEnd::Vertex(j) if j < start => (j, EdgeEnd::Vertex(start), dir.neg()),
        _ => (start, end, dir),
    };
    *pieces.entry(key).or_insert(0) += weight;
}

/// Vertices whose outward weighted direction sum is non-zero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BalancingReport {
    pub violations: Vec<(usize, LatticePoint)>,
}

impl BalancingReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn residual(curve: &TropicalCurve, v: usize) -> LatticePoint {
    curve
        .incident(v)
        .into_iter()
        .fold(LatticePoint::new(0, 0), |acc, (m, l)| acc + l * m as i64)
}

/// Exact check of `Σ m_e l_e = 0` at every vertex not listed in `skip`.
pub fn check_balancing(curve: &TropicalCurve, skip: &[usize]) -> BalancingReport {
    let violations = (0..curve.vertices.len())
        .filter(|v| !skip.contains(v))
        .filter_map(|v| {
            let res = residual(curve, v);
            (!res.is_zero()).then_some((v, res))
        })
        .collect();
    BalancingReport { violations }
}

/// `Σ ‖l_e‖ · m_e · ‖e‖` over all edges.
pub fn tropical_area(curve: &TropicalCurve) -> Result<f64, TropicalError> {
    let mut total = 0.0;
    for (i, e) in curve.edges.iter().enumerate() {
        let len = curve.edge_length(i).ok_or(TropicalError::UnboundedEdge(i))?;
        total += e.dir.norm() * e.weight as f64 * len;
    }
    Ok(total)
}

/// Per-point containment outcome of [`passes_through`].
#[derive(Debug, Clone, PartialEq)]
pub struct PassReport {
    /// Distance from each point to the curve.
    pub distances: Vec<f64>,
    pub on_curve: Vec<bool>,
}

impl PassReport {
    pub fn passed(&self) -> bool {
        self.on_curve.iter().all(|&b| b)
    }
}

fn on_edge_exact(curve: &TropicalCurve, i: usize, p: &PlanePoint) -> bool {
    let e = &curve.edges[i];
    match along(p, &curve.vertices[e.start], e.dir) {
        None => false,
        Some(t) => curve.edge_span(i).map_or(true, |span| t <= span),
    }
}

fn dist_point_segment(p: (f64, f64), a: (f64, f64), b: (f64, f64), ray: bool) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let mut t = if len2 > 0.0 { ((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2 } else { 0.0 };
    t = if ray { t.max(0.0) } else { t.clamp(0.0, 1.0) };
    ((p.0 - a.0 - t * dx).powi(2) + (p.1 - a.1 - t * dy).powi(2)).sqrt()
}

/// Distance from a point to the curve, rays included.
pub fn distance_to_curve(curve: &TropicalCurve, p: (f64, f64)) -> f64 {
    let mut best = curve
        .vertices
        .iter()
        .map(|v| {
            let (x, y) = v.to_f64();
            ((x - p.0).powi(2) + (y - p.1).powi(2)).sqrt()
        })
        .fold(f64::INFINITY, f64::min);
    for (i, e) in curve.edges.iter().enumerate() {
        let (a, b) = curve.edge_segment_f64(i, 1.0);
        best = best.min(dist_point_segment(p, a, b, !e.is_bounded()));
    }
    best
}

/// Whether each point lies on the curve: exactly when `tolerance` is zero,
/// otherwise within `tolerance` in Euclidean distance.
pub fn passes_through(curve: &TropicalCurve, points: &[PlanePoint], tolerance: f64) -> PassReport {
    let mut distances = Vec::with_capacity(points.len());
    let mut on_curve = Vec::with_capacity(points.len());
    for p in points {
        let d = distance_to_curve(curve, p.to_f64());
        let hit = if tolerance == 0.0 {
            curve.vertices.contains(p) || (0..curve.edges.len()).any(|i| on_edge_exact(curve, i, p))
        } else {
            d <= tolerance
        };
        distances.push(d);
        on_curve.push(hit);
    }
    PassReport { distances, on_curve }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct EdgeJson {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    v: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    ray: Option<usize>,
    dir: [i64; 2],
    weight: u64,
}

/// Wire form: `{"vertices": [["x","y"],...], "edges": [{"v":[i,j]|"ray":i, "dir":[k,l], "weight":m}]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurveJson {
    vertices: Vec<[String; 2]>,
    edges: Vec<EdgeJson>,
}

impl From<&TropicalCurve> for CurveJson {
    fn from(c: &TropicalCurve) -> Self {
        Self {
            vertices: c.vertices.iter().map(|p| [format_rational(&p.x), format_rational(&p.y)]).collect(),
            edges: c
                .edges
                .iter()
                .map(|e| EdgeJson {
                    v: match e.end {
                        EdgeEnd::Vertex(j) => Some([e.start, j]),
                        EdgeEnd::Ray => None,
                    },
                    ray: (!e.is_bounded()).then_some(e.start),
                    dir: [e.dir.x, e.dir.y],
                    weight: e.weight,
                })
                .collect(),
        }
    }
}

impl TryFrom<CurveJson> for TropicalCurve {
    type Error = TropicalError;

    fn try_from(j: CurveJson) -> Result<Self, TropicalError> {
        let fmt = |e: crate::rational::ParseRationalError| TropicalError::Format(e.to_string());
        let vertices = j
            .vertices
            .iter()
            .map(|[x, y]| Ok(PlanePoint::new(parse_rational(x).map_err(fmt)?, parse_rational(y).map_err(fmt)?)))
            .collect::<Result<Vec<_>, TropicalError>>()?;
        let mut edges = Vec::with_capacity(j.edges.len());
        for (i, e) in j.edges.iter().enumerate() {
            let (start, end) = match (e.v, e.ray) {
                (Some([a, b]), None) => (a, EdgeEnd::Vertex(b)),
                (None, Some(a)) => (a, EdgeEnd::Ray),
                _ => return Err(TropicalError::Format(format!("edge {i} needs exactly one of \"v\" and \"ray\""))),
            };
            edges.push(CurveEdge { start, end, dir: LatticePoint::new(e.dir[0], e.dir[1]), weight: e.weight });
        }
        TropicalCurve::new(vertices, edges)
    }
}
