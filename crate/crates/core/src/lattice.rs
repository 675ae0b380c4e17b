//! Exact integer geometry: lattice polygons, their dilates and the site sets
//! `Γ_N = NΩ ∩ ℤ²` the sandpile lives on.

use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{floor_to_i64, gcd_i64, to_f64, Rational};

/// Scaled coordinates must stay inside ±2³¹.
pub const COORD_LIMIT: i64 = 1 << 31;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default)]
pub struct LatticePoint {
    pub x: i64,
    pub y: i64,
}

impl LatticePoint {
    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }

    pub fn cross(self, other: Self) -> i64 {
        self.x * other.y - self.y * other.x
    }

    pub fn dot(self, other: Self) -> i64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        ((self.x * self.x + self.y * self.y) as f64).sqrt()
    }

    pub fn neg(self) -> Self {
        Self::new(-self.x, -self.y)
    }

    pub fn is_zero(self) -> bool {
        self.x == 0 && self.y == 0
    }
}

impl std::ops::Add for LatticePoint {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y)
    }
}

impl std::ops::Sub for LatticePoint {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y)
    }
}

impl std::ops::Mul<i64> for LatticePoint {
    type Output = Self;
    fn mul(self, k: i64) -> Self {
        Self::new(self.x * k, self.y * k)
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl From<(i64, i64)> for LatticePoint {
    fn from((x, y): (i64, i64)) -> Self {
        Self::new(x, y)
    }
}

/// A point of the real plane with exact rational coordinates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlanePoint {
    pub x: Rational,
    pub y: Rational,
}

impl PlanePoint {
    pub fn new(x: Rational, y: Rational) -> Self {
        Self { x, y }
    }

    pub fn from_lattice(p: LatticePoint) -> Self {
        Self::new(Rational::from_integer(p.x as i128), Rational::from_integer(p.y as i128))
    }

    /// `v / N` for a site `v` of `Γ_N`.
    pub fn scaled_site(v: LatticePoint, scale: i64) -> Self {
        Self::new(Rational::new(v.x as i128, scale as i128), Rational::new(v.y as i128, scale as i128))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (to_f64(&self.x), to_f64(&self.y))
    }
}

impl fmt::Display for PlanePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", crate::rational::Show(&self.x), crate::rational::Show(&self.y))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("a polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("polygon is not convex at vertex {index}")]
    NonConvex { index: usize },
    #[error("polygon has zero area (first degenerate vertex {index})")]
    DegenerateArea { index: usize },
    #[error("vertices around index {index} are collinear")]
    CollinearVertexChain { index: usize },
    #[error("scale must be at least 1")]
    ZeroScale,
    #[error("scale {scale} pushes coordinates beyond ±2^31")]
    ScaleOverflow { scale: i64 },
    #[error("{0} is not a site of the domain")]
    NotASite(LatticePoint),
    #[error("zero vector has no primitive direction")]
    ZeroVector,
    #[error("perturbation set is empty")]
    EmptyPerturbation,
    #[error("perturbation point {index} = {point} is not in the polygon interior")]
    PointNotInterior { index: usize, point: PlanePoint },
}

/// Divides `v` by the gcd of its coordinates.
pub fn primitive_vector(v: LatticePoint) -> Result<LatticePoint, LatticeError> {
    if v.is_zero() {
        return Err(LatticeError::ZeroVector);
    }
    let g = gcd_i64(v.x, v.y);
    Ok(LatticePoint::new(v.x / g, v.y / g))
}

/// Lattice length of a segment: the gcd of the coordinate differences.
pub fn lattice_length(v: LatticePoint) -> i64 {
    gcd_i64(v.x, v.y)
}

/// `[Np]`, coordinate-wise floor of the dilated point.
pub fn round_down(p: &PlanePoint, scale: i64) -> LatticePoint {
    let n = Rational::from_integer(scale as i128);
    LatticePoint::new(floor_to_i64(&(p.x * n)), floor_to_i64(&(p.y * n)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Side {
    pub from: LatticePoint,
    pub to: LatticePoint,
    /// Primitive direction from `from` to `to`.
    pub primitive: LatticePoint,
}

/// Convex lattice polygon with counterclockwise vertices and no redundant
/// (collinear) vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePolygon {
    vertices: Vec<LatticePoint>,
    sides: Vec<Side>,
}

impl LatticePolygon {
    pub fn new(vertices: Vec<LatticePoint>) -> Result<Self, LatticeError> {
        let n = vertices.len();
        if n < 3 {
            return Err(LatticeError::TooFewVertices(n));
        }
        let twice_area: i64 = (0..n).map(|i| vertices[i].cross(vertices[(i + 1) % n])).sum();
        let turn = |i: usize| {
            let prev = vertices[(i + n - 1) % n];
            let next = vertices[(i + 1) % n];
            (vertices[i] - prev).cross(next - vertices[i])
        };
        if twice_area == 0 {
            let index = (0..n).find(|&i| turn(i) == 0).unwrap_or(0);
            return Err(LatticeError::DegenerateArea { index });
        }
        let orientation = twice_area.signum();
        for i in 0..n {
            let t = turn(i) * orientation;
            if t == 0 {
                return Err(LatticeError::CollinearVertexChain { index: i });
            }
            if t < 0 {
                return Err(LatticeError::NonConvex { index: i });
            }
        }
        let mut vertices = vertices;
        if orientation < 0 {
            vertices.reverse();
        }
        // all turns agree; a convex polygon winds exactly once
        let edge = |i: usize| vertices[(i + 1) % n] - vertices[i];
        let mut wraps = 0;
        for i in 0..n {
            if angle_less(edge((i + 1) % n), edge(i)) {
                wraps += 1;
                if wraps > 1 {
                    let index = if orientation < 0 { n - 1 - (i + 1) % n } else { (i + 1) % n };
                    return Err(LatticeError::NonConvex { index });
                }
            }
        }
        let sides = (0..n)
            .map(|i| {
                let from = vertices[i];
                let to = vertices[(i + 1) % n];
                Side { from, to, primitive: primitive_vector(to - from).expect("distinct vertices") }
            })
            .collect();
        Ok(Self { vertices, sides })
    }

    pub fn from_coords(coords: &[(i64, i64)]) -> Result<Self, LatticeError> {
        Self::new(coords.iter().map(|&c| c.into()).collect())
    }

    pub fn vertices(&self) -> &[LatticePoint] {
        &self.vertices
    }

    pub fn sides(&self) -> &[Side] {
        &self.sides
    }

    pub fn twice_area(&self) -> i64 {
        let n = self.vertices.len();
        (0..n).map(|i| self.vertices[i].cross(self.vertices[(i + 1) % n])).sum()
    }

    pub fn bounding_box(&self) -> (LatticePoint, LatticePoint) {
        let min_x = self.vertices.iter().map(|v| v.x).min().unwrap();
        let max_x = self.vertices.iter().map(|v| v.x).max().unwrap();
        let min_y = self.vertices.iter().map(|v| v.y).min().unwrap();
        let max_y = self.vertices.iter().map(|v| v.y).max().unwrap();
        (LatticePoint::new(min_x, min_y), LatticePoint::new(max_x, max_y))
    }

    /// Closed containment of a lattice point in the dilate `scale·Ω`.
    pub fn contains_scaled(&self, p: LatticePoint, scale: i64) -> bool {
        self.sides.iter().all(|s| (s.to - s.from).cross(p - s.from * scale) >= 0)
    }

    /// Position of a rational point relative to the closed polygon.
    pub fn locate(&self, p: &PlanePoint) -> Location {
        let mut on_boundary = false;
        for s in &self.sides {
            let c = side_value(s, p);
            if c < Rational::zero() {
                return Location::Outside;
            }
            if c.is_zero() {
                on_boundary = true;
            }
        }
        if !on_boundary {
            Location::Interior
        } else if self.vertices.iter().any(|v| PlanePoint::from_lattice(*v) == *p) {
            Location::Vertex
        } else {
            Location::Edge
        }
    }

    pub fn vertex_index(&self, p: &PlanePoint) -> Option<usize> {
        self.vertices.iter().position(|v| PlanePoint::from_lattice(*v) == *p)
    }
}

/// Signed cross product of the side direction with `p - from`; zero on the
/// side's line, positive on the interior side.
pub fn side_value(s: &Side, p: &PlanePoint) -> Rational {
    let d = s.to - s.from;
    let px = p.x - Rational::from_integer(s.from.x as i128);
    let py = p.y - Rational::from_integer(s.from.y as i128);
    Rational::from_integer(d.x as i128) * py - Rational::from_integer(d.y as i128) * px
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Interior,
    Edge,
    Vertex,
    Outside,
}

fn angle_less(a: LatticePoint, b: LatticePoint) -> bool {
    let half = |v: LatticePoint| if v.y > 0 || (v.y == 0 && v.x > 0) { 0 } else { 1 };
    match half(a).cmp(&half(b)) {
        std::cmp::Ordering::Equal => a.cross(b) > 0,
        o => o == std::cmp::Ordering::Less,
    }
}

/// Non-empty set of interior perturbation points `P ⊂ Ω°`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerturbationConfig {
    points: Vec<PlanePoint>,
}

impl PerturbationConfig {
    pub fn new(points: Vec<PlanePoint>, polygon: &LatticePolygon) -> Result<Self, LatticeError> {
        if points.is_empty() {
            return Err(LatticeError::EmptyPerturbation);
        }
        for (index, p) in points.iter().enumerate() {
            if polygon.locate(p) != Location::Interior {
                return Err(LatticeError::PointNotInterior { index, point: p.clone() });
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[PlanePoint] {
        &self.points
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RowInterval {
    pub y: i64,
    /// Inclusive column range; `x_start > x_end` marks an empty row.
    pub x_start: i64,
    pub x_end: i64,
}

impl RowInterval {
    pub fn len(&self) -> usize {
        if self.x_end < self.x_start {
            0
        } else {
            (self.x_end - self.x_start + 1) as usize
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, x: i64) -> bool {
        self.x_start <= x && x <= self.x_end
    }
}

/// Neighbors of a site inside the domain plus the number of missing ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Neighbors {
    pub present: Vec<LatticePoint>,
    pub missing: u8,
}

pub const DIRECTIONS: [LatticePoint; 4] =
    [LatticePoint::new(1, 0), LatticePoint::new(-1, 0), LatticePoint::new(0, 1), LatticePoint::new(0, -1)];

/// The site set `Γ_N` stored as one column interval per row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledDomain {
    polygon: LatticePolygon,
    scale: i64,
    rows: Vec<RowInterval>,
    offsets: Vec<usize>,
}

impl ScaledDomain {
    pub fn new(polygon: LatticePolygon, scale: i64) -> Result<Self, LatticeError> {
        if scale < 1 {
            return Err(LatticeError::ZeroScale);
        }
        let (lo, hi) = polygon.bounding_box();
        let extent = [lo.x, lo.y, hi.x, hi.y].iter().map(|c| c.abs()).max().unwrap();
        if extent.checked_mul(scale).map_or(true, |m| m >= COORD_LIMIT) {
            return Err(LatticeError::ScaleOverflow { scale });
        }
        let rows: Vec<RowInterval> =
            (lo.y * scale..=hi.y * scale).map(|y| row_interval(&polygon, scale, y, lo.x * scale, hi.x * scale)).collect();
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        let mut acc = 0usize;
        offsets.push(0);
        for r in &rows {
            acc += r.len();
            offsets.push(acc);
        }
        Ok(Self { polygon, scale, rows, offsets })
    }

    /// Rebuilds a domain and checks it against stored row intervals.
    pub fn from_rows(polygon: LatticePolygon, scale: i64, rows: &[RowInterval]) -> Result<Self, LatticeError> {
        let d = Self::new(polygon, scale)?;
        if d.rows != rows {
            return Err(LatticeError::ScaleOverflow { scale });
        }
        Ok(d)
    }

    pub fn polygon(&self) -> &LatticePolygon {
        &self.polygon
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn rows(&self) -> &[RowInterval] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn y_min(&self) -> i64 {
        self.rows[0].y
    }

    pub fn y_max(&self) -> i64 {
        self.rows.last().unwrap().y
    }

    pub fn x_range(&self) -> (i64, i64) {
        let (lo, hi) = self.polygon.bounding_box();
        (lo.x * self.scale, hi.x * self.scale)
    }

    /// Dense index of a site, `None` when the point is not in `Γ_N`.
    #[inline]
    pub fn index_of(&self, p: LatticePoint) -> Option<usize> {
        let r = p.y - self.rows[0].y;
        if r < 0 || r as usize >= self.rows.len() {
            return None;
        }
        let row = &self.rows[r as usize];
        if row.contains(p.x) {
            Some(self.offsets[r as usize] + (p.x - row.x_start) as usize)
        } else {
            None
        }
    }

    pub fn contains(&self, p: LatticePoint) -> bool {
        self.index_of(p).is_some()
    }

    pub fn site(&self, index: usize) -> LatticePoint {
        let r = self.offsets.partition_point(|&o| o <= index) - 1;
        let row = &self.rows[r];
        LatticePoint::new(row.x_start + (index - self.offsets[r]) as i64, row.y)
    }

    pub fn sites(&self) -> impl Iterator<Item = LatticePoint> + '_ {
        self.rows.iter().flat_map(|r| (r.x_start..=r.x_end).map(move |x| LatticePoint::new(x, r.y)))
    }

    pub fn neighbors(&self, v: LatticePoint) -> Result<Neighbors, LatticeError> {
        if !self.contains(v) {
            return Err(LatticeError::NotASite(v));
        }
        let present: Vec<_> = DIRECTIONS.iter().map(|&d| v + d).filter(|w| self.contains(*w)).collect();
        let missing = (4 - present.len()) as u8;
        Ok(Neighbors { present, missing })
    }

    /// Whether the site has a missing neighbor (lies on the discrete boundary).
    pub fn is_boundary_site(&self, v: LatticePoint) -> bool {
        DIRECTIONS.iter().any(|&d| !self.contains(v + d))
    }

    pub fn into_shared(self) -> Arc<Self> {
        Arc::new(self)
    }
}

fn row_interval(polygon: &LatticePolygon, scale: i64, y: i64, x_lo: i64, x_hi: i64) -> RowInterval {
    let (mut lo, mut hi) = (x_lo, x_hi);
    for s in polygon.sides() {
        let a = s.from * scale;
        let d = s.to - s.from;
        // d.x (y - a.y) - d.y (x - a.x) >= 0  <=>  d.y x <= d.x (y - a.y) + d.y a.x
        let rhs = d.x * (y - a.y) + d.y * a.x;
        match d.y.signum() {
            1 => hi = hi.min(rhs.div_euclid(d.y)),
            -1 => lo = lo.max(div_ceil(rhs, d.y)),
            _ => {
                if d.x * (y - a.y) < 0 {
                    return RowInterval { y, x_start: 1, x_end: 0 };
                }
            }
        }
    }
    if lo > hi {
        RowInterval { y, x_start: 1, x_end: 0 }
    } else {
        RowInterval { y, x_start: lo, x_end: hi }
    }
}

fn div_ceil(a: i64, b: i64) -> i64 {
    // ceil(a / b) for b < 0; euclidean division rounds toward the ceiling there
    debug_assert!(b < 0);
    a.div_euclid(b)
}
