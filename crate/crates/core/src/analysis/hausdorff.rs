use super::AnalysisError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: (f64, f64),
    pub b: (f64, f64),
}

fn dist2(p: (f64, f64), q: (f64, f64)) -> f64 {
    (p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)
}

fn seg_dist2(p: (f64, f64), s: &Segment) -> f64 {
    let (dx, dy) = (s.b.0 - s.a.0, s.b.1 - s.a.1);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 { (((p.0 - s.a.0) * dx + (p.1 - s.a.1) * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
    dist2(p, (s.a.0 + t * dx, s.a.1 + t * dy))
}

/// Uniform bucket grid for nearest-point queries.
struct Buckets<'a> {
    pts: &'a [(f64, f64)],
    origin: (f64, f64),
    cell: f64,
    dims: (i64, i64),
    cells: Vec<Vec<u32>>,
}

impl<'a> Buckets<'a> {
    fn new(pts: &'a [(f64, f64)]) -> Self {
        let (mut lo, mut hi) = ((f64::INFINITY, f64::INFINITY), (f64::NEG_INFINITY, f64::NEG_INFINITY));
        for p in pts {
            lo = (lo.0.min(p.0), lo.1.min(p.1));
            hi = (hi.0.max(p.0), hi.1.max(p.1));
        }
        let extent = (hi.0 - lo.0).max(hi.1 - lo.1).max(1e-9);
        let side = (pts.len() as f64).sqrt().ceil().max(1.0);
        let cell = extent / side;
        let dims = (((hi.0 - lo.0) / cell) as i64 + 1, ((hi.1 - lo.1) / cell) as i64 + 1);
        let mut cells = vec![Vec::new(); (dims.0 * dims.1) as usize];
        for (i, p) in pts.iter().enumerate() {
            let (cx, cy) = (((p.0 - lo.0) / cell) as i64, ((p.1 - lo.1) / cell) as i64);
            cells[(cy * dims.0 + cx) as usize].push(i as u32);
        }
        Self { pts, origin: lo, cell, dims, cells }
    }

    fn nearest2(&self, q: (f64, f64)) -> f64 {
        // clamping keeps the ring bound valid for queries outside the grid
        let cx = (((q.0 - self.origin.0) / self.cell).floor() as i64).clamp(0, self.dims.0 - 1);
        let cy = (((q.1 - self.origin.1) / self.cell).floor() as i64).clamp(0, self.dims.1 - 1);
        let mut best = f64::INFINITY;
        let mut ring = 0i64;
        loop {
            for y in cy - ring..=cy + ring {
                for x in cx - ring..=cx + ring {
                    if (y - cy).abs() != ring && (x - cx).abs() != ring {
                        continue;
                    }
                    if x < 0 || y < 0 || x >= self.dims.0 || y >= self.dims.1 {
                        continue;
                    }
                    for &i in &self.cells[(y * self.dims.0 + x) as usize] {
                        best = best.min(dist2(q, self.pts[i as usize]));
                    }
                }
            }
            // every unvisited cell is at least `ring · cell` away
            let reach = ring as f64 * self.cell;
            if best.is_finite() && best <= reach * reach {
                return best;
            }
            let outside = cx - ring < 0 && cy - ring < 0 && cx + ring >= self.dims.0 && cy + ring >= self.dims.1;
            if outside && best.is_finite() {
                return best;
            }
            ring += 1;
        }
    }
}

fn directed(a: &[(f64, f64)], b: &Buckets<'_>) -> f64 {
    a.iter().map(|&p| b.nearest2(p)).fold(0.0, f64::max)
}

/// Symmetric Hausdorff distance between finite point sets.
pub fn hausdorff_points(a: &[(f64, f64)], b: &[(f64, f64)]) -> Result<f64, AnalysisError> {
    if a.is_empty() || b.is_empty() {
        return Err(AnalysisError::EmptySet);
    }
    let (ba, bb) = (Buckets::new(a), Buckets::new(b));
    Ok(directed(a, &bb).max(directed(b, &ba)).sqrt())
}

/// Alias of [`hausdorff_points`].
pub fn hausdorff_distance(a: &[(f64, f64)], b: &[(f64, f64)]) -> Result<f64, AnalysisError> {
    hausdorff_points(a, b)
}

/// Hausdorff distance between a point set and a union of segments. The
/// segment side is sampled with spacing at most `step`.
pub fn hausdorff_to_segments(a: &[(f64, f64)], segs: &[Segment], step: f64) -> Result<f64, AnalysisError> {
    if a.is_empty() || segs.is_empty() {
        return Err(AnalysisError::EmptySet);
    }
    let to_segs = a
        .iter()
        .map(|&p| segs.iter().map(|s| seg_dist2(p, s)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    let mut samples = Vec::new();
    for s in segs {
        let len = dist2(s.a, s.b).sqrt();
        let k = (len / step).ceil().max(1.0) as usize;
        for i in 0..=k {
            let t = i as f64 / k as f64;
            samples.push((s.a.0 + t * (s.b.0 - s.a.0), s.a.1 + t * (s.b.1 - s.a.1)));
        }
    }
    let from_segs = directed(&samples, &Buckets::new(a));
    Ok(to_segs.max(from_segs).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(hausdorff_points(&[(0.0, 0.0)], &[(3.0, 4.0)]).unwrap(), 5.0);
        let a = [(0.0, 0.0), (1.0, 2.0), (5.0, -1.0)];
        assert_eq!(hausdorff_points(&a, &a).unwrap(), 0.0);
        assert_eq!(hausdorff_points(&[], &a), Err(AnalysisError::EmptySet));
        let s = [Segment { a: (0.0, 0.0), b: (2.0, 0.0) }];
        let d = hausdorff_to_segments(&[(0.0, 0.0), (2.0, 0.0)], &s, 0.01).unwrap();
        assert!((d - 1.0).abs() < 1e-9);
        let d = hausdorff_to_segments(&[(1.0, 0.5)], &s, 0.01).unwrap();
        assert!((d - (1.0f64 + 0.25).sqrt()).abs() < 1e-9);
    }

    #[test]
    fn buckets_match_brute_force() {
        let mut state = 7u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        let a: Vec<(f64, f64)> = (0..300).map(|_| (next() * 3.0, next())).collect();
        let b: Vec<(f64, f64)> = (0..50).map(|_| (next(), next() * 5.0 - 2.0)).collect();
        let brute = |x: &[(f64, f64)], y: &[(f64, f64)]| {
            x.iter().map(|&p| y.iter().map(|&q| dist2(p, q)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
        };
        let want = brute(&a, &b).max(brute(&b, &a)).sqrt();
        assert!((hausdorff_points(&a, &b).unwrap() - want).abs() < 1e-12);
    }
}
