use serde::Serialize;

use crate::sandpile::DeviationLocus;
use crate::tropical::TropicalCurve;

use super::AnalysisError;

/// Strip estimate of one edge weight.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightEstimate {
    pub edge: usize,
    pub raw: f64,
    pub rounded: u64,
    /// Set when `raw` is farther than 0.25 from an integer or no strip is left.
    pub flagged: bool,
    pub deficit_sum: u64,
    pub sites: usize,
    /// Length of the edge part covered by the strip.
    pub strip_length: f64,
}

struct Strip {
    a: (f64, f64),
    u: (f64, f64),
    s_lo: f64,
    s_hi: f64,
}

fn unit(d: (f64, f64)) -> (f64, f64) {
    let n = (d.0 * d.0 + d.1 * d.1).sqrt();
    (d.0 / n, d.1 / n)
}

/// Retreat from a vertex so that this edge's strip keeps clear of the
/// strips of the other edges leaving the same vertex.
fn retreat(curve: &TropicalCurve, v: usize, own: (f64, f64), halfwidth: f64, min_retreat: f64) -> f64 {
    let mut r = min_retreat;
    for (_, l) in curve.incident(v) {
        let w = unit((l.x as f64, l.y as f64));
        let cos = (own.0 * w.0 + own.1 * w.1).clamp(-1.0, 1.0);
        if cos > 1.0 - 1e-12 {
            continue; // the edge itself
        }
        let half = cos.acos() / 2.0;
        if half < std::f64::consts::FRAC_PI_2 - 1e-12 {
            r = r.max(halfwidth / half.tan() + halfwidth);
        }
    }
    r
}

/// For each bounded edge `e`, sums the deficits of locus sites in a strip of
/// the given halfwidth around `e` (shortened at both ends), and normalizes
/// by `N · ‖l_e‖ · strip length`.
pub fn estimate_edge_weights(
    locus: &DeviationLocus,
    curve: &TropicalCurve,
    halfwidth: f64,
    min_retreat: f64,
) -> Result<Vec<WeightEstimate>, AnalysisError> {
    let n = locus.scale as f64;
    let mut strips = Vec::with_capacity(curve.edges.len());
    for (i, e) in curve.edges.iter().enumerate() {
        let (a, b) = curve.edge_segment_f64(i, 0.0);
        let len = ((b.0 - a.0).powi(2) + (b.1 - a.1).powi(2)).sqrt();
        let u = unit((e.dir.x as f64, e.dir.y as f64));
        let end = match e.end {
            crate::tropical::EdgeEnd::Vertex(j) => j,
            crate::tropical::EdgeEnd::Ray => return Err(crate::tropical::TropicalError::UnboundedEdge(i).into()),
        };
        let ra = retreat(curve, e.start, u, halfwidth, min_retreat);
        let rb = retreat(curve, end, (-u.0, -u.1), halfwidth, min_retreat);
        strips.push(Strip { a, u, s_lo: ra, s_hi: len - rb });
    }
    let mut sums = vec![0u64; strips.len()];
    let mut counts = vec![0usize; strips.len()];
    let points = locus.scaled_points();
    for (site, p) in locus.sites.iter().zip(&points) {
        let mut owner: Option<usize> = None;
        for (i, s) in strips.iter().enumerate() {
            if s.s_hi <= s.s_lo {
                continue;
            }
            let (dx, dy) = (p.0 - s.a.0, p.1 - s.a.1);
            let along = dx * s.u.0 + dy * s.u.1;
            let across = (dx * s.u.1 - dy * s.u.0).abs();
            if along >= s.s_lo && along <= s.s_hi && across <= halfwidth {
                if let Some(first) = owner {
                    return Err(AnalysisError::OverlappingStrips { site: site.site, first, second: i });
                }
                owner = Some(i);
                sums[i] += site.deficit as u64;
                counts[i] += 1;
            }
        }
    }
    Ok(strips
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let strip_length = (s.s_hi - s.s_lo).max(0.0);
            let norm = curve.edges[i].dir.norm();
            let raw = if strip_length > 0.0 { sums[i] as f64 / (n * norm * strip_length) } else { 0.0 };
            let rounded = raw.round().max(1.0) as u64;
            let flagged = strip_length <= 0.0 || sums[i] == 0 || (raw - raw.round()).abs() > 0.25;
            WeightEstimate { edge: i, raw, rounded, flagged, deficit_sum: sums[i], sites: counts[i], strip_length }
        })
        .collect())
}
