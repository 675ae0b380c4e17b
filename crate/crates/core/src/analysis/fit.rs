use std::collections::VecDeque;

use crate::lattice::LatticePoint;
use crate::sandpile::Odometer;

use super::AnalysisError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitParams {
    /// Regions with fewer sites go to the unclassified set.
    pub min_region_sites: usize,
    /// Sites closer than this to a missing site are never classified.
    pub band: i64,
    /// Required fraction of classified sites among the sites outside the band.
    pub min_coverage: f64,
}

impl FitParams {
    pub fn for_scale(n: i64) -> Self {
        Self { min_region_sites: 12.max((n * n / 1024) as usize), band: 2, min_coverage: 0.5 }
    }
}

/// A connected set of sites on which `F(v) = k·v.x + l·v.y + offset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearRegion {
    pub gradient: LatticePoint,
    /// Offset in lattice units; the scaled coefficient is `offset / N`.
    pub offset: i64,
    pub sites: Vec<LatticePoint>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearRegionDecomposition {
    pub scale: i64,
    pub regions: Vec<LinearRegion>,
    pub unclassified: Vec<LatticePoint>,
}

impl LinearRegionDecomposition {
    pub fn classified_len(&self) -> usize {
        self.regions.iter().map(|r| r.sites.len()).sum()
    }
}

/// Splits the odometer into maximal 4-connected regions of constant integer
/// forward-difference gradient. A site is a candidate when its
/// `(2·band+1)`-box lies in the domain and the gradient is constant on its
/// 3×3 neighborhood.
pub fn fit_linear_regions(odo: &Odometer, params: &FitParams) -> Result<LinearRegionDecomposition, AnalysisError> {
    let d = odo.domain();
    let n = d.len();
    let f = |v: LatticePoint| d.index_of(v).map(|i| odo.counts()[i] as i64);
    let mut grad: Vec<Option<LatticePoint>> = vec![None; n];
    for (i, v) in d.sites().enumerate() {
        let h = f(v).expect("site");
        if let (Some(fx), Some(fy)) = (f(v + LatticePoint::new(1, 0)), f(v + LatticePoint::new(0, 1))) {
            grad[i] = Some(LatticePoint::new(fx - h, fy - h));
        }
    }
    let band = params.band.max(1);
    let inside_band = |v: LatticePoint| {
        (-band..=band).all(|dy| d.contains(v + LatticePoint::new(-band, dy)) && d.contains(v + LatticePoint::new(band, dy)))
            && (-band..=band).all(|dx| d.contains(v + LatticePoint::new(dx, -band)) && d.contains(v + LatticePoint::new(dx, band)))
    };
    let mut candidate: Vec<Option<LatticePoint>> = vec![None; n];
    let mut interior = 0usize;
    for (i, v) in d.sites().enumerate() {
        if !inside_band(v) {
            continue;
        }
        interior += 1;
        let g = match grad[i] {
            Some(g) => g,
            None => continue,
        };
        let uniform = (-1..=1).all(|dy| {
            (-1..=1).all(|dx| d.index_of(v + LatticePoint::new(dx, dy)).map_or(false, |j| grad[j] == Some(g)))
        });
        if uniform {
            candidate[i] = Some(g);
        }
    }
    let mut seen = vec![false; n];
    let mut regions = Vec::new();
    let mut unclassified = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let g = match candidate[start] {
            Some(g) => g,
            None => {
                seen[start] = true;
                unclassified.push(d.site(start));
                continue;
            }
        };
        seen[start] = true;
        queue.push_back(start);
        let mut members = Vec::new();
        while let Some(i) = queue.pop_front() {
            let v = d.site(i);
            members.push(v);
            for dir in crate::lattice::DIRECTIONS {
                if let Some(j) = d.index_of(v + dir) {
                    if !seen[j] && candidate[j] == Some(g) {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
        if members.len() < params.min_region_sites {
            unclassified.extend(members);
            continue;
        }
        let v0 = members[0];
        let offset = f(v0).unwrap() - g.x * v0.x - g.y * v0.y;
        debug_assert!(members.iter().all(|&v| f(v).unwrap() - g.x * v.x - g.y * v.y == offset));
        regions.push(LinearRegion { gradient: g, offset, sites: members });
    }
    if regions.is_empty() {
        return Err(AnalysisError::NoRegions);
    }
    regions.sort_by(|a, b| b.sites.len().cmp(&a.sites.len()).then(a.gradient.cmp(&b.gradient)));
    unclassified.sort();
    let decomp = LinearRegionDecomposition { scale: d.scale(), regions, unclassified };
    let coverage = if interior == 0 { 0.0 } else { decomp.classified_len() as f64 / interior as f64 };
    if coverage < params.min_coverage {
        return Err(AnalysisError::LowCoverage { coverage, required: params.min_coverage });
    }
    Ok(decomp)
}
