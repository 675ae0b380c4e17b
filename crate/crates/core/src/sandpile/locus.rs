use serde::{Deserialize, Serialize};

use crate::lattice::LatticePoint;

use super::state::RelaxationResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocusSite {
    pub site: LatticePoint,
    /// `3 − φ(v)`, always positive.
    pub deficit: u32,
}

/// Sites of a stable state holding fewer than 3 grains.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeviationLocus {
    pub scale: i64,
    pub sites: Vec<LocusSite>,
}

impl DeviationLocus {
    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    /// Locus points `v / N` in the unscaled polygon.
    pub fn scaled_points(&self) -> Vec<(f64, f64)> {
        let n = self.scale as f64;
        self.sites.iter().map(|s| (s.site.x as f64 / n, s.site.y as f64 / n)).collect()
    }

    /// Histogram of deficits 1, 2, 3.
    pub fn deficit_counts(&self) -> [usize; 3] {
        let mut c = [0; 3];
        for s in &self.sites {
            if (1..=3).contains(&s.deficit) {
                c[s.deficit as usize - 1] += 1;
            }
        }
        c
    }
}

pub fn deviation_set(result: &RelaxationResult) -> DeviationLocus {
    let state = &result.final_state;
    let domain = state.domain();
    let sites = domain
        .sites()
        .zip(state.heights())
        .filter(|(_, &h)| h < 3)
        .map(|(site, &h)| LocusSite { site, deficit: 3 - h })
        .collect();
    DeviationLocus { scale: domain.scale(), sites }
}
