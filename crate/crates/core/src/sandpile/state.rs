use std::sync::Arc;

use log::warn;

use crate::lattice::{round_down, LatticePoint, PerturbationConfig, ScaledDomain, DIRECTIONS};

use super::EngineError;

/// Marks a missing neighbor in a [`Topology`] row.
pub const NO_SITE: u32 = u32::MAX;

/// Precomputed neighbor indices for every site, in the order of
/// [`DIRECTIONS`].
#[derive(Debug, Clone)]
pub struct Topology {
    neighbors: Vec<[u32; 4]>,
}

impl Topology {
    pub fn new(domain: &ScaledDomain) -> Self {
        assert!(domain.len() < NO_SITE as usize, "domain too large for 32-bit site indices");
        let neighbors = domain
            .sites()
            .map(|v| {
                let mut row = [NO_SITE; 4];
                for (slot, d) in row.iter_mut().zip(DIRECTIONS) {
                    if let Some(i) = domain.index_of(v + d) {
                        *slot = i as u32;
                    }
                }
                row
            })
            .collect();
        Self { neighbors }
    }

    #[inline]
    pub fn of(&self, i: usize) -> &[u32; 4] {
        &self.neighbors[i]
    }

    pub fn missing(&self, i: usize) -> u32 {
        self.neighbors[i].iter().filter(|&&n| n == NO_SITE).count() as u32
    }
}

/// Grain counts over the sites of a domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SandState {
    domain: Arc<ScaledDomain>,
    heights: Vec<u32>,
}

impl SandState {
    pub fn new(domain: Arc<ScaledDomain>, heights: Vec<u32>) -> Result<Self, EngineError> {
        if heights.len() != domain.len() {
            return Err(EngineError::SizeMismatch { expected: domain.len(), got: heights.len() });
        }
        Ok(Self { domain, heights })
    }

    /// The maximal stable state, 3 everywhere.
    pub fn max_stable(domain: Arc<ScaledDomain>) -> Self {
        let heights = vec![3; domain.len()];
        Self { domain, heights }
    }

    pub fn domain(&self) -> &Arc<ScaledDomain> {
        &self.domain
    }

    pub fn heights(&self) -> &[u32] {
        &self.heights
    }

    pub fn heights_mut(&mut self) -> &mut [u32] {
        &mut self.heights
    }

    pub fn height(&self, v: LatticePoint) -> Option<u32> {
        self.domain.index_of(v).map(|i| self.heights[i])
    }

    pub fn total(&self) -> u64 {
        self.heights.iter().map(|&h| h as u64).sum()
    }

    pub fn is_stable(&self) -> bool {
        self.heights.iter().all(|&h| h < 4)
    }

    /// Adds one grain at `[Np]` for every perturbation point.
    pub fn perturb(&self, config: &PerturbationConfig) -> Result<Self, EngineError> {
        let mut out = self.clone();
        let n = self.domain.scale();
        let mut hit: Vec<LatticePoint> = Vec::with_capacity(config.points().len());
        for p in config.points() {
            let v = round_down(p, n);
            let i = self.domain.index_of(v).ok_or(EngineError::PointOutsideDomain(v))?;
            if hit.contains(&v) {
                warn!("two perturbation points round to the same site {v} at scale {n}");
            }
            hit.push(v);
            out.heights[i] += 1;
        }
        Ok(out)
    }

    /// Applies one legal toppling at `v`; returns the number of grains lost
    /// through missing neighbors.
    pub fn topple(&mut self, v: LatticePoint) -> Result<u32, EngineError> {
        let i = self.domain.index_of(v).ok_or(EngineError::NotASite(v))?;
        if self.heights[i] < 4 {
            return Err(EngineError::IllegalToppling { site: v, height: self.heights[i] });
        }
        self.heights[i] -= 4;
        let mut lost = 0;
        for d in DIRECTIONS {
            match self.domain.index_of(v + d) {
                Some(j) => self.heights[j] += 1,
                None => lost += 1,
            }
        }
        Ok(lost)
    }
}

/// Per-site toppling counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Odometer {
    domain: Arc<ScaledDomain>,
    counts: Vec<u64>,
}

impl Odometer {
    pub fn zero(domain: Arc<ScaledDomain>) -> Self {
        let counts = vec![0; domain.len()];
        Self { domain, counts }
    }

    pub fn new(domain: Arc<ScaledDomain>, counts: Vec<u64>) -> Result<Self, EngineError> {
        if counts.len() != domain.len() {
            return Err(EngineError::SizeMismatch { expected: domain.len(), got: counts.len() });
        }
        Ok(Self { domain, counts })
    }

    pub fn domain(&self) -> &Arc<ScaledDomain> {
        &self.domain
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn counts_mut(&mut self) -> &mut [u64] {
        &mut self.counts
    }

    /// Value at any lattice point; zero off the domain.
    pub fn at(&self, v: LatticePoint) -> u64 {
        self.domain.index_of(v).map_or(0, |i| self.counts[i])
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn max(&self) -> u64 {
        self.counts.iter().copied().max().unwrap_or(0)
    }
}

/// Outcome of a relaxation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelaxationResult {
    pub final_state: SandState,
    pub odometer: Odometer,
    pub topplings_total: u64,
    pub grains_lost: u64,
}
