//! Scaling-limit diagnostics: scaled odometers, linear-region fitting,
//! polynomial assembly, edge-weight estimation, Hausdorff distances,
//! minimality probes and multi-scale sweeps.

mod assemble;
mod fit;
mod hausdorff;
mod minimality;
mod sweep;
mod weights;

use thiserror::Error;

use crate::lattice::LatticePoint;
use crate::sandpile::{EngineError, Odometer};
use crate::rational::Rational;
use crate::tropical::TropicalError;

pub use assemble::{assemble_polynomial, snap_to_polygon, AssemblyReport};
pub use fit::{fit_linear_regions, FitParams, LinearRegion, LinearRegionDecomposition};
pub use hausdorff::{hausdorff_distance, hausdorff_points, hausdorff_to_segments, Segment};
pub use minimality::{minimality_probe, MinimalityReport, MonomialProbe, Admissibility};
pub use sweep::{analyze_scale, convergence_sweep, ConvergenceReport, ScaleArtifacts, ScaleRecord, SweepOptions, SweepOutput};
pub use weights::{estimate_edge_weights, WeightEstimate};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("no linear region found; the scale is probably too small")]
    NoRegions,
    #[error("classified sites cover {coverage:.3} of the interior, below the required {required:.3}")]
    LowCoverage { coverage: f64, required: f64 },
    #[error("regions with gradient {gradient} disagree on the offset ({first} vs {second} lattice units)")]
    InconsistentRegions { gradient: LatticePoint, first: i64, second: i64 },
    #[error("site {site} lies in the strips of edges {first} and {second}")]
    OverlappingStrips { site: LatticePoint, first: usize, second: usize },
    #[error("empty point set")]
    EmptySet,
    #[error("scales must be strictly increasing and positive")]
    BadScales,
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Tropical(#[from] TropicalError),
    #[error(transparent)]
    Lattice(#[from] crate::lattice::LatticeError),
}

/// `F̃_N(v/N) = F_N(v)/N`, kept as integer numerators over `N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledOdometer {
    odometer: Odometer,
}

impl ScaledOdometer {
    pub fn new(odometer: Odometer) -> Self {
        Self { odometer }
    }

    pub fn scale(&self) -> i64 {
        self.odometer.domain().scale()
    }

    pub fn odometer(&self) -> &Odometer {
        &self.odometer
    }

    pub fn value(&self, v: LatticePoint) -> Rational {
        Rational::new(self.odometer.at(v) as i128, self.scale() as i128)
    }

    pub fn values(&self) -> impl Iterator<Item = Rational> + '_ {
        let n = self.scale() as i128;
        self.odometer.counts().iter().map(move |&c| Rational::new(c as i128, n))
    }

    /// First site attaining the maximum, with its value.
    pub fn argmax(&self) -> (LatticePoint, Rational) {
        let d = self.odometer.domain();
        let (i, &c) = self
            .odometer
            .counts()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .expect("domains are non-empty");
        (d.site(i), Rational::new(c as i128, self.scale() as i128))
    }
}

pub fn scaled_odometer(result: &crate::sandpile::RelaxationResult) -> ScaledOdometer {
    ScaledOdometer::new(result.odometer.clone())
}
