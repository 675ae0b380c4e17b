use crate::lattice::{LatticePoint, DIRECTIONS};

use super::state::{Odometer, RelaxationResult, SandState};
use super::EngineError;

/// `ΔH(v) = −4H(v) + Σ H(w)` over the four lattice neighbors, with `H`
/// extended by zero off the domain.
pub fn discrete_laplacian(f: &Odometer, v: LatticePoint) -> Result<i64, EngineError> {
    let i = f.domain().index_of(v).ok_or(EngineError::NotASite(v))?;
    Ok(laplacian_at(f, v, i))
}

#[inline]
fn laplacian_at(f: &Odometer, v: LatticePoint, i: usize) -> i64 {
    let around: i64 = DIRECTIONS.iter().map(|&d| f.at(v + d) as i64).sum();
    around - 4 * f.counts()[i] as i64
}

/// Per-check outcome of [`verify_least_action`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LeastActionReport {
    /// Sites where `final ≠ initial + ΔF`.
    pub identity_failures: Vec<LatticePoint>,
    /// Sites of the final state holding 4 or more grains.
    pub unstable_sites: Vec<LatticePoint>,
    /// Sites `v` with `F(v) > 0` where `F − δ_v` still satisfies
    /// `φ + Δ(F − δ_v) ≤ 3`, i.e. `F` is not locally minimal there.
    pub minimality_failures: Vec<LatticePoint>,
}

impl LeastActionReport {
    pub fn identity_ok(&self) -> bool {
        self.identity_failures.is_empty()
    }

    pub fn stable_ok(&self) -> bool {
        self.unstable_sites.is_empty()
    }

    pub fn minimality_ok(&self) -> bool {
        self.minimality_failures.is_empty()
    }

    pub fn passed(&self) -> bool {
        self.identity_ok() && self.stable_ok() && self.minimality_ok()
    }
}

/// Checks `φ° = φ + ΔF`, stability of `φ°`, and the δ-decrement probe: no
/// single-site decrement of `F` keeps it inside the admissible family.
pub fn verify_least_action(initial: &SandState, result: &RelaxationResult) -> LeastActionReport {
    let domain = initial.domain();
    let odo = &result.odometer;
    let mut report = LeastActionReport::default();
    // φ + ΔF, the state the odometer actually produces
    let produced: Vec<i64> = domain
        .sites()
        .enumerate()
        .map(|(i, v)| initial.heights()[i] as i64 + laplacian_at(odo, v, i))
        .collect();
    for (i, v) in domain.sites().enumerate() {
        if produced[i] != result.final_state.heights()[i] as i64 {
            report.identity_failures.push(v);
        }
        if result.final_state.heights()[i] >= 4 {
            report.unstable_sites.push(v);
        }
    }
    let violations = produced.iter().filter(|&&h| h > 3).count();
    for (i, v) in domain.sites().enumerate() {
        if odo.counts()[i] == 0 {
            continue;
        }
        // F − δ_v changes φ + ΔF by +4 at v and −1 at each neighbor site
        let mut local_before = usize::from(produced[i] > 3);
        let mut local_after = usize::from(produced[i] + 4 > 3);
        for d in DIRECTIONS {
            if let Some(j) = domain.index_of(v + d) {
                local_before += usize::from(produced[j] > 3);
                local_after += usize::from(produced[j] - 1 > 3);
            }
        }
        let after = violations - local_before + local_after;
        if after == 0 {
            report.minimality_failures.push(v);
        }
    }
    report
}
