use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::lattice::{LatticePoint, LatticePolygon, PlanePoint};
use crate::rational::Rational;
use crate::sandpile::Odometer;
use crate::tropical::TropicalPolynomial;

use super::fit::LinearRegionDecomposition;
use super::AnalysisError;

/// Post-condition diagnostics of [`assemble_polynomial`].
#[derive(Debug, Clone, PartialEq)]
pub struct AssemblyReport {
    /// Classified sites where the polynomial differs from `F̃_N`.
    pub mismatched_sites: usize,
    /// Largest `|F(v/N)|` over boundary sites of `Γ_N`.
    pub max_boundary_value: Rational,
}

impl AssemblyReport {
    pub fn boundary_ok(&self, scale: i64) -> bool {
        self.max_boundary_value <= Rational::new(2, scale as i128)
    }
}

/// Turns fitted regions into a min-plus polynomial with coefficients
/// `offset / N`. Regions sharing a gradient must agree within one lattice
/// unit; the largest region's offset wins.
pub fn assemble_polynomial(
    decomp: &LinearRegionDecomposition,
    odo: &Odometer,
) -> Result<(TropicalPolynomial, AssemblyReport), AnalysisError> {
    if decomp.regions.is_empty() {
        return Err(AnalysisError::NoRegions);
    }
    let n = decomp.scale;
    // regions are sorted by size, so the first offset seen per gradient is the largest region's
    let mut chosen: BTreeMap<LatticePoint, i64> = BTreeMap::new();
    for r in &decomp.regions {
        match chosen.get(&r.gradient) {
            None => {
                chosen.insert(r.gradient, r.offset);
            }
            Some(&o) if (o - r.offset).abs() > 1 => {
                return Err(AnalysisError::InconsistentRegions { gradient: r.gradient, first: o, second: r.offset });
            }
            Some(_) => {}
        }
    }
    let poly = TropicalPolynomial::new(chosen.iter().map(|(g, o)| (*g, Rational::new(*o as i128, n as i128))))?;
    let mut mismatched_sites = 0;
    for r in &decomp.regions {
        for &v in &r.sites {
            let want = Rational::new(odo.at(v) as i128, n as i128);
            if poly.value(&PlanePoint::scaled_site(v, n)) != want {
                mismatched_sites += 1;
            }
        }
    }
    let d = odo.domain();
    let max_boundary_value = d
        .sites()
        .filter(|&v| d.is_boundary_site(v))
        .map(|v| poly.value(&PlanePoint::scaled_site(v, n)).abs())
        .max()
        .unwrap_or_else(Rational::zero);
    Ok((poly, AssemblyReport { mismatched_sites, max_boundary_value }))
}

/// Moves every monomial whose minimum over `Ω` lies within `tol` of zero so
/// that the minimum is exactly zero. Other monomials are left alone.
pub fn snap_to_polygon(poly: &TropicalPolynomial, polygon: &LatticePolygon, tol: Rational) -> TropicalPolynomial {
    let corners: Vec<PlanePoint> = polygon.vertices().iter().map(|v| PlanePoint::from_lattice(*v)).collect();
    let mut out = poly.clone();
    for (k, a) in poly.terms() {
        let low = corners.iter().map(|p| TropicalPolynomial::monomial_at(k, &a, p)).min().expect("polygon has vertices");
        if low.abs() <= tol && !low.is_zero() {
            out.set_coefficient(k, a - low);
        }
    }
    out
}
