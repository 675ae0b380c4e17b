use std::sync::Arc;

use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;

use crate::lattice::{round_down, LatticePolygon, PerturbationConfig, PlanePoint, ScaledDomain};
use crate::rational::{to_f64, Rational};
use crate::sandpile::{deviation_set, relax_queue, DeviationLocus, RelaxOptions, RelaxationResult, SandState};
use crate::tropical::{check_balancing, corner_locus, solve_side_labels, OmegaTropicalCurve, TropicalPolynomial};

use super::assemble::{assemble_polynomial, snap_to_polygon, AssemblyReport};
use super::fit::{fit_linear_regions, FitParams, LinearRegionDecomposition};
use super::hausdorff::hausdorff_points;
use super::minimality::{minimality_probe, MinimalityReport};
use super::weights::{estimate_edge_weights, WeightEstimate};
use super::{scaled_odometer, AnalysisError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    /// Strip halfwidth in units of `1/N`.
    pub strip_halfwidth: f64,
    /// Minimal strip retreat from edge endpoints in units of `1/N`.
    pub strip_retreat: f64,
    /// Minimality probe step in units of `1/N`.
    pub probe_step: Rational,
    /// Snapping distance for `P` and for boundary coefficients, in units of `1/N`.
    pub snap: i64,
    pub ceiling: u64,
    pub jobs: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            strip_halfwidth: 3.0,
            strip_retreat: 5.0,
            probe_step: Rational::new(1, 4),
            snap: 2,
            ceiling: crate::sandpile::DEFAULT_CEILING,
            jobs: 1,
        }
    }
}

/// Everything computed at one scale. Later stages are `None` when an
/// earlier one failed; `error` then says why.
#[derive(Debug, Clone)]
pub struct ScaleArtifacts {
    pub scale: i64,
    pub initial: SandState,
    pub result: RelaxationResult,
    pub locus: DeviationLocus,
    pub decomposition: Option<LinearRegionDecomposition>,
    pub fitted: Option<TropicalPolynomial>,
    pub assembly: Option<AssemblyReport>,
    /// Fitted polynomial with boundary monomials snapped to vanish on `∂Ω`.
    pub polynomial: Option<TropicalPolynomial>,
    pub curve: Option<OmegaTropicalCurve>,
    pub weights: Vec<WeightEstimate>,
    pub probe: Option<MinimalityReport>,
    pub error: Option<AnalysisError>,
}

/// Per-scale summary, serialized into the report.
#[derive(Debug, Clone, Serialize)]
pub struct ScaleRecord {
    #[serde(rename = "N")]
    pub scale: i64,
    pub error: Option<String>,
    pub topplings_total: u64,
    pub grains_lost: u64,
    pub heights_at_points: Vec<Option<u32>>,
    pub locus_sites: usize,
    /// Locus sites with deficit 1, 2 and 3.
    pub deficit_counts: [usize; 3],
    /// Locus sites on the discrete boundary, reported apart from the rest.
    pub boundary_locus_sites: usize,
    pub max_scaled_odometer: f64,
    pub regions: usize,
    pub classified_sites: usize,
    pub assembly_mismatches: Option<usize>,
    pub polynomial: Option<serde_json::Value>,
    pub curve: Option<serde_json::Value>,
    pub side_labels: Vec<i64>,
    pub area: Option<f64>,
    pub weights: Vec<WeightEstimate>,
    pub balancing_ok: bool,
    pub side_labels_ok: bool,
    pub minimality_ok: Option<bool>,
    pub hausdorff_to_next: Option<f64>,
    pub sup_odometer_gap: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub polygon: Vec<[i64; 2]>,
    pub points: Vec<[String; 2]>,
    pub records: Vec<ScaleRecord>,
}

impl ConvergenceReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

#[derive(Debug, Clone)]
pub struct SweepOutput {
    pub report: ConvergenceReport,
    pub scales: Vec<ScaleArtifacts>,
}

/// Runs the pipeline at one scale, keeping whatever stages succeeded.
pub fn analyze_scale(
    polygon: &LatticePolygon,
    config: &PerturbationConfig,
    scale: i64,
    opts: &SweepOptions,
) -> Result<ScaleArtifacts, AnalysisError> {
    let domain = Arc::new(ScaledDomain::new(polygon.clone(), scale)?);
    let initial = SandState::max_stable(domain).perturb(config)?;
    let result = relax_queue(&initial, &RelaxOptions { ceiling: opts.ceiling })?;
    let locus = deviation_set(&result);
    let mut art = ScaleArtifacts {
        scale,
        initial,
        result,
        locus,
        decomposition: None,
        fitted: None,
        assembly: None,
        polynomial: None,
        curve: None,
        weights: Vec::new(),
        probe: None,
        error: None,
    };
    if let Err(e) = fit_stages(&mut art, polygon, config, opts) {
        warn!("scale {scale}: {e}");
        art.error = Some(e);
    }
    Ok(art)
}

fn fit_stages(
    art: &mut ScaleArtifacts,
    polygon: &LatticePolygon,
    config: &PerturbationConfig,
    opts: &SweepOptions,
) -> Result<(), AnalysisError> {
    let n = art.scale;
    let odo = &art.result.odometer;
    let decomp = fit_linear_regions(odo, &FitParams::for_scale(n))?;
    let (fitted, report) = assemble_polynomial(&decomp, odo)?;
    art.decomposition = Some(decomp);
    let snap = Rational::new(opts.snap as i128, n as i128);
    let poly = snap_to_polygon(&fitted, polygon, snap);
    art.fitted = Some(fitted);
    art.assembly = Some(report);
    art.polynomial = Some(poly.clone());
    let curve = solve_side_labels(&corner_locus(&poly)?, polygon)?;
    let nf = n as f64;
    art.weights = estimate_edge_weights(&art.locus, &curve.graph, opts.strip_halfwidth / nf, opts.strip_retreat / nf)?;
    art.curve = Some(curve);
    let step = opts.probe_step / Rational::from_integer(n as i128);
    art.probe = Some(minimality_probe(&poly, polygon, config.points(), step, opts.snap as f64 / nf));
    Ok(())
}

fn record(art: &ScaleArtifacts, config: &PerturbationConfig) -> ScaleRecord {
    let n = art.scale;
    let d = art.result.final_state.domain();
    let curve = art.curve.as_ref();
    ScaleRecord {
        scale: n,
        error: art.error.as_ref().map(|e| e.to_string()),
        topplings_total: art.result.topplings_total,
        grains_lost: art.result.grains_lost,
        heights_at_points: config.points().iter().map(|p| art.result.final_state.height(round_down(p, n))).collect(),
        locus_sites: art.locus.len(),
        deficit_counts: art.locus.deficit_counts(),
        boundary_locus_sites: art.locus.sites.iter().filter(|s| d.is_boundary_site(s.site)).count(),
        max_scaled_odometer: to_f64(&scaled_odometer(&art.result).argmax().1),
        regions: art.decomposition.as_ref().map_or(0, |d| d.regions.len()),
        classified_sites: art.decomposition.as_ref().map_or(0, |d| d.classified_len()),
        assembly_mismatches: art.assembly.as_ref().map(|a| a.mismatched_sites),
        polynomial: art.polynomial.as_ref().map(|p| serde_json::from_str(&p.to_json()).expect("valid json")),
        curve: curve.map(|c| serde_json::from_str(&c.graph.to_json()).expect("valid json")),
        side_labels: curve.map_or_else(Vec::new, |c| c.side_labels.clone()),
        area: curve.map(|c| c.area()),
        weights: art.weights.clone(),
        balancing_ok: curve.map_or(false, |c| check_balancing(&c.graph, &c.corner_vertices()).passed()),
        side_labels_ok: curve.map_or(false, |c| c.side_labels.iter().all(|&d| d > 0)),
        minimality_ok: art.probe.as_ref().map(|p| p.passed()),
        hausdorff_to_next: None,
        sup_odometer_gap: None,
    }
}

/// Runs [`analyze_scale`] for every scale, concurrently up to `opts.jobs`,
/// then compares consecutive loci and every odometer with the polynomial
/// fitted at the largest scale.
pub fn convergence_sweep(
    polygon: &LatticePolygon,
    config: &PerturbationConfig,
    scales: &[i64],
    opts: &SweepOptions,
) -> Result<SweepOutput, AnalysisError> {
    if scales.is_empty() || scales[0] < 1 || scales.windows(2).any(|w| w[0] >= w[1]) {
        return Err(AnalysisError::BadScales);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.max(1))
        .build()
        .expect("thread pool");
    let runs: Vec<Result<ScaleArtifacts, AnalysisError>> =
        pool.install(|| scales.par_iter().map(|&n| analyze_scale(polygon, config, n, opts)).collect());
    let mut arts = Vec::with_capacity(runs.len());
    for r in runs {
        arts.push(r?);
    }
    let mut records: Vec<ScaleRecord> = arts.iter().map(|a| record(a, config)).collect();
    for i in 0..arts.len().saturating_sub(1) {
        let (a, b) = (arts[i].locus.scaled_points(), arts[i + 1].locus.scaled_points());
        records[i].hausdorff_to_next = hausdorff_points(&a, &b).ok();
    }
    if let Some(reference) = arts.last().and_then(|a| a.polynomial.clone()) {
        for (art, rec) in arts.iter().zip(records.iter_mut()) {
            let Some(decomp) = &art.decomposition else { continue };
            let n = art.scale;
            let gap = decomp
                .regions
                .iter()
                .flat_map(|r| r.sites.iter())
                .map(|&v| {
                    let f = Rational::new(art.result.odometer.at(v) as i128, n as i128);
                    to_f64(&(f - reference.value(&PlanePoint::scaled_site(v, n)))).abs()
                })
                .fold(0.0, f64::max);
            rec.sup_odometer_gap = Some(gap);
        }
    }
    for rec in &records {
        info!(
            "N={} topplings={} locus={} hausdorff_to_next={:?} gap={:?}",
            rec.scale, rec.topplings_total, rec.locus_sites, rec.hausdorff_to_next, rec.sup_odometer_gap
        );
    }
    let report = ConvergenceReport {
        polygon: polygon.vertices().iter().map(|v| [v.x, v.y]).collect(),
        points: config
            .points()
            .iter()
            .map(|p| [crate::rational::format_rational(&p.x), crate::rational::format_rational(&p.y)])
            .collect(),
        records,
    };
    Ok(SweepOutput { report, scales: arts })
}
