//! `verify`: invariant checks on the runs a config describes.

use serde::Serialize;

use tropical_sandpile::analysis::convergence_sweep;
use tropical_sandpile::lattice::LatticePoint;
use tropical_sandpile::sandpile::{deviation_set, discrete_laplacian, relax_naive, relax_queue, verify_least_action, RelaxOptions};
use tropical_sandpile::tropical::distance_to_curve;

use super::{initial_state, load, mkdir, write_text, CliError, VerifyArgs};

/// Domains up to this many sites are also relaxed by the sweep-order
/// reference relaxer.
const NAIVE_SITE_LIMIT: usize = 70_000;

#[derive(Debug, Serialize)]
struct Check {
    #[serde(rename = "N")]
    scale: i64,
    name: &'static str,
    passed: bool,
    detail: String,
}

pub(crate) fn cmd_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let cfg = load(&args.common)?;
    let opts = RelaxOptions { ceiling: cfg.sweep_options().ceiling };
    let mut checks = Vec::new();
    let mut push = |scale, name, passed, detail: String| checks.push(Check { scale, name, passed, detail });
    for &n in &cfg.scales {
        let initial = initial_state(&cfg, n)?;
        let r = relax_queue(&initial, &opts)?;
        let la = verify_least_action(&initial, &r);
        push(n, "identity", la.identity_ok(), format!("{} failing sites", la.identity_failures.len()));
        push(n, "stable", la.stable_ok(), format!("{} unstable sites", la.unstable_sites.len()));
        push(n, "least_action", la.minimality_ok(), format!("{} decrementable sites", la.minimality_failures.len()));
        let mass = initial.total() == r.final_state.total() + r.grains_lost;
        push(n, "mass", mass, format!("{} in, {} kept, {} lost", initial.total(), r.final_state.total(), r.grains_lost));
        let d = initial.domain();
        let mut loud = 0usize;
        for (v, (&h0, &h1)) in d.sites().zip(initial.heights().iter().zip(r.final_state.heights())) {
            if h0 == 3 && h1 == 3 && discrete_laplacian(&r.odometer, v)? != 0 {
                loud += 1;
            }
        }
        push(n, "harmonic_off_locus", loud == 0, format!("{loud} sites with nonzero laplacian"));
        if d.len() <= NAIVE_SITE_LIMIT {
            let same = relax_naive(&initial, &opts)? == r;
            push(n, "abelian", same, "queue and sweep relaxers".into());
        }
    }
    if !args.relax_only {
        let sweep = convergence_sweep(&cfg.polygon, &cfg.points, &cfg.scales, &cfg.sweep_options())?;
        for (art, rec) in sweep.scales.iter().zip(&sweep.report.records) {
            let n = rec.scale;
            let Some(curve) = &art.curve else {
                push(n, "curve", false, rec.error.clone().unwrap_or_default());
                continue;
            };
            push(n, "balancing", rec.balancing_ok, String::new());
            push(n, "side_labels", rec.side_labels_ok, format!("{:?}", rec.side_labels));
            // sites within a few lattice steps of the boundary are left out
            let d = art.result.final_state.domain();
            let near_boundary = |v: LatticePoint| (-3..=3).any(|k| !d.contains(v + LatticePoint::new(k, 0)) || !d.contains(v + LatticePoint::new(0, k)));
            let tol = 3.0 / n as f64;
            let far = deviation_set(&art.result)
                .sites
                .iter()
                .filter(|s| !near_boundary(s.site))
                .filter(|s| distance_to_curve(&curve.graph, (s.site.x as f64 / n as f64, s.site.y as f64 / n as f64)) > tol)
                .count();
            push(n, "locus_near_curve", far == 0, format!("{far} locus sites farther than 3/N"));
        }
    }
    for c in &checks {
        println!("{} N={:<5} {:<20} {}", if c.passed { "PASS" } else { "FAIL" }, c.scale, c.name, c.detail);
    }
    mkdir(&args.common.out)?;
    write_text(&args.common.out.join("verify.json"), &serde_json::to_string_pretty(&checks).expect("serializable"))?;
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(CliError::Failed(format!("{failed} of {} checks failed", checks.len())));
    }
    Ok(())
}
