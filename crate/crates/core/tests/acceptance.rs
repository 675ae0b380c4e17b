//! Acceptance suite: one test per criterion, each printing a single
//! `criterion N: PASS|FAIL ...` line. Run with `--nocapture` to see them.
//! Tests hold a global lock so that the reported runtimes are not inflated
//! by concurrent work.

mod common;

use std::collections::BTreeMap;
use std::process::Command;
use std::sync::{Arc, Mutex, MutexGuard, OnceLock};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tropical_sandpile::analysis::{
    assemble_polynomial, convergence_sweep, estimate_edge_weights, fit_linear_regions, hausdorff_to_segments,
    FitParams, ScaleArtifacts, Segment, SweepOptions, SweepOutput,
};
use tropical_sandpile::lattice::{round_down, LatticePoint, LatticePolygon, PerturbationConfig, PlanePoint, ScaledDomain};
use tropical_sandpile::rational::{rat, Rational};
use tropical_sandpile::sandpile::{relax_naive, relax_queue, verify_least_action, RelaxOptions, RelaxationResult, SandState};
use tropical_sandpile::tropical::{check_balancing, corner_locus, CurveEdge, EdgeEnd, TropicalCurve, TropicalPolynomial};

static SERIAL: Mutex<()> = Mutex::new(());

fn serial() -> MutexGuard<'static, ()> {
    SERIAL.lock().unwrap_or_else(|e| e.into_inner())
}

fn report(id: u32, ok: bool, detail: String) {
    println!("criterion {id}: {} {detail}", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id}: {detail}");
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn square() -> LatticePolygon {
    LatticePolygon::from_coords(&[(0, 0), (1, 0), (1, 1), (0, 1)]).unwrap()
}

fn tilted() -> LatticePolygon {
    LatticePolygon::from_coords(&[(0, 0), (2, 1), (1, 3), (-1, 2)]).unwrap()
}

fn config(polygon: &LatticePolygon, p: (Rational, Rational)) -> PerturbationConfig {
    PerturbationConfig::new(vec![PlanePoint::new(p.0, p.1)], polygon).unwrap()
}

fn centre() -> (Rational, Rational) {
    (rat(1, 2), rat(1, 2))
}

struct Timed<T> {
    value: T,
    elapsed: Duration,
}

fn timed<T>(f: impl FnOnce() -> T) -> Timed<T> {
    let t = Instant::now();
    let value = f();
    Timed { value, elapsed: t.elapsed() }
}

/// Random relaxations shared by the first two criteria.
struct RandomRun {
    initial: SandState,
    naive: RelaxationResult,
    queue: RelaxationResult,
}

fn random_runs() -> &'static Timed<Vec<RandomRun>> {
    static RUNS: OnceLock<Timed<Vec<RandomRun>>> = OnceLock::new();
    RUNS.get_or_init(|| {
        timed(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(2024);
            let mut runs = Vec::new();
            for _ in 0..20 {
                let extent = rng.gen_range(2..=20);
                let polygon = common::random_polygon(&mut rng, extent);
                for _ in 0..10 {
                    let n = rng.gen_range(1..=5);
                    let d = Arc::new(ScaledDomain::new(polygon.clone(), n).unwrap());
                    let h = (0..d.len()).map(|_| rng.gen_range(0..=7)).collect();
                    let initial = SandState::new(d, h).unwrap();
                    let naive = relax_naive(&initial, &RelaxOptions::default()).unwrap();
                    let queue = relax_queue(&initial, &RelaxOptions::default()).unwrap();
                    runs.push(RandomRun { initial, naive, queue });
                }
            }
            runs
        })
    })
}

/// Centred single point on the unit square, swept over 64, 128, 256.
fn figure1_sweep() -> &'static Timed<SweepOutput> {
    static SWEEP: OnceLock<Timed<SweepOutput>> = OnceLock::new();
    SWEEP.get_or_init(|| {
        let omega = square();
        let cfg = config(&omega, centre());
        timed(|| convergence_sweep(&omega, &cfg, &[64, 128, 256], &SweepOptions { jobs: 3, ..Default::default() }).unwrap())
    })
}

fn figure1_256() -> &'static ScaleArtifacts {
    figure1_sweep().value.scales.last().unwrap()
}

const FIGURE3_SCALE: i64 = 128;

fn figure3() -> &'static Timed<ScaleArtifacts> {
    static RUN: OnceLock<Timed<ScaleArtifacts>> = OnceLock::new();
    RUN.get_or_init(|| {
        let omega = tilted();
        let cfg = config(&omega, (rat(1, 2), rat(3, 2)));
        timed(|| {
            let out = convergence_sweep(&omega, &cfg, &[FIGURE3_SCALE], &SweepOptions::default()).unwrap();
            out.scales.into_iter().next().unwrap()
        })
    })
}

#[test]
fn criterion_1_abelian() {
    let _g = serial();
    let runs = random_runs();
    let differing = runs.value.iter().filter(|r| r.naive != r.queue).count();
    let sites: usize = runs.value.iter().map(|r| r.initial.domain().len()).sum();
    let t = secs(runs.elapsed);
    report(
        1,
        differing == 0 && runs.value.len() == 200 && t < 10.0,
        format!("{} states ({sites} sites), {differing} disagreements, {t:.2}s", runs.value.len()),
    );
}

#[test]
fn criterion_2_least_action() {
    let _g = serial();
    let t = Instant::now();
    let mut checked = 0;
    let mut failures = Vec::new();
    for (i, r) in random_runs().value.iter().enumerate() {
        for (name, res) in [("naive", &r.naive), ("queue", &r.queue)] {
            checked += 1;
            if !verify_least_action(&r.initial, res).passed() {
                failures.push(format!("random #{i} {name}"));
            }
        }
    }
    let figures = figure1_sweep().value.scales.iter().chain(std::iter::once(&figure3().value));
    for art in figures {
        checked += 1;
        if !verify_least_action(&art.initial, &art.result).passed() {
            failures.push(format!("figure run N={}", art.scale));
        }
    }
    let el = secs(t.elapsed());
    report(2, failures.is_empty() && el < 10.0, format!("{checked} relaxations checked in {el:.2}s, failures {failures:?}"));
}

/// The centre of the square joined to its corners and side midpoints.
fn eight_arm_star() -> TropicalCurve {
    let h = rat(1, 2);
    let mut vertices = vec![PlanePoint::new(h, h)];
    let mut edges = Vec::new();
    for (dx, dy) in [(1i64, 0i64), (0, 1), (-1, 0), (0, -1), (1, 1), (-1, 1), (-1, -1), (1, -1)] {
        vertices.push(PlanePoint::new(h + rat(dx as i128, 2), h + rat(dy as i128, 2)));
        edges.push(CurveEdge { start: 0, end: EdgeEnd::Vertex(vertices.len() - 1), dir: LatticePoint::new(dx, dy), weight: 1 });
    }
    TropicalCurve::new(vertices, edges).unwrap()
}

#[test]
fn criterion_3_figure_1() {
    let _g = serial();
    let run = figure1_sweep();
    let art = figure1_256();
    let n = art.scale;
    let p = PlanePoint::new(centre().0, centre().1);
    let height = art.result.final_state.height(round_down(&p, n));
    let a = height == Some(3);

    let star = eight_arm_star();
    let segs: Vec<Segment> = (0..star.edges.len())
        .map(|i| {
            let (a, b) = star.edge_segment_f64(i, 0.0);
            Segment { a, b }
        })
        .collect();
    let hd = hausdorff_to_segments(&art.locus.scaled_points(), &segs, 1.0 / 1024.0).unwrap();
    let b = hd <= 0.05;

    // nearest arm decides the expected deficit: 1 on axis arms, 2 on diagonals
    let mut matching = 0usize;
    for s in &art.locus.sites {
        let (x, y) = (s.site.x as f64 / n as f64 - 0.5, s.site.y as f64 / n as f64 - 0.5);
        let axis = x.abs().min(y.abs());
        let diag = (x - y).abs().min((x + y).abs()) / std::f64::consts::SQRT_2;
        let expected = if axis < diag { 1 } else { 2 };
        matching += (s.deficit == expected) as usize;
    }
    let share = matching as f64 / art.locus.len().max(1) as f64;
    let c = share >= 0.95;

    let weights = estimate_edge_weights(&art.locus, &star, 3.0 / n as f64, 5.0 / n as f64).unwrap();
    let d = weights.len() == 8 && weights.iter().all(|w| w.rounded == 1 && (w.raw - 1.0).abs() <= 0.15);
    let raw: Vec<String> = weights.iter().map(|w| format!("{:.2}", w.raw)).collect();
    let t = secs(run.elapsed);
    report(
        3,
        a && b && c && d && t < 60.0,
        format!(
            "N={n}: (a) height at p {height:?} [{}]; (b) hausdorff to 8-arm star {hd:.4} [{}]; \
             (c) deficit match {:.1}% [{}]; (d) weights {raw:?} [{}]; sweep time {t:.1}s",
            ok(a),
            ok(b),
            100.0 * share,
            ok(c),
            ok(d)
        ),
    );
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "fail"
    }
}

#[test]
fn criterion_4_figure_3() {
    let _g = serial();
    let run = figure3();
    let art = &run.value;
    let Some(curve) = &art.curve else {
        report(4, false, format!("no curve at N={}: {:?}", art.scale, art.error));
        return;
    };
    let balanced = check_balancing(&curve.graph, &curve.corner_vertices()).passed();
    let labels_ok = !curve.side_labels.is_empty() && curve.side_labels.iter().all(|&d| d > 0);
    // edges the fitted polynomial itself gives weight 2
    let doubles: Vec<f64> =
        art.weights.iter().filter(|w| curve.graph.edges[w.edge].weight == 2).map(|w| w.raw).collect();
    let weights_ok = doubles.len() == 4 && doubles.iter().all(|m| (m - 2.0).abs() <= 0.25);
    let t = secs(run.elapsed);
    report(
        4,
        balanced && labels_ok && weights_ok && t < 120.0,
        format!(
            "N={}: balancing {}; side labels {:?}; weight-2 edge estimates {:?}; {t:.1}s",
            art.scale,
            ok(balanced),
            curve.side_labels,
            doubles.iter().map(|m| format!("{m:.3}")).collect::<Vec<_>>()
        ),
    );
}

#[test]
fn criterion_5_convergence() {
    let _g = serial();
    let run = figure1_sweep();
    let recs = &run.value.report.records;
    let hd: Vec<f64> = recs.iter().filter_map(|r| r.hausdorff_to_next).collect();
    let decreasing = hd.len() == 2 && hd.windows(2).all(|w| w[1] < w[0]);
    let gaps: Vec<(i64, Option<f64>)> = recs.iter().map(|r| (r.scale, r.sup_odometer_gap)).collect();
    let gaps_ok = gaps.iter().all(|&(n, g)| g.is_some_and(|g| g <= 3.0 / n as f64));
    let t = secs(run.elapsed);
    let shown: Vec<String> = gaps.iter().map(|(n, g)| format!("N={n} gap {:.4} (3/N {:.4})", g.unwrap_or(f64::NAN), 3.0 / *n as f64)).collect();
    report(5, decreasing && gaps_ok && t < 120.0, format!("hausdorff_to_next {hd:?}; {}; {t:.1}s", shown.join(", ")));
}

/// Coefficients share one denominator `q ≤ 8`; the synthetic odometer is
/// sampled at the least multiple of `q` that is at least 32.
fn random_polynomial(rng: &mut ChaCha8Rng) -> (TropicalPolynomial, i64) {
    loop {
        let q = rng.gen_range(1..=8i64);
        let k = rng.gen_range(2..=6);
        let mut terms = BTreeMap::new();
        while terms.len() < k {
            let m = LatticePoint::new(rng.gen_range(-4..=4), rng.gen_range(-4..=4));
            terms.insert(m, rat(rng.gen_range(-5 * q..=5 * q) as i128, q as i128));
        }
        let f = TropicalPolynomial::new(terms).unwrap();
        if f.len() >= 2 {
            return (f, q * ((32 + q - 1) / q));
        }
    }
}

#[test]
fn criterion_6_round_trip() {
    let _g = serial();
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let omega = LatticePolygon::from_coords(&[(-2, -2), (2, -2), (2, 2), (-2, 2)]).unwrap();
    let mut failures = Vec::new();
    let mut recovered = 0usize;
    for i in 0..100 {
        let (f, n) = random_polynomial(&mut rng);
        let curve = match corner_locus(&f) {
            Ok(c) => c,
            Err(e) => {
                failures.push(format!("#{i} corner locus: {e}"));
                continue;
            }
        };
        if !check_balancing(&curve, &[]).passed() {
            failures.push(format!("#{i} unbalanced"));
        }
        if let Err(e) = common::check_against_scan(&f, &curve) {
            failures.push(format!("#{i} scan: {e}"));
        }
        let d = Arc::new(ScaledDomain::new(omega.clone(), n).unwrap());
        let odo = common::synthesize_odometer(&f, d.clone());
        let params = FitParams::for_scale(n);
        let decomp = match fit_linear_regions(&odo, &params) {
            Ok(x) => x,
            Err(e) => {
                failures.push(format!("#{i} fit: {e}"));
                continue;
            }
        };
        let g = match assemble_polynomial(&decomp, &odo) {
            Ok((g, rep)) if rep.mismatched_sites == 0 => g,
            Ok((_, rep)) => {
                failures.push(format!("#{i} {} mismatched sites", rep.mismatched_sites));
                continue;
            }
            Err(e) => {
                failures.push(format!("#{i} assemble: {e}"));
                continue;
            }
        };
        let mut shift = None;
        let mut bad = false;
        for (k, c) in g.terms() {
            match f.coefficient(k) {
                Some(a) if shift.map_or(true, |s| s == c - a) => shift = Some(c - a),
                _ => bad = true,
            }
        }
        // every monomial with a sizeable cell inside the domain must come back
        for (k, size) in common::interior_cell_sizes(&f, &d, params.band) {
            if size >= 3 * params.min_region_sites && g.coefficient(k).is_none() {
                bad = true;
            }
        }
        if bad {
            failures.push(format!("#{i} fitted {} differs from {}", g.to_json(), f.to_json()));
        } else {
            recovered += g.len();
        }
    }
    let el = secs(t.elapsed());
    report(
        6,
        failures.is_empty() && el < 30.0,
        format!("100 polynomials, {recovered} monomials recovered, {el:.1}s, failures {failures:?}"),
    );
}

#[test]
fn criterion_7_minimality() {
    let _g = serial();
    let mut parts = Vec::new();
    let mut all = true;
    for (name, art) in [("square centre", figure1_256()), ("tilted square", &figure3().value)] {
        let Some(probe) = &art.probe else {
            all = false;
            parts.push(format!("{name}: no probe ({:?})", art.error));
            continue;
        };
        let raisable: Vec<String> = probe.probes.iter().filter(|m| !m.raise_breaks()).map(|m| m.monomial.to_string()).collect();
        let lowerable: Vec<String> = probe.probes.iter().filter(|m| !m.lower_breaks()).map(|m| m.monomial.to_string()).collect();
        all &= probe.passed();
        parts.push(format!(
            "{name} N={}: precondition {:?}, {} monomials, raise admissible at {raisable:?}, lower admissible at {lowerable:?}",
            art.scale,
            probe.precondition,
            probe.probes.len()
        ));
    }
    report(7, all, parts.join("; "));
}

/// Relaxation at N=512 in a fresh process, so that its peak resident set
/// is measured on its own.
#[test]
#[ignore = "spawned by criterion_8_performance"]
fn criterion_8_child() {
    let omega = square();
    let cfg = config(&omega, centre());
    let d = Arc::new(ScaledDomain::new(omega, 512).unwrap());
    let initial = SandState::max_stable(d).perturb(&cfg).unwrap();
    let t = Instant::now();
    let r = relax_queue(&initial, &RelaxOptions::default()).unwrap();
    let el = t.elapsed().as_secs_f64();
    let status = std::fs::read_to_string("/proc/self/status").unwrap_or_default();
    let hwm_kb: u64 = status
        .lines()
        .find_map(|l| l.strip_prefix("VmHWM:"))
        .and_then(|v| v.trim().trim_end_matches("kB").trim().parse().ok())
        .unwrap_or(0);
    println!("CHILD topplings={} seconds={el} hwm_kb={hwm_kb}", r.topplings_total);
}

fn child_field(out: &str, key: &str) -> Option<f64> {
    out.lines()
        .find_map(|l| l.find("CHILD").map(|i| &l[i..]))?
        .split_whitespace()
        .find_map(|kv| kv.strip_prefix(key)?.strip_prefix('='))?
        .parse()
        .ok()
}

#[test]
fn criterion_8_performance() {
    let _g = serial();
    let out = Command::new(std::env::current_exe().unwrap())
        .args(["--exact", "criterion_8_child", "--ignored", "--nocapture", "--test-threads=1"])
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    let (Some(top512), Some(t512), Some(hwm)) =
        (child_field(&text, "topplings"), child_field(&text, "seconds"), child_field(&text, "hwm_kb"))
    else {
        report(8, false, format!("child run failed: {text}"));
        return;
    };
    let mut pts: Vec<(f64, f64)> =
        figure1_sweep().value.report.records.iter().map(|r| (r.scale as f64, r.topplings_total as f64)).collect();
    pts.push((512.0, top512));
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.iter().map(|&(n, t)| (n.ln(), t.ln())).unzip();
    let (mx, my) = (xs.iter().sum::<f64>() / 4.0, ys.iter().sum::<f64>() / 4.0);
    let slope = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let mem_mb = hwm / 1024.0;
    let counts: Vec<String> = pts.iter().map(|(n, t)| format!("N={n}: {t}")).collect();
    report(
        8,
        t512 < 300.0 && mem_mb < 2048.0 && (slope - 3.0).abs() <= 0.3,
        format!("N=512 relaxed in {t512:.2}s, peak RSS {mem_mb:.0} MB; topplings {counts:?}; log-log exponent {slope:.3}"),
    );
}
