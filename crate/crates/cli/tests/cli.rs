use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::Arc;

use tempfile::TempDir;
use tropical_sandpile::grid_io::{read_binary, write_binary, Grid, GridKind};
use tropical_sandpile::lattice::{LatticePolygon, ScaledDomain};

const SQUARE: &str = "[[0,0],[1,0],[1,1],[0,1]]";
const TILTED: &str = "[[0,0],[2,1],[1,3],[-1,2]]";

fn tropsand(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tropsand")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn config(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(p: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn count(svg: &str, class: &str) -> usize {
    svg.matches(&format!(r#"class="{class}""#)).count()
}

#[test]
fn relax_writes_grids_and_stats() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "c.json", &format!(r#"{{"polygon": {SQUARE}, "points": [["1/2","1/2"]], "scale": 64}}"#));
    let out = dir.path().join("out");
    let o = tropsand(&["relax", "--config", s(&cfg), "--out", s(&out), "--csv"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["final.tspl", "odometer.tspl", "stats.json", "final.csv", "odometer.csv"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let stats = json(&out.join("stats.json"));
    assert!(stats["grains_lost"].as_u64().unwrap() > 0);
    assert!(stats["topplings_total"].as_u64().unwrap() > 0);
    assert!(stats["runtime"].as_f64().unwrap() >= 0.0);
    let g = read_binary(fs::File::open(out.join("final.tspl")).unwrap()).unwrap();
    assert_eq!(g.kind, GridKind::Heights);
    assert_eq!(g.values.len(), 65 * 65);

    // same config, same bytes
    let again = dir.path().join("again");
    assert_eq!(code(&tropsand(&["relax", "--config", s(&cfg), "--out", s(&again)])), 0);
    for f in ["final.tspl", "odometer.tspl"] {
        assert_eq!(fs::read(out.join(f)).unwrap(), fs::read(again.join(f)).unwrap());
    }
}

#[test]
fn relax_snapshots() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "c.json", &format!(r#"{{"polygon": {SQUARE}, "points": [[0.5, 0.5]], "scale": 32}}"#));
    let out = dir.path().join("out");
    assert_eq!(code(&tropsand(&["relax", "--config", s(&cfg), "--out", s(&out), "--snapshot-every", "500"])), 0);
    let n = fs::read_dir(out.join("snapshots")).unwrap().count();
    assert!(n > 0);
    assert_eq!(json(&out.join("stats.json"))["snapshots"].as_u64().unwrap() as usize, n);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let boundary = config(&dir, "b.json", &format!(r#"{{"polygon": {SQUARE}, "points": [[0, "1/2"]], "scale": 16}}"#));
    assert_eq!(code(&tropsand(&["relax", "--config", s(&boundary), "--out", s(&out)])), 2);
    let broken = config(&dir, "x.json", "{\"polygon\": ");
    assert_eq!(code(&tropsand(&["relax", "--config", s(&broken), "--out", s(&out)])), 2);
    let sweep = config(&dir, "s.json", &format!(r#"{{"polygon": {SQUARE}, "points": [[0.5, 0.5]], "scales": [8, 16]}}"#));
    assert_eq!(code(&tropsand(&["relax", "--config", s(&sweep), "--out", s(&out)])), 2);
    let missing = dir.path().join("nope.json");
    assert_eq!(code(&tropsand(&["relax", "--config", s(&missing), "--out", s(&out)])), 4);
    let ok = config(&dir, "ok.json", &format!(r#"{{"polygon": {SQUARE}, "points": [[0.5, 0.5]], "scale": 64}}"#));
    let o = tropsand(&["relax", "--config", s(&ok), "--out", s(&out), "--ceiling", "100"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("terminate"));
}

#[test]
fn analyze_two_scales() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "c.json", &format!(r#"{{"polygon": {SQUARE}, "points": [["1/2","1/2"]], "scales": [64, 128]}}"#));
    let out = dir.path().join("out");
    let o = tropsand(&["analyze", "--config", s(&cfg), "--out", s(&out), "--jobs", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = json(&out.join("report.json"));
    let recs = report["records"].as_array().unwrap();
    assert_eq!(recs.len(), 2);
    assert_eq!(recs.iter().filter(|r| r["hausdorff_to_next"].is_number()).count(), 1);
    for n in [64, 128] {
        for f in ["polynomial.json", "curve.json", "weights.json", "final.tspl"] {
            assert!(out.join(format!("N{n}")).join(f).exists());
        }
    }
    let bad = tropsand(&["analyze", "--config", s(&cfg), "--out", s(&out), "--probe-step", "zero"]);
    assert_eq!(code(&bad), 2);
}

#[test]
fn analyze_and_render_tilted_square() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "c.json", &format!(r#"{{"polygon": {TILTED}, "points": [["1/2","3/2"]], "scale": 64}}"#));
    let out = dir.path().join("out");
    let o = tropsand(&["analyze", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let weights = json(&out.join("N64/weights.json"));
    let twos = weights.as_array().unwrap().iter().filter(|w| w["rounded"] == 2).count();
    assert_eq!(twos, 4);
    let img = dir.path().join("img/fig");
    let n64 = out.join("N64");
    let o = tropsand(&[
        "render",
        "--grid",
        s(&n64.join("final.tspl")),
        "--curve",
        s(&n64.join("curve.json")),
        "--weights",
        s(&n64.join("weights.json")),
        "--out",
        s(&img),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let svg = fs::read_to_string(dir.path().join("img/fig.svg")).unwrap();
    assert_eq!(svg.matches(r#"class="weight""#).count(), 4);
    assert!(svg.matches(">2</text>").count() == 4);
    assert!(dir.path().join("img/fig.ppm").exists());
}

#[test]
fn analyze_two_point_triangle_balances() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "c.json", r#"{"polygon": [[0,0],[3,0],[0,3]], "points": [["3/4","1/2"],["1/2","3/2"]], "scale": 48}"#);
    let out = dir.path().join("out");
    assert_eq!(code(&tropsand(&["analyze", "--config", s(&cfg), "--out", s(&out)])), 0);
    let report = json(&out.join("report.json"));
    assert_eq!(report["records"][0]["balancing_ok"], true);
}

fn write_grid(path: &Path, grid: &Grid) {
    write_binary(grid, fs::File::create(path).unwrap()).unwrap();
}

#[test]
fn render_blank_and_histogram() {
    let dir = TempDir::new().unwrap();
    let p = LatticePolygon::from_coords(&[(0, 0), (1, 0), (1, 1), (0, 1)]).unwrap();
    let d = Arc::new(ScaledDomain::new(p, 20).unwrap());
    let blank = dir.path().join("blank.tspl");
    write_grid(&blank, &Grid { domain: d.clone(), kind: GridKind::Heights, values: vec![3; d.len()] });
    let prefix = dir.path().join("blank");
    assert_eq!(code(&tropsand(&["render", "--grid", s(&blank), "--out", s(&prefix), "--cell", "4"])), 0);
    // 21 sites plus two margin cells per side, 4 px each
    let ppm = fs::read(dir.path().join("blank.ppm")).unwrap();
    assert!(ppm.starts_with(b"P6\n100 100\n255\n"));
    let svg = fs::read_to_string(dir.path().join("blank.svg")).unwrap();
    assert!(["h0", "h1", "h2", "hover"].iter().all(|c| count(&svg, c) == 0));

    let cfg = config(&dir, "c.json", &format!(r#"{{"polygon": {SQUARE}, "points": [["1/2","1/2"]], "scale": 64}}"#));
    let out = dir.path().join("run");
    assert_eq!(code(&tropsand(&["relax", "--config", s(&cfg), "--out", s(&out)])), 0);
    let prefix = dir.path().join("fig1");
    let o = tropsand(&["render", "--grid", s(&out.join("final.tspl")), "--out", s(&prefix), "--palette", "deficit"]);
    assert_eq!(code(&o), 0);
    let grid = read_binary(fs::File::open(out.join("final.tspl")).unwrap()).unwrap();
    let hist = grid.histogram();
    let svg = fs::read_to_string(dir.path().join("fig1.svg")).unwrap();
    for (h, cls) in [(0, "h0"), (1, "h1"), (2, "h2")] {
        assert_eq!(count(&svg, cls), hist.get(&h).copied().unwrap_or(0), "{cls}");
    }
}

#[test]
fn render_rejects_bad_input() {
    let dir = TempDir::new().unwrap();
    let junk = dir.path().join("junk.tspl");
    fs::write(&junk, b"not a grid at all").unwrap();
    assert_eq!(code(&tropsand(&["render", "--grid", s(&junk), "--out", s(&dir.path().join("x"))])), 2);
    let missing = dir.path().join("missing.tspl");
    assert_eq!(code(&tropsand(&["render", "--grid", s(&missing), "--out", s(&dir.path().join("x"))])), 4);
    let p = LatticePolygon::from_coords(&[(0, 0), (1, 0), (1, 1), (0, 1)]).unwrap();
    let d = Arc::new(ScaledDomain::new(p, 4).unwrap());
    let g = dir.path().join("g.tspl");
    write_grid(&g, &Grid { domain: d.clone(), kind: GridKind::Heights, values: vec![3; d.len()] });
    let o = tropsand(&["render", "--grid", s(&g), "--out", s(&dir.path().join("x")), "--palette", "rainbow"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn verify_passes_on_a_small_config() {
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "c.json", &format!(r#"{{"polygon": {TILTED}, "points": [["1/2","3/2"]], "scales": [32, 48]}}"#));
    let out = dir.path().join("out");
    let o = tropsand(&["verify", "--config", s(&cfg), "--out", s(&out)]);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(code(&o), 0, "{stdout}");
    assert!(stdout.lines().all(|l| l.starts_with("PASS")));
    assert!(stdout.contains("abelian") && stdout.contains("least_action") && stdout.contains("balancing"));
    let checks = json(&out.join("verify.json"));
    assert!(checks.as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn verify_fails_when_the_scale_is_too_coarse() {
    // at N=16 the fitted curve touches a side away from the corners
    let dir = TempDir::new().unwrap();
    let cfg = config(&dir, "c.json", &format!(r#"{{"polygon": {TILTED}, "points": [["1/2","3/2"]], "scale": 16}}"#));
    let o = tropsand(&["verify", "--config", s(&cfg), "--out", s(&dir.path().join("out"))]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stdout).lines().any(|l| l.starts_with("FAIL") && l.contains("curve")));
    let o = tropsand(&["verify", "--config", s(&cfg), "--out", s(&dir.path().join("out")), "--relax-only"]);
    assert_eq!(code(&o), 0);
}
