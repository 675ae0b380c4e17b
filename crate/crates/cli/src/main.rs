use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};
use serde::Serialize;
use thiserror::Error;

use tropical_sandpile::analysis::{convergence_sweep, AnalysisError, SweepOptions};
use tropical_sandpile::config::{ConfigError, RunConfig};
use tropical_sandpile::grid_io::{self, Grid, GridError, GridKind};
use tropical_sandpile::lattice::{round_down, ScaledDomain};
use tropical_sandpile::rational::{parse_rational, Rational};
use tropical_sandpile::render::{render_ppm, render_svg, Overlay, Palette, RenderError, RenderOptions};
use tropical_sandpile::sandpile::{deviation_set, relax_queue, relax_queue_observed, EngineError, RelaxOptions, SandState};
use tropical_sandpile::tropical::TropicalCurve;

mod verify;

#[derive(Parser)]
#[command(name = "tropsand", version, about = "Sandpiles on lattice polygons and their tropical limits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Relax the perturbed maximal stable state at one scale.
    Relax(RelaxArgs),
    /// Run the full pipeline over one or more scales and write a report.
    Analyze(AnalyzeArgs),
    /// Draw a height grid as PPM and SVG.
    Render(RenderArgs),
    /// Check relaxation and curve invariants on a config.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Toppling budget before giving up.
    #[arg(long)]
    ceiling: Option<u64>,
}

#[derive(Args)]
struct RelaxArgs {
    #[command(flatten)]
    common: Common,
    /// Dump the heights every K bulk topplings into `snapshots/`.
    #[arg(long, value_name = "K")]
    snapshot_every: Option<u64>,
    /// Also write the grids as `x,y,value` CSV.
    #[arg(long)]
    csv: bool,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    common: Common,
    /// Scales processed concurrently.
    #[arg(long, value_name = "K")]
    jobs: Option<usize>,
    /// Weight strip halfwidth, in units of 1/N.
    #[arg(long, value_name = "R")]
    strip_halfwidth: Option<f64>,
    /// Minimality probe step, in units of 1/N (e.g. 1/4).
    #[arg(long, value_name = "R")]
    probe_step: Option<String>,
}

#[derive(Args)]
struct RenderArgs {
    /// Height grid in the binary grid format.
    #[arg(long)]
    grid: PathBuf,
    /// Output path prefix; `.ppm` and `.svg` are appended.
    #[arg(long, default_value = "render")]
    out: PathBuf,
    /// mono or deficit.
    #[arg(long)]
    palette: Option<String>,
    /// Config whose palette is used when --palette is absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Curve JSON to draw over the grid.
    #[arg(long)]
    curve: Option<PathBuf>,
    /// Weight table JSON used for the edge labels instead of curve weights.
    #[arg(long, requires = "curve")]
    weights: Option<PathBuf>,
    /// Pixels per site.
    #[arg(long, default_value_t = 6)]
    cell: u32,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Skip the sweep-based curve checks.
    #[arg(long)]
    relax_only: bool,
}

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error("relaxation did not terminate: {0}")]
    NonTermination(EngineError),
    #[error(transparent)]
    Engine(EngineError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed grid {path}: {source}")]
    Grid { path: PathBuf, source: GridError },
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error(transparent)]
    Analysis(AnalysisError),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(ConfigError::Io(_)) | CliError::Io { .. } => 4,
            CliError::Grid { source: GridError::Io(e), .. } if e.kind() == std::io::ErrorKind::NotFound => 4,
            CliError::Config(_) | CliError::Usage(_) | CliError::Grid { .. } | CliError::Render(_) => 2,
            CliError::NonTermination(_) => 3,
            CliError::Engine(_) => 2,
            CliError::Analysis(AnalysisError::Engine(EngineError::NonTermination { .. })) => 3,
            CliError::Analysis(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::NonTermination { .. } => CliError::NonTermination(e),
            e => CliError::Engine(e),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Engine(e) => e.into(),
            e => CliError::Analysis(e),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(io_err(path))
}

fn write_grid(path: &Path, grid: &Grid) -> Result<(), CliError> {
    let mut w = create(path)?;
    grid_io::write_binary(grid, &mut w).map_err(|source| CliError::Grid { path: path.to_path_buf(), source })?;
    w.flush().map_err(io_err(path))
}

fn write_csv(path: &Path, grid: &Grid) -> Result<(), CliError> {
    let mut w = create(path)?;
    grid_io::write_csv(grid, &mut w).map_err(|source| CliError::Grid { path: path.to_path_buf(), source })?;
    w.flush().map_err(io_err(path))
}

fn mkdir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(io_err(path))
}

fn load(common: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(&common.config)?;
    if common.ceiling.is_some() {
        cfg.ceiling = common.ceiling;
    }
    Ok(cfg)
}

/// Builds the perturbed initial state, rejecting points whose site is off
/// the domain at this scale.
fn initial_state(cfg: &RunConfig, n: i64) -> Result<SandState, CliError> {
    let domain = Arc::new(ScaledDomain::new(cfg.polygon.clone(), n).map_err(ConfigError::from)?);
    SandState::max_stable(domain).perturb(&cfg.points).map_err(|e| match e {
        EngineError::PointOutsideDomain(v) => CliError::Usage(format!("perturbation site {v} is outside the domain at N={n}")),
        e => e.into(),
    })
}

#[derive(Serialize)]
struct RelaxStats {
    #[serde(rename = "N")]
    scale: i64,
    sites: usize,
    topplings_total: u64,
    grains_lost: u64,
    runtime: f64,
    heights_at_points: Vec<Option<u32>>,
    locus_sites: usize,
    snapshots: usize,
}

fn cmd_relax(args: &RelaxArgs) -> Result<(), CliError> {
    let cfg = load(&args.common)?;
    let n = cfg.single_scale()?;
    let out = &args.common.out;
    mkdir(out)?;
    let initial = initial_state(&cfg, n)?;
    let opts = RelaxOptions { ceiling: cfg.sweep_options().ceiling };
    let start = Instant::now();
    let mut snapshots = 0usize;
    let result = match args.snapshot_every {
        Some(k) if k > 0 => {
            let dir = out.join("snapshots");
            mkdir(&dir)?;
            let domain = initial.domain().clone();
            let mut failure = None;
            let r = relax_queue_observed(&initial, &opts, k, |h| {
                if failure.is_some() {
                    return;
                }
                snapshots += 1;
                let grid = Grid { domain: domain.clone(), kind: GridKind::Heights, values: h.iter().map(|&x| x as u64).collect() };
                if let Err(e) = write_grid(&dir.join(format!("step_{snapshots:06}.tspl")), &grid) {
                    failure = Some(e);
                }
            })?;
            if let Some(e) = failure {
                return Err(e);
            }
            r
        }
        _ => relax_queue(&initial, &opts)?,
    };
    let runtime = start.elapsed().as_secs_f64();
    let final_grid = Grid::from_state(&result.final_state);
    let odo_grid = Grid::from_odometer(&result.odometer);
    write_grid(&out.join("final.tspl"), &final_grid)?;
    write_grid(&out.join("odometer.tspl"), &odo_grid)?;
    if args.csv {
        write_csv(&out.join("final.csv"), &final_grid)?;
        write_csv(&out.join("odometer.csv"), &odo_grid)?;
    }
    let stats = RelaxStats {
        scale: n,
        sites: initial.domain().len(),
        topplings_total: result.topplings_total,
        grains_lost: result.grains_lost,
        runtime,
        heights_at_points: cfg.points.points().iter().map(|p| result.final_state.height(round_down(p, n))).collect(),
        locus_sites: deviation_set(&result).len(),
        snapshots,
    };
    write_text(&out.join("stats.json"), &serde_json::to_string_pretty(&stats).expect("serializable"))?;
    info!("N={n}: {} topplings, {} grains lost, {runtime:.3}s", stats.topplings_total, stats.grains_lost);
    println!("{}", serde_json::to_string(&stats).expect("serializable"));
    Ok(())
}

fn sweep_options(cfg: &RunConfig, args: &AnalyzeArgs) -> Result<SweepOptions, CliError> {
    let mut o = cfg.sweep_options();
    if let Some(j) = args.jobs {
        o.jobs = j;
    }
    if let Some(h) = args.strip_halfwidth {
        if !(h.is_finite() && h > 0.0) {
            return Err(CliError::Usage(format!("--strip-halfwidth must be positive, got {h}")));
        }
        o.strip_halfwidth = h;
    }
    if let Some(s) = &args.probe_step {
        let step: Rational = parse_rational(s).map_err(|e| CliError::Usage(format!("--probe-step: {e}")))?;
        if step <= Rational::from_integer(0) {
            return Err(CliError::Usage("--probe-step must be positive".into()));
        }
        o.probe_step = step;
    }
    Ok(o)
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<(), CliError> {
    let cfg = load(&args.common)?;
    let opts = sweep_options(&cfg, args)?;
    for &n in &cfg.scales {
        initial_state(&cfg, n)?;
    }
    let out = &args.common.out;
    mkdir(out)?;
    let sweep = convergence_sweep(&cfg.polygon, &cfg.points, &cfg.scales, &opts)?;
    write_text(&out.join("report.json"), &sweep.report.to_json())?;
    let mut succeeded = 0;
    for art in &sweep.scales {
        let dir = out.join(format!("N{}", art.scale));
        mkdir(&dir)?;
        write_grid(&dir.join("final.tspl"), &Grid::from_state(&art.result.final_state))?;
        write_grid(&dir.join("odometer.tspl"), &Grid::from_odometer(&art.result.odometer))?;
        if let Some(p) = &art.polynomial {
            write_text(&dir.join("polynomial.json"), &p.to_json())?;
        }
        if let Some(c) = &art.curve {
            write_text(&dir.join("curve.json"), &c.graph.to_json())?;
            write_text(&dir.join("weights.json"), &serde_json::to_string_pretty(&art.weights).expect("serializable"))?;
        }
        match &art.error {
            None => succeeded += 1,
            Some(e) => warn!("N={}: {e}", art.scale),
        }
    }
    for r in &sweep.report.records {
        println!(
            "N={:<5} topplings={:<12} locus={:<7} regions={:<3} balanced={:<5} labels={:?} minimal={:?} hausdorff_to_next={:?} gap={:?}",
            r.scale,
            r.topplings_total,
            r.locus_sites,
            r.regions,
            r.balancing_ok,
            r.side_labels,
            r.minimality_ok,
            r.hausdorff_to_next,
            r.sup_odometer_gap
        );
    }
    if succeeded == 0 {
        return Err(CliError::Failed("no scale produced a curve".into()));
    }
    Ok(())
}

#[derive(serde::Deserialize)]
struct WeightRow {
    edge: usize,
    rounded: u64,
}

fn read_json_file<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn cmd_render(args: &RenderArgs) -> Result<(), CliError> {
    let palette_name = match (&args.palette, &args.config) {
        (Some(p), _) => Some(p.clone()),
        (None, Some(c)) => RunConfig::load(c)?.palette,
        (None, None) => None,
    };
    let palette: Palette = palette_name.as_deref().map(str::parse).transpose()?.unwrap_or_default();
    if args.cell == 0 {
        return Err(CliError::Usage("--cell must be positive".into()));
    }
    let file = File::open(&args.grid).map_err(io_err(&args.grid))?;
    let grid = grid_io::read_binary(BufReader::new(file))
        .map_err(|source| CliError::Grid { path: args.grid.clone(), source })?;
    let curve = match &args.curve {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(io_err(p))?;
            Some(TropicalCurve::from_json(&text).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?)
        }
        None => None,
    };
    let labels: Vec<u64> = match (&curve, &args.weights) {
        (Some(c), Some(w)) => {
            let mut l: Vec<u64> = c.edges.iter().map(|e| e.weight).collect();
            for row in read_json_file::<Vec<WeightRow>>(w)? {
                if let Some(slot) = l.get_mut(row.edge) {
                    *slot = row.rounded;
                }
            }
            l
        }
        (Some(c), None) => c.edges.iter().map(|e| e.weight).collect(),
        _ => Vec::new(),
    };
    let overlay = curve.as_ref().map(|c| Overlay { curve: c, labels: &labels });
    let opts = RenderOptions { cell: args.cell, palette, ..Default::default() };
    let ppm = render_ppm(&grid, &opts, overlay.as_ref())?;
    let svg = render_svg(&grid, &opts, overlay.as_ref())?;
    let with_ext = |ext: &str| {
        let mut p = args.out.clone().into_os_string();
        p.push(ext);
        PathBuf::from(p)
    };
    if let Some(dir) = args.out.parent().filter(|d| !d.as_os_str().is_empty()) {
        mkdir(dir)?;
    }
    let (ppm_path, svg_path) = (with_ext(".ppm"), with_ext(".svg"));
    fs::write(&ppm_path, ppm).map_err(io_err(&ppm_path))?;
    write_text(&svg_path, &svg)?;
    println!("{}\n{}", ppm_path.display(), svg_path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Relax(a) => cmd_relax(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Render(a) => cmd_render(a),
        Command::Verify(a) => verify::cmd_verify(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
