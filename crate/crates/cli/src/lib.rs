//! Command-line front end. [`run`] parses arguments, dispatches and returns
//! the process exit code: 0 on success, 1 for usage errors, 2 for data
//! errors (unreadable or malformed input, failed self-test).

pub mod dataset;

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use roadside_eval::geometry::{ground_depth_map, gridded_depth_map, DEFAULT_Z_MAX};
use roadside_eval::io::{format_calib, format_depth_map, format_ground_truth, format_predictions, parse_eval_config, parse_gridded, serialize_report};
use roadside_eval::metrics::evaluate;
use roadside_eval::synth::{generate_scene, perturb, scene_statistics, NoiseModel, SceneConfig};
use roadside_eval::EvalConfig;
use roadside_oracle::acceptance::{run_library_criteria, Scale};

use dataset::{read_text, located, CALIB_DIR, GT_DIR, PRED_DIR};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) => f.write_str(m),
        }
    }
}

#[derive(Parser)]
#[command(name = "roadside-eval", version, about = "Evaluation toolkit for roadside monocular 3D object detection")]
struct Cli {
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score predictions against ground truth and write a report.
    Evaluate(EvaluateArgs),
    /// Print dataset statistics for a label directory.
    Stats(StatsArgs),
    /// Write the ground depth map for one calibration file.
    GroundDepth(GroundDepthArgs),
    /// Generate a synthetic dataset tree.
    Synth(SynthArgs),
    /// Run the built-in oracle checks.
    SelfTest(SelfTestArgs),
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long, value_name = "DIR")]
    gt: PathBuf,
    #[arg(long, value_name = "DIR")]
    pred: PathBuf,
    #[arg(long, value_name = "DIR")]
    calib: PathBuf,
    /// Evaluation config (TOML); defaults apply when omitted.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long, value_name = "DIR")]
    gt: PathBuf,
}

#[derive(Args)]
struct GroundDepthArgs {
    #[arg(long, value_name = "FILE")]
    calib: PathBuf,
    /// Piecewise ground (`gg_meta:` / `gg:` lines); overrides any grid
    /// embedded in the calibration file.
    #[arg(long, value_name = "FILE")]
    gridded: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    #[arg(long, value_name = "METERS", default_value_t = DEFAULT_Z_MAX)]
    zmax: f64,
}

#[derive(Args)]
struct SynthArgs {
    /// Scene config (TOML); defaults apply when omitted.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Detector noise for the `pred/` tree (TOML); defaults apply when omitted.
    #[arg(long, value_name = "FILE")]
    noise: Option<PathBuf>,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the config's frame count.
    #[arg(long)]
    frames: Option<usize>,
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Args)]
struct SelfTestArgs {
    /// Use the full problem sizes (slower).
    #[arg(long)]
    full: bool,
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::Data(format!("{}: {e}", parent.display())))?;
    }
    fs::write(path, text).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn cmd_evaluate(a: &EvaluateArgs) -> Result<(), CliError> {
    let cfg = match &a.config {
        Some(p) => parse_eval_config(&read_text(p)?).map_err(|e| located(p, e))?,
        None => EvalConfig::default(),
    };
    let ds = dataset::load(&a.gt, &a.pred, &a.calib)?;
    for w in &ds.warnings {
        eprintln!("warning: {w}");
    }
    let report = evaluate(&ds.gts, &ds.dets, &ds.planes, &cfg).map_err(|e| CliError::Data(e.to_string()))?;
    write(&a.out, &serialize_report(&report))?;
    print!("{}", report.summary_table());
    Ok(())
}

fn cmd_stats(a: &StatsArgs) -> Result<(), CliError> {
    let mut frames = Vec::new();
    for (id, path) in dataset::frame_files(&a.gt)? {
        let parsed = roadside_eval::io::parse_ground_truth(&read_text(&path)?, &id).map_err(|e| located(&path, e))?;
        frames.push(parsed.records);
    }
    let stats = scene_statistics(frames.iter().map(Vec::as_slice))
        .map_err(|_| CliError::Data(format!("{}: no label files", a.gt.display())))?;
    print!("{}", stats.render());
    Ok(())
}

fn cmd_ground_depth(a: &GroundDepthArgs) -> Result<(), CliError> {
    if !(a.zmax.is_finite() && a.zmax > 0.0) {
        return Err(CliError::Usage("--zmax must be a positive number".into()));
    }
    let cal = dataset::load_calibration(&a.calib)?;
    let grid = match &a.gridded {
        Some(p) => Some(parse_gridded(&read_text(p)?, cal.plane).map_err(|e| located(p, e))?),
        None => cal.gridded.clone(),
    };
    let map = match &grid {
        Some(g) => gridded_depth_map(&cal.camera, g, a.zmax),
        None => ground_depth_map(&cal.camera, &cal.plane, a.zmax),
    };
    write(&a.out, &format_depth_map(&map))
}

fn cmd_synth(a: &SynthArgs) -> Result<(), CliError> {
    let mut cfg = match &a.config {
        Some(p) => SceneConfig::from_toml(&read_text(p)?).map_err(|e| located(p, e))?,
        None => SceneConfig::default(),
    };
    cfg.seed = a.seed.unwrap_or(cfg.seed);
    cfg.frames = a.frames.unwrap_or(cfg.frames);
    let noise = match &a.noise {
        Some(p) => NoiseModel::from_toml(&read_text(p)?).map_err(|e| located(p, e))?,
        None => NoiseModel::default(),
    };
    let scene = generate_scene(&cfg).map_err(|e| CliError::Data(e.to_string()))?;
    // Detector noise uses its own key so it never correlates with placement.
    let dets = perturb(&scene, &noise, cfg.seed ^ 0x5eed_0fde_7ec7);
    write(&a.out.join("scene.toml"), &cfg.to_toml())?;
    write(&a.out.join("noise.toml"), &noise.to_toml())?;
    for f in &scene.frames {
        let name = format!("{}.txt", f.frame_id);
        write(&a.out.join(GT_DIR).join(&name), &format_ground_truth(&f.annotations))?;
        write(&a.out.join(CALIB_DIR).join(&name), &format_calib(&f.calibration))?;
        write(&a.out.join(PRED_DIR).join(&name), &format_predictions(&dets.detections[&f.frame_id]))?;
    }
    println!("wrote {} frames to {}", scene.frames.len(), a.out.display());
    Ok(())
}

fn cmd_self_test(a: &SelfTestArgs) -> Result<(), CliError> {
    let outcomes = run_library_criteria(if a.full { Scale::Full } else { Scale::Quick });
    for o in &outcomes {
        println!("{o}");
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    if failed > 0 {
        return Err(CliError::Data(format!("{failed} check(s) failed")));
    }
    println!("all {} checks passed", outcomes.len());
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Stats(a) => cmd_stats(a),
        Command::GroundDepth(a) => cmd_ground_depth(a),
        Command::Synth(a) => cmd_synth(a),
        Command::SelfTest(a) => cmd_self_test(a),
    }
}

/// Runs the command line `args` (including the program name) and returns
/// the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return 1;
        }
        builder = builder.num_threads(n);
    }
    let result = match builder.build() {
        Ok(pool) => pool.install(|| dispatch(&cli)),
        Err(e) => Err(CliError::Data(format!("thread pool: {e}"))),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.code()
        }
    }
}
