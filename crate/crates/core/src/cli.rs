//! The `welfare` command-line tool: gen, design, eval, sweep, verify.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error,
//! 3 degenerate model, 4 a `verify` check failed.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::distributions::{self, mix_seed, verify_band_bound, verify_tail_bound};
use crate::error::{Error, Result};
use crate::io::{
    format_f64, load_dataset, read_json, sidecar_path, write_dataset, write_json, write_table, CheckGroup, DesignKind,
    DesignSummary, EvalReport, RunConfig, Sidecar, VerifyReport,
};
use crate::learning::{convergence_sweep, design_from_samples, fit_loglog_slope};
use crate::linear::{linear_regime, optimal_linear, LinearRegime};
use crate::metrics::{gain, gain_closed_form};
use crate::model::{Mechanism, SampleSet, ThresholdMechanism, Transform};
use crate::numeric::{dot, norm};

pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_CHECK_FAILED: i32 = 4;

const SMOOTH_SALT: u64 = 0x736d_6f6f_7468;
const VERIFY_SALT: u64 = 0x7665_7269_6679;

#[derive(Debug, Parser)]
#[command(
    name = "welfare",
    version,
    about = "Design and evaluate mechanisms for strategic agents"
)]
struct Cli {
    /// Increase log verbosity (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Run configuration (JSON).
    #[arg(short, long)]
    config: PathBuf,
    /// Overrides `output_dir`.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Overrides the master `seed`.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw a smoothed dataset and write data.csv with a data.json sidecar.
    Gen {
        #[command(flatten)]
        common: Common,
        /// Overrides `samples`.
        #[arg(short = 'm', long)]
        samples: Option<usize>,
    },
    /// Design a mechanism on a dataset; writes mechanism.json and report.json.
    Design {
        #[command(flatten)]
        common: Common,
        /// Dataset CSV (default: <output_dir>/data.csv).
        #[arg(short, long)]
        data: Option<PathBuf>,
        /// Record wall-clock time in report.json (makes output non-reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Evaluate a mechanism on a dataset; writes eval.json.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(short, long)]
        data: Option<PathBuf>,
        /// Mechanism JSON (default: <output_dir>/mechanism.json).
        #[arg(long)]
        mechanism: Option<PathBuf>,
        /// Fail with exit code 3 when the gain is unbounded.
        #[arg(long)]
        require_finite: bool,
    },
    /// Run the sample-size sweep; writes sweep.csv and sweep_median.csv.
    Sweep {
        #[command(flatten)]
        common: Common,
    },
    /// Check smoothness bounds and the threshold gain identity; writes verify.json.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(short, long)]
        data: Option<PathBuf>,
    },
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. }
        | Error::Parse { .. }
        | Error::Format { .. }
        | Error::DimensionMismatch { .. }
        | Error::EmptySampleSet
        | Error::NonFinite { .. }
        | Error::NotVisible { .. } => EXIT_DATA,
        Error::InvisibleQuality { .. }
        | Error::Unbounded { .. }
        | Error::EmptyFamily { .. }
        | Error::DirectionsTooAligned { .. }
        | Error::AntipodalDirections { .. } => EXIT_DEGENERATE,
        _ => EXIT_CONFIG,
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    configure_threads();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn configure_threads() {
    #[cfg(feature = "parallel")]
    if let Ok(v) = std::env::var("MECH_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
                    log::debug!("thread pool already initialized");
                }
            }
            _ => log::warn!("ignoring MECH_THREADS={v}: expected a positive integer"),
        }
    }
}

fn load_config(common: &Common) -> Result<(RunConfig, PathBuf)> {
    let mut cfg = RunConfig::load(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    let out = common.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
    fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    Ok((cfg, out))
}

fn dataset_path(data: &Option<PathBuf>, out: &Path) -> PathBuf {
    data.clone().unwrap_or_else(|| out.join("data.csv"))
}

/// Loads a dataset and checks it against the configured dimension.
fn load_for(cfg: &RunConfig, path: &Path) -> Result<(SampleSet, Option<Sidecar>)> {
    let (s, side) = load_dataset(path, cfg.radius())?;
    if s.dim() != cfg.population.n {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: format!(
                "dataset has {} columns, configuration expects {}",
                s.dim(),
                cfg.population.n
            ),
        });
    }
    Ok((s, side))
}

fn dispatch(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Gen { common, samples } => cmd_gen(&common, samples),
        Command::Design { common, data, timing } => cmd_design(&common, &data, timing),
        Command::Eval {
            common,
            data,
            mechanism,
            require_finite,
        } => cmd_eval(&common, &data, &mechanism, require_finite),
        Command::Sweep { common } => cmd_sweep(&common),
        Command::Verify { common, data } => cmd_verify(&common, &data),
    }
}

fn cmd_gen(common: &Common, samples: Option<usize>) -> Result<i32> {
    let (mut cfg, out) = load_config(common)?;
    if let Some(m) = samples {
        cfg.samples = m;
    }
    cfg.validate()?;
    let base = distributions::sample(&cfg.population, cfg.samples)?;
    let smoothing_seed = mix_seed(cfg.seed, SMOOTH_SALT);
    let s = distributions::smooth(&base, &cfg.smoothing, smoothing_seed)?;
    let path = out.join("data.csv");
    write_dataset(&path, &s)?;
    let side = Sidecar {
        provenance: s.provenance().clone(),
        seed: cfg.population.seed,
        smoothing_seed,
        r: cfg.radius(),
        sigma: cfg.smoothing.sigma,
        m: s.len(),
        n: s.dim(),
    };
    write_json(&sidecar_path(&path), &side)?;
    log::info!("wrote {} points to {}", s.len(), path.display());
    Ok(0)
}

fn sigma_of(cfg: &RunConfig, side: &Option<Sidecar>) -> f64 {
    side.as_ref().map_or(cfg.smoothing.sigma, |s| s.sigma)
}

fn cmd_design(common: &Common, data: &Option<PathBuf>, timing: bool) -> Result<i32> {
    let (cfg, out) = load_config(common)?;
    let (s, side) = load_for(&cfg, &dataset_path(data, &out))?;
    let started = Instant::now();
    let n = s.dim();
    let (mechanism, summary) = match cfg.design_method(sigma_of(&cfg, &side)) {
        None => {
            let g = optimal_linear(&cfg.projection, &cfg.quality, cfg.norm_cap)?;
            let regime = linear_regime(&g, &cfg.cost);
            let mech: Mechanism = g.into();
            let report = gain(&mech, &s, &cfg.quality, &cfg.cost)?;
            let summary = DesignSummary {
                design: DesignKind::Linear,
                gain: report.gain,
                m: s.len(),
                oracle_calls: 0,
                epsilon_prime: None,
                candidate_count: 1,
                candidates_file: None,
                linear_regime: Some(regime),
                timing_ms: None,
            };
            (mech, summary)
        }
        Some(method) => {
            let rep = design_from_samples(&s, &cfg.projection, &cfg.quality, &cfg.cost, &method)?;
            let mut header: Vec<String> = (1..=n).map(|i| format!("w{i}")).collect();
            header.push("b".into());
            header.push("gain".into());
            write_table(
                &out.join("candidates.csv"),
                &header,
                rep.candidates.iter().map(|c| {
                    let mut row: Vec<String> = c.w.iter().map(|&v| format_f64(v)).collect();
                    row.push(format_f64(c.b));
                    row.push(format_f64(c.gain));
                    row
                }),
            )?;
            let summary = DesignSummary {
                design: cfg.design,
                gain: Some(rep.gain),
                m: s.len(),
                oracle_calls: rep.oracle_calls,
                epsilon_prime: rep.epsilon_prime,
                candidate_count: rep.candidates.len(),
                candidates_file: Some("candidates.csv".into()),
                linear_regime: None,
                timing_ms: None,
            };
            (rep.chosen.into(), summary)
        }
    };
    let summary = DesignSummary {
        timing_ms: timing.then(|| started.elapsed().as_secs_f64() * 1e3),
        ..summary
    };
    write_json(&out.join("mechanism.json"), &mechanism)?;
    write_json(&out.join("report.json"), &summary)?;
    Ok(0)
}

fn cmd_eval(common: &Common, data: &Option<PathBuf>, mechanism: &Option<PathBuf>, require_finite: bool) -> Result<i32> {
    let (cfg, out) = load_config(common)?;
    let mech_path = mechanism.clone().unwrap_or_else(|| out.join("mechanism.json"));
    let mech: Mechanism = read_json(&mech_path)?;
    let (s, _) = load_for(&cfg, &dataset_path(data, &out))?;
    if mech.dim() != s.dim() {
        return Err(Error::Format {
            path: mech_path,
            message: format!("mechanism has dimension {}, dataset has {}", mech.dim(), s.dim()),
        });
    }
    mech.check_visible(&cfg.projection)?;
    let r = gain(&mech, &s, &cfg.quality, &cfg.cost)?;
    let report = EvalReport {
        val: r.val,
        baseline: r.baseline,
        gain: r.gain,
        se: r.std_error,
        unbounded: r.unbounded,
        m: r.m,
    };
    write_json(&out.join("eval.json"), &report)?;
    if r.unbounded && require_finite {
        if let Mechanism::Linear(g) = &mech {
            return Err(Error::Unbounded {
                norm: g.norm(),
                cost: cfg.cost.c(),
            });
        }
    }
    if let Mechanism::Linear(g) = &mech {
        if linear_regime(g, &cfg.cost) == LinearRegime::Unbounded {
            log::warn!("linear mechanism with |w| >= c: gain is unbounded");
        }
    }
    Ok(0)
}

fn cmd_sweep(common: &Common) -> Result<i32> {
    let (cfg, out) = load_config(common)?;
    let plan = cfg
        .sweep
        .clone()
        .ok_or_else(|| Error::Config("`sweep` section is required for the sweep command".into()))?;
    if cfg.is_file_population() {
        return Err(Error::Config("sweep needs a generated population, not a file".into()));
    }
    let method = cfg
        .design_method(cfg.smoothing.sigma)
        .ok_or_else(|| Error::Config("sweep requires a threshold design".into()))?;
    let res = convergence_sweep(
        &cfg.population,
        &cfg.smoothing,
        &cfg.projection,
        &cfg.quality,
        &cfg.cost,
        &method,
        &plan,
        cfg.seed,
    )?;
    let header: Vec<String> = ["m", "trial", "empirical_gain", "holdout_gain", "gap"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    write_table(
        &out.join("sweep.csv"),
        &header,
        res.rows.iter().map(|r| {
            vec![
                r.m.to_string(),
                r.trial.to_string(),
                format_f64(r.empirical_gain),
                format_f64(r.holdout_gain),
                format_f64(r.gap),
            ]
        }),
    )?;
    let medians = res.median_gaps();
    write_table(
        &out.join("sweep_median.csv"),
        &["m".to_string(), "median_gap".to_string()],
        medians.iter().map(|(m, g)| vec![m.to_string(), format_f64(*g)]),
    )?;
    let pts: Vec<(f64, f64)> = medians.iter().map(|&(m, g)| (m as f64, g)).collect();
    if let Some(slope) = fit_loglog_slope(&pts) {
        log::info!("log-log slope of median gap vs m: {slope:.3}");
    }
    Ok(0)
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let l = norm(&v);
        if l > 1e-12 {
            return v.into_iter().map(|x| x / l).collect();
        }
    }
}

fn cmd_verify(common: &Common, data: &Option<PathBuf>) -> Result<i32> {
    let (cfg, out) = load_config(common)?;
    let (s, side) = load_for(&cfg, &dataset_path(data, &out))?;
    let sigma = sigma_of(&cfg, &side);
    let r = s.radius();
    let n = s.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(cfg.seed, VERIFY_SALT));

    let band = if sigma == 0.0 {
        CheckGroup::skipped("sigma=0")
    } else {
        let mut margins = Vec::with_capacity(cfg.verify.bands);
        for _ in 0..cfg.verify.bands {
            let w = random_unit(&mut rng, n);
            let a = rng.random_range(-r..r);
            let width = rng.random_range(0.0..sigma);
            let c = verify_band_bound(&s, &w, a, a + width, sigma)?;
            margins.push(c.empirical - c.allowed);
        }
        CheckGroup::from_margins(&margins)
    };

    let mut tail_margins = Vec::new();
    for &eps in &cfg.verify.tail_eps {
        let c = verify_tail_bound(&s, r, sigma, eps)?;
        tail_margins.push(c.empirical - c.allowed);
    }
    let tail = CheckGroup::from_margins(&tail_margins);

    let gain_identity = if cfg.quality.transform() != Transform::Identity {
        CheckGroup::skipped("quality transform is not the identity")
    } else {
        let mut margins = Vec::with_capacity(cfg.verify.mechanisms);
        for _ in 0..cfg.verify.mechanisms {
            let w = random_unit(&mut rng, n);
            let anchor = s.point(rng.random_range(0..s.len()));
            let b = dot(&w, anchor) + rng.random_range(0.0..cfg.cost.margin());
            let g = ThresholdMechanism::new(w, b)?;
            let closed = gain_closed_form(&g, &s, &cfg.quality, &cfg.cost)?;
            let simulated = gain(&g.into(), &s, &cfg.quality, &cfg.cost)?.gain.unwrap_or(f64::NAN);
            margins.push((closed - simulated).abs() - 1e-9);
        }
        CheckGroup::from_margins(&margins)
    };

    let pass = !band.failed() && !tail.failed() && !gain_identity.failed();
    let report = VerifyReport {
        sigma,
        m: s.len(),
        band,
        tail,
        gain_identity,
        pass,
    };
    write_json(&out.join("verify.json"), &report)?;
    Ok(if pass { 0 } else { EXIT_CHECK_FAILED })
}
