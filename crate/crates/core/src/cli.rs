//! `ptbubble` command-line driver.
//!
//! Every subcommand writes CSV or JSON to stdout or to `-o PATH`. A JSON
//! config given with `--config PATH` is expanded into `--key=value` flags
//! placed before the explicit ones, so flags on the command line win.

use std::ffi::OsString;
use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::asymptotics::{predicted_ratio, regime, GammaTilde};
use crate::csv;
use crate::dynamics::{
    cyclic_experiment_with, initial_state_scan, loss_normalization, propagate, uniform_grid,
    TwoLevelState,
};
use crate::error::Error;
use crate::linalg::Mat2;
use crate::model::{build_hamiltonian, EtaSchedule, ModelParams};
use crate::perturbation::{degenerate_block, perturbative_corrections, PerturbationSetup};
use crate::spectra::{bubble_size_scan, spectrum_scan};
use crate::verify;

pub const THREADS_ENV: &str = "PTBUBBLE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "ptbubble", version, about = "PT-symmetric two-level system experiments")]
#[command(args_override_self = true)]
struct Cli {
    /// JSON object whose keys are flag names of the chosen subcommand.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Omit the `#` header comment in CSV output.
    #[arg(long, global = true)]
    no_meta: bool,

    /// Write to this file instead of stdout.
    #[arg(short, long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ModelArgs {
    #[arg(long, default_value_t = 0.2, allow_negative_numbers = true)]
    gamma: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    delta_x: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    delta_y: f64,
}

impl ModelArgs {
    fn params(&self, eta: f64, alpha: f64) -> crate::Result<ModelParams> {
        ModelParams::new(eta, self.delta_x, self.delta_y, self.gamma, alpha)
    }

    fn describe(&self) -> String {
        format!("gamma={} delta_x={} delta_y={}", self.gamma, self.delta_x, self.delta_y)
    }
}

#[derive(Debug, Args)]
struct AngleArgs {
    /// Mixing angle θ in radians.
    #[arg(long, default_value_t = PI / 3.0, allow_negative_numbers = true)]
    theta: f64,
    /// θ in units of π; overrides --theta.
    #[arg(long, allow_negative_numbers = true)]
    theta_pi: Option<f64>,
    /// Relative phase φ in radians.
    #[arg(long, default_value_t = PI / 6.0, allow_negative_numbers = true)]
    phi: f64,
    /// φ in units of π; overrides --phi.
    #[arg(long, allow_negative_numbers = true)]
    phi_pi: Option<f64>,
}

impl AngleArgs {
    fn theta(&self) -> f64 {
        self.theta_pi.map_or(self.theta, |x| x * PI)
    }

    fn phi(&self) -> f64 {
        self.phi_pi.map_or(self.phi, |x| x * PI)
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Eigenvalues over an η grid (CSV).
    Spectrum {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
        eta_min: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        eta_max: f64,
        #[arg(long, default_value_t = 801)]
        steps: usize,
    },
    /// Bubble diameter over a γ grid (CSV).
    Bubble {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        delta_y: f64,
        #[arg(long, default_value_t = 0.02)]
        gamma_min: f64,
        #[arg(long, default_value_t = 0.4)]
        gamma_max: f64,
        #[arg(long, default_value_t = 20)]
        steps: usize,
    },
    /// Linear sweep η = α t from a given initial state (CSV trajectory).
    Evolve {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        #[arg(long, default_value_t = -20.0, allow_negative_numbers = true)]
        t0: f64,
        #[arg(long, default_value_t = 20.0, allow_negative_numbers = true)]
        t1: f64,
        #[arg(long, default_value_t = 2001)]
        steps: usize,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        a_re: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        a_im: f64,
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        b_re: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        b_im: f64,
        /// Multiply amplitudes by e^{-γt/2}.
        #[arg(long)]
        normalize_loss: bool,
    },
    /// Out-and-back ramp η: -1 → 0 → -1 over [0, 2 t_f] (CSV trajectory).
    Cyclic {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        angles: AngleArgs,
        #[arg(long, default_value_t = 15.0)]
        tf: f64,
        #[arg(long, default_value_t = crate::dynamics::CYCLIC_SAMPLES)]
        samples: usize,
        /// Multiply amplitudes by e^{-γt/2}.
        #[arg(long)]
        normalize_loss: bool,
    },
    /// Cyclic protocol over a θ grid (CSV).
    ScanTheta {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = PI / 6.0, allow_negative_numbers = true)]
        phi: f64,
        #[arg(long, default_value_t = 15.0)]
        tf: f64,
        #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
        theta_min: f64,
        #[arg(long, default_value_t = 1.5, allow_negative_numbers = true)]
        theta_max: f64,
        #[arg(long, default_value_t = 8)]
        steps: usize,
    },
    /// Predicted terminal ratio and regime of a slow sweep (JSON).
    Ratio {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 0.01)]
        alpha: f64,
    },
    /// Perturbative corrections for H0 + iλσx, H0 the γ = 0 model (JSON).
    Perturb {
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        eta: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        delta_x: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        delta_y: f64,
        #[arg(long, default_value_t = 0.05, allow_negative_numbers = true)]
        lambda: f64,
    },
    /// Runs the built-in numerical self-checks.
    Verify {
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

enum Failure {
    Usage(String),
    Numeric(Error),
    Io(io::Error),
    Verify(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Numeric(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code: 0 on success, 1 on numerical or I/O failure, 2 on a
/// usage error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit stdout and stderr.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let argv = match expand_config(argv) {
        Ok(a) => a,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    if let Err(msg) = configure_threads() {
        let _ = writeln!(err, "error: {msg}");
        return 2;
    }
    let result = match &cli.output {
        Some(path) => File::create(path).map_err(Failure::Io).and_then(|f| {
            let mut w = BufWriter::new(f);
            dispatch(&cli, &mut w)?;
            w.flush()?;
            Ok(())
        }),
        None => dispatch(&cli, out),
    };
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
        Err(Failure::Numeric(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
        Err(Failure::Verify(n)) => {
            let _ = writeln!(err, "{n} check(s) failed");
            1
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got {v:?}"))?;
    // A pool may already exist when `run` is called repeatedly in-process.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Pulls `--config PATH` out of `argv` and splices the file's keys in as
/// flags right after the subcommand name.
fn expand_config(argv: Vec<OsString>) -> Result<Vec<OsString>, String> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut path = None;
    let mut it = argv.into_iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            path = Some(it.next().ok_or("--config needs a path")?);
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(OsString::from(p));
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| format!("cannot read config {}: {e}", path.to_string_lossy()))?;
    let flags = config_flags(&text)?;
    let sub = rest
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .map(|i| i + 2)
        .ok_or("--config given without a subcommand")?;
    rest.splice(sub..sub, flags.into_iter().map(OsString::from));
    Ok(rest)
}

fn config_flags(text: &str) -> Result<Vec<String>, String> {
    let v: Value = serde_json::from_str(text).map_err(|e| format!("config is not valid JSON: {e}"))?;
    let Value::Object(map) = v else {
        return Err("config must be a JSON object".into());
    };
    let mut flags = Vec::new();
    for (k, v) in map {
        let name = k.trim_start_matches('-').replace('_', "-");
        match v {
            Value::Bool(true) => flags.push(format!("--{name}")),
            Value::Bool(false) | Value::Null => {}
            Value::Number(n) => flags.push(format!("--{name}={n}")),
            Value::String(s) => flags.push(format!("--{name}={s}")),
            _ => return Err(format!("config key {k:?}: expected a number, string or bool")),
        }
    }
    Ok(flags)
}

fn meta(cli: &Cli, line: String) -> Option<String> {
    (!cli.no_meta).then(|| format!("ptbubble {}\n{line}", env!("CARGO_PKG_VERSION")))
}

fn linspace(lo: f64, hi: f64, n: usize, what: &str) -> Result<Vec<f64>, Failure> {
    if n < 2 || !(lo < hi) {
        return Err(Failure::Usage(format!("{what}: need min < max and at least 2 steps")));
    }
    Ok(uniform_grid(lo, hi, n))
}

fn write_json(out: &mut dyn Write, v: &Value) -> Result<(), Failure> {
    serde_json::to_writer_pretty(&mut *out, v).map_err(io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<(), Failure> {
    match &cli.command {
        Command::Spectrum {
            model,
            eta_min,
            eta_max,
            steps,
        } => {
            let p = model.params(0.0, 0.0)?;
            let etas = linspace(*eta_min, *eta_max, *steps, "spectrum")?;
            let pts = spectrum_scan(&p, &etas)?;
            let m = meta(cli, format!("spectrum {} eta=[{eta_min},{eta_max}] steps={steps}", model.describe()));
            csv::write_spectrum(out, &pts, m.as_deref())?;
        }
        Command::Bubble {
            delta_y,
            gamma_min,
            gamma_max,
            steps,
        } => {
            let p = ModelParams::stationary(0.0, 0.0, *delta_y, *gamma_max)?;
            let gammas = linspace(*gamma_min, *gamma_max, *steps, "bubble")?;
            let rows = bubble_size_scan(&p, &gammas)?;
            let m = meta(cli, format!("bubble delta_y={delta_y} gamma=[{gamma_min},{gamma_max}] steps={steps}"));
            csv::write_bubble_scan(out, &rows, m.as_deref())?;
        }
        Command::Evolve {
            model,
            alpha,
            t0,
            t1,
            steps,
            a_re,
            a_im,
            b_re,
            b_im,
            normalize_loss,
        } => {
            let p = model.params(0.0, *alpha)?;
            let grid = linspace(*t0, *t1, *steps, "evolve")?;
            let init = TwoLevelState::new(Complex64::new(*a_re, *a_im), Complex64::new(*b_re, *b_im), *t0);
            if init.norm() == 0.0 {
                return Err(Failure::Usage("initial state (A, B) = (0, 0)".into()));
            }
            let mut tr = propagate(&p, &EtaSchedule::linear(*alpha), &init, &grid)?;
            if *normalize_loss {
                tr = loss_normalization(&tr, p.gamma);
            }
            let m = meta(
                cli,
                format!(
                    "evolve {} alpha={alpha} t=[{t0},{t1}] steps={steps} A=({a_re},{a_im}) B=({b_re},{b_im}) normalize_loss={normalize_loss}",
                    model.describe()
                ),
            );
            csv::write_trajectory(out, &tr, m.as_deref())?;
        }
        Command::Cyclic {
            model,
            angles,
            tf,
            samples,
            normalize_loss,
        } => {
            let p = model.params(0.0, 0.0)?;
            let (theta, phi) = (angles.theta(), angles.phi());
            let mut tr = cyclic_experiment_with(&p, theta, phi, *tf, *samples)?;
            if *normalize_loss {
                tr = loss_normalization(&tr, p.gamma);
            }
            let m = meta(
                cli,
                format!(
                    "cyclic {} tf={tf} theta={theta} phi={phi} samples={samples} normalize_loss={normalize_loss}",
                    model.describe()
                ),
            );
            csv::write_trajectory(out, &tr, m.as_deref())?;
        }
        Command::ScanTheta {
            model,
            phi,
            tf,
            theta_min,
            theta_max,
            steps,
        } => {
            let p = model.params(0.0, 0.0)?;
            let thetas = linspace(*theta_min, *theta_max, *steps, "scan-theta")?;
            let rows = initial_state_scan(&p, &thetas, *phi, *tf)?;
            let m = meta(
                cli,
                format!("scan-theta {} phi={phi} tf={tf} theta=[{theta_min},{theta_max}] steps={steps}", model.describe()),
            );
            csv::write_theta_scan(out, &rows, m.as_deref())?;
        }
        Command::Ratio { model, alpha } => {
            let p = model.params(0.0, *alpha)?;
            let amplitude = match predicted_ratio(&p) {
                Ok(r) => Some(r),
                Err(Error::NotApplicable(_) | Error::NoExceptionalPoint(_)) => None,
                Err(e) => return Err(e.into()),
            };
            let reg = regime(&p)?;
            write_json(
                out,
                &json!({
                    "amplitude_ratio": amplitude,
                    "probability_ratio": amplitude.map(|r| r * r),
                    "gamma_tilde_sq": GammaTilde::of(&p)?.value_sq,
                    "regime": reg.label,
                    "product": reg.product,
                    "marginal": reg.marginal,
                }),
            )?;
        }
        Command::Perturb {
            eta,
            delta_x,
            delta_y,
            lambda,
        } => {
            let p0 = ModelParams::stationary(*eta, *delta_x, *delta_y, 0.0)?;
            let s = PerturbationSetup::new(build_hamiltonian(&p0, *eta)?, Mat2::sigma_x(), *lambda)?;
            let exact = s.exact_eigenvalues();
            let v = match perturbative_corrections(&s) {
                Ok(r) => json!({ "corrections": r, "second_order": r.second_order(), "exact": exact }),
                Err(Error::NotApplicable(_)) => {
                    json!({ "degenerate_block": degenerate_block(&s)?, "exact": exact })
                }
                Err(e) => return Err(e.into()),
            };
            write_json(out, &v)?;
        }
        Command::Verify { seed } => {
            let rep = verify::run_all(*seed);
            for c in &rep.checks {
                let tag = if c.passed { "PASS" } else { "FAIL" };
                writeln!(out, "{tag} [{}] {}: {}", c.suite, c.name, c.detail)?;
            }
            writeln!(out, "{} passed, {} failed", rep.passed(), rep.failed())?;
            if !rep.all_passed() {
                return Err(Failure::Verify(rep.failed()));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("ptbubble").chain(args.iter().copied());
        let code = run_with(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn config_flags_from_json() {
        let f = config_flags(r#"{"gamma": 0.3, "no_meta": true, "theta-pi": 0.25, "x": false}"#).unwrap();
        assert_eq!(f, ["--gamma=0.3", "--no-meta", "--theta-pi=0.25"]);
        assert!(config_flags("[1]").is_err());
        assert!(config_flags(r#"{"gamma": [1]}"#).is_err());
    }

    #[test]
    fn ratio_json() {
        let (code, out, _) = run_capture(&["ratio", "--gamma", "0.2", "--delta-y", "0.15"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        let r = v["amplitude_ratio"].as_f64().unwrap();
        assert!((r - (1.0f64 / 7.0).sqrt()).abs() < 1e-12);
        assert!((v["probability_ratio"].as_f64().unwrap() - 1.0 / 7.0).abs() < 1e-12);
        assert_eq!(v["regime"], "ratio-converges-rp");
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_capture(&["nonsense"]).0, 2);
        assert_eq!(run_capture(&["ratio", "--bogus", "1"]).0, 2);
        assert_eq!(run_capture(&["spectrum", "--steps", "1"]).0, 2);
    }

    #[test]
    fn numerical_errors_exit_1() {
        let (code, _, err) = run_capture(&["ratio", "--alpha", "0"]);
        assert_eq!(code, 1);
        assert!(err.contains("error"));
    }

    #[test]
    fn negative_values_accepted() {
        let (code, out, _) = run_capture(&["spectrum", "--no-meta", "--eta-min", "-0.5", "--eta-max", "0.5", "--steps", "3"]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 4);
        assert!(out.lines().nth(1).unwrap().starts_with("-5.0000000000000000e-1,"));
    }

    #[test]
    fn later_flags_override_earlier() {
        let (_, a, _) = run_capture(&["ratio", "--gamma", "0.1", "--gamma", "0.2", "--delta-y", "0.15"]);
        let (_, b, _) = run_capture(&["ratio", "--gamma", "0.2", "--delta-y", "0.15"]);
        assert_eq!(a, b);
    }

    #[test]
    fn meta_header_toggle() {
        let (_, with, _) = run_capture(&["bubble", "--steps", "2"]);
        let (_, without, _) = run_capture(&["bubble", "--steps", "2", "--no-meta"]);
        assert!(with.starts_with("# ptbubble"));
        assert!(without.starts_with("gamma,diameter"));
    }
}
