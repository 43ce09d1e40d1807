//! Command-line front end: `forward`, `inverse` and `verify`.
//!
//! Exit codes: 0 success, 1 verification failure, 2 malformed input or
//! arguments, 3 numerical failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::error::LoewnerError;
use crate::forward::{compute_trace, flow_composed, flow_ode, DrivingFunction, Interpolation};
use crate::halfplane::{SlitPolyline, Speed};
use crate::io::{read_drive_csv, read_trace_json, write_drive_csv, write_trace_json, FormatError, TraceFile};
use crate::plot::{drive_svg, trace_svg};
use crate::verify::{self, VerifyConfig};
use crate::zipper::{refine_polyline, unzip};

pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "loewner", version, about = "Chordal Loewner evolution in the upper half-plane")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InterpArg {
    Linear,
    Constant,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Driving function CSV to slit trace JSON.
    Forward {
        drive: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, default_value_t = 4096)]
        steps: usize,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        speed: u8,
        #[arg(long, value_enum, default_value_t = InterpArg::Linear)]
        interp: InterpArg,
        /// Local error tolerance of the ODE probe.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Write times as tau = T - t, listed root first.
        #[arg(long)]
        reverse_time: bool,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Slit trace JSON to driving function CSV.
    Inverse {
        trace: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0.01)]
        max_height: f64,
        /// Write times as tau = T - t.
        #[arg(long)]
        reverse_time: bool,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Randomized invariant suite; prints a table of maximal residuals.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        cases: usize,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<LoewnerError> for Failure {
    fn from(e: LoewnerError) -> Self {
        let code = if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_INPUT };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Domain(d) => d.into(),
            other => Failure {
                code: EXIT_INPUT,
                message: other.to_string(),
            },
        }
    }
}

fn input_error(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: format!("{}: {e}", path.display()),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(|e| Failure {
        code: EXIT_INPUT,
        message: format!("cannot write {}: {e}", path.display()),
    })
}

fn write_svg(path: &Path, body: &str) -> Result<(), Failure> {
    let mut w = create(path)?;
    w.write_all(body.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| input_error(path, e))
}

/// Parses `args` (including the program name) and runs the command, writing
/// reports to `stdout`. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command, stdout) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn execute(cmd: Command, stdout: &mut dyn Write) -> Result<i32, Failure> {
    match cmd {
        Command::Forward {
            drive,
            out,
            steps,
            speed,
            interp,
            tol,
            reverse_time,
            svg,
        } => forward(&drive, &out, steps, speed, interp, tol, reverse_time, svg.as_deref(), stdout),
        Command::Inverse {
            trace,
            out,
            max_height,
            reverse_time,
            svg,
        } => inverse(&trace, &out, max_height, reverse_time, svg.as_deref(), stdout),
        Command::Verify {
            seed,
            cases,
            tol,
            inject_fault,
        } => verify_cmd(seed, cases, tol, inject_fault, stdout),
    }
}

fn report(stdout: &mut dyn Write, text: &str) -> Result<(), Failure> {
    stdout.write_all(text.as_bytes()).map_err(|e| Failure {
        code: EXIT_INPUT,
        message: format!("stdout: {e}"),
    })
}

#[allow(clippy::too_many_arguments)]
fn forward(
    drive_path: &Path,
    out: &Path,
    steps: usize,
    speed: u8,
    interp: InterpArg,
    tol: f64,
    reverse_time: bool,
    svg: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<i32, Failure> {
    if steps == 0 {
        return Err(LoewnerError::InvalidArgument("--steps must be >= 1".into()).into());
    }
    let file = File::open(drive_path).map_err(|e| input_error(drive_path, e))?;
    let rows = read_drive_csv(BufReader::new(file))?;
    let interp = match interp {
        InterpArg::Linear => Interpolation::PiecewiseLinear,
        InterpArg::Constant => Interpolation::PiecewiseConstant,
    };
    let speed = Speed::from_factor(f64::from(speed))?;
    let drive = DrivingFunction::new(rows, interp, speed)?;
    let trace = compute_trace(&drive, steps)?;

    // cross-check the composed maps against the ODE above the slit
    let total = drive.total_time();
    let composed = flow_composed(&drive, 0.0, total, steps)?;
    let top = trace.points().map(|p| p.im).fold(0.0, f64::max);
    let mid = trace.points().map(|p| p.re).sum::<f64>() / trace.samples.len() as f64;
    let mut probe = 0.0f64;
    for k in 1..=3 {
        let z = Complex64::new(mid, (1.0 + top) * k as f64);
        let ode = flow_ode(&drive, 0.0, total, z, tol)?;
        probe = probe.max((ode - composed.apply(z)).norm());
    }

    let mut doc = TraceFile::from_trace(&trace);
    if reverse_time {
        doc.reverse_time();
    }
    let mut w = create(out)?;
    write_trace_json(&mut w, &doc)?;
    w.flush().map_err(|e| input_error(out, e))?;
    if let Some(path) = svg {
        let pts: Vec<(f64, f64)> = trace.points().map(|p| (p.re, p.im)).collect();
        write_svg(path, &trace_svg(&pts))?;
    }
    report(
        stdout,
        &format!(
            "forward: {} trace points, T = {}, speed {}, ode/composed probe difference {:.3e}\n",
            doc.points.len(),
            total,
            speed.factor(),
            probe
        ),
    )?;
    Ok(0)
}

fn inverse(
    trace_path: &Path,
    out: &Path,
    max_height: f64,
    reverse_time: bool,
    svg: Option<&Path>,
    stdout: &mut dyn Write,
) -> Result<i32, Failure> {
    let file = File::open(trace_path).map_err(|e| input_error(trace_path, e))?;
    let doc = read_trace_json(BufReader::new(file))?;
    let speed = doc.speed()?;
    let mut pts = doc.half_plane_points();
    // accept files written root first
    if pts.len() >= 2 && pts[0].im == 0.0 && pts[pts.len() - 1].im != 0.0 {
        pts.reverse();
    }
    let slit = SlitPolyline::new(pts)?;
    let refined = refine_polyline(&slit, max_height)?;
    let (drive, param) = unzip(&refined, speed)?;
    let total = param.total_capacity;
    let mut rows: Vec<(f64, f64)> = drive.samples().collect();
    if reverse_time {
        rows.reverse();
        for r in &mut rows {
            r.0 = total - r.0;
        }
    }
    let mut w = create(out)?;
    write_drive_csv(&mut w, rows.iter().copied())?;
    w.flush().map_err(|e| input_error(out, e))?;
    if let Some(path) = svg {
        write_svg(path, &drive_svg(&rows))?;
    }
    report(
        stdout,
        &format!(
            "inverse: {} zipper steps, T = {}, speed {}\n",
            refined.len() - 1,
            total,
            speed.factor()
        ),
    )?;
    Ok(0)
}

fn verify_cmd(
    seed: u64,
    cases: usize,
    tol: f64,
    inject_fault: bool,
    stdout: &mut dyn Write,
) -> Result<i32, Failure> {
    if cases == 0 {
        return Err(LoewnerError::InvalidArgument("--cases must be >= 1".into()).into());
    }
    let cfg = VerifyConfig {
        seed,
        cases,
        tol,
        inject_fault,
        ..VerifyConfig::default()
    };
    let rep = verify::run(&cfg)?;
    report(stdout, &rep.render())?;
    Ok(if rep.passes() { 0 } else { EXIT_VIOLATION })
}
