//! Command-line front end.

use std::fs::{self, OpenOptions};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::{center_dimension, GroupFunction};
use crate::cocycle::{bilinear_cocycle, coboundary_test, normalize_cocycle, Cocycle};
use crate::error::{Error, Result};
use crate::group::{build_group, validate_group, FiniteGroup, GroupFile, GroupKind, IDENTITY};
use crate::io;
use crate::norms::{
    amenability_report, cb_multiplier_norm, fourier_stieltjes_norm, littlewood_t2_norm,
};
use crate::optim::gamma2::{Gamma2Options, MAX_DIM};
use crate::optim::t2::T2Options;
use crate::smith::gcd;

pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_UNSUPPORTED: u8 = 4;
pub const EXIT_SOLVER: u8 = 5;
pub const EXIT_GAP: u8 = 6;

/// Exit code for an error.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Csv(_) => EXIT_IO,
        Error::UnsupportedSize(_) => EXIT_UNSUPPORTED,
        Error::SolverFailure(_) => EXIT_SOLVER,
        _ => EXIT_VALIDATION,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "twista",
    version,
    about = "Twisted group algebras of finite groups"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build or validate Cayley tables.
    #[command(subcommand)]
    Group(GroupCmd),
    /// Validate, normalize, construct and compare 2-cocycles.
    #[command(subcommand)]
    Cocycle(CocycleCmd),
    /// Norm computations with certificates.
    #[command(subcommand)]
    Norm(NormCmd),
    /// Batch reports.
    #[command(subcommand)]
    Report(ReportCmd),
    /// Worked examples.
    #[command(subcommand)]
    Demo(DemoCmd),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Kind {
    Cyclic,
    Product,
    Dihedral,
    Symmetric,
}

#[derive(Debug, Subcommand)]
pub enum GroupCmd {
    Build {
        #[arg(long, value_enum)]
        kind: Kind,
        /// Parameter of cyclic, dihedral and symmetric groups.
        #[arg(long)]
        n: Option<usize>,
        /// Orders of the cyclic factors of a product, e.g. `3,3`.
        #[arg(long, value_delimiter = ',')]
        factors: Vec<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    Validate {
        #[arg(long = "in")]
        input: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum CocycleCmd {
    Validate {
        #[arg(long = "in")]
        input: String,
        #[arg(long)]
        group: Option<PathBuf>,
    },
    Normalize {
        #[arg(long = "in")]
        input: String,
        #[arg(long)]
        group: Option<PathBuf>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Where to write the coboundary witness.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    Bilinear {
        #[arg(long)]
        group: PathBuf,
        /// Row-major integer matrix, one row and column per cyclic factor.
        #[arg(long = "A", value_delimiter = ',', allow_negative_numbers = true)]
        a: Vec<i64>,
        #[arg(long)]
        m: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    Compare {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        group: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct PhiArgs {
    #[arg(long)]
    phi: PathBuf,
    /// Group for function files without one and for `trivial` cocycles.
    #[arg(long)]
    group: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum NormCmd {
    Fourier {
        #[command(flatten)]
        common: PhiArgs,
        #[arg(long, default_value = "trivial")]
        sigma: String,
    },
    Multiplier {
        #[command(flatten)]
        common: PhiArgs,
        #[arg(long, default_value = "trivial")]
        sigma1: String,
        #[arg(long, default_value = "trivial")]
        sigma2: String,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    Littlewood {
        #[command(flatten)]
        common: PhiArgs,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 200_000)]
        max_iter: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum ReportCmd {
    Amenability {
        #[arg(long)]
        group: Option<PathBuf>,
        #[arg(long, default_value = "trivial")]
        sigma: String,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum DemoCmd {
    QuantumTorus {
        #[arg(long)]
        q: usize,
        #[arg(long)]
        p: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

pub fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(exit_code(&e));
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("TWISTA_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Error::InvalidArgument(format!("TWISTA_THREADS={v} is not a positive integer"))
    })?;
    // fails only if a pool already exists, which is harmless
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
    Ok(())
}

pub fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Group(c) => cmd_group(c),
        Command::Cocycle(c) => cmd_cocycle(c),
        Command::Norm(c) => cmd_norm(c),
        Command::Report(c) => cmd_report(c),
        Command::Demo(c) => cmd_demo(c),
    }
}

/// Fails early when `path` cannot be written.
fn check_writable(path: Option<&Path>) -> Result<()> {
    if let Some(p) = path {
        let existed = p.exists();
        OpenOptions::new()
            .create(true)
            .append(true)
            .open(p)
            .map_err(io::with_path(p))?;
        if !existed {
            fs::remove_file(p).map_err(io::with_path(p))?;
        }
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )))
    }
}

fn emit<T: Serialize>(output: Option<&Path>, value: &T) -> Result<()> {
    match output {
        Some(p) => io::write_json(p, value),
        None => {
            println!("{}", serde_json::to_string_pretty(value)?);
            Ok(())
        }
    }
}

fn load_group_opt(p: Option<&PathBuf>) -> Result<Option<Arc<FiniteGroup>>> {
    p.map(|p| io::load_group(p)).transpose()
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn cmd_group(c: GroupCmd) -> Result<u8> {
    match c {
        GroupCmd::Build {
            kind,
            n,
            factors,
            output,
        } => {
            check_writable(output.as_deref())?;
            let need_n = || n.ok_or_else(|| Error::InvalidArgument("--n is required".into()));
            let g = match kind {
                Kind::Cyclic => build_group(GroupKind::Cyclic(need_n()?))?,
                Kind::Dihedral => build_group(GroupKind::Dihedral(need_n()?))?,
                Kind::Symmetric => build_group(GroupKind::Symmetric(need_n()?))?,
                Kind::Product => {
                    if factors.is_empty() {
                        return Err(Error::InvalidArgument(
                            "--factors is required for a product".into(),
                        ));
                    }
                    let mut acc = Arc::new(build_group(GroupKind::Cyclic(factors[0]))?);
                    for &q in &factors[1..] {
                        let next = Arc::new(build_group(GroupKind::Cyclic(q))?);
                        acc = Arc::new(build_group(GroupKind::Product(acc, next))?);
                    }
                    Arc::try_unwrap(acc).unwrap_or_else(|a| (*a).clone())
                }
            };
            emit(output.as_deref(), &GroupFile::from(&g))?;
            eprintln!("group of order {}", g.order());
            Ok(0)
        }
        GroupCmd::Validate { input } => {
            let file: GroupFile =
                serde_json::from_str(&fs::read_to_string(&input).map_err(io::with_path(&input))?)?;
            let report = validate_group(&file.mul);
            if !report.is_ok() {
                println!("{}", serde_json::to_string_pretty(&report)?);
                return Ok(EXIT_VALIDATION);
            }
            let g = FiniteGroup::try_from(file)?;
            println!("valid group of order {}", g.order());
            Ok(0)
        }
    }
}

fn cmd_cocycle(c: CocycleCmd) -> Result<u8> {
    match c {
        CocycleCmd::Validate { input, group } => {
            let g = load_group_opt(group.as_ref())?;
            let sigma = io::load_cocycle(&input, g.as_ref())?;
            println!(
                "valid 2-cocycle: order {}, m = {}, normalized = {}",
                sigma.group().order(),
                sigma.root_order(),
                sigma.is_normalized()
            );
            Ok(0)
        }
        CocycleCmd::Normalize {
            input,
            group,
            output,
            witness,
        } => {
            check_writable(output.as_deref())?;
            check_writable(witness.as_deref())?;
            let g = load_group_opt(group.as_ref())?;
            let tau = io::load_cocycle(&input, g.as_ref())?;
            let (sigma, xi) = normalize_cocycle(&tau);
            emit(output.as_deref(), &io::cocycle_file(&sigma))?;
            if let Some(w) = witness {
                io::write_json(&w, &io::witness_file(&xi))?;
            }
            eprintln!("normalized: sigma(s, s^-1) = 1 for all s");
            Ok(0)
        }
        CocycleCmd::Bilinear {
            group,
            a,
            m,
            output,
        } => {
            check_writable(output.as_deref())?;
            let g = io::load_group(&group)?;
            let k = g
                .cyclic_factors()
                .map(<[usize]>::len)
                .ok_or(Error::NotCyclicProduct)?;
            if a.len() != k * k {
                return Err(Error::DimensionMismatch {
                    expected: k * k,
                    found: a.len(),
                });
            }
            let rows: Vec<Vec<i64>> = a.chunks(k.max(1)).map(<[i64]>::to_vec).collect();
            let sigma = bilinear_cocycle(g, &rows, m)?;
            emit(output.as_deref(), &io::cocycle_file(&sigma))?;
            Ok(0)
        }
        CocycleCmd::Compare { a, b, group } => {
            let g = load_group_opt(group.as_ref())?;
            let (sa, sb) = if a == "trivial" {
                let sb = io::load_cocycle(&b, g.as_ref())?;
                (io::load_cocycle(&a, Some(sb.group()))?, sb)
            } else {
                let sa = io::load_cocycle(&a, g.as_ref())?;
                let sb = io::load_cocycle(&b, Some(sa.group()))?;
                (sa, sb)
            };
            match coboundary_test(&sa, &sb)? {
                Some(xi) => println!(
                    "similar via ξ={:?} (m = {})",
                    xi.exponents(),
                    xi.root_order()
                ),
                None => println!("not similar"),
            }
            Ok(0)
        }
    }
}

fn load_phi(common: &PhiArgs) -> Result<GroupFunction> {
    let g = load_group_opt(common.group.as_ref())?;
    io::load_function(&common.phi, g.as_ref())
}

fn cmd_norm(c: NormCmd) -> Result<u8> {
    match c {
        NormCmd::Fourier { common, sigma } => {
            check_writable(common.output.as_deref())?;
            let phi = load_phi(&common)?;
            let sigma = io::load_cocycle(&sigma, Some(phi.group()))?;
            let start = Instant::now();
            let cert = fourier_stieltjes_norm(&phi, &sigma)?;
            let file = io::FourierFile::new(&cert, ms(start));
            emit(common.output.as_deref(), &file)?;
            eprintln!("B norm = {:.12} ({})", cert.value, file.label);
            Ok(0)
        }
        NormCmd::Multiplier {
            common,
            sigma1,
            sigma2,
            tol,
        } => {
            check_tol(tol)?;
            check_writable(common.output.as_deref())?;
            let phi = load_phi(&common)?;
            let s1 = io::load_cocycle(&sigma1, Some(phi.group()))?;
            let s2 = io::load_cocycle(&sigma2, Some(phi.group()))?;
            let start = Instant::now();
            let opts = Gamma2Options {
                tol,
                ..Gamma2Options::default()
            };
            match cb_multiplier_norm(&phi, &s1, &s2, opts) {
                Ok(cert) => {
                    emit(
                        common.output.as_deref(),
                        &io::MultiplierFile::new(&cert, ms(start)),
                    )?;
                    eprintln!("cb norm = {:.12} (gap {:.2e})", cert.value, cert.gap);
                    Ok(0)
                }
                Err(e @ Error::SolverFailure(_)) => {
                    emit(
                        common.output.as_deref(),
                        &io::MultiplierFile::failed("cb-multiplier", &e, ms(start)),
                    )?;
                    Err(e)
                }
                Err(e) => Err(e),
            }
        }
        NormCmd::Littlewood {
            common,
            tol,
            max_iter,
        } => {
            check_tol(tol)?;
            check_writable(common.output.as_deref())?;
            let phi = load_phi(&common)?;
            let start = Instant::now();
            let cert = littlewood_t2_norm(&phi, T2Options { tol, max_iter })?;
            emit(
                common.output.as_deref(),
                &io::LittlewoodFile::new(&cert, ms(start)),
            )?;
            eprintln!("t2 norm = {:.12} (gap {:.2e})", cert.value, cert.gap);
            if cert.budget_exhausted {
                eprintln!("warning: iteration budget exhausted before the gap reached {tol:e}");
            }
            Ok(0)
        }
    }
}

fn cmd_report(c: ReportCmd) -> Result<u8> {
    let ReportCmd::Amenability {
        group,
        sigma,
        samples,
        seed,
        tol,
        format,
        output,
    } = c;
    check_tol(tol)?;
    check_writable(output.as_deref())?;
    let g = load_group_opt(group.as_ref())?;
    let sigma = io::load_cocycle(&sigma, g.as_ref())?;
    let order = sigma.group().order();
    if samples > 0 && order > MAX_DIM {
        return Err(Error::UnsupportedSize(format!(
            "group order {order} exceeds the SDP cap of {MAX_DIM}"
        )));
    }
    let report = amenability_report(&sigma, samples, seed, tol);
    match (format, output.as_deref()) {
        (Format::Json, out) => emit(out, &report)?,
        (Format::Csv, Some(p)) => {
            io::write_report_csv(fs::File::create(p).map_err(io::with_path(p))?, &report)?
        }
        (Format::Csv, None) => io::write_report_csv(std::io::stdout().lock(), &report)?,
    }
    eprintln!(
        "{} samples, max relative gap {:.3e} (threshold {:.0e})",
        report.samples.len(),
        report.max_rel_gap,
        report.threshold
    );
    if !report.failures.is_empty() {
        for f in &report.failures {
            eprintln!("sample {} failed: {}", f.sample_id, f.error);
        }
        return Ok(EXIT_SOLVER);
    }
    Ok(if report.passes() { 0 } else { EXIT_GAP })
}

#[derive(Debug, Serialize)]
struct TorusReport {
    q: usize,
    p: usize,
    gcd: usize,
    algebra_dimension: usize,
    center_dimension: usize,
    matrix_algebra: bool,
    samples: Vec<TorusSample>,
}

#[derive(Debug, Serialize)]
struct TorusSample {
    function: String,
    b_norm: f64,
    cb_norm: f64,
}

/// `Z_q^2` with `sigma(x, y) = exp(2 pi i p x1 y2 / q)`.
pub fn quantum_torus(q: usize, p: usize) -> Result<Cocycle> {
    if q < 2 || p >= q {
        return Err(Error::InvalidArgument(format!(
            "need q >= 2 and 0 <= p < q, got q={q}, p={p}"
        )));
    }
    let z = Arc::new(build_group(GroupKind::Cyclic(q))?);
    let g = Arc::new(build_group(GroupKind::Product(z.clone(), z))?);
    bilinear_cocycle(g, &[vec![0, p as i64], vec![0, 0]], q as u32)
}

fn cmd_demo(c: DemoCmd) -> Result<u8> {
    let DemoCmd::QuantumTorus { q, p, output } = c;
    check_writable(output.as_deref())?;
    let sigma = quantum_torus(q, p)?;
    let g = sigma.group().clone();
    let d = gcd(p as i64, q as i64) as usize;
    let center = center_dimension(&sigma);
    println!("Z_{q} x Z_{q} with sigma(x, y) = exp(2 pi i {p} x1 y2 / {q})");
    println!("algebra dimension {}", g.order());
    println!("center dimension {center}");
    let matrix_algebra = d == 1;
    if matrix_algebra {
        if center != 1 {
            eprintln!("error: gcd(p, q) = 1 but the center has dimension {center}");
            return Ok(EXIT_GAP);
        }
        println!("algebra ≅ M_{q}");
    }

    let coord = |c: [usize; 2]| {
        g.from_coords(&c)
            .ok_or_else(|| Error::InvalidArgument("torus coordinates out of range".into()))
    };
    let (u, v) = (coord([1, 0])?, coord([0, 1])?);
    let one = Complex64::new(1.0, 0.0);
    let trivial = Cocycle::trivial(g.clone());
    let mut samples = Vec::new();
    for (name, phi) in [
        (
            "delta_e + delta_u".to_string(),
            GroupFunction::from_fn(g.clone(), |s| {
                if s == IDENTITY || s == u {
                    one
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
        ),
        (
            "delta_u + i delta_v".to_string(),
            GroupFunction::from_fn(g.clone(), |s| {
                if s == u {
                    one
                } else if s == v {
                    Complex64::new(0.0, 1.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
        ),
    ] {
        let b = fourier_stieltjes_norm(&phi, &sigma)?.value;
        let m = cb_multiplier_norm(&phi, &trivial, &sigma, Gamma2Options::default())?.value;
        println!("{name}: B norm {b:.9}, cb multiplier norm {m:.9}");
        samples.push(TorusSample {
            function: name,
            b_norm: b,
            cb_norm: m,
        });
    }
    if let Some(p_out) = output.as_deref() {
        let report = TorusReport {
            q,
            p,
            gcd: d,
            algebra_dimension: g.order(),
            center_dimension: center,
            matrix_algebra,
            samples,
        };
        io::write_json(p_out, &report)?;
    }
    Ok(0)
}
