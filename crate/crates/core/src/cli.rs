//! The `exobasis` command line.
//!
//! Sets travel between subcommands as JSON on stdin/stdout. Exit codes: 0 on
//! success or a valid finding, 1 on an invalid, degenerate or failed finding,
//! 2 on bad input.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::admissibility::{check_certificate, search_certificate, AdmissibilityCertificate, CheckOutcome};
use crate::basis::{
    build_offsets, build_offsets_indexed, riesz_bounds, BoundsKind, BoundsReport, ExponentialSystem, Offset,
};
use crate::completion::{complete_to_tile, plan_completion};
use crate::eigen::{gram_rows, hermitian_eigen_range};
use crate::error::Error;
use crate::gallery::{self, KroneckerParams};
use crate::io::{self, fmt_point, fmt_region, fmt_sig, AdditionDoc, BoundsDoc, CertificateDoc, OffsetDoc, ViolationsDoc};
use crate::lattice::{DualVector, Lattice};
use crate::multitile::{fiber_partition, FiberPartition, MultiTileSet};
use crate::oracle::{
    frame_inequality_trial, gram_section, poly_norm_direct, poly_norm_fiber, window_box, PolySpec,
    QuadratureConfig,
};
use crate::rational;

#[derive(Parser, Debug)]
#[command(name = "exobasis", version, about = "Multi-tiling, admissibility and exponential Riesz bases")]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Emit a generated set as JSON.
    Gallery(GalleryArgs),
    /// Print the multiplicity histogram and tiling level of a set.
    CheckTile(Input),
    /// Export the fiber partition of a set as JSON.
    Partition(Input),
    /// Check or search (n, v) admissibility certificates.
    Admissible {
        #[command(subcommand)]
        command: AdmissibleCommand,
    },
    /// Build the exponential system and report its exact bounds.
    BuildBasis(BuildArgs),
    /// Complete an admissible subtile to a tile.
    Complete(CompleteArgs),
    /// Cross-check the bounds numerically.
    Verify {
        #[command(subcommand)]
        command: VerifyCommand,
    },
}

#[derive(Args, Debug)]
struct Input {
    /// Set JSON file; stdin when omitted or `-`.
    input: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CertArgs {
    #[arg(long)]
    n: u64,
    /// Integer coordinates `w` of `v = (Mᵀ)⁻¹w`, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    v: Vec<i64>,
}

#[derive(Args, Debug)]
struct SystemArgs {
    #[arg(long, conflicts_with = "free")]
    n: Option<u64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "free")]
    v: Vec<i64>,
    /// Consecutive offsets `s = 0..k-1`.
    #[arg(long, conflicts_with_all = ["s", "free"])]
    k: Option<usize>,
    /// Explicit offset indices `s_j`, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "free")]
    s: Vec<i64>,
    /// A free real offset vector, comma separated; repeat once per offset.
    #[arg(long, allow_hyphen_values = true)]
    free: Vec<String>,
}

#[derive(Args, Debug)]
struct QuadArgs {
    /// Quadrature cells per unit axis.
    #[arg(long, default_value_t = 256)]
    m: usize,
}

#[derive(Subcommand, Debug)]
enum AdmissibleCommand {
    /// Check a given certificate.
    Check {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        cert: CertArgs,
    },
    /// Search certificates with n ≤ n-max and max-norm of w ≤ v-height.
    Search {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 10)]
        n_max: u64,
        #[arg(long, default_value_t = 10)]
        v_height: u64,
    },
}

#[derive(Args, Debug)]
struct BuildArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    system: SystemArgs,
    /// Also write the per-class bounds as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CompleteArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    cert: CertArgs,
    #[arg(long)]
    k: usize,
    /// Print the planned additions instead of the completed set.
    #[arg(long)]
    dry_run: bool,
}

#[derive(Subcommand, Debug)]
enum VerifyCommand {
    /// Direct quadrature of ‖P‖² against the fiber formula.
    Parseval {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Coefficients live on `‖h‖_∞ ≤ radius`.
        #[arg(long, default_value_t = 2)]
        radius: i64,
        #[command(flatten)]
        quad: QuadArgs,
        #[arg(long, default_value_t = 1e-6)]
        rel_tol: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Rayleigh quotients of random polynomials against [A, B].
    Rayleigh {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        system: SystemArgs,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        radius: i64,
        #[arg(long, default_value_t = 1024)]
        m: usize,
        /// Tolerance relative to B.
        #[arg(long, default_value_t = 1e-6)]
        rel_tol: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Eigenvalues of a finite Gram section against [|D|A, |D|B].
    Gram {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        system: SystemArgs,
        /// Window `j < k`, `‖h‖_∞ ≤ radius`.
        #[arg(long, default_value_t = 1)]
        radius: i64,
        #[arg(long, default_value_t = 512)]
        m: usize,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
    },
    /// Bounds of the completed Kronecker set against the eigen range of R R*.
    Kronecker {
        #[arg(long = "J", default_value_t = 10)]
        j: usize,
        #[command(flatten)]
        params: KroneckerArgs,
    },
}

#[derive(Args, Debug)]
struct KroneckerArgs {
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [std::f64::consts::SQRT_2, 3f64.sqrt()])]
    a: Vec<f64>,
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [0.25, 0.75])]
    beta: Vec<f64>,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 1_000_000)]
    m_max: u64,
}

impl KroneckerArgs {
    fn params(&self) -> Result<KroneckerParams, Failure> {
        let pair = |v: &[f64], name: &str| -> Result<[f64; 2], Failure> {
            <[f64; 2]>::try_from(v).map_err(|_| Failure::Input(format!("--{name} needs two values")))
        };
        if self.eps.is_nan() || self.eps <= 0.0 {
            return Err(Failure::Input("--eps must be positive".into()));
        }
        Ok(KroneckerParams {
            a: pair(&self.a, "a")?,
            beta: pair(&self.beta, "beta")?,
            eps: self.eps,
            m_max: self.m_max,
        })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum GalleryName {
    #[value(name = "example_2_10")]
    Example210,
    #[value(name = "example_2_11")]
    Example211,
    #[value(name = "kronecker")]
    Kronecker,
    #[value(name = "kronecker_completed")]
    KroneckerCompleted,
    #[value(name = "box")]
    Box,
}

#[derive(Args, Debug)]
struct GalleryArgs {
    name: GalleryName,
    /// Truncation level.
    #[arg(long = "J", default_value_t = 10)]
    j: usize,
    /// Multiplicity of the box tile.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Dimension of the box tile (integer lattice).
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[command(flatten)]
    kronecker: KroneckerArgs,
}

enum Failure {
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type CmdResult = Result<i32, Failure>;

struct Ctx<'a> {
    json: bool,
    stdin: &'a mut dyn Read,
    out: String,
    err: String,
}

impl Ctx<'_> {
    fn read_text(&mut self, input: &Input) -> Result<String, Failure> {
        match input.input.as_deref() {
            Some(p) if p.as_os_str() != "-" => std::fs::read_to_string(p)
                .map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
            _ => {
                let mut s = String::new();
                self.stdin
                    .read_to_string(&mut s)
                    .map_err(|e| Failure::Input(format!("stdin: {e}")))?;
                Ok(s)
            }
        }
    }

    fn read_set(&mut self, input: &Input) -> Result<MultiTileSet, Failure> {
        let text = self.read_text(input)?;
        io::read_set(&text).map_err(|e| {
            let name = input
                .input
                .as_ref()
                .map_or("<stdin>".to_string(), |p| p.display().to_string());
            Failure::Input(format!("{name}: {e}"))
        })
    }

    fn emit_json<T: Serialize>(&mut self, value: &T) {
        self.out.push_str(&io::to_json_string(value));
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.out.push_str(s.as_ref());
        self.out.push('\n');
    }
}

fn write_file(path: &PathBuf, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code. Output is buffered and written only at the end, so partial results
/// never reach `stdout` on failure.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return e.exit_code();
        }
    };
    let mut ctx = Ctx {
        json: cli.json,
        stdin,
        out: String::new(),
        err: String::new(),
    };
    let code = match dispatch(cli.command, &mut ctx) {
        Ok(code) => code,
        Err(Failure::Input(msg)) => {
            ctx.out.clear();
            let _ = writeln!(ctx.err, "error: {msg}");
            2
        }
    };
    let _ = stdout.write_all(ctx.out.as_bytes());
    let _ = stderr.write_all(ctx.err.as_bytes());
    let _ = stdout.flush();
    code
}

fn dispatch(cmd: Command, ctx: &mut Ctx) -> CmdResult {
    match cmd {
        Command::Gallery(args) => cmd_gallery(&args, ctx),
        Command::CheckTile(input) => cmd_check_tile(&input, ctx),
        Command::Partition(input) => {
            let omega = ctx.read_set(&input)?;
            let p = fiber_partition(&omega)?;
            ctx.out.push_str(&io::write_partition(&p));
            Ok(0)
        }
        Command::Admissible { command } => match command {
            AdmissibleCommand::Check { input, cert } => cmd_admissible_check(&input, &cert, ctx),
            AdmissibleCommand::Search {
                input,
                n_max,
                v_height,
            } => cmd_admissible_search(&input, n_max, v_height, ctx),
        },
        Command::BuildBasis(args) => cmd_build_basis(&args, ctx),
        Command::Complete(args) => cmd_complete(&args, ctx),
        Command::Verify { command } => match command {
            VerifyCommand::Parseval {
                input,
                system,
                seed,
                trials,
                radius,
                quad,
                rel_tol,
                csv,
            } => cmd_verify_parseval(&input, &system, seed, trials, radius, quad.m, rel_tol, csv.as_ref(), ctx),
            VerifyCommand::Rayleigh {
                input,
                system,
                seed,
                trials,
                radius,
                m,
                rel_tol,
                csv,
            } => cmd_verify_rayleigh(&input, &system, seed, trials, radius, m, rel_tol, csv.as_ref(), ctx),
            VerifyCommand::Gram {
                input,
                system,
                radius,
                m,
                tol,
            } => cmd_verify_gram(&input, &system, radius, m, tol, ctx),
            VerifyCommand::Kronecker { j, params } => cmd_verify_kronecker(j, &params, ctx),
        },
    }
}

fn certificate(args: &CertArgs) -> Result<AdmissibilityCertificate, Failure> {
    Ok(AdmissibilityCertificate::new(args.n, DualVector(args.v.clone()))?)
}

fn system(args: &SystemArgs, lattice: &Lattice) -> Result<ExponentialSystem, Failure> {
    if !args.free.is_empty() {
        let offsets = args
            .free
            .iter()
            .map(|s| {
                s.split(',')
                    .map(|x| {
                        x.trim()
                            .parse::<f64>()
                            .ok()
                            .filter(|x| x.is_finite())
                            .ok_or_else(|| Failure::Input(format!("--free: not a number: {x:?}")))
                    })
                    .collect::<Result<Vec<f64>, Failure>>()
                    .and_then(|a| {
                        if a.len() == lattice.dim() {
                            Ok(Offset::Free(a))
                        } else {
                            Err(Error::DimensionMismatch {
                                expected: lattice.dim(),
                                found: a.len(),
                            }
                            .into())
                        }
                    })
            })
            .collect::<Result<Vec<_>, Failure>>()?;
        return Ok(ExponentialSystem::new(lattice.clone(), offsets)?);
    }
    let n = args
        .n
        .ok_or_else(|| Failure::Input("give --n, --v and --k (or --s), or --free offsets".into()))?;
    if args.v.is_empty() {
        return Err(Failure::Input("--v is required with --n".into()));
    }
    let c = AdmissibilityCertificate::new(n, DualVector(args.v.clone()))?;
    match (args.k, args.s.is_empty()) {
        (Some(k), true) => Ok(build_offsets(lattice, &c, k)?),
        (None, false) => Ok(build_offsets_indexed(lattice, &c, &args.s)?),
        _ => Err(Failure::Input("give exactly one of --k and --s".into())),
    }
}

fn cmd_gallery(args: &GalleryArgs, ctx: &mut Ctx) -> CmdResult {
    let set = match args.name {
        GalleryName::Example210 => gallery::example_2_10(args.j)?,
        GalleryName::Example211 => gallery::example_2_11(args.j)?,
        GalleryName::Kronecker => gallery::example_kronecker(args.j, &args.kronecker.params()?)?.set,
        GalleryName::KroneckerCompleted => {
            gallery::example_kronecker_completed(args.j, &args.kronecker.params()?)?.set
        }
        GalleryName::Box => {
            if args.k == 0 || args.dim == 0 {
                return Err(Failure::Input("--k and --dim must be at least 1".into()));
            }
            gallery::box_k_tile(args.k, &Lattice::integer(args.dim))?
        }
    };
    ctx.out.push_str(&io::write_set(&set));
    Ok(0)
}

#[derive(Serialize)]
struct HistogramEntry {
    multiplicity: usize,
    measure: String,
}

#[derive(Serialize)]
struct TileReport {
    schema: &'static str,
    pieces: usize,
    measure: String,
    histogram: Vec<HistogramEntry>,
    level: String,
}

fn cmd_check_tile(input: &Input, ctx: &mut Ctx) -> CmdResult {
    let omega = ctx.read_set(input)?;
    let p = fiber_partition(&omega)?;
    let report = TileReport {
        schema: io::SCHEMA,
        pieces: omega.pieces().len(),
        measure: rational::format(&omega.measure()),
        histogram: p
            .multiplicity_histogram()
            .into_iter()
            .map(|(multiplicity, m)| HistogramEntry {
                multiplicity,
                measure: rational::format(&m),
            })
            .collect(),
        level: p.tiling_level().to_string(),
    };
    if ctx.json {
        ctx.emit_json(&report);
    } else {
        ctx.line(format!("pieces {}", report.pieces));
        ctx.line(format!("measure {}", report.measure));
        for h in &report.histogram {
            ctx.line(format!("multiplicity {}: {}", h.multiplicity, h.measure));
        }
        ctx.line(format!("level {}", report.level));
    }
    Ok(0)
}

fn cmd_admissible_check(input: &Input, cert: &CertArgs, ctx: &mut Ctx) -> CmdResult {
    let omega = ctx.read_set(input)?;
    let c = certificate(cert)?;
    let p = fiber_partition(&omega)?;
    match check_certificate(&p, &c)? {
        CheckOutcome::Valid => {
            if ctx.json {
                ctx.emit_json(&CertificateDoc::from_certificate(&c));
            } else {
                ctx.line(format!("Valid n={} v={}", c.n(), fmt_point(&c.v().0)));
            }
            Ok(0)
        }
        CheckOutcome::Invalid(vs) => {
            if ctx.json {
                ctx.emit_json(&ViolationsDoc::from_violations(&vs));
            } else {
                ctx.line(format!("Invalid: {} violation(s)", vs.len()));
                for v in &vs {
                    ctx.line(format!(
                        "  residue {}: {} and {} on {}",
                        v.residue,
                        fmt_point(&v.points.0 .0),
                        fmt_point(&v.points.1 .0),
                        fmt_region(&v.class_region)
                    ));
                }
            }
            Ok(1)
        }
    }
}

#[derive(Serialize)]
struct NoneFound {
    none_within_bounds: bool,
    n_max: u64,
    v_height: u64,
}

fn cmd_admissible_search(input: &Input, n_max: u64, v_height: u64, ctx: &mut Ctx) -> CmdResult {
    let omega = ctx.read_set(input)?;
    let p = fiber_partition(&omega)?;
    match search_certificate(&p, n_max, v_height)? {
        Some(c) => {
            if ctx.json {
                ctx.emit_json(&CertificateDoc::from_certificate(&c));
            } else {
                ctx.line(format!("found n={} v={}", c.n(), fmt_point(&c.v().0)));
            }
            Ok(0)
        }
        None => {
            if ctx.json {
                ctx.emit_json(&NoneFound {
                    none_within_bounds: true,
                    n_max,
                    v_height,
                });
            } else {
                ctx.line(format!("none within bounds (n_max={n_max}, v_height={v_height})"));
            }
            Ok(1)
        }
    }
}

#[derive(Serialize)]
struct BasisReport {
    schema: &'static str,
    offsets: Vec<OffsetDoc>,
    composite_warning: bool,
    #[serde(flatten)]
    bounds: BoundsDoc,
}

fn fmt_vec(v: &[f64]) -> String {
    let inner: Vec<String> = v.iter().map(|x| fmt_sig(*x)).collect();
    format!("({})", inner.join(", "))
}

fn print_bounds(r: &BoundsReport, ctx: &mut Ctx) {
    for (i, c) in r.per_class.iter().enumerate() {
        let pts: Vec<String> = c.points.iter().map(|z| fmt_point(&z.0)).collect();
        let residues = c.residues.as_ref().map_or(String::new(), |rs| {
            let rs: Vec<String> = rs.iter().map(u64::to_string).collect();
            format!(" residues={{{}}}", rs.join(", "))
        });
        ctx.line(format!(
            "class {i}: R={{{}}}{residues} eig_min={} eig_max={}",
            pts.join(", "),
            fmt_sig(c.eig_min),
            fmt_sig(c.eig_max)
        ));
    }
    ctx.line(format!("A {}", fmt_sig(r.a)));
    ctx.line(format!("B {}", fmt_sig(r.b)));
    ctx.line(format!("A_L2 {}", fmt_sig(r.a_l2)));
    ctx.line(format!("B_L2 {}", fmt_sig(r.b_l2)));
    ctx.line(format!("kind {}", r.kind));
}

fn cmd_build_basis(args: &BuildArgs, ctx: &mut Ctx) -> CmdResult {
    let omega = ctx.read_set(&args.input)?;
    let sys = system(&args.system, omega.lattice())?;
    let p = fiber_partition(&omega)?;
    let report = riesz_bounds(&p, &sys)?;
    if let Some(path) = &args.csv {
        write_file(path, &io::bounds_csv(&report))?;
    }
    if sys.composite_warning {
        ctx.err
            .push_str("warning: composite n with non-consecutive offsets; invertibility is not automatic\n");
    }
    if ctx.json {
        ctx.emit_json(&BasisReport {
            schema: io::SCHEMA,
            offsets: io::offset_docs(&sys),
            composite_warning: sys.composite_warning,
            bounds: BoundsDoc::from_report(&report),
        });
    } else {
        for (j, off) in sys.offsets().iter().enumerate() {
            let a = fmt_vec(&sys.offset_vector(j));
            match off {
                Offset::Structured { s, n, v } => {
                    ctx.line(format!("offset {j}: s={s} n={n} w={} a={a}", fmt_point(&v.0)))
                }
                Offset::Free(_) => ctx.line(format!("offset {j}: a={a}")),
            }
        }
        print_bounds(&report, ctx);
    }
    Ok(if report.kind == BoundsKind::Degenerate { 1 } else { 0 })
}

#[derive(Serialize)]
struct AdditionsReport {
    additions: Vec<AdditionDoc>,
}

fn cmd_complete(args: &CompleteArgs, ctx: &mut Ctx) -> CmdResult {
    let omega = ctx.read_set(&args.input)?;
    let c = certificate(&args.cert)?;
    let p = fiber_partition(&omega)?;
    if !check_certificate(&p, &c)?.is_valid() {
        ctx.err.push_str("certificate is not valid on the input set\n");
        return Ok(1);
    }
    if args.dry_run {
        let plan = plan_completion(&p, &c, args.k)?;
        if ctx.json {
            ctx.emit_json(&AdditionsReport {
                additions: plan.iter().map(|a| AdditionDoc::from_addition(a, &p)).collect(),
            });
        } else {
            if plan.is_empty() {
                ctx.line("nothing to add");
            }
            for a in &plan {
                let (label, region) = match a.class_index {
                    Some(i) => (format!("class {i}"), &p.classes[i].region),
                    None => ("uncovered".to_string(), &p.uncovered),
                };
                ctx.line(format!(
                    "{label} {}: + {} residue {}",
                    fmt_region(region),
                    fmt_point(&a.point.0),
                    a.residue
                ));
            }
        }
        return Ok(0);
    }
    let delta = complete_to_tile(&p, &c, args.k)?;
    ctx.out.push_str(&io::write_set(&delta));
    Ok(0)
}

fn partition_and_system(
    input: &Input,
    args: &SystemArgs,
    ctx: &mut Ctx,
) -> Result<(MultiTileSet, FiberPartition, ExponentialSystem), Failure> {
    let omega = ctx.read_set(input)?;
    let sys = system(args, omega.lattice())?;
    let p = fiber_partition(&omega)?;
    Ok((omega, p, sys))
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

#[derive(Serialize)]
struct ParsevalReport {
    trials: usize,
    m: usize,
    rel_tol: f64,
    max_rel_diff: f64,
    direct: Vec<f64>,
    fiber: Vec<f64>,
    pass: bool,
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify_parseval(
    input: &Input,
    args: &SystemArgs,
    seed: u64,
    trials: usize,
    radius: i64,
    m: usize,
    rel_tol: f64,
    csv: Option<&PathBuf>,
    ctx: &mut Ctx,
) -> CmdResult {
    use rand::SeedableRng;
    let (omega, p, sys) = partition_and_system(input, args, ctx)?;
    let q = QuadratureConfig::midpoint(m)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let polys: Vec<PolySpec> = (0..trials)
        .map(|_| PolySpec::random(sys.k(), omega.lattice().dim(), radius.max(0), &mut rng))
        .collect();
    let mut rows = Vec::with_capacity(trials);
    for poly in &polys {
        rows.push((
            poly_norm_direct(&omega, &sys, poly, &q)?,
            poly_norm_fiber(&p, &sys, poly, &q)?,
        ));
    }
    let max_rel_diff = rows
        .iter()
        .map(|(d, f)| (d - f).abs() / d.abs())
        .fold(0.0, f64::max);
    let pass = max_rel_diff <= rel_tol;
    if let Some(path) = csv {
        write_file(path, &io::parseval_csv(&rows))?;
    }
    if ctx.json {
        ctx.emit_json(&ParsevalReport {
            trials,
            m,
            rel_tol,
            max_rel_diff,
            direct: rows.iter().map(|r| r.0).collect(),
            fiber: rows.iter().map(|r| r.1).collect(),
            pass,
        });
    } else {
        ctx.line(format!("trials {trials} m {m}"));
        ctx.line(format!("max_rel_diff {}", fmt_sig(max_rel_diff)));
        ctx.line(format!("rel_tol {}", fmt_sig(rel_tol)));
        ctx.line(verdict(pass));
    }
    Ok(if pass { 0 } else { 1 })
}

#[derive(Serialize)]
struct RayleighReport {
    trials: usize,
    m: usize,
    min: f64,
    max: f64,
    lower: f64,
    upper: f64,
    tol: f64,
    kind: String,
    quotients: Vec<f64>,
    pass: bool,
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify_rayleigh(
    input: &Input,
    args: &SystemArgs,
    seed: u64,
    trials: usize,
    radius: i64,
    m: usize,
    rel_tol: f64,
    csv: Option<&PathBuf>,
    ctx: &mut Ctx,
) -> CmdResult {
    let (_, p, sys) = partition_and_system(input, args, ctx)?;
    let q = QuadratureConfig::midpoint(m)?;
    let report = riesz_bounds(&p, &sys)?;
    let s = frame_inequality_trial(&p, &sys, &report, trials, seed, radius.max(0), &q)?.with_rel_tol(rel_tol);
    if let Some(path) = csv {
        write_file(path, &io::trials_csv(&s.quotients, s.lower, s.upper))?;
    }
    if ctx.json {
        ctx.emit_json(&RayleighReport {
            trials,
            m,
            min: s.min,
            max: s.max,
            lower: s.lower,
            upper: s.upper,
            tol: s.tol,
            kind: report.kind.to_string(),
            quotients: s.quotients.clone(),
            pass: s.pass,
        });
    } else {
        ctx.line(format!("trials {trials} m {m} kind {}", report.kind));
        ctx.line(format!("observed [{}, {}]", fmt_sig(s.min), fmt_sig(s.max)));
        ctx.line(format!("bounds [{}, {}] tol {}", fmt_sig(s.lower), fmt_sig(s.upper), fmt_sig(s.tol)));
        ctx.line(verdict(s.pass));
    }
    Ok(if s.pass { 0 } else { 1 })
}

#[derive(Serialize)]
struct GramReport {
    window: usize,
    m: usize,
    eig_min: f64,
    eig_max: f64,
    lower: f64,
    upper: f64,
    tol: f64,
    pass: bool,
}

fn cmd_verify_gram(input: &Input, args: &SystemArgs, radius: i64, m: usize, tol: f64, ctx: &mut Ctx) -> CmdResult {
    let (omega, p, sys) = partition_and_system(input, args, ctx)?;
    let q = QuadratureConfig::midpoint(m)?;
    let report = riesz_bounds(&p, &sys)?;
    let window = window_box(sys.k(), omega.lattice().dim(), radius.max(0));
    let (eig_min, eig_max) = gram_section(&omega, &sys, &window, &q)?;
    let det = omega.lattice().det_abs_f64();
    let lower = if report.kind == BoundsKind::RieszBounds {
        det * report.a
    } else {
        0.0
    };
    let upper = det * report.b;
    let pass = eig_min >= lower - tol && eig_max <= upper + tol;
    if ctx.json {
        ctx.emit_json(&GramReport {
            window: window.len(),
            m,
            eig_min,
            eig_max,
            lower,
            upper,
            tol,
            pass,
        });
    } else {
        ctx.line(format!("window {} m {m}", window.len()));
        ctx.line(format!("section [{}, {}]", fmt_sig(eig_min), fmt_sig(eig_max)));
        ctx.line(format!("bounds [{}, {}] tol {}", fmt_sig(lower), fmt_sig(upper), fmt_sig(tol)));
        ctx.line(verdict(pass));
    }
    Ok(if pass { 0 } else { 1 })
}

#[derive(Serialize)]
struct KroneckerReport {
    multipliers: Vec<i64>,
    #[serde(rename = "A")]
    a: f64,
    #[serde(rename = "B")]
    b: f64,
    target_min: f64,
    target_max: f64,
    tol: f64,
    pass: bool,
}

fn cmd_verify_kronecker(j: usize, args: &KroneckerArgs, ctx: &mut Ctx) -> CmdResult {
    let params = args.params()?;
    let built = match gallery::example_kronecker_completed(j, &params) {
        Ok(b) => b,
        Err(e @ Error::KroneckerSearchFailed(_)) => {
            ctx.err.push_str(&format!("{e}\n"));
            return Ok(1);
        }
        Err(e) => return Err(e.into()),
    };
    let lattice = built.set.lattice().clone();
    let sys = ExponentialSystem::new(
        lattice,
        params.a.iter().map(|&a| Offset::Free(vec![a])).collect(),
    )?;
    let report = riesz_bounds(&fiber_partition(&built.set)?, &sys)?;
    let r = vec![
        vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)],
        params
            .beta
            .iter()
            .map(|b| Complex64::from_polar(1.0, std::f64::consts::TAU * b))
            .collect(),
    ];
    let (target_min, target_max) = hermitian_eigen_range(&gram_rows(&r))?;
    let tol = 3.0 * params.eps * std::f64::consts::SQRT_2;
    let pass = (report.a - target_min).abs() <= tol && (report.b - target_max).abs() <= tol;
    if ctx.json {
        ctx.emit_json(&KroneckerReport {
            multipliers: built.multipliers,
            a: report.a,
            b: report.b,
            target_min,
            target_max,
            tol,
            pass,
        });
    } else {
        let ms: Vec<String> = built.multipliers.iter().map(i64::to_string).collect();
        ctx.line(format!("multipliers {}", ms.join(" ")));
        ctx.line(format!("bounds [{}, {}]", fmt_sig(report.a), fmt_sig(report.b)));
        ctx.line(format!("target [{}, {}] tol {}", fmt_sig(target_min), fmt_sig(target_max), fmt_sig(tol)));
        ctx.line(verdict(pass));
    }
    Ok(if pass { 0 } else { 1 })
}
