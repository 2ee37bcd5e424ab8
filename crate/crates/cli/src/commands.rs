//! Subcommand implementations. Each returns `Ok(())` or a [`CliError`]
//! carrying the process exit status; matrices go to `out`, diagnostics to
//! `err`.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use ginv::classical::{core_ep, dmp, drazin, group_inverse, m_weak_group, m_weak_group_mp};
use ginv::linalg::{frobenius, identity, moore_penrose, rel_diff, zeros};
use ginv::solvers::{
    cramer_solve_with, equation_residual, general_solution, solve_constrained_wg,
    solve_constrained_wmwgmp, CramerOptions, CramerRhs,
};
use ginv::testgen::{generate_pair, PairSpec};
use ginv::weighted::{w_core_ep, w_drazin, w_m_weak_group};
use ginv::wmwgmp::verify_defining_system;
use ginv::{wmwgmp, wmwgmp_route, ComplexMatrix, GinvError, RouteId, ToleranceConfig, WeightedPair};

use crate::check::{run_check, CheckArgs};
use crate::matfile::{self, MatFileError, FULL_PRECISION};

pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;
pub const EXIT_CAPACITY: i32 = 5;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(EXIT_USAGE, message)
    }
}

impl From<GinvError> for CliError {
    fn from(e: GinvError) -> Self {
        let code = match e {
            GinvError::InvalidInput(_) | GinvError::Shape { .. } | GinvError::Parameter(_) => {
                EXIT_USAGE
            }
            GinvError::Capacity { .. } => EXIT_CAPACITY,
            // numerical rank misjudgments surface as domain failures
            GinvError::Domain(_)
            | GinvError::Index { .. }
            | GinvError::Geometry(_)
            | GinvError::Decomposition { .. }
            | GinvError::Bordering(_) => EXIT_DOMAIN,
        };
        Self::new(code, e.to_string())
    }
}

impl From<MatFileError> for CliError {
    fn from(e: MatFileError) -> Self {
        Self::usage(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::usage(format!("i/o error: {e}"))
    }
}

pub type CliResult = Result<(), CliError>;

/// Tolerance flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct TolArgs {
    /// Relative comparison tolerance [env: GINV_TOL]
    #[arg(long, env = "GINV_TOL")]
    pub tol: Option<f64>,
    /// Relative rank cut-off (default 16·max(rows, cols)·eps)
    #[arg(long)]
    pub rank_tol: Option<f64>,
}

impl TolArgs {
    pub fn config(&self) -> Result<ToleranceConfig, CliError> {
        let cmp = self.tol.unwrap_or(ginv::tolerance::DEFAULT_CMP_REL_TOL);
        Ok(ToleranceConfig::new(self.rank_tol, cmp)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InverseKind {
    Mp,
    Drazin,
    Group,
    CoreEp,
    Dmp,
    Mwg,
    Mwgmp,
    WDrazin,
    WCoreEp,
    WMwg,
    WMwgmp,
}

impl InverseKind {
    fn takes_m(self) -> bool {
        matches!(self, Self::Mwg | Self::Mwgmp | Self::WMwg | Self::WMwgmp)
    }

    fn weighted(self) -> bool {
        matches!(self, Self::WDrazin | Self::WCoreEp | Self::WMwg | Self::WMwgmp)
    }
}

#[derive(Debug, Clone, Args)]
pub struct InverseArgs {
    /// Matrix file holding A
    #[arg(long = "A", value_name = "PATH")]
    pub a: PathBuf,
    /// Weight file W (default: identity, which needs square A)
    #[arg(long = "W", value_name = "PATH")]
    pub w: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub kind: InverseKind,
    /// Power parameter of the m-weak group family
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// Representation used for w-mwgmp / mwgmp
    #[arg(long, value_parser = parse_route)]
    pub route: Option<RouteId>,
    /// Recompute through the definition and check the result
    #[arg(long)]
    pub verify: bool,
    /// Significant digits in the output (1..=17)
    #[arg(long, default_value_t = FULL_PRECISION, value_parser = parse_precision)]
    pub precision: usize,
    #[command(flatten)]
    pub tol: TolArgs,
}

fn parse_precision(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(d) if (1..=FULL_PRECISION).contains(&d) => Ok(d),
        _ => Err(format!("expected an integer in 1..={FULL_PRECISION}")),
    }
}

fn parse_route(s: &str) -> Result<RouteId, String> {
    s.parse::<RouteId>().map_err(|e| e.to_string())
}

fn load_pair(
    a_path: &Path,
    w_path: Option<&Path>,
    tol: ToleranceConfig,
) -> Result<WeightedPair, CliError> {
    let a = matfile::read(a_path)?;
    let w = match w_path {
        Some(p) => matfile::read(p)?,
        None => {
            if a.nrows() != a.ncols() {
                return Err(CliError::usage(format!(
                    "A is {}x{}; the default identity weight needs a square A (pass --W)",
                    a.nrows(),
                    a.ncols()
                )));
            }
            identity(a.nrows())
        }
    };
    Ok(WeightedPair::new(a, w, tol)?)
}

fn emit(out: &mut dyn Write, m: &ComplexMatrix, digits: usize) -> CliResult {
    out.write_all(matfile::write(m, digits).as_bytes())?;
    Ok(())
}

pub fn cmd_inverse(args: &InverseArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let tol = args.tol.config()?;
    if args.route.is_some() && !matches!(args.kind, InverseKind::Mwgmp | InverseKind::WMwgmp) {
        return Err(CliError::usage("--route applies only to --kind mwgmp and w-mwgmp"));
    }
    if args.m != 1 && !args.kind.takes_m() {
        writeln!(err, "note: --m is ignored for this kind")?;
    }
    if args.w.is_some() && !args.kind.weighted() {
        writeln!(err, "note: --W is ignored for unweighted kinds")?;
    }
    let a = matfile::read(&args.a)?;
    let x = match args.kind {
        InverseKind::Mp => moore_penrose(&a, &tol)?,
        InverseKind::Drazin => drazin(&a, &tol)?.inverse,
        InverseKind::Group => group_inverse(&a, &tol)?.inverse,
        InverseKind::CoreEp => core_ep(&a, &tol)?.inverse,
        InverseKind::Dmp => dmp(&a, &tol)?.inverse,
        InverseKind::Mwg => m_weak_group(&a, args.m, &tol)?.inverse,
        InverseKind::Mwgmp if args.route.is_none() => m_weak_group_mp(&a, args.m, &tol)?.inverse,
        InverseKind::Mwgmp | InverseKind::WMwgmp => {
            let w = if args.kind == InverseKind::Mwgmp { None } else { args.w.as_deref() };
            let pair = load_pair(&args.a, w, tol)?;
            let route = args.route.unwrap_or(RouteId::Def);
            let x = wmwgmp_route(&pair, args.m, route)?.inverse;
            if args.verify {
                verify_wmwgmp(&pair, args.m, route, &x, &tol, err)?;
            }
            return emit(out, &x, args.precision);
        }
        InverseKind::WDrazin | InverseKind::WCoreEp | InverseKind::WMwg => {
            let pair = load_pair(&args.a, args.w.as_deref(), tol)?;
            let x = match args.kind {
                InverseKind::WDrazin => w_drazin(&pair),
                InverseKind::WCoreEp => w_core_ep(&pair),
                _ => w_m_weak_group(&pair, args.m)?,
            };
            if args.verify {
                // all three are outer inverses of W A W
                let waw = pair.w() * pair.a() * pair.w();
                check_close("X (WAW) X = X", &(&x * &waw * &x), &x, &tol, err)?;
            }
            return emit(out, &x, args.precision);
        }
    };
    if args.verify {
        check_close("X A X = X", &(&x * &a * &x), &x, &tol, err)?;
    }
    emit(out, &x, args.precision)
}

fn check_close(
    what: &str,
    lhs: &ComplexMatrix,
    rhs: &ComplexMatrix,
    tol: &ToleranceConfig,
    err: &mut dyn Write,
) -> CliResult {
    let d = rel_diff(lhs, rhs);
    writeln!(err, "verify: {what}: relative residual {d:.3e}")?;
    if d > tol.cmp_rel_tol {
        return Err(CliError::new(
            EXIT_VERIFY,
            format!("verification failed: {what} residual {d:.3e} exceeds {:.1e}", tol.cmp_rel_tol),
        ));
    }
    Ok(())
}

fn verify_wmwgmp(
    pair: &WeightedPair,
    m: usize,
    route: RouteId,
    x: &ComplexMatrix,
    tol: &ToleranceConfig,
    err: &mut dyn Write,
) -> CliResult {
    let def = wmwgmp(pair, m)?.inverse;
    check_close(&format!("{route} vs DEF"), x, &def, tol, err)?;
    let report = verify_defining_system(pair, m, x, tol)?;
    writeln!(
        err,
        "verify: defining system residuals {:.3e}, {:.3e}",
        report.fixed_point_residual, report.ax_residual
    )?;
    if !report.holds() {
        return Err(CliError::new(
            EXIT_VERIFY,
            "verification failed: result does not solve the defining system",
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Problem {
    /// min ‖(WA)^{m+1} W X − (WA)^m B‖ over R(X) ⊆ R((AW)^k); B is n×p
    MinWg,
    /// min ‖(WA)^{m+1}(X − A^† B)‖ over R(X) ⊆ R((WA)^k); B is q×p
    MinWmwgmp,
    /// ((WA)^k)^*(WA)^{m+1} X = ((WA)^k)^*(WA)^{m+1} A^† B; B is q×p
    Equation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RhsVariant {
    Proof,
    Statement,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[arg(long = "A", value_name = "PATH")]
    pub a: PathBuf,
    #[arg(long = "W", value_name = "PATH")]
    pub w: Option<PathBuf>,
    #[arg(long = "B", value_name = "PATH")]
    pub b: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, value_enum)]
    pub problem: Problem,
    /// Free parameter of the general solution (default zero)
    #[arg(long = "Z", value_name = "PATH")]
    pub z: Option<PathBuf>,
    /// Solve through the bordered Cramer's rule
    #[arg(long)]
    pub cramer: bool,
    /// Right-hand side of the bordered system
    #[arg(long, value_enum, default_value_t = RhsVariant::Proof)]
    pub cramer_rhs: RhsVariant,
    /// Append objective and constraint residuals as comment lines
    #[arg(long)]
    pub report: bool,
    #[arg(long, default_value_t = FULL_PRECISION, value_parser = parse_precision)]
    pub precision: usize,
    #[command(flatten)]
    pub tol: TolArgs,
}

pub fn cmd_solve(args: &SolveArgs, out: &mut dyn Write, _err: &mut dyn Write) -> CliResult {
    let tol = args.tol.config()?;
    let pair = load_pair(&args.a, args.w.as_deref(), tol)?;
    let b = matfile::read(&args.b)?;
    if args.cramer && args.problem == Problem::MinWg {
        return Err(CliError::usage("--cramer applies to min-wmwgmp and equation only"));
    }
    if args.z.is_some() && args.problem != Problem::Equation {
        return Err(CliError::usage("--Z applies to --problem equation only"));
    }
    if args.cramer && args.z.is_some() {
        return Err(CliError::usage(
            "--cramer yields the constrained (Z = 0) solution; drop --Z",
        ));
    }
    let cramer = || {
        let opts = CramerOptions {
            rhs: match args.cramer_rhs {
                RhsVariant::Proof => CramerRhs::Proof,
                RhsVariant::Statement => CramerRhs::Statement,
            },
            ..CramerOptions::default()
        };
        cramer_solve_with(&pair, args.m, &b, opts)
    };
    let mut report = Vec::new();
    let x = match args.problem {
        Problem::MinWg => {
            let r = solve_constrained_wg(&pair, args.m, &b)?;
            report.push(("objective", r.residual_frobenius));
            report.push(("constraint_residual", r.constraint_residual));
            r.x
        }
        Problem::MinWmwgmp => {
            let x = if args.cramer {
                cramer()?
            } else {
                solve_constrained_wmwgmp(&pair, args.m, &b)?.x
            };
            report.push((
                "objective",
                ginv::solvers::objective_wmwgmp(&pair, args.m, &b, &x)?,
            ));
            let basis = pair.wa_k_range();
            report.push((
                "constraint_residual",
                frobenius(&(&x - &basis * (basis.adjoint() * &x))),
            ));
            x
        }
        Problem::Equation => {
            let x = if args.cramer {
                cramer()?
            } else {
                let z = match &args.z {
                    Some(p) => matfile::read(p)?,
                    None => zeros(pair.n(), b.ncols()),
                };
                general_solution(&pair, args.m, &b, &z)?
            };
            report.push(("equation_residual", equation_residual(&pair, args.m, &b, &x)?));
            x
        }
    };
    emit(out, &x, args.precision)?;
    if args.report {
        for (name, v) in report {
            writeln!(out, "# {name} {v:.6e}")?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[arg(long)]
    pub q: usize,
    #[arg(long)]
    pub n: usize,
    /// Core size rank((WA)^k)
    #[arg(long)]
    pub t: usize,
    /// Index k = max(Ind(AW), Ind(WA))
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory receiving A.mat and W.mat
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,
}

pub fn cmd_generate(args: &GenerateArgs, _out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    let g = generate_pair(&PairSpec::new(args.q, args.n, args.t, args.k, args.seed))?;
    std::fs::create_dir_all(&args.out_dir)?;
    matfile::write_file(&args.out_dir.join("A.mat"), g.pair.a())?;
    matfile::write_file(&args.out_dir.join("W.mat"), g.pair.w())?;
    writeln!(
        err,
        "wrote A.mat ({}x{}) and W.mat to {} (k = {}, t = {})",
        args.q,
        args.n,
        args.out_dir.display(),
        g.pair.k(),
        g.pair.core_size()
    )?;
    Ok(())
}

pub fn cmd_check(args: &CheckArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    run_check(args, out, err)
}
