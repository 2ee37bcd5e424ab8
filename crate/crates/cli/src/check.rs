//! `ginv check`: randomized self-test over generated pairs.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Args;
use ginv::linalg::{moore_penrose, rank_of, rel_diff};
use ginv::solvers::{
    bordering_identity_residual, build_bordering_e, cramer_solve, solve_constrained_wmwgmp,
    CRAMER_MAX_SIZE,
};
use ginv::testgen::{generate_pair, PairSpec};
use ginv::weighted::w_drazin;
use ginv::wmwgmp::verify_defining_system;
use ginv::{wmwgmp, wmwgmp_route, GinvError, RouteId, ToleranceConfig, WeightedPair};

use crate::commands::{CliError, CliResult, EXIT_CHECK_FAILED};
use crate::matfile;

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    /// Number of random pairs
    #[arg(long, default_value_t = 20)]
    pub seeds: usize,
    /// Largest q and n
    #[arg(long, default_value_t = 8)]
    pub max_size: usize,
    /// Largest index k
    #[arg(long, default_value_t = 3)]
    pub k_max: usize,
    /// Base seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// One tolerance for every property (default: per-property values)
    #[arg(long)]
    pub tol: Option<f64>,
    /// Where to write the inputs of the first failure
    #[arg(long, value_name = "DIR", default_value = "ginv-check-failure")]
    pub repro_dir: PathBuf,
}

#[derive(Debug, Clone, Copy)]
struct Property {
    name: &'static str,
    tol: f64,
}

const PROPERTIES: [Property; 8] = [
    Property { name: "routes-agree", tol: 1e-6 },
    Property { name: "outer-inverse", tol: 1e-10 },
    Property { name: "rank", tol: 0.0 },
    Property { name: "projectors", tol: 1e-9 },
    Property { name: "defining-system", tol: 0.0 },
    Property { name: "large-m-collapse", tol: 1e-8 },
    Property { name: "bordering", tol: 1e-8 },
    Property { name: "cramer", tol: 1e-6 },
];

/// Residual of one property; `Ok(None)` when it does not apply.
fn evaluate(
    prop: &str,
    p: &WeightedPair,
    m: usize,
    tol: &ToleranceConfig,
) -> Result<Option<f64>, GinvError> {
    let x = wmwgmp(p, m)?.inverse;
    let r = match prop {
        "routes-agree" => {
            let mut worst = 0.0f64;
            for route in RouteId::ALL {
                worst = worst.max(rel_diff(&wmwgmp_route(p, m, route)?.inverse, &x));
            }
            worst
        }
        "outer-inverse" => rel_diff(&(&x * p.a() * &x), &x),
        // reported as the absolute rank defect
        "rank" => rank_of(&x, tol)?.abs_diff(p.core_size()) as f64,
        "projectors" => {
            let right = p.a() * &x;
            let left = &x * p.a();
            rel_diff(&(&right * &right), &right).max(rel_diff(&(&left * &left), &left))
        }
        "defining-system" => {
            if verify_defining_system(p, m, &x, tol)?.holds() {
                0.0
            } else {
                1.0
            }
        }
        "large-m-collapse" => {
            let dmp = p.w() * w_drazin(p) * p.w() * p.a() * moore_penrose(p.a(), tol)?;
            rel_diff(&wmwgmp(p, p.k() + m)?.inverse, &dmp)
        }
        "bordering" => {
            let data = build_bordering_e(p, m, tol)?;
            bordering_identity_residual(p, m, &data)?
        }
        "cramer" => {
            if p.n() > CRAMER_MAX_SIZE {
                return Ok(None);
            }
            let b = p.a().columns(0, 1).into_owned();
            let direct = solve_constrained_wmwgmp(p, m, &b)?.x;
            let cr = cramer_solve(p, m, &b)?;
            (&cr - &direct).camax() / direct.camax().max(1.0)
        }
        _ => unreachable!("unknown property {prop}"),
    };
    Ok(Some(r))
}

fn write_bundle(
    dir: &Path,
    p: &WeightedPair,
    info: &str,
) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)?;
    matfile::write_file(&dir.join("A.mat"), p.a())?;
    matfile::write_file(&dir.join("W.mat"), p.w())?;
    std::fs::write(dir.join("info"), info)?;
    Ok(())
}

pub fn run_check(args: &CheckArgs, out: &mut dyn Write, err: &mut dyn Write) -> CliResult {
    if args.max_size == 0 || args.k_max == 0 {
        return Err(CliError::usage("--max-size and --k-max must be positive"));
    }
    if let Some(t) = args.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(CliError::usage("--tol must be positive and finite"));
        }
    }
    if args.seeds == 0 {
        writeln!(err, "warning: --seeds 0 checks nothing")?;
    }
    let tol = ToleranceConfig::default();
    let mut passed = [0usize; PROPERTIES.len()];
    let mut applicable = [0usize; PROPERTIES.len()];
    let mut first_failure: Option<PathBuf> = None;

    for i in 0..args.seeds {
        let seed = args.seed.wrapping_mul(1_000_003).wrapping_add(i as u64);
        let spec = PairSpec::sample(seed, args.max_size, args.k_max);
        let g = generate_pair(&spec)?;
        let p = &g.pair;
        let m = 1 + i % (p.k() + 1);
        for (j, prop) in PROPERTIES.iter().enumerate() {
            let limit = args.tol.unwrap_or(prop.tol);
            let outcome = evaluate(prop.name, p, m, &tol);
            let failure = match outcome {
                Ok(None) => continue,
                Ok(Some(r)) if r <= limit => None,
                Ok(Some(r)) => Some(format!("residual {r:.3e} exceeds {limit:.1e}")),
                Err(e) => Some(format!("error: {e}")),
            };
            applicable[j] += 1;
            let Some(why) = failure else {
                passed[j] += 1;
                continue;
            };
            writeln!(err, "FAIL {} (seed {seed}, m = {m}): {why}", prop.name)?;
            if first_failure.is_none() {
                let dir = args.repro_dir.join(format!("{}-seed{seed}", prop.name));
                let info = format!(
                    "property {}\nseed {seed}\nq {}\nn {}\nt {}\nk {}\nm {m}\n{why}\n",
                    prop.name, spec.q, spec.n, spec.t, spec.target_k
                );
                write_bundle(&dir, p, &info)?;
                first_failure = Some(dir);
            }
        }
    }

    for (j, prop) in PROPERTIES.iter().enumerate() {
        writeln!(out, "{:<18} {}/{}", prop.name, passed[j], applicable[j])?;
    }
    match first_failure {
        Some(dir) => Err(CliError::new(
            EXIT_CHECK_FAILED,
            format!("check failed; inputs of the first failure in {}", dir.display()),
        )),
        None => Ok(()),
    }
}
