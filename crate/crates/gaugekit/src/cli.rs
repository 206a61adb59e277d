//! Command-line front end.
//!
//! Four subcommands: `dual` prints a constructed dual, `solve` runs the
//! primal oracle and the gauge-dual solver and certifies the product,
//! `antipolar` applies the set calculus and its checks, and `sensitivity`
//! reports value-function subgradients over a perturbation grid. All
//! numeric output goes through the key/value [`Report`] format; every
//! report field is produced by a library call, never computed here.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::duality::{build_bidual, build_gauge_dual, build_lagrange_dual, certify, DualityError};
use crate::problem_file::{FileError, ParseError, ProblemFile};
use crate::report::Report;
use crate::sensitivity::{
    check_subgradient_inequality, value_subgradient, SensitivityError, SubgradientRoute,
    ValueFunctionProbe,
};
use crate::sets::{antipolar, biantipolar_check, recession_identity_check, RayLike, SetError};
use crate::solver::{solve_gauge_dual, solve_primal_oracle, SolveMethod, SolverError, SubgradConfig};

#[derive(Parser)]
#[command(name = "gaugekit", about = "Gauge-optimization duality toolkit", version)]
pub struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Construct and print a dual of the problem in FILE.
    Dual {
        file: PathBuf,
        /// Which dual to build: gauge | lagrange | bidual.
        #[arg(long, default_value = "gauge")]
        kind: String,
    },
    /// Solve the instance: oracle primal, gauge-dual solve, certificate.
    Solve {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50_000)]
        max_iters: usize,
        #[arg(long, default_value_t = 1.0)]
        step_c: f64,
        /// Stall tolerance of the subgradient loop.
        #[arg(long, default_value_t = 1e-7)]
        tol: f64,
        /// Acceptance width for |product − 1| (defaults per method).
        #[arg(long)]
        product_tol: Option<f64>,
        /// Skip the LP fast path.
        #[arg(long, default_value_t = false)]
        force_subgradient: bool,
    },
    /// Antipolar calculus on the set in FILE.
    Antipolar {
        file: PathBuf,
        /// Check to run: membership | biantipolar | recession.
        #[arg(long)]
        check: String,
        /// Point for membership checks, e.g. "1,1.5" (file `point:` works too).
        #[arg(long)]
        point: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
    },
    /// Value-function sensitivity over a perturbation grid.
    Sensitivity {
        file: PathBuf,
        /// Number of grid steps (symmetric around 0).
        #[arg(long, default_value_t = 9)]
        grid: usize,
        /// Largest step magnitude, relative to the instance.
        #[arg(long, default_value_t = 0.1)]
        grid_scale: f64,
        /// Tolerance perturbation direction (defaults to 1 when σ > 0).
        #[arg(long)]
        perturb_sigma: Option<f64>,
        /// Right-hand-side perturbation direction as CSV (defaults to b).
        #[arg(long)]
        perturb_b: Option<String>,
        /// Declare the interior constraint qualification.
        #[arg(long, default_value_t = false)]
        assume_interior: bool,
    },
}

#[derive(Debug, Error)]
pub enum CmdError {
    #[error("{0}")]
    Parse(#[from] ParseError),
    #[error("{0}")]
    File(#[from] FileError),
    #[error("{0}")]
    Duality(#[from] DualityError),
    #[error("{0}")]
    Set(#[from] SetError),
    #[error("{0}")]
    Solver(#[from] SolverError),
    #[error("{0}")]
    Sensitivity(#[from] SensitivityError),
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Parse(_) | CmdError::File(_) | CmdError::Usage(_) | CmdError::Io { .. } => 2,
            CmdError::Solver(SolverError::UnsupportedFamily(_)) => 3,
            CmdError::Sensitivity(SensitivityError::Solver(
                SolverError::UnsupportedFamily(_),
            )) => 3,
            CmdError::Duality(DualityError::Unsupported(_)) => 3,
            _ => 1,
        }
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(cli) {
        Ok((report, code)) => {
            print!("{}", report.to_text());
            code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn load(path: &PathBuf) -> Result<ProblemFile, CmdError> {
    let text = std::fs::read_to_string(path).map_err(|source| CmdError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(ProblemFile::parse(&text)?)
}

fn execute(cli: Cli) -> Result<(Report, i32), CmdError> {
    match cli.command {
        Cmd::Dual { file, kind } => cmd_dual(&file, &kind),
        Cmd::Solve {
            file,
            seed,
            max_iters,
            step_c,
            tol,
            product_tol,
            force_subgradient,
        } => cmd_solve(&file, seed, max_iters, step_c, tol, product_tol, force_subgradient),
        Cmd::Antipolar {
            file,
            check,
            point,
            seed,
            samples,
        } => cmd_antipolar(&file, &check, point.as_deref(), seed, samples),
        Cmd::Sensitivity {
            file,
            grid,
            grid_scale,
            perturb_sigma,
            perturb_b,
            assume_interior,
        } => cmd_sensitivity(
            &file,
            grid,
            grid_scale,
            perturb_sigma,
            perturb_b.as_deref(),
            assume_interior,
        ),
    }
}

fn cmd_dual(file: &PathBuf, kind: &str) -> Result<(Report, i32), CmdError> {
    let parsed = load(file)?;
    let p = parsed.to_problem()?;
    let assume = parsed.assumptions();
    let dual = match kind {
        "gauge" => build_gauge_dual(&p, &assume)?,
        "lagrange" => build_lagrange_dual(&p)?,
        "bidual" => build_bidual(&p)?,
        other => {
            return Err(CmdError::Usage(format!(
                "unknown dual kind `{other}` (gauge/lagrange/bidual)"
            )))
        }
    };
    let mut report = Report::new();
    report.push_str("kind", format!("{:?}", dual.kind).to_lowercase());
    report.push_str("summary", dual.summary());
    report.push_str("provenance", dual.provenance.clone());
    report.push_bool("closure_flagged", dual.closure_flagged);
    if let Some(anti) = &dual.antipolar {
        report.push_str("antipolar_rule", anti.rule.clone());
        report.push_bool("antipolar_closure_taken", anti.closure_taken);
    }
    Ok((report, 0))
}

fn cmd_solve(
    file: &PathBuf,
    seed: u64,
    max_iters: usize,
    step_c: f64,
    tol: f64,
    product_tol: Option<f64>,
    force_subgradient: bool,
) -> Result<(Report, i32), CmdError> {
    let parsed = load(file)?;
    let p = parsed.to_problem()?;
    let assume = parsed.assumptions();
    let oracle = solve_primal_oracle(&p)?;
    let dual = build_gauge_dual(&p, &assume)?;
    let cfg = SubgradConfig {
        max_iters,
        step_c,
        stall_tol: tol,
        seed,
        force_subgradient,
        ..Default::default()
    };
    let solved = solve_gauge_dual(&dual, &cfg)?;
    let cert = certify(&p, &oracle.point, &solved.point, &assume)?;

    let family_tol = product_tol.unwrap_or(match solved.method {
        SolveMethod::LpReformulation => 1e-6,
        _ => 1e-3,
    });
    let product_ok = cert
        .product
        .is_some_and(|prod| (prod - 1.0).abs() <= family_tol);

    let mut report = Report::new();
    report.push_str("kind", "solve");
    report.push_str(
        "primal_method",
        format!("{:?}", oracle.method).to_lowercase(),
    );
    report.push_str("dual_method", format!("{:?}", solved.method).to_lowercase());
    report.push_str("provenance", dual.provenance.clone());
    report.push_num("primal_value", cert.primal_value);
    report.push_num("dual_value", cert.dual_value);
    match cert.product {
        Some(prod) => report.push_num("product", prod),
        None => report.push_str("product", "unavailable (infeasible pair)"),
    }
    report.push_num("primal_residual", cert.primal_residual);
    report.push_num("dual_residual", cert.dual_residual);
    if let Some(vf) = cert.fenchel_value {
        report.push_num("fenchel_value", vf);
    }
    if let Some(vl) = cert.lagrange_value {
        report.push_num("lagrange_value_at_y", vl);
    }
    report.push_int("dual_iterations", solved.iterations as i64);
    report.push_bool("dual_stalled", solved.stalled);
    report.push_bool("polyhedral_constraint", cert.polyhedral_constraint);
    report.push_bool("closure_flagged", dual.closure_flagged);
    match &cert.strong_duality_claim {
        Some(claim) => report.push_str("strong_duality", claim.clone()),
        None => report.push_str("strong_duality", "not claimed"),
    }
    report.push_num("product_tolerance", family_tol);
    report.push_bool("product_within_tolerance", product_ok);
    if let (Some(offset), Some(scale)) = (parsed.report_offset, parsed.report_scale) {
        report.push_num("derived_value", offset + scale * cert.primal_value);
    }
    Ok((report, if product_ok { 0 } else { 1 }))
}

fn parse_point(s: &str) -> Result<Vec<f64>, CmdError> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| CmdError::Usage(format!("bad coordinate `{v}` in point")))
        })
        .collect()
}

fn cmd_antipolar(
    file: &PathBuf,
    check: &str,
    point: Option<&str>,
    seed: u64,
    samples: usize,
) -> Result<(Report, i32), CmdError> {
    let parsed = load(file)?;
    let set = parsed
        .set
        .clone()
        .ok_or_else(|| CmdError::Usage("file needs a `set:` entry".into()))?;
    let ri = parsed.assumptions().ri_constraint_overlap;
    let mut report = Report::new();
    report.push_str("kind", "antipolar");
    match check {
        "membership" => {
            let anti = antipolar(&set, ri)?;
            report.push_str("rule", anti.rule.clone());
            report.push_bool("closure_taken", anti.closure_taken);
            let pt = match (point, &parsed.point) {
                (Some(s), _) => parse_point(s)?,
                (None, Some(p)) => p.clone(),
                (None, None) => {
                    return Err(CmdError::Usage(
                        "membership check needs --point or a `point:` entry".into(),
                    ))
                }
            };
            let in_anti = anti.set.membership(&pt)?;
            let in_set = set.membership(&pt)?;
            report.push_str(
                "point",
                pt.iter()
                    .map(|v| format!("{v:?}"))
                    .collect::<Vec<_>>()
                    .join(","),
            );
            report.push_bool("member_of_antipolar", in_anti);
            report.push_bool("member_of_set", in_set);
            Ok((report, 0))
        }
        "biantipolar" => {
            let anti = antipolar(&set, ri)?;
            report.push_str("rule", anti.rule.clone());
            report.push_bool("closure_taken", anti.closure_taken);
            let res = biantipolar_check(&set, samples, seed)?;
            report.push_int("samples", res.samples as i64);
            report.push_int("agreements", res.agreements as i64);
            report.push_num("agreement_rate", res.agreement_rate());
            report.push_str("raylike", format!("{:?}", res.raylike).to_lowercase());
            report.push_bool("set_equals_biantipolar", res.set_equals_biantipolar);
            report.push_bool(
                "proper_extension_witnessed",
                res.proper_extension_witnessed,
            );
            let ok = res.agreements == res.samples
                && (res.raylike != RayLike::Yes || res.set_equals_biantipolar);
            Ok((report, if ok { 0 } else { 1 }))
        }
        "recession" => {
            let anti = antipolar(&set, ri)?;
            report.push_str("rule", anti.rule.clone());
            report.push_bool("closure_taken", anti.closure_taken);
            let res = recession_identity_check(&set, samples, seed)?;
            report.push_int("directions", res.directions as i64);
            report.push_int("agreements", res.agreements as i64);
            report.push_num("agreement_rate", res.agreement_rate());
            let ok = res.agreements == res.directions;
            Ok((report, if ok { 0 } else { 1 }))
        }
        other => Err(CmdError::Usage(format!(
            "unknown check `{other}` (membership/biantipolar/recession)"
        ))),
    }
}

fn cmd_sensitivity(
    file: &PathBuf,
    grid: usize,
    grid_scale: f64,
    perturb_sigma: Option<f64>,
    perturb_b: Option<&str>,
    assume_interior: bool,
) -> Result<(Report, i32), CmdError> {
    let parsed = load(file)?;
    let p = parsed.to_problem()?;
    let declared = assume_interior || parsed.interior_declared();
    if !declared {
        return Err(CmdError::Usage(
            "sensitivity needs the interior qualification: add `declare: interior_cq` to the file or pass --assume-interior".into(),
        ));
    }
    let (g, route) = value_subgradient(&p, true)?;
    let k_dir = perturb_sigma.unwrap_or(if p.sigma > 0.0 { 1.0 } else { 0.0 });
    let steps: Vec<f64> = if grid <= 1 {
        vec![0.0]
    } else {
        (0..grid)
            .map(|i| -grid_scale + 2.0 * grid_scale * i as f64 / (grid - 1) as f64)
            .collect()
    };
    let h_dir = match perturb_b {
        Some(csv) => parse_point(csv)?,
        None => parsed.b.clone().unwrap_or_default(),
    };
    let probe =
        ValueFunctionProbe::new(p, h_dir, k_dir, steps).map_err(CmdError::Sensitivity)?;
    let res = check_subgradient_inequality(&probe, &g)?;

    let mut report = Report::new();
    report.push_str("kind", "sensitivity");
    report.push_str(
        "route",
        match route {
            SubgradientRoute::Lagrange => "lagrange",
            SubgradientRoute::GaugeScaled => "gauge-scaled",
        },
    );
    report.push_str(
        "subgradient_y",
        g.y.iter()
            .map(|v| format!("{v:?}"))
            .collect::<Vec<_>>()
            .join(","),
    );
    report.push_num("subgradient_tau", g.tau);
    for row in &res.rows {
        let label = format!("grid.{:+.4}", row.step);
        match (row.value, row.lower_bound, row.holds) {
            (Some(v), Some(lb), Some(h)) => {
                report.push_num(&format!("{label}.value"), v);
                report.push_num(&format!("{label}.lower_bound"), lb);
                report.push_bool(&format!("{label}.holds"), h);
            }
            _ => report.push_str(&format!("{label}.value"), "invalid perturbation"),
        }
    }
    report.push_int("checked", res.checked as i64);
    report.push_int("violations", res.violations as i64);
    report.push_num("pass_rate", res.pass_rate());
    if let Some((deriv, pairing, matched)) = res.directional {
        report.push_num("directional_derivative", deriv);
        report.push_num("subgradient_pairing", pairing);
        report.push_bool("directional_match", matched);
    }
    let ok = res.violations == 0;
    Ok((report, if ok { 0 } else { 1 }))
}
