//! Value-function sensitivity: evaluates the optimal value under joint
//! perturbations of the right-hand side and the misfit tolerance, and
//! extracts its subgradients from dual solutions.
//!
//! For the perturbed program `v(h,k) = inf { κ(x) : ρ(b+h − Ax) ≤ σ+k }`,
//! the subdifferential at the origin is the set of pairs `(y, −ρ°(y))`
//! over maximizers `y` of the Lagrange dual; equivalently `v(0,0)` times
//! the same pairs taken over gauge-dual minimizers.

use thiserror::Error;

use crate::duality::{
    build_gauge_dual, build_lagrange_dual, Assumptions, DualityError, GaugeProblem,
};
use crate::gauge::GaugeError;
use crate::linalg;
use crate::solver::{
    solve_gauge_dual, solve_lagrange_dual, solve_primal_oracle, SolverError, SubgradConfig,
};

#[derive(Debug, Error)]
pub enum SensitivityError {
    #[error("perturbed problem is invalid: {0}")]
    InvalidPerturbation(String),
    #[error("the interior constraint qualification must be declared by the caller")]
    CqNotDeclared,
    #[error("value function is not positive at the origin (v = {0})")]
    NonpositiveValue(f64),
    #[error(transparent)]
    Duality(#[from] DualityError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Gauge(#[from] GaugeError),
}

/// A base problem with perturbation directions and a step grid; the grid
/// holds multipliers applied to `(h_dir, k_dir)`.
#[derive(Debug, Clone)]
pub struct ValueFunctionProbe {
    pub base: GaugeProblem,
    pub h_dir: Vec<f64>,
    pub k_dir: f64,
    pub steps: Vec<f64>,
}

impl ValueFunctionProbe {
    pub fn new(
        base: GaugeProblem,
        h_dir: Vec<f64>,
        k_dir: f64,
        steps: Vec<f64>,
    ) -> Result<Self, SensitivityError> {
        if h_dir.len() != base.b.len() {
            return Err(SensitivityError::InvalidPerturbation(format!(
                "perturbation direction has length {}, expected {}",
                h_dir.len(),
                base.b.len()
            )));
        }
        Ok(Self {
            base,
            h_dir,
            k_dir,
            steps,
        })
    }

    /// Grid of perturbation pairs `(s·h_dir, s·k_dir)`.
    pub fn grid(&self) -> Vec<(Vec<f64>, f64)> {
        self.steps
            .iter()
            .map(|&s| (linalg::scaled(&self.h_dir, s), s * self.k_dir))
            .collect()
    }
}

fn perturbed(p: &GaugeProblem, h: &[f64], k: f64) -> Result<GaugeProblem, SensitivityError> {
    let sigma = p.sigma + k;
    if sigma < 0.0 {
        return Err(SensitivityError::InvalidPerturbation(format!(
            "perturbed tolerance {sigma} is negative"
        )));
    }
    let b = linalg::axpy(&p.b, 1.0, h);
    let rho_b = p.rho.evaluate(&b)?;
    if sigma >= rho_b {
        return Err(SensitivityError::InvalidPerturbation(format!(
            "perturbed tolerance {sigma} reaches rho(b+h) = {rho_b}, the origin becomes optimal"
        )));
    }
    GaugeProblem::with_extensions(
        p.kappa.clone(),
        p.a.clone(),
        b,
        p.rho.clone(),
        sigma,
        p.cone.clone(),
        p.obj_map.clone(),
    )
    .map_err(SensitivityError::from)
}

/// Evaluates `v(h,k)` by the primal oracle on the perturbed problem.
pub fn value_function(p: &GaugeProblem, h: &[f64], k: f64) -> Result<f64, SensitivityError> {
    let q = perturbed(p, h, k)?;
    Ok(solve_primal_oracle(&q)?.value)
}

/// A subgradient of the value function at the origin: the dual part and
/// the tolerance part `τ = −ρ°(y)`.
#[derive(Debug, Clone)]
pub struct Subgradient2 {
    pub y: Vec<f64>,
    pub tau: f64,
}

impl Subgradient2 {
    pub fn pairing(&self, h: &[f64], k: f64) -> f64 {
        linalg::dot(&self.y, h) + self.tau * k
    }
}

/// Which dual solve produced the subgradient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubgradientRoute {
    /// Maximizer of the Lagrange dual, paired with `−ρ°(y)`.
    Lagrange,
    /// Gauge-dual minimizer scaled by `v(0,0)`.
    GaugeScaled,
}

/// Extracts a value-function subgradient. `interior_declared` is the
/// caller's statement that the origin lies in the interior of the domain
/// of `v`; the computable sufficient condition (perturbation validity) is
/// still checked per grid point by [`value_function`].
pub fn value_subgradient(
    p: &GaugeProblem,
    interior_declared: bool,
) -> Result<(Subgradient2, SubgradientRoute), SensitivityError> {
    if !interior_declared {
        return Err(SensitivityError::CqNotDeclared);
    }
    let v0 = solve_primal_oracle(p)?.value;
    if !(v0.is_finite() && v0 > 0.0) {
        return Err(SensitivityError::NonpositiveValue(v0));
    }
    // Lagrange route when its LP reformulation exists
    if let Ok(lagr) = build_lagrange_dual(p) {
        if let Ok(res) = solve_lagrange_dual(&lagr) {
            let tau = rho_polar_term(p, &res.point)?;
            return Ok((
                Subgradient2 {
                    y: res.point,
                    tau,
                },
                SubgradientRoute::Lagrange,
            ));
        }
    }
    // gauge route: scale a gauge-dual minimizer by v(0,0)
    let dual = build_gauge_dual(p, &Assumptions::default())?;
    let res = solve_gauge_dual(
        &dual,
        &SubgradConfig {
            max_iters: 80_000,
            step_c: 0.05,
            ..Default::default()
        },
    )?;
    let y = linalg::scaled(&res.point, v0);
    let tau = rho_polar_term(p, &y)?;
    Ok((Subgradient2 { y, tau }, SubgradientRoute::GaugeScaled))
}

fn rho_polar_term(p: &GaugeProblem, y: &[f64]) -> Result<f64, SensitivityError> {
    let pv = p.rho.polar_evaluate(y)?;
    if !pv.is_finite() {
        return Err(SensitivityError::InvalidPerturbation(
            "misfit polar is infinite at the dual point".into(),
        ));
    }
    Ok(-pv)
}

/// One grid row of the subgradient report.
#[derive(Debug, Clone)]
pub struct GridRow {
    pub step: f64,
    pub value: Option<f64>,
    pub lower_bound: Option<f64>,
    pub holds: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct SubgradientReport {
    pub rows: Vec<GridRow>,
    pub checked: usize,
    pub violations: usize,
    /// Directional-derivative comparison, when the two-sided differences
    /// agreed: `(derivative, pairing, matched)`.
    pub directional: Option<(f64, f64, bool)>,
}

impl SubgradientReport {
    pub fn pass_rate(&self) -> f64 {
        if self.checked == 0 {
            1.0
        } else {
            (self.checked - self.violations) as f64 / self.checked as f64
        }
    }
}

/// Verifies the subgradient lower bound
/// `v(h,k) ≥ v(0,0) + ⟨g, (h,k)⟩ − 1e−7` across the probe grid, and
/// matches directional derivatives where two-sided finite differences
/// agree (steps 1e−3 and 1e−4 compared to detect kinks).
pub fn check_subgradient_inequality(
    probe: &ValueFunctionProbe,
    g: &Subgradient2,
) -> Result<SubgradientReport, SensitivityError> {
    let p = &probe.base;
    let v0 = solve_primal_oracle(p)?.value;
    let mut rows = Vec::with_capacity(probe.steps.len());
    let mut checked = 0;
    let mut violations = 0;
    for (step, (h, k)) in probe.steps.iter().zip(probe.grid()) {
        match value_function(p, &h, k) {
            Ok(v) => {
                let lb = v0 + g.pairing(&h, k);
                let holds = v >= lb - 1e-7;
                checked += 1;
                if !holds {
                    violations += 1;
                }
                rows.push(GridRow {
                    step: *step,
                    value: Some(v),
                    lower_bound: Some(lb),
                    holds: Some(holds),
                });
            }
            Err(SensitivityError::InvalidPerturbation(_)) => {
                rows.push(GridRow {
                    step: *step,
                    value: None,
                    lower_bound: None,
                    holds: None,
                });
            }
            Err(e) => return Err(e),
        }
    }

    // directional differentiability test along (h_dir, k_dir)
    let dir_value = |s: f64| -> Option<f64> {
        let h = linalg::scaled(&probe.h_dir, s);
        value_function(p, &h, s * probe.k_dir).ok()
    };
    let mut directional = None;
    let eps_pairs = [(1e-3, 1e-4)];
    for &(e1, e2) in &eps_pairs {
        let (Some(fp1), Some(fm1), Some(fp2), Some(fm2)) =
            (dir_value(e1), dir_value(-e1), dir_value(e2), dir_value(-e2))
        else {
            continue;
        };
        let fwd1 = (fp1 - v0) / e1;
        let bwd1 = (v0 - fm1) / e1;
        let fwd2 = (fp2 - v0) / e2;
        let bwd2 = (v0 - fm2) / e2;
        // two-sided agreement at both steps marks differentiability
        if (fwd1 - bwd1).abs() <= 1e-4 * (1.0 + fwd1.abs())
            && (fwd2 - bwd2).abs() <= 1e-4 * (1.0 + fwd2.abs())
        {
            let deriv = 0.5 * (fwd2 + bwd2);
            let pairing = g.pairing(&probe.h_dir, probe.k_dir);
            let matched = (deriv - pairing).abs() <= 1e-3 * (1.0 + deriv.abs());
            directional = Some((deriv, pairing, matched));
        }
    }

    Ok(SubgradientReport {
        rows,
        checked,
        violations,
        directional,
    })
}
