//! Solvers: a projected subgradient method for gauge duals (feasibility by
//! positive rescaling, which is exact on the ray-like antipolar
//! constraint), an LP fast path for fully polyhedral duals, and primal
//! oracles (LP reformulation, soft-threshold search, PSD grid refinement)
//! for desk-scale instances.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::duality::{DualKind, DualProblem, DualityError, GaugeProblem};
use crate::encode::{Aff, LpBuilder};
use crate::gauge::{
    gauge_level_rows, polar_level_rows, ConeDescr, Gauge, GaugeError, NormKind,
};
use crate::linalg::{self, jacobi_eigen, LinalgError, LinearMap, SymMatrix};
use crate::lp::{LpError, LpOutcome, Rel};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("no strictly feasible seed found after {attempts} attempts")]
    NoFeasibleSeed { attempts: usize },
    #[error("unsupported problem family: {0}")]
    UnsupportedFamily(String),
    #[error("instance is infeasible: {0}")]
    Infeasible(String),
    #[error("solver expects a gauge dual, got {0:?}")]
    WrongKind(DualKind),
    #[error(transparent)]
    Duality(#[from] DualityError),
    #[error(transparent)]
    Gauge(#[from] GaugeError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Configuration of the projected subgradient method. The step rule is
/// `step_c / √k` with best-iterate tracking; a stall is declared when the
/// best value improves by less than `stall_tol` over `stall_window`
/// iterations.
#[derive(Debug, Clone)]
pub struct SubgradConfig {
    pub max_iters: usize,
    pub step_c: f64,
    pub stall_tol: f64,
    pub stall_window: usize,
    pub seed: u64,
    /// Skip the LP fast path even when the dual is fully polyhedral.
    pub force_subgradient: bool,
}

impl Default for SubgradConfig {
    fn default() -> Self {
        Self {
            max_iters: 50_000,
            step_c: 1.0,
            stall_tol: 1e-7,
            stall_window: 2_000,
            seed: 0,
            force_subgradient: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    ProjectedSubgradient,
    LpReformulation,
    GridRefine,
    SoftThreshold,
}

/// Best point found, its value, and run diagnostics. The returned point is
/// always feasible within tolerance.
#[derive(Debug, Clone)]
pub struct SolveResult {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub stalled: bool,
    pub feasibility_residual: f64,
    pub method: SolveMethod,
}

/// Subgradient of the gauge-dual objective `y ↦ κ°(A*y)` at `y`: the chain
/// rule applied to a maximizer of the polar supremum. For the PSD variant
/// this is `𝒜(vvᵀ)` scaled by the leading generalized eigenvector `v`.
pub fn subgradient_of_dual_objective(
    d: &DualProblem,
    y: &[f64],
) -> Result<Vec<f64>, SolverError> {
    if d.kind != DualKind::Gauge {
        return Err(SolverError::WrongKind(d.kind));
    }
    if d.has_coupling() {
        return Err(SolverError::UnsupportedFamily(
            "subgradients of the coupled dual form".into(),
        ));
    }
    let p = d.problem();
    let ay = p.a.adjoint_apply(y);
    let xstar = p.kappa.polar_subgradient(&ay)?;
    Ok(p.a.apply(&xstar))
}

/// Solves the gauge dual. Fully polyhedral duals go through an exact LP
/// reformulation unless `force_subgradient` is set; everything else runs
/// the projected subgradient method with rescaling restoration and, for
/// `σ = 0`, exact halfspace projection.
pub fn solve_gauge_dual(
    d: &DualProblem,
    cfg: &SubgradConfig,
) -> Result<SolveResult, SolverError> {
    if d.kind != DualKind::Gauge {
        return Err(SolverError::WrongKind(d.kind));
    }
    if d.has_coupling() {
        return Err(SolverError::UnsupportedFamily(
            "subgradient solves of the coupled dual form (certify it instead)".into(),
        ));
    }
    if !cfg.force_subgradient {
        if let Some(res) = solve_gauge_dual_lp(d)? {
            return Ok(res);
        }
    }
    subgradient_loop(d, cfg)
}

/// Exact LP solve of a fully polyhedral gauge dual:
/// `min t s.t. κ°(A*y) ≤ t, ⟨b,y⟩ − σ·r ≥ 1, ρ°(y) ≤ r`.
fn solve_gauge_dual_lp(d: &DualProblem) -> Result<Option<SolveResult>, SolverError> {
    let p = d.problem();
    let m = p.a.rows();
    let mut lp = LpBuilder::new();
    let yv = lp.add_vars(m);
    let t = lp.add_nonneg_vars(1);
    let ys: Vec<Aff> = (0..m).map(|i| Aff::var(yv + i)).collect();
    let ay: Vec<Aff> = (0..p.a.cols())
        .map(|j| {
            let col: Vec<f64> = (0..m).map(|i| p.a.get(i, j)).collect();
            Aff::combination(&col, &ys, 0.0)
        })
        .collect();
    if polar_level_rows(&p.kappa, &ay, &Aff::var(t), &mut lp).is_err() {
        return Ok(None);
    }
    let bdot = Aff::combination(&p.b, &ys, 0.0);
    if p.sigma == 0.0 {
        lp.constrain(&bdot, Rel::Ge, &Aff::constant(1.0));
    } else {
        let r = lp.add_nonneg_vars(1);
        if polar_level_rows(&p.rho, &ys, &Aff::var(r), &mut lp).is_err() {
            return Ok(None);
        }
        lp.constrain(
            &bdot.minus(&Aff::var(r).scaled(p.sigma)),
            Rel::Ge,
            &Aff::constant(1.0),
        );
    }
    lp.minimize(&Aff::var(t));
    match lp.solve()? {
        LpOutcome::Optimal { value, point } => {
            let y = point[yv..yv + m].to_vec();
            let residual = d.feasibility_residual(&y)?;
            Ok(Some(SolveResult {
                point: y,
                value: value.max(0.0),
                iterations: 0,
                stalled: false,
                feasibility_residual: residual,
                method: SolveMethod::LpReformulation,
            }))
        }
        LpOutcome::Infeasible => Err(SolverError::Infeasible(
            "gauge dual constraint set is empty".into(),
        )),
        LpOutcome::Unbounded => Err(SolverError::Infeasible(
            "gauge dual objective unbounded below (degenerate instance)".into(),
        )),
    }
}

fn find_feasible_seed(
    d: &DualProblem,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<f64>, SolverError> {
    let p = d.problem();
    let m = p.a.rows();
    // the scaled right-hand side is strictly feasible whenever the misfit
    // polar leaves it a positive margin
    let bb = linalg::dot(&p.b, &p.b);
    if bb > 0.0 {
        let cand = linalg::scaled(&p.b, 1.0 / bb);
        if let Some(y) = d.restore(&cand)? {
            return Ok(y);
        }
    }
    let attempts = 400 * m.max(1);
    for _ in 0..attempts {
        let cand: Vec<f64> = (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
        if let Some(y) = d.restore(&cand)? {
            return Ok(y);
        }
    }
    Err(SolverError::NoFeasibleSeed { attempts })
}

fn subgradient_loop(d: &DualProblem, cfg: &SubgradConfig) -> Result<SolveResult, SolverError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut y = find_feasible_seed(d, &mut rng)?;
    let mut best_value = f64::INFINITY;
    let mut best_point = y.clone();
    let mut window_best = f64::INFINITY;
    let mut stalled = false;
    let mut iterations = 0;

    // make the starting point count
    let v0 = d.objective(&y)?;
    if v0.is_finite() {
        best_value = v0;
    }

    for k in 1..=cfg.max_iters {
        iterations = k;
        let value = d.objective(&y)?;
        if value.is_finite() && value < best_value {
            best_value = value;
            best_point = y.clone();
        }
        if k % cfg.stall_window == 0 {
            if window_best.is_finite() && window_best - best_value < cfg.stall_tol {
                stalled = true;
                break;
            }
            window_best = best_value;
        }
        let g = if value.is_finite() {
            subgradient_of_dual_objective(d, &y)?
        } else {
            // outside the polar domain: fall back toward the feasible seed
            linalg::sub(&y, &best_point)
        };
        let gnorm = linalg::norm2(&g);
        if gnorm == 0.0 {
            // flat spot: the current value is optimal for this iterate
            break;
        }
        let mut step = cfg.step_c / (k as f64).sqrt();
        // backtrack until the step lands on a restorable point with a
        // finite objective
        let mut accepted = false;
        for _ in 0..48 {
            let cand = linalg::axpy(&y, -step / gnorm.max(1.0), &g);
            let projected = match d.halfspace_project(&cand) {
                Some(pr) => Some(pr),
                None => d.restore(&cand)?,
            };
            if let Some(next) = projected {
                let nv = d.objective(&next)?;
                if nv.is_finite() {
                    y = next;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            y = best_point.clone();
        }
    }

    let residual = d.feasibility_residual(&best_point)?;
    Ok(SolveResult {
        point: best_point,
        value: best_value,
        iterations,
        stalled,
        feasibility_residual: residual,
        method: SolveMethod::ProjectedSubgradient,
    })
}

/// LP solve of the Lagrange dual
/// `max ⟨b,y⟩ − σ·r s.t. ρ°(y) ≤ r, κ°(A*y) ≤ 1` for polyhedral polars.
pub fn solve_lagrange_dual(d: &DualProblem) -> Result<SolveResult, SolverError> {
    if d.kind != DualKind::Lagrange {
        return Err(SolverError::WrongKind(d.kind));
    }
    let p = d.problem();
    let m = p.a.rows();
    let mut lp = LpBuilder::new();
    let yv = lp.add_vars(m);
    let ys: Vec<Aff> = (0..m).map(|i| Aff::var(yv + i)).collect();
    let ay: Vec<Aff> = (0..p.a.cols())
        .map(|j| {
            let col: Vec<f64> = (0..m).map(|i| p.a.get(i, j)).collect();
            Aff::combination(&col, &ys, 0.0)
        })
        .collect();
    polar_level_rows(&p.kappa, &ay, &Aff::constant(1.0), &mut lp).map_err(|e| {
        SolverError::UnsupportedFamily(format!("Lagrange dual needs a polyhedral polar: {}", e.0))
    })?;
    let mut objective = Aff::combination(&p.b, &ys, 0.0);
    if p.sigma > 0.0 {
        let r = lp.add_nonneg_vars(1);
        polar_level_rows(&p.rho, &ys, &Aff::var(r), &mut lp).map_err(|e| {
            SolverError::UnsupportedFamily(format!(
                "Lagrange dual needs a polyhedral misfit polar: {}",
                e.0
            ))
        })?;
        objective = objective.minus(&Aff::var(r).scaled(p.sigma));
    }
    lp.minimize(&objective.scaled(-1.0));
    match lp.solve()? {
        LpOutcome::Optimal { value, point } => {
            let y = point[yv..yv + m].to_vec();
            let residual = d.feasibility_residual(&y)?;
            Ok(SolveResult {
                point: y,
                value: -value,
                iterations: 0,
                stalled: false,
                feasibility_residual: residual,
                method: SolveMethod::LpReformulation,
            })
        }
        LpOutcome::Infeasible => Err(SolverError::Infeasible(
            "Lagrange dual constraint set is empty".into(),
        )),
        LpOutcome::Unbounded => Err(SolverError::Infeasible(
            "Lagrange dual unbounded (primal infeasible)".into(),
        )),
    }
}

/// Independent primal oracle. Supported families:
/// (a) fully polyhedral objective/misfit/cone — exact LP reformulation;
/// (b) 1-norm recovery with identity forward map and Euclidean misfit —
///     one-dimensional soft-threshold search;
/// (c) PSD conic objectives of order ≤ 3 with equality measurements —
///     affine parameterization plus grid search with local refinement.
pub fn solve_primal_oracle(p: &GaugeProblem) -> Result<SolveResult, SolverError> {
    if let Some(res) = primal_lp_oracle(p)? {
        return Ok(res);
    }
    if let Some(res) = soft_threshold_oracle(p)? {
        return Ok(res);
    }
    if let Some(res) = psd_grid_oracle(p)? {
        return Ok(res);
    }
    Err(SolverError::UnsupportedFamily(
        "primal oracle supports polyhedral, identity-map 1-norm recovery, and small PSD instances"
            .into(),
    ))
}

/// (a) LP reformulation: `min t s.t. κ(Dx) ≤ t, ρ(b − Ax) ≤ σ, x ∈ K`.
fn primal_lp_oracle(p: &GaugeProblem) -> Result<Option<SolveResult>, SolverError> {
    let n = p.a.cols();
    let mut lp = LpBuilder::new();
    let xv = lp.add_vars(n);
    let t = lp.add_nonneg_vars(1);
    let xs: Vec<Aff> = (0..n).map(|i| Aff::var(xv + i)).collect();
    let objective_arg: Vec<Aff> = match &p.obj_map {
        None => xs.clone(),
        Some(dmap) => (0..dmap.rows())
            .map(|i| Aff::combination(dmap.row(i), &xs, 0.0))
            .collect(),
    };
    if gauge_level_rows(&p.kappa, &objective_arg, &Aff::var(t), &mut lp).is_err() {
        return Ok(None);
    }
    if p.sigma == 0.0 {
        // the misfit gauge vanishes only at the origin, so ρ(b − Ax) ≤ 0
        // collapses to the equality system A x = b
        for i in 0..p.a.rows() {
            let lhs = Aff::combination(p.a.row(i), &xs, 0.0);
            lp.constrain(&lhs, Rel::Eq, &Aff::constant(p.b[i]));
        }
    } else {
        let residual: Vec<Aff> = (0..p.a.rows())
            .map(|i| {
                Aff::combination(p.a.row(i), &xs, 0.0)
                    .scaled(-1.0)
                    .plus(&Aff::constant(p.b[i]))
            })
            .collect();
        if gauge_level_rows(&p.rho, &residual, &Aff::constant(p.sigma), &mut lp).is_err() {
            return Ok(None);
        }
    }
    if let Some(k) = &p.cone {
        if crate::gauge::cone_rows(k, &xs, &mut lp).is_err() {
            return Ok(None);
        }
    }
    lp.minimize(&Aff::var(t));
    match lp.solve()? {
        LpOutcome::Optimal { value, point } => {
            let x = point[xv..xv + n].to_vec();
            let residual = p.primal_residual(&x)?;
            Ok(Some(SolveResult {
                point: x,
                value: value.max(0.0),
                iterations: 0,
                stalled: false,
                feasibility_residual: residual,
                method: SolveMethod::LpReformulation,
            }))
        }
        LpOutcome::Infeasible => Err(SolverError::Infeasible(
            "primal constraint set is empty".into(),
        )),
        LpOutcome::Unbounded => unreachable!("gauge objectives are bounded below"),
    }
}

/// (b) `min ‖x‖₁ s.t. ‖b − x‖₂ ≤ σ`: soft thresholding of `b` with the
/// threshold chosen by bisection so the residual meets `σ`.
fn soft_threshold_oracle(p: &GaugeProblem) -> Result<Option<SolveResult>, SolverError> {
    let plain_one_norm = matches!(
        &p.kappa,
        Gauge::Norm {
            kind: NormKind::One,
            weights: None,
            ..
        }
    );
    let plain_two_norm = matches!(
        &p.rho,
        Gauge::Norm {
            kind: NormKind::Two,
            weights: None,
            ..
        }
    );
    if !(plain_one_norm
        && plain_two_norm
        && p.a.is_identity()
        && p.sigma > 0.0
        && p.cone.is_none()
        && p.obj_map.is_none())
    {
        return Ok(None);
    }
    let soft = |tau: f64| -> Vec<f64> {
        p.b.iter()
            .map(|&bi| bi.signum() * (bi.abs() - tau).max(0.0))
            .collect()
    };
    let resid_norm = |tau: f64| -> f64 { linalg::norm2(&linalg::sub(&p.b, &soft(tau))) };
    let mut lo = 0.0_f64;
    let mut hi = linalg::norm_inf(&p.b);
    let mut iterations = 0;
    // residual grows with the threshold; bisect to ‖b − x(τ)‖ = σ
    for _ in 0..200 {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        if resid_norm(mid) > p.sigma {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-14 * (1.0 + hi) {
            break;
        }
    }
    let x = soft(lo);
    let residual = p.primal_residual(&x)?;
    Ok(Some(SolveResult {
        point: x.clone(),
        value: linalg::norm1(&x),
        iterations,
        stalled: false,
        feasibility_residual: residual,
        method: SolveMethod::SoftThreshold,
    }))
}

/// (c) PSD grid oracle for `min ⟨C,X⟩ s.t. 𝒜X = b, X ⪰ 0` with matrix
/// order ≤ 3: parameterize the upper triangle, solve the equality system,
/// and refine a grid over the (≤ 4-dimensional) null space.
fn psd_grid_oracle(p: &GaugeProblem) -> Result<Option<SolveResult>, SolverError> {
    let Gauge::ConicLinear {
        c,
        cone: ConeDescr::Psd(order),
    } = &p.kappa
    else {
        return Ok(None);
    };
    let order = *order;
    if order > 3 || p.sigma != 0.0 || p.cone.is_some() || p.obj_map.is_some() {
        return Ok(None);
    }
    let n2 = order * order;
    debug_assert_eq!(p.a.cols(), n2);

    // basis of symmetric matrices over the upper triangle
    let mut tri: Vec<(usize, usize)> = Vec::new();
    for i in 0..order {
        for j in i..order {
            tri.push((i, j));
        }
    }
    let embed = |u: &[f64]| -> Vec<f64> {
        let mut flat = vec![0.0; n2];
        for (k, &(i, j)) in tri.iter().enumerate() {
            flat[i * order + j] = u[k];
            flat[j * order + i] = u[k];
        }
        flat
    };
    // reduced measurement map on triangle coordinates
    let mut rows = Vec::with_capacity(p.a.rows());
    for r in 0..p.a.rows() {
        let mut row = Vec::with_capacity(tri.len());
        for &(i, j) in &tri {
            let mut e = vec![0.0; n2];
            e[i * order + j] = 1.0;
            e[j * order + i] = 1.0;
            if i == j {
                e[i * order + j] = 1.0;
            }
            row.push(linalg::dot(p.a.row(r), &e));
        }
        rows.push(row);
    }
    let reduced = LinearMap::from_rows(&rows)?;
    let u0 = linalg::least_squares(&reduced, &p.b)?;
    let consistency = linalg::sub(&reduced.apply(&u0), &p.b);
    if linalg::norm_inf(&consistency) > 1e-8 * (1.0 + linalg::norm_inf(&p.b)) {
        return Err(SolverError::Infeasible(
            "PSD measurement system is inconsistent".into(),
        ));
    }
    let basis = linalg::nullspace_basis(&reduced)?;
    if basis.len() > 4 {
        return Ok(None);
    }

    let objective = |u: &[f64]| -> Result<Option<f64>, SolverError> {
        let flat = embed(u);
        let m = SymMatrix::from_flat_symmetrized(order, &flat)?;
        let eig = jacobi_eigen(&m)?;
        let min_eig = *eig.values.last().unwrap_or(&0.0);
        if min_eig < -1e-9 * (1.0 + m.frobenius()) {
            return Ok(None);
        }
        Ok(Some(linalg::dot(c, &flat)))
    };

    if basis.is_empty() {
        let Some(value) = objective(&u0)? else {
            return Err(SolverError::Infeasible(
                "the unique solution of the measurement system is not PSD".into(),
            ));
        };
        let point = embed(&u0);
        let residual = p.primal_residual(&point)?;
        return Ok(Some(SolveResult {
            point,
            value,
            iterations: 1,
            stalled: false,
            feasibility_residual: residual,
            method: SolveMethod::GridRefine,
        }));
    }

    let dim = basis.len();
    // objective is linear in the null-space coordinates
    let g: Vec<f64> = basis.iter().map(|v| linalg::dot(c, &embed(v))).collect();
    let base_value = linalg::dot(c, &embed(&u0));

    let objective_matrix = |s: &[f64]| -> Result<SymMatrix, SolverError> {
        let u: Vec<f64> = (0..u0.len())
            .map(|i| u0[i] + basis.iter().zip(s).map(|(v, &si)| si * v[i]).sum::<f64>())
            .collect();
        Ok(SymMatrix::from_flat_symmetrized(order, &embed(&u))?)
    };
    let psd_margin = |m: &SymMatrix| -> Result<f64, SolverError> {
        let eig = jacobi_eigen(m)?;
        Ok(*eig.values.last().unwrap_or(&0.0))
    };

    // coarse grid for an incumbent
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    let radius0 = 2.0 * (1.0 + linalg::norm2(&u0));
    let mut evals = 0usize;
    {
        let pts = 9usize;
        let mut idx = vec![0usize; dim];
        loop {
            let sv: Vec<f64> = (0..dim)
                .map(|d| -radius0 + 2.0 * radius0 * (idx[d] as f64) / ((pts - 1) as f64))
                .collect();
            let m = objective_matrix(&sv)?;
            evals += 1;
            if psd_margin(&m)? >= -1e-9 * (1.0 + m.frobenius()) {
                let val = base_value + linalg::dot(&g, &sv);
                if incumbent.as_ref().is_none_or(|(bv, _)| val < *bv) {
                    incumbent = Some((val, sv.clone()));
                }
            }
            let mut d = 0;
            loop {
                if d == dim {
                    break;
                }
                idx[d] += 1;
                if idx[d] < pts {
                    break;
                }
                idx[d] = 0;
                d += 1;
            }
            if d == dim {
                break;
            }
        }
    }

    // local refinement by supporting-hyperplane cuts: every violated
    // eigenvector v yields the valid linear cut vᵀX(s)v ≥ 0. The loop
    // accepts a point once its eigenvalue margin is inside the library
    // membership tolerance; the simplex cannot resolve cuts tighter than
    // its own pivot slack, so requiring more would stall.
    let accept_margin = |m: &SymMatrix| -> f64 {
        let ninf = m
            .as_flat()
            .iter()
            .fold(0.0_f64, |acc, v| acc.max(v.abs()));
        -0.9 * crate::tol::MEMBERSHIP * (1.0 + ninf) * (1.0 + m.frobenius())
    };
    let mut radius = radius0;
    let mut best: Option<(f64, Vec<f64>)> = None;
    'restarts: for _ in 0..3 {
        let mut cuts: Vec<(Vec<f64>, f64)> = Vec::new(); // a·s ≥ rhs
        let mut prev: Option<Vec<f64>> = None;
        for _ in 0..200 {
            let mut lp = crate::lp::LpProblem::new(dim);
            lp.objective = g.clone();
            lp.bounds = vec![(-radius, radius); dim];
            for (a, rhs) in &cuts {
                lp.rows.push(crate::lp::LpRow {
                    coeffs: a.clone(),
                    rel: Rel::Ge,
                    rhs: *rhs,
                });
            }
            let sv = match crate::lp::solve_lp(&lp)? {
                LpOutcome::Optimal { point, .. } => point,
                LpOutcome::Infeasible => {
                    // cuts are valid, so the spectrahedron misses the box;
                    // fall back to the incumbent
                    break 'restarts;
                }
                LpOutcome::Unbounded => unreachable!("boxed variables"),
            };
            evals += 1;
            let m = objective_matrix(&sv)?;
            let margin = psd_margin(&m)?;
            let stalled = prev
                .as_ref()
                .is_some_and(|p| {
                    p.iter()
                        .zip(&sv)
                        .all(|(a, b)| (a - b).abs() <= 1e-12 * (1.0 + b.abs()))
                });
            if margin >= accept_margin(&m) || (stalled && margin >= 2.0 * accept_margin(&m)) {
                if sv.iter().any(|&v| v.abs() >= radius * (1.0 - 1e-9)) {
                    // optimum pinned to the artificial box: enlarge it
                    radius *= 4.0;
                    continue 'restarts;
                }
                let val = base_value + linalg::dot(&g, &sv);
                best = Some((val, sv));
                break 'restarts;
            }
            if stalled {
                // the LP cannot separate further; keep the incumbent
                break 'restarts;
            }
            prev = Some(sv.clone());
            let eig = jacobi_eigen(&m)?;
            let v = eig.vectors.last().expect("spectrum").clone();
            // vᵀX(s)v is affine in s: constant from u0, coefficients from
            // the null-space basis matrices
            let quad = |flat: &[f64]| -> f64 {
                let mut total = 0.0;
                for i in 0..order {
                    for j in 0..order {
                        total += v[i] * v[j] * flat[i * order + j];
                    }
                }
                total
            };
            let constant = quad(&embed(&u0));
            let coeffs: Vec<f64> = basis.iter().map(|bv| quad(&embed(bv))).collect();
            cuts.push((coeffs, -constant));
        }
    }

    let chosen = match (best, incumbent) {
        (Some((bv, bs)), Some((iv, is_))) => {
            if iv < bv {
                (iv, is_)
            } else {
                (bv, bs)
            }
        }
        (Some(b), None) => b,
        (None, Some(i)) => i,
        (None, None) => {
            return Err(SolverError::Infeasible(
                "no PSD point found in the search box".into(),
            ))
        }
    };
    let (value, sfinal) = chosen;
    let u: Vec<f64> = (0..u0.len())
        .map(|i| u0[i] + basis.iter().zip(&sfinal).map(|(v, &si)| si * v[i]).sum::<f64>())
        .collect();
    let point = embed(&u);
    let residual = p.primal_residual(&point)?;
    Ok(Some(SolveResult {
        point,
        value,
        iterations: evals,
        stalled: false,
        feasibility_residual: residual,
        method: SolveMethod::GridRefine,
    }))
}
