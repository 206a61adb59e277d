//! Construction of gauge duals, Lagrange duals, and biduals for
//! ρ-constrained gauge programs, plus duality certificates and solution
//! maps between the dual forms.
//!
//! The canonical primal is
//!
//! ```text
//! minimize κ(Dx)  subject to  ρ(b − Ax) ≤ σ,  x ∈ K,
//! ```
//!
//! with `D = id` and `K` absent in the plain form. Its gauge dual minimizes
//! `κ°(A*y)` over the antipolar constraint `⟨b,y⟩ − σ·ρ°(y) ≥ 1`; with a
//! composed objective and conic side constraint the dual gains a second
//! block `z` with objective `κ°(z)` and coupling `D*z − A*y ∈ K*`. The
//! Lagrange dual maximizes `⟨b,y⟩ − σ·ρ°(y)` subject to `κ°(A*y) ≤ 1`, and
//! the bidual minimizes `κ°°` over `∪_{λ≥1} λC`.

use thiserror::Error;

use crate::gauge::{ConeDescr, Gauge, GaugeError};
use crate::linalg::{self, LinearMap};
use crate::sets::{antipolar, AntipolarDescr, SetDescr, SetError};
use crate::tol;

#[derive(Debug, Error)]
pub enum DualityError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("origin feasible: trivial optimum (sigma must be smaller than rho(b))")]
    OriginFeasible,
    #[error("sigma = 0 requires a misfit gauge vanishing only at the origin")]
    RhoNotDefinite,
    #[error("invalid problem: {0}")]
    Invalid(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("solution map needs a positive finite value, got {0}")]
    BadValue(f64),
    #[error(transparent)]
    Gauge(#[from] GaugeError),
    #[error(transparent)]
    Set(#[from] SetError),
}

/// Caller-declared constraint qualifications. The polyhedral branch is
/// machine-checked; relative-interior conditions cannot be decided for
/// arbitrary descriptors and are recorded as declarations.
#[derive(Debug, Clone, Copy, Default)]
pub struct Assumptions {
    /// The relative interior of the misfit ball meets the range of `A`.
    pub ri_constraint_overlap: bool,
    /// `ri dom κ` meets the constraint set.
    pub ri_domain_overlap: bool,
    /// `ri dom κ°` meets the antipolar of the constraint set.
    pub ri_polar_overlap: bool,
}

/// The ρ-constrained gauge program.
#[derive(Debug, Clone)]
pub struct GaugeProblem {
    pub kappa: Gauge,
    pub a: LinearMap,
    pub b: Vec<f64>,
    pub rho: Gauge,
    pub sigma: f64,
    /// Optional conic side constraint `x ∈ K`.
    pub cone: Option<ConeDescr>,
    /// Optional objective composition: minimize `κ(D x)`.
    pub obj_map: Option<LinearMap>,
}

impl GaugeProblem {
    /// Plain form without side constraint or composed objective.
    pub fn new(
        kappa: Gauge,
        a: LinearMap,
        b: Vec<f64>,
        rho: Gauge,
        sigma: f64,
    ) -> Result<Self, DualityError> {
        Self::with_extensions(kappa, a, b, rho, sigma, None, None)
    }

    pub fn with_extensions(
        kappa: Gauge,
        a: LinearMap,
        b: Vec<f64>,
        rho: Gauge,
        sigma: f64,
        cone: Option<ConeDescr>,
        obj_map: Option<LinearMap>,
    ) -> Result<Self, DualityError> {
        linalg::check_finite(&b).map_err(|_| DualityError::Invalid("b not finite".into()))?;
        if b.len() != a.rows() {
            return Err(DualityError::DimensionMismatch {
                expected: a.rows(),
                got: b.len(),
            });
        }
        if rho.dim() != a.rows() {
            return Err(DualityError::DimensionMismatch {
                expected: a.rows(),
                got: rho.dim(),
            });
        }
        match &obj_map {
            None => {
                if kappa.dim() != a.cols() {
                    return Err(DualityError::DimensionMismatch {
                        expected: a.cols(),
                        got: kappa.dim(),
                    });
                }
            }
            Some(d) => {
                if d.cols() != a.cols() {
                    return Err(DualityError::DimensionMismatch {
                        expected: a.cols(),
                        got: d.cols(),
                    });
                }
                if kappa.dim() != d.rows() {
                    return Err(DualityError::DimensionMismatch {
                        expected: d.rows(),
                        got: kappa.dim(),
                    });
                }
            }
        }
        if let Some(k) = &cone {
            if k.dim() != a.cols() {
                return Err(DualityError::DimensionMismatch {
                    expected: a.cols(),
                    got: k.dim(),
                });
            }
        }
        if sigma < 0.0 || !sigma.is_finite() {
            return Err(DualityError::Invalid("sigma must be finite and ≥ 0".into()));
        }
        let rho_b = rho.evaluate(&b)?;
        if sigma >= rho_b {
            return Err(DualityError::OriginFeasible);
        }
        if sigma == 0.0 && !gauge_definite(&rho)? {
            return Err(DualityError::RhoNotDefinite);
        }
        Ok(Self {
            kappa,
            a,
            b,
            rho,
            sigma,
            cone,
            obj_map,
        })
    }

    pub fn primal_dim(&self) -> usize {
        self.a.cols()
    }

    /// Symbolic constraint set `{ x : ρ(b − Ax) ≤ σ } (∩ K)`.
    pub fn constraint_set(&self) -> SetDescr {
        let ball = SetDescr::GaugeBallTranslate {
            rho: self.rho.clone(),
            center: self.b.clone(),
            sigma: self.sigma,
        };
        let pre = SetDescr::Preimage {
            map: self.a.clone(),
            inner: Box::new(ball),
        };
        match &self.cone {
            None => pre,
            Some(k) => SetDescr::Intersection {
                parts: vec![
                    pre,
                    SetDescr::ConeTranslate {
                        base: vec![0.0; self.a.cols()],
                        cone: k.clone(),
                    },
                ],
            },
        }
    }

    /// The misfit ball `C₀ = { u : ρ(b − u) ≤ σ }`.
    pub fn misfit_ball(&self) -> SetDescr {
        SetDescr::GaugeBallTranslate {
            rho: self.rho.clone(),
            center: self.b.clone(),
            sigma: self.sigma,
        }
    }

    /// Objective value `κ(x)` or `κ(Dx)`.
    pub fn primal_value(&self, x: &[f64]) -> Result<f64, DualityError> {
        let v = match &self.obj_map {
            None => self.kappa.evaluate(x)?,
            Some(d) => self.kappa.evaluate(&d.apply(x))?,
        };
        Ok(v)
    }

    /// Constraint violation: excess of `ρ(b − Ax)` over `σ`, plus infinity
    /// when the conic side constraint fails.
    pub fn primal_residual(&self, x: &[f64]) -> Result<f64, DualityError> {
        let r = linalg::sub(&self.b, &self.a.apply(x));
        let misfit = self.rho.evaluate(&r)?;
        let mut res = (misfit - self.sigma).max(0.0);
        if let Some(k) = &self.cone {
            if !k.contains(x)? {
                res = f64::INFINITY;
            }
        }
        Ok(res)
    }

    /// Whether the misfit ball is polyhedral (the machine-checkable branch
    /// of the dual qualification).
    pub fn polyhedral_constraint(&self) -> bool {
        self.misfit_ball().is_polyhedral()
            && self.cone.as_ref().is_none_or(|k| k.is_polyhedral())
    }
}

/// Deterministic check that a gauge vanishes only at the origin, by
/// sampling the unit sphere.
fn gauge_definite(g: &Gauge) -> Result<bool, GaugeError> {
    use rand::prelude::*;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xdef1);
    let n = g.dim();
    for _ in 0..64 {
        let mut d: Vec<f64> = (0..n)
            .map(|_| {
                let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
                let u2: f64 = rng.random_range(0.0..1.0);
                (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
            })
            .collect();
        let nrm = linalg::norm2(&d);
        if nrm == 0.0 {
            continue;
        }
        for v in &mut d {
            *v /= nrm;
        }
        let val = g.evaluate(&d)?;
        if val.is_finite() && val <= 1e-12 {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualKind {
    Gauge,
    Lagrange,
    Bidual,
}

/// A constructed dual problem holding evaluation, feasibility, and
/// restoration handles.
#[derive(Debug, Clone)]
pub struct DualProblem {
    pub kind: DualKind,
    /// Which construction produced it.
    pub provenance: String,
    /// Antipolar of the constraint set in primal space, when derivable.
    pub antipolar: Option<AntipolarDescr>,
    /// Set when the antipolar was only available as a closure.
    pub closure_flagged: bool,
    problem: GaugeProblem,
}

impl DualProblem {
    pub fn problem(&self) -> &GaugeProblem {
        &self.problem
    }

    /// Whether the dual couples a second variable block `z` (composed
    /// objective / conic side constraint form).
    pub fn has_coupling(&self) -> bool {
        self.kind == DualKind::Gauge
            && (self.problem.obj_map.is_some() || self.problem.cone.is_some())
    }

    /// Dimension of the dual variable: `m`, or `m + p` with coupling.
    pub fn dual_dim(&self) -> usize {
        match self.kind {
            DualKind::Bidual => self.problem.a.cols(),
            _ => {
                let m = self.problem.a.rows();
                if self.has_coupling() {
                    m + self.problem.kappa.dim()
                } else {
                    m
                }
            }
        }
    }

    fn split<'y>(&self, y: &'y [f64]) -> (&'y [f64], Option<&'y [f64]>) {
        if self.has_coupling() {
            let m = self.problem.a.rows();
            (&y[..m], Some(&y[m..]))
        } else {
            (y, None)
        }
    }

    /// Objective value at a dual point: `κ°(A*y)` (or `κ°(z)`) for the
    /// gauge dual, `⟨b,y⟩ − σρ°(y)` for the Lagrange dual (a maximization),
    /// `κ°°(x) = κ(x)` for the bidual.
    pub fn objective(&self, y: &[f64]) -> Result<f64, DualityError> {
        match self.kind {
            DualKind::Gauge => {
                let (yv, z) = self.split(y);
                match z {
                    None => Ok(self
                        .problem
                        .kappa
                        .polar_evaluate(&self.problem.a.adjoint_apply(yv))?),
                    Some(z) => Ok(self.problem.kappa.polar_evaluate(z)?),
                }
            }
            DualKind::Lagrange => self.lagrange_value(y),
            DualKind::Bidual => Ok(self.problem.kappa.evaluate(y)?),
        }
    }

    fn lagrange_value(&self, y: &[f64]) -> Result<f64, DualityError> {
        let ip = linalg::dot(&self.problem.b, y);
        if self.problem.sigma == 0.0 {
            return Ok(ip);
        }
        let pv = self.problem.rho.polar_evaluate(y)?;
        if !pv.is_finite() {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(ip - self.problem.sigma * pv)
    }

    /// The antipolar margin `t(y) = ⟨b,y⟩ − σρ°(y)`; gauge-dual feasibility
    /// is `t(y) ≥ 1`. For the Lagrange dual this returns `1 − κ°(A*y)`.
    pub fn constraint_margin(&self, y: &[f64]) -> Result<f64, DualityError> {
        match self.kind {
            DualKind::Gauge => {
                let (yv, _) = self.split(y);
                let ip = linalg::dot(&self.problem.b, yv);
                if self.problem.sigma == 0.0 {
                    return Ok(ip);
                }
                let pv = self.problem.rho.polar_evaluate(yv)?;
                if !pv.is_finite() {
                    return Ok(f64::NEG_INFINITY);
                }
                Ok(ip - self.problem.sigma * pv)
            }
            DualKind::Lagrange => {
                let pv = self
                    .problem
                    .kappa
                    .polar_evaluate(&self.problem.a.adjoint_apply(y))?;
                Ok(1.0 - pv)
            }
            DualKind::Bidual => Err(DualityError::Unsupported(
                "margin of a bidual constraint".into(),
            )),
        }
    }

    /// Residual of the conic coupling `D*z − A*y ∈ K*` (zero without
    /// coupling, infinity when the membership fails).
    pub fn coupling_residual(&self, y: &[f64]) -> Result<f64, DualityError> {
        if !self.has_coupling() {
            return Ok(0.0);
        }
        let (yv, z) = self.split(y);
        let z = z.expect("coupled form");
        let dz = match &self.problem.obj_map {
            Some(d) => d.adjoint_apply(z),
            None => z.to_vec(),
        };
        let ay = self.problem.a.adjoint_apply(yv);
        let w = linalg::sub(&dz, &ay);
        let ok = match &self.problem.cone {
            Some(k) => k.dual_contains(&w)?,
            // without a side constraint K = R^n, so K* = {0}
            None => linalg::norm_inf(&w) <= tol::MEMBERSHIP * (1.0 + linalg::norm_inf(&ay)),
        };
        Ok(if ok { 0.0 } else { f64::INFINITY })
    }

    /// Overall dual feasibility residual at `y`.
    pub fn feasibility_residual(&self, y: &[f64]) -> Result<f64, DualityError> {
        match self.kind {
            DualKind::Gauge => {
                let slack = (1.0 - self.constraint_margin(y)?).max(0.0);
                Ok(slack + self.coupling_residual(y)?)
            }
            DualKind::Lagrange => Ok((-self.constraint_margin(y)?).max(0.0)),
            DualKind::Bidual => {
                let cpp = SetDescr::ScaledUnion {
                    inner: Box::new(self.problem.constraint_set()),
                };
                Ok(if cpp.membership(y)? { 0.0 } else { f64::INFINITY })
            }
        }
    }

    pub fn feasible(&self, y: &[f64]) -> Result<bool, DualityError> {
        Ok(self.feasibility_residual(y)? <= tol::MEMBERSHIP)
    }

    /// Restores feasibility by positive rescaling: both sides of the
    /// antipolar constraint are positively homogeneous, so `y/t(y)` is
    /// feasible whenever the margin `t(y)` is positive. The coupling cone
    /// is invariant under the same scaling. Returns `None` when `t ≤ 0`.
    pub fn restore(&self, y: &[f64]) -> Result<Option<Vec<f64>>, DualityError> {
        if self.kind != DualKind::Gauge {
            return Err(DualityError::Unsupported(
                "restoration applies to the gauge dual".into(),
            ));
        }
        let t = self.constraint_margin(y)?;
        // non-positive or NaN margins are not restorable
        if t.is_nan() || t <= 0.0 {
            return Ok(None);
        }
        if t >= 1.0 {
            return Ok(Some(y.to_vec()));
        }
        Ok(Some(linalg::scaled(y, 1.0 / t)))
    }

    /// Exact Euclidean projection onto the halfspace `⟨b,y⟩ ≥ 1` used in
    /// the `σ = 0` specialization.
    pub fn halfspace_project(&self, y: &[f64]) -> Option<Vec<f64>> {
        if self.problem.sigma != 0.0 || self.kind != DualKind::Gauge || self.has_coupling() {
            return None;
        }
        let b = &self.problem.b;
        let ip = linalg::dot(b, y);
        let bb = linalg::dot(b, b);
        Some(linalg::axpy(y, (1.0 - ip).max(0.0) / bb, b))
    }

    /// One-line description of the constructed problem.
    pub fn summary(&self) -> String {
        let p = &self.problem;
        match self.kind {
            DualKind::Gauge => {
                let constraint = if p.sigma == 0.0 {
                    "⟨b,y⟩ ≥ 1".to_string()
                } else {
                    format!("⟨b,y⟩ − σ·{}(y) ≥ 1", p.rho.describe_polar())
                };
                if self.has_coupling() {
                    format!(
                        "min {}(z)  s.t.  {}, D*z − A*y ∈ K*",
                        p.kappa.describe_polar(),
                        constraint
                    )
                } else {
                    format!(
                        "min {}(A*y)  s.t.  {}",
                        p.kappa.describe_polar(),
                        constraint
                    )
                }
            }
            DualKind::Lagrange => {
                let obj = if p.sigma == 0.0 {
                    "⟨b,y⟩".to_string()
                } else {
                    format!("⟨b,y⟩ − σ·{}(y)", p.rho.describe_polar())
                };
                format!("max {obj}  s.t.  {}(A*y) ≤ 1", p.kappa.describe_polar())
            }
            DualKind::Bidual => format!(
                "min {}(x)  s.t.  x ∈ ∪_{{λ≥1}} λC",
                p.kappa.describe()
            ),
        }
    }
}

/// Builds the gauge dual. The antipolar qualification (polyhedral misfit
/// ball, or a declared relative-interior overlap) controls whether the
/// constructed dual is exact or closure-flagged.
pub fn build_gauge_dual(
    p: &GaugeProblem,
    assume: &Assumptions,
) -> Result<DualProblem, DualityError> {
    let exact = p.polyhedral_constraint() || assume.ri_constraint_overlap;
    let antipolar_descr = if p.cone.is_none() {
        Some(antipolar(&p.constraint_set(), assume.ri_constraint_overlap)?)
    } else {
        None
    };
    let provenance = if p.obj_map.is_some() || p.cone.is_some() {
        "gauge dual via the lifted conic form".to_string()
    } else if p.sigma == 0.0 {
        "gauge dual via the linear-constraint antipolar (sigma = 0)".to_string()
    } else {
        "gauge dual via the gauge-ball antipolar (sigma > 0)".to_string()
    };
    Ok(DualProblem {
        kind: DualKind::Gauge,
        provenance: if exact {
            provenance
        } else {
            format!("{provenance}; closure-flagged (no qualification declared)")
        },
        antipolar: antipolar_descr,
        closure_flagged: !exact,
        problem: p.clone(),
    })
}

/// Builds the Lagrange dual `max ⟨b,y⟩ − σρ°(y) s.t. κ°(A*y) ≤ 1` of the
/// plain form.
pub fn build_lagrange_dual(p: &GaugeProblem) -> Result<DualProblem, DualityError> {
    if p.obj_map.is_some() || p.cone.is_some() {
        return Err(DualityError::Unsupported(
            "Lagrange dual of the extended form".into(),
        ));
    }
    Ok(DualProblem {
        kind: DualKind::Lagrange,
        provenance: "Lagrange dual via the misfit support function".into(),
        antipolar: None,
        closure_flagged: false,
        problem: p.clone(),
    })
}

/// Builds the bidual `min κ°°(x) s.t. x ∈ ∪_{λ≥1} λC`, which always has
/// the primal's optimal value for closed `κ`.
pub fn build_bidual(p: &GaugeProblem) -> Result<DualProblem, DualityError> {
    if !p.kappa.is_closed() {
        return Err(DualityError::Invalid(
            "bidual construction needs a closed objective gauge".into(),
        ));
    }
    Ok(DualProblem {
        kind: DualKind::Bidual,
        provenance: "bidual via the scaled union of the constraint set".into(),
        antipolar: None,
        closure_flagged: false,
        problem: p.clone(),
    })
}

/// Primal-dual certificate: values, product, residuals, and the exact
/// strong-duality claim when the declared qualifications support one.
#[derive(Debug, Clone)]
pub struct DualityCertificate {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub primal_value: f64,
    pub dual_value: f64,
    /// `v_p · v_g`, reported only when both points are feasible.
    pub product: Option<f64>,
    pub primal_residual: f64,
    pub dual_residual: f64,
    /// Fenchel bookkeeping value `1/v_g`.
    pub fenchel_value: Option<f64>,
    /// Lagrange objective at `y`, when `y` is Lagrange-feasible.
    pub lagrange_value: Option<f64>,
    pub polyhedral_constraint: bool,
    pub assumptions: Assumptions,
    pub kappa_closed: bool,
    pub strong_duality_claim: Option<String>,
}

/// Evaluates a primal-dual pair against the gauge dual of `p`.
pub fn certify(
    p: &GaugeProblem,
    x: &[f64],
    y: &[f64],
    assume: &Assumptions,
) -> Result<DualityCertificate, DualityError> {
    let dual = build_gauge_dual(p, assume)?;
    let primal_value = p.primal_value(x)?;
    let dual_value = dual.objective(y)?;
    let primal_residual = p.primal_residual(x)?;
    let dual_residual = dual.feasibility_residual(y)?;
    let feasible = primal_residual <= tol::MEMBERSHIP && dual_residual <= tol::MEMBERSHIP;
    let product = if feasible && primal_value.is_finite() && dual_value.is_finite() {
        Some(primal_value * dual_value)
    } else {
        None
    };
    let fenchel_value = if dual_value.is_finite() && dual_value > 0.0 {
        Some(1.0 / dual_value)
    } else {
        None
    };
    let lagrange_value = if p.obj_map.is_none() && p.cone.is_none() {
        let lagrange = build_lagrange_dual(p)?;
        if lagrange.feasibility_residual(y)? <= tol::MEMBERSHIP {
            Some(lagrange.objective(y)?)
        } else {
            None
        }
    } else {
        None
    };
    let polyhedral = p.polyhedral_constraint();
    let kappa_closed = p.kappa.is_closed();
    let strong_duality_claim = if polyhedral
        && assume.ri_domain_overlap
        && assume.ri_polar_overlap
    {
        Some("strong duality (polyhedral constraint set, declared domain overlaps)".into())
    } else if kappa_closed
        && assume.ri_constraint_overlap
        && assume.ri_domain_overlap
        && assume.ri_polar_overlap
    {
        Some("strong duality (closed gauge, declared relative-interior overlaps)".into())
    } else {
        None
    };
    Ok(DualityCertificate {
        x: x.to_vec(),
        y: y.to_vec(),
        primal_value,
        dual_value,
        product,
        primal_residual,
        dual_residual,
        fenchel_value,
        lagrange_value,
        polyhedral_constraint: polyhedral,
        assumptions: *assume,
        kappa_closed,
        strong_duality_claim,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualSpace {
    Fenchel,
    Lagrange,
    Gauge,
}

/// Known optimal values used by the solution maps. The Fenchel and
/// Lagrange optimal values coincide; either determines the gauge value as
/// its reciprocal.
#[derive(Debug, Clone, Copy, Default)]
pub struct DualValues {
    pub lagrange: Option<f64>,
    pub fenchel: Option<f64>,
    pub gauge: Option<f64>,
}

impl DualValues {
    /// The common Lagrange/Fenchel optimal value.
    fn additive_value(&self) -> Option<f64> {
        self.lagrange
            .or(self.fenchel)
            .or_else(|| self.gauge.map(|v| 1.0 / v))
    }
}

/// Rescales an optimizer between the Fenchel, Lagrange, and gauge duals:
/// an additive-dual optimizer `y*` maps to the gauge-dual optimizer
/// `y*/v`, and conversely a gauge-dual optimizer maps to `v·y*`, where `v`
/// is the common Lagrange/Fenchel optimal value.
pub fn map_dual_solutions(
    y: &[f64],
    from: DualSpace,
    to: DualSpace,
    values: &DualValues,
) -> Result<Vec<f64>, DualityError> {
    let v = values
        .additive_value()
        .ok_or_else(|| DualityError::Invalid("no dual value supplied".into()))?;
    if !(v.is_finite() && v > 0.0) {
        return Err(DualityError::BadValue(v));
    }
    let factor = match (from, to) {
        (DualSpace::Gauge, DualSpace::Lagrange | DualSpace::Fenchel) => v,
        (DualSpace::Lagrange | DualSpace::Fenchel, DualSpace::Gauge) => 1.0 / v,
        _ => 1.0,
    };
    Ok(linalg::scaled(y, factor))
}
