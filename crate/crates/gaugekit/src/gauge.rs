//! Compositional gauge functions with exact polar evaluation.
//!
//! A gauge is a nonnegative, positively homogeneous convex function that
//! vanishes at the origin. The polar gauge is the tightest partner in the
//! inequality `⟨x,y⟩ ≤ κ(x)·κ°(y)`, equivalently
//! `κ°(y) = sup { ⟨x,y⟩ : κ(x) ≤ 1 }`.
//!
//! Supported constructors: weighted 1/2/∞ norms, atomic gauges over the
//! convex hull of a finite atom set, conic gauges `⟨c,x⟩ + δ_K(x)`, sums of
//! gauges on disjoint blocks, compositions `κ∘A`, Lovász extensions of
//! monotone submodular set functions restricted to the nonnegative orthant,
//! and epigraph indicators used internally by the duality builder.
//!
//! Infinite values are carried as `f64::INFINITY`, never as sentinel
//! magnitudes.

use thiserror::Error;

use crate::encode::{Aff, LpBuilder, NotPolyhedral};
use crate::linalg::{
    self, check_finite, gen_eigmax, least_squares, LinalgError, LinearMap, SymMatrix,
};
use crate::lp::{LpError, LpOutcome, Rel};
use crate::sets::SetDescr;
use crate::tol;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaugeError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid gauge construction: {0}")]
    Invalid(String),
    #[error("unsupported combination: {0}")]
    Unsupported(String),
    #[error("polar value is infinite at the given point")]
    InfinitePolar,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Lp(#[from] LpError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    One,
    Two,
    Inf,
}

// ---------------------------------------------------------------------------
// Set functions for the Lovász extension
// ---------------------------------------------------------------------------

/// Set function over a ground set `{0, …, n−1}`, tabulated by bitmask.
/// Construction rejects tables that are not normalized (`f(∅) = 0`),
/// non-decreasing, and submodular; the extension is convex exactly in the
/// submodular case.
#[derive(Debug, Clone, PartialEq)]
pub struct SetFunction {
    n: usize,
    table: Vec<f64>,
}

/// Largest supported ground set for [`SetFunction`].
pub const MAX_GROUND_SET: usize = 12;

impl SetFunction {
    pub fn new(n: usize, table: Vec<f64>) -> Result<Self, GaugeError> {
        if n == 0 || n > MAX_GROUND_SET {
            return Err(GaugeError::Invalid(format!(
                "ground set size {n} outside 1..={MAX_GROUND_SET}"
            )));
        }
        if table.len() != 1 << n {
            return Err(GaugeError::Invalid(format!(
                "table length {} must be 2^{n}",
                table.len()
            )));
        }
        check_finite(&table)?;
        if table[0] != 0.0 {
            return Err(GaugeError::Invalid("f(∅) must be 0".into()));
        }
        let scale: f64 = table.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        let slack = 1e-9 * (1.0 + scale);
        let full = 1usize << n;
        for mask in 0..full {
            for i in 0..n {
                if mask & (1 << i) == 0 && table[mask | (1 << i)] + slack < table[mask] {
                    return Err(GaugeError::Invalid(
                        "set function is not non-decreasing".into(),
                    ));
                }
            }
        }
        for a in 0..full {
            for b in a..full {
                if table[a] + table[b] + slack < table[a | b] + table[a & b] {
                    return Err(GaugeError::Invalid(
                        "set function is not submodular".into(),
                    ));
                }
            }
        }
        Ok(Self { n, table })
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn value(&self, mask: usize) -> f64 {
        self.table[mask]
    }
}

// ---------------------------------------------------------------------------
// Cones
// ---------------------------------------------------------------------------

/// Closed convex cone descriptor. `Psd(n)` lives in the full row-major
/// vectorization of symmetric `n × n` matrices, so its ambient dimension is
/// `n²` and the flat dot product equals the trace inner product.
#[derive(Debug, Clone, PartialEq)]
pub enum ConeDescr {
    NonnegOrthant(usize),
    Psd(usize),
    Zero(usize),
    Free(usize),
    Polyhedral { dim: usize, rays: Vec<Vec<f64>> },
}

impl ConeDescr {
    /// Ambient dimension of the cone.
    pub fn dim(&self) -> usize {
        match self {
            ConeDescr::NonnegOrthant(n) | ConeDescr::Zero(n) | ConeDescr::Free(n) => *n,
            ConeDescr::Psd(n) => n * n,
            ConeDescr::Polyhedral { dim, .. } => *dim,
        }
    }

    pub fn is_polyhedral(&self) -> bool {
        !matches!(self, ConeDescr::Psd(_))
    }

    fn check_dim(&self, x: &[f64]) -> Result<(), GaugeError> {
        if x.len() != self.dim() {
            return Err(GaugeError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Membership `x ∈ K` within tolerance.
    pub fn contains(&self, x: &[f64]) -> Result<bool, GaugeError> {
        self.check_dim(x)?;
        let scale = 1.0 + linalg::norm_inf(x);
        let eps = tol::MEMBERSHIP * scale;
        match self {
            ConeDescr::NonnegOrthant(_) => Ok(x.iter().all(|&v| v >= -eps)),
            ConeDescr::Zero(_) => Ok(linalg::norm_inf(x) <= eps),
            ConeDescr::Free(_) => Ok(true),
            ConeDescr::Psd(n) => {
                for i in 0..*n {
                    for j in (i + 1)..*n {
                        if (x[i * n + j] - x[j * n + i]).abs() > eps {
                            return Ok(false);
                        }
                    }
                }
                let m = SymMatrix::from_flat_symmetrized(*n, x)?;
                Ok(m.min_eigenvalue()? >= -eps * (1.0 + m.frobenius()))
            }
            ConeDescr::Polyhedral { .. } => {
                let mut lp = LpBuilder::new();
                let xs: Vec<Aff> = x.iter().map(|&v| Aff::constant(v)).collect();
                match cone_rows(self, &xs, &mut lp) {
                    Ok(()) => Ok(lp.feasible(eps)?),
                    Err(_) => unreachable!("polyhedral cones encode"),
                }
            }
        }
    }

    /// Membership in the dual cone `K* = { s : ⟨s,x⟩ ≥ 0 ∀x ∈ K }`.
    pub fn dual_contains(&self, s: &[f64]) -> Result<bool, GaugeError> {
        self.check_dim(s)?;
        let scale = 1.0 + linalg::norm_inf(s);
        let eps = tol::MEMBERSHIP * scale;
        match self {
            ConeDescr::NonnegOrthant(_) => Ok(s.iter().all(|&v| v >= -eps)),
            ConeDescr::Zero(_) => Ok(true),
            ConeDescr::Free(_) => Ok(linalg::norm_inf(s) <= eps),
            ConeDescr::Psd(_) => self.contains(s),
            ConeDescr::Polyhedral { rays, .. } => Ok(rays.iter().all(|r| {
                linalg::dot(s, r) >= -eps * (1.0 + linalg::norm_inf(r))
            })),
        }
    }
}

// ---------------------------------------------------------------------------
// Gauges
// ---------------------------------------------------------------------------

/// Compositional gauge description. Use the constructor methods; they
/// validate the invariants each variant relies on (strictly positive norm
/// weights, `c ∈ K*` for conic gauges, submodularity for Lovász tables).
#[derive(Debug, Clone, PartialEq)]
pub enum Gauge {
    Norm {
        kind: NormKind,
        dim: usize,
        weights: Option<Vec<f64>>,
    },
    Atomic {
        atoms: Vec<Vec<f64>>,
    },
    ConicLinear {
        c: Vec<f64>,
        cone: ConeDescr,
    },
    Sum {
        parts: Vec<Gauge>,
    },
    Composed {
        inner: Box<Gauge>,
        map: LinearMap,
    },
    Lovasz {
        f: SetFunction,
    },
    EpigraphIndicator {
        rho: Box<Gauge>,
    },
}

impl Gauge {
    pub fn norm(kind: NormKind, dim: usize) -> Gauge {
        Gauge::Norm {
            kind,
            dim,
            weights: None,
        }
    }

    /// Weighted norm `x ↦ ‖diag(w)·x‖`; weights must be strictly positive
    /// so the gauge vanishes only at the origin.
    pub fn weighted_norm(kind: NormKind, weights: Vec<f64>) -> Result<Gauge, GaugeError> {
        check_finite(&weights)?;
        if weights.is_empty() || weights.iter().any(|&w| w <= 0.0) {
            return Err(GaugeError::Invalid(
                "norm weights must be strictly positive".into(),
            ));
        }
        Ok(Gauge::Norm {
            kind,
            dim: weights.len(),
            weights: Some(weights),
        })
    }

    /// Gauge of the convex hull of a finite atom set.
    pub fn atomic(atoms: Vec<Vec<f64>>) -> Result<Gauge, GaugeError> {
        let dim = atoms.first().map_or(0, |a| a.len());
        if dim == 0 {
            return Err(GaugeError::Invalid("atomic gauge needs atoms".into()));
        }
        for a in &atoms {
            if a.len() != dim {
                return Err(GaugeError::DimensionMismatch {
                    expected: dim,
                    got: a.len(),
                });
            }
            check_finite(a)?;
        }
        Ok(Gauge::Atomic { atoms })
    }

    /// Conic gauge `x ↦ ⟨c,x⟩ + δ_K(x)`, which is a gauge when `c ∈ K*`.
    pub fn conic(c: Vec<f64>, cone: ConeDescr) -> Result<Gauge, GaugeError> {
        check_finite(&c)?;
        if c.len() != cone.dim() {
            return Err(GaugeError::DimensionMismatch {
                expected: cone.dim(),
                got: c.len(),
            });
        }
        if !cone.dual_contains(&c)? {
            return Err(GaugeError::Invalid(
                "conic gauge requires c in the dual cone".into(),
            ));
        }
        Ok(Gauge::ConicLinear { c, cone })
    }

    /// Conic gauge over the PSD cone with objective matrix `c`.
    pub fn conic_psd(c: &SymMatrix) -> Result<Gauge, GaugeError> {
        Gauge::conic(c.as_flat().to_vec(), ConeDescr::Psd(c.order()))
    }

    /// Sum of gauges on consecutive disjoint variable blocks.
    pub fn sum(parts: Vec<Gauge>) -> Result<Gauge, GaugeError> {
        if parts.is_empty() {
            return Err(GaugeError::Invalid("sum needs at least one part".into()));
        }
        Ok(Gauge::Sum { parts })
    }

    /// Composition `x ↦ inner(map · x)`.
    pub fn composed(inner: Gauge, map: LinearMap) -> Result<Gauge, GaugeError> {
        if inner.dim() != map.rows() {
            return Err(GaugeError::DimensionMismatch {
                expected: inner.dim(),
                got: map.rows(),
            });
        }
        Ok(Gauge::Composed {
            inner: Box::new(inner),
            map,
        })
    }

    /// Lovász extension of `f` plus the indicator of the nonnegative orthant.
    pub fn lovasz(f: SetFunction) -> Gauge {
        Gauge::Lovasz { f }
    }

    /// Indicator of the epigraph of `rho`, on variables `(r, τ)`.
    pub fn epigraph_indicator(rho: Gauge) -> Gauge {
        Gauge::EpigraphIndicator { rho: Box::new(rho) }
    }

    /// Ambient dimension of the argument.
    pub fn dim(&self) -> usize {
        match self {
            Gauge::Norm { dim, .. } => *dim,
            Gauge::Atomic { atoms } => atoms[0].len(),
            Gauge::ConicLinear { c, .. } => c.len(),
            Gauge::Sum { parts } => parts.iter().map(|p| p.dim()).sum(),
            Gauge::Composed { map, .. } => map.cols(),
            Gauge::Lovasz { f } => f.ground_size(),
            Gauge::EpigraphIndicator { rho } => rho.dim() + 1,
        }
    }

    /// All supported variants are closed (lower semicontinuous): norms are
    /// continuous, atom hulls are compact polytopes, the cones are closed,
    /// and closedness is preserved by sums on disjoint blocks, linear
    /// pre-composition, and epigraph indicators of closed gauges.
    pub fn is_closed(&self) -> bool {
        true
    }

    /// Whether the level sets of the gauge admit an exact LP encoding.
    pub fn is_polyhedral(&self) -> bool {
        let mut lp = LpBuilder::new();
        let v: Vec<Aff> = (0..self.dim()).map(|_| Aff::constant(0.0)).collect();
        gauge_level_rows(self, &v, &Aff::constant(0.0), &mut lp).is_ok()
    }

    /// Whether the polar's level sets admit an exact LP encoding.
    pub fn polar_is_polyhedral(&self) -> bool {
        let mut lp = LpBuilder::new();
        let v: Vec<Aff> = (0..self.dim()).map(|_| Aff::constant(0.0)).collect();
        polar_level_rows(self, &v, &Aff::constant(0.0), &mut lp).is_ok()
    }

    fn check_dim(&self, x: &[f64]) -> Result<(), GaugeError> {
        if x.len() != self.dim() {
            return Err(GaugeError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Evaluates `κ(x)`; the value is `+∞` outside the domain.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64, GaugeError> {
        self.check_dim(x)?;
        check_finite(x)?;
        match self {
            Gauge::Norm { kind, weights, .. } => {
                let it = x.iter().enumerate().map(|(i, &v)| {
                    let w = weights.as_ref().map_or(1.0, |w| w[i]);
                    w * v
                });
                Ok(match kind {
                    NormKind::One => it.map(f64::abs).sum(),
                    NormKind::Two => it.map(|v| v * v).sum::<f64>().sqrt(),
                    NormKind::Inf => it.fold(0.0_f64, |m, v| m.max(v.abs())),
                })
            }
            Gauge::Atomic { atoms } => {
                if linalg::norm_inf(x) == 0.0 {
                    return Ok(0.0);
                }
                // min Σ μ_j  s.t.  Σ μ_j a_j = x,  μ ≥ 0
                let mut lp = LpBuilder::new();
                let mu = lp.add_nonneg_vars(atoms.len());
                for (i, &xi) in x.iter().enumerate() {
                    let lhs = Aff {
                        terms: atoms
                            .iter()
                            .enumerate()
                            .filter(|(_, a)| a[i] != 0.0)
                            .map(|(j, a)| (mu + j, a[i]))
                            .collect(),
                        constant: 0.0,
                    };
                    lp.constrain(&lhs, Rel::Eq, &Aff::constant(xi));
                }
                let total = Aff {
                    terms: (0..atoms.len()).map(|j| (mu + j, 1.0)).collect(),
                    constant: 0.0,
                };
                lp.minimize(&total);
                match lp.solve()? {
                    LpOutcome::Optimal { value, .. } => Ok(value.max(0.0)),
                    LpOutcome::Infeasible => Ok(f64::INFINITY),
                    LpOutcome::Unbounded => unreachable!("objective bounded below by 0"),
                }
            }
            Gauge::ConicLinear { c, cone } => {
                if cone.contains(x)? {
                    Ok(linalg::dot(c, x).max(0.0))
                } else {
                    Ok(f64::INFINITY)
                }
            }
            Gauge::Sum { parts } => {
                let mut total = 0.0;
                let mut off = 0;
                for p in parts {
                    let d = p.dim();
                    total += p.evaluate(&x[off..off + d])?;
                    off += d;
                }
                Ok(total)
            }
            Gauge::Composed { inner, map } => inner.evaluate(&map.apply(x)),
            Gauge::Lovasz { f } => {
                let eps = tol::MEMBERSHIP * (1.0 + linalg::norm_inf(x));
                if x.iter().any(|&v| v < -eps) {
                    return Ok(f64::INFINITY);
                }
                let n = f.ground_size();
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by(|&i, &j| x[j].partial_cmp(&x[i]).unwrap().then(i.cmp(&j)));
                let mut mask = 0usize;
                let mut prev = 0.0;
                let mut total = 0.0;
                for &j in &order {
                    mask |= 1 << j;
                    let fv = f.value(mask);
                    total += x[j].max(0.0) * (fv - prev);
                    prev = fv;
                }
                Ok(total)
            }
            Gauge::EpigraphIndicator { rho } => {
                let (r, tau) = x.split_at(rho.dim());
                let val = rho.evaluate(r)?;
                let eps = tol::MEMBERSHIP * (1.0 + tau[0].abs());
                Ok(if val <= tau[0] + eps { 0.0 } else { f64::INFINITY })
            }
        }
    }

    /// Evaluates the polar `κ°(y) = sup { ⟨x,y⟩ : κ(x) ≤ 1 }`.
    pub fn polar_evaluate(&self, y: &[f64]) -> Result<f64, GaugeError> {
        self.check_dim(y)?;
        check_finite(y)?;
        match self {
            Gauge::Norm { kind, weights, .. } => {
                let it = y.iter().enumerate().map(|(i, &v)| {
                    let w = weights.as_ref().map_or(1.0, |w| w[i]);
                    v / w
                });
                Ok(match kind {
                    NormKind::One => it.fold(0.0_f64, |m, v| m.max(v.abs())),
                    NormKind::Two => it.map(|v| v * v).sum::<f64>().sqrt(),
                    NormKind::Inf => it.map(f64::abs).sum(),
                })
            }
            // support function of conv({0} ∪ atoms)
            Gauge::Atomic { atoms } => Ok(atoms
                .iter()
                .map(|a| linalg::dot(y, a))
                .fold(0.0_f64, f64::max)),
            Gauge::ConicLinear { c, cone } => conic_polar_value(c, cone, y),
            Gauge::Sum { parts } => {
                let mut best = 0.0_f64;
                let mut off = 0;
                for p in parts {
                    let d = p.dim();
                    best = best.max(p.polar_evaluate(&y[off..off + d])?);
                    off += d;
                }
                Ok(best)
            }
            Gauge::Composed { inner, map } => composed_polar(inner, map, y).map(|(v, _)| v),
            Gauge::Lovasz { f } => {
                let n = f.ground_size();
                let scale = 1.0 + linalg::norm_inf(y);
                let mut best = 0.0_f64;
                for mask in 1usize..(1 << n) {
                    let ip: f64 = (0..n)
                        .filter(|i| mask & (1 << i) != 0)
                        .map(|i| y[i])
                        .sum();
                    let fv = f.value(mask);
                    if fv <= 1e-12 * scale {
                        if ip > 1e-12 * scale {
                            return Ok(f64::INFINITY);
                        }
                    } else {
                        best = best.max(ip / fv);
                    }
                }
                Ok(best)
            }
            Gauge::EpigraphIndicator { rho } => {
                let (yr, alpha) = y.split_at(rho.dim());
                let pv = rho.polar_evaluate(yr)?;
                let eps = tol::MEMBERSHIP * (1.0 + alpha[0].abs());
                Ok(if pv <= -alpha[0] + eps {
                    0.0
                } else {
                    f64::INFINITY
                })
            }
        }
    }

    /// A maximizer `x*` of `sup { ⟨x,y⟩ : κ(x) ≤ 1 }`, which is a
    /// subgradient of `κ°` at `y`. Ties break toward the lowest index.
    pub fn polar_subgradient(&self, y: &[f64]) -> Result<Vec<f64>, GaugeError> {
        self.check_dim(y)?;
        check_finite(y)?;
        let polar = self.polar_evaluate(y)?;
        if !polar.is_finite() {
            return Err(GaugeError::InfinitePolar);
        }
        match self {
            Gauge::Norm { kind, weights, .. } => {
                let w = |i: usize| weights.as_ref().map_or(1.0, |w| w[i]);
                let n = y.len();
                Ok(match kind {
                    NormKind::One => {
                        let mut best = 0usize;
                        for i in 1..n {
                            if y[i].abs() / w(i) > y[best].abs() / w(best) {
                                best = i;
                            }
                        }
                        let mut x = vec![0.0; n];
                        if y[best] != 0.0 {
                            x[best] = y[best].signum() / w(best);
                        }
                        x
                    }
                    NormKind::Two => {
                        if polar == 0.0 {
                            vec![0.0; n]
                        } else {
                            (0..n).map(|i| y[i] / (w(i) * w(i) * polar)).collect()
                        }
                    }
                    NormKind::Inf => (0..n)
                        .map(|i| {
                            if y[i] == 0.0 {
                                0.0
                            } else {
                                y[i].signum() / w(i)
                            }
                        })
                        .collect(),
                })
            }
            Gauge::Atomic { atoms } => {
                let mut best: Option<(usize, f64)> = None;
                for (j, a) in atoms.iter().enumerate() {
                    let v = linalg::dot(y, a);
                    if best.is_none_or(|(_, bv)| v > bv) {
                        best = Some((j, v));
                    }
                }
                match best {
                    Some((j, v)) if v > 0.0 => Ok(atoms[j].clone()),
                    _ => Ok(vec![0.0; y.len()]),
                }
            }
            Gauge::ConicLinear { c, cone } => conic_polar_subgradient(c, cone, y),
            Gauge::Sum { parts } => {
                let mut best_val = 0.0_f64;
                let mut best_idx = None;
                let mut off = 0;
                for (k, p) in parts.iter().enumerate() {
                    let d = p.dim();
                    let v = p.polar_evaluate(&y[off..off + d])?;
                    if v > best_val {
                        best_val = v;
                        best_idx = Some((k, off, d));
                    }
                    off += d;
                }
                let mut x = vec![0.0; y.len()];
                if let Some((k, off, d)) = best_idx {
                    let sub = parts[k].polar_subgradient(&y[off..off + d])?;
                    x[off..off + d].copy_from_slice(&sub);
                }
                Ok(x)
            }
            Gauge::Composed { inner, map } => composed_polar_subgradient(inner, map, y),
            Gauge::Lovasz { f } => {
                let n = f.ground_size();
                let scale = 1.0 + linalg::norm_inf(y);
                let mut best: Option<(usize, f64)> = None;
                for mask in 1usize..(1 << n) {
                    let fv = f.value(mask);
                    if fv <= 1e-12 * scale {
                        continue;
                    }
                    let ip: f64 = (0..n)
                        .filter(|i| mask & (1 << i) != 0)
                        .map(|i| y[i])
                        .sum();
                    let v = ip / fv;
                    if best.is_none_or(|(_, bv)| v > bv) {
                        best = Some((mask, v));
                    }
                }
                match best {
                    Some((mask, v)) if v > 0.0 => {
                        let fv = f.value(mask);
                        Ok((0..n)
                            .map(|i| if mask & (1 << i) != 0 { 1.0 / fv } else { 0.0 })
                            .collect())
                    }
                    _ => Ok(vec![0.0; n]),
                }
            }
            // the supremum defining the polar of an epigraph indicator is
            // attained at the origin whenever it is finite
            Gauge::EpigraphIndicator { .. } => Ok(vec![0.0; y.len()]),
        }
    }

    /// Checks the polar inequality `⟨x,y⟩ ≤ κ(x)·κ°(y)` within tolerance.
    /// Infinite factors satisfy it vacuously.
    pub fn check_polar_inequality(&self, x: &[f64], y: &[f64]) -> Result<bool, GaugeError> {
        let kx = self.evaluate(x)?;
        let py = self.polar_evaluate(y)?;
        if !kx.is_finite() || !py.is_finite() {
            return Ok(true);
        }
        let ip = linalg::dot(x, y);
        Ok(ip <= kx * py + tol::POLAR_INEQ * (1.0 + ip.abs()))
    }

    /// Evaluates the bipolar `κ°°(x) = sup { ⟨x,y⟩ : κ°(y) ≤ 1 }` through
    /// the support-function route, independently of `evaluate`.
    pub fn bipolar_evaluate(&self, x: &[f64]) -> Result<f64, GaugeError> {
        self.check_dim(x)?;
        if let Gauge::Norm { .. } = self {
            // self-route for the non-polyhedral two-norm: the polar of the
            // polar norm is the norm itself
            if matches!(
                self,
                Gauge::Norm {
                    kind: NormKind::Two,
                    ..
                }
            ) {
                return self.evaluate(x);
            }
        }
        let mut lp = LpBuilder::new();
        let yv = lp.add_vars(self.dim());
        let ys: Vec<Aff> = (0..self.dim()).map(|i| Aff::var(yv + i)).collect();
        polar_level_rows(self, &ys, &Aff::constant(1.0), &mut lp)
            .map_err(|e| GaugeError::Unsupported(format!("bipolar via LP: {}", e.0)))?;
        let obj = Aff::combination(x, &ys, 0.0);
        lp.minimize(&obj.scaled(-1.0));
        match lp.solve()? {
            LpOutcome::Optimal { value, .. } => Ok((-value).max(0.0)),
            LpOutcome::Unbounded => Ok(f64::INFINITY),
            LpOutcome::Infeasible => unreachable!("polar level set contains 0"),
        }
    }

    /// Short human-readable description.
    pub fn describe(&self) -> String {
        match self {
            Gauge::Norm { kind, weights, .. } => {
                let base = match kind {
                    NormKind::One => "‖·‖₁",
                    NormKind::Two => "‖·‖₂",
                    NormKind::Inf => "‖·‖∞",
                };
                if weights.is_some() {
                    format!("{base} (weighted)")
                } else {
                    base.into()
                }
            }
            Gauge::Atomic { atoms } => format!("atomic({} atoms)", atoms.len()),
            Gauge::ConicLinear { cone, .. } => match cone {
                ConeDescr::Psd(n) => format!("⟨C,·⟩+δ_PSD({n})"),
                ConeDescr::NonnegOrthant(_) => "⟨c,·⟩+δ_≥0".into(),
                _ => "⟨c,·⟩+δ_K".into(),
            },
            Gauge::Sum { parts } => parts
                .iter()
                .map(|p| p.describe())
                .collect::<Vec<_>>()
                .join(" ⊕ "),
            Gauge::Composed { inner, .. } => format!("{}∘A", inner.describe()),
            Gauge::Lovasz { f } => format!("lovász(n={})", f.ground_size()),
            Gauge::EpigraphIndicator { rho } => format!("δ_epi({})", rho.describe()),
        }
    }

    /// Description of the polar gauge.
    pub fn describe_polar(&self) -> String {
        match self {
            Gauge::Norm { kind, weights, .. } => {
                let base = match kind {
                    NormKind::One => "‖·‖∞",
                    NormKind::Two => "‖·‖₂",
                    NormKind::Inf => "‖·‖₁",
                };
                if weights.is_some() {
                    format!("{base} (weighted)")
                } else {
                    base.into()
                }
            }
            Gauge::Atomic { .. } => "support(conv({0}∪atoms))".into(),
            Gauge::ConicLinear { cone, .. } => match cone {
                ConeDescr::Psd(_) => "max(0, λmax(·, C))".into(),
                _ => "inf{α≥0 | αc ∈ K*+·}".into(),
            },
            Gauge::Sum { parts } => format!(
                "max({})",
                parts
                    .iter()
                    .map(|p| p.describe_polar())
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
            Gauge::Composed { inner, .. } => {
                format!("inf{{{}(u) | A*u = ·}}", inner.describe_polar())
            }
            Gauge::Lovasz { .. } => "support(level-set vertices)".into(),
            Gauge::EpigraphIndicator { rho } => format!("δ_epi({}°)", rho.describe()),
        }
    }
}

/// `κ°(u) = inf { α ≥ 0 : αc − u ∈ K* }` for the conic gauge.
fn conic_polar_value(c: &[f64], cone: &ConeDescr, u: &[f64]) -> Result<f64, GaugeError> {
    let scale = 1.0 + linalg::norm_inf(u);
    match cone {
        ConeDescr::NonnegOrthant(_) => {
            let mut alpha = 0.0_f64;
            for i in 0..c.len() {
                if c[i] > 0.0 {
                    alpha = alpha.max(u[i] / c[i]);
                } else if u[i] > 1e-12 * scale {
                    return Ok(f64::INFINITY);
                }
            }
            Ok(alpha)
        }
        ConeDescr::Psd(n) => {
            let cm = SymMatrix::from_flat_symmetrized(*n, c)?;
            let um = SymMatrix::from_flat_symmetrized(*n, u)?;
            let g = gen_eigmax(&um, &cm)?;
            Ok(g.value.max(0.0))
        }
        ConeDescr::Zero(_) => Ok(0.0),
        ConeDescr::Free(_) => {
            // c = 0 after validation, so the polar is the indicator of {0}
            Ok(if linalg::norm_inf(u) <= 1e-12 * scale {
                0.0
            } else {
                f64::INFINITY
            })
        }
        ConeDescr::Polyhedral { rays, .. } => {
            let mut alpha = 0.0_f64;
            for r in rays {
                let cr = linalg::dot(c, r);
                let ur = linalg::dot(u, r);
                let rscale = 1e-12 * (1.0 + linalg::norm_inf(r)) * scale;
                if cr > rscale {
                    alpha = alpha.max(ur / cr);
                } else if ur > rscale {
                    return Ok(f64::INFINITY);
                }
            }
            Ok(alpha)
        }
    }
}

fn conic_polar_subgradient(
    c: &[f64],
    cone: &ConeDescr,
    u: &[f64],
) -> Result<Vec<f64>, GaugeError> {
    let n = u.len();
    match cone {
        ConeDescr::NonnegOrthant(_) => {
            let mut best: Option<(usize, f64)> = None;
            for i in 0..n {
                if c[i] > 0.0 {
                    let v = u[i] / c[i];
                    if best.is_none_or(|(_, bv)| v > bv) {
                        best = Some((i, v));
                    }
                }
            }
            let mut x = vec![0.0; n];
            if let Some((i, v)) = best {
                if v > 0.0 {
                    x[i] = 1.0 / c[i];
                }
            }
            Ok(x)
        }
        ConeDescr::Psd(order) => {
            let cm = SymMatrix::from_flat_symmetrized(*order, c)?;
            let um = SymMatrix::from_flat_symmetrized(*order, u)?;
            let g = gen_eigmax(&um, &cm)?;
            if !g.value.is_finite() || g.value <= 0.0 {
                return Ok(vec![0.0; n]);
            }
            let v = &g.vector;
            let denom = linalg::dot(v, &cm.matvec(v));
            let mut x = vec![0.0; n];
            for i in 0..*order {
                for j in 0..*order {
                    x[i * order + j] = v[i] * v[j] / denom;
                }
            }
            Ok(x)
        }
        ConeDescr::Zero(_) | ConeDescr::Free(_) => Ok(vec![0.0; n]),
        ConeDescr::Polyhedral { rays, .. } => {
            let mut best: Option<(usize, f64)> = None;
            for (j, r) in rays.iter().enumerate() {
                let cr = linalg::dot(c, r);
                if cr > 1e-12 * (1.0 + linalg::norm_inf(r)) {
                    let v = linalg::dot(u, r) / cr;
                    if best.is_none_or(|(_, bv)| v > bv) {
                        best = Some((j, v));
                    }
                }
            }
            match best {
                Some((j, v)) if v > 0.0 => {
                    let cr = linalg::dot(c, &rays[j]);
                    Ok(rays[j].iter().map(|&ri| ri / cr).collect())
                }
                _ => Ok(vec![0.0; n]),
            }
        }
    }
}

/// Polar of `inner ∘ map` at `y`: `inf { inner°(u) : map* u = y }`, together
/// with an attaining `u` when one is computed. Requires either an LP
/// encoding of the inner polar or a Euclidean inner norm; the
/// relative-interior qualification for other variants is a caller
/// obligation.
fn composed_polar(
    inner: &Gauge,
    map: &LinearMap,
    y: &[f64],
) -> Result<(f64, Option<Vec<f64>>), GaugeError> {
    // Euclidean inner norm: minimum-norm solution of the adjoint equation
    if let Gauge::Norm {
        kind: NormKind::Two,
        weights,
        ..
    } = inner
    {
        let r = map.rows();
        // with u = W v the constraint map* u = y becomes (W∘map)ᵀ v = y
        let b = match weights {
            None => map.clone(),
            Some(w) => {
                let mut rows = Vec::with_capacity(r);
                for i in 0..r {
                    rows.push(map.row(i).iter().map(|&c| w[i] * c).collect::<Vec<_>>());
                }
                LinearMap::from_rows(&rows)?
            }
        };
        let bt = b.adjoint();
        let v = least_squares(&bt, y)?;
        let resid = linalg::sub(&bt.apply(&v), y);
        if linalg::norm_inf(&resid) > 1e-8 * (1.0 + linalg::norm_inf(y)) {
            return Ok((f64::INFINITY, None));
        }
        let u: Vec<f64> = match weights {
            None => v.clone(),
            Some(w) => v.iter().zip(w).map(|(&vi, &wi)| wi * vi).collect(),
        };
        return Ok((linalg::norm2(&v), Some(u)));
    }

    let mut lp = LpBuilder::new();
    let uv = lp.add_vars(map.rows());
    let s = lp.add_nonneg_vars(1);
    let us: Vec<Aff> = (0..map.rows()).map(|i| Aff::var(uv + i)).collect();
    // (map* u)_j = y_j
    for j in 0..map.cols() {
        let col: Vec<f64> = (0..map.rows()).map(|i| map.get(i, j)).collect();
        let lhs = Aff::combination(&col, &us, 0.0);
        lp.constrain(&lhs, Rel::Eq, &Aff::constant(y[j]));
    }
    polar_level_rows(inner, &us, &Aff::var(s), &mut lp)
        .map_err(|e| GaugeError::Unsupported(format!("polar of composition: {}", e.0)))?;
    lp.minimize(&Aff::var(s));
    match lp.solve()? {
        LpOutcome::Optimal { value, point } => {
            let u = point[uv..uv + map.rows()].to_vec();
            Ok((value.max(0.0), Some(u)))
        }
        LpOutcome::Infeasible => Ok((f64::INFINITY, None)),
        LpOutcome::Unbounded => unreachable!("polar objective bounded below by 0"),
    }
}

/// Maximizer of `⟨x,y⟩` over `inner(map x) ≤ 1`.
fn composed_polar_subgradient(
    inner: &Gauge,
    map: &LinearMap,
    y: &[f64],
) -> Result<Vec<f64>, GaugeError> {
    if let Gauge::Norm {
        kind: NormKind::Two,
        weights,
        ..
    } = inner
    {
        let r = map.rows();
        let b = match weights {
            None => map.clone(),
            Some(w) => {
                let mut rows = Vec::with_capacity(r);
                for i in 0..r {
                    rows.push(map.row(i).iter().map(|&c| w[i] * c).collect::<Vec<_>>());
                }
                LinearMap::from_rows(&rows)?
            }
        };
        let bt = b.adjoint();
        let ustar = least_squares(&bt, y)?;
        let nrm = linalg::norm2(&ustar);
        if nrm == 0.0 {
            return Ok(vec![0.0; y.len()]);
        }
        let target = linalg::scaled(&ustar, 1.0 / nrm);
        return Ok(least_squares(&b, &target)?);
    }

    let mut lp = LpBuilder::new();
    let xv = lp.add_vars(map.cols());
    let xs: Vec<Aff> = (0..map.cols()).map(|i| Aff::var(xv + i)).collect();
    let mapped: Vec<Aff> = (0..map.rows())
        .map(|i| Aff::combination(map.row(i), &xs, 0.0))
        .collect();
    gauge_level_rows(inner, &mapped, &Aff::constant(1.0), &mut lp)
        .map_err(|e| GaugeError::Unsupported(format!("composed subgradient: {}", e.0)))?;
    let obj = Aff::combination(y, &xs, 0.0);
    lp.minimize(&obj.scaled(-1.0));
    match lp.solve()? {
        LpOutcome::Optimal { point, .. } => Ok(point[xv..xv + map.cols()].to_vec()),
        LpOutcome::Unbounded => Err(GaugeError::InfinitePolar),
        LpOutcome::Infeasible => unreachable!("level set contains 0"),
    }
}

// ---------------------------------------------------------------------------
// LP row encodings (polyhedral variants only)
// ---------------------------------------------------------------------------

/// Emits rows enforcing `v ∈ K`.
pub(crate) fn cone_rows(
    cone: &ConeDescr,
    v: &[Aff],
    lp: &mut LpBuilder,
) -> Result<(), NotPolyhedral> {
    match cone {
        ConeDescr::NonnegOrthant(_) => {
            for e in v {
                lp.constrain(e, Rel::Ge, &Aff::constant(0.0));
            }
            Ok(())
        }
        ConeDescr::Zero(_) => {
            for e in v {
                lp.constrain(e, Rel::Eq, &Aff::constant(0.0));
            }
            Ok(())
        }
        ConeDescr::Free(_) => Ok(()),
        ConeDescr::Polyhedral { rays, .. } => {
            let mu = lp.add_nonneg_vars(rays.len());
            for (i, e) in v.iter().enumerate() {
                let lhs = Aff {
                    terms: rays
                        .iter()
                        .enumerate()
                        .filter(|(_, r)| r[i] != 0.0)
                        .map(|(j, r)| (mu + j, r[i]))
                        .collect(),
                    constant: 0.0,
                };
                lp.constrain(e, Rel::Eq, &lhs);
            }
            Ok(())
        }
        ConeDescr::Psd(_) => Err(NotPolyhedral("PSD cone membership")),
    }
}

/// Emits rows enforcing `w ∈ K*`.
pub(crate) fn dual_cone_rows(
    cone: &ConeDescr,
    w: &[Aff],
    lp: &mut LpBuilder,
) -> Result<(), NotPolyhedral> {
    match cone {
        ConeDescr::NonnegOrthant(_) => {
            for e in w {
                lp.constrain(e, Rel::Ge, &Aff::constant(0.0));
            }
            Ok(())
        }
        ConeDescr::Zero(_) => Ok(()),
        ConeDescr::Free(_) => {
            for e in w {
                lp.constrain(e, Rel::Eq, &Aff::constant(0.0));
            }
            Ok(())
        }
        ConeDescr::Polyhedral { rays, .. } => {
            for r in rays {
                let lhs = Aff::combination(r, w, 0.0);
                lp.constrain(&lhs, Rel::Ge, &Aff::constant(0.0));
            }
            Ok(())
        }
        ConeDescr::Psd(_) => Err(NotPolyhedral("PSD dual-cone membership")),
    }
}

/// Lovász ground sets above this size are refused in LP encodings.
const MAX_LOVASZ_LP: usize = 8;

/// Emits rows enforcing `κ(v) ≤ s` for affine expressions `v`, `s`.
pub(crate) fn gauge_level_rows(
    g: &Gauge,
    v: &[Aff],
    s: &Aff,
    lp: &mut LpBuilder,
) -> Result<(), NotPolyhedral> {
    debug_assert_eq!(v.len(), g.dim());
    match g {
        Gauge::Norm { kind, weights, .. } => {
            let w = |i: usize| weights.as_ref().map_or(1.0, |w| w[i]);
            match kind {
                NormKind::One => {
                    // v_i = p_i − q_i, Σ w_i (p_i + q_i) ≤ s
                    let p = lp.add_nonneg_vars(v.len());
                    let q = lp.add_nonneg_vars(v.len());
                    let mut total = Aff::constant(0.0);
                    for (i, e) in v.iter().enumerate() {
                        let split = Aff::var(p + i).minus(&Aff::var(q + i));
                        lp.constrain(e, Rel::Eq, &split);
                        total = total.plus(
                            &Aff::var(p + i).plus(&Aff::var(q + i)).scaled(w(i)),
                        );
                    }
                    lp.constrain(&total, Rel::Le, s);
                    Ok(())
                }
                NormKind::Inf => {
                    for (i, e) in v.iter().enumerate() {
                        lp.constrain(&e.scaled(w(i)), Rel::Le, s);
                        lp.constrain(&e.scaled(-w(i)), Rel::Le, s);
                    }
                    Ok(())
                }
                NormKind::Two => Err(NotPolyhedral("Euclidean norm level set")),
            }
        }
        Gauge::Atomic { atoms } => {
            let mu = lp.add_nonneg_vars(atoms.len());
            for (i, e) in v.iter().enumerate() {
                let lhs = Aff {
                    terms: atoms
                        .iter()
                        .enumerate()
                        .filter(|(_, a)| a[i] != 0.0)
                        .map(|(j, a)| (mu + j, a[i]))
                        .collect(),
                    constant: 0.0,
                };
                lp.constrain(e, Rel::Eq, &lhs);
            }
            let total = Aff {
                terms: (0..atoms.len()).map(|j| (mu + j, 1.0)).collect(),
                constant: 0.0,
            };
            lp.constrain(&total, Rel::Le, s);
            Ok(())
        }
        Gauge::ConicLinear { c, cone } => {
            let lhs = Aff::combination(c, v, 0.0);
            lp.constrain(&lhs, Rel::Le, s);
            cone_rows(cone, v, lp)
        }
        Gauge::Sum { parts } => {
            let si = lp.add_nonneg_vars(parts.len());
            let mut off = 0;
            let mut total = Aff::constant(0.0);
            for (k, p) in parts.iter().enumerate() {
                let d = p.dim();
                gauge_level_rows(p, &v[off..off + d], &Aff::var(si + k), lp)?;
                total = total.plus(&Aff::var(si + k));
                off += d;
            }
            lp.constrain(&total, Rel::Le, s);
            Ok(())
        }
        Gauge::Composed { inner, map } => {
            let mapped: Vec<Aff> = (0..map.rows())
                .map(|i| Aff::combination(map.row(i), v, 0.0))
                .collect();
            gauge_level_rows(inner, &mapped, s, lp)
        }
        Gauge::Lovasz { f } => {
            let n = f.ground_size();
            if n > MAX_LOVASZ_LP {
                return Err(NotPolyhedral("Lovász level set on a large ground set"));
            }
            // v = Σ μ_S χ_S / f(S) + Σ ν_S χ_S over f(S)=0, Σ μ ≤ s
            let mut gens: Vec<(usize, f64, bool)> = Vec::new(); // (mask, scale, counted)
            let scale: f64 = (0..1usize << n).fold(0.0_f64, |m, k| m.max(f.value(k).abs()));
            for mask in 1usize..(1 << n) {
                let fv = f.value(mask);
                if fv > 1e-12 * (1.0 + scale) {
                    gens.push((mask, 1.0 / fv, true));
                } else {
                    gens.push((mask, 1.0, false));
                }
            }
            let mu = lp.add_nonneg_vars(gens.len());
            for (i, e) in v.iter().enumerate() {
                let lhs = Aff {
                    terms: gens
                        .iter()
                        .enumerate()
                        .filter(|(_, (mask, _, _))| mask & (1 << i) != 0)
                        .map(|(j, (_, sc, _))| (mu + j, *sc))
                        .collect(),
                    constant: 0.0,
                };
                lp.constrain(e, Rel::Eq, &lhs);
            }
            let total = Aff {
                terms: gens
                    .iter()
                    .enumerate()
                    .filter(|(_, (_, _, counted))| *counted)
                    .map(|(j, _)| (mu + j, 1.0))
                    .collect(),
                constant: 0.0,
            };
            lp.constrain(&total, Rel::Le, s);
            Ok(())
        }
        Gauge::EpigraphIndicator { rho } => {
            let (r, tau) = v.split_at(rho.dim());
            lp.constrain(s, Rel::Ge, &Aff::constant(0.0));
            gauge_level_rows(rho, r, &tau[0], lp)
        }
    }
}

/// Emits rows enforcing `κ°(y) ≤ s` for affine expressions `y`, `s`.
pub(crate) fn polar_level_rows(
    g: &Gauge,
    y: &[Aff],
    s: &Aff,
    lp: &mut LpBuilder,
) -> Result<(), NotPolyhedral> {
    debug_assert_eq!(y.len(), g.dim());
    match g {
        Gauge::Norm { kind, weights, .. } => {
            let w = |i: usize| weights.as_ref().map_or(1.0, |w| w[i]);
            match kind {
                NormKind::One => {
                    // max_i |y_i|/w_i ≤ s
                    for (i, e) in y.iter().enumerate() {
                        lp.constrain(e, Rel::Le, &s.scaled(w(i)));
                        lp.constrain(&e.scaled(-1.0), Rel::Le, &s.scaled(w(i)));
                    }
                    Ok(())
                }
                NormKind::Inf => {
                    // Σ |y_i|/w_i ≤ s
                    let p = lp.add_nonneg_vars(y.len());
                    let q = lp.add_nonneg_vars(y.len());
                    let mut total = Aff::constant(0.0);
                    for (i, e) in y.iter().enumerate() {
                        let split = Aff::var(p + i).minus(&Aff::var(q + i));
                        lp.constrain(e, Rel::Eq, &split);
                        total = total.plus(
                            &Aff::var(p + i).plus(&Aff::var(q + i)).scaled(1.0 / w(i)),
                        );
                    }
                    lp.constrain(&total, Rel::Le, s);
                    Ok(())
                }
                NormKind::Two => Err(NotPolyhedral("Euclidean norm polar level set")),
            }
        }
        Gauge::Atomic { atoms } => {
            for a in atoms {
                let lhs = Aff::combination(a, y, 0.0);
                lp.constrain(&lhs, Rel::Le, s);
            }
            lp.constrain(s, Rel::Ge, &Aff::constant(0.0));
            Ok(())
        }
        Gauge::ConicLinear { c, cone } => {
            // κ°(y) ≤ s ⟺ s·c − y ∈ K* and s ≥ 0
            let w: Vec<Aff> = c
                .iter()
                .zip(y)
                .map(|(&ci, e)| s.scaled(ci).minus(e))
                .collect();
            lp.constrain(s, Rel::Ge, &Aff::constant(0.0));
            dual_cone_rows(cone, &w, lp)
        }
        Gauge::Sum { parts } => {
            let mut off = 0;
            for p in parts {
                let d = p.dim();
                polar_level_rows(p, &y[off..off + d], s, lp)?;
                off += d;
            }
            Ok(())
        }
        Gauge::Composed { inner, map } => {
            // ∃u: map* u = y, inner°(u) ≤ s
            let uv = lp.add_vars(map.rows());
            let us: Vec<Aff> = (0..map.rows()).map(|i| Aff::var(uv + i)).collect();
            for j in 0..map.cols() {
                let col: Vec<f64> = (0..map.rows()).map(|i| map.get(i, j)).collect();
                let lhs = Aff::combination(&col, &us, 0.0);
                lp.constrain(&lhs, Rel::Eq, &y[j]);
            }
            polar_level_rows(inner, &us, s, lp)
        }
        Gauge::Lovasz { f } => {
            let n = f.ground_size();
            if n > MAX_LOVASZ_LP {
                return Err(NotPolyhedral("Lovász polar on a large ground set"));
            }
            for mask in 1usize..(1 << n) {
                let lhs = Aff {
                    terms: y
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask & (1 << i) != 0)
                        .flat_map(|(_, e)| e.terms.clone())
                        .collect(),
                    constant: (0..n)
                        .filter(|i| mask & (1 << i) != 0)
                        .map(|i| y[i].constant)
                        .sum(),
                };
                lp.constrain(&lhs, Rel::Le, &s.scaled(f.value(mask)));
            }
            lp.constrain(s, Rel::Ge, &Aff::constant(0.0));
            Ok(())
        }
        Gauge::EpigraphIndicator { rho } => {
            let (yr, alpha) = y.split_at(rho.dim());
            lp.constrain(s, Rel::Ge, &Aff::constant(0.0));
            polar_level_rows(rho, yr, &alpha[0].scaled(-1.0), lp)
        }
    }
}

// ---------------------------------------------------------------------------
// Minkowski functions of set descriptors
// ---------------------------------------------------------------------------

/// Builds the gauge `γ_D(x) = inf { λ ≥ 0 : x ∈ λ·conv({0}∪D) }` for the
/// supported descriptor shapes. The closure of the hull is used, which
/// matches the closed gauge `γ_D°°`.
pub fn minkowski_of_set(d: &SetDescr) -> Result<Gauge, GaugeError> {
    match d {
        SetDescr::GaugeBallTranslate { rho, center, sigma } => {
            if linalg::norm_inf(center) != 0.0 {
                return Err(GaugeError::Unsupported(
                    "minkowski of a ball with nonzero center".into(),
                ));
            }
            if *sigma <= 0.0 {
                return Err(GaugeError::Unsupported(
                    "minkowski of a degenerate ball".into(),
                ));
            }
            // D = {x : ρ(−x) ≤ σ}, so γ_D(x) = ρ(−x)/σ
            if let Gauge::Norm { kind, dim, weights } = rho {
                let w = match weights {
                    None if *sigma == 1.0 => None,
                    None => Some(vec![1.0 / sigma; *dim]),
                    Some(w) => Some(w.iter().map(|&wi| wi / sigma).collect()),
                };
                return Ok(match w {
                    None => Gauge::norm(*kind, *dim),
                    Some(w) => Gauge::weighted_norm(*kind, w)?,
                });
            }
            let dim = rho.dim();
            Gauge::composed(
                rho.clone(),
                LinearMap::scaled_identity(dim, -1.0 / sigma),
            )
        }
        SetDescr::Union { parts, hull: true } => {
            // hull of singletons gives an atomic gauge
            let mut atoms = Vec::with_capacity(parts.len());
            for p in parts {
                match p {
                    SetDescr::Affine { map, rhs } if map.is_identity() => {
                        atoms.push(rhs.clone());
                    }
                    SetDescr::ConeTranslate {
                        base,
                        cone: ConeDescr::Zero(_),
                    } => atoms.push(base.clone()),
                    _ => {
                        return Err(GaugeError::Unsupported(
                            "minkowski of a hull of non-singleton parts".into(),
                        ))
                    }
                }
            }
            Gauge::atomic(atoms)
        }
        SetDescr::Halfspace { normal, offset } => {
            if *offset <= 0.0 {
                return Err(GaugeError::Unsupported(
                    "minkowski of a halfspace containing the origin".into(),
                ));
            }
            // cl conv({0} ∪ D) is the halfspace through the origin; its
            // Minkowski function is the indicator of that cone
            let n = normal.len();
            let nn = linalg::dot(normal, normal);
            let mut rays = vec![normal.clone()];
            for i in 0..n {
                let mut p: Vec<f64> = normal.iter().map(|&a| -a * normal[i] / nn).collect();
                p[i] += 1.0;
                if linalg::norm_inf(&p) > 1e-12 {
                    rays.push(p.clone());
                    rays.push(linalg::scaled(&p, -1.0));
                }
            }
            Gauge::conic(vec![0.0; n], ConeDescr::Polyhedral { dim: n, rays })
        }
        _ => Err(GaugeError::Unsupported(
            "minkowski function of this descriptor shape".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::SetDescr;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn unit_atoms() -> Vec<Vec<f64>> {
        vec![
            vec![1.0, 0.0],
            vec![-1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
        ]
    }

    #[test]
    fn norm_one_evaluate() {
        let g = Gauge::norm(NormKind::One, 2);
        assert_abs_diff_eq!(g.evaluate(&[1.0, -2.0]).unwrap(), 3.0);
    }

    #[test]
    fn atomic_cross_polytope_is_one_norm() {
        let g = Gauge::atomic(unit_atoms()).unwrap();
        assert_abs_diff_eq!(g.evaluate(&[0.5, 0.5]).unwrap(), 1.0, epsilon = 1e-9);
        let n1 = Gauge::norm(NormKind::One, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..25 {
            let x: Vec<f64> = (0..2).map(|_| rng.random_range(-2.0..2.0)).collect();
            assert_abs_diff_eq!(
                g.evaluate(&x).unwrap(),
                n1.evaluate(&x).unwrap(),
                epsilon = 1e-8
            );
        }
    }

    #[test]
    fn conic_orthant_evaluate() {
        let g = Gauge::conic(vec![1.0, 2.0], ConeDescr::NonnegOrthant(2)).unwrap();
        assert_abs_diff_eq!(g.evaluate(&[3.0, 1.0]).unwrap(), 5.0);
        assert!(g.evaluate(&[-1.0, 0.0]).unwrap().is_infinite());
    }

    #[test]
    fn two_norm_polar_is_self_dual() {
        let g = Gauge::norm(NormKind::Two, 3);
        let y = [3.0, -4.0, 12.0];
        assert_abs_diff_eq!(g.polar_evaluate(&y).unwrap(), 13.0, epsilon = 1e-12);
    }

    #[test]
    fn conic_orthant_polar_closed_form() {
        let g = Gauge::conic(vec![1.0, 1.0], ConeDescr::NonnegOrthant(2)).unwrap();
        assert_abs_diff_eq!(g.polar_evaluate(&[2.0, -3.0]).unwrap(), 2.0);
    }

    #[test]
    fn psd_conic_polar_matches_generalized_eigenvalue() {
        // polar of ⟨C,·⟩+δ_PSD with C = diag(1,0) along a sequence leaving
        // the (non-closed) polar domain
        let c = SymMatrix::from_diag(&[1.0, 0.0]);
        let g = Gauge::conic_psd(&c).unwrap();
        for n in [1.0_f64, 10.0, 100.0] {
            let u = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, -1.0 / n]]).unwrap();
            let val = g.polar_evaluate(u.as_flat()).unwrap();
            assert!((val - n).abs() <= 1e-6 * n, "got {val} want {n}");
        }
        // the limit point is outside the polar domain
        let u = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(g.polar_evaluate(u.as_flat()).unwrap().is_infinite());
    }

    #[test]
    fn composed_polar_scaling() {
        let inner = Gauge::norm(NormKind::One, 1);
        let g = Gauge::composed(inner, LinearMap::scaled_identity(1, 2.0)).unwrap();
        for y in [-3.0, -1.0, 0.5, 2.0] {
            assert_abs_diff_eq!(g.polar_evaluate(&[y]).unwrap(), y.abs() / 2.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn polar_subgradient_examples() {
        // polar of the 1-norm is the ∞-norm; max coordinate wins
        let g1 = Gauge::norm(NormKind::One, 2);
        assert_eq!(g1.polar_subgradient(&[3.0, -1.0]).unwrap(), vec![1.0, 0.0]);
        // Euclidean: normalized point
        let g2 = Gauge::norm(NormKind::Two, 2);
        let s = g2.polar_subgradient(&[3.0, 4.0]).unwrap();
        assert_abs_diff_eq!(s[0], 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(s[1], 0.8, epsilon = 1e-12);
        // PSD with C = I: leading eigenvector outer product
        let g3 = Gauge::conic_psd(&SymMatrix::identity(2)).unwrap();
        let u = SymMatrix::from_diag(&[2.0, 1.0]);
        let x = g3.polar_subgradient(u.as_flat()).unwrap();
        assert_abs_diff_eq!(x[0], 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(x[1], 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(x[3], 0.0, epsilon = 1e-9);
    }

    #[test]
    fn polar_subgradient_supports_the_polar() {
        // κ°(z) ≥ κ°(y) + ⟨x*, z−y⟩ on sampled z, for several variants
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let gauges: Vec<Gauge> = vec![
            Gauge::norm(NormKind::One, 3),
            Gauge::norm(NormKind::Inf, 3),
            Gauge::weighted_norm(NormKind::Two, vec![1.0, 2.0, 0.5]).unwrap(),
            Gauge::atomic(vec![vec![1.0, 2.0, 0.0], vec![-1.0, 1.0, 1.0], vec![0.0, -1.0, 2.0]])
                .unwrap(),
            Gauge::conic(vec![1.0, 2.0, 0.5], ConeDescr::NonnegOrthant(3)).unwrap(),
        ];
        for g in &gauges {
            for _ in 0..40 {
                let y: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
                let py = g.polar_evaluate(&y).unwrap();
                if !py.is_finite() {
                    continue;
                }
                let xs = g.polar_subgradient(&y).unwrap();
                assert!(g.evaluate(&xs).unwrap() <= 1.0 + 1e-8);
                assert_abs_diff_eq!(linalg::dot(&xs, &y), py, epsilon = 1e-7);
                for _ in 0..10 {
                    let z: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
                    let pz = g.polar_evaluate(&z).unwrap();
                    if pz.is_finite() {
                        let lb = py + linalg::dot(&xs, &linalg::sub(&z, &y));
                        assert!(pz >= lb - 1e-8, "{} < {}", pz, lb);
                    }
                }
            }
        }
    }

    #[test]
    fn polar_inequality_examples_and_samples() {
        let g = Gauge::norm(NormKind::One, 2);
        assert!(g.check_polar_inequality(&[1.0, 0.0], &[1.0, 0.0]).unwrap());
        assert!(g.check_polar_inequality(&[1.0, 1.0], &[1.0, -1.0]).unwrap());
        let atomic = Gauge::atomic(vec![
            vec![1.0, 0.5],
            vec![-0.5, 1.0],
            vec![0.0, -1.0],
        ])
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..1000 {
            let x: Vec<f64> = (0..2).map(|_| rng.random_range(-3.0..3.0)).collect();
            let y: Vec<f64> = (0..2).map(|_| rng.random_range(-3.0..3.0)).collect();
            assert!(atomic.check_polar_inequality(&x, &y).unwrap());
        }
    }

    #[test]
    fn positive_homogeneity_and_zero_at_origin() {
        let f = SetFunction::new(2, vec![0.0, 1.0, 1.0, 1.5]).unwrap();
        let gauges: Vec<Gauge> = vec![
            Gauge::norm(NormKind::One, 2),
            Gauge::norm(NormKind::Two, 2),
            Gauge::norm(NormKind::Inf, 2),
            Gauge::weighted_norm(NormKind::One, vec![2.0, 3.0]).unwrap(),
            Gauge::atomic(unit_atoms()).unwrap(),
            Gauge::conic(vec![1.0, 2.0], ConeDescr::NonnegOrthant(2)).unwrap(),
            Gauge::sum(vec![Gauge::norm(NormKind::One, 1), Gauge::norm(NormKind::Two, 1)])
                .unwrap(),
            Gauge::composed(
                Gauge::norm(NormKind::Inf, 2),
                LinearMap::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap(),
            )
            .unwrap(),
            Gauge::lovasz(f),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for g in &gauges {
            let zero = vec![0.0; g.dim()];
            assert_eq!(g.evaluate(&zero).unwrap(), 0.0, "{}", g.describe());
            for _ in 0..20 {
                let x: Vec<f64> = (0..g.dim()).map(|_| rng.random_range(-2.0..2.0)).collect();
                let v = g.evaluate(&x).unwrap();
                for lam in [0.0, 0.5, 2.0, 10.0] {
                    let vs = g.evaluate(&linalg::scaled(&x, lam)).unwrap();
                    if v.is_finite() {
                        assert!(
                            (vs - lam * v).abs() <= 1e-8 * (1.0 + lam * v.abs()),
                            "{}: {} vs {}",
                            g.describe(),
                            vs,
                            lam * v
                        );
                    } else if lam > 0.0 {
                        assert!(vs.is_infinite());
                    }
                }
            }
        }
    }

    #[test]
    fn convexity_along_segments() {
        let gauges: Vec<Gauge> = vec![
            Gauge::norm(NormKind::One, 3),
            Gauge::atomic(vec![vec![1.0, 0.0, 1.0], vec![0.0, 1.0, -1.0], vec![-1.0, 1.0, 0.0]])
                .unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for g in &gauges {
            for _ in 0..60 {
                let x: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
                let y: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
                let t: f64 = rng.random_range(0.0..1.0);
                let mid: Vec<f64> =
                    linalg::axpy(&linalg::scaled(&x, t), 1.0 - t, &y);
                let vx = g.evaluate(&x).unwrap();
                let vy = g.evaluate(&y).unwrap();
                let vm = g.evaluate(&mid).unwrap();
                if vx.is_finite() && vy.is_finite() {
                    assert!(vm <= t * vx + (1.0 - t) * vy + 1e-9);
                }
            }
        }
    }

    #[test]
    fn sum_rule_is_max_of_part_polars() {
        let g = Gauge::sum(vec![
            Gauge::norm(NormKind::One, 2),
            Gauge::norm(NormKind::Inf, 1),
        ])
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let y: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
            let expect = Gauge::norm(NormKind::One, 2)
                .polar_evaluate(&y[0..2])
                .unwrap()
                .max(Gauge::norm(NormKind::Inf, 1).polar_evaluate(&y[2..3]).unwrap());
            assert_eq!(g.polar_evaluate(&y).unwrap(), expect);
        }
    }

    #[test]
    fn composition_rule_matches_grid_search() {
        // inf { κ°(u) : A*u = y } with κ = ∞-norm on R², A: R¹ → R²,
        // so the feasible set is a line parameterized by one scalar
        let map = LinearMap::from_rows(&[vec![1.0], vec![2.0]]).unwrap();
        let g = Gauge::composed(Gauge::norm(NormKind::One, 2), map).unwrap();
        // κ°(u) = ‖u‖_∞ and the constraint is u₁ + 2u₂ = y
        for y in [3.0, -1.5, 0.25] {
            let got = g.polar_evaluate(&[y]).unwrap();
            let mut lo = -8.0_f64;
            let mut hi = 8.0_f64;
            let mut best = f64::INFINITY;
            for _ in 0..6 {
                let mut best_s = lo;
                for k in 0..=400 {
                    let s = lo + (hi - lo) * (k as f64) / 400.0;
                    let u1 = y - 2.0 * s;
                    let val = u1.abs().max(s.abs());
                    if val < best {
                        best = val;
                        best_s = s;
                    }
                }
                let step = (hi - lo) / 400.0;
                lo = best_s - 2.0 * step;
                hi = best_s + 2.0 * step;
            }
            assert!((got - best).abs() <= 1e-6, "{got} vs grid {best}");
        }
    }

    #[test]
    fn bipolar_recovers_closed_gauges() {
        let gauges: Vec<Gauge> = vec![
            Gauge::norm(NormKind::One, 2),
            Gauge::norm(NormKind::Inf, 2),
            Gauge::norm(NormKind::Two, 2),
            Gauge::weighted_norm(NormKind::One, vec![2.0, 0.5]).unwrap(),
            Gauge::atomic(unit_atoms()).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for g in &gauges {
            for _ in 0..40 {
                let x: Vec<f64> = (0..2).map(|_| rng.random_range(-2.0..2.0)).collect();
                let v = g.evaluate(&x).unwrap();
                let vv = g.bipolar_evaluate(&x).unwrap();
                assert!((v - vv).abs() <= 1e-8 * (1.0 + v.abs()), "{}", g.describe());
            }
        }
    }

    #[test]
    fn full_domain_polar_for_definite_gauges() {
        // closed gauges vanishing only at the origin have full polar domain
        let gauges: Vec<Gauge> = vec![
            Gauge::norm(NormKind::One, 3),
            Gauge::weighted_norm(NormKind::Inf, vec![0.5, 1.0, 4.0]).unwrap(),
            Gauge::atomic(vec![
                vec![1.0, 0.0, 0.0],
                vec![-1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, -1.0, 0.0],
                vec![0.0, 0.0, 1.0],
                vec![0.0, 0.0, -1.0],
            ])
            .unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for g in &gauges {
            for _ in 0..50 {
                let y: Vec<f64> = (0..3).map(|_| rng.random_range(-5.0..5.0)).collect();
                assert!(g.polar_evaluate(&y).unwrap().is_finite());
            }
        }
    }

    #[test]
    fn lovasz_validation_rejects_bad_tables() {
        // not submodular: f({1}) + f({2}) < f({1,2}) + f(∅)
        assert!(SetFunction::new(2, vec![0.0, 1.0, 1.0, 2.5]).is_err());
        // not non-decreasing
        assert!(SetFunction::new(2, vec![0.0, 1.0, 1.0, 0.5]).is_err());
        // f(∅) ≠ 0
        assert!(SetFunction::new(2, vec![0.1, 1.0, 1.0, 1.5]).is_err());
        assert!(SetFunction::new(2, vec![0.0, 1.0, 1.0, 1.5]).is_ok());
    }

    #[test]
    fn lovasz_evaluate_matches_threshold_integral() {
        let f = SetFunction::new(3, vec![0.0, 1.0, 1.0, 1.6, 1.0, 1.6, 1.6, 2.0]).unwrap();
        let g = Gauge::lovasz(f.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..30 {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..2.0)).collect();
            let got = g.evaluate(&x).unwrap();
            // independent oracle: ∫₀^max f({ i : x_i ≥ t }) dt by midpoint rule
            let top = x.iter().cloned().fold(0.0_f64, f64::max);
            let steps = 40_000;
            let dt = top / steps as f64;
            let mut integral = 0.0;
            for k in 0..steps {
                let t = (k as f64 + 0.5) * dt;
                let mask = (0..3).filter(|&i| x[i] >= t).fold(0, |m, i| m | (1 << i));
                integral += f.value(mask) * dt;
            }
            assert!((got - integral).abs() <= 1e-3 * (1.0 + got), "{got} vs {integral}");
        }
        // orthant restriction
        assert!(g.evaluate(&[-0.5, 1.0, 0.0]).unwrap().is_infinite());
    }

    #[test]
    fn lovasz_polar_is_support_of_level_set() {
        let f = SetFunction::new(3, vec![0.0, 1.0, 1.0, 1.6, 1.0, 1.6, 1.6, 2.0]).unwrap();
        let g = Gauge::lovasz(f);
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..25 {
            let y: Vec<f64> = (0..3).map(|_| rng.random_range(-2.0..2.0)).collect();
            let pv = g.polar_evaluate(&y).unwrap();
            assert!(pv.is_finite());
            // attainment: the maximizing vertex is feasible and achieves pv
            let xs = g.polar_subgradient(&y).unwrap();
            assert!(g.evaluate(&xs).unwrap() <= 1.0 + 1e-9);
            assert_abs_diff_eq!(linalg::dot(&xs, &y), pv, epsilon = 1e-9);
            // no sampled level-set point beats it
            for _ in 0..50 {
                let x: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..2.0)).collect();
                let v = g.evaluate(&x).unwrap();
                if v > 1e-9 {
                    let scaled = linalg::scaled(&x, 1.0 / v);
                    assert!(linalg::dot(&scaled, &y) <= pv + 1e-8);
                }
            }
        }
    }

    #[test]
    fn epigraph_indicator_behaviour() {
        let g = Gauge::epigraph_indicator(Gauge::norm(NormKind::Two, 2));
        assert_eq!(g.evaluate(&[3.0, 4.0, 5.0]).unwrap(), 0.0);
        assert!(g.evaluate(&[3.0, 4.0, 4.9]).unwrap().is_infinite());
        // polar: (y, α) with ρ°(y) ≤ −α
        assert_eq!(g.polar_evaluate(&[0.6, 0.8, -1.0]).unwrap(), 0.0);
        assert!(g.polar_evaluate(&[0.6, 0.8, 1.0]).unwrap().is_infinite());
    }

    #[test]
    fn minkowski_of_unit_one_norm_ball() {
        let d = SetDescr::GaugeBallTranslate {
            rho: Gauge::norm(NormKind::One, 2),
            center: vec![0.0, 0.0],
            sigma: 1.0,
        };
        let g = minkowski_of_set(&d).unwrap();
        assert_eq!(g, Gauge::norm(NormKind::One, 2));
    }

    #[test]
    fn minkowski_of_atom_hull() {
        let parts: Vec<SetDescr> = unit_atoms()
            .into_iter()
            .map(|a| SetDescr::Affine {
                map: LinearMap::identity(2),
                rhs: a,
            })
            .collect();
        let d = SetDescr::Union { parts, hull: true };
        let g = minkowski_of_set(&d).unwrap();
        let n1 = Gauge::norm(NormKind::One, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..30 {
            let x: Vec<f64> = (0..2).map(|_| rng.random_range(-2.0..2.0)).collect();
            assert_abs_diff_eq!(
                g.evaluate(&x).unwrap(),
                n1.evaluate(&x).unwrap(),
                epsilon = 1e-8
            );
        }
    }

    #[test]
    fn minkowski_of_shifted_halfspace() {
        // D = { ⟨a,x⟩ ≥ 1 } does not contain 0; conv({0}∪D) closes to the
        // halfspace through the origin
        let d = SetDescr::Halfspace {
            normal: vec![1.0, 1.0],
            offset: 1.0,
        };
        let g = minkowski_of_set(&d).unwrap();
        assert_eq!(g.evaluate(&[2.0, -1.0]).unwrap(), 0.0);
        assert_eq!(g.evaluate(&[1.0, -1.0]).unwrap(), 0.0);
        assert!(g.evaluate(&[-1.0, 0.5]).unwrap().is_infinite());
        // LP oracle: evaluate agrees with min { t : x ∈ t·D via hull rows }
        let mut lp = crate::encode::LpBuilder::new();
        let t = lp.add_nonneg_vars(1);
        let x = [2.0, 3.0];
        let xs: Vec<crate::encode::Aff> =
            x.iter().map(|&v| crate::encode::Aff::constant(v)).collect();
        crate::sets::set_scaled_rows(&d, &xs, &crate::encode::Aff::var(t), &mut lp).unwrap();
        lp.minimize(&crate::encode::Aff::var(t));
        match lp.solve().unwrap() {
            LpOutcome::Optimal { value, .. } => {
                assert_abs_diff_eq!(value.max(0.0), g.evaluate(&x).unwrap(), epsilon = 1e-8);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn minkowski_polar_is_support_function() {
        // for polyhedral D containing the origin, the polar of γ_D is the
        // support function σ_D, here computed independently by LP
        let atoms = vec![
            vec![1.0, 0.5],
            vec![-1.0, -0.5],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
            vec![0.75, -0.25],
            vec![-0.75, 0.25],
        ];
        let parts: Vec<SetDescr> = atoms
            .iter()
            .map(|a| SetDescr::Affine {
                map: LinearMap::identity(2),
                rhs: a.clone(),
            })
            .collect();
        let d = SetDescr::Union { parts, hull: true };
        let g = minkowski_of_set(&d).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        for _ in 0..60 {
            let y: Vec<f64> = (0..2).map(|_| rng.random_range(-3.0..3.0)).collect();
            // σ_D(y) = −inf { ⟨x,−y⟩ : x ∈ D }
            let neg: Vec<f64> = y.iter().map(|v| -v).collect();
            let support = -crate::sets::linear_infimum(&d, &neg).unwrap().unwrap();
            let polar = g.polar_evaluate(&y).unwrap();
            // D contains 0, so the support function is nonnegative and the
            // two must agree
            assert!(
                (polar - support.max(0.0)).abs() <= 1e-8 * (1.0 + support.abs()),
                "polar {polar} vs support {support}"
            );
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let g = Gauge::norm(NormKind::One, 2);
        assert!(matches!(
            g.evaluate(&[1.0]),
            Err(GaugeError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            g.polar_evaluate(&[1.0, 2.0, 3.0]),
            Err(GaugeError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn weighted_norm_rejects_nonpositive_weights() {
        assert!(Gauge::weighted_norm(NormKind::One, vec![1.0, 0.0]).is_err());
        assert!(Gauge::weighted_norm(NormKind::One, vec![1.0, -2.0]).is_err());
    }

    #[test]
    fn conic_requires_dual_cone_member() {
        assert!(Gauge::conic(vec![-1.0, 1.0], ConeDescr::NonnegOrthant(2)).is_err());
        let indefinite = SymMatrix::from_diag(&[1.0, -1.0]);
        assert!(Gauge::conic_psd(&indefinite).is_err());
    }

    #[test]
    fn cone_membership_pairs_with_dual() {
        let cones = vec![
            ConeDescr::NonnegOrthant(3),
            ConeDescr::Psd(2),
            ConeDescr::Zero(3),
            ConeDescr::Free(3),
            ConeDescr::Polyhedral {
                dim: 3,
                rays: vec![vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 1.0]],
            },
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for cone in &cones {
            let d = cone.dim();
            for _ in 0..40 {
                let x: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
                let s: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
                if cone.contains(&x).unwrap() && cone.dual_contains(&s).unwrap() {
                    assert!(linalg::dot(&x, &s) >= -1e-7 * (1.0 + linalg::norm2(&x) * linalg::norm2(&s)));
                }
            }
        }
    }
}
