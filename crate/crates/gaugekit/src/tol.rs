//! Central numeric tolerances.
//!
//! Every threshold used by the library lives here so the contracts stay
//! auditable in one place.

/// Membership tests on set descriptors.
pub const MEMBERSHIP: f64 = 1e-9;

/// Pairing `⟨x,y⟩ ≥ 1` between a set and its antipolar.
pub const ANTIPOLAR_PAIR: f64 = 1e-8;

/// Consistency of cone membership with dual-cone membership.
pub const CONE_PAIR: f64 = 1e-10;

/// Relative residual accepted from the Jacobi eigensolver.
pub const EIG_REL: f64 = 1e-10;

/// Relative threshold below which an eigenvalue of a PSD matrix counts as zero.
pub const NULL_EIG_REL: f64 = 1e-10;

/// Multiplicative weak-duality slack, `κ(x)·κ°(y) ≥ 1 − WEAK_DUALITY`.
pub const WEAK_DUALITY: f64 = 1e-8;

/// Slack used when testing membership in a closure `cl(A*C′)` by LP feasibility.
pub const CLOSURE_SLACK: f64 = 1e-7;

/// Reduced-cost / pivot threshold inside the simplex.
pub const LP_PIVOT: f64 = 1e-9;

/// Residual accepted on optimal LP solutions.
pub const LP_OPT: f64 = 1e-8;

/// Slack on the polar inequality `⟨x,y⟩ ≤ κ(x)·κ°(y)`.
pub const POLAR_INEQ: f64 = 1e-9;

/// Convexity checks along sampled segments.
pub const CONVEXITY: f64 = 1e-9;
