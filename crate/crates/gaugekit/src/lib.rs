//! Toolkit for gauge optimization and its duality theory.
//!
//! A gauge is a nonnegative, positively homogeneous convex function that
//! vanishes at the origin. Programs of the form
//!
//! ```text
//! minimize κ(x)  subject to  ρ(b − Ax) ≤ σ
//! ```
//!
//! admit a multiplicative duality framework: the gauge dual minimizes the
//! polar `κ°(A*y)` over the antipolar of the constraint set, and feasible
//! primal-dual pairs satisfy `κ(x)·κ°(A*y) ≥ 1`.
//!
//! The crate is organized around that pipeline:
//!
//! * [`linalg`] — dense symmetric eigensolver, generalized eigenvalues,
//!   and small vector helpers,
//! * [`lp`] — a deterministic two-phase simplex used as an oracle,
//! * [`gauge`] — compositional gauges with exact polars and subgradients,
//! * [`sets`] — symbolic convex-set descriptors and the antipolar calculus,
//! * [`duality`] — construction of gauge/Lagrange duals, biduals, and
//!   duality certificates,
//! * [`solver`] — projected subgradient solver plus LP/grid primal oracles,
//! * [`sensitivity`] — value-function perturbation analysis,
//! * [`report`], [`problem_file`], [`cli`] — the command-line front end.

pub mod cli;
pub mod duality;
pub(crate) mod encode;
pub mod gauge;
pub mod linalg;
pub mod lp;
pub mod problem_file;
pub mod report;
pub mod sensitivity;
pub mod sets;
pub mod solver;
pub mod tol;

pub use duality::{
    build_bidual, build_gauge_dual, build_lagrange_dual, certify, map_dual_solutions,
    Assumptions, DualKind, DualProblem, DualSpace, DualValues, DualityCertificate, DualityError,
    GaugeProblem,
};
pub use gauge::{minkowski_of_set, ConeDescr, Gauge, GaugeError, NormKind, SetFunction};
pub use linalg::{gen_eigmax, jacobi_eigen, Eigen, GenEig, LinearMap, SymMatrix};
pub use lp::{solve_lp, LpOutcome, LpProblem, LpRow, Rel};
pub use sets::{
    antipolar, biantipolar_check, is_raylike, linear_infimum, recession_identity_check, AntipolarDescr,
    BiantipolarReport, RayLike, RecessionReport, SetDescr, SetError,
};
pub use solver::{
    solve_gauge_dual, solve_lagrange_dual, solve_primal_oracle, subgradient_of_dual_objective,
    SolveMethod, SolveResult, SolverError, SubgradConfig,
};
