//! Shared LP encodings.
//!
//! Gauge level sets, polar level sets, cone memberships, and scaled set
//! memberships are all expressed as rows over affine expressions of LP
//! variables, so one simplex backend serves every polyhedral oracle in the
//! crate.

use crate::lp::LpError;
use crate::lp::{solve_lp, LpOutcome, LpProblem, LpRow, Rel};

/// Affine expression `Σ coeff·var + constant` over builder variables.
#[derive(Debug, Clone, Default)]
pub(crate) struct Aff {
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

impl Aff {
    pub fn var(i: usize) -> Self {
        Aff {
            terms: vec![(i, 1.0)],
            constant: 0.0,
        }
    }

    pub fn constant(c: f64) -> Self {
        Aff {
            terms: vec![],
            constant: c,
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Aff {
            terms: self.terms.iter().map(|&(i, c)| (i, c * s)).collect(),
            constant: self.constant * s,
        }
    }

    pub fn plus(&self, other: &Aff) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Aff {
            terms,
            constant: self.constant + other.constant,
        }
    }

    pub fn minus(&self, other: &Aff) -> Self {
        self.plus(&other.scaled(-1.0))
    }

    /// Affine combination `Σ coeffs[k]·exprs[k] + shift`.
    pub fn combination(coeffs: &[f64], exprs: &[Aff], shift: f64) -> Self {
        let mut out = Aff::constant(shift);
        for (c, e) in coeffs.iter().zip(exprs) {
            if *c != 0.0 {
                out = out.plus(&e.scaled(*c));
            }
        }
        out
    }
}

/// Raised when a construct has no polyhedral encoding.
#[derive(Debug, Clone)]
pub(crate) struct NotPolyhedral(pub &'static str);

/// Incremental LP assembly over [`Aff`] expressions.
#[derive(Debug, Default)]
pub(crate) struct LpBuilder {
    nvars: usize,
    objective: Vec<(usize, f64)>,
    rows: Vec<(Vec<(usize, f64)>, Rel, f64)>,
    bounds: Vec<(f64, f64)>,
}

impl LpBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vars(&mut self, k: usize) -> usize {
        let start = self.nvars;
        self.nvars += k;
        self.bounds
            .extend(std::iter::repeat_n((f64::NEG_INFINITY, f64::INFINITY), k));
        start
    }

    pub fn add_nonneg_vars(&mut self, k: usize) -> usize {
        let start = self.nvars;
        self.nvars += k;
        self.bounds
            .extend(std::iter::repeat_n((0.0, f64::INFINITY), k));
        start
    }

    /// Adds `lhs (rel) rhs`.
    pub fn constrain(&mut self, lhs: &Aff, rel: Rel, rhs: &Aff) {
        let diff = lhs.minus(rhs);
        self.rows.push((diff.terms, rel, -diff.constant));
    }

    /// Sets the minimization objective to `expr`.
    pub fn minimize(&mut self, expr: &Aff) {
        self.objective = expr.terms.clone();
    }

    #[allow(dead_code)]
    pub fn num_vars(&self) -> usize {
        self.nvars
    }

    fn assemble(&self, relax: f64) -> LpProblem {
        let mut p = LpProblem::new(self.nvars);
        p.bounds = self.bounds.clone();
        for &(i, c) in &self.objective {
            p.objective[i] += c;
        }
        for (terms, rel, rhs) in &self.rows {
            let mut coeffs = vec![0.0; self.nvars];
            for &(i, c) in terms {
                coeffs[i] += c;
            }
            if relax > 0.0 && *rel == Rel::Eq {
                p.rows.push(LpRow {
                    coeffs: coeffs.clone(),
                    rel: Rel::Le,
                    rhs: rhs + relax,
                });
                p.rows.push(LpRow {
                    coeffs,
                    rel: Rel::Ge,
                    rhs: rhs - relax,
                });
            } else {
                let rhs = if relax == 0.0 {
                    *rhs
                } else if *rel == Rel::Le {
                    rhs + relax
                } else {
                    rhs - relax
                };
                p.rows.push(LpRow {
                    coeffs,
                    rel: *rel,
                    rhs,
                });
            }
        }
        p
    }

    pub fn solve(&self) -> Result<LpOutcome, LpError> {
        solve_lp(&self.assemble(0.0))
    }

    /// Feasibility of the rows, each relaxed by `relax`.
    pub fn feasible(&self, relax: f64) -> Result<bool, LpError> {
        let mut p = self.assemble(relax);
        p.objective = vec![0.0; p.num_vars];
        Ok(matches!(solve_lp(&p)?, LpOutcome::Optimal { .. }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_pipeline() {
        // min x + y s.t. x + y ≥ 2, x ≥ 0, y ≥ 0 via Aff expressions
        let mut lp = LpBuilder::new();
        let x = lp.add_nonneg_vars(2);
        let sum = Aff::var(x).plus(&Aff::var(x + 1));
        lp.constrain(&sum, Rel::Ge, &Aff::constant(2.0));
        lp.minimize(&sum);
        match lp.solve().unwrap() {
            LpOutcome::Optimal { value, .. } => assert!((value - 2.0).abs() < 1e-9),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn relaxed_feasibility() {
        let mut lp = LpBuilder::new();
        let x = lp.add_vars(1);
        lp.constrain(&Aff::var(x), Rel::Eq, &Aff::constant(1.0));
        lp.constrain(&Aff::var(x), Rel::Eq, &Aff::constant(1.0 + 1e-4));
        assert!(!lp.feasible(0.0).unwrap());
        assert!(lp.feasible(2e-4).unwrap());
    }
}
