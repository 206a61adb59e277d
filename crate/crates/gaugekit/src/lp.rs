//! A small dense linear-programming solver.
//!
//! Two-phase primal simplex on a dense tableau with Bland's rule for both
//! the entering and leaving choices, so runs are deterministic and cycling
//! is ruled out. Sized for desk-scale oracles, not performance.

use thiserror::Error;

use crate::linalg::check_finite;
use crate::tol;

/// Hard caps; external callers should stay within 50 variables / 200 rows,
/// internal encodings get some headroom.
pub const MAX_VARS: usize = 160;
pub const MAX_ROWS: usize = 1024;

const MAX_PIVOTS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Le,
    Ge,
    Eq,
}

/// One linear constraint `coeffs · x (rel) rhs`.
#[derive(Debug, Clone)]
pub struct LpRow {
    pub coeffs: Vec<f64>,
    pub rel: Rel,
    pub rhs: f64,
}

/// `minimize objective·x  subject to rows, bounds`.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub rows: Vec<LpRow>,
    /// Per-variable `(lo, hi)`; infinities mark free sides.
    pub bounds: Vec<(f64, f64)>,
}

impl LpProblem {
    /// Fresh problem with zero objective and free variables.
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            objective: vec![0.0; num_vars],
            rows: Vec::new(),
            bounds: vec![(f64::NEG_INFINITY, f64::INFINITY); num_vars],
        }
    }

    pub fn validate(&self) -> Result<(), LpError> {
        if self.objective.len() != self.num_vars || self.bounds.len() != self.num_vars {
            return Err(LpError::Shape(format!(
                "objective/bounds length must equal num_vars = {}",
                self.num_vars
            )));
        }
        check_finite(&self.objective).map_err(|_| LpError::NonFinite)?;
        for row in &self.rows {
            if row.coeffs.len() != self.num_vars {
                return Err(LpError::Shape(format!(
                    "row has {} coefficients, expected {}",
                    row.coeffs.len(),
                    self.num_vars
                )));
            }
            check_finite(&row.coeffs).map_err(|_| LpError::NonFinite)?;
            if !row.rhs.is_finite() {
                return Err(LpError::NonFinite);
            }
        }
        for &(lo, hi) in &self.bounds {
            if lo.is_nan() || hi.is_nan() {
                return Err(LpError::NonFinite);
            }
        }
        if self.num_vars > MAX_VARS || self.rows.len() > MAX_ROWS {
            return Err(LpError::TooLarge {
                vars: self.num_vars,
                rows: self.rows.len(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: f64, point: Vec<f64> },
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("inconsistent problem shape: {0}")]
    Shape(String),
    #[error("non-finite coefficient in problem data")]
    NonFinite,
    #[error("simplex pivot budget exhausted after {0} pivots")]
    IterationLimit(usize),
    #[error("problem too large: {vars} variables / {rows} rows")]
    TooLarge { vars: usize, rows: usize },
}

enum VarSub {
    /// `x = lo + x'` with `x' ≥ 0`.
    Shifted { col: usize, lo: f64 },
    /// `x = hi − x'` with `x' ≥ 0`.
    Flipped { col: usize, hi: f64 },
    /// `x = x⁺ − x⁻`.
    Split { pos: usize, neg: usize },
}

struct Tableau {
    /// `m × (ncols + 1)` dense rows, last column is the rhs.
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    alive: Vec<bool>,
    ncols: usize,
    art_start: usize,
    pivots: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> f64 {
        self.rows[i][self.ncols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= piv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let factor = row[c];
            if factor != 0.0 {
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= factor * p;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Runs simplex with Bland's rule on the cost vector `cost`
    /// (length `ncols`). `allow` filters candidate entering columns.
    fn run(
        &mut self,
        cost: &[f64],
        allow: impl Fn(usize) -> bool,
    ) -> Result<SimplexEnd, LpError> {
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(LpError::IterationLimit(self.pivots));
            }
            // reduced costs r_j = c_j − Σ_i c_{basis(i)} T[i][j]
            let mut entering = None;
            for j in 0..self.ncols {
                if !allow(j) || self.basis.contains(&j) {
                    continue;
                }
                let mut r = cost[j];
                for (i, row) in self.rows.iter().enumerate() {
                    if self.alive[i] {
                        let cb = cost[self.basis[i]];
                        if cb != 0.0 {
                            r -= cb * row[j];
                        }
                    }
                }
                if r < -tol::LP_PIVOT {
                    entering = Some(j);
                    break; // Bland: smallest index wins
                }
            }
            let Some(j) = entering else {
                return Ok(SimplexEnd::Optimal);
            };
            // ratio test
            let mut best: Option<(f64, usize)> = None;
            for i in 0..self.rows.len() {
                if !self.alive[i] {
                    continue;
                }
                let a = self.rows[i][j];
                if a > tol::LP_PIVOT {
                    let ratio = self.rhs(i) / a;
                    match best {
                        None => best = Some((ratio, i)),
                        Some((br, bi)) => {
                            let near = (ratio - br).abs() <= 1e-9 * (1.0 + br.abs());
                            if (near && self.basis[i] < self.basis[bi])
                                || (!near && ratio < br)
                            {
                                best = Some((if near { br } else { ratio }, i));
                            }
                        }
                    }
                }
            }
            let Some((_, r)) = best else {
                return Ok(SimplexEnd::Unbounded);
            };
            self.pivot(r, j);
        }
    }
}

enum SimplexEnd {
    Optimal,
    Unbounded,
}

/// Solves the LP. Deterministic; status is one of optimal / infeasible /
/// unbounded, with pivot-budget exhaustion reported as an explicit error.
pub fn solve_lp(p: &LpProblem) -> Result<LpOutcome, LpError> {
    p.validate()?;

    // variable substitutions to reach x' ≥ 0 form
    let mut subs = Vec::with_capacity(p.num_vars);
    let mut ncols = 0usize;
    let mut extra_rows: Vec<LpRow> = Vec::new();
    for (j, &(lo, hi)) in p.bounds.iter().enumerate() {
        if lo > hi {
            return Ok(LpOutcome::Infeasible);
        }
        if lo.is_finite() {
            subs.push(VarSub::Shifted { col: ncols, lo });
            if hi.is_finite() {
                let mut coeffs = vec![0.0; p.num_vars];
                coeffs[j] = 1.0;
                extra_rows.push(LpRow {
                    coeffs,
                    rel: Rel::Le,
                    rhs: hi,
                });
            }
            ncols += 1;
        } else if hi.is_finite() {
            subs.push(VarSub::Flipped { col: ncols, hi });
            ncols += 1;
        } else {
            subs.push(VarSub::Split {
                pos: ncols,
                neg: ncols + 1,
            });
            ncols += 2;
        }
    }
    let nstruct = ncols;

    // rewrite rows over the substituted variables
    let all_rows: Vec<&LpRow> = p.rows.iter().chain(extra_rows.iter()).collect();
    let m = all_rows.len();
    let mut work: Vec<(Vec<f64>, Rel, f64)> = Vec::with_capacity(m);
    for row in &all_rows {
        let mut coeffs = vec![0.0; nstruct];
        let mut rhs = row.rhs;
        for (j, &c) in row.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            match &subs[j] {
                VarSub::Shifted { col, lo } => {
                    coeffs[*col] += c;
                    rhs -= c * lo;
                }
                VarSub::Flipped { col, hi } => {
                    coeffs[*col] -= c;
                    rhs -= c * hi;
                }
                VarSub::Split { pos, neg } => {
                    coeffs[*pos] += c;
                    coeffs[*neg] -= c;
                }
            }
        }
        work.push((coeffs, row.rel, rhs));
    }

    // slack columns, then artificials; rhs made nonnegative first
    let nslack = work
        .iter()
        .filter(|(_, rel, _)| *rel != Rel::Eq)
        .count();
    let ncols_total = nstruct + nslack + m;
    let art_start = nstruct + nslack;
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut basis = vec![0usize; m];
    let mut slack_idx = nstruct;
    for (i, (coeffs, rel, rhs)) in work.iter().enumerate() {
        let mut row = vec![0.0; ncols_total + 1];
        let flip = *rhs < 0.0;
        let sgn = if flip { -1.0 } else { 1.0 };
        for (j, &c) in coeffs.iter().enumerate() {
            row[j] = sgn * c;
        }
        row[ncols_total] = sgn * rhs;
        let eff_rel = match (rel, flip) {
            (Rel::Eq, _) => Rel::Eq,
            (Rel::Le, false) | (Rel::Ge, true) => Rel::Le,
            (Rel::Le, true) | (Rel::Ge, false) => Rel::Ge,
        };
        match eff_rel {
            Rel::Le => {
                row[slack_idx] = 1.0;
                basis[i] = slack_idx;
                slack_idx += 1;
            }
            Rel::Ge => {
                row[slack_idx] = -1.0;
                slack_idx += 1;
                row[art_start + i] = 1.0;
                basis[i] = art_start + i;
            }
            Rel::Eq => {
                row[art_start + i] = 1.0;
                basis[i] = art_start + i;
            }
        }
        rows.push(row);
    }

    let mut tab = Tableau {
        rows,
        basis,
        alive: vec![true; m],
        ncols: ncols_total,
        art_start,
        pivots: 0,
    };

    // phase 1: minimize the sum of artificials (skipped when none is basic)
    if tab.basis.iter().any(|&b| b >= art_start) {
        let mut cost1 = vec![0.0; ncols_total];
        for c in cost1.iter_mut().skip(art_start) {
            *c = 1.0;
        }
        match tab.run(&cost1, |_| true)? {
            SimplexEnd::Unbounded => unreachable!("phase-1 objective is bounded below"),
            SimplexEnd::Optimal => {}
        }
        let infeas: f64 = (0..m)
            .filter(|&i| tab.alive[i] && tab.basis[i] >= art_start)
            .map(|i| tab.rhs(i))
            .sum();
        if infeas > 1e-7 {
            return Ok(LpOutcome::Infeasible);
        }
        // drive artificials out of the basis or drop redundant rows
        for i in 0..m {
            if !tab.alive[i] || tab.basis[i] < art_start {
                continue;
            }
            let col = (0..art_start).find(|&j| tab.rows[i][j].abs() > tol::LP_PIVOT);
            match col {
                Some(j) => tab.pivot(i, j),
                None => tab.alive[i] = false,
            }
        }
    }

    // phase 2
    let mut cost2 = vec![0.0; ncols_total];
    for (j, sub) in subs.iter().enumerate() {
        let c = p.objective[j];
        match sub {
            VarSub::Shifted { col, .. } => cost2[*col] += c,
            VarSub::Flipped { col, .. } => cost2[*col] -= c,
            VarSub::Split { pos, neg } => {
                cost2[*pos] += c;
                cost2[*neg] -= c;
            }
        }
    }
    let art = tab.art_start;
    match tab.run(&cost2, |j| j < art)? {
        SimplexEnd::Unbounded => return Ok(LpOutcome::Unbounded),
        SimplexEnd::Optimal => {}
    }

    // read the solution back through the substitutions
    let mut xprime = vec![0.0; ncols_total];
    for i in 0..m {
        if tab.alive[i] {
            xprime[tab.basis[i]] = tab.rhs(i);
        }
    }
    let mut x = vec![0.0; p.num_vars];
    for (j, sub) in subs.iter().enumerate() {
        x[j] = match sub {
            VarSub::Shifted { col, lo } => lo + xprime[*col],
            VarSub::Flipped { col, hi } => hi - xprime[*col],
            VarSub::Split { pos, neg } => xprime[*pos] - xprime[*neg],
        };
    }
    let value = p
        .objective
        .iter()
        .zip(&x)
        .map(|(c, v)| c * v)
        .sum::<f64>();
    Ok(LpOutcome::Optimal { value, point: x })
}
