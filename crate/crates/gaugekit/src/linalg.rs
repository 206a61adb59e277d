//! Dense linear-algebra kernels: vectors as `Vec<f64>`, symmetric matrices,
//! dense linear maps, a cyclic Jacobi eigensolver, and generalized maximum
//! eigenvalues. Everything is deterministic and sized for desk-scale inputs.

use thiserror::Error;

use crate::tol;

/// Errors raised by the dense kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("entry ({i},{j}) breaks symmetry")]
    NotSymmetric { i: usize, j: usize },
    #[error("non-finite entry encountered")]
    NonFinite,
    #[error("jacobi sweep budget exhausted after {sweeps} sweeps (off-diagonal norm {off:.3e})")]
    JacobiNoConvergence { sweeps: usize, off: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:.6e})")]
    NotPsd { min_eig: f64 },
}

/// Maximum number of cyclic Jacobi sweeps before reporting failure.
pub const JACOBI_SWEEP_BUDGET: usize = 64;

// ---------------------------------------------------------------------------
// Vector helpers
// ---------------------------------------------------------------------------

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm1(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).sum()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `a + s*b`.
pub fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn scaled(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| s * x).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    axpy(a, -1.0, b)
}

pub fn check_finite(xs: &[f64]) -> Result<(), LinalgError> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(LinalgError::NonFinite)
    }
}

// ---------------------------------------------------------------------------
// Symmetric matrices
// ---------------------------------------------------------------------------

/// Dense symmetric matrix stored as a full row-major `n × n` array.
/// Symmetry is enforced exactly on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Builds from a full row-major array, rejecting asymmetric or
    /// non-finite input. Entries must satisfy `a[i][j] == a[j][i]` exactly.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        if data.len() != n * n {
            return Err(LinalgError::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        check_finite(&data)?;
        for i in 0..n {
            for j in (i + 1)..n {
                if data[i * n + j] != data[j * n + i] {
                    return Err(LinalgError::NotSymmetric { i, j });
                }
            }
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(LinalgError::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(n, data)
    }

    /// Builds from a flat array, symmetrizing as `(a + aᵀ)/2`.
    pub fn from_flat_symmetrized(n: usize, flat: &[f64]) -> Result<Self, LinalgError> {
        if flat.len() != n * n {
            return Err(LinalgError::DimensionMismatch {
                expected: n * n,
                got: flat.len(),
            });
        }
        check_finite(flat)?;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = 0.5 * (flat[i * n + j] + flat[j * n + i]);
            }
        }
        Ok(Self { n, data })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let n = d.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = d[i];
        }
        m
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets both `(i,j)` and `(j,i)`.
    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
        self.data[j * self.n + i] = v;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| dot(&self.data[i * self.n..(i + 1) * self.n], x))
            .collect()
    }

    /// Trace inner product `⟨self, other⟩ = Σᵢⱼ aᵢⱼ bᵢⱼ`.
    pub fn inner(&self, other: &SymMatrix) -> f64 {
        debug_assert_eq!(self.n, other.n);
        dot(&self.data, &other.data)
    }

    pub fn frobenius(&self) -> f64 {
        norm2(&self.data)
    }

    /// Flat row-major view; this is the vectorization used for PSD cones.
    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    pub fn into_flat(self) -> Vec<f64> {
        self.data
    }

    /// Smallest eigenvalue, via the Jacobi eigensolver.
    pub fn min_eigenvalue(&self) -> Result<f64, LinalgError> {
        let eig = jacobi_eigen(self)?;
        Ok(*eig.values.last().expect("nonempty spectrum"))
    }
}

// ---------------------------------------------------------------------------
// Dense linear maps
// ---------------------------------------------------------------------------

/// Dense linear map from `R^cols` to `R^rows`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl LinearMap {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch {
                expected: rows * cols,
                got: data.len(),
            });
        }
        check_finite(&data)?;
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinalgError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(LinalgError::DimensionMismatch {
                    expected: c,
                    got: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Self::new(r, c, data)
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, s: f64) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = s;
        }
        Self { rows: n, cols: n, data }
    }

    /// One-row map `x ↦ ⟨a, x⟩`.
    pub fn row_map(a: &[f64]) -> Self {
        Self {
            rows: 1,
            cols: a.len(),
            data: a.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// Applies the adjoint `A*` (the transpose) without materializing it.
    pub fn adjoint_apply(&self, y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(y.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            let yi = y[i];
            if yi != 0.0 {
                for (j, out_j) in out.iter_mut().enumerate() {
                    *out_j += yi * self.data[i * self.cols + j];
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> LinearMap {
        let mut data = vec![0.0; self.rows * self.cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        LinearMap {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Composition `self ∘ other`, i.e. `x ↦ self(other(x))`.
    pub fn compose(&self, other: &LinearMap) -> Result<LinearMap, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut data = vec![0.0; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.data[i * self.cols + k];
                if aik != 0.0 {
                    for j in 0..other.cols {
                        data[i * other.cols + j] += aik * other.data[k * other.cols + j];
                    }
                }
            }
        }
        Ok(LinearMap {
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| self.get(i, j) == if i == j { 1.0 } else { 0.0 })
            })
    }

    /// Gram matrix `AᵀA`.
    pub fn gram(&self) -> SymMatrix {
        let n = self.cols;
        let mut data = vec![0.0; n * n];
        for i in 0..self.rows {
            let row = self.row(i);
            for a in 0..n {
                let ra = row[a];
                if ra != 0.0 {
                    for b in 0..n {
                        data[a * n + b] += ra * row[b];
                    }
                }
            }
        }
        // symmetrize away rounding in the accumulation order
        SymMatrix::from_flat_symmetrized(n, &data).expect("gram is finite")
    }
}

// ---------------------------------------------------------------------------
// Eigendecomposition
// ---------------------------------------------------------------------------

/// Spectral decomposition of a symmetric matrix: `values` descending,
/// `vectors[k]` is the unit eigenvector paired with `values[k]`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

/// Cyclic Jacobi eigendecomposition. Deterministic: fixed sweep order,
/// eigenvalues sorted descending with index-order tie-breaking, and each
/// eigenvector's first significant component made positive.
pub fn jacobi_eigen(m: &SymMatrix) -> Result<Eigen, LinalgError> {
    let n = m.order();
    if n == 0 {
        return Ok(Eigen {
            values: vec![],
            vectors: vec![],
        });
    }
    let mut a = m.data.clone();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let frob = m.frobenius();
    let target = tol::EIG_REL * 1e-2 * frob.max(f64::MIN_POSITIVE);

    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += 2.0 * a[i * n + j] * a[i * n + j];
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    while off(&a) > target {
        if sweeps >= JACOBI_SWEEP_BUDGET {
            return Err(LinalgError::JacobiNoConvergence {
                sweeps,
                off: off(&a),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= target / (n as f64) {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    -1.0 / (-theta + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // rows/columns p and q of A
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                // accumulate rotations: columns of V converge to eigenvectors
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[j * n + j]
            .partial_cmp(&a[i * n + i])
            .expect("finite eigenvalues")
            .then(i.cmp(&j))
    });
    let values: Vec<f64> = order.iter().map(|&k| a[k * n + k]).collect();
    let vectors: Vec<Vec<f64>> = order
        .iter()
        .map(|&k| {
            let mut col: Vec<f64> = (0..n).map(|i| v[i * n + k]).collect();
            let nrm = norm2(&col);
            if nrm > 0.0 {
                for x in &mut col {
                    *x /= nrm;
                }
            }
            if let Some(first) = col.iter().find(|x| x.abs() > 1e-12) {
                if *first < 0.0 {
                    for x in &mut col {
                        *x = -*x;
                    }
                }
            }
            col
        })
        .collect();
    Ok(Eigen { values, vectors })
}

/// Lower-triangular Cholesky factor of a positive definite matrix,
/// row-major. Returns `None` when a pivot is not strictly positive.
pub fn cholesky(m: &SymMatrix) -> Option<Vec<f64>> {
    let n = m.order();
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = m.get(i, j);
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}

fn forward_solve(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * n + k] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    x
}

fn back_solve_transposed(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    // solves Lᵀ x = b
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in (i + 1)..n {
            s -= l[k * n + i] * x[k];
        }
        x[i] = s / l[i * n + i];
    }
    x
}

/// Result of [`gen_eigmax`]. `value` is `f64::INFINITY` when the supremum
/// `sup { xᵀUx / xᵀCx : xᵀCx > 0 }` is unbounded, in which case `vector`
/// is an unbounded direction from the null space of `C`. When the positive
/// part of `C` is empty the supremum is over an empty set and `value` is
/// `f64::NEG_INFINITY`.
#[derive(Debug, Clone)]
pub struct GenEig {
    pub value: f64,
    pub vector: Vec<f64>,
}

fn normalize_sign(mut v: Vec<f64>) -> Vec<f64> {
    let nrm = norm2(&v);
    if nrm > 0.0 {
        for x in &mut v {
            *x /= nrm;
        }
    }
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
        if *first < 0.0 {
            for x in &mut v {
                *x = -*x;
            }
        }
    }
    v
}

/// Largest generalized eigenvalue of the pencil `U x = λ C x` with `C ⪰ 0`.
///
/// With `C ≻ 0` this reduces by Cholesky to an ordinary symmetric
/// eigenproblem. With `C` singular, the supremum of the Rayleigh quotient
/// can be `+∞`: any null direction `w` of `C` with `wᵀUw > 0`, or a
/// degenerate null direction coupled to the range of `C`, certifies
/// unboundedness. Otherwise the strictly negative null block is eliminated
/// by a Schur complement and the reduced definite problem is solved.
pub fn gen_eigmax(u: &SymMatrix, c: &SymMatrix) -> Result<GenEig, LinalgError> {
    let n = u.order();
    if c.order() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: n,
            got: c.order(),
        });
    }

    let eig_c = jacobi_eigen(c)?;
    let frob_c = c.frobenius();
    let zero_tol = tol::NULL_EIG_REL * frob_c + f64::MIN_POSITIVE;
    if let Some(&min) = eig_c.values.last() {
        if min < -zero_tol {
            return Err(LinalgError::NotPsd { min_eig: min });
        }
    }

    let pos: Vec<usize> = (0..n).filter(|&k| eig_c.values[k] > zero_tol).collect();
    let null: Vec<usize> = (0..n).filter(|&k| eig_c.values[k] <= zero_tol).collect();

    if null.is_empty() {
        if let Some(l) = cholesky(c) {
            // B = L⁻¹ U L⁻ᵀ, columnwise
            let mut b = vec![0.0; n * n];
            for j in 0..n {
                let col: Vec<f64> = (0..n).map(|i| u.get(i, j)).collect();
                let w = forward_solve(&l, n, &col);
                for i in 0..n {
                    b[i * n + j] = w[i];
                }
            }
            // now apply L⁻¹ from the right: B ← B L⁻ᵀ, i.e. solve rows
            let mut bt = vec![0.0; n * n];
            for i in 0..n {
                let row: Vec<f64> = (0..n).map(|j| b[i * n + j]).collect();
                let w = forward_solve(&l, n, &row);
                for j in 0..n {
                    bt[i * n + j] = w[j];
                }
            }
            let bm = SymMatrix::from_flat_symmetrized(n, &bt)?;
            let eig_b = jacobi_eigen(&bm)?;
            let lambda = eig_b.values[0];
            let v = back_solve_transposed(&l, n, &eig_b.vectors[0]);
            return Ok(GenEig {
                value: lambda,
                vector: normalize_sign(v),
            });
        }
        // borderline definite matrix: fall through to the eigen-basis path
        // by treating the smallest eigenvalue as null
    }

    let basis_vec = |k: usize| -> &Vec<f64> { &eig_c.vectors[k] };
    let u_quad = |x: &[f64], y: &[f64]| -> f64 { dot(x, &u.matvec(y)) };

    // null-block analysis
    if !null.is_empty() {
        let nn = null.len();
        let mut unn = SymMatrix::zeros(nn);
        for (a, &ka) in null.iter().enumerate() {
            for (b, &kb) in null.iter().enumerate().skip(a) {
                let val = u_quad(basis_vec(ka), basis_vec(kb));
                unn.set_sym(a, b, val);
            }
        }
        let tol_u = tol::NULL_EIG_REL * (1.0 + u.frobenius());
        let eig_unn = jacobi_eigen(&unn)?;
        // positive energy in the null space of C
        if eig_unn.values[0] > tol_u {
            let mut dir = vec![0.0; n];
            for (a, &ka) in null.iter().enumerate() {
                dir = axpy(&dir, eig_unn.vectors[0][a], basis_vec(ka));
            }
            return Ok(GenEig {
                value: f64::INFINITY,
                vector: normalize_sign(dir),
            });
        }
        // zero-energy null directions coupled to the range of C
        for (idx, &mu) in eig_unn.values.iter().enumerate() {
            if mu.abs() <= tol_u {
                let mut z = vec![0.0; n];
                for (a, &ka) in null.iter().enumerate() {
                    z = axpy(&z, eig_unn.vectors[idx][a], basis_vec(ka));
                }
                let uz = u.matvec(&z);
                let coupled = pos
                    .iter()
                    .any(|&kp| dot(basis_vec(kp), &uz).abs() > tol_u);
                if coupled {
                    return Ok(GenEig {
                        value: f64::INFINITY,
                        vector: normalize_sign(z),
                    });
                }
            }
        }
        if pos.is_empty() {
            return Ok(GenEig {
                value: f64::NEG_INFINITY,
                vector: vec![0.0; n],
            });
        }
        // Schur complement over the strictly negative null directions
        let neg: Vec<usize> = (0..nn)
            .filter(|&i| eig_unn.values[i] < -tol_u)
            .collect();
        let np = pos.len();
        let mut s = SymMatrix::zeros(np);
        for (a, &ka) in pos.iter().enumerate() {
            for (b, &kb) in pos.iter().enumerate().skip(a) {
                s.set_sym(a, b, u_quad(basis_vec(ka), basis_vec(kb)));
            }
        }
        let mut neg_dirs: Vec<Vec<f64>> = Vec::new();
        for &i in &neg {
            let mut z = vec![0.0; n];
            for (a, &ka) in null.iter().enumerate() {
                z = axpy(&z, eig_unn.vectors[i][a], basis_vec(ka));
            }
            neg_dirs.push(z);
        }
        for (j, &i) in neg.iter().enumerate() {
            let mu = eig_unn.values[i];
            let uz = u.matvec(&neg_dirs[j]);
            let q: Vec<f64> = pos.iter().map(|&kp| dot(basis_vec(kp), &uz)).collect();
            for a in 0..np {
                for b in a..np {
                    let val = s.get(a, b) - q[a] * q[b] / mu;
                    s.set_sym(a, b, val);
                }
            }
        }
        // scale by the positive eigenvalues of C
        let dp: Vec<f64> = pos.iter().map(|&k| eig_c.values[k]).collect();
        let mut shat = SymMatrix::zeros(np);
        for a in 0..np {
            for b in a..np {
                shat.set_sym(a, b, s.get(a, b) / (dp[a].sqrt() * dp[b].sqrt()));
            }
        }
        let eig_s = jacobi_eigen(&shat)?;
        let lambda = eig_s.values[0];
        let a_coeff: Vec<f64> = (0..np)
            .map(|a| eig_s.vectors[0][a] / dp[a].sqrt())
            .collect();
        let mut v = vec![0.0; n];
        for (a, &ka) in pos.iter().enumerate() {
            v = axpy(&v, a_coeff[a], basis_vec(ka));
        }
        // recover the optimal null-space component
        for (j, &i) in neg.iter().enumerate() {
            let mu = eig_unn.values[i];
            let uz = u.matvec(&neg_dirs[j]);
            let mut pa = vec![0.0; n];
            for (a, &ka) in pos.iter().enumerate() {
                pa = axpy(&pa, a_coeff[a], basis_vec(ka));
            }
            let coeff = -dot(&pa, &uz) / mu;
            v = axpy(&v, coeff, &neg_dirs[j]);
        }
        return Ok(GenEig {
            value: lambda,
            vector: normalize_sign(v),
        });
    }

    // cholesky failed on a numerically semidefinite matrix with no null
    // eigenvalues detected; treat as definite via the eigen basis
    let dp: Vec<f64> = pos.iter().map(|&k| eig_c.values[k]).collect();
    let np = pos.len();
    let mut shat = SymMatrix::zeros(np);
    for a in 0..np {
        for b in a..np {
            let val = u_quad(basis_vec(pos[a]), basis_vec(pos[b]));
            shat.set_sym(a, b, val / (dp[a].sqrt() * dp[b].sqrt()));
        }
    }
    let eig_s = jacobi_eigen(&shat)?;
    let mut v = vec![0.0; n];
    for a in 0..np {
        v = axpy(&v, eig_s.vectors[0][a] / dp[a].sqrt(), basis_vec(pos[a]));
    }
    Ok(GenEig {
        value: eig_s.values[0],
        vector: normalize_sign(v),
    })
}

// ---------------------------------------------------------------------------
// Least squares and null spaces (eigen-based pseudo-inverse)
// ---------------------------------------------------------------------------

/// Minimum-norm least-squares solution of `A x = b`.
pub fn least_squares(a: &LinearMap, b: &[f64]) -> Result<Vec<f64>, LinalgError> {
    if b.len() != a.rows() {
        return Err(LinalgError::DimensionMismatch {
            expected: a.rows(),
            got: b.len(),
        });
    }
    let gram = a.gram();
    let rhs = a.adjoint_apply(b);
    let eig = jacobi_eigen(&gram)?;
    let lam_max = eig.values.first().copied().unwrap_or(0.0).max(0.0);
    let cut = tol::NULL_EIG_REL * (1.0 + lam_max);
    let mut x = vec![0.0; a.cols()];
    for (k, &lam) in eig.values.iter().enumerate() {
        if lam > cut {
            let coeff = dot(&eig.vectors[k], &rhs) / lam;
            x = axpy(&x, coeff, &eig.vectors[k]);
        }
    }
    Ok(x)
}

/// Orthonormal basis of the null space of `A`.
pub fn nullspace_basis(a: &LinearMap) -> Result<Vec<Vec<f64>>, LinalgError> {
    let gram = a.gram();
    let eig = jacobi_eigen(&gram)?;
    let lam_max = eig.values.first().copied().unwrap_or(0.0).max(0.0);
    let cut = tol::NULL_EIG_REL * (1.0 + lam_max);
    Ok(eig
        .values
        .iter()
        .zip(eig.vectors)
        .filter(|(&lam, _)| lam <= cut)
        .map(|(_, v)| v)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn jacobi_diagonal() {
        let m = SymMatrix::from_diag(&[3.0, 1.0]);
        let eig = jacobi_eigen(&m).unwrap();
        assert_eq!(eig.values, vec![3.0, 1.0]);
        assert_eq!(eig.vectors[0], vec![1.0, 0.0]);
        assert_eq!(eig.vectors[1], vec![0.0, 1.0]);
    }

    #[test]
    fn jacobi_offdiag_pair() {
        let m = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let eig = jacobi_eigen(&m).unwrap();
        assert_abs_diff_eq!(eig.values[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eig.values[1], -1.0, epsilon = 1e-12);
    }

    #[test]
    fn jacobi_rank_one_plus_identity() {
        // I + ones: eigenvalues 4, 1, 1
        let m = SymMatrix::from_rows(&[
            vec![2.0, 1.0, 1.0],
            vec![1.0, 2.0, 1.0],
            vec![1.0, 1.0, 2.0],
        ])
        .unwrap();
        let eig = jacobi_eigen(&m).unwrap();
        assert_abs_diff_eq!(eig.values[0], 4.0, epsilon = 1e-10);
        assert_abs_diff_eq!(eig.values[1], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(eig.values[2], 1.0, epsilon = 1e-10);
        // residual check M v = λ v
        for k in 0..3 {
            let mv = m.matvec(&eig.vectors[k]);
            let lv = scaled(&eig.vectors[k], eig.values[k]);
            assert!(norm_inf(&sub(&mv, &lv)) <= 1e-10 * m.frobenius());
        }
    }

    #[test]
    fn symmetry_is_enforced() {
        let err = SymMatrix::new(2, vec![1.0, 2.0, 2.0 + 1e-14, 1.0]).unwrap_err();
        assert!(matches!(err, LinalgError::NotSymmetric { .. }));
    }

    #[test]
    fn adjoint_involution() {
        let a = LinearMap::from_rows(&[vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap();
        assert_eq!(a.adjoint().adjoint(), a);
    }

    #[test]
    fn gen_eig_identity() {
        let g = gen_eigmax(&SymMatrix::identity(2), &SymMatrix::identity(2)).unwrap();
        assert_abs_diff_eq!(g.value, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn gen_eig_diagonal() {
        let u = SymMatrix::from_diag(&[2.0, -1.0]);
        let g = gen_eigmax(&u, &SymMatrix::identity(2)).unwrap();
        assert_abs_diff_eq!(g.value, 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(g.vector[0].abs(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn gen_eig_singular_pencil_schur() {
        // Pencil with singular C whose Rayleigh supremum is n.
        for n in [1.0_f64, 10.0, 100.0] {
            let u = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, -1.0 / n]]).unwrap();
            let c = SymMatrix::from_diag(&[1.0, 0.0]);
            let g = gen_eigmax(&u, &c).unwrap();
            assert!((g.value - n).abs() <= 1e-6 * n, "value {} for n {}", g.value, n);
            // eigen residual: U v = λ C v
            let uv = u.matvec(&g.vector);
            let cv = scaled(&c.matvec(&g.vector), g.value);
            assert!(norm_inf(&sub(&uv, &cv)) <= 1e-8 * (1.0 + n));
        }
    }

    #[test]
    fn gen_eig_unbounded_direction() {
        // positive energy along the null space of C
        let u = SymMatrix::from_diag(&[0.0, 1.0]);
        let c = SymMatrix::from_diag(&[1.0, 0.0]);
        let g = gen_eigmax(&u, &c).unwrap();
        assert!(g.value.is_infinite() && g.value > 0.0);
        assert_abs_diff_eq!(g.vector[1].abs(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn gen_eig_coupled_zero_direction_is_unbounded() {
        let u = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let c = SymMatrix::from_diag(&[1.0, 0.0]);
        let g = gen_eigmax(&u, &c).unwrap();
        assert!(g.value.is_infinite() && g.value > 0.0);
    }

    #[test]
    fn gen_eig_rejects_indefinite_c() {
        let u = SymMatrix::identity(2);
        let c = SymMatrix::from_diag(&[1.0, -1.0]);
        assert!(matches!(
            gen_eigmax(&u, &c),
            Err(LinalgError::NotPsd { .. })
        ));
    }

    #[test]
    fn gen_eig_dominates_rayleigh_samples() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let u = SymMatrix::from_rows(&[
            vec![1.0, 0.5, 0.0],
            vec![0.5, -2.0, 0.3],
            vec![0.0, 0.3, 0.7],
        ])
        .unwrap();
        let c = SymMatrix::from_diag(&[2.0, 1.0, 0.5]);
        let g = gen_eigmax(&u, &c).unwrap();
        for _ in 0..200 {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
            let cx = dot(&x, &c.matvec(&x));
            if cx > 1e-9 {
                let q = dot(&x, &u.matvec(&x)) / cx;
                assert!(q <= g.value + 1e-9);
            }
        }
    }

    #[test]
    fn least_squares_and_nullspace() {
        let a = LinearMap::from_rows(&[vec![1.0, 1.0]]).unwrap();
        let x = least_squares(&a, &[2.0]).unwrap();
        assert_abs_diff_eq!(x[0], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(x[1], 1.0, epsilon = 1e-10);
        let ns = nullspace_basis(&a).unwrap();
        assert_eq!(ns.len(), 1);
        assert_abs_diff_eq!(dot(&ns[0], &[1.0, 1.0]), 0.0, epsilon = 1e-10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn eigen_reconstruction(seed in 0u64..500, n in 1usize..8) {
            use rand::prelude::*;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut m = SymMatrix::zeros(n);
            for i in 0..n {
                for j in i..n {
                    m.set_sym(i, j, rng.random_range(-3.0..3.0));
                }
            }
            let eig = jacobi_eigen(&m).unwrap();
            // ‖M − VΛVᵀ‖_F ≤ 1e−9 (1 + ‖M‖_F)
            let mut err = 0.0_f64;
            for i in 0..n {
                for j in 0..n {
                    let mut rec = 0.0;
                    for k in 0..n {
                        rec += eig.values[k] * eig.vectors[k][i] * eig.vectors[k][j];
                    }
                    err += (m.get(i, j) - rec).powi(2);
                }
            }
            prop_assert!(err.sqrt() <= 1e-9 * (1.0 + m.frobenius()));
            // orthonormality
            for a in 0..n {
                for b in a..n {
                    let d = dot(&eig.vectors[a], &eig.vectors[b]);
                    let want = if a == b { 1.0 } else { 0.0 };
                    prop_assert!((d - want).abs() <= 1e-10);
                }
            }
        }

        #[test]
        fn gen_eig_matches_jacobi_for_identity_c(seed in 0u64..200) {
            use rand::prelude::*;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = 4;
            let mut m = SymMatrix::zeros(n);
            for i in 0..n {
                for j in i..n {
                    m.set_sym(i, j, rng.random_range(-2.0..2.0));
                }
            }
            let top = jacobi_eigen(&m).unwrap().values[0];
            let g = gen_eigmax(&m, &SymMatrix::identity(n)).unwrap();
            prop_assert!((g.value - top).abs() <= 1e-9 * (1.0 + top.abs()));
        }
    }
}
