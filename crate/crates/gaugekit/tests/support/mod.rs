//! Shared generators and oracles for the acceptance suite.

use gaugekit::sets::linear_infimum;
use gaugekit::*;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

/// Independent antipolar oracle straight from the definition:
/// `y ∈ C′ ⟺ inf { ⟨x,y⟩ : x ∈ C } ≥ 1`, with the infimum from an LP
/// over the set's own rows. `None` when the set has no LP encoding.
pub fn definition_oracle(c: &SetDescr, y: &[f64]) -> Option<bool> {
    let inf = linear_infimum(c, y).ok()??;
    Some(inf >= 1.0 - 1e-7)
}

/// Skip filter for points whose definition margin sits on the membership
/// tolerance boundary.
pub fn near_definition_boundary(c: &SetDescr, y: &[f64]) -> bool {
    match linear_infimum(c, y) {
        Ok(Some(v)) => (v - 1.0).abs() < 1e-6,
        _ => false,
    }
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn random_map(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> LinearMap {
    let data: Vec<f64> = (0..rows * cols).map(|_| gauss(rng)).collect();
    LinearMap::new(rows, cols, data).unwrap()
}

/// Random feasible instance for the weak-duality families:
/// 0 = minimum norm, 1 = one-norm recovery with a Euclidean tolerance,
/// 2 = conic orthant, 3 = small PSD. Returns the problem and a feasible
/// primal point.
pub fn random_feasible_instance(
    family: usize,
    rng: &mut ChaCha8Rng,
) -> Option<(GaugeProblem, Vec<f64>)> {
    match family {
        0 => {
            let n = rng.random_range(2..=5usize);
            let m = rng.random_range(1..n.max(2));
            let a = random_map(m, n, rng);
            let x0: Vec<f64> = (0..n).map(|_| gauss(rng)).collect();
            let b = a.apply(&x0);
            let kappa = match rng.random_range(0..3) {
                0 => Gauge::norm(NormKind::One, n),
                1 => Gauge::norm(NormKind::Inf, n),
                _ => Gauge::norm(NormKind::Two, n),
            };
            let p = GaugeProblem::new(kappa, a, b, Gauge::norm(NormKind::Two, m), 0.0).ok()?;
            Some((p, x0))
        }
        1 => {
            let n = rng.random_range(2..=4usize);
            let m = rng.random_range(1..=n);
            let a = random_map(m, n, rng);
            let x0: Vec<f64> = (0..n).map(|_| gauss(rng)).collect();
            let sigma = 0.5;
            let dir: Vec<f64> = (0..m).map(|_| gauss(rng)).collect();
            let nrm = linalg_norm2(&dir);
            if nrm == 0.0 {
                return None;
            }
            let r: Vec<f64> = dir.iter().map(|v| v * 0.9 * sigma / nrm).collect();
            let b: Vec<f64> = a.apply(&x0).iter().zip(&r).map(|(av, rv)| av + rv).collect();
            let p = GaugeProblem::new(
                Gauge::norm(NormKind::One, n),
                a,
                b,
                Gauge::norm(NormKind::Two, m),
                sigma,
            )
            .ok()?;
            Some((p, x0))
        }
        2 => {
            let n = rng.random_range(2..=5usize);
            let m = rng.random_range(1..=3usize.min(n));
            let a = random_map(m, n, rng);
            let c: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..2.0)).collect();
            let x0: Vec<f64> = (0..n).map(|_| gauss(rng).abs()).collect();
            let b = a.apply(&x0);
            let kappa = Gauge::conic(c, ConeDescr::NonnegOrthant(n)).unwrap();
            let p = GaugeProblem::new(kappa, a, b, Gauge::norm(NormKind::Two, m), 0.0).ok()?;
            Some((p, x0))
        }
        _ => {
            let order = 2usize;
            let n2 = order * order;
            // strictly definite objective keeps the polar domain full
            let r = random_map(order, order, rng);
            let mut cflat = vec![0.0; n2];
            for i in 0..order {
                for j in 0..order {
                    let mut s = 0.0;
                    for k in 0..order {
                        s += r.get(k, i) * r.get(k, j);
                    }
                    cflat[i * order + j] = s + if i == j { 0.1 } else { 0.0 };
                }
            }
            let cm = SymMatrix::from_flat_symmetrized(order, &cflat).unwrap();
            let kappa = Gauge::conic_psd(&cm).ok()?;
            let m = 2;
            let mut rows = Vec::new();
            for _ in 0..m {
                let raw: Vec<f64> = (0..n2).map(|_| gauss(rng)).collect();
                rows.push(
                    SymMatrix::from_flat_symmetrized(order, &raw)
                        .unwrap()
                        .into_flat(),
                );
            }
            let a = LinearMap::from_rows(&rows).unwrap();
            let s = random_map(order, order, rng);
            let mut x0 = vec![0.0; n2];
            for i in 0..order {
                for j in 0..order {
                    let mut acc = 0.0;
                    for k in 0..order {
                        acc += s.get(k, i) * s.get(k, j);
                    }
                    x0[i * order + j] = acc;
                }
            }
            let b = a.apply(&x0);
            let p = GaugeProblem::new(kappa, a, b, Gauge::norm(NormKind::Two, m), 0.0).ok()?;
            Some((p, x0))
        }
    }
}

fn linalg_norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Random fully polyhedral instance (n ≤ 6) with a structurally feasible
/// primal and the domain-overlap qualifications satisfied.
pub fn random_polyhedral_instance(rng: &mut ChaCha8Rng) -> Option<GaugeProblem> {
    let n = rng.random_range(2..=6usize);
    let m = rng.random_range(1..=3usize.min(n));
    let a = random_map(m, n, rng);
    let (kappa, x0): (Gauge, Vec<f64>) = match rng.random_range(0..5) {
        0 => (
            Gauge::norm(NormKind::One, n),
            (0..n).map(|_| gauss(rng)).collect(),
        ),
        1 => (
            Gauge::norm(NormKind::Inf, n),
            (0..n).map(|_| gauss(rng)).collect(),
        ),
        2 => {
            let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.3..3.0)).collect();
            (
                Gauge::weighted_norm(NormKind::One, w).unwrap(),
                (0..n).map(|_| gauss(rng)).collect(),
            )
        }
        3 => {
            // symmetric atoms spanning the space, plus one random pair
            let mut atoms = Vec::new();
            for i in 0..n {
                let scale = rng.random_range(0.5..2.0);
                let mut e = vec![0.0; n];
                e[i] = scale;
                atoms.push(e.clone());
                atoms.push(e.iter().map(|v| -v).collect());
            }
            let extra: Vec<f64> = (0..n).map(|_| gauss(rng)).collect();
            atoms.push(extra.clone());
            atoms.push(extra.iter().map(|v| -v).collect());
            let x0: Vec<f64> = {
                let mut x = vec![0.0; n];
                for atom in &atoms {
                    let w = rng.random_range(0.0..0.5);
                    for (xi, ai) in x.iter_mut().zip(atom) {
                        *xi += w * ai;
                    }
                }
                x
            };
            (Gauge::atomic(atoms).unwrap(), x0)
        }
        _ => {
            let c: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..2.0)).collect();
            (
                Gauge::conic(c, ConeDescr::NonnegOrthant(n)).unwrap(),
                (0..n).map(|_| gauss(rng).abs() + 0.1).collect(),
            )
        }
    };
    let rho = if rng.random_range(0..2) == 0 {
        Gauge::norm(NormKind::One, m)
    } else {
        Gauge::norm(NormKind::Inf, m)
    };
    let sigma = if rng.random_range(0..2) == 0 { 0.0 } else { 0.2 };
    let b = if sigma == 0.0 {
        a.apply(&x0)
    } else {
        let dir: Vec<f64> = (0..m).map(|_| gauss(rng)).collect();
        let rv = rho.evaluate(&dir).unwrap();
        if !(rv.is_finite() && rv > 1e-9) {
            return None;
        }
        let r: Vec<f64> = dir.iter().map(|v| v * 0.5 * sigma / rv).collect();
        a.apply(&x0).iter().zip(&r).map(|(av, rv)| av + rv).collect()
    };
    GaugeProblem::new(kappa, a, b, rho, sigma).ok()
}

/// Trace-form SDP relaxation data for max-cut on the given edge list.
pub fn maxcut_problem(edges: &[(usize, usize)], n: usize) -> GaugeProblem {
    let mut degree = vec![0.0; n];
    let mut dpa = SymMatrix::zeros(n);
    for &(i, j) in edges {
        degree[i] += 1.0;
        degree[j] += 1.0;
        dpa.set_sym(i, j, 1.0);
    }
    for i in 0..n {
        dpa.set_sym(i, i, degree[i]);
    }
    let mut rows = Vec::new();
    for i in 0..n {
        let mut r = vec![0.0; n * n];
        r[i * n + i] = 1.0;
        rows.push(r);
    }
    GaugeProblem::new(
        Gauge::conic_psd(&dpa).unwrap(),
        LinearMap::from_rows(&rows).unwrap(),
        vec![1.0; n],
        Gauge::norm(NormKind::Two, n),
        0.0,
    )
    .unwrap()
}

/// Random unit-diagonal PSD matrix.
pub fn random_correlation_matrix(n: usize, rng: &mut ChaCha8Rng) -> SymMatrix {
    let r = random_map(n, n, rng);
    let mut g = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut s = 0.0;
            for k in 0..n {
                s += r.get(k, i) * r.get(k, j);
            }
            g[i * n + j] = s;
        }
    }
    for i in 0..n {
        g[i * n + i] += 1e-6;
    }
    let mut x = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            x[i * n + j] = g[i * n + j] / (g[i * n + i] * g[j * n + j]).sqrt();
        }
    }
    for i in 0..n {
        x[i * n + i] = 1.0;
    }
    SymMatrix::from_flat_symmetrized(n, &x).unwrap()
}
