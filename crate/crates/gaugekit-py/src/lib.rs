//! Python bindings: gauges, convex-set descriptors, and gauge programs
//! with their duals, exposed over plain lists of floats.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use gaugekit::sensitivity;
use gaugekit::{
    antipolar, build_bidual, build_gauge_dual, build_lagrange_dual, certify, solve_gauge_dual,
    solve_primal_oracle, Assumptions, ConeDescr, Gauge as CoreGauge, GaugeProblem, LinearMap,
    NormKind, RayLike, SetDescr, SetFunction, SubgradConfig,
};

fn py_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_norm_kind(kind: &str) -> PyResult<NormKind> {
    match kind {
        "1" | "one" | "l1" => Ok(NormKind::One),
        "2" | "two" | "l2" => Ok(NormKind::Two),
        "inf" | "max" => Ok(NormKind::Inf),
        other => Err(py_err(format!("unknown norm kind `{other}` (one/two/inf)"))),
    }
}

fn map_from_rows(rows: Vec<Vec<f64>>) -> PyResult<LinearMap> {
    LinearMap::from_rows(&rows).map_err(py_err)
}

#[pyclass(frozen, from_py_object, name = "Cone")]
#[derive(Clone)]
struct PyCone {
    inner: ConeDescr,
}

#[pymethods]
impl PyCone {
    #[staticmethod]
    fn orthant(n: usize) -> Self {
        PyCone {
            inner: ConeDescr::NonnegOrthant(n),
        }
    }

    #[staticmethod]
    fn psd(order: usize) -> Self {
        PyCone {
            inner: ConeDescr::Psd(order),
        }
    }

    #[staticmethod]
    fn zero(n: usize) -> Self {
        PyCone {
            inner: ConeDescr::Zero(n),
        }
    }

    #[staticmethod]
    fn free(n: usize) -> Self {
        PyCone {
            inner: ConeDescr::Free(n),
        }
    }

    #[staticmethod]
    fn rays(rays: Vec<Vec<f64>>) -> PyResult<Self> {
        let dim = rays.first().map(|r| r.len()).unwrap_or(0);
        if dim == 0 || rays.iter().any(|r| r.len() != dim) {
            return Err(py_err("rays need a consistent nonzero dimension"));
        }
        Ok(PyCone {
            inner: ConeDescr::Polyhedral { dim, rays },
        })
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn contains(&self, x: Vec<f64>) -> PyResult<bool> {
        self.inner.contains(&x).map_err(py_err)
    }

    fn dual_contains(&self, s: Vec<f64>) -> PyResult<bool> {
        self.inner.dual_contains(&s).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("Cone({:?})", self.inner)
    }
}

#[pyclass(frozen, from_py_object, name = "Gauge")]
#[derive(Clone)]
struct PyGauge {
    inner: CoreGauge,
}

#[pymethods]
impl PyGauge {
    #[staticmethod]
    #[pyo3(signature = (kind, dim, weights=None))]
    fn norm(kind: &str, dim: usize, weights: Option<Vec<f64>>) -> PyResult<Self> {
        let kind = parse_norm_kind(kind)?;
        let inner = match weights {
            None => CoreGauge::norm(kind, dim),
            Some(w) => {
                if w.len() != dim {
                    return Err(py_err("weights length must equal dim"));
                }
                CoreGauge::weighted_norm(kind, w).map_err(py_err)?
            }
        };
        Ok(PyGauge { inner })
    }

    #[staticmethod]
    fn atomic(atoms: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(PyGauge {
            inner: CoreGauge::atomic(atoms).map_err(py_err)?,
        })
    }

    /// Conic gauge `x ↦ ⟨c,x⟩ + δ_K(x)`.
    #[staticmethod]
    fn conic(c: Vec<f64>, cone: PyCone) -> PyResult<Self> {
        Ok(PyGauge {
            inner: CoreGauge::conic(c, cone.inner).map_err(py_err)?,
        })
    }

    /// PSD conic gauge from a symmetric objective matrix (given by rows).
    #[staticmethod]
    fn conic_psd(rows: Vec<Vec<f64>>) -> PyResult<Self> {
        let m = gaugekit::SymMatrix::from_rows(&rows).map_err(py_err)?;
        Ok(PyGauge {
            inner: CoreGauge::conic_psd(&m).map_err(py_err)?,
        })
    }

    /// Sum of gauges over consecutive variable blocks.
    #[staticmethod]
    fn sum(parts: Vec<PyGauge>) -> PyResult<Self> {
        Ok(PyGauge {
            inner: CoreGauge::sum(parts.into_iter().map(|p| p.inner).collect())
                .map_err(py_err)?,
        })
    }

    /// Composition `x ↦ inner(A x)`.
    #[staticmethod]
    fn compose(inner: PyGauge, rows: Vec<Vec<f64>>) -> PyResult<Self> {
        Ok(PyGauge {
            inner: CoreGauge::composed(inner.inner, map_from_rows(rows)?).map_err(py_err)?,
        })
    }

    /// Lovász extension of a set-function table indexed by bitmask.
    #[staticmethod]
    fn lovasz(n: usize, table: Vec<f64>) -> PyResult<Self> {
        let f = SetFunction::new(n, table).map_err(py_err)?;
        Ok(PyGauge {
            inner: CoreGauge::lovasz(f),
        })
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn evaluate(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.evaluate(&x).map_err(py_err)
    }

    /// Polar value `κ°(y) = sup { ⟨x,y⟩ : κ(x) ≤ 1 }`.
    fn polar(&self, y: Vec<f64>) -> PyResult<f64> {
        self.inner.polar_evaluate(&y).map_err(py_err)
    }

    fn polar_subgradient(&self, y: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.polar_subgradient(&y).map_err(py_err)
    }

    fn check_polar_inequality(&self, x: Vec<f64>, y: Vec<f64>) -> PyResult<bool> {
        self.inner.check_polar_inequality(&x, &y).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("Gauge({})", self.inner.describe())
    }
}

#[pyclass(frozen, from_py_object, name = "ConvexSet")]
#[derive(Clone)]
struct PySet {
    inner: SetDescr,
}

#[pymethods]
impl PySet {
    /// `{ x : rho(center − x) ≤ sigma }`.
    #[staticmethod]
    fn ball(rho: PyGauge, center: Vec<f64>, sigma: f64) -> Self {
        PySet {
            inner: SetDescr::GaugeBallTranslate {
                rho: rho.inner,
                center,
                sigma,
            },
        }
    }

    #[staticmethod]
    fn affine(rows: Vec<Vec<f64>>, rhs: Vec<f64>) -> PyResult<Self> {
        Ok(PySet {
            inner: SetDescr::Affine {
                map: map_from_rows(rows)?,
                rhs,
            },
        })
    }

    #[staticmethod]
    fn point(p: Vec<f64>) -> Self {
        PySet {
            inner: SetDescr::Affine {
                map: LinearMap::identity(p.len()),
                rhs: p,
            },
        }
    }

    #[staticmethod]
    fn cone_translate(base: Vec<f64>, cone: PyCone) -> Self {
        PySet {
            inner: SetDescr::ConeTranslate {
                base,
                cone: cone.inner,
            },
        }
    }

    #[staticmethod]
    fn halfspace(normal: Vec<f64>, offset: f64) -> Self {
        PySet {
            inner: SetDescr::Halfspace { normal, offset },
        }
    }

    #[staticmethod]
    fn image(rows: Vec<Vec<f64>>, inner: PySet) -> PyResult<Self> {
        Ok(PySet {
            inner: SetDescr::Image {
                map: map_from_rows(rows)?,
                inner: Box::new(inner.inner),
                closure: false,
            },
        })
    }

    #[staticmethod]
    fn preimage(rows: Vec<Vec<f64>>, inner: PySet) -> PyResult<Self> {
        Ok(PySet {
            inner: SetDescr::Preimage {
                map: map_from_rows(rows)?,
                inner: Box::new(inner.inner),
            },
        })
    }

    #[staticmethod]
    fn union(parts: Vec<PySet>) -> Self {
        PySet {
            inner: SetDescr::Union {
                parts: parts.into_iter().map(|p| p.inner).collect(),
                hull: false,
            },
        }
    }

    /// Closed convex hull of a union.
    #[staticmethod]
    fn hull(parts: Vec<PySet>) -> Self {
        PySet {
            inner: SetDescr::Union {
                parts: parts.into_iter().map(|p| p.inner).collect(),
                hull: true,
            },
        }
    }

    #[staticmethod]
    fn intersect(parts: Vec<PySet>) -> Self {
        PySet {
            inner: SetDescr::Intersection {
                parts: parts.into_iter().map(|p| p.inner).collect(),
            },
        }
    }

    /// `∪_{λ ≥ 1} λ·inner`.
    #[staticmethod]
    fn scaled_union(inner: PySet) -> Self {
        PySet {
            inner: SetDescr::ScaledUnion {
                inner: Box::new(inner.inner),
            },
        }
    }

    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn contains(&self, x: Vec<f64>) -> PyResult<bool> {
        self.inner.membership(&x).map_err(py_err)
    }

    /// Computes the antipolar; returns `(set, rule, closure_taken)`.
    #[pyo3(signature = (ri_declared=false))]
    fn antipolar(&self, ri_declared: bool) -> PyResult<(PySet, String, bool)> {
        let a = antipolar(&self.inner, ri_declared).map_err(py_err)?;
        Ok((PySet { inner: a.set }, a.rule, a.closure_taken))
    }

    fn is_raylike(&self) -> String {
        match gaugekit::is_raylike(&self.inner) {
            RayLike::Yes => "yes".into(),
            RayLike::No => "no".into(),
            RayLike::Unknown => "unknown".into(),
        }
    }

    fn sample(&self, count: usize, seed: u64) -> PyResult<Vec<Vec<f64>>> {
        self.inner.sample_members(count, seed).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("ConvexSet({:?})", self.inner)
    }
}

#[pyclass(frozen, name = "Problem")]
struct PyProblem {
    inner: GaugeProblem,
}

#[pymethods]
impl PyProblem {
    /// `minimize kappa(x) subject to rho(b − A x) ≤ sigma` with optional
    /// conic side constraint and composed objective map.
    #[new]
    #[pyo3(signature = (kappa, a, b, rho, sigma, cone=None, obj_map=None))]
    fn new(
        kappa: PyGauge,
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
        rho: PyGauge,
        sigma: f64,
        cone: Option<PyCone>,
        obj_map: Option<Vec<Vec<f64>>>,
    ) -> PyResult<Self> {
        let obj_map = obj_map.map(map_from_rows).transpose()?;
        Ok(PyProblem {
            inner: GaugeProblem::with_extensions(
                kappa.inner,
                map_from_rows(a)?,
                b,
                rho.inner,
                sigma,
                cone.map(|c| c.inner),
                obj_map,
            )
            .map_err(py_err)?,
        })
    }

    fn primal_value(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.primal_value(&x).map_err(py_err)
    }

    fn primal_residual(&self, x: Vec<f64>) -> PyResult<f64> {
        self.inner.primal_residual(&x).map_err(py_err)
    }

    /// Summary line of the requested dual: gauge | lagrange | bidual.
    fn dual_summary(&self, kind: &str) -> PyResult<String> {
        let assume = Assumptions::default();
        let d = match kind {
            "gauge" => build_gauge_dual(&self.inner, &assume).map_err(py_err)?,
            "lagrange" => build_lagrange_dual(&self.inner).map_err(py_err)?,
            "bidual" => build_bidual(&self.inner).map_err(py_err)?,
            other => return Err(py_err(format!("unknown dual kind `{other}`"))),
        };
        Ok(d.summary())
    }

    /// Independent primal oracle; returns `(value, point, method)`.
    fn primal_oracle(&self) -> PyResult<(f64, Vec<f64>, String)> {
        let res = solve_primal_oracle(&self.inner).map_err(py_err)?;
        Ok((
            res.value,
            res.point,
            format!("{:?}", res.method).to_lowercase(),
        ))
    }

    /// Solves the gauge dual; returns
    /// `(value, point, method, iterations, stalled)`.
    #[pyo3(signature = (seed=0, max_iters=50_000, step_c=1.0, force_subgradient=false))]
    fn solve_dual(
        &self,
        seed: u64,
        max_iters: usize,
        step_c: f64,
        force_subgradient: bool,
    ) -> PyResult<(f64, Vec<f64>, String, usize, bool)> {
        let d = build_gauge_dual(&self.inner, &Assumptions::default()).map_err(py_err)?;
        let cfg = SubgradConfig {
            seed,
            max_iters,
            step_c,
            force_subgradient,
            ..Default::default()
        };
        let res = solve_gauge_dual(&d, &cfg).map_err(py_err)?;
        Ok((
            res.value,
            res.point,
            format!("{:?}", res.method).to_lowercase(),
            res.iterations,
            res.stalled,
        ))
    }

    /// Duality certificate for a primal-dual pair, as a dict.
    fn certify<'py>(
        &self,
        py: Python<'py>,
        x: Vec<f64>,
        y: Vec<f64>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let cert = certify(&self.inner, &x, &y, &Assumptions::default()).map_err(py_err)?;
        let out = PyDict::new(py);
        out.set_item("primal_value", cert.primal_value)?;
        out.set_item("dual_value", cert.dual_value)?;
        out.set_item("product", cert.product)?;
        out.set_item("primal_residual", cert.primal_residual)?;
        out.set_item("dual_residual", cert.dual_residual)?;
        out.set_item("fenchel_value", cert.fenchel_value)?;
        out.set_item("lagrange_value", cert.lagrange_value)?;
        out.set_item("polyhedral_constraint", cert.polyhedral_constraint)?;
        out.set_item("strong_duality_claim", cert.strong_duality_claim)?;
        Ok(out)
    }

    /// End-to-end solve: oracle primal, dual solve, certificate dict.
    #[pyo3(signature = (seed=0, max_iters=50_000, step_c=1.0))]
    fn solve<'py>(
        &self,
        py: Python<'py>,
        seed: u64,
        max_iters: usize,
        step_c: f64,
    ) -> PyResult<Bound<'py, PyDict>> {
        let oracle = solve_primal_oracle(&self.inner).map_err(py_err)?;
        let (dual_value, dual_point, method, iterations, stalled) =
            self.solve_dual(seed, max_iters, step_c, false)?;
        let cert = self.certify(py, oracle.point.clone(), dual_point.clone())?;
        cert.set_item("primal_point", oracle.point)?;
        cert.set_item("dual_point", dual_point)?;
        cert.set_item("dual_method", method)?;
        cert.set_item("dual_iterations", iterations)?;
        cert.set_item("dual_stalled", stalled)?;
        let _ = dual_value;
        Ok(cert)
    }

    /// Value of the perturbed program `v(h, k)`.
    fn value_function(&self, h: Vec<f64>, k: f64) -> PyResult<f64> {
        sensitivity::value_function(&self.inner, &h, k).map_err(py_err)
    }

    /// Value-function subgradient `(y, tau, route)` at the origin.
    #[pyo3(signature = (assume_interior=false))]
    fn value_subgradient(&self, assume_interior: bool) -> PyResult<(Vec<f64>, f64, String)> {
        let (g, route) =
            sensitivity::value_subgradient(&self.inner, assume_interior).map_err(py_err)?;
        Ok((
            g.y,
            g.tau,
            match route {
                sensitivity::SubgradientRoute::Lagrange => "lagrange".into(),
                sensitivity::SubgradientRoute::GaugeScaled => "gauge-scaled".into(),
            },
        ))
    }

    fn __repr__(&self) -> String {
        format!(
            "Problem(kappa={}, m={}, n={}, sigma={})",
            self.inner.kappa.describe(),
            self.inner.a.rows(),
            self.inner.a.cols(),
            self.inner.sigma
        )
    }
}

#[pymodule]
fn gaugekit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCone>()?;
    m.add_class::<PyGauge>()?;
    m.add_class::<PySet>()?;
    m.add_class::<PyProblem>()?;
    Ok(())
}
