//! Python bindings: field helpers, the Hessian and related maps on P^1,
//! curve-level queries, graph exports and theorem verifiers.
//!
//! Points of P^1 are passed as `int | None`, with `None` standing for the
//! point at infinity. Reports come back as JSON strings.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use hessgraph::curves::{curve_from_j, ModelCurve as CoreModel, WeierstrassCurve};
use hessgraph::field::{FiniteField, PrimeField};
use hessgraph::graphs::{self, graph_stats, hessian_graph};
use hessgraph::hessian::{weierstrass_hessian, HessianResult};
use hessgraph::projmaps::{self, ProjPoint};
use hessgraph::report::{reports_json, stats_csv_row, to_dot, Highlight, STATS_CSV_HEADER};

fn field(p: u64) -> PyResult<PrimeField> {
    PrimeField::new(p).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn to_proj(x: Option<u64>) -> ProjPoint<u64> {
    match x {
        Some(v) => ProjPoint::Finite(v),
        None => ProjPoint::Infinity,
    }
}

fn from_proj(pt: ProjPoint<u64>) -> Option<u64> {
    pt.finite()
}

/// Quadratic character of x mod p: 0, 1 or -1.
#[pyfunction]
fn legendre(p: u64, x: u64) -> PyResult<i32> {
    let f = field(p)?;
    Ok(f.legendre(x % p))
}

/// Canonical square root mod p, or None for non-squares.
#[pyfunction]
fn sqrt_mod(p: u64, x: u64) -> PyResult<Option<u64>> {
    let f = field(p)?;
    Ok(f.sqrt(x % p))
}

/// All cube roots of x mod p, sorted.
#[pyfunction]
fn cube_roots_mod(p: u64, x: u64) -> PyResult<Vec<u64>> {
    let f = field(p)?;
    Ok(f.cube_roots(x % p))
}

/// The canonical primitive cube root of unity mod p, when p = 1 mod 3.
#[pyfunction]
fn primitive_cube_root(p: u64) -> PyResult<Option<u64>> {
    let f = field(p)?;
    Ok(f.primitive_cube_root())
}

/// One Hessian step on P^1(F_p); None is the point at infinity.
#[pyfunction]
fn hess_j(p: u64, j: Option<u64>) -> PyResult<Option<u64>> {
    let f = field(p)?;
    Ok(from_proj(projmaps::hess_j(&f, to_proj(j.map(|v| v % p)))))
}

/// One step of the x-level endomorphism `Psi_k` on P^1(F_p).
#[pyfunction]
fn psi_proj(p: u64, k: i64, x: Option<u64>) -> PyResult<Option<u64>> {
    let f = field(p)?;
    let res = projmaps::psi_proj(&f, f.from_i64(k), to_proj(x.map(|v| v % p)))
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(from_proj(res))
}

/// The Hesse-pencil parameter step.
#[pyfunction]
fn lambda_hess(p: u64, lam: Option<u64>) -> PyResult<Option<u64>> {
    let f = field(p)?;
    Ok(from_proj(projmaps::lambda_hess(&f, to_proj(lam.map(|v| v % p)))))
}

/// Edges of the Hessian graph over P^1(F_p), as label pairs in vertex order.
#[pyfunction]
fn hessian_graph_edges(p: u64) -> PyResult<Vec<(String, String)>> {
    let f = field(p)?;
    let g = hessian_graph(&f);
    Ok((0..g.n())
        .map(|v| (g.label(v).to_string(), g.label(g.succ(v)).to_string()))
        .collect())
}

fn build_named_graph(
    f: &PrimeField,
    map: &str,
    k: i64,
    l: i64,
) -> PyResult<graphs::FunctionalGraph> {
    let bad = |e: graphs::GraphError| PyValueError::new_err(e.to_string());
    match map {
        "hess" => Ok(hessian_graph(f)),
        "f" => graphs::fkl_graph(f, f.from_i64(k), f.from_i64(l)).map_err(bad),
        "psi" => graphs::psi_proj_graph(f, f.from_i64(k)).map_err(bad),
        "lambda" => Ok(graphs::lambda_graph(f)),
        "psi-s" => {
            let model = CoreModel::with_k(*f, f.from_i64(k))
                .map_err(|e| PyValueError::new_err(e.to_string()))?;
            Ok(graphs::s_quotient_graph(&model))
        }
        other => Err(PyValueError::new_err(format!("unknown map {other}"))),
    }
}

/// DOT text of one graph; `highlight` is "none", "cubes" or (for psi-s)
/// "rational".
#[pyfunction]
#[pyo3(signature = (p, map = "hess", k = -6912, l = -27, highlight = "none"))]
fn graph_dot(p: u64, map: &str, k: i64, l: i64, highlight: &str) -> PyResult<String> {
    let f = field(p)?;
    let g = build_named_graph(&f, map, k, l)?;
    let mask = match highlight {
        "none" => None,
        "cubes" => Some(Highlight {
            mask: (0..g.n())
                .map(|v| v < p as usize && f.is_nth_power(v as u64, 3))
                .collect(),
            color: "lightblue".into(),
        }),
        "rational" if map == "psi-s" => {
            let quarter_k = f
                .div(f.from_i64(k), 4)
                .ok_or_else(|| PyValueError::new_err("k reduces to zero"))?;
            Some(Highlight {
                mask: (0..g.n())
                    .map(|v| {
                        v == p as usize
                            || f.legendre(f.add(f.cube(v as u64), quarter_k)) >= 0
                    })
                    .collect(),
                color: "gray".into(),
            })
        }
        other => {
            return Err(PyValueError::new_err(format!(
                "unsupported highlight {other} for map {map}"
            )))
        }
    };
    Ok(to_dot(&g, &format!("g{p}"), mask.as_ref()))
}

/// One CSV row of graph statistics (prepend `stats_header()` for a file).
#[pyfunction]
#[pyo3(signature = (p, map = "hess", k = -6912, l = -27))]
fn stats_row(p: u64, map: &str, k: i64, l: i64) -> PyResult<String> {
    let f = field(p)?;
    let g = build_named_graph(&f, map, k, l)?;
    Ok(stats_csv_row(&graph_stats(&g, p as u128, map)))
}

#[pyfunction]
fn stats_header() -> &'static str {
    STATS_CSV_HEADER
}

/// Run one theorem verifier; returns the JSON report document.
#[pyfunction]
fn verify(p: u64, theorem: &str) -> PyResult<String> {
    let res = match theorem {
        "q2-structure" => graphs::verify_structure_q2(p),
        "q1-structure" => graphs::verify_structure_q1(p),
        "curve-structure" => graphs::verify_curve_structure(p),
        "self-loops" => graphs::verify_self_loops(p),
        "fibers" => graphs::verify_fibers(p, false),
        "fibers-ext" => graphs::verify_fibers(p, true),
        "even-trace" => graphs::leaves_vs_trace(p),
        "supersingular" => graphs::supersingular_components(p, false),
        "supersingular-ext" => graphs::supersingular_components(p, true),
        "commuting" => graphs::verify_commuting(p, &[-6912, 108, 1, 5]),
        "conjugacy" => graphs::verify_conjugacy(p, &(2..22).collect::<Vec<_>>()),
        other => return Err(PyValueError::new_err(format!("unknown theorem {other}"))),
    };
    let report = res.map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(reports_json(&[report]))
}

/// A short Weierstrass curve y^2 = x^3 + a x + b over F_p.
#[pyclass(name = "Curve")]
struct PyCurve {
    inner: WeierstrassCurve<PrimeField>,
}

#[pymethods]
impl PyCurve {
    #[new]
    fn new(p: u64, a: i64, b: i64) -> PyResult<Self> {
        let f = field(p)?;
        let inner = WeierstrassCurve::new(f, f.from_i64(a), f.from_i64(b))
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyCurve { inner })
    }

    /// A representative curve with the given j-invariant.
    #[staticmethod]
    fn from_j(p: u64, j: u64) -> PyResult<Self> {
        let f = field(p)?;
        Ok(PyCurve {
            inner: curve_from_j(&f, j % p),
        })
    }

    fn a(&self) -> u64 {
        self.inner.a()
    }

    fn b(&self) -> u64 {
        self.inner.b()
    }

    fn j_invariant(&self) -> u64 {
        self.inner.j_invariant()
    }

    fn count_points(&self) -> PyResult<u64> {
        self.inner
            .count_points()
            .map(|n| n as u64)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn trace(&self) -> PyResult<i64> {
        self.inner
            .trace()
            .map(|t| t as i64)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn is_supersingular(&self) -> PyResult<bool> {
        self.inner
            .is_supersingular()
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn twist(&self, d: i64) -> PyResult<Self> {
        let f = *self.inner.field();
        let inner = self
            .inner
            .twist(f.from_i64(d))
            .map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyCurve { inner })
    }

    fn is_isomorphic_to(&self, other: &PyCurve) -> bool {
        self.inner.is_isomorphic_to(&other.inner)
    }

    /// The Hessian curve, or None when it degenerates to three lines (j = 0).
    fn hessian(&self) -> Option<PyCurve> {
        match weierstrass_hessian(&self.inner) {
            HessianResult::Elliptic(h) => Some(PyCurve { inner: h }),
            _ => None,
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "Curve(p={}, a={}, b={})",
            self.inner.field().p(),
            self.inner.a(),
            self.inner.b()
        )
    }
}

/// The model curve y^2 = x^3 + k/4 with its degree-3 endomorphism, seen
/// through x-coordinates.
#[pyclass(name = "ModelCurve")]
struct PyModelCurve {
    inner: CoreModel,
}

#[pymethods]
impl PyModelCurve {
    #[new]
    #[pyo3(signature = (p, k = -6912))]
    fn new(p: u64, k: i64) -> PyResult<Self> {
        let f = field(p)?;
        let inner =
            CoreModel::new(f, k).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PyModelCurve { inner })
    }

    fn k(&self) -> u64 {
        self.inner.k()
    }

    /// The endomorphism on x-coordinate classes (None is infinity / O).
    fn psi_x(&self, x: Option<u64>) -> Option<u64> {
        let p = self.inner.base().p();
        let lifted = self.inner.iota(to_proj(x.map(|v| v % p)));
        from_proj(self.inner.pi(self.inner.psi(lifted).expect("points from iota lie on the curve")))
    }

    /// Coordinates (a, b) of the canonical lift's y as a + b*sqrt(d).
    fn iota_y(&self, x: u64) -> (u64, u64) {
        let p = self.inner.base().p();
        match self.inner.iota(ProjPoint::Finite(x % p)) {
            hessgraph::curves::CurvePoint::Affine(_, y) => (y.a, y.b),
            hessgraph::curves::CurvePoint::Infinity => unreachable!("finite input"),
        }
    }

    /// Number of points with rational x-coordinate (including O).
    fn s_size(&self) -> usize {
        self.inner.s_set().len()
    }

    /// |E_k(F_{p^2})|.
    fn ext_order(&self) -> u64 {
        self.inner.ext_order() as u64
    }

    /// Steps to reach a periodic point, starting from the lift of x.
    fn depth_x(&self, x: Option<u64>) -> PyResult<usize> {
        let p = self.inner.base().p();
        let lifted = self.inner.iota(to_proj(x.map(|v| v % p)));
        self.inner
            .depth(lifted)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn is_periodic_x(&self, x: Option<u64>) -> PyResult<bool> {
        let p = self.inner.base().p();
        let lifted = self.inner.iota(to_proj(x.map(|v| v % p)));
        self.inner
            .is_periodic(lifted)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }

    fn __repr__(&self) -> String {
        format!("ModelCurve(p={}, k={})", self.inner.base().p(), self.inner.k())
    }
}

#[pymodule]
fn hessgraph_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(legendre, m)?)?;
    m.add_function(wrap_pyfunction!(sqrt_mod, m)?)?;
    m.add_function(wrap_pyfunction!(cube_roots_mod, m)?)?;
    m.add_function(wrap_pyfunction!(primitive_cube_root, m)?)?;
    m.add_function(wrap_pyfunction!(hess_j, m)?)?;
    m.add_function(wrap_pyfunction!(psi_proj, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_hess, m)?)?;
    m.add_function(wrap_pyfunction!(hessian_graph_edges, m)?)?;
    m.add_function(wrap_pyfunction!(graph_dot, m)?)?;
    m.add_function(wrap_pyfunction!(stats_row, m)?)?;
    m.add_function(wrap_pyfunction!(stats_header, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_class::<PyCurve>()?;
    m.add_class::<PyModelCurve>()?;
    Ok(())
}
