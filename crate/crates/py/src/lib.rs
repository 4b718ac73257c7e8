//! Python module `rgs_py`: GF(2) matrices, the stabilizer tableau, and the
//! analysis entry points of `rgs_core`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rgs_core::analytics::{self, SweepGrid};
use rgs_core::emitters::{self, OrderingKind};
use rgs_core::gf2;
use rgs_core::ldpc::{self, BsecParams, DEFAULT_MAX_ITERS};
use rgs_core::protocol::{self, ChainConfig};
use rgs_core::stabsim;
use rgs_core::treecode::{self, BranchVector};
use rgs_core::trellis::{self, GammaFactorization};

fn py_err(e: rgs_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Bit vectors go out as lists of ints (`Vec<u8>` would become `bytes`).
fn bits(v: Vec<u8>) -> Vec<u32> {
    v.into_iter().map(u32::from).collect()
}

fn branch(b: Vec<usize>) -> PyResult<BranchVector> {
    BranchVector::new(b).map_err(py_err)
}

/// Dense matrix over GF(2).
#[pyclass(name = "BitMatrix", eq, from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PyBitMatrix {
    inner: gf2::BitMatrix,
}

#[pymethods]
impl PyBitMatrix {
    #[new]
    fn new(rows: Vec<Vec<u8>>) -> PyResult<Self> {
        Ok(PyBitMatrix {
            inner: gf2::BitMatrix::from_rows(&rows).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn zeros(rows: usize, cols: usize) -> Self {
        PyBitMatrix {
            inner: gf2::BitMatrix::zeros(rows, cols),
        }
    }

    #[staticmethod]
    fn identity(n: usize) -> Self {
        PyBitMatrix {
            inner: gf2::BitMatrix::identity(n),
        }
    }

    #[staticmethod]
    fn random(rows: usize, cols: usize, seed: u64) -> Self {
        PyBitMatrix {
            inner: gf2::sample_uniform(rows, cols, &mut ChaCha8Rng::seed_from_u64(seed)),
        }
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        self.inner.shape()
    }

    fn rank(&self) -> usize {
        self.inner.rank()
    }

    fn transpose(&self) -> Self {
        PyBitMatrix {
            inner: self.inner.transpose(),
        }
    }

    fn inverse(&self) -> PyResult<Self> {
        Ok(PyBitMatrix {
            inner: self.inner.inverse().map_err(py_err)?,
        })
    }

    fn __matmul__(&self, other: &PyBitMatrix) -> PyResult<Self> {
        Ok(PyBitMatrix {
            inner: self.inner.mul(&other.inner).map_err(py_err)?,
        })
    }

    fn to_list(&self) -> Vec<Vec<u32>> {
        (0..self.inner.rows()).map(|r| bits(self.inner.row(r))).collect()
    }

    /// `m` with `m · self = x`, for `self` of shape `k × n` and full row rank.
    fn solve_left(&self, x: Vec<u8>) -> PyResult<Vec<u32>> {
        gf2::solve_left(&self.inner, &x).map(bits).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("BitMatrix({:?})", self.to_list())
    }
}

/// Stabilizer tableau with its own seeded measurement randomness.
#[pyclass(name = "Tableau")]
pub struct PyTableau {
    inner: stabsim::Tableau,
    rng: ChaCha8Rng,
}

#[pymethods]
impl PyTableau {
    /// `n` qubits in `|0…0⟩`.
    #[new]
    #[pyo3(signature = (n, seed = 0))]
    fn new(n: usize, seed: u64) -> Self {
        PyTableau {
            inner: stabsim::Tableau::new(n),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    #[staticmethod]
    #[pyo3(signature = (adjacency, seed = 0))]
    fn graph_state(adjacency: &PyBitMatrix, seed: u64) -> PyResult<Self> {
        Ok(PyTableau {
            inner: stabsim::Tableau::graph_state(&adjacency.inner).map_err(py_err)?,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.inner.num_qubits()
    }

    fn h(&mut self, q: usize) -> PyResult<()> {
        self.inner.apply_h(q).map_err(py_err)
    }

    fn s(&mut self, q: usize) -> PyResult<()> {
        self.inner.apply_s(q).map_err(py_err)
    }

    fn x(&mut self, q: usize) -> PyResult<()> {
        self.inner.apply_x(q).map_err(py_err)
    }

    fn z(&mut self, q: usize) -> PyResult<()> {
        self.inner.apply_z(q).map_err(py_err)
    }

    fn cnot(&mut self, control: usize, target: usize) -> PyResult<()> {
        self.inner.apply_cnot(control, target).map_err(py_err)
    }

    fn measure_x(&mut self, q: usize) -> PyResult<u8> {
        self.inner.measure_x(q, &mut self.rng).map_err(py_err)
    }

    fn measure_z(&mut self, q: usize) -> PyResult<u8> {
        self.inner.measure_z(q, &mut self.rng).map_err(py_err)
    }

    /// Bell-basis fusion of `q1`, `q2`; returns the outcomes recorded.
    fn fuse(&mut self, q1: usize, q2: usize, success: bool) -> PyResult<Vec<u32>> {
        Ok(bits(self.inner.fuse(q1, q2, success, &mut self.rng).map_err(py_err)?.outcomes))
    }

    fn is_bell_pairs(&self, pairs: Vec<(usize, usize)>) -> PyResult<bool> {
        self.inner.is_bell_pairs(&pairs).map_err(py_err)
    }

    /// Stabilizer generators in reduced form, e.g. `+XZ_`.
    fn stabilizers(&self) -> Vec<String> {
        self.inner.canonical_form().iter().map(|p| p.to_string()).collect()
    }
}

#[pyfunction]
fn eps_d(k: usize, n_received: usize) -> f64 {
    gf2::eps_d(k, n_received)
}

#[pyfunction]
fn avg_eps_d(k: usize, n: usize, p_f: f64) -> f64 {
    gf2::avg_eps_d(k, n, p_f)
}

#[pyfunction]
fn p_fail(l0: f64, l_att: f64) -> PyResult<f64> {
    analytics::p_fail(l0, l_att).map_err(py_err)
}

#[pyfunction]
fn loss_rate(l0: f64, l_att: f64) -> PyResult<f64> {
    analytics::loss_rate(l0, l_att).map_err(py_err)
}

/// `(p_x, p_z)` of a tree code at loss rate `eps`.
#[pyfunction]
fn tree_probs(b: Vec<usize>, eps: f64) -> PyResult<(f64, f64)> {
    let b = branch(b)?;
    Ok((treecode::p_x(&b, eps), treecode::p_z(&b, eps)))
}

#[pyfunction]
#[pyo3(signature = (l0, l, l_att, k, n, b = vec![5, 11, 4]))]
fn ps_rrgs(l0: f64, l: f64, l_att: f64, k: usize, n: usize, b: Vec<usize>) -> PyResult<f64> {
    analytics::ps_rrgs(l0, l, l_att, k, n, &branch(b)?).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (l0, l, l_att, n, b = vec![5, 11, 4]))]
fn ps_crgs(l0: f64, l: f64, l_att: f64, n: usize, b: Vec<usize>) -> PyResult<f64> {
    analytics::ps_crgs(l0, l, l_att, n, &branch(b)?).map_err(py_err)
}

/// Rate table rows as dictionaries, in the same order as the CLI sweep.
#[pyfunction]
#[pyo3(signature = (n, k, l_over_latt, l0_over_latt = 0.1, b = vec![5, 11, 4]))]
fn sweep<'py>(
    py: Python<'py>,
    n: Vec<usize>,
    k: Vec<usize>,
    l_over_latt: Vec<f64>,
    l0_over_latt: f64,
    b: Vec<usize>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let grid = SweepGrid {
        n,
        k,
        l_over_latt,
        l0_over_latt,
        branch: branch(b)?,
    };
    let points = py.detach(|| analytics::sweep(&grid)).map_err(py_err)?;
    points
        .into_iter()
        .map(|p| {
            let d = PyDict::new(py);
            d.set_item("n", p.n)?;
            d.set_item("k", p.k)?;
            d.set_item("L_over_Latt", p.l_over_latt)?;
            d.set_item("p_f", p.p_f)?;
            d.set_item("eps", p.eps)?;
            d.set_item("p_s", p.p_s)?;
            d.set_item("expected_ebits", p.expected_ebits)?;
            d.set_item("rate_per_photon", p.rate_per_photon)?;
            d.set_item("scheme", p.scheme.to_string())?;
            Ok(d)
        })
        .collect()
}

/// Runs the chain simulation and returns its summary.
#[pyfunction]
#[pyo3(signature = (k, n, n_r, trials, seed = 1, l0_over_latt = 0.1))]
fn simulate<'py>(
    py: Python<'py>,
    k: usize,
    n: usize,
    n_r: usize,
    trials: u64,
    seed: u64,
    l0_over_latt: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = ChainConfig {
        l: (n_r + 1) as f64 * l0_over_latt,
        l0: l0_over_latt,
        ..ChainConfig::with_stations(n_r, n, k, seed)
    };
    protocol::check_size_guard(&cfg).map_err(py_err)?;
    let summary = py
        .detach(|| {
            let gens = protocol::sample_generators(&cfg);
            protocol::run_trials(&cfg, &gens, trials).map(|r| protocol::summarize(&r))
        })
        .map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("trials", summary.trials)?;
    d.set_item("decoded", summary.decoded)?;
    d.set_item("verified", summary.verified)?;
    d.set_item("full_rank_rate", summary.full_rank_rate)?;
    d.set_item("verified_rate", summary.verified_rate)?;
    Ok(d)
}

/// Per-layer CNOT lists `(control, target)` reducing the trellis of `gammas`
/// to parallel paths, and whether the reduction checks out.
#[pyfunction]
fn trellis_reduce(k: usize, gammas: Vec<PyBitMatrix>) -> PyResult<(Vec<Vec<(usize, usize)>>, bool)> {
    let fac = GammaFactorization::new(k, gammas.into_iter().map(|g| g.inner).collect()).map_err(py_err)?;
    let t = trellis::theorem1_transform(&fac).map_err(py_err)?;
    let ok = trellis::verify_equivalence(&trellis::build_ltg(&fac).map_err(py_err)?, &t.cnots, &t.target)
        .map_err(py_err)?;
    let cnots = t
        .cnots
        .iter()
        .map(|layer| layer.iter().map(|g| (g.control, g.target)).collect())
        .collect();
    Ok((cnots, ok))
}

#[pyfunction]
#[pyo3(signature = (trials = 100, seed = 1))]
fn verify(trials: usize, seed: u64) -> PyResult<Vec<(String, usize, usize)>> {
    Ok(rgs_core::checks::run_all(trials, seed, false)
        .map_err(py_err)?
        .into_iter()
        .map(|r| (r.name, r.cases, r.failures))
        .collect())
}

#[pyfunction]
fn capacity_bsec(p_bsc: f64, p_bec: f64) -> PyResult<f64> {
    Ok(ldpc::capacity_bsec(BsecParams::new(p_bsc, p_bec).map_err(py_err)?))
}

/// `(rate, ci_low, ci_high)` of a Gallager code under belief propagation.
#[pyfunction]
#[pyo3(signature = (n, k, p_bsc, p_bec, trials, seed = 1, col_weight = 3))]
fn ldpc_failure_rate(
    py: Python<'_>,
    n: usize,
    k: usize,
    p_bsc: f64,
    p_bec: f64,
    trials: u64,
    seed: u64,
    col_weight: usize,
) -> PyResult<(f64, f64, f64)> {
    let params = BsecParams::new(p_bsc, p_bec).map_err(py_err)?;
    let est = py
        .detach(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(u64::MAX);
            let code = ldpc::gallager_construct(n, k, col_weight, &mut rng)?;
            ldpc::logical_error_mc(&code, params, trials, seed, DEFAULT_MAX_ITERS)
        })
        .map_err(py_err)?;
    Ok((est.rate, est.ci_low, est.ci_high))
}

#[pyfunction]
fn cut_rank(adjacency: &PyBitMatrix, subset: Vec<usize>) -> PyResult<usize> {
    emitters::cut_rank(&adjacency.inner, &subset).map_err(py_err)
}

/// `(k, n, ordering, h_max)` rows, worst case over random instances.
#[pyfunction]
#[pyo3(signature = (ks, ns, instances = 20, seed = 1))]
fn emitter_heights(ks: Vec<usize>, ns: Vec<usize>, instances: usize, seed: u64) -> PyResult<Vec<(usize, usize, String, usize)>> {
    Ok(emitters::height_table(&ks, &ns, &OrderingKind::ALL, instances, seed)
        .map_err(py_err)?
        .into_iter()
        .map(|r| (r.k, r.n, r.ordering.name().to_string(), r.h_max))
        .collect())
}

#[pymodule]
fn rgs_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBitMatrix>()?;
    m.add_class::<PyTableau>()?;
    m.add_function(wrap_pyfunction!(eps_d, m)?)?;
    m.add_function(wrap_pyfunction!(avg_eps_d, m)?)?;
    m.add_function(wrap_pyfunction!(p_fail, m)?)?;
    m.add_function(wrap_pyfunction!(loss_rate, m)?)?;
    m.add_function(wrap_pyfunction!(tree_probs, m)?)?;
    m.add_function(wrap_pyfunction!(ps_rrgs, m)?)?;
    m.add_function(wrap_pyfunction!(ps_crgs, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(trellis_reduce, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(capacity_bsec, m)?)?;
    m.add_function(wrap_pyfunction!(ldpc_failure_rate, m)?)?;
    m.add_function(wrap_pyfunction!(cut_rank, m)?)?;
    m.add_function(wrap_pyfunction!(emitter_heights, m)?)?;
    Ok(())
}
