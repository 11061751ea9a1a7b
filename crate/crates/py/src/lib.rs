//! Python bindings for the exact semivalue toolkit. Rationals enter as
//! anything whose str() form parses as an integer or "p/q" (int, str,
//! fractions.Fraction) and leave as fractions.Fraction, so nothing is
//! rounded at the boundary.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::Borrowed;

use svf_core::game::WeightedGame;
use svf_core::inverse::{
    enumerate_canonical_games, inverse_exact, inverse_nearest, iterative_banzhaf_heuristic,
    uniqueness_check, verification_via_inverse, DistanceNorm, InverseInstance, InverseStatus,
    DEFAULT_INVERSE_BOUND,
};
use svf_core::khintchine::KhintchineMethod;
use svf_core::polytope::{optimize_over_polytope, OptimizeMode, DEFAULT_VERTEX_BOUND};
use svf_core::pvec::ProbabilityVector;
use svf_core::rational::Rational;
use svf_core::reduction::{
    build_khintchine_triple, check_pton_identities, check_triple_identities, pton_transform,
    run_rpartition_pipeline, RPartitionInstance,
};
use svf_core::selftest::{run_selftest, SelftestConfig, DEFAULT_SELFTEST_CAP};
use svf_core::semivalue::{
    reformulation_terms, semivalues_bruteforce, semivalues_pivot_dp, verify_semivalues,
};
use svf_core::DEFAULT_ENUM_CAP;

fn err(e: svf_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Exact rational argument. Extraction goes through the str() form, so
/// ints, strings like "3/4", and fractions.Fraction all work; floats are
/// rejected rather than silently approximated.
struct Rat(Rational);

impl<'a, 'py> FromPyObject<'a, 'py> for Rat {
    type Error = PyErr;

    fn extract(obj: Borrowed<'a, 'py, PyAny>) -> PyResult<Self> {
        let text: String = match obj.extract::<String>() {
            Ok(s) => s,
            Err(_) => obj.str()?.extract()?,
        };
        text.trim()
            .parse::<Rational>()
            .map(Rat)
            .map_err(|e| PyValueError::new_err(e.to_string()))
    }
}

fn rats(xs: Vec<Rat>) -> Vec<Rational> {
    xs.into_iter().map(|x| x.0).collect()
}

fn fraction<'py>(py: Python<'py>, r: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((r.to_string(),))
}

fn fraction_list<'py>(py: Python<'py>, rs: &[Rational]) -> PyResult<Bound<'py, PyList>> {
    let items = rs
        .iter()
        .map(|r| fraction(py, r))
        .collect::<PyResult<Vec<_>>>()?;
    PyList::new(py, items)
}

fn parse_khintchine_method(name: &str) -> PyResult<KhintchineMethod> {
    match name {
        "brute" => Ok(KhintchineMethod::Brute),
        "dp" => Ok(KhintchineMethod::Dp),
        other => Err(PyValueError::new_err(format!(
            "unknown method {other:?}; use \"brute\" or \"dp\""
        ))),
    }
}

/// Probability vector (p_0, ..., p_{n-1}) defining a semivalue on n-player
/// games: p_t is the weight of a coalition of size t, nonnegative, with
/// sum_t C(n-1, t) p_t = 1.
#[pyclass(frozen, skip_from_py_object, name = "ProbabilityVector", module = "svf")]
#[derive(Clone)]
struct PyProbabilityVector {
    inner: ProbabilityVector,
}

#[pymethods]
impl PyProbabilityVector {
    #[new]
    fn new(entries: Vec<Rat>) -> PyResult<Self> {
        ProbabilityVector::new(rats(entries))
            .map(|inner| Self { inner })
            .map_err(err)
    }

    /// Uniform vector p_t = 1 / 2^(n-1).
    #[staticmethod]
    fn banzhaf(n: usize) -> PyResult<Self> {
        ProbabilityVector::banzhaf(n)
            .map(|inner| Self { inner })
            .map_err(err)
    }

    /// Permutation vector p_t = t! (n-t-1)! / n!.
    #[staticmethod]
    fn shapley(n: usize) -> PyResult<Self> {
        ProbabilityVector::shapley(n)
            .map(|inner| Self { inner })
            .map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn entries<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        fraction_list(py, self.inner.entries())
    }

    /// p_t, with p_{-1} = p_n = 0.
    fn p<'py>(&self, py: Python<'py>, t: isize) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.inner.p(t))
    }

    /// Normalization constant of the induced distribution on the cube.
    fn normalizer<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, &self.inner.lambda())
    }

    /// All entries strictly positive.
    fn is_regular(&self) -> bool {
        self.inner.is_regular()
    }

    fn __repr__(&self) -> String {
        let entries: Vec<String> = self
            .inner
            .entries()
            .iter()
            .map(|e| format!("'{e}'"))
            .collect();
        format!("ProbabilityVector([{}])", entries.join(", "))
    }
}

/// Weighted voting game: a vote x in {-1, +1}^n wins iff w . x >= theta,
/// ties winning.
#[pyclass(frozen, skip_from_py_object, name = "WeightedGame", module = "svf")]
#[derive(Clone)]
struct PyWeightedGame {
    inner: WeightedGame,
}

#[pymethods]
impl PyWeightedGame {
    #[new]
    fn new(weights: Vec<Rat>, theta: Rat) -> PyResult<Self> {
        WeightedGame::new(rats(weights), theta.0)
            .map(|inner| Self { inner })
            .map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn weights<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        fraction_list(py, self.inner.weights())
    }

    #[getter]
    fn theta<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        fraction(py, self.inner.theta())
    }

    /// Semivalue vector under `pvec`. `method` is "dp" (pivot counting
    /// table, no cube bound) or "brute" (full enumeration up to `cap`).
    #[pyo3(signature = (pvec, method = "dp", cap = None))]
    fn semivalues<'py>(
        &self,
        py: Python<'py>,
        pvec: &PyProbabilityVector,
        method: &str,
        cap: Option<usize>,
    ) -> PyResult<Bound<'py, PyList>> {
        let sv = match method {
            "dp" => semivalues_pivot_dp(&self.inner, &pvec.inner),
            "brute" => {
                semivalues_bruteforce(&self.inner, &pvec.inner, cap.unwrap_or(DEFAULT_ENUM_CAP))
            }
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown method {other:?}; use \"brute\" or \"dp\""
                )))
            }
        }
        .map_err(err)?;
        fraction_list(py, sv.values())
    }

    /// The half-cube split: semivalue_i = (hat_i + cf) / 2.
    #[pyo3(signature = (pvec, cap = None))]
    fn reformulation<'py>(
        &self,
        py: Python<'py>,
        pvec: &PyProbabilityVector,
        cap: Option<usize>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let terms = reformulation_terms(&self.inner, &pvec.inner, cap.unwrap_or(DEFAULT_ENUM_CAP))
            .map_err(err)?;
        let out = PyDict::new(py);
        out.set_item("hat", fraction_list(py, terms.hat())?)?;
        out.set_item("cf", fraction(py, terms.cf())?)?;
        out.set_item("semivalues", fraction_list(py, terms.semivalues().values())?)?;
        Ok(out)
    }

    /// Exact check that the semivalue vector equals `targets`.
    #[pyo3(signature = (pvec, targets, cap = None))]
    fn verify(
        &self,
        pvec: &PyProbabilityVector,
        targets: Vec<Rat>,
        cap: Option<usize>,
    ) -> PyResult<bool> {
        verify_semivalues(
            &self.inner,
            &pvec.inner,
            &rats(targets),
            cap.unwrap_or(DEFAULT_ENUM_CAP),
        )
        .map_err(err)
    }

    /// Same game with weights scaled to sum 1 and theta scaled to match.
    fn normalized(&self) -> PyResult<Self> {
        self.inner
            .normalized()
            .map(|inner| Self { inner })
            .map_err(err)
    }

    fn __repr__(&self) -> String {
        let weights: Vec<String> = self
            .inner
            .weights()
            .iter()
            .map(|w| format!("'{w}'"))
            .collect();
        format!(
            "WeightedGame([{}], '{}')",
            weights.join(", "),
            self.inner.theta()
        )
    }
}

/// Exact expectation of |a . x| under the distribution induced by `pvec`.
#[pyfunction]
#[pyo3(signature = (a, pvec, method = "dp", cap = None))]
fn khintchine<'py>(
    py: Python<'py>,
    a: Vec<Rat>,
    pvec: &PyProbabilityVector,
    method: &str,
    cap: Option<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let out = svf_core::khintchine::khintchine(
        &rats(a),
        &pvec.inner,
        parse_khintchine_method(method)?,
        cap.unwrap_or(DEFAULT_ENUM_CAP),
    )
    .map_err(err)?;
    fraction(py, &out.value)
}

/// Probability that w . x = 0 under the distribution induced by `pvec`.
#[pyfunction]
fn partition_probability<'py>(
    py: Python<'py>,
    w: Vec<Rat>,
    pvec: &PyProbabilityVector,
) -> PyResult<Bound<'py, PyAny>> {
    let out = svf_core::khintchine::partition_probability(&rats(w), &pvec.inner).map_err(err)?;
    fraction(py, &out)
}

/// Full counting reduction for an instance (c, k): build the zero-sum
/// vector, take its zero-mass probability, and recover the exact number
/// of half-sum subsets (all of size k or n-k when the promise holds).
#[pyfunction]
#[pyo3(signature = (c, k, pvec, cap = None))]
fn rpartition_pipeline<'py>(
    py: Python<'py>,
    c: Vec<u64>,
    k: usize,
    pvec: &PyProbabilityVector,
    cap: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let inst = RPartitionInstance::new(c, k).map_err(err)?;
    let run = run_rpartition_pipeline(&inst, &pvec.inner, cap.unwrap_or(DEFAULT_ENUM_CAP))
        .map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("vector", fraction_list(py, &run.vector)?)?;
    out.set_item("probability", fraction(py, &run.probability)?)?;
    out.set_item("recovered", fraction(py, &run.recovered)?)?;
    out.set_item("promise_holds", run.promise.holds)?;
    out.set_item("count", run.promise.count)?;
    Ok(out)
}

/// Perturbed triple (c, d, e) for a zero-sum special-form vector, with the
/// pointwise and aggregate identities checked and the zero-mass probability
/// recovered from the three constants.
#[pyfunction]
#[pyo3(signature = (a, pvec, y = None, cap = None))]
fn khintchine_triple<'py>(
    py: Python<'py>,
    a: Vec<Rat>,
    pvec: &PyProbabilityVector,
    y: Option<Rat>,
    cap: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let a = rats(a);
    let y = y.map(|r| r.0).unwrap_or_else(|| "1/4".parse().unwrap());
    let triple = build_khintchine_triple(&a, &y).map_err(err)?;
    let checks = check_triple_identities(&triple, &pvec.inner, cap.unwrap_or(DEFAULT_ENUM_CAP))
        .map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("c", fraction_list(py, triple.c())?)?;
    out.set_item("d", fraction_list(py, triple.d())?)?;
    out.set_item("e", fraction_list(py, triple.e())?)?;
    out.set_item("y", fraction(py, triple.y())?)?;
    out.set_item("pointwise", checks.pointwise)?;
    out.set_item("aggregate", checks.aggregate)?;
    out.set_item("recovered", fraction(py, &checks.recovered_probability)?)?;
    out.set_item("partition_match", checks.partition_match)?;
    Ok(out)
}

/// Maximum of a . c over semivalue vectors c of special-form games, with a
/// witness game attaining it. `mode` is "closed_form" or "vertex_enum".
#[pyfunction]
#[pyo3(signature = (a, pvec, mode = "closed_form", bound = DEFAULT_VERTEX_BOUND, cap = None))]
fn optimize<'py>(
    py: Python<'py>,
    a: Vec<Rat>,
    pvec: &PyProbabilityVector,
    mode: &str,
    bound: u64,
    cap: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let mode = match mode {
        "closed_form" => OptimizeMode::ClosedForm,
        "vertex_enum" => OptimizeMode::VertexEnum,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown mode {other:?}; use \"closed_form\" or \"vertex_enum\""
            )))
        }
    };
    let outcome = optimize_over_polytope(
        &rats(a),
        &pvec.inner,
        mode,
        bound,
        cap.unwrap_or(DEFAULT_ENUM_CAP),
    )
    .map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("value", fraction(py, &outcome.value)?)?;
    out.set_item(
        "witness",
        PyWeightedGame {
            inner: outcome.witness,
        },
    )?;
    Ok(out)
}

/// Transfer from a special-form instance to one with positive weights:
/// flip the two tail weights and shift the targets by the head and tail
/// amounts. The shift identities are checked alongside.
#[pyfunction]
#[pyo3(signature = (weights, targets, pvec, cap = None))]
fn pton<'py>(
    py: Python<'py>,
    weights: Vec<Rat>,
    targets: Vec<Rat>,
    pvec: &PyProbabilityVector,
    cap: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let weights = rats(weights);
    let inst = pton_transform(&weights, &rats(targets), &pvec.inner).map_err(err)?;
    let holds = check_pton_identities(&weights, &pvec.inner, cap.unwrap_or(DEFAULT_ENUM_CAP))
        .map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("weights", fraction_list(py, &inst.weights)?)?;
    out.set_item("theta", fraction(py, &inst.theta)?)?;
    out.set_item("targets", fraction_list(py, &inst.targets)?)?;
    out.set_item("shift_identities", holds)?;
    Ok(out)
}

/// Inverse problem: find a game whose semivalue vector matches (or comes
/// closest to) the targets. `mode` is "exact", "nearest", or "heuristic";
/// `norm` ("l1" or "l2") applies to nearest, `iterations` and `step` to the
/// heuristic. The heuristic is defined for the Banzhaf vector only.
#[pyfunction]
#[pyo3(signature = (targets, theta, pvec, mode = "exact", bound = DEFAULT_INVERSE_BOUND,
                    norm = "l2", iterations = 64, step = None, cap = None))]
#[allow(clippy::too_many_arguments)]
fn invert<'py>(
    py: Python<'py>,
    targets: Vec<Rat>,
    theta: Rat,
    pvec: &PyProbabilityVector,
    mode: &str,
    bound: u64,
    norm: &str,
    iterations: usize,
    step: Option<Rat>,
    cap: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let inst = InverseInstance::new(rats(targets), theta.0, pvec.inner.clone()).map_err(err)?;
    let norm = match norm {
        "l1" => DistanceNorm::L1,
        "l2" => DistanceNorm::L2,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown norm {other:?}; use \"l1\" or \"l2\""
            )))
        }
    };
    let result = match mode {
        "exact" => inverse_exact(&inst, bound),
        "nearest" => inverse_nearest(&inst, bound, norm),
        "heuristic" => {
            let step = step.map(|r| r.0).unwrap_or_else(|| "1/2".parse().unwrap());
            iterative_banzhaf_heuristic(&inst, iterations, &step, cap.unwrap_or(DEFAULT_ENUM_CAP))
        }
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown mode {other:?}; use \"exact\", \"nearest\", or \"heuristic\""
            )))
        }
    }
    .map_err(err)?;
    let out = PyDict::new(py);
    out.set_item(
        "status",
        match result.status {
            InverseStatus::Found => "found",
            InverseStatus::NoSolutionInClass => "no_solution_in_class",
            InverseStatus::Nearest => "nearest",
        },
    )?;
    match &result.weights {
        Some(w) => out.set_item("weights", fraction_list(py, w)?)?,
        None => out.set_item("weights", py.None())?,
    }
    match &result.distance {
        Some(d) => out.set_item("distance", fraction(py, d)?)?,
        None => out.set_item("distance", py.None())?,
    }
    out.set_item("games_examined", result.games_examined)?;
    Ok(out)
}

/// Decide whether `targets` is the semivalue vector of `game` by calling
/// the exact inverse solver on the normalized instance and comparing the
/// answer back against the game.
#[pyfunction]
#[pyo3(signature = (game, targets, pvec, bound = DEFAULT_INVERSE_BOUND, cap = None))]
fn verify_via_inverse(
    game: &PyWeightedGame,
    targets: Vec<Rat>,
    pvec: &PyProbabilityVector,
    bound: u64,
    cap: Option<usize>,
) -> PyResult<bool> {
    verification_via_inverse(
        &game.inner,
        &rats(targets),
        &pvec.inner,
        |inst| inverse_exact(inst, bound),
        cap.unwrap_or(DEFAULT_ENUM_CAP),
    )
    .map_err(err)
}

/// For two games with equal weight sums and thresholds whose semivalue
/// vectors agree, list every positive-mass point where their outcomes
/// differ (an empty list supports uniqueness).
#[pyfunction]
#[pyo3(signature = (f, g, pvec, cap = None))]
fn uniqueness<'py>(
    py: Python<'py>,
    f: &PyWeightedGame,
    g: &PyWeightedGame,
    pvec: &PyProbabilityVector,
    cap: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let report = uniqueness_check(
        &f.inner,
        &g.inner,
        &pvec.inner,
        cap.unwrap_or(DEFAULT_ENUM_CAP),
    )
    .map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("semivalues_equal", report.semivalues_equal)?;
    out.set_item("violations", &report.violations)?;
    out.set_item("points_checked", report.points_checked)?;
    out.set_item("holds", report.holds())?;
    Ok(out)
}

/// All n-player games with integer weights in [0, bound] and integer
/// thresholds, one canonical representative per truth table.
#[pyfunction]
fn enumerate_games(n: usize, bound: u64) -> PyResult<Vec<PyWeightedGame>> {
    Ok(enumerate_canonical_games(n, bound)
        .map_err(err)?
        .into_iter()
        .map(|inner| PyWeightedGame { inner })
        .collect())
}

/// Run the built-in invariant suite and report one outcome per invariant.
#[pyfunction]
#[pyo3(signature = (cap = DEFAULT_SELFTEST_CAP, seed = 7, trials = 8, jobs = 1))]
fn selftest<'py>(
    py: Python<'py>,
    cap: usize,
    seed: u64,
    trials: usize,
    jobs: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let report = run_selftest(&SelftestConfig { cap, seed, trials }, jobs);
    let outcomes = report
        .outcomes
        .iter()
        .map(|o| {
            let item = PyDict::new(py);
            item.set_item("name", &o.name)?;
            item.set_item("passed", o.passed)?;
            item.set_item("detail", &o.detail)?;
            Ok(item)
        })
        .collect::<PyResult<Vec<_>>>()?;
    let out = PyDict::new(py);
    out.set_item("all_passed", report.all_passed())?;
    out.set_item("outcomes", PyList::new(py, outcomes)?)?;
    Ok(out)
}

/// Exact semivalue toolkit for weighted voting games: probability vectors,
/// semivalue computation and verification, Khintchine constants, counting
/// reductions, polytope optimization, and inverse power-index solvers.
#[pymodule]
fn svf<'py>(_py: Python<'py>, m: &Bound<'py, PyModule>) -> PyResult<()> {
    m.add_class::<PyProbabilityVector>()?;
    m.add_class::<PyWeightedGame>()?;
    m.add_function(wrap_pyfunction!(khintchine, m)?)?;
    m.add_function(wrap_pyfunction!(partition_probability, m)?)?;
    m.add_function(wrap_pyfunction!(rpartition_pipeline, m)?)?;
    m.add_function(wrap_pyfunction!(khintchine_triple, m)?)?;
    m.add_function(wrap_pyfunction!(optimize, m)?)?;
    m.add_function(wrap_pyfunction!(pton, m)?)?;
    m.add_function(wrap_pyfunction!(invert, m)?)?;
    m.add_function(wrap_pyfunction!(verify_via_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(uniqueness, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_games, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    m.add("DEFAULT_CAP", DEFAULT_ENUM_CAP)?;
    m.add("DEFAULT_BOUND", DEFAULT_INVERSE_BOUND)?;
    Ok(())
}
