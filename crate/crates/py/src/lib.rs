//! Python bindings: `import epiplan`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use epiplan::dsl::{build_initial, parse_domain};
use epiplan::kripke::{canonical_key, check_frame, entails, states_equal, to_dot};
use epiplan::logic::parse_formula;
use epiplan::planner::{
    plan_best_first, plan_bfs_with, validate_plan as validate, BfsOptions, GoalCount, Heuristic,
    Plan, PlanningProblem, SearchOutcome, SearchResult, ZeroHeuristic,
};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A parsed domain description.
#[pyclass(frozen, module = "epiplan")]
struct Domain {
    inner: epiplan::Domain,
}

/// A pointed Kripke structure.
#[pyclass(frozen, module = "epiplan")]
struct State {
    inner: epiplan::PointedState,
}

#[pymethods]
impl Domain {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        parse_domain(text)
            .map(|inner| Self { inner })
            .map_err(value_error)
    }

    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| value_error(format!("{path}: {e}")))?;
        Self::parse(&text)
    }

    #[getter]
    fn agents(&self) -> Vec<String> {
        self.inner.agents().iter().map(|a| a.to_string()).collect()
    }

    #[getter]
    fn fluents(&self) -> Vec<String> {
        self.inner.fluents().iter().map(|f| f.to_string()).collect()
    }

    #[getter]
    fn actions(&self) -> Vec<String> {
        self.inner.actions.iter().map(|a| a.name.clone()).collect()
    }

    #[getter]
    fn goal(&self) -> Option<String> {
        self.inner.goal.as_ref().map(|g| g.to_string())
    }

    fn initial_state(&self) -> PyResult<State> {
        build_initial(&self.inner.initial, &self.inner)
            .map(|inner| State { inner })
            .map_err(value_error)
    }

    /// Applies the named action; raises ValueError if it is not executable.
    fn apply(&self, state: &State, action: &str) -> PyResult<State> {
        let action = self
            .inner
            .action(action)
            .ok_or_else(|| value_error(format!("unknown action `{action}`")))?;
        epiplan::actions::apply(&state.inner, action)
            .map(|inner| State { inner })
            .map_err(value_error)
    }

    fn __repr__(&self) -> String {
        format!(
            "Domain(agents={:?}, fluents={:?}, actions={:?})",
            self.agents(),
            self.fluents(),
            self.actions()
        )
    }
}

#[pymethods]
impl State {
    fn entails(&self, formula: &str) -> PyResult<bool> {
        let f = parse_formula(formula, self.inner.signature()).map_err(value_error)?;
        entails(&self.inner, &f).map_err(value_error)
    }

    #[getter]
    fn world_count(&self) -> usize {
        self.inner.world_count()
    }

    #[getter]
    fn designated(&self) -> usize {
        self.inner.designated()
    }

    /// Hex encoding of the bisimulation-invariant key.
    fn canonical_key(&self) -> String {
        canonical_key(&self.inner).to_string()
    }

    fn digest(&self) -> String {
        canonical_key(&self.inner).digest()
    }

    fn to_dot(&self) -> String {
        to_dot(&self.inner)
    }

    fn frame<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let report = check_frame(self.inner.structure());
        let d = PyDict::new(py);
        d.set_item("is_kd45", report.is_kd45)?;
        d.set_item("is_s5", report.is_s5)?;
        Ok(d)
    }

    fn bisimilar(&self, other: &State) -> PyResult<bool> {
        states_equal(&self.inner, &other.inner).map_err(value_error)
    }

    fn __eq__(&self, other: &State) -> bool {
        states_equal(&self.inner, &other.inner).unwrap_or(false)
    }

    fn __hash__(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        canonical_key(&self.inner).hash(&mut h);
        h.finish()
    }

    fn __repr__(&self) -> String {
        format!(
            "State(worlds={}, key={})",
            self.inner.world_count(),
            self.digest()
        )
    }
}

fn problem(domain: &Domain) -> PyResult<PlanningProblem> {
    PlanningProblem::from_domain(domain.inner.clone()).map_err(value_error)
}

fn outcome_dict<'py>(py: Python<'py>, outcome: &SearchOutcome) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("plan", outcome.plan().map(|p| p.actions().to_vec()))?;
    let bound = match outcome.result {
        SearchResult::Found(_) => None,
        SearchResult::NoPlan { depth_exhausted } => Some(depth_exhausted),
    };
    d.set_item("bound_reached", bound)?;
    let st = &outcome.stats;
    d.set_item("nodes_expanded", st.nodes_expanded)?;
    d.set_item("nodes_generated", st.nodes_generated)?;
    d.set_item("duplicates_pruned", st.duplicates_pruned)?;
    d.set_item("max_depth_reached", st.max_depth_reached)?;
    d.set_item("elapsed_ms", st.elapsed_ms)?;
    Ok(d)
}

/// Breadth-first search. Returns a dict with `plan` (list of action names or
/// None) and search statistics.
#[pyfunction]
#[pyo3(signature = (domain, max_depth = 10, prune = true, parallel = false))]
fn plan_bfs<'py>(
    py: Python<'py>,
    domain: &Domain,
    max_depth: usize,
    prune: bool,
    parallel: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let problem = problem(domain)?;
    let options = BfsOptions {
        max_depth,
        prune_duplicates: prune,
        parallel,
    };
    let outcome = py.detach(|| plan_bfs_with(&problem, &options));
    outcome_dict(py, &outcome)
}

/// Greedy best-first search; `heuristic` is "goal-count" or "none".
#[pyfunction(name = "plan_best_first")]
#[pyo3(signature = (domain, heuristic = "goal-count", max_nodes = 100_000))]
fn plan_best_first_search<'py>(
    py: Python<'py>,
    domain: &Domain,
    heuristic: &str,
    max_nodes: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let problem = problem(domain)?;
    let h: &(dyn Heuristic + Sync) = match heuristic {
        "goal-count" => &GoalCount,
        "none" => &ZeroHeuristic,
        other => return Err(value_error(format!("unknown heuristic `{other}`"))),
    };
    let outcome = py.detach(|| plan_best_first(&problem, h, max_nodes));
    outcome_dict(py, &outcome)
}

/// Replays `plan` from the initial state; true iff every action is
/// executable and the goal holds at the end.
#[pyfunction]
fn validate_plan(domain: &Domain, plan: Vec<String>) -> PyResult<bool> {
    let problem = problem(domain)?;
    validate(&problem, &Plan(plan))
        .map(|v| v.valid)
        .map_err(value_error)
}

#[pymodule]
#[pyo3(name = "epiplan")]
fn epiplan_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Domain>()?;
    m.add_class::<State>()?;
    m.add_function(wrap_pyfunction!(plan_bfs, m)?)?;
    m.add_function(wrap_pyfunction!(plan_best_first_search, m)?)?;
    m.add_function(wrap_pyfunction!(validate_plan, m)?)?;
    Ok(())
}
