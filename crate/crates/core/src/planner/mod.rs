//! Plan search over epistemic states.

mod heuristic;
mod search;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::actions::apply;
use crate::dsl::{build_initial_with, Domain, InitialOptions, InitialStateError};
use crate::kripke::{canonical_key, entails, PointedState};
use crate::logic::{BeliefFormula, SymbolError};

pub use heuristic::{goal_count_heuristic, GoalCount, Heuristic, ZeroHeuristic};
pub use search::{plan_best_first, plan_bfs, plan_bfs_with, BfsOptions};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlanError {
    #[error("the domain declares no goal")]
    MissingGoal,
    #[error("goal: {0}")]
    InvalidGoal(#[from] SymbolError),
    #[error("initial state: {0}")]
    Initial(#[from] InitialStateError),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
}

#[derive(Debug, Clone)]
pub struct PlanningProblem {
    pub domain: Domain,
    pub initial: PointedState,
    pub goal: BeliefFormula,
}

impl PlanningProblem {
    pub fn new(
        domain: Domain,
        initial: PointedState,
        goal: BeliefFormula,
    ) -> Result<Self, PlanError> {
        goal.check(domain.signature())?;
        Ok(Self {
            domain,
            initial,
            goal,
        })
    }

    /// Builds the initial state from the domain's `initially` statements and
    /// takes the goal from its `goal:` line.
    pub fn from_domain(domain: Domain) -> Result<Self, PlanError> {
        Self::from_domain_with(domain, InitialOptions::default())
    }

    pub fn from_domain_with(domain: Domain, options: InitialOptions) -> Result<Self, PlanError> {
        let goal = domain.goal.clone().ok_or(PlanError::MissingGoal)?;
        let initial = build_initial_with(&domain.initial, &domain, options)?;
        Self::new(domain, initial, goal)
    }

    pub(crate) fn is_goal(&self, state: &PointedState) -> bool {
        entails(state, &self.goal).expect("goal checked against the signature")
    }
}

/// Sequence of action names.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Plan(pub Vec<String>);

impl Plan {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn actions(&self) -> &[String] {
        &self.0
    }
}

impl fmt::Display for Plan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.0 {
            writeln!(f, "{a}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct SearchStats {
    pub nodes_expanded: u64,
    pub nodes_generated: u64,
    pub duplicates_pruned: u64,
    pub max_depth_reached: u64,
    pub elapsed_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchResult {
    Found(Plan),
    /// `depth_exhausted` is true when the search stopped at its depth or
    /// node bound with states left to explore, false when the reachable
    /// space ran out first.
    NoPlan {
        depth_exhausted: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub result: SearchResult,
    pub stats: SearchStats,
}

impl SearchOutcome {
    pub fn plan(&self) -> Option<&Plan> {
        match &self.result {
            SearchResult::Found(p) => Some(p),
            SearchResult::NoPlan { .. } => None,
        }
    }
}

/// Replay report: `trace` holds the key digest of the initial state and of
/// every state reached.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlanValidation {
    pub valid: bool,
    pub trace: Vec<String>,
    /// Index of the first inexecutable action, if any.
    pub failed_at: Option<usize>,
}

/// Replays `plan` from the initial state and checks the goal at the end.
pub fn validate_plan(problem: &PlanningProblem, plan: &Plan) -> Result<PlanValidation, PlanError> {
    let actions = plan
        .actions()
        .iter()
        .map(|name| {
            problem
                .domain
                .action(name)
                .ok_or_else(|| PlanError::UnknownAction(name.clone()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut state = problem.initial.clone();
    let mut trace = vec![canonical_key(&state).digest()];
    for (i, action) in actions.into_iter().enumerate() {
        match apply(&state, action) {
            Ok(next) => state = next,
            Err(_) => {
                return Ok(PlanValidation {
                    valid: false,
                    trace,
                    failed_at: Some(i),
                })
            }
        }
        trace.push(canonical_key(&state).digest());
    }
    Ok(PlanValidation {
        valid: problem.is_goal(&state),
        trace,
        failed_at: None,
    })
}
