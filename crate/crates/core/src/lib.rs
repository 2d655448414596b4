//! Multi-agent epistemic planning over pointed Kripke structures.
//!
//! The crate is layered bottom-up:
//!
//! * [`logic`] holds the fluent/belief formula syntax and its parser.
//! * [`kripke`] gives formulas their meaning over pointed Kripke structures and
//!   provides the state reductions (reachability pruning, bisimulation
//!   contraction, canonical keys) the planner relies on.
//! * [`actions`] implements ontic, sensing and announcement actions through an
//!   event-update product with full, partial and oblivious observers.
//! * [`dsl`] reads domain descriptions and builds finitary S5 initial states.
//! * [`planner`] searches for sequential plans reaching an epistemic goal.
//! * [`cli`] is the command-line front-end used by the `epiplan` binary.

pub mod actions;
pub mod cli;
pub mod dsl;
pub mod kripke;
pub mod logic;
pub mod planner;

pub use actions::{Action, ActionKind, Effect, ObserverClass, TransitionError};
pub use dsl::{build_initial, parse_domain, Domain, DslError, InitialSpec};
pub use kripke::{
    bisim_contract, canonical_key, check_frame, entails, prune_unreachable, states_equal,
    FrameReport, KripkeError, KripkeStructure, PointedState, StateKey, Valuation, WorldId,
};
pub use logic::{parse_formula, Agent, BeliefFormula, Fluent, FluentFormula, Literal, Signature};
pub use planner::{
    goal_count_heuristic, plan_best_first, plan_bfs, validate_plan, GoalCount, Heuristic, Plan,
    PlanningProblem, SearchOutcome, SearchResult, SearchStats,
};
