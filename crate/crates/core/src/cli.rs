//! Command-line front-end.
//!
//! Exit codes: 0 for a plan found or a query that holds, 1 for no plan or a
//! query that fails, 2 for usage, parse and I/O errors.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde_json::json;

use crate::dsl::{build_initial_with, parse_domain, InitialOptions};
use crate::kripke::{check_frame, entails, to_dot, PointedState};
use crate::logic::parse_formula;
use crate::planner::{
    plan_best_first, plan_bfs_with, BfsOptions, GoalCount, Heuristic, PlanningProblem,
    SearchOutcome, SearchResult, ZeroHeuristic,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Plan,
    Check,
    Dump,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Search {
    Bfs,
    BestFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HeuristicKind {
    None,
    GoalCount,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Text,
    Json,
}

/// Multi-agent epistemic planner.
#[derive(Debug, Clone, Parser)]
#[command(name = "epiplan", version)]
pub struct RunConfig {
    /// Domain description file (.epddl).
    pub domain_path: PathBuf,

    #[arg(long, value_enum, default_value = "plan")]
    pub mode: Mode,

    #[arg(long, value_enum, default_value = "bfs")]
    pub search: Search,

    /// Heuristic for best-first search.
    #[arg(long, value_enum, default_value = "none")]
    pub heuristic: HeuristicKind,

    /// Plan length bound for breadth-first search.
    #[arg(long, default_value_t = 10)]
    pub max_depth: usize,

    /// Expansion budget for best-first search.
    #[arg(long, default_value_t = 100_000)]
    pub max_nodes: usize,

    /// Formula to check against the initial state (check mode).
    #[arg(long)]
    pub query: Option<String>,

    #[arg(long, value_enum, default_value = "text")]
    pub output: Output,

    /// Write the initial state as Graphviz DOT to this path (dump mode).
    #[arg(long = "dot")]
    pub dot_path: Option<PathBuf>,

    /// Expand breadth-first layers on all cores.
    #[arg(long)]
    pub parallel: bool,

    /// Disable duplicate detection in breadth-first search.
    #[arg(long)]
    pub no_prune: bool,

    /// Report wall-clock search time (makes output vary between runs).
    #[arg(long)]
    pub timing: bool,

    /// Allow initial states over more than 26 fluents.
    #[arg(long)]
    pub allow_large: bool,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

/// Runs one command, writing results to `out` and diagnostics to `err`.
pub fn run(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match execute(config) {
        Ok((code, text)) => {
            if out.write_all(text.as_bytes()).is_err() {
                return EXIT_ERROR;
            }
            code
        }
        Err(Failure(message)) => {
            let _ = writeln!(err, "error: {message}");
            EXIT_ERROR
        }
    }
}

fn execute(config: &RunConfig) -> Result<(i32, String), Failure> {
    let path = &config.domain_path;
    let text =
        std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    let domain = parse_domain(&text).map_err(|e| Failure(format!("{}:{e}", path.display())))?;
    let options = InitialOptions {
        allow_large: config.allow_large,
    };

    match config.mode {
        Mode::Check => {
            let query_text = config
                .query
                .as_deref()
                .ok_or_else(|| Failure("check mode requires --query".into()))?;
            let query = parse_formula(query_text, domain.signature())
                .map_err(|e| Failure(format!("query {e}")))?;
            let initial = build_initial_with(&domain.initial, &domain, options)?;
            let holds = entails(&initial, &query)?;
            let text = match config.output {
                Output::Text => format!("{holds}\n"),
                Output::Json => json_line(&json!({ "query": query.to_string(), "result": holds })),
            };
            Ok((if holds { EXIT_OK } else { EXIT_NEGATIVE }, text))
        }
        Mode::Dump => {
            let initial = build_initial_with(&domain.initial, &domain, options)?;
            let dot = to_dot(&initial);
            if let Some(dot_path) = &config.dot_path {
                std::fs::write(dot_path, &dot)
                    .map_err(|e| Failure(format!("{}: {e}", dot_path.display())))?;
            }
            let text = match config.output {
                Output::Text if config.dot_path.is_none() => dot,
                Output::Text => String::new(),
                Output::Json => json_line(&state_json(&initial)),
            };
            Ok((EXIT_OK, text))
        }
        Mode::Plan => {
            let problem = PlanningProblem::from_domain_with(domain, options)?;
            let outcome = match config.search {
                Search::Bfs => plan_bfs_with(
                    &problem,
                    &BfsOptions {
                        max_depth: config.max_depth,
                        prune_duplicates: !config.no_prune,
                        parallel: config.parallel,
                    },
                ),
                Search::BestFirst => {
                    let heuristic: &dyn Heuristic = match config.heuristic {
                        HeuristicKind::None => &ZeroHeuristic,
                        HeuristicKind::GoalCount => &GoalCount,
                    };
                    plan_best_first(&problem, heuristic, config.max_nodes)
                }
            };
            let code = if outcome.plan().is_some() {
                EXIT_OK
            } else {
                EXIT_NEGATIVE
            };
            let text = match config.output {
                Output::Text => plan_text(&outcome, config.timing),
                Output::Json => json_line(&plan_json(&outcome, config.timing)),
            };
            Ok((code, text))
        }
    }
}

fn json_line(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn plan_text(outcome: &SearchOutcome, timing: bool) -> String {
    let mut s = String::new();
    match &outcome.result {
        SearchResult::Found(plan) => s.push_str(&plan.to_string()),
        SearchResult::NoPlan { .. } => s.push_str("NO PLAN\n"),
    }
    let st = &outcome.stats;
    s.push_str("\nstats:\n");
    let _ = writeln!(s, "  nodes_expanded: {}", st.nodes_expanded);
    let _ = writeln!(s, "  nodes_generated: {}", st.nodes_generated);
    let _ = writeln!(s, "  duplicates_pruned: {}", st.duplicates_pruned);
    let _ = writeln!(s, "  max_depth_reached: {}", st.max_depth_reached);
    if let SearchResult::NoPlan { depth_exhausted } = outcome.result {
        let _ = writeln!(s, "  bound_reached: {depth_exhausted}");
    }
    if timing {
        let _ = writeln!(s, "  elapsed_ms: {}", st.elapsed_ms);
    }
    s
}

fn plan_json(outcome: &SearchOutcome, timing: bool) -> serde_json::Value {
    let st = &outcome.stats;
    let bound_reached = match outcome.result {
        SearchResult::Found(_) => None,
        SearchResult::NoPlan { depth_exhausted } => Some(depth_exhausted),
    };
    json!({
        "solved": outcome.plan().is_some(),
        "plan": outcome.plan(),
        "bound_reached": bound_reached,
        "stats": {
            "nodes_expanded": st.nodes_expanded,
            "nodes_generated": st.nodes_generated,
            "duplicates_pruned": st.duplicates_pruned,
            "max_depth_reached": st.max_depth_reached,
            "elapsed_ms": timing.then_some(st.elapsed_ms),
        }
    })
}

fn state_json(state: &PointedState) -> serde_json::Value {
    let m = state.structure();
    let sig = m.signature();
    let worlds: Vec<_> = (0..m.world_count())
        .map(|w| {
            json!({
                "id": w,
                "fluents": m.interpretation(w),
                "designated": w == state.designated(),
            })
        })
        .collect();
    let relations: serde_json::Map<String, serde_json::Value> = sig
        .agents()
        .iter()
        .enumerate()
        .map(|(i, agent)| {
            let pairs: Vec<[usize; 2]> = (0..m.world_count())
                .flat_map(|w| m.successors(i, w).iter().map(move |&v| [w, v]))
                .collect();
            (agent.to_string(), json!(pairs))
        })
        .collect();
    json!({
        "worlds": worlds,
        "relations": relations,
        "frame": check_frame(m),
    })
}
