use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};
use std::time::Instant;

use log::{debug, error};
use rayon::prelude::*;

use super::{
    validate_plan, Heuristic, Plan, PlanningProblem, SearchOutcome, SearchResult, SearchStats,
};
use crate::actions::{apply, TransitionError};
use crate::kripke::{canonical_key, PointedState, StateKey};

#[derive(Debug, Clone, Copy)]
pub struct BfsOptions {
    pub max_depth: usize,
    /// Skip states bisimilar to one already generated.
    pub prune_duplicates: bool,
    /// Compute each layer's successors on the rayon pool. Results are merged
    /// in the same order as the sequential search.
    pub parallel: bool,
}

impl BfsOptions {
    pub fn new(max_depth: usize) -> Self {
        Self {
            max_depth,
            prune_duplicates: true,
            parallel: false,
        }
    }
}

/// Parent links for plan reconstruction.
struct Trail {
    links: Vec<(usize, usize)>,
}

impl Trail {
    const ROOT: usize = usize::MAX;

    fn new() -> Self {
        Self { links: Vec::new() }
    }

    fn push(&mut self, parent: usize, action: usize) -> usize {
        self.links.push((parent, action));
        self.links.len() - 1
    }

    fn plan(&self, problem: &PlanningProblem, mut node: usize) -> Plan {
        let mut names = Vec::new();
        while node != Self::ROOT {
            let (parent, action) = self.links[node];
            names.push(problem.domain.actions[action].name.clone());
            node = parent;
        }
        names.reverse();
        Plan(names)
    }
}

struct Successor {
    action: usize,
    state: PointedState,
    key: StateKey,
}

fn successors(problem: &PlanningProblem, state: &PointedState, with_keys: bool) -> Vec<Successor> {
    problem
        .domain
        .actions
        .iter()
        .enumerate()
        .filter_map(|(i, action)| match apply(state, action) {
            Ok(next) => {
                let key = if with_keys {
                    canonical_key(&next)
                } else {
                    StateKey::default()
                };
                Some(Successor {
                    action: i,
                    state: next,
                    key,
                })
            }
            Err(TransitionError::NotExecutable { .. }) => None,
            Err(e) => {
                debug!("skipping `{}`: {e}", action.name);
                None
            }
        })
        .collect()
}

fn elapsed_ms(start: Instant) -> u64 {
    start.elapsed().as_millis() as u64
}

/// Breadth-first search with default options.
pub fn plan_bfs(problem: &PlanningProblem, max_depth: usize) -> SearchOutcome {
    plan_bfs_with(problem, &BfsOptions::new(max_depth))
}

/// Breadth-first search for a shortest plan of at most `max_depth` actions.
///
/// Actions are tried in declaration order and the goal is tested when a
/// state is generated, so the result is deterministic.
pub fn plan_bfs_with(problem: &PlanningProblem, options: &BfsOptions) -> SearchOutcome {
    let start = Instant::now();
    let mut stats = SearchStats::default();
    let done = |result, mut stats: SearchStats| {
        stats.elapsed_ms = elapsed_ms(start);
        SearchOutcome { result, stats }
    };
    if problem.is_goal(&problem.initial) {
        return done(SearchResult::Found(Plan::default()), stats);
    }

    let mut trail = Trail::new();
    let mut visited: HashSet<StateKey> = HashSet::new();
    if options.prune_duplicates {
        visited.insert(canonical_key(&problem.initial));
    }
    let mut layer: Vec<(usize, PointedState)> = vec![(Trail::ROOT, problem.initial.clone())];
    let mut depth = 0;

    while !layer.is_empty() && depth < options.max_depth {
        let expanded: Vec<Vec<Successor>> = if options.parallel {
            layer
                .par_iter()
                .map(|(_, s)| successors(problem, s, options.prune_duplicates))
                .collect()
        } else {
            Vec::new()
        };
        let mut expanded = expanded.into_iter();
        let mut next = Vec::new();
        for (node, state) in &layer {
            let succs = if options.parallel {
                expanded.next().expect("one entry per node")
            } else {
                successors(problem, state, options.prune_duplicates)
            };
            stats.nodes_expanded += 1;
            for succ in succs {
                stats.nodes_generated += 1;
                if options.prune_duplicates && !visited.insert(succ.key) {
                    stats.duplicates_pruned += 1;
                    continue;
                }
                let id = trail.push(*node, succ.action);
                stats.max_depth_reached = (depth + 1) as u64;
                if problem.is_goal(&succ.state) {
                    return done(SearchResult::Found(trail.plan(problem, id)), stats);
                }
                next.push((id, succ.state));
            }
        }
        layer = next;
        depth += 1;
    }
    done(
        SearchResult::NoPlan {
            depth_exhausted: !layer.is_empty(),
        },
        stats,
    )
}

/// Greedy best-first search ordered by `heuristic`, expanding at most
/// `max_nodes` states. Ties go to the earlier-generated state.
pub fn plan_best_first(
    problem: &PlanningProblem,
    heuristic: &dyn Heuristic,
    max_nodes: usize,
) -> SearchOutcome {
    let start = Instant::now();
    let mut stats = SearchStats::default();
    let done = |result, mut stats: SearchStats| {
        stats.elapsed_ms = elapsed_ms(start);
        SearchOutcome { result, stats }
    };
    if max_nodes == 0 {
        return done(
            SearchResult::NoPlan {
                depth_exhausted: true,
            },
            stats,
        );
    }
    if problem.is_goal(&problem.initial) {
        return done(SearchResult::Found(Plan::default()), stats);
    }

    let mut trail = Trail::new();
    let mut visited: HashSet<StateKey> = HashSet::from([canonical_key(&problem.initial)]);
    let mut states: Vec<(usize, usize, PointedState)> =
        vec![(Trail::ROOT, 0, problem.initial.clone())];
    let mut open = BinaryHeap::from([Reverse((
        heuristic.estimate(&problem.initial, &problem.goal),
        0usize,
    ))]);

    while let Some(Reverse((_, index))) = open.pop() {
        if stats.nodes_expanded as usize >= max_nodes {
            return done(
                SearchResult::NoPlan {
                    depth_exhausted: true,
                },
                stats,
            );
        }
        let (node, depth, state) = std::mem::replace(
            &mut states[index],
            (Trail::ROOT, 0, problem.initial.clone()),
        );
        stats.nodes_expanded += 1;
        for succ in successors(problem, &state, true) {
            stats.nodes_generated += 1;
            if !visited.insert(succ.key) {
                stats.duplicates_pruned += 1;
                continue;
            }
            let id = trail.push(node, succ.action);
            stats.max_depth_reached = stats.max_depth_reached.max(depth as u64 + 1);
            if problem.is_goal(&succ.state) {
                let plan = trail.plan(problem, id);
                match validate_plan(problem, &plan) {
                    Ok(v) if v.valid => return done(SearchResult::Found(plan), stats),
                    _ => error!("plan {:?} failed replay; continuing search", plan.actions()),
                }
            }
            let score = heuristic.estimate(&succ.state, &problem.goal);
            open.push(Reverse((score, states.len())));
            states.push((id, depth + 1, succ.state));
        }
    }
    done(
        SearchResult::NoPlan {
            depth_exhausted: false,
        },
        stats,
    )
}
