//! Random instance generators and a reference evaluator shared by the
//! integration suites.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::Arc;

use epiplan::kripke::{check_frame, KripkeStructure, PointedState, Valuation};
use epiplan::logic::{Agent, BeliefFormula, FluentFormula, Signature};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn benchmarks_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../benchmarks")
}

const AGENTS: [&str; 3] = ["a", "b", "c"];
const FLUENTS: [&str; 4] = ["p", "q", "r", "s"];

/// 2-3 agents, 1-4 fluents.
pub fn random_signature(rng: &mut StdRng) -> Arc<Signature> {
    let agents = rng.gen_range(2..=3);
    let fluents = rng.gen_range(1..=4);
    Arc::new(Signature::from_names(
        &AGENTS[..agents],
        &FLUENTS[..fluents],
    ))
}

fn random_valuations(rng: &mut StdRng, sig: &Signature, n: usize) -> Vec<Valuation> {
    let bits = sig.fluents().len();
    (0..n)
        .map(|_| Valuation(rng.gen_range(0..1u64 << bits)))
        .collect()
}

/// Arbitrary relations, 1..=max_worlds worlds.
pub fn random_state(rng: &mut StdRng, sig: Arc<Signature>, max_worlds: usize) -> PointedState {
    let n = rng.gen_range(1..=max_worlds);
    let density = rng.gen_range(0.1..0.6);
    let mut edges = Vec::new();
    for i in 0..sig.agents().len() {
        for u in 0..n {
            for v in 0..n {
                if rng.gen_bool(density) {
                    edges.push((i, u, v));
                }
            }
        }
    }
    let worlds = random_valuations(rng, &sig, n);
    let m = KripkeStructure::from_edges(sig, worlds, edges).unwrap();
    let designated = rng.gen_range(0..n);
    PointedState::new(m, designated).unwrap()
}

/// States whose worlds often share valuations, so that contraction has work
/// to do.
pub fn random_redundant_state(
    rng: &mut StdRng,
    sig: Arc<Signature>,
    max_worlds: usize,
) -> PointedState {
    let s = random_state(rng, sig.clone(), max_worlds);
    let m = s.structure();
    let palette: Vec<Valuation> = random_valuations(rng, &sig, 2);
    let worlds: Vec<Valuation> = (0..m.world_count())
        .map(|_| *palette.choose(rng).unwrap())
        .collect();
    let relations = (0..sig.agents().len())
        .map(|i| m.relation(i).to_vec())
        .collect();
    let m = KripkeStructure::from_parts(sig, worlds, relations).unwrap();
    PointedState::new(m, s.designated()).unwrap()
}

/// Random KD45 relation (serial, transitive, euclidean) on `n` worlds: some
/// disjoint clusters; a cluster member sees exactly its cluster, every other
/// world sees one chosen cluster. With `reflexive`, the clusters partition
/// all worlds (S5).
pub fn random_kd45_relation(rng: &mut StdRng, n: usize, reflexive: bool) -> Vec<Vec<usize>> {
    let mut worlds: Vec<usize> = (0..n).collect();
    worlds.shuffle(rng);
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut i = 0;
    while i < n {
        let len = rng.gen_range(1..=n - i);
        let take = if reflexive || clusters.is_empty() || rng.gen_bool(0.6) {
            len
        } else {
            0
        };
        if take == 0 {
            break;
        }
        clusters.push(worlds[i..i + take].to_vec());
        i += take;
    }
    let mut rel = vec![Vec::new(); n];
    let mut assigned = vec![false; n];
    for c in &clusters {
        for &w in c {
            rel[w] = c.clone();
            assigned[w] = true;
        }
    }
    for w in 0..n {
        if !assigned[w] {
            rel[w] = clusters.choose(rng).unwrap().clone();
        }
    }
    rel
}

pub fn random_kd45_state(
    rng: &mut StdRng,
    sig: Arc<Signature>,
    max_worlds: usize,
    reflexive: bool,
) -> PointedState {
    let n = rng.gen_range(1..=max_worlds);
    let relations = (0..sig.agents().len())
        .map(|_| random_kd45_relation(rng, n, reflexive))
        .collect();
    let worlds = random_valuations(rng, &sig, n);
    let m = KripkeStructure::from_parts(sig, worlds, relations).unwrap();
    let report = check_frame(&m);
    assert!(report.is_kd45);
    assert!(!reflexive || report.is_s5);
    let designated = rng.gen_range(0..n);
    PointedState::new(m, designated).unwrap()
}

pub fn random_fluent_formula(rng: &mut StdRng, sig: &Signature, size: usize) -> FluentFormula {
    if size == 0 || rng.gen_bool(0.35) {
        return match rng.gen_range(0..10) {
            0 => FluentFormula::Top,
            1 => FluentFormula::Bot,
            _ => FluentFormula::Atom(sig.fluents().choose(rng).unwrap().clone()),
        };
    }
    let a = random_fluent_formula(rng, sig, size - 1);
    match rng.gen_range(0..4) {
        0 => FluentFormula::not(a),
        1 => FluentFormula::and(a, random_fluent_formula(rng, sig, size - 1)),
        2 => FluentFormula::or(a, random_fluent_formula(rng, sig, size - 1)),
        _ => FluentFormula::implies(a, random_fluent_formula(rng, sig, size - 1)),
    }
}

fn random_group(rng: &mut StdRng, sig: &Signature) -> BTreeSet<Agent> {
    loop {
        let g: BTreeSet<Agent> = sig
            .agents()
            .iter()
            .filter(|_| rng.gen_bool(0.6))
            .cloned()
            .collect();
        if !g.is_empty() {
            return g;
        }
    }
}

/// Random belief formula of modal depth at most `depth`, built through the
/// smart constructors (so it is in parser-normal shape).
pub fn random_formula(
    rng: &mut StdRng,
    sig: &Signature,
    depth: usize,
    allow_c: bool,
) -> BeliefFormula {
    random_formula_sized(rng, sig, depth, allow_c, 3)
}

fn random_formula_sized(
    rng: &mut StdRng,
    sig: &Signature,
    depth: usize,
    allow_c: bool,
    size: usize,
) -> BeliefFormula {
    let modal = depth > 0 && rng.gen_bool(0.5);
    if size == 0 || (!modal && rng.gen_bool(0.3)) {
        return BeliefFormula::Prop(random_fluent_formula(rng, sig, 2));
    }
    if modal {
        let inner =
            random_formula_sized(rng, sig, depth - 1, allow_c, size.saturating_sub(1).max(1));
        let kinds = if allow_c { 3 } else { 2 };
        return match rng.gen_range(0..kinds) {
            0 => BeliefFormula::believes(sig.agents().choose(rng).unwrap().clone(), inner),
            1 => BeliefFormula::everyone(random_group(rng, sig), inner),
            _ => BeliefFormula::common(random_group(rng, sig), inner),
        };
    }
    let a = random_formula_sized(rng, sig, depth, allow_c, size - 1);
    match rng.gen_range(0..4) {
        0 => BeliefFormula::not(a),
        1 => BeliefFormula::and(a, random_formula_sized(rng, sig, depth, allow_c, size - 1)),
        2 => BeliefFormula::or(a, random_formula_sized(rng, sig, depth, allow_c, size - 1)),
        _ => BeliefFormula::implies(a, random_formula_sized(rng, sig, depth, allow_c, size - 1)),
    }
}

/// Same structure with worlds renumbered by a random permutation.
pub fn permute(rng: &mut StdRng, s: &PointedState) -> PointedState {
    let m = s.structure();
    let n = m.world_count();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut worlds = vec![Valuation(0); n];
    for w in 0..n {
        worlds[perm[w]] = m.valuation(w);
    }
    let relations = (0..m.signature().agents().len())
        .map(|i| {
            let mut rel = vec![Vec::new(); n];
            for w in 0..n {
                rel[perm[w]] = m.successors(i, w).iter().map(|&v| perm[v]).collect();
            }
            rel
        })
        .collect();
    let pm = KripkeStructure::from_parts(m.signature().clone(), worlds, relations).unwrap();
    PointedState::new(pm, perm[s.designated()]).unwrap()
}

/// Reference semantics, written directly from the pointwise truth
/// conditions. `C_G φ` is evaluated as the conjunction of `E_G^k φ` for
/// k = 1, 2, ..., iterating until the set of worlds violating `E_G^k φ`
/// stops changing (at most |S| rounds on a finite model).
pub mod oracle {
    use super::*;

    pub fn holds(s: &PointedState, f: &BeliefFormula) -> bool {
        eval(s.structure(), s.designated(), f)
    }

    fn prop(m: &KripkeStructure, w: usize, p: &FluentFormula) -> bool {
        let sig = m.signature();
        let v = m.valuation(w);
        p.eval_with(&|f| v.holds(sig.fluent_index(f).unwrap()))
    }

    fn agent(m: &KripkeStructure, a: &Agent) -> usize {
        m.signature().agent_index(a).unwrap()
    }

    pub fn eval(m: &KripkeStructure, w: usize, f: &BeliefFormula) -> bool {
        use BeliefFormula as F;
        match f {
            F::Prop(p) => prop(m, w, p),
            F::B(a, x) => m.successors(agent(m, a), w).iter().all(|&v| eval(m, v, x)),
            F::E(g, x) => g
                .iter()
                .all(|a| m.successors(agent(m, a), w).iter().all(|&v| eval(m, v, x))),
            F::C(g, x) => {
                let n = m.world_count();
                let agents: Vec<usize> = g.iter().map(|a| agent(m, a)).collect();
                // level[u] = u satisfies E^k φ
                let mut level: Vec<bool> = (0..n).map(|u| eval(m, u, x)).collect();
                let mut all_levels_hold_at_w = true;
                let mut previous_violations: Option<Vec<bool>> = None;
                for _ in 0..=n + 1 {
                    let next: Vec<bool> = (0..n)
                        .map(|u| {
                            agents
                                .iter()
                                .all(|&i| m.successors(i, u).iter().all(|&v| level[v]))
                        })
                        .collect();
                    all_levels_hold_at_w &= next[w];
                    let violations: Vec<bool> = next.iter().map(|b| !b).collect();
                    if previous_violations.as_ref() == Some(&violations) {
                        break;
                    }
                    previous_violations = Some(violations);
                    level = next;
                }
                all_levels_hold_at_w
            }
            F::Not(x) => !eval(m, w, x),
            F::And(x, y) => eval(m, w, x) && eval(m, w, y),
            F::Or(x, y) => eval(m, w, x) || eval(m, w, y),
            F::Implies(x, y) => !eval(m, w, x) || eval(m, w, y),
        }
    }
}

pub mod actions {
    use super::*;
    use epiplan::actions::{Action, ActionKind, Effect, ObserverClass};
    use epiplan::logic::Literal;

    fn class_for(rng: &mut StdRng, allow_partial: bool) -> ObserverClass {
        match rng.gen_range(0..if allow_partial { 3 } else { 2 }) {
            0 => ObserverClass::Full,
            1 => ObserverClass::Oblivious,
            _ => ObserverClass::Partial,
        }
    }

    /// Unconditional observer classes, one per agent.
    pub fn observe_all(mut action: Action, classes: &[(Agent, ObserverClass)]) -> Action {
        for (agent, class) in classes {
            action = action.observed_by(agent.clone(), *class, BeliefFormula::top());
        }
        action
    }

    pub fn random_classes(
        rng: &mut StdRng,
        sig: &Signature,
        allow_partial: bool,
    ) -> Vec<(Agent, ObserverClass)> {
        sig.agents()
            .iter()
            .map(|a| (a.clone(), class_for(rng, allow_partial)))
            .collect()
    }

    /// One or two conditional effects on distinct fluents.
    pub fn random_ontic(
        rng: &mut StdRng,
        sig: &Signature,
    ) -> (Action, Vec<(Agent, ObserverClass)>) {
        let mut fluents = sig.fluents().to_vec();
        fluents.shuffle(rng);
        let count = rng.gen_range(1..=fluents.len().min(2));
        let effects = fluents[..count]
            .iter()
            .map(|f| Effect {
                literal: if rng.gen_bool(0.5) {
                    Literal::pos(f.clone())
                } else {
                    Literal::neg(f.clone())
                },
                condition: if rng.gen_bool(0.5) {
                    BeliefFormula::top()
                } else {
                    BeliefFormula::Prop(random_fluent_formula(rng, sig, 1))
                },
            })
            .collect();
        let classes = random_classes(rng, sig, false);
        let action = observe_all(Action::new("act", ActionKind::Ontic { effects }), &classes);
        (action, classes)
    }

    pub fn random_sensing(
        rng: &mut StdRng,
        sig: &Signature,
    ) -> (Action, Vec<(Agent, ObserverClass)>) {
        let sensed = sig.fluents().choose(rng).unwrap().clone();
        let classes = random_classes(rng, sig, true);
        let action = observe_all(
            Action::new("sense", ActionKind::Sensing { sensed }),
            &classes,
        );
        (action, classes)
    }

    pub fn public_announcement(sig: &Signature, announced: FluentFormula) -> Action {
        let classes: Vec<_> = sig
            .agents()
            .iter()
            .map(|a| (a.clone(), ObserverClass::Full))
            .collect();
        observe_all(
            Action::new("announce", ActionKind::Announcement { announced }),
            &classes,
        )
    }
}
