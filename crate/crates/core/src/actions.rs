//! Ontic, sensing and announcement actions and their event-update semantics.
//!
//! Applying an action builds the product of the current state with a small
//! event model whose shape depends on the action kind and on how each agent
//! observes it:
//!
//! * ontic: an effect event `ε` and a skip event `ι`;
//! * sensing `f` / announcing `φ`: two outcome events (`φ` true, `φ` false)
//!   plus the skip event.
//!
//! Full observers link an event only to itself, partial observers link the
//! two outcome events to each other, oblivious observers link every event to
//! `ι`. Every agent links `ι` to `ι`. The product is then pruned and
//! contracted.

use std::collections::BTreeMap;
use std::fmt;

use log::warn;

use crate::kripke::{
    bisim_contract, canonical_key, entails, KripkeStructure, PointedState, Valuation,
};
use crate::logic::{Agent, BeliefFormula, FluentFormula, Literal, Signature};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ObserverClass {
    Full,
    Partial,
    Oblivious,
}

impl fmt::Display for ObserverClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Full => "full",
            Self::Partial => "partial",
            Self::Oblivious => "oblivious",
        })
    }
}

/// Conditional effect: `literal` becomes true in every world satisfying
/// `condition` (evaluated before the update).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Effect {
    pub literal: Literal,
    pub condition: BeliefFormula,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActionKind {
    Ontic { effects: Vec<Effect> },
    Sensing { sensed: crate::logic::Fluent },
    Announcement { announced: FluentFormula },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Action {
    pub name: String,
    pub kind: ActionKind,
    pub executability: BeliefFormula,
    /// Observability clauses per agent; agents without a firing clause are
    /// oblivious.
    pub observability: BTreeMap<Agent, Vec<(ObserverClass, BeliefFormula)>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransitionError {
    #[error("action `{action}` is not executable in state {state_key}")]
    NotExecutable { action: String, state_key: String },
    #[error("action `{action}`: conflicting observability clauses fire for agent `{agent}`")]
    AmbiguousObservability { action: String, agent: Agent },
    #[error("{message}")]
    ValidationError { message: String },
}

impl TransitionError {
    fn invalid(action: &str, message: impl fmt::Display) -> Self {
        Self::ValidationError {
            message: format!("action `{action}`: {message}"),
        }
    }
}

impl Action {
    pub fn new(name: impl Into<String>, kind: ActionKind) -> Self {
        Self {
            name: name.into(),
            kind,
            executability: BeliefFormula::top(),
            observability: BTreeMap::new(),
        }
    }

    pub fn with_executability(mut self, condition: BeliefFormula) -> Self {
        self.executability = condition;
        self
    }

    pub fn observed_by(
        mut self,
        agent: Agent,
        class: ObserverClass,
        condition: BeliefFormula,
    ) -> Self {
        self.observability
            .entry(agent)
            .or_default()
            .push((class, condition));
        self
    }

    /// The sensed fluent or announced formula of an epistemic action.
    pub fn outcome_formula(&self) -> Option<FluentFormula> {
        match &self.kind {
            ActionKind::Ontic { .. } => None,
            ActionKind::Sensing { sensed } => Some(FluentFormula::Atom(sensed.clone())),
            ActionKind::Announcement { announced } => Some(announced.clone()),
        }
    }

    /// Static checks against a signature: declared names, no partial
    /// observers of ontic actions.
    pub fn validate(&self, sig: &Signature) -> Result<(), TransitionError> {
        let err = |m: &dyn fmt::Display| TransitionError::invalid(&self.name, m);
        self.executability.check(sig).map_err(|e| err(&e))?;
        match &self.kind {
            ActionKind::Ontic { effects } => {
                for effect in effects {
                    if sig.fluent_index(&effect.literal.fluent).is_none() {
                        return Err(err(&format_args!(
                            "undeclared fluent `{}`",
                            effect.literal.fluent
                        )));
                    }
                    effect.condition.check(sig).map_err(|e| err(&e))?;
                }
            }
            ActionKind::Sensing { sensed } => {
                if sig.fluent_index(sensed).is_none() {
                    return Err(err(&format_args!("undeclared fluent `{sensed}`")));
                }
            }
            ActionKind::Announcement { announced } => {
                BeliefFormula::Prop(announced.clone())
                    .check(sig)
                    .map_err(|e| err(&e))?;
            }
        }
        for (agent, clauses) in &self.observability {
            if sig.agent_index(agent).is_none() {
                return Err(err(&format_args!("undeclared agent `{agent}`")));
            }
            for (class, condition) in clauses {
                if *class == ObserverClass::Partial && matches!(self.kind, ActionKind::Ontic { .. })
                {
                    return Err(err(&format_args!(
                        "ontic actions admit no partial observers (agent `{agent}`)"
                    )));
                }
                condition.check(sig).map_err(|e| err(&e))?;
            }
        }
        Ok(())
    }
}

/// Whether the executability condition holds in `state`.
pub fn executable(state: &PointedState, action: &Action) -> bool {
    entails(state, &action.executability).unwrap_or(false)
}

/// Observer class of every agent of the signature in `state`.
pub fn observers(
    state: &PointedState,
    action: &Action,
) -> Result<BTreeMap<Agent, ObserverClass>, TransitionError> {
    let mut out = BTreeMap::new();
    for agent in state.signature().agents() {
        let mut class = None;
        for (c, condition) in action.observability.get(agent).into_iter().flatten() {
            let fires =
                entails(state, condition).map_err(|e| TransitionError::invalid(&action.name, e))?;
            if !fires {
                continue;
            }
            match class {
                Some(prev) if prev != *c => {
                    return Err(TransitionError::AmbiguousObservability {
                        action: action.name.clone(),
                        agent: agent.clone(),
                    })
                }
                _ => class = Some(*c),
            }
        }
        out.insert(agent.clone(), class.unwrap_or(ObserverClass::Oblivious));
    }
    Ok(out)
}

/// Events of the update model. `Outcome(true)` requires the sensed or
/// announced formula to hold, `Outcome(false)` requires it to fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Event {
    Effect,
    Outcome(bool),
    Skip,
}

fn event_edges(event: Event, class: ObserverClass) -> &'static [Event] {
    use Event::*;
    use ObserverClass::*;
    match (event, class) {
        (Skip, _) => &[Skip],
        (_, Oblivious) => &[Skip],
        (Effect, _) => &[Effect],
        (Outcome(true), Full) => &[Outcome(true)],
        (Outcome(false), Full) => &[Outcome(false)],
        (Outcome(_), Partial) => &[Outcome(true), Outcome(false)],
    }
}

/// Applies `action` to `state`, returning the pruned, contracted result.
pub fn apply(state: &PointedState, action: &Action) -> Result<PointedState, TransitionError> {
    let m = state.structure();
    let sig = m.signature().clone();
    action.validate(&sig)?;
    if !executable(state, action) {
        return Err(TransitionError::NotExecutable {
            action: action.name.clone(),
            state_key: canonical_key(state).digest(),
        });
    }
    let classes: Vec<ObserverClass> = observers(state, action)?.into_values().collect();
    let n = m.world_count();

    // Valuations of effect copies (ontic) or the outcome per world (epistemic).
    let (events, updated, outcome): (Vec<Event>, Vec<Valuation>, Vec<bool>) = match &action.kind {
        ActionKind::Ontic { effects } => {
            let updated = apply_effects(m, action, effects)?;
            (vec![Event::Effect, Event::Skip], updated, vec![true; n])
        }
        _ => {
            let phi = action.outcome_formula().expect("epistemic action");
            let outcome = (0..n).map(|w| m.eval_prop(w, &phi)).collect();
            (
                vec![Event::Outcome(true), Event::Outcome(false), Event::Skip],
                m.valuations().to_vec(),
                outcome,
            )
        }
    };

    let pairs_with = |w: usize, e: Event| match e {
        Event::Outcome(v) => outcome[w] == v,
        Event::Effect | Event::Skip => true,
    };
    let slot = |w: usize, e: usize| w * events.len() + e;
    let mut index = vec![None; n * events.len()];
    let mut worlds = Vec::new();
    for w in 0..n {
        for (ei, &e) in events.iter().enumerate() {
            if pairs_with(w, e) {
                index[slot(w, ei)] = Some(worlds.len());
                worlds.push(if e == Event::Effect {
                    updated[w]
                } else {
                    m.valuation(w)
                });
            }
        }
    }

    let event_pos = |e: Event| events.iter().position(|&x| x == e).expect("event present");
    let mut relations = vec![vec![Vec::new(); worlds.len()]; classes.len()];
    for (i, &class) in classes.iter().enumerate() {
        for w in 0..n {
            for (ei, &e) in events.iter().enumerate() {
                let Some(from) = index[slot(w, ei)] else {
                    continue;
                };
                for &target in event_edges(e, class) {
                    let ti = event_pos(target);
                    for &v in m.successors(i, w) {
                        if let Some(to) = index[slot(v, ti)] {
                            relations[i][from].push(to);
                        }
                    }
                }
            }
        }
    }

    let designated_event = match events[0] {
        Event::Effect => 0,
        _ => event_pos(Event::Outcome(outcome[state.designated()])),
    };
    let designated = index[slot(state.designated(), designated_event)].expect("designated pairs");
    let product = KripkeStructure::from_parts(sig.clone(), worlds, relations)
        .map_err(|e| TransitionError::invalid(&action.name, e))?;
    let result = bisim_contract(&PointedState::new(product, designated).expect("valid designated"));

    for (i, agent) in sig.agents().iter().enumerate() {
        let before = !m.successors(i, state.designated()).is_empty();
        let after = !result
            .structure()
            .successors(i, result.designated())
            .is_empty();
        if before && !after {
            warn!(
                "action `{}` leaves agent `{agent}` with no accessible world (beliefs contradicted)",
                action.name
            );
        }
    }
    Ok(result)
}

fn apply_effects(
    m: &KripkeStructure,
    action: &Action,
    effects: &[Effect],
) -> Result<Vec<Valuation>, TransitionError> {
    let sig = m.signature();
    let mut set_true = vec![0u64; m.world_count()];
    let mut set_false = vec![0u64; m.world_count()];
    for effect in effects {
        let bit = 1u64 << sig.fluent_index(&effect.literal.fluent).expect("validated");
        let holds = m
            .truth_set(&effect.condition)
            .map_err(|e| TransitionError::invalid(&action.name, e))?;
        for (w, _) in holds.iter().enumerate().filter(|(_, &h)| h) {
            if effect.literal.positive {
                set_true[w] |= bit;
            } else {
                set_false[w] |= bit;
            }
        }
    }
    (0..m.world_count())
        .map(|w| {
            let conflict = set_true[w] & set_false[w];
            if conflict != 0 {
                let fluent = &sig.fluents()[conflict.trailing_zeros() as usize];
                return Err(TransitionError::invalid(
                    &action.name,
                    format_args!("conflicting effects on `{fluent}`"),
                ));
            }
            Ok(Valuation((m.valuation(w).0 | set_true[w]) & !set_false[w]))
        })
        .collect()
}
