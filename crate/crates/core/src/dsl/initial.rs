use std::collections::BTreeMap;

use log::warn;

use super::{Domain, InitialSpec};
use crate::kripke::{bisim_contract, KripkeStructure, PointedState, Valuation};
use crate::logic::{FluentFormula, Signature};

/// Above this many fluents world enumeration logs a warning.
pub const WARN_ABOVE_FLUENTS: usize = 20;
/// Above this many fluents world enumeration is refused unless
/// [`InitialOptions::allow_large`] is set.
pub const REFUSE_ABOVE_FLUENTS: usize = 26;

#[derive(Debug, Clone, Copy, Default)]
pub struct InitialOptions {
    pub allow_large: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InitialStateError {
    #[error("the actual world violates the commonly known constraint `{0}`")]
    RealWorldViolatesConstraint(FluentFormula),
    #[error("the commonly known constraints have no model")]
    Unsatisfiable,
    #[error("{count} fluents exceed the enumeration limit of {REFUSE_ABOVE_FLUENTS}")]
    TooManyFluents { count: usize },
    #[error("initial specification mentions undeclared symbol `{0}`")]
    Undeclared(String),
}

/// All valuations over `sig` satisfying every constraint, in increasing
/// bitmask order.
pub fn enumerate_models(sig: &Signature, constraints: &[FluentFormula]) -> Vec<Valuation> {
    let n = sig.fluents().len();
    assert!(n < 64, "cannot enumerate 2^{n} valuations");
    (0..1u64 << n)
        .map(Valuation)
        .filter(|v| {
            constraints
                .iter()
                .all(|c| c.eval_with(&|f| v.holds(sig.fluent_index(f).expect("declared fluent"))))
        })
        .collect()
}

/// Builds the initial state with default options.
pub fn build_initial(
    spec: &InitialSpec,
    domain: &Domain,
) -> Result<PointedState, InitialStateError> {
    build_initial_with(spec, domain, InitialOptions::default())
}

/// Builds the finitary S5 initial state: one world per model of the common
/// constraints, and for each agent an equivalence relation linking worlds
/// that agree on every fluent the agent knows. The result is pruned and
/// contracted.
pub fn build_initial_with(
    spec: &InitialSpec,
    domain: &Domain,
    options: InitialOptions,
) -> Result<PointedState, InitialStateError> {
    let sig = domain.signature();
    let count = sig.fluents().len();
    if count > REFUSE_ABOVE_FLUENTS && !options.allow_large {
        return Err(InitialStateError::TooManyFluents { count });
    }
    if count > WARN_ABOVE_FLUENTS {
        warn!("enumerating 2^{count} candidate worlds for the initial state");
    }

    for c in &spec.common_constraints {
        crate::logic::BeliefFormula::Prop(c.clone())
            .check(sig)
            .map_err(|e| InitialStateError::Undeclared(e.to_string()))?;
    }
    let real = Valuation::from_fluents(sig, &spec.real_world)
        .map_err(|e| InitialStateError::Undeclared(e.to_string()))?;
    if let Some(c) = spec
        .common_constraints
        .iter()
        .find(|c| !c.eval_with(&|f| real.holds(sig.fluent_index(f).expect("checked"))))
    {
        return Err(InitialStateError::RealWorldViolatesConstraint(c.clone()));
    }

    let worlds = enumerate_models(sig, &spec.common_constraints);
    if worlds.is_empty() {
        return Err(InitialStateError::Unsatisfiable);
    }
    let designated = worlds
        .iter()
        .position(|&w| w == real)
        .expect("real world satisfies the constraints");

    let relations = sig
        .agents()
        .iter()
        .map(|agent| {
            let known = spec.known_by.get(agent);
            let mut mask = 0u64;
            for f in known.into_iter().flatten() {
                let i = sig
                    .fluent_index(f)
                    .ok_or_else(|| InitialStateError::Undeclared(f.to_string()))?;
                mask |= 1 << i;
            }
            let mut classes: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
            for (w, v) in worlds.iter().enumerate() {
                classes.entry(v.0 & mask).or_default().push(w);
            }
            Ok(worlds
                .iter()
                .map(|v| classes[&(v.0 & mask)].clone())
                .collect())
        })
        .collect::<Result<Vec<Vec<Vec<usize>>>, InitialStateError>>()?;
    if let Some(agent) = spec.known_by.keys().find(|a| sig.agent_index(a).is_none()) {
        return Err(InitialStateError::Undeclared(agent.to_string()));
    }

    let structure = KripkeStructure::from_parts(sig.clone(), worlds, relations)
        .expect("relations over enumerated worlds");
    let state = PointedState::new(structure, designated).expect("designated world exists");
    Ok(bisim_contract(&state))
}
