//! Pointed Kripke structures and their semantics.

mod canonical;
mod dot;
mod entail;
mod frame;
mod reduce;

use std::collections::BTreeSet;
use std::sync::Arc;

use crate::logic::{Fluent, Signature, SymbolError};

pub use crate::logic::eval_fluent;
pub use canonical::{canonical_key, canonical_order, states_equal, StateKey};
pub use dot::to_dot;
pub use entail::entails;
pub use frame::{check_frame, AgentFrame, FrameReport};
pub use reduce::{bisim_contract, bisimulation_classes, prune_unreachable};

/// Dense index of a world inside its structure.
pub type WorldId = usize;

/// The set of fluents true in a world, as a bitmask over the signature's
/// fluent order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Valuation(pub u64);

impl Valuation {
    pub fn holds(self, fluent: usize) -> bool {
        self.0 >> fluent & 1 == 1
    }

    pub fn with(self, fluent: usize, value: bool) -> Self {
        if value {
            Self(self.0 | 1 << fluent)
        } else {
            Self(self.0 & !(1 << fluent))
        }
    }

    pub fn from_fluents<'a>(
        sig: &Signature,
        fluents: impl IntoIterator<Item = &'a Fluent>,
    ) -> Result<Self, KripkeError> {
        let mut v = Self::default();
        for f in fluents {
            let i = sig
                .fluent_index(f)
                .ok_or_else(|| KripkeError::Symbol(SymbolError::UndeclaredFluent(f.clone())))?;
            v = v.with(i, true);
        }
        Ok(v)
    }

    pub fn to_fluents(self, sig: &Signature) -> BTreeSet<Fluent> {
        sig.fluents()
            .iter()
            .enumerate()
            .filter(|(i, _)| self.holds(*i))
            .map(|(_, f)| f.clone())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum KripkeError {
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error("world {world} out of range (structure has {count} worlds)")]
    InvalidWorld { world: WorldId, count: usize },
    #[error("relation list has {got} entries, expected one per agent ({expected})")]
    RelationCount { got: usize, expected: usize },
    #[error("world {world} sets bits outside the {fluents} declared fluents")]
    InvalidValuation { world: WorldId, fluents: usize },
    #[error("states belong to different domains")]
    DomainMismatch,
}

/// Worlds with their valuations plus one accessibility relation per agent.
///
/// `relations[i][w]` holds the sorted, duplicate-free successors of world
/// `w` for the `i`-th agent of the signature.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KripkeStructure {
    signature: Arc<Signature>,
    worlds: Vec<Valuation>,
    relations: Vec<Vec<Vec<WorldId>>>,
}

impl KripkeStructure {
    /// Builds a structure from edge triples `(agent index, from, to)`.
    pub fn from_edges(
        signature: Arc<Signature>,
        worlds: Vec<Valuation>,
        edges: impl IntoIterator<Item = (usize, WorldId, WorldId)>,
    ) -> Result<Self, KripkeError> {
        let n = worlds.len();
        let mut relations = vec![vec![Vec::new(); n]; signature.agents().len()];
        for (agent, from, to) in edges {
            if agent >= relations.len() {
                return Err(KripkeError::RelationCount {
                    got: agent + 1,
                    expected: relations.len(),
                });
            }
            for w in [from, to] {
                if w >= n {
                    return Err(KripkeError::InvalidWorld { world: w, count: n });
                }
            }
            relations[agent][from].push(to);
        }
        Self::from_parts(signature, worlds, relations)
    }

    /// Builds a structure from per-agent successor lists; lists are sorted
    /// and deduplicated.
    pub fn from_parts(
        signature: Arc<Signature>,
        worlds: Vec<Valuation>,
        mut relations: Vec<Vec<Vec<WorldId>>>,
    ) -> Result<Self, KripkeError> {
        let n = worlds.len();
        let fluents = signature.fluents().len();
        if relations.len() != signature.agents().len() {
            return Err(KripkeError::RelationCount {
                got: relations.len(),
                expected: signature.agents().len(),
            });
        }
        for (world, v) in worlds.iter().enumerate() {
            if fluents < 64 && v.0 >> fluents != 0 {
                return Err(KripkeError::InvalidValuation { world, fluents });
            }
        }
        for rel in &mut relations {
            if rel.len() != n {
                return Err(KripkeError::InvalidWorld {
                    world: rel.len(),
                    count: n,
                });
            }
            for succ in rel.iter_mut() {
                succ.sort_unstable();
                succ.dedup();
                if let Some(&w) = succ.last().filter(|&&w| w >= n) {
                    return Err(KripkeError::InvalidWorld { world: w, count: n });
                }
            }
        }
        Ok(Self {
            signature,
            worlds,
            relations,
        })
    }

    pub(crate) fn from_parts_unchecked(
        signature: Arc<Signature>,
        worlds: Vec<Valuation>,
        relations: Vec<Vec<Vec<WorldId>>>,
    ) -> Self {
        debug_assert!(relations.iter().all(|r| r.len() == worlds.len()));
        Self {
            signature,
            worlds,
            relations,
        }
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn world_count(&self) -> usize {
        self.worlds.len()
    }

    pub fn valuation(&self, w: WorldId) -> Valuation {
        self.worlds[w]
    }

    pub fn valuations(&self) -> &[Valuation] {
        &self.worlds
    }

    /// Successors of `w` for the agent at index `agent`.
    pub fn successors(&self, agent: usize, w: WorldId) -> &[WorldId] {
        &self.relations[agent][w]
    }

    pub fn relation(&self, agent: usize) -> &[Vec<WorldId>] {
        &self.relations[agent]
    }

    pub fn edge_count(&self) -> usize {
        self.relations.iter().flatten().map(Vec::len).sum()
    }

    /// The fluents true at `w`.
    pub fn interpretation(&self, w: WorldId) -> BTreeSet<Fluent> {
        self.worlds[w].to_fluents(&self.signature)
    }
}

/// A Kripke structure together with its designated (actual) world.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointedState {
    structure: KripkeStructure,
    designated: WorldId,
}

impl PointedState {
    pub fn new(structure: KripkeStructure, designated: WorldId) -> Result<Self, KripkeError> {
        if designated >= structure.world_count() {
            return Err(KripkeError::InvalidWorld {
                world: designated,
                count: structure.world_count(),
            });
        }
        Ok(Self {
            structure,
            designated,
        })
    }

    pub fn structure(&self) -> &KripkeStructure {
        &self.structure
    }

    pub fn designated(&self) -> WorldId {
        self.designated
    }

    pub fn signature(&self) -> &Arc<Signature> {
        self.structure.signature()
    }

    pub fn world_count(&self) -> usize {
        self.structure.world_count()
    }

    /// The same structure pointed at a different world.
    pub fn repoint(&self, designated: WorldId) -> Result<Self, KripkeError> {
        Self::new(self.structure.clone(), designated)
    }
}
