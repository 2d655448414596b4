//! Domain description files and initial-state construction.
//!
//! A domain file is a sequence of `;`-terminated declarations:
//!
//! ```text
//! agent a, b;                       % agents
//! fluent heads, opened;             % fluents
//!
//! action open {
//!     executable: !opened;
//!     causes: opened;               % ontic effect, optionally `if <formula>`
//!     observes a;                   % full observer, optionally `if <formula>`
//! }
//! action peek {
//!     executable: opened;
//!     determines: heads;            % sensing
//!     observes a;
//!     aware b if opened;            % partial observer
//! }
//!
//! initially world: heads, -opened;  % the actual world; unlisted fluents are false
//! initially known: !opened;         % commonly known propositional constraint
//! initially knows(a): heads;        % a knows the value of heads
//! goal: B(a, heads) & !B(b, heads);
//! ```
//!
//! Announcements use `announces: <fluent formula>;`. `%` comments run to the
//! end of the line.

mod initial;
mod parser;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::actions::Action;
use crate::logic::{Agent, BeliefFormula, Fluent, FluentFormula, Pos, Signature};

pub use initial::{
    build_initial, build_initial_with, enumerate_models, InitialOptions, InitialStateError,
    REFUSE_ABOVE_FLUENTS, WARN_ABOVE_FLUENTS,
};
pub use parser::parse_domain;

/// Finitary S5 initial specification.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InitialSpec {
    /// Fluents true in the actual world; every other fluent is false.
    pub real_world: BTreeSet<Fluent>,
    /// Propositional facts that are common knowledge.
    pub common_constraints: Vec<FluentFormula>,
    /// Fluents whose value each agent knows.
    pub known_by: BTreeMap<Agent, BTreeSet<Fluent>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    signature: Arc<Signature>,
    pub actions: Vec<Action>,
    pub initial: InitialSpec,
    pub goal: Option<BeliefFormula>,
}

impl Domain {
    pub fn new(
        signature: Arc<Signature>,
        actions: Vec<Action>,
        initial: InitialSpec,
        goal: Option<BeliefFormula>,
    ) -> Self {
        Self {
            signature,
            actions,
            initial,
            goal,
        }
    }

    pub fn signature(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn agents(&self) -> &[Agent] {
        self.signature.agents()
    }

    pub fn fluents(&self) -> &[Fluent] {
        self.signature.fluents()
    }

    pub fn action(&self, name: &str) -> Option<&Action> {
        self.actions.iter().find(|a| a.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DslError {
    #[error("{pos}: syntax error: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("{pos}: {message}")]
    Semantic { pos: Pos, message: String },
}

impl DslError {
    pub fn pos(&self) -> Pos {
        match self {
            Self::Syntax { pos, .. } | Self::Semantic { pos, .. } => *pos,
        }
    }
}
