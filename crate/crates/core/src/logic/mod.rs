//! Fluent and belief formulas.
//!
//! Formulas are plain immutable trees. Belief formulas keep purely
//! propositional subtrees inside a single [`BeliefFormula::Prop`] node; the
//! smart constructors ([`BeliefFormula::and`], [`BeliefFormula::not`], ...)
//! maintain that shape, and both the parser and [`to_nnf`] go through them.

mod lexer;
mod parser;

use std::collections::BTreeSet;
use std::fmt;

pub use lexer::{tokenize, Pos, Tok, Token};
pub use parser::{parse_fluent_formula, parse_formula, FormulaParser, ParseError};

/// Returns true for names of the form `[a-z][A-Za-z0-9_]*` that are not
/// reserved words.
pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !matches!(name, "true" | "false")
}

macro_rules! name_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            /// Panics if `name` is not a valid identifier; use `try_new` for
            /// untrusted input.
            pub fn new(name: impl Into<String>) -> Self {
                let name = name.into();
                assert!(is_identifier(&name), "invalid identifier `{name}`");
                Self(name)
            }

            pub fn try_new(name: impl Into<String>) -> Option<Self> {
                let name = name.into();
                is_identifier(&name).then_some(Self(name))
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

name_type!(
    /// An agent name.
    Agent
);
name_type!(
    /// A propositional variable.
    Fluent
);

/// Maximum number of fluents a signature may declare (valuations are 64-bit
/// masks).
pub const MAX_FLUENTS: usize = 64;

/// The agents and fluents of a domain, each kept in lexicographic order.
///
/// Fluent `i` of the signature corresponds to bit `i` of a
/// [`Valuation`](crate::kripke::Valuation).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Signature {
    agents: Vec<Agent>,
    fluents: Vec<Fluent>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SignatureError {
    #[error("duplicate agent `{0}`")]
    DuplicateAgent(Agent),
    #[error("duplicate fluent `{0}`")]
    DuplicateFluent(Fluent),
    #[error("`{0}` is declared both as an agent and as a fluent")]
    NameClash(String),
    #[error("too many fluents ({0}, at most {MAX_FLUENTS} supported)")]
    TooManyFluents(usize),
}

impl Signature {
    pub fn new(
        agents: impl IntoIterator<Item = Agent>,
        fluents: impl IntoIterator<Item = Fluent>,
    ) -> Result<Self, SignatureError> {
        let mut agents: Vec<Agent> = agents.into_iter().collect();
        let mut fluents: Vec<Fluent> = fluents.into_iter().collect();
        agents.sort();
        fluents.sort();
        if let Some(w) = agents.windows(2).find(|w| w[0] == w[1]) {
            return Err(SignatureError::DuplicateAgent(w[0].clone()));
        }
        if let Some(w) = fluents.windows(2).find(|w| w[0] == w[1]) {
            return Err(SignatureError::DuplicateFluent(w[0].clone()));
        }
        if fluents.len() > MAX_FLUENTS {
            return Err(SignatureError::TooManyFluents(fluents.len()));
        }
        for a in &agents {
            if fluents
                .binary_search_by(|f| f.as_str().cmp(a.as_str()))
                .is_ok()
            {
                return Err(SignatureError::NameClash(a.to_string()));
            }
        }
        Ok(Self { agents, fluents })
    }

    /// Convenience constructor for tests and examples; panics on bad names.
    pub fn from_names(agents: &[&str], fluents: &[&str]) -> Self {
        Self::new(
            agents.iter().map(|a| Agent::new(*a)),
            fluents.iter().map(|f| Fluent::new(*f)),
        )
        .expect("valid signature")
    }

    pub fn agents(&self) -> &[Agent] {
        &self.agents
    }

    pub fn fluents(&self) -> &[Fluent] {
        &self.fluents
    }

    pub fn agent_index(&self, agent: &Agent) -> Option<usize> {
        self.agents.binary_search(agent).ok()
    }

    pub fn fluent_index(&self, fluent: &Fluent) -> Option<usize> {
        self.fluents.binary_search(fluent).ok()
    }

    pub fn agent_named(&self, name: &str) -> Option<&Agent> {
        self.agents
            .binary_search_by(|a| a.as_str().cmp(name))
            .ok()
            .map(|i| &self.agents[i])
    }

    pub fn fluent_named(&self, name: &str) -> Option<&Fluent> {
        self.fluents
            .binary_search_by(|f| f.as_str().cmp(name))
            .ok()
            .map(|i| &self.fluents[i])
    }

    pub fn all_agents(&self) -> BTreeSet<Agent> {
        self.agents.iter().cloned().collect()
    }
}

/// A fluent or its negation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub fluent: Fluent,
    pub positive: bool,
}

impl Literal {
    pub fn pos(fluent: Fluent) -> Self {
        Self {
            fluent,
            positive: true,
        }
    }

    pub fn neg(fluent: Fluent) -> Self {
        Self {
            fluent,
            positive: false,
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("-")?;
        }
        write!(f, "{}", self.fluent)
    }
}

/// Propositional formula over fluents.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FluentFormula {
    Top,
    Bot,
    Atom(Fluent),
    Not(Box<FluentFormula>),
    And(Box<FluentFormula>, Box<FluentFormula>),
    Or(Box<FluentFormula>, Box<FluentFormula>),
    Implies(Box<FluentFormula>, Box<FluentFormula>),
}

impl FluentFormula {
    pub fn atom(name: &str) -> Self {
        Self::Atom(Fluent::new(name))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Self) -> Self {
        Self::Not(Box::new(f))
    }

    pub fn and(a: Self, b: Self) -> Self {
        Self::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Self, b: Self) -> Self {
        Self::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Self, b: Self) -> Self {
        Self::Implies(Box::new(a), Box::new(b))
    }

    /// Evaluates the formula, asking `holds` for the truth of each atom.
    pub fn eval_with(&self, holds: &impl Fn(&Fluent) -> bool) -> bool {
        match self {
            Self::Top => true,
            Self::Bot => false,
            Self::Atom(f) => holds(f),
            Self::Not(a) => !a.eval_with(holds),
            Self::And(a, b) => a.eval_with(holds) && b.eval_with(holds),
            Self::Or(a, b) => a.eval_with(holds) || b.eval_with(holds),
            Self::Implies(a, b) => !a.eval_with(holds) || b.eval_with(holds),
        }
    }

    /// Calls `visit` on every atom in the tree.
    pub fn for_each_fluent<'a>(&'a self, visit: &mut impl FnMut(&'a Fluent)) {
        match self {
            Self::Top | Self::Bot => {}
            Self::Atom(f) => visit(f),
            Self::Not(a) => a.for_each_fluent(visit),
            Self::And(a, b) | Self::Or(a, b) | Self::Implies(a, b) => {
                a.for_each_fluent(visit);
                b.for_each_fluent(visit);
            }
        }
    }

    fn nnf(&self) -> Self {
        match self {
            Self::Top | Self::Bot | Self::Atom(_) => self.clone(),
            Self::Not(a) => a.nnf_neg(),
            Self::And(a, b) => Self::and(a.nnf(), b.nnf()),
            Self::Or(a, b) => Self::or(a.nnf(), b.nnf()),
            Self::Implies(a, b) => Self::or(a.nnf_neg(), b.nnf()),
        }
    }

    fn nnf_neg(&self) -> Self {
        match self {
            Self::Top => Self::Bot,
            Self::Bot => Self::Top,
            Self::Atom(_) => Self::not(self.clone()),
            Self::Not(a) => a.nnf(),
            Self::And(a, b) => Self::or(a.nnf_neg(), b.nnf_neg()),
            Self::Or(a, b) => Self::and(a.nnf_neg(), b.nnf_neg()),
            Self::Implies(a, b) => Self::and(a.nnf(), b.nnf_neg()),
        }
    }
}

/// Propositional evaluation against an explicit set of true fluents.
pub fn eval_fluent(interpretation: &BTreeSet<Fluent>, formula: &FluentFormula) -> bool {
    formula.eval_with(&|f| interpretation.contains(f))
}

/// Belief formula: fluent formulas closed under `B`, `E`, `C` and the
/// propositional connectives.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BeliefFormula {
    Prop(FluentFormula),
    B(Agent, Box<BeliefFormula>),
    E(BTreeSet<Agent>, Box<BeliefFormula>),
    C(BTreeSet<Agent>, Box<BeliefFormula>),
    Not(Box<BeliefFormula>),
    And(Box<BeliefFormula>, Box<BeliefFormula>),
    Or(Box<BeliefFormula>, Box<BeliefFormula>),
    Implies(Box<BeliefFormula>, Box<BeliefFormula>),
}

impl From<FluentFormula> for BeliefFormula {
    fn from(f: FluentFormula) -> Self {
        Self::Prop(f)
    }
}

impl BeliefFormula {
    pub fn top() -> Self {
        Self::Prop(FluentFormula::Top)
    }

    pub fn bot() -> Self {
        Self::Prop(FluentFormula::Bot)
    }

    pub fn atom(name: &str) -> Self {
        Self::Prop(FluentFormula::atom(name))
    }

    pub fn believes(agent: Agent, f: Self) -> Self {
        Self::B(agent, Box::new(f))
    }

    pub fn everyone(group: BTreeSet<Agent>, f: Self) -> Self {
        Self::E(group, Box::new(f))
    }

    pub fn common(group: BTreeSet<Agent>, f: Self) -> Self {
        Self::C(group, Box::new(f))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Self) -> Self {
        match f {
            Self::Prop(p) => Self::Prop(FluentFormula::not(p)),
            f => Self::Not(Box::new(f)),
        }
    }

    pub fn and(a: Self, b: Self) -> Self {
        match (a, b) {
            (Self::Prop(a), Self::Prop(b)) => Self::Prop(FluentFormula::and(a, b)),
            (a, b) => Self::And(Box::new(a), Box::new(b)),
        }
    }

    pub fn or(a: Self, b: Self) -> Self {
        match (a, b) {
            (Self::Prop(a), Self::Prop(b)) => Self::Prop(FluentFormula::or(a, b)),
            (a, b) => Self::Or(Box::new(a), Box::new(b)),
        }
    }

    pub fn implies(a: Self, b: Self) -> Self {
        match (a, b) {
            (Self::Prop(a), Self::Prop(b)) => Self::Prop(FluentFormula::implies(a, b)),
            (a, b) => Self::Implies(Box::new(a), Box::new(b)),
        }
    }

    /// Conjunction of all items; `true` when empty.
    pub fn conjunction(items: impl IntoIterator<Item = Self>) -> Self {
        items
            .into_iter()
            .reduce(Self::and)
            .unwrap_or_else(Self::top)
    }

    /// The propositional content, if the formula has no modal operator.
    pub fn as_fluent_formula(&self) -> Option<&FluentFormula> {
        match self {
            Self::Prop(p) => Some(p),
            _ => None,
        }
    }

    /// True when every propositional subtree sits in a single `Prop` node,
    /// i.e. the shape the smart constructors and the parser produce.
    pub fn is_normalized(&self) -> bool {
        match self {
            Self::Prop(_) => true,
            Self::B(_, a) | Self::E(_, a) | Self::C(_, a) => a.is_normalized(),
            Self::Not(a) => !matches!(**a, Self::Prop(_)) && a.is_normalized(),
            Self::And(a, b) | Self::Or(a, b) | Self::Implies(a, b) => {
                !(matches!(**a, Self::Prop(_)) && matches!(**b, Self::Prop(_)))
                    && a.is_normalized()
                    && b.is_normalized()
            }
        }
    }

    /// Nesting depth of modal operators.
    pub fn modal_depth(&self) -> usize {
        match self {
            Self::Prop(_) => 0,
            Self::B(_, a) | Self::E(_, a) | Self::C(_, a) => 1 + a.modal_depth(),
            Self::Not(a) => a.modal_depth(),
            Self::And(a, b) | Self::Or(a, b) | Self::Implies(a, b) => {
                a.modal_depth().max(b.modal_depth())
            }
        }
    }

    /// True if the formula contains no `C` operator.
    pub fn is_c_free(&self) -> bool {
        match self {
            Self::Prop(_) => true,
            Self::C(..) => false,
            Self::B(_, a) | Self::E(_, a) | Self::Not(a) => a.is_c_free(),
            Self::And(a, b) | Self::Or(a, b) | Self::Implies(a, b) => {
                a.is_c_free() && b.is_c_free()
            }
        }
    }

    /// Checks every referenced agent and fluent against `sig` and rejects
    /// empty groups.
    pub fn check(&self, sig: &Signature) -> Result<(), SymbolError> {
        match self {
            Self::Prop(p) => {
                let mut missing = None;
                p.for_each_fluent(&mut |f| {
                    if missing.is_none() && sig.fluent_index(f).is_none() {
                        missing = Some(f.clone());
                    }
                });
                match missing {
                    Some(f) => Err(SymbolError::UndeclaredFluent(f)),
                    None => Ok(()),
                }
            }
            Self::B(ag, a) => {
                if sig.agent_index(ag).is_none() {
                    return Err(SymbolError::UndeclaredAgent(ag.clone()));
                }
                a.check(sig)
            }
            Self::E(group, a) | Self::C(group, a) => {
                if group.is_empty() {
                    return Err(SymbolError::EmptyGroup);
                }
                if let Some(ag) = group.iter().find(|ag| sig.agent_index(ag).is_none()) {
                    return Err(SymbolError::UndeclaredAgent(ag.clone()));
                }
                a.check(sig)
            }
            Self::Not(a) => a.check(sig),
            Self::And(a, b) | Self::Or(a, b) | Self::Implies(a, b) => {
                a.check(sig)?;
                b.check(sig)
            }
        }
    }
}

/// A formula referenced a name missing from the signature.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SymbolError {
    #[error("undeclared agent `{0}`")]
    UndeclaredAgent(Agent),
    #[error("undeclared fluent `{0}`")]
    UndeclaredFluent(Fluent),
    #[error("empty agent group")]
    EmptyGroup,
}

/// Negation normal form: implications removed, negations pushed onto atoms
/// or directly in front of `B`/`E`/`C`.
pub fn to_nnf(formula: &BeliefFormula) -> BeliefFormula {
    use BeliefFormula as F;
    match formula {
        F::Prop(p) => F::Prop(p.nnf()),
        F::B(ag, a) => F::believes(ag.clone(), to_nnf(a)),
        F::E(g, a) => F::everyone(g.clone(), to_nnf(a)),
        F::C(g, a) => F::common(g.clone(), to_nnf(a)),
        F::Not(a) => nnf_neg(a),
        F::And(a, b) => F::and(to_nnf(a), to_nnf(b)),
        F::Or(a, b) => F::or(to_nnf(a), to_nnf(b)),
        F::Implies(a, b) => F::or(nnf_neg(a), to_nnf(b)),
    }
}

fn nnf_neg(formula: &BeliefFormula) -> BeliefFormula {
    use BeliefFormula as F;
    match formula {
        F::Prop(p) => F::Prop(p.nnf_neg()),
        F::B(..) | F::E(..) | F::C(..) => F::Not(Box::new(to_nnf(formula))),
        F::Not(a) => to_nnf(a),
        F::And(a, b) => F::or(nnf_neg(a), nnf_neg(b)),
        F::Or(a, b) => F::and(nnf_neg(a), nnf_neg(b)),
        F::Implies(a, b) => F::and(to_nnf(a), nnf_neg(b)),
    }
}

/// Flattens nested conjunctions (modal and propositional) into a list.
pub fn conjuncts(formula: &BeliefFormula) -> Vec<BeliefFormula> {
    fn fluent(p: &FluentFormula, out: &mut Vec<BeliefFormula>) {
        match p {
            FluentFormula::And(a, b) => {
                fluent(a, out);
                fluent(b, out);
            }
            p => out.push(BeliefFormula::Prop(p.clone())),
        }
    }
    fn belief(f: &BeliefFormula, out: &mut Vec<BeliefFormula>) {
        match f {
            BeliefFormula::And(a, b) => {
                belief(a, out);
                belief(b, out);
            }
            BeliefFormula::Prop(p) => fluent(p, out),
            f => out.push(f.clone()),
        }
    }
    let mut out = Vec::new();
    belief(formula, &mut out);
    out
}

// Serialization is fully parenthesized: every binary connective gets its own
// parentheses, everything else is self-delimiting.

impl fmt::Display for FluentFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Top => f.write_str("true"),
            Self::Bot => f.write_str("false"),
            Self::Atom(a) => write!(f, "{a}"),
            Self::Not(a) => write!(f, "!{a}"),
            Self::And(a, b) => write!(f, "({a} & {b})"),
            Self::Or(a, b) => write!(f, "({a} | {b})"),
            Self::Implies(a, b) => write!(f, "({a} -> {b})"),
        }
    }
}

fn write_group(f: &mut fmt::Formatter<'_>, group: &BTreeSet<Agent>) -> fmt::Result {
    f.write_str("{")?;
    for (i, ag) in group.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{ag}")?;
    }
    f.write_str("}")
}

impl fmt::Display for BeliefFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Prop(p) => write!(f, "{p}"),
            Self::B(ag, a) => write!(f, "B({ag}, {a})"),
            Self::E(g, a) => {
                f.write_str("E(")?;
                write_group(f, g)?;
                write!(f, ", {a})")
            }
            Self::C(g, a) => {
                f.write_str("C(")?;
                write_group(f, g)?;
                write!(f, ", {a})")
            }
            Self::Not(a) => write!(f, "!{a}"),
            Self::And(a, b) => write!(f, "({a} & {b})"),
            Self::Or(a, b) => write!(f, "({a} | {b})"),
            Self::Implies(a, b) => write!(f, "({a} -> {b})"),
        }
    }
}
