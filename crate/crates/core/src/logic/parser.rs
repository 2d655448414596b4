//! Recursive-descent parser for belief formulas.
//!
//! Precedence from tightest to loosest: `!`, `&`, `|`, `->`. `&` and `|`
//! associate to the left, `->` to the right.

use std::collections::BTreeSet;

use super::lexer::{tokenize, Pos, Tok, Token};
use super::{Agent, BeliefFormula, Fluent, FluentFormula, Signature};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("{pos}: syntax error: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("{pos}: undeclared {kind} `{name}`")]
    Undeclared {
        pos: Pos,
        kind: &'static str,
        name: String,
    },
    #[error("{pos}: empty agent set")]
    EmptyAgentSet { pos: Pos },
    #[error("{pos}: expected a fluent formula (no modal operators)")]
    NotPropositional { pos: Pos },
}

impl ParseError {
    pub fn pos(&self) -> Pos {
        match self {
            Self::Syntax { pos, .. }
            | Self::Undeclared { pos, .. }
            | Self::EmptyAgentSet { pos }
            | Self::NotPropositional { pos } => *pos,
        }
    }

    pub(crate) fn syntax(pos: Pos, message: impl Into<String>) -> Self {
        Self::Syntax {
            pos,
            message: message.into(),
        }
    }
}

/// Parses a belief formula, resolving names against `sig`.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<BeliefFormula, ParseError> {
    let tokens = tokenize(text)
        .map_err(|(pos, c)| ParseError::syntax(pos, format!("unexpected character `{c}`")))?;
    let mut parser = FormulaParser::new(&tokens, sig);
    let formula = parser.formula()?;
    parser.expect_eof()?;
    Ok(formula)
}

/// Parses a formula that must not contain modal operators.
pub fn parse_fluent_formula(text: &str, sig: &Signature) -> Result<FluentFormula, ParseError> {
    match parse_formula(text, sig)? {
        BeliefFormula::Prop(p) => Ok(p),
        _ => Err(ParseError::NotPropositional {
            pos: Pos { line: 1, col: 1 },
        }),
    }
}

/// Cursor over a token slice; shared with the domain-file parser, which
/// hands formula positions to it and resumes after the formula ends.
pub struct FormulaParser<'a> {
    tokens: &'a [Token],
    at: usize,
    sig: &'a Signature,
}

impl<'a> FormulaParser<'a> {
    pub fn new(tokens: &'a [Token], sig: &'a Signature) -> Self {
        Self { tokens, at: 0, sig }
    }

    pub fn at(&self) -> usize {
        self.at
    }

    pub fn seek(&mut self, at: usize) {
        self.at = at;
    }

    pub fn peek(&self) -> &'a Token {
        &self.tokens[self.at.min(self.tokens.len() - 1)]
    }

    pub fn peek_nth(&self, n: usize) -> &'a Token {
        &self.tokens[(self.at + n).min(self.tokens.len() - 1)]
    }

    pub fn advance(&mut self) -> &'a Token {
        let t = self.peek();
        if self.at < self.tokens.len() - 1 {
            self.at += 1;
        }
        t
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if &self.peek().tok == tok {
            self.advance();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: &Tok) -> Result<Pos, ParseError> {
        let t = self.peek();
        if &t.tok == tok {
            self.advance();
            Ok(t.pos)
        } else {
            Err(ParseError::syntax(
                t.pos,
                format!("expected {tok}, found {}", t.tok),
            ))
        }
    }

    pub fn expect_ident(&mut self) -> Result<(&'a str, Pos), ParseError> {
        let t = self.peek();
        match &t.tok {
            Tok::Ident(name) => {
                self.advance();
                Ok((name.as_str(), t.pos))
            }
            other => Err(ParseError::syntax(
                t.pos,
                format!("expected identifier, found {other}"),
            )),
        }
    }

    pub fn expect_eof(&mut self) -> Result<(), ParseError> {
        self.expect(&Tok::Eof).map(|_| ())
    }

    pub fn agent(&mut self) -> Result<Agent, ParseError> {
        let (name, pos) = self.expect_ident()?;
        self.sig
            .agent_named(name)
            .cloned()
            .ok_or_else(|| ParseError::Undeclared {
                pos,
                kind: "agent",
                name: name.to_string(),
            })
    }

    pub fn fluent(&mut self) -> Result<Fluent, ParseError> {
        let (name, pos) = self.expect_ident()?;
        self.sig
            .fluent_named(name)
            .cloned()
            .ok_or_else(|| ParseError::Undeclared {
                pos,
                kind: "fluent",
                name: name.to_string(),
            })
    }

    /// Parses a full formula (lowest precedence level).
    pub fn formula(&mut self) -> Result<BeliefFormula, ParseError> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.formula()?;
            Ok(BeliefFormula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    /// Parses a formula and insists it is propositional.
    pub fn fluent_formula(&mut self) -> Result<FluentFormula, ParseError> {
        let pos = self.peek().pos;
        match self.formula()? {
            BeliefFormula::Prop(p) => Ok(p),
            _ => Err(ParseError::NotPropositional { pos }),
        }
    }

    fn disjunction(&mut self) -> Result<BeliefFormula, ParseError> {
        let mut lhs = self.conjunction()?;
        while self.eat(&Tok::Pipe) {
            let rhs = self.conjunction()?;
            lhs = BeliefFormula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<BeliefFormula, ParseError> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::Amp) {
            let rhs = self.unary()?;
            lhs = BeliefFormula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<BeliefFormula, ParseError> {
        if self.eat(&Tok::Bang) {
            Ok(BeliefFormula::not(self.unary()?))
        } else {
            self.primary()
        }
    }

    fn primary(&mut self) -> Result<BeliefFormula, ParseError> {
        let t = self.peek();
        match &t.tok {
            Tok::LParen => {
                self.advance();
                let inner = self.formula()?;
                self.expect(&Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(name) => match name.as_str() {
                "true" => {
                    self.advance();
                    Ok(BeliefFormula::top())
                }
                "false" => {
                    self.advance();
                    Ok(BeliefFormula::bot())
                }
                "B" | "E" | "C" if self.peek_nth(1).tok == Tok::LParen => {
                    self.advance();
                    self.advance();
                    let formula = if name == "B" {
                        let agent = self.agent()?;
                        self.expect(&Tok::Comma)?;
                        BeliefFormula::believes(agent, self.formula()?)
                    } else {
                        let group = self.group()?;
                        self.expect(&Tok::Comma)?;
                        let inner = self.formula()?;
                        if name == "E" {
                            BeliefFormula::everyone(group, inner)
                        } else {
                            BeliefFormula::common(group, inner)
                        }
                    };
                    self.expect(&Tok::RParen)?;
                    Ok(formula)
                }
                _ => Ok(BeliefFormula::Prop(FluentFormula::Atom(self.fluent()?))),
            },
            other => Err(ParseError::syntax(
                t.pos,
                format!("expected formula, found {other}"),
            )),
        }
    }

    fn group(&mut self) -> Result<BTreeSet<Agent>, ParseError> {
        let open = self.expect(&Tok::LBrace)?;
        let mut group = BTreeSet::new();
        if self.eat(&Tok::RBrace) {
            return Err(ParseError::EmptyAgentSet { pos: open });
        }
        loop {
            group.insert(self.agent()?);
            if self.eat(&Tok::RBrace) {
                break;
            }
            self.expect(&Tok::Comma)?;
        }
        Ok(group)
    }
}
