use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::{Domain, DslError, InitialSpec};
use crate::actions::{Action, ActionKind, Effect, ObserverClass};
use crate::logic::{
    is_identifier, tokenize, Agent, BeliefFormula, Fluent, FormulaParser, Literal, ParseError, Pos,
    Signature, Tok, Token,
};

impl From<ParseError> for DslError {
    fn from(e: ParseError) -> Self {
        match e {
            ParseError::Syntax { pos, message } => DslError::Syntax { pos, message },
            other => DslError::Semantic {
                pos: other.pos(),
                message: match other {
                    ParseError::Undeclared { kind, name, .. } => {
                        format!("undeclared {kind} `{name}`")
                    }
                    ParseError::EmptyAgentSet { .. } => "empty agent set".into(),
                    ParseError::NotPropositional { .. } => {
                        "expected a fluent formula (no modal operators)".into()
                    }
                    ParseError::Syntax { .. } => unreachable!(),
                },
            },
        }
    }
}

fn semantic(pos: Pos, message: impl Into<String>) -> DslError {
    DslError::Semantic {
        pos,
        message: message.into(),
    }
}

fn syntax(pos: Pos, message: impl Into<String>) -> DslError {
    DslError::Syntax {
        pos,
        message: message.into(),
    }
}

/// Parses a domain description.
pub fn parse_domain(text: &str) -> Result<Domain, DslError> {
    let tokens =
        tokenize(text).map_err(|(pos, c)| syntax(pos, format!("unexpected character `{c}`")))?;
    let signature = Arc::new(declarations(&tokens)?);
    let mut parser = DomainParser {
        p: FormulaParser::new(&tokens, &signature),
        sig: &signature,
        actions: Vec::new(),
        initial: InitialSpec::default(),
        negated: BTreeSet::new(),
        goal: None,
    };
    parser.file()?;
    let DomainParser {
        actions,
        initial,
        goal,
        ..
    } = parser;
    Ok(Domain::new(signature.clone(), actions, initial, goal))
}

/// First pass: collect `agent` and `fluent` declarations so that formulas may
/// mention names declared further down the file.
fn declarations(tokens: &[Token]) -> Result<Signature, DslError> {
    let mut agents: BTreeMap<String, Pos> = BTreeMap::new();
    let mut fluents: BTreeMap<String, Pos> = BTreeMap::new();
    let mut depth = 0usize;
    let mut statement_start = true;
    let mut i = 0;
    while i < tokens.len() {
        let t = &tokens[i];
        match &t.tok {
            Tok::Ident(kw)
                if statement_start && depth == 0 && (kw == "agent" || kw == "fluent") =>
            {
                let table = if kw == "agent" {
                    &mut agents
                } else {
                    &mut fluents
                };
                i += 1;
                loop {
                    let t = &tokens[i];
                    let Tok::Ident(name) = &t.tok else {
                        return Err(syntax(
                            t.pos,
                            format!("expected identifier, found {}", t.tok),
                        ));
                    };
                    if !is_identifier(name) {
                        return Err(semantic(
                            t.pos,
                            format!("invalid name `{name}` (must match [a-z][A-Za-z0-9_]*)"),
                        ));
                    }
                    if table.insert(name.clone(), t.pos).is_some() {
                        return Err(semantic(t.pos, format!("duplicate {kw} `{name}`")));
                    }
                    i += 1;
                    match &tokens[i].tok {
                        Tok::Comma => i += 1,
                        Tok::Semi => break,
                        other => {
                            return Err(syntax(
                                tokens[i].pos,
                                format!("expected `,` or `;`, found {other}"),
                            ))
                        }
                    }
                }
                statement_start = true;
            }
            Tok::LBrace => {
                depth += 1;
                statement_start = false;
            }
            Tok::RBrace => {
                depth = depth.saturating_sub(1);
                statement_start = depth == 0;
            }
            Tok::Semi => statement_start = depth == 0,
            _ => statement_start = false,
        }
        i += 1;
    }
    for (name, pos) in &agents {
        if fluents.contains_key(name) {
            return Err(semantic(
                *pos,
                format!("`{name}` declared both as agent and fluent"),
            ));
        }
    }
    Signature::new(
        agents.into_keys().map(Agent::new),
        fluents.into_keys().map(Fluent::new),
    )
    .map_err(|e| semantic(Pos { line: 1, col: 1 }, e.to_string()))
}

struct DomainParser<'a> {
    p: FormulaParser<'a>,
    sig: &'a Signature,
    actions: Vec<Action>,
    initial: InitialSpec,
    negated: BTreeSet<Fluent>,
    goal: Option<BeliefFormula>,
}

impl DomainParser<'_> {
    fn file(&mut self) -> Result<(), DslError> {
        loop {
            let t = self.p.peek();
            match &t.tok {
                Tok::Eof => return Ok(()),
                Tok::Ident(kw) => match kw.as_str() {
                    "agent" | "fluent" => self.skip_declaration()?,
                    "action" => self.action()?,
                    "initially" => self.initially()?,
                    "goal" => {
                        self.p.advance();
                        self.p.expect(&Tok::Colon)?;
                        let goal = self.p.formula()?;
                        self.p.expect(&Tok::Semi)?;
                        if self.goal.replace(goal).is_some() {
                            return Err(semantic(t.pos, "duplicate goal"));
                        }
                    }
                    other => {
                        return Err(syntax(
                            t.pos,
                            format!("expected a declaration, found `{other}`"),
                        ))
                    }
                },
                other => {
                    return Err(syntax(
                        t.pos,
                        format!("expected a declaration, found {other}"),
                    ))
                }
            }
        }
    }

    fn skip_declaration(&mut self) -> Result<(), DslError> {
        loop {
            match self.p.advance().tok {
                Tok::Semi => return Ok(()),
                Tok::Eof => return Err(syntax(self.p.peek().pos, "expected `;`")),
                _ => {}
            }
        }
    }

    fn keyword(&mut self, expected: &str) -> Result<Pos, DslError> {
        let (name, pos) = self.p.expect_ident()?;
        if name == expected {
            Ok(pos)
        } else {
            Err(syntax(
                pos,
                format!("expected `{expected}`, found `{name}`"),
            ))
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if matches!(&self.p.peek().tok, Tok::Ident(name) if name == kw) {
            self.p.advance();
            true
        } else {
            false
        }
    }

    fn optional_condition(&mut self) -> Result<BeliefFormula, DslError> {
        if self.eat_keyword("if") {
            Ok(self.p.formula()?)
        } else {
            Ok(BeliefFormula::top())
        }
    }

    fn literal(&mut self) -> Result<Literal, DslError> {
        let positive = !self.p.eat(&Tok::Minus);
        let fluent = self.p.fluent()?;
        Ok(Literal { fluent, positive })
    }

    fn action(&mut self) -> Result<(), DslError> {
        let start = self.keyword("action")?;
        let (name, name_pos) = self.p.expect_ident()?;
        if self.actions.iter().any(|a| a.name == name) {
            return Err(semantic(name_pos, format!("duplicate action `{name}`")));
        }
        self.p.expect(&Tok::LBrace)?;

        let mut executability: Option<BeliefFormula> = None;
        let mut effects: Vec<Effect> = Vec::new();
        let mut kind: Option<(ActionKind, Pos)> = None;
        let mut observability: BTreeMap<Agent, Vec<(ObserverClass, BeliefFormula)>> =
            BTreeMap::new();

        while !self.p.eat(&Tok::RBrace) {
            let (item, pos) = self.p.expect_ident()?;
            match item {
                "executable" => {
                    self.p.expect(&Tok::Colon)?;
                    if executability.replace(self.p.formula()?).is_some() {
                        return Err(semantic(pos, "duplicate `executable`"));
                    }
                }
                "causes" => {
                    self.p.expect(&Tok::Colon)?;
                    if kind.is_some() {
                        return Err(semantic(
                            pos,
                            "`causes` cannot be combined with sensing or announcing",
                        ));
                    }
                    let literal = self.literal()?;
                    let condition = self.optional_condition()?;
                    effects.push(Effect { literal, condition });
                }
                "determines" | "announces" => {
                    self.p.expect(&Tok::Colon)?;
                    if kind.is_some() || !effects.is_empty() {
                        return Err(semantic(
                            pos,
                            format!("action `{name}` already has an effect"),
                        ));
                    }
                    let k = if item == "determines" {
                        ActionKind::Sensing {
                            sensed: self.p.fluent()?,
                        }
                    } else {
                        ActionKind::Announcement {
                            announced: self.p.fluent_formula()?,
                        }
                    };
                    kind = Some((k, pos));
                }
                "observes" | "aware" => {
                    let agent = self.p.agent()?;
                    let condition = self.optional_condition()?;
                    let class = if item == "observes" {
                        ObserverClass::Full
                    } else {
                        ObserverClass::Partial
                    };
                    observability
                        .entry(agent)
                        .or_default()
                        .push((class, condition));
                }
                other => {
                    return Err(syntax(pos, format!("unknown action item `{other}`")));
                }
            }
            self.p.expect(&Tok::Semi)?;
        }
        self.p.eat(&Tok::Semi);

        let action = Action {
            name: name.to_string(),
            kind: kind
                .map(|(k, _)| k)
                .unwrap_or(ActionKind::Ontic { effects }),
            executability: executability.unwrap_or_else(BeliefFormula::top),
            observability,
        };
        action
            .validate(self.sig)
            .map_err(|e| semantic(start, e.to_string()))?;
        self.actions.push(action);
        Ok(())
    }

    fn initially(&mut self) -> Result<(), DslError> {
        self.keyword("initially")?;
        let (what, pos) = self.p.expect_ident()?;
        match what {
            "world" => {
                self.p.expect(&Tok::Colon)?;
                loop {
                    let lit_pos = self.p.peek().pos;
                    let lit = self.literal()?;
                    let clash = if lit.positive {
                        self.negated.contains(&lit.fluent)
                    } else {
                        self.initial.real_world.contains(&lit.fluent)
                    };
                    if clash {
                        return Err(semantic(
                            lit_pos,
                            format!("fluent `{}` assigned both true and false", lit.fluent),
                        ));
                    }
                    if lit.positive {
                        self.initial.real_world.insert(lit.fluent);
                    } else {
                        self.negated.insert(lit.fluent);
                    }
                    if !self.p.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            "known" => {
                self.p.expect(&Tok::Colon)?;
                let constraint = self.p.fluent_formula()?;
                self.initial.common_constraints.push(constraint);
            }
            "knows" => {
                self.p.expect(&Tok::LParen)?;
                let agent = self.p.agent()?;
                self.p.expect(&Tok::RParen)?;
                self.p.expect(&Tok::Colon)?;
                loop {
                    let fluent = self.p.fluent()?;
                    self.initial
                        .known_by
                        .entry(agent.clone())
                        .or_default()
                        .insert(fluent);
                    if !self.p.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            other => {
                return Err(syntax(
                    pos,
                    format!("expected `world`, `known` or `knows`, found `{other}`"),
                ))
            }
        }
        self.p.expect(&Tok::Semi)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{parse_formula, FluentFormula};

    #[test]
    fn minimal_domain() {
        let d = parse_domain("agent a;\nfluent f;\ngoal: true;\n").unwrap();
        assert_eq!(d.agents(), &[Agent::new("a")]);
        assert_eq!(d.fluents(), &[Fluent::new("f")]);
        assert!(d.actions.is_empty());
        assert_eq!(d.goal, Some(BeliefFormula::top()));
    }

    #[test]
    fn undeclared_known_fluent_names_line() {
        let err = parse_domain("agent a;\nfluent f;\ninitially knows(a): h;\n").unwrap_err();
        assert_eq!(
            err,
            DslError::Semantic {
                pos: Pos { line: 3, col: 21 },
                message: "undeclared fluent `h`".into()
            }
        );
        assert!(err.to_string().starts_with("3:21"));
    }

    #[test]
    fn declarations_may_follow_use() {
        let d = parse_domain("goal: B(a, f);\nagent a;\nfluent f;").unwrap();
        assert!(d.goal.is_some());
    }

    #[test]
    fn action_items() {
        let text = "
            agent a, b;
            fluent f, g;
            action act {
                executable: B(a, g);
                causes: f if g;
                causes: -g;
                observes a;
                observes b if g;
            }
            action look { determines: f; observes a; aware b if f | g; }
            action say { announces: f & g; observes a; }
        ";
        let d = parse_domain(text).unwrap();
        let sig = d.signature().clone();
        assert_eq!(d.actions.len(), 3);
        let act = d.action("act").unwrap();
        assert_eq!(act.executability, parse_formula("B(a, g)", &sig).unwrap());
        let ActionKind::Ontic { effects } = &act.kind else {
            panic!()
        };
        assert_eq!(effects.len(), 2);
        assert_eq!(effects[0].condition, BeliefFormula::atom("g"));
        assert_eq!(effects[1].literal, Literal::neg(Fluent::new("g")));
        assert_eq!(
            act.observability[&Agent::new("a")],
            vec![(ObserverClass::Full, BeliefFormula::top())]
        );
        let look = d.action("look").unwrap();
        assert_eq!(
            look.kind,
            ActionKind::Sensing {
                sensed: Fluent::new("f")
            }
        );
        assert_eq!(
            look.observability[&Agent::new("b")][0].0,
            ObserverClass::Partial
        );
        assert_eq!(
            d.action("say").unwrap().kind,
            ActionKind::Announcement {
                announced: FluentFormula::and(FluentFormula::atom("f"), FluentFormula::atom("g"))
            }
        );
    }

    #[test]
    fn initial_statements() {
        let text = "agent a, b; fluent f, g, h;
            initially world: f, -g;
            initially known: f | g;
            initially knows(a): f, g;
            initially knows(b): h;";
        let d = parse_domain(text).unwrap();
        assert_eq!(d.initial.real_world, [Fluent::new("f")].into());
        assert_eq!(d.initial.common_constraints.len(), 1);
        assert_eq!(d.initial.known_by[&Agent::new("a")].len(), 2);
        assert!(d.goal.is_none());
    }

    #[test]
    fn rejections() {
        let cases = [
            (
                "agent a; fluent f; initially known: B(a, f);",
                "no modal operators",
            ),
            (
                "agent a; fluent f; action x { causes: f; aware a; }",
                "no partial observers",
            ),
            (
                "agent a; fluent f; action x { } action x { }",
                "duplicate action",
            ),
            ("agent a; agent a;", "duplicate agent"),
            ("agent a; fluent a;", "both as agent and fluent"),
            (
                "agent a; fluent f; initially world: f, -f;",
                "both true and false",
            ),
            (
                "agent a; fluent f; action x { determines: f; causes: f; }",
                "cannot be combined",
            ),
            ("agent a; fluent f; goal: true; goal: f;", "duplicate goal"),
            ("agent B;", "invalid name"),
        ];
        for (text, needle) in cases {
            let err = parse_domain(text).unwrap_err();
            assert!(err.to_string().contains(needle), "{text}: {err}");
        }
    }

    #[test]
    fn syntax_errors_have_positions() {
        let err = parse_domain("agent a;\nfluent f;\ngoal f;").unwrap_err();
        assert!(
            matches!(
                err,
                DslError::Syntax {
                    pos: Pos { line: 3, col: 6 },
                    ..
                }
            ),
            "{err}"
        );
        let err = parse_domain("agent a;\nbogus;").unwrap_err();
        assert_eq!(err.pos(), Pos { line: 2, col: 1 });
    }
}
