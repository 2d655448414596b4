mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use epiplan::actions::{Action, ActionKind, Effect, ObserverClass};
use epiplan::dsl::{build_initial, parse_domain, Domain, DslError, InitialSpec};
use epiplan::kripke::{check_frame, entails};
use epiplan::logic::{
    parse_formula, Agent, BeliefFormula as F, Fluent, FluentFormula as P, Literal, Signature,
};

fn atom(name: &str) -> P {
    P::atom(name)
}

fn coin_by_hand() -> Domain {
    let sig = Arc::new(Signature::from_names(
        &["a", "b", "c"],
        &["heads", "opened", "looking_a", "looking_b", "looking_c"],
    ));
    let ag = Agent::new;
    let looking = |x: &str| F::Prop(atom(&format!("looking_{x}")));
    let open = Action::new(
        "open",
        ActionKind::Ontic {
            effects: vec![Effect {
                literal: Literal::pos(Fluent::new("opened")),
                condition: F::top(),
            }],
        },
    )
    .with_executability(F::Prop(P::not(atom("opened"))))
    .observed_by(ag("a"), ObserverClass::Full, looking("a"))
    .observed_by(ag("b"), ObserverClass::Full, looking("b"))
    .observed_by(ag("c"), ObserverClass::Full, looking("c"));
    let peek = Action::new(
        "peek",
        ActionKind::Sensing {
            sensed: Fluent::new("heads"),
        },
    )
    .with_executability(F::Prop(P::and(atom("opened"), atom("looking_a"))))
    .observed_by(ag("a"), ObserverClass::Full, F::top())
    .observed_by(ag("b"), ObserverClass::Partial, looking("b"))
    .observed_by(ag("c"), ObserverClass::Partial, looking("c"));
    let announce = Action::new(
        "announce_heads",
        ActionKind::Announcement {
            announced: atom("heads"),
        },
    )
    .with_executability(F::believes(ag("a"), F::atom("heads")))
    .observed_by(ag("a"), ObserverClass::Full, F::top())
    .observed_by(ag("b"), ObserverClass::Full, looking("b"))
    .observed_by(ag("c"), ObserverClass::Full, looking("c"));
    let signal = |x: &str| {
        Action::new(
            format!("signal_{x}"),
            ActionKind::Ontic {
                effects: vec![Effect {
                    literal: Literal::pos(Fluent::new(format!("looking_{x}"))),
                    condition: F::top(),
                }],
            },
        )
        .with_executability(F::Prop(P::not(atom(&format!("looking_{x}")))))
        .observed_by(ag("a"), ObserverClass::Full, F::top())
        .observed_by(Agent::new(x), ObserverClass::Full, F::top())
    };
    let initial = InitialSpec {
        real_world: BTreeSet::from([Fluent::new("heads"), Fluent::new("looking_a")]),
        common_constraints: vec![
            P::not(atom("opened")),
            P::and(
                P::and(atom("looking_a"), P::not(atom("looking_b"))),
                P::not(atom("looking_c")),
            ),
        ],
        known_by: BTreeMap::new(),
    };
    let goal = F::and(
        F::and(
            F::believes(ag("a"), F::atom("heads")),
            F::not(F::believes(ag("b"), F::atom("heads"))),
        ),
        F::not(F::believes(ag("c"), F::atom("heads"))),
    );
    Domain::new(
        sig,
        vec![open, peek, announce, signal("b"), signal("c")],
        initial,
        Some(goal),
    )
}

#[test]
fn coin_file_matches_hand_built_domain() {
    let text =
        std::fs::read_to_string(common::benchmarks_dir().join("coin_in_the_box.epddl")).unwrap();
    assert_eq!(parse_domain(&text).unwrap(), coin_by_hand());
}

#[test]
fn coin_initial_state() {
    let d = coin_by_hand();
    let s = build_initial(&d.initial, &d).unwrap();
    let q = |t: &str| entails(&s, &parse_formula(t, s.signature()).unwrap()).unwrap();
    assert_eq!(s.world_count(), 2);
    assert!(q("heads & !B(a, heads) & !B(a, !heads)"));
    assert!(q("C({a,b,c}, !opened & looking_a & !looking_b)"));
    assert!(check_frame(s.structure()).is_s5);
}

fn err(text: &str) -> DslError {
    parse_domain(text).unwrap_err()
}

#[test]
fn error_positions() {
    let e = err("agent a;\nfluent f;\naction x { causes: g; }");
    assert_eq!((e.pos().line, e.pos().col), (3, 20));
    let e = err("agent a;\nfluent f;\ngoal: B(z, f);");
    assert_eq!(e.pos().line, 3);
    assert!(e.to_string().contains("`z`"), "{e}");
    let e = err("agent a; fluent f; action x { determines: f; observes a }");
    assert!(matches!(e, DslError::Syntax { .. }), "{e}");
    let e = err("agent a; fluent f; fluent f;");
    assert!(matches!(e, DslError::Semantic { .. }), "{e}");
}

#[test]
fn knowledge_is_exclusive_per_agent() {
    let d = parse_domain(
        "agent a, b; fluent f, g;
         initially world: f;
         initially knows(a): f;
         initially knows(b): g;",
    )
    .unwrap();
    let s = build_initial(&d.initial, &d).unwrap();
    let q = |t: &str| entails(&s, &parse_formula(t, s.signature()).unwrap()).unwrap();
    assert!(q("B(a, f) & !B(a, g) & !B(a, !g)"));
    assert!(q("B(b, !g) & !B(b, f) & !B(b, !f)"));
    assert!(q("C({a,b}, (B(a, f) | B(a, !f)) & (B(b, g) | B(b, !g)))"));
    assert_eq!(s.world_count(), 4);
}

#[test]
fn names_may_be_used_before_declaration() {
    let d = parse_domain("goal: B(a, f); agent a; fluent f;").unwrap();
    assert_eq!(d.goal, Some(F::believes(Agent::new("a"), F::atom("f"))));
}
