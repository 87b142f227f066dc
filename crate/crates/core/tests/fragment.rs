use std::collections::BTreeSet;

use effparse_core::eval::Evaluator;
use effparse_core::typecheck::check_term;
use effparse_core::*;

const LANG: &str = include_str!("../data/english.lang");
const MODEL: &str = include_str!("../data/english.model");
const SYNTAX: &str = include_str!("../data/english.syn");

fn setup() -> (Lexicon, Model, Syntax) {
    (Lexicon::parse(LANG).unwrap(), Model::parse(MODEL).unwrap(), Syntax::parse(SYNTAX).unwrap())
}

fn ty(s: &str) -> Ty {
    Ty::parse(s).unwrap()
}

fn observe(lex: &Lexicon, model: &Model, d: &Derivation) -> Value {
    let ev = Evaluator::new(&lex.registry, model);
    let t = derivation_term(&lex.registry, d).unwrap();
    let v = ev.eval(&t, &Default::default()).unwrap();
    ev.observe(d.ty(), v).unwrap()
}

fn first_of_type<'a>(ds: &'a [Derivation], t: &Ty) -> &'a Derivation {
    ds.iter().find(|d| d.ty() == t).unwrap_or_else(|| panic!("no derivation of type {t}"))
}

fn first_components(v: &Value) -> BTreeSet<Value> {
    v.as_set()
        .unwrap()
        .iter()
        .map(|p| match p {
            Value::PairV(a, _) => (**a).clone(),
            other => panic!("expected an outcome pair, got {other:?}"),
        })
        .collect()
}

#[test]
fn the_cat_sleeps_presupposes_a_unique_cat() {
    let (lex, model, syn) = setup();
    let ds = parse("the cat sleeps", &lex, Some(&syn), &ParseOptions::default()).unwrap();
    let d = first_of_type(&ds, &ty("(M t)"));
    assert_eq!(observe(&lex, &model, d), Value::some(Value::B(true)));

    let mut two_cats = model.clone();
    two_cats.add_entity("c2").unwrap();
    two_cats.add_fact("cat", &["c2"]).unwrap();
    assert_eq!(observe(&lex, &two_cats, d), Value::none());
}

#[test]
fn the_cat_eats_a_mouse_threads_state() {
    let (lex, model, syn) = setup();
    let ds = parse("the cat eats a mouse", &lex, Some(&syn), &ParseOptions::default()).unwrap();
    let d = first_of_type(&ds, &ty("(M (D t))"));
    let Value::MaybeV(Some(outcomes)) = observe(&lex, &model, d) else { panic!("presupposition failed") };
    let c1 = model.entity("c1").unwrap();
    let expected: BTreeSet<Value> =
        model.extension1("mouse").into_iter().map(|m| Value::B(model.holds("eats", &[m, c1]).unwrap())).collect();
    assert_eq!(first_components(&outcomes), expected);
}

#[test]
fn a_cat_in_a_box_is_a_stateful_entity() {
    let (lex, model, syn) = setup();
    let ds = parse("a cat in a box", &lex, None, &ParseOptions::default()).unwrap();
    // Not a sentence, so the grammar's start symbol rejects it.
    assert!(parse("a cat in a box", &lex, Some(&syn), &ParseOptions::default()).unwrap().is_empty());
    let d = first_of_type(&ds, &ty("(D e)"));
    let got = first_components(&observe(&lex, &model, d));
    let boxes = model.extension1("box");
    let expected: BTreeSet<Value> = model
        .extension1("cat")
        .into_iter()
        .filter(|&x| boxes.iter().any(|&b| model.holds("in", &[x, b]).unwrap()))
        .map(Value::E)
        .collect();
    assert_eq!(got, expected);
}

const SENTENCES: &[&str] = &[
    "the cat sleeps",
    "the cat eats a mouse",
    "a cat in a box",
    "a mouse chases the cat",
    "everyone passed",
    "if everyone passed it was raining",
    "jupiter , a planet",
    "jupiter , a planet sleeps",
    "the carnivorous cat sleeps",
    "it sleeps",
    "no cat sleeps",
    "the skillful cat eats a mouse",
];

const NOUN_PHRASES: &[&str] = &["a cat in a box", "jupiter , a planet"];

#[test]
fn every_derivation_type_checks_and_draws() {
    let (lex, model, syn) = setup();
    for s in SENTENCES {
        for syntax in [None, Some(&syn)] {
            let ds = parse(s, &lex, syntax, &ParseOptions::default()).unwrap();
            if syntax.is_some() && !NOUN_PHRASES.contains(s) {
                assert!(!ds.is_empty(), "{s}");
            }
            for d in &ds {
                assert!(d.replays(&lex.registry), "{s}: {}", d.signature());
                let t = derivation_term(&lex.registry, d).unwrap();
                check_term(&lex.registry, &t, d.ty()).unwrap_or_else(|e| panic!("{s}: {}: {e}", d.signature()));
                let diagram = from_derivation(&lex.registry, d).unwrap_or_else(|e| panic!("{s}: {}: {e}", d.signature()));
                assert_eq!(diagram.outputs().unwrap(), d.ty().effect_stack().0, "{s}: {}", d.signature());
                let ev = Evaluator::new(&lex.registry, &model);
                ev.eval(&t, &Default::default()).unwrap_or_else(|e| panic!("{s}: {}: {e}", d.signature()));
            }
        }
    }
}

#[test]
fn syntax_rules_out_scrambled_order() {
    let (lex, _, syn) = setup();
    assert!(parse("cat sleeps the", &lex, Some(&syn), &ParseOptions::default()).unwrap().is_empty());
    assert!(parse("sleeps the cat", &lex, Some(&syn), &ParseOptions::default()).unwrap().is_empty());
}

#[test]
fn unknown_tokens_report_their_position() {
    let (lex, _, _) = setup();
    match parse("the dog sleeps", &lex, None, &ParseOptions::default()) {
        Err(Error::UnknownToken { token, position }) => assert_eq!((token.as_str(), position), ("dog", 2)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn parsing_is_deterministic() {
    let (lex, _, syn) = setup();
    let sigs = |parallel| {
        let opts = ParseOptions { parallel, ..ParseOptions::default() };
        parse("the skillful cat eats a mouse", &lex, Some(&syn), &opts)
            .unwrap()
            .iter()
            .map(|d| format!("{} : {}", d.signature(), d.ty()))
            .collect::<Vec<_>>()
    };
    let a = sigs(true);
    assert!(!a.is_empty());
    assert_eq!(a, sigs(true));
    assert_eq!(a, sigs(false));
}

#[test]
fn handlers_close_off_effects() {
    let (lex, model, syn) = setup();
    let ds = parse("the cat sleeps", &lex, Some(&syn), &ParseOptions::default()).unwrap();
    let d = first_of_type(&ds, &ty("(M t)"));
    let h = handle(&lex.registry, d, "presuppose").unwrap();
    assert_eq!(h.ty(), &Ty::t());
    assert_eq!(observe(&lex, &model, &h), Value::B(true));
    let diagram = from_derivation(&lex.registry, &h).unwrap();
    assert!(diagram.outputs().unwrap().is_empty());
    assert!(handle(&lex.registry, d, "close").is_err());
}
