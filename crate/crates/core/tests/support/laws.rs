//! Functor, monad, handler and adjunction laws on generated values. Each
//! law returns the number of cases checked, or the first failure.
#![allow(dead_code)]

use effparse_core::eval::Evaluator;
use effparse_core::types::Carrier;
use effparse_core::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LANG: &str = include_str!("../../data/english.lang");
pub const CASES: usize = 120;
const ENTITIES: [&str; 4] = ["a", "b", "c", "d"];

fn model() -> Model {
    Model::parse(
        "(entity a b c d)
         (pred p 1 (a) (c))
         (pred q 1 (b) (c) (d))
         (assignment a b)
         (state)",
    )
    .unwrap()
}

fn ent(rng: &mut impl Rng) -> String {
    format!("(const {})", ENTITIES.choose(rng).unwrap())
}

fn pred(rng: &mut impl Rng, x: &str) -> String {
    match rng.gen_range(0..4) {
        0 => format!("(pred p {x})"),
        1 => format!("(pred q {x})"),
        2 => format!("(eq {x} {})", ent(rng)),
        _ => format!("(or (eq {x} {}) (pred p {x}))", ent(rng)),
    }
}

/// A closed term of type `F e`.
fn computation(rng: &mut impl Rng, carrier: Carrier, f: &str) -> String {
    let e = ent(rng);
    match (carrier, rng.gen_range(0..3)) {
        (_, 0) if carrier != Carrier::Product => format!("(eta {f} {e})"),
        (Carrier::Maybe, _) => {
            if rng.gen_bool(0.5) {
                "(none)".into()
            } else {
                format!("(some {e})")
            }
        }
        (Carrier::Set, _) => format!("(set x :where {})", pred(rng, "x")),
        (Carrier::State, 1) => format!("(state s (set x :where {} :yield (pair x (cons x s))))", pred(rng, "x")),
        (Carrier::State, _) => format!("(state s (set x :where {} :yield (pair x s)))", pred(rng, "x")),
        (Carrier::Reader, 1) => format!("(reader g (nth g {}))", rng.gen_range(0..2)),
        (Carrier::Reader, _) => format!("(reader g (if {} (nth g 0) {e}))", pred(rng, "(nth g 1)")),
        (Carrier::Writer, _) => format!("(pair {e} {})", pred(rng, &e)),
        (Carrier::Cont, 1) => format!("(cont k (and (app k {e}) (app k {})))", ent(rng)),
        (Carrier::Cont, _) => format!("(cont k (exists x (and {} (app k x))))", pred(rng, "x")),
        (Carrier::Product, _) => format!("(pair {e} g0)"),
    }
}

/// A closed `e -> e` term built from a random finite table.
fn endo(rng: &mut impl Rng) -> String {
    let mut body = ent(rng);
    for x in ENTITIES {
        body = format!("(if (eq x (const {x})) {} {body})", ent(rng));
    }
    format!("(lam x {body})")
}

/// A closed `e -> F e` term.
fn kleisli(rng: &mut impl Rng, carrier: Carrier, f: &str) -> String {
    let mut body = computation(rng, carrier, f);
    for x in &ENTITIES[..3] {
        body = format!("(if (eq x (const {x})) {} {body})", computation(rng, carrier, f));
    }
    format!("(lam x {body})")
}

struct Env<'a> {
    ev: Evaluator<'a>,
    model: &'a Model,
}

impl Env<'_> {
    fn eval(&self, src: &str) -> Value {
        let t = Term::parse(src).unwrap_or_else(|e| panic!("{src}: {e}"));
        let es: Vec<Entity> = self.model.entities().collect();
        let mut env = effparse_core::value::Env::new();
        env.insert("g0".into(), Value::Seq(vec![es[1], es[0]]));
        self.ev.eval(&t, &env).unwrap_or_else(|e| panic!("{src}: {e}"))
    }

    /// Extensional equality of two `F e` (or `F t`) values.
    fn same(&self, carrier: Carrier, a: &Value, b: &Value) -> bool {
        let m = self.model;
        let es: Vec<Entity> = m.entities().collect();
        let seqs = match carrier {
            Carrier::Reader => vec![vec![es[0], es[1]], vec![es[2], es[3]], vec![es[3], es[0], es[1]]],
            _ => vec![vec![], vec![es[0]], vec![es[2], es[1]]],
        };
        match carrier {
            Carrier::State | Carrier::Reader => seqs.into_iter().all(|s| {
                let x = self.ev.apply(a, Value::Seq(s.clone()));
                let y = self.ev.apply(b, Value::Seq(s));
                x.is_ok() && x == y
            }),
            Carrier::Cont => (0..16u32).all(|bits| {
                let k = Value::table(m.entities().enumerate().map(|(i, e)| (Value::E(e), Value::B(bits >> i & 1 == 1))));
                self.ev.apply(a, k.clone()).unwrap() == self.ev.apply(b, k).unwrap()
            }),
            _ => a == b,
        }
    }
}

fn setup() -> (Lexicon, Model) {
    (Lexicon::parse(LANG).unwrap(), model())
}

/// Each registered functor with the given capability, with its carrier.
fn functors(lex: &Lexicon, monad: bool) -> Vec<(String, Carrier)> {
    lex.registry
        .functors
        .values()
        .filter(|d| d.caps.functor && (!monad || d.caps.monad))
        .map(|d| (d.id.to_string(), d.carrier))
        .collect()
}

pub type LawResult = Result<usize, String>;

fn check_law(name: &str, monad: bool, law: impl Fn(&mut ChaCha8Rng, &str, Carrier) -> (String, String)) -> LawResult {
    let (lex, model) = setup();
    let env = Env { ev: Evaluator::new(&lex.registry, &model), model: &model };
    let fs = functors(&lex, monad);
    if fs.len() < if monad { 6 } else { 7 } {
        return Err(format!("{name}: only {} functors registered", fs.len()));
    }
    let mut cases = 0;
    for (f, carrier) in fs {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ f.len() as u64 ^ (f.as_bytes()[0] as u64) << 8);
        for case in 0..CASES {
            let (lhs, rhs) = law(&mut rng, &f, carrier);
            let (a, b) = (env.eval(&lhs), env.eval(&rhs));
            if !env.same(carrier, &a, &b) {
                return Err(format!("{name} fails for {f}, case {case}:\n  {lhs}\n  {rhs}\n  {a:?}\n  {b:?}"));
            }
            cases += 1;
        }
    }
    Ok(cases)
}

pub fn fmap_identity() -> LawResult {
    check_law("fmap id", false, |rng, f, c| {
        let m = computation(rng, c, f);
        (format!("(fmap {f} (lam x x) {m})"), m)
    })
}

pub fn fmap_composition() -> LawResult {
    check_law("fmap composition", false, |rng, f, c| {
        let (m, g, h) = (computation(rng, c, f), endo(rng), endo(rng));
        (format!("(fmap {f} (lam y (app {h} (app {g} y))) {m})"), format!("(fmap {f} {h} (fmap {f} {g} {m}))"))
    })
}

pub fn left_unit() -> LawResult {
    check_law("left unit", true, |rng, f, c| {
        let (k, e) = (kleisli(rng, c, f), ent(rng));
        (format!("(mu {f} (fmap {f} {k} (eta {f} {e})))"), format!("(app {k} {e})"))
    })
}

pub fn right_unit() -> LawResult {
    check_law("right unit", true, |rng, f, c| {
        let m = computation(rng, c, f);
        (format!("(mu {f} (fmap {f} (lam y (eta {f} y)) {m}))"), m)
    })
}

pub fn associativity() -> LawResult {
    check_law("associativity", true, |rng, f, c| {
        let (m, k, h) = (computation(rng, c, f), kleisli(rng, c, f), kleisli(rng, c, f));
        (
            format!("(mu {f} (fmap {f} {h} (mu {f} (fmap {f} {k} {m}))))"),
            format!("(mu {f} (fmap {f} (lam z (mu {f} (fmap {f} {h} (app {k} z)))) {m}))"),
        )
    })
}

pub fn ap_agrees_with_fmap() -> LawResult {
    check_law("ap", true, |rng, f, c| {
        let (m, g) = (computation(rng, c, f), endo(rng));
        (format!("(ap {f} (eta {f} {g}) {m})"), format!("(fmap {f} {g} {m})"))
    })
}

pub fn handler_inverts_unit() -> LawResult {
    let (lex, model) = setup();
    let env = Env { ev: Evaluator::new(&lex.registry, &model), model: &model };
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let handlers: Vec<_> = lex.registry.nats.iter().filter(|n| n.is_handler).collect();
    if handlers.len() < 6 {
        return Err(format!("only {} handlers registered", handlers.len()));
    }
    let mut cases = 0;
    for h in handlers {
        let f = &h.source[0];
        let cont = lex.registry.functor(f).unwrap().carrier == Carrier::Cont;
        for _ in 0..CASES {
            let x = if cont { ["true", "false"].choose(&mut rng).unwrap().to_string() } else { ent(&mut rng) };
            let lhs = env.eval(&format!("(handler {} (eta {f} {x}))", h.name));
            if lhs != env.eval(&x) {
                return Err(format!("{} after η_{f} on {x} gives {lhs:?}", h.name));
            }
            cases += 1;
        }
    }
    Ok(cases)
}

pub fn snakes() -> LawResult {
    let (lex, model) = setup();
    let env = Env { ev: Evaluator::new(&lex.registry, &model), model: &model };
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let unit = "(lam x (reader g (pair x g)))";
    if lex.registry.adjunctions.len() != 1 {
        return Err(format!("{} adjunctions registered", lex.registry.adjunctions.len()));
    }
    let (l, r) = &lex.registry.adjunctions[0];
    for _ in 0..CASES {
        // ε_L ∘ L η = id on L values.
        let p = computation(&mut rng, Carrier::Product, l.as_str());
        let lhs = env.eval(&format!("(eps {l} {r} (fmap {l} {unit} {p}))"));
        if lhs != env.eval(&p) {
            return Err(format!("left snake on {p}"));
        }
        // R ε ∘ η_R = id on R values.
        let m = computation(&mut rng, Carrier::Reader, r.as_str());
        let lhs = env.eval(&format!("(fmap {r} (lam y (eps {l} {r} y)) (app {unit} {m}))"));
        if !env.same(Carrier::Reader, &lhs, &env.eval(&m)) {
            return Err(format!("right snake on {m}"));
        }
        // The built-in unit agrees with the explicit one.
        let v = env.eval(&ent(&mut rng));
        let built_in = env.ev.adjunction_unit(l, r, v.clone()).unwrap();
        let explicit = env.ev.apply(&env.eval(unit), v).unwrap();
        if !env.same(Carrier::Reader, &built_in, &explicit) {
            return Err("built-in unit differs from the explicit one".into());
        }
    }
    Ok(CASES)
}

/// Every law with its name.
pub fn all() -> Vec<(&'static str, LawResult)> {
    vec![
        ("fmap id", fmap_identity()),
        ("fmap composition", fmap_composition()),
        ("left unit", left_unit()),
        ("right unit", right_unit()),
        ("associativity", associativity()),
        ("ap", ap_agrees_with_fmap()),
        ("handler", handler_inverts_unit()),
        ("snake", snakes()),
    ]
}
