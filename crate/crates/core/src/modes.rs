//! Combination modes: typing, enumeration, pruning and denotations.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::term::{EffOp, Term};
use crate::types::{Carrier, EffectId, Registry, Ty};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    Fwd,
    Bwd,
    Conj,
    Disj,
    ML(EffectId),
    MR(EffectId),
    A(EffectId),
    UL(EffectId),
    UR(EffectId),
    J(EffectId),
    /// Lowering of a continuation functor.
    DN(EffectId),
    C(EffectId, EffectId),
    EL(EffectId),
    ER(EffectId),
}

impl Mode {
    pub fn is_base(&self) -> bool {
        matches!(self, Mode::Fwd | Mode::Bwd | Mode::Conj | Mode::Disj)
    }

    /// Modes that transform the result rather than the inputs.
    pub fn is_postfix(&self) -> bool {
        matches!(self, Mode::J(_) | Mode::DN(_))
    }

    pub fn parse(s: &str) -> Result<Mode> {
        let bad = || Error::parse(1, format!("unknown mode {s:?}"));
        Ok(match s {
            ">" => Mode::Fwd,
            "<" => Mode::Bwd,
            "∧" | "and" => Mode::Conj,
            "∨" | "or" => Mode::Disj,
            _ => {
                let (head, arg) = s.split_once('_').ok_or_else(bad)?;
                if arg.is_empty() {
                    return Err(bad());
                }
                let f = EffectId::new(arg);
                match head {
                    "ML" => Mode::ML(f),
                    "MR" => Mode::MR(f),
                    "A" => Mode::A(f),
                    "UL" => Mode::UL(f),
                    "UR" => Mode::UR(f),
                    "J" => Mode::J(f),
                    "DN" => Mode::DN(f),
                    "EL" => Mode::EL(f),
                    "ER" => Mode::ER(f),
                    "C" => {
                        let (l, r) = arg.split_once(',').ok_or_else(bad)?;
                        if l.is_empty() || r.is_empty() {
                            return Err(bad());
                        }
                        Mode::C(EffectId::new(l), EffectId::new(r))
                    }
                    _ => return Err(bad()),
                }
            }
        })
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Fwd => f.write_str(">"),
            Mode::Bwd => f.write_str("<"),
            Mode::Conj => f.write_str("∧"),
            Mode::Disj => f.write_str("∨"),
            Mode::ML(x) => write!(f, "ML_{x}"),
            Mode::MR(x) => write!(f, "MR_{x}"),
            Mode::A(x) => write!(f, "A_{x}"),
            Mode::UL(x) => write!(f, "UL_{x}"),
            Mode::UR(x) => write!(f, "UR_{x}"),
            Mode::J(x) => write!(f, "J_{x}"),
            Mode::DN(x) => write!(f, "DN_{x}"),
            Mode::C(l, r) => write!(f, "C_{l},{r}"),
            Mode::EL(x) => write!(f, "EL_{x}"),
            Mode::ER(x) => write!(f, "ER_{x}"),
        }
    }
}

/// A mode sequence, outermost first, ending in exactly one base mode.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeSeq(pub Vec<Mode>);

impl ModeSeq {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn base(&self) -> &Mode {
        self.0.last().expect("mode sequences are never empty")
    }

    fn prepend(&self, m: Mode) -> ModeSeq {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(m);
        v.extend(self.0.iter().cloned());
        ModeSeq(v)
    }

    pub fn parse(s: &str) -> Result<ModeSeq> {
        let modes = s.split_whitespace().map(Mode::parse).collect::<Result<Vec<_>>>()?;
        let seq = ModeSeq(modes);
        seq.check_shape()?;
        Ok(seq)
    }

    fn check_shape(&self) -> Result<()> {
        let n = self.0.len();
        if n == 0 || !self.0[n - 1].is_base() || self.0[..n - 1].iter().any(Mode::is_base) {
            return Err(Error::parse(1, format!("{self} does not end in exactly one base mode")));
        }
        Ok(())
    }
}

impl fmt::Display for ModeSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

fn strip<'t>(ty: &'t Ty, f: &EffectId) -> Option<&'t Ty> {
    match ty {
        Ty::Eff(g, inner) if g == f => Some(inner),
        _ => None,
    }
}

fn is_cont(reg: &Registry, f: &EffectId) -> bool {
    reg.functor(f).map(|d| d.carrier == Carrier::Cont).unwrap_or(false)
}

fn has(reg: &Registry, f: &EffectId, cap: &str) -> bool {
    reg.functor(f)
        .map(|d| match cap {
            "functor" => d.caps.functor,
            "applicative" => d.caps.applicative,
            _ => d.caps.monad,
        })
        .unwrap_or(false)
}

pub(crate) fn base_type(m: &Mode, l: &Ty, r: &Ty) -> Option<Ty> {
    match (m, l, r) {
        (Mode::Fwd, Ty::Arrow(a, b), x) if **a == *x && a.is_pure() => Some((**b).clone()),
        (Mode::Bwd, x, Ty::Arrow(a, b)) if **a == *x && a.is_pure() => Some((**b).clone()),
        (Mode::Conj | Mode::Disj, Ty::Arrow(a, t1), Ty::Arrow(b, t2))
            if a == b && a.is_pure() && **t1 == Ty::t() && **t2 == Ty::t() =>
        {
            Some(l.clone())
        }
        _ => None,
    }
}

/// One input-transforming step: the types handed to the inner sequence.
pub(crate) fn prefix_step(reg: &Registry, m: &Mode, l: &Ty, r: &Ty) -> Option<(Ty, Ty)> {
    match m {
        Mode::ML(f) if has(reg, f, "functor") => Some((strip(l, f)?.clone(), r.clone())),
        Mode::MR(f) if has(reg, f, "functor") => Some((l.clone(), strip(r, f)?.clone())),
        Mode::A(f) if has(reg, f, "applicative") => Some((strip(l, f)?.clone(), strip(r, f)?.clone())),
        Mode::UL(f) if has(reg, f, "applicative") => match r {
            Ty::Arrow(d, c) => Some((l.clone(), Ty::Arrow(Box::new(strip(d, f)?.clone()), c.clone()))),
            _ => None,
        },
        Mode::UR(f) if has(reg, f, "applicative") => match l {
            Ty::Arrow(d, c) => Some((Ty::Arrow(Box::new(strip(d, f)?.clone()), c.clone()), r.clone())),
            _ => None,
        },
        Mode::C(lf, rf) if reg.is_adjunction(lf, rf) => Some((strip(l, lf)?.clone(), strip(r, rf)?.clone())),
        Mode::EL(f) if has(reg, f, "functor") => Some((l.clone(), upsilon_type(strip(r, f)?, f)?)),
        Mode::ER(f) if has(reg, f, "functor") => Some((upsilon_type(strip(l, f)?, f)?, r.clone())),
        _ => None,
    }
}

fn upsilon_type(inner: &Ty, f: &EffectId) -> Option<Ty> {
    match inner {
        Ty::Arrow(a, b) => Some(Ty::arrow((**a).clone(), Ty::eff(f.clone(), (**b).clone()))),
        _ => None,
    }
}

/// How a prefix mode transforms the inner result type.
fn prefix_result(reg: &Registry, m: &Mode, inner: Ty) -> Option<Ty> {
    match m {
        Mode::ML(f) | Mode::MR(f) | Mode::A(f) => reg.apply_functor(f, inner).ok(),
        _ => Some(inner),
    }
}

fn postfix_result(reg: &Registry, m: &Mode, ty: &Ty) -> Option<Ty> {
    match m {
        Mode::J(f) if has(reg, f, "monad") => match strip(ty, f)? {
            inner @ Ty::Eff(g, _) if g == f => Some(inner.clone()),
            _ => None,
        },
        Mode::DN(f) if is_cont(reg, f) => match strip(ty, f)? {
            t if *t == Ty::t() => Some(Ty::t()),
            _ => None,
        },
        _ => None,
    }
}

/// Type of combining `l` and `r` with `seq`, if the sequence applies.
pub fn replay(reg: &Registry, seq: &ModeSeq, l: &Ty, r: &Ty) -> Option<Ty> {
    fn go(reg: &Registry, modes: &[Mode], l: &Ty, r: &Ty) -> Option<Ty> {
        let (m, rest) = modes.split_first()?;
        if rest.is_empty() {
            return if m.is_base() { base_type(m, l, r) } else { None };
        }
        if m.is_base() {
            return None;
        }
        if m.is_postfix() {
            let inner = go(reg, rest, l, r)?;
            return postfix_result(reg, m, &inner);
        }
        let (l2, r2) = prefix_step(reg, m, l, r)?;
        let inner = go(reg, rest, &l2, &r2)?;
        prefix_result(reg, m, inner)
    }
    go(reg, &seq.0, l, r)
}

/// `true` when the sequence is kept, `false` when one of the rewriting
/// rules shows it redundant. Patterns are contiguous, outermost first.
pub fn prune(seq: &ModeSeq, reg: &Registry) -> bool {
    let ms = &seq.0;
    let has_dn = ms.iter().any(|m| matches!(m, Mode::DN(_)));
    let has_c = ms.iter().any(|m| matches!(m, Mode::C(..)));
    let has_j = |f: &EffectId| ms.contains(&Mode::J(f.clone()));
    let any_j = ms.iter().any(|m| matches!(m, Mode::J(_)));
    let commutative = |f: &EffectId| reg.functor(f).map(|d| d.commutative).unwrap_or(false);

    if has_dn && has_c {
        return false;
    }
    if any_j && has_c {
        return false;
    }
    for w in ms.windows(2) {
        match (&w[0], &w[1]) {
            (Mode::MR(f), Mode::ML(g)) if f == g => return false,
            (Mode::ML(f) | Mode::MR(f), Mode::UL(g) | Mode::UR(g)) if f == g => return false,
            (Mode::MR(f), Mode::A(g)) | (Mode::A(f), Mode::ML(g)) if f == g && commutative(f) => return false,
            _ => {}
        }
        // Two moves of one effect with no join between them: the join
        // belongs further down.
        if let Some(f) = blocking_pair(&w[0], &w[1], commutative) {
            if has_j(&f) {
                return false;
            }
        }
    }
    for w in ms.windows(3) {
        match &w[1] {
            Mode::DN(_) => {
                if dn_blocked(&w[0], &w[2]) {
                    return false;
                }
            }
            Mode::J(j) => {
                if let Some(f) = blocking_pair(&w[0], &w[2], commutative) {
                    if &f == j {
                        return false;
                    }
                }
            }
            _ => {}
        }
    }
    true
}

fn dn_blocked(a: &Mode, b: &Mode) -> bool {
    match (a, b) {
        (Mode::ML(f), Mode::ML(g)) | (Mode::MR(f), Mode::MR(g)) => f == g,
        (Mode::ML(f), Mode::MR(g)) | (Mode::A(f), Mode::MR(g)) | (Mode::ML(f), Mode::A(g)) => f == g,
        _ => false,
    }
}

/// The effect `F` when `a, b` is one of the join-blocking pairs.
fn blocking_pair(a: &Mode, b: &Mode, commutative: impl Fn(&EffectId) -> bool) -> Option<EffectId> {
    match (a, b) {
        (Mode::ML(f), Mode::ML(g))
        | (Mode::MR(f), Mode::MR(g))
        | (Mode::ML(f), Mode::MR(g))
        | (Mode::A(f), Mode::MR(g))
        | (Mode::ML(f), Mode::A(g))
            if f == g =>
        {
            Some(f.clone())
        }
        (Mode::MR(f), Mode::ML(g)) | (Mode::A(f), Mode::A(g)) if f == g && commutative(f) => Some(f.clone()),
        _ => None,
    }
}

/// `(2 + c) · m_L · (span + 1) + 1`.
pub fn mode_budget(reg: &Registry, max_effect_rank: usize, span: usize) -> usize {
    (2 + reg.adjunctions.len()) * max_effect_rank * (span + 1) + 1
}

type Combos = Arc<Vec<(ModeSeq, Ty)>>;

/// Mode sequences paired with their printed form, sorted by it.
pub type Labelled = Arc<Vec<(String, ModeSeq)>>;

/// Sequences grouped by result type.
pub type Grouped = Arc<Vec<(Ty, Labelled)>>;

/// Memoized enumeration of mode sequences for pairs of types.
pub struct Enumerator<'r> {
    reg: &'r Registry,
    pruning: bool,
    modes: Vec<Mode>,
    cache: Mutex<HashMap<(Ty, Ty), Combos>>,
    grouped: Mutex<HashMap<(Ty, Ty, usize), Grouped>>,
}

impl<'r> Enumerator<'r> {
    pub fn new(reg: &'r Registry, pruning: bool) -> Self {
        let mut modes = Vec::new();
        for f in reg.functors.keys() {
            for m in [Mode::ML(f.clone()), Mode::MR(f.clone()), Mode::A(f.clone()), Mode::UL(f.clone()), Mode::UR(f.clone())] {
                modes.push(m);
            }
            if reg.functor(f).map(|d| d.adjoint_left.is_some()).unwrap_or(false) {
                modes.push(Mode::EL(f.clone()));
                modes.push(Mode::ER(f.clone()));
            }
        }
        for (l, r) in &reg.adjunctions {
            modes.push(Mode::C(l.clone(), r.clone()));
        }
        Enumerator { reg, pruning, modes, cache: Mutex::new(HashMap::new()), grouped: Mutex::new(HashMap::new()) }
    }

    pub fn registry(&self) -> &'r Registry {
        self.reg
    }

    fn keep(&self, seq: &ModeSeq) -> bool {
        !self.pruning || prune(seq, self.reg)
    }

    /// Every sequence combining `l` and `r`, with its result type.
    pub fn all(&self, l: &Ty, r: &Ty) -> Combos {
        let key = (l.clone(), r.clone());
        if let Some(hit) = self.cache.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let mut found: BTreeSet<(ModeSeq, Ty)> = BTreeSet::new();
        for b in [Mode::Fwd, Mode::Bwd, Mode::Conj, Mode::Disj] {
            if let Some(ty) = base_type(&b, l, r) {
                found.insert((ModeSeq(vec![b]), ty));
            }
        }
        for m in &self.modes {
            if let Some((l2, r2)) = prefix_step(self.reg, m, l, r) {
                for (seq, ty) in self.all(&l2, &r2).iter() {
                    let Some(out) = prefix_result(self.reg, m, ty.clone()) else { continue };
                    let seq = seq.prepend(m.clone());
                    if self.keep(&seq) {
                        found.insert((seq, out));
                    }
                }
            }
        }
        // Postfix modes shrink the result's effect stack, so closing under
        // them terminates.
        let mut frontier: Vec<(ModeSeq, Ty)> = found.iter().cloned().collect();
        while let Some((seq, ty)) = frontier.pop() {
            let (effects, _) = ty.effect_stack();
            let Some(f) = effects.first() else { continue };
            for m in [Mode::J(f.clone()), Mode::DN(f.clone())] {
                if let Some(out) = postfix_result(self.reg, &m, &ty) {
                    let s = seq.prepend(m);
                    if self.keep(&s) && found.insert((s.clone(), out.clone())) {
                        frontier.push((s, out));
                    }
                }
            }
        }
        let combos: Combos = Arc::new(found.into_iter().collect());
        self.cache.lock().unwrap().insert(key, combos.clone());
        combos
    }

    /// Sequences no longer than `budget`.
    pub fn enumerate(&self, l: &Ty, r: &Ty, budget: usize) -> Vec<(ModeSeq, Ty)> {
        self.all(l, r).iter().filter(|(s, _)| s.len() <= budget).cloned().collect()
    }

    /// Sequences no longer than `budget`, one group per result type. Within
    /// a group the order is that of the printed sequence followed by a
    /// space, which is the order of the derivation signatures they start.
    pub fn grouped(&self, l: &Ty, r: &Ty, budget: usize) -> Grouped {
        let key = (l.clone(), r.clone(), budget);
        if let Some(hit) = self.grouped.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let mut by_ty: BTreeMap<Ty, Vec<(String, ModeSeq)>> = BTreeMap::new();
        for (seq, ty) in self.enumerate(l, r, budget) {
            by_ty.entry(ty).or_default().push((format!("{seq} "), seq));
        }
        let groups: Grouped = Arc::new(
            by_ty
                .into_iter()
                .map(|(ty, mut seqs)| {
                    seqs.sort();
                    for s in &mut seqs {
                        s.0.pop();
                    }
                    (ty, Arc::new(seqs))
                })
                .collect(),
        );
        self.grouped.lock().unwrap().insert(key, groups.clone());
        groups
    }
}

/// All well-typed mode sequences of length at most `budget`, after pruning.
pub fn enumerate_modes(reg: &Registry, left: &Ty, right: &Ty, budget: usize) -> BTreeSet<(ModeSeq, Ty)> {
    Enumerator::new(reg, true).enumerate(left, right, budget).into_iter().collect()
}

fn v(x: &str) -> Term {
    Term::var(x)
}

fn lam(x: &str, b: Term) -> Term {
    Term::lam(x, b)
}

fn app2(f: Term, a: Term, b: Term) -> Term {
    Term::app2(f, a, b)
}

/// The closed denotation of a mode. Base modes are binary functions; every
/// other mode takes the inner combinator `M` first.
pub fn mode_denotation(reg: &Registry, m: &Mode) -> Result<Term> {
    let need = |f: &EffectId, cap: &'static str| -> Result<()> {
        if has(reg, f, cap) {
            Ok(())
        } else {
            Err(Error::Capability { functor: f.to_string(), needed: cap })
        }
    };
    let op = |o: EffOp, args: Vec<Term>| Term::op(o, args);
    let wrap = |x: &str, y: &str, body: Term| lam("M", lam(x, lam(y, body)));
    Ok(match m {
        Mode::Fwd => lam("f", lam("x", Term::app(v("f"), v("x")))),
        Mode::Bwd => lam("x", lam("f", Term::app(v("f"), v("x")))),
        Mode::Conj | Mode::Disj => {
            let (p, q) = (Term::app(v("p"), v("x")), Term::app(v("q"), v("x")));
            let body = if *m == Mode::Conj {
                Term::And(Arc::new(p), Arc::new(q))
            } else {
                Term::Or(Arc::new(p), Arc::new(q))
            };
            lam("p", lam("q", lam("x", body)))
        }
        Mode::ML(f) => {
            need(f, "functor")?;
            let g = lam("a", app2(v("M"), v("a"), v("y")));
            wrap("x", "y", op(EffOp::Fmap(f.clone()), vec![g, v("x")]))
        }
        Mode::MR(f) => {
            need(f, "functor")?;
            let g = lam("b", app2(v("M"), v("x"), v("b")));
            wrap("x", "y", op(EffOp::Fmap(f.clone()), vec![g, v("y")]))
        }
        Mode::A(f) => {
            need(f, "applicative")?;
            let g = lam("a", lam("b", app2(v("M"), v("a"), v("b"))));
            let lifted = op(EffOp::Fmap(f.clone()), vec![g, v("x")]);
            wrap("x", "y", op(EffOp::Ap(f.clone()), vec![lifted, v("y")]))
        }
        Mode::UL(f) => {
            need(f, "applicative")?;
            let k = lam("b", Term::app(v("h"), op(EffOp::Eta(f.clone()), vec![v("b")])));
            wrap("x", "h", app2(v("M"), v("x"), k))
        }
        Mode::UR(f) => {
            need(f, "applicative")?;
            let k = lam("a", Term::app(v("h"), op(EffOp::Eta(f.clone()), vec![v("a")])));
            wrap("h", "y", app2(v("M"), k, v("y")))
        }
        Mode::J(f) => {
            need(f, "monad")?;
            wrap("x", "y", op(EffOp::Mu(f.clone()), vec![app2(v("M"), v("x"), v("y"))]))
        }
        Mode::DN(f) => {
            if !is_cont(reg, f) {
                return Err(Error::Capability { functor: f.to_string(), needed: "lowering" });
            }
            wrap("x", "y", op(EffOp::Lower, vec![app2(v("M"), v("x"), v("y"))]))
        }
        Mode::C(l, r) => {
            if !reg.is_adjunction(l, r) {
                return Err(Error::eval(format!("{l} ⊣ {r} is not a registered adjunction")));
            }
            let inner = op(EffOp::Fmap(r.clone()), vec![lam("r", app2(v("M"), v("l"), v("r"))), v("y")]);
            let outer = op(EffOp::Fmap(l.clone()), vec![lam("l", inner), v("x")]);
            wrap("x", "y", op(EffOp::Eps(l.clone(), r.clone()), vec![outer]))
        }
        Mode::EL(f) => {
            need(f, "functor")?;
            wrap("x", "h", app2(v("M"), v("x"), op(EffOp::Upsilon(f.clone()), vec![v("h")])))
        }
        Mode::ER(f) => {
            need(f, "functor")?;
            wrap("h", "y", app2(v("M"), op(EffOp::Upsilon(f.clone()), vec![v("h")]), v("y")))
        }
    })
}

/// The closed binary combinator of a whole sequence.
pub fn seq_denotation(reg: &Registry, seq: &ModeSeq) -> Result<Term> {
    let mut acc = mode_denotation(reg, seq.base())?;
    for m in seq.0.iter().rev().skip(1) {
        acc = Term::app(mode_denotation(reg, m)?, acc);
    }
    Ok(acc)
}
