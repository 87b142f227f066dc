//! Drawing a derivation as a string diagram.
//!
//! Every outer effect of a leaf, and every effect a function application
//! creates in its result, is an input string at the bottom boundary. The
//! strings are laid out so that each cell finds its inputs adjacent: the
//! final outputs in type order, each merged string as the concatenation of
//! the strings it was made from, and each consumed string just left of the
//! string that was outermost after it disappeared.

use std::collections::HashMap;

use crate::chart::Derivation;
use crate::diagram::{CellKind, Diagram, TwoCell};
use crate::error::{Error, Result};
use crate::modes::{base_type, prefix_step, Mode};
use crate::types::{EffectId, Registry, Ty};

type Sid = usize;

struct Cell {
    kind: CellKind,
    ins: Vec<Sid>,
    out: Option<Sid>,
}

#[derive(Default)]
struct Builder {
    labels: Vec<EffectId>,
    /// The merge cell producing a string, if any.
    made_by: HashMap<Sid, usize>,
    cells: Vec<Cell>,
    /// Consuming cells anchored in front of a string.
    anchored: HashMap<Sid, Vec<usize>>,
    unanchored: Vec<usize>,
}

fn stack(ty: &Ty) -> Vec<EffectId> {
    ty.effect_stack().0
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidDiagram(msg.into())
}

impl Builder {
    fn string(&mut self, f: EffectId) -> Sid {
        self.labels.push(f);
        self.labels.len() - 1
    }

    fn merge(&mut self, kind: CellKind, x: Sid, y: Sid) -> Sid {
        let f = self.labels[x].clone();
        let z = self.string(f);
        self.cells.push(Cell { kind, ins: vec![x, y], out: Some(z) });
        self.made_by.insert(z, self.cells.len() - 1);
        z
    }

    fn consume(&mut self, kind: CellKind, ins: Vec<Sid>, anchor: Option<Sid>) {
        self.cells.push(Cell { kind, ins, out: None });
        let c = self.cells.len() - 1;
        match anchor {
            Some(a) => self.anchored.entry(a).or_default().push(c),
            None => self.unanchored.push(c),
        }
    }

    fn join_kind(reg: &Registry, f: &EffectId) -> CellKind {
        match reg.functor(f) {
            Ok(d) if d.caps.monad => CellKind::Mu(f.clone()),
            _ => CellKind::Ap(f.clone()),
        }
    }

    fn derivation(&mut self, reg: &Registry, d: &Derivation) -> Result<Vec<Sid>> {
        match d {
            Derivation::Leaf { ty, .. } => Ok(stack(ty).into_iter().map(|f| self.string(f)).collect()),
            Derivation::Handle { handler, child, .. } => {
                let w = self.derivation(reg, child)?;
                let (&s, rest) = w.split_first().ok_or_else(|| bad("handler on a pure constituent"))?;
                let f = self.labels[s].clone();
                let kind = if handler == "lower" { CellKind::Lower(f) } else { CellKind::Handler(handler.clone(), f) };
                self.consume(kind, vec![s], rest.first().copied());
                Ok(rest.to_vec())
            }
            Derivation::Node { modes, left, right, .. } => {
                let lw = self.derivation(reg, left)?;
                let rw = self.derivation(reg, right)?;
                self.modes(reg, &modes.0, left.ty(), right.ty(), &lw, &rw, Vec::new())
            }
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn modes(&mut self, reg: &Registry, ms: &[Mode], l: &Ty, r: &Ty, lw: &[Sid], rw: &[Sid], pending: Vec<Sid>) -> Result<Vec<Sid>> {
        let (m, rest) = ms.split_first().ok_or_else(|| bad("empty mode sequence"))?;
        if m.is_base() {
            let out = base_type(m, l, r).ok_or_else(|| bad(format!("{m} does not apply")))?;
            if !lw.is_empty() || !rw.is_empty() {
                return Err(bad(format!("{m} applied to effectful operands")));
            }
            let effects = stack(&out);
            if pending.len() > effects.len() {
                return Err(bad("ejected effect missing from the result"));
            }
            let mut word = pending.clone();
            for f in &effects[pending.len()..] {
                word.push(self.string(f.clone()));
            }
            return Ok(word);
        }
        if m.is_postfix() {
            let w = self.modes(reg, rest, l, r, lw, rw, pending)?;
            return match m {
                Mode::J(f) => {
                    let [x, y, tail @ ..] = w.as_slice() else { return Err(bad("join needs two strings")) };
                    let z = self.merge(CellKind::Mu(f.clone()), *x, *y);
                    Ok(std::iter::once(z).chain(tail.iter().copied()).collect())
                }
                Mode::DN(f) => {
                    let (&s, tail) = w.split_first().ok_or_else(|| bad("nothing to lower"))?;
                    self.consume(CellKind::Lower(f.clone()), vec![s], tail.first().copied());
                    Ok(tail.to_vec())
                }
                _ => unreachable!(),
            };
        }
        let (l2, r2) = prefix_step(reg, m, l, r).ok_or_else(|| bad(format!("{m} does not apply")))?;
        let first = |w: &[Sid]| w.first().copied().ok_or_else(|| bad(format!("{m} expects an effect")));
        match m {
            Mode::ML(_) => {
                let s = first(lw)?;
                let inner = self.modes(reg, rest, &l2, &r2, &lw[1..], rw, pending)?;
                Ok(std::iter::once(s).chain(inner).collect())
            }
            Mode::MR(_) => {
                let s = first(rw)?;
                let inner = self.modes(reg, rest, &l2, &r2, lw, &rw[1..], pending)?;
                Ok(std::iter::once(s).chain(inner).collect())
            }
            Mode::A(f) => {
                let (x, y) = (first(lw)?, first(rw)?);
                let inner = self.modes(reg, rest, &l2, &r2, &lw[1..], &rw[1..], pending)?;
                let z = self.merge(Self::join_kind(reg, f), x, y);
                Ok(std::iter::once(z).chain(inner).collect())
            }
            Mode::UL(_) | Mode::UR(_) => self.modes(reg, rest, &l2, &r2, lw, rw, pending),
            Mode::C(lf, rf) => {
                let (x, y) = (first(lw)?, first(rw)?);
                let inner = self.modes(reg, rest, &l2, &r2, &lw[1..], &rw[1..], pending)?;
                self.consume(CellKind::Epsilon(lf.clone(), rf.clone()), vec![x, y], inner.first().copied());
                Ok(inner)
            }
            Mode::EL(_) => {
                let s = first(rw)?;
                let mut p = pending;
                p.push(s);
                self.modes(reg, rest, &l2, &r2, lw, &rw[1..], p)
            }
            Mode::ER(_) => {
                let s = first(lw)?;
                let mut p = pending;
                p.push(s);
                self.modes(reg, rest, &l2, &r2, &lw[1..], rw, p)
            }
            _ => unreachable!(),
        }
    }

    fn first_source(&self, c: usize) -> Sid {
        self.cells[c]
            .ins
            .iter()
            .map(|s| match self.made_by.get(s) {
                Some(&m) => self.first_source(m),
                None => *s,
            })
            .min()
            .unwrap_or(Sid::MAX)
    }

    fn place_cell(&self, c: usize, order: &mut Vec<Sid>) {
        for &s in &self.cells[c].ins {
            self.place(s, order);
        }
    }

    fn place(&self, s: Sid, order: &mut Vec<Sid>) {
        if let Some(cs) = self.anchored.get(&s) {
            for &c in cs {
                self.place_cell(c, order);
            }
        }
        match self.made_by.get(&s) {
            Some(&c) => self.place_cell(c, order),
            None => order.push(s),
        }
    }

    fn finish(self, outputs: &[Sid]) -> Result<Diagram> {
        let mut order = Vec::new();
        for &s in outputs {
            self.place(s, &mut order);
        }
        // Strings closed off with nothing left beside them go in sentence
        // order; sources are numbered left to right.
        let mut loose = self.unanchored.clone();
        loose.sort_by_key(|&c| self.first_source(c));
        for c in loose {
            self.place_cell(c, &mut order);
        }
        let mut alive: Vec<Sid> = order.clone();
        let mut nodes = Vec::new();
        for (i, c) in self.cells.iter().enumerate() {
            let start = alive
                .iter()
                .position(|s| *s == c.ins[0])
                .ok_or_else(|| bad(format!("cell {i} consumes a dead string")))?;
            if alive.get(start..start + c.ins.len()) != Some(&c.ins[..]) {
                return Err(bad(format!("cell {i} inputs are not adjacent")));
            }
            let pos = alive.len() - start - c.ins.len();
            alive.splice(start..start + c.ins.len(), c.out);
            nodes.push(TwoCell::new(pos, c.kind.clone()));
        }
        if alive != outputs {
            return Err(bad("outputs out of order"));
        }
        let d = Diagram::new(order.iter().map(|&s| self.labels[s].clone()).collect(), nodes);
        if let Err(v) = d.check() {
            return Err(bad(v.to_string()));
        }
        Ok(d)
    }
}

/// The string diagram of a derivation. Its outputs are the effects of the
/// derivation's type, outermost first.
pub fn from_derivation(reg: &Registry, d: &Derivation) -> Result<Diagram> {
    let mut b = Builder::default();
    let out = b.derivation(reg, d)?;
    b.finish(&out)
}
