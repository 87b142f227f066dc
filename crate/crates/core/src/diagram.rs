//! Combinatorial string diagrams: a bottom boundary word and a list of
//! 2-cells, bottom to top. Each cell records how many strings lie to its
//! right at its input interface.

use std::fmt;

use crate::error::{Error, Result};
use crate::sexpr::{keyword_args, parse_all, Sexp};
use crate::types::EffectId;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CellKind {
    Eta(EffectId),
    Mu(EffectId),
    CoEta(EffectId),
    CoMu(EffectId),
    Epsilon(EffectId, EffectId),
    EtaAdj(EffectId, EffectId),
    Ap(EffectId),
    Handler(String, EffectId),
    Lower(EffectId),
}

impl CellKind {
    /// Input and output words, leftmost first.
    pub fn interface(&self) -> (Vec<EffectId>, Vec<EffectId>) {
        use CellKind::*;
        match self {
            Eta(f) => (vec![], vec![f.clone()]),
            Mu(f) | Ap(f) => (vec![f.clone(), f.clone()], vec![f.clone()]),
            CoEta(f) => (vec![f.clone()], vec![]),
            CoMu(f) => (vec![f.clone()], vec![f.clone(), f.clone()]),
            Epsilon(l, r) => (vec![l.clone(), r.clone()], vec![]),
            EtaAdj(l, r) => (vec![], vec![r.clone(), l.clone()]),
            Handler(_, f) | Lower(f) => (vec![f.clone()], vec![]),
        }
    }

    fn to_sexpr(&self) -> String {
        use CellKind::*;
        match self {
            Eta(f) => format!("(eta {f})"),
            Mu(f) => format!("(mu {f})"),
            CoEta(f) => format!("(coeta {f})"),
            CoMu(f) => format!("(comu {f})"),
            Epsilon(l, r) => format!("(eps {l} {r})"),
            EtaAdj(l, r) => format!("(etaadj {l} {r})"),
            Ap(f) => format!("(ap {f})"),
            Handler(h, f) => format!("(handler {h} {f})"),
            Lower(f) => format!("(lower {f})"),
        }
    }

    fn from_sexp(s: &Sexp) -> Result<CellKind> {
        let items = s.expect_list("a cell kind")?;
        let atoms = items.iter().map(|x| x.expect_atom("a cell kind")).collect::<Result<Vec<_>>>()?;
        let id = |x: &str| EffectId::new(x);
        use CellKind::*;
        Ok(match atoms.as_slice() {
            ["eta", f] => Eta(id(f)),
            ["mu", f] => Mu(id(f)),
            ["coeta", f] => CoEta(id(f)),
            ["comu", f] => CoMu(id(f)),
            ["eps", l, r] => Epsilon(id(l), id(r)),
            ["etaadj", l, r] => EtaAdj(id(l), id(r)),
            ["ap", f] => Ap(id(f)),
            ["handler", h, f] => Handler(h.to_string(), id(f)),
            ["lower", f] => Lower(id(f)),
            _ => return Err(Error::parse(s.line(), format!("unknown cell kind {s}"))),
        })
    }

    pub fn label(&self) -> String {
        use CellKind::*;
        match self {
            Eta(f) => format!("η_{f}"),
            Mu(f) => format!("μ_{f}"),
            CoEta(f) => format!("ε_{f}"),
            CoMu(f) => format!("δ_{f}"),
            Epsilon(l, r) => format!("ε_{l}{r}"),
            EtaAdj(l, r) => format!("η_{l}{r}"),
            Ap(f) => format!("<*>_{f}"),
            Handler(h, _) => h.clone(),
            Lower(_) => "⇓".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TwoCell {
    /// Strings strictly to the right of the cell at its input interface.
    pub pos: usize,
    pub kind: CellKind,
    pub ins: Vec<EffectId>,
    pub outs: Vec<EffectId>,
}

impl TwoCell {
    pub fn new(pos: usize, kind: CellKind) -> TwoCell {
        let (ins, outs) = kind.interface();
        TwoCell { pos, kind, ins, outs }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Diagram {
    pub inputs: Vec<EffectId>,
    pub nodes: Vec<TwoCell>,
}

/// First interface violation found by [`Diagram::check`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub node: usize,
    pub msg: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "node {}: {}", self.node, self.msg)
    }
}

/// Step counts of a normalization run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Steps {
    pub exchanges: usize,
    pub equational: usize,
}

impl Diagram {
    pub fn new(inputs: Vec<EffectId>, nodes: Vec<TwoCell>) -> Diagram {
        Diagram { inputs, nodes }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Replay interfaces bottom-up; the output word on success.
    pub fn check(&self) -> std::result::Result<Vec<EffectId>, Violation> {
        let mut word = self.inputs.clone();
        for (i, n) in self.nodes.iter().enumerate() {
            let (ins, outs) = n.kind.interface();
            if ins != n.ins || outs != n.outs {
                return Err(Violation { node: i, msg: "ins/outs disagree with the cell kind".into() });
            }
            let w = word.len();
            if n.pos + n.ins.len() > w {
                return Err(Violation { node: i, msg: format!("pos {} with {} input(s) exceeds width {w}", n.pos, n.ins.len()) });
            }
            let start = w - n.pos - n.ins.len();
            if word[start..start + n.ins.len()] != n.ins[..] {
                return Err(Violation {
                    node: i,
                    msg: format!("expects {:?} but finds {:?}", names(&n.ins), names(&word[start..start + n.ins.len()])),
                });
            }
            word.splice(start..start + n.ins.len(), n.outs.iter().cloned());
        }
        Ok(word)
    }

    pub fn validate(&self) -> bool {
        self.check().is_ok()
    }

    pub fn outputs(&self) -> Result<Vec<EffectId>> {
        self.check().map_err(|v| Error::InvalidDiagram(v.to_string()))
    }

    fn require_valid(&self) -> Result<()> {
        self.outputs().map(|_| ())
    }

    pub fn to_sexpr(&self) -> String {
        let mut out = format!("(diagram :inputs ({})\n  :nodes (", names(&self.inputs).join(" "));
        for (i, n) in self.nodes.iter().enumerate() {
            if i > 0 {
                out.push_str("\n          ");
            }
            out.push_str(&format!(
                "({} {} ({}) ({}))",
                n.pos,
                n.kind.to_sexpr(),
                names(&n.ins).join(" "),
                names(&n.outs).join(" ")
            ));
        }
        out.push_str("))");
        out
    }

    pub fn parse(src: &str) -> Result<Diagram> {
        let forms = parse_all(src)?;
        let [form] = forms.as_slice() else {
            return Err(Error::parse(1, "expected exactly one diagram form"));
        };
        let items = form.expect_list("a diagram")?;
        if form.head() != Some("diagram") {
            return Err(Error::parse(form.line(), "expected (diagram ...)"));
        }
        let (_, kw) = keyword_args(&items[1..])?;
        let mut d = Diagram::default();
        let word = |s: &Sexp| -> Result<Vec<EffectId>> {
            s.expect_list("an effect list")?.iter().map(|x| Ok(EffectId::new(x.expect_atom("an effect")?))).collect()
        };
        for (k, v) in kw {
            match k {
                "inputs" => d.inputs = word(v)?,
                "nodes" => {
                    for n in v.expect_list("a node list")? {
                        let parts = n.expect_list("a node")?;
                        let [pos, kind, ins, outs] = parts else {
                            return Err(Error::parse(n.line(), "a node is (pos kind (ins) (outs))"));
                        };
                        let pos = pos
                            .expect_atom("a position")?
                            .parse()
                            .map_err(|_| Error::parse(n.line(), "position must be a natural number"))?;
                        d.nodes.push(TwoCell { pos, kind: CellKind::from_sexp(kind)?, ins: word(ins)?, outs: word(outs)? });
                    }
                }
                other => return Err(Error::parse(v.line(), format!("unknown diagram keyword :{other}"))),
            }
        }
        Ok(d)
    }

    /// DOT rendering: strings are edges, cells are nodes.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph diagram {\n  rankdir=BT;\n  node [fontname=\"Helvetica\"];\n");
        // The producer of each string currently in the word.
        let mut word: Vec<String> = Vec::new();
        for (i, f) in self.inputs.iter().enumerate() {
            let id = format!("in{i}");
            out.push_str(&format!("  {id} [shape=point, xlabel=\"{f}\"];\n"));
            word.push(id);
        }
        let mut edges = Vec::new();
        let mut labels: Vec<EffectId> = self.inputs.clone();
        for (i, n) in self.nodes.iter().enumerate() {
            let id = format!("n{i}");
            out.push_str(&format!("  {id} [shape=box, label=\"{}\"];\n", n.kind.label()));
            let w = word.len();
            let start = w.saturating_sub(n.pos + n.ins.len());
            let end = (start + n.ins.len()).min(w);
            for k in start..end {
                edges.push(format!("  {} -> {id} [label=\"{}\"];\n", word[k], labels[k]));
            }
            word.splice(start..end, n.outs.iter().map(|_| id.clone()));
            labels.splice(start..end, n.outs.iter().cloned());
        }
        for (k, (src, f)) in word.iter().zip(&labels).enumerate() {
            out.push_str(&format!("  out{k} [shape=point];\n"));
            edges.push(format!("  {src} -> out{k} [label=\"{f}\"];\n"));
        }
        for e in edges {
            out.push_str(&e);
        }
        out.push_str("}\n");
        out
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_sexpr())
    }
}

fn names(w: &[EffectId]) -> Vec<String> {
    w.iter().map(|f| f.to_string()).collect()
}

/// Whether the upper cell lies strictly to the right of the lower one, so
/// that the two may be exchanged. Two zero-width cells at the same point
/// are left alone.
pub fn exchangeable(lower: &TwoCell, upper: &TwoCell) -> bool {
    if upper.ins.is_empty() && lower.outs.is_empty() && upper.pos == lower.pos {
        return false;
    }
    upper.pos + upper.ins.len() <= lower.pos
}

/// Exchange nodes `i` and `i + 1`. The caller checks [`exchangeable`].
pub fn exchange(nodes: &mut [TwoCell], i: usize) {
    let (lower, upper) = (nodes[i].clone(), nodes[i + 1].clone());
    let mut moved_up = lower;
    moved_up.pos = moved_up.pos + upper.outs.len() - upper.ins.len();
    nodes[i] = upper;
    nodes[i + 1] = moved_up;
}

/// Sink every cell below its predecessors while it lies strictly to their
/// right; returns the number of exchanges.
fn right_normalize_in_place(nodes: &mut [TwoCell]) -> usize {
    let mut swaps = 0;
    for k in 1..nodes.len() {
        let mut j = k;
        while j > 0 && exchangeable(&nodes[j - 1], &nodes[j]) {
            exchange(nodes, j - 1);
            swaps += 1;
            j -= 1;
        }
    }
    swaps
}

pub fn right_normalize(d: &Diagram) -> Result<Diagram> {
    d.require_valid()?;
    let mut out = d.clone();
    right_normalize_in_place(&mut out.nodes);
    debug_assert!(out.validate());
    Ok(out)
}

/// The equational rewrite applicable to nodes `i, i + 1`, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    /// Delete both cells.
    Cancel,
    /// Reassociate by giving the lower cell the upper cell's position.
    Assoc,
    /// Lower the two halves of a join separately.
    LowerJoin,
}

pub fn rule_at(nodes: &[TwoCell], i: usize) -> Option<Rule> {
    use CellKind::*;
    let (a, b) = (&nodes[i], &nodes[i + 1]);
    match (&a.kind, &b.kind) {
        (EtaAdj(l1, r1), Epsilon(l2, r2)) if l1 == l2 && r1 == r2 => {
            (a.pos + 1 == b.pos || b.pos + 1 == a.pos).then_some(Rule::Cancel)
        }
        (Eta(f), Mu(g)) if f == g => (b.pos == a.pos || b.pos + 1 == a.pos).then_some(Rule::Cancel),
        (Mu(f), Mu(g)) if f == g => (a.pos == b.pos + 1).then_some(Rule::Assoc),
        (Eta(f), Handler(_, g)) | (Eta(f), Lower(g)) if f == g => (a.pos == b.pos).then_some(Rule::Cancel),
        (Mu(f), Lower(g)) if f == g => (a.pos == b.pos).then_some(Rule::LowerJoin),
        (CoMu(f), CoEta(g)) if f == g => (b.pos == a.pos || b.pos == a.pos + 1).then_some(Rule::Cancel),
        (CoMu(f), CoMu(g)) if f == g => (b.pos == a.pos + 1).then_some(Rule::Assoc),
        _ => None,
    }
}

pub fn apply_rule(nodes: &mut Vec<TwoCell>, i: usize, rule: Rule) {
    match rule {
        Rule::Cancel => {
            nodes.drain(i..i + 2);
        }
        Rule::LowerJoin => {
            let f = nodes[i + 1].ins[0].clone();
            nodes[i] = TwoCell::new(nodes[i].pos, CellKind::Lower(f.clone()));
            nodes[i + 1] = TwoCell::new(nodes[i + 1].pos, CellKind::Lower(f));
        }
        Rule::Assoc => {
            if matches!(nodes[i].kind, CellKind::Mu(_)) {
                nodes[i].pos = nodes[i + 1].pos;
            } else {
                nodes[i + 1].pos = nodes[i].pos;
            }
        }
    }
}

/// Equational normal form, with step counts.
pub fn eq_normalize_counted(d: &Diagram) -> Result<(Diagram, Steps)> {
    d.require_valid()?;
    let mut nodes = d.nodes.clone();
    let mut steps = Steps::default();
    loop {
        steps.exchanges += right_normalize_in_place(&mut nodes);
        // Topmost redex first: a tower of joins then reassociates at its
        // root, one step per join.
        let hit = (0..nodes.len().saturating_sub(1)).rev().find_map(|i| rule_at(&nodes, i).map(|r| (i, r)));
        match hit {
            Some((i, r)) => {
                apply_rule(&mut nodes, i, r);
                steps.equational += 1;
            }
            None => break,
        }
    }
    let out = Diagram { inputs: d.inputs.clone(), nodes };
    debug_assert!(out.validate());
    Ok((out, steps))
}

pub fn eq_normalize(d: &Diagram) -> Result<Diagram> {
    eq_normalize_counted(d).map(|(d, _)| d)
}

pub fn diagrams_equal(a: &Diagram, b: &Diagram) -> Result<bool> {
    Ok(eq_normalize(a)? == eq_normalize(b)?)
}
