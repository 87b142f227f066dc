//! CKY chart parsing over combination modes, optionally intersected with a
//! syntactic context-free grammar.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap};
use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lexicon::{tokenize, LexEntry, Lexicon};
use crate::modes::{mode_budget, seq_denotation, Enumerator, Labelled, ModeSeq};
use crate::sexpr::parse_all;
use crate::term::{EffOp, Term};
use crate::types::{Registry, Ty};

/// Category used for every item when no syntax is supplied.
pub const ANY: &str = "*";

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Syntax {
    pub start: String,
    /// `(left, right)` to the categories they combine into.
    pub binary: BTreeMap<(String, String), BTreeSet<String>>,
    /// Child category to parent categories.
    pub unary: BTreeMap<String, BTreeSet<String>>,
}

impl Syntax {
    pub fn parse(src: &str) -> Result<Syntax> {
        let mut syn = Syntax::default();
        let mut first_lhs = None;
        for f in parse_all(src)? {
            let items = f.expect_list("a grammar form")?;
            let atoms = items
                .iter()
                .map(|x| x.expect_atom("a category"))
                .collect::<Result<Vec<_>>>()?;
            match atoms.as_slice() {
                ["start", s] => syn.start = s.to_string(),
                ["rule", lhs, x] => {
                    first_lhs.get_or_insert(lhs.to_string());
                    syn.unary.entry(x.to_string()).or_default().insert(lhs.to_string());
                }
                ["rule", lhs, x, y] => {
                    first_lhs.get_or_insert(lhs.to_string());
                    syn.binary.entry((x.to_string(), y.to_string())).or_default().insert(lhs.to_string());
                }
                _ => return Err(Error::parse(f.line(), format!("malformed grammar form {f}"))),
            }
        }
        if syn.start.is_empty() {
            syn.start = first_lhs.ok_or_else(|| Error::parse(1, "grammar has no rules"))?;
        }
        Ok(syn)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Syntax> {
        let src = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Registry(format!("cannot read {}: {e}", path.as_ref().display())))?;
        Syntax::parse(&src)
    }

    /// `cat` together with every category reachable through unary rules.
    fn closure(&self, cat: &str) -> BTreeSet<String> {
        let mut out = BTreeSet::from([cat.to_string()]);
        let mut todo = vec![cat.to_string()];
        while let Some(c) = todo.pop() {
            for p in self.unary.get(&c).into_iter().flatten() {
                if out.insert(p.clone()) {
                    todo.push(p.clone());
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Derivation {
    Leaf { surface: String, ty: Ty, term: Term, start: usize, end: usize },
    Node { ty: Ty, modes: ModeSeq, left: Arc<Derivation>, right: Arc<Derivation> },
    /// A handler applied to the outermost effect.
    Handle { ty: Ty, handler: String, child: Arc<Derivation> },
}

impl Derivation {
    pub fn leaf(entry: &LexEntry, start: usize, end: usize) -> Derivation {
        Derivation::Leaf { surface: entry.surface.clone(), ty: entry.ty.clone(), term: entry.term.clone(), start, end }
    }

    pub fn ty(&self) -> &Ty {
        match self {
            Derivation::Leaf { ty, .. } | Derivation::Node { ty, .. } | Derivation::Handle { ty, .. } => ty,
        }
    }

    /// Number of tree nodes plus the modes applied at each node.
    pub fn size(&self) -> usize {
        match self {
            Derivation::Leaf { .. } => 1,
            Derivation::Node { modes, left, right, .. } => modes.len() + left.size() + right.size(),
            Derivation::Handle { child, .. } => 1 + child.size(),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Derivation::Leaf { .. } => 1,
            Derivation::Node { left, right, .. } => 1 + left.node_count() + right.node_count(),
            Derivation::Handle { child, .. } => 1 + child.node_count(),
        }
    }

    /// Mode strings in pre-order; used as the deterministic sort key.
    pub fn signature(&self) -> String {
        match self {
            Derivation::Leaf { surface, .. } => format!("{surface:?}"),
            Derivation::Node { modes, left, right, .. } => {
                format!("[{modes} {} {}]", left.signature(), right.signature())
            }
            Derivation::Handle { handler, child, .. } => format!("[handle {handler} {}]", child.signature()),
        }
    }

    /// Check every node's type against a replay of its modes.
    pub fn replays(&self, reg: &Registry) -> bool {
        match self {
            Derivation::Leaf { .. } => true,
            Derivation::Node { ty, modes, left, right } => {
                crate::modes::replay(reg, modes, left.ty(), right.ty()).as_ref() == Some(ty)
                    && left.replays(reg)
                    && right.replays(reg)
            }
            Derivation::Handle { ty, handler, child } => {
                handled_type(reg, handler, child.ty()).ok().as_ref() == Some(ty) && child.replays(reg)
            }
        }
    }
}

fn handled_type(reg: &Registry, handler: &str, ty: &Ty) -> Result<Ty> {
    let h = reg
        .nat(handler)
        .filter(|n| n.is_handler)
        .ok_or_else(|| Error::eval(format!("unknown handler {handler}")))?;
    match ty {
        Ty::Eff(f, inner) if *f == h.source[0] => Ok((**inner).clone()),
        _ => Err(Error::eval(format!("handler {handler} handles {}, not the outer effect of {ty}", h.source[0]))),
    }
}

/// Apply a registered handler to the outermost effect of a derivation.
pub fn handle(reg: &Registry, d: &Derivation, handler: &str) -> Result<Derivation> {
    let ty = handled_type(reg, handler, d.ty())?;
    Ok(Derivation::Handle { ty, handler: handler.to_string(), child: Arc::new(d.clone()) })
}

/// The closed term denoted by a derivation.
pub fn derivation_term(reg: &Registry, d: &Derivation) -> Result<Term> {
    Ok(match d {
        Derivation::Leaf { term, .. } => term.clone(),
        Derivation::Node { modes, left, right, .. } => {
            Term::app2(seq_denotation(reg, modes)?, derivation_term(reg, left)?, derivation_term(reg, right)?)
        }
        Derivation::Handle { handler, child, .. } => {
            Term::op(EffOp::Handler(handler.clone()), vec![derivation_term(reg, child)?])
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Back {
    Lex(usize),
    Unary(String),
    /// Every listed mode sequence combines the two children into this item.
    Bin { split: usize, left: Key, right: Key, modes: Labelled },
}

type Key = (String, Ty);
type Cell = BTreeMap<Key, BTreeSet<Back>>;

#[derive(Debug, Clone)]
pub struct ParseOptions {
    pub pruning: bool,
    /// Unpacking cap.
    pub max_derivations: usize,
    /// Overrides the default mode budget when set.
    pub budget: Option<usize>,
    pub parallel: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions { pruning: true, max_derivations: 64, budget: None, parallel: true }
    }
}

/// A filled chart. `cells[i][len - 1]` covers tokens `i .. i + len`.
pub struct Chart<'l> {
    lex: &'l Lexicon,
    pub tokens: Vec<String>,
    cells: Vec<Vec<Cell>>,
    start: Option<String>,
    entries: Vec<(usize, usize, &'l LexEntry)>,
}

impl<'l> Chart<'l> {
    pub fn fill(lex: &'l Lexicon, tokens: &[String], syntax: Option<&Syntax>, opts: &ParseOptions) -> Result<Chart<'l>> {
        let tokens: Vec<String> = tokens.iter().map(|t| t.to_lowercase()).collect();
        let n = tokens.len();
        let mut cells: Vec<Vec<Cell>> = (0..n).map(|i| vec![Cell::new(); n - i]).collect();
        let mut covered = vec![false; n];
        let mut entries = Vec::new();
        for i in 0..n {
            for len in 1..=lex.max_entry_tokens.min(n - i) {
                for e in lex.lookup_seq(&tokens[i..i + len]) {
                    covered[i..i + len].iter_mut().for_each(|c| *c = true);
                    let idx = entries.len();
                    entries.push((i, i + len, e));
                    let cat = match syntax {
                        Some(_) => e.category.clone().unwrap_or_else(|| ANY.to_string()),
                        None => ANY.to_string(),
                    };
                    cells[i][len - 1].entry((cat, e.ty.clone())).or_default().insert(Back::Lex(idx));
                }
                if let Some(syn) = syntax {
                    close_unary(syn, &mut cells[i][len - 1]);
                }
            }
        }
        if let Some(p) = covered.iter().position(|c| !c) {
            return Err(Error::UnknownToken { token: tokens[p].clone(), position: p + 1 });
        }
        let reg = &lex.registry;
        let enumerator = Enumerator::new(reg, opts.pruning);
        for len in 2..=n {
            let budget = opts.budget.unwrap_or_else(|| mode_budget(reg, lex.max_effect_rank, len));
            let fill_one = |i: usize| -> Cell {
                let mut out = cells[i][len - 1].clone();
                for k in 1..len {
                    let left = &cells[i][k - 1];
                    let right = &cells[i + k][len - k - 1];
                    for ((lc, lt), _) in left {
                        for ((rc, rt), _) in right {
                            let parents: Vec<String> = match syntax {
                                None => vec![ANY.to_string()],
                                Some(syn) => syn
                                    .binary
                                    .get(&(lc.clone(), rc.clone()))
                                    .map(|s| s.iter().cloned().collect())
                                    .unwrap_or_default(),
                            };
                            if parents.is_empty() {
                                continue;
                            }
                            for (ty, modes) in enumerator.grouped(lt, rt, budget).iter() {
                                for p in &parents {
                                    out.entry((p.clone(), ty.clone())).or_default().insert(Back::Bin {
                                        split: i + k,
                                        left: (lc.clone(), lt.clone()),
                                        right: (rc.clone(), rt.clone()),
                                        modes: modes.clone(),
                                    });
                                }
                            }
                        }
                    }
                }
                if let Some(syn) = syntax {
                    close_unary(syn, &mut out);
                }
                out
            };
            let starts: Vec<usize> = (0..=n - len).collect();
            let filled: Vec<Cell> = if opts.parallel {
                starts.par_iter().map(|&i| fill_one(i)).collect()
            } else {
                starts.iter().map(|&i| fill_one(i)).collect()
            };
            for (i, cell) in filled.into_iter().enumerate() {
                cells[i][len - 1] = cell;
            }
        }
        Ok(Chart { lex, tokens, cells, start: syntax.map(|s| s.start.clone()), entries })
    }

    fn cell(&self, i: usize, j: usize) -> &Cell {
        &self.cells[i][j - i - 1]
    }

    /// Number of chart cells: one per span.
    pub fn cell_count(&self) -> usize {
        self.cells.iter().map(Vec::len).sum()
    }

    pub fn nonempty_cells(&self) -> usize {
        self.cells.iter().flatten().filter(|c| !c.is_empty()).count()
    }

    /// Packed items over all cells.
    pub fn item_count(&self) -> usize {
        self.cells.iter().flatten().map(BTreeMap::len).sum()
    }

    /// Back pointers over all cells: the size of the packed forest.
    pub fn back_count(&self) -> usize {
        self.cells.iter().flatten().flat_map(|c| c.values()).map(BTreeSet::len).sum()
    }

    fn root_keys(&self) -> Vec<&Key> {
        let n = self.tokens.len();
        if n == 0 {
            return Vec::new();
        }
        self.cell(0, n)
            .keys()
            .filter(|(c, _)| self.start.as_ref().map_or(true, |s| s == c))
            .collect()
    }

    /// Root types, deduplicated.
    pub fn root_types(&self) -> BTreeSet<Ty> {
        self.root_keys().into_iter().map(|(_, t)| t.clone()).collect()
    }

    /// Unpack the first `limit` derivations in signature order.
    pub fn derivations(&self, limit: usize) -> Vec<Derivation> {
        let n = self.tokens.len();
        let mut memo = HashMap::new();
        let mut all = Vec::new();
        for key in self.root_keys() {
            all.extend(self.unpack(0, n, key, limit, &mut memo).iter().cloned());
        }
        all.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
        all.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);
        all.into_iter().take(limit).map(|(_, d)| (*d).clone()).collect()
    }

    /// Lazily merges the sorted streams of every back pointer, so only
    /// the `limit` survivors are ever built. Signatures are prefix-free,
    /// which makes nested iteration over sorted children sorted as well.
    fn unpack(&self, i: usize, j: usize, key: &Key, limit: usize, memo: &mut Memo) -> Unpacked {
        let mk = (i, j, key.clone());
        if let Some(hit) = memo.get(&mk) {
            return hit.clone();
        }
        // Guards against unary cycles in the grammar.
        memo.insert(mk.clone(), Arc::new(Vec::new()));
        let mut streams = Vec::new();
        for back in self.cell(i, j).get(key).into_iter().flatten() {
            streams.push(match back {
                Back::Lex(idx) => {
                    let (s, e, entry) = self.entries[*idx];
                    let d = Derivation::leaf(entry, s, e);
                    Stream::List(Arc::new(vec![(d.signature(), Arc::new(d))]))
                }
                Back::Unary(child) => Stream::List(self.unpack(i, j, &(child.clone(), key.1.clone()), limit, memo)),
                Back::Bin { split, left, right, modes } => Stream::Pairs {
                    modes: modes.clone(),
                    ls: self.unpack(i, *split, left, limit, memo),
                    rs: self.unpack(*split, j, right, limit, memo),
                },
            });
        }
        let mut heap = BinaryHeap::new();
        for (s, stream) in streams.iter().enumerate() {
            if stream.has(0, 0, 0) {
                heap.push(Reverse(Cursor { parts: stream.parts(0, 0, 0), stream: s, at: (0, 0, 0) }));
            }
        }
        let mut out: Vec<(String, Arc<Derivation>)> = Vec::new();
        while out.len() < limit {
            let Some(Reverse(c)) = heap.pop() else { break };
            let stream = &streams[c.stream];
            let sig = c.parts.concat();
            // Equal signatures do not imply equal trees: one surface form
            // may have entries of several types.
            let d = stream.build(&key.1, c.at);
            if !out.iter().rev().take_while(|(s, _)| *s == sig).any(|(_, x)| *x == d) {
                out.push((sig, d));
            }
            if let Some((mi, li, ri)) = stream.next(c.at) {
                heap.push(Reverse(Cursor { parts: stream.parts(mi, li, ri), stream: c.stream, at: (mi, li, ri) }));
            }
        }
        let out = Arc::new(out);
        memo.insert(mk, out.clone());
        out
    }

    pub fn lexicon(&self) -> &'l Lexicon {
        self.lex
    }
}

type Unpacked = Arc<Vec<(String, Arc<Derivation>)>>;
type Memo = HashMap<(usize, usize, Key), Unpacked>;

/// The sorted derivations of one back pointer.
enum Stream {
    List(Unpacked),
    /// Mode sequence, then left child, then right child.
    Pairs { modes: Labelled, ls: Unpacked, rs: Unpacked },
}

impl Stream {
    fn has(&self, mi: usize, li: usize, ri: usize) -> bool {
        match self {
            Stream::List(xs) => li < xs.len(),
            Stream::Pairs { modes, ls, rs } => mi < modes.len() && li < ls.len() && ri < rs.len(),
        }
    }

    fn next(&self, (mi, li, ri): (usize, usize, usize)) -> Option<(usize, usize, usize)> {
        let at = match self {
            Stream::List(_) => (0, li + 1, 0),
            Stream::Pairs { rs, .. } if ri + 1 < rs.len() => (mi, li, ri + 1),
            Stream::Pairs { ls, .. } if li + 1 < ls.len() => (mi, li + 1, 0),
            Stream::Pairs { .. } => (mi + 1, 0, 0),
        };
        self.has(at.0, at.1, at.2).then_some(at)
    }

    /// The signature of an element, in pieces.
    fn parts(&self, mi: usize, li: usize, ri: usize) -> Vec<&str> {
        match self {
            Stream::List(xs) => vec![xs[li].0.as_str()],
            Stream::Pairs { modes, ls, rs } => vec!["[", &modes[mi].0, " ", &ls[li].0, " ", &rs[ri].0, "]"],
        }
    }

    fn build(&self, ty: &Ty, (mi, li, ri): (usize, usize, usize)) -> Arc<Derivation> {
        match self {
            Stream::List(xs) => xs[li].1.clone(),
            Stream::Pairs { modes, ls, rs } => Arc::new(Derivation::Node {
                ty: ty.clone(),
                modes: modes[mi].1.clone(),
                left: ls[li].1.clone(),
                right: rs[ri].1.clone(),
            }),
        }
    }
}

/// A position in one stream, ordered by its signature.
struct Cursor<'s> {
    parts: Vec<&'s str>,
    stream: usize,
    at: (usize, usize, usize),
}

impl Cursor<'_> {
    fn bytes(&self) -> impl Iterator<Item = u8> + '_ {
        self.parts.iter().flat_map(|p| p.bytes())
    }
}

impl Ord for Cursor<'_> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.bytes().cmp(other.bytes()).then(self.stream.cmp(&other.stream))
    }
}

impl PartialOrd for Cursor<'_> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Cursor<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Cursor<'_> {}

fn close_unary(syn: &Syntax, cell: &mut Cell) {
    let keys: Vec<Key> = cell.keys().cloned().collect();
    for (cat, ty) in keys {
        for parent in syn.closure(&cat) {
            if parent != cat {
                cell.entry((parent, ty.clone())).or_default().insert(Back::Unary(cat.clone()));
            }
        }
    }
}

/// Tokenize and parse a sentence, returning up to `opts.max_derivations`
/// derivations spanning the whole input.
pub fn parse(sentence: &str, lex: &Lexicon, syntax: Option<&Syntax>, opts: &ParseOptions) -> Result<Vec<Derivation>> {
    parse_tokens(&tokenize(sentence), lex, syntax, opts)
}

pub fn parse_tokens(tokens: &[String], lex: &Lexicon, syntax: Option<&Syntax>, opts: &ParseOptions) -> Result<Vec<Derivation>> {
    let chart = Chart::fill(lex, tokens, syntax, opts)?;
    Ok(chart.derivations(opts.max_derivations))
}
