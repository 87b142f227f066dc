//! Diagram generators and a brute-force reduction explorer.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use effparse_core::diagram::{apply_rule, exchange, exchangeable, rule_at};
use effparse_core::{CellKind, Diagram, EffectId, TwoCell};
use rand::seq::SliceRandom;
use rand::Rng;

pub type Nodes = Vec<TwoCell>;

pub fn id(s: &str) -> EffectId {
    EffectId::new(s)
}

/// Every state reachable by one exchange or one equational rule.
pub fn successors(nodes: &Nodes) -> Vec<Nodes> {
    let mut out = Vec::new();
    for i in 0..nodes.len().saturating_sub(1) {
        if exchangeable(&nodes[i], &nodes[i + 1]) {
            let mut n = nodes.clone();
            exchange(&mut n, i);
            out.push(n);
        }
        if let Some(r) = rule_at(nodes, i) {
            let mut n = nodes.clone();
            apply_rule(&mut n, i, r);
            out.push(n);
        }
    }
    out
}

/// End points of all maximal reduction sequences from `nodes`.
pub fn terminals(nodes: &Nodes, memo: &mut HashMap<Nodes, BTreeSet<Nodes>>) -> BTreeSet<Nodes> {
    if let Some(t) = memo.get(nodes) {
        return t.clone();
    }
    let next = successors(nodes);
    let result = if next.is_empty() {
        BTreeSet::from([nodes.clone()])
    } else {
        let mut acc = BTreeSet::new();
        for n in &next {
            acc.extend(terminals(n, memo));
        }
        acc
    };
    memo.insert(nodes.clone(), result.clone());
    result
}

/// Two monads `T`, `U`, the adjunction `L ⊣ R`, and handlers on `T`.
pub fn kinds() -> Vec<CellKind> {
    let (t, u, l, r) = (id("T"), id("U"), id("L"), id("R"));
    vec![
        CellKind::Eta(t.clone()),
        CellKind::Eta(u.clone()),
        CellKind::Mu(t.clone()),
        CellKind::Mu(u),
        CellKind::Handler("h".into(), t.clone()),
        CellKind::Lower(t),
        CellKind::EtaAdj(l.clone(), r.clone()),
        CellKind::Epsilon(l, r),
    ]
}

pub const ALPHABET: [&str; 4] = ["T", "U", "L", "R"];

/// All cells that fit on top of `word` without exceeding `max_width`.
pub fn placements(word: &[EffectId], kinds: &[CellKind], max_width: usize) -> Vec<(TwoCell, Vec<EffectId>)> {
    let mut out = Vec::new();
    for k in kinds {
        let c0 = TwoCell::new(0, k.clone());
        if c0.ins.len() > word.len() || word.len() - c0.ins.len() + c0.outs.len() > max_width {
            continue;
        }
        for pos in 0..=word.len() - c0.ins.len() {
            let start = word.len() - pos - c0.ins.len();
            if word[start..start + c0.ins.len()] == c0.ins[..] {
                let mut w = word.to_vec();
                w.splice(start..start + c0.ins.len(), c0.outs.iter().cloned());
                out.push((TwoCell::new(pos, k.clone()), w));
            }
        }
    }
    out
}

/// Every valid diagram with 1 to `max_cells` cells, at most two input
/// strings, and no interface wider than `max_width`.
pub fn all_diagrams(max_cells: usize, max_width: usize) -> Vec<Diagram> {
    let alphabet: Vec<EffectId> = ALPHABET.iter().map(|s| id(s)).collect();
    let mut inputs: Vec<Vec<EffectId>> = vec![vec![]];
    for a in &alphabet {
        inputs.push(vec![a.clone()]);
        for b in &alphabet {
            inputs.push(vec![a.clone(), b.clone()]);
        }
    }
    let kinds = kinds();
    let mut out = Vec::new();
    for inp in inputs {
        let mut frontier = vec![(Vec::<TwoCell>::new(), inp.clone())];
        for _ in 0..max_cells {
            let mut next = Vec::new();
            for (nodes, word) in &frontier {
                for (c, w) in placements(word, &kinds, max_width) {
                    let mut n = nodes.clone();
                    n.push(c);
                    next.push((n, w));
                }
            }
            out.extend(next.iter().map(|(n, _)| Diagram::new(inp.clone(), n.clone())));
            frontier = next;
        }
    }
    out
}

/// A random valid diagram with exactly `cells` cells where possible.
pub fn random_diagram(rng: &mut impl Rng, cells: usize, max_width: usize) -> Diagram {
    let kinds = kinds();
    let width = rng.gen_range(0..=2.min(max_width));
    let inputs: Vec<EffectId> = (0..width).map(|_| id(ALPHABET.choose(rng).unwrap())).collect();
    let mut word = inputs.clone();
    let mut nodes = Vec::new();
    for _ in 0..cells {
        let options = placements(&word, &kinds, max_width);
        let Some((c, w)) = options.choose(rng).cloned() else { break };
        nodes.push(c);
        word = w;
    }
    Diagram::new(inputs, nodes)
}

/// Families of diagrams with `n` cells, for scaling measurements.
pub fn family(name: &str, n: usize) -> Diagram {
    let (t, l, r) = (id("T"), id("L"), id("R"));
    let k = n / 2;
    match name {
        // η then μ on a single string, repeated.
        "units" => Diagram::new(
            vec![t.clone()],
            (0..k).flat_map(|_| [TwoCell::new(0, CellKind::Eta(t.clone())), TwoCell::new(0, CellKind::Mu(t.clone()))]).collect(),
        ),
        // Zigzags on a right adjoint string.
        "snakes" => Diagram::new(
            vec![r.clone()],
            (0..k)
                .flat_map(|_| [TwoCell::new(1, CellKind::EtaAdj(l.clone(), r.clone())), TwoCell::new(0, CellKind::Epsilon(l.clone(), r.clone()))])
                .collect(),
        ),
        // A left-nested tower of joins.
        "joins" => Diagram::new(vec![t.clone(); n + 1], (0..n).map(|i| TwoCell::new(n - 1 - i, CellKind::Mu(t.clone()))).collect()),
        // Units created first and joined from the left, so every
        // cancellation waits on exchanges.
        "exchanges" => {
            let mut nodes: Vec<TwoCell> = (0..k).map(|_| TwoCell::new(0, CellKind::Eta(t.clone()))).collect();
            nodes.extend((0..k).map(|i| TwoCell::new(k - 1 - i, CellKind::Mu(t.clone()))));
            Diagram::new(vec![t.clone()], nodes)
        }
        other => panic!("unknown family {other}"),
    }
}

pub const FAMILIES: [&str; 4] = ["units", "snakes", "joins", "exchanges"];
