//! Text and DOT renderings of derivation trees.

use std::fmt::Write;

use crate::chart::{derivation_term, Derivation};
use crate::error::Result;
use crate::eval::Evaluator;

/// Evaluate-and-show for one node.
fn show_value(ev: &Evaluator, d: &Derivation) -> Result<String> {
    let t = derivation_term(ev.registry, d)?;
    let v = ev.eval(&t, &Default::default())?;
    Ok(ev.observe(d.ty(), v)?.show(ev.model).to_string())
}

/// Node label without the value: type, then the mode sequence, surface
/// form or handler.
pub fn node_label(d: &Derivation) -> String {
    match d {
        Derivation::Leaf { surface, ty, .. } => format!("{ty}  {surface:?}"),
        Derivation::Node { ty, modes, .. } => format!("{ty}  {modes}"),
        Derivation::Handle { ty, handler, .. } => format!("{ty}  handle {handler}"),
    }
}

fn children(d: &Derivation) -> Vec<&Derivation> {
    match d {
        Derivation::Leaf { .. } => vec![],
        Derivation::Node { left, right, .. } => vec![left, right],
        Derivation::Handle { child, .. } => vec![child],
    }
}

/// An indented tree, two spaces per level. With an evaluator, each node
/// also shows its observed value after `=`.
pub fn tree_text(d: &Derivation, eval: Option<&Evaluator>) -> Result<String> {
    let mut out = String::new();
    text_into(d, eval, 0, &mut out)?;
    Ok(out)
}

fn text_into(d: &Derivation, eval: Option<&Evaluator>, depth: usize, out: &mut String) -> Result<()> {
    let _ = write!(out, "{:width$}{}", "", node_label(d), width = depth * 2);
    if let Some(ev) = eval {
        let _ = write!(out, "  = {}", show_value(ev, d)?);
    }
    out.push('\n');
    for c in children(d) {
        text_into(c, eval, depth + 1, out)?;
    }
    Ok(())
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\n")
}

/// The tree as a DOT digraph, root at the top.
pub fn tree_dot(d: &Derivation, eval: Option<&Evaluator>) -> Result<String> {
    let mut out = String::from("digraph derivation {\n  node [shape=box, fontname=\"Helvetica\"];\n");
    let mut next = 0;
    dot_into(d, eval, &mut next, &mut out)?;
    out.push_str("}\n");
    Ok(out)
}

fn dot_into(d: &Derivation, eval: Option<&Evaluator>, next: &mut usize, out: &mut String) -> Result<usize> {
    let id = *next;
    *next += 1;
    let mut label = node_label(d);
    if let Some(ev) = eval {
        label = format!("{label}\n= {}", show_value(ev, d)?);
    }
    let _ = writeln!(out, "  d{id} [label=\"{}\"];", escape(&label));
    for c in children(d) {
        let cid = dot_into(c, eval, next, out)?;
        let _ = writeln!(out, "  d{id} -> d{cid};");
    }
    Ok(id)
}
