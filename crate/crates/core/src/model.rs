//! Finite evaluation models.
//!
//! File format, one form per top-level item:
//!
//! ```text
//! (entity c1) (entity m1)
//! (pred cat 1 (c1))
//! (pred eats 2 (m1 c1))
//! (assignment c1)
//! (state)
//! ```

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sexpr::{parse_all, Sexp};

/// An entity, identified by its declaration index. The declaration order is
/// the total order used by the choice handlers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Entity(pub u32);

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Model {
    names: Vec<String>,
    index: HashMap<String, Entity>,
    /// `(name, arity)` to extension.
    pub predicates: BTreeMap<(String, usize), BTreeSet<Vec<Entity>>>,
    pub initial_assignment: Vec<Entity>,
    pub initial_state: Vec<Entity>,
}

impl Model {
    pub fn new() -> Self {
        Model::default()
    }

    pub fn add_entity(&mut self, name: &str) -> Result<Entity> {
        if self.index.contains_key(name) {
            return Err(Error::Model(format!("entity {name} declared twice")));
        }
        let e = Entity(self.names.len() as u32);
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), e);
        Ok(e)
    }

    pub fn entity(&self, name: &str) -> Result<Entity> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::Model(format!("undeclared entity {name}")))
    }

    pub fn name(&self, e: Entity) -> &str {
        self.names.get(e.0 as usize).map(String::as_str).unwrap_or("?")
    }

    pub fn entities(&self) -> impl Iterator<Item = Entity> + '_ {
        (0..self.names.len() as u32).map(Entity)
    }

    pub fn entity_count(&self) -> usize {
        self.names.len()
    }

    /// Set (or extend) a predicate's extension from entity names.
    pub fn add_fact(&mut self, pred: &str, args: &[&str]) -> Result<()> {
        let tuple = args.iter().map(|a| self.entity(a)).collect::<Result<Vec<_>>>()?;
        self.predicates.entry((pred.to_string(), args.len())).or_default().insert(tuple);
        Ok(())
    }

    /// Declare a predicate with an empty extension.
    pub fn declare_pred(&mut self, pred: &str, arity: usize) {
        self.predicates.entry((pred.to_string(), arity)).or_default();
    }

    pub fn holds(&self, pred: &str, args: &[Entity]) -> Result<bool> {
        match self.predicates.get(&(pred.to_string(), args.len())) {
            Some(ext) => Ok(ext.contains(args)),
            None => {
                if self.predicates.keys().any(|(p, _)| p == pred) {
                    Err(Error::eval(format!("predicate {pred} applied to {} argument(s): arity mismatch", args.len())))
                } else {
                    Err(Error::eval(format!("unknown predicate {pred}/{}", args.len())))
                }
            }
        }
    }

    /// Entities satisfying a unary predicate, in declaration order.
    pub fn extension1(&self, pred: &str) -> Vec<Entity> {
        self.predicates
            .get(&(pred.to_string(), 1))
            .map(|ext| ext.iter().map(|t| t[0]).collect())
            .unwrap_or_default()
    }

    pub fn parse(src: &str) -> Result<Model> {
        let mut m = Model::new();
        let forms = parse_all(src)?;
        // Entities first so that forms may appear in any order.
        for f in &forms {
            if f.head() == Some("entity") {
                let items = f.as_list().unwrap();
                if items.len() < 2 {
                    return Err(Error::parse(f.line(), "entity needs a name"));
                }
                for it in &items[1..] {
                    m.add_entity(it.expect_atom("an entity name")?)?;
                }
            }
        }
        for f in &forms {
            let items = f.expect_list("a model form")?;
            match f.head() {
                Some("entity") => {}
                Some("pred") => m.read_pred(f, items)?,
                Some("assignment") | Some("state") => {
                    let seq = items[1..]
                        .iter()
                        .map(|it| m.entity(it.expect_atom("an entity name")?))
                        .collect::<Result<Vec<_>>>()?;
                    if f.head() == Some("assignment") {
                        m.initial_assignment = seq;
                    } else {
                        m.initial_state = seq;
                    }
                }
                _ => return Err(Error::parse(f.line(), format!("unknown model form {f}"))),
            }
        }
        Ok(m)
    }

    fn read_pred(&mut self, f: &Sexp, items: &[Sexp]) -> Result<()> {
        if items.len() < 3 {
            return Err(Error::parse(f.line(), "pred needs a name and an arity"));
        }
        let name = items[1].expect_atom("a predicate name")?;
        let arity: usize = items[2]
            .expect_atom("an arity")?
            .parse()
            .map_err(|_| Error::parse(f.line(), "arity must be a natural number"))?;
        if self.predicates.contains_key(&(name.to_string(), arity)) {
            return Err(Error::Model(format!("predicate {name}/{arity} declared twice")));
        }
        self.declare_pred(name, arity);
        for t in &items[3..] {
            let tuple = t.expect_list("a tuple")?;
            if tuple.len() != arity {
                return Err(Error::Model(format!(
                    "tuple {t} of {name} has {} element(s), arity is {arity}",
                    tuple.len()
                )));
            }
            let names = tuple.iter().map(|x| x.expect_atom("an entity name")).collect::<Result<Vec<_>>>()?;
            self.add_fact(name, &names)?;
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Model> {
        let src = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Model(format!("cannot read {}: {e}", path.as_ref().display())))?;
        Model::parse(&src)
    }

    /// Serialize in the format read by [`Model::parse`].
    pub fn to_source(&self) -> String {
        let mut out = String::new();
        for n in &self.names {
            out.push_str(&format!("(entity {n})\n"));
        }
        for ((p, arity), ext) in &self.predicates {
            out.push_str(&format!("(pred {p} {arity}"));
            for t in ext {
                let names: Vec<_> = t.iter().map(|e| self.name(*e)).collect();
                out.push_str(&format!(" ({})", names.join(" ")));
            }
            out.push_str(")\n");
        }
        let seq = |s: &[Entity]| s.iter().map(|e| format!(" {}", self.name(*e))).collect::<String>();
        out.push_str(&format!("(assignment{})\n", seq(&self.initial_assignment)));
        out.push_str(&format!("(state{})\n", seq(&self.initial_state)));
        out
    }
}

/// Load a model file.
pub fn load_model(path: impl AsRef<Path>) -> Result<Model> {
    Model::load(path)
}
