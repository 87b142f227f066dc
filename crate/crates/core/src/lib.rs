//! Effect-driven composition of typed denotations.

pub mod chart;
pub mod diagram;
pub mod error;
pub mod eval;
pub mod layout;
pub mod lexicon;
pub mod model;
pub mod modes;
pub mod render;
pub mod sexpr;
pub mod term;
pub mod typecheck;
pub mod types;
pub mod value;

pub use error::{Error, Result};
pub use model::{load_model, Entity, Model};
pub use term::{EffOp, Term};
pub use types::{EffectId, Registry, Ty};
pub use value::Value;
pub use lexicon::{load_language, LexEntry, Lexicon};
pub use chart::{derivation_term, handle, parse, Chart, Derivation, ParseOptions, Syntax};
pub use modes::{enumerate_modes, mode_denotation, prune, Mode, ModeSeq};
pub use diagram::{diagrams_equal, eq_normalize, right_normalize, CellKind, Diagram, TwoCell};
pub use layout::from_derivation;
