//! Command-line front end: parse sentences, evaluate them, and draw and
//! compare their effect diagrams.
//!
//! Exit codes: 0 success, 1 no parse, 2 malformed input file or usage,
//! 3 semantic error, 4 unknown token, 5 derivation index out of range.

use std::fmt;
use std::io::{self, BufRead, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use effparse_core::eval::Evaluator;
use effparse_core::render::{tree_dot, tree_text};
use effparse_core::{
    diagrams_equal, eq_normalize, from_derivation, handle, parse, Derivation, Diagram, Error, Lexicon, Model,
    ParseOptions, Syntax,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO_PARSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Render {
    Text,
    Dot,
}

#[derive(Debug, Parser)]
#[command(name = "effparse", version, about = "Effect-driven semantic parsing")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Language file: functors, handlers and lexical entries.
    #[arg(long, global = true)]
    pub language: Option<PathBuf>,
    /// Model file: entities, predicates, assignment and state.
    #[arg(long, global = true)]
    pub model: Option<PathBuf>,
    /// Context-free grammar over lexical categories.
    #[arg(long, global = true)]
    pub syntax: Option<PathBuf>,
    /// Show every derivation instead of the first.
    #[arg(long, global = true)]
    pub all_parses: bool,
    #[arg(long, global = true, default_value_t = 64, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_derivations: u64,
    #[arg(long, global = true, value_enum, default_value_t = Render::Text)]
    pub render: Render,
    /// Put diagrams in equational normal form.
    #[arg(long, global = true)]
    pub normalize: bool,
    /// Show the value of every node.
    #[arg(long, global = true)]
    pub eval: bool,
    /// Override the mode budget per combination.
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Keep derivations the pruning rules would discard.
    #[arg(long, global = true)]
    pub no_prune: bool,
    /// Apply a handler to the outermost effect of every derivation.
    #[arg(long, global = true)]
    pub handle: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print derivation trees.
    Parse { sentence: Vec<String> },
    /// Print the type and value of each derivation.
    Eval { sentence: Vec<String> },
    /// Print the effect diagram of one derivation.
    Diagram {
        #[arg(long, default_value_t = 0)]
        index: usize,
        sentence: Vec<String>,
    },
    /// Normalize a serialized diagram read from a file, or stdin.
    Normalize { file: Option<PathBuf> },
    /// Decide whether two derivations have the same diagram normal form.
    Equal { i: usize, j: usize, sentence: Vec<String> },
    /// Load and validate the input files.
    Check,
}

#[derive(Debug)]
pub enum Failure {
    Core(Error),
    Usage(String),
    Io(io::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Core(e) => e.exit_code(),
            Failure::Usage(_) | Failure::Io(_) => EXIT_USAGE,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Core(e) => write!(f, "{e}"),
            Failure::Usage(m) => f.write_str(m),
            Failure::Io(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

pub type Outcome = Result<i32, Failure>;

/// Loaded inputs and flags for one invocation.
pub struct RunConfig {
    pub lexicon: Lexicon,
    pub model: Option<Model>,
    pub syntax: Option<Syntax>,
    pub options: ParseOptions,
    pub all_parses: bool,
    pub render: Render,
    pub normalize: bool,
    pub eval: bool,
    pub handle: Option<String>,
}

impl RunConfig {
    pub fn load(cli: &Cli) -> Result<RunConfig, Failure> {
        let lang = cli.language.as_ref().ok_or_else(|| Failure::Usage("--language is required".into()))?;
        let lexicon = Lexicon::load(lang)?;
        let model = cli.model.as_ref().map(Model::load).transpose()?;
        let syntax = cli.syntax.as_ref().map(Syntax::load).transpose()?;
        let options = ParseOptions {
            pruning: !cli.no_prune,
            max_derivations: cli.max_derivations as usize,
            budget: cli.budget,
            ..ParseOptions::default()
        };
        Ok(RunConfig {
            lexicon,
            model,
            syntax,
            options,
            all_parses: cli.all_parses,
            render: cli.render,
            normalize: cli.normalize,
            eval: cli.eval,
            handle: cli.handle.clone(),
        })
    }

    fn model(&self) -> Result<&Model, Failure> {
        self.model.as_ref().ok_or_else(|| Failure::Usage("--model is required to evaluate".into()))
    }

    /// Derivations of a sentence, with the requested handler applied.
    pub fn derivations(&self, sentence: &str) -> Result<Vec<Derivation>, Failure> {
        let ds = parse(sentence, &self.lexicon, self.syntax.as_ref(), &self.options)?;
        match &self.handle {
            None => Ok(ds),
            Some(h) => Ok(ds.iter().map(|d| handle(&self.lexicon.registry, d, h)).collect::<Result<_, _>>()?),
        }
    }

    fn nth(&self, sentence: &str, index: usize) -> Result<Derivation, Failure> {
        let mut ds = self.derivations(sentence)?;
        if index >= ds.len() {
            return Err(Error::IndexOutOfRange { index, available: ds.len() }.into());
        }
        Ok(ds.swap_remove(index))
    }

    fn shown(&self, ds: Vec<Derivation>) -> Vec<Derivation> {
        if self.all_parses {
            ds
        } else {
            ds.into_iter().take(1).collect()
        }
    }
}

pub fn cmd_parse(cfg: &RunConfig, sentence: &str, out: &mut dyn Write) -> Outcome {
    let ds = cfg.derivations(sentence)?;
    if ds.is_empty() {
        writeln!(out, "no parse")?;
        return Ok(EXIT_NO_PARSE);
    }
    let model = if cfg.eval { Some(cfg.model()?) } else { None };
    let ev = model.map(|m| Evaluator::new(&cfg.lexicon.registry, m));
    for (i, d) in cfg.shown(ds).iter().enumerate() {
        match cfg.render {
            Render::Text => write!(out, "#{i}\n{}", tree_text(d, ev.as_ref())?)?,
            Render::Dot => write!(out, "{}", tree_dot(d, ev.as_ref())?)?,
        }
    }
    Ok(EXIT_OK)
}

pub fn cmd_eval(cfg: &RunConfig, sentence: &str, out: &mut dyn Write) -> Outcome {
    let ds = cfg.derivations(sentence)?;
    if ds.is_empty() {
        writeln!(out, "no parse")?;
        return Ok(EXIT_NO_PARSE);
    }
    let model = cfg.model()?;
    let ev = Evaluator::new(&cfg.lexicon.registry, model);
    for (i, d) in cfg.shown(ds).iter().enumerate() {
        let t = effparse_core::derivation_term(&cfg.lexicon.registry, d)?;
        let v = ev.observe(d.ty(), ev.eval(&t, &Default::default())?)?;
        writeln!(out, "#{i}  {}  {}", d.ty(), v.show(model))?;
    }
    Ok(EXIT_OK)
}

fn write_diagram(cfg: &RunConfig, d: &Diagram, out: &mut dyn Write) -> Outcome {
    let d = if cfg.normalize { eq_normalize(d)? } else { d.clone() };
    match cfg.render {
        Render::Text => writeln!(out, "{}", d.to_sexpr())?,
        Render::Dot => write!(out, "{}", d.to_dot())?,
    }
    Ok(EXIT_OK)
}

pub fn cmd_diagram(cfg: &RunConfig, sentence: &str, index: usize, out: &mut dyn Write) -> Outcome {
    let d = cfg.nth(sentence, index)?;
    write_diagram(cfg, &from_derivation(&cfg.lexicon.registry, &d)?, out)
}

/// Normalize a serialized diagram. Needs no language file.
pub fn cmd_normalize(src: &str, render: Render, out: &mut dyn Write) -> Outcome {
    let d = Diagram::parse(src)?;
    let n = eq_normalize(&d)?;
    match render {
        Render::Text => writeln!(out, "{}", n.to_sexpr())?,
        Render::Dot => write!(out, "{}", n.to_dot())?,
    }
    Ok(EXIT_OK)
}

pub fn cmd_equal(cfg: &RunConfig, sentence: &str, i: usize, j: usize, out: &mut dyn Write) -> Outcome {
    let ds = cfg.derivations(sentence)?;
    for index in [i, j] {
        if index >= ds.len() {
            return Err(Error::IndexOutOfRange { index, available: ds.len() }.into());
        }
    }
    let reg = &cfg.lexicon.registry;
    let same = diagrams_equal(&from_derivation(reg, &ds[i])?, &from_derivation(reg, &ds[j])?)?;
    writeln!(out, "{}", if same { "equal" } else { "distinct" })?;
    Ok(EXIT_OK)
}

pub fn cmd_check(cfg: &RunConfig, out: &mut dyn Write) -> Outcome {
    let reg = &cfg.lexicon.registry;
    writeln!(
        out,
        "language: {} entries, {} functors, {} adjunctions, {} transformations",
        cfg.lexicon.entries.len(),
        reg.functors.len(),
        reg.adjunctions.len(),
        reg.nats.len()
    )?;
    if let Some(m) = &cfg.model {
        writeln!(out, "model: {} entities, {} predicates", m.entity_count(), m.predicates.len())?;
    }
    if let Some(s) = &cfg.syntax {
        let rules = s.binary.values().map(|v| v.len()).sum::<usize>() + s.unary.values().map(|v| v.len()).sum::<usize>();
        writeln!(out, "syntax: start {}, {} rules", s.start, rules)?;
    }
    writeln!(out, "ok")?;
    Ok(EXIT_OK)
}

/// The sentences named on the command line, or one per line of stdin.
fn sentences(words: &[String]) -> Result<Vec<String>, Failure> {
    if !words.is_empty() {
        return Ok(vec![words.join(" ")]);
    }
    let mut lines = Vec::new();
    for line in io::stdin().lock().lines() {
        lines.push(line?);
    }
    Ok(lines)
}

fn each(words: &[String], mut f: impl FnMut(&str) -> Outcome) -> Outcome {
    let mut code = EXIT_OK;
    for s in sentences(words)? {
        code = code.max(f(&s)?);
    }
    Ok(code)
}

/// Run one invocation, writing results to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Outcome {
    if let Command::Normalize { file } = &cli.command {
        let src = match file {
            Some(p) => std::fs::read_to_string(p)?,
            None => io::read_to_string(io::stdin())?,
        };
        return cmd_normalize(&src, cli.render, out);
    }
    let cfg = RunConfig::load(cli)?;
    match &cli.command {
        Command::Parse { sentence } => each(sentence, |s| cmd_parse(&cfg, s, out)),
        Command::Eval { sentence } => each(sentence, |s| cmd_eval(&cfg, s, out)),
        Command::Diagram { index, sentence } => each(sentence, |s| cmd_diagram(&cfg, s, *index, out)),
        Command::Equal { i, j, sentence } => each(sentence, |s| cmd_equal(&cfg, s, *i, *j, out)),
        Command::Check => cmd_check(&cfg, out),
        Command::Normalize { .. } => unreachable!(),
    }
}
