use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("malformed type: {0}")]
    MalformedType(String),

    #[error("functor {functor} does not apply to {ty}")]
    InapplicableFunctor { functor: String, ty: String },

    #[error("unknown effect {0}")]
    UnknownEffect(String),

    #[error("registry error: {0}")]
    Registry(String),

    #[error("entry {entry:?} does not type-check: {msg}")]
    TypeCheck { entry: String, msg: String },

    #[error("handler {handler} violates h . eta = id: {msg}")]
    HandlerLaw { handler: String, msg: String },

    #[error("model error: {0}")]
    Model(String),

    #[error("functor {functor} lacks the {needed} capability")]
    Capability { functor: String, needed: &'static str },

    #[error("evaluation error: {0}")]
    Eval(String),

    #[error("value shape mismatch: {0}")]
    Shape(String),

    #[error("unknown token {token:?} at position {position}")]
    UnknownToken { token: String, position: usize },

    #[error("derivation index {index} out of range ({available} available)")]
    IndexOutOfRange { index: usize, available: usize },

    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }

    pub(crate) fn eval(msg: impl Into<String>) -> Self {
        Error::Eval(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    /// Process exit code for command-line front ends: 2 for syntax errors in
    /// input files, 4 for unknown tokens, 5 for out-of-range derivation
    /// indices, 3 for everything semantic.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } => 2,
            Error::UnknownToken { .. } => 4,
            Error::IndexOutOfRange { .. } => 5,
            _ => 3,
        }
    }
}
