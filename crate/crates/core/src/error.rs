use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("structural error: {0}")]
    Structural(String),
    #[error("parse error at column {col}: {msg}")]
    Parse { col: usize, msg: String },
    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
    #[error("undeclared name `{0}`")]
    UnknownName(String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("singular: {0}")]
    Singular(String),
    #[error("division by zero: {0}")]
    DivisionByZero(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("no admissible parameter values: {0}")]
    EmptyAdmissible(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub fn context(self, ctx: impl Into<String>) -> Error {
        Error::Context { context: ctx.into(), source: Box::new(self) }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
