use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse failure classes; the CLI maps these onto exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    /// Input is well formed but violates a precondition (non-normal, non-real,
    /// constant term in a Briot-Bouquet right-hand side, ...).
    Validation,
    /// A structural identity that must hold failed (divisibility, unit
    /// required, singular ξ, ...).
    Invariant,
    /// Lexical or syntactic problem in an input file or literal.
    Parse,
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error("variable count mismatch: {left} vs {right}")]
    VarMismatch { left: usize, right: usize },

    #[error("inner series has a nonzero constant term")]
    NonzeroConstant,

    #[error("series is not a unit: its constant term is zero")]
    NotAUnit,

    #[error("implicit equation is not a contraction: the linear coefficient in the unknown is {0}")]
    NotAContraction(String),

    #[error("fixed-point iteration did not stabilize after {0} steps")]
    Divergence(usize),

    #[error("not divisible by {var}^{power}: offending monomial {monomial}")]
    Divisibility { var: String, power: u32, monomial: String },

    #[error("series truncation exhausted: {0}")]
    TruncationExhausted(String),

    #[error("not a conjugation-symmetric variable layout ({0} variables)")]
    NotCrLayout(usize),

    #[error("normality violation at monomial {0}")]
    NotNormal(String),

    #[error("reality violation: coefficient of {monomial} is {coeff}, its mirror {mirror} has {mirror_coeff}")]
    NotReal { monomial: String, coeff: String, mirror: String, mirror_coeff: String },

    #[error("hypersurface is Levi-flat at this truncation")]
    LeviFlat,

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("map is invalid: {0}")]
    InvalidMap(String),

    #[error("ξ is singular: {0}")]
    XiSingular(String),

    #[error("identity check failed: {0}")]
    IdentityFailed(String),

    #[error("numeric integration failed: {0}")]
    StepFailure(String),

    #[error("system is not closed at a frozen base point: {0}")]
    NotClosed(String),

    #[error("centering failed: {0}")]
    Centering(String),

    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("non-rational literal at line {line}, column {col}: {text}")]
    NonRational { line: usize, col: usize, text: String },

    #[error("arity mismatch: {0}")]
    Arity(String),

    #[error("i/o error on {path}: {msg}")]
    Io { path: String, msg: String },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse { .. } | Error::NonRational { .. } | Error::Arity(_) | Error::Io { .. } => {
                ErrorKind::Parse
            }
            Error::NotNormal(_)
            | Error::NotReal { .. }
            | Error::InvalidSystem(_)
            | Error::InvalidMap(_)
            | Error::LeviFlat
            | Error::Centering(_)
            | Error::NotClosed(_)
            | Error::VarMismatch { .. } => ErrorKind::Validation,
            _ => ErrorKind::Invariant,
        }
    }

    /// Shift a literal-relative position to a file-relative one.
    pub(crate) fn offset_position(self, line0: usize, col0: usize) -> Error {
        let shift = |line: usize, col: usize| {
            if line == 1 {
                (line0, col0 + col - 1)
            } else {
                (line0 + line - 1, col)
            }
        };
        match self {
            Error::Parse { line, col, msg } => {
                let (line, col) = shift(line, col);
                Error::Parse { line, col, msg }
            }
            Error::NonRational { line, col, text } => {
                let (line, col) = shift(line, col);
                Error::NonRational { line, col, text }
            }
            other => other,
        }
    }
}
