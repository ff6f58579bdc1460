use thiserror::Error;

use crate::poly::VariableId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("valuation has no value for variable `{0}`")]
    MissingVariable(VariableId),
    #[error("integer overflow during {0}")]
    Overflow(&'static str),
    #[error("cannot evaluate the empty polynomial")]
    EmptyPolynomial,
    #[error("variable `{0}` is not in the declared universe")]
    SupportNotInUniverse(VariableId),
    #[error("monomial extraction exceeded the cap of {cap} monomial slots")]
    CapExceeded { cap: usize },
    #[error("polynomial is not multilinear")]
    NotMultilinear,
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),

    #[error("permutation domains differ ({0} vs {1})")]
    DomainMismatch(usize, usize),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid conjugacy class: {0}")]
    InvalidSpec(String),
    #[error("permutation is not in the required class")]
    NotInClass,

    #[error("scale exceeded: {0}")]
    ScaleExceeded(String),
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("not a rectangle: {0}")]
    NotARectangle(String),
    #[error("invalid order k = {0}")]
    InvalidK(usize),
    #[error("permutation does not map C onto its complement")]
    NotInSc,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("not a Hamiltonian cycle: {0}")]
    NotHamiltonian(String),
    #[error("cyclic product of the sequence is not a single cycle")]
    ProductNotSingleCycle,
    #[error("cycle is not nice: {0}")]
    NotNice(String),
    #[error("invalid path decomposition: {0}")]
    DecompositionInvalid(String),
    #[error("decomposition width {width} exceeds the supported maximum {max}")]
    WidthExceeded { width: usize, max: usize },
    #[error("graph has no Hamiltonian cycle")]
    NoHamiltonianCycle,
    #[error("graph has no spanning out-tree")]
    NotConnected,

    #[error("rectangle is not balanced: {0}")]
    NotBalanced(String),
    #[error("precondition unmet: {0}")]
    PreconditionUnmet(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors that signal an instance beyond the supported scale.
    pub fn is_scale(&self) -> bool {
        matches!(
            self,
            Error::CapExceeded { .. } | Error::ScaleExceeded(_) | Error::WidthExceeded { .. }
        )
    }
}
