use thiserror::Error;

/// Errors produced by validation and by operations whose preconditions fail.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("edge `{edge}` refers to unknown vertex `{vertex}`")]
    DanglingEndpoint { edge: String, vertex: String },

    #[error("duplicate {kind} name `{name}`")]
    DuplicateName { kind: &'static str, name: String },

    #[error("group closure exceeded cap of {cap} elements; the generated group is likely infinite")]
    ClosureCapExceeded { cap: usize },

    #[error("generator `{generator}` violates range/source equivariance on edge `{edge}`")]
    EquivarianceViolation { generator: String, edge: String },

    #[error("cocycle law fails for elements `{left}`,`{right}` at edge `{edge}`")]
    CocycleViolation { left: String, right: String, edge: String },

    #[error("seed does not generate a maximal G-tail: {reason}")]
    NotATail { reason: String },

    #[error("vertex `{vertex}` is not singular")]
    NotSingular { vertex: String },

    #[error("operation requires a pseudo-free system; witness: {witness}")]
    NotPseudoFree { witness: String },

    #[error("essential central isotropy is violated: {witness}")]
    EssentialCentralityViolated { witness: String },

    #[error("factorization is not a bijection on composable pairs: {detail}")]
    FactorizationNotBijective { detail: String },

    #[error("associativity (cube) condition fails on triple {detail}")]
    CubeConditionFailed { detail: String },

    #[error("vertex `{vertex}` has no edge of color {color}; k-graphs must be source-free")]
    SourcePresent { vertex: String, color: usize },

    #[error("generator `{generator}` does not commute with the factorization square {detail}")]
    FactorizationEquivarianceViolation { generator: String, detail: String },

    #[error("malformed convergence query: {0}")]
    MalformedSequence(String),

    #[error("invalid system description: {0}")]
    Schema(String),

    #[error("{0}")]
    Unsupported(String),
}
