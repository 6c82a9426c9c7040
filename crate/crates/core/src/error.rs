use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Input,
    EmptyResult,
    Numerical,
    Degenerate,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("citation references unknown paper ids: {}", ids.join(", "))]
    DanglingCitation { ids: Vec<String> },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid shape: {0}")]
    InvalidShape(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("every document was removed during preprocessing")]
    AllDocumentsRemoved,
    #[error("no token reaches the minimum document count")]
    EmptyVocabulary,
    #[error("no comparable pairs (no pair has a citation in either direction)")]
    NoComparablePairs,

    #[error("document {doc} has zero length")]
    ZeroLengthDocument { doc: usize },
    #[error("row {index} is identically zero")]
    ZeroRow { index: usize },
    #[error("leading singular vector has a near-zero entry at word {word} ({value:e})")]
    DegenerateLeadVector { word: usize, value: f64 },
    #[error("matrix is numerically rank deficient (sigma_K / sigma_1 = {ratio:e})")]
    RankDeficient { ratio: f64 },
    #[error("linear system is singular")]
    SingularSystem,

    #[error("need at least {k} points for vertex hunting, got {points}")]
    TooFewPoints { points: usize, k: usize },
    #[error("selected vertices are nearly affinely dependent (condition number {condition:e})")]
    CollapsedVertices { condition: f64 },
    #[error("simplex is degenerate (condition number {condition:e})")]
    DegenerateSimplex { condition: f64 },
    #[error("weight column {column} is all zero after clipping")]
    AllZeroSolution { column: usize },
    #[error("paper {paper} has no journal")]
    UnknownJournal { paper: String },
    #[error("comparison graph is disconnected ({} components)", components.len())]
    DisconnectedComparisonGraph { components: Vec<Vec<String>> },
    #[error("complete separation: {entity} {kind} every comparison")]
    Separation { entity: String, kind: &'static str },
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        use Error::*;
        match self {
            Parse { .. }
            | Io { .. }
            | DanglingCitation { .. }
            | InvalidArgument(_)
            | InvalidShape(_)
            | ShapeMismatch(_) => ErrorCategory::Input,
            AllDocumentsRemoved | EmptyVocabulary | NoComparablePairs => ErrorCategory::EmptyResult,
            ZeroLengthDocument { .. }
            | ZeroRow { .. }
            | DegenerateLeadVector { .. }
            | RankDeficient { .. }
            | SingularSystem => ErrorCategory::Numerical,
            TooFewPoints { .. }
            | CollapsedVertices { .. }
            | DegenerateSimplex { .. }
            | AllZeroSolution { .. }
            | UnknownJournal { .. }
            | DisconnectedComparisonGraph { .. }
            | Separation { .. } => ErrorCategory::Degenerate,
        }
    }

    pub(crate) fn parse(
        source_name: impl Into<String>,
        line: usize,
        message: impl Into<String>,
    ) -> Self {
        Error::Parse {
            source_name: source_name.into(),
            line,
            message: message.into(),
        }
    }
}
