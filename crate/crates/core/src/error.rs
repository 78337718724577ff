use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("non-finite amplitude or matrix entry")]
    NonFinite,
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("index {index} out of range for length {len}")]
    BadIndex { index: usize, len: usize },
    #[error("unknown basis label `{0}`")]
    UnknownLabel(String),
    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("not unitary: {0}")]
    NotUnitary(String),
    #[error("spectrum has {vectors} eigenvectors for a space of dimension {dim}")]
    IncompleteSpectrum { vectors: usize, dim: usize },
    #[error("vectors {i} and {j} are not orthonormal (|overlap| = {overlap})")]
    NonOrthonormal { i: usize, j: usize, overlap: f64 },
    #[error("factor index {index} out of range for {factors} factors")]
    BadFactorIndex { index: usize, factors: usize },

    #[error("eigenbasis is not orthonormal: {0}")]
    NonOrthonormalBasis(String),
    #[error("eigenbasis has {vectors} vectors for a system of dimension {dim}")]
    IncompleteBasis { vectors: usize, dim: usize },
    #[error("row {l} of d for block {k} has squared norm {norm}, expected 1")]
    BadDCoeffRow { k: usize, l: usize, norm: f64 },
    #[error("mode mismatch: {0}")]
    ModeMismatch(String),

    #[error("pre-selection is impossible (probability {prob:e})")]
    ImpossibleSelection { prob: f64 },
    #[error("post-selection is impossible (probability {prob:e})")]
    ImpossiblePostSelection { prob: f64 },
    #[error("empty ensemble: no outcome is consistent with both selections (denominator {denominator:e})")]
    EmptyEnsemble { denominator: f64 },
    #[error("unknown outcome tag `{0}`")]
    UnknownOutcomeTag(String),

    #[error("process {0} needs a time-reversal operator but the scenario has none")]
    MissingThetaForProcess(String),

    #[error("parse error at {line}:{col}: {message} (near `{token}`)")]
    Parse { line: usize, col: usize, message: String, token: String },
    #[error("semantic error at {line}:{col}: {message}")]
    Semantic { line: usize, col: usize, message: String },
    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),

    #[error("{stage}: {source}")]
    Stage { stage: String, source: Box<Error> },
}

impl Error {
    /// Attach a pipeline stage name to an error, keeping the innermost cause.
    pub fn at(self, stage: &str) -> Error {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage { stage: stage.to_string(), source: Box::new(e) },
        }
    }

    /// The innermost error, with stage wrappers stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }

    /// (line, column) for located errors.
    pub fn location(&self) -> Option<(usize, usize)> {
        match self.root() {
            Error::Parse { line, col, .. } | Error::Semantic { line, col, .. } => Some((*line, *col)),
            _ => None,
        }
    }
}

pub(crate) trait StageExt<T> {
    fn stage(self, stage: &str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &str) -> Result<T> {
        self.map_err(|e| e.at(stage))
    }
}
