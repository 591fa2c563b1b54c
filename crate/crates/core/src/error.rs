use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("design matrix is rank deficient (reciprocal condition {rcond:.3e})")]
    RankDeficient { rcond: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("bandwidth {bandwidth} must be smaller than the sample size {t}")]
    BandwidthTooLarge { bandwidth: usize, t: usize },
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("degenerate fit: residual sum of squares is zero")]
    DegenerateFit,
    #[error("degenerate regression: {0}")]
    DegenerateRegression(String),

    #[error("empty input")]
    EmptyFile,
    #[error("gap in years between {previous} and {next}")]
    GapInYears { previous: i32, next: i32 },
    #[error("non-numeric cell at line {line}, column `{column}`: {value:?}")]
    NonNumericCell { line: usize, column: String, value: String },
    #[error("duplicate column `{0}`")]
    DuplicateColumn(String),
    #[error("malformed csv: {0}")]
    MalformedCsv(String),
    #[error("series too short: need {needed} observations, have {have}")]
    SeriesTooShort { needed: usize, have: usize },
    #[error("break index {tb} outside 1..{t}")]
    BreakOutOfRange { tb: usize, t: usize },
    #[error("series are not aligned: {0}")]
    AlignmentMismatch(String),
    #[error("unknown column `{0}`")]
    UnknownColumn(String),

    #[error("trimming fraction {0} outside the admissible range")]
    TrimOutOfRange(f64),
    #[error("insufficient sample: {0}")]
    InsufficientSample(String),
    #[error("long-run denominator 1 - sum(own lags) = {0:.3e} is numerically zero")]
    UnitRootDenominator(f64),
    #[error("zero variance")]
    ZeroVariance,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid simulation spec: {0}")]
    InvalidSpec(String),

    #[error("invalid configuration: {0}")]
    Validation(String),
    #[error("malformed expectations: {0}")]
    MalformedExpectations(String),
    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },
    #[error("malformed payload: {0}")]
    MalformedPayload(String),
    #[error("i/o failure: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
