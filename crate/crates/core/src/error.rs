use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("action {action} outside [{lower}, {upper}]")]
    ActionOutOfRange { action: i64, lower: i64, upper: i64 },

    #[error("requested {requested} games but the population has {available}")]
    SampleTooLarge { requested: usize, available: usize },

    #[error("equilibrium enumeration unresolved: {0}")]
    Unresolved(String),

    #[error("logit tracing failed to converge at alpha = {alpha}")]
    NoConvergence { alpha: f64 },

    #[error("backend unavailable: {0}")]
    BackendUnavailable(String),

    #[error("every response for setting {setting} was invalid")]
    AllResponsesInvalid { setting: String },

    #[error("distributions refer to different settings or action sets")]
    MismatchedSettings,

    #[error("model puts zero mass on action index {index} that the reference supports")]
    SupportViolation { index: usize },

    #[error("parameter search budget exhausted after {evaluations} evaluations (best {best_objective})")]
    BudgetExhausted { evaluations: usize, best_objective: f64, best_point: Vec<i64> },

    #[error("model assigns zero likelihood to observed action {action} in game {game}")]
    ZeroLikelihood { game: String, action: String },

    #[error("all values are zero")]
    AllZeros,

    #[error("design matrix is rank deficient")]
    RankDeficient,

    #[error("no distribution for game {game} under model {model}")]
    MissingModelDistribution { game: String, model: String },

    #[error("line {line}: {message}")]
    MalformedRow { line: usize, message: String },

    #[error("duplicate response for game {game}, subject {subject}")]
    DuplicateResponse { game: String, subject: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
