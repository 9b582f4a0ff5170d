use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Bad user configuration: empty level sets, coarse noise steps, unknown scenario keys.
    #[error("configuration error: {0}")]
    Config(String),
    /// An API used outside its contract: dimension or basis mismatch, bad quantum numbers.
    #[error("usage error: {0}")]
    Usage(String),
    /// Atomic-data document failed schema or sanity checks.
    #[error("data error at `{key}`: {reason}")]
    Data { key: String, reason: String },
    /// The simulation left its validity envelope (e.g. Fock truncation overflow).
    #[error("simulation error: {0}")]
    Simulation(String),
    /// Approximation invalid for the requested field geometry.
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    /// Near-resonant denominator in the off-resonant loss sum.
    #[error("validity error: {0}")]
    Validity(String),
    #[error("fit error: {0}")]
    Fit(String),
    #[error("degenerate separation: {0}")]
    Degeneracy(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn data(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Data {
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// Prefixes the message with the pipeline stage that raised it, keeping the kind.
    pub fn in_stage(self, stage: &str) -> Self {
        match self {
            Error::Config(m) => Error::Config(format!("{stage}: {m}")),
            Error::Usage(m) => Error::Usage(format!("{stage}: {m}")),
            Error::Simulation(m) => Error::Simulation(format!("{stage}: {m}")),
            Error::DegenerateGeometry(m) => Error::DegenerateGeometry(format!("{stage}: {m}")),
            Error::Validity(m) => Error::Validity(format!("{stage}: {m}")),
            Error::Fit(m) => Error::Fit(format!("{stage}: {m}")),
            Error::Degeneracy(m) => Error::Degeneracy(format!("{stage}: {m}")),
            other => other,
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Usage(_) | Error::Data { .. } | Error::Io { .. } => 2,
            Error::Simulation(_)
            | Error::DegenerateGeometry(_)
            | Error::Validity(_)
            | Error::Degeneracy(_) => 3,
            Error::Fit(_) => 4,
        }
    }
}
