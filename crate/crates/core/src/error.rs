use thiserror::Error;

/// Errors raised by the allocation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown {kind} id {id}")]
    Lookup { kind: &'static str, id: usize },

    #[error("outage capacity inversion did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("assignment invariant violated: channel {channel} held by {holders} tenants")]
    ColumnSum { channel: usize, holders: usize },

    #[error("preallocated set of tenant {tenant} has {size} channels, above the cap of {cap}")]
    PreallocTooLarge {
        tenant: usize,
        size: usize,
        cap: usize,
    },

    #[error("solver node budget of {budget} exhausted")]
    NodeBudget { budget: u64 },

    #[error("program has {vars} variables, limit is {limit}")]
    TooManyVariables { vars: usize, limit: usize },

    #[error("empty group: {0}")]
    EmptyGroup(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
