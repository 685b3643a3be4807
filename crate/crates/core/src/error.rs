use thiserror::Error;

pub type Result<T, E = ArspError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum ArspError {
    #[error("preference region is empty")]
    EmptyRegion,
    #[error("preference region has {count} vertices, more than the cap of {cap}")]
    TooManyVertices { count: usize, cap: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{} possible worlds exceed the enumeration cap of {cap}", world_text(*worlds))]
    TooManyWorlds { worlds: u128, cap: u128 },
    #[error("operation requires d = 2, dataset has d = {0}")]
    NotPlanar(usize),
    #[error("profile mismatch: {0}")]
    ProfileMismatch(String),
    #[error("bad parameter: {0}")]
    BadParam(String),
    #[error("bad mapping: {0}")]
    BadMapping(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// World counts saturate at `u128::MAX`.
fn world_text(worlds: u128) -> String {
    if worlds == u128::MAX {
        "over 1e38".into()
    } else {
        worlds.to_string()
    }
}

impl ArspError {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        ArspError::Parse {
            line,
            msg: msg.into(),
        }
    }
}
