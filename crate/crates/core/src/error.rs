use std::path::PathBuf;

use crate::fe_space::Field;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    Dimension {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("singular matrix: no usable pivot near row {row}{}", field_suffix(.field))]
    SingularMatrix { row: usize, field: Option<Field> },

    #[error("non-finite values in {0}")]
    NonFinite(&'static str),

    #[error("fixed-point map failed at step {step}: {source}")]
    MapEvaluation {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("linear solver: {0}")]
    LinearSolver(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

fn field_suffix(field: &Option<Field>) -> String {
    field.map(|f| format!(" ({f} block)")).unwrap_or_default()
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
