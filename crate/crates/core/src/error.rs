use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("point {0:?} lies outside the unit domain")]
    Domain(Vec<f64>),

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("samples were taken on raster `{samples}` but the plan was built for `{plan}`")]
    RasterMismatch { samples: String, plan: String },

    #[error("synthesis grid {grid} is too small for {modes} modes per axis (aliasing)")]
    Aliasing { grid: usize, modes: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Whether the error stems from bad input rather than from the numerics.
    pub fn is_config_error(&self) -> bool {
        !matches!(self, Error::Numerical(_))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        assert!(Error::param("band", "too wide").is_config_error());
        assert!(Error::io("x", std::io::Error::other("gone")).is_config_error());
        assert!(!Error::Numerical("rank 0".into()).is_config_error());
    }
}
