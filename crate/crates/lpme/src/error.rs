use std::path::PathBuf;

/// Errors of the file and command layer. Core errors pass through.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {field} (line {line}, column {column}): {message}")]
    Parse {
        path: PathBuf,
        field: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: schema version {found} is not supported (expected {expected})")]
    SchemaVersionMismatch {
        path: PathBuf,
        found: u32,
        expected: u32,
    },
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] lpme_core::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        use lpme_core::Error as E;
        match self {
            CliError::Parse { .. } => "parse",
            CliError::SchemaVersionMismatch { .. } => "schema_version_mismatch",
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Csv(_) => "io",
            CliError::Core(e) => match e {
                E::DimensionMismatch { .. } => "dimension_mismatch",
                E::NotHermitian { .. } => "not_hermitian",
                E::NoConvergence { .. } => "no_convergence",
                E::Overflow => "overflow",
                E::Singular => "singular",
                E::NonFinite => "non_finite",
                E::NotUnitary { .. } => "not_unitary",
                E::TruncationLoss { .. } => "truncation_loss",
                E::NotPsd { .. } => "not_psd",
                E::NotHermitianZeta { .. } => "not_hermitian_zeta",
                E::UnknownFrequency { .. } => "unknown_frequency",
                E::CongruenceViolation { .. } => "congruence_violation",
                E::OrderViolation { .. } => "order_violation",
                E::SpectralViolation(_) => "spectral_violation",
                E::Defective { .. } => "defective",
                E::InsufficientDecay => "insufficient_decay",
                E::InvalidInput(_) => "invalid_input",
            },
        }
    }

    /// 1 for a model that fails an assumption, 2 for bad input, 3 for a
    /// numerical failure.
    pub fn exit_code(&self) -> u8 {
        use lpme_core::Error as E;
        match self {
            CliError::Parse { .. }
            | CliError::SchemaVersionMismatch { .. }
            | CliError::Usage(_)
            | CliError::Io { .. }
            | CliError::Csv(_) => 2,
            CliError::Core(e) => match e {
                E::DimensionMismatch { .. } | E::InvalidInput(_) => 2,
                E::NotHermitian { .. }
                | E::NotUnitary { .. }
                | E::TruncationLoss { .. }
                | E::NotPsd { .. }
                | E::NotHermitianZeta { .. }
                | E::CongruenceViolation { .. } => 1,
                _ => 3,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
