use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<hfcert::Error> for CliError {
    fn from(e: hfcert::Error) -> Self {
        match e {
            hfcert::Error::Solver(_) | hfcert::Error::Singular(_) => Self::Solver(e.to_string()),
            _ => Self::Input(e.to_string()),
        }
    }
}

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    /// The run completed and the answer is negative.
    GatesFailed = 2,
    InvalidInput = 3,
    SolverFailure = 4,
}

impl Status {
    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn worst(self, other: Self) -> Self {
        if other.code() > self.code() {
            other
        } else {
            self
        }
    }
}

impl CliError {
    pub fn status(&self) -> Status {
        match self {
            Self::Solver(_) => Status::SolverFailure,
            Self::Input(_) | Self::Io(_) => Status::InvalidInput,
        }
    }
}
