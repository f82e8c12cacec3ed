use annulus_dilation::Error;

/// Ways a job can end without exit code 0.
#[derive(Debug)]
pub enum Failure {
    /// Unparseable input or invalid settings.
    Usage(String),
    /// The input violates a mathematical precondition.
    Precondition(String),
    Internal(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Precondition(_) => 3,
            Failure::Internal(_) => 1,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Precondition(m) | Failure::Internal(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::InvalidArgument(_) | Error::Aliasing { .. } | Error::InvalidRational(_) => Failure::Usage(msg),
            Error::NoConvergence(_) => Failure::Internal(msg),
            _ => Failure::Precondition(msg),
        }
    }
}
