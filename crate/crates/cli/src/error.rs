use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Usage,
    Config,
    Precondition,
    Acceptance,
    Io,
}

impl Kind {
    pub fn exit_code(self) -> i32 {
        match self {
            Kind::Usage | Kind::Config => 2,
            Kind::Precondition => 3,
            Kind::Acceptance => 4,
            Kind::Io => 1,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CliError {
    pub kind: Kind,
    pub message: String,
}

impl CliError {
    pub fn new(kind: Kind, message: impl Into<String>) -> Self {
        CliError {
            kind,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Self::new(Kind::Config, message)
    }

    pub fn precondition(message: impl Into<String>) -> Self {
        Self::new(Kind::Precondition, message)
    }

    /// Machine-readable record written to stderr.
    pub fn record(&self) -> String {
        serde_json::json!({
            "error": {
                "kind": self.kind,
                "exit_code": self.kind.exit_code(),
                "message": self.message,
            }
        })
        .to_string()
    }
}

impl From<hamca::Error> for CliError {
    fn from(e: hamca::Error) -> Self {
        use hamca::Error as E;
        let kind = match &e {
            E::SingularClosedForm { .. }
            | E::Inadmissible { .. }
            | E::EdgeGuard { .. }
            | E::NotNormalized { .. }
            | E::BoundaryGuard { .. }
            | E::NotASolution(_)
            | E::HistoryCap { .. }
            | E::TensorCap { .. }
            | E::HistoryTooShort { .. } => Kind::Precondition,
            E::Io(_) => Kind::Io,
            _ => Kind::Config,
        };
        CliError::new(kind, e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::new(Kind::Io, e.to_string())
    }
}
