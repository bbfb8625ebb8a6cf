use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("unknown command '{0}'")]
    UnknownCommand(String),
    #[error("manifest: {0}")]
    Manifest(String),
    #[error("fit failed: {0}")]
    Fit(String),
    #[error(transparent)]
    Core(#[from] cqed_core::CoreError),
    #[error(transparent)]
    Shaper(#[from] pulse_shaper::ShaperError),
    #[error(transparent)]
    Sim(#[from] lindblad_sim::SimError),
    #[error(transparent)]
    Homodyne(#[from] homodyne_modes::HomodyneError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Serialize)]
struct ErrorJson<'a> {
    error: &'a str,
    message: String,
    exit_code: i32,
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Config(_) => "config",
            Self::UnknownCommand(_) => "unknown_command",
            Self::Manifest(_) => "manifest",
            Self::Fit(_) => "fit",
            Self::Core(_) => "model",
            Self::Shaper(_) => "shaper",
            Self::Sim(_) => "simulation",
            Self::Homodyne(_) => "homodyne",
            Self::Io(_) => "io",
            Self::Json(_) => "json",
        }
    }

    /// 2 for invalid input, 1 for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::UnknownCommand(_) => 2,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ErrorJson { error: self.kind(), message: self.to_string(), exit_code: self.exit_code() }).expect("error serializes")
    }
}
