use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use tfloc::AdmissibilityReport;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] tfloc::Error),

    #[error("cover is not admissible")]
    NotAdmissible(Box<AdmissibilityReport>),

    /// A broken internal invariant; indicates a bug.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

#[derive(Debug, Serialize)]
pub struct ErrorFile {
    pub code: &'static str,
    pub message: String,
    pub context: Value,
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.code(),
            CliError::NotAdmissible(_) => "precondition-violation",
            CliError::Internal(_) => "internal-error",
        }
    }

    pub fn context(&self) -> Value {
        use tfloc::Error as E;
        match self {
            CliError::Core(E::Io { path, source }) => {
                json!({"path": path.display().to_string(), "kind": format!("{:?}", source.kind())})
            }
            CliError::Core(E::Dimension { expected, found }) => {
                json!({"expected": expected, "found": found})
            }
            CliError::Core(E::Numeric { residual, .. }) => json!({"residual": finite(*residual)}),
            CliError::Core(E::NotAFrame {
                lower_bound,
                tolerance,
            }) => json!({"lower_bound": lower_bound, "tolerance": tolerance}),
            CliError::Core(E::Parse { what, .. }) => json!({"input": what}),
            CliError::NotAdmissible(report) => json!({ "admissibility": report }),
            _ => json!({}),
        }
    }

    pub fn to_file(&self, command: &str) -> ErrorFile {
        let mut context = self.context();
        context["command"] = Value::from(command);
        ErrorFile {
            code: self.code(),
            message: self.to_string(),
            context,
        }
    }

    /// Writes `error.json` into `dir`, creating it if needed.
    pub fn write(&self, command: &str, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        let text =
            serde_json::to_string_pretty(&self.to_file(command)).expect("error serialization");
        std::fs::write(dir.join("error.json"), text + "\n")
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}
