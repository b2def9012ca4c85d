//! On-disk model files.
//!
//! A model file is a JSON document with two required sections and one
//! optional field:
//!
//! ```json
//! {
//!   "server": {
//!     "components": [
//!       { "name": "HW", "mttf_hours": 8760.0, "mttr_hours": 1.66, "role": "infrastructure" },
//!       { "name": "CA", "mttf_hours": 1258.0, "mttr_hours": 0.15, "role": "container" }
//!     ]
//!   },
//!   "deployment": { "total_servers": 3, "policy": "koon", "k": 2 },
//!   "period_hours": 8760.0
//! }
//! ```
//!
//! Unknown keys are rejected, and every parse error is reported with the
//! file position and the JSON path of the offending value.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use blockav_core::policy::{DeploymentModel, EndorsementPolicy};
use blockav_core::rbd::ServerModel;
use blockav_core::{ComponentId, Error as CoreError, FailureRepairPair};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub server: ServerSection,
    pub deployment: DeploymentSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period_hours: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServerSection {
    pub components: Vec<ComponentEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentEntry {
    pub name: String,
    pub mttf_hours: f64,
    pub mttr_hours: f64,
    pub role: Role,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Infrastructure,
    Container,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeploymentSection {
    pub total_servers: u32,
    pub policy: PolicyName,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyName {
    And,
    Or,
    Koon,
}

/// Error raised while reading or interpreting a model file.
#[derive(Debug)]
pub enum ModelError {
    Io {
        path: String,
        source: std::io::Error,
    },
    Parse {
        path: String,
        line: usize,
        column: usize,
        pointer: String,
        message: String,
    },
    Invalid(CoreError),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::Io { path, source } => write!(f, "{path}: {source}"),
            ModelError::Parse {
                path,
                line,
                column,
                pointer,
                message,
            } => {
                if pointer.is_empty() {
                    write!(f, "{path}:{line}:{column}: {message}")
                } else {
                    write!(f, "{path}:{line}:{column}: at {pointer}: {message}")
                }
            }
            ModelError::Invalid(err) => write!(f, "{err}"),
        }
    }
}

impl std::error::Error for ModelError {}

impl From<CoreError> for ModelError {
    fn from(err: CoreError) -> Self {
        ModelError::Invalid(err)
    }
}

impl ModelFile {
    /// The built-in baseline: one server with the reference component set,
    /// deployed standalone under the all-servers policy.
    pub fn builtin() -> Self {
        let server = blockav_core::baseline::builtin_server();
        let mut components = Vec::new();
        for (id, pair) in server.infrastructure() {
            components.push(ComponentEntry {
                name: id.as_str().to_owned(),
                mttf_hours: pair.mttf_hours(),
                mttr_hours: pair.mttr_hours(),
                role: Role::Infrastructure,
            });
        }
        for (id, pair) in server.containers() {
            components.push(ComponentEntry {
                name: id.as_str().to_owned(),
                mttf_hours: pair.mttf_hours(),
                mttr_hours: pair.mttr_hours(),
                role: Role::Container,
            });
        }
        ModelFile {
            server: ServerSection { components },
            deployment: DeploymentSection {
                total_servers: 1,
                policy: PolicyName::And,
                k: None,
            },
            period_hours: None,
        }
    }

    /// Builds the evaluable deployment described by this file.
    pub fn to_deployment(&self) -> Result<DeploymentModel, ModelError> {
        let mut infrastructure = Vec::new();
        let mut containers = Vec::new();
        for entry in &self.server.components {
            let id = ComponentId::new(entry.name.as_str())?;
            let pair = FailureRepairPair::new(entry.mttf_hours, entry.mttr_hours)
                .map_err(|err| match err {
                    CoreError::InvalidParameter(msg) => CoreError::InvalidParameter(format!(
                        "component {}: {msg}",
                        entry.name
                    )),
                    other => other,
                })?;
            match entry.role {
                Role::Infrastructure => infrastructure.push((id, pair)),
                Role::Container => containers.push((id, pair)),
            }
        }
        let server = ServerModel::new(infrastructure, containers)?;
        let policy = match (self.deployment.policy, self.deployment.k) {
            (PolicyName::And, None) => EndorsementPolicy::And,
            (PolicyName::Or, None) => EndorsementPolicy::Or,
            (PolicyName::Koon, Some(k)) => EndorsementPolicy::Koon(k),
            (PolicyName::Koon, None) => {
                return Err(CoreError::InvalidParameter(
                    "policy koon requires the field k".to_owned(),
                )
                .into())
            }
            (_, Some(_)) => {
                return Err(CoreError::InvalidParameter(
                    "field k is only valid with policy koon".to_owned(),
                )
                .into())
            }
        };
        Ok(DeploymentModel::new(
            server,
            self.deployment.total_servers,
            policy,
        )?)
    }

    /// Observation period for downtime figures, when the file pins one.
    pub fn period(&self) -> Result<Option<f64>, ModelError> {
        match self.period_hours {
            None => Ok(None),
            Some(p) if p.is_finite() && p > 0.0 => Ok(Some(p)),
            Some(p) => Err(CoreError::InvalidParameter(format!(
                "period_hours must be positive and finite, got {p}"
            ))
            .into()),
        }
    }

    /// Canonical JSON rendering, used by the model round trip.
    pub fn dump(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("model serializes");
        text.push('\n');
        text
    }
}

/// Reads and parses a model file, mapping every failure to a positioned
/// diagnostic.
pub fn load_model(path: &Path) -> Result<ModelFile, ModelError> {
    let display = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(|source| ModelError::Io {
        path: display.clone(),
        source,
    })?;
    parse_model(&display, &text)
}

/// Parses model text, reporting the JSON path and position on failure.
pub fn parse_model(origin: &str, text: &str) -> Result<ModelFile, ModelError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let parsed: Result<ModelFile, _> = serde_path_to_error::deserialize(&mut de);
    match parsed {
        Ok(model) => {
            de.end().map_err(|err| ModelError::Parse {
                path: origin.to_owned(),
                line: err.line(),
                column: err.column(),
                pointer: String::new(),
                message: "trailing characters after the document".to_owned(),
            })?;
            Ok(model)
        }
        Err(err) => {
            let pointer = err.path().to_string();
            let inner = err.into_inner();
            Err(ModelError::Parse {
                path: origin.to_owned(),
                line: inner.line(),
                column: inner.column(),
                pointer: if pointer == "." { String::new() } else { pointer },
                message: inner.to_string(),
            })
        }
    }
}
