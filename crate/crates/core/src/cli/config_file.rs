use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::engine::SimConfig;
use crate::error::{ConfigError, Violation};

/// Parameter grid for `sweep`. Axes are visited in name order and values in
/// the order given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axes: BTreeMap<String, Vec<f64>>,
    #[serde(default = "one")]
    pub replicates: u32,
}

fn one() -> u32 {
    1
}

/// On-disk run configuration.
///
/// ```json
/// {
///   "simulation": { "population": 15000, "seed": 42 },
///   "output_dir": "out",
///   "sweep": { "axes": { "intercept": [-5.4, -5.2] }, "replicates": 5 }
/// }
/// ```
///
/// Omitted simulation fields take their defaults. Unknown keys are errors.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfigFile {
    #[serde(default)]
    pub simulation: SimConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

impl RunConfigFile {
    /// Parses and validates. Errors name the offending key path, e.g.
    /// `simulation.recruits`.
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let mut de = serde_json::Deserializer::from_str(text);
        let parsed: Self = serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let path = e.path().to_string();
            let msg = e.into_inner().to_string();
            // The path already ends in the key for unknown-field errors.
            let field = if path == "." {
                "config".to_string()
            } else {
                path
            };
            ConfigError::single(field, msg)
        })?;
        parsed.validate()?;
        Ok(parsed)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut violations: Vec<Violation> = match self.simulation.validate() {
            Ok(()) => Vec::new(),
            Err(e) => e.violations,
        };
        if let Some(sweep) = &self.sweep {
            if sweep.replicates == 0 {
                violations.push(Violation::new("sweep.replicates", "must be at least 1"));
            }
            for (name, values) in &sweep.axes {
                let field = format!("sweep.axes.{name}");
                if values.is_empty() {
                    violations.push(Violation::new(field.clone(), "needs at least one value"));
                }
                for &v in values {
                    let mut probe = self.simulation.clone();
                    if let Err(e) = probe.set_param(name, v) {
                        violations.extend(
                            e.violations
                                .into_iter()
                                .map(|x| Violation::new(field.clone(), x.message)),
                        );
                        break;
                    }
                }
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(ConfigError { violations })
        }
    }
}
