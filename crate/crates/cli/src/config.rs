use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::UsageError;

/// Prefix of environment variables that override tolerances, e.g.
/// `DKP_TOL_ODE_RESIDUAL=1e-9`.
pub const ENV_PREFIX: &str = "DKP_TOL_";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Every numeric threshold used by the check suites.
///
/// Ratio thresholds (`operator_ratio`, `z_refinement_ratio`) are lower
/// bounds; everything else is an upper bound on a residual.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub christoffel_fd: f64,
    pub metric_compatibility: f64,
    pub tetrad_orthonormality: f64,
    pub ricci_rotation: f64,
    pub field_strength: f64,
    pub ode_residual: f64,
    pub eigenrelation: f64,
    pub operator_ratio: f64,
    pub cubic_residual: f64,
    pub vieta: f64,
    pub triple_angle: f64,
    pub ratio_residual: f64,
    pub z_imag: f64,
    pub z_oracle: f64,
    pub z_refinement_ratio: f64,
    pub exponent_fit: f64,
    pub parity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            christoffel_fd: 1e-6,
            metric_compatibility: 1e-10,
            tetrad_orthonormality: 1e-12,
            ricci_rotation: 1e-6,
            field_strength: 1e-8,
            ode_residual: 1e-8,
            eigenrelation: 1e-6,
            operator_ratio: 3.0,
            cubic_residual: 1e-12,
            vieta: 1e-12,
            triple_angle: 1e-14,
            ratio_residual: 1e-12,
            z_imag: 1e-8,
            z_oracle: 0.01,
            z_refinement_ratio: 3.0,
            exponent_fit: 0.02,
            parity: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn names() -> Vec<String> {
        match serde_json::to_value(Tolerances::default()) {
            Ok(Value::Object(map)) => map.keys().cloned().collect(),
            _ => Vec::new(),
        }
    }

    /// Applies `name = value` overrides; unknown names are usage errors.
    pub fn with_overrides(&self, overrides: &BTreeMap<String, f64>) -> Result<Self, UsageError> {
        let mut value = serde_json::to_value(self).map_err(|e| UsageError(e.to_string()))?;
        let map = value.as_object_mut().expect("struct serializes to an object");
        for (name, v) in overrides {
            if !map.contains_key(name) {
                return Err(UsageError(format!(
                    "unknown tolerance '{name}'; expected one of: {}",
                    Self::names().join(", ")
                )));
            }
            if !v.is_finite() || *v < 0.0 {
                return Err(UsageError(format!("tolerance '{name}' must be a finite non-negative number, got {v}")));
            }
            map.insert(name.clone(), Value::from(*v));
        }
        serde_json::from_value(value).map_err(|e| UsageError(e.to_string()))
    }
}

/// Contents accepted by `--config FILE`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub seed: Option<u64>,
    pub tolerances: BTreeMap<String, f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| UsageError(format!("invalid config {}: {e}", path.display())))
    }
}

/// Tolerance overrides found in the environment.
pub fn env_overrides<I>(vars: I) -> Result<BTreeMap<String, f64>, UsageError>
where
    I: IntoIterator<Item = (String, String)>,
{
    let mut out = BTreeMap::new();
    for (key, raw) in vars {
        let Some(name) = key.strip_prefix(ENV_PREFIX) else {
            continue;
        };
        let value: f64 = raw
            .trim()
            .parse()
            .map_err(|_| UsageError(format!("{key}={raw} is not a number")))?;
        out.insert(name.to_ascii_lowercase(), value);
    }
    Ok(out)
}

/// Parses a `--tol name=value` flag.
pub fn parse_tol_flag(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got '{s}'"))?;
    let value: f64 = value.trim().parse().map_err(|_| format!("'{value}' is not a number"))?;
    Ok((name.trim().to_string(), value))
}

/// Defaults, then the config file, then the environment, then flags.
pub fn resolve_tolerances(
    file: &FileConfig,
    env: &BTreeMap<String, f64>,
    flags: &[(String, f64)],
) -> Result<Tolerances, UsageError> {
    let flags: BTreeMap<String, f64> = flags.iter().cloned().collect();
    Tolerances::default()
        .with_overrides(&file.tolerances)?
        .with_overrides(env)?
        .with_overrides(&flags)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let file = FileConfig {
            tolerances: [("parity".to_string(), 1e-6), ("vieta".to_string(), 1e-9)].into(),
            ..FileConfig::default()
        };
        let env = env_overrides([
            ("DKP_TOL_PARITY".to_string(), "1e-7".to_string()),
            ("UNRELATED".to_string(), "x".to_string()),
        ])
        .unwrap();
        let tol = resolve_tolerances(&file, &env, &[("vieta".to_string(), 1e-10)]).unwrap();
        assert_eq!(tol.parity, 1e-7);
        assert_eq!(tol.vieta, 1e-10);
        assert_eq!(tol.ode_residual, 1e-8);
    }

    #[test]
    fn unknown_and_bad_values_rejected() {
        let bad: BTreeMap<String, f64> = [("nope".to_string(), 1.0)].into();
        assert!(Tolerances::default().with_overrides(&bad).is_err());
        let neg: BTreeMap<String, f64> = [("parity".to_string(), -1.0)].into();
        assert!(Tolerances::default().with_overrides(&neg).is_err());
        assert!(env_overrides([("DKP_TOL_PARITY".to_string(), "abc".to_string())]).is_err());
        assert!(parse_tol_flag("parity").is_err());
        assert_eq!(parse_tol_flag("parity=2e-3").unwrap(), ("parity".to_string(), 2e-3));
    }

    #[test]
    fn file_config_rejects_unknown_keys() {
        assert!(serde_json::from_str::<FileConfig>(r#"{"colour": 1}"#).is_err());
        let c: FileConfig = serde_json::from_str(r#"{"format": "json", "jobs": 2}"#).unwrap();
        assert_eq!(c.format, Some(Format::Json));
    }
}
