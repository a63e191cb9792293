//! Layout parameter resolution.
//!
//! Sources are layered with precedence command-line flag > parameter file >
//! environment variable > built-in default. Each layer is a
//! [`ParamOverrides`] where `None` means "not set here".

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ProjectionConfig;
use crate::layout::{InitMode, LayoutParams};

/// Prefix of the environment variables read by [`ParamOverrides::from_env`].
pub const ENV_PREFIX: &str = "GEOLAYOUT_";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub geo_weight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_temperature: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cooling_alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weighted_attraction: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_mode: Option<InitMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map_height: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor_height: Option<f64>,
}

fn parse_var<T: std::str::FromStr>(name: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| Error::invalid(format!("environment variable {name}={value:?}: {e}")))
}

impl ParamOverrides {
    /// Reads `GEOLAYOUT_*` variables from the process environment.
    pub fn from_env() -> Result<Self> {
        Self::from_vars(std::env::vars())
    }

    /// Recognized names (after the prefix): `K`, `GEO_WEIGHT`, `TEMPERATURE`,
    /// `ALPHA`, `ITERATIONS`, `SEED`, `WEIGHTED_ATTRACTION`, `INIT_MODE`,
    /// `MAP_WIDTH`, `MAP_HEIGHT`, `ANCHOR_HEIGHT`. Others are ignored.
    pub fn from_vars(vars: impl IntoIterator<Item = (String, String)>) -> Result<Self> {
        let mut o = ParamOverrides::default();
        for (key, value) in vars {
            let Some(name) = key.strip_prefix(ENV_PREFIX) else {
                continue;
            };
            match name {
                "K" => o.k = Some(parse_var(&key, &value)?),
                "GEO_WEIGHT" => o.geo_weight = Some(parse_var(&key, &value)?),
                "TEMPERATURE" => o.initial_temperature = Some(parse_var(&key, &value)?),
                "ALPHA" => o.cooling_alpha = Some(parse_var(&key, &value)?),
                "ITERATIONS" => o.n_iterations = Some(parse_var(&key, &value)?),
                "SEED" => o.seed = Some(parse_var(&key, &value)?),
                "WEIGHTED_ATTRACTION" => o.weighted_attraction = Some(parse_var(&key, &value)?),
                "INIT_MODE" => {
                    o.init_mode = Some(match value.trim() {
                        "random" => InitMode::Random,
                        "at_anchors" => InitMode::AtAnchors,
                        other => {
                            return Err(Error::invalid(format!(
                                "environment variable {key}={other:?}: expected random or at_anchors"
                            )))
                        }
                    })
                }
                "MAP_WIDTH" => o.map_width = Some(parse_var(&key, &value)?),
                "MAP_HEIGHT" => o.map_height = Some(parse_var(&key, &value)?),
                "ANCHOR_HEIGHT" => o.anchor_height = Some(parse_var(&key, &value)?),
                _ => {}
            }
        }
        Ok(o)
    }

    /// Parses a JSON parameter file holding any subset of the fields.
    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        serde_json::from_slice(bytes)
            .map_err(|e| Error::invalid(format!("parameter file: {e}")))
    }

    /// Fields set in `self` win; unset ones fall back to `lower`.
    pub fn or(self, lower: ParamOverrides) -> ParamOverrides {
        ParamOverrides {
            k: self.k.or(lower.k),
            geo_weight: self.geo_weight.or(lower.geo_weight),
            initial_temperature: self.initial_temperature.or(lower.initial_temperature),
            cooling_alpha: self.cooling_alpha.or(lower.cooling_alpha),
            n_iterations: self.n_iterations.or(lower.n_iterations),
            seed: self.seed.or(lower.seed),
            weighted_attraction: self.weighted_attraction.or(lower.weighted_attraction),
            init_mode: self.init_mode.or(lower.init_mode),
            map_width: self.map_width.or(lower.map_width),
            map_height: self.map_height.or(lower.map_height),
            anchor_height: self.anchor_height.or(lower.anchor_height),
        }
    }

    pub fn projection(&self) -> ProjectionConfig {
        let d = ProjectionConfig::default();
        ProjectionConfig {
            map_width: self.map_width.unwrap_or(d.map_width),
            map_height: self.map_height.unwrap_or(d.map_height),
            anchor_height: self.anchor_height.unwrap_or(d.anchor_height),
        }
    }

    /// Fills every unset field with the default for `node_count` nodes and
    /// validates the result.
    pub fn resolve(&self, node_count: usize) -> Result<LayoutParams> {
        let projection = self.projection();
        projection.validate()?;
        let d = LayoutParams::with_projection(node_count, projection);
        let params = LayoutParams {
            k: self.k.unwrap_or(d.k),
            geo_weight: self.geo_weight.unwrap_or(d.geo_weight),
            initial_temperature: self.initial_temperature.unwrap_or(d.initial_temperature),
            cooling_alpha: self.cooling_alpha.unwrap_or(d.cooling_alpha),
            n_iterations: self.n_iterations.unwrap_or(d.n_iterations),
            seed: self.seed.unwrap_or(d.seed),
            projection,
            weighted_attraction: self.weighted_attraction.unwrap_or(d.weighted_attraction),
            init_mode: self.init_mode.unwrap_or(d.init_mode),
        };
        params.validate()?;
        Ok(params)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::default_k;

    fn vars(pairs: &[(&str, &str)]) -> Vec<(String, String)> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn defaults_when_nothing_set() {
        let p = ParamOverrides::default().resolve(27).unwrap();
        assert_eq!(p, LayoutParams::with_projection(27, ProjectionConfig::default()));
        assert_eq!(p.k, default_k(27, &ProjectionConfig::default()));
    }

    #[test]
    fn precedence_flag_file_env_default() {
        let env = ParamOverrides::from_vars(vars(&[
            ("GEOLAYOUT_GEO_WEIGHT", "1"),
            ("GEOLAYOUT_ALPHA", "0.05"),
            ("GEOLAYOUT_SEED", "3"),
            ("UNRELATED", "x"),
        ]))
        .unwrap();
        let file = ParamOverrides::from_json(br#"{"geo_weight": 2, "cooling_alpha": 0.04}"#).unwrap();
        let flags = ParamOverrides {
            geo_weight: Some(3.0),
            ..Default::default()
        };
        let p = flags.or(file.or(env)).resolve(10).unwrap();
        assert_eq!(p.geo_weight, 3.0);
        assert_eq!(p.cooling_alpha, 0.04);
        assert_eq!(p.seed, 3);
        assert_eq!(p.n_iterations, crate::layout::DEFAULT_ITERATIONS);
    }

    #[test]
    fn projection_drives_temperature_default() {
        let o = ParamOverrides {
            map_height: Some(50.0),
            ..Default::default()
        };
        assert_eq!(o.resolve(1).unwrap().initial_temperature, 5.0);
    }

    #[test]
    fn bad_values_rejected() {
        assert!(ParamOverrides::from_vars(vars(&[("GEOLAYOUT_K", "abc")])).is_err());
        assert!(ParamOverrides::from_json(br#"{"kk": 1}"#).is_err());
        let neg = ParamOverrides {
            geo_weight: Some(-1.0),
            ..Default::default()
        };
        assert!(neg.resolve(3).is_err());
    }
}
