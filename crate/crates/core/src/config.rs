//! Parameter files. Keys are the model symbol names; unknown keys are errors.
//!
//! ```toml
//! r = 0.05
//! rho = 0.3
//! k = 0.8
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{decimal, CaseTag, ModelParams, ParamError, VolCase};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamFile {
    pub r: Option<f64>,
    pub rho: Option<f64>,
    pub m: Option<f64>,
    pub mu: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub f0: Option<f64>,
    pub k: Option<f64>,
    /// Accepted only as a consistency check against the other values.
    pub g: Option<f64>,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid TOML parameter file: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("invalid JSON parameter file: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("{key} is not used by case {case}")]
    Irrelevant { key: &'static str, case: CaseTag },
    #[error("case hyp-g0 fixes alpha = -rho beta (mu - r)/k; the given alpha gives g = {g}")]
    AlphaNotTuned { g: f64 },
}

impl ParamFile {
    pub fn parse_toml(text: &str) -> Result<Self, ConfigError> {
        Ok(toml::from_str(text)?)
    }

    pub fn parse_json(text: &str) -> Result<Self, ConfigError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Reads a `.json` file as JSON and anything else as TOML.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            Self::parse_json(&text)
        } else {
            Self::parse_toml(&text)
        }
    }

    /// Defaults of `case` overridden by the values present. For `hyp-g0`
    /// an absent alpha is tuned so that `g = 0`.
    pub fn resolve(&self, case: CaseTag) -> Result<ModelParams, ConfigError> {
        let base = ModelParams::defaults(case);
        let pick = |v: Option<f64>, d: &crate::Rational, name: &'static str| -> Result<crate::Rational, ParamError> {
            match v {
                Some(x) => decimal(x).ok_or(ParamError::NotFinite(name)),
                None => Ok(d.clone()),
            }
        };
        let vol = match (&base.vol, self.f0, self.k) {
            (VolCase::ConstVol { .. }, _, Some(_)) => return Err(ConfigError::Irrelevant { key: "k", case }),
            (VolCase::HyperbolicVol { .. }, Some(_), _) => return Err(ConfigError::Irrelevant { key: "f0", case }),
            (VolCase::ConstVol { f0 }, v, None) => VolCase::ConstVol { f0: pick(v, f0, "f0")? },
            (VolCase::HyperbolicVol { k }, None, v) => VolCase::HyperbolicVol { k: pick(v, k, "k")? },
        };
        if case == CaseTag::ConstVol && self.g.is_some() {
            return Err(ConfigError::Irrelevant { key: "g", case });
        }
        let p = ModelParams::new(
            pick(self.r, &base.r, "r")?,
            pick(self.rho, &base.rho, "rho")?,
            pick(self.m, &base.m, "m")?,
            pick(self.mu, &base.mu, "mu")?,
            pick(self.alpha, &base.alpha, "alpha")?,
            pick(self.beta, &base.beta, "beta")?,
            vol,
        )?;
        let p = match case {
            CaseTag::HypGZero if self.alpha.is_none() => p.tuned_g_zero()?,
            CaseTag::HypGZero if p.case() != CaseTag::HypGZero => {
                return Err(ConfigError::AlphaNotTuned {
                    g: p.g().map_or(f64::NAN, crate::scalar::rational_to_f64),
                })
            }
            CaseTag::HypGNonzero if p.case() != CaseTag::HypGNonzero => {
                return Err(ParamError::WrongCase {
                    case,
                    requirement: "g different from 0",
                }
                .into())
            }
            _ => p,
        };
        if let (Some(g), Some(computed)) = (self.g, p.g()) {
            let computed = crate::scalar::rational_to_f64(computed);
            if (g - computed).abs() > 1e-12 * (1.0 + computed.abs()) {
                return Err(ParamError::GMismatch { stored: g, computed }.into());
            }
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    #[test]
    fn empty_file_gives_defaults() {
        for case in CaseTag::ALL {
            let p = ParamFile::parse_toml("").unwrap().resolve(case).unwrap();
            assert_eq!(p, ModelParams::defaults(case));
        }
    }

    #[test]
    fn overrides_and_formats() {
        let a = ParamFile::parse_toml("r = 0.07\nk = 1.1\n").unwrap();
        let b = ParamFile::parse_json(r#"{"r": 0.07, "k": 1.1}"#).unwrap();
        assert_eq!(a, b);
        let p = a.resolve(CaseTag::HypGNonzero).unwrap();
        assert_eq!(p.r, Rational::new(7.into(), 100.into()));
    }

    #[test]
    fn unknown_and_irrelevant_keys_are_rejected() {
        assert!(ParamFile::parse_toml("sigma = 0.2").is_err());
        assert!(ParamFile::parse_json(r#"{"r": 0.1, "extra": 1}"#).is_err());
        let f = ParamFile::parse_toml("k = 0.8").unwrap();
        assert!(matches!(
            f.resolve(CaseTag::ConstVol),
            Err(ConfigError::Irrelevant { key: "k", .. })
        ));
    }

    #[test]
    fn g_zero_tuning() {
        let p = ParamFile::parse_toml("beta = 0.5").unwrap().resolve(CaseTag::HypGZero).unwrap();
        assert_eq!(p.case(), CaseTag::HypGZero);
        let e = ParamFile::parse_toml("alpha = 1.2").unwrap().resolve(CaseTag::HypGZero);
        assert!(matches!(e, Err(ConfigError::AlphaNotTuned { .. })));
        let e = ParamFile::parse_toml("g = 1.0").unwrap().resolve(CaseTag::HypGNonzero);
        assert!(matches!(e, Err(ConfigError::Param(ParamError::GMismatch { .. }))));
        assert!(ParamFile::parse_toml("g = 2.415").unwrap().resolve(CaseTag::HypGNonzero).is_ok());
    }
}
