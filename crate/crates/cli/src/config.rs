//! Run configuration read from a TOML file. Every key is optional; model keys
//! override the named fixture, or describe a model from scratch when no
//! fixture is named.

use crate::CliError;
use matsubara::fixtures;
use matsubara::model::parse_complex;
use matsubara::{ModelParams, Site, C64};
use serde::{Deserialize, Deserializer};
use std::path::{Path, PathBuf};

/// A complex number written as `"re+imi"`, or a bare number.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexValue(pub C64);

impl<'de> Deserialize<'de> for ComplexValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Number(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(s) => parse_complex(&s).map(ComplexValue).map_err(serde::de::Error::custom),
            Raw::Number(x) => Ok(ComplexValue(C64::new(x, 0.0))),
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// `p0` or `p1`.
    pub fixture: Option<String>,
    pub q: Option<ComplexValue>,
    /// Alternative to `q`: `q = exp(iπν)`.
    pub nu: Option<f64>,
    /// `2s` per site.
    pub two_spins: Option<Vec<u32>>,
    pub taus: Option<Vec<ComplexValue>>,
    pub kappa: Option<ComplexValue>,
    pub alpha: Option<ComplexValue>,
    pub sector: Option<i64>,
    pub suite: Option<String>,
    pub output: Option<PathBuf>,
    pub radius: Option<f64>,
    pub nu_ladder: Option<Vec<f64>>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    fn has_model_keys(&self) -> bool {
        self.q.is_some()
            || self.nu.is_some()
            || self.two_spins.is_some()
            || self.taus.is_some()
            || self.kappa.is_some()
            || self.alpha.is_some()
            || self.sector.is_some()
    }

    /// The configured model with its label, or `None` when neither a fixture
    /// nor model keys were given.
    pub fn model(&self) -> Result<Option<(String, ModelParams)>, CliError> {
        let base = match &self.fixture {
            Some(name) => Some(
                fixtures::by_name(name).ok_or_else(|| CliError::Config(format!("unknown fixture '{name}'")))?,
            ),
            None => None,
        };
        if base.is_none() && !self.has_model_keys() {
            return Ok(None);
        }
        let label = self.fixture.as_deref().unwrap_or("config").to_ascii_uppercase();
        if self.q.is_some() && self.nu.is_some() {
            return Err(CliError::Config("give either q or nu, not both".into()));
        }
        let missing = |key: &str| CliError::Config(format!("missing key '{key}' (no fixture to inherit it from)"));

        let ln_q = match (self.q, self.nu, &base) {
            (Some(q), _, _) => {
                if q.0.norm() == 0.0 {
                    return Err(CliError::Config("q must be nonzero".into()));
                }
                q.0.ln()
            }
            (None, Some(nu), _) => C64::new(0.0, std::f64::consts::PI * nu),
            (None, None, Some(b)) => b.ln_q,
            (None, None, None) => return Err(missing("q")),
        };
        let taus: Vec<C64> = match (&self.taus, &base) {
            (Some(t), _) => t.iter().map(|c| c.0).collect(),
            (None, Some(b)) => b.sites.iter().map(|s| s.tau).collect(),
            (None, None) => return Err(missing("taus")),
        };
        let two_spins: Vec<u32> = match (&self.two_spins, &base) {
            (Some(s), _) => s.clone(),
            (None, Some(b)) if b.n() == taus.len() => b.sites.iter().map(|s| s.two_spin).collect(),
            _ => vec![1; taus.len()],
        };
        if two_spins.len() != taus.len() {
            return Err(CliError::Config(format!(
                "two_spins has {} entries but taus has {}",
                two_spins.len(),
                taus.len()
            )));
        }
        let kappa = self.kappa.map(|c| c.0).or(base.as_ref().map(|b| b.kappa)).ok_or_else(|| missing("kappa"))?;
        let alpha = self.alpha.map(|c| c.0).or(base.as_ref().map(|b| b.alpha)).ok_or_else(|| missing("alpha"))?;
        let sector = self.sector.or(base.as_ref().map(|b| b.sector)).unwrap_or(0);
        let sites = two_spins.into_iter().zip(taus).map(|(s, t)| Site::new(s, t)).collect();
        let params = ModelParams::with_ln_q(ln_q, sites, kappa, alpha)?.with_sector(sector)?;
        Ok(Some((label, params)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_with_override() {
        let cfg = RunConfig::parse("fixture = \"p0\"\nalpha = \"0.2-0.1i\"\n").unwrap();
        let (label, p) = cfg.model().unwrap().unwrap();
        assert_eq!(label, "P0");
        assert_eq!(p.alpha, C64::new(0.2, -0.1));
        assert_eq!(p.kappa, fixtures::p0().kappa);
    }

    #[test]
    fn unknown_key_rejected() {
        let err = RunConfig::parse("fixture = \"p0\"\nkapa = 1\n").unwrap_err();
        assert!(err.to_string().contains("unknown field"), "{err}");
    }

    #[test]
    fn from_scratch_needs_all_keys() {
        let cfg = RunConfig::parse("q = \"0.6+0.25i\"\ntaus = [1.1, 0.9]\nkappa = 0.4\n").unwrap();
        assert!(cfg.model().unwrap_err().to_string().contains("alpha"));
        assert!(RunConfig::default().model().unwrap().is_none());
    }
}
