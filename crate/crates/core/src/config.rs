//! JSON run configuration.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::{BaselineKind, DEFAULT_REFERENCE_TARGET, DEFAULT_TARGET_COUNT};
use crate::error::Error;
use crate::evolution::AlgoParams;
use crate::geometry::{Endpoint, RegionOfInterest};
use crate::sim::PerturbationProfile;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Algorithm {
    Tbr,
    Baseline(BaselineKind),
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::Tbr => f.write_str("tbr"),
            Algorithm::Baseline(k) => k.fmt(f),
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        if s.eq_ignore_ascii_case("tbr") {
            Ok(Algorithm::Tbr)
        } else {
            s.parse().map(Algorithm::Baseline)
        }
    }
}

impl TryFrom<String> for Algorithm {
    type Error = Error;

    fn try_from(s: String) -> Result<Self, Error> {
        s.parse()
    }
}

impl From<Algorithm> for String {
    fn from(a: Algorithm) -> String {
        a.to_string()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    /// Required, here or on the command line, for every stochastic command.
    pub seed: Option<u64>,
    pub params: AlgoParams,
    /// Run the transfer loop during `evolve`.
    pub transfers: bool,
    /// Perturbation profile JSON for the pseudo-real robot, relative to the
    /// config file. The built-in profile is used when absent.
    pub profile: Option<PathBuf>,
    pub roi: RegionOfInterest,
    pub output_dir: PathBuf,
    /// Generations between metric rows.
    pub metric_cadence: usize,
    pub target_count: usize,
    /// Generations of each per-target run; defaults to budget parity with
    /// one repertoire run.
    pub generations_per_target: Option<usize>,
    pub reference_target: Endpoint,
    #[serde(skip)]
    pseudo_reality: Option<PerturbationProfile>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Tbr,
            seed: None,
            params: AlgoParams::default(),
            transfers: true,
            profile: None,
            roi: RegionOfInterest::default(),
            output_dir: PathBuf::from("out"),
            metric_cadence: 50,
            target_count: DEFAULT_TARGET_COUNT,
            generations_per_target: None,
            reference_target: DEFAULT_REFERENCE_TARGET,
            pseudo_reality: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str, base_dir: &Path) -> Result<Self, Error> {
        let mut cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        if let Some(p) = &cfg.profile {
            let path = if p.is_absolute() { p.clone() } else { base_dir.join(p) };
            let text = fs::read_to_string(&path)
                .map_err(|e| Error::Config(format!("cannot read profile {}: {e}", path.display())))?;
            cfg.pseudo_reality = Some(PerturbationProfile::from_json(&text)?);
            cfg.profile = Some(path);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn validate(&self) -> Result<(), Error> {
        self.params.validate()?;
        RegionOfInterest::new(self.roi.half_angle, self.roi.s_max)?;
        if self.metric_cadence == 0 {
            return Err(Error::Config("metric_cadence must be positive".into()));
        }
        if self.target_count == 0 {
            return Err(Error::Config("target_count must be positive".into()));
        }
        if self.generations_per_target == Some(0) {
            return Err(Error::Config("generations_per_target must be positive".into()));
        }
        if !self.roi.contains(self.reference_target) {
            return Err(Error::Config("reference_target lies outside the region of interest".into()));
        }
        Ok(())
    }

    /// Profile of the pseudo-real robot.
    pub fn pseudo_reality(&self) -> PerturbationProfile {
        self.pseudo_reality.clone().unwrap_or_else(PerturbationProfile::p0)
    }

    pub fn with_pseudo_reality(mut self, profile: PerturbationProfile) -> Self {
        self.pseudo_reality = Some(profile);
        self
    }

    /// The command-line seed wins over the configured one.
    pub fn seed(&self, cli: Option<u64>) -> Result<u64, Error> {
        cli.or(self.seed).ok_or_else(|| Error::Config("a seed is required (--seed or \"seed\" in the config)".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let cfg = RunConfig::from_json("{}", Path::new(".")).unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.params.k, 15);
        assert_eq!(cfg.params.rho, 0.10);
        assert_eq!(cfg.params.tau, -0.05);
        assert_eq!(cfg.params.transfer_period, 50);
        assert_eq!(cfg.params.generations, 10_000);
        assert_eq!(cfg.pseudo_reality(), PerturbationProfile::p0());
        assert!(cfg.seed(None).is_err());
        assert_eq!(cfg.seed(Some(4)).unwrap(), 4);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_json(r#"{"populaton":3}"#, Path::new(".")).is_err());
        assert!(RunConfig::from_json(r#"{"params":{"kk":3}}"#, Path::new(".")).is_err());
        assert!(RunConfig::from_json(r#"{"algorithm":"magic"}"#, Path::new(".")).is_err());
        assert!(RunConfig::from_json(r#"{"params":{"k":0}}"#, Path::new(".")).is_err());
    }

    #[test]
    fn profile_is_resolved_and_loaded() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(
            dir.path().join("p.json"),
            r#"{"femur_scale":[1,1,1,1,1,1],"amp2_scale":[1,1,1,1,1,1],"dh":0.01}"#,
        )
        .unwrap();
        let cfg_path = dir.path().join("c.json");
        fs::write(&cfg_path, r#"{"profile":"p.json","seed":3,"algorithm":"nslc"}"#).unwrap();
        let cfg = RunConfig::load(&cfg_path).unwrap();
        assert_eq!(cfg.pseudo_reality().dh, 0.01);
        assert_eq!(cfg.algorithm, Algorithm::Baseline(BaselineKind::Nslc));
        assert_eq!(cfg.seed(None).unwrap(), 3);
        fs::write(&cfg_path, r#"{"profile":"missing.json"}"#).unwrap();
        assert!(RunConfig::load(&cfg_path).is_err());
    }
}
