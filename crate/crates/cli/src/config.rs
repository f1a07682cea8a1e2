//! Run configuration: TOML file, command-line overrides, validation.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use slowtorus_core::{
    ConstantsProfile, GrowthFunction, PrecisionPolicy, Rat, Schedule, VerifyConfig,
};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Paper,
    Desk,
}

impl Mode {
    pub fn profile(self) -> ConstantsProfile {
        match self {
            Mode::Paper => ConstantsProfile::paper(),
            Mode::Desk => ConstantsProfile::desk(),
        }
    }
}

/// The coupling `c`: a fixed rational or the library default.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum Coupling {
    #[default]
    Auto,
    Fixed(Rat),
}

impl FromStr for Coupling {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim() {
            "auto" => Ok(Coupling::Auto),
            v => v
                .parse()
                .map(Coupling::Fixed)
                .map_err(|e| CliError::Config(format!("c: {e}"))),
        }
    }
}

impl fmt::Display for Coupling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coupling::Auto => f.write_str("auto"),
            Coupling::Fixed(c) => write!(f, "{c}"),
        }
    }
}

impl Serialize for Coupling {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Coupling {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

/// Where results go. Unset paths default to fixed names inside `dir`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputPaths {
    pub dir: PathBuf,
    pub state: Option<PathBuf>,
    pub certificate: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

impl Default for OutputPaths {
    fn default() -> Self {
        OutputPaths {
            dir: PathBuf::from("slowtorus-out"),
            state: None,
            certificate: None,
            csv: None,
            plot: None,
        }
    }
}

impl OutputPaths {
    fn or_default(&self, p: &Option<PathBuf>, name: &str) -> PathBuf {
        p.clone().unwrap_or_else(|| self.dir.join(name))
    }

    pub fn state(&self) -> PathBuf {
        self.or_default(&self.state, "state.json")
    }

    pub fn certificate(&self) -> PathBuf {
        self.or_default(&self.certificate, "certificate.json")
    }

    pub fn csv(&self) -> PathBuf {
        self.or_default(&self.csv, "growth.csv")
    }

    pub fn plot(&self) -> PathBuf {
        self.or_default(&self.plot, "gamma_ratio.csv")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// `log2:a,b`, `log:a,b` or `power:a,b,beta`.
    pub phi: String,
    pub depth: usize,
    pub mode: Mode,
    pub c: Coupling,
    /// Largest `N` of the dense part of the growth table.
    pub n_max: u64,
    pub schedule: Schedule,
    pub grid: usize,
    /// Starting working precision in bits.
    pub precision: u32,
    /// Cap on precision doubling, beyond the operand size.
    pub max_precision: u32,
    pub seed: u64,
    pub interior_samples: usize,
    pub output: OutputPaths,
}

impl Default for RunConfig {
    fn default() -> Self {
        let verify = VerifyConfig::default();
        RunConfig {
            phi: "log2:2,1".into(),
            depth: 2,
            mode: Mode::Paper,
            c: Coupling::Auto,
            n_max: 10_000,
            schedule: verify.schedule,
            grid: verify.grid,
            precision: verify.policy.start,
            max_precision: verify.policy.max,
            seed: verify.seed,
            interior_samples: verify.interior_samples,
            output: OutputPaths::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    /// Checks the documented invariants and parses `φ`.
    pub fn validate(&self) -> Result<GrowthFunction, CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.depth < 1 {
            return bad("depth must be at least 1".into());
        }
        if self.precision < 64 {
            return bad(format!("precision {} is below 64 bits", self.precision));
        }
        if self.max_precision < self.precision {
            return bad(format!(
                "max-precision {} is below precision {}",
                self.max_precision, self.precision
            ));
        }
        if self.schedule.dense_to > self.n_max {
            return bad(format!(
                "schedule dense_to {} exceeds n_max {}",
                self.schedule.dense_to, self.n_max
            ));
        }
        if self.grid < 4 {
            return bad(format!("grid {} is below 4 points", self.grid));
        }
        self.phi
            .parse()
            .map_err(|e| CliError::Config(format!("phi `{}`: {e}", self.phi)))
    }

    pub fn policy(&self) -> PrecisionPolicy {
        PrecisionPolicy::new(self.precision, self.max_precision)
    }

    pub fn verify_config(&self) -> VerifyConfig {
        VerifyConfig {
            schedule: self.schedule.clone(),
            grid: self.grid,
            seed: self.seed,
            interior_samples: self.interior_samples,
            policy: self.policy(),
        }
    }

    /// The growth-table schedule: dense up to `n_max`, then the verifier's
    /// log samples and checkpoints.
    pub fn table_schedule(&self) -> Schedule {
        Schedule {
            dense_to: self.n_max,
            ..self.schedule.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let cfg = RunConfig {
            c: Coupling::Fixed(Rat::ratio(1, 400)),
            mode: Mode::Desk,
            ..RunConfig::default()
        };
        let text = toml::to_string(&cfg).unwrap();
        assert!(text.contains("c = \"1/400\""));
        assert!(text.contains("mode = \"desk\""));
        let back: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn partial_file_uses_defaults() {
        let cfg: RunConfig = toml::from_str(
            "depth = 3\n[schedule]\ndense_to = 50\nlog_samples = 4\ninclude_checkpoints = true\n",
        )
        .unwrap();
        assert_eq!(cfg.depth, 3);
        assert_eq!(cfg.schedule.dense_to, 50);
        assert_eq!(cfg.phi, "log2:2,1");
        assert!(toml::from_str::<RunConfig>("dept = 3").is_err());
    }

    #[test]
    fn validation() {
        assert!(RunConfig::default().validate().is_ok());
        let cases = [
            RunConfig {
                depth: 0,
                ..RunConfig::default()
            },
            RunConfig {
                precision: 32,
                ..RunConfig::default()
            },
            RunConfig {
                n_max: 10,
                ..RunConfig::default()
            },
            RunConfig {
                phi: "log2:1,1/10".into(),
                ..RunConfig::default()
            },
            RunConfig {
                grid: 2,
                ..RunConfig::default()
            },
        ];
        for cfg in cases {
            assert!(
                matches!(cfg.validate(), Err(CliError::Config(_))),
                "{cfg:?}"
            );
        }
    }

    #[test]
    fn coupling_parses() {
        assert_eq!("auto".parse::<Coupling>().unwrap(), Coupling::Auto);
        assert_eq!(
            "0".parse::<Coupling>().unwrap(),
            Coupling::Fixed(Rat::zero())
        );
        assert_eq!(
            "0.0025".parse::<Coupling>().unwrap(),
            Coupling::Fixed(Rat::ratio(1, 400))
        );
        assert!("x".parse::<Coupling>().is_err());
    }
}
