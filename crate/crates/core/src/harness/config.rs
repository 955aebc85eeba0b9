//! Flat `key = value` experiment configuration.
//!
//! Lines starting with `#` are comments. Lists are comma separated. Every key must
//! be known to the selected experiment, so typos fail validation instead of being
//! silently ignored.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::{QnsError, Result};
use crate::pauli::{DensityMatrix, Observable};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    TruncationScan,
    QnsEstimate,
    OptimizeDd,
    PredictRandom,
    ResourcesTable,
}

impl Experiment {
    pub const ALL: [Experiment; 5] = [
        Experiment::TruncationScan,
        Experiment::QnsEstimate,
        Experiment::OptimizeDd,
        Experiment::PredictRandom,
        Experiment::ResourcesTable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::TruncationScan => "truncation-scan",
            Experiment::QnsEstimate => "qns-estimate",
            Experiment::OptimizeDd => "optimize-dd",
            Experiment::PredictRandom => "predict-random",
            Experiment::ResourcesTable => "resources-table",
        }
    }

    /// Keys this experiment reads, besides the common ones.
    fn keys(self) -> &'static [&'static str] {
        match self {
            Experiment::TruncationScan => &[
                "g_over_gamma_min",
                "g_over_gamma_max",
                "points",
                "mc_trajectories",
                "rho0",
                "observable",
            ],
            Experiment::QnsEstimate => &[
                "g_over_gamma",
                "orders",
                "measurement",
                "mc_trajectories",
                "pool_size",
                "max_condition",
                "ridge",
            ],
            Experiment::OptimizeDd => &[
                "omegas",
                "g_over_gamma",
                "orders",
                "spectra_source",
                "starts",
                "max_iters",
                "mc_trajectories",
                "ff_points",
                "ff_omega_max",
            ],
            Experiment::PredictRandom => &[
                "g_over_gamma",
                "controls",
                "threshold",
                "theta_max",
                "rho0",
                "observable",
                "comb_m_max",
                "comb_omega_max",
                "comb_omega0",
                "comb_repetitions",
                "histogram_bins",
            ],
            Experiment::ResourcesTable => &[
                "g_over_gamma",
                "t_coherence",
                "comb_repetitions",
                "comb_m_max",
                "comb_omega_max",
                "comb_omega0",
                "optimize",
                "starts",
                "max_iters",
                "mc_trajectories",
            ],
        }
    }
}

impl FromStr for Experiment {
    type Err = QnsError;
    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| QnsError::Config(format!("unknown experiment '{s}'")))
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

const COMMON_KEYS: &[&str] = &["experiment", "gamma", "omega", "frequency_unit", "L", "T", "seed", "out"];

/// Parsed configuration: raw key/value pairs plus typed accessors with defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    values: BTreeMap<String, String>,
}

impl ExperimentConfig {
    pub fn parse(experiment: Experiment, text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| QnsError::Config(format!("line {}: expected key = value", i + 1)))?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                return Err(QnsError::Config(format!("line {}: empty key", i + 1)));
            }
            if values.insert(k.to_string(), v.to_string()).is_some() {
                return Err(QnsError::Config(format!("line {}: duplicate key '{k}'", i + 1)));
            }
        }
        let cfg = ExperimentConfig { experiment, values };
        cfg.check_keys()?;
        Ok(cfg)
    }

    fn check_keys(&self) -> Result<()> {
        if let Some(named) = self.values.get("experiment") {
            if named.parse::<Experiment>()? != self.experiment {
                return Err(QnsError::Config(format!(
                    "config is for '{named}' but '{}' was requested",
                    self.experiment
                )));
            }
        }
        for k in self.values.keys() {
            if !COMMON_KEYS.contains(&k.as_str()) && !self.experiment.keys().contains(&k.as_str()) {
                return Err(QnsError::Config(format!("unknown key '{k}' for {}", self.experiment)));
            }
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.values.insert(key.to_string(), value.to_string());
    }

    /// Canonical text: sorted `key = value` lines, the experiment first. The output
    /// directory is left out, since it does not change any result.
    pub fn canonical(&self) -> String {
        let mut out = format!("experiment = {}\n", self.experiment);
        for (k, v) in &self.values {
            if k != "experiment" && k != "out" {
                out.push_str(&format!("{k} = {v}\n"));
            }
        }
        out
    }

    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| QnsError::Config(format!("{key}: cannot parse '{v}'"))),
        }
    }

    pub fn list<T: FromStr + Clone>(&self, key: &str, default: &[T]) -> Result<Vec<T>> {
        match self.raw(key) {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split(',')
                .map(|s| {
                    let s = s.trim();
                    s.parse().map_err(|_| QnsError::Config(format!("{key}: cannot parse '{s}'")))
                })
                .collect(),
        }
    }

    pub fn seed(&self) -> Result<u64> {
        self.get("seed", 0)
    }

    pub fn out_dir(&self) -> PathBuf {
        PathBuf::from(self.raw("out").unwrap_or("out"))
    }

    /// Factor that converts configured frequencies to rad/μs. With `frequency_unit =
    /// label` values are read in label units, which are 2π times rad/μs.
    pub fn frequency_scale(&self) -> Result<f64> {
        match self.raw("frequency_unit").unwrap_or("rad_per_us") {
            "rad_per_us" => Ok(1.0),
            "label" => Ok(1.0 / (2.0 * PI)),
            other => Err(QnsError::Config(format!("frequency_unit: expected rad_per_us or label, got '{other}'"))),
        }
    }

    /// Frequency in rad/μs; `default` is already in rad/μs.
    pub fn frequency(&self, key: &str, default: f64) -> Result<f64> {
        match self.raw(key) {
            None => Ok(default),
            Some(_) => Ok(self.get::<f64>(key, 0.0)? * self.frequency_scale()?),
        }
    }

    pub fn frequencies(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.raw(key) {
            None => Ok(default.to_vec()),
            Some(_) => {
                let s = self.frequency_scale()?;
                Ok(self.list::<f64>(key, &[])?.into_iter().map(|v| v * s).collect())
            }
        }
    }

    /// `+x`, `-y`, ... for the six Pauli eigenstates.
    pub fn state(&self, key: &str, default: &str) -> Result<DensityMatrix> {
        let v = self.raw(key).unwrap_or(default);
        let (sign, axis) = match v.split_at_checked(1) {
            Some(("+", a)) => (1.0, a),
            Some(("-", a)) => (-1.0, a),
            _ => return Err(QnsError::Config(format!("{key}: expected ±x, ±y or ±z, got '{v}'"))),
        };
        Ok(DensityMatrix::pauli_eigenstate(axis_index(key, axis)?, sign))
    }

    pub fn observable(&self, key: &str, default: &str) -> Result<(String, Observable)> {
        let v = self.raw(key).unwrap_or(default);
        Ok((v.to_string(), Observable::pauli(axis_index(key, v)?)))
    }
}

fn axis_index(key: &str, axis: &str) -> Result<usize> {
    match axis {
        "x" => Ok(1),
        "y" => Ok(2),
        "z" => Ok(3),
        _ => Err(QnsError::Config(format!("{key}: unknown axis '{axis}'"))),
    }
}
