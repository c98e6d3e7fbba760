//! Run configuration: one JSON file naming the inputs, tolerances,
//! horizons, seed, and output destination.  Relative paths inside the config
//! resolve against the config file's own directory.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use riskdual::{Error, Result};

/// Report format; JSON is the structured default, CSV covers tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Optional echo of the subcommand; when present it must match the one
    /// actually invoked.
    pub command: Option<String>,
    /// Space (or compactification pair) file.
    pub space: Option<String>,
    /// Function file for eval/envelope and the directed duality probe.
    pub function: Option<String>,
    /// Utility file; duality expects the `indicator_cone` kind.
    pub utility: Option<String>,
    /// Decreasing-sequence file for fatou.
    pub sequence: Option<String>,
    /// Measure files whose conjugate penalties duality reports.
    pub measures: Vec<String>,
    /// Point ids used as bump centers by probe.
    pub centers: Vec<String>,
    /// Lipschitz moduli for envelope.
    pub envelope_ns: Vec<f64>,
    /// Random probe count for the duality round trip.
    pub probes: usize,
    /// General check tolerance.
    pub tol: f64,
    /// Tolerance for the monotone-continuity gap; defaults to `tol`.
    pub fatou_tol: Option<f64>,
    /// Sequence horizon.
    #[serde(rename = "M_max")]
    pub m_max: usize,
    /// Localization horizon.
    #[serde(rename = "N_max")]
    pub n_max: usize,
    pub seed: u64,
    /// Permit constraint-form scenario sets past the exact-enumeration cap.
    pub allow_oracle: bool,
    pub out: Option<String>,
    pub format: Option<OutputFormat>,
    /// Base directory for relative paths; set from the config location.
    #[serde(skip)]
    pub base: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: None,
            space: None,
            function: None,
            utility: None,
            sequence: None,
            measures: Vec::new(),
            centers: Vec::new(),
            envelope_ns: vec![1.0, 2.0, 4.0, 8.0],
            probes: 100,
            tol: 1e-9,
            fatou_tol: None,
            m_max: 30,
            n_max: 5,
            seed: riskdual::suite::DEFAULT_SEED,
            allow_oracle: false,
            out: None,
            format: None,
            base: PathBuf::from("."),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::UnresolvedReference {
            reference: path.display().to_string(),
            reason: e.to_string(),
        })?;
        let mut cfg: RunConfig = serde_json::from_str(&text).map_err(|e| Error::Format {
            path: Some(path.display().to_string()),
            reason: e.to_string(),
        })?;
        cfg.base = path
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .unwrap_or_else(|| Path::new("."))
            .to_path_buf();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::param("tol", "tolerance must be positive"));
        }
        if let Some(t) = self.fatou_tol {
            if !(t > 0.0) {
                return Err(Error::param("fatou_tol", "tolerance must be positive"));
            }
        }
        if self.m_max == 0 {
            return Err(Error::param("M_max", "horizon must be at least 1"));
        }
        if self.n_max == 0 {
            return Err(Error::param("N_max", "horizon must be at least 1"));
        }
        for &n in &self.envelope_ns {
            if !(n > 0.0) || !n.is_finite() {
                return Err(Error::param("envelope_ns", "moduli must be positive"));
            }
        }
        Ok(())
    }

    /// Resolve a config-relative reference.
    pub fn path(&self, reference: &str) -> PathBuf {
        let p = Path::new(reference);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    /// A named input path, or a config error pointing at the missing field.
    pub fn require(&self, field: &'static str, value: &Option<String>) -> Result<PathBuf> {
        value
            .as_ref()
            .map(|v| self.path(v))
            .ok_or_else(|| Error::param(field, "this command needs the field set in the config"))
    }

    pub fn fatou_tolerance(&self) -> f64 {
        self.fatou_tol.unwrap_or(self.tol)
    }
}
