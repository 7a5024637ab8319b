//! Experiment configuration: defaults, the flat key=value file format, and
//! roster construction.
//!
//! Every key can also be set from a CLI flag of the same name; precedence is
//! defaults < file < flags. List values are comma-separated.

use super::HarnessError;
use crate::channel::ClientProfile;
use crate::policy::PolicyConfig;
use crate::protocol_sim::AirtimeModel;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

/// A grid mode: the four protocol engines plus `auto`, which negotiates and
/// lets the policy pick.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMode {
    Rcnc,
    Unicast,
    Plain,
    Mixed,
    Auto,
}

impl SweepMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepMode::Rcnc => "rcnc",
            SweepMode::Unicast => "unicast",
            SweepMode::Plain => "plain",
            SweepMode::Mixed => "mixed",
            SweepMode::Auto => "auto",
        }
    }
}

impl fmt::Display for SweepMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rcnc" => Ok(SweepMode::Rcnc),
            "unicast" => Ok(SweepMode::Unicast),
            "plain" => Ok(SweepMode::Plain),
            "mixed" => Ok(SweepMode::Mixed),
            "auto" => Ok(SweepMode::Auto),
            other => Err(format!(
                "unknown mode '{other}' (expected rcnc, unicast, plain, mixed, or auto)"
            )),
        }
    }
}

/// An inclusive client-index range assigned to a collocation group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CollocationRange {
    pub start: u32,
    pub end: u32,
    pub group: u32,
}

impl CollocationRange {
    pub fn contains(&self, client_index: u32) -> bool {
        (self.start..=self.end).contains(&client_index)
    }
}

impl FromStr for CollocationRange {
    type Err = String;

    /// `start-end:group` or `index:group`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (range, group) = s
            .split_once(':')
            .ok_or_else(|| format!("collocation entry '{s}' is missing ':group'"))?;
        let group: u32 = group
            .parse()
            .map_err(|_| format!("bad collocation group id in '{s}'"))?;
        let (start, end) = match range.split_once('-') {
            Some((a, b)) => (
                a.parse().map_err(|_| format!("bad range start in '{s}'"))?,
                b.parse().map_err(|_| format!("bad range end in '{s}'"))?,
            ),
            None => {
                let index = range.parse().map_err(|_| format!("bad client index in '{s}'"))?;
                (index, index)
            }
        };
        if end < start {
            return Err(format!("empty range in '{s}'"));
        }
        Ok(CollocationRange { start, end, group })
    }
}

/// Full description of an experiment grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub modes: Vec<SweepMode>,
    pub n_clients_list: Vec<usize>,
    pub p_list: Vec<f64>,
    pub k: usize,
    pub runs_per_point: usize,
    pub master_seed: u64,
    pub airtime: AirtimeModel,
    pub policy: PolicyConfig,
    /// Fraction of each roster's lowest client ids that support decoding.
    pub capability_fraction: f64,
    pub collocation_spec: Vec<CollocationRange>,
    /// Bytes per source segment for the generated payloads.
    pub segment_size: usize,
    /// Hard cap on data transmissions per protocol phase.
    pub max_events: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            modes: vec![SweepMode::Rcnc, SweepMode::Unicast],
            n_clients_list: vec![2, 5, 10, 20, 40],
            p_list: vec![0.5],
            k: 32,
            runs_per_point: 500,
            master_seed: 42,
            airtime: AirtimeModel::default(),
            policy: PolicyConfig::default(),
            capability_fraction: 1.0,
            collocation_spec: Vec::new(),
            segment_size: 64,
            max_events: 10_000_000,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, HarnessError>
where
    T::Err: fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| HarnessError::Config(format!("bad value for {key}: {e}")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>, HarnessError>
where
    T::Err: fmt::Display,
{
    if value.trim().is_empty() {
        return Ok(Vec::new());
    }
    value.split(',').map(|item| parse_value(key, item)).collect()
}

impl ExperimentConfig {
    /// Applies one `key=value` pair. Unknown keys are configuration errors.
    pub fn apply_kv(&mut self, key: &str, value: &str) -> Result<(), HarnessError> {
        match key {
            "modes" => self.modes = parse_list(key, value)?,
            "n_list" => self.n_clients_list = parse_list(key, value)?,
            "p_list" => self.p_list = parse_list(key, value)?,
            "k" => self.k = parse_value(key, value)?,
            "runs" => self.runs_per_point = parse_value(key, value)?,
            "seed" => self.master_seed = parse_value(key, value)?,
            "t_data" => self.airtime.t_data = parse_value(key, value)?,
            "t_ack" => self.airtime.t_ack = parse_value(key, value)?,
            "t_slot" => self.airtime.t_slot = parse_value(key, value)?,
            "cw_min" => self.airtime.cw_min = parse_value(key, value)?,
            "cw_max" => self.airtime.cw_max = parse_value(key, value)?,
            "unicast_threshold" => self.policy.unicast_threshold = parse_value(key, value)?,
            "rcnc_sweet_spot" => self.policy.rcnc_sweet_spot = parse_value(key, value)?,
            "collocation_fraction_limit" => {
                self.policy.collocation_fraction_limit = parse_value(key, value)?
            }
            "capability_fraction" => self.capability_fraction = parse_value(key, value)?,
            "collocation_spec" => self.collocation_spec = parse_list(key, value)?,
            "segment_size" => self.segment_size = parse_value(key, value)?,
            "max_events" => self.max_events = parse_value(key, value)?,
            other => {
                return Err(HarnessError::Config(format!("unknown configuration key '{other}'")))
            }
        }
        Ok(())
    }

    /// Loads `key=value` lines from a file. Blank lines and `#` comments are
    /// skipped.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        })?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                HarnessError::Config(format!(
                    "{}:{}: expected key=value, got '{line}'",
                    path.display(),
                    lineno + 1
                ))
            })?;
            self.apply_kv(key.trim(), value)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.modes.is_empty() {
            return Err(HarnessError::Config("modes must not be empty".into()));
        }
        if self.n_clients_list.is_empty() || self.n_clients_list.contains(&0) {
            return Err(HarnessError::Config("n_list entries must be at least 1".into()));
        }
        if self.p_list.is_empty() || self.p_list.iter().any(|&p| !(p > 0.0 && p <= 1.0)) {
            return Err(HarnessError::Config("p_list entries must be in (0, 1]".into()));
        }
        if self.k == 0 {
            return Err(HarnessError::Config("k must be at least 1".into()));
        }
        if self.runs_per_point == 0 {
            return Err(HarnessError::Config("runs must be at least 1".into()));
        }
        if self.segment_size == 0 {
            return Err(HarnessError::Config("segment_size must be at least 1".into()));
        }
        if self.max_events == 0 {
            return Err(HarnessError::Config("max_events must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.capability_fraction) {
            return Err(HarnessError::Config("capability_fraction must be in [0, 1]".into()));
        }
        self.airtime
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        self.policy
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        if self.modes.contains(&SweepMode::Rcnc) && self.capability_fraction < 1.0 {
            return Err(HarnessError::Config(
                "mode 'rcnc' requires capability_fraction = 1; \
                 use 'mixed' or 'auto' for partially capable rosters"
                    .into(),
            ));
        }
        Ok(())
    }

    /// Builds the deterministic roster for one grid point: clients 0..n at
    /// success probability `p`, the lowest `round(capability_fraction * n)`
    /// ids decode-capable, collocation groups from the collocation_spec
    /// ranges.
    pub fn build_roster(&self, n_clients: usize, p: f64) -> Vec<ClientProfile> {
        let capable = (self.capability_fraction * n_clients as f64).round() as usize;
        (0..n_clients)
            .map(|i| {
                let mut client = ClientProfile::new(i as u32, p).with_decoding(i < capable);
                for range in &self.collocation_spec {
                    if range.contains(i as u32) {
                        client = client.with_collocation_group(range.group);
                    }
                }
                client
            })
            .collect()
    }
}
