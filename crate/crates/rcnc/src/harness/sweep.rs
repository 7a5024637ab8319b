//! Grid sweeps and CSV emission.
//!
//! One row per (mode, N, p) grid point and run index, in grid order. Each run
//! derives its own seed, builds a fresh generation of pseudorandom payload,
//! and executes the requested engine; `auto` negotiates, asks the policy, and
//! executes whatever it decided.

use super::config::{ExperimentConfig, SweepMode};
use super::seed::derive_run_seed;
use super::HarnessError;
use crate::channel::ClientProfile;
use crate::gf2_codec::{make_generation, Generation};
use crate::policy::{apply_negotiation, decide_mode, AcceptPolicy, DecidedMode};
use crate::protocol_sim::{
    run_mixed, run_plain_multicast, run_rcnc, run_unicast_conversion, ProtocolMode, RunMetrics,
    SimSetup,
};
use crate::rng;
use rand::Rng;
use std::io::Write;
use std::path::Path;

/// One CSV row: the grid point plus the run's metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub mode: ProtocolMode,
    pub n_clients: usize,
    pub p: f64,
    pub k: usize,
    pub run_index: usize,
    pub seed: u64,
    pub airtime_units: f64,
    pub data_tx: u64,
    pub ack_count: u64,
    pub retransmissions: u64,
    pub delivery_ratio: f64,
    pub completed: bool,
}

pub const CSV_HEADER: &str =
    "mode,n_clients,p,k,run_index,seed,airtime_units,data_tx,ack_count,retransmissions,delivery_ratio,completed";

impl SweepRow {
    fn from_metrics(
        metrics: &RunMetrics,
        n_clients: usize,
        p: f64,
        k: usize,
        run_index: usize,
    ) -> Self {
        Self {
            mode: metrics.mode,
            n_clients,
            p,
            k,
            run_index,
            seed: metrics.seed,
            airtime_units: metrics.airtime_units,
            data_tx: metrics.data_tx,
            ack_count: metrics.ack_count,
            retransmissions: metrics.retransmissions,
            delivery_ratio: metrics.delivery_ratio,
            completed: metrics.completed,
        }
    }

    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{:.6},{},{},{},{:.6},{},{},{},{:.6},{}",
            self.mode,
            self.n_clients,
            self.p,
            self.k,
            self.run_index,
            self.seed,
            self.airtime_units,
            self.data_tx,
            self.ack_count,
            self.retransmissions,
            self.delivery_ratio,
            self.completed
        )
    }
}

fn generation_for_run(config: &ExperimentConfig, run_index: usize, rng: &mut rng::SimRng) -> Result<Generation, HarnessError> {
    let data: Vec<u8> = (0..config.k * config.segment_size).map(|_| rng.gen()).collect();
    make_generation(&data, config.k, run_index as u32)
        .map_err(|e| HarnessError::Config(e.to_string()))
}

fn profiles_for_ids(roster: &[ClientProfile], ids: &[u32]) -> Vec<ClientProfile> {
    roster
        .iter()
        .filter(|c| ids.binary_search(&c.client_id).is_ok())
        .copied()
        .collect()
}

fn partition_by_capability(roster: &[ClientProfile]) -> (Vec<ClientProfile>, Vec<ClientProfile>) {
    let capable = roster.iter().filter(|c| c.supports_decoding).copied().collect();
    let weak = roster.iter().filter(|c| !c.supports_decoding).copied().collect();
    (capable, weak)
}

/// Executes a single (mode, N, p, run) cell and returns its row.
pub fn simulate_point(
    config: &ExperimentConfig,
    mode: SweepMode,
    n_clients: usize,
    p: f64,
    run_index: usize,
) -> Result<SweepRow, HarnessError> {
    let seed = derive_run_seed(config.master_seed, mode.as_str(), n_clients, p, run_index);
    let mut rng = rng::from_seed(seed);
    let generation = generation_for_run(config, run_index, &mut rng)?;
    let roster = config.build_roster(n_clients, p);
    let setup = SimSetup {
        airtime: &config.airtime,
        max_events: config.max_events,
        seed,
    };

    let metrics = match mode {
        SweepMode::Rcnc => run_rcnc(&generation, &roster, &setup, &mut rng)?,
        SweepMode::Unicast => run_unicast_conversion(&generation, &roster, &setup, &mut rng)?,
        SweepMode::Plain => run_plain_multicast(&generation, &roster, &setup, &mut rng)?,
        SweepMode::Mixed => {
            let (capable, weak) = partition_by_capability(&roster);
            run_mixed(&generation, &capable, &weak, &setup, &mut rng)?
        }
        SweepMode::Auto => {
            let negotiated = apply_negotiation(&roster, AcceptPolicy::Always, &mut rng);
            let decision = decide_mode(&negotiated, &config.policy)?;
            match decision.mode {
                DecidedMode::Rcnc => run_rcnc(&generation, &negotiated, &setup, &mut rng)?,
                DecidedMode::Unicast => {
                    run_unicast_conversion(&generation, &negotiated, &setup, &mut rng)?
                }
                DecidedMode::Mixed => {
                    let capable = profiles_for_ids(&negotiated, &decision.rcnc_set);
                    let weak = profiles_for_ids(&negotiated, &decision.unicast_set);
                    run_mixed(&generation, &capable, &weak, &setup, &mut rng)?
                }
            }
        }
    };

    Ok(SweepRow::from_metrics(&metrics, n_clients, p, config.k, run_index))
}

/// Runs the full grid in deterministic order: modes, then N, then p, then run
/// index.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<SweepRow>, HarnessError> {
    config.validate()?;
    let points =
        config.modes.len() * config.n_clients_list.len() * config.p_list.len() * config.runs_per_point;
    let mut rows = Vec::with_capacity(points);
    for &mode in &config.modes {
        for &n_clients in &config.n_clients_list {
            for &p in &config.p_list {
                for run_index in 0..config.runs_per_point {
                    rows.push(simulate_point(config, mode, n_clients, p, run_index)?);
                }
            }
        }
    }
    Ok(rows)
}

/// The CSV text for a row set: header plus one line per row.
pub fn render_csv(rows: &[SweepRow]) -> String {
    let mut text = String::with_capacity((rows.len() + 1) * 64);
    text.push_str(CSV_HEADER);
    text.push('\n');
    for row in rows {
        text.push_str(&row.to_csv_line());
        text.push('\n');
    }
    text
}

/// Writes the rows to `destination` as CSV.
pub fn emit_csv(rows: &[SweepRow], destination: &Path) -> Result<(), HarnessError> {
    let io_err = |source| HarnessError::Io {
        path: destination.display().to_string(),
        source,
    };
    let mut file = std::fs::File::create(destination).map_err(io_err)?;
    file.write_all(render_csv(rows).as_bytes()).map_err(io_err)?;
    file.flush().map_err(io_err)?;
    Ok(())
}
