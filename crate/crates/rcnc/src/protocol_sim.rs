//! Event-loop engines for the delivery protocols, with airtime accounting.
//!
//! Three strategies deliver one generation from an access point to N lossy
//! clients:
//!
//! * coded broadcast — fresh coded packets until every client's decoder
//!   completes; exactly one ACK per client per generation;
//! * unicast conversion — every source segment sent per client under
//!   stop-and-wait ARQ with binary exponential backoff;
//! * plain multicast — each segment broadcast once, no feedback.
//!
//! Airtime is abstract: data frames, ACK frames, and backoff slots each cost
//! a declared number of units. Every engine is a strictly sequential loop
//! over an explicitly passed random stream, so a (config, seed) pair pins the
//! full run.

use crate::channel::{transmit_broadcast, transmit_unicast, ClientProfile};
use crate::gf2_codec::{next_coded_packet, CodecError, DecoderState, Generation, ReceiveOutcome};
use crate::rng;
use rand::Rng;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("client list must not be empty")]
    EmptyClientList,
    #[error("client {0} does not support rateless decoding and must be routed to unicast")]
    NonDecodingClient(u32),
    #[error("event cap of {cap} transmissions exceeded in {mode} run")]
    EventCapExceeded { mode: ProtocolMode, cap: u64 },
    #[error("invalid airtime model: {0}")]
    InvalidAirtime(&'static str),
    #[error(transparent)]
    Codec(#[from] CodecError),
}

/// Label of the protocol that produced a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProtocolMode {
    Rcnc,
    Unicast,
    Plain,
    Mixed,
}

impl ProtocolMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProtocolMode::Rcnc => "rcnc",
            ProtocolMode::Unicast => "unicast",
            ProtocolMode::Plain => "plain",
            ProtocolMode::Mixed => "mixed",
        }
    }
}

impl fmt::Display for ProtocolMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Abstract medium-occupancy costs and the contention-window bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct AirtimeModel {
    /// Units per data or coded packet transmission.
    pub t_data: f64,
    /// Units per ACK frame.
    pub t_ack: f64,
    /// Units per backoff slot.
    pub t_slot: f64,
    /// Initial contention window, in slots.
    pub cw_min: u32,
    /// Contention-window cap; must be `cw_min * 2^j`.
    pub cw_max: u32,
}

impl Default for AirtimeModel {
    fn default() -> Self {
        Self {
            t_data: 1.0,
            t_ack: 0.05,
            t_slot: 0.01,
            cw_min: 16,
            cw_max: 1024,
        }
    }
}

impl AirtimeModel {
    pub fn validate(&self) -> Result<(), SimError> {
        let positive = |t: f64| t.is_finite() && t > 0.0;
        if !positive(self.t_data) || !positive(self.t_ack) || !positive(self.t_slot) {
            return Err(SimError::InvalidAirtime("unit times must be positive"));
        }
        if self.cw_min == 0 {
            return Err(SimError::InvalidAirtime("cw_min must be positive"));
        }
        if self.cw_max < self.cw_min {
            return Err(SimError::InvalidAirtime("cw_max must be >= cw_min"));
        }
        if !self.cw_max.is_multiple_of(self.cw_min) || !(self.cw_max / self.cw_min).is_power_of_two() {
            return Err(SimError::InvalidAirtime("cw_max must be cw_min times a power of two"));
        }
        Ok(())
    }
}

/// Per-run inputs shared by all engines.
#[derive(Debug, Clone, Copy)]
pub struct SimSetup<'a> {
    pub airtime: &'a AirtimeModel,
    /// Hard cap on data transmissions; exceeding it aborts the run with a
    /// diagnostic error instead of looping forever.
    pub max_events: u64,
    /// Recorded in the metrics; the stream the caller passes should be
    /// derived from the same seed.
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Counters {
    data_tx: u64,
    ack_count: u64,
    retransmissions: u64,
    backoff_slots: u64,
}

impl Counters {
    fn add(&mut self, other: &Counters) {
        self.data_tx += other.data_tx;
        self.ack_count += other.ack_count;
        self.retransmissions += other.retransmissions;
        self.backoff_slots += other.backoff_slots;
    }
}

/// Outcome of one protocol run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub mode: ProtocolMode,
    pub airtime_units: f64,
    pub data_tx: u64,
    pub ack_count: u64,
    pub retransmissions: u64,
    pub backoff_slots: u64,
    /// Fraction of (client, source packet) pairs ultimately delivered.
    pub delivery_ratio: f64,
    pub completed: bool,
    pub seed: u64,
}

impl RunMetrics {
    fn finalize(
        mode: ProtocolMode,
        counters: Counters,
        airtime: &AirtimeModel,
        delivery_ratio: f64,
        completed: bool,
        seed: u64,
    ) -> Self {
        // Airtime is always derived from the integer counters through this
        // one expression, so the conservation identity holds bit-exactly.
        let airtime_units = counters.data_tx as f64 * airtime.t_data
            + counters.ack_count as f64 * airtime.t_ack
            + counters.backoff_slots as f64 * airtime.t_slot;
        Self {
            mode,
            airtime_units,
            data_tx: counters.data_tx,
            ack_count: counters.ack_count,
            retransmissions: counters.retransmissions,
            backoff_slots: counters.backoff_slots,
            delivery_ratio,
            completed,
            seed,
        }
    }

    fn counters(&self) -> Counters {
        Counters {
            data_tx: self.data_tx,
            ack_count: self.ack_count,
            retransmissions: self.retransmissions,
            backoff_slots: self.backoff_slots,
        }
    }
}

fn sorted_roster(clients: &[ClientProfile]) -> Vec<ClientProfile> {
    let mut roster = clients.to_vec();
    roster.sort_by_key(|c| c.client_id);
    roster
}

/// Coded broadcast: the AP sends fresh coded packets until every client's
/// decoder completes; each client ACKs once, on completion, and drops out of
/// the pending set. Within one broadcast, clients are evaluated in ascending
/// client id.
pub fn run_rcnc<R: Rng>(
    generation: &Generation,
    clients: &[ClientProfile],
    setup: &SimSetup,
    rng: &mut R,
) -> Result<RunMetrics, SimError> {
    if clients.is_empty() {
        return Err(SimError::EmptyClientList);
    }
    if let Some(client) = clients.iter().find(|c| !c.supports_decoding) {
        return Err(SimError::NonDecodingClient(client.client_id));
    }
    let roster = sorted_roster(clients);
    let mut decoders: Vec<DecoderState> = roster
        .iter()
        .map(|_| DecoderState::for_generation(generation))
        .collect();
    let mut pending: Vec<usize> = (0..roster.len()).collect();
    let mut counters = Counters::default();

    while !pending.is_empty() {
        if counters.data_tx >= setup.max_events {
            return Err(SimError::EventCapExceeded {
                mode: ProtocolMode::Rcnc,
                cap: setup.max_events,
            });
        }
        let packet = next_coded_packet(generation, rng);
        counters.data_tx += 1;
        let addressed: Vec<ClientProfile> = pending.iter().map(|&i| roster[i]).collect();
        let outcome = transmit_broadcast(&addressed, rng);
        let mut still_pending = Vec::with_capacity(pending.len());
        for &i in &pending {
            if outcome.delivered(roster[i].client_id)
                && decoders[i].receive(&packet)? == ReceiveOutcome::Complete
            {
                counters.ack_count += 1;
                continue;
            }
            still_pending.push(i);
        }
        pending = still_pending;
    }

    Ok(RunMetrics::finalize(
        ProtocolMode::Rcnc,
        counters,
        setup.airtime,
        1.0,
        true,
        setup.seed,
    ))
}

/// Multicast-to-unicast conversion: each source segment goes to each client
/// as a plain packet under stop-and-wait ARQ. A failed attempt backs the AP
/// off by a uniform slot count in [0, CW); CW starts at `cw_min`, doubles per
/// consecutive failure of the same packet up to `cw_max`, and resets on
/// success.
pub fn run_unicast_conversion<R: Rng>(
    generation: &Generation,
    clients: &[ClientProfile],
    setup: &SimSetup,
    rng: &mut R,
) -> Result<RunMetrics, SimError> {
    if clients.is_empty() {
        return Err(SimError::EmptyClientList);
    }
    let roster = sorted_roster(clients);
    let k = generation.config().k();
    let mut counters = Counters::default();

    for client in &roster {
        for _segment in 0..k {
            let mut cw = setup.airtime.cw_min;
            loop {
                if counters.data_tx >= setup.max_events {
                    return Err(SimError::EventCapExceeded {
                        mode: ProtocolMode::Unicast,
                        cap: setup.max_events,
                    });
                }
                counters.data_tx += 1;
                if transmit_unicast(client, rng) {
                    counters.ack_count += 1;
                    break;
                }
                counters.backoff_slots += rng.gen_range(0..cw) as u64;
                cw = (cw.saturating_mul(2)).min(setup.airtime.cw_max);
                counters.retransmissions += 1;
            }
        }
    }

    Ok(RunMetrics::finalize(
        ProtocolMode::Unicast,
        counters,
        setup.airtime,
        1.0,
        true,
        setup.seed,
    ))
}

/// Plain multicast: each of the k source segments is broadcast exactly once,
/// with no feedback. Typically does not complete for lossy channels.
pub fn run_plain_multicast<R: Rng>(
    generation: &Generation,
    clients: &[ClientProfile],
    setup: &SimSetup,
    rng: &mut R,
) -> Result<RunMetrics, SimError> {
    if clients.is_empty() {
        return Err(SimError::EmptyClientList);
    }
    let roster = sorted_roster(clients);
    let k = generation.config().k();
    let mut counters = Counters::default();
    let mut delivered_pairs = 0u64;

    for _segment in 0..k {
        if counters.data_tx >= setup.max_events {
            return Err(SimError::EventCapExceeded {
                mode: ProtocolMode::Plain,
                cap: setup.max_events,
            });
        }
        counters.data_tx += 1;
        let outcome = transmit_broadcast(&roster, rng);
        delivered_pairs += outcome.delivered_count() as u64;
    }

    let total_pairs = (k * roster.len()) as u64;
    let delivery_ratio = delivered_pairs as f64 / total_pairs as f64;
    Ok(RunMetrics::finalize(
        ProtocolMode::Plain,
        counters,
        setup.airtime,
        delivery_ratio,
        delivered_pairs == total_pairs,
        setup.seed,
    ))
}

/// Executes a policy partition: the coded phase on `rcnc_clients`, then the
/// unicast phase on `unicast_clients`, serialized on the shared medium with
/// counters summed. Either set may be empty (the run degenerates to the other
/// protocol); both empty is an error.
///
/// Two seeds are drawn from `rng` up front — the first for the coded phase,
/// the second for the unicast phase — so each phase can be replayed in
/// isolation from its sub-seed.
pub fn run_mixed<R: Rng>(
    generation: &Generation,
    rcnc_clients: &[ClientProfile],
    unicast_clients: &[ClientProfile],
    setup: &SimSetup,
    rng: &mut R,
) -> Result<RunMetrics, SimError> {
    if rcnc_clients.is_empty() && unicast_clients.is_empty() {
        return Err(SimError::EmptyClientList);
    }
    let rcnc_seed = rng.next_u64();
    let unicast_seed = rng.next_u64();
    let mut counters = Counters::default();

    if !rcnc_clients.is_empty() {
        let metrics = run_rcnc(generation, rcnc_clients, setup, &mut rng::from_seed(rcnc_seed))?;
        counters.add(&metrics.counters());
    }
    if !unicast_clients.is_empty() {
        let metrics = run_unicast_conversion(
            generation,
            unicast_clients,
            setup,
            &mut rng::from_seed(unicast_seed),
        )?;
        counters.add(&metrics.counters());
    }

    Ok(RunMetrics::finalize(
        ProtocolMode::Mixed,
        counters,
        setup.airtime,
        1.0,
        true,
        setup.seed,
    ))
}
