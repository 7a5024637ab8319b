//! Monte-Carlo oracles shared by the integration suites.
//!
//! Each oracle is an independent implementation of the process it checks:
//! rank growth is done on raw u64 bitmasks with highest-bit pivoting (the
//! codec uses word vectors with lowest-bit pivoting), protocol completion is
//! modeled as a probability chain rather than an event loop.

#![allow(dead_code)]

use rand::Rng;
use rcnc::protocol_sim::AirtimeModel;
use rcnc::rng;

/// Brute-force mean packets-to-complete: draw uniform nonzero k-bit masks and
/// insert them into an XOR basis keyed by highest set bit until rank is k.
/// Supports k up to 64.
pub fn rank_oracle_mean_packets(k: usize, trials: usize, seed: u64) -> f64 {
    assert!(k >= 1 && k <= 64);
    let mask = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    let mut rng = rng::from_seed(seed);
    let mut total = 0u64;
    for _ in 0..trials {
        let mut basis = [0u64; 64];
        let mut rank = 0usize;
        while rank < k {
            let mut v = rng.gen::<u64>() & mask;
            while v == 0 {
                v = rng.gen::<u64>() & mask;
            }
            total += 1;
            while v != 0 {
                let high = 63 - v.leading_zeros() as usize;
                if basis[high] == 0 {
                    basis[high] = v;
                    rank += 1;
                    break;
                }
                v ^= basis[high];
            }
        }
    }
    total as f64 / trials as f64
}

/// Probability that a uniform nonzero vector is innovative at a given rank:
/// (2^k - 2^rank) / (2^k - 1).
fn innovation_probs(k: usize) -> Vec<f64> {
    let total = 2f64.powi(k as i32);
    (0..k).map(|r| (total - 2f64.powi(r as i32)) / (total - 1.0)).collect()
}

/// Mean broadcasts until all n clients complete, modeling each client as an
/// independent chain: a broadcast reaches the client with probability p, and
/// a received packet raises its rank with the innovation probability. The
/// run length is the maximum completion time over the n chains.
pub fn completion_max_oracle(n: usize, k: usize, p: f64, trials: usize, seed: u64) -> f64 {
    let probs = innovation_probs(k);
    let mut rng = rng::from_seed(seed);
    let mut total = 0u64;
    for _ in 0..trials {
        let mut worst = 0u64;
        for _client in 0..n {
            let mut broadcasts = 0u64;
            let mut rank = 0usize;
            while rank < k {
                broadcasts += 1;
                if rng.gen_bool(p) && rng.gen_bool(probs[rank]) {
                    rank += 1;
                }
            }
            worst = worst.max(broadcasts);
        }
        total += worst;
    }
    total as f64 / trials as f64
}

/// Mean backoff slots spent per delivered packet under the doubling
/// contention-window chain: each failed attempt draws uniform in [0, CW) and
/// doubles CW up to the cap.
pub fn cw_slots_per_packet_oracle(
    p: f64,
    cw_min: u32,
    cw_max: u32,
    trials: usize,
    seed: u64,
) -> f64 {
    let mut rng = rng::from_seed(seed);
    let mut slots = 0u64;
    for _ in 0..trials {
        let mut cw = cw_min;
        while !rng.gen_bool(p) {
            slots += rng.gen_range(0..cw) as u64;
            cw = (cw * 2).min(cw_max);
        }
    }
    slots as f64 / trials as f64
}

/// Expected airtime of a coded-broadcast run from the completion oracle:
/// every broadcast costs t_data and each client ACKs exactly once.
pub fn rcnc_airtime_oracle(mean_max_broadcasts: f64, n: usize, airtime: &AirtimeModel) -> f64 {
    mean_max_broadcasts * airtime.t_data + n as f64 * airtime.t_ack
}

/// Expected airtime of a unicast-conversion run: N*k packets with geometric
/// attempts (mean 1/p), one ACK per packet, and the CW-chain backoff slots.
pub fn unicast_airtime_oracle(
    n: usize,
    k: usize,
    p: f64,
    slots_per_packet: f64,
    airtime: &AirtimeModel,
) -> f64 {
    let packets = (n * k) as f64;
    packets / p * airtime.t_data
        + packets * airtime.t_ack
        + packets * slots_per_packet * airtime.t_slot
}
