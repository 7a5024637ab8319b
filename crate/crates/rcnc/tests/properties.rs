//! Property suites for the codec, wire format, channel, engines, and policy.

mod common;

use proptest::prelude::*;
use rand::Rng as _;
use rcnc::channel::ClientProfile;
use rcnc::gf2_codec::{
    make_generation, next_coded_packet, CodedPacket, CoefficientVector, DecoderState, Generation,
    ReceiveOutcome,
};
use rcnc::policy::{decide_mode, PolicyConfig};
use rcnc::protocol_sim::{
    run_mixed, run_plain_multicast, run_rcnc, run_unicast_conversion, AirtimeModel, RunMetrics,
    SimSetup,
};
use rcnc::rng;
use rcnc::wire;

fn recompute_airtime(metrics: &RunMetrics, airtime: &AirtimeModel) -> f64 {
    metrics.data_tx as f64 * airtime.t_data
        + metrics.ack_count as f64 * airtime.t_ack
        + metrics.backoff_slots as f64 * airtime.t_slot
}

/// Straight fold of the segments a coefficient vector selects.
fn xor_of_segments(generation: &Generation, coefficients: &CoefficientVector) -> Vec<u8> {
    let mut out = vec![0u8; generation.config().segment_size()];
    for j in coefficients.iter_set_bits() {
        for (o, s) in out.iter_mut().zip(generation.segment(j)) {
            *o ^= s;
        }
    }
    out
}

proptest! {
    /// Feeding coded packets until complete recovers the source bit-exactly,
    /// with exactly k rank-increasing receptions along the way.
    #[test]
    fn roundtrip_identity(
        len in 1usize..=2048,
        k in 1usize..=64,
        seed in any::<u64>(),
    ) {
        let mut rng = rng::from_seed(seed);
        let data: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
        let generation = make_generation(&data, k, 1).unwrap();
        let mut decoder = DecoderState::for_generation(&generation);
        let mut rank_increases = 0usize;
        while !decoder.is_complete() {
            let packet = next_coded_packet(&generation, &mut rng);
            if decoder.receive(&packet).unwrap().increased_rank() {
                rank_increases += 1;
            }
        }
        prop_assert_eq!(rank_increases, k);
        prop_assert_eq!(decoder.recover(len).unwrap(), data);
    }

    /// Under any interleaving of fresh and replayed packets: rank never
    /// decreases, pivots stay pairwise distinct, redundant packets leave the
    /// state unchanged, and every stored payload is the XOR of the segments
    /// its coefficients select.
    #[test]
    fn decoder_state_invariants(
        k in 1usize..=24,
        replay_bias in 0u8..=4,
        seed in any::<u64>(),
    ) {
        let mut rng = rng::from_seed(seed);
        let data: Vec<u8> = (0..k * 3).map(|_| rng.gen()).collect();
        let generation = make_generation(&data, k, 0).unwrap();
        let mut decoder = DecoderState::for_generation(&generation);
        let mut history: Vec<CodedPacket> = Vec::new();
        let mut last_rank = 0usize;

        for _ in 0..3 * k + 8 {
            let replay = !history.is_empty() && rng.gen_range(0..10) < replay_bias as u32;
            let packet = if replay {
                history[rng.gen_range(0..history.len())].clone()
            } else {
                let p = next_coded_packet(&generation, &mut rng);
                history.push(p.clone());
                p
            };

            let before = decoder.clone();
            let outcome = decoder.receive(&packet).unwrap();

            prop_assert!(decoder.rank() >= last_rank, "rank must not decrease");
            if outcome == ReceiveOutcome::Redundant {
                prop_assert_eq!(decoder.rank(), last_rank);
                prop_assert_eq!(before.pivots(), decoder.pivots());
                let unchanged = before
                    .rows()
                    .zip(decoder.rows())
                    .all(|((ca, pa), (cb, pb))| ca == cb && pa == pb);
                prop_assert!(unchanged, "redundant packet must not touch stored rows");
            } else {
                prop_assert_eq!(decoder.rank(), last_rank + 1);
            }
            last_rank = decoder.rank();

            let pivots = decoder.pivots();
            let mut dedup = pivots.clone();
            dedup.dedup();
            prop_assert_eq!(&pivots, &dedup, "pivot columns must be pairwise distinct");
            prop_assert!(pivots.windows(2).all(|w| w[0] < w[1]));

            for (coefficients, payload) in decoder.rows() {
                let expected = xor_of_segments(&generation, coefficients);
                prop_assert_eq!(payload, expected.as_slice(), "stored payload consistency");
            }
        }
    }

    /// Wire records survive serialization, including through a stream of
    /// several records.
    #[test]
    fn wire_roundtrip(
        k in 1usize..=200,
        segment_size in 1usize..=64,
        count in 1usize..=5,
        seed in any::<u64>(),
    ) {
        let mut rng = rng::from_seed(seed);
        let data: Vec<u8> = (0..k * segment_size).map(|_| rng.gen()).collect();
        let generation = make_generation(&data, k, rng.gen()).unwrap();
        let packets: Vec<CodedPacket> =
            (0..count).map(|_| next_coded_packet(&generation, &mut rng)).collect();

        let mut buffer = Vec::new();
        for packet in &packets {
            wire::write_packet(&mut buffer, packet).unwrap();
        }
        let parsed = wire::read_all_packets(&mut buffer.as_slice()).unwrap();
        prop_assert_eq!(parsed, packets);
    }

    /// The airtime conservation identity holds exactly for every engine.
    #[test]
    fn airtime_conservation(
        n in 1u32..=8,
        k in 1usize..=16,
        p in 0.2f64..=1.0,
        seed in any::<u64>(),
    ) {
        let airtime = AirtimeModel::default();
        let setup = SimSetup { airtime: &airtime, max_events: 1_000_000, seed };
        let mut rng = rng::from_seed(seed);
        let data: Vec<u8> = (0..k * 4).map(|_| rng.gen()).collect();
        let generation = make_generation(&data, k, 0).unwrap();
        let clients: Vec<ClientProfile> =
            (0..n).map(|id| ClientProfile::new(id, p)).collect();

        let runs = [
            run_rcnc(&generation, &clients, &setup, &mut rng).unwrap(),
            run_unicast_conversion(&generation, &clients, &setup, &mut rng).unwrap(),
            run_plain_multicast(&generation, &clients, &setup, &mut rng).unwrap(),
        ];
        for metrics in &runs {
            prop_assert_eq!(metrics.airtime_units, recompute_airtime(metrics, &airtime));
        }
        // One ACK per client for the coded run, one per (client, segment)
        // for the unicast run, none for plain multicast.
        prop_assert_eq!(runs[0].ack_count, n as u64);
        prop_assert_eq!(runs[1].ack_count, (n as usize * k) as u64);
        prop_assert_eq!(runs[2].ack_count, 0);
        if n >= 2 {
            let split = n as usize / 2;
            let mixed =
                run_mixed(&generation, &clients[..split], &clients[split..], &setup, &mut rng)
                    .unwrap();
            prop_assert_eq!(mixed.airtime_units, recompute_airtime(&mixed, &airtime));
        }
    }

    /// Broadcast delivery is deterministic in the seed and covers exactly the
    /// addressed clients.
    #[test]
    fn broadcast_determinism_and_coverage(
        n in 1u32..=12,
        p in 0.1f64..=1.0,
        grouped in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let clients: Vec<ClientProfile> = (0..n)
            .map(|id| {
                let c = ClientProfile::new(id, p);
                if grouped && id % 2 == 0 {
                    c.with_collocation_group(1)
                } else {
                    c
                }
            })
            .collect();
        let a = rcnc::channel::transmit_broadcast(&clients, &mut rng::from_seed(seed));
        let b = rcnc::channel::transmit_broadcast(&clients, &mut rng::from_seed(seed));
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a.len(), n as usize);
        for client in &clients {
            prop_assert!(a.contains(client.client_id));
        }
    }

    /// Mode decisions always partition the roster, with set shapes matching
    /// the decided mode.
    #[test]
    fn decision_partition(
        n in 1usize..=64,
        capable_bias in 0u8..=10,
        group_bias in 0u8..=10,
        seed in any::<u64>(),
    ) {
        let mut rng = rng::from_seed(seed);
        let clients: Vec<ClientProfile> = (0..n as u32)
            .map(|id| {
                let mut c = ClientProfile::new(id, 0.5)
                    .with_decoding(rng.gen_range(0..10) < capable_bias as u32);
                if rng.gen_range(0..10) < group_bias as u32 {
                    c = c.with_collocation_group(rng.gen_range(0..3));
                }
                c
            })
            .collect();
        let decision = decide_mode(&clients, &PolicyConfig::default()).unwrap();

        let mut union: Vec<u32> =
            decision.rcnc_set.iter().chain(&decision.unicast_set).copied().collect();
        union.sort_unstable();
        let mut ids: Vec<u32> = clients.iter().map(|c| c.client_id).collect();
        ids.sort_unstable();
        prop_assert_eq!(union, ids);

        use rcnc::policy::DecidedMode;
        match decision.mode {
            DecidedMode::Rcnc => prop_assert!(decision.unicast_set.is_empty()),
            DecidedMode::Unicast => prop_assert!(decision.rcnc_set.is_empty()),
            DecidedMode::Mixed => prop_assert!(
                !decision.rcnc_set.is_empty() && !decision.unicast_set.is_empty()
            ),
        }
    }

    /// Coefficient wire layout: bit j lands at bit (7 - j % 8) of byte j / 8.
    #[test]
    fn coefficient_bit_layout(k in 1usize..=64, seed in any::<u64>()) {
        let mut rng = rng::from_seed(seed);
        let coefficients = CoefficientVector::random_nonzero(k, &mut rng);
        let generation = make_generation(&vec![1u8; k], k, 3).unwrap();
        let packet = CodedPacket::from_coefficients(&generation, coefficients.clone());
        let bytes = wire::packet_to_bytes(&packet).unwrap();
        let coeff_bytes = &bytes[8..8 + k.div_ceil(8)];
        for j in 0..k {
            let wire_bit = coeff_bytes[j / 8] >> (7 - (j % 8)) & 1 == 1;
            prop_assert_eq!(wire_bit, coefficients.get(j), "bit {}", j);
        }
    }
}
