//! Codec micro-benchmark: throughput and packets-to-complete per k.
//!
//! Quantifies the decoder cost a client must be able to afford. Throughput
//! numbers are environment-dependent and reported, not asserted; the mean
//! packets-to-complete feeds the decoding-overhead oracle.

use super::seed::fnv1a_64;
use super::HarnessError;
use crate::gf2_codec::{make_generation, next_coded_packet, DecoderState};
use crate::rng;
use crate::wire;
use rand::Rng;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

/// Per-k summary of one benchmark run.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchSummary {
    pub k: usize,
    pub trials: usize,
    pub mean_packets_to_complete: f64,
    pub encode_mbps_mean: f64,
    pub encode_mbps_p95: f64,
    pub decode_mbps_mean: f64,
    pub decode_mbps_p95: f64,
}

impl BenchSummary {
    pub const CSV_HEADER: &'static str =
        "k,trials,mean_packets_to_complete,encode_mbps_mean,encode_mbps_p95,decode_mbps_mean,decode_mbps_p95";

    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{:.4},{:.2},{:.2},{:.2},{:.2}",
            self.k,
            self.trials,
            self.mean_packets_to_complete,
            self.encode_mbps_mean,
            self.encode_mbps_p95,
            self.decode_mbps_mean,
            self.decode_mbps_p95
        )
    }
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let rank = ((sorted.len() as f64 * q).ceil() as usize).clamp(1, sorted.len());
    sorted[rank - 1]
}

/// Measures encode and decode throughput plus mean packets-to-complete for
/// each k. When `fixture_out` is set, the first trial's packet stream for
/// each k is appended to that file in the wire layout.
pub fn codec_bench(
    k_list: &[usize],
    segment_size: usize,
    trials: usize,
    seed: u64,
    fixture_out: Option<&Path>,
) -> Result<Vec<BenchSummary>, HarnessError> {
    if k_list.is_empty() || trials == 0 || segment_size == 0 {
        return Err(HarnessError::Config(
            "codec-bench needs a non-empty k list, trials >= 1, and segment_size >= 1".into(),
        ));
    }
    let mut fixture_file = match fixture_out {
        Some(path) => Some(std::fs::File::create(path).map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        })?),
        None => None,
    };

    let mut summaries = Vec::with_capacity(k_list.len());
    for &k in k_list {
        if k == 0 {
            return Err(HarnessError::Config("k values must be at least 1".into()));
        }
        let mut rng = rng::from_seed(fnv1a_64(format!("{seed}|bench|{k}").as_bytes()));
        let data: Vec<u8> = (0..k * segment_size).map(|_| rng.gen()).collect();
        let generation = make_generation(&data, k, k as u32)
            .map_err(|e| HarnessError::Config(e.to_string()))?;

        let mut packets_total = 0u64;
        let mut encode_mbps = Vec::with_capacity(trials);
        let mut decode_mbps = Vec::with_capacity(trials);

        for trial in 0..trials {
            // Encode side: produce a batch of fresh coded packets.
            let batch = k + 8;
            let encode_start = Instant::now();
            let mut packets: Vec<_> =
                (0..batch).map(|_| next_coded_packet(&generation, &mut rng)).collect();
            let encode_secs = encode_start.elapsed().as_secs_f64();
            encode_mbps.push((batch * segment_size) as f64 / 1e6 / encode_secs.max(1e-12));

            // Decode side: feed packets until complete, extending the batch
            // with fresh draws if its redundancy runs out, then recover.
            let mut decoder = DecoderState::for_generation(&generation);
            let mut consumed = 0usize;
            let decode_start = Instant::now();
            while !decoder.is_complete() {
                if consumed == packets.len() {
                    packets.push(next_coded_packet(&generation, &mut rng));
                }
                decoder
                    .receive(&packets[consumed])
                    .map_err(|e| HarnessError::Config(e.to_string()))?;
                consumed += 1;
            }
            let recovered = decoder
                .recover(generation.original_length())
                .map_err(|e| HarnessError::Config(e.to_string()))?;
            let decode_secs = decode_start.elapsed().as_secs_f64();
            debug_assert_eq!(recovered, data);
            decode_mbps.push((consumed * segment_size) as f64 / 1e6 / decode_secs.max(1e-12));
            packets_total += consumed as u64;

            if trial == 0 {
                if let Some(file) = fixture_file.as_mut() {
                    for packet in packets.iter().take(consumed) {
                        wire::write_packet(file, packet)
                            .map_err(|e| HarnessError::Config(e.to_string()))?;
                    }
                    file.flush().map_err(|source| HarnessError::Io {
                        path: fixture_out.unwrap().display().to_string(),
                        source,
                    })?;
                }
            }
        }

        encode_mbps.sort_by(|a, b| a.partial_cmp(b).unwrap());
        decode_mbps.sort_by(|a, b| a.partial_cmp(b).unwrap());
        summaries.push(BenchSummary {
            k,
            trials,
            mean_packets_to_complete: packets_total as f64 / trials as f64,
            encode_mbps_mean: encode_mbps.iter().sum::<f64>() / trials as f64,
            encode_mbps_p95: percentile(&encode_mbps, 0.95),
            decode_mbps_mean: decode_mbps.iter().sum::<f64>() / trials as f64,
            decode_mbps_p95: percentile(&decode_mbps, 0.95),
        });
    }
    Ok(summaries)
}

/// Writes bench summaries as CSV.
pub fn write_bench_csv<W: Write>(writer: &mut W, summaries: &[BenchSummary]) -> std::io::Result<()> {
    writeln!(writer, "{}", BenchSummary::CSV_HEADER)?;
    for summary in summaries {
        writeln!(writer, "{}", summary.to_csv_line())?;
    }
    Ok(())
}
