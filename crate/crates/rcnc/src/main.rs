//! `rcnc` — rateless-coded multicast simulator and codec bench.

use clap::{Parser, Subcommand};
use rcnc::harness::{
    codec_bench, emit_csv, render_csv, run_sweep, simulate_point, write_bench_csv,
    ExperimentConfig, HarnessError, SweepRow,
};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(
    name = "rcnc",
    version,
    about = "Compare reliable-multicast delivery strategies on lossy channels",
    long_about = "Simulates an access point delivering generations of data to N lossy \
                  clients via coded broadcast, per-client unicast ARQ, or plain multicast, \
                  and reports airtime per strategy. All runs are deterministic in the seed."
)]
struct Cli {
    /// Flat key=value configuration file; flags override file values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Master seed for run derivation.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Segments per generation.
    #[arg(long, global = true)]
    k: Option<usize>,

    /// Delivery probabilities, comma-separated.
    #[arg(long, global = true, value_name = "P1,P2,...")]
    p_list: Option<String>,

    /// Client counts, comma-separated.
    #[arg(long, global = true, value_name = "N1,N2,...")]
    n_list: Option<String>,

    /// Protocols to run: rcnc, unicast, plain, mixed, auto.
    #[arg(long, global = true, value_name = "M1,M2,...")]
    modes: Option<String>,

    /// Repetitions per grid point.
    #[arg(long, global = true)]
    runs: Option<usize>,

    /// Airtime units per data packet.
    #[arg(long, global = true)]
    t_data: Option<f64>,

    /// Airtime units per ACK frame.
    #[arg(long, global = true)]
    t_ack: Option<f64>,

    /// Airtime units per backoff slot.
    #[arg(long, global = true)]
    t_slot: Option<f64>,

    /// Initial contention window, in slots.
    #[arg(long, global = true)]
    cw_min: Option<u32>,

    /// Contention-window cap (cw_min times a power of two).
    #[arg(long, global = true)]
    cw_max: Option<u32>,

    /// Client count below which the policy picks unicast.
    #[arg(long, global = true)]
    unicast_threshold: Option<usize>,

    /// Informational sweet-spot client count.
    #[arg(long, global = true)]
    rcnc_sweet_spot: Option<usize>,

    /// Largest roster fraction one collocation group may hold.
    #[arg(long, global = true)]
    collocation_fraction_limit: Option<f64>,

    /// Fraction of clients that support decoding.
    #[arg(long, global = true)]
    capability_fraction: Option<f64>,

    /// Collocation groups as start-end:group entries, comma-separated.
    #[arg(long, global = true, value_name = "A-B:G,...")]
    collocation_spec: Option<String>,

    /// Bytes per source segment.
    #[arg(long, global = true)]
    segment_size: Option<usize>,

    /// Hard cap on data transmissions per protocol phase.
    #[arg(long, global = true)]
    max_events: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one (mode, N, p) point and print its row plus a summary.
    Simulate,
    /// Run the full grid and write one CSV row per run.
    Sweep {
        /// Output CSV path.
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Measure codec throughput and packets-to-complete per k.
    CodecBench {
        /// Segment counts to benchmark, comma-separated.
        #[arg(long, value_name = "K1,K2,...")]
        k_list: Option<String>,
        /// Decode trials per k.
        #[arg(long)]
        trials: Option<usize>,
        /// Append the first trial's packet stream per k to this file.
        #[arg(long, value_name = "PATH")]
        fixture_out: Option<PathBuf>,
    },
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig, HarnessError> {
    let mut config = ExperimentConfig::default();
    if let Some(path) = &cli.config {
        config.apply_file(path)?;
    }
    let overrides: [(&str, Option<String>); 17] = [
        ("seed", cli.seed.map(|v| v.to_string())),
        ("k", cli.k.map(|v| v.to_string())),
        ("p_list", cli.p_list.clone()),
        ("n_list", cli.n_list.clone()),
        ("modes", cli.modes.clone()),
        ("runs", cli.runs.map(|v| v.to_string())),
        ("t_data", cli.t_data.map(|v| v.to_string())),
        ("t_ack", cli.t_ack.map(|v| v.to_string())),
        ("t_slot", cli.t_slot.map(|v| v.to_string())),
        ("cw_min", cli.cw_min.map(|v| v.to_string())),
        ("cw_max", cli.cw_max.map(|v| v.to_string())),
        ("unicast_threshold", cli.unicast_threshold.map(|v| v.to_string())),
        ("rcnc_sweet_spot", cli.rcnc_sweet_spot.map(|v| v.to_string())),
        (
            "collocation_fraction_limit",
            cli.collocation_fraction_limit.map(|v| v.to_string()),
        ),
        ("capability_fraction", cli.capability_fraction.map(|v| v.to_string())),
        ("collocation_spec", cli.collocation_spec.clone()),
        ("segment_size", cli.segment_size.map(|v| v.to_string())),
    ];
    for (key, value) in overrides {
        if let Some(value) = value {
            config.apply_kv(key, &value)?;
        }
    }
    if let Some(max_events) = cli.max_events {
        config.apply_kv("max_events", &max_events.to_string())?;
    }
    Ok(config)
}

fn print_point_summary(row: &SweepRow) {
    println!();
    println!(
        "mode={} n_clients={} p={:.6} k={} seed={}",
        row.mode, row.n_clients, row.p, row.k, row.seed
    );
    println!(
        "airtime={:.6} units  data_tx={}  ack_count={}  retransmissions={}",
        row.airtime_units, row.data_tx, row.ack_count, row.retransmissions
    );
    println!(
        "delivery_ratio={:.6}  completed={}",
        row.delivery_ratio, row.completed
    );
}

fn grid_means(rows: &[SweepRow]) -> Vec<(String, usize, f64, f64, usize)> {
    let mut means: Vec<(String, usize, f64, f64, usize)> = Vec::new();
    for row in rows {
        let key = (row.mode.as_str().to_string(), row.n_clients, row.p);
        match means
            .iter_mut()
            .find(|(m, n, p, _, _)| *m == key.0 && *n == key.1 && *p == key.2)
        {
            Some(entry) => {
                entry.3 += row.airtime_units;
                entry.4 += 1;
            }
            None => means.push((key.0, key.1, key.2, row.airtime_units, 1)),
        }
    }
    means
}

fn run(cli: &Cli) -> Result<(), HarnessError> {
    match &cli.command {
        Command::Simulate => {
            let config = build_config(cli)?;
            config.validate()?;
            let single = |name: &str, len: usize| -> Result<(), HarnessError> {
                if len != 1 {
                    return Err(HarnessError::Config(format!(
                        "simulate runs a single point; pass exactly one value for {name}"
                    )));
                }
                Ok(())
            };
            single("--modes", config.modes.len())?;
            single("--n-list", config.n_clients_list.len())?;
            single("--p-list", config.p_list.len())?;
            let row = simulate_point(
                &config,
                config.modes[0],
                config.n_clients_list[0],
                config.p_list[0],
                0,
            )?;
            print!("{}", render_csv(std::slice::from_ref(&row)));
            print_point_summary(&row);
            Ok(())
        }
        Command::Sweep { out } => {
            let config = build_config(cli)?;
            let rows = run_sweep(&config)?;
            emit_csv(&rows, out)?;
            println!("wrote {} rows to {}", rows.len(), out.display());
            for (mode, n, p, airtime_sum, count) in grid_means(&rows) {
                println!(
                    "  {mode:>8}  n={n:<3} p={p:.3}  mean airtime {:.3} over {count} runs",
                    airtime_sum / count as f64
                );
            }
            Ok(())
        }
        Command::CodecBench {
            k_list,
            trials,
            fixture_out,
        } => {
            let config = build_config(cli)?;
            let k_values: Vec<usize> = match k_list {
                Some(list) => list
                    .split(',')
                    .map(|item| {
                        item.trim().parse().map_err(|_| {
                            HarnessError::Config(format!("bad k value '{}'", item.trim()))
                        })
                    })
                    .collect::<Result<_, _>>()?,
                None => vec![1, 2, 4, 8, 16, 32, 64],
            };
            let trials = trials.unwrap_or(2000);
            let summaries = codec_bench(
                &k_values,
                config.segment_size,
                trials,
                config.master_seed,
                fixture_out.as_deref(),
            )?;
            let mut stdout = std::io::stdout().lock();
            write_bench_csv(&mut stdout, &summaries).map_err(|source| HarnessError::Io {
                path: "stdout".into(),
                source,
            })?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("rcnc: {error}");
            ExitCode::from(error.exit_code() as u8)
        }
    }
}
