//! End-to-end checks of the `rcnc` binary: subcommands, config handling, and
//! exit codes (0 success, 2 config, 3 i/o, 4 event cap).

use std::process::Command;

fn rcnc() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rcnc"))
}

#[test]
fn simulate_lossless_plain_point_is_exact() {
    let output = rcnc()
        .args([
            "--modes", "plain", "--n-list", "3", "--p-list", "1.0", "--k", "8",
            "--segment-size", "4", "simulate",
        ])
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let stdout = String::from_utf8(output.stdout).unwrap();
    let mut lines = stdout.lines();
    assert!(lines.next().unwrap().starts_with("mode,n_clients,p,"));
    let row = lines.next().unwrap();
    let fields: Vec<&str> = row.split(',').collect();
    assert_eq!(fields[0], "plain");
    assert_eq!(fields[1], "3");
    assert_eq!(fields[6], "8.000000"); // airtime = k * t_data
    assert_eq!(fields[10], "1.000000");
    assert_eq!(fields[11], "true");
    assert!(stdout.contains("delivery_ratio=1.000000"));
}

#[test]
fn simulate_rejects_multi_valued_lists() {
    let output = rcnc()
        .args(["--modes", "plain", "--n-list", "3,4", "--p-list", "1.0", "simulate"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("single point"), "{stderr}");
}

#[test]
fn sweep_writes_csv_and_prints_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rows.csv");
    let output = rcnc()
        .args([
            "--modes", "rcnc,plain", "--n-list", "2", "--p-list", "0.5", "--k", "4",
            "--runs", "3", "--segment-size", "4", "sweep", "--out",
        ])
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 3);
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("wrote 6 rows"));
    assert!(stdout.contains("mean airtime"));
}

#[test]
fn config_file_feeds_the_grid_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("exp.conf");
    std::fs::write(&conf, "modes=plain\nn_list=2\np_list=1.0\nk=4\nruns=2\nsegment_size=4\n").unwrap();
    let out = dir.path().join("rows.csv");
    let output = rcnc()
        .arg("--config")
        .arg(&conf)
        .args(["--runs", "5", "sweep", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 1 + 5, "flag must override the file's runs=2");
}

#[test]
fn unknown_config_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("exp.conf");
    std::fs::write(&conf, "bandwidth=11\n").unwrap();
    let output = rcnc().arg("--config").arg(&conf).arg("simulate").output().unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8(output.stderr).unwrap().contains("unknown configuration key"));
}

#[test]
fn invalid_probability_exits_2() {
    let output = rcnc()
        .args(["--modes", "plain", "--n-list", "2", "--p-list", "1.5", "simulate"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_3() {
    let output = rcnc()
        .args([
            "--modes", "plain", "--n-list", "2", "--p-list", "1.0", "--runs", "1",
            "sweep", "--out", "/nonexistent-dir/rows.csv",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(3));
}

#[test]
fn event_cap_exits_4() {
    let output = rcnc()
        .args([
            "--modes", "rcnc", "--n-list", "1", "--p-list", "0.5", "--k", "32",
            "--max-events", "3", "simulate",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(4));
    assert!(String::from_utf8(output.stderr).unwrap().contains("event cap"));
}

#[test]
fn codec_bench_reports_per_k_rows() {
    let output = rcnc()
        .args(["codec-bench", "--k-list", "1,4", "--trials", "20"])
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let stdout = String::from_utf8(output.stdout).unwrap();
    let mut lines = stdout.lines();
    assert!(lines.next().unwrap().starts_with("k,trials,mean_packets_to_complete"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "1");
    assert_eq!(first[2], "1.0000"); // k = 1 always completes in one packet
    assert_eq!(lines.next().unwrap().split(',').next().unwrap(), "4");
}

#[test]
fn codec_bench_fixture_is_a_readable_stream() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = dir.path().join("packets.bin");
    let output = rcnc()
        .args(["codec-bench", "--k-list", "6", "--trials", "2", "--fixture-out"])
        .arg(&fixture)
        .output()
        .unwrap();
    assert!(output.status.success(), "{output:?}");
    let bytes = std::fs::read(&fixture).unwrap();
    let packets = rcnc::wire::read_all_packets(&mut bytes.as_slice()).unwrap();
    assert!(packets.len() >= 6);
    assert!(packets.iter().all(|p| p.coefficients.len() == 6));
}
