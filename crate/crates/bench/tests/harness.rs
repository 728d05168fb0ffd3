use std::collections::BTreeMap;
use std::io::Write;
use std::process::Command;

use proptest::prelude::*;

use wsn_bench::dataset::{run_dataset, run_dataset_file};
use wsn_bench::sweep::{energy_rows, write_rows, Measurement};
use wsn_bench::tradeoff::{default_eta_grid, last_viable_eta, tradeoff_table};
use wsn_bench::{run_sweep, BenchError, ExperimentConfig, Method, ResultRow};
use wsn_compress::analysis::{refit_nc, FitMethod};
use wsn_compress::energy::{CpuProfile, RadioProfile};
use wsn_compress::{OpCount, TimeSeries};

fn config(pairs: &[(&str, &str)]) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    for (k, v) in pairs {
        cfg.set(k, v).unwrap();
    }
    cfg.validate().unwrap();
    cfg
}

fn mean_by_n_star(rows: &[ResultRow], method: Method, value: impl Fn(&ResultRow) -> f64) -> BTreeMap<usize, f64> {
    let mut acc: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for r in rows.iter().filter(|r| r.method == method) {
        let e = acc.entry(r.n_star).or_default();
        e.0 += value(r);
        e.1 += 1;
    }
    acc.into_iter().map(|(k, (s, c))| (k, s / c as f64)).collect()
}

#[test]
fn row_count_is_the_product_of_the_axes() {
    let cfg = config(&[("methods", "ltc"), ("runs", "1"), ("n_star_list", "50")]);
    let rows = run_sweep(&cfg).unwrap();
    assert_eq!(rows.len(), cfg.xi_list.len() * cfg.hardware.len() * cfg.hops.len());
    assert!(rows.iter().all(|r| r.max_error <= r.epsilon));
}

#[test]
fn ltc_compresses_better_at_long_correlation() {
    let cfg = config(&[("methods", "ltc"), ("n_star_list", "10,500"), ("hardware", "cc2420"), ("hops", "1")]);
    let eta = mean_by_n_star(&run_sweep(&cfg).unwrap(), Method::Ltc, |r| r.eta);
    assert!(eta[&500] < eta[&10], "{eta:?}");
}

#[test]
fn ltc_beats_dct_lpf_on_the_sensor_radio() {
    let cfg = config(&[("methods", "ltc,dct_lpf"), ("hardware", "cc2420"), ("hops", "1"), ("runs", "30")]);
    let rows = run_sweep(&cfg).unwrap();
    let ltc = mean_by_n_star(&rows, Method::Ltc, |r| r.gain);
    let dct = mean_by_n_star(&rows, Method::DctLpf, |r| r.gain);
    for (n, g) in ltc.range(50..) {
        assert!(*g > dct[n], "n*={n}: ltc {g} vs dct_lpf {}", dct[n]);
    }
}

fn csv_bytes(rows: &[ResultRow]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows, None).unwrap();
    buf
}

#[test]
fn same_seed_gives_identical_output() {
    let cfg = config(&[("runs", "2"), ("n_star_list", "10,110"), ("hops", "1,3")]);
    assert_eq!(csv_bytes(&run_sweep(&cfg).unwrap()), csv_bytes(&run_sweep(&cfg).unwrap()));
    let other = config(&[("runs", "2"), ("n_star_list", "10,110"), ("hops", "1,3"), ("seed", "2")]);
    assert_ne!(csv_bytes(&run_sweep(&cfg).unwrap()), csv_bytes(&run_sweep(&other).unwrap()));
}

#[test]
fn methods_share_one_realization() {
    let alone = config(&[("methods", "ltc"), ("runs", "3"), ("n_star_list", "50,290")]);
    let mixed = config(&[("methods", "ltc,dct_lpf,fft_win"), ("runs", "3"), ("n_star_list", "50,290")]);
    let mixed_ltc: Vec<ResultRow> = run_sweep(&mixed).unwrap().into_iter().filter(|r| r.method == Method::Ltc).collect();
    assert_eq!(run_sweep(&alone).unwrap(), mixed_ltc);
}

#[test]
fn emit_check_rejects_tolerance_misses() {
    let cfg = ExperimentConfig::default();
    let m = Measurement {
        method: Method::Ltc,
        epsilon: 0.1,
        raw_bits: 8000,
        bits: 4000,
        eta: 0.5,
        max_error: 0.2,
        ops: OpCount::default(),
    };
    let err = energy_rows(&m, 50, 0, &cfg.hardware_profiles().unwrap(), &[1]).unwrap_err();
    assert!(matches!(err, BenchError::ToleranceViolation { .. }), "{err}");
}

#[test]
fn constant_dataset_reports_a_diagnostic() {
    let cfg = config(&[("methods", "ltc,pr2,dct_lpf"), ("hops", "1")]);
    let run = run_dataset(&TimeSeries::new(vec![21.5; 1000]).unwrap(), &cfg).unwrap();
    assert_eq!(run.n_star, 0);
    assert!(!run.diagnostics.is_empty());
    assert!(run.rows.iter().all(|r| r.max_error <= r.epsilon));
    assert!(run.rows.iter().filter(|r| r.method == Method::DctLpf).all(|r| r.eta < 0.01));
}

fn temperature_csv() -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "minute,temperature").unwrap();
    for m in 0..8640 {
        let day = (m as f64 * 2.0 * std::f64::consts::PI / 1440.0).sin();
        writeln!(f, "{m},{:.3}", 20.0 + 4.0 * day + 0.05 * ((m * 7919) % 17) as f64 / 17.0).unwrap();
    }
    f.flush().unwrap();
    f
}

#[test]
fn dataset_blocks_and_single_n_star() {
    let f = temperature_csv();
    let cfg = config(&[("methods", "ltc,dct_lpf"), ("hops", "1"), ("hardware", "cc2420")]);
    let run = run_dataset_file(f.path(), "temperature", &cfg).unwrap();
    let blocks = 8640 / cfg.n;
    assert_eq!(run.rows.len(), blocks * 2 * cfg.xi_list.len());
    assert_eq!(run.fit_points.len(), run.rows.len());
    assert!(run.n_star > 0);
    assert!(run.rows.iter().all(|r| r.n_star == run.n_star && r.max_error <= r.epsilon));

    let short = TimeSeries::new(vec![1.0; 100]).unwrap();
    assert!(matches!(run_dataset(&short, &cfg), Err(BenchError::DatasetTooShort { .. })));
}

#[test]
fn tradeoff_table_verdicts() {
    let rows = tradeoff_table(
        &CpuProfile::msp430(),
        &[RadioProfile::cc2420(), RadioProfile::aquamodem()],
        &default_eta_grid(),
    )
    .unwrap();
    for r in rows.iter().filter(|r| r.radio == "cc2420") {
        assert!((r.ratio - 316.8).abs() < 0.1, "{}", r.ratio);
    }
    let edge = last_viable_eta(&rows, FitMethod::Ltc, "cc2420").unwrap();
    assert!((edge - 0.63).abs() < 0.015, "{edge}");
    assert!(rows.iter().filter(|r| r.radio == "aquamodem" && r.eta <= 0.95).all(|r| r.holds));
    assert!(tradeoff_table(&CpuProfile::msp430(), &[RadioProfile::cc2420()], &[1.0]).is_err());
}

#[test]
fn ltc_cycle_fit_has_the_expected_magnitude() {
    let cfg = config(&[
        ("methods", "ltc"),
        ("n_star_list", "300"),
        ("xi_list", "2,3,4,5,6"),
        ("hardware", "cc2420"),
        ("hops", "1"),
        ("runs", "50"),
    ]);
    let cpu = cfg.cpu_profile().unwrap();
    let bits = (cfg.n as u64 * cfg.policy.bits_per_value) as f64;
    let points: Vec<(f64, f64)> = run_sweep(&cfg)
        .unwrap()
        .iter()
        .map(|r| (r.eta, cpu.cycles(&r.ops) as f64 / bits))
        .collect();
    let fit = refit_nc(&points).unwrap();
    let within = |got: f64, want: f64| got / want <= 3.0 && want / got <= 3.0;
    assert!(within(fit.alpha, 16.1) && within(fit.beta, 105.4), "alpha {} beta {}", fit.alpha, fit.beta);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn every_method_meets_its_tolerance(seed in any::<u64>(), n_star in 1usize..=500, xi in 0.5..8.0f64) {
        let mut cfg = config(&[("runs", "1"), ("hops", "1")]);
        cfg.seed = seed;
        cfg.n_star_list = vec![n_star];
        cfg.xi_list = vec![xi];
        let rows = run_sweep(&cfg).unwrap();
        prop_assert_eq!(rows.len(), Method::all().len() * cfg.hardware.len());
    }
}

fn bench() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wsn-bench"))
}

#[test]
fn cli_sweep_is_reproducible() {
    let run = || {
        let out = bench()
            .args(["sweep", "--runs", "1", "--methods", "ltc,pr2", "--set", "n_star_list=50", "--no-header-timestamp"])
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        out.stdout
    };
    let a = run();
    assert_eq!(a, run());
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("method,n_star,epsilon,run_id,eta,max_error"));
    assert_eq!(text.lines().count(), 1 + 2 * 3 * 2 * 8);
}

#[test]
fn cli_rejects_unknown_names() {
    for args in [["sweep", "--methods", "zip"], ["sweep", "--hardware", "wifi"]] {
        let out = bench().args(args).output().unwrap();
        assert!(!out.status.success());
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn cli_profiles_and_dataset() {
    let out = bench().arg("profiles").output().unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("316.8") && text.contains("13774104.7"), "{text}");

    let f = temperature_csv();
    let fit = tempfile::NamedTempFile::new().unwrap();
    let out = bench()
        .arg("dataset")
        .arg(f.path())
        .args(["--column", "temperature", "--methods", "ltc", "--set", "hops=1", "--no-header-timestamp"])
        .arg("--fit-out")
        .arg(fit.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("# measured n_star")).count(), 1);
    let points = std::fs::read_to_string(fit.path()).unwrap();
    assert!(points.starts_with("method,n_star,block,epsilon,eta,xi,nc"));
}
