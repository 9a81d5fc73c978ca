//! Sweep runner, statistics and complexity counts.

use grand_isi::sim::{
    complexity_tot, emit_results, parse_csv, run_sweep, tot_closed_form_l2, OutputFormat, SimConfig,
};
use num_bigint::BigUint;

fn config(extra: &str) -> SimConfig {
    SimConfig::from_toml(&format!(
        r#"
        code = "bch127_113"
        taps = ["sqrt(0.9)", "sqrt(0.1)"]
        ebn0_db = [4.0, 6.0]
        trials = 200
        decoders = ["sgrand", "orb", "cdforb", "twoline", "orbgrand"]
        seed = 5
        cdf_trials = 1000
        {extra}
        "#
    ))
    .unwrap()
}

#[test]
fn same_seed_gives_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("");
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    emit_results(&run_sweep(&cfg).unwrap(), OutputFormat::Csv, &a).unwrap();
    emit_results(&run_sweep(&cfg).unwrap(), OutputFormat::Csv, &b).unwrap();
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let rows = parse_csv(std::str::from_utf8(&ta).unwrap()).unwrap();
    assert_eq!(rows.len(), 10);
    for r in &rows {
        assert!((0.0..=1.0).contains(&r.bler));
        assert!(r.mean_p <= r.mean_q);
        assert!(r.abandon_rate <= r.bler);
        // The genie flags only SGrand errors.
        let sgrand = rows.iter().find(|s| s.decoder.starts_with("sgrand") && s.snr_db == r.snr_db).unwrap();
        assert!(r.genie_bler.unwrap() <= sgrand.bler);
    }
}

#[test]
fn noiseless_limit_has_no_errors() {
    let cfg = SimConfig {
        ebn0_db: vec![80.0],
        trials: 1,
        ..config("")
    };
    for r in run_sweep(&cfg).unwrap() {
        assert_eq!(r.bler, 0.0, "{}", r.decoder);
        assert_eq!(r.mean_q, 1.0);
    }
}

#[test]
fn worker_count_does_not_change_results() {
    let cfg = SimConfig {
        decoders: config("").decoders[..2].to_vec(),
        ..config("")
    };
    let a = run_sweep(&cfg).unwrap();
    std::env::set_var(grand_isi::sim::WORKERS_ENV, "3");
    let b = run_sweep(&cfg).unwrap();
    std::env::remove_var(grand_isi::sim::WORKERS_ENV);
    assert_eq!(a, b);
}

#[test]
fn first_order_count_is_triangular() {
    for n in 1..=200usize {
        assert_eq!(complexity_tot(n, 1).unwrap(), BigUint::from(n * (n + 1) / 2));
    }
}

#[test]
fn second_order_closed_form_matches_recursion() {
    for n in 1..=60usize {
        let exact: f64 = complexity_tot(n, 2).unwrap().to_string().parse().unwrap();
        let closed = tot_closed_form_l2(n);
        assert!(((closed - exact) / exact).abs() < 1e-6, "N = {n}: {closed} vs {exact}");
    }
    let ratio = tot_closed_form_l2(41) / tot_closed_form_l2(40);
    assert!((ratio / ((1.0 + 5f64.sqrt()) / 2.0) - 1.0).abs() < 0.01);
}
