//! The command-line front end.

use std::process::Command;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_grand-isi"));
    c.env("RUST_LOG", "warn");
    c
}

fn stdout(c: &mut Command) -> String {
    let out = c.output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn complexity_subcommand() {
    let out = stdout(bin().args(["complexity", "--n", "5", "--l", "2"]));
    assert!(out.contains("tot = 26"), "{out}");
    assert!(out.contains("closed form = 26"), "{out}");
    assert!(!bin().args(["complexity", "--n", "0", "--l", "1"]).output().unwrap().status.success());
}

#[test]
fn dump_rel_prints_every_burst() {
    let out = stdout(bin().args([
        "dump-rel",
        "--taps",
        "sqrt(0.9),sqrt(0.1)",
        "--sigma2",
        "1",
        "--y=0.63,0.87,0.8,-1.77",
    ]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "# x* = 0001");
    assert_eq!(lines[1], "burst;rel");
    assert_eq!(lines.len(), 2 + 10);
    let (burst, rel) = lines[5].split_once(';').unwrap();
    assert_eq!(burst, "{3}");
    assert!((rel.parse::<f64>().unwrap() - 3.96).abs() < 0.01);
}

#[test]
fn decode_one_high_snr() {
    for provider in ["sgrand", "orb", "orbgrand"] {
        let out = stdout(bin().args([
            "decode-one",
            "--code",
            "bch127_113",
            "--taps",
            "sqrt(0.9),sqrt(0.1)",
            "--ebn0",
            "9",
            "--provider",
            provider,
            "--seed",
            "3",
        ]));
        assert!(out.contains("outcome: decoded (correct)"), "{provider}: {out}");
        assert!(out.contains("candidates q:"));
    }
}

#[test]
fn simulate_and_cdf_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let out_path = dir.path().join("out.csv");
    let config = dir.path().join("sweep.toml");
    std::fs::write(
        &config,
        format!(
            "code = \"capolar128_114_crc6\"\ntaps = [3.0, 1.0]\nebn0_db = [5.0]\ntrials = 20\n\
             decoders = [\"cdforb\", \"sgrand\"]\nseed = 9\ncdf_cache_dir = {:?}\nout = {:?}\n",
            cache, out_path
        ),
    )
    .unwrap();
    let run = bin().args(["simulate", "--config"]).arg(&config).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    // Taps are not unit energy; the run warns and rescales.
    assert!(String::from_utf8_lossy(&run.stderr).contains("rescaled"));
    let csv = std::fs::read_to_string(&out_path).unwrap();
    assert!(csv.starts_with("decoder,snr_db,bler,"));
    assert_eq!(csv.lines().count(), 3);
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 1);
    // A second run reuses the cache and reproduces the file.
    let first = csv.clone();
    assert!(bin().args(["simulate", "--config"]).arg(&config).status().unwrap().success());
    assert_eq!(std::fs::read_to_string(&out_path).unwrap(), first);
}

#[test]
fn cdf_estimate_writes_model() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout(
        bin()
            .args(["cdf-estimate", "--code", "bch127_113", "--taps", "sqrt(0.9),sqrt(0.1)", "--ebn0", "4"])
            .args(["--trials", "1000", "--out-dir"])
            .arg(dir.path()),
    );
    assert!(out.contains("samples: 8128000"), "{out}");
    assert!(out.contains("two-line fit"));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
}

#[test]
fn bad_config_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    std::fs::write(&config, "code = \"bch127_113\"\ntaps = [1.0]\nebn0_db = []\ntrials = 1\ndecoders = [\"sgrand\"]\n").unwrap();
    let out = bin().args(["simulate", "--config"]).arg(&config).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
}
