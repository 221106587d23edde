use std::process::Command;

use snakeopt::Algorithm;
use snakeopt_cli::parse_args;

#[test]
fn defaults_follow_protocol() {
    let c = parse_args(["snakeopt"]).unwrap();
    assert_eq!((c.population_size, c.max_iterations, c.runs), (30, 500, 30));
    assert_eq!(c.algorithms, Algorithm::ALL.to_vec());
    assert!(!c.unpaired);
}

#[test]
fn explicit_overrides() {
    let c = parse_args([
        "snakeopt",
        "--algorithm",
        "MISO",
        "--problem",
        "tcsd",
        "--runs",
        "5",
    ])
    .unwrap();
    assert_eq!(c.algorithms, vec![Algorithm::Miso]);
    assert_eq!(c.problems, vec!["tcsd".to_string()]);
    assert_eq!(c.runs, 5);
    assert_eq!(c.max_iterations, 500);

    let c = parse_args([
        "snakeopt",
        "--algorithm",
        "so,miso",
        "--problem",
        "rastrigin,uav",
        "--dim",
        "10,30",
        "--pop",
        "12",
        "--iters",
        "40",
        "--seed",
        "9",
        "--weights",
        "0.6,0.2,0.2",
        "--out",
        "/tmp/x",
        "--unpaired",
        "--record-diversity",
    ])
    .unwrap();
    assert_eq!(c.algorithms, vec![Algorithm::So, Algorithm::Miso]);
    assert_eq!(c.dims, vec![10, 30]);
    assert_eq!(
        (c.population_size, c.max_iterations, c.base_seed),
        (12, 40, 9)
    );
    assert_eq!(c.uav_weights, [0.6, 0.2, 0.2]);
    assert!(c.unpaired && c.record_diversity);
}

#[test]
fn unknown_names_list_valid_ids() {
    let err = parse_args(["snakeopt", "--problem", "nosuch"])
        .unwrap_err()
        .to_string();
    assert!(err.contains("nosuch"));
    for id in [
        "wbd",
        "tcsd",
        "cbd",
        "rebd",
        "srd",
        "tbtd",
        "uav",
        "rastrigin",
    ] {
        assert!(err.contains(id), "{err}");
    }
    let err = parse_args(["snakeopt", "--algorithm", "GWO"])
        .unwrap_err()
        .to_string();
    assert!(err.contains("SO, MISO, DSO, LSO, BSO"), "{err}");
}

#[test]
fn invalid_values_rejected() {
    assert!(parse_args(["snakeopt", "--weights", "0.5,0.5"]).is_err());
    assert!(parse_args(["snakeopt", "--weights", "0.5,0.5,0.5"]).is_err());
    assert!(parse_args(["snakeopt", "--pop", "2"]).is_err());
    assert!(parse_args(["snakeopt", "--runs", "0"]).is_err());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("battery.toml");
    std::fs::write(
        &path,
        "algorithms = [\"SO\", \"MISO\"]\nproblems = [\"cbd\"]\nruns = 7\nmax_iterations = 50\nseed = 3\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let c = parse_args(["snakeopt", "--config", p]).unwrap();
    assert_eq!(c.runs, 7);
    assert_eq!(c.max_iterations, 50);
    assert_eq!(c.base_seed, 3);
    let c = parse_args(["snakeopt", "--config", p, "--runs", "2"]).unwrap();
    assert_eq!(c.runs, 2);

    std::fs::write(&path, "bogus = 1\n").unwrap();
    assert!(parse_args(["snakeopt", "--config", p]).is_err());
}

#[test]
fn binary_writes_results() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let status = Command::new(env!("CARGO_BIN_EXE_snakeopt"))
        .args([
            "--algorithm",
            "SO,MISO",
            "--problem",
            "tbtd",
            "--runs",
            "2",
            "--iters",
            "15",
        ])
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(
        status.status.success(),
        "{}",
        String::from_utf8_lossy(&status.stderr)
    );
    let stdout = String::from_utf8_lossy(&status.stdout);
    assert!(stdout.contains("MISO") && stdout.contains("tbtd"));
    assert!(out.join("summary.json").exists());
    assert!(out.join("convergence/MISO_tbtd_1.csv").exists());

    let bad = Command::new(env!("CARGO_BIN_EXE_snakeopt"))
        .args(["--problem", "nosuch"])
        .output()
        .unwrap();
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("wbd"));
}
