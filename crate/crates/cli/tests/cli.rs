use std::fs;
use std::process::{Command, Output};

fn chebias(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chebias"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn tables_default_to_csv() {
    let o = chebias(&["table", "--id", "h8"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("o,C1,C2,mean_formula,mean_reference"));
    assert!(text.contains("1,C_1,C_-1,-4,-4,"));
    let o = chebias(&[
        "table", "--id", "esp-d", "--n", "5", "--level", "4", "--format", "json",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).trim_start().starts_with('{'));
}

#[test]
fn races_are_deterministic_and_write_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("race.json");
    let args = [
        "race",
        "--family",
        "quaternion",
        "--n",
        "4",
        "--pair",
        "1,-1",
        "--pair",
        "x,x^2",
        "--samples",
        "20000",
        "--seed",
        "9",
    ];
    let a = chebias(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    let b = chebias(&with_out);
    assert!(b.status.success());
    assert!(b.stdout.is_empty());
    assert_eq!(fs::read_to_string(&path).unwrap(), stdout(&a));
    let json: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert!(json.is_object());
}

#[test]
fn config_errors_exit_with_two() {
    assert_eq!(
        chebias(&["table", "--id", "esp-q", "--n", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        chebias(&["race", "--family", "dihedral", "--n", "4"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        chebias(&["race", "--family", "dihedral", "--n", "4", "--pair", "1,-1", "--w", "3"])
            .status
            .code(),
        Some(2)
    );
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"experiment": "horizontal"}"#).unwrap();
    // a config for another experiment is rejected
    let o = chebias(&["--config", cfg.to_str().unwrap(), "monotonicity"]);
    assert_eq!(o.status.code(), Some(2));
    fs::write(&cfg, "{not json").unwrap();
    assert_eq!(
        chebias(&["--config", cfg.to_str().unwrap(), "horizontal"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn config_file_fields_and_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"experiment": "race", "family": "dihedral", "n": 4, "pairs": [["1", "-1"]], "samples": 20000}"#).unwrap();
    let a = chebias(&["--config", cfg.to_str().unwrap(), "race", "--no-mc"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let b = chebias(&[
        "--config",
        cfg.to_str().unwrap(),
        "race",
        "--no-mc",
        "--family",
        "quaternion",
    ]);
    assert!(b.status.success());
    assert_ne!(stdout(&a), stdout(&b));
}

#[test]
fn zero_files_roundtrip_and_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("psi_1.txt");
    let p = path.to_str().unwrap();
    let o = chebias(&[
        "zeros",
        "gen",
        "--log-conductor",
        "8",
        "--degree",
        "2",
        "--t-max",
        "80",
        "--id",
        "psi_1",
        "--out",
        p,
    ]);
    assert!(o.status.success());
    let ok = chebias(&["zeros", "check", p, "--log-conductor", "8", "--degree", "2"]);
    assert!(
        ok.status.success(),
        "{}",
        String::from_utf8_lossy(&ok.stderr)
    );
    assert!(chebias(&["zeros", "check", p]).status.success());
    // the same file is far too sparse for a much larger conductor
    assert_eq!(
        chebias(&[
            "zeros",
            "check",
            p,
            "--log-conductor",
            "60",
            "--degree",
            "2"
        ])
        .status
        .code(),
        Some(3)
    );
    assert_eq!(
        chebias(&["zeros", "check", p, "--degree", "2"])
            .status
            .code(),
        Some(2)
    );
    fs::write(&path, "# bad\nabc\n").unwrap();
    assert_eq!(chebias(&["zeros", "check", p]).status.code(), Some(2));
    let again = chebias(&[
        "zeros",
        "gen",
        "--log-conductor",
        "8",
        "--degree",
        "2",
        "--t-max",
        "80",
        "--id",
        "psi_1",
    ]);
    let third = chebias(&[
        "zeros",
        "gen",
        "--log-conductor",
        "8",
        "--degree",
        "2",
        "--t-max",
        "80",
        "--id",
        "psi_1",
    ]);
    assert_eq!(again.stdout, third.stdout);
}
