use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn losskit(args: &[&str], config: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_losskit"))
        .args(args)
        .arg("--config")
        .arg(config)
        .output()
        .unwrap()
}

fn config(dir: &tempfile::TempDir, text: &str) -> PathBuf {
    let p = dir.path().join("run.toml");
    std::fs::write(&p, text).unwrap();
    p
}

/// Data rows as field vectors (comment and header dropped).
fn rows(out: &Output) -> Vec<Vec<String>> {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# losskit config: {"));
    assert_eq!(
        lines.next().unwrap(),
        "experiment,input,code_n,code_m,lost,branch,alpha,fidelity,sigma,settings,shots,seed"
    );
    lines.map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn noiseless_recover_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let out = losskit(&["recover"], &config(&dir, "experiment = \"recover\"\n"));
    let rows = rows(&out);
    let branches: Vec<_> = rows.iter().filter(|r| r[5] != "avg").collect();
    assert_eq!(branches.len(), 48);
    assert_eq!(rows.len(), 51);
    assert!(rows.iter().all(|r| r[7] == "1.000000" && r[8] == "0.000000"));
}

#[test]
fn forced_branch_picks_one_cell() {
    let out = losskit(&["recover", "--force-branch", "2:10"], &fixture("recover.toml"));
    let rows = rows(&out);
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r[4] == "2" && r[5] == "10"));
    let again = losskit(&["recover", "--force-branch", "2:10"], &fixture("recover.toml"));
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn encode_settings_and_noise() {
    let dir = tempfile::tempdir().unwrap();
    let out = losskit(&["encode"], &config(&dir, "inputs = \"PLUS\"\n"));
    let rows = rows(&out);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][7], "1.000000");
    assert_eq!(rows[0][9], "5");

    let rows = self::rows(&losskit(&["encode"], &fixture("encode.toml")));
    let settings: Vec<&str> = rows.iter().map(|r| r[9].as_str()).collect();
    assert_eq!(settings, ["9", "5", "9"]);
    assert!(rows.iter().all(|r| r[7] == "0.578125"));
}

#[test]
fn oneway_rows() {
    let dir = tempfile::tempdir().unwrap();
    let rows = rows(&losskit(&["oneway"], &config(&dir, "experiment = \"oneway\"\n")));
    assert_eq!(rows.len(), 2 * 3 * 9);
    assert!(rows.iter().all(|r| r[7] == "1.000000"));

    let rows = self::rows(&losskit(&["oneway"], &fixture("oneway.toml")));
    assert!(rows.iter().all(|r| r[7] == rows[0][7]));
}

#[test]
fn cluster_fidelity_row() {
    let rows = rows(&losskit(&["cluster-fidelity"], &fixture("cluster.toml")));
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][9], "15");
    let f: f64 = rows[0][7].parse().unwrap();
    let s: f64 = rows[0][8].parse().unwrap();
    let exact = 0.8 + 0.2 / 32.0;
    assert!((f - exact).abs() < 5.0 * s, "{f} +- {s}");
}

#[test]
fn out_flag_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = losskit(&["recover", "--out", path.to_str().unwrap()], &fixture("recover.toml"));
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let stdout = losskit(&["recover"], &fixture("recover.toml")).stdout;
    assert_eq!(std::fs::read(&path).unwrap(), stdout);
}

#[test]
fn overrides_change_the_echo() {
    let out = losskit(&["recover", "--seed", "99", "--shots", "10", "--noise-v", "0.7"], &fixture("recover.toml"));
    let rows = rows(&out);
    assert!(rows.iter().all(|r| r[10] == "10" && r[11] == "99"));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().next().unwrap().contains("\"white_noise_v\":0.7"));
}

#[test]
fn json_rows_embed_the_config() {
    let out = losskit(&["encode", "--format", "json"], &fixture("encode.toml"));
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for r in rows {
        assert_eq!(r["experiment"], "encode");
        assert_eq!(r["config"]["white_noise_v"], 0.55);
        assert!(r["settings"].as_u64().is_some());
    }
}

#[test]
fn config_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    for (text, field) in [
        ("code_n = 1\n", "code_n"),
        ("white_noise_v = 1.5\n", "white_noise_v"),
        ("inputs = [\"Q\"]\n", "inputs"),
        ("bogus = 3\n", "bogus"),
        ("lost = [9]\n", "lost"),
    ] {
        let out = losskit(&["recover"], &config(&dir, text));
        assert_eq!(out.status.code(), Some(2), "{text}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert!(err.contains(field), "{text}: {err}");
        assert!(out.stdout.is_empty());
    }
    let out = losskit(&["oneway"], &config(&dir, "loss_cases = [\"photon3\"]\n"));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("loss_cases"));
    let out = losskit(&["encode"], &config(&dir, "experiment = \"oneway\"\n"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_config_is_an_io_error() {
    let out = losskit(&["recover"], Path::new("/nonexistent/losskit.toml"));
    assert_eq!(out.status.code(), Some(4));
}
