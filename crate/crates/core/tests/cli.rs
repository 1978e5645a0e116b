use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_scalneck"))
}

#[test]
fn build_tunnel_writes_a_passing_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("tunnel.json");
    let prof = dir.path().join("profiles");
    let st = bin()
        .args([
            "build-tunnel",
            "--n",
            "3",
            "--kappa",
            "6",
            "--delta",
            "0.1",
            "--length",
            "2",
            "--j",
            "100",
        ])
        .arg("--out")
        .arg(&cert)
        .arg("--profiles-dir")
        .arg(&prof)
        .status()
        .unwrap();
    assert!(st.success());
    assert!(prof.join("assembly.json").exists());
    let out = bin().arg("recheck").arg(&cert).output().unwrap();
    assert!(out.status.success());
    let rep: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rep["digest_ok"], true);
}

#[test]
fn recheck_flags_an_edited_file() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("c.json");
    let st = bin()
        .args(["pipeline", "cor-d", "--d", "4"])
        .arg("--out")
        .arg(&cert)
        .status()
        .unwrap();
    assert!(st.success());
    let text = std::fs::read_to_string(&cert).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["floor"] = serde_json::json!(1.0);
    std::fs::write(&cert, v.to_string()).unwrap();
    let out = bin().arg("recheck").arg(&cert).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# pipeline defaults\nd = 3.5\ngrid_density = 200\n").unwrap();
    let out = bin()
        .args(["pipeline", "cor-d"])
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(out.status.success());
    let cert: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(cert["provenance"]["parameters"]["D"], 3.5);
    assert_eq!(cert["grid"]["density"], 200.0);
}

#[test]
fn surgery_in_codimension_two_exits_with_error() {
    let out = bin().args(["surgery", "--p", "2", "--q", "2"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("q >= 3"));
}

#[test]
fn main_b_without_hemisphere_is_an_error() {
    let out = bin().args(["pipeline", "main-b-budget"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn stdout_output_is_deterministic() {
    let run = || bin().args(["surgery", "--delta", "0.05"]).output().unwrap().stdout;
    assert_eq!(run(), run());
}
