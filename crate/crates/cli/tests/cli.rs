use std::process::{Command, Output};

fn rcb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rcb"))
        .args(args)
        .env_remove("RCB_CACHE_DIR")
        .output()
        .expect("rcb runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn basis_of_weight_twelve() {
    let o = rcb(&["basis", "--k", "12", "--cusp", "--trunc", "3"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("q^1: 1"));
    assert!(s.contains("q^2: -24"));
    assert!(s.contains("q^3: 252"));
}

#[test]
fn bracket_json_is_a_series_record() {
    let o = rcb(&["bracket", "--k1", "4", "--k2", "6", "--nu", "1", "--trunc", "3", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v.is_object());
    // [E4, E6]_1 = -3456 Delta
    assert!(stdout(&o).contains("3456"));
}

#[test]
fn passing_verification_exits_zero() {
    let o = rcb(&["verify", "prop21", "--k", "16", "--nu", "1", "--trunc", "20"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS"));
}

#[test]
fn failing_verification_exits_one() {
    let o = rcb(&["verify", "prop21", "--k", "24", "--trunc", "20", "--tol", "0"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn errors_exit_two() {
    assert_eq!(rcb(&["verify", "thm99"]).status.code(), Some(2));
    assert_eq!(rcb(&["basis"]).status.code(), Some(2));
    assert_eq!(rcb(&["bracket", "--k1", "4", "--k2", "6", "--cusp1"]).status.code(), Some(2));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(&cfg, "# weight 16\nk = 16\nnu = 1\ntrunc = 20\njson = true\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    let o = rcb(&["verify", "prop21", "--config", cfg]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["params"]["k"], 16);

    let o = rcb(&["verify", "prop21", "--config", cfg, "--k", "20"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[0]["params"]["k"], 20);
    assert_eq!(v[0]["params"]["nu"], 1);
}

#[test]
fn cache_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_rcb"))
        .args(["norm", "--k", "12", "--trunc", "30"])
        .env("RCB_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(std::fs::read_dir(dir.path()).unwrap().next().is_some());
    let again = Command::new(env!("CARGO_BIN_EXE_rcb"))
        .args(["norm", "--k", "12", "--trunc", "30"])
        .env("RCB_CACHE_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(o.stdout, again.stdout);
}
