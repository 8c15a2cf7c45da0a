use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn capkm(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_capkm"))
        .args(args)
        .current_dir(dir)
        .env_remove("CAPKM_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn without_timing(kv: &str) -> String {
    kv.lines().filter(|l| !l.starts_with("wall_time_ms=")).collect::<Vec<_>>().join("\n")
}

fn kv_value(kv: &str, key: &str) -> f64 {
    let line = kv.lines().find(|l| l.starts_with(&format!("{key}="))).unwrap_or_else(|| panic!("no {key}"));
    line.split_once('=').unwrap().1.parse().unwrap()
}

#[test]
fn generate_is_byte_identical_for_a_seed() {
    let dir = tempfile::tempdir().unwrap();
    // Three facilities of capacity 6 cannot serve 20 clients.
    let short = capkm(&["generate", "--clients", "20", "--facilities", "8", "--k", "3", "--uniform-cap", "6", "--seed", "1"], dir.path());
    assert_eq!(short.status.code(), Some(2));
    let args = ["generate", "--clients", "20", "--facilities", "8", "--k", "3", "--uniform-cap", "7", "--seed", "1"];
    let a = capkm(&args, dir.path());
    let b = capkm(&args, dir.path());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = capkm(&["generate", "--clients", "20", "--facilities", "8", "--k", "3", "--uniform-cap", "7", "--seed", "2"], dir.path());
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn nonuniform_capacities_stay_in_range() {
    let dir = tempfile::tempdir().unwrap();
    let o = capkm(&["generate", "--clients", "20", "--facilities", "8", "--k", "3", "--nonuniform-cap", "1:10", "--seed", "4"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    let caps: Vec<u64> = text.lines().filter(|l| l.starts_with("F ")).map(|l| l.split_whitespace().nth(4).unwrap().parse().unwrap()).collect();
    assert_eq!(caps.len(), 8);
    assert!(caps.iter().all(|c| (1..=10).contains(c)));
}

#[test]
fn seed_defaults_to_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run = |env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_capkm"));
        cmd.args(["generate", "--clients", "5", "--facilities", "3", "--k", "2", "--uniform-cap", "3"]).current_dir(dir.path());
        match env {
            Some(v) => cmd.env("CAPKM_SEED", v),
            None => cmd.env_remove("CAPKM_SEED"),
        };
        cmd.output().unwrap().stdout
    };
    let explicit = capkm(&["generate", "--clients", "5", "--facilities", "3", "--k", "2", "--uniform-cap", "3", "--seed", "9"], dir.path());
    assert_eq!(run(Some("9")), explicit.stdout);
    assert_ne!(run(None), explicit.stdout);
}

#[test]
fn nonuniform_solve_reports_violation_within_bound() {
    let dir = tempfile::tempdir().unwrap();
    let g = capkm(&["generate", "--clients", "16", "--facilities", "6", "--k", "3", "--nonuniform-cap", "1:10", "--seed", "3", "-o", "a.ckfl"], dir.path());
    assert!(g.status.success());
    let o = capkm(&["solve", "a.ckfl", "--alg", "nonuniform3e", "--eps", "0.5", "--ell", "2", "--machine", "--json", "a.json"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let kv = stdout(&o);
    assert!(kv_value(&kv, "max_violation") <= 4.5);
    assert!(kv.contains("verdict=PASS"));
    assert!(kv.lines().any(|l| l.starts_with("check.final_cost=PASS")));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("a.json")).unwrap()).unwrap();
    assert_eq!(json["run"]["algorithm"], "nonuniform3e");
    assert!(json["pipeline"]["checks"].as_array().unwrap().len() > 5);
}

#[test]
fn match6_replays_identically_and_writes_dumps() {
    let dir = tempfile::tempdir().unwrap();
    capkm(&["generate", "--clients", "16", "--facilities", "6", "--k", "3", "--uniform-cap", "8", "--cost", "0:2", "--seed", "5", "-o", "u.ckfl"], dir.path());
    let args = ["solve", "u.ckfl", "--alg", "match6", "--seed", "7", "--kv", "r.kv", "--dump-trees", "t.txt", "--dump-stars", "s.txt", "--dump-lp", "m.lp"];
    let first = capkm(&args, dir.path());
    assert_eq!(first.status.code(), Some(0));
    let kv1 = fs::read_to_string(dir.path().join("r.kv")).unwrap();
    let second = capkm(&args, dir.path());
    assert_eq!(second.status.code(), Some(0));
    let kv2 = fs::read_to_string(dir.path().join("r.kv")).unwrap();
    assert_eq!(without_timing(&kv1), without_timing(&kv2));
    assert!(kv1.contains("seed=7"));
    assert!(fs::read_to_string(dir.path().join("t.txt")).unwrap().starts_with("node\tparent"));
    assert!(fs::read_to_string(dir.path().join("s.txt")).unwrap().starts_with("center\t"));
    assert!(fs::read_to_string(dir.path().join("m.lp")).unwrap().contains("Subject To"));
}

#[test]
fn incompatible_or_missing_input_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    capkm(&["generate", "--clients", "10", "--facilities", "5", "--k", "2", "--nonuniform-cap", "2:9", "--seed", "1", "-o", "n.ckfl"], dir.path());
    capkm(&["generate", "--clients", "10", "--facilities", "5", "--k", "2", "--uniform-cap", "6", "--cost", "1:2", "--seed", "1", "-o", "c.ckfl"], dir.path());
    assert_eq!(capkm(&["solve", "n.ckfl", "--alg", "match6"], dir.path()).status.code(), Some(2));
    assert_eq!(capkm(&["solve", "c.ckfl", "--alg", "nonuniform3e"], dir.path()).status.code(), Some(2));
    assert_eq!(capkm(&["solve", "missing.ckfl", "--alg", "group2e"], dir.path()).status.code(), Some(2));
    assert_eq!(capkm(&["solve", "c.ckfl", "--alg", "match6", "--ell", "3"], dir.path()).status.code(), Some(2));
    assert_eq!(capkm(&["solve", "c.ckfl", "--alg", "group2e", "--eps", "-1"], dir.path()).status.code(), Some(2));
    assert_eq!(capkm(&["solve", "c.ckfl"], dir.path()).status.code(), Some(2));
}

#[test]
fn group_ell_follows_eps_when_not_given() {
    let dir = tempfile::tempdir().unwrap();
    capkm(&["generate", "--clients", "12", "--facilities", "6", "--k", "3", "--uniform-cap", "6", "--seed", "2", "-o", "u.ckfl"], dir.path());
    let o = capkm(&["solve", "u.ckfl", "--alg", "group2e", "--eps", "1", "--machine"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let kv = stdout(&o);
    assert!(kv.contains("ell=4\n"));
    assert_eq!(kv_value(&kv, "violation_bound"), 3.0);
}

#[test]
fn bench_smoke_grid_and_empty_grid() {
    let dir = tempfile::tempdir().unwrap();
    let empty = capkm(&["bench", "--count", "0"], dir.path());
    assert_eq!(empty.status.code(), Some(0));
    assert_eq!(stdout(&empty).lines().count(), 1);

    let start = std::time::Instant::now();
    let o = capkm(&["bench", "--count", "10", "--clients", "10", "--facilities", "5", "--k", "2", "--json", "b.json"], dir.path());
    assert!(start.elapsed().as_secs() < 60);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let table: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("b.json")).unwrap()).unwrap();
    let cells = table["cells"].as_array().unwrap();
    assert_eq!(cells.len(), 3);
    for c in cells {
        assert_eq!(c["errors"], 0);
        assert!(c["max_violation"].as_f64().unwrap() <= c["violation_bound"].as_f64().unwrap());
    }
}
