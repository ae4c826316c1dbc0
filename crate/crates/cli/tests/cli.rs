use std::path::Path;
use std::process::{Command, Output};

fn msat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msat"))
        .args(args)
        .output()
        .unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn generate(dir: &Path, users: &str, seed: &str) -> std::path::PathBuf {
    let file = dir.join(format!("scenario-{users}-{seed}.toml"));
    let out = msat(&[
        "gen-scenario",
        "--users",
        users,
        "--seed",
        seed,
        "--out",
        path(&file),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    file
}

const OVERLOADED: &str = r#"
candidate_size = 1
cluster_size = 1
target_sinr_db = 20.0

[[satellites]]
latitude_deg = 52.817247
longitude_deg = 9.291984

[[users]]
latitude_deg = 52.801
longitude_deg = 9.281
[[users]]
latitude_deg = 52.806
longitude_deg = 9.287
[[users]]
latitude_deg = 52.811
longitude_deg = 9.284
[[users]]
latitude_deg = 52.815
longitude_deg = 9.296
"#;

#[test]
fn solve_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = generate(dir.path(), "6", "3");
    let mut outputs = Vec::new();
    for name in ["a.json", "b.json"] {
        let out = dir.path().join(name);
        let run = msat(&[
            "solve",
            "--scenario",
            path(&scenario),
            "--algorithm",
            "dual",
            "--out",
            path(&out),
        ]);
        assert!(run.status.success());
        outputs.push(std::fs::read(out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn sweep_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = generate(dir.path(), "4", "1");
    let mut outputs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let out = dir.path().join(name);
        let run = msat(&[
            "sweep",
            "--scenario",
            path(&scenario),
            "--param",
            "gamma",
            "--values",
            "0,5,10",
            "--seeds",
            "1,2,3",
            "--algorithms",
            "dual,simple",
            "--out",
            path(&out),
        ]);
        assert!(
            run.status.success(),
            "{}",
            String::from_utf8_lossy(&run.stderr)
        );
        outputs.push(std::fs::read_to_string(out).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
    assert_eq!(outputs[0].lines().count(), 1 + 3 * 3 * 2);
    assert!(outputs[0].starts_with("parameter,value,seed,algorithm,status,"));
}

#[test]
fn overrides_change_the_solution() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = generate(dir.path(), "3", "8");
    let solve = |extra: &[&str]| {
        let mut args = vec!["solve", "--scenario", path(&scenario)];
        args.extend_from_slice(extra);
        let out = msat(&args);
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    assert_ne!(solve(&[]), solve(&["--target-sinr-db", "8"]));
    assert_ne!(solve(&[]), solve(&["--cluster-size", "1"]));
}

#[test]
fn infeasible_scenario_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("overloaded.toml");
    std::fs::write(&file, OVERLOADED).unwrap();
    for algorithm in ["dual", "simple"] {
        let out = msat(&["solve", "--scenario", path(&file), "--algorithm", algorithm]);
        assert_eq!(
            out.status.code(),
            Some(3),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let out = msat(&["oracle-check", "--scenario", path(&file)]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"globally_infeasible\": true"));
}

#[test]
fn oracle_check_passes_on_a_small_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = generate(dir.path(), "2", "5");
    let out = msat(&[
        "oracle-check",
        "--scenario",
        path(&scenario),
        "--cap",
        "10000",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn oracle_cap_is_enforced() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = generate(dir.path(), "4", "5");
    let out = msat(&["oracle-check", "--scenario", path(&scenario), "--cap", "10"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_latitude_exits_with_2_and_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.toml");
    std::fs::write(
        &file,
        OVERLOADED.replace("latitude_deg = 52.806", "latitude_deg = 91.0"),
    )
    .unwrap();
    let out = msat(&["solve", "--scenario", path(&file)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("users[1].latitude_deg"));
}

#[test]
fn iteration_cap_exits_with_4() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = generate(dir.path(), "6", "2");
    let text = std::fs::read_to_string(&scenario)
        .unwrap()
        .replace("max_iterations = 10000", "max_iterations = 1");
    let file = dir.path().join("capped.toml");
    std::fs::write(&file, text).unwrap();
    let out = msat(&["solve", "--scenario", path(&file)]);
    assert_eq!(
        out.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn missing_file_and_bad_flags() {
    let out = msat(&["solve", "--scenario", "/nonexistent/scenario.toml"]);
    assert_eq!(out.status.code(), Some(1));
    let out = msat(&[
        "sweep",
        "--scenario",
        "x.toml",
        "--param",
        "power",
        "--values",
        "1",
        "--seeds",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}
