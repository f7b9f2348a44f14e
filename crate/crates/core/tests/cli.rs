use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn chekprop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chekprop"))
        .args(args)
        .current_dir(root())
        .env_remove("CHEKPROP_CONFIG")
        .env_remove("CHEKPROP_MAX_ATTEMPTS")
        .env_remove("CHEKPROP_PROVIDER")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap_or(-1)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn lines(path: &Path) -> usize {
    std::fs::read_to_string(path).unwrap().lines().count()
}

#[test]
fn guard_exit_codes_follow_policy() {
    let dir = tempfile::tempdir().unwrap();
    let out = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let pbt = "fixtures/quality/pbts/pr07_cylinder_bounds.py";
    let base = ["guard", "--subject", "pcs", "--pbt", pbt, "--ticks", "20"];

    let clean = chekprop(&[&base[..], &["--out", &out("clean")]].concat());
    assert_eq!(code(&clean), 0, "{}", stdout(&clean));
    assert_eq!(lines(&dir.path().join("clean/trace.jsonl")), 20);
    assert_eq!(lines(&dir.path().join("clean/events.jsonl")), 0);

    let fault = ["--fault", "force:cylinder_a_loc=2.5@5"];
    let warn = chekprop(&[&base[..], &fault, &["--out", &out("warn")]].concat());
    assert_eq!(code(&warn), 20);
    assert!(stdout(&warn).contains("tick 5 warned pcs-pr07_cylinder_bounds-g1"), "{}", stdout(&warn));
    let block = chekprop(&[&base[..], &fault, &["--policy", "block", "--out", &out("block")]].concat());
    assert_eq!(code(&block), 21);
    assert_eq!(lines(&dir.path().join("block/events.jsonl")), 1);

    // The written guard file drives the same run.
    let guards = out("block/guards.json");
    let again = chekprop(&["guard", "--subject", "pcs", "--guards", &guards, "--ticks", "20", "--out", &out("again")]);
    assert_eq!(code(&again), 0);
    let wrong = chekprop(&["guard", "--subject", "tcs", "--guards", &guards, "--out", &out("wrong")]);
    assert_eq!(code(&wrong), 22);
}

#[test]
fn unverified_pbt_gets_no_guards() {
    let dir = tempfile::tempdir().unwrap();
    let o = chekprop(&[
        "guard",
        "--subject",
        "tcs",
        "--pbt",
        "fixtures/failure_corpus/assertion_failure.py",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 22);
    assert!(String::from_utf8_lossy(&o.stderr).contains("not verified"));
}

#[test]
fn run_pbt_exit_code_is_the_outcome_class() {
    for (file, want) in [("assertion_failure", 1), ("syntax_error", 3), ("no_test_produced", 5)] {
        let path = format!("fixtures/failure_corpus/{file}.py");
        let o = chekprop(&["run-pbt", "--subject", "tcs", "--file", &path]);
        assert_eq!(code(&o), want, "{file}");
        assert_eq!(stdout(&o).lines().next(), Some(file));
    }
}

#[test]
fn simulate_prints_one_record_per_tick() {
    let o = chekprop(&["simulate", "--subject", "tcs", "--ticks", "7", "--seed", "3"]);
    assert_eq!(code(&o), 0);
    let recs: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(recs.len(), 7);
    assert_eq!(recs[6]["tick"], 6);
    assert!(chekprop(&["simulate", "--subject", "tcs", "--fault", "force:pressure=1@2"]).status.code() != Some(0));
}

#[test]
fn fixture_corruption_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.csv"), "x\n").unwrap();
    let manifest = dir.path().join("manifest.toml");
    std::fs::write(&manifest, "[[entries]]\nid = \"a\"\nkind = \"mapping\"\npath = \"a.csv\"\nsha256 = \"\"\n").unwrap();
    let m = manifest.to_str().unwrap();
    assert_eq!(code(&chekprop(&["fixtures", "verify", "--manifest", m])), 40);
    assert_eq!(code(&chekprop(&["fixtures", "seal", "--manifest", m])), 0);
    assert_eq!(code(&chekprop(&["fixtures", "verify", "--manifest", m])), 0);
    std::fs::write(dir.path().join("a.csv"), "y\n").unwrap();
    let o = chekprop(&["fixtures", "verify", "--manifest", m]);
    assert_eq!(code(&o), 40);
    assert!(stdout(&o).contains("a: checksum-mismatch"));
}

#[test]
fn shipped_fixtures_verify() {
    let o = chekprop(&["fixtures", "verify", "--manifest", "fixtures/manifest.toml"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn replay_without_fixture_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty");
    std::fs::create_dir(&empty).unwrap();
    let o = chekprop(&[
        "generate",
        "--bundle",
        "subjects/pcs/manifest.toml",
        "--fixtures",
        empty.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 11);
}

#[test]
fn flags_override_config_over_environment() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("chekprop.toml");
    std::fs::write(&config, "max_attempts = 3\n").unwrap();
    let out = dir.path().join("out");
    let run = |extra: &[&str], env_attempts: &str| {
        let mut args = vec![
            "--config",
            config.to_str().unwrap(),
            "generate",
            "--bundle",
            "subjects/tcs/manifest.toml",
            "--provider",
            "scripted",
            "--response",
            "fixtures/scripted/broken.md",
            "--response",
            "fixtures/scripted/fixed.md",
            "--out",
            out.to_str().unwrap(),
        ];
        args.extend_from_slice(extra);
        let o = Command::new(env!("CARGO_BIN_EXE_chekprop"))
            .args(&args)
            .current_dir(root())
            .env("CHEKPROP_MAX_ATTEMPTS", env_attempts)
            .output()
            .unwrap();
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        stdout(&o)
    };
    // Config (3) beats the environment (0).
    assert!(run(&[], "0").contains("1 verified"));
    // The flag (0) beats the config.
    assert!(run(&["--max-attempts", "0"], "3").contains("1 unresolved"));

    std::fs::write(&config, "max_attempt = 3\n").unwrap();
    let o = chekprop(&["--config", config.to_str().unwrap(), "simulate", "--subject", "tcs"]);
    assert_eq!(code(&o), 2);
}
