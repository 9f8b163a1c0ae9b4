use std::path::{Path, PathBuf};
use std::process::Command;

fn lab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_willmore-lab"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("willmore-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn run_flat(out: &Path) -> std::process::Output {
    lab().args(["--suite", "flat", "--out"]).arg(out).arg("verify").output().unwrap()
}

#[test]
fn flat_verify_passes_and_writes_a_summary() {
    let out = scratch("flat");
    let o = run_flat(&out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("PASS"));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["passed"], true);
}

#[test]
fn outputs_are_deterministic_and_csvs_carry_the_config_hash() {
    let (a, b) = (scratch("det-a"), scratch("det-b"));
    assert_eq!(run_flat(&a).status.code(), Some(0));
    assert_eq!(run_flat(&b).status.code(), Some(0));
    let mut csvs = 0;
    for entry in std::fs::read_dir(&a).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, std::fs::read_to_string(b.join(name)).unwrap(), "{name:?} differs");
        if path.extension().is_some_and(|e| e == "csv") {
            csvs += 1;
            assert!(text.lines().next().unwrap().starts_with("# config sha256="));
        }
    }
    assert!(csvs > 0);
}

#[test]
fn bad_configs_exit_with_two() {
    let out = scratch("bad");
    let o = lab().args(["--suite", "nonsense", "--out"]).arg(&out).arg("verify").output().unwrap();
    assert_eq!(o.status.code(), Some(2));

    std::fs::create_dir_all(&out).unwrap();
    let cfg = out.join("cfg.json");
    std::fs::write(&cfg, r#"{"command":"verify","no_such_field":1}"#).unwrap();
    let o = lab().arg("--config").arg(&cfg).arg("--out").arg(&out).arg("verify").output().unwrap();
    assert_eq!(o.status.code(), Some(2));

    let o = lab().args(["--model", "{\"kind\":\"bogus\"}", "--out"]).arg(&out).arg("expand").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}
