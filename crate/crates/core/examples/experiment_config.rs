//! Driving the report layer from code: a JSON config, a run, and the
//! summary with per-check results. Files go to a temporary directory.

use willmore::report::{run, ExperimentConfig};

fn main() -> willmore::Result<()> {
    let dir = std::env::temp_dir().join("willmore-example-report");
    let cfg = ExperimentConfig::from_json(&format!(
        r#"{{"command": "mobius", "etas": [0.05, 0.1, 0.2], "output_dir": {:?}}}"#,
        dir
    ))?;
    let summary = run(&cfg)?;
    println!("config hash {}", summary.config_hash);
    for c in &summary.checks {
        println!("{} {}", if c.passed { "PASS" } else { "FAIL" }, c.name);
    }
    println!("wrote {:?} to {}", summary.files, dir.display());
    Ok(())
}
