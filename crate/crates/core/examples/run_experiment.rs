//! Runs one named experiment and prints its checks.
//!
//! `cargo run --release --example run_experiment -- complexity-curves 200`

use spiderweb::experiment::{run_experiment, ExperimentConfig};

fn main() -> spiderweb::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "complexity-curves".into());
    let trials = args.next().and_then(|s| s.parse().ok()).unwrap_or(1000);
    let cfg = ExperimentConfig { trials, out_dir: std::env::temp_dir().join("spiderweb-experiments"), ..Default::default() };
    let outcome = run_experiment(&name, &cfg)?;
    for c in &outcome.checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    println!("data {} ({:.1}s)", outcome.data_path.display(), outcome.seconds);
    Ok(())
}
