//! Corrupts random 200 nt walks on the high-compatibility digraph and
//! repairs them, reporting correction rate, candidate counts and vertex
//! accesses per error rate.
//!
//! ```bash
//! cargo run --release -p spiderweb --example correction_profile -- 1000 [lookahead]
//! ```

use spiderweb::channel::ChannelSpec;
use spiderweb::codec::Codec;
use spiderweb::constraints::high_compatibility;
use spiderweb::corrector::{repair_counters_profile, RepairLimits};
use spiderweb::digraph::{generate, ArcBinding};

fn main() -> spiderweb::Result<()> {
    let trials: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1000);
    let codec = Codec::with_default_start(generate(&high_compatibility(), 1)?.accessor, ArcBinding::Canonical)?;
    let lookahead = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(spiderweb::corrector::DEFAULT_LOOKAHEAD);
    let max_expansions = std::env::args().nth(3).and_then(|s| s.parse().ok()).unwrap_or(spiderweb::corrector::DEFAULT_MAX_EXPANSIONS);
    let limits = RepairLimits { lookahead, max_expansions, ..Default::default() };
    println!(
        "{:>6} {:>8} {:>9} {:>8} {:>8} {:>8} {:>9} {:>7} {:>9} {:>10}",
        "rate", "correct", "ambiguous", "detect", "C_e", "C_p", "F", "F_med", "overflow", "nt/s"
    );
    for rate in [0.0, 0.005, 0.01, 0.02, 0.03, 0.04] {
        let p = repair_counters_profile(&codec, &ChannelSpec::new(rate)?, trials, &limits)?;
        println!(
            "{:>6.3} {:>8.4} {:>9.4} {:>8.4} {:>8.4} {:>8.4} {:>9.3} {:>7} {:>9} {:>10.0}",
            rate,
            p.correction_rate(),
            p.ambiguous as f64 / trials as f64,
            p.detection_rate(),
            p.mean_search,
            p.mean_sieved,
            p.mean_accesses,
            p.median_accesses,
            p.overflowed,
            p.nucleotides_per_second()
        );
    }
    Ok(())
}
