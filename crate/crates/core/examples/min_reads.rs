//! Smallest number of reads that makes the original strictly the most
//! frequent repaired candidate in every trial, per error rate.
//!
//! ```bash
//! cargo run --release -p spiderweb --example min_reads -- 1000
//! ```

use spiderweb::channel::ChannelSpec;
use spiderweb::codec::Codec;
use spiderweb::constraints::high_compatibility;
use spiderweb::corrector::RepairLimits;
use spiderweb::digraph::{generate, ArcBinding};
use spiderweb::retrieval::min_reads_single;

fn main() -> spiderweb::Result<()> {
    let trials: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1000);
    let codec = Codec::with_default_start(generate(&high_compatibility(), 1)?.accessor, ArcBinding::Canonical)?;
    for rate in [0.005, 0.01, 0.02, 0.03, 0.04] {
        let r = min_reads_single(&codec, &ChannelSpec::new(rate)?, trials, 30, &RepairLimits::default())?;
        let shown: Vec<String> = r.failures.iter().take(20).map(|f| f.to_string()).collect();
        println!("{rate:.3}  min reads {:?}  failures by reads [{}]", r.min_reads, shown.join(" "));
    }
    Ok(())
}
