//! Retrieves a pool of random codewords at several read depths and reports
//! losses and the gap between originals and the best incorrect candidate.
//! Smaller pools are prefixes of the deepest one, so every read is repaired
//! once.
//!
//! ```bash
//! cargo run --release -p spiderweb --example pool_retrieval -- 1000 0.04
//! ```

use std::time::Instant;

use spiderweb::channel::{make_pool, ChannelSpec};
use spiderweb::codec::Codec;
use spiderweb::constraints::high_compatibility;
use spiderweb::corrector::RepairLimits;
use spiderweb::digraph::{generate, ArcBinding};
use spiderweb::retrieval::{random_library, retrieve_depths};

fn main() -> spiderweb::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(1000);
    let rate: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.04);
    let codec = Codec::with_default_start(generate(&high_compatibility(), 1)?.accessor, ArcBinding::Canonical)?;
    let (_, library) = random_library(&codec, n, 116, 2021)?;
    let truth: Vec<_> = library.iter().map(|cw| cw.payload.clone()).collect();
    let depths = [5, 10, 20, 50];
    let pool = make_pool(&library, *depths.last().unwrap(), &ChannelSpec::new(rate)?)?;
    let clock = Instant::now();
    let reports = retrieve_depths(&pool, &codec, n, &truth, &depths, &RepairLimits::default())?;
    println!("{:>5} {:>7} {:>8} {:>5}", "R", "losses", "min_gap", "tau");
    for rep in reports {
        println!("{:>5} {:>7} {:>8} {:>5}", rep.reads, rep.losses.unwrap_or(0), rep.min_gap.unwrap_or(0), rep.tau_observed.unwrap_or(0));
    }
    println!("{:.1} s", clock.elapsed().as_secs_f64());
    Ok(())
}
