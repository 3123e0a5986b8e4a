//! Streams a noisy pool and emits each candidate once its count passes a
//! threshold, then compares the emissions against the originals.
//!
//! ```bash
//! cargo run --release -p spiderweb --example streaming -- 200 10 0.04
//! ```

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spiderweb::channel::{make_pool, ChannelSpec};
use spiderweb::codec::Codec;
use spiderweb::constraints::high_compatibility;
use spiderweb::corrector::RepairLimits;
use spiderweb::digraph::{generate, ArcBinding};
use spiderweb::retrieval::{estimator_tau, random_library, retrieve_nonblocking};

fn main() -> spiderweb::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(200);
    let reads: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(10);
    let rate: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.04);
    let codec = Codec::with_default_start(generate(&high_compatibility(), 1)?.accessor, ArcBinding::Canonical)?;
    let (_, library) = random_library(&codec, n, 116, 2021)?;
    let truth: HashSet<_> = library.iter().map(|cw| cw.payload.clone()).collect();
    let mut pool = make_pool(&library, reads, &ChannelSpec::new(rate)?)?;
    pool.records.shuffle(&mut ChaCha8Rng::seed_from_u64(2021));

    let errors = if rate < 0.01 { 1 } else { 8 };
    let suggested = estimator_tau(reads as f64, n.max(10) as f64, errors)?.ceil() as u64;
    println!("{:>4} {:>8} {:>6} {:>10}", "tau", "emitted", "wrong", "last read");
    let mut taus = vec![0, 1, reads as u64 / 2, suggested];
    taus.sort_unstable();
    taus.dedup();
    for tau in taus {
        let s = retrieve_nonblocking(&pool.records, &codec, tau, &RepairLimits::default())?;
        let wrong = s.emissions.iter().filter(|e| !truth.contains(&e.payload)).count();
        let last = s.emissions.iter().map(|e| e.record).max().unwrap_or(0);
        println!("{tau:>4} {:>8} {wrong:>6} {last:>10}", s.emissions.len());
    }
    Ok(())
}
