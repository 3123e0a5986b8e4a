//! Corrupts one codeword, locates the first failing symbol and lists the
//! candidates the search finds and the ones surviving the sieve.
//!
//! ```bash
//! cargo run --release -p spiderweb --example repair_read -- 0.02 5
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spiderweb::channel::{corrupt_with, ChannelSpec};
use spiderweb::codec::Codec;
use spiderweb::constraints::high_compatibility;
use spiderweb::corrector::{detect, repair, RepairLimits};
use spiderweb::digraph::{generate, ArcBinding};
use spiderweb::nucleotide::seq_to_string;
use spiderweb::retrieval::random_library;

fn main() -> spiderweb::Result<()> {
    let mut args = std::env::args().skip(1);
    let rate: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.02);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(5);
    let codec = Codec::with_default_start(generate(&high_compatibility(), 1)?.accessor, ArcBinding::Canonical)?;
    let (_, cws) = random_library(&codec, 1, 116, seed)?;
    let cw = &cws[0];
    let start = codec.start_state(cw.start)?;
    let (read, edits) = corrupt_with(&cw.payload, &ChannelSpec::new(rate)?, &mut ChaCha8Rng::seed_from_u64(seed));

    println!("original {}", seq_to_string(&cw.payload));
    println!("read     {}", seq_to_string(&read));
    println!("edits    {edits:?}");
    match detect(&codec, &read, start).first_error_position {
        None => println!("read is a valid walk, nothing to repair"),
        Some(j) => {
            println!("first failing symbol at {j}");
            let got = repair(&codec, &read, start, &cw.check, cw.payload.len(), &RepairLimits::default())?;
            println!("{} search candidates, {} after the sieve", got.search.len(), got.repaired.len());
            for z in &got.repaired {
                let mark = if *z == cw.payload { "original" } else { "other" };
                println!("  {mark:>8} {}", seq_to_string(z));
            }
            println!("{:?}", got.counters);
        }
    }
    Ok(())
}
