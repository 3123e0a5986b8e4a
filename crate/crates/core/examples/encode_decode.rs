//! Encodes a short text under the canonical binding and under a keyed one,
//! then decodes each codeword with the right key and with the wrong one.
//!
//! ```bash
//! cargo run --release -p spiderweb --example encode_decode -- "hello, world" 7
//! ```

use spiderweb::codec::{Codec, Message};
use spiderweb::constraints::high_compatibility;
use spiderweb::digraph::{generate, ArcBinding};
use spiderweb::nucleotide::seq_to_string;

fn main() -> spiderweb::Result<()> {
    let mut args = std::env::args().skip(1);
    let text = args.next().unwrap_or_else(|| "hello, world".to_string());
    let key: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);
    let acc = generate(&high_compatibility(), 1)?.accessor;
    let msg = Message::from_bytes(text.as_bytes());

    for binding in [ArcBinding::Canonical, ArcBinding::Keyed(key)] {
        let codec = Codec::with_default_start(acc.clone(), binding)?;
        let cw = codec.encode(&msg)?;
        println!("{binding:?}: {} nt", cw.payload.len());
        println!("  {}", seq_to_string(&cw.payload));
        println!("  record {}", codec.format_record(&cw));
        let back = codec.decode(&cw)?;
        assert_eq!(back, msg);
        println!("  decoded {:?}", String::from_utf8_lossy(&back.to_bytes()));

        let wrong = Codec::with_default_start(acc.clone(), ArcBinding::Keyed(key ^ 1))?;
        match wrong.decode(&cw) {
            Ok(m) => println!("  wrong key gives {:?}", String::from_utf8_lossy(&m.to_bytes())),
            Err(e) => println!("  wrong key fails: {e}"),
        }
    }
    Ok(())
}
