//! Information density of the high-compatibility digraph against message length.
//!
//! `cargo run --release --example density`

use spiderweb::capacity::approximate_capacity_default;
use spiderweb::codec::{measure_density, Codec};
use spiderweb::constraints::high_compatibility;
use spiderweb::digraph::{generate, ArcBinding};

fn main() -> spiderweb::Result<()> {
    let g = generate(&high_compatibility(), 1)?;
    let cap = approximate_capacity_default(&g.accessor)?;
    println!("capacity {:.4} bits/nt over {} vertices", cap.capacity, g.final_vertices());
    let codec = Codec::with_default_start(g.accessor, ArcBinding::Canonical)?;
    for m in [50, 116, 200, 500, 2000] {
        println!("m={m:>5} density {:.4}", measure_density(&codec, m, 100, 2021)?);
    }
    Ok(())
}
