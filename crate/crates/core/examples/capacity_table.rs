//! Generates each built-in constraint set's digraph and estimates its capacity.
//!
//! ```bash
//! cargo run --release -p spiderweb --example capacity_table
//! ```

use std::time::Instant;

use spiderweb::capacity::approximate_capacity_default;
use spiderweb::constraints::builtin_constraint_sets;
use spiderweb::digraph::generate;

fn main() -> spiderweb::Result<()> {
    println!("{:<6} {:>9} {:>9} {:>10} {:>6} {:>7} {:>8}", "set", "screened", "vertices", "capacity", "iters", "period", "seconds");
    for named in builtin_constraint_sets() {
        let t = Instant::now();
        let g = generate(&named.set, 1)?;
        let cap = approximate_capacity_default(&g.accessor)?;
        println!(
            "{:<6} {:>9} {:>9} {:>10.7} {:>6} {:>7} {:>8.2}",
            named.name,
            g.screened_vertices(),
            g.final_vertices(),
            cap.capacity,
            cap.iterations,
            cap.period,
            t.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
