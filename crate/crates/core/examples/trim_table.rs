//! Vertex counts after screening and after every trimming round, per
//! built-in constraint set.
//!
//! ```bash
//! cargo run --release -p spiderweb --example trim_table -- 2
//! ```

use spiderweb::constraints::builtin_constraint_sets;
use spiderweb::digraph::generate;

fn main() -> spiderweb::Result<()> {
    let threshold: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    for named in builtin_constraint_sets() {
        match generate(&named.set, threshold) {
            Ok(g) => println!("{:<6} {:?}", named.name, g.pass_counts()),
            Err(e) => println!("{:<6} {e}", named.name),
        }
    }
    Ok(())
}
