//! Builds every admissible cocycle for a dimension and reports sizes and
//! timings, then spot-verifies each one.
//!
//! Usage: cargo run --release -p hopfcw --example build_pairs -- [n]

use std::time::Instant;

use hopfcw::bott::verify_cocycle;
use hopfcw::vey::{build_bott_cocycle, enumerate_vey};

fn main() {
    let n: u8 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    for relative in [false, true] {
        for pair in enumerate_vey(n, relative) {
            let t0 = Instant::now();
            let c = build_bott_cocycle(n, &pair).expect("admissible pair");
            let built = t0.elapsed();
            let sizes: Vec<(usize, usize)> = c
                .comps
                .iter()
                .map(|(p, f)| (*p, f.terms.values().map(|c| c.n_terms()).sum()))
                .collect();
            let t1 = Instant::now();
            let cert = verify_cocycle(&c, &pair.id(), 5, 11, 4);
            println!(
                "{:<16} degree {:>2}  built {:>8.2?}  verified {:>8.2?}  {}  components {:?}",
                pair.id(),
                pair.total_degree(),
                built,
                t1.elapsed(),
                if cert.pass { "PASS" } else { "FAIL" },
                sizes
            );
        }
    }
}
