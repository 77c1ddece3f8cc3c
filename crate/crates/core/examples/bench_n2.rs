use hopfcw::bott::verify_cocycle;
use hopfcw::vey::{build_bott_cocycle, enumerate_vey, VeyPair};
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let which = args.get(1).map(|s| s.as_str()).unwrap_or("light");
    let pairs: Vec<VeyPair> = match which {
        "light" => vec![VeyPair { i_set: vec![1], j_set: vec![2], relative: false }],
        "heavy" => vec![VeyPair { i_set: vec![1, 2], j_set: vec![1, 1], relative: false }],
        _ => enumerate_vey(2, false),
    };
    for pair in pairs {
        let t0 = Instant::now();
        let c = build_bott_cocycle(2, &pair).unwrap();
        let t1 = t0.elapsed();
        let sizes: Vec<(usize, usize)> = c
            .comps
            .iter()
            .map(|(p, f)| (*p, f.terms.values().map(|c| c.n_terms()).sum()))
            .collect();
        println!("pair {} deg {} build {:?} sizes {:?}", pair, pair.total_degree(), t1, sizes);
        let t2 = Instant::now();
        let cert = verify_cocycle(&c, &pair.id(), 3, 11, 4);
        println!("  verify(3 trials) {:?} pass={}", t2.elapsed(), cert.pass);
    }
}
