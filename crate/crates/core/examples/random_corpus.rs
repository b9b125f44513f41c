//! Generate seeded random NS4 derivations and normalize them, reporting
//! how the index behaves. Usage: random_corpus [count] [seed].

use ns4::analysis::index;
use ns4::generate::{GenConfig, Generator};
use ns4::reduce::default_budget;
use ns4::normalize;
use ns4::text::to_sexpr;

fn main() {
    let mut args = std::env::args().skip(1);
    let count: usize = args.next().map_or(200, |s| s.parse().expect("count"));
    let seed: u64 = args.next().map_or(1, |s| s.parse().expect("seed"));
    let mut g = Generator::new(seed, GenConfig::default());
    let mut steps = 0;
    let mut rises = Vec::new();
    for i in 0..count {
        let d = g.derivation();
        let (_, trace) = normalize(&d, default_budget(&d)).expect("normalizes");
        steps += trace.len();
        if !trace.index_strictly_decreasing() {
            rises.push((i, d));
        }
    }
    println!("{count} derivations, {steps} outer steps, {} trace(s) where the index did not fall", rises.len());
    for (i, d) in rises.iter().take(3) {
        println!("#{i} index {}: {}", index(d), to_sexpr(d));
    }
}
