//! Normalize the NS4 form of the Medeiros counterexample and the shared
//! classical-class fixtures, printing each measure trace.

use ns4::analysis::is_normal;
use ns4::reduce::default_budget;
use ns4::{normalize, parse_derivation, render, RenderFormat};

const FILES: [(&str, &str); 3] = [
    ("medeiros-cex-ns4", include_str!("../corpus/medeiros-cex-ns4.nd")),
    ("classical-major-n3", include_str!("../corpus/classical-major-n3.nd")),
    ("classical-box-n4", include_str!("../corpus/classical-box-n4.nd")),
];

fn main() {
    for (name, text) in FILES {
        let d = parse_derivation(text).expect("corpus parses");
        let (n, trace) = normalize(&d, default_budget(&d)).expect("normalizes within budget");
        println!("== {name}: {} step(s), normal={}", trace.len(), is_normal(&n));
        print!("{trace}");
        if name == "medeiros-cex-ns4" {
            println!("{}", render(&n, RenderFormat::AsciiTree));
        }
    }
}
