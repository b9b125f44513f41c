//! The three Prawitz systems against their counterexamples, next to NS4.

use ns4::check::{check, CheckOptions, PrawitzVersion, System};
use ns4::parse_derivation;

const FILES: [(&str, &str); 7] = [
    ("prawitz-der1", include_str!("../corpus/prawitz-der1.nd")),
    ("prawitz-der1-reduct", include_str!("../corpus/prawitz-der1-reduct.nd")),
    ("prawitz-boxbox", include_str!("../corpus/prawitz-boxbox.nd")),
    ("prawitz-boxbox-reduct", include_str!("../corpus/prawitz-boxbox-reduct.nd")),
    ("medeiros-cex", include_str!("../corpus/medeiros-cex.nd")),
    ("medeiros-cex-reduct", include_str!("../corpus/medeiros-cex-reduct.nd")),
    ("medeiros-cex-ns4", include_str!("../corpus/medeiros-cex-ns4.nd")),
];

fn main() {
    let systems = [
        System::Prawitz(PrawitzVersion::V1),
        System::Prawitz(PrawitzVersion::V2),
        System::Prawitz(PrawitzVersion::V3),
        System::Ns4,
    ];
    print!("{:<24}", "");
    for s in systems {
        print!("{:<12}", s.name());
    }
    println!();
    for (name, text) in FILES {
        let d = parse_derivation(text).expect("corpus parses");
        print!("{name:<24}");
        for s in systems {
            let report = check(&d, s, CheckOptions::default());
            print!("{:<12}", if report.valid() { "valid" } else { "rejected" });
        }
        println!();
    }

    let reduct = parse_derivation(FILES[1].1).expect("corpus parses");
    println!("\nwhy the first system rejects the reduct:");
    for v in check(&reduct, systems[0], CheckOptions::default()).violations {
        println!("  {v}");
    }
}
