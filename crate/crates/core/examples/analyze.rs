//! Segments, maximal segments and the normalization measures of a
//! derivation given on the command line, or of a built-in one.

use ns4::analysis::{segments, AnalysisReport};
use ns4::parse_derivation;

const DEFAULT: &str = include_str!("../corpus/classical-box-n3.nd");

fn main() {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}")),
        None => DEFAULT.to_string(),
    };
    let d = match parse_derivation(&text) {
        Ok(d) => d,
        Err(e) => {
            let (line, col) = e.line_col(&text);
            eprintln!("{line}:{col}: {e}");
            std::process::exit(2);
        }
    };
    match AnalysisReport::new(&d) {
        Ok(report) => print!("{report}"),
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(1);
        }
    }
    println!("segments longer than one occurrence:");
    for s in segments(&d).into_iter().filter(|s| s.len() > 1) {
        let at: Vec<String> = s.occurrences.iter().map(ToString::to_string).collect();
        println!("  {} : {}", s.formula, at.join(" -> "));
    }
}
