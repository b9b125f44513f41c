//! Print a derivation in all three formats.

use ns4::{parse_derivation, render, RenderFormat};

fn main() {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}")),
        None => include_str!("../corpus/box-proper-left.nd").to_string(),
    };
    let d = parse_derivation(&text).unwrap_or_else(|e| panic!("{e}"));
    for format in [RenderFormat::CanonicalSexpr, RenderFormat::AsciiTree, RenderFormat::LatexTree] {
        println!("{}\n", render(&d, format));
    }
}
