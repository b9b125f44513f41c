//! Single box reductions: the proper one and the permutative one.

use ns4::analysis::measures;
use ns4::reduce::{permute_box, reduce_box_proper};
use ns4::{parse_derivation, render, RenderFormat};

fn main() {
    let proper = parse_derivation(include_str!("../corpus/box-proper-left.nd")).expect("corpus parses");
    let permute = parse_derivation(include_str!("../corpus/box-permute-left.nd")).expect("corpus parses");

    for (name, d, r) in [
        ("proper", &proper, reduce_box_proper(&proper)),
        ("permutative", &permute, permute_box(&permute)),
    ] {
        let r = r.expect("redex present");
        println!("== {name} box reduction");
        println!("{}", render(d, RenderFormat::AsciiTree));
        println!("  reduces to");
        println!("{}", render(&r, RenderFormat::AsciiTree));
        println!("  index {} -> {}\n", measures(d).index, measures(&r).index);
    }
}
