//! A proof kernel for NS4, a natural deduction system for classical S4.
//!
//! The crate covers the whole pipeline around a derivation: building and
//! parsing it ([`text`]), checking it against NS4 or one of Prawitz's three
//! S4 systems ([`check`]), measuring its maximal segments ([`analysis`]),
//! and normalizing it with the critical-derivation strategy ([`reduce`]).

pub mod analysis;
pub mod check;
pub mod derivation;
pub mod formula;
pub mod generate;
pub mod reduce;
pub mod text;

pub use analysis::{Index, Measures, Segment};
pub use check::{check, check_ns4, check_prawitz, CheckReport, PrawitzVersion, System};
pub use derivation::{fresh_relabel, substitute, Derivation, Label, LabelSupply, NodePath, Rule, RuleKind};
pub use formula::{neg, Formula};
pub use reduce::{normalize, MeasureTrace, ReductionCase};
pub use text::{parse_derivation, parse_formula, render, RenderFormat};
