//! Segments, maximal segments and the measures built on them.
//!
//! A segment is a chain of occurrences of one formula, linked from an
//! `orE` minor premiss to the `orE` conclusion, and from a `boxI` major
//! premiss to each assumption of the same formula that the `boxI`
//! discharges. A major premiss whose class is discharged several times
//! makes the chain branch; every root-to-tip chain is its own segment.
//!
//! The functions here are total on any well-shaped tree. Labeled leaves
//! whose discharging inference lies outside the tree count as open, which
//! is how proper subderivations are measured in isolation.

use std::fmt;

use thiserror::Error;

use crate::check::{check_ns4, CheckReport};
use crate::derivation::{Derivation, NodePath, Rule, RuleKind};
use crate::formula::Formula;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Segment {
    pub occurrences: Vec<NodePath>,
    pub formula: Formula,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.occurrences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.occurrences.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.formula.degree()
    }
}

/// `<degree, summed length of the top-degree maximal segments>`, ordered
/// lexicographically.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Index {
    pub degree: usize,
    pub sum: usize,
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.degree, self.sum)
    }
}

/// The four numbers the normalizer tracks.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Measures {
    pub degree: usize,
    pub index: Index,
    pub top_count: usize,
    pub length: usize,
}

struct Node<'a> {
    d: &'a Derivation,
    path: NodePath,
    parent: Option<usize>,
    pos: usize,
    children: Vec<usize>,
    /// For a labeled leaf: the node discharging it, when inside the tree.
    binder: Option<usize>,
    /// For a discharging node: the leaves it discharges.
    bound: Vec<usize>,
}

/// Flattened view of a derivation with its segment structure.
pub struct Analysis<'a> {
    nodes: Vec<Node<'a>>,
    chains: Vec<Vec<usize>>,
}

impl<'a> Analysis<'a> {
    pub fn of(d: &'a Derivation) -> Analysis<'a> {
        let mut nodes = Vec::new();
        let mut scope = Vec::new();
        build(d, NodePath::root(), None, 0, &mut nodes, &mut scope);
        let mut analysis = Analysis { nodes, chains: Vec::new() };
        analysis.chains = analysis.enumerate_chains();
        analysis
    }

    fn kind(&self, i: usize) -> RuleKind {
        self.nodes[i].d.kind()
    }

    fn formula(&self, i: usize) -> &'a Formula {
        self.nodes[i].d.conclusion()
    }

    fn major_count(&self, i: usize) -> usize {
        match self.nodes[i].d.rule() {
            Rule::BoxI { majors, .. } => majors.len(),
            _ => 0,
        }
    }

    fn successors(&self, i: usize) -> Vec<usize> {
        let Some(p) = self.nodes[i].parent else {
            return Vec::new();
        };
        let pos = self.nodes[i].pos;
        match self.kind(p) {
            RuleKind::OrE if pos > 0 => vec![p],
            RuleKind::BoxI if pos < self.major_count(p) => self.nodes[p]
                .bound
                .iter()
                .copied()
                .filter(|&leaf| self.formula(leaf) == self.formula(i))
                .collect(),
            _ => Vec::new(),
        }
    }

    fn has_predecessor(&self, i: usize) -> bool {
        match self.kind(i) {
            RuleKind::OrE => true,
            RuleKind::Assume => self.nodes[i].binder.is_some_and(|b| {
                self.kind(b) == RuleKind::BoxI
                    && self.nodes[b].children[..self.major_count(b)]
                        .iter()
                        .any(|&m| self.formula(m) == self.formula(i))
            }),
            _ => false,
        }
    }

    fn enumerate_chains(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        for start in 0..self.nodes.len() {
            if self.has_predecessor(start) {
                continue;
            }
            let mut stack = vec![vec![start]];
            while let Some(chain) = stack.pop() {
                let last = *chain.last().expect("chains are non-empty");
                let next = self.successors(last);
                if next.is_empty() {
                    out.push(chain);
                    continue;
                }
                for n in next.into_iter().rev() {
                    let mut c = chain.clone();
                    c.push(n);
                    stack.push(c);
                }
            }
        }
        out
    }

    fn is_maximal_chain(&self, chain: &[usize]) -> bool {
        let first = chain[0];
        let last = *chain.last().expect("chains are non-empty");
        let starts = self.kind(first).is_introduction() || self.kind(first) == RuleKind::BotC;
        let ends = self.nodes[last]
            .parent
            .is_some_and(|p| self.kind(p).is_elimination() && self.nodes[last].pos == 0);
        starts && ends
    }

    fn to_segment(&self, chain: &[usize]) -> Segment {
        Segment {
            occurrences: chain.iter().map(|&i| self.nodes[i].path.clone()).collect(),
            formula: self.formula(chain[0]).clone(),
        }
    }

    pub fn segments(&self) -> Vec<Segment> {
        self.chains.iter().map(|c| self.to_segment(c)).collect()
    }

    fn maximal_chains(&self) -> impl Iterator<Item = &Vec<usize>> + '_ {
        self.chains.iter().filter(|c| self.is_maximal_chain(c))
    }

    pub fn maximal_segments(&self) -> Vec<Segment> {
        self.maximal_chains().map(|c| self.to_segment(c)).collect()
    }

    pub fn degree(&self) -> usize {
        self.maximal_chains().map(|c| self.formula(c[0]).degree()).max().unwrap_or(0)
    }

    pub fn index(&self) -> Index {
        let degree = self.degree();
        if degree == 0 {
            return Index::default();
        }
        let sum = self
            .maximal_chains()
            .filter(|c| self.formula(c[0]).degree() == degree)
            .map(Vec::len)
            .sum();
        Index { degree, sum }
    }

    /// Maximal formulas (length-one maximal segments) of top degree.
    pub fn top_count(&self) -> usize {
        let degree = self.degree();
        self.maximal_chains()
            .filter(|c| c.len() == 1 && self.formula(c[0]).degree() == degree)
            .count()
    }

    pub fn length(&self) -> usize {
        self.nodes.len()
    }

    pub fn measures(&self) -> Measures {
        Measures {
            degree: self.degree(),
            index: self.index(),
            top_count: self.top_count(),
            length: self.length(),
        }
    }

    /// Does the occurrence at node `i` lie on a maximal segment of the
    /// given degree?
    fn on_maximal_of_degree(&self, i: usize, degree: usize) -> bool {
        self.maximal_chains()
            .any(|c| self.formula(c[0]).degree() == degree && c.contains(&i))
    }

    /// Premiss positions of the last inference lying on a top-degree
    /// maximal segment.
    pub fn maximal_root_premisses(&self) -> Vec<usize> {
        let degree = self.degree();
        if degree == 0 {
            return Vec::new();
        }
        self.nodes[0]
            .children
            .iter()
            .enumerate()
            .filter(|(_, &c)| self.on_maximal_of_degree(c, degree))
            .map(|(pos, _)| pos)
            .collect()
    }
}

fn build<'a>(
    d: &'a Derivation,
    path: NodePath,
    parent: Option<usize>,
    pos: usize,
    nodes: &mut Vec<Node<'a>>,
    scope: &mut Vec<(crate::derivation::Label, usize)>,
) -> usize {
    let me = nodes.len();
    let binder = match d.rule() {
        Rule::Assume { label: Some(l) } => scope.iter().rev().find(|(s, _)| s == l).map(|&(_, b)| b),
        _ => None,
    };
    nodes.push(Node {
        d,
        path: path.clone(),
        parent,
        pos,
        children: Vec::new(),
        binder,
        bound: Vec::new(),
    });
    if let Some(b) = binder {
        nodes[b].bound.push(me);
    }
    for (i, c) in d.premisses().into_iter().enumerate() {
        let bind = d.binds_in(i);
        if let Some(l) = bind {
            scope.push((l, me));
        }
        let child = build(c, path.child(i), Some(me), i, nodes, scope);
        nodes[me].children.push(child);
        if bind.is_some() {
            scope.pop();
        }
    }
    me
}

pub fn segments(d: &Derivation) -> Vec<Segment> {
    Analysis::of(d).segments()
}

pub fn maximal_segments(d: &Derivation) -> Vec<Segment> {
    Analysis::of(d).maximal_segments()
}

pub fn derivation_degree(d: &Derivation) -> usize {
    Analysis::of(d).degree()
}

pub fn index(d: &Derivation) -> Index {
    Analysis::of(d).index()
}

pub fn is_normal(d: &Derivation) -> bool {
    Analysis::of(d).maximal_chains().next().is_none()
}

pub fn count_top_degree_maximal(d: &Derivation) -> usize {
    Analysis::of(d).top_count()
}

pub fn length(d: &Derivation) -> usize {
    d.size()
}

pub fn measures(d: &Derivation) -> Measures {
    Analysis::of(d).measures()
}

/// Degree of every subderivation, keyed by path, in pre-order.
pub fn subtree_degrees(d: &Derivation) -> Vec<(NodePath, usize)> {
    d.paths()
        .into_iter()
        .map(|p| {
            let g = derivation_degree(d.at(&p).expect("path from paths()"));
            (p, g)
        })
        .collect()
}

/// The last inference has a maximal premiss of top degree and every proper
/// subderivation has strictly smaller degree.
pub fn is_critical(d: &Derivation) -> bool {
    let a = Analysis::of(d);
    let g = a.degree();
    if g == 0 || a.maximal_root_premisses().is_empty() {
        return false;
    }
    d.paths()
        .iter()
        .skip(1)
        .all(|p| derivation_degree(d.at(p).expect("path from paths()")) < g)
}

/// Deepest subderivation whose degree equals the whole derivation's degree;
/// leftmost among equally deep ones. Such a subderivation is critical.
pub fn find_critical(d: &Derivation) -> Option<NodePath> {
    let g = derivation_degree(d);
    if g == 0 {
        return None;
    }
    subtree_degrees(d)
        .into_iter()
        .filter(|(_, dg)| *dg == g)
        .map(|(p, _)| p)
        .max_by(|a, b| a.depth().cmp(&b.depth()).then_with(|| b.cmp(a)))
}

/// Every case of every `orE` concludes `bot`.
pub fn is_simplified(d: &Derivation) -> bool {
    match d.rule() {
        Rule::OrE { left, right, .. } if !left.conclusion().is_bottom() || !right.conclusion().is_bottom() => false,
        _ => d.premisses().into_iter().all(is_simplified),
    }
}

/// Occurrences `A` concluded by `botC` that are the minor premiss of an
/// `impE` whose major premiss is an assumption `~A`.
pub fn trivial_formulas(d: &Derivation) -> Vec<NodePath> {
    d.paths()
        .into_iter()
        .filter(|p| {
            let node = d.at(p).expect("path from paths()");
            node.kind() == RuleKind::ImpE && is_trivial_site(node)
        })
        .map(|p| p.child(1))
        .collect()
}

/// `impE(assume ~A, botC(..) : A)`.
pub(crate) fn is_trivial_site(node: &Derivation) -> bool {
    match node.rule() {
        Rule::ImpE { major, minor } => {
            minor.kind() == RuleKind::BotC
                && major.is_assumption()
                && major.conclusion().negated() == Some(minor.conclusion())
        }
        _ => false,
    }
}

#[derive(Debug, Clone, Error)]
pub enum AnalysisError {
    #[error("derivation is not a valid NS4 derivation ({} violation(s))", .0.violations.len())]
    Invalid(CheckReport),
}

/// Everything the `analyze` front end prints.
#[derive(Clone, Debug)]
pub struct AnalysisReport {
    pub measures: Measures,
    pub normal: bool,
    pub simplified: bool,
    pub critical: bool,
    pub trivial: Vec<NodePath>,
    pub maximal: Vec<Segment>,
}

impl AnalysisReport {
    /// Analyze a derivation, refusing anything that is not NS4-valid.
    pub fn new(d: &Derivation) -> Result<AnalysisReport, AnalysisError> {
        let report = check_ns4(d);
        if !report.valid() {
            return Err(AnalysisError::Invalid(report));
        }
        Ok(AnalysisReport::unchecked(d))
    }

    pub fn unchecked(d: &Derivation) -> AnalysisReport {
        let a = Analysis::of(d);
        let maximal = a.maximal_segments();
        AnalysisReport {
            measures: a.measures(),
            normal: maximal.is_empty(),
            simplified: is_simplified(d),
            critical: is_critical(d),
            trivial: trivial_formulas(d),
            maximal,
        }
    }
}

impl fmt::Display for AnalysisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.measures;
        writeln!(
            f,
            "G={} I={} #G={} len={} normal={} simplified={} critical={} trivial={}",
            m.degree,
            m.index,
            m.top_count,
            m.length,
            self.normal,
            self.simplified,
            self.critical,
            self.trivial.len()
        )?;
        for s in &self.maximal {
            let at: Vec<String> = s.occurrences.iter().map(ToString::to_string).collect();
            writeln!(f, "maximal {} degree={} length={} at {}", s.formula, s.degree(), s.len(), at.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::Label;

    fn l(n: u32) -> Label {
        Label::new(n).unwrap()
    }
    fn a() -> Formula {
        Formula::atom("A")
    }
    fn b() -> Formula {
        Formula::atom("B")
    }

    #[test]
    fn single_leaf_is_normal() {
        let d = Derivation::assume(a(), None);
        let m = measures(&d);
        assert!(is_normal(&d));
        assert_eq!(m.top_count, 0);
        assert_eq!(m.length, 1);
        assert_eq!(m.index, Index::default());
        assert_eq!(segments(&d).len(), 1);
    }

    #[test]
    fn without_links_every_occurrence_is_its_own_segment() {
        let d = Derivation::and_el(Derivation::and_i(
            Derivation::assume(a(), None),
            Derivation::assume(b(), None),
        ))
        .unwrap();
        let segs = segments(&d);
        assert_eq!(segs.len(), d.size());
        assert!(segs.iter().all(|s| s.len() == 1));
        let max = maximal_segments(&d);
        assert_eq!(max.len(), 1);
        assert_eq!(max[0].formula, Formula::and(a(), b()));
        assert_eq!(index(&d), Index { degree: 1, sum: 1 });
        assert!(is_critical(&d));
    }

    #[test]
    fn box_chains_link_major_to_discharged_leaves() {
        // boxI([]A intro) over a minor using [[]A]^1 twice as boxE major.
        let inner = Derivation::box_i(
            vec![Derivation::assume(Formula::boxed(a()), None)],
            l(2),
            Derivation::box_e(Derivation::assume(Formula::boxed(a()), Some(l(2)))).unwrap(),
        )
        .unwrap();
        let leaf = || Derivation::box_e(Derivation::assume(Formula::boxed(a()), Some(l(1)))).unwrap();
        let d = Derivation::box_i(vec![inner], l(1), Derivation::and_i(leaf(), leaf())).unwrap();
        assert!(check_ns4(&d).valid());
        let max = maximal_segments(&d);
        assert_eq!(max.len(), 2);
        assert!(max.iter().all(|s| s.len() == 2));
        assert_eq!(index(&d), Index { degree: 1, sum: 4 });
        assert_eq!(count_top_degree_maximal(&d), 0);
        assert!(is_critical(&d));
    }

    #[test]
    fn two_disjoint_maximal_formulas_add_up() {
        let redex = || {
            Derivation::and_el(Derivation::and_i(
                Derivation::assume(a(), None),
                Derivation::assume(b(), None),
            ))
            .unwrap()
        };
        let d = Derivation::and_i(redex(), redex());
        assert_eq!(index(&d), Index { degree: 1, sum: 2 });
        assert!(!is_critical(&d));
        assert_eq!(find_critical(&d), Some(NodePath(vec![0])));
    }

    #[test]
    fn simplified_and_trivial() {
        let d = Derivation::assume(a(), None);
        assert!(is_simplified(&d));
        let or = Derivation::assume(Formula::or(a(), b()), None);
        let left = Derivation::imp_e(Derivation::assume(Formula::neg(a()), None), Derivation::assume(a(), Some(l(1)))).unwrap();
        let right = Derivation::imp_e(Derivation::assume(Formula::neg(b()), None), Derivation::assume(b(), Some(l(2)))).unwrap();
        let ok = Derivation::or_e(or.clone(), l(1), left, l(2), right).unwrap();
        assert!(is_simplified(&ok));
        let bad = Derivation::or_e(
            or,
            l(1),
            Derivation::assume(Formula::atom("C"), None),
            l(2),
            Derivation::assume(Formula::atom("C"), None),
        )
        .unwrap();
        assert!(!is_simplified(&bad));

        let botc = Derivation::bot_c(
            a(),
            l(3),
            Derivation::imp_e(Derivation::assume(Formula::neg(a()), Some(l(3))), Derivation::assume(a(), None)).unwrap(),
        )
        .unwrap();
        let trivial = Derivation::imp_e(Derivation::assume(Formula::neg(a()), None), botc.clone()).unwrap();
        assert_eq!(trivial_formulas(&trivial), vec![NodePath(vec![1])]);
        let derived_major = Derivation::imp_e(
            Derivation::imp_e(
                Derivation::assume(Formula::imp(b(), Formula::neg(a())), None),
                Derivation::assume(b(), None),
            )
            .unwrap(),
            botc,
        )
        .unwrap();
        assert!(trivial_formulas(&derived_major).is_empty());
    }
}
