//! Derivation trees and discharge bookkeeping.
//!
//! Every node caches its conclusion. The constructors enforce conclusion
//! coherence, so a [`Derivation`] value is always well-shaped; discharge
//! coherence and the box-introduction restrictions are the checker's job.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::formula::Formula;

/// A discharge label. Always positive.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Label(u32);

impl Label {
    pub fn new(value: u32) -> Option<Label> {
        (value > 0).then_some(Label(value))
    }

    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Hands out labels that have not been used yet.
#[derive(Clone, Debug)]
pub struct LabelSupply {
    next: u32,
}

impl LabelSupply {
    /// A supply whose labels avoid every label occurring in `d`.
    pub fn above(d: &Derivation) -> LabelSupply {
        LabelSupply { next: d.max_label() + 1 }
    }

    pub fn starting_at(next: u32) -> LabelSupply {
        LabelSupply { next: next.max(1) }
    }

    pub fn fresh(&mut self) -> Label {
        let label = Label(self.next);
        self.next += 1;
        label
    }

    /// Make sure later labels also avoid everything in `d`.
    pub fn reserve(&mut self, d: &Derivation) {
        self.next = self.next.max(d.max_label() + 1);
    }
}

/// Position of a node: child indices from the root.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct NodePath(pub Vec<usize>);

impl NodePath {
    pub fn root() -> NodePath {
        NodePath(Vec::new())
    }

    pub fn child(&self, index: usize) -> NodePath {
        let mut steps = self.0.clone();
        steps.push(index);
        NodePath(steps)
    }

    pub fn parent(&self) -> Option<NodePath> {
        let (_, init) = self.0.split_last()?;
        Some(NodePath(init.to_vec()))
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn is_prefix_of(&self, other: &NodePath) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn join(&self, suffix: &NodePath) -> NodePath {
        let mut steps = self.0.clone();
        steps.extend_from_slice(&suffix.0);
        NodePath(steps)
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        for (i, step) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{step}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// A premiss shape mismatch found while building a node.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DerivationError {
    #[error("{rule}: {reason}: expected {expected}, found `{found}`")]
    Shape {
        rule: &'static str,
        reason: &'static str,
        expected: String,
        found: Formula,
    },
}

fn shape_err(rule: &'static str, reason: &'static str, expected: impl Into<String>, found: &Formula) -> DerivationError {
    DerivationError::Shape {
        rule,
        reason,
        expected: expected.into(),
        found: found.clone(),
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Rule {
    Assume {
        label: Option<Label>,
    },
    AndI(Box<Derivation>, Box<Derivation>),
    AndEL(Box<Derivation>),
    AndER(Box<Derivation>),
    /// Concludes `premiss | other`.
    OrIL {
        premiss: Box<Derivation>,
        other: Formula,
    },
    /// Concludes `other | premiss`.
    OrIR {
        premiss: Box<Derivation>,
        other: Formula,
    },
    OrE {
        major: Box<Derivation>,
        left_label: Label,
        left: Box<Derivation>,
        right_label: Label,
        right: Box<Derivation>,
    },
    ImpI {
        antecedent: Formula,
        label: Label,
        body: Box<Derivation>,
    },
    ImpE {
        major: Box<Derivation>,
        minor: Box<Derivation>,
    },
    /// Classical absurdity: discharges `~target`, concludes `target`.
    BotC {
        label: Label,
        body: Box<Derivation>,
    },
    BoxE(Box<Derivation>),
    /// Box introduction with vector premisses. With no majors it is the
    /// unary rule of the Prawitz systems.
    BoxI {
        majors: Vec<Derivation>,
        label: Label,
        minor: Box<Derivation>,
    },
}

/// Coarse rule tag used by checkers and analysis.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum RuleKind {
    Assume,
    AndI,
    AndEL,
    AndER,
    OrIL,
    OrIR,
    OrE,
    ImpI,
    ImpE,
    BotC,
    BoxE,
    BoxI,
}

impl RuleKind {
    pub fn name(self) -> &'static str {
        match self {
            RuleKind::Assume => "assume",
            RuleKind::AndI => "andI",
            RuleKind::AndEL => "andEl",
            RuleKind::AndER => "andEr",
            RuleKind::OrIL => "orIl",
            RuleKind::OrIR => "orIr",
            RuleKind::OrE => "orE",
            RuleKind::ImpI => "impI",
            RuleKind::ImpE => "impE",
            RuleKind::BotC => "botC",
            RuleKind::BoxE => "boxE",
            RuleKind::BoxI => "boxI",
        }
    }

    pub fn is_introduction(self) -> bool {
        matches!(
            self,
            RuleKind::AndI | RuleKind::OrIL | RuleKind::OrIR | RuleKind::ImpI | RuleKind::BoxI
        )
    }

    pub fn is_elimination(self) -> bool {
        matches!(
            self,
            RuleKind::AndEL | RuleKind::AndER | RuleKind::OrE | RuleKind::ImpE | RuleKind::BoxE
        )
    }
}

/// A natural deduction derivation in NS4.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Derivation {
    conclusion: Formula,
    rule: Rule,
}

impl Derivation {
    pub fn assume(formula: Formula, label: Option<Label>) -> Derivation {
        Derivation {
            conclusion: formula,
            rule: Rule::Assume { label },
        }
    }

    pub fn and_i(left: Derivation, right: Derivation) -> Derivation {
        Derivation {
            conclusion: Formula::and(left.conclusion.clone(), right.conclusion.clone()),
            rule: Rule::AndI(Box::new(left), Box::new(right)),
        }
    }

    pub fn and_el(premiss: Derivation) -> Result<Derivation, DerivationError> {
        match &premiss.conclusion {
            Formula::And(l, _) => Ok(Derivation {
                conclusion: (**l).clone(),
                rule: Rule::AndEL(Box::new(premiss)),
            }),
            other => Err(shape_err("andEl", "premiss must be a conjunction", "A & B", other)),
        }
    }

    pub fn and_er(premiss: Derivation) -> Result<Derivation, DerivationError> {
        match &premiss.conclusion {
            Formula::And(_, r) => Ok(Derivation {
                conclusion: (**r).clone(),
                rule: Rule::AndER(Box::new(premiss)),
            }),
            other => Err(shape_err("andEr", "premiss must be a conjunction", "A & B", other)),
        }
    }

    pub fn or_il(premiss: Derivation, other: Formula) -> Derivation {
        Derivation {
            conclusion: Formula::or(premiss.conclusion.clone(), other.clone()),
            rule: Rule::OrIL {
                premiss: Box::new(premiss),
                other,
            },
        }
    }

    pub fn or_ir(premiss: Derivation, other: Formula) -> Derivation {
        Derivation {
            conclusion: Formula::or(other.clone(), premiss.conclusion.clone()),
            rule: Rule::OrIR {
                premiss: Box::new(premiss),
                other,
            },
        }
    }

    pub fn or_e(
        major: Derivation,
        left_label: Label,
        left: Derivation,
        right_label: Label,
        right: Derivation,
    ) -> Result<Derivation, DerivationError> {
        if !matches!(major.conclusion, Formula::Or(..)) {
            return Err(shape_err("orE", "major premiss must be a disjunction", "A | B", &major.conclusion));
        }
        if left.conclusion != right.conclusion {
            return Err(shape_err(
                "orE",
                "both cases must have the same conclusion",
                format!("`{}`", left.conclusion),
                &right.conclusion,
            ));
        }
        Ok(Derivation {
            conclusion: left.conclusion.clone(),
            rule: Rule::OrE {
                major: Box::new(major),
                left_label,
                left: Box::new(left),
                right_label,
                right: Box::new(right),
            },
        })
    }

    pub fn imp_i(antecedent: Formula, label: Label, body: Derivation) -> Derivation {
        Derivation {
            conclusion: Formula::imp(antecedent.clone(), body.conclusion.clone()),
            rule: Rule::ImpI {
                antecedent,
                label,
                body: Box::new(body),
            },
        }
    }

    pub fn imp_e(major: Derivation, minor: Derivation) -> Result<Derivation, DerivationError> {
        match &major.conclusion {
            Formula::Imp(a, b) => {
                if **a != minor.conclusion {
                    return Err(shape_err(
                        "impE",
                        "minor premiss must match the antecedent of the major",
                        format!("`{a}`"),
                        &minor.conclusion,
                    ));
                }
                Ok(Derivation {
                    conclusion: (**b).clone(),
                    rule: Rule::ImpE {
                        major: Box::new(major),
                        minor: Box::new(minor),
                    },
                })
            }
            other => Err(shape_err("impE", "major premiss must be an implication", "A -> B", other)),
        }
    }

    pub fn bot_c(target: Formula, label: Label, body: Derivation) -> Result<Derivation, DerivationError> {
        if !body.conclusion.is_bottom() {
            return Err(shape_err("botC", "premiss must be bot", "`bot`", &body.conclusion));
        }
        Ok(Derivation {
            conclusion: target,
            rule: Rule::BotC {
                label,
                body: Box::new(body),
            },
        })
    }

    pub fn box_e(major: Derivation) -> Result<Derivation, DerivationError> {
        match &major.conclusion {
            Formula::Box(inner) => Ok(Derivation {
                conclusion: (**inner).clone(),
                rule: Rule::BoxE(Box::new(major)),
            }),
            other => Err(shape_err("boxE", "major premiss must be Box", "[]A", other)),
        }
    }

    pub fn box_i(majors: Vec<Derivation>, label: Label, minor: Derivation) -> Result<Derivation, DerivationError> {
        if let Some(bad) = majors.iter().find(|m| !m.conclusion.is_box()) {
            return Err(shape_err("boxI", "major premisses must be Box", "[]B", &bad.conclusion));
        }
        Ok(Derivation {
            conclusion: Formula::boxed(minor.conclusion.clone()),
            rule: Rule::BoxI {
                majors,
                label,
                minor: Box::new(minor),
            },
        })
    }

    pub fn conclusion(&self) -> &Formula {
        &self.conclusion
    }

    pub fn rule(&self) -> &Rule {
        &self.rule
    }

    pub fn into_rule(self) -> Rule {
        self.rule
    }

    pub fn kind(&self) -> RuleKind {
        match &self.rule {
            Rule::Assume { .. } => RuleKind::Assume,
            Rule::AndI(..) => RuleKind::AndI,
            Rule::AndEL(_) => RuleKind::AndEL,
            Rule::AndER(_) => RuleKind::AndER,
            Rule::OrIL { .. } => RuleKind::OrIL,
            Rule::OrIR { .. } => RuleKind::OrIR,
            Rule::OrE { .. } => RuleKind::OrE,
            Rule::ImpI { .. } => RuleKind::ImpI,
            Rule::ImpE { .. } => RuleKind::ImpE,
            Rule::BotC { .. } => RuleKind::BotC,
            Rule::BoxE(_) => RuleKind::BoxE,
            Rule::BoxI { .. } => RuleKind::BoxI,
        }
    }

    /// Label on an assumption leaf, if any.
    pub fn assumption_label(&self) -> Option<Option<Label>> {
        match self.rule {
            Rule::Assume { label } => Some(label),
            _ => None,
        }
    }

    pub fn is_assumption(&self) -> bool {
        matches!(self.rule, Rule::Assume { .. })
    }

    /// Premisses in order. `orE`: major, left, right. `impE`: major, minor.
    /// `boxI`: majors, then minor.
    pub fn premisses(&self) -> Vec<&Derivation> {
        match &self.rule {
            Rule::Assume { .. } => Vec::new(),
            Rule::AndI(l, r) => vec![l, r],
            Rule::AndEL(p) | Rule::AndER(p) | Rule::BoxE(p) => vec![p],
            Rule::OrIL { premiss, .. } | Rule::OrIR { premiss, .. } => vec![premiss],
            Rule::OrE { major, left, right, .. } => vec![major, left, right],
            Rule::ImpI { body, .. } | Rule::BotC { body, .. } => vec![body],
            Rule::ImpE { major, minor } => vec![major, minor],
            Rule::BoxI { majors, minor, .. } => {
                let mut out: Vec<&Derivation> = majors.iter().collect();
                out.push(minor);
                out
            }
        }
    }

    /// Rebuild this node with new premisses (same order as [`premisses`]).
    /// Used by generic tree rewrites; the conclusion is recomputed.
    ///
    /// [`premisses`]: Derivation::premisses
    pub fn with_premisses(&self, ps: Vec<Derivation>) -> Result<Derivation, DerivationError> {
        let expected = self.premisses().len();
        assert_eq!(ps.len(), expected, "premiss count mismatch for {}", self.kind().name());
        let mut it = ps.into_iter();
        let mut take = || it.next().expect("premiss count checked");
        match &self.rule {
            Rule::Assume { .. } => Ok(self.clone()),
            Rule::AndI(..) => {
                let l = take();
                Ok(Derivation::and_i(l, take()))
            }
            Rule::AndEL(_) => Derivation::and_el(take()),
            Rule::AndER(_) => Derivation::and_er(take()),
            Rule::OrIL { other, .. } => Ok(Derivation::or_il(take(), other.clone())),
            Rule::OrIR { other, .. } => Ok(Derivation::or_ir(take(), other.clone())),
            Rule::OrE { left_label, right_label, .. } => {
                let major = take();
                let left = take();
                Derivation::or_e(major, *left_label, left, *right_label, take())
            }
            Rule::ImpI { antecedent, label, .. } => Ok(Derivation::imp_i(antecedent.clone(), *label, take())),
            Rule::ImpE { .. } => {
                let major = take();
                Derivation::imp_e(major, take())
            }
            Rule::BotC { label, .. } => Derivation::bot_c(self.conclusion.clone(), *label, take()),
            Rule::BoxE(_) => Derivation::box_e(take()),
            Rule::BoxI { label, .. } => {
                let mut rest: Vec<Derivation> = it.collect();
                let minor = rest.pop().expect("boxI has a minor premiss");
                Derivation::box_i(rest, *label, minor)
            }
        }
    }

    /// Label discharged by this node for premiss `index`, if any.
    pub fn binds_in(&self, index: usize) -> Option<Label> {
        match &self.rule {
            Rule::OrE { left_label, right_label, .. } => match index {
                1 => Some(*left_label),
                2 => Some(*right_label),
                _ => None,
            },
            Rule::ImpI { label, .. } | Rule::BotC { label, .. } => Some(*label),
            Rule::BoxI { majors, label, .. } => (index == majors.len()).then_some(*label),
            _ => None,
        }
    }

    /// Labels discharged by this node (any premiss).
    pub fn binder_labels(&self) -> Vec<Label> {
        match &self.rule {
            Rule::OrE { left_label, right_label, .. } => vec![*left_label, *right_label],
            Rule::ImpI { label, .. } | Rule::BotC { label, .. } | Rule::BoxI { label, .. } => vec![*label],
            _ => Vec::new(),
        }
    }

    /// Number of formula occurrences (nodes).
    pub fn size(&self) -> usize {
        1 + self.premisses().into_iter().map(Derivation::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.premisses().into_iter().map(Derivation::height).max().unwrap_or(0)
    }

    pub fn at(&self, path: &NodePath) -> Option<&Derivation> {
        let mut node = self;
        for &step in &path.0 {
            node = *node.premisses().get(step)?;
        }
        Some(node)
    }

    /// Replace the subtree at `path`. Fails if the new subtree changes a
    /// conclusion in a way the ancestors cannot absorb.
    pub fn replace_at(&self, path: &NodePath, replacement: Derivation) -> Result<Derivation, DerivationError> {
        fn go(node: &Derivation, steps: &[usize], replacement: Derivation) -> Result<Derivation, DerivationError> {
            let Some((&first, rest)) = steps.split_first() else {
                return Ok(replacement);
            };
            let mut ps: Vec<Derivation> = node.premisses().into_iter().cloned().collect();
            let child = go(&ps[first], rest, replacement)?;
            ps[first] = child;
            node.with_premisses(ps)
        }
        go(self, &path.0, replacement)
    }

    /// Every node path in pre-order.
    pub fn paths(&self) -> Vec<NodePath> {
        let mut out = Vec::new();
        fn go(node: &Derivation, here: NodePath, out: &mut Vec<NodePath>) {
            let children = node.premisses();
            out.push(here.clone());
            for (i, c) in children.into_iter().enumerate() {
                go(c, here.child(i), out);
            }
        }
        go(self, NodePath::root(), &mut out);
        out
    }

    /// All labels occurring anywhere (binders and leaves).
    pub fn labels(&self) -> BTreeSet<Label> {
        let mut out = BTreeSet::new();
        self.visit(&mut |n| {
            out.extend(n.binder_labels());
            if let Rule::Assume { label: Some(l) } = n.rule {
                out.insert(l);
            }
        });
        out
    }

    pub fn max_label(&self) -> u32 {
        self.labels().iter().next_back().map_or(0, |l| l.0)
    }

    fn visit(&self, f: &mut impl FnMut(&Derivation)) {
        f(self);
        for p in self.premisses() {
            p.visit(f);
        }
    }

    /// Assumption leaves not discharged inside this tree, with their
    /// paths relative to this root.
    pub fn open_leaves(&self) -> Vec<(NodePath, &Formula, Option<Label>)> {
        let mut out = Vec::new();
        let mut bound = Vec::new();
        fn go<'a>(
            node: &'a Derivation,
            here: NodePath,
            bound: &mut Vec<Label>,
            out: &mut Vec<(NodePath, &'a Formula, Option<Label>)>,
        ) {
            if let Rule::Assume { label } = node.rule {
                if label.is_none_or(|l| !bound.contains(&l)) {
                    out.push((here, &node.conclusion, label));
                }
                return;
            }
            for (i, c) in node.premisses().into_iter().enumerate() {
                let b = node.binds_in(i);
                if let Some(l) = b {
                    bound.push(l);
                }
                go(c, here.child(i), bound, out);
                if b.is_some() {
                    bound.pop();
                }
            }
        }
        go(self, NodePath::root(), &mut bound, &mut out);
        out
    }

    /// Multiset (as a sorted list) of undischarged assumption formulas.
    pub fn open_assumptions(&self) -> Vec<Formula> {
        let mut out: Vec<Formula> = self.open_leaves().into_iter().map(|(_, f, _)| f.clone()).collect();
        out.sort();
        out
    }

    /// Labels of leaves whose discharging node is outside this tree.
    pub fn free_labels(&self) -> BTreeSet<Label> {
        self.open_leaves().into_iter().filter_map(|(_, _, l)| l).collect()
    }

    /// Rename every label discharged inside the tree to a fresh one.
    /// Free labels are left alone so the copy still binds to its context.
    pub fn relabel_with(&self, supply: &mut LabelSupply) -> Derivation {
        fn go(node: &Derivation, env: &mut Vec<(Label, Label)>, supply: &mut LabelSupply) -> Derivation {
            let lookup = |env: &Vec<(Label, Label)>, l: Label| {
                env.iter().rev().find(|(old, _)| *old == l).map_or(l, |(_, new)| *new)
            };
            if let Rule::Assume { label } = node.rule {
                return Derivation::assume(node.conclusion.clone(), label.map(|l| lookup(env, l)));
            }
            let renames: Vec<(Label, Label)> =
                node.binder_labels().into_iter().map(|l| (l, supply.fresh())).collect();
            let new_of = |l: Label| renames.iter().find(|(o, _)| *o == l).map(|(_, n)| *n).unwrap();
            let mut ps = Vec::new();
            for (i, c) in node.premisses().into_iter().enumerate() {
                let b = node.binds_in(i);
                if let Some(l) = b {
                    env.push((l, new_of(l)));
                }
                ps.push(go(c, env, supply));
                if b.is_some() {
                    env.pop();
                }
            }
            let rebuilt = node.with_premisses(ps).expect("relabeling preserves conclusions");
            rebuilt.with_binder_labels(&|l| new_of(l))
        }
        go(self, &mut Vec::new(), supply)
    }

    fn with_binder_labels(self, rename: &dyn Fn(Label) -> Label) -> Derivation {
        let Derivation { conclusion, rule } = self;
        let rule = match rule {
            Rule::OrE {
                major,
                left_label,
                left,
                right_label,
                right,
            } => Rule::OrE {
                major,
                left_label: rename(left_label),
                left,
                right_label: rename(right_label),
                right,
            },
            Rule::ImpI { antecedent, label, body } => Rule::ImpI {
                antecedent,
                label: rename(label),
                body,
            },
            Rule::BotC { label, body } => Rule::BotC {
                label: rename(label),
                body,
            },
            Rule::BoxI { majors, label, minor } => Rule::BoxI {
                majors,
                label: rename(label),
                minor,
            },
            other => other,
        };
        Derivation { conclusion, rule }
    }

    /// Change the label of every leaf labeled `from` to `to`.
    pub fn rename_leaves(&self, from: Label, to: Option<Label>) -> Derivation {
        if let Rule::Assume { label: Some(l) } = self.rule {
            if l == from {
                return Derivation::assume(self.conclusion.clone(), to);
            }
            return self.clone();
        }
        let ps = self.premisses().into_iter().map(|p| p.rename_leaves(from, to)).collect();
        self.with_premisses(ps).expect("renaming leaves preserves conclusions")
    }

    /// Rebuild bottom-up, giving `f` the chance to replace any labeled leaf.
    pub fn map_leaves(&self, f: &mut dyn FnMut(&Derivation, Label) -> Option<Derivation>) -> Derivation {
        if let Rule::Assume { label: Some(l) } = self.rule {
            return f(self, l).unwrap_or_else(|| self.clone());
        }
        if self.is_assumption() {
            return self.clone();
        }
        let ps = self.premisses().into_iter().map(|p| p.map_leaves(f)).collect();
        self.with_premisses(ps).expect("leaf replacement must preserve conclusions")
    }

    /// Binding-aware structural equality: labels may differ as long as the
    /// discharge structure is the same.
    pub fn alpha_eq(&self, other: &Derivation) -> bool {
        fn go(a: &Derivation, b: &Derivation, env: &mut Vec<(Label, Label)>) -> bool {
            if a.conclusion != b.conclusion || a.kind() != b.kind() {
                return false;
            }
            match (&a.rule, &b.rule) {
                (Rule::Assume { label: la }, Rule::Assume { label: lb }) => match (la, lb) {
                    (None, None) => true,
                    (Some(x), Some(y)) => {
                        let bx = env.iter().rev().find(|(p, _)| p == x);
                        let by = env.iter().rev().find(|(_, q)| q == y);
                        match (bx, by) {
                            (Some(p), Some(q)) => p == q,
                            (None, None) => x == y,
                            _ => false,
                        }
                    }
                    _ => false,
                },
                (Rule::OrIL { other: x, .. }, Rule::OrIL { other: y, .. })
                | (Rule::OrIR { other: x, .. }, Rule::OrIR { other: y, .. })
                    if x != y =>
                {
                    false
                }
                (Rule::BoxI { majors: ma, .. }, Rule::BoxI { majors: mb, .. }) if ma.len() != mb.len() => false,
                _ => {
                    let pa = a.premisses();
                    let pb = b.premisses();
                    if pa.len() != pb.len() {
                        return false;
                    }
                    pa.iter().zip(pb.iter()).enumerate().all(|(i, (x, y))| {
                        let pair = match (a.binds_in(i), b.binds_in(i)) {
                            (Some(p), Some(q)) => Some((p, q)),
                            (None, None) => None,
                            _ => return false,
                        };
                        if let Some(p) = pair {
                            env.push(p);
                        }
                        let ok = go(x, y, env);
                        if pair.is_some() {
                            env.pop();
                        }
                        ok
                    })
                }
            }
        }
        go(self, other, &mut Vec::new())
    }
}

/// Errors raised by [`substitute`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstError {
    #[error("label {label}: assumption `{leaf}` cannot be replaced by a derivation of `{replacement}`")]
    FormulaMismatch {
        label: Label,
        leaf: Formula,
        replacement: Formula,
    },
}

/// Replace every leaf labeled `label` by a fresh-relabeled copy of
/// `replacement`.
pub fn substitute(d: &Derivation, label: Label, replacement: &Derivation) -> Result<Derivation, SubstError> {
    let mut supply = LabelSupply::above(d);
    supply.reserve(replacement);
    substitute_with(d, label, replacement, &mut supply)
}

pub fn substitute_with(
    d: &Derivation,
    label: Label,
    replacement: &Derivation,
    supply: &mut LabelSupply,
) -> Result<Derivation, SubstError> {
    let mut err = None;
    let out = d.map_leaves(&mut |leaf, l| {
        if l != label {
            return None;
        }
        if leaf.conclusion() != replacement.conclusion() {
            err.get_or_insert(SubstError::FormulaMismatch {
                label,
                leaf: leaf.conclusion().clone(),
                replacement: replacement.conclusion().clone(),
            });
            return None;
        }
        Some(replacement.relabel_with(supply))
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

/// Injectively rename every discharged label away from `avoid`.
pub fn fresh_relabel(d: &Derivation, avoid: &BTreeSet<Label>) -> Derivation {
    let floor = avoid.iter().next_back().map_or(0, |l| l.0).max(d.max_label());
    d.relabel_with(&mut LabelSupply::starting_at(floor + 1))
}

/// Map from label to the number of leaves carrying it.
pub fn leaf_label_counts(d: &Derivation) -> HashMap<Label, usize> {
    let mut out = HashMap::new();
    d.visit(&mut |n| {
        if let Rule::Assume { label: Some(l) } = n.rule {
            *out.entry(l).or_insert(0) += 1;
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;

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
    fn label_must_be_positive() {
        assert!(Label::new(0).is_none());
        assert_eq!(Label::new(3).unwrap().get(), 3);
    }

    #[test]
    fn conclusions() {
        let boxed = Derivation::assume(Formula::boxed(a()), None);
        assert_eq!(boxed.conclusion(), &Formula::boxed(a()));
        let e = Derivation::box_e(boxed).unwrap();
        assert_eq!(e.conclusion(), &a());
        let conj = Derivation::assume(Formula::and(Formula::boxed(a()), Formula::boxed(b())), None);
        assert_eq!(Derivation::and_el(conj).unwrap().conclusion(), &Formula::boxed(a()));
    }

    #[test]
    fn shape_errors() {
        let err = Derivation::box_e(Derivation::assume(a(), None)).unwrap_err();
        assert!(err.to_string().contains("major premiss must be Box"));
        let imp = Derivation::assume(Formula::imp(a(), b()), None);
        assert!(Derivation::imp_e(imp, Derivation::assume(b(), None)).is_err());
        assert!(Derivation::bot_c(a(), l(1), Derivation::assume(b(), None)).is_err());
    }

    #[test]
    fn open_assumptions_respect_discharge() {
        let body = Derivation::imp_e(
            Derivation::assume(Formula::imp(a(), b()), None),
            Derivation::assume(a(), Some(l(1))),
        )
        .unwrap();
        let d = Derivation::imp_i(a(), l(1), body);
        assert_eq!(d.open_assumptions(), vec![Formula::imp(a(), b())]);
        assert_eq!(Derivation::assume(a(), None).open_assumptions(), vec![a()]);
    }

    #[test]
    fn substitute_single_leaf_and_vacuous() {
        let pi = Derivation::and_el(Derivation::assume(Formula::and(a(), b()), None)).unwrap();
        let leaf = Derivation::assume(a(), Some(l(1)));
        assert_eq!(substitute(&leaf, l(1), &pi).unwrap(), pi);
        let other = Derivation::assume(b(), Some(l(2)));
        assert_eq!(substitute(&other, l(1), &pi).unwrap(), other);
        assert!(substitute(&Derivation::assume(b(), Some(l(1))), l(1), &pi).is_err());
    }

    #[test]
    fn relabel_avoids_and_preserves_binding() {
        let body = Derivation::imp_i(b(), l(2), Derivation::assume(a(), Some(l(1))));
        let d = Derivation::imp_i(a(), l(1), body);
        let avoid: BTreeSet<Label> = [l(1)].into_iter().collect();
        let r = fresh_relabel(&d, &avoid);
        assert!(r.labels().is_disjoint(&avoid));
        assert!(r.alpha_eq(&d));
        assert_ne!(r, d);
        assert!(fresh_relabel(&r, &BTreeSet::new()).alpha_eq(&d));
    }

    #[test]
    fn relabel_keeps_free_labels() {
        let d = Derivation::and_i(Derivation::assume(a(), Some(l(7))), Derivation::assume(b(), None));
        let r = fresh_relabel(&d, &BTreeSet::new());
        assert_eq!(r, d);
    }

    #[test]
    fn alpha_eq_distinguishes_bindings() {
        // impI 1 (impI 2 [A]^1) vs impI 1 (impI 2 [A]^2)
        let x = Derivation::imp_i(a(), l(1), Derivation::imp_i(a(), l(2), Derivation::assume(a(), Some(l(1)))));
        let y = Derivation::imp_i(a(), l(1), Derivation::imp_i(a(), l(2), Derivation::assume(a(), Some(l(2)))));
        assert!(!x.alpha_eq(&y));
        assert!(x.alpha_eq(&x.relabel_with(&mut LabelSupply::starting_at(10))));
    }

    #[test]
    fn paths_and_replace() {
        let d = Derivation::and_i(Derivation::assume(a(), None), Derivation::assume(b(), None));
        assert_eq!(d.paths().len(), 3);
        assert_eq!(d.at(&NodePath(vec![1])).unwrap().conclusion(), &b());
        let r = d.replace_at(&NodePath(vec![1]), Derivation::assume(a(), None)).unwrap();
        assert_eq!(r.conclusion(), &Formula::and(a(), a()));
        assert_eq!(NodePath(vec![0, 2]).to_string(), "0.2");
        assert_eq!(NodePath::root().to_string(), "root");
    }
}
