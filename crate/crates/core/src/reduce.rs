//! Reductions, the simplifying transformation, the critical-derivation
//! step and the normalization driver.
//!
//! All rewrites draw new labels from a [`LabelSupply`] seeded above every
//! label of the whole derivation being normalized, so grafting a reduced
//! subderivation back never captures or clashes with a context label.

use std::fmt;

use thiserror::Error;

use crate::analysis::{self, find_critical, is_critical, is_normal, is_simplified, is_trivial_site, trivial_formulas, Analysis, Index, Measures};
use crate::check::{check_ns4, CheckReport};
use crate::derivation::{substitute_with, Derivation, Label, LabelSupply, NodePath, Rule, RuleKind};
use crate::formula::Formula;

/// The cases of the critical-derivation step, plus the disjunction
/// reduction that the simplified form still needs.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum ReductionCase {
    ConjProper,
    ImpProper,
    BoxProper,
    BoxPermute,
    BotcAndE,
    BotcImpE,
    BotcBoxE,
    BotcBoxI,
    BotcBottomConcl,
    BotcMinorBottom,
    DisjProper,
}

impl ReductionCase {
    pub const ALL: [ReductionCase; 11] = [
        ReductionCase::ConjProper,
        ReductionCase::ImpProper,
        ReductionCase::BoxProper,
        ReductionCase::BoxPermute,
        ReductionCase::BotcAndE,
        ReductionCase::BotcImpE,
        ReductionCase::BotcBoxE,
        ReductionCase::BotcBoxI,
        ReductionCase::BotcBottomConcl,
        ReductionCase::BotcMinorBottom,
        ReductionCase::DisjProper,
    ];

    pub fn id(self) -> &'static str {
        match self {
            ReductionCase::ConjProper => "conj-proper",
            ReductionCase::ImpProper => "imp-proper",
            ReductionCase::BoxProper => "box-proper",
            ReductionCase::BoxPermute => "box-permute",
            ReductionCase::BotcAndE => "botc-and-e",
            ReductionCase::BotcImpE => "botc-imp-e",
            ReductionCase::BotcBoxE => "botc-box-e",
            ReductionCase::BotcBoxI => "botc-box-i",
            ReductionCase::BotcBottomConcl => "botc-bottom-concl",
            ReductionCase::BotcMinorBottom => "botc-minor-bottom",
            ReductionCase::DisjProper => "disj-proper",
        }
    }

    /// Position in the ten-case list; `None` for the disjunction case.
    pub fn number(self) -> Option<u8> {
        match self {
            ReductionCase::DisjProper => None,
            other => Some(ReductionCase::ALL.iter().position(|c| *c == other).expect("listed") as u8 + 1),
        }
    }

    pub fn from_id(id: &str) -> Option<ReductionCase> {
        ReductionCase::ALL.into_iter().find(|c| c.id() == id)
    }

    fn is_botc(self) -> bool {
        matches!(
            self,
            ReductionCase::BotcAndE
                | ReductionCase::BotcImpE
                | ReductionCase::BotcBoxE
                | ReductionCase::BotcBoxI
                | ReductionCase::BotcBottomConcl
                | ReductionCase::BotcMinorBottom
        )
    }
}

impl fmt::Display for ReductionCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct TraceStep {
    pub case: ReductionCase,
    pub before: Measures,
    pub after: Measures,
}

impl fmt::Display for TraceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (b, a) = (&self.before, &self.after);
        write!(
            f,
            "case={} G:{}->{} I:{}->{} #G:{}->{} len:{}->{}",
            self.case, b.degree, a.degree, b.index, a.index, b.top_count, a.top_count, b.length, a.length
        )
    }
}

/// Measures before and after each outer step of [`normalize`].
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct MeasureTrace {
    pub steps: Vec<TraceStep>,
}

impl MeasureTrace {
    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    /// Every step lowers the index, lexicographically.
    pub fn index_strictly_decreasing(&self) -> bool {
        self.steps.iter().all(|s| s.after.index < s.before.index)
    }

    pub fn degree_non_increasing(&self) -> bool {
        self.steps.iter().all(|s| s.after.degree <= s.before.degree)
    }

    /// Steps where the degree and the index move in opposite directions.
    pub fn disagreements(&self) -> Vec<usize> {
        self.steps
            .iter()
            .enumerate()
            .filter(|(_, s)| {
                let dg = s.after.degree.cmp(&s.before.degree);
                let di = s.after.index.cmp(&s.before.index);
                dg != std::cmp::Ordering::Equal && di != std::cmp::Ordering::Equal && dg != di
            })
            .map(|(i, _)| i)
            .collect()
    }
}

impl fmt::Display for MeasureTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("no {expected} redex at the last inference (found {found})")]
    NotARedex { expected: &'static str, found: &'static str },
    #[error("derivation is not critical")]
    NotCritical,
    #[error("derivation is not simplified")]
    NotSimplified,
    #[error("derivation contains trivial formulas")]
    HasTrivial,
    #[error("no reduction case applies: {0}")]
    Unclassified(String),
    #[error("{case}: degree rose from {before} to {after}")]
    DegreeIncrease {
        case: ReductionCase,
        before: usize,
        after: usize,
    },
    #[error("critical reduction did not finish within {0} rewrites")]
    Exhausted(usize),
    #[error("derivation is already normal")]
    Normal,
}

#[derive(Debug, Clone, Error)]
pub enum NormalizeError {
    #[error("input is not a valid NS4 derivation ({} violation(s))", .0.violations.len())]
    Invalid(CheckReport),
    #[error("step budget of {budget} exhausted")]
    BudgetExhausted {
        budget: usize,
        trace: MeasureTrace,
        partial: Derivation,
    },
    #[error("reduction failed after {} step(s): {source}", .trace.len())]
    Reduce {
        #[source]
        source: ReduceError,
        trace: MeasureTrace,
    },
}

impl NormalizeError {
    pub fn trace(&self) -> Option<&MeasureTrace> {
        match self {
            NormalizeError::Invalid(_) => None,
            NormalizeError::BudgetExhausted { trace, .. } | NormalizeError::Reduce { trace, .. } => Some(trace),
        }
    }
}

fn at(pos: usize) -> NodePath {
    NodePath(vec![pos])
}

fn premiss(d: &Derivation, pos: usize) -> &Derivation {
    d.premisses()[pos]
}

/// `root` with premiss `pos` replaced by `m`; the other premisses and the
/// labels `root` binds are copied with fresh labels.
fn graft_premiss(root: &Derivation, pos: usize, m: Derivation, supply: &mut LabelSupply) -> Derivation {
    let mut ps: Vec<Derivation> = root.premisses().into_iter().cloned().collect();
    ps[pos] = Derivation::assume(m.conclusion().clone(), None);
    let template = root
        .with_premisses(ps)
        .expect("placeholder has the premiss formula")
        .relabel_with(supply);
    template.replace_at(&at(pos), m).expect("same formula as the placeholder")
}

/// `root` with premiss `pos` replaced by `m`, labels untouched.
fn replace_premiss(root: &Derivation, pos: usize, m: Derivation) -> Derivation {
    root.replace_at(&at(pos), m).expect("same formula as the replaced premiss")
}

fn redex_error(expected: &'static str, d: &Derivation) -> ReduceError {
    ReduceError::NotARedex {
        expected,
        found: d.kind().name(),
    }
}

/// `andE(andI(a, b))` to `a` or `b`.
pub fn reduce_conjunction(d: &Derivation) -> Result<Derivation, ReduceError> {
    match d.rule() {
        Rule::AndEL(p) | Rule::AndER(p) => match p.rule() {
            Rule::AndI(a, b) => Ok(if d.kind() == RuleKind::AndEL { (**a).clone() } else { (**b).clone() }),
            _ => Err(redex_error("conjunction", p)),
        },
        _ => Err(redex_error("conjunction", d)),
    }
}

/// `impE(impI_x(body), s)` to `body` with each `x` leaf replaced by a copy
/// of `s`.
pub fn reduce_implication(d: &Derivation) -> Result<Derivation, ReduceError> {
    let mut supply = LabelSupply::above(d);
    reduce_implication_with(d, &mut supply)
}

fn reduce_implication_with(d: &Derivation, supply: &mut LabelSupply) -> Result<Derivation, ReduceError> {
    match d.rule() {
        Rule::ImpE { major, minor } => match major.rule() {
            Rule::ImpI { label, body, .. } => {
                Ok(substitute_with(body, *label, minor, supply).expect("leaf formula is the antecedent"))
            }
            _ => Err(redex_error("implication", major)),
        },
        _ => Err(redex_error("implication", d)),
    }
}

/// `orE(orI(a), x.L, y.R)` to the selected case with `a` grafted in.
pub fn reduce_disjunction(d: &Derivation) -> Result<Derivation, ReduceError> {
    let mut supply = LabelSupply::above(d);
    reduce_disjunction_with(d, &mut supply)
}

fn reduce_disjunction_with(d: &Derivation, supply: &mut LabelSupply) -> Result<Derivation, ReduceError> {
    let Rule::OrE {
        major,
        left_label,
        left,
        right_label,
        right,
    } = d.rule()
    else {
        return Err(redex_error("disjunction", d));
    };
    let (case, label, a) = match major.rule() {
        Rule::OrIL { premiss, .. } => (left, left_label, premiss),
        Rule::OrIR { premiss, .. } => (right, right_label, premiss),
        _ => return Err(redex_error("disjunction", major)),
    };
    Ok(substitute_with(case, *label, a, supply).expect("leaf formula is the disjunct"))
}

/// `boxE(boxI(S..., k, L))` to `L` with each `k` leaf replaced by a copy
/// of the major premiss of the same formula.
pub fn reduce_box_proper(d: &Derivation) -> Result<Derivation, ReduceError> {
    let mut supply = LabelSupply::above(d);
    reduce_box_proper_with(d, &mut supply)
}

fn reduce_box_proper_with(d: &Derivation, supply: &mut LabelSupply) -> Result<Derivation, ReduceError> {
    let Rule::BoxE(p) = d.rule() else {
        return Err(redex_error("box", d));
    };
    let Rule::BoxI { majors, label, minor } = p.rule() else {
        return Err(redex_error("box", p));
    };
    Ok(minor.map_leaves(&mut |leaf, l| {
        if l != *label {
            return None;
        }
        majors
            .iter()
            .find(|m| m.conclusion() == leaf.conclusion())
            .map(|m| m.relabel_with(supply))
    }))
}

/// Permute the first major premiss concluded by `boxI` over the `boxI`
/// below it.
pub fn permute_box(d: &Derivation) -> Result<Derivation, ReduceError> {
    let Rule::BoxI { majors, .. } = d.rule() else {
        return Err(redex_error("box permutation", d));
    };
    let pos = majors
        .iter()
        .position(|m| m.kind() == RuleKind::BoxI)
        .ok_or(ReduceError::NotARedex {
            expected: "box permutation",
            found: "boxI without a boxI major",
        })?;
    let mut supply = LabelSupply::above(d);
    permute_box_at(d, pos, &mut supply)
}

/// `boxI(.., boxI(S.., k, L1), .., j, L2)`: the inner majors take the place
/// of the permuted one, and each `j` leaf of its formula in `L2` becomes
/// `boxI(j leaves.., k', L1)`. Majors whose formula is already present are
/// dropped so their assumption classes fuse.
fn permute_box_at(d: &Derivation, pos: usize, supply: &mut LabelSupply) -> Result<Derivation, ReduceError> {
    let Rule::BoxI { majors, label: j, minor } = d.rule() else {
        return Err(redex_error("box permutation", d));
    };
    let inner = &majors[pos];
    let Rule::BoxI {
        majors: inner_majors,
        label: k,
        minor: lambda1,
    } = inner.rule()
    else {
        return Err(redex_error("box permutation", inner));
    };
    let moved = inner.conclusion().clone();
    let copy = |supply: &mut LabelSupply| -> Derivation {
        let leaves = inner_majors
            .iter()
            .map(|m| Derivation::assume(m.conclusion().clone(), Some(*j)))
            .collect();
        let k2 = supply.fresh();
        let body = lambda1.rename_leaves(*k, Some(k2)).relabel_with(supply);
        Derivation::box_i(leaves, k2, body).expect("leaves are boxed")
    };
    let new_minor = minor.map_leaves(&mut |leaf, l| (l == *j && *leaf.conclusion() == moved).then(|| copy(supply)));
    let mut new_majors: Vec<Derivation> = Vec::new();
    for (i, m) in majors.iter().enumerate() {
        let group: Vec<&Derivation> = if i == pos { inner_majors.iter().collect() } else { vec![m] };
        for g in group {
            if !new_majors.iter().any(|x| x.conclusion() == g.conclusion()) {
                new_majors.push(g.clone());
            }
        }
    }
    // A kept major may now be preceded by a fused duplicate; either way the
    // leaves stay bound by `j`.
    Ok(Derivation::box_i(new_majors, *j, new_minor).expect("majors are boxed"))
}

/// The `botC_1^F` premiss at `pos` of an elimination or `boxI` with
/// conclusion `C` is pushed into its `~F` leaves:
///
/// * `impE(~F^1, m)` becomes `impE(~C^1, r(m, ..))`, or `r(m, ..)` when
///   `C` is `bot`;
/// * any other `~F^1` leaf becomes `impI_x^F(impE(~C^1, r(F^x, ..)))`.
///
/// The result is `botC_1^C` of the rewritten body, or the body itself when
/// `C` is `bot`. Copies of the other premisses get fresh labels.
fn reduce_botc_at(d: &Derivation, pos: usize, supply: &mut LabelSupply) -> Result<Derivation, ReduceError> {
    let p = premiss(d, pos);
    let Rule::BotC { label, body } = p.rule() else {
        return Err(redex_error("classical", p));
    };
    let f = p.conclusion().clone();
    let not_f = Formula::neg(f.clone());
    let c = d.conclusion().clone();
    let not_c = Formula::neg(c.clone());
    let label = *label;
    let close = |x: Derivation| -> Derivation {
        if c.is_bottom() {
            x
        } else {
            Derivation::imp_e(Derivation::assume(not_c.clone(), Some(label)), x).expect("~C applies to C")
        }
    };
    fn is_class_leaf(n: &Derivation, not_f: &Formula, label: Label) -> bool {
        n.assumption_label() == Some(Some(label)) && n.conclusion() == not_f
    }
    fn go(
        n: &Derivation,
        d: &Derivation,
        pos: usize,
        f: &Formula,
        not_f: &Formula,
        label: Label,
        close: &dyn Fn(Derivation) -> Derivation,
        supply: &mut LabelSupply,
    ) -> Derivation {
        if let Rule::ImpE { major, minor } = n.rule() {
            if is_class_leaf(major, not_f, label) {
                let m = go(minor, d, pos, f, not_f, label, close, supply);
                return close(graft_premiss(d, pos, m, supply));
            }
        }
        if is_class_leaf(n, not_f, label) {
            let x = supply.fresh();
            let inner = close(graft_premiss(d, pos, Derivation::assume(f.clone(), Some(x)), supply));
            return Derivation::imp_i(f.clone(), x, inner);
        }
        if n.is_assumption() {
            return n.clone();
        }
        let ps = n
            .premisses()
            .into_iter()
            .map(|q| go(q, d, pos, f, not_f, label, close, supply))
            .collect();
        n.with_premisses(ps).expect("rewriting preserves premiss formulas")
    }
    let new_body = go(body, d, pos, &f, &not_f, label, &close, supply);
    if c.is_bottom() {
        Ok(new_body)
    } else {
        Ok(Derivation::bot_c(c, label, new_body).expect("body concludes bot"))
    }
}

/// Does every `~F` leaf discharged by the `botC` at `p` sit as the major
/// premiss of an `impE`?
fn class_only_major(p: &Derivation) -> bool {
    let Rule::BotC { label, body } = p.rule() else {
        return true;
    };
    let not_f = Formula::neg(p.conclusion().clone());
    fn go(n: &Derivation, parent_is_impe_major: bool, not_f: &Formula, label: Label) -> bool {
        if n.assumption_label() == Some(Some(label)) && n.conclusion() == not_f {
            return parent_is_impe_major;
        }
        let impe = n.kind() == RuleKind::ImpE;
        n.premisses()
            .into_iter()
            .enumerate()
            .all(|(i, q)| go(q, impe && i == 0, not_f, label))
    }
    go(body, false, &not_f, *label)
}

/// Case and premiss position for a critical, simplified, trivial-free
/// derivation.
fn classify_at(d: &Derivation) -> Result<(ReductionCase, usize), ReduceError> {
    let a = Analysis::of(d);
    let positions = a.maximal_root_premisses();
    if positions.is_empty() {
        return Err(ReduceError::NotCritical);
    }
    let kind = d.kind();
    let pos = if kind == RuleKind::BoxI {
        positions[0]
    } else if kind.is_elimination() && positions.contains(&0) {
        0
    } else {
        return Err(ReduceError::Unclassified(format!(
            "maximal premiss at position {} of {}",
            positions[0],
            kind.name()
        )));
    };
    let p = premiss(d, pos);
    let case = match (kind, p.kind()) {
        (_, RuleKind::BotC) => {
            if !class_only_major(p) {
                ReductionCase::BotcMinorBottom
            } else if d.conclusion().is_bottom() {
                ReductionCase::BotcBottomConcl
            } else {
                match kind {
                    RuleKind::AndEL | RuleKind::AndER => ReductionCase::BotcAndE,
                    RuleKind::ImpE => ReductionCase::BotcImpE,
                    RuleKind::BoxE => ReductionCase::BotcBoxE,
                    RuleKind::BoxI => ReductionCase::BotcBoxI,
                    RuleKind::OrE => return Err(ReduceError::NotSimplified),
                    other => return Err(ReduceError::Unclassified(format!("classical premiss of {}", other.name()))),
                }
            }
        }
        (RuleKind::AndEL | RuleKind::AndER, RuleKind::AndI) => ReductionCase::ConjProper,
        (RuleKind::ImpE, RuleKind::ImpI) => ReductionCase::ImpProper,
        (RuleKind::BoxE, RuleKind::BoxI) => ReductionCase::BoxProper,
        (RuleKind::BoxI, RuleKind::BoxI) => ReductionCase::BoxPermute,
        (RuleKind::OrE, RuleKind::OrIL | RuleKind::OrIR) => ReductionCase::DisjProper,
        (r, m) => {
            return Err(ReduceError::Unclassified(format!(
                "{} over {}",
                r.name(),
                m.name()
            )))
        }
    };
    Ok((case, pos))
}

fn check_preconditions(d: &Derivation) -> Result<(), ReduceError> {
    if !is_simplified(d) {
        return Err(ReduceError::NotSimplified);
    }
    if !trivial_formulas(d).is_empty() {
        return Err(ReduceError::HasTrivial);
    }
    if !is_critical(d) {
        return Err(ReduceError::NotCritical);
    }
    Ok(())
}

/// The applicable case of a critical, simplified, trivial-free derivation.
pub fn classify_critical(d: &Derivation) -> Result<ReductionCase, ReduceError> {
    check_preconditions(d)?;
    classify_at(d).map(|(c, _)| c)
}

fn apply_case(
    d: &Derivation,
    case: ReductionCase,
    pos: usize,
    supply: &mut LabelSupply,
) -> Result<Derivation, ReduceError> {
    match case {
        ReductionCase::ConjProper => reduce_conjunction(d),
        ReductionCase::ImpProper => reduce_implication_with(d, supply),
        ReductionCase::BoxProper => reduce_box_proper_with(d, supply),
        ReductionCase::BoxPermute => permute_box_at(d, pos, supply),
        ReductionCase::DisjProper => reduce_disjunction_with(d, supply),
        c => {
            debug_assert!(c.is_botc());
            reduce_botc_at(d, pos, supply)
        }
    }
}

/// Rewrites allowed to one top-level [`critical_reduce`] call.
const CRITICAL_FUEL: usize = 100_000;

/// Turn a critical, simplified, trivial-free derivation into a simplified
/// one of strictly smaller degree.
pub fn critical_reduce(d: &Derivation) -> Result<Derivation, ReduceError> {
    check_preconditions(d)?;
    let mut supply = LabelSupply::above(d);
    let mut fuel = CRITICAL_FUEL;
    critical_reduce_with(d, &mut supply, &mut fuel).map(|(out, _)| out)
}

/// As [`critical_reduce`], also reporting the case applied at the root.
pub fn critical_reduce_case(d: &Derivation) -> Result<(Derivation, ReductionCase), ReduceError> {
    check_preconditions(d)?;
    let mut supply = LabelSupply::above(d);
    let mut fuel = CRITICAL_FUEL;
    critical_reduce_with(d, &mut supply, &mut fuel)
}

/// Apply the root case, then reduce, innermost first, every critical
/// subderivation of the original degree that the rewrite exposed.
fn critical_reduce_with(
    d: &Derivation,
    supply: &mut LabelSupply,
    fuel: &mut usize,
) -> Result<(Derivation, ReductionCase), ReduceError> {
    let g = analysis::derivation_degree(d);
    let (case, pos) = classify_at(d)?;
    if *fuel == 0 {
        return Err(ReduceError::Exhausted(CRITICAL_FUEL));
    }
    *fuel -= 1;
    let mut cur = apply_case(d, case, pos, supply)?;
    loop {
        cur = simplify_with(&cur, supply);
        let now = analysis::derivation_degree(&cur);
        if now < g {
            return Ok((cur, case));
        }
        if now > g {
            return Err(ReduceError::DegreeIncrease {
                case,
                before: g,
                after: now,
            });
        }
        let p = find_critical(&cur).expect("degree is positive");
        let sub = cur.at(&p).expect("path from find_critical");
        let (reduced, _) = critical_reduce_with(sub, supply, fuel)?;
        cur = cur.replace_at(&p, reduced).expect("conclusion preserved");
    }
}

/// Apply exactly one classified rewrite to the innermost critical
/// subderivation of top degree, simplifying first if needed. The rewrite
/// is the raw case display, without the follow-up reductions that
/// [`critical_reduce`] performs.
pub fn reduce_step(d: &Derivation) -> Result<(Derivation, ReductionCase), ReduceError> {
    let mut supply = LabelSupply::above(d);
    let cur = if is_simplified(d) && trivial_formulas(d).is_empty() {
        d.clone()
    } else {
        simplify_with(d, &mut supply)
    };
    let p = find_critical(&cur).ok_or(ReduceError::Normal)?;
    let sub = cur.at(&p).expect("path from find_critical");
    let (case, pos) = classify_at(sub)?;
    let reduced = apply_case(sub, case, pos, &mut supply)?;
    Ok((cur.replace_at(&p, reduced).expect("conclusion preserved"), case))
}

/// Bring a derivation into simplified form without trivial formulas.
///
/// 1. Eliminations and `boxI` whose major premiss ends in `orE` are
///    permuted into the cases.
/// 2. Each `orE` concluding `C` other than `bot` becomes
///    `botC_n^C(orE(M, impE(~C^n, L), impE(~C^n, R)))`.
/// 3. Each `impE(~A^j, botC_i^A(S))` becomes `S` with the `i` leaves
///    relabeled `j`.
pub fn simplify(d: &Derivation) -> Derivation {
    let mut supply = LabelSupply::above(d);
    simplify_with(d, &mut supply)
}

pub fn simplify_with(d: &Derivation, supply: &mut LabelSupply) -> Derivation {
    let permuted = permute_disjunctions(d, supply);
    bottom_form(&permuted, supply)
}

fn or_major_position(d: &Derivation) -> Option<usize> {
    match d.rule() {
        Rule::BoxI { majors, .. } => majors.iter().position(|m| m.kind() == RuleKind::OrE),
        _ if d.kind().is_elimination() => (premiss(d, 0).kind() == RuleKind::OrE).then_some(0),
        _ => None,
    }
}

fn permute_disjunctions(d: &Derivation, supply: &mut LabelSupply) -> Derivation {
    if d.is_assumption() {
        return d.clone();
    }
    let ps = d
        .premisses()
        .into_iter()
        .map(|p| permute_disjunctions(p, supply))
        .collect();
    let node = d.with_premisses(ps).expect("permutation preserves conclusions");
    permute_root(node, supply)
}

fn permute_root(node: Derivation, supply: &mut LabelSupply) -> Derivation {
    let Some(pos) = or_major_position(&node) else {
        return node;
    };
    let Rule::OrE {
        major,
        left_label,
        left,
        right_label,
        right,
    } = premiss(&node, pos).rule().clone()
    else {
        unreachable!("position of an orE premiss");
    };
    let l = permute_root(replace_premiss(&node, pos, *left), supply);
    let r = permute_root(graft_premiss(&node, pos, *right, supply), supply);
    Derivation::or_e(*major, left_label, l, right_label, r).expect("both cases conclude the same formula")
}

fn bottom_form(d: &Derivation, supply: &mut LabelSupply) -> Derivation {
    if d.is_assumption() {
        return d.clone();
    }
    let ps = d.premisses().into_iter().map(|p| bottom_form(p, supply)).collect();
    let node = d.with_premisses(ps).expect("simplification preserves conclusions");
    match node.rule() {
        Rule::OrE {
            major,
            left_label,
            left,
            right_label,
            right,
        } if !node.conclusion().is_bottom() => {
            let c = node.conclusion().clone();
            let n = supply.fresh();
            let wrap = |case: &Derivation| {
                let site = Derivation::imp_e(Derivation::assume(Formula::neg(c.clone()), Some(n)), case.clone())
                    .expect("~C applies to C");
                eliminate_trivial(site)
            };
            let body = Derivation::or_e((**major).clone(), *left_label, wrap(left), *right_label, wrap(right))
                .expect("both cases conclude bot");
            Derivation::bot_c(c, n, body).expect("body concludes bot")
        }
        _ => eliminate_trivial(node),
    }
}

fn eliminate_trivial(node: Derivation) -> Derivation {
    if !is_trivial_site(&node) {
        return node;
    }
    let Rule::ImpE { major, minor } = node.into_rule() else {
        unreachable!("trivial sites are impE");
    };
    let Rule::BotC { label, body } = minor.into_rule() else {
        unreachable!("trivial minors are botC");
    };
    let j = major.assumption_label().expect("trivial majors are assumptions");
    body.rename_leaves(label, j)
}

/// Default outer step budget, `10 * len^2`.
pub fn default_budget(d: &Derivation) -> usize {
    10 * d.size() * d.size()
}

/// Normalize with the critical-derivation strategy. Each outer step
/// simplifies, reduces the innermost critical subderivation of top degree
/// and grafts it back.
pub fn normalize(d: &Derivation, budget: usize) -> Result<(Derivation, MeasureTrace), NormalizeError> {
    normalize_observed(d, budget, &mut |_| {})
}

/// As [`normalize`], handing every intermediate derivation to `observe`.
pub fn normalize_observed(
    d: &Derivation,
    budget: usize,
    observe: &mut dyn FnMut(&Derivation),
) -> Result<(Derivation, MeasureTrace), NormalizeError> {
    let report = check_ns4(d);
    if !report.valid() {
        return Err(NormalizeError::Invalid(report));
    }
    let mut trace = MeasureTrace::default();
    if is_normal(d) {
        return Ok((d.clone(), trace));
    }
    let mut supply = LabelSupply::above(d);
    let mut cur = simplify_with(d, &mut supply);
    observe(&cur);
    let mut steps = 0;
    while !is_normal(&cur) {
        if steps >= budget {
            return Err(NormalizeError::BudgetExhausted {
                budget,
                trace,
                partial: cur,
            });
        }
        steps += 1;
        let before = analysis::measures(&cur);
        let p = find_critical(&cur).expect("non-normal derivations have positive degree");
        let sub = cur.at(&p).expect("path from find_critical");
        let mut fuel = CRITICAL_FUEL;
        let (reduced, case) = match critical_reduce_with(sub, &mut supply, &mut fuel) {
            Ok(r) => r,
            Err(source) => return Err(NormalizeError::Reduce { source, trace }),
        };
        let grafted = cur.replace_at(&p, reduced).expect("conclusion preserved");
        cur = simplify_with(&grafted, &mut supply);
        observe(&cur);
        trace.steps.push(TraceStep {
            case,
            before,
            after: analysis::measures(&cur),
        });
    }
    Ok((cur, trace))
}

/// Convenience: index of `d`.
pub fn index_of(d: &Derivation) -> Index {
    analysis::index(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::derivation_degree;
    use crate::check::check_ns4;
    use crate::text::parse_derivation;

    fn p(s: &str) -> Derivation {
        parse_derivation(s).unwrap()
    }

    #[test]
    fn case_ids_round_trip() {
        for c in ReductionCase::ALL {
            assert_eq!(ReductionCase::from_id(c.id()), Some(c));
        }
        assert_eq!(ReductionCase::BotcMinorBottom.number(), Some(10));
        assert_eq!(ReductionCase::DisjProper.number(), None);
    }

    #[test]
    fn conjunction() {
        let d = p("(andEl (andI (assume A) (assume B)))");
        assert_eq!(reduce_conjunction(&d).unwrap(), p("(assume A)"));
        assert_eq!(classify_critical(&d).unwrap(), ReductionCase::ConjProper);
    }

    #[test]
    fn implication_copies_the_argument() {
        let d = p("(impE (impI A 1 (andI (assume A 1) (assume A 1))) (andEl (assume (A & B))))");
        let r = reduce_implication(&d).unwrap();
        assert_eq!(r, p("(andI (andEl (assume (A & B))) (andEl (assume (A & B))))"));
    }

    #[test]
    fn disjunction() {
        let d = p("(orE (orIl B (assume A)) 1 (impE (assume ~A) (assume A 1)) 2 (impE (assume ~B) (assume B 2)))");
        let r = reduce_disjunction(&d).unwrap();
        assert_eq!(r, p("(impE (assume ~A) (assume A))"));
    }

    #[test]
    fn box_proper() {
        let d = p("(boxE (boxI ((assume []A) (assume []B)) 1 (andI (boxE (assume []A 1)) (boxE (assume []B 1)))))");
        let r = reduce_box_proper(&d).unwrap();
        assert_eq!(r, p("(andI (boxE (assume []A)) (boxE (assume []B)))"));
        assert_eq!(classify_critical(&d).unwrap(), ReductionCase::BoxProper);
    }

    #[test]
    fn simplify_rewrites_disjunction_conclusions() {
        let d = p("(orE (assume (A | B)) 1 (orIl B (assume A 1)) 2 (orIr A (assume B 2)))");
        let s = simplify(&d);
        assert!(is_simplified(&s));
        assert!(check_ns4(&s).valid());
        assert_eq!(s.conclusion(), d.conclusion());
        assert_eq!(s.kind(), RuleKind::BotC);
    }

    #[test]
    fn simplify_permutes_before_rewriting() {
        // The orE conclusion is an elimination major: permute first so the
        // botC rewrite does not create a maximal formula.
        let d = p("(andEl (orE (assume (A | B)) 1 (andI (assume A 1) (assume A 1)) 2 (botC (A & A) 3 (impE (assume ~B) (assume B 2)))))");
        let s = simplify(&d);
        assert!(check_ns4(&s).valid(), "{}", check_ns4(&s).violations.len());
        assert!(is_simplified(&s));
        assert!(trivial_formulas(&s).is_empty());
        assert!(derivation_degree(&s) <= derivation_degree(&d));
    }

    #[test]
    fn trivial_formulas_are_removed() {
        let d = p("(botC A 1 (impE (assume ~A 1) (botC A 2 (impE (assume ~A 2) (assume A)))))");
        let s = simplify(&d);
        assert_eq!(s, p("(botC A 1 (impE (assume ~A 1) (assume A)))"));
    }

    #[test]
    fn botc_and_e() {
        let d = p("(andEl (botC (A & B) 1 (impE (assume ~(A & B) 1) (assume (A & B)))))");
        assert_eq!(classify_critical(&d).unwrap(), ReductionCase::BotcAndE);
        let r = critical_reduce(&d).unwrap();
        assert!(check_ns4(&r).valid());
        assert_eq!(r, p("(botC A 1 (impE (assume ~A 1) (andEl (assume (A & B)))))"));
    }

    #[test]
    fn botc_minor_use() {
        // ~(A & B) used as a minor premiss.
        let d = p("(andEl (botC (A & B) 1 (impE (assume ~(A & B) -> bot) (assume ~(A & B) 1))))");
        assert_eq!(classify_critical(&d).unwrap(), ReductionCase::BotcMinorBottom);
        let r = critical_reduce(&d).unwrap();
        assert!(check_ns4(&r).valid());
        assert!(derivation_degree(&r) < derivation_degree(&d));
    }

    #[test]
    fn normalize_trace_lines() {
        let d = p("(andEl (andI (andEl (andI (assume A) (assume B))) (assume B)))");
        let (n, trace) = normalize(&d, default_budget(&d)).unwrap();
        assert_eq!(n, p("(assume A)"));
        assert!(trace.index_strictly_decreasing());
        let text = trace.to_string();
        assert!(text.starts_with("case=conj-proper G:1->1 I:(1,2)->(1,1) #G:2->1 len:7->4"), "{text}");
    }

    #[test]
    fn normalize_budget_zero() {
        let d = p("(andEl (andI (assume A) (assume B)))");
        assert!(matches!(normalize(&d, 0), Err(NormalizeError::BudgetExhausted { .. })));
        let n = p("(assume A)");
        assert_eq!(normalize(&n, 0).unwrap().0, n);
    }
}
