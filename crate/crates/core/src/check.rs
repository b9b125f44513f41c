//! Rule-system checkers: NS4 and Prawitz's three S4 systems.
//!
//! All four systems share the propositional rules and discharge
//! discipline. They differ only in the box-introduction restriction.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::derivation::{Derivation, Label, NodePath, Rule};
use crate::formula::Formula;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum PrawitzVersion {
    V1,
    V2,
    V3,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum System {
    Ns4,
    Prawitz(PrawitzVersion),
}

impl System {
    pub fn name(self) -> &'static str {
        match self {
            System::Ns4 => "ns4",
            System::Prawitz(PrawitzVersion::V1) => "prawitz-v1",
            System::Prawitz(PrawitzVersion::V2) => "prawitz-v2",
            System::Prawitz(PrawitzVersion::V3) => "prawitz-v3",
        }
    }
}

impl std::str::FromStr for System {
    type Err = String;

    fn from_str(s: &str) -> Result<System, String> {
        match s {
            "ns4" => Ok(System::Ns4),
            "prawitz-v1" => Ok(System::Prawitz(PrawitzVersion::V1)),
            "prawitz-v2" => Ok(System::Prawitz(PrawitzVersion::V2)),
            "prawitz-v3" => Ok(System::Prawitz(PrawitzVersion::V3)),
            other => Err(format!("unknown system `{other}` (expected ns4, prawitz-v1, prawitz-v2 or prawitz-v3)")),
        }
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Checker policy knobs.
#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    /// Accept a unary box introduction whose premiss depends on no
    /// assumption at all. The Prawitz restrictions say nothing about this
    /// case; accepting it is sound.
    pub allow_closed_premiss: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            allow_closed_premiss: true,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Violation {
    pub path: NodePath,
    pub rule: &'static str,
    pub reason: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.path, self.rule, self.reason)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct CheckReport {
    pub violations: Vec<Violation>,
}

impl CheckReport {
    pub fn valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violations_at<'a>(&'a self, path: &'a NodePath) -> impl Iterator<Item = &'a Violation> + 'a {
        self.violations.iter().filter(move |v| &v.path == path)
    }
}

pub fn check_ns4(d: &Derivation) -> CheckReport {
    check(d, System::Ns4, CheckOptions::default())
}

pub fn check_prawitz(d: &Derivation, version: PrawitzVersion) -> CheckReport {
    check(d, System::Prawitz(version), CheckOptions::default())
}

#[derive(Clone, Copy)]
enum Binder<'a> {
    Imp(&'a Formula),
    Botc(&'a Formula),
    OrCase(&'a Formula),
    Boxi(&'a [Derivation]),
}

struct Checker<'a> {
    system: System,
    options: CheckOptions,
    report: CheckReport,
    seen_binders: HashMap<Label, NodePath>,
    scope: Vec<(Label, Binder<'a>)>,
}

pub fn check(d: &Derivation, system: System, options: CheckOptions) -> CheckReport {
    let mut checker = Checker {
        system,
        options,
        report: CheckReport::default(),
        seen_binders: HashMap::new(),
        scope: Vec::new(),
    };
    checker.node(d, NodePath::root());
    checker.report
}

impl<'a> Checker<'a> {
    fn violation(&mut self, path: &NodePath, rule: &'static str, reason: String) {
        self.report.violations.push(Violation {
            path: path.clone(),
            rule,
            reason,
        });
    }

    fn claim_label(&mut self, label: Label, path: &NodePath, rule: &'static str) {
        if let Some(prev) = self.seen_binders.get(&label) {
            if prev != path {
                let reason = format!("label {label} already discharged at {prev}");
                self.violation(path, rule, reason);
            }
            return;
        }
        self.seen_binders.insert(label, path.clone());
    }

    fn node(&mut self, d: &'a Derivation, path: NodePath) {
        let kind = d.kind();
        for l in d.binder_labels() {
            self.claim_label(l, &path, kind.name());
        }
        match d.rule() {
            Rule::Assume { label: Some(label) } => self.leaf(d, *label, &path),
            Rule::Assume { label: None } => {}
            Rule::OrE {
                left_label, right_label, ..
            } => {
                if left_label == right_label {
                    self.violation(&path, "orE", format!("both cases discharge the same label {left_label}"));
                }
            }
            Rule::BoxI { majors, label, minor } => self.box_intro(majors, *label, minor, &path),
            _ => {}
        }
        for (i, child) in d.premisses().into_iter().enumerate() {
            let bound = d.binds_in(i).map(|label| (label, self.binder_for(d, i)));
            if let Some(b) = bound {
                self.scope.push(b);
            }
            self.node(child, path.child(i));
            if bound.is_some() {
                self.scope.pop();
            }
        }
    }

    fn binder_for(&self, d: &'a Derivation, index: usize) -> Binder<'a> {
        match d.rule() {
            Rule::ImpI { antecedent, .. } => Binder::Imp(antecedent),
            Rule::BotC { .. } => Binder::Botc(d.conclusion()),
            Rule::OrE { major, .. } => match major.conclusion() {
                Formula::Or(l, r) => Binder::OrCase(if index == 1 { l } else { r }),
                _ => unreachable!("orE major is a disjunction by construction"),
            },
            Rule::BoxI { majors, .. } => Binder::Boxi(majors),
            _ => unreachable!("only discharging rules bind labels"),
        }
    }

    fn leaf(&mut self, d: &Derivation, label: Label, path: &NodePath) {
        let Some(&(_, binder)) = self.scope.iter().rev().find(|(l, _)| *l == label) else {
            self.violation(path, "assume", format!("label {label} is not discharged by any inference below"));
            return;
        };
        let f = d.conclusion();
        let mismatch = match binder {
            Binder::Imp(antecedent) => (f != antecedent).then(|| format!("`{antecedent}`")),
            Binder::Botc(target) => {
                let want = Formula::neg(target.clone());
                (*f != want).then(|| format!("`{want}`"))
            }
            Binder::OrCase(disjunct) => (f != disjunct).then(|| format!("`{disjunct}`")),
            Binder::Boxi(majors) => (!majors.iter().any(|m| m.conclusion() == f))
                .then(|| "one of the major premisses' conclusions".to_string()),
        };
        if let Some(expected) = mismatch {
            self.violation(
                path,
                "assume",
                format!("assumption `{f}` labeled {label} does not match its discharge: expected {expected}"),
            );
        }
    }

    fn box_intro(&mut self, majors: &[Derivation], label: Label, minor: &Derivation, path: &NodePath) {
        let minor_path = path.child(majors.len());
        match self.system {
            System::Ns4 => {
                let mut seen = BTreeSet::new();
                for m in majors {
                    if !seen.insert(m.conclusion()) {
                        self.violation(
                            path,
                            "boxI",
                            format!("major premisses must be distinct, `{}` occurs twice", m.conclusion()),
                        );
                    }
                }
                for (leaf, f, l) in minor.open_leaves() {
                    if l != Some(label) {
                        self.violation(
                            path,
                            "boxI",
                            format!(
                                "minor premiss depends on `{f}` at {} which is not discharged by this box introduction",
                                minor_path.join(&leaf)
                            ),
                        );
                    }
                }
            }
            System::Prawitz(version) => {
                if !majors.is_empty() {
                    self.violation(path, "boxI", "box introduction with major premisses is not a rule of this system".into());
                    return;
                }
                let deps = minor.open_leaves();
                if deps.iter().any(|(_, _, l)| *l == Some(label)) {
                    self.violation(path, "boxI", format!("label {label} discharges assumptions in a unary box introduction"));
                }
                let deps: Vec<_> = deps.into_iter().filter(|(_, _, l)| *l != Some(label)).collect();
                if deps.is_empty() && !self.options.allow_closed_premiss {
                    self.violation(path, "boxI", "premiss depends on no assumption (rejected by policy)".into());
                }
                match version {
                    PrawitzVersion::V1 => {
                        for (_, f, _) in &deps {
                            if !f.is_box() {
                                self.violation(path, "boxI", format!("premiss depends on `{f}`, which is not modal"));
                            }
                        }
                    }
                    PrawitzVersion::V2 => {
                        for (_, f, _) in &deps {
                            if !f.is_essentially_modal() {
                                self.violation(
                                    path,
                                    "boxI",
                                    format!("premiss depends on `{f}`, which is not essentially modal"),
                                );
                            }
                        }
                    }
                    PrawitzVersion::V3 => {
                        let premiss_deps: BTreeSet<NodePath> = deps.iter().map(|(p, _, _)| p.clone()).collect();
                        for (leaf, f, _) in &deps {
                            if !thread_has_witness(minor, leaf, &premiss_deps) {
                                self.violation(
                                    path,
                                    "boxI",
                                    format!(
                                        "no essentially modal formula on the thread from `{f}` at {} covers the premiss's dependencies",
                                        minor_path.join(leaf)
                                    ),
                                );
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Prawitz's third restriction for one assumption: some essentially modal
/// occurrence F on the branch from the leaf down to the premiss such that
/// the premiss depends on everything F depends on.
fn thread_has_witness(premiss: &Derivation, leaf: &NodePath, premiss_deps: &BTreeSet<NodePath>) -> bool {
    (0..=leaf.depth()).rev().any(|cut| {
        let at = NodePath(leaf.0[..cut].to_vec());
        let node = premiss.at(&at).expect("thread node exists");
        if !node.conclusion().is_essentially_modal() {
            return false;
        }
        node.open_leaves()
            .into_iter()
            .all(|(p, _, _)| premiss_deps.contains(&at.join(&p)))
    })
}
