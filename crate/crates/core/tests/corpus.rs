use std::path::PathBuf;

use ns4::analysis::{is_critical, is_normal, measures, AnalysisReport};
use ns4::check::{check_ns4, check_prawitz, PrawitzVersion};
use ns4::reduce::{default_budget, normalize, reduce_step, simplify};
use ns4::text::{to_latex, to_sexpr};
use ns4::{parse_derivation, parse_formula, render, Derivation, NodePath, ReductionCase, RenderFormat};

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn load(name: &str) -> Derivation {
    let path = corpus_dir().join(format!("{name}.nd"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_derivation(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn corpus_names() -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .filter_map(|e| {
            let p = e.ok()?.path();
            if p.extension()? != "nd" {
                return None;
            }
            Some(p.file_stem()?.to_string_lossy().into_owned())
        })
        .collect();
    names.sort();
    names
}

fn path(s: &str) -> NodePath {
    NodePath(s.split('.').map(|x| x.parse().unwrap()).collect())
}

#[test]
fn every_corpus_file_parses_and_round_trips() {
    let names = corpus_names();
    assert!(names.len() >= 18);
    for name in names {
        let d = load(&name);
        let again = parse_derivation(&to_sexpr(&d)).unwrap();
        assert_eq!(again, d, "{name}");
    }
}

#[test]
fn first_prawitz_system_rejects_the_reduct_at_the_starred_box() {
    let d = load("prawitz-der1");
    let r = load("prawitz-der1-reduct");
    assert!(check_prawitz(&d, PrawitzVersion::V1).valid());
    let report = check_prawitz(&r, PrawitzVersion::V1);
    assert!(!report.valid());
    let starred = path("0.0");
    assert_eq!(r.at(&starred).unwrap().kind().name(), "boxI");
    assert!(report.violations.iter().all(|v| v.path == starred), "{:?}", report.violations);
}

#[test]
fn second_prawitz_system_accepts_der1_but_not_the_boxbox_reduct() {
    for name in ["prawitz-der1", "prawitz-der1-reduct", "prawitz-boxbox"] {
        assert!(check_prawitz(&load(name), PrawitzVersion::V2).valid(), "{name}");
    }
    let r = load("prawitz-boxbox-reduct");
    let report = check_prawitz(&r, PrawitzVersion::V2);
    assert_eq!(report.violations.len(), 1, "{:?}", report.violations);
    let v = &report.violations[0];
    assert_eq!(v.path, NodePath::root());
    assert_eq!(r.kind().name(), "boxI");
    assert!(v.reason.contains("essentially modal"), "{}", v.reason);
}

#[test]
fn third_prawitz_system_rejects_the_medeiros_reduct() {
    let d = load("medeiros-cex");
    assert_eq!(*d.conclusion(), parse_formula("[](C -> A)").unwrap());
    assert!(check_prawitz(&d, PrawitzVersion::V3).valid());
    let r = load("medeiros-cex-reduct");
    assert_eq!(r.conclusion(), d.conclusion());
    assert!(!check_prawitz(&r, PrawitzVersion::V3).valid());
}

#[test]
fn ns4_fixtures_are_valid() {
    for name in corpus_names() {
        if name.starts_with("prawitz") || name.starts_with("medeiros-cex") && name != "medeiros-cex-ns4" {
            continue;
        }
        let d = load(&name);
        assert!(check_ns4(&d).valid(), "{name}: {:?}", check_ns4(&d).violations);
    }
}

#[test]
fn box_reductions_match_the_golden_right_hand_sides() {
    for (left, right, case) in [
        ("box-proper-left", "box-proper-right", ReductionCase::BoxProper),
        ("box-permute-left", "box-permute-right", ReductionCase::BoxPermute),
    ] {
        let (out, got) = reduce_step(&load(left)).unwrap();
        assert_eq!(got, case, "{left}");
        let want = load(right);
        assert!(out.alpha_eq(&want), "{left}:\n{}\nexpected\n{}", to_sexpr(&out), to_sexpr(&want));
        assert!(check_ns4(&out).valid());
    }
}

#[test]
fn classical_majors_with_shared_negations_are_critical_and_normalize_monotonically() {
    for name in ["classical-major-n2", "classical-major-n3", "classical-major-n4", "classical-box-n2", "classical-box-n3", "classical-box-n4"] {
        let d = load(name);
        assert!(is_critical(&d), "{name}");
        let (n, trace) = normalize(&d, default_budget(&d)).unwrap();
        assert!(is_normal(&n), "{name}");
        assert!(!trace.is_empty());
        assert!(trace.index_strictly_decreasing(), "{name}\n{trace}");
        assert_eq!(n.conclusion(), d.conclusion());
    }
}

#[test]
fn already_normal_is_a_fixed_point() {
    let d = load("already-normal");
    assert!(is_normal(&d));
    let (n, trace) = normalize(&d, default_budget(&d)).unwrap();
    assert_eq!(n, d);
    assert!(trace.is_empty());
}

#[test]
fn medeiros_counterexample_analysis() {
    let d = load("medeiros-cex-ns4");
    let report = AnalysisReport::new(&d).unwrap();
    assert!(!report.normal);
    assert!(report.measures.degree >= 1);
    let (n, trace) = normalize(&d, default_budget(&d)).unwrap();
    assert!(is_normal(&n));
    assert!(trace.index_strictly_decreasing(), "{trace}");
}

#[test]
fn simplify_is_idempotent_on_the_corpus() {
    for name in corpus_names() {
        let d = load(&name);
        if !check_ns4(&d).valid() {
            continue;
        }
        let s = simplify(&d);
        assert_eq!(simplify(&s), s, "{name}");
        assert!(measures(&s).degree <= measures(&d).degree, "{name}");
    }
}

#[test]
fn box_proper_latex_matches_golden() {
    let d = load("box-proper-left");
    let golden = std::fs::read_to_string(corpus_dir().join("golden").join("box-proper-left.tex")).unwrap();
    assert_eq!(to_latex(&d), golden);
    assert_eq!(render(&d, RenderFormat::LatexTree), golden);
}
