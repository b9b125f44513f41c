//! Helpers shared by the integration test targets, including an
//! independent segment oracle built from the link relation alone.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use ns4::analysis::Index;
use ns4::{parse_derivation, Derivation, Formula, NodePath};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn load(name: &str) -> Derivation {
    let path = corpus_dir().join(format!("{name}.nd"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    parse_derivation(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// `(name, text)` of every corpus file, sorted by name.
pub fn corpus_files() -> Vec<(String, String)> {
    let mut out: Vec<(String, String)> = std::fs::read_dir(corpus_dir())
        .expect("corpus directory")
        .filter_map(|e| {
            let p = e.ok()?.path();
            if p.extension()? != "nd" {
                return None;
            }
            let name = p.file_stem()?.to_string_lossy().into_owned();
            Some((name, std::fs::read_to_string(&p).ok()?))
        })
        .collect();
    out.sort();
    out
}

fn formula_degree(f: &Formula) -> usize {
    match f {
        Formula::Atom(_) | Formula::Bottom => 0,
        Formula::Box(a) => 1 + formula_degree(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => 1 + formula_degree(a) + formula_degree(b),
    }
}

const INTRODUCTIONS: [&str; 5] = ["andI", "orIl", "orIr", "impI", "boxI"];
const ELIMINATIONS: [&str; 5] = ["andEl", "andEr", "orE", "impE", "boxE"];

/// Result of the brute-force oracle; segments are sorted occurrence lists.
#[derive(Debug, PartialEq, Eq)]
pub struct OracleView {
    pub segments: Vec<Vec<NodePath>>,
    pub maximal: Vec<Vec<NodePath>>,
    pub degree: usize,
    pub index: Index,
}

/// Recompute segments from scratch: enumerate every node, find each
/// leaf's discharging node by scanning ancestors, build the full link
/// matrix, close it transitively to confirm acyclicity, then take every
/// source-to-sink path of direct links.
pub fn oracle(d: &Derivation) -> OracleView {
    let paths = d.paths();
    let n = paths.len();
    let node = |i: usize| d.at(&paths[i]).expect("own path");
    let pos_of: BTreeMap<&NodePath, usize> = paths.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let parent = |i: usize| -> Option<(usize, usize)> {
        let p = &paths[i].0;
        let (&last, init) = p.split_last()?;
        Some((pos_of[&NodePath(init.to_vec())], last))
    };
    let binder = |i: usize| -> Option<usize> {
        let label = node(i).assumption_label()??;
        let p = &paths[i].0;
        for k in (0..p.len()).rev() {
            let anc = d.at(&NodePath(p[..k].to_vec())).expect("prefix");
            if anc.binds_in(p[k]) == Some(label) {
                return Some(pos_of[&NodePath(p[..k].to_vec())]);
            }
        }
        None
    };
    let majors = |i: usize| -> usize {
        match node(i).rule() {
            ns4::Rule::BoxI { majors, .. } => majors.len(),
            _ => 0,
        }
    };

    let mut link = vec![vec![false; n]; n];
    for a in 0..n {
        let Some((p, pos)) = parent(a) else { continue };
        let pk = node(p).kind().name();
        if pk == "orE" && pos > 0 {
            link[a][p] = true;
        }
        if pk == "boxI" && pos < majors(p) {
            for b in 0..n {
                if node(b).is_assumption() && binder(b) == Some(p) && node(b).conclusion() == node(a).conclusion() {
                    link[a][b] = true;
                }
            }
        }
    }

    let mut reach = link.clone();
    for k in 0..n {
        for i in 0..n {
            if reach[i][k] {
                for j in 0..n {
                    if reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    assert!((0..n).all(|i| !reach[i][i]), "link relation has a cycle");

    let mut segments = Vec::new();
    fn walk(i: usize, link: &[Vec<bool>], acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        acc.push(i);
        let next: Vec<usize> = (0..link.len()).filter(|&j| link[i][j]).collect();
        if next.is_empty() {
            out.push(acc.clone());
        }
        for j in next {
            walk(j, link, acc, out);
        }
        acc.pop();
    }
    for s in 0..n {
        if (0..n).any(|j| link[j][s]) {
            continue;
        }
        walk(s, &link, &mut Vec::new(), &mut segments);
    }
    for seg in &segments {
        assert!(seg.windows(2).all(|w| reach[w[0]][w[1]]));
    }

    let is_maximal = |seg: &Vec<usize>| {
        let first = node(seg[0]).kind().name();
        let starts = INTRODUCTIONS.contains(&first) || first == "botC";
        let ends = parent(*seg.last().expect("non-empty"))
            .is_some_and(|(p, pos)| pos == 0 && ELIMINATIONS.contains(&node(p).kind().name()));
        starts && ends
    };
    let maximal: Vec<&Vec<usize>> = segments.iter().filter(|s| is_maximal(s)).collect();
    let seg_degree = |s: &Vec<usize>| formula_degree(node(s[0]).conclusion());
    let degree = maximal.iter().map(|s| seg_degree(s)).max().unwrap_or(0);
    let index = if degree == 0 {
        Index::default()
    } else {
        Index {
            degree,
            sum: maximal.iter().filter(|s| seg_degree(s) == degree).map(|s| s.len()).sum(),
        }
    };

    let to_paths = |s: &Vec<usize>| s.iter().map(|&i| paths[i].clone()).collect::<Vec<_>>();
    let mut seg_paths: Vec<Vec<NodePath>> = segments.iter().map(to_paths).collect();
    let mut max_paths: Vec<Vec<NodePath>> = maximal.iter().map(|s| to_paths(s)).collect();
    seg_paths.sort();
    max_paths.sort();
    OracleView {
        segments: seg_paths,
        maximal: max_paths,
        degree,
        index,
    }
}

/// The library's view in the same shape as [`oracle`].
pub fn library_view(d: &Derivation) -> OracleView {
    let mut segments: Vec<Vec<NodePath>> = ns4::analysis::segments(d).into_iter().map(|s| s.occurrences).collect();
    let mut maximal: Vec<Vec<NodePath>> = ns4::analysis::maximal_segments(d)
        .into_iter()
        .map(|s| s.occurrences)
        .collect();
    segments.sort();
    maximal.sort();
    OracleView {
        segments,
        maximal,
        degree: ns4::analysis::derivation_degree(d),
        index: ns4::analysis::index(d),
    }
}
