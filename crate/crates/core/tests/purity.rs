use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use mls::purity::{self, AnalysisReport, PurityTable, ReasonKind, Status};
use mls::{ModuleUnit, Strategy};

fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn sources(dir: &Path, out: &mut Vec<PathBuf>) {
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    entries.sort();
    for p in entries {
        if p.is_dir() {
            sources(&p, out);
        } else if p.extension().is_some_and(|x| x == "mls") {
            out.push(p);
        }
    }
}

struct Label {
    module: String,
    function: String,
    status: Status,
    kinds: BTreeSet<ReasonKind>,
}

fn load_corpus() -> (Vec<ModuleUnit>, Vec<Label>) {
    let mut files = Vec::new();
    sources(&corpus(), &mut files);
    let mut modules = Vec::new();
    let mut labels = Vec::new();
    for f in files {
        let text = std::fs::read_to_string(&f).unwrap();
        let name = f.file_stem().unwrap().to_string_lossy().into_owned();
        for line in text.lines() {
            let Some(rest) = line.trim().strip_prefix("# expect:") else { continue };
            let words: Vec<&str> = rest.split_whitespace().collect();
            labels.push(Label {
                module: name.clone(),
                function: words[0].to_string(),
                status: Status::parse(words[1]).unwrap_or_else(|| panic!("bad status in {line}")),
                kinds: words[2..].iter().map(|k| ReasonKind::parse(k).unwrap_or_else(|| panic!("bad kind in {line}"))).collect(),
            });
        }
        modules.push(ModuleUnit::parse(&name, &text).unwrap_or_else(|e| panic!("{}: {e}", f.display())));
    }
    (modules, labels)
}

fn analyze(modules: &[ModuleUnit]) -> AnalysisReport {
    purity::analyze(modules, &PurityTable::standard(), Strategy::Parallel)
}

#[test]
fn hand_labels_agree_with_the_analyzer() {
    let (modules, labels) = load_corpus();
    let report = analyze(&modules);
    assert!(labels.len() >= 20);
    let mut mismatches = Vec::new();
    for l in &labels {
        let Some(f) = report.function(&l.module, &l.function) else {
            mismatches.push(format!("{}::{} missing", l.module, l.function));
            continue;
        };
        let kinds: BTreeSet<ReasonKind> = f.reasons.iter().map(|r| r.kind).collect();
        if f.status != l.status || kinds != l.kinds {
            mismatches.push(format!("{}::{}: got {:?} {:?}", l.module, l.function, f.status, kinds));
        }
    }
    assert!(mismatches.is_empty(), "{mismatches:#?}");
}

#[test]
fn labels_cover_every_reason_kind_and_functional() {
    let (_, labels) = load_corpus();
    let kinds: BTreeSet<ReasonKind> = labels.iter().flat_map(|l| l.kinds.iter().copied()).collect();
    assert_eq!(kinds.len(), ReasonKind::ALL.len());
    assert!(labels.iter().any(|l| l.status == Status::Functional));
}

#[test]
fn factorial_module_is_functional() {
    let (modules, _) = load_corpus();
    let report = analyze(&modules);
    for f in ["factorial", "fact_odd", "fact_even"] {
        assert_eq!(report.function("factorial", f).unwrap().status, Status::Functional, "{f}");
    }
}

#[test]
fn simplepop_methods() {
    let (modules, _) = load_corpus();
    let report = analyze(&modules);
    let evolve = report.function("simplepop", "SimplePop$evolve").unwrap();
    assert_eq!(evolve.status, Status::Nonfunctional);
    let kinds: BTreeSet<ReasonKind> = evolve.reasons.iter().map(|r| r.kind).collect();
    assert_eq!(kinds, BTreeSet::from([ReasonKind::RngDependence, ReasonKind::NonlocalAssignment]));
    assert_eq!(report.function("simplepop", "SimplePop$current").unwrap().status, Status::Functional);
}

#[test]
fn strategies_and_repeated_runs_agree() {
    let (modules, _) = load_corpus();
    let table = PurityTable::standard();
    let a = purity::analyze(&modules, &table, Strategy::Parallel).to_json_string();
    let b = purity::analyze(&modules, &table, Strategy::Sequential).to_json_string();
    let c = purity::analyze(&modules, &table, Strategy::Parallel).to_json_string();
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn json_keys_are_sorted() {
    let (modules, _) = load_corpus();
    let json = analyze(&modules).to_json();
    fn check(v: &serde_json::Value) {
        match v {
            serde_json::Value::Object(m) => {
                let keys: Vec<&String> = m.keys().collect();
                let mut sorted = keys.clone();
                sorted.sort();
                assert_eq!(keys, sorted);
                m.values().for_each(check);
            }
            serde_json::Value::Array(a) => a.iter().for_each(check),
            _ => {}
        }
    }
    check(&json);
}
