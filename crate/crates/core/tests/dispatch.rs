mod common;

use common::oracles::{self, Hierarchy, Selection};
use common::{doubles, error, logicals, run, strings, value};
use mls::Interpreter;
use proptest::prelude::*;

#[test]
fn s3_direct_inherited_and_default() {
    let defs = "show <- function(x) UseMethod(\"show\")\nshow.lm <- function(x) \"lm\"\nshow.default <- function(x) \"default\"\n";
    assert_eq!(strings(&format!("{defs}show(structure(1, class = \"lm\"))")), ["lm"]);
    assert_eq!(strings(&format!("{defs}show(structure(1, class = c(\"glm\", \"lm\")))")), ["lm"]);
    assert_eq!(strings(&format!("{defs}show(structure(1, class = \"mystery\"))")), ["default"]);
    let e = error("g <- function(x) UseMethod(\"g\")\ng(structure(1, class = \"zz\"))");
    assert!(e.contains("no applicable method for 'g' applied to class"), "{e}");
}

#[test]
fn s3_dispatch_is_instance_based() {
    let objs = "a <- structure(1, class = c(\"POSIXt\", \"POSIXct\"))\nb <- structure(2, class = c(\"POSIXt\", \"POSIXlt\"))\n";
    let shared = "fmt <- function(x) UseMethod(\"fmt\")\nfmt.POSIXt <- function(x) \"POSIXt\"\n";
    assert_eq!(strings(&format!("{objs}{shared}c(fmt(a), fmt(b))")), ["POSIXt", "POSIXt"]);
    let split = "part <- function(x) UseMethod(\"part\")\npart.POSIXct <- function(x) \"ct\"\npart.POSIXlt <- function(x) \"lt\"\n";
    assert_eq!(strings(&format!("{objs}{split}c(part(a), part(b))")), ["ct", "lt"]);
}

#[test]
fn inherits_uses_class_vector_or_implicit_class() {
    let obj = "x <- structure(1, class = c(\"glm\", \"lm\"))\n";
    assert_eq!(logicals(&format!("{obj}inherits(x, \"lm\")")), [true]);
    assert_eq!(logicals(&format!("{obj}inherits(x, \"aov\")")), [false]);
    assert_eq!(logicals("inherits(2.5, \"numeric\")"), [true]);
}

#[test]
fn s3_binary_operators() {
    let defs = "\"+.money\" <- function(e1, e2) \"money\"\nm <- structure(1, class = \"money\")\n";
    assert_eq!(strings(&format!("{defs}m + 1")), ["money"]);
    assert_eq!(strings(&format!("{defs}1 + m")), ["money"]);
    let mut interp = Interpreter::new();
    let v = interp.eval_source(&format!("{defs}m + m")).unwrap();
    assert_eq!(v.as_strings(), Some(&["money".to_string()][..]));
    assert!(interp.take_warnings().is_empty());

    let clash = "\"+.a\" <- function(e1, e2) \"a\"\n\"+.b\" <- function(e1, e2) \"b\"\nstructure(1, class = \"a\") + structure(1, class = \"b\")";
    let mut interp = Interpreter::new();
    let v = interp.eval_source(clash).unwrap();
    assert_eq!(v.as_strings(), Some(&["a".to_string()][..]));
    assert_eq!(interp.take_warnings().len(), 1);
}

const AB: &str = "set_class(\"A\", slots = list(x = \"numeric\"))\nset_class(\"B\", slots = list(y = \"numeric\"), contains = \"A\")\n";

#[test]
fn s4_class_definition() {
    assert_eq!(strings(&format!("{AB}names(slot(get_class(\"B\"), \"slots\"))")), ["y", "x"]);
    assert_eq!(value(&format!("{AB}class_distance(\"B\", \"B\")")).scalar_f64(), Some(0.0));
    assert_eq!(value(&format!("{AB}class_distance(\"B\", \"A\")")).scalar_f64(), Some(1.0));
    assert!(value(&format!("{AB}class_distance(\"A\", \"B\")")).is_null());
    let cycle = error("set_class(\"P\")\nset_class(\"Q\", contains = \"P\")\nset_class(\"P\", contains = \"Q\")");
    assert!(cycle.contains("cycle") || cycle.contains("contain"), "{cycle}");
    assert!(error(&format!("{AB}set_class(\"C\", slots = list(x = \"numeric\"), contains = \"B\")")).contains("duplicate slot"));
}

#[test]
fn s4_instances() {
    assert_eq!(doubles(&format!("{AB}b <- new(\"B\", x = 1, y = 2)\nc(slot(b, \"x\"), slot(b, \"y\"))")), [1.0, 2.0]);
    let e = error(&format!("{AB}new(\"B\", x = \"oops\", y = 2)"));
    assert!(e.contains("numeric"), "{e}");
    assert_eq!(value(&format!("{AB}length(slot(new(\"B\", y = 2), \"x\"))")).scalar_f64(), Some(0.0));
}

#[test]
fn s4_selection_examples() {
    let base = format!("{AB}set_generic(\"g\", function(x) standard_generic(\"g\"))\n");
    assert_eq!(strings(&format!("{base}set_method(\"g\", \"ANY\", function(x) \"any\")\ng(3)")), ["any"]);
    let two = format!("{base}set_method(\"g\", \"A\", function(x) \"A\")\nset_method(\"g\", \"ANY\", function(x) \"any\")\n");
    assert_eq!(strings(&format!("{two}g(new(\"B\", x = 1, y = 2))")), ["A"]);

    let three = "set_class(\"A\")\nset_class(\"C\")\nset_generic(\"h\", function(a, b) standard_generic(\"h\"))\n\
        set_method(\"h\", c(\"A\", \"ANY\"), function(a, b) \"A,ANY\")\n\
        set_method(\"h\", c(\"ANY\", \"A\"), function(a, b) \"ANY,A\")\n\
        set_method(\"h\", c(\"A\", \"A\"), function(a, b) \"A,A\")\n";
    assert_eq!(strings(&format!("{three}h(new(\"A\"), new(\"A\"))")), ["A,A"]);
    assert_eq!(strings(&format!("{three}h(new(\"A\"), new(\"C\"))")), ["A,ANY"]);
}

#[test]
fn s4_ambiguity_and_no_method() {
    let src = "set_class(\"A\")\nset_class(\"B\")\nset_class(\"AB\", contains = c(\"A\", \"B\"))\n\
        set_generic(\"g\", function(x) standard_generic(\"g\"))\n\
        set_method(\"g\", \"A\", function(x) 1)\nset_method(\"g\", \"B\", function(x) 2)\n";
    let e = error(&format!("{src}g(new(\"AB\"))"));
    assert!(e.contains("ambiguous"), "{e}");
    let e = error("set_class(\"A\")\nset_generic(\"g\", function(x) standard_generic(\"g\"))\nset_method(\"g\", \"A\", function(x) 1)\ng(2)");
    assert!(e.contains("unable to find an inherited method"), "{e}");
}

#[test]
fn s4_generic_falls_back_to_s3() {
    let src = "describe <- function(x) UseMethod(\"describe\")\ndescribe.thing <- function(x) \"s3 thing\"\n\
        set_generic(\"describe\")\n\
        set_class(\"Box\")\nset_method(\"describe\", \"Box\", function(x) \"s4 box\")\n\
        c(describe(new(\"Box\")), describe(structure(1, class = \"thing\")))";
    assert_eq!(strings(src), ["s4 box", "s3 thing"]);
}

#[test]
fn s4_leaves_non_dispatch_arguments_unforced() {
    let src = "set_class(\"A\")\nset_generic(\"g\", function(x, y) standard_generic(\"g\"), signature = \"x\")\n\
        set_method(\"g\", \"A\", function(x, y) \"ok\")\ng(new(\"A\"), stop(\"never\"))";
    assert_eq!(strings(src), ["ok"]);
}

#[test]
fn shapes_corpus_output() {
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../corpus/shapes.mls")).unwrap();
    let out = run(&src).unwrap();
    assert!(out.contains("rectangles: compare corners"), "{out}");
    assert!(out.starts_with("[1] 3.141593 6.000000 4.000000\n"), "{out}");
}

proptest! {
    #[test]
    fn use_method_matches_first_match_scan(
        classes in prop::collection::vec(0usize..6, 1..=4),
        methods in prop::collection::btree_set(0usize..6, 0..=6),
        default in any::<bool>(),
    ) {
        let got = Interpreter::new().eval_source(&oracles::s3_program(&classes, &methods, default));
        match oracles::s3_select(&classes, &methods, default) {
            Some(name) => prop_assert_eq!(got.unwrap().as_strings().unwrap().to_vec(), vec![name]),
            None => prop_assert!(got.unwrap_err().to_string().contains("no applicable method")),
        }
    }
}

fn s4_case() -> impl Strategy<Value = (Hierarchy, Vec<Vec<usize>>, Vec<usize>)> {
    (1usize..=6, 1usize..=3).prop_flat_map(|(n, arity)| {
        let supers = (0..n).map(|i| prop::collection::btree_set(0..i.max(1), 0..=i.min(3))).collect::<Vec<_>>();
        let methods = prop::collection::btree_set(prop::collection::vec(0..=n, arity), 1..=8);
        let actual = prop::collection::vec(0..n, arity);
        (supers, methods, actual).prop_map(|(supers, methods, actual)| {
            let supers = supers.into_iter().enumerate().map(|(i, s)| s.into_iter().filter(|j| *j < i).collect()).collect();
            (Hierarchy { supers }, methods.into_iter().collect(), actual)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn select_method_matches_bfs_brute_force((h, methods, actual) in s4_case()) {
        let got = Interpreter::new().eval_source(&oracles::s4_program(&h, &methods, &actual));
        match oracles::s4_select(&h, &methods, &actual) {
            Selection::Method(sig) => {
                let v = got.map_err(|e| TestCaseError::fail(e.to_string()))?;
                prop_assert_eq!(v.as_strings().unwrap().to_vec(), vec![oracles::signature_text(&h, &sig)]);
            }
            Selection::Ambiguous => prop_assert!(got.unwrap_err().to_string().contains("ambiguous")),
            Selection::NoMethod => prop_assert!(got.unwrap_err().to_string().contains("unable to find an inherited method")),
        }
    }
}
