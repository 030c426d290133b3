mod common;

use common::{locality, programs};
use mls::reader::{deparse, parse_expr, parse_program};
use mls::value::identical;
use mls::{Interpreter, Value};
use proptest::prelude::*;

fn ident() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["x", "y", "total", ".hidden", "a.b", "f"]).prop_map(str::to_string)
}

fn leaf() -> impl Strategy<Value = String> {
    prop_oneof![
        (0u32..1000).prop_map(|n| n.to_string()),
        (0u32..100, 1u32..100).prop_map(|(a, b)| format!("{a}.{b}")),
        "[a-z ]{0,6}".prop_map(|s| format!("\"{s}\"")),
        ident(),
        Just("TRUE".to_string()),
        Just("NULL".to_string()),
    ]
}

/// Source text for random expressions over the whole surface syntax.
fn expr_text() -> impl Strategy<Value = String> {
    leaf().prop_recursive(4, 48, 3, |inner| {
        let op = prop::sample::select(vec!["+", "-", "*", "/", "^", "==", "<", ">=", "&&", "||", ":"]);
        prop_oneof![
            (inner.clone(), op, inner.clone()).prop_map(|(a, o, b)| format!("({a} {o} {b})")),
            inner.clone().prop_map(|a| format!("-{a}")),
            inner.clone().prop_map(|a| format!("!{a}")),
            (ident(), prop::collection::vec(inner.clone(), 0..3)).prop_map(|(f, args)| format!("{f}({})", args.join(", "))),
            (ident(), inner.clone()).prop_map(|(n, v)| format!("g({n} = {v})")),
            (ident(), inner.clone()).prop_map(|(x, i)| format!("{x}[{i}]")),
            (ident(), ident()).prop_map(|(x, f)| format!("{x}${f}")),
            (ident(), inner.clone()).prop_map(|(x, v)| format!("({x} <- {v})")),
            (ident(), inner.clone()).prop_map(|(x, v)| format!("({x} <<- {v})")),
            (inner.clone(), inner.clone(), inner.clone()).prop_map(|(c, a, b)| format!("if ({c}) {a} else {b}")),
            (inner.clone(), inner.clone()).prop_map(|(c, a)| format!("while ({c}) {a}")),
            prop::collection::vec(inner.clone(), 1..3).prop_map(|es| format!("{{\n{}\n}}", es.join("\n"))),
            (ident(), inner.clone()).prop_map(|(x, b)| format!("function({x}, k = 1) {b}")),
        ]
    })
}

proptest! {
    #[test]
    fn deparse_round_trips(src in expr_text()) {
        let e = parse_expr(&src).map_err(|err| TestCaseError::fail(format!("{src}: {err}")))?;
        let text = deparse(&e);
        let back = parse_expr(&text).map_err(|err| TestCaseError::fail(format!("{text}: {err}")))?;
        prop_assert_eq!(e, back, "deparsed as {}", text);
    }

    #[test]
    fn generated_programs_round_trip(seed in any::<u64>()) {
        let p = programs::program(seed);
        for e in parse_program(&p.setup).unwrap() {
            let back = parse_expr(&deparse(&e)).unwrap();
            prop_assert_eq!(e, back);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn pure_calls_change_no_existing_binding(seed in any::<u64>()) {
        let p = programs::program(seed);
        let (_, changed) = locality(&p);
        prop_assert!(changed.is_empty(), "{}\n{}\nchanged: {:?}", p.setup, p.call, changed);
    }
}

#[test]
fn generated_programs_mostly_run() {
    let ok = (0..200).filter(|s| locality(&programs::program(*s)).0).count();
    assert!(ok >= 150, "only {ok} of 200 generated calls succeeded");
}

fn value_tree() -> impl Strategy<Value = Value> {
    let leaf = prop_oneof![
        prop::collection::vec(-1e6f64..1e6, 0..4).prop_map(Value::doubles),
        prop::collection::vec("[a-z]{0,3}", 0..3).prop_map(Value::strings),
        prop::collection::vec(any::<bool>(), 0..3).prop_map(Value::logicals),
        Just(Value::null()),
    ];
    leaf.prop_recursive(3, 24, 4, |inner| {
        prop_oneof![
            prop::collection::vec(inner.clone(), 0..4).prop_map(Value::list),
            prop::collection::vec(("[a-z]{1,3}", inner), 1..4).prop_map(Value::named_list),
        ]
    })
}

proptest! {
    #[test]
    fn deep_copy_is_identical(v in value_tree()) {
        prop_assert!(identical(&v, &v.deep_copy()));
    }

    #[test]
    fn class_attribute_round_trips(v in value_tree(), classes in prop::collection::vec("[a-z]{1,4}", 1..4)) {
        prop_assume!(!v.is_null());
        let tagged = v.clone().set_attribute("class", Value::strings(classes.clone())).unwrap();
        prop_assert_eq!(tagged.class_attribute().map(<[String]>::to_vec), Some(classes));
        let cleared = tagged.set_attribute("class", Value::null()).unwrap();
        prop_assert!(cleared.class_attribute().is_none());
        prop_assert!(identical(&cleared, &v));
    }

    #[test]
    fn names_attribute_round_trips(xs in prop::collection::vec(-10f64..10.0, 1..5)) {
        let names: Vec<String> = (0..xs.len()).map(|i| format!("n{i}")).collect();
        let v = Value::doubles(xs).set_attribute("names", Value::strings(names.clone())).unwrap();
        prop_assert_eq!(v.names(), Some(names));
    }

    #[test]
    fn pure_expressions_are_deterministic(seed in any::<u64>()) {
        let p = programs::program(seed);
        let run = || {
            let mut interp = Interpreter::new();
            interp.eval_source(&p.setup).unwrap();
            interp.eval_source(&p.call).map_err(|e| e.to_string())
        };
        match (run(), run()) {
            (Ok(a), Ok(b)) => prop_assert!(identical(&a, &b)),
            (a, b) => prop_assert_eq!(a.err(), b.err()),
        }
    }
}
