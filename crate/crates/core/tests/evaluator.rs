mod common;

use common::oracles::Xorshift;
use common::{doubles, error, run, strings, value};
use mls::{Interpreter, Kind};

#[test]
fn arithmetic_and_factorial() {
    assert_eq!(doubles("1 + 2"), [3.0]);
    let src = "factorial <- function(x) if (x > 0) x * factorial(x - 1) else 1\nfactorial(5)";
    assert_eq!(doubles(src), [120.0]);
}

#[test]
fn modifying_an_argument_duplicates_it() {
    let src = "f <- function(x) { x[1] <- 99; x }\ny <- c(1, 2, 3)\nz <- f(y)\ny";
    assert_eq!(doubles(src), [1.0, 2.0, 3.0]);
    assert_eq!(doubles("f <- function(x) { x[1] <- 99; x }\nf(c(1, 2, 3))"), [99.0, 2.0, 3.0]);
}

#[test]
fn argument_matching() {
    assert_eq!(doubles("f <- function(x, y = 2) c(x, y)\nf(10)"), [10.0, 2.0]);
    assert_eq!(doubles("f <- function(x, y) c(x, y)\nf(y = 5, 4)"), [4.0, 5.0]);
    assert!(error("f <- function(x) x\nf(z = 1)").contains("unused argument"));
    assert!(error("f <- function(x) x\nf(x = 1, x = 2)").contains("matched by multiple arguments"));
    assert!(error("f <- function(x) x\nf()").contains("argument \"x\" is missing, with no default"));
}

#[test]
fn defaults_may_refer_to_other_formals() {
    assert_eq!(doubles("f <- function(x, y = x * 2) y\nf(4)"), [8.0]);
}

#[test]
fn local_assignment_leaves_outer_binding() {
    let src = "x <- 1\nf <- function() { x <- 2; x }\nf()\nx";
    assert_eq!(doubles(src), [1.0]);
    assert_eq!(doubles("x <- 1\nx <- 2\nx"), [2.0]);
}

#[test]
fn environments_are_shared_not_copied() {
    let src = "e <- new_env()\ne2 <- e\nassign(\"v\", 5, e2)\nget(\"v\", e)";
    assert_eq!(doubles(src), [5.0]);
}

#[test]
fn superassignment_counter() {
    let src = "make <- function() { n <- 0; function() { n <<- n + 1; n } }\nc1 <- make()\nc(c1(), c1(), c1())";
    assert_eq!(doubles(src), [1.0, 2.0, 3.0]);
    assert_eq!(doubles("f <- function() fresh <<- 7\nf()\nfresh"), [7.0]);
    assert_eq!(doubles("top <<- 3\ntop"), [3.0]);
}

#[test]
fn unforced_arguments_never_raise() {
    assert_eq!(doubles("g <- function(a, b) a\ng(1, stop(\"boom\"))"), [1.0]);
    assert_eq!(doubles("g <- function(a, b = stop(\"boom\")) a\ng(2)"), [2.0]);
}

#[test]
fn promises_are_forced_once() {
    let src = "n <- 0\ntick <- function() { n <<- n + 1; 1 }\nk <- function(x) x + x + x\nk(tick())\nn";
    assert_eq!(doubles(src), [1.0]);
}

#[test]
fn options_read_back() {
    assert_eq!(doubles("options(\"tol\", 1e-8)\nget_option(\"tol\")"), [1e-8]);
    assert_eq!(value("get_option(\"unset\")").kind(), Kind::Null);
}

#[test]
fn foreign_stubs() {
    assert_eq!(doubles("foreign(\"identity\", c(1, 2))"), [1.0, 2.0]);
    assert!(error("foreign(\"nope\")").contains("nope"));
}

#[test]
fn unbound_symbols_report_a_location() {
    let e = error("x <- 1\ny <- undefined_thing + 1");
    assert!(e.contains("2:"), "{e}");
    assert!(e.contains("undefined_thing"), "{e}");
}

#[test]
fn non_function_callee() {
    assert!(error("x <- 1\nx(2)").contains("function"));
}

#[test]
fn printing_of_top_level_values() {
    assert_eq!(run("x <- 3\nx\nc(1.5, 2)\n\"a\"").unwrap(), "[1] 3\n[1] 1.5 2.0\n[1] \"a\"\n");
    assert_eq!(run("invisible(4)").unwrap(), "");
}

#[test]
fn strings_and_paste() {
    assert_eq!(strings("paste(\"a\", 1:2, sep = \"-\")"), ["a-1", "a-2"]);
}

#[test]
fn rng_matches_standalone_generator() {
    for seed in [42, 0, -1, 7, i64::MAX] {
        let mut o = Xorshift::seeded(seed);
        let expected: Vec<f64> = (0..5).map(|_| o.uniform()).collect();
        assert_eq!(doubles(&format!("set_seed({seed})\nrng_draw(5)")), expected, "seed {seed}");
    }
}

#[test]
fn rng_state_lives_in_random_seed() {
    let mut interp = Interpreter::new();
    interp.eval_source("set_seed(3)").unwrap();
    let before = interp.rng_state().unwrap();
    assert_eq!(interp.eval_source("length(rng_draw(0))").unwrap().scalar_f64(), Some(0.0));
    assert_eq!(interp.rng_state(), Some(before));
    interp.eval_source("rng_draw(2)").unwrap();
    assert_ne!(interp.rng_state(), Some(before));
    assert!(interp.eval_source("rng_draw(-1)").is_err());
    let a = interp.eval_source("set_seed(9)\nrng_draw(5)").unwrap();
    let b = interp.eval_source("set_seed(9)\nrng_draw(5)").unwrap();
    assert!(mls::value::identical(&a, &b));
}

#[test]
fn snapshots_unchanged_by_local_modification() {
    let mut interp = Interpreter::new();
    interp.eval_source("x <- c(1, 2)\nf <- function(v) { v[2] <- 0; sum(v) }").unwrap();
    let before = interp.snapshot_all();
    interp.eval_source("f(x)").unwrap();
    let after = interp.snapshot_all();
    for (b, a) in before.iter().zip(&after) {
        assert!(b.diff(a).is_empty());
    }
}
