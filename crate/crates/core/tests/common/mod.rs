#![allow(dead_code)]

use mls::{Interpreter, Value};

/// Runs a script, returning printed output or the error text.
pub fn run(src: &str) -> Result<String, String> {
    let (mut interp, out) = Interpreter::capturing();
    let r = interp.run_script(src);
    interp.flush();
    r.map(|_| out.take()).map_err(|e| e.to_string())
}

pub fn value(src: &str) -> Value {
    let mut interp = Interpreter::new();
    interp.eval_source(src).unwrap_or_else(|e| panic!("{src}: {e}"))
}

pub fn error(src: &str) -> String {
    let mut interp = Interpreter::new();
    match interp.eval_source(src) {
        Ok(v) => panic!("expected an error from {src:?}, got {v:?}"),
        Err(e) => e.to_string(),
    }
}

pub fn doubles(src: &str) -> Vec<f64> {
    match value(src).data {
        mls::Data::Double(d) => d.to_vec(),
        mls::Data::Integer(i) => i.iter().map(|x| *x as f64).collect(),
        other => panic!("{src}: not a numeric vector: {other:?}"),
    }
}

pub fn strings(src: &str) -> Vec<String> {
    let v = value(src);
    match v.as_strings() {
        Some(s) => s.to_vec(),
        None => panic!("{src}: not a character vector: {v:?}"),
    }
}

pub fn logicals(src: &str) -> Vec<bool> {
    match value(src).data {
        mls::Data::Logical(b) => b.to_vec(),
        other => panic!("{src}: not a logical vector: {other:?}"),
    }
}

pub mod oracles;
pub mod programs;

/// Evaluates `p.call` after `p.setup`; returns whether the call succeeded and
/// the names of bindings it changed in environments that existed before it.
pub fn locality(p: &programs::Program) -> (bool, Vec<String>) {
    let mut interp = Interpreter::new();
    interp.eval_source(&p.setup).unwrap_or_else(|e| panic!("{}: {e}", p.setup));
    let before = interp.snapshot_all();
    let ok = interp.eval_source(&p.call).is_ok();
    let after = interp.snapshot_all();
    let mut changed = Vec::new();
    for b in &before {
        match after.iter().find(|a| a.env_id == b.env_id) {
            Some(a) => changed.extend(b.diff(a).into_iter().map(|n| format!("env {}: {n}", b.env_id))),
            None => changed.push(format!("env {} disappeared", b.env_id)),
        }
    }
    (ok, changed)
}
