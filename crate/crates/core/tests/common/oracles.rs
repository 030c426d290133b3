//! Brute-force reference implementations, independent of the library.

use std::collections::{BTreeSet, VecDeque};

pub const ALPHABET: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

/// First class with a method, else the default method, else nothing.
pub fn s3_select(classes: &[usize], methods: &BTreeSet<usize>, default: bool) -> Option<String> {
    for c in classes {
        if methods.contains(c) {
            return Some(ALPHABET[*c].to_string());
        }
    }
    default.then(|| "default".to_string())
}

/// A generic `g` whose methods return their own class name, applied to an
/// object with the given class vector.
pub fn s3_program(classes: &[usize], methods: &BTreeSet<usize>, default: bool) -> String {
    let mut src = String::from("g <- function(x) UseMethod(\"g\")\n");
    for m in methods {
        src.push_str(&format!("g.{0} <- function(x) \"{0}\"\n", ALPHABET[*m]));
    }
    if default {
        src.push_str("g.default <- function(x) \"default\"\n");
    }
    let cv: Vec<String> = classes.iter().map(|c| format!("\"{}\"", ALPHABET[*c])).collect();
    src.push_str(&format!("g(structure(0, class = c({})))", cv.join(", ")));
    src
}

/// Acyclic hierarchy: class `i` contains only classes `j < i`.
#[derive(Debug, Clone)]
pub struct Hierarchy {
    pub supers: Vec<Vec<usize>>,
}

impl Hierarchy {
    /// Class name for index `i`; one past the last class stands for ANY.
    pub fn label(&self, i: usize) -> String {
        if i == self.supers.len() {
            "ANY".to_string()
        } else {
            format!("K{i}")
        }
    }

    /// Breadth-first distances from `from`; `None` marks unreachable classes.
    pub fn distances(&self, from: usize) -> Vec<Option<usize>> {
        let mut d = vec![None; self.supers.len()];
        d[from] = Some(0);
        let mut queue = VecDeque::from([from]);
        while let Some(c) = queue.pop_front() {
            for &s in &self.supers[c] {
                if d[s].is_none() {
                    d[s] = Some(d[c].unwrap() + 1);
                    queue.push_back(s);
                }
            }
        }
        d
    }
}

#[derive(Debug, PartialEq)]
pub enum Selection {
    Method(Vec<usize>),
    Ambiguous,
    NoMethod,
}

/// Scores every method by (sum, tuple) of per-argument distances. ANY is as
/// far as the number of classes reachable from the argument's class.
pub fn s4_select(h: &Hierarchy, methods: &[Vec<usize>], actual: &[usize]) -> Selection {
    let any = h.supers.len();
    let mut scored = Vec::new();
    for sig in methods {
        let mut tuple = Vec::new();
        for (a, s) in actual.iter().zip(sig) {
            let d = h.distances(*a);
            let dist = if *s == any { Some(d.iter().flatten().count()) } else { d[*s] };
            match dist {
                Some(x) => tuple.push(x),
                None => break,
            }
        }
        if tuple.len() == actual.len() {
            scored.push((tuple.iter().sum::<usize>(), tuple, sig.clone()));
        }
    }
    scored.sort();
    match scored.as_slice() {
        [] => Selection::NoMethod,
        [(s0, t0, _), (s1, t1, _), ..] if s0 == s1 && t0 == t1 => Selection::Ambiguous,
        [(_, _, sig), ..] => Selection::Method(sig.clone()),
    }
}

/// Defines the hierarchy and a generic `g` whose methods return their
/// signature, then calls it on fresh instances of `actual`.
pub fn s4_program(h: &Hierarchy, methods: &[Vec<usize>], actual: &[usize]) -> String {
    let quoted = |xs: &[usize]| xs.iter().map(|i| format!("\"{}\"", h.label(*i))).collect::<Vec<_>>().join(", ");
    let formals: Vec<String> = (0..actual.len()).map(|i| format!("a{i}")).collect();
    let mut src = String::new();
    for (i, s) in h.supers.iter().enumerate() {
        src.push_str(&format!("set_class(\"{}\", contains = c({}))\n", h.label(i), quoted(s)));
    }
    src.push_str(&format!("set_generic(\"g\", function({}) standard_generic(\"g\"))\n", formals.join(", ")));
    for sig in methods {
        src.push_str(&format!(
            "set_method(\"g\", c({}), function({}) \"{}\")\n",
            quoted(sig),
            formals.join(", "),
            signature_text(h, sig)
        ));
    }
    let args: Vec<String> = actual.iter().map(|a| format!("new(\"{}\")", h.label(*a))).collect();
    src.push_str(&format!("g({})", args.join(", ")));
    src
}

pub fn signature_text(h: &Hierarchy, sig: &[usize]) -> String {
    sig.iter().map(|i| h.label(*i)).collect::<Vec<_>>().join(",")
}

/// Standalone xorshift64* seeded through splitmix64, written from the
/// published constants.
pub struct Xorshift(u64);

impl Xorshift {
    pub fn seeded(seed: i64) -> Self {
        let mut z = (seed as u64).wrapping_add(0x9E3779B97F4A7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        z ^= z >> 31;
        Xorshift(if z == 0 { 0x9E3779B97F4A7C15 } else { z })
    }

    pub fn uniform(&mut self) -> f64 {
        let mut x = self.0;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.0 = x;
        (x.wrapping_mul(2685821657736338717) >> 11) as f64 / 9007199254740992.0
    }
}

/// SimplePop trajectory: each generation draws one uniform per individual
/// for births, then one per individual for deaths.
pub fn simplepop_trajectory(seed: i64, birth: f64, death: f64, size: f64, generations: usize) -> Vec<f64> {
    let mut rng = Xorshift::seeded(seed);
    let mut sizes = vec![size];
    for _ in 0..generations {
        let n = *sizes.last().unwrap() as usize;
        let births = (0..n).filter(|_| rng.uniform() < birth).count();
        let deaths = (0..n).filter(|_| rng.uniform() < death).count();
        sizes.push((n + births - deaths) as f64);
    }
    sizes
}
