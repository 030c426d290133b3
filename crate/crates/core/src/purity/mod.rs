//! Functional-validity analysis: certify each module function as
//! functional, refute it with located reasons, or declare it uncertifiable.
//!
//! The pipeline is scan (per function, syntactic) → resolve (names against
//! the module, its imports and the base table) → propagate (bottom-up over
//! strongly connected components of the call graph) → remediate.

mod graph;
mod remedy;
mod report;
mod resolve;
pub mod scan;
pub mod table;

use std::fmt;

use crate::module::ModuleUnit;
use crate::par::{self, Strategy};
use crate::reader::Loc;

pub use graph::propagate;
pub use remedy::suggest_remediation;
pub use report::{AnalysisReport, FunctionReport, ModuleReport, Summary};
pub use resolve::{resolve_names, FunctionId, ResolvedFacts};
pub use scan::{scan_function, LocalFacts};
pub use table::{Effect, PurityTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ReasonKind {
    NonlocalAssignment,
    StateRead,
    RngDependence,
    GlobalReference,
    ForeignCode,
    DynamicCode,
}

impl ReasonKind {
    pub const ALL: [ReasonKind; 6] = [
        ReasonKind::NonlocalAssignment,
        ReasonKind::StateRead,
        ReasonKind::RngDependence,
        ReasonKind::GlobalReference,
        ReasonKind::ForeignCode,
        ReasonKind::DynamicCode,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ReasonKind::NonlocalAssignment => "NonlocalAssignment",
            ReasonKind::StateRead => "StateRead",
            ReasonKind::RngDependence => "RngDependence",
            ReasonKind::GlobalReference => "GlobalReference",
            ReasonKind::ForeignCode => "ForeignCode",
            ReasonKind::DynamicCode => "DynamicCode",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.as_str() == s)
    }

    /// Reasons past which nothing more can be said.
    pub fn is_opaque(self) -> bool {
        matches!(self, ReasonKind::ForeignCode | ReasonKind::DynamicCode)
    }
}

impl fmt::Display for ReasonKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A violation found in `origin`'s body.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Reason {
    pub origin: FunctionId,
    pub loc: Loc,
    pub kind: ReasonKind,
    pub detail: String,
    /// The option, generator or name a remediation should mention.
    pub subject: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Status {
    Functional,
    Nonfunctional,
    Uncertifiable,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Functional => "functional",
            Status::Nonfunctional => "nonfunctional",
            Status::Uncertifiable => "uncertifiable",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Status::Functional, Status::Nonfunctional, Status::Uncertifiable].into_iter().find(|k| k.as_str() == s)
    }

    pub fn of_reasons<'a>(reasons: impl IntoIterator<Item = &'a Reason>) -> Status {
        reasons.into_iter().fold(Status::Functional, |s, r| {
            s.max(if r.kind.is_opaque() { Status::Uncertifiable } else { Status::Nonfunctional })
        })
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Propagated verdict for one function.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub status: Status,
    /// Own reasons first, then those inherited from callees.
    pub reasons: Vec<Reason>,
    /// Direct callees that contributed reasons.
    pub via: Vec<FunctionId>,
}

/// Runs the whole pipeline over a set of modules that may import each other.
pub fn analyze(modules: &[ModuleUnit], table: &PurityTable, strategy: Strategy) -> AnalysisReport {
    let ids: Vec<FunctionId> = modules
        .iter()
        .enumerate()
        .flat_map(|(mi, m)| (0..m.definitions.len()).map(move |fi| FunctionId::new(mi, fi)))
        .collect();
    let resolved: Vec<ResolvedFacts> = par::map(strategy, &ids, |id| {
        let m = &modules[id.module];
        let (_, def) = m.definitions.get_index(id.function).expect("id built from definitions");
        resolve_names(modules, id.module, def, &scan_function(def), table)
    });
    let verdicts = propagate(&ids, &resolved);
    AnalysisReport::build(modules, &ids, &resolved, &verdicts)
}

/// Analyzes one module on its own; imports from other modules are unresolved.
pub fn analyze_module(m: &ModuleUnit) -> AnalysisReport {
    analyze(std::slice::from_ref(m), &PurityTable::standard(), Strategy::Sequential)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(src: &str) -> AnalysisReport {
        analyze_module(&ModuleUnit::parse("m", src).unwrap())
    }

    fn status(r: &AnalysisReport, f: &str) -> Status {
        r.function("m", f).unwrap().status
    }

    #[test]
    fn factorial_is_functional() {
        let r = report("factorial <- function(x) if (x <= 1) 1 else x * factorial(x - 1)");
        assert_eq!(status(&r, "factorial"), Status::Functional);
    }

    #[test]
    fn even_odd_cycle_is_functional() {
        let r = report(
            "is_even <- function(n) if (n == 0) TRUE else is_odd(n - 1)\n\
             is_odd <- function(n) if (n == 0) FALSE else is_even(n - 1)",
        );
        assert_eq!(status(&r, "is_even"), Status::Functional);
        assert_eq!(status(&r, "is_odd"), Status::Functional);
    }

    #[test]
    fn callee_violations_are_inherited() {
        let r = report(
            "h <- function(x) { total <<- x; x }\n\
             f <- function(x) h(x) + 1",
        );
        let f = r.function("m", "f").unwrap();
        assert_eq!(f.status, Status::Nonfunctional);
        assert_eq!(f.via, ["h"]);
        assert_eq!(f.reasons[0].kind, ReasonKind::NonlocalAssignment);
        assert_eq!(f.reasons[0].detail, "in h: superassignment to 'total'");
    }

    #[test]
    fn cycle_members_share_reasons() {
        let r = report(
            "a <- function(n) if (n > 0) b(n - 1) else rng_draw(1)\n\
             b <- function(n) a(n)",
        );
        assert_eq!(status(&r, "a"), Status::Nonfunctional);
        assert_eq!(status(&r, "b"), Status::Nonfunctional);
        assert_eq!(r.function("m", "b").unwrap().reasons[0].kind, ReasonKind::RngDependence);
    }

    #[test]
    fn foreign_dominates() {
        let r = report(
            "g <- function(x) { n <<- 1; x }\n\
             f <- function(x) foreign(\"blas_dgemm\", g(x))",
        );
        assert_eq!(status(&r, "f"), Status::Uncertifiable);
        assert_eq!(status(&r, "g"), Status::Nonfunctional);
    }

    #[test]
    fn s3_generics_depend_on_their_methods() {
        let r = report(
            "area <- function(s) UseMethod(\"area\")\n\
             area.square <- function(s) s$side^2\n\
             area.noisy <- function(s) rng_draw(1)",
        );
        let area = r.function("m", "area").unwrap();
        assert_eq!(area.status, Status::Nonfunctional);
        assert_eq!(area.via, ["area.noisy"]);
        assert_eq!(status(&r, "area.square"), Status::Functional);
    }

    #[test]
    fn s4_generics_depend_on_their_methods() {
        let r = report(
            "set_generic(\"area\", function(shape) standard_generic(\"area\"))\n\
             set_method(\"area\", \"Circle\", function(shape) pi * slot(shape, \"r\")^2)\n\
             set_method(\"area\", \"Blob\", function(shape) get_option(\"blob_area\"))",
        );
        assert_eq!(status(&r, "area,Circle-method"), Status::Functional);
        assert_eq!(status(&r, "area"), Status::Nonfunctional);
    }

    #[test]
    fn module_names_shadow_base_names() {
        let r = report("rng_draw <- function(n) numeric(n)\nf <- function() rng_draw(3)");
        assert_eq!(status(&r, "f"), Status::Functional);
    }

    #[test]
    fn imports_resolve_across_modules() {
        let util = ModuleUnit::parse("util", "square <- function(x) x * x\nleak <- function(x) { last <<- x; x }").unwrap();
        let main = ModuleUnit::parse(
            "main",
            "import util (square, leak)\nf <- function(x) square(x)\ng <- function(x) leak(x)\nh <- function(x) cube(x)",
        )
        .unwrap();
        let r = analyze(&[util, main], &PurityTable::standard(), Strategy::Sequential);
        assert_eq!(r.function("main", "f").unwrap().status, Status::Functional);
        let g = r.function("main", "g").unwrap();
        assert_eq!(g.status, Status::Nonfunctional);
        assert_eq!(g.via, ["util::leak"]);
        let h = r.function("main", "h").unwrap();
        assert_eq!(h.reasons[0].kind, ReasonKind::GlobalReference);
    }

    #[test]
    fn import_from_unloaded_module_is_a_global_reference() {
        let r = report("import util (square)\nf <- function(x) square(x)");
        let f = r.function("m", "f").unwrap();
        assert_eq!(f.reasons[0].kind, ReasonKind::GlobalReference);
        assert_eq!(f.reasons[0].detail, "'square' is imported from module 'util', which is not loaded");
    }

    #[test]
    fn perturbed_table_changes_verdicts() {
        let m = ModuleUnit::parse("m", "f <- function(x) length(x)").unwrap();
        let mut t = PurityTable::standard();
        assert_eq!(analyze(std::slice::from_ref(&m), &t, Strategy::Sequential).function("m", "f").unwrap().status, Status::Functional);
        t.set("length", Effect::Violates(ReasonKind::ForeignCode));
        assert_eq!(analyze(std::slice::from_ref(&m), &t, Strategy::Sequential).function("m", "f").unwrap().status, Status::Uncertifiable);
    }

    #[test]
    fn strategies_agree() {
        let src = (0..50)
            .map(|i| format!("f{i} <- function(x) f{}(x) + {}\n", (i + 1) % 50, if i == 7 { "rng_draw(1)" } else { "1" }))
            .collect::<String>();
        let m = ModuleUnit::parse("m", &src).unwrap();
        let a = analyze(std::slice::from_ref(&m), &PurityTable::standard(), Strategy::Parallel);
        let b = analyze(std::slice::from_ref(&m), &PurityTable::standard(), Strategy::Sequential);
        assert_eq!(a.to_json_string(), b.to_json_string());
        assert_eq!(a.summary().nonfunctional, 50);
    }
}
