//! Classifies every non-local name a function uses.

use std::fmt;

use crate::module::{Definition, ModuleUnit};

use super::scan::{LocalFacts, NameRef};
use super::table::{Effect, PurityTable};
use super::{Reason, ReasonKind};

/// Index of a definition: module position, then definition position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FunctionId {
    pub module: usize,
    pub function: usize,
}

impl FunctionId {
    pub fn new(module: usize, function: usize) -> Self {
        FunctionId { module, function }
    }
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}", self.module, self.function)
    }
}

/// Own reasons plus call-graph edges of one function.
#[derive(Debug, Clone, Default)]
pub struct ResolvedFacts {
    pub reasons: Vec<Reason>,
    pub callees: Vec<FunctionId>,
}

fn module_index(modules: &[ModuleUnit], name: &str) -> Option<usize> {
    modules.iter().position(|m| m.name == name)
}

enum Target {
    Local,
    Function(FunctionId),
    Base(Effect),
    Unresolved(String),
}

fn classify(modules: &[ModuleUnit], here: usize, name: &str, table: &PurityTable) -> Target {
    let m = &modules[here];
    if let Some(i) = m.definitions.get_index_of(name) {
        return Target::Function(FunctionId::new(here, i));
    }
    if m.constants.iter().any(|c| c == name) {
        return Target::Local;
    }
    if let Some(imp) = m.imports.iter().find(|imp| imp.names.iter().any(|n| n == name)) {
        let Some(mi) = module_index(modules, &imp.module) else {
            return Target::Unresolved(format!("'{name}' is imported from module '{}', which is not loaded", imp.module));
        };
        let source = &modules[mi];
        if let Some(i) = source.definitions.get_index_of(name) {
            return Target::Function(FunctionId::new(mi, i));
        }
        if source.constants.iter().any(|c| c == name) {
            return Target::Local;
        }
        return Target::Unresolved(format!("'{name}' is not defined in module '{}'", imp.module));
    }
    match table.effect(name) {
        Some(e) => Target::Base(e),
        None => Target::Unresolved(format!("'{name}' resolves to the global environment")),
    }
}

fn violation_detail(kind: ReasonKind, r: &NameRef) -> String {
    let subject = r.subject.as_deref();
    match (kind, subject) {
        (ReasonKind::StateRead, Some(s)) if r.called && r.name == "get_option" => format!("reads option '{s}'"),
        (ReasonKind::StateRead, Some(s)) if r.called => format!("{} accesses option '{s}'", r.name),
        (ReasonKind::ForeignCode, Some(s)) if r.called => format!("foreign code '{s}'"),
        (_, _) if r.called => format!("calls {}", r.name),
        (_, _) => format!("refers to {}", r.name),
    }
}

/// Resolves the free names of `def` (in module `here`) into reasons and edges.
pub fn resolve_names(
    modules: &[ModuleUnit],
    here: usize,
    def: &Definition,
    facts: &LocalFacts,
    table: &PurityTable,
) -> ResolvedFacts {
    let origin = FunctionId::new(here, modules[here].definitions.get_index_of(&def.name).unwrap_or(0));
    let mut out = ResolvedFacts::default();
    for r in &facts.reasons {
        out.reasons.push(Reason { origin, loc: r.loc, kind: r.kind, detail: r.detail.clone(), subject: None });
    }
    for r in &facts.refs {
        match classify(modules, here, &r.name, table) {
            Target::Local | Target::Base(Effect::Pure | Effect::Assign) => {}
            Target::Function(id) => out.callees.push(id),
            Target::Base(Effect::Violates(kind)) => {
                let subject = match kind {
                    ReasonKind::StateRead if r.called => r.subject.clone(),
                    ReasonKind::StateRead | ReasonKind::RngDependence | ReasonKind::GlobalReference => {
                        Some(r.name.clone())
                    }
                    _ => None,
                };
                let detail = violation_detail(kind, r);
                out.reasons.push(Reason { origin, loc: r.loc, kind, detail, subject });
            }
            Target::Unresolved(detail) => out.reasons.push(Reason {
                origin,
                loc: r.loc,
                kind: ReasonKind::GlobalReference,
                detail,
                subject: Some(r.name.clone()),
            }),
        }
    }
    let m = &modules[here];
    let dispatch = facts
        .s3_generics
        .iter()
        .map(|g| format!("{g}."))
        .chain(facts.s4_generics.iter().map(|g| format!("{g},")));
    for prefix in dispatch {
        for (i, name) in m.definitions.keys().enumerate() {
            if name.starts_with(&prefix) {
                out.callees.push(FunctionId::new(here, i));
            }
        }
    }
    out.reasons.sort_by(|a, b| (a.loc, a.kind).cmp(&(b.loc, b.kind)));
    out.callees.sort();
    out.callees.dedup();
    out
}
