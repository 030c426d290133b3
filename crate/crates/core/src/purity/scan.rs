//! Syntactic facts about one function body.
//!
//! Locals are tracked in evaluation order: a name counts as local at a read
//! only if every path to the read has already assigned it (or it is a
//! formal). Assignments inside loop bodies and call arguments are not relied
//! on afterwards, since the loop may not run and the argument may never be
//! forced. Nested function literals see every name their enclosing functions
//! assign anywhere, because they run later.

use std::collections::HashSet;

use crate::module::Definition;
use crate::reader::{deparse, Arg, Expr, ExprKind, Formal, Literal, Loc};

use super::ReasonKind;

/// A name that is not local to the function at the point it is used.
#[derive(Debug, Clone, PartialEq)]
pub struct NameRef {
    pub name: String,
    pub loc: Loc,
    pub called: bool,
    /// First argument when it is a string literal or a tag, e.g. an option name.
    pub subject: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalReason {
    pub kind: ReasonKind,
    pub loc: Loc,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct LocalFacts {
    pub reasons: Vec<LocalReason>,
    pub refs: Vec<NameRef>,
    /// Generics dispatched on through `UseMethod`.
    pub s3_generics: Vec<String>,
    /// Generics dispatched on through `standard_generic`.
    pub s4_generics: Vec<String>,
}

struct Scope {
    definite: HashSet<String>,
    /// Formals plus every name assigned anywhere in this function.
    anywhere: HashSet<String>,
}

struct Scanner {
    scopes: Vec<Scope>,
    facts: LocalFacts,
}

/// Collects the local facts of one definition.
pub fn scan_function(def: &Definition) -> LocalFacts {
    let mut s = Scanner { scopes: Vec::new(), facts: LocalFacts::default() };
    if !def.implicit.is_empty() {
        let names: HashSet<String> = def.implicit.iter().cloned().collect();
        s.scopes.push(Scope { definite: names.clone(), anywhere: names });
    }
    s.function(&def.formals, &def.body);
    s.facts
}

fn string_literal(e: &Expr) -> Option<&str> {
    match &e.kind {
        ExprKind::Constant(Literal::Str(s)) => Some(s),
        _ => None,
    }
}

/// The variable an assignment like `x$a[1] <- v` ultimately rebinds.
fn root_symbol(e: &Expr) -> Option<&str> {
    match &e.kind {
        ExprKind::Symbol(s) => Some(s),
        ExprKind::Index { object, .. } | ExprKind::FieldAccess { object, .. } => root_symbol(object),
        _ => None,
    }
}

fn assigned_anywhere(e: &Expr, out: &mut HashSet<String>) {
    match &e.kind {
        ExprKind::Function { .. } => return,
        ExprKind::Assign { target, .. }
        | ExprKind::IndexAssign { object: target, .. }
        | ExprKind::FieldAssign { object: target, .. } => {
            if let Some(n) = root_symbol(target) {
                out.insert(n.to_string());
            }
        }
        ExprKind::Call { args, .. } if e.called_name() == Some("assign") => {
            if let Some(n) = args.first().and_then(|a| string_literal(&a.value)) {
                out.insert(n.to_string());
            }
        }
        _ => {}
    }
    for c in e.children() {
        assigned_anywhere(c, out);
    }
}

/// `assign`'s environment argument: named `envir`, or the third positional.
fn assign_envir(args: &[Arg]) -> Option<&Expr> {
    if let Some(a) = args.iter().find(|a| a.name.as_deref() == Some("envir")) {
        return Some(&a.value);
    }
    args.iter().filter(|a| a.name.is_none()).nth(2).map(|a| &*a.value)
}

fn is_local_env_expr(e: &Expr) -> bool {
    matches!(&e.kind, ExprKind::Call { args, .. } if args.is_empty() && e.called_name() == Some("environment"))
}

impl Scanner {
    fn function(&mut self, formals: &[Formal], body: &Expr) {
        let mut anywhere: HashSet<String> = formals.iter().map(|f| f.name.clone()).collect();
        assigned_anywhere(body, &mut anywhere);
        // Defaults are forced lazily inside the call, after any assignment.
        self.scopes.push(Scope { definite: anywhere.clone(), anywhere: anywhere.clone() });
        for f in formals {
            if let Some(d) = &f.default {
                self.walk(d);
            }
        }
        self.scopes.pop();
        let definite = formals.iter().map(|f| f.name.clone()).collect();
        self.scopes.push(Scope { definite, anywhere });
        self.walk(body);
        self.scopes.pop();
    }

    fn is_local(&self, name: &str) -> bool {
        let Some((top, outer)) = self.scopes.split_last() else { return false };
        top.definite.contains(name) || outer.iter().any(|s| s.anywhere.contains(name))
    }

    fn define(&mut self, name: &str) {
        if let Some(top) = self.scopes.last_mut() {
            top.definite.insert(name.to_string());
        }
    }

    fn definite(&self) -> HashSet<String> {
        self.scopes.last().map(|s| s.definite.clone()).unwrap_or_default()
    }

    fn restore(&mut self, set: HashSet<String>) {
        if let Some(top) = self.scopes.last_mut() {
            top.definite = set;
        }
    }

    fn reference(&mut self, name: &str, loc: Loc, called: bool, subject: Option<String>) {
        if !self.is_local(name) {
            self.facts.refs.push(NameRef { name: name.to_string(), loc, called, subject });
        }
    }

    fn reason(&mut self, kind: ReasonKind, loc: Loc, detail: String) {
        self.facts.reasons.push(LocalReason { kind, loc, detail });
    }

    fn walk(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::Constant(_) => {}
            ExprKind::Symbol(n) => self.reference(n, e.loc, false, None),
            ExprKind::Function { formals, body } => self.function(formals, body),
            ExprKind::Call { callee, args } => self.call(e, callee, args),
            ExprKind::Assign { target, value } => {
                self.walk(value);
                if let Some(n) = target.as_symbol() {
                    self.define(n);
                }
            }
            ExprKind::SuperAssign { target, value } => {
                self.walk(value);
                let what = root_symbol(target).map(str::to_string).unwrap_or_else(|| deparse(target));
                self.reason(ReasonKind::NonlocalAssignment, e.loc, format!("superassignment to '{what}'"));
            }
            ExprKind::Block(items) => items.iter().for_each(|i| self.walk(i)),
            ExprKind::If { cond, then, otherwise } => {
                self.walk(cond);
                let before = self.definite();
                self.walk(then);
                let after_then = self.definite();
                self.restore(before.clone());
                if let Some(o) = otherwise {
                    self.walk(o);
                    let after_else = self.definite();
                    self.restore(after_then.intersection(&after_else).cloned().collect());
                } else {
                    self.restore(before);
                }
            }
            ExprKind::While { cond, body } => {
                self.walk(cond);
                let before = self.definite();
                self.walk(body);
                self.restore(before);
            }
            ExprKind::Index { object, indices } => {
                self.walk(object);
                indices.iter().for_each(|a| self.walk(&a.value));
            }
            ExprKind::FieldAccess { object, .. } => self.walk(object),
            ExprKind::IndexAssign { object, indices, value } => {
                self.walk(value);
                indices.iter().for_each(|a| self.walk(&a.value));
                self.walk(object);
                if let Some(n) = root_symbol(object) {
                    self.define(n);
                }
            }
            ExprKind::FieldAssign { object, value, .. } => {
                self.walk(value);
                self.walk(object);
                if let Some(n) = root_symbol(object) {
                    self.define(n);
                }
            }
        }
    }

    fn call(&mut self, e: &Expr, callee: &Expr, args: &[Arg]) {
        let Some(name) = callee.as_symbol() else {
            self.reason(ReasonKind::DynamicCode, e.loc, format!("computed callee '{}'", deparse(callee)));
            self.walk(callee);
            self.walk_args(args);
            return;
        };
        let first = args.first();
        let subject = first.and_then(|a| string_literal(&a.value).map(str::to_string).or_else(|| a.name.clone()));
        self.reference(name, callee.loc, true, subject.clone());
        if self.is_local(name) {
            self.walk_args(args);
            return;
        }
        match name {
            "quote" => return,
            "UseMethod" => self.facts.s3_generics.extend(subject.clone()),
            "standard_generic" => self.facts.s4_generics.extend(subject.clone()),
            "assign" => {
                if let Some(env) = assign_envir(args) {
                    if !is_local_env_expr(env) {
                        let what = subject.clone().unwrap_or_else(|| "?".into());
                        self.reason(
                            ReasonKind::NonlocalAssignment,
                            e.loc,
                            format!("assign to '{what}' in a non-local environment"),
                        );
                    }
                }
            }
            _ => {}
        }
        self.walk_args(args);
        if name == "assign" {
            if let Some(n) = first.and_then(|a| string_literal(&a.value)) {
                if assign_envir(args).is_none_or(is_local_env_expr) {
                    self.define(n);
                }
            }
        }
    }

    fn walk_args(&mut self, args: &[Arg]) {
        let before = self.definite();
        args.iter().for_each(|a| self.walk(&a.value));
        self.restore(before);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::module::ModuleUnit;

    fn facts(src: &str) -> LocalFacts {
        let m = ModuleUnit::parse("t", &format!("f <- {src}")).unwrap();
        scan_function(&m.definitions["f"])
    }

    fn kinds(f: &LocalFacts) -> Vec<ReasonKind> {
        f.reasons.iter().map(|r| r.kind).collect()
    }

    fn free(f: &LocalFacts) -> Vec<&str> {
        f.refs.iter().map(|r| r.name.as_str()).collect()
    }

    #[test]
    fn pure_body_has_only_base_refs() {
        let f = facts("function(x) x + 1");
        assert!(f.reasons.is_empty());
        assert_eq!(free(&f), ["+"]);
    }

    #[test]
    fn superassignment_is_reported_at_its_site() {
        let f = facts("function(x) {\n  x <<- 1\n}");
        assert_eq!(kinds(&f), [ReasonKind::NonlocalAssignment]);
        assert_eq!(f.reasons[0].loc, Loc::new(2, 5));
        assert_eq!(f.reasons[0].detail, "superassignment to 'x'");
    }

    #[test]
    fn read_before_assignment_is_free() {
        let f = facts("function() { y <- n + 1; n <- 2; n }");
        assert_eq!(free(&f), ["+", "n"]);
    }

    #[test]
    fn only_definite_assignments_survive_branches_and_loops() {
        let f = facts("function(a) { if (a) { b <- 1 } else { b <- 2 }; b }");
        assert_eq!(free(&f), Vec::<&str>::new());
        let f = facts("function(a) { if (a) { b <- 1 }; b }");
        assert_eq!(free(&f), ["b"]);
        let f = facts("function(a) { while (a) { b <- 1 }; b }");
        assert_eq!(free(&f), ["b"]);
    }

    #[test]
    fn nested_functions_see_enclosing_names() {
        let f = facts("function() { g <- function() total; total <- 3; g() }");
        assert_eq!(free(&f), Vec::<&str>::new());
    }

    #[test]
    fn assign_with_environment_is_nonlocal() {
        assert!(facts("function(v) { assign(\"k\", v); k }").reasons.is_empty());
        assert!(facts("function(v) assign(\"k\", v, envir = environment())").reasons.is_empty());
        let f = facts("function(v, e) assign(\"k\", v, e)");
        assert_eq!(kinds(&f), [ReasonKind::NonlocalAssignment]);
    }

    #[test]
    fn computed_callees_are_dynamic() {
        let f = facts("function(o) o$run(1)");
        assert_eq!(kinds(&f), [ReasonKind::DynamicCode]);
        assert_eq!(f.reasons[0].detail, "computed callee 'o$run'");
    }

    #[test]
    fn calls_record_their_subject() {
        let f = facts("function() get_option(\"tol\")");
        assert_eq!(f.refs[0].subject.as_deref(), Some("tol"));
        assert!(f.refs[0].called);
    }

    #[test]
    fn quoted_code_is_data() {
        let f = facts("function() quote(x + y)");
        assert_eq!(free(&f), ["quote"]);
    }

    #[test]
    fn dispatch_targets_are_recorded() {
        assert_eq!(facts("function(x) UseMethod(\"area\")").s3_generics, ["area"]);
        assert_eq!(facts("function(x) standard_generic(\"area\")").s4_generics, ["area"]);
    }

    #[test]
    fn calling_a_formal_is_local() {
        let f = facts("function(g, x) g(x)");
        assert!(f.refs.is_empty() && f.reasons.is_empty());
    }
}
