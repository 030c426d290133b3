//! Analysis reports and their text and JSON renderings.

use serde_json::json;

use crate::module::ModuleUnit;

use super::remedy::suggest_remediation;
use super::resolve::{FunctionId, ResolvedFacts};
use super::{ReasonKind, Status, Verdict};

#[derive(Debug, Clone, PartialEq)]
pub struct ReportReason {
    pub kind: ReasonKind,
    pub line: u32,
    pub column: u32,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionReport {
    pub function: String,
    pub status: Status,
    pub reasons: Vec<ReportReason>,
    pub via: Vec<String>,
    pub suggestions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModuleReport {
    pub name: String,
    pub functions: Vec<FunctionReport>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Summary {
    pub functional: usize,
    pub nonfunctional: usize,
    pub uncertifiable: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub modules: Vec<ModuleReport>,
    /// Call-graph edges between display names, caller first.
    pub edges: Vec<(String, String)>,
}

fn display_name(modules: &[ModuleUnit], from: usize, id: FunctionId) -> String {
    let m = &modules[id.module];
    let name = m.definitions.get_index(id.function).map(|(n, _)| n.as_str()).unwrap_or("?");
    if id.module == from {
        name.to_string()
    } else {
        format!("{}::{name}", m.name)
    }
}

impl AnalysisReport {
    pub(crate) fn build(
        modules: &[ModuleUnit],
        ids: &[FunctionId],
        facts: &[ResolvedFacts],
        verdicts: &[Verdict],
    ) -> Self {
        let mut out: Vec<ModuleReport> =
            modules.iter().map(|m| ModuleReport { name: m.name.clone(), functions: Vec::new() }).collect();
        let mut edges = Vec::new();
        for ((id, f), v) in ids.iter().zip(facts).zip(verdicts) {
            let here = id.module;
            let reasons = v
                .reasons
                .iter()
                .map(|r| ReportReason {
                    kind: r.kind,
                    line: r.loc.line,
                    column: r.loc.column,
                    detail: if r.origin == *id {
                        r.detail.clone()
                    } else {
                        format!("in {}: {}", display_name(modules, here, r.origin), r.detail)
                    },
                })
                .collect();
            let caller = display_name(modules, here, *id);
            for c in &f.callees {
                edges.push((format!("{}::{caller}", modules[here].name), format!("{}::{}", modules[c.module].name, display_name(modules, c.module, *c))));
            }
            out[here].functions.push(FunctionReport {
                function: caller,
                status: v.status,
                reasons,
                via: v.via.iter().map(|c| display_name(modules, here, *c)).collect(),
                suggestions: suggest_remediation(v),
            });
        }
        AnalysisReport { modules: out, edges }
    }

    pub fn function(&self, module: &str, name: &str) -> Option<&FunctionReport> {
        self.modules.iter().find(|m| m.name == module)?.functions.iter().find(|f| f.function == name)
    }

    pub fn functions(&self) -> impl Iterator<Item = (&str, &FunctionReport)> {
        self.modules.iter().flat_map(|m| m.functions.iter().map(move |f| (m.name.as_str(), f)))
    }

    pub fn summary(&self) -> Summary {
        let mut s = Summary::default();
        for (_, f) in self.functions() {
            match f.status {
                Status::Functional => s.functional += 1,
                Status::Nonfunctional => s.nonfunctional += 1,
                Status::Uncertifiable => s.uncertifiable += 1,
            }
        }
        s
    }

    /// The most severe status of any function; functional when empty.
    pub fn worst(&self) -> Status {
        self.functions().map(|(_, f)| f.status).max().unwrap_or(Status::Functional)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let modules: Vec<_> = self
            .modules
            .iter()
            .map(|m| {
                let functions: Vec<_> = m
                    .functions
                    .iter()
                    .map(|f| {
                        let reasons: Vec<_> = f
                            .reasons
                            .iter()
                            .map(|r| json!({"kind": r.kind.as_str(), "line": r.line, "column": r.column, "detail": r.detail}))
                            .collect();
                        json!({
                            "function": f.function,
                            "status": f.status.as_str(),
                            "reasons": reasons,
                            "via": f.via,
                            "suggestions": f.suggestions,
                        })
                    })
                    .collect();
                json!({"name": m.name, "functions": functions})
            })
            .collect();
        let s = self.summary();
        json!({
            "modules": modules,
            "summary": {"functional": s.functional, "nonfunctional": s.nonfunctional, "uncertifiable": s.uncertifiable},
        })
    }

    /// Pretty-printed JSON with lexicographically sorted keys.
    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for m in &self.modules {
            out.push_str(&format!("module {}\n", m.name));
            for f in &m.functions {
                out.push_str(&format!("  {}: {}\n", f.function, f.status));
                for r in &f.reasons {
                    out.push_str(&format!("    {} at {}:{}: {}\n", r.kind, r.line, r.column, r.detail));
                }
                if !f.via.is_empty() {
                    out.push_str(&format!("    via: {}\n", f.via.join(", ")));
                }
                for s in &f.suggestions {
                    out.push_str(&format!("    suggestion: {s}\n"));
                }
            }
        }
        let s = self.summary();
        out.push_str(&format!(
            "summary: {} functional, {} nonfunctional, {} uncertifiable\n",
            s.functional, s.nonfunctional, s.uncertifiable
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use crate::module::ModuleUnit;
    use crate::purity::analyze_module;

    #[test]
    fn json_keys_are_sorted_and_schema_complete() {
        let m = ModuleUnit::parse("counter", "make <- function() { n <<- n + 1 }\nid <- function(x) x").unwrap();
        let text = analyze_module(&m).to_json_string();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let f = &v["modules"][0]["functions"][0];
        assert_eq!(f["function"], "make");
        assert_eq!(f["status"], "nonfunctional");
        let keys: Vec<_> = f.as_object().unwrap().keys().cloned().collect();
        assert_eq!(keys, ["function", "reasons", "status", "suggestions", "via"]);
        let r = &f["reasons"][0];
        assert_eq!(r["kind"], "NonlocalAssignment");
        assert_eq!((r["line"].as_u64(), r["column"].as_u64()), (Some(1), Some(24)));
        assert_eq!(v["summary"]["functional"], 1);
        let top: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        assert_eq!(top, ["modules", "summary"]);
        let pos = |k: &str| text.find(k).unwrap();
        assert!(pos("\"function\"") < pos("\"reasons\"") && pos("\"reasons\"") < pos("\"status\""));
    }

    #[test]
    fn text_report_lists_reasons_and_suggestions() {
        let m = ModuleUnit::parse("m", "f <- function(n) rng_draw(n)").unwrap();
        let text = analyze_module(&m).to_text();
        assert_eq!(
            text,
            "module m\n  f: nonfunctional\n    RngDependence at 1:18: calls rng_draw\n    \
             suggestion: accept the generator's initial state as an argument\n    \
             suggestion: require explicit set_seed in reproducible examples\n\
             summary: 0 functional, 1 nonfunctional, 0 uncertifiable\n"
        );
    }
}
