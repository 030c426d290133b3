//! One source file as a module: `import <module> (<names>)` header lines
//! followed by top-level definitions.

use std::sync::Arc;

use indexmap::IndexMap;

use crate::reader::{parse_program, Expr, ExprKind, Formal, Literal, Loc, SyntaxError};

#[derive(Debug, Clone, PartialEq)]
pub struct Import {
    pub module: String,
    pub names: Vec<String>,
    pub loc: Loc,
}

/// A function literal bound at the top level of a module.
#[derive(Debug, Clone)]
pub struct Definition {
    pub name: String,
    pub formals: Arc<[Formal]>,
    pub body: Arc<Expr>,
    pub loc: Loc,
    /// Names bound in the function's enclosure at run time: for
    /// reference-class methods, the fields, sibling methods and `.self`.
    pub implicit: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ModuleUnit {
    pub name: String,
    pub imports: Vec<Import>,
    pub definitions: IndexMap<String, Definition>,
    /// Top-level names bound to something other than a function literal.
    pub constants: Vec<String>,
    pub program: Vec<Expr>,
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic() || c == '.' || c == '_')
        && chars.all(|c| c.is_alphanumeric() || c == '.' || c == '_')
}

fn parse_import(line: &str, line_no: u32) -> Result<Import, SyntaxError> {
    let col = (line.len() - line.trim_start().len()) as u32 + 1;
    let loc = Loc::new(line_no, col);
    let bad = || SyntaxError::new(loc, "malformed import: expected 'import <module> (<names>)'");
    let rest = line.trim().strip_prefix("import").ok_or_else(bad)?.trim();
    let (module, names) = rest.split_once('(').ok_or_else(bad)?;
    let module = module.trim();
    let names = names.trim_end().strip_suffix(')').ok_or_else(bad)?;
    let names: Vec<String> = names.split(',').map(|n| n.trim().to_string()).filter(|n| !n.is_empty()).collect();
    if !is_ident(module) || names.iter().any(|n| !is_ident(n)) {
        return Err(bad());
    }
    Ok(Import { module: module.to_string(), names, loc })
}

/// Separates import headers from program text. Import lines are blanked so
/// that locations in the remaining source are unchanged.
pub fn split_imports(source: &str) -> Result<(Vec<Import>, String), SyntaxError> {
    let mut imports = Vec::new();
    let mut body = String::with_capacity(source.len());
    for (i, line) in source.split_inclusive('\n').enumerate() {
        let t = line.trim_start();
        if t.starts_with("import ") || t.starts_with("import\t") || t.starts_with("import(") {
            imports.push(parse_import(line.trim_end_matches(['\n', '\r']), i as u32 + 1)?);
            if line.ends_with('\n') {
                body.push('\n');
            }
        } else {
            body.push_str(line);
        }
    }
    Ok((imports, body))
}

fn string_arg(e: &Expr) -> Option<&str> {
    match &e.kind {
        ExprKind::Constant(Literal::Str(s)) => Some(s),
        _ => None,
    }
}

fn function_parts(e: &Expr) -> Option<(&Arc<[Formal]>, &Arc<Expr>)> {
    match &e.kind {
        ExprKind::Function { formals, body } => Some((formals, body)),
        _ => None,
    }
}

impl ModuleUnit {
    pub fn parse(name: &str, source: &str) -> Result<Self, SyntaxError> {
        let (imports, body) = split_imports(source)?;
        let program = parse_program(&body)?;
        let mut unit = ModuleUnit {
            name: name.to_string(),
            imports,
            definitions: IndexMap::new(),
            constants: Vec::new(),
            program: Vec::new(),
        };
        for e in &program {
            unit.collect(e);
        }
        unit.program = program;
        Ok(unit)
    }

    fn define(&mut self, name: String, f: &Expr) {
        let (formals, body) = function_parts(f).expect("caller checked for a function literal");
        let def = Definition {
            name: name.clone(),
            formals: formals.clone(),
            body: body.clone(),
            loc: f.loc,
            implicit: Vec::new(),
        };
        self.definitions.insert(name, def);
    }

    fn collect(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::Assign { target, value } => {
                let Some(name) = target.as_symbol() else { return };
                if value.called_name() == Some("set_ref_class") {
                    self.collect_ref_class(value);
                }
                if function_parts(value).is_some() {
                    self.define(name.to_string(), value);
                } else if !self.constants.iter().any(|c| c == name) {
                    self.constants.push(name.to_string());
                }
            }
            // set_generic("g", function(..) ..) and set_method("g", sig, function(..) ..)
            ExprKind::Call { args, .. } => match e.called_name() {
                Some("set_generic") => {
                    let (Some(name), Some(def)) = (args.first(), args.get(1)) else { return };
                    if let (Some(n), true) = (string_arg(&name.value), function_parts(&def.value).is_some()) {
                        self.define(n.to_string(), &def.value);
                    }
                }
                Some("set_method") => {
                    let (Some(g), Some(sig), Some(def)) = (args.first(), args.get(1), args.get(2)) else { return };
                    let Some(g) = string_arg(&g.value) else { return };
                    if function_parts(&def.value).is_none() {
                        return;
                    }
                    let sig = signature_text(&sig.value);
                    self.define(format!("{g},{sig}-method"), &def.value);
                }
                _ => {}
            },
            _ => {}
        }
    }

    /// Methods of `set_ref_class("C", fields = .., methods = list(m = function ..))`
    /// become definitions named `C$m`.
    fn collect_ref_class(&mut self, call: &Expr) {
        let ExprKind::Call { args, .. } = &call.kind else { return };
        let arg = |name: &str, pos: usize| {
            args.iter()
                .find(|a| a.name.as_deref() == Some(name))
                .or_else(|| args.iter().filter(|a| a.name.is_none()).nth(pos))
                .map(|a| &*a.value)
        };
        let Some(class) = arg("Class", 0).and_then(string_arg) else { return };
        let entries = |e: Option<&Expr>| -> Vec<(String, Option<Expr>)> {
            match e.map(|e| (&e.kind, e.called_name())) {
                Some((ExprKind::Call { args, .. }, Some("list" | "c"))) => args
                    .iter()
                    .filter_map(|a| match (&a.name, string_arg(&a.value)) {
                        (Some(n), _) => Some((n.clone(), Some((*a.value).clone()))),
                        (None, Some(s)) => Some((s.to_string(), None)),
                        _ => None,
                    })
                    .collect(),
                _ => Vec::new(),
            }
        };
        let fields = entries(arg("fields", 1));
        let methods = entries(arg("methods", 2));
        let mut implicit: Vec<String> = fields.iter().chain(&methods).map(|(n, _)| n.clone()).collect();
        implicit.extend([".self".to_string(), "copy".to_string()]);
        for (m, f) in &methods {
            let Some(f) = f.as_ref().filter(|f| function_parts(f).is_some()) else { continue };
            let name = format!("{class}${m}");
            self.define(name.clone(), f);
            if let Some(d) = self.definitions.get_mut(&name) {
                d.implicit = implicit.clone();
            }
        }
    }

    pub fn defines(&self, name: &str) -> bool {
        self.definitions.contains_key(name) || self.constants.iter().any(|c| c == name)
    }
}

/// `"A"` or `c("A", "B")` as `A,B`; anything else as `?`.
fn signature_text(e: &Expr) -> String {
    if let Some(s) = string_arg(e) {
        return s.to_string();
    }
    match &e.kind {
        ExprKind::Call { args, .. } if matches!(e.called_name(), Some("c" | "signature")) => args
            .iter()
            .map(|a| string_arg(&a.value).unwrap_or("?").to_string())
            .collect::<Vec<_>>()
            .join(","),
        _ => "?".to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn imports_are_blanked_in_place() {
        let src = "# helpers\nimport util (square, cube)\nf <- function(x) square(x)\n";
        let (imports, body) = split_imports(src).unwrap();
        assert_eq!(imports, vec![Import { module: "util".into(), names: vec!["square".into(), "cube".into()], loc: Loc::new(2, 1) }]);
        assert_eq!(body, "# helpers\n\nf <- function(x) square(x)\n");
    }

    #[test]
    fn malformed_import_is_a_syntax_error() {
        let err = split_imports("import util square\n").unwrap_err();
        assert_eq!(err.loc, Loc::new(1, 1));
    }

    #[test]
    fn collects_functions_constants_and_methods() {
        let src = r#"
tol <- 1e-8
f <- function(x) x
set_generic("area", function(shape) standard_generic("area"))
set_method("area", "Circle", function(shape) 1)
set_method("combine", c("A", "B"), function(x, y) 2)
"#;
        let m = ModuleUnit::parse("m", src).unwrap();
        let names: Vec<_> = m.definitions.keys().cloned().collect();
        assert_eq!(names, ["f", "area", "area,Circle-method", "combine,A,B-method"]);
        assert_eq!(m.constants, ["tol"]);
        assert!(m.defines("tol") && m.defines("f") && !m.defines("g"));
    }
}
