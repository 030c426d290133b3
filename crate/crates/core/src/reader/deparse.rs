use super::ast::{Arg, Expr, ExprKind, Formal, Literal};
use super::lexer::is_syntactic_name;
use super::parser::{infix_power, prefix_power};

const BP_ATOM: u8 = 100;

/// Renders an expression as source text that parses back to an equal tree.
pub fn deparse(e: &Expr) -> String {
    let mut w = Writer { out: String::new(), indent: 0 };
    w.expr(e);
    w.out
}

pub fn deparse_literal(lit: &Literal) -> String {
    match lit {
        Literal::Null => "NULL".into(),
        Literal::Logical(true) => "TRUE".into(),
        Literal::Logical(false) => "FALSE".into(),
        Literal::Integer(n) => format!("{n}L"),
        Literal::Double(d) => deparse_double(*d),
        Literal::Str(s) => quote_string(s),
    }
}

pub(crate) fn deparse_double(d: f64) -> String {
    if d.is_nan() {
        "NaN".into()
    } else if d.is_infinite() {
        if d > 0.0 { "Inf".into() } else { "-Inf".into() }
    } else {
        let plain = format!("{d}");
        if plain.len() <= 20 { plain } else { format!("{d:?}") }
    }
}

pub fn quote_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            '\0' => out.push_str("\\0"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn deparse_name(name: &str) -> String {
    if is_syntactic_name(name) {
        name.to_string()
    } else {
        format!("`{name}`")
    }
}

enum OpForm<'a> {
    Infix(&'a str, &'a Expr, &'a Expr),
    Prefix(&'a str, &'a Expr),
}

fn op_form(e: &Expr) -> Option<OpForm<'_>> {
    let ExprKind::Call { callee, args } = &e.kind else {
        return None;
    };
    let name = callee.as_symbol()?;
    if args.iter().any(|a| a.name.is_some()) {
        return None;
    }
    match args.as_slice() {
        [l, r] if infix_power(name).is_some() && name != "<-" && name != "<<-" => {
            Some(OpForm::Infix(name, &l.value, &r.value))
        }
        [x] if prefix_power(name).is_some() => Some(OpForm::Prefix(name, &x.value)),
        _ => None,
    }
}

fn binding_power(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Assign { .. }
        | ExprKind::SuperAssign { .. }
        | ExprKind::IndexAssign { .. }
        | ExprKind::FieldAssign { .. } => 1,
        ExprKind::Function { .. } | ExprKind::If { .. } | ExprKind::While { .. } => 0,
        _ => match op_form(e) {
            Some(OpForm::Infix(op, ..)) => infix_power(op).map(|p| p.0).unwrap_or(BP_ATOM),
            Some(OpForm::Prefix(op, _)) => prefix_power(op).unwrap_or(BP_ATOM),
            None => BP_ATOM,
        },
    }
}

fn is_greedy(e: &Expr) -> bool {
    matches!(e.kind, ExprKind::Function { .. } | ExprKind::If { .. } | ExprKind::While { .. })
}

/// True when the rightmost part of `e` is an `if` without `else`, which would
/// capture a following `else`.
fn ends_with_open_if(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::If { otherwise: None, .. } => true,
        ExprKind::If { otherwise: Some(o), .. } => ends_with_open_if(o),
        ExprKind::Function { body, .. } => ends_with_open_if(body),
        ExprKind::While { body, .. } => ends_with_open_if(body),
        ExprKind::Assign { value, .. }
        | ExprKind::SuperAssign { value, .. }
        | ExprKind::IndexAssign { value, .. }
        | ExprKind::FieldAssign { value, .. } => ends_with_open_if(value),
        _ => match op_form(e) {
            Some(OpForm::Infix(_, _, r)) => ends_with_open_if(r),
            Some(OpForm::Prefix(_, x)) => ends_with_open_if(x),
            None => false,
        },
    }
}

struct Writer {
    out: String,
    indent: usize,
}

impl Writer {
    fn push(&mut self, s: &str) {
        self.out.push_str(s);
    }

    fn paren(&mut self, e: &Expr, wrap: bool) {
        if wrap {
            self.push("(");
            self.expr(e);
            self.push(")");
        } else {
            self.expr(e);
        }
    }

    fn assign(&mut self, target: &Expr, op: &str, value: &Expr) {
        self.expr(target);
        self.push(" ");
        self.push(op);
        self.push(" ");
        // Assignment is right associative; only a strictly looser value needs parens.
        let wrap = binding_power(value) < 1 && !is_greedy(value);
        self.paren(value, wrap);
    }

    fn postfix_object(&mut self, object: &Expr) {
        self.paren(object, binding_power(object) < BP_ATOM);
    }

    fn args(&mut self, args: &[Arg]) {
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                self.push(", ");
            }
            if let Some(n) = &a.name {
                self.push(&deparse_name(n));
                self.push(" = ");
            }
            self.expr(&a.value);
        }
    }

    fn formals(&mut self, formals: &[Formal]) {
        for (i, f) in formals.iter().enumerate() {
            if i > 0 {
                self.push(", ");
            }
            self.push(&deparse_name(&f.name));
            if let Some(d) = &f.default {
                self.push(" = ");
                self.expr(d);
            }
        }
    }

    fn expr(&mut self, e: &Expr) {
        match &e.kind {
            ExprKind::Constant(lit) => self.push(&deparse_literal(lit)),
            ExprKind::Symbol(s) => self.push(&deparse_name(s)),
            ExprKind::Call { callee, args } => match op_form(e) {
                Some(OpForm::Infix(op, l, r)) => {
                    let (bp, right) = infix_power(op).unwrap();
                    let lb = binding_power(l);
                    let rb = binding_power(r);
                    let wrap_l = lb < bp || (lb == bp && right);
                    let wrap_r = rb < bp || (rb == bp && !right);
                    self.paren(l, wrap_l);
                    if op == ":" || op == "^" {
                        self.push(op);
                    } else {
                        self.push(" ");
                        self.push(op);
                        self.push(" ");
                    }
                    self.paren(r, wrap_r);
                }
                Some(OpForm::Prefix(op, x)) => {
                    let bp = prefix_power(op).unwrap();
                    self.push(op);
                    self.paren(x, binding_power(x) < bp);
                }
                None => {
                    self.postfix_object(callee);
                    self.push("(");
                    self.args(args);
                    self.push(")");
                }
            },
            ExprKind::Function { formals, body } => {
                self.push("function(");
                self.formals(formals);
                self.push(") ");
                self.expr(body);
            }
            ExprKind::Assign { target, value } => self.assign(target, "<-", value),
            ExprKind::SuperAssign { target, value } => self.assign(target, "<<-", value),
            ExprKind::IndexAssign { object, indices, value } => {
                self.postfix_object(object);
                self.push("[");
                self.args(indices);
                self.push("] <- ");
                self.paren(value, binding_power(value) < 1 && !is_greedy(value));
            }
            ExprKind::FieldAssign { object, name, value } => {
                self.postfix_object(object);
                self.push("$");
                self.push(&deparse_name(name));
                self.push(" <- ");
                self.paren(value, binding_power(value) < 1 && !is_greedy(value));
            }
            ExprKind::Block(items) => {
                self.push("{");
                self.indent += 1;
                for item in items {
                    self.push("\n");
                    self.push(&"    ".repeat(self.indent));
                    self.expr(item);
                }
                self.indent -= 1;
                self.push("\n");
                self.push(&"    ".repeat(self.indent));
                self.push("}");
            }
            ExprKind::If { cond, then, otherwise } => {
                self.push("if (");
                self.expr(cond);
                self.push(") ");
                match otherwise {
                    Some(o) => {
                        self.paren(then, ends_with_open_if(then));
                        self.push(" else ");
                        self.expr(o);
                    }
                    None => self.expr(then),
                }
            }
            ExprKind::While { cond, body } => {
                self.push("while (");
                self.expr(cond);
                self.push(") ");
                self.expr(body);
            }
            ExprKind::Index { object, indices } => {
                self.postfix_object(object);
                self.push("[");
                self.args(indices);
                self.push("]");
            }
            ExprKind::FieldAccess { object, name } => {
                self.postfix_object(object);
                self.push("$");
                self.push(&deparse_name(name));
            }
        }
    }
}
