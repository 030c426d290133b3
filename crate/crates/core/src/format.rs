//! Printed representations of values.

use crate::env::Binding;
use crate::eval::{Flow, Interpreter};
use crate::reader::{deparse, quote_string, Expr, ExprKind, Loc};
use crate::value::{Data, Value};

pub const LINE_WIDTH: usize = 80;
pub const PRINT_DIGITS: usize = 7;

/// Decimal mantissa and exponent of `x` rounded to `digits` significant digits,
/// with trailing zeros of the mantissa removed.
fn decompose(x: f64, digits: usize) -> (String, i32) {
    let s = format!("{:.*e}", digits.saturating_sub(1), x.abs());
    let (m, e) = s.split_once('e').expect("exponent form");
    let mantissa: String = m.chars().filter(|c| c.is_ascii_digit()).collect();
    let trimmed = mantissa.trim_end_matches('0');
    let trimmed = if trimmed.is_empty() { "0" } else { trimmed };
    (trimmed.to_string(), e.parse().expect("integer exponent"))
}

fn needs_sci(x: f64) -> bool {
    x.is_finite() && x != 0.0 && (x.abs() >= 1e15 || x.abs() < 1e-4)
}

fn non_finite(x: f64) -> Option<&'static str> {
    if x.is_nan() {
        Some("NaN")
    } else if x == f64::INFINITY {
        Some("Inf")
    } else if x == f64::NEG_INFINITY {
        Some("-Inf")
    } else {
        None
    }
}

fn sci(x: f64, mantissa_digits: usize) -> String {
    crate::builtins::c_exp(x, mantissa_digits.saturating_sub(1))
}

/// Formats doubles with a shared number of decimals (or a shared mantissa
/// width in scientific notation), rounding each to `digits` significant digits.
pub fn format_doubles(xs: &[f64], digits: usize) -> Vec<String> {
    let finite: Vec<f64> = xs.iter().copied().filter(|x| x.is_finite()).collect();
    let use_sci = finite.iter().any(|&x| needs_sci(x));
    let parts: Vec<(String, i32)> = finite.iter().map(|&x| decompose(x, digits)).collect();
    let spec = if use_sci {
        parts.iter().map(|(m, _)| m.len()).max().unwrap_or(1)
    } else {
        parts
            .iter()
            .map(|(m, e)| (m.len() as i32 - 1 - e).max(0) as usize)
            .max()
            .unwrap_or(0)
    };
    xs.iter()
        .map(|&x| match non_finite(x) {
            Some(s) => s.to_string(),
            None if use_sci => sci(x, spec),
            None => {
                let s = format!("{x:.spec$}");
                if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
                    s[1..].to_string()
                } else {
                    s
                }
            }
        })
        .collect()
}

/// One double with `digits` significant digits and no padding.
pub fn format_significant(x: f64, digits: usize) -> String {
    format_doubles(&[x], digits).pop().expect("one element")
}

/// A double as `as.character` renders it (15 significant digits).
pub fn number_to_string(x: f64) -> String {
    format_significant(x, 15)
}

/// Elements of an atomic vector as unpadded strings, formatted jointly.
pub fn format_elements(v: &Value, quote: bool) -> Vec<String> {
    match &v.data {
        Data::Logical(b) => b.iter().map(|&x| if x { "TRUE" } else { "FALSE" }.to_string()).collect(),
        Data::Integer(i) => i.iter().map(|x| x.to_string()).collect(),
        Data::Double(d) => format_doubles(d, PRINT_DIGITS),
        Data::Str(s) if quote => s.iter().map(|x| quote_string(x)).collect(),
        Data::Str(s) => s.to_vec(),
        _ => Vec::new(),
    }
}

fn empty_name(v: &Value) -> &'static str {
    match &v.data {
        Data::Logical(_) => "logical(0)",
        Data::Integer(_) => "integer(0)",
        Data::Double(_) => "numeric(0)",
        Data::Str(_) => "character(0)",
        _ => "list()",
    }
}

fn pad(s: &str, width: usize, left: bool) -> String {
    let n = s.chars().count();
    if n >= width {
        return s.to_string();
    }
    let fill = " ".repeat(width - n);
    if left {
        format!("{s}{fill}")
    } else {
        format!("{fill}{s}")
    }
}

/// `[1] a b c` style lines for an atomic vector.
fn format_atomic(v: &Value) -> String {
    if v.is_empty() {
        return format!("{}\n", empty_name(v));
    }
    let items = format_elements(v, true);
    let left = matches!(v.data, Data::Str(_));
    if let Some(names) = v.names() {
        return format_named(&items, &names, left);
    }
    let width = items.iter().map(|s| s.chars().count()).max().unwrap_or(0);
    let label_width = format!("[{}]", items.len()).len();
    let per_line = ((LINE_WIDTH - label_width) / (width + 1)).max(1);
    let mut out = String::new();
    for (row, chunk) in items.chunks(per_line).enumerate() {
        out.push_str(&pad(&format!("[{}]", row * per_line + 1), label_width, false));
        for item in chunk {
            out.push(' ');
            out.push_str(&pad(item, width, left));
        }
        out.push('\n');
    }
    out
}

fn format_named(items: &[String], names: &[String], left: bool) -> String {
    let width = items
        .iter()
        .chain(names)
        .map(|s| s.chars().count())
        .max()
        .unwrap_or(0);
    let per_line = (LINE_WIDTH / (width + 1)).max(1);
    let mut out = String::new();
    for (ns, vs) in names.chunks(per_line).zip(items.chunks(per_line)) {
        let header: Vec<String> = ns.iter().map(|n| pad(n, width, false)).collect();
        let row: Vec<String> = vs.iter().map(|v| pad(v, width, left)).collect();
        out.push_str(header.join(" ").trim_end());
        out.push('\n');
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

fn closure_text(v: &Value) -> String {
    match &v.data {
        Data::Closure(c) => deparse(&Expr::new(
            ExprKind::Function { formals: c.formals.clone(), body: c.body.clone() },
            Loc::default(),
        )),
        _ => String::new(),
    }
}

/// Attributes printed after the value: everything except names, and except
/// class when the caller has already accounted for it.
fn format_extra_attributes(interp: &mut Interpreter, v: &Value, out: &mut String) -> Flow<()> {
    let Some(attrs) = v.attributes() else { return Ok(()) };
    for (k, a) in attrs.iter() {
        if k == "names" {
            continue;
        }
        out.push_str(&format!("attr(,{})\n", quote_string(k)));
        out.push_str(&format_value(interp, a)?);
    }
    Ok(())
}

fn format_list(interp: &mut Interpreter, v: &Value, items: &[Value], prefix: &str, out: &mut String) -> Flow<()> {
    if items.is_empty() {
        out.push_str(if prefix.is_empty() { "list()\n" } else { "list()\n" });
        return Ok(());
    }
    let names = v.names();
    for (i, item) in items.iter().enumerate() {
        let tag = match names.as_ref().map(|n| n[i].as_str()) {
            Some(n) if !n.is_empty() => format!("{prefix}${}", crate::reader::deparse_name(n)),
            _ => format!("{prefix}[[{}]]", i + 1),
        };
        out.push_str(&tag);
        out.push('\n');
        match &item.data {
            Data::List(inner) if item.class_attribute().is_none() => {
                format_list(interp, item, inner, &tag, out)?;
                format_extra_attributes(interp, item, out)?;
            }
            _ => {
                out.push_str(&format_value(interp, item)?);
                out.push('\n');
            }
        }
    }
    Ok(())
}

/// The default printed form of `v`, ending in a newline.
pub(crate) fn format_value(interp: &mut Interpreter, v: &Value) -> Flow<String> {
    let mut out = String::new();
    match &v.data {
        Data::Null => out.push_str("NULL\n"),
        Data::Logical(_) | Data::Integer(_) | Data::Double(_) | Data::Str(_) => {
            out.push_str(&format_atomic(v));
        }
        Data::List(items) => format_list(interp, v, items, "", &mut out)?,
        Data::Closure(_) => {
            out.push_str(&closure_text(v));
            out.push('\n');
        }
        Data::Builtin(b) => out.push_str(&format!("<builtin: {}>\n", b.name)),
        Data::Expression(e) => {
            out.push_str(&deparse(e));
            out.push('\n');
        }
        Data::Environment(e) => out.push_str(&format!("<environment: {}>\n", e.tag())),
        Data::S4(o) if v.is_generator() => {
            out.push_str(&crate::refclass::format_generator(interp, o));
        }
        Data::S4(o) => {
            out.push_str(&format!("An object of class {}\n", quote_string(&o.class_name)));
            let n = o.slots.len();
            for (i, (k, s)) in o.slots.iter().enumerate() {
                out.push_str(&format!("Slot {}:\n", quote_string(k)));
                out.push_str(&format_value(interp, s)?);
                if i + 1 < n {
                    out.push('\n');
                }
            }
        }
        Data::RefObj(r) => {
            out.push_str(&format!(
                "Reference class object of class {}\n",
                quote_string(&r.class_name)
            ));
            let fields = r.backing.guard().map(|g| g.fields.keys().cloned().collect::<Vec<_>>()).unwrap_or_default();
            for f in fields {
                out.push_str(&format!("Field {}:\n", quote_string(&f)));
                let b = r.backing.get_local(&f).unwrap_or(Binding::Missing);
                let fv = interp.read_binding(&f, b, &r.backing.clone())?;
                out.push_str(&format_value(interp, &fv)?);
            }
            return Ok(out);
        }
    }
    if !matches!(v.data, Data::S4(_)) {
        format_extra_attributes(interp, v, &mut out)?;
    }
    Ok(out)
}

/// A compact single-line rendering used in messages.
pub fn format_inline(v: &Value) -> String {
    match &v.data {
        Data::Null => "NULL".to_string(),
        Data::Logical(_) | Data::Integer(_) | Data::Double(_) | Data::Str(_) => {
            let items = format_elements(v, true);
            let items: Vec<String> = items.iter().map(|s| s.trim().to_string()).collect();
            match items.len() {
                0 => empty_name(v).to_string(),
                1 => items[0].clone(),
                _ => format!("c({})", items.join(", ")),
            }
        }
        Data::List(items) => format!("list({})", items.iter().map(format_inline).collect::<Vec<_>>().join(", ")),
        Data::Closure(_) => closure_text(v),
        Data::Builtin(b) => format!("<builtin: {}>", b.name),
        Data::Expression(e) => deparse(e),
        Data::Environment(e) => format!("<environment: {}>", e.tag()),
        Data::S4(o) => format!("<S4 object of class {}>", quote_string(&o.class_name)),
        Data::RefObj(r) => format!("<reference object of class {}>", quote_string(&r.class_name)),
    }
}

/// Strings written by `cat`: numbers with up to 7 significant digits.
pub fn cat_strings(v: &Value) -> Vec<String> {
    match &v.data {
        Data::Double(d) => d.iter().map(|&x| format_significant(x, PRINT_DIGITS)).collect(),
        Data::List(items) => items.iter().flat_map(cat_strings).collect(),
        Data::Null => Vec::new(),
        _ if v.is_atomic() => format_elements(v, false),
        _ => vec![format_inline(v)],
    }
}
