//! Vector construction, coercion, indexing and string formatting.


use super::arith::Num;
use super::{Builtin, CallArgs, CallCtx};
use crate::error::{bail, EvalError, EvalResult};
use crate::eval::{Flow, Interpreter};
use crate::format::number_to_string;
use crate::value::{identical, Data, Value};

pub(super) fn builtins() -> Vec<Builtin> {
    vec![
        Builtin::eager("c", b_c),
        Builtin::eager("list", b_list),
        Builtin::eager("length", b_length),
        Builtin::eager("names", b_names),
        Builtin::eager("set_names", b_set_names),
        Builtin::eager("numeric", b_numeric),
        Builtin::eager("character", b_character),
        Builtin::eager("logical", b_logical),
        Builtin::eager("integer", b_integer),
        Builtin::eager("seq_len", b_seq_len),
        Builtin::eager("seq_along", b_seq_along),
        Builtin::eager("rev", b_rev),
        Builtin::eager("rep", b_rep),
        Builtin::eager("any", b_any),
        Builtin::eager("all", b_all),
        Builtin::eager("which", b_which),
        Builtin::eager("unlist", b_unlist),
        Builtin::eager("paste", b_paste),
        Builtin::eager("paste0", b_paste0),
        Builtin::eager("sprintf", b_sprintf),
        Builtin::eager("nchar", b_nchar),
        Builtin::eager("as.numeric", b_as_numeric),
        Builtin::eager("as.double", b_as_numeric),
        Builtin::eager("as.integer", b_as_integer),
        Builtin::eager("as.character", b_as_character),
        Builtin::eager("as.logical", b_as_logical),
        Builtin::eager("as.list", b_as_list),
        Builtin::eager("is.numeric", b_is_numeric),
        Builtin::eager("is.character", b_is_character),
        Builtin::eager("is.logical", b_is_logical),
        Builtin::eager("is.function", b_is_function),
        Builtin::eager("is.list", b_is_list),
        Builtin::eager("is.null", b_is_null),
        Builtin::eager("is.environment", b_is_environment),
        Builtin::eager("identical", b_identical),
    ]
}

/// Promotion order for combining atomic kinds and lists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Tier {
    Null,
    Logical,
    Integer,
    Double,
    Str,
    List,
}

fn tier(v: &Value) -> Tier {
    match &v.data {
        Data::Null => Tier::Null,
        Data::Logical(_) => Tier::Logical,
        Data::Integer(_) => Tier::Integer,
        Data::Double(_) => Tier::Double,
        Data::Str(_) => Tier::Str,
        _ => Tier::List,
    }
}

/// Element `i` of `v` as a standalone length-1 value (lists yield the element).
fn element(v: &Value, i: usize) -> Value {
    match &v.data {
        Data::Logical(x) => Value::logical(x[i]),
        Data::Integer(x) => Value::int(x[i]),
        Data::Double(x) => Value::double(x[i]),
        Data::Str(x) => Value::string(x[i].clone()),
        Data::List(x) => x[i].clone(),
        _ => v.clone(),
    }
}

/// Elements of `v` as standalone values; non-vectors are a single element.
fn elements(v: &Value) -> Vec<Value> {
    match &v.data {
        Data::Null => Vec::new(),
        Data::List(x) => x.to_vec(),
        d if matches!(d, Data::Logical(_) | Data::Integer(_) | Data::Double(_) | Data::Str(_)) => {
            (0..v.len()).map(|i| element(v, i)).collect()
        }
        _ => vec![v.clone()],
    }
}

/// Builds a vector of tier `t` from length-1 parts (or arbitrary values for lists).
fn build(t: Tier, parts: Vec<Value>) -> Value {
    match t {
        Tier::Null => Value::null(),
        Tier::Logical => Value::logicals(parts.iter().map(|p| as_logical_scalar(p).unwrap_or(false)).collect()),
        Tier::Integer => Value::ints(parts.iter().map(|p| p.scalar_f64().unwrap_or(0.0) as i64).collect()),
        Tier::Double => Value::doubles(parts.iter().map(|p| p.scalar_f64().unwrap_or(f64::NAN)).collect()),
        Tier::Str => Value::strings(parts.iter().map(|p| coerce_strings(p).pop().unwrap_or_default()).collect()),
        Tier::List => Value::list(parts),
    }
}

/// `c()`: concatenates values, promoting to the highest kind present.
pub(crate) fn combine(items: Vec<(Option<String>, Value)>) -> Value {
    let t = items.iter().map(|(_, v)| tier(v)).max().unwrap_or(Tier::Null);
    let mut parts = Vec::new();
    let mut names = Vec::new();
    let mut any_names = false;
    for (tag, v) in items {
        let inner = v.names();
        let elems = if t == Tier::List && !matches!(v.data, Data::List(_)) { vec![v.clone()] } else { elements(&v) };
        let n = elems.len();
        for (i, e) in elems.into_iter().enumerate() {
            let own = inner.as_ref().map(|ns| ns[i].clone()).filter(|s| !s.is_empty());
            let name = match (&tag, own) {
                (Some(t), Some(o)) => format!("{t}.{o}"),
                (Some(t), None) if n == 1 => t.clone(),
                (Some(t), None) => format!("{t}{}", i + 1),
                (None, Some(o)) => o,
                (None, None) => String::new(),
            };
            any_names |= !name.is_empty();
            names.push(name);
            parts.push(e);
        }
    }
    let out = build(t, parts);
    if any_names {
        out.set_attribute("names", Value::strings(names)).expect("lengths agree")
    } else {
        out
    }
}

fn b_c(_: &mut Interpreter, args: CallArgs, _: &CallCtx) -> Flow<Value> {
    Ok(combine(args.into_items()))
}

fn b_list(_: &mut Interpreter, args: CallArgs, _: &CallCtx) -> Flow<Value> {
    let items = args.into_items();
    let any_names = items.iter().any(|(n, _)| n.is_some());
    let names: Vec<String> = items.iter().map(|(n, _)| n.clone().unwrap_or_default()).collect();
    let out = Value::list(items.into_iter().map(|(_, v)| v).collect());
    if any_names {
        return Ok(out.set_attribute("names", Value::strings(names))?);
    }
    Ok(out)
}

fn one(args: CallArgs, ctx: &CallCtx) -> EvalResult<Value> {
    args.bind(ctx.name, &["x"])?.req(0)
}

fn b_length(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let x = one(args, ctx)?;
    let n = match &x.data {
        Data::RefObj(_) | Data::Environment(_) => x.as_env().map_or(1, |e| e.names().len()),
        _ => x.len(),
    };
    Ok(Value::int(n as i64))
}

fn b_names(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let x = one(args, ctx)?;
    if let Data::Environment(e) = &x.data {
        let mut n = e.names();
        n.sort();
        return Ok(Value::strings(n));
    }
    Ok(x.get_attribute("names"))
}

fn b_set_names(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let mut b = args.bind(ctx.name, &["x", "value"])?;
    let x = b.req(0)?;
    let nm = b.opt(1).unwrap_or_default();
    let nm = if nm.is_null() { nm } else { Value::strings(coerce_strings(&nm)) };
    Ok(x.set_attribute("names", nm)?)
}

fn count_arg(args: CallArgs, ctx: &CallCtx) -> EvalResult<usize> {
    let mut b = args.bind(ctx.name, &["length"])?;
    let n = match b.opt(0) {
        Some(v) => v.scalar_f64().ok_or_else(|| EvalError::new("invalid 'length' argument"))?,
        None => 0.0,
    };
    if !(n >= 0.0) {
        bail!("invalid '{}' argument", ctx.name);
    }
    Ok(n as usize)
}

fn b_numeric(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    Ok(Value::doubles(vec![0.0; count_arg(args, ctx)?]))
}

fn b_character(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    Ok(Value::strings(vec![String::new(); count_arg(args, ctx)?]))
}

fn b_logical(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    Ok(Value::logicals(vec![false; count_arg(args, ctx)?]))
}

fn b_integer(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    Ok(Value::ints(vec![0; count_arg(args, ctx)?]))
}

fn b_seq_len(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let mut b = args.bind(ctx.name, &["length.out"])?;
    let n = b.number(0)?;
    if !(n >= 0.0) {
        bail!("argument of length 0 or negative in seq_len");
    }
    Ok(Value::ints((1..=n as i64).collect()))
}

fn b_seq_along(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let x = args.bind(ctx.name, &["along.with"])?.req(0)?;
    Ok(Value::ints((1..=x.len() as i64).collect()))
}

fn b_rev(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let x = one(args, ctx)?;
    let n = x.len();
    let idx = Value::ints((1..=n as i64).rev().collect());
    subset(&x, &idx)
        .map(|v| if matches!(x.data, Data::List(_)) || n != 1 { v } else { x.clone() })
        .map_err(Into::into)
}

fn b_rep(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let mut b = args.bind(ctx.name, &["x", "times", "each"])?;
    let x = b.req(0)?;
    let times = b.opt(1).map(|v| v.scalar_f64().unwrap_or(-1.0)).unwrap_or(1.0);
    let each = b.opt(2).map(|v| v.scalar_f64().unwrap_or(-1.0)).unwrap_or(1.0);
    if times < 0.0 || each < 0.0 {
        bail!("invalid 'times' or 'each' argument");
    }
    let mut parts = Vec::new();
    for _ in 0..times as usize {
        for e in elements(&x) {
            for _ in 0..each as usize {
                parts.push(e.clone());
            }
        }
    }
    Ok(build(tier(&x), parts))
}

fn logicals_of(args: CallArgs, what: &str) -> EvalResult<Vec<bool>> {
    let mut out = Vec::new();
    for v in args.values() {
        match &v.data {
            Data::Logical(b) => out.extend(b.iter()),
            Data::Null => {}
            _ => match Num::of(v, what)? {
                Num::Int(x) => out.extend(x.iter().map(|&p| p != 0)),
                Num::Dbl(x) => out.extend(x.iter().map(|&p| p != 0.0)),
            },
        }
    }
    Ok(out)
}

fn b_any(_: &mut Interpreter, args: CallArgs, _: &CallCtx) -> Flow<Value> {
    Ok(Value::logical(logicals_of(args, "any")?.into_iter().any(|b| b)))
}

fn b_all(_: &mut Interpreter, args: CallArgs, _: &CallCtx) -> Flow<Value> {
    Ok(Value::logical(logicals_of(args, "all")?.into_iter().all(|b| b)))
}

fn b_which(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let x = one(args, ctx)?;
    let Data::Logical(b) = &x.data else { bail!("argument to 'which' is not logical") };
    let pos = b.iter().enumerate().filter(|(_, &t)| t).map(|(i, _)| i as i64 + 1).collect();
    Ok(Value::ints(pos))
}

fn b_unlist(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let x = one(args, ctx)?;
    match &x.data {
        Data::List(items) => {
            let names = x.names();
            let parts = items
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let tag = names.as_ref().map(|n| n[i].clone()).filter(|s| !s.is_empty());
                    let flat = if matches!(v.data, Data::List(_)) {
                        combine(vec![(None, v.clone())])
                    } else {
                        v.clone()
                    };
                    (tag, flat)
                })
                .collect();
            Ok(combine(parts))
        }
        _ => Ok(x),
    }
}

/// Character view of an atomic value, as `as.character` would produce.
pub(crate) fn coerce_strings(v: &Value) -> Vec<String> {
    match &v.data {
        Data::Null => Vec::new(),
        Data::Logical(b) => b.iter().map(|&x| if x { "TRUE" } else { "FALSE" }.to_string()).collect(),
        Data::Integer(i) => i.iter().map(|x| x.to_string()).collect(),
        Data::Double(d) => d.iter().map(|&x| number_to_string(x)).collect(),
        Data::Str(s) => s.to_vec(),
        Data::List(items) => items
            .iter()
            .map(|i| {
                if i.len() == 1 && i.is_atomic() {
                    coerce_strings(i).pop().unwrap_or_default()
                } else {
                    crate::format::format_inline(i)
                }
            })
            .collect(),
        _ => vec![crate::format::format_inline(v)],
    }
}

fn paste_impl(args: CallArgs, default_sep: &str) -> EvalResult<Value> {
    let mut sep = default_sep.to_string();
    let mut collapse = None;
    let mut cols = Vec::new();
    for (name, v) in args.into_items() {
        match name.as_deref() {
            Some("sep") => sep = v.scalar_str().ok_or_else(|| EvalError::new("invalid separator"))?.to_string(),
            Some("collapse") if !v.is_null() => {
                collapse = Some(v.scalar_str().ok_or_else(|| EvalError::new("invalid 'collapse' argument"))?.to_string())
            }
            Some("collapse") => {}
            _ => cols.push(coerce_strings(&v)),
        }
    }
    cols.retain(|c| !c.is_empty());
    let n = cols.iter().map(Vec::len).max().unwrap_or(0);
    let rows: Vec<String> = (0..n)
        .map(|i| cols.iter().map(|c| c[i % c.len()].as_str()).collect::<Vec<_>>().join(&sep))
        .collect();
    Ok(match collapse {
        Some(c) => Value::string(rows.join(&c)),
        None => Value::strings(rows),
    })
}

fn b_paste(_: &mut Interpreter, args: CallArgs, _: &CallCtx) -> Flow<Value> {
    Ok(paste_impl(args, " ")?)
}

fn b_paste0(_: &mut Interpreter, args: CallArgs, _: &CallCtx) -> Flow<Value> {
    Ok(paste_impl(args, "")?)
}

fn b_nchar(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let x = one(args, ctx)?;
    Ok(Value::ints(coerce_strings(&x).iter().map(|s| s.chars().count() as i64).collect()))
}

/// One `%` directive of a format string.
struct Spec {
    flags: String,
    width: Option<usize>,
    precision: Option<usize>,
    conv: char,
}

fn parse_format(fmt: &str) -> EvalResult<Vec<Result<String, Spec>>> {
    let mut out = Vec::new();
    let mut lit = String::new();
    let mut chars = fmt.chars().peekable();
    while let Some(c) = chars.next() {
        if c != '%' {
            lit.push(c);
            continue;
        }
        if chars.peek() == Some(&'%') {
            chars.next();
            lit.push('%');
            continue;
        }
        if !lit.is_empty() {
            out.push(Ok(std::mem::take(&mut lit)));
        }
        let mut flags = String::new();
        while let Some(&f) = chars.peek().filter(|f| "-+ 0".contains(**f)) {
            flags.push(f);
            chars.next();
        }
        let mut digits = String::new();
        while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
            digits.push(d);
            chars.next();
        }
        let width = digits.parse().ok();
        let mut precision = None;
        if chars.peek() == Some(&'.') {
            chars.next();
            let mut p = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                p.push(d);
                chars.next();
            }
            precision = Some(p.parse().unwrap_or(0));
        }
        match chars.next() {
            Some(conv) if "sdifeg".contains(conv) => out.push(Err(Spec { flags, width, precision, conv })),
            Some(other) => bail!("unrecognised format specification '%{other}'"),
            None => bail!("unrecognised format specification '%'"),
        }
    }
    if !lit.is_empty() {
        out.push(Ok(lit));
    }
    Ok(out)
}

fn render(spec: &Spec, v: &Value, i: usize) -> EvalResult<String> {
    let body = match spec.conv {
        's' => {
            let s = coerce_strings(v);
            let s = s[i % s.len()].clone();
            match spec.precision {
                Some(p) => s.chars().take(p).collect(),
                None => s,
            }
        }
        'd' | 'i' => match &v.data {
            Data::Integer(x) => x[i % x.len()].to_string(),
            Data::Logical(x) => (x[i % x.len()] as i64).to_string(),
            Data::Double(x) if x[i % x.len()].fract() == 0.0 => format!("{}", x[i % x.len()] as i64),
            _ => bail!("invalid format '%{}'; use format %f, %e, %g or %s for this kind of object", spec.conv),
        },
        conv => {
            let x = Num::of(v, "sprintf")
                .map_err(|_| EvalError::new(format!("invalid format '%{conv}'; use format %s for character objects")))?
                .doubles();
            let x = x[i % x.len()];
            let p = spec.precision.unwrap_or(6);
            match conv {
                'f' => format!("{x:.p$}"),
                'e' => c_exp(x, p),
                _ => crate::format::format_significant(x, p.max(1)),
            }
        }
    };
    let body = if spec.flags.contains('+') && !body.starts_with('-') && spec.conv != 's' {
        format!("+{body}")
    } else {
        body
    };
    let w = spec.width.unwrap_or(0);
    let len = body.chars().count();
    if len >= w {
        return Ok(body);
    }
    let pad = w - len;
    Ok(if spec.flags.contains('-') {
        format!("{body}{}", " ".repeat(pad))
    } else if spec.flags.contains('0') && spec.conv != 's' {
        let (sign, digits) = body.split_at(if body.starts_with(['-', '+']) { 1 } else { 0 });
        format!("{sign}{}{digits}", "0".repeat(pad))
    } else {
        format!("{}{body}", " ".repeat(pad))
    })
}

/// C-style `%e`: mantissa with `p` decimals and a signed two-digit exponent.
pub(crate) fn c_exp(x: f64, p: usize) -> String {
    let s = format!("{x:.p$e}");
    match s.split_once('e') {
        Some((m, e)) => {
            let (sign, digits) = match e.strip_prefix('-') {
                Some(d) => ('-', d),
                None => ('+', e),
            };
            format!("{m}e{sign}{digits:0>2}")
        }
        None => s,
    }
}

fn b_sprintf(_: &mut Interpreter, args: CallArgs, _: &CallCtx) -> Flow<Value> {
    let mut items = args.into_items().into_iter();
    let Some((_, fmt)) = items.next() else { bail!("'fmt' argument is missing") };
    let Some(fmt) = fmt.scalar_str() else { bail!("'fmt' is not a character vector") };
    let pieces = parse_format(fmt)?;
    let vals: Vec<Value> = items.map(|(_, v)| v).collect();
    let nspecs = pieces.iter().filter(|p| p.is_err()).count();
    if nspecs > vals.len() {
        bail!("too few arguments");
    }
    if vals.iter().any(Value::is_empty) {
        return Ok(Value::strings(Vec::new()));
    }
    let n = vals.iter().map(Value::len).max().unwrap_or(1);
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut s = String::new();
        let mut k = 0;
        for p in &pieces {
            match p {
                Ok(lit) => s.push_str(lit),
                Err(spec) => {
                    s.push_str(&render(spec, &vals[k], i)?);
                    k += 1;
                }
            }
        }
        rows.push(s);
    }
    Ok(Value::strings(rows))
}

fn parse_number(s: &str) -> Option<f64> {
    match s.trim() {
        "Inf" => Some(f64::INFINITY),
        "-Inf" => Some(f64::NEG_INFINITY),
        "NaN" => Some(f64::NAN),
        t => t.parse().ok(),
    }
}

fn b_as_numeric(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let x = one(args, ctx)?;
    let out = match &x.data {
        Data::Str(s) => s
            .iter()
            .map(|t| parse_number(t).ok_or_else(|| EvalError::new(format!("cannot coerce '{t}' to numeric"))))
            .collect::<EvalResult<Vec<_>>>()?,
        Data::List(items) => items
            .iter()
            .map(|i| match (i.len(), i.scalar_f64()) {
                (1, Some(v)) => Ok(v),
                _ => Err(EvalError::new("'list' object cannot be coerced to type 'double'")),
            })
            .collect::<EvalResult<Vec<_>>>()?,
        _ => Num::of(&x, "as.numeric")?.doubles(),
    };
    Ok(Value::doubles(out))
}

fn b_as_integer(i: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let d = b_as_numeric(i, args, ctx)?;
    let x = d.as_doubles().unwrap_or_default();
    if x.iter().any(|p| !p.is_finite()) {
        bail!("cannot coerce non-finite values to integer");
    }
    Ok(Value::ints(x.iter().map(|&p| p.trunc() as i64).collect()))
}

fn b_as_character(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    Ok(Value::strings(coerce_strings(&one(args, ctx)?)))
}

fn b_as_logical(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let x = one(args, ctx)?;
    let out = match &x.data {
        Data::Str(s) => s
            .iter()
            .map(|t| match t.as_str() {
                "TRUE" | "true" | "T" | "True" => Ok(true),
                "FALSE" | "false" | "F" | "False" => Ok(false),
                _ => Err(EvalError::new(format!("cannot coerce '{t}' to logical"))),
            })
            .collect::<EvalResult<Vec<_>>>()?,
        Data::Logical(b) => b.to_vec(),
        _ => Num::of(&x, "as.logical")?.doubles().into_iter().map(|p| p != 0.0).collect(),
    };
    Ok(Value::logicals(out))
}

fn b_as_list(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let x = one(args, ctx)?;
    if matches!(x.data, Data::List(_)) {
        return Ok(x);
    }
    let out = Value::list(elements(&x));
    match x.names() {
        Some(_) => Ok(out.set_attribute("names", x.get_attribute("names"))?),
        None => Ok(out),
    }
}

fn predicate(args: CallArgs, ctx: &CallCtx, test: fn(&Value) -> bool) -> Flow<Value> {
    Ok(Value::logical(test(&one(args, ctx)?)))
}

fn b_is_numeric(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    predicate(args, ctx, |v| matches!(v.data, Data::Double(_) | Data::Integer(_)))
}

fn b_is_character(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    predicate(args, ctx, |v| matches!(v.data, Data::Str(_)))
}

fn b_is_logical(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    predicate(args, ctx, |v| matches!(v.data, Data::Logical(_)))
}

fn b_is_function(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    predicate(args, ctx, Value::is_function)
}

fn b_is_list(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    predicate(args, ctx, |v| matches!(v.data, Data::List(_)))
}

fn b_is_null(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    predicate(args, ctx, Value::is_null)
}

fn b_is_environment(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    predicate(args, ctx, |v| matches!(v.data, Data::Environment(_)))
}

fn b_identical(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let mut b = args.bind(ctx.name, &["x", "y"])?;
    let (x, y) = (b.req(0)?, b.req(1)?);
    Ok(Value::logical(identical(&x, &y)))
}

/// A length-1 value read as TRUE/FALSE, if it has that shape.
pub(crate) fn as_logical_scalar(v: &Value) -> Option<bool> {
    match &v.data {
        Data::Logical(b) if b.len() == 1 => Some(b[0]),
        Data::Integer(i) if i.len() == 1 => Some(i[0] != 0),
        Data::Double(d) if d.len() == 1 && !d[0].is_nan() => Some(d[0] != 0.0),
        _ => None,
    }
}

// ----------------------------------------------------------------------
// Indexing
// ----------------------------------------------------------------------

/// Zero-based positions selected by `idx` in a vector of length `n` with
/// optional `names`. Positions at or past `n` are only allowed when `extend`.
fn positions(idx: &Value, n: usize, names: Option<&[String]>, extend: bool) -> EvalResult<Vec<PosRef>> {
    match &idx.data {
        Data::Null => Ok(Vec::new()),
        Data::Logical(b) => {
            if b.len() > n && !extend {
                bail!("(subscript) logical subscript too long");
            }
            let m = n.max(b.len());
            if b.is_empty() {
                return Ok(Vec::new());
            }
            Ok((0..m).filter(|&i| b[i % b.len()]).map(PosRef::At).collect())
        }
        Data::Integer(_) | Data::Double(_) => {
            let x = Num::of(idx, "[")?.doubles();
            if x.iter().any(|p| p.is_nan()) {
                bail!("invalid subscript: NaN");
            }
            let neg = x.iter().any(|&p| p < 0.0);
            let pos = x.iter().any(|&p| p > 0.0);
            if neg && pos {
                bail!("can't mix positive and negative subscripts");
            }
            if neg {
                let drop: Vec<usize> = x.iter().map(|&p| (-p) as usize).collect();
                return Ok((0..n).filter(|i| !drop.contains(&(i + 1))).map(PosRef::At).collect());
            }
            let mut out = Vec::new();
            for &p in &x {
                let p = p.trunc() as usize;
                if p == 0 {
                    continue;
                }
                if p > n && !extend {
                    bail!("subscript out of bounds");
                }
                out.push(PosRef::At(p - 1));
            }
            Ok(out)
        }
        Data::Str(s) => {
            let mut out = Vec::new();
            for key in s.iter() {
                match names.and_then(|ns| ns.iter().position(|k| k == key)) {
                    Some(i) => out.push(PosRef::At(i)),
                    None if extend => out.push(PosRef::New(key.clone())),
                    None => bail!("subscript out of bounds: no element named '{key}'"),
                }
            }
            Ok(out)
        }
        _ => bail!("invalid subscript type '{}'", idx.base_class()),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum PosRef {
    At(usize),
    /// A name not yet present; assignment appends it.
    New(String),
}

fn is_scalar_selector(idx: &Value) -> bool {
    idx.len() == 1 && matches!(idx.data, Data::Integer(_) | Data::Double(_) | Data::Str(_)) && idx.scalar_f64().is_none_or(|p| p > 0.0)
}

fn subset(x: &Value, idx: &Value) -> EvalResult<Value> {
    let names = x.names();
    let pos = positions(idx, x.len(), names.as_deref(), false)?;
    let at: Vec<usize> = pos
        .into_iter()
        .map(|p| match p {
            PosRef::At(i) => i,
            PosRef::New(_) => unreachable!("not extending"),
        })
        .collect();
    let out = match &x.data {
        Data::Logical(v) => Value::logicals(at.iter().map(|&i| v[i]).collect()),
        Data::Integer(v) => Value::ints(at.iter().map(|&i| v[i]).collect()),
        Data::Double(v) => Value::doubles(at.iter().map(|&i| v[i]).collect()),
        Data::Str(v) => Value::strings(at.iter().map(|&i| v[i].clone()).collect()),
        Data::List(v) => Value::list(at.iter().map(|&i| v[i].clone()).collect()),
        _ => unreachable!("checked by caller"),
    };
    match names {
        Some(ns) => Ok(out.set_attribute("names", Value::strings(at.iter().map(|&i| ns[i].clone()).collect()))?),
        None => Ok(out),
    }
}

/// `x[i]`. A single positive or name index on a list yields the element itself.
pub(crate) fn index_get(x: &Value, idx: &[Value]) -> EvalResult<Value> {
    let i = match idx {
        [] => return Ok(x.clone()),
        [i] => i,
        _ => bail!("incorrect number of dimensions"),
    };
    match &x.data {
        Data::Null => Ok(Value::null()),
        Data::List(items) if is_scalar_selector(i) => {
            let names = x.names();
            match positions(i, items.len(), names.as_deref(), false)?.as_slice() {
                [PosRef::At(p)] => Ok(items[*p].clone()),
                _ => bail!("subscript out of bounds"),
            }
        }
        Data::Logical(_) | Data::Integer(_) | Data::Double(_) | Data::Str(_) | Data::List(_) => subset(x, i),
        _ => bail!("object of type '{}' is not subsettable", x.base_class()),
    }
}

fn zero_of(t: Tier) -> Value {
    match t {
        Tier::Null | Tier::List => Value::null(),
        Tier::Logical => Value::logical(false),
        Tier::Integer => Value::int(0),
        Tier::Double => Value::double(f64::NAN),
        Tier::Str => Value::string(""),
    }
}

/// `x[i] <- v`, returning the updated copy of `x`.
pub(crate) fn index_set(x: Value, idx: &[Value], v: Value) -> EvalResult<Value> {
    let i = match idx {
        [i] => i,
        [] => bail!("empty subscript in assignment is not supported"),
        _ => bail!("incorrect number of dimensions"),
    };
    if !(x.is_null() || x.is_atomic() || matches!(x.data, Data::List(_))) {
        bail!("object of type '{}' is not subsettable", x.base_class());
    }
    let names = x.names();
    let pos = positions(i, x.len(), names.as_deref(), true)?;
    let scalar = is_scalar_selector(i);
    if matches!(x.data, Data::List(_)) {
        return list_set(x, pos, v, scalar);
    }
    if !v.is_atomic() && !v.is_null() {
        let as_list = build(Tier::List, elements(&x)).with_names_of(&x)?;
        return list_set(as_list, pos, v, scalar);
    }
    let (xt, vt) = (tier(&x), tier(&v));
    if pos.is_empty() {
        return Ok(x);
    }
    if v.is_empty() {
        bail!("replacement has length zero");
    }
    if pos.len() % v.len() != 0 {
        bail!("number of items to replace is not a multiple of replacement length");
    }
    let t = xt.max(vt);
    let mut parts = elements(&x);
    let mut nm: Vec<String> = names.clone().unwrap_or_else(|| vec![String::new(); parts.len()]);
    let mut named = names.is_some();
    let vals = elements(&v);
    for (k, p) in pos.into_iter().enumerate() {
        let slot = match p {
            PosRef::At(j) => j,
            PosRef::New(key) => {
                named = true;
                nm.push(key);
                parts.push(zero_of(t));
                parts.len() - 1
            }
        };
        while parts.len() <= slot {
            parts.push(zero_of(t));
            nm.push(String::new());
        }
        parts[slot] = vals[k % vals.len()].clone();
    }
    let out = build(t, parts).with_attributes_of(&x);
    if named {
        return Ok(out.set_attribute("names", Value::strings(nm))?);
    }
    Ok(out)
}

impl Value {
    fn with_names_of(self, other: &Value) -> EvalResult<Value> {
        match other.names() {
            Some(_) => self.set_attribute("names", other.get_attribute("names")),
            None => Ok(self),
        }
    }
}

fn list_set(x: Value, pos: Vec<PosRef>, v: Value, scalar: bool) -> EvalResult<Value> {
    let mut items: Vec<Value> = elements(&x);
    let names = x.names();
    let mut nm: Vec<String> = names.clone().unwrap_or_else(|| vec![String::new(); items.len()]);
    let mut named = names.is_some();
    let mut slots = Vec::new();
    for p in pos {
        match p {
            PosRef::At(j) => {
                while items.len() <= j {
                    items.push(Value::null());
                    nm.push(String::new());
                }
                slots.push(j);
            }
            PosRef::New(key) => {
                named = true;
                items.push(Value::null());
                nm.push(key);
                slots.push(items.len() - 1);
            }
        }
    }
    if v.is_null() {
        let mut keep = vec![true; items.len()];
        for s in slots {
            keep[s] = false;
        }
        let mut k = keep.iter();
        items.retain(|_| *k.next().unwrap());
        let mut k = keep.iter();
        nm.retain(|_| *k.next().unwrap());
    } else if scalar || !(v.is_atomic() || matches!(v.data, Data::List(_))) {
        for s in slots {
            items[s] = v.clone();
        }
    } else {
        let vals = elements(&v);
        if vals.is_empty() && !slots.is_empty() {
            bail!("replacement has length zero");
        }
        for (k, s) in slots.into_iter().enumerate() {
            items[s] = vals[k % vals.len()].clone();
        }
    }
    let mut out = Value::list(items).with_attributes_of(&x);
    out = out.set_attribute("names", Value::null())?;
    if named {
        out = out.set_attribute("names", Value::strings(nm))?;
    }
    Ok(out)
}

/// `x$name` on lists; NULL when absent.
pub(crate) fn field_get_list(x: &Value, name: &str) -> EvalResult<Value> {
    match &x.data {
        Data::Null => Ok(Value::null()),
        Data::List(items) => {
            let pos = x.names().and_then(|ns| ns.iter().position(|k| k == name));
            Ok(pos.map(|p| items[p].clone()).unwrap_or_default())
        }
        Data::S4(o) => match o.slots.get(name) {
            Some(v) => Ok(v.clone()),
            None => bail!("no slot of name \"{name}\" for this object of class \"{}\"", o.class_name),
        },
        _ => bail!("$ operator is invalid for atomic vectors"),
    }
}

/// `x$name <- v` on lists; NULL removes the element.
pub(crate) fn field_set_list(x: Value, name: &str, v: Value) -> EvalResult<Value> {
    match &x.data {
        Data::Null | Data::List(_) => index_set(x, &[Value::string(name)], v.clone()).and_then(|r| {
            if matches!(r.data, Data::List(_)) || v.is_null() {
                Ok(r)
            } else {
                list_set(Value::list(Vec::new()), vec![PosRef::New(name.to_string())], v, true)
            }
        }),
        _ => bail!("$ operator is invalid for atomic vectors"),
    }
}

/// Shared storage check used by tests of copy-on-modify.
#[cfg(test)]
fn shares_storage(a: &Value, b: &Value) -> bool {
    match (&a.data, &b.data) {
        (Data::Double(x), Data::Double(y)) => std::rc::Rc::ptr_eq(x, y),
        _ => false,
    }
}
