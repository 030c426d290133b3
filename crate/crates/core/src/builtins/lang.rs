//! Language-level builtins: quoting, environments, conditions, printing,
//! options, the random number generator and foreign stubs.

use super::{combine, field_get_list, Builtin, CallArgs, CallCtx};
use crate::env::{Binding, EnvRef, PromiseState};
use crate::error::{bail, EvalError};
use crate::eval::{literal_value, Flow, Interpreter, Unwind};
use crate::format::{cat_strings, format_elements};
use crate::reader::{Arg, ExprKind};
use crate::value::{implicit_class, Data, Value};

pub(super) fn builtins() -> Vec<Builtin> {
    vec![
        Builtin::special("quote", b_quote),
        Builtin::eager("eval", b_eval),
        Builtin::special("missing", b_missing),
        Builtin::eager("return", b_return),
        Builtin::eager("invisible", b_invisible),
        Builtin::eager("stop", b_stop),
        Builtin::eager("warning", b_warning),
        Builtin::eager("stopifnot", b_stopifnot),
        Builtin::eager("print", b_print),
        Builtin::eager("print.default", b_print_default),
        Builtin::eager("cat", b_cat),
        Builtin::eager("format", b_format),
        Builtin::eager("environment", b_environment),
        Builtin::eager("new_env", b_new_env),
        Builtin::eager("globalenv", b_globalenv),
        Builtin::eager("assign", b_assign),
        Builtin::eager("get", b_get),
        Builtin::eager("exists", b_exists),
        Builtin::eager("options", b_options),
        Builtin::eager("get_option", b_get_option),
        Builtin::eager("get_option_from", b_get_option_from),
        Builtin::eager("set_seed", b_set_seed),
        Builtin::eager("rng_draw", b_rng_draw),
        Builtin::eager("foreign", b_foreign),
        Builtin::eager("attr", b_attr),
        Builtin::eager("set_attr", b_set_attr),
        Builtin::eager("structure", b_structure),
        Builtin::eager("class", b_class),
        Builtin::eager("unclass", b_unclass),
        Builtin::eager("deep_copy", b_deep_copy),
        Builtin::eager("lapply", b_lapply),
        Builtin::eager("sapply", b_sapply),
    ]
}

fn b_quote(_: &mut Interpreter, args: &[Arg], _: &CallCtx) -> Flow<Value> {
    let [a] = args else { bail!("quote() takes exactly one argument") };
    Ok(match &a.value.kind {
        ExprKind::Constant(lit) => literal_value(lit),
        _ => Value::expression(a.value.clone()),
    })
}

fn env_arg(v: Option<Value>, default: &EnvRef, what: &str) -> Flow<EnvRef> {
    match v {
        None => Ok(default.clone()),
        Some(v) => match &v.data {
            Data::Environment(e) => Ok(e.clone()),
            Data::RefObj(r) => Ok(r.backing.clone()),
            _ => bail!("invalid '{what}' argument: not an environment"),
        },
    }
}

fn b_eval(interp: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let mut b = args.bind(ctx.name, &["expr", "envir"])?;
    let expr = b.req(0)?;
    let env = env_arg(b.opt(1), &ctx.env, "envir")?;
    match &expr.data {
        Data::Expression(e) => {
            let e = e.clone();
            interp.ev(&e, &env)
        }
        _ => Ok(expr),
    }
}

/// True when `name` in `env` is a formal with no supplied argument.
fn is_missing(interp: &Interpreter, name: &str, env: &EnvRef) -> Flow<bool> {
    match env.get_local(name) {
        Some(Binding::Missing) => Ok(true),
        Some(Binding::Lazy(p)) => {
            if let Some(frame) = interp.frame_for(env) {
                if !frame.args.iter().any(|s| s.promise.ptr_eq(&p)) {
                    return Ok(true);
                }
            }
            match p.state() {
                PromiseState::Pending { expr, env: origin } => match expr.as_symbol() {
                    Some(sym) if interp.frame_for(&origin).is_some() && origin.has_local(sym) => {
                        is_missing(interp, sym, &origin)
                    }
                    _ => Ok(false),
                },
                _ => Ok(false),
            }
        }
        Some(_) => Ok(false),
        None => bail!("'missing' can only be used for arguments"),
    }
}

fn b_missing(interp: &mut Interpreter, args: &[Arg], ctx: &CallCtx) -> Flow<Value> {
    let [a] = args else { bail!("'missing' takes exactly one argument") };
    let Some(name) = a.value.as_symbol() else { bail!("invalid use of 'missing'") };
    Ok(Value::logical(is_missing(interp, name, &ctx.env)?))
}

fn b_return(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let value = args.bind(ctx.name, &["value"])?.opt(0).unwrap_or_default();
    Err(Unwind::Return { value, target: ctx.env.clone() })
}

fn b_invisible(interp: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let v = args.bind(ctx.name, &["x"])?.opt(0).unwrap_or_default();
    interp.set_invisible();
    Ok(v)
}

fn message(args: CallArgs) -> String {
    args.values().flat_map(cat_strings).collect::<Vec<_>>().concat()
}

fn b_stop(_: &mut Interpreter, args: CallArgs, _: &CallCtx) -> Flow<Value> {
    Err(EvalError::new(message(args)).into())
}

fn b_warning(interp: &mut Interpreter, args: CallArgs, _: &CallCtx) -> Flow<Value> {
    let msg = message(args);
    interp.warn(msg.clone());
    interp.set_invisible();
    Ok(Value::string(msg))
}

fn b_stopifnot(interp: &mut Interpreter, args: CallArgs, _: &CallCtx) -> Flow<Value> {
    for (i, v) in args.values().enumerate() {
        let ok = match &v.data {
            Data::Logical(b) => b.iter().all(|&x| x),
            _ => false,
        };
        if !ok {
            bail!("stopifnot: condition {} is not all TRUE", i + 1);
        }
    }
    interp.set_invisible();
    Ok(Value::null())
}

fn b_print(interp: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let x = args.into_items().into_iter().next().map(|(_, v)| v).unwrap_or_default();
    interp.print_dispatch(&x, &ctx.env)?;
    interp.set_invisible();
    Ok(x)
}

fn b_print_default(interp: &mut Interpreter, args: CallArgs, _: &CallCtx) -> Flow<Value> {
    let x = args.into_items().into_iter().next().map(|(_, v)| v).unwrap_or_default();
    let text = interp.format_value(&x)?;
    interp.write_out(&text);
    interp.set_invisible();
    Ok(x)
}

fn b_cat(interp: &mut Interpreter, args: CallArgs, _: &CallCtx) -> Flow<Value> {
    let mut sep = " ".to_string();
    let mut parts = Vec::new();
    for (name, v) in args.into_items() {
        if name.as_deref() == Some("sep") {
            sep = v.scalar_str().ok_or_else(|| EvalError::new("invalid 'sep' specification"))?.to_string();
        } else {
            parts.extend(cat_strings(&v));
        }
    }
    let text = parts.join(&sep);
    interp.write_out(&text);
    interp.set_invisible();
    Ok(Value::null())
}

fn b_format(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let mut b = args.bind(ctx.name, &["x", "digits", "nsmall"])?;
    let x = b.req(0)?;
    let digits = b.opt(1).and_then(|d| d.scalar_f64()).unwrap_or(7.0).clamp(1.0, 22.0) as usize;
    let nsmall = b.opt(2).and_then(|d| d.scalar_f64()).unwrap_or(0.0).clamp(0.0, 20.0) as usize;
    let strs = match &x.data {
        Data::Double(d) => {
            let base = crate::format::format_doubles(d, digits);
            if nsmall == 0 {
                base
            } else {
                base.into_iter()
                    .zip(d.iter())
                    .map(|(s, &v)| {
                        let have = s.split_once('.').map_or(0, |(_, f)| f.len());
                        if v.is_finite() && !s.contains('e') && have < nsmall {
                            format!("{v:.nsmall$}")
                        } else {
                            s
                        }
                    })
                    .collect()
            }
        }
        _ if x.is_atomic() => format_elements(&x, false),
        _ => vec![crate::format::format_inline(&x)],
    };
    let out = Value::strings(strs);
    match x.names() {
        Some(_) => Ok(out.set_attribute("names", x.get_attribute("names"))?),
        None => Ok(out),
    }
}

fn b_environment(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    match args.bind(ctx.name, &["fun"])?.opt(0) {
        None => Ok(Value::environment(ctx.env.clone())),
        Some(f) => match &f.data {
            Data::Closure(c) => Ok(Value::environment(c.env.clone())),
            Data::Null => Ok(Value::environment(ctx.env.clone())),
            _ => Ok(Value::null()),
        },
    }
}

fn b_new_env(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let parent = env_arg(args.bind(ctx.name, &["parent"])?.opt(0), &ctx.env, "parent")?;
    Ok(Value::environment(EnvRef::new_child(&parent, "new_env")))
}

fn b_globalenv(interp: &mut Interpreter, _: CallArgs, _: &CallCtx) -> Flow<Value> {
    Ok(Value::environment(interp.global().clone()))
}

fn b_assign(interp: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let mut b = args.bind(ctx.name, &["x", "value", "envir"])?;
    let name = b.string(0)?;
    let value = b.req(1)?;
    let env = env_arg(b.opt(2), &ctx.env, "envir")?;
    interp.assign_in_frame(&env, &name, value.clone())?;
    interp.set_invisible();
    Ok(value)
}

fn b_get(interp: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let mut b = args.bind(ctx.name, &["x", "envir"])?;
    let name = b.string(0)?;
    let env = env_arg(b.opt(1), &ctx.env, "envir")?;
    interp.lookup(&name, &env)
}

fn b_exists(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let mut b = args.bind(ctx.name, &["x", "envir"])?;
    let name = b.string(0)?;
    let env = env_arg(b.opt(1), &ctx.env, "envir")?;
    Ok(Value::logical(env.find_frame(&name).is_some()))
}

/// `options("name", value)` or `options(name = value, ...)`; returns the
/// previous values. With no arguments, returns the whole table.
fn b_options(interp: &mut Interpreter, args: CallArgs, _: &CallCtx) -> Flow<Value> {
    let items = args.into_items();
    if items.is_empty() {
        return Ok(interp.options_list());
    }
    let mut pairs = Vec::new();
    if let [(None, key), (None, value)] = items.as_slice() {
        let Some(k) = key.scalar_str() else { bail!("invalid option name") };
        pairs.push((k.to_string(), value.clone()));
    } else if let [(None, key)] = items.as_slice() {
        let Some(k) = key.scalar_str() else { bail!("invalid option name") };
        return Ok(interp.get_option(k));
    } else {
        for (name, v) in items {
            let Some(n) = name else { bail!("options must be named, or given as (name, value)") };
            pairs.push((n, v));
        }
    }
    let mut old = Vec::new();
    for (k, v) in pairs {
        old.push((k.clone(), interp.set_option(&k, v)?));
    }
    interp.set_invisible();
    if old.len() == 1 {
        return Ok(old.pop().expect("one").1);
    }
    Ok(Value::named_list(old))
}

fn b_get_option(interp: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let mut b = args.bind(ctx.name, &["x", "default"])?;
    let name = b.string(0)?;
    let v = interp.get_option(&name);
    if v.is_null() {
        return Ok(b.opt(1).unwrap_or_default());
    }
    Ok(v)
}

fn b_get_option_from(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let mut b = args.bind(ctx.name, &["opts", "x", "default"])?;
    let opts = b.req(0)?;
    let name = b.string(1)?;
    let v = field_get_list(&opts, &name)?;
    if v.is_null() {
        return Ok(b.opt(2).unwrap_or_default());
    }
    Ok(v)
}

fn b_set_seed(interp: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let mut b = args.bind(ctx.name, &["seed"])?;
    let s = b.number(0)?;
    if !s.is_finite() {
        bail!("supplied seed is not a valid integer");
    }
    interp.set_seed(s as i64);
    interp.set_invisible();
    Ok(Value::null())
}

fn b_rng_draw(interp: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let mut b = args.bind(ctx.name, &["n"])?;
    let n = match b.opt(0) {
        Some(v) => v.scalar_f64().ok_or_else(|| EvalError::new("invalid 'n' argument"))?,
        None => 1.0,
    };
    if n.is_nan() {
        bail!("invalid 'n' argument");
    }
    Ok(Value::doubles(interp.rng_draw(n as i64)?))
}

fn b_foreign(interp: &mut Interpreter, args: CallArgs, _: &CallCtx) -> Flow<Value> {
    let mut items = args.into_items().into_iter().map(|(_, v)| v);
    let tag = items.next().unwrap_or_default();
    let Some(tag) = tag.scalar_str() else { bail!("foreign: first argument must be a tag string") };
    let Some(f) = interp.foreign_fn(tag) else { bail!("foreign: unknown tag '{tag}'") };
    let rest: Vec<Value> = items.collect();
    Ok(f(&rest)?)
}

fn b_attr(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let mut b = args.bind(ctx.name, &["x", "which"])?;
    let x = b.req(0)?;
    let which = b.string(1)?;
    Ok(x.get_attribute(&which))
}

fn b_set_attr(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let mut b = args.bind(ctx.name, &["x", "which", "value"])?;
    let x = b.req(0)?;
    let which = b.string(1)?;
    let value = b.opt(2).unwrap_or_default();
    Ok(x.set_attribute(&which, value)?)
}

fn b_structure(_: &mut Interpreter, args: CallArgs, _: &CallCtx) -> Flow<Value> {
    let mut items = args.into_items().into_iter();
    let Some((_, mut x)) = items.next() else { bail!("argument \".Data\" is missing, with no default") };
    for (name, v) in items {
        let Some(n) = name else { bail!("attributes must be named") };
        x = x.set_attribute(&n, v)?;
    }
    Ok(x)
}

fn b_class(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let x = args.bind(ctx.name, &["x"])?.req(0)?;
    Ok(Value::strings(implicit_class(&x)))
}

fn b_unclass(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let x = args.bind(ctx.name, &["x"])?.req(0)?;
    Ok(x.set_attribute("class", Value::null())?)
}

fn b_deep_copy(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    Ok(args.bind(ctx.name, &["x"])?.req(0)?.deep_copy())
}

fn apply_each(interp: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<(Vec<Value>, Option<Value>)> {
    let mut items = args.into_items().into_iter();
    let Some((_, x)) = items.next() else { bail!("argument \"X\" is missing, with no default") };
    let Some((_, f)) = items.next() else { bail!("argument \"FUN\" is missing, with no default") };
    if !f.is_function() {
        bail!("'FUN' is not a function");
    }
    let extra: Vec<(Option<String>, Value)> = items.collect();
    let elems: Vec<Value> = match &x.data {
        Data::List(v) => v.to_vec(),
        _ => (1..=x.len() as i64)
            .map(|i| super::index_get(&x, &[Value::int(i)]).and_then(|v| v.set_attribute("names", Value::null())))
            .collect::<Result<_, _>>()?,
    };
    let mut out = Vec::with_capacity(elems.len());
    for e in elems {
        let mut supplied = vec![crate::eval::SuppliedArg::positional(crate::env::Promise::forced(e))];
        for (n, v) in &extra {
            supplied.push(crate::eval::SuppliedArg { name: n.clone(), promise: crate::env::Promise::forced(v.clone()) });
        }
        out.push(interp.call_with_promises(&f, supplied, &ctx.env, "FUN")?);
    }
    let names = x.names().map(|_| x.get_attribute("names"));
    Ok((out, names))
}

fn b_lapply(interp: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let (out, names) = apply_each(interp, args, ctx)?;
    let v = Value::list(out);
    match names {
        Some(n) => Ok(v.set_attribute("names", n)?),
        None => Ok(v),
    }
}

fn b_sapply(interp: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let (out, names) = apply_each(interp, args, ctx)?;
    let simple = out.iter().all(|v| v.is_atomic() && v.len() == 1);
    let v = if simple && !out.is_empty() {
        combine(out.into_iter().map(|v| (None, v.set_attribute("names", Value::null()).unwrap_or_default())).collect())
    } else {
        Value::list(out)
    };
    match names {
        Some(n) => Ok(v.set_attribute("names", n)?),
        None => Ok(v),
    }
}
