//! Operators and numeric summaries.

use std::cmp::Ordering;

use super::{Builtin, CallArgs, CallCtx};
use crate::error::{bail, EvalError, EvalResult};
use crate::eval::{Flow, Interpreter};
use crate::reader::Arg;
use crate::value::{Data, Value};

pub(super) fn builtins() -> Vec<Builtin> {
    vec![
        Builtin::eager("+", op_add),
        Builtin::eager("-", op_sub),
        Builtin::eager("*", op_mul),
        Builtin::eager("/", op_div),
        Builtin::eager("^", op_pow),
        Builtin::eager("==", op_eq),
        Builtin::eager("!=", op_ne),
        Builtin::eager("<", op_lt),
        Builtin::eager("<=", op_le),
        Builtin::eager(">", op_gt),
        Builtin::eager(">=", op_ge),
        Builtin::eager("!", op_not),
        Builtin::special("&&", op_and),
        Builtin::special("||", op_or),
        Builtin::eager(":", op_colon),
        Builtin::eager("sum", b_sum),
        Builtin::eager("prod", b_prod),
        Builtin::eager("mean", b_mean),
        Builtin::eager("min", b_min),
        Builtin::eager("max", b_max),
        Builtin::eager("abs", b_abs),
        Builtin::eager("sqrt", b_sqrt),
        Builtin::eager("exp", b_exp),
        Builtin::eager("log", b_log),
        Builtin::eager("floor", b_floor),
        Builtin::eager("ceiling", b_ceiling),
        Builtin::eager("round", b_round),
    ]
}

/// Numeric view of an atomic vector after logical→integer→double promotion.
#[derive(Debug, Clone)]
pub(crate) enum Num {
    Int(Vec<i64>),
    Dbl(Vec<f64>),
}

impl Num {
    pub fn of(v: &Value, op: &str) -> EvalResult<Num> {
        match &v.data {
            Data::Logical(b) => Ok(Num::Int(b.iter().map(|&x| x as i64).collect())),
            Data::Integer(i) => Ok(Num::Int(i.to_vec())),
            Data::Double(d) => Ok(Num::Dbl(d.to_vec())),
            Data::Null => Ok(Num::Dbl(Vec::new())),
            _ => bail!("non-numeric argument to '{op}'"),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Num::Int(v) => v.len(),
            Num::Dbl(v) => v.len(),
        }
    }

    pub fn doubles(&self) -> Vec<f64> {
        match self {
            Num::Int(v) => v.iter().map(|&x| x as f64).collect(),
            Num::Dbl(v) => v.clone(),
        }
    }

    fn into_value(self) -> Value {
        match self {
            Num::Int(v) => Value::ints(v),
            Num::Dbl(v) => Value::doubles(v),
        }
    }
}

/// Result length and names for an elementwise operation. Only names survive.
fn recycle(interp: &mut Interpreter, a: &Value, b: &Value, na: usize, nb: usize) -> (usize, Option<Value>) {
    if na == 0 || nb == 0 {
        return (0, None);
    }
    let n = na.max(nb);
    if n % na != 0 || n % nb != 0 {
        interp.warn("longer object length is not a multiple of shorter object length");
    }
    let names = [a, b]
        .into_iter()
        .find(|v| v.len() == n && v.names().is_some())
        .map(|v| v.get_attribute("names"));
    (n, names)
}

fn with_names(v: Value, names: Option<Value>) -> Value {
    match names {
        Some(n) => v.set_attribute("names", n).unwrap_or_else(|_| unreachable!()),
        None => v,
    }
}

/// Elementwise binary arithmetic with recycling.
pub(crate) fn arith_binary(interp: &mut Interpreter, op: &str, a: &Value, b: &Value) -> EvalResult<Value> {
    let x = Num::of(a, op)?;
    let y = Num::of(b, op)?;
    let (n, names) = recycle(interp, a, b, x.len(), y.len());
    let out = match (x, y) {
        (Num::Int(x), Num::Int(y)) if op != "/" && op != "^" => {
            let mut out = Vec::with_capacity(n);
            for i in 0..n {
                let (p, q) = (x[i % x.len()], y[i % y.len()]);
                let r = match op {
                    "+" => p.checked_add(q),
                    "-" => p.checked_sub(q),
                    "*" => p.checked_mul(q),
                    _ => unreachable!("integer op {op}"),
                };
                out.push(r.ok_or_else(|| EvalError::new("integer overflow"))?);
            }
            Num::Int(out)
        }
        (x, y) => {
            let (x, y) = (x.doubles(), y.doubles());
            let f: fn(f64, f64) -> f64 = match op {
                "+" => |p, q| p + q,
                "-" => |p, q| p - q,
                "*" => |p, q| p * q,
                "/" => |p, q| p / q,
                "^" => f64::powf,
                _ => unreachable!("double op {op}"),
            };
            Num::Dbl((0..n).map(|i| f(x[i % x.len()], y[i % y.len()])).collect())
        }
    };
    Ok(with_names(out.into_value(), names))
}

fn unary_minus(v: &Value) -> EvalResult<Value> {
    let out = match Num::of(v, "-")? {
        Num::Int(x) => Num::Int(x.into_iter().map(|p| -p).collect()),
        Num::Dbl(x) => Num::Dbl(x.into_iter().map(|p| -p).collect()),
    };
    Ok(with_names(out.into_value(), v.names().map(|_| v.get_attribute("names"))))
}

fn operator(interp: &mut Interpreter, args: CallArgs, ctx: &CallCtx, op: &'static str) -> Flow<Value> {
    let vals: Vec<Value> = args.into_items().into_iter().map(|(_, v)| v).collect();
    if vals.iter().any(Value::is_object) {
        if let Some(v) = crate::s3::dispatch_operator(interp, op, &vals, &ctx.env)? {
            return Ok(v);
        }
    }
    let r = match (op, vals.as_slice()) {
        ("-", [a]) => unary_minus(a),
        ("+", [a]) => Num::of(a, op).map(|_| a.clone()),
        ("!", [a]) => logical_not(a),
        (_, [a, b]) => match op {
            "+" | "-" | "*" | "/" | "^" => arith_binary(interp, op, a, b),
            _ => compare(interp, op, a, b),
        },
        _ => Err(EvalError::new(format!("operator '{op}' needs one or two arguments"))),
    };
    Ok(r?)
}

macro_rules! op_fns {
    ($($name:ident => $op:literal),* $(,)?) => {
        $(fn $name(interp: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
            operator(interp, args, ctx, $op)
        })*
    };
}

op_fns! {
    op_add => "+", op_sub => "-", op_mul => "*", op_div => "/", op_pow => "^",
    op_eq => "==", op_ne => "!=", op_lt => "<", op_le => "<=", op_gt => ">", op_ge => ">=",
    op_not => "!",
}

/// Comparison operators. Strings compare lexically; NaN compares false.
pub(crate) fn compare(interp: &mut Interpreter, op: &str, a: &Value, b: &Value) -> EvalResult<Value> {
    let test = |o: Option<Ordering>| -> bool {
        match (op, o) {
            (_, None) => op == "!=",
            ("==", Some(o)) => o == Ordering::Equal,
            ("!=", Some(o)) => o != Ordering::Equal,
            ("<", Some(o)) => o == Ordering::Less,
            ("<=", Some(o)) => o != Ordering::Greater,
            (">", Some(o)) => o == Ordering::Greater,
            (">=", Some(o)) => o != Ordering::Less,
            _ => false,
        }
    };
    let out = match (&a.data, &b.data) {
        (Data::Str(_), _) | (_, Data::Str(_)) => {
            let (x, y) = (as_string_vec(a, op)?, as_string_vec(b, op)?);
            let (n, names) = recycle(interp, a, b, x.len(), y.len());
            let v = (0..n).map(|i| test(Some(x[i % x.len()].cmp(&y[i % y.len()])))).collect();
            with_names(Value::logicals(v), names)
        }
        _ => {
            let (x, y) = (Num::of(a, op)?, Num::of(b, op)?);
            let (n, names) = recycle(interp, a, b, x.len(), y.len());
            let v = match (x, y) {
                (Num::Int(x), Num::Int(y)) => {
                    (0..n).map(|i| test(Some(x[i % x.len()].cmp(&y[i % y.len()])))).collect()
                }
                (x, y) => {
                    let (x, y) = (x.doubles(), y.doubles());
                    (0..n).map(|i| test(x[i % x.len()].partial_cmp(&y[i % y.len()]))).collect()
                }
            };
            with_names(Value::logicals(v), names)
        }
    };
    Ok(out)
}

fn as_string_vec(v: &Value, op: &str) -> EvalResult<Vec<String>> {
    if !v.is_atomic() && !v.is_null() {
        bail!("comparison ({op}) is possible only for atomic types");
    }
    Ok(super::vector::coerce_strings(v))
}

fn logical_not(v: &Value) -> EvalResult<Value> {
    let out = match &v.data {
        Data::Logical(b) => b.iter().map(|x| !x).collect(),
        Data::Integer(i) => i.iter().map(|&x| x == 0).collect(),
        Data::Double(d) => d.iter().map(|&x| x == 0.0).collect(),
        _ => bail!("invalid argument type"),
    };
    Ok(with_names(Value::logicals(out), v.names().map(|_| v.get_attribute("names"))))
}

fn scalar_condition(interp: &mut Interpreter, e: &Arg, ctx: &CallCtx, op: &str) -> Flow<bool> {
    let v = interp.ev(&e.value, &ctx.env)?;
    if v.len() != 1 {
        bail!("invalid 'x' type in 'x {op} y': operand must have length 1");
    }
    super::as_logical_scalar(&v)
        .ok_or_else(|| EvalError::new(format!("invalid 'x' type in 'x {op} y'")).into())
}

fn op_and(interp: &mut Interpreter, args: &[Arg], ctx: &CallCtx) -> Flow<Value> {
    let [a, b] = args else { bail!("'&&' needs two arguments") };
    let r = scalar_condition(interp, a, ctx, "&&")? && scalar_condition(interp, b, ctx, "&&")?;
    Ok(Value::logical(r))
}

fn op_or(interp: &mut Interpreter, args: &[Arg], ctx: &CallCtx) -> Flow<Value> {
    let [a, b] = args else { bail!("'||' needs two arguments") };
    let r = scalar_condition(interp, a, ctx, "||")? || scalar_condition(interp, b, ctx, "||")?;
    Ok(Value::logical(r))
}

fn scalar_num(v: &Value, what: &str) -> EvalResult<f64> {
    match (v.len(), v.scalar_f64()) {
        (1.., Some(x)) if !x.is_nan() => Ok(x),
        _ => bail!("{what}: argument of length 0 or non-numeric"),
    }
}

fn op_colon(_: &mut Interpreter, args: CallArgs, _: &CallCtx) -> Flow<Value> {
    let vals: Vec<Value> = args.values().cloned().collect();
    let [a, b] = vals.as_slice() else { bail!("':' needs two arguments") };
    let (from, to) = (scalar_num(a, "':'")?, scalar_num(b, "':'")?);
    let count = (to - from).abs().floor() as usize + 1;
    let step = if to >= from { 1.0 } else { -1.0 };
    let integral = from.fract() == 0.0 && from.abs() < 9e15;
    if integral {
        let (f, s) = (from as i64, step as i64);
        Ok(Value::ints((0..count as i64).map(|i| f + s * i).collect()))
    } else {
        Ok(Value::doubles((0..count).map(|i| from + step * i as f64).collect()))
    }
}

fn numeric_args(args: CallArgs, what: &str) -> EvalResult<(Vec<f64>, bool)> {
    let mut out = Vec::new();
    let mut all_int = true;
    for v in args.values() {
        match Num::of(v, what)? {
            Num::Int(x) => out.extend(x.iter().map(|&p| p as f64)),
            Num::Dbl(x) => {
                all_int = false;
                out.extend(x)
            }
        }
    }
    Ok((out, all_int))
}

fn b_sum(_: &mut Interpreter, args: CallArgs, _: &CallCtx) -> Flow<Value> {
    let (x, all_int) = numeric_args(args, "sum")?;
    let s: f64 = x.iter().sum();
    if all_int && s.abs() < 9e15 {
        return Ok(Value::int(s as i64));
    }
    Ok(Value::double(s))
}

fn b_prod(_: &mut Interpreter, args: CallArgs, _: &CallCtx) -> Flow<Value> {
    let (x, _) = numeric_args(args, "prod")?;
    Ok(Value::double(x.iter().product()))
}

fn b_mean(_: &mut Interpreter, args: CallArgs, _: &CallCtx) -> Flow<Value> {
    let (x, _) = numeric_args(args, "mean")?;
    if x.is_empty() {
        return Ok(Value::double(f64::NAN));
    }
    Ok(Value::double(x.iter().sum::<f64>() / x.len() as f64))
}

fn extremum(args: CallArgs, what: &str, pick: fn(f64, f64) -> f64) -> Flow<Value> {
    let (x, all_int) = numeric_args(args, what)?;
    let Some(first) = x.first() else { bail!("no non-missing arguments to {what}") };
    let r = x[1..].iter().fold(*first, |acc, &p| if acc.is_nan() || p.is_nan() { f64::NAN } else { pick(acc, p) });
    if all_int {
        return Ok(Value::int(r as i64));
    }
    Ok(Value::double(r))
}

fn b_min(_: &mut Interpreter, args: CallArgs, _: &CallCtx) -> Flow<Value> {
    extremum(args, "min", f64::min)
}

fn b_max(_: &mut Interpreter, args: CallArgs, _: &CallCtx) -> Flow<Value> {
    extremum(args, "max", f64::max)
}

fn map_math(args: CallArgs, ctx: &CallCtx, f: fn(f64) -> f64) -> Flow<Value> {
    let mut b = args.bind(ctx.name, &["x"])?;
    let x = b.req(0)?;
    let out = Value::doubles(Num::of(&x, ctx.name)?.doubles().into_iter().map(f).collect());
    Ok(with_names(out, x.names().map(|_| x.get_attribute("names"))))
}

fn b_abs(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let mut b = args.bind(ctx.name, &["x"])?;
    let x = b.req(0)?;
    let out = match Num::of(&x, "abs")? {
        Num::Int(v) => Value::ints(v.into_iter().map(i64::abs).collect()),
        Num::Dbl(v) => Value::doubles(v.into_iter().map(f64::abs).collect()),
    };
    Ok(with_names(out, x.names().map(|_| x.get_attribute("names"))))
}

fn b_sqrt(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    map_math(args, ctx, f64::sqrt)
}

fn b_exp(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    map_math(args, ctx, f64::exp)
}

fn b_log(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    map_math(args, ctx, f64::ln)
}

fn b_floor(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    map_math(args, ctx, f64::floor)
}

fn b_ceiling(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    map_math(args, ctx, f64::ceil)
}

fn b_round(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let mut b = args.bind(ctx.name, &["x", "digits"])?;
    let x = b.req(0)?;
    let digits = match b.opt(1) {
        Some(d) => scalar_num(&d, "round")? as i32,
        None => 0,
    };
    let scale = 10f64.powi(digits);
    let out = Num::of(&x, "round")?
        .doubles()
        .into_iter()
        .map(|p| round_half_even(p * scale) / scale)
        .collect();
    Ok(with_names(Value::doubles(out), x.names().map(|_| x.get_attribute("names"))))
}

fn round_half_even(x: f64) -> f64 {
    let r = x.round();
    if (x - x.trunc()).abs() == 0.5 && r % 2.0 != 0.0 {
        r - x.signum()
    } else {
        r
    }
}
