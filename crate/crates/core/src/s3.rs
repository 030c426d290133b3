//! Informal class dispatch: methods are functions named `generic.class`,
//! chosen by walking the instance's class vector.

use crate::builtins::{Builtin, CallArgs, CallCtx};
use crate::env::{EnvRef, Promise};
use crate::error::bail;
use crate::eval::{Flow, Interpreter, SuppliedArg, Unwind};
use crate::value::Value;

pub(crate) fn builtins() -> Vec<Builtin> {
    vec![Builtin::eager("UseMethod", b_use_method), Builtin::eager("inherits", b_inherits)]
}

/// First class in `classes` for which `has_method("generic.class")` holds,
/// falling back to `generic.default`.
pub fn select_s3_method(generic: &str, classes: &[String], has_method: impl Fn(&str) -> bool) -> Option<String> {
    classes
        .iter()
        .map(|c| format!("{generic}.{c}"))
        .chain(std::iter::once(format!("{generic}.default")))
        .find(|name| has_method(name))
}

/// Looks a method up along the caller's chain, then the generic's enclosure.
fn find_method(interp: &mut Interpreter, name: &str, envs: &[&EnvRef]) -> Flow<Option<Value>> {
    for env in envs {
        if let Some(f) = interp.find_function(name, env)? {
            return Ok(Some(f));
        }
    }
    Ok(None)
}

fn quoted_classes(classes: &[String]) -> String {
    classes.iter().map(|c| format!("\"{c}\"")).collect::<Vec<_>>().join(", ")
}

/// `UseMethod(generic, object)`: re-applies the selected method to the
/// calling generic's original promises and returns from the generic.
fn b_use_method(interp: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let mut b = args.bind(ctx.name, &["generic", "object"])?;
    let generic = b.string(0)?;
    let explicit = b.opt(1);
    let Some(frame) = interp.frame_for(&ctx.env) else {
        bail!("UseMethod called from outside a function");
    };
    let value = match explicit {
        Some(v) => v,
        None => {
            let Some(first) = frame.closure.formals.first() else {
                bail!("UseMethod called from a function without arguments");
            };
            let name = first.name.clone();
            interp.lookup(&name, &ctx.env)?
        }
    };
    let classes = interp.dispatch_classes(&value);
    let enclosure = frame.closure.env.clone();
    let mut chosen = None;
    for name in classes.iter().map(|c| format!("{generic}.{c}")).chain([format!("{generic}.default")]) {
        if let Some(m) = find_method(interp, &name, &[&frame.caller, &enclosure])? {
            chosen = Some((name, m));
            break;
        }
    }
    let Some((name, method)) = chosen else {
        bail!("no applicable method for '{generic}' applied to class {}", quoted_classes(&classes));
    };
    let result = interp.call_with_promises(&method, frame.args.to_vec(), &frame.caller, &name)?;
    Err(Unwind::Return { value: result, target: ctx.env.clone() })
}

fn b_inherits(interp: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let mut b = args.bind(ctx.name, &["x", "what"])?;
    let x = b.req(0)?;
    let what = b.req(1)?;
    let Some(wanted) = what.as_strings() else { bail!("'what' must be a character vector") };
    let classes = interp.dispatch_classes(&x);
    Ok(Value::logical(wanted.iter().any(|w| classes.contains(w))))
}

/// Operator dispatch for classed operands: an S4 method for the operator
/// first, then S3 methods of the left operand's classes, then the right's.
/// `None` means the builtin operator should handle the call.
pub(crate) fn dispatch_operator(interp: &mut Interpreter, op: &str, vals: &[Value], env: &EnvRef) -> Flow<Option<Value>> {
    if let Some(v) = crate::s4::dispatch_operator(interp, op, vals, env)? {
        return Ok(Some(v));
    }
    let mut picks = Vec::new();
    for v in vals {
        let mut found = None;
        if v.is_object() {
            for c in interp.dispatch_classes(v) {
                let name = format!("{op}.{c}");
                if let Some(m) = interp.find_function(&name, env)? {
                    found = Some((name, m));
                    break;
                }
            }
        }
        picks.push(found);
    }
    let left = picks.first().cloned().flatten();
    let right = picks.get(1).cloned().flatten();
    let (name, method) = match (left, right) {
        (Some(l), Some(r)) => {
            if !crate::value::identical(&l.1, &r.1) {
                interp.warn(format!(
                    "Incompatible methods (\"{}\", \"{}\") for \"{op}\"; incompatible methods, using the left operand's",
                    l.0, r.0
                ));
            }
            l
        }
        (Some(l), None) => l,
        (None, Some(r)) => r,
        (None, None) => return Ok(None),
    };
    let supplied = vals.iter().map(|v| SuppliedArg::positional(Promise::forced(v.clone()))).collect();
    interp.call_with_promises(&method, supplied, env, &name).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn classes(cs: &[&str]) -> Vec<String> {
        cs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn first_match_then_default() {
        let table = ["print.lm", "print.default"];
        let has = |n: &str| table.contains(&n);
        assert_eq!(select_s3_method("print", &classes(&["glm", "lm"]), has).unwrap(), "print.lm");
        assert_eq!(select_s3_method("print", &classes(&["mystery"]), has).unwrap(), "print.default");
        assert!(select_s3_method("summary", &classes(&["lm"]), has).is_none());
    }
}
