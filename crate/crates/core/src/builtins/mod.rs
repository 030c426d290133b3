//! Host-implemented functions installed in the base environment.

mod arith;
mod lang;
mod vector;

use std::fmt;
use std::rc::Rc;

use crate::env::EnvRef;
use crate::error::{bail, EvalError, EvalResult};
use crate::eval::{Flow, Interpreter};
use crate::reader::Arg;
use crate::value::{Data, Value};

pub(crate) use vector::{
    as_logical_scalar, c_exp, combine, field_get_list, field_set_list, index_get, index_set,
};

pub(crate) type EagerFn = fn(&mut Interpreter, CallArgs, &CallCtx) -> Flow<Value>;
pub(crate) type SpecialFn = fn(&mut Interpreter, &[Arg], &CallCtx) -> Flow<Value>;

#[derive(Clone, Copy)]
pub(crate) enum BuiltinImpl {
    /// Receives evaluated arguments.
    Eager(EagerFn),
    /// Receives the unevaluated argument expressions.
    Special(SpecialFn),
}

pub struct Builtin {
    pub name: &'static str,
    pub(crate) imp: BuiltinImpl,
}

impl fmt::Debug for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<builtin: {}>", self.name)
    }
}

impl Builtin {
    pub(crate) const fn eager(name: &'static str, f: EagerFn) -> Self {
        Builtin { name, imp: BuiltinImpl::Eager(f) }
    }

    pub(crate) const fn special(name: &'static str, f: SpecialFn) -> Self {
        Builtin { name, imp: BuiltinImpl::Special(f) }
    }
}

/// The environment and name a builtin was called with.
pub(crate) struct CallCtx {
    pub env: EnvRef,
    pub name: &'static str,
}

/// Evaluated arguments of an eager builtin call.
pub(crate) struct CallArgs {
    items: Vec<(Option<String>, Value)>,
}

impl CallArgs {
    pub fn new(items: Vec<(Option<String>, Value)>) -> Self {
        CallArgs { items }
    }

    pub fn into_items(self) -> Vec<(Option<String>, Value)> {
        self.items
    }

    pub fn values(&self) -> impl Iterator<Item = &Value> {
        self.items.iter().map(|(_, v)| v)
    }

    /// Matches arguments to `formals` by exact name, then by position.
    pub fn bind(self, fname: &str, formals: &[&str]) -> EvalResult<Bound> {
        let mut slots: Vec<Option<Value>> = vec![None; formals.len()];
        let mut positional = Vec::new();
        for (name, v) in self.items {
            match name {
                Some(n) => {
                    let Some(i) = formals.iter().position(|f| *f == n) else {
                        bail!("unused argument {n} in call to '{fname}'");
                    };
                    if slots[i].is_some() {
                        bail!("formal argument \"{n}\" matched by multiple arguments");
                    }
                    slots[i] = Some(v);
                }
                None => positional.push(v),
            }
        }
        let mut free = slots.iter_mut().filter(|s| s.is_none());
        for v in positional {
            match free.next() {
                Some(s) => *s = Some(v),
                None => bail!("unused argument in call to '{fname}'"),
            }
        }
        Ok(Bound { fname: fname.to_string(), formals: formals.iter().map(|s| s.to_string()).collect(), slots })
    }
}

pub(crate) struct Bound {
    fname: String,
    formals: Vec<String>,
    slots: Vec<Option<Value>>,
}

impl Bound {
    pub fn opt(&mut self, i: usize) -> Option<Value> {
        self.slots[i].take()
    }

    pub fn req(&mut self, i: usize) -> EvalResult<Value> {
        match self.slots[i].take() {
            Some(v) => Ok(v),
            None => Err(EvalError::new(format!(
                "argument \"{}\" is missing, with no default (in '{}')",
                self.formals[i], self.fname
            ))),
        }
    }

    pub fn string(&mut self, i: usize) -> EvalResult<String> {
        let v = self.req(i)?;
        match v.scalar_str() {
            Some(s) => Ok(s.to_string()),
            None => Err(EvalError::new(format!(
                "argument \"{}\" of '{}' must be a single string",
                self.formals[i], self.fname
            ))),
        }
    }

    pub fn opt_string(&mut self, i: usize) -> EvalResult<Option<String>> {
        match self.slots[i].take() {
            None => Ok(None),
            Some(v) if v.is_null() => Ok(None),
            Some(v) => {
                self.slots[i] = Some(v);
                self.string(i).map(Some)
            }
        }
    }

    pub fn number(&mut self, i: usize) -> EvalResult<f64> {
        let v = self.req(i)?;
        match (v.len(), v.scalar_f64()) {
            (1, Some(x)) => Ok(x),
            _ => Err(EvalError::new(format!(
                "argument \"{}\" of '{}' must be a single number",
                self.formals[i], self.fname
            ))),
        }
    }

    pub fn flag(&mut self, i: usize, default: bool) -> EvalResult<bool> {
        match self.slots[i].take() {
            None => Ok(default),
            Some(v) => as_logical_scalar(&v).ok_or_else(|| {
                EvalError::new(format!(
                    "argument \"{}\" of '{}' must be TRUE or FALSE",
                    self.formals[i], self.fname
                ))
            }),
        }
    }
}

pub(crate) fn builtin_value(b: Builtin) -> Value {
    Data::Builtin(Rc::new(b)).into()
}

/// Every builtin the interpreter installs, in registration order.
pub(crate) fn all() -> Vec<Builtin> {
    let mut out = Vec::new();
    out.extend(arith::builtins());
    out.extend(vector::builtins());
    out.extend(lang::builtins());
    out.extend(crate::s3::builtins());
    out.extend(crate::s4::builtins());
    out.extend(crate::refclass::builtins());
    out
}

/// Names of all installed builtins.
pub fn builtin_names() -> Vec<&'static str> {
    all().into_iter().map(|b| b.name).collect()
}

pub(crate) fn install(base: &EnvRef) {
    for b in all() {
        base.set_immediate(b.name, builtin_value(b));
    }
    base.set_immediate("pi", Value::double(std::f64::consts::PI));
}
