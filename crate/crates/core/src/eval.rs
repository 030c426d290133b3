//! The tree-walking evaluator.
//!
//! Arguments become promises over the caller's environment, defaults become
//! promises over the call's own environment, and every modification of a
//! named value rebinds it in the local frame, so a callee can never alter a
//! caller's data except through environments, reference instances,
//! superassignment or explicit `assign`.

use std::cell::RefCell;
use std::io::Write;
use std::rc::Rc;
use std::sync::Arc;

use indexmap::IndexMap;

use crate::builtins::{self, BuiltinImpl, CallArgs, CallCtx};
use crate::env::{Binding, EnvRef, FrameSnapshot, Promise, PromiseState};
use crate::error::{EvalError, EvalResult, MlsError};
use crate::reader::{deparse, parse_program, Arg, Expr, ExprKind, Formal, Literal, Loc};
use crate::refclass::{self, RefClassDef};
use crate::rng::{XorShift64Star, SEED_BINDING};
use crate::s4;
use crate::value::{Closure, Data, Value};

/// Non-local exits travelling up the Rust stack.
#[derive(Debug)]
pub(crate) enum Unwind {
    Error(EvalError),
    /// Return `value` from the call whose environment is `target`.
    Return { value: Value, target: EnvRef },
}

impl From<EvalError> for Unwind {
    fn from(e: EvalError) -> Self {
        Unwind::Error(e)
    }
}

impl Unwind {
    fn located(self, loc: Loc) -> Self {
        match self {
            Unwind::Error(e) => Unwind::Error(e.located(loc)),
            other => other,
        }
    }
}

pub(crate) type Flow<T> = Result<T, Unwind>;

/// An actual argument: optional name plus the promise for its expression.
#[derive(Debug, Clone)]
pub struct SuppliedArg {
    pub name: Option<String>,
    pub promise: Promise,
}

impl SuppliedArg {
    pub fn positional(p: Promise) -> Self {
        SuppliedArg { name: None, promise: p }
    }
}

/// Bookkeeping for one active closure call.
#[derive(Debug, Clone)]
pub(crate) struct CallFrame {
    pub env: EnvRef,
    pub closure: Rc<Closure>,
    pub args: Rc<[SuppliedArg]>,
    pub caller: EnvRef,
}

pub type ForeignFn = fn(&[Value]) -> EvalResult<Value>;

/// Global table consulted by `options` / `get_option`.
pub const OPTIONS_BINDING: &str = ".Options";

pub const DEFAULT_MAX_DEPTH: usize = 1000;

/// A `Write` sink that can be read back after evaluation.
#[derive(Debug, Clone, Default)]
pub struct SharedBuffer(Rc<RefCell<Vec<u8>>>);

impl SharedBuffer {
    pub fn contents(&self) -> String {
        String::from_utf8_lossy(&self.0.borrow()).into_owned()
    }

    pub fn take(&self) -> String {
        let bytes = std::mem::take(&mut *self.0.borrow_mut());
        String::from_utf8_lossy(&bytes).into_owned()
    }
}

impl Write for SharedBuffer {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        self.0.borrow_mut().extend_from_slice(buf);
        Ok(buf.len())
    }

    fn flush(&mut self) -> std::io::Result<()> {
        Ok(())
    }
}

pub struct Interpreter {
    base: EnvRef,
    global: EnvRef,
    pub(crate) classes: s4::Registry,
    pub(crate) refclasses: IndexMap<String, Rc<RefClassDef>>,
    foreign: IndexMap<String, ForeignFn>,
    pub(crate) frames: Vec<CallFrame>,
    visible: bool,
    out: Box<dyn Write>,
    warnings: Vec<String>,
    max_depth: usize,
}

impl Default for Interpreter {
    fn default() -> Self {
        Self::new()
    }
}

impl Interpreter {
    /// An interpreter printing to standard output.
    pub fn new() -> Self {
        Self::with_output(Box::new(std::io::stdout()))
    }

    pub fn with_output(out: Box<dyn Write>) -> Self {
        let base = EnvRef::new_root("base");
        builtins::install(&base);
        let global = EnvRef::new_child(&base, "global");
        let mut interp = Interpreter {
            base,
            global,
            classes: s4::Registry::with_basic_classes(),
            refclasses: IndexMap::new(),
            foreign: IndexMap::new(),
            frames: Vec::new(),
            visible: true,
            out,
            warnings: Vec::new(),
            max_depth: DEFAULT_MAX_DEPTH,
        };
        interp.register_foreign("identity", |args| {
            Ok(args.first().cloned().unwrap_or_default())
        });
        interp.register_foreign("blas_ddot", foreign_ddot);
        interp.register_foreign("blas_dgemm", foreign_ddot);
        interp
    }

    /// An interpreter whose printed output is captured in the returned buffer.
    pub fn capturing() -> (Self, SharedBuffer) {
        let buf = SharedBuffer::default();
        (Self::with_output(Box::new(buf.clone())), buf)
    }

    pub fn global(&self) -> &EnvRef {
        &self.global
    }

    pub fn base(&self) -> &EnvRef {
        &self.base
    }

    pub fn set_max_depth(&mut self, depth: usize) {
        self.max_depth = depth;
    }

    /// Whether the last top-level evaluation produced a value that should print.
    pub fn visible(&self) -> bool {
        self.visible
    }

    pub(crate) fn set_invisible(&mut self) {
        self.visible = false;
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn take_warnings(&mut self) -> Vec<String> {
        std::mem::take(&mut self.warnings)
    }

    pub(crate) fn warn(&mut self, msg: impl Into<String>) {
        self.warnings.push(msg.into());
    }

    pub(crate) fn write_out(&mut self, s: &str) {
        let _ = self.out.write_all(s.as_bytes());
    }

    pub fn flush(&mut self) {
        let _ = self.out.flush();
    }

    pub fn register_foreign(&mut self, tag: &str, f: ForeignFn) {
        self.foreign.insert(tag.to_string(), f);
    }

    pub(crate) fn foreign_fn(&self, tag: &str) -> Option<ForeignFn> {
        self.foreign.get(tag).copied()
    }

    /// Parses and evaluates `source` in the global environment, returning the
    /// value of the last expression.
    pub fn eval_source(&mut self, source: &str) -> Result<Value, MlsError> {
        let exprs = parse_program(source)?;
        let mut last = Value::null();
        for e in &exprs {
            last = self.eval_top(e)?;
        }
        Ok(last)
    }

    /// Evaluates one top-level expression in the global environment.
    pub fn eval_top(&mut self, e: &Expr) -> EvalResult<Value> {
        let global = self.global.clone();
        self.eval(e, &global)
    }

    /// Evaluates a top-level expression and prints its value unless it is an
    /// assignment or the result was made invisible.
    pub fn eval_and_print(&mut self, e: &Expr) -> EvalResult<()> {
        let v = self.eval_top(e)?;
        if self.visible && !e.is_assignment() {
            let global = self.global.clone();
            self.print_value(&v, &global)?;
        }
        Ok(())
    }

    /// Runs a whole script the way `mls run` does, stopping at the first error.
    pub fn run_script(&mut self, source: &str) -> Result<(), MlsError> {
        for e in &parse_program(source)? {
            self.eval_and_print(e)?;
        }
        self.flush();
        Ok(())
    }

    /// Evaluates `e` in `env`.
    pub fn eval(&mut self, e: &Expr, env: &EnvRef) -> EvalResult<Value> {
        self.frames.clear();
        let r = self.ev(e, env);
        self.frames.clear();
        finish(r)
    }

    // ------------------------------------------------------------------
    // Expressions
    // ------------------------------------------------------------------

    pub(crate) fn ev(&mut self, e: &Expr, env: &EnvRef) -> Flow<Value> {
        self.visible = true;
        match &e.kind {
            ExprKind::Constant(lit) => Ok(literal_value(lit)),
            ExprKind::Symbol(name) => self.lookup(name, env).map_err(|u| u.located(e.loc)),
            ExprKind::Call { callee, args } => self.eval_call(e, callee, args, env),
            ExprKind::Function { formals, body } => Ok(Value::closure(Closure {
                formals: formals.clone(),
                body: body.clone(),
                env: env.clone(),
            })),
            ExprKind::Assign { target, value } => {
                let v = self.ev(value, env)?;
                let name = target.as_symbol().expect("parser only builds symbol targets");
                self.assign_local(name, v.clone(), env).map_err(|u| u.located(e.loc))?;
                self.visible = false;
                Ok(v)
            }
            ExprKind::SuperAssign { target, value } => {
                let v = self.ev(value, env)?;
                self.replace(target, v.clone(), env, true).map_err(|u| u.located(e.loc))?;
                self.visible = false;
                Ok(v)
            }
            ExprKind::IndexAssign { object, indices, value } => {
                let v = self.ev(value, env)?;
                self.replace_index(object, indices, v.clone(), env, false)
                    .map_err(|u| u.located(e.loc))?;
                self.visible = false;
                Ok(v)
            }
            ExprKind::FieldAssign { object, name, value } => {
                let v = self.ev(value, env)?;
                self.replace_field(object, name, v.clone(), env, false)
                    .map_err(|u| u.located(e.loc))?;
                self.visible = false;
                Ok(v)
            }
            ExprKind::Block(items) => {
                let mut last = Value::null();
                for item in items {
                    last = self.ev(item, env)?;
                }
                Ok(last)
            }
            ExprKind::If { cond, then, otherwise } => {
                let c = self.ev(cond, env)?;
                if self.truthy(&c).map_err(|err| err.located(cond.loc))? {
                    self.ev(then, env)
                } else if let Some(o) = otherwise {
                    self.ev(o, env)
                } else {
                    self.visible = false;
                    Ok(Value::null())
                }
            }
            ExprKind::While { cond, body } => {
                loop {
                    let c = self.ev(cond, env)?;
                    if !self.truthy(&c).map_err(|err| err.located(cond.loc))? {
                        break;
                    }
                    self.ev(body, env)?;
                }
                self.visible = false;
                Ok(Value::null())
            }
            ExprKind::Index { object, indices } => {
                let obj = self.ev(object, env)?;
                let idx = self.eval_indices(indices, env)?;
                self.visible = true;
                builtins::index_get(&obj, &idx).map_err(|err| err.located(e.loc).into())
            }
            ExprKind::FieldAccess { object, name } => {
                let obj = self.ev(object, env)?;
                self.visible = true;
                self.field_get(&obj, name).map_err(|u| u.located(e.loc))
            }
        }
    }

    fn eval_indices(&mut self, indices: &[Arg], env: &EnvRef) -> Flow<Vec<Value>> {
        indices.iter().map(|a| self.ev(&a.value, env)).collect()
    }

    pub(crate) fn truthy(&self, v: &Value) -> EvalResult<bool> {
        if v.is_empty() {
            return Err(EvalError::new("argument is of length zero"));
        }
        if v.len() > 1 {
            return Err(EvalError::new("the condition has length > 1"));
        }
        match &v.data {
            Data::Logical(b) => Ok(b[0]),
            Data::Integer(i) => Ok(i[0] != 0),
            Data::Double(d) if d[0].is_nan() => {
                Err(EvalError::new("missing value where TRUE/FALSE needed"))
            }
            Data::Double(d) => Ok(d[0] != 0.0),
            _ => Err(EvalError::new("argument is not interpretable as logical")),
        }
    }

    // ------------------------------------------------------------------
    // Variables
    // ------------------------------------------------------------------

    pub(crate) fn lookup(&mut self, name: &str, env: &EnvRef) -> Flow<Value> {
        let mut cur = Some(env.clone());
        while let Some(e) = cur {
            if let Some(b) = e.get_local(name) {
                return self.read_binding(name, b, &e);
            }
            cur = e.parent();
        }
        Err(EvalError::new(format!("object '{name}' not found")).into())
    }

    /// Like [`lookup`](Self::lookup) but only for bindings of `env` itself.
    pub(crate) fn lookup_local(&mut self, name: &str, env: &EnvRef) -> Flow<Option<Value>> {
        match env.get_local(name) {
            Some(b) => self.read_binding(name, b, env).map(Some),
            None => Ok(None),
        }
    }

    pub(crate) fn read_binding(&mut self, name: &str, b: Binding, env: &EnvRef) -> Flow<Value> {
        match b {
            Binding::Immediate(v) => Ok(v),
            Binding::Lazy(p) => self.force(&p),
            Binding::Active { get, .. } => self.call_value(&get, Vec::new(), env),
            Binding::Missing => {
                Err(EvalError::new(format!("argument \"{name}\" is missing, with no default")).into())
            }
        }
    }

    /// Evaluates a promise at most once.
    pub(crate) fn force(&mut self, p: &Promise) -> Flow<Value> {
        match p.state() {
            PromiseState::Forced(v) => Ok(v),
            PromiseState::Forcing { .. } => Err(EvalError::new(
                "promise already under evaluation: recursive default argument reference",
            )
            .into()),
            PromiseState::Pending { expr, env } => {
                p.set_state(PromiseState::Forcing { expr: expr.clone(), env: env.clone() });
                match self.ev(&expr, &env) {
                    Ok(v) => {
                        p.set_state(PromiseState::Forced(v.clone()));
                        Ok(v)
                    }
                    Err(err) => {
                        p.set_state(PromiseState::Pending { expr, env });
                        Err(err)
                    }
                }
            }
        }
    }

    /// Binds `name` in `env`'s own frame.
    pub(crate) fn assign_local(&mut self, name: &str, v: Value, env: &EnvRef) -> Flow<()> {
        self.assign_in_frame(env, name, v)
    }

    /// Rebinds `name` in the first enclosing frame (starting at the parent)
    /// that binds it, or in the global environment when none does.
    pub(crate) fn assign_super(&mut self, name: &str, v: Value, env: &EnvRef) -> Flow<()> {
        let mut cur = env.parent();
        while let Some(e) = cur {
            if e.ptr_eq(&self.base) {
                break;
            }
            if e.has_local(name) {
                return self.assign_in_frame(&e, name, v);
            }
            cur = e.parent();
        }
        let global = self.global.clone();
        self.assign_in_frame(&global, name, v)
    }

    /// Writes a binding, honouring active bindings and field guards.
    pub(crate) fn assign_in_frame(&mut self, frame: &EnvRef, name: &str, v: Value) -> Flow<()> {
        let existing = frame.get_local(name);
        if let Some(Binding::Active { set, .. }) = &existing {
            return match set {
                Some(setter) => {
                    let setter = setter.clone();
                    self.call_value(&setter, vec![v], frame).map(|_| ())
                }
                None => Err(EvalError::new(format!("active binding '{name}' is read-only")).into()),
            };
        }
        if let Some(guard) = frame.guard() {
            match guard.fields.get(name) {
                Some(decl) => {
                    if guard.locked && decl.read_only {
                        return Err(EvalError::new(format!(
                            "field '{name}' of class \"{}\" is read-only",
                            guard.class_name
                        ))
                        .into());
                    }
                    if !self.classes.value_conforms(&v, &decl.class) {
                        return Err(EvalError::new(format!(
                            "invalid assignment for reference class field '{name}': should be from class \"{}\", got \"{}\"",
                            decl.class,
                            self.classes.class_of(&v)
                        ))
                        .into());
                    }
                }
                None if existing.is_some() => {
                    return Err(EvalError::new(format!(
                        "'{name}' is a method of reference class \"{}\" and cannot be assigned",
                        guard.class_name
                    ))
                    .into());
                }
                None => {}
            }
        }
        frame.set_immediate(name, v);
        Ok(())
    }

    fn lvalue_current(&mut self, e: &Expr, env: &EnvRef, sup: bool) -> Flow<Value> {
        match &e.kind {
            ExprKind::Symbol(name) => {
                if sup {
                    let start = env.parent().unwrap_or_else(|| self.global.clone());
                    self.lookup(name, &start)
                } else {
                    self.lookup(name, env)
                }
            }
            ExprKind::Index { object, indices } => {
                let obj = self.lvalue_current(object, env, sup)?;
                let idx = self.eval_indices(indices, env)?;
                Ok(builtins::index_get(&obj, &idx)?)
            }
            ExprKind::FieldAccess { object, name } => {
                let obj = self.lvalue_current(object, env, sup)?;
                self.field_get(&obj, name)
            }
            _ => Err(EvalError::at("invalid assignment target", e.loc).into()),
        }
    }

    pub(crate) fn replace(&mut self, target: &Expr, v: Value, env: &EnvRef, sup: bool) -> Flow<()> {
        match &target.kind {
            ExprKind::Symbol(name) => {
                if sup {
                    self.assign_super(name, v, env)
                } else {
                    self.assign_local(name, v, env)
                }
            }
            ExprKind::Index { object, indices } => self.replace_index(object, indices, v, env, sup),
            ExprKind::FieldAccess { object, name } => self.replace_field(object, name, v, env, sup),
            _ => Err(EvalError::at("invalid assignment target", target.loc).into()),
        }
    }

    fn replace_index(
        &mut self,
        object: &Expr,
        indices: &[Arg],
        v: Value,
        env: &EnvRef,
        sup: bool,
    ) -> Flow<()> {
        let cur = match self.lvalue_current(object, env, sup) {
            Ok(c) => c,
            // Assigning into an undefined name starts from NULL.
            Err(Unwind::Error(_)) if object.as_symbol().is_some() => Value::null(),
            Err(u) => return Err(u),
        };
        let idx = self.eval_indices(indices, env)?;
        let updated = builtins::index_set(cur, &idx, v)?;
        self.replace(object, updated, env, sup)
    }

    fn replace_field(&mut self, object: &Expr, name: &str, v: Value, env: &EnvRef, sup: bool) -> Flow<()> {
        let cur = match self.lvalue_current(object, env, sup) {
            Ok(c) => c,
            Err(Unwind::Error(_)) if object.as_symbol().is_some() => Value::null(),
            Err(u) => return Err(u),
        };
        match &cur.data {
            Data::RefObj(r) => {
                let r = r.clone();
                refclass::field_set(self, &r, name, v)
            }
            Data::Environment(e) => {
                let e = e.clone();
                self.assign_in_frame(&e, name, v)
            }
            Data::S4(_) => {
                let updated = s4::slot_set(self, cur, name, v)?;
                self.replace(object, updated, env, sup)
            }
            _ => {
                let updated = builtins::field_set_list(cur, name, v)?;
                self.replace(object, updated, env, sup)
            }
        }
    }

    pub(crate) fn field_get(&mut self, obj: &Value, name: &str) -> Flow<Value> {
        match &obj.data {
            Data::RefObj(r) => {
                let r = r.clone();
                refclass::field_get(self, &r, name)
            }
            Data::Environment(e) => {
                let e = e.clone();
                Ok(self.lookup_local(name, &e)?.unwrap_or_default())
            }
            Data::S4(_) if obj.is_generator() => refclass::generator_field(obj, name),
            _ => Ok(builtins::field_get_list(obj, name)?),
        }
    }

    // ------------------------------------------------------------------
    // Calls
    // ------------------------------------------------------------------

    /// Finds the nearest binding of `name` whose value is callable.
    pub(crate) fn find_function(&mut self, name: &str, env: &EnvRef) -> Flow<Option<Value>> {
        let mut cur = Some(env.clone());
        while let Some(e) = cur {
            if let Some(b) = e.get_local(name) {
                let v = self.read_binding(name, b, &e)?;
                if v.is_function() {
                    return Ok(Some(v));
                }
            }
            cur = e.parent();
        }
        Ok(None)
    }

    fn eval_call(&mut self, call: &Expr, callee: &Expr, args: &[Arg], env: &EnvRef) -> Flow<Value> {
        let (f, name) = match callee.as_symbol() {
            Some(n) => match self.find_function(n, env).map_err(|u| u.located(call.loc))? {
                Some(f) => (f, n.to_string()),
                None => {
                    return Err(EvalError::at(format!("could not find function \"{n}\""), call.loc).into())
                }
            },
            None => (self.ev(callee, env)?, deparse(callee)),
        };
        self.apply(&f, args, env, call.loc, &name)
    }

    fn apply(&mut self, f: &Value, args: &[Arg], env: &EnvRef, loc: Loc, name: &str) -> Flow<Value> {
        let r = match &f.data {
            Data::Closure(c) => {
                let supplied = args
                    .iter()
                    .map(|a| SuppliedArg { name: a.name.clone(), promise: promise_for(&a.value, env) })
                    .collect();
                self.apply_closure(c, supplied, env, name)
            }
            Data::Builtin(b) => {
                let ctx = CallCtx { env: env.clone(), name: b.name };
                match b.imp {
                    BuiltinImpl::Eager(fun) => {
                        let mut vals = Vec::with_capacity(args.len());
                        for a in args {
                            vals.push((a.name.clone(), self.ev(&a.value, env)?));
                        }
                        self.visible = true;
                        fun(self, CallArgs::new(vals), &ctx)
                    }
                    BuiltinImpl::Special(fun) => {
                        self.visible = true;
                        fun(self, args, &ctx)
                    }
                }
            }
            _ if f.is_generator() => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push((a.name.clone(), self.ev(&a.value, env)?));
                }
                self.visible = true;
                refclass::generator_new(self, f, vals)
            }
            _ => Err(EvalError::new(format!("attempt to apply non-function '{name}'")).into()),
        };
        r.map_err(|u| u.located(loc))
    }

    /// Calls `f` with already-evaluated positional arguments.
    pub(crate) fn call_value(&mut self, f: &Value, args: Vec<Value>, env: &EnvRef) -> Flow<Value> {
        let supplied: Vec<SuppliedArg> =
            args.into_iter().map(|v| SuppliedArg::positional(Promise::forced(v))).collect();
        self.call_with_promises(f, supplied, env, "<anonymous>")
    }

    pub(crate) fn call_with_promises(
        &mut self,
        f: &Value,
        supplied: Vec<SuppliedArg>,
        env: &EnvRef,
        name: &str,
    ) -> Flow<Value> {
        match &f.data {
            Data::Closure(c) => self.apply_closure(c, supplied, env, name),
            Data::Builtin(b) => {
                let mut vals = Vec::with_capacity(supplied.len());
                for s in &supplied {
                    vals.push((s.name.clone(), self.force(&s.promise)?));
                }
                let ctx = CallCtx { env: env.clone(), name: b.name };
                match b.imp {
                    BuiltinImpl::Eager(fun) => fun(self, CallArgs::new(vals), &ctx),
                    BuiltinImpl::Special(_) => Err(EvalError::new(format!(
                        "'{}' cannot be called indirectly",
                        b.name
                    ))
                    .into()),
                }
            }
            _ if f.is_generator() => {
                let mut vals = Vec::with_capacity(supplied.len());
                for s in &supplied {
                    vals.push((s.name.clone(), self.force(&s.promise)?));
                }
                refclass::generator_new(self, f, vals)
            }
            _ => Err(EvalError::new(format!("attempt to apply non-function '{name}'")).into()),
        }
    }

    pub(crate) fn apply_closure(
        &mut self,
        c: &Rc<Closure>,
        supplied: Vec<SuppliedArg>,
        caller: &EnvRef,
        name: &str,
    ) -> Flow<Value> {
        if self.frames.len() >= self.max_depth {
            return Err(EvalError::new(
                "evaluation nested too deeply: infinite recursion?",
            )
            .into());
        }
        let call_env = match_arguments(&c.formals, &supplied, &c.env, name)?;
        self.frames.push(CallFrame {
            env: call_env.clone(),
            closure: c.clone(),
            args: supplied.into(),
            caller: caller.clone(),
        });
        let r = self.ev(&c.body, &call_env);
        self.frames.pop();
        match r {
            Err(Unwind::Return { value, target }) if target.ptr_eq(&call_env) => Ok(value),
            other => other,
        }
    }

    /// The frame of the closure call whose environment is `env`.
    pub(crate) fn frame_for(&self, env: &EnvRef) -> Option<CallFrame> {
        self.frames.iter().rev().find(|f| f.env.ptr_eq(env)).cloned()
    }

    // ------------------------------------------------------------------
    // Random numbers and options
    // ------------------------------------------------------------------

    fn generator(&mut self) -> EvalResult<XorShift64Star> {
        match self.global.get_local(SEED_BINDING) {
            None => Ok(XorShift64Star::from_seed(0)),
            Some(Binding::Immediate(v)) => match &v.data {
                Data::Integer(s) if s.len() == 1 => XorShift64Star::from_state(s[0] as u64)
                    .ok_or_else(|| EvalError::new("'.Random.seed' is not a valid generator state")),
                _ => Err(EvalError::new("'.Random.seed' is not a valid generator state")),
            },
            Some(_) => Err(EvalError::new("'.Random.seed' is not a valid generator state")),
        }
    }

    fn store_generator(&mut self, g: XorShift64Star) {
        self.global.set_immediate(SEED_BINDING, Value::int(g.state() as i64));
    }

    /// Initializes the generator state in `.Random.seed`.
    pub fn set_seed(&mut self, seed: i64) {
        self.store_generator(XorShift64Star::from_seed(seed));
    }

    /// Draws `n` uniforms in [0, 1), advancing `.Random.seed`. Without a prior
    /// `set_seed` the stream starts as if seeded with 0.
    pub fn rng_draw(&mut self, n: i64) -> EvalResult<Vec<f64>> {
        if n < 0 {
            return Err(EvalError::new("invalid arguments: n must be non-negative"));
        }
        let mut g = self.generator()?;
        if n == 0 {
            return Ok(Vec::new());
        }
        let out = (0..n).map(|_| g.next_f64()).collect();
        self.store_generator(g);
        Ok(out)
    }

    /// Current generator state, if one has been stored.
    pub fn rng_state(&self) -> Option<u64> {
        match self.global.get_local(SEED_BINDING) {
            Some(Binding::Immediate(v)) => match &v.data {
                Data::Integer(s) if s.len() == 1 => Some(s[0] as u64),
                _ => None,
            },
            _ => None,
        }
    }

    pub(crate) fn options_list(&self) -> Value {
        match self.global.get_local(OPTIONS_BINDING) {
            Some(Binding::Immediate(v)) => v,
            _ => Value::named_list(Vec::new()),
        }
    }

    /// Sets an option, returning its previous value (NULL when unset).
    pub fn set_option(&mut self, name: &str, value: Value) -> EvalResult<Value> {
        let opts = self.options_list();
        let old = builtins::field_get_list(&opts, name)?;
        let updated = builtins::field_set_list(opts, name, value)?;
        self.global.set_immediate(OPTIONS_BINDING, updated);
        Ok(old)
    }

    pub fn get_option(&self, name: &str) -> Value {
        builtins::field_get_list(&self.options_list(), name).unwrap_or_default()
    }

    // ------------------------------------------------------------------
    // Printing
    // ------------------------------------------------------------------

    /// Prints a value the way the top level does, dispatching to an S3
    /// `print.<class>` method when one is visible from `env`.
    pub fn print_value(&mut self, v: &Value, env: &EnvRef) -> EvalResult<()> {
        let r = self.print_dispatch(v, env);
        finish(r)
    }

    pub(crate) fn print_dispatch(&mut self, v: &Value, env: &EnvRef) -> Flow<()> {
        if v.class_attribute().is_some() {
            for cls in self.dispatch_classes(v) {
                if let Some(m) = self.find_function(&format!("print.{cls}"), env)? {
                    let name = format!("print.{cls}");
                    self.call_with_promises(
                        &m,
                        vec![SuppliedArg::positional(Promise::forced(v.clone()))],
                        env,
                        &name,
                    )?;
                    self.visible = false;
                    return Ok(());
                }
            }
        }
        let text = self.format_value(v)?;
        self.write_out(&text);
        self.visible = false;
        Ok(())
    }

    /// Default printed representation, ending with a newline.
    pub(crate) fn format_value(&mut self, v: &Value) -> Flow<String> {
        crate::format::format_value(self, v)
    }

    /// Class vector used for S3 dispatch: formal classes contribute their
    /// whole linearization, other values their implicit class.
    pub fn dispatch_classes(&self, v: &Value) -> Vec<String> {
        match &v.data {
            Data::S4(o) => self.classes.linearization_names(&o.class_name),
            Data::RefObj(r) => self.classes.linearization_names(&r.class_name),
            _ => crate::value::implicit_class(v),
        }
    }

    /// Snapshots every frame reachable from the global environment, from
    /// environments bound in those frames, and from reference instances.
    pub fn snapshot_all(&self) -> Vec<FrameSnapshot> {
        let mut seen = Vec::new();
        let mut out = Vec::new();
        let mut stack = vec![self.global.clone()];
        while let Some(env) = stack.pop() {
            if seen.contains(&env.id()) {
                continue;
            }
            seen.push(env.id());
            for name in env.names() {
                if let Some(Binding::Immediate(v)) = env.get_local(&name) {
                    collect_envs(&v, &mut stack);
                }
            }
            out.push(env.snapshot());
        }
        out
    }
}

fn collect_envs(v: &Value, stack: &mut Vec<EnvRef>) {
    match &v.data {
        Data::Environment(e) => stack.push(e.clone()),
        Data::RefObj(r) => stack.push(r.backing.clone()),
        Data::Closure(c) => stack.push(c.env.clone()),
        Data::List(items) => items.iter().for_each(|i| collect_envs(i, stack)),
        Data::S4(o) => o.slots.values().for_each(|i| collect_envs(i, stack)),
        _ => {}
    }
}

fn finish<T>(r: Flow<T>) -> EvalResult<T> {
    match r {
        Ok(v) => Ok(v),
        Err(Unwind::Error(e)) => Err(e),
        Err(Unwind::Return { .. }) => {
            Err(EvalError::new("no function to return from, jumping to top level"))
        }
    }
}

pub(crate) fn literal_value(lit: &Literal) -> Value {
    match lit {
        Literal::Null => Value::null(),
        Literal::Logical(b) => Value::logical(*b),
        Literal::Integer(i) => Value::int(*i),
        Literal::Double(d) => Value::double(*d),
        Literal::Str(s) => Value::string(s.clone()),
    }
}

fn promise_for(e: &Arc<Expr>, env: &EnvRef) -> Promise {
    match &e.kind {
        ExprKind::Constant(lit) => Promise::forced(literal_value(lit)),
        _ => Promise::new(e.clone(), env.clone()),
    }
}

/// Builds the environment for a closure call.
///
/// Named actuals match formals by exact name, the remaining actuals fill the
/// remaining formals by position. Actuals become promises in their caller's
/// environment, defaults become promises in the new call environment, and
/// formals with neither are bound as missing.
pub fn match_arguments(
    formals: &[Formal],
    supplied: &[SuppliedArg],
    enclosure: &EnvRef,
    fname: &str,
) -> EvalResult<EnvRef> {
    let mut matched: Vec<Option<&Promise>> = vec![None; formals.len()];
    for s in supplied {
        let Some(n) = &s.name else { continue };
        let Some(i) = formals.iter().position(|f| &f.name == n) else {
            return Err(EvalError::new(format!("unused argument {n}")));
        };
        if matched[i].is_some() {
            return Err(EvalError::new(format!(
                "formal argument \"{n}\" matched by multiple arguments"
            )));
        }
        matched[i] = Some(&s.promise);
    }
    let mut next = 0;
    for s in supplied.iter().filter(|s| s.name.is_none()) {
        while next < formals.len() && matched[next].is_some() {
            next += 1;
        }
        if next == formals.len() {
            let shown = s
                .promise
                .expr()
                .map(|e| deparse(&e))
                .or_else(|| s.promise.value().map(|v| crate::format::format_inline(&v)))
                .unwrap_or_default();
            return Err(EvalError::new(format!("unused argument ({shown})")));
        }
        matched[next] = Some(&s.promise);
    }
    let env = EnvRef::new_child(enclosure, format!("call:{fname}"));
    for (f, m) in formals.iter().zip(matched) {
        let b = match (m, &f.default) {
            (Some(p), _) => Binding::Lazy(p.clone()),
            (None, Some(d)) => Binding::Lazy(Promise::new(d.clone(), env.clone())),
            (None, None) => Binding::Missing,
        };
        env.set_binding(f.name.clone(), b);
    }
    Ok(env)
}

fn foreign_ddot(args: &[Value]) -> EvalResult<Value> {
    let [a, b] = args else {
        return Err(EvalError::new("blas stub expects two numeric vectors"));
    };
    let (Some(a), Some(b)) = (a.as_doubles(), b.as_doubles()) else {
        return Err(EvalError::new("blas stub expects two numeric vectors"));
    };
    if a.len() != b.len() {
        return Err(EvalError::new("blas stub: non-conformable arguments"));
    }
    Ok(Value::double(a.iter().zip(b).map(|(x, y)| x * y).sum()))
}
