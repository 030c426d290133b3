//! Reference classes: mutable objects backed by an environment.
//!
//! An instance's backing environment binds every field, every method
//! (rebound so its enclosure is the backing environment) and `.self`.
//! Method bodies therefore see fields by name and modify them with `<<-`.

use std::collections::HashMap;
use std::rc::Rc;
use std::sync::Arc;

use indexmap::IndexMap;

use crate::builtins::{Builtin, CallArgs, CallCtx};
use crate::env::{Binding, EnvRef, FieldDecl, FieldGuard};
use crate::error::{bail, EvalError, EvalResult};
use crate::eval::{Flow, Interpreter};
use crate::reader::parse_expr;
use crate::value::{Closure, Data, RefObject, S4Object, Value};

pub const GENERATOR_CLASS: &str = "refObjectGenerator";
const FIELD_SPEC: &str = "refFieldSpec";
const ACTIVE_SPEC: &str = "refActiveSpec";
const SELF: &str = ".self";

#[derive(Debug, Clone)]
pub struct FieldSpec {
    pub class: String,
    pub read_only: bool,
    pub active: Option<(Value, Option<Value>)>,
}

#[derive(Debug, Clone)]
pub struct RefClassDef {
    pub name: String,
    /// Inherited fields first, then own fields.
    pub fields: IndexMap<String, FieldSpec>,
    /// Inherited methods, overridden or extended by own methods.
    pub methods: IndexMap<String, Value>,
    pub contains: Option<String>,
    /// Environment the class was defined in; instances chain to it.
    pub def_env: EnvRef,
}

pub(crate) fn builtins() -> Vec<Builtin> {
    vec![
        Builtin::eager("set_ref_class", b_set_ref_class),
        Builtin::eager("field", b_field),
        Builtin::eager("active", b_active),
        Builtin::eager("copy", b_copy),
    ]
}

fn b_field(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let mut b = args.bind(ctx.name, &["class", "read_only"])?;
    let class = b.opt_string(0)?.unwrap_or_else(|| crate::s4::ANY.to_string());
    let read_only = b.flag(1, false)?;
    let v = Value::named_list(vec![
        ("class".into(), Value::string(class)),
        ("read_only".into(), Value::logical(read_only)),
    ]);
    Ok(v.set_attribute("class", Value::string(FIELD_SPEC))?)
}

fn b_active(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let mut b = args.bind(ctx.name, &["get", "set"])?;
    let get = b.req(0)?;
    let set = b.opt(1).unwrap_or_default();
    if get.as_closure().is_none() || !(set.is_null() || set.as_closure().is_some()) {
        bail!("active() needs a getter function and an optional setter function");
    }
    let v = Value::named_list(vec![("get".into(), get), ("set".into(), set)]);
    Ok(v.set_attribute("class", Value::string(ACTIVE_SPEC))?)
}

fn field_spec(name: &str, v: &Value) -> EvalResult<FieldSpec> {
    let classed = |c: &str| v.class_attribute().is_some_and(|k| k.iter().any(|x| x == c));
    if let Some(s) = v.scalar_str() {
        return Ok(FieldSpec { class: s.to_string(), read_only: false, active: None });
    }
    let get = |k: &str| crate::builtins::field_get_list(v, k);
    if classed(FIELD_SPEC) {
        let class = get("class")?.scalar_str().unwrap_or(crate::s4::ANY).to_string();
        let read_only = crate::builtins::as_logical_scalar(&get("read_only")?).unwrap_or(false);
        return Ok(FieldSpec { class, read_only, active: None });
    }
    if classed(ACTIVE_SPEC) {
        let setter = get("set")?;
        let setter = (!setter.is_null()).then_some(setter);
        return Ok(FieldSpec { class: crate::s4::ANY.to_string(), read_only: false, active: Some((get("get")?, setter)) });
    }
    bail!("field \"{name}\" must be declared by a class name, field() or active()")
}

fn named_items(v: Option<Value>, what: &str) -> EvalResult<Vec<(String, Value)>> {
    let Some(v) = v.filter(|v| !v.is_null()) else { return Ok(Vec::new()) };
    let Some(names) = v.names() else { bail!("'{what}' must be named") };
    let items: Vec<Value> = match &v.data {
        Data::List(items) => items.to_vec(),
        Data::Str(s) => s.iter().map(|x| Value::string(x.clone())).collect(),
        _ => bail!("'{what}' must be a named list"),
    };
    if names.iter().any(String::is_empty) {
        bail!("every element of '{what}' must be named");
    }
    Ok(names.into_iter().zip(items).collect())
}

fn b_set_ref_class(interp: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let mut b = args.bind(ctx.name, &["Class", "fields", "methods", "contains"])?;
    let name = b.string(0)?;
    let own_fields = named_items(b.opt(1), "fields")?;
    let own_methods = named_items(b.opt(2), "methods")?;
    let contains = b.opt_string(3)?;

    let (mut fields, mut methods) = match &contains {
        Some(sup) => match interp.refclasses.get(sup) {
            Some(d) => (d.fields.clone(), d.methods.clone()),
            None => bail!("superclass \"{sup}\" of \"{name}\" is not a reference class"),
        },
        None => (IndexMap::new(), IndexMap::new()),
    };
    for (f, spec) in own_fields {
        if fields.contains_key(&f) {
            bail!("field \"{f}\" of class \"{name}\" is already defined (possibly by a superclass)");
        }
        let spec = field_spec(&f, &spec)?;
        if spec.class != crate::s4::ANY && interp.classes.class(&spec.class).is_none() {
            bail!("class \"{}\" for field \"{f}\" is not defined", spec.class);
        }
        fields.insert(f, spec);
    }
    for (m, def) in own_methods {
        if def.as_closure().is_none() {
            bail!("method \"{m}\" of class \"{name}\" must be a function");
        }
        methods.insert(m, def);
    }
    if let Some(clash) = methods.keys().find(|m| fields.contains_key(*m)) {
        bail!("\"{clash}\" is both a field and a method of class \"{name}\"");
    }
    if fields.contains_key(SELF) || methods.contains_key(SELF) {
        bail!("\"{SELF}\" is reserved in reference classes");
    }
    interp
        .classes
        .define_class(&name, IndexMap::new(), contains.clone().into_iter().collect(), false, true)?;
    let def = RefClassDef { name: name.clone(), fields, methods, contains, def_env: ctx.env.clone() };
    let generator = generator_value(&def);
    interp.refclasses.insert(name, Rc::new(def));
    Ok(generator)
}

fn generator_value(def: &RefClassDef) -> Value {
    let mut slots = IndexMap::new();
    slots.insert("className".to_string(), Value::string(def.name.clone()));
    let fields: IndexMap<String, String> = def.fields.iter().map(|(k, s)| (k.clone(), s.class.clone())).collect();
    slots.insert(
        "fields".to_string(),
        Value::strings(fields.values().cloned().collect())
            .set_attribute("names", Value::strings(fields.keys().cloned().collect()))
            .expect("lengths agree"),
    );
    slots.insert("methods".to_string(), Value::strings(def.methods.keys().cloned().collect()));
    Value::s4(S4Object { class_name: GENERATOR_CLASS.to_string(), slots })
}

fn generator_class(gen: &Value) -> EvalResult<String> {
    match &gen.data {
        Data::S4(o) => o.slots.get("className").and_then(|c| c.scalar_str()).map(str::to_string),
        _ => None,
    }
    .ok_or_else(|| EvalError::new("invalid reference class generator"))
}

/// `Gen$name`: `new` yields the generator itself (so `Gen$new(...)` constructs),
/// other names read the generator's description.
pub(crate) fn generator_field(gen: &Value, name: &str) -> Flow<Value> {
    let Data::S4(o) = &gen.data else { bail!("invalid reference class generator") };
    match name {
        "new" => Ok(gen.clone()),
        _ => match o.slots.get(name) {
            Some(v) => Ok(v.clone()),
            None => bail!("'{name}' is not a field of the generator for class \"{}\"", generator_class(gen)?),
        },
    }
}

pub(crate) fn generator_new(interp: &mut Interpreter, gen: &Value, args: Vec<(Option<String>, Value)>) -> Flow<Value> {
    let class = generator_class(gen)?;
    let Some(def) = interp.refclasses.get(&class).cloned() else {
        bail!("reference class \"{class}\" is not defined");
    };
    instantiate(interp, &def, args)
}

fn rebind(f: &Value, backing: &EnvRef) -> Value {
    match &f.data {
        Data::Closure(c) => Value::closure(Closure { formals: c.formals.clone(), body: c.body.clone(), env: backing.clone() }),
        _ => f.clone(),
    }
}

/// `obj$copy()` when the class defines no `copy` method of its own.
fn copy_method(interp: &Interpreter, obj: &Value) -> Value {
    let env = EnvRef::new_child(interp.base(), "refobj:copy");
    env.set_immediate(SELF, obj.clone());
    let body = parse_expr("copy(.self)").expect("fixed source parses");
    Value::closure(Closure { formals: Arc::from(Vec::new()), body: Arc::new(body), env })
}

/// Fresh backing environment with methods, active fields and `.self` bound,
/// plain fields left to the caller.
fn skeleton(def: &RefClassDef) -> (EnvRef, Value) {
    let backing = EnvRef::new_child(&def.def_env, format!("refobj:{}", def.name));
    let obj: Value = Data::RefObj(RefObject { class_name: Rc::from(def.name.as_str()), backing: backing.clone() }).into();
    for (m, f) in &def.methods {
        backing.set_immediate(m.clone(), rebind(f, &backing));
    }
    for (f, spec) in &def.fields {
        if let Some((get, set)) = &spec.active {
            backing.set_binding(
                f.clone(),
                Binding::Active { get: rebind(get, &backing), set: set.as_ref().map(|s| rebind(s, &backing)) },
            );
        }
    }
    backing.set_immediate(SELF, obj.clone());
    let decls = def
        .fields
        .iter()
        .filter(|(_, s)| s.active.is_none())
        .map(|(k, s)| (k.clone(), FieldDecl { class: s.class.clone(), read_only: s.read_only }))
        .collect();
    backing.set_guard(Some(FieldGuard { class_name: def.name.clone(), fields: decls, locked: false }));
    (backing, obj)
}

fn lock(backing: &EnvRef) {
    if let Some(mut g) = backing.guard() {
        g.locked = true;
        backing.set_guard(Some(g));
    }
}

/// Creates an instance. Named arguments initialize fields; when the class
/// defines `initialize`, all arguments go to it instead.
pub(crate) fn instantiate(interp: &mut Interpreter, def: &RefClassDef, args: Vec<(Option<String>, Value)>) -> Flow<Value> {
    let (backing, obj) = skeleton(def);
    for (f, spec) in &def.fields {
        if spec.active.is_none() {
            let zero = interp.classes.zero_value(&spec.class).unwrap_or_default();
            backing.set_immediate(f.clone(), zero);
        }
    }
    if let Some(init) = def.methods.get("initialize") {
        let init = rebind(init, &backing);
        let supplied = args
            .into_iter()
            .map(|(name, v)| crate::eval::SuppliedArg { name, promise: crate::env::Promise::forced(v) })
            .collect();
        interp.call_with_promises(&init, supplied, &backing, "initialize")?;
    } else {
        for (name, v) in args {
            let Some(name) = name else {
                bail!("unnamed argument to the generator for class \"{}\": fields must be named", def.name);
            };
            if !def.fields.contains_key(&name) {
                bail!("\"{name}\" is not a field in class \"{}\"", def.name);
            }
            interp.assign_in_frame(&backing, &name, v)?;
        }
    }
    lock(&backing);
    Ok(obj)
}

fn is_field_or_method(r: &RefObject, name: &str) -> bool {
    name != SELF && r.backing.has_local(name)
}

pub(crate) fn field_get(interp: &mut Interpreter, r: &RefObject, name: &str) -> Flow<Value> {
    if name == "copy" && !r.backing.has_local(name) {
        let obj: Value = Data::RefObj(r.clone()).into();
        return Ok(copy_method(interp, &obj));
    }
    if !is_field_or_method(r, name) {
        bail!("\"{name}\" is not a valid field or method name for reference class \"{}\"", r.class_name);
    }
    let b = r.backing.get_local(name).expect("checked");
    interp.read_binding(name, b, &r.backing.clone())
}

pub(crate) fn field_set(interp: &mut Interpreter, r: &RefObject, name: &str, v: Value) -> Flow<()> {
    if !is_field_or_method(r, name) {
        bail!("\"{name}\" is not a field in class \"{}\"", r.class_name);
    }
    interp.assign_in_frame(&r.backing.clone(), name, v)
}

/// An independent instance: fields deep-copied, nested instances copied
/// recursively (shared sub-instances stay shared within the copy).
pub(crate) fn copy_instance(interp: &Interpreter, r: &RefObject) -> EvalResult<Value> {
    let mut memo = HashMap::new();
    copy_with(interp, r, &mut memo)
}

fn copy_with(interp: &Interpreter, r: &RefObject, memo: &mut HashMap<usize, Value>) -> EvalResult<Value> {
    if let Some(v) = memo.get(&r.backing.id()) {
        return Ok(v.clone());
    }
    let Some(def) = interp.refclasses.get(&*r.class_name).cloned() else {
        bail!("reference class \"{}\" is not defined", r.class_name);
    };
    let (backing, obj) = skeleton(&def);
    memo.insert(r.backing.id(), obj.clone());
    for (f, spec) in &def.fields {
        if spec.active.is_some() {
            continue;
        }
        let v = match r.backing.get_local(f) {
            Some(Binding::Immediate(v)) => v,
            _ => Value::null(),
        };
        backing.set_immediate(f.clone(), copy_value(interp, &v, memo)?);
    }
    lock(&backing);
    Ok(obj)
}

fn copy_value(interp: &Interpreter, v: &Value, memo: &mut HashMap<usize, Value>) -> EvalResult<Value> {
    match &v.data {
        Data::RefObj(inner) => copy_with(interp, inner, memo),
        Data::List(items) => {
            let copied = items.iter().map(|i| copy_value(interp, i, memo)).collect::<EvalResult<Vec<_>>>()?;
            Ok(Value::list(copied).with_attributes_of(v))
        }
        _ => Ok(v.deep_copy()),
    }
}

fn b_copy(interp: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let x = args.bind(ctx.name, &["x"])?.req(0)?;
    match &x.data {
        Data::RefObj(r) => Ok(copy_instance(interp, r)?),
        _ => Ok(x.deep_copy()),
    }
}

pub(crate) fn format_generator(_: &mut Interpreter, o: &S4Object) -> String {
    let class = o.slots.get("className").and_then(|c| c.scalar_str()).unwrap_or("?");
    let mut out = format!("Generator for class \"{class}\":\n");
    if let Some(f) = o.slots.get("fields") {
        let names = f.names().unwrap_or_default();
        let classes = f.as_strings().unwrap_or_default();
        let pairs: Vec<String> = names.iter().zip(classes).map(|(n, c)| format!("{n}: {c}")).collect();
        out.push_str(&format!("  fields: {}\n", pairs.join(", ")));
    }
    if let Some(m) = o.slots.get("methods").and_then(|m| m.as_strings()) {
        out.push_str(&format!("  methods: {}\n", m.join(", ")));
    }
    out
}
