//! Formal classes, generic functions and best-match multiple dispatch.
//!
//! A class's linearization lists the class and its superclasses depth-first
//! in declaration order, keeping first occurrences. Each entry carries its
//! inheritance distance: the length of the shortest containment path. `ANY`
//! sits one step beyond the whole linearization.

use std::collections::VecDeque;
use std::rc::Rc;
use std::sync::Arc;

use indexmap::IndexMap;

use crate::builtins::{combine, Builtin, CallArgs, CallCtx};
use crate::env::{Binding, EnvRef, Promise};
use crate::error::{bail, EvalError, EvalResult};
use crate::eval::{Flow, Interpreter, SuppliedArg};
use crate::reader::{parse_expr, Formal};
use crate::value::{Closure, Data, S4Object, Value};

pub const ANY: &str = "ANY";
pub const MISSING: &str = "missing";
pub const CLASS_REPRESENTATION: &str = "classRepresentation";
pub const GENERIC_FUNCTION: &str = "genericFunction";
pub const METHOD_DEFINITION: &str = "MethodDefinition";

const BASIC_CLASSES: &[(&str, &[&str])] = &[
    ("numeric", &[]),
    ("integer", &["numeric"]),
    ("character", &[]),
    ("logical", &[]),
    ("list", &[]),
    ("function", &[]),
    ("NULL", &[]),
    ("environment", &[]),
    ("expression", &[]),
    (MISSING, &[]),
    (CLASS_REPRESENTATION, &[]),
    (GENERIC_FUNCTION, &[]),
    (METHOD_DEFINITION, &[]),
    (crate::refclass::GENERATOR_CLASS, &[]),
];

const OPERATORS: &[&str] = &["+", "-", "*", "/", "^", "==", "!=", "<", "<=", ">", ">="];

#[derive(Debug, Clone)]
pub struct ClassDef {
    pub name: String,
    /// Own slots first, then inherited ones in linearization order.
    pub slots: IndexMap<String, String>,
    pub own_slots: IndexMap<String, String>,
    pub contains: Vec<String>,
    pub linearization: Vec<(String, usize)>,
    pub is_virtual: bool,
    pub basic: bool,
    pub reference: bool,
}

#[derive(Debug, Clone)]
pub struct MethodDef {
    pub signature: Vec<String>,
    pub implementation: Value,
}

#[derive(Debug, Clone)]
pub struct GenericDef {
    pub name: String,
    pub formals: Vec<String>,
    /// Formal names used for dispatch.
    pub signature: Vec<String>,
    pub methods: IndexMap<Vec<String>, MethodDef>,
}

#[derive(Debug, Clone, Default)]
pub struct Registry {
    classes: IndexMap<String, Rc<ClassDef>>,
    generics: IndexMap<String, GenericDef>,
}

/// Depth-first first-occurrence order over `contains`, each entry paired with
/// its breadth-first distance from `name`.
fn linearize(name: &str, contains: &[String], lookup: &IndexMap<String, Rc<ClassDef>>) -> Vec<(String, usize)> {
    let parents = |c: &str| -> Vec<String> {
        if c == name {
            contains.to_vec()
        } else {
            lookup.get(c).map(|d| d.contains.clone()).unwrap_or_default()
        }
    };
    let mut order = Vec::new();
    let mut stack = vec![name.to_string()];
    while let Some(c) = stack.pop() {
        if order.contains(&c) {
            continue;
        }
        for p in parents(&c).into_iter().rev() {
            stack.push(p);
        }
        order.push(c);
    }
    let mut dist: IndexMap<String, usize> = IndexMap::new();
    let mut queue = VecDeque::from([(name.to_string(), 0)]);
    while let Some((c, d)) = queue.pop_front() {
        if dist.contains_key(&c) {
            continue;
        }
        dist.insert(c.clone(), d);
        for p in parents(&c) {
            queue.push_back((p, d + 1));
        }
    }
    order.into_iter().map(|c| {
        let d = dist[&c];
        (c, d)
    }).collect()
}

impl Registry {
    pub fn with_basic_classes() -> Self {
        let mut r = Registry::default();
        for (name, contains) in BASIC_CLASSES {
            let contains: Vec<String> = contains.iter().map(|s| s.to_string()).collect();
            let linearization = linearize(name, &contains, &r.classes);
            r.classes.insert(
                name.to_string(),
                Rc::new(ClassDef {
                    name: name.to_string(),
                    slots: IndexMap::new(),
                    own_slots: IndexMap::new(),
                    contains,
                    linearization,
                    is_virtual: false,
                    basic: true,
                    reference: false,
                }),
            );
        }
        r
    }

    pub fn class(&self, name: &str) -> Option<&Rc<ClassDef>> {
        self.classes.get(name)
    }

    pub fn generic(&self, name: &str) -> Option<&GenericDef> {
        self.generics.get(name)
    }

    /// Defines (or redefines) a class.
    pub fn define_class(
        &mut self,
        name: &str,
        own_slots: IndexMap<String, String>,
        contains: Vec<String>,
        is_virtual: bool,
        reference: bool,
    ) -> EvalResult<Rc<ClassDef>> {
        if name == ANY {
            bail!("cannot redefine class \"ANY\"");
        }
        if self.classes.get(name).is_some_and(|c| c.basic) {
            bail!("cannot redefine basic class \"{name}\"");
        }
        for sup in &contains {
            let Some(def) = self.classes.get(sup) else {
                bail!("superclass \"{sup}\" of class \"{name}\" is not defined");
            };
            if def.linearization.iter().any(|(c, _)| c == name) {
                bail!("inheritance cycle: \"{name}\" would contain \"{sup}\", which already contains \"{name}\"");
            }
        }
        if self.classes.values().any(|c| c.name != name && c.contains.iter().any(|s| s == name)) {
            bail!("cannot redefine class \"{name}\": other classes contain it");
        }
        for (slot, cls) in &own_slots {
            if cls != ANY && !self.classes.contains_key(cls) && cls != name {
                bail!("undefined class \"{cls}\" for slot \"{slot}\" of class \"{name}\"");
            }
        }
        let linearization = linearize(name, &contains, &self.classes);
        let mut slots = own_slots.clone();
        for (anc, _) in linearization.iter().skip(1) {
            for (slot, cls) in &self.classes[anc].own_slots {
                if slots.contains_key(slot) {
                    bail!("duplicate slot \"{slot}\" in class \"{name}\": already defined by an inherited class");
                }
                slots.insert(slot.clone(), cls.clone());
            }
        }
        let def = Rc::new(ClassDef {
            name: name.to_string(),
            slots,
            own_slots,
            contains,
            linearization,
            is_virtual,
            basic: false,
            reference,
        });
        self.classes.insert(name.to_string(), def.clone());
        Ok(def)
    }

    /// Inheritance distance from `from` to `to`; `ANY` is one beyond the
    /// deepest superclass.
    pub fn distance(&self, from: &str, to: &str) -> Option<usize> {
        match self.classes.get(from) {
            Some(def) if to == ANY => Some(def.linearization.len()),
            Some(def) => def.linearization.iter().find(|(c, _)| c == to).map(|(_, d)| *d),
            None if to == ANY => Some(1),
            None => (from == to).then_some(0),
        }
    }

    pub fn linearization_names(&self, name: &str) -> Vec<String> {
        match self.classes.get(name) {
            Some(def) => def.linearization.iter().map(|(c, _)| c.clone()).collect(),
            None => vec![name.to_string()],
        }
    }

    /// Class used for formal dispatch and slot typing.
    pub fn class_of(&self, v: &Value) -> String {
        match &v.data {
            Data::S4(o) => o.class_name.clone(),
            Data::RefObj(r) => r.class_name.to_string(),
            _ => match v.class_attribute() {
                Some(c) if self.classes.contains_key(&c[0]) => c[0].clone(),
                _ => v.base_class().to_string(),
            },
        }
    }

    /// Whether `v` may be stored where class `cls` is declared.
    pub fn value_conforms(&self, v: &Value, cls: &str) -> bool {
        if cls == ANY {
            return true;
        }
        if v.class_attribute().is_some_and(|c| c.iter().any(|x| x == cls)) {
            return true;
        }
        let own = self.class_of(v);
        if self.distance(&own, cls).is_some() {
            return true;
        }
        cls == "function" && v.is_function()
    }

    /// Empty default for a slot of class `cls`, if the class has one.
    pub fn zero_value(&self, cls: &str) -> Option<Value> {
        Some(match cls {
            "numeric" => Value::doubles(Vec::new()),
            "integer" => Value::ints(Vec::new()),
            "character" => Value::strings(Vec::new()),
            "logical" => Value::logicals(Vec::new()),
            "list" => Value::list(Vec::new()),
            "NULL" | ANY => Value::null(),
            _ => return None,
        })
    }

    pub fn define_generic(&mut self, name: &str, formals: Vec<String>, signature: Vec<String>) -> EvalResult<()> {
        for s in &signature {
            if !formals.contains(s) {
                bail!("signature argument \"{s}\" is not a formal argument of generic \"{name}\"");
            }
        }
        let methods = match self.generics.shift_remove(name) {
            Some(old) if old.formals == formals && old.signature == signature => old.methods,
            _ => IndexMap::new(),
        };
        self.generics.insert(name.to_string(), GenericDef { name: name.to_string(), formals, signature, methods });
        Ok(())
    }

    /// Adds a method, padding its signature with `ANY`.
    pub fn add_method(&mut self, generic: &str, mut signature: Vec<String>, implementation: Value) -> EvalResult<MethodDef> {
        let Some(g) = self.generics.get(generic) else {
            bail!("no existing definition for function '{generic}'");
        };
        if signature.len() > g.signature.len() {
            bail!(
                "more elements in the method signature ({}) than in the generic signature ({}) for function '{generic}'",
                signature.len(),
                g.signature.len()
            );
        }
        for c in &signature {
            if c != ANY && !self.classes.contains_key(c) {
                bail!("no definition for class \"{c}\" in method signature for '{generic}'");
            }
        }
        signature.resize(g.signature.len(), ANY.to_string());
        let m = MethodDef { signature: signature.clone(), implementation };
        self.generics.get_mut(generic).expect("checked").methods.insert(signature, m.clone());
        Ok(m)
    }

    /// Best method for `actual` classes: minimal distance sum, then
    /// lexicographically smallest distance tuple; exact ties are ambiguous.
    pub fn select_method(&self, generic: &str, actual: &[String]) -> EvalResult<&MethodDef> {
        let Some(g) = self.generics.get(generic) else {
            bail!("no generic function found for '{generic}'");
        };
        let mut best: Vec<(&MethodDef, usize, Vec<usize>)> = Vec::new();
        for m in g.methods.values() {
            let dists: Option<Vec<usize>> =
                actual.iter().zip(&m.signature).map(|(a, s)| self.distance(a, s)).collect();
            let Some(d) = dists else { continue };
            let key = (d.iter().sum::<usize>(), d);
            match best.first() {
                None => best.push((m, key.0, key.1)),
                Some((_, s, t)) => match (key.0, &key.1).cmp(&(*s, t)) {
                    std::cmp::Ordering::Less => best = vec![(m, key.0, key.1)],
                    std::cmp::Ordering::Equal => best.push((m, key.0, key.1)),
                    std::cmp::Ordering::Greater => {}
                },
            }
        }
        match best.as_slice() {
            [] => bail!(
                "unable to find an inherited method for function '{generic}' for signature {}",
                quote_sig(actual)
            ),
            [(m, _, _)] => Ok(m),
            tied => bail!(
                "ambiguous method selection for function '{generic}' on signature {}: candidates {}",
                quote_sig(actual),
                tied.iter().map(|(m, _, _)| quote_sig(&m.signature)).collect::<Vec<_>>().join(", ")
            ),
        }
    }
}

fn quote_sig(sig: &[String]) -> String {
    format!("({})", sig.iter().map(|c| format!("\"{c}\"")).collect::<Vec<_>>().join(", "))
}

pub(crate) fn builtins() -> Vec<Builtin> {
    vec![
        Builtin::eager("set_class", b_set_class),
        Builtin::eager("new", b_new),
        Builtin::eager("slot", b_slot),
        Builtin::eager("slot_set", b_slot_set),
        Builtin::eager("is", b_is),
        Builtin::eager("class_distance", b_class_distance),
        Builtin::eager("signature", b_signature),
        Builtin::eager("set_generic", b_set_generic),
        Builtin::eager("standard_generic", b_standard_generic),
        Builtin::eager("set_method", b_set_method),
        Builtin::eager("get_class", b_get_class),
        Builtin::eager("get_generic", b_get_generic),
        Builtin::eager("get_method", b_get_method),
        Builtin::eager("select_method", b_select_method),
        Builtin::eager("is_virtual_class", b_is_virtual_class),
    ]
}

fn strings_arg(v: Option<Value>, what: &str) -> EvalResult<Vec<String>> {
    match v {
        None => Ok(Vec::new()),
        Some(v) if v.is_null() => Ok(Vec::new()),
        Some(v) => match v.as_strings() {
            Some(s) => Ok(s.to_vec()),
            None => bail!("'{what}' must be a character vector"),
        },
    }
}

/// Slot declarations from a named character vector or named list of strings.
fn slot_decls(v: Option<Value>) -> EvalResult<IndexMap<String, String>> {
    let Some(v) = v.filter(|v| !v.is_null()) else { return Ok(IndexMap::new()) };
    let Some(names) = v.names() else { bail!("slots must be given as a named character vector") };
    let classes: Vec<String> = match &v.data {
        Data::Str(s) => s.to_vec(),
        Data::List(items) => items
            .iter()
            .map(|i| i.scalar_str().map(str::to_string).ok_or_else(|| EvalError::new("slot classes must be strings")))
            .collect::<EvalResult<_>>()?,
        _ => bail!("slots must be given as a named character vector"),
    };
    let mut out = IndexMap::new();
    for (n, c) in names.into_iter().zip(classes) {
        if n.is_empty() {
            bail!("all slots must be named");
        }
        if out.insert(n.clone(), c).is_some() {
            bail!("duplicate slot \"{n}\"");
        }
    }
    Ok(out)
}

fn named_strings(pairs: &IndexMap<String, String>) -> Value {
    Value::strings(pairs.values().cloned().collect())
        .set_attribute("names", Value::strings(pairs.keys().cloned().collect()))
        .expect("lengths agree")
}

pub(crate) fn class_representation(def: &ClassDef) -> Value {
    let mut slots = IndexMap::new();
    slots.insert("className".to_string(), Value::string(def.name.clone()));
    slots.insert("slots".to_string(), named_strings(&def.slots));
    slots.insert("contains".to_string(), Value::strings(def.linearization.iter().skip(1).map(|(c, _)| c.clone()).collect()));
    slots.insert(
        "distances".to_string(),
        Value::ints(def.linearization.iter().skip(1).map(|(_, d)| *d as i64).collect()),
    );
    slots.insert("virtual".to_string(), Value::logical(def.is_virtual));
    Value::s4(S4Object { class_name: CLASS_REPRESENTATION.to_string(), slots })
}

fn method_object(generic: &str, m: &MethodDef) -> Value {
    let mut slots = IndexMap::new();
    slots.insert("generic".to_string(), Value::string(generic));
    slots.insert("signature".to_string(), Value::strings(m.signature.clone()));
    slots.insert("implementation".to_string(), m.implementation.clone());
    Value::s4(S4Object { class_name: METHOD_DEFINITION.to_string(), slots })
}

fn generic_object(g: &GenericDef) -> Value {
    let mut slots = IndexMap::new();
    slots.insert("name".to_string(), Value::string(g.name.clone()));
    slots.insert("formals".to_string(), Value::strings(g.formals.clone()));
    slots.insert("signature".to_string(), Value::strings(g.signature.clone()));
    let methods = g.methods.keys().map(|sig| Value::strings(sig.clone())).collect();
    slots.insert("methods".to_string(), Value::list(methods));
    Value::s4(S4Object { class_name: GENERIC_FUNCTION.to_string(), slots })
}

fn b_set_class(interp: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let mut b = args.bind(ctx.name, &["Class", "slots", "contains", "virtual"])?;
    let name = b.string(0)?;
    let slots = slot_decls(b.opt(1))?;
    let contains = strings_arg(b.opt(2), "contains")?;
    let is_virtual = b.flag(3, false)?;
    for sup in &contains {
        if interp.classes.class(sup).is_some_and(|c| c.reference) {
            bail!("class \"{name}\" cannot contain reference class \"{sup}\"");
        }
    }
    let def = interp.classes.define_class(&name, slots, contains, is_virtual, false)?;
    interp.set_invisible();
    Ok(class_representation(&def))
}

/// Builds a validated instance of `class` from named slot values.
pub(crate) fn new_instance(interp: &mut Interpreter, class: &str, inits: Vec<(Option<String>, Value)>) -> EvalResult<Value> {
    let Some(def) = interp.classes.class(class).cloned() else {
        bail!("undefined class \"{class}\"");
    };
    if def.is_virtual {
        bail!("cannot allocate an object of a virtual class (\"{class}\")");
    }
    if def.basic {
        bail!("cannot use new() for basic class \"{class}\"");
    }
    let mut given: IndexMap<String, Value> = IndexMap::new();
    for (n, v) in inits {
        let Some(n) = n else { bail!("slot values for new(\"{class}\") must be named") };
        let Some(decl) = def.slots.get(&n) else {
            bail!("invalid name for slot of class \"{class}\": {n}");
        };
        check_slot(&interp.classes, class, &n, decl, &v)?;
        given.insert(n, v);
    }
    let mut slots = IndexMap::new();
    for (n, decl) in &def.slots {
        let v = match given.shift_remove(n) {
            Some(v) => v,
            None => interp.classes.zero_value(decl).ok_or_else(|| {
                EvalError::new(format!(
                    "slot \"{n}\" of class \"{class}\" has class \"{decl}\", which has no default; supply it to new()"
                ))
            })?,
        };
        slots.insert(n.clone(), v);
    }
    Ok(Value::s4(S4Object { class_name: class.to_string(), slots }))
}

fn check_slot(reg: &Registry, class: &str, slot: &str, decl: &str, v: &Value) -> EvalResult<()> {
    if reg.value_conforms(v, decl) {
        return Ok(());
    }
    bail!(
        "invalid class \"{class}\" object: invalid object for slot \"{slot}\" in class \"{class}\": got class \"{}\", should be or extend class \"{decl}\"",
        reg.class_of(v)
    )
}

fn b_new(interp: &mut Interpreter, args: CallArgs, _: &CallCtx) -> Flow<Value> {
    let mut items = args.into_items();
    if items.is_empty() {
        bail!("argument \"Class\" is missing, with no default");
    }
    let (_, class) = items.remove(0);
    let Some(class) = class.scalar_str().map(str::to_string) else { bail!("'Class' must be a class name") };
    if let Some(def) = interp.refclasses.get(&class).cloned() {
        return crate::refclass::instantiate(interp, &def, items);
    }
    Ok(new_instance(interp, &class, items)?)
}

fn s4_arg(v: &Value) -> EvalResult<&S4Object> {
    match &v.data {
        Data::S4(o) => Ok(o),
        _ => bail!("no slots in an object of class \"{}\"", v.base_class()),
    }
}

fn b_slot(_: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let mut b = args.bind(ctx.name, &["object", "name"])?;
    let obj = b.req(0)?;
    let name = b.string(1)?;
    let o = s4_arg(&obj)?;
    match o.slots.get(&name) {
        Some(v) => Ok(v.clone()),
        None => bail!("no slot of name \"{name}\" for this object of class \"{}\"", o.class_name),
    }
}

/// Copy of `obj` with one slot replaced, after type checking.
pub(crate) fn slot_set(interp: &Interpreter, obj: Value, name: &str, v: Value) -> EvalResult<Value> {
    let o = s4_arg(&obj)?;
    let decl = interp
        .classes
        .class(&o.class_name)
        .and_then(|d| d.slots.get(name).cloned())
        .ok_or_else(|| EvalError::new(format!("no slot of name \"{name}\" for this object of class \"{}\"", o.class_name)))?;
    check_slot(&interp.classes, &o.class_name, name, &decl, &v)?;
    let mut out = obj;
    if let Data::S4(o) = &mut out.data {
        Rc::make_mut(o).slots.insert(name.to_string(), v);
    }
    Ok(out)
}

fn b_slot_set(interp: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let mut b = args.bind(ctx.name, &["object", "name", "value"])?;
    let obj = b.req(0)?;
    let name = b.string(1)?;
    let v = b.req(2)?;
    Ok(slot_set(interp, obj, &name, v)?)
}

fn b_is(interp: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let mut b = args.bind(ctx.name, &["object", "class2"])?;
    let obj = b.req(0)?;
    match b.opt_string(1)? {
        Some(c) => Ok(Value::logical(interp.classes.value_conforms(&obj, &c))),
        None => Ok(Value::strings(interp.classes.linearization_names(&interp.classes.class_of(&obj)))),
    }
}

fn b_class_distance(interp: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let mut b = args.bind(ctx.name, &["from", "to"])?;
    let from = b.string(0)?;
    let to = b.string(1)?;
    Ok(match interp.classes.distance(&from, &to) {
        Some(d) => Value::int(d as i64),
        None => Value::null(),
    })
}

fn b_signature(_: &mut Interpreter, args: CallArgs, _: &CallCtx) -> Flow<Value> {
    let v = combine(args.into_items());
    if !v.is_null() && v.as_strings().is_none() {
        bail!("signature elements must be class names");
    }
    Ok(v)
}

fn standard_generic_closure(name: &str, formals: Arc<[Formal]>, env: &EnvRef) -> Value {
    let body = parse_expr(&format!("standard_generic({})", crate::reader::quote_string(name)))
        .expect("generated call parses");
    Value::closure(Closure { formals, body: Arc::new(body), env: env.clone() })
}

fn arg_formals(names: &[&str]) -> Arc<[Formal]> {
    names.iter().map(|n| Formal { name: n.to_string(), default: None }).collect()
}

/// `set_generic(name, def, signature)`. Without `def`, the function
/// currently visible under `name` becomes the `ANY` method.
fn b_set_generic(interp: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let mut b = args.bind(ctx.name, &["name", "def", "signature"])?;
    let name = b.string(0)?;
    let def = b.opt(1).filter(|v| !v.is_null());
    let signature = strings_arg(b.opt(2), "signature")?;
    let (closure, fallback) = match def {
        Some(d) => {
            let Some(c) = d.as_closure() else { bail!("'def' must be a function") };
            (c.clone(), None)
        }
        None => {
            let Some(existing) = interp.find_function(&name, &ctx.env)? else {
                bail!("must supply a function skeleton for '{name}', explicitly or via an existing function");
            };
            let formals = match &existing.data {
                Data::Closure(c) => c.formals.clone(),
                _ if OPERATORS.contains(&name.as_str()) => arg_formals(&["e1", "e2"]),
                _ => arg_formals(&["x"]),
            };
            let g = standard_generic_closure(&name, formals, &ctx.env);
            (g.as_closure().expect("closure").clone(), Some(existing))
        }
    };
    let formals: Vec<String> = closure.formals.iter().map(|f| f.name.clone()).collect();
    let signature = if signature.is_empty() { formals.clone() } else { signature };
    interp.classes.define_generic(&name, formals, signature)?;
    if let Some(f) = fallback {
        interp.classes.add_method(&name, Vec::new(), f)?;
    }
    if !OPERATORS.contains(&name.as_str()) {
        interp.assign_in_frame(&ctx.env, &name, Data::Closure(closure).into())?;
    }
    interp.set_invisible();
    Ok(generic_object(interp.classes.generic(&name).expect("just defined")))
}

/// Classes of the dispatch arguments of the generic call running in `env`.
fn dispatch_classes(interp: &mut Interpreter, g: &GenericDef, env: &EnvRef) -> Flow<Vec<String>> {
    let mut out = Vec::with_capacity(g.signature.len());
    for formal in &g.signature {
        let cls = match env.get_local(formal) {
            Some(Binding::Missing) | None => MISSING.to_string(),
            Some(b) => {
                let v = interp.read_binding(formal, b, env)?;
                interp.classes.class_of(&v)
            }
        };
        out.push(cls);
    }
    Ok(out)
}

fn b_standard_generic(interp: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let name = args.bind(ctx.name, &["f"])?.string(0)?;
    let Some(g) = interp.classes.generic(&name).cloned() else {
        bail!("no generic function definition found for '{name}'");
    };
    let Some(frame) = interp.frame_for(&ctx.env) else {
        bail!("standard_generic called from outside a generic function");
    };
    let classes = dispatch_classes(interp, &g, &ctx.env)?;
    let method = interp.classes.select_method(&name, &classes)?.implementation.clone();
    interp.call_with_promises(&method, frame.args.to_vec(), &frame.caller, &name)
}

fn method_formals(v: &Value) -> Option<Vec<String>> {
    v.as_closure().map(|c| c.formals.iter().map(|f| f.name.clone()).collect())
}

fn b_set_method(interp: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let mut b = args.bind(ctx.name, &["f", "signature", "definition"])?;
    let name = b.string(0)?;
    let sig_value = b.opt(1).unwrap_or_default();
    let def = b.req(2)?;
    if !def.is_function() {
        bail!("method definition for '{name}' must be a function");
    }
    if interp.classes.generic(&name).is_none() {
        if !OPERATORS.contains(&name.as_str()) {
            bail!("no existing definition for function '{name}'");
        }
        interp.classes.define_generic(&name, vec!["e1".into(), "e2".into()], vec!["e1".into(), "e2".into()])?;
    }
    let g = interp.classes.generic(&name).expect("defined").clone();
    if let Some(f) = method_formals(&def) {
        if f != g.formals {
            bail!(
                "formal arguments of the method ({}) differ from those of generic '{name}' ({})",
                f.join(", "),
                g.formals.join(", ")
            );
        }
    }
    let mut signature = strings_arg(Some(sig_value.clone()), "signature")?;
    if let Some(names) = sig_value.names() {
        let mut by_pos = vec![ANY.to_string(); g.signature.len()];
        for (n, c) in names.iter().zip(&signature) {
            let Some(i) = g.signature.iter().position(|s| s == n) else {
                bail!("'{n}' is not in the signature of generic '{name}'");
            };
            by_pos[i] = c.clone();
        }
        signature = by_pos;
    }
    let m = interp.classes.add_method(&name, signature, def)?;
    interp.set_invisible();
    Ok(method_object(&name, &m))
}

fn b_get_class(interp: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let name = args.bind(ctx.name, &["Class"])?.string(0)?;
    match interp.classes.class(&name) {
        Some(def) => Ok(class_representation(def)),
        None => bail!("\"{name}\" is not a defined class"),
    }
}

fn b_get_generic(interp: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let name = args.bind(ctx.name, &["f"])?.string(0)?;
    match interp.classes.generic(&name) {
        Some(g) => Ok(generic_object(g)),
        None => bail!("no generic function found for '{name}'"),
    }
}

fn b_get_method(interp: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let mut b = args.bind(ctx.name, &["f", "signature"])?;
    let name = b.string(0)?;
    let mut sig = strings_arg(b.opt(1), "signature")?;
    let Some(g) = interp.classes.generic(&name) else { bail!("no generic function found for '{name}'") };
    sig.resize(g.signature.len(), ANY.to_string());
    match g.methods.get(&sig) {
        Some(m) => Ok(m.implementation.clone()),
        None => bail!("no method for '{name}' matches the signature {}", quote_sig(&sig)),
    }
}

fn b_select_method(interp: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let mut b = args.bind(ctx.name, &["f", "signature"])?;
    let name = b.string(0)?;
    let mut sig = strings_arg(b.opt(1), "signature")?;
    let Some(g) = interp.classes.generic(&name) else { bail!("no generic function found for '{name}'") };
    sig.resize(g.signature.len(), ANY.to_string());
    let m = interp.classes.select_method(&name, &sig)?;
    Ok(method_object(&name, m))
}

fn b_is_virtual_class(interp: &mut Interpreter, args: CallArgs, ctx: &CallCtx) -> Flow<Value> {
    let name = args.bind(ctx.name, &["Class"])?.string(0)?;
    Ok(Value::logical(interp.classes.class(&name).is_some_and(|c| c.is_virtual)))
}

/// Runs an S4 method for an operator when one is applicable.
pub(crate) fn dispatch_operator(interp: &mut Interpreter, op: &str, vals: &[Value], env: &EnvRef) -> Flow<Option<Value>> {
    let Some(g) = interp.classes.generic(op) else { return Ok(None) };
    let mut classes: Vec<String> = vals.iter().map(|v| interp.classes.class_of(v)).collect();
    classes.resize(g.signature.len(), MISSING.to_string());
    let method = match interp.classes.select_method(op, &classes) {
        Ok(m) => m.implementation.clone(),
        Err(_) => return Ok(None),
    };
    let supplied = vals.iter().map(|v| SuppliedArg::positional(Promise::forced(v.clone()))).collect();
    interp.call_with_promises(&method, supplied, env, op).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn slots(pairs: &[(&str, &str)]) -> IndexMap<String, String> {
        pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    fn names(xs: &[&str]) -> Vec<String> {
        xs.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn merged_slots_and_linearization() {
        let mut r = Registry::with_basic_classes();
        r.define_class("A", slots(&[("x", "numeric")]), vec![], false, false).unwrap();
        let b = r.define_class("B", slots(&[("y", "numeric")]), names(&["A"]), false, false).unwrap();
        assert_eq!(b.slots.keys().collect::<Vec<_>>(), ["y", "x"]);
        assert_eq!(b.linearization, vec![("B".to_string(), 0), ("A".to_string(), 1)]);
        assert_eq!(r.distance("B", "B"), Some(0));
        assert_eq!(r.distance("B", "A"), Some(1));
        assert_eq!(r.distance("A", "B"), None);
        assert_eq!(r.distance("B", ANY), Some(2));
    }

    #[test]
    fn cycles_and_collisions_are_rejected() {
        let mut r = Registry::with_basic_classes();
        r.define_class("A", slots(&[("x", "numeric")]), vec![], false, false).unwrap();
        r.define_class("B", IndexMap::new(), names(&["A"]), false, false).unwrap();
        let e = r.define_class("A", IndexMap::new(), names(&["B"]), false, false).unwrap_err();
        assert!(e.message.contains("cycle"), "{}", e.message);
        let e = r.define_class("C", slots(&[("x", "character")]), names(&["A"]), false, false).unwrap_err();
        assert!(e.message.contains("duplicate slot"));
    }

    #[test]
    fn diamond_distance_is_shortest_path() {
        let mut r = Registry::with_basic_classes();
        r.define_class("Base", IndexMap::new(), vec![], false, false).unwrap();
        r.define_class("Mid", IndexMap::new(), names(&["Base"]), false, false).unwrap();
        r.define_class("Leaf", IndexMap::new(), names(&["Mid", "Base"]), false, false).unwrap();
        let lin = &r.class("Leaf").unwrap().linearization;
        assert_eq!(lin.iter().map(|(c, _)| c.as_str()).collect::<Vec<_>>(), ["Leaf", "Mid", "Base"]);
        assert_eq!(r.distance("Leaf", "Base"), Some(1));
    }

    fn table(r: &mut Registry, sigs: &[&[&str]]) {
        r.define_generic("g", names(&["a", "b"]), names(&["a", "b"])).unwrap();
        for s in sigs {
            r.add_method("g", names(s), Value::string(s.join(","))).unwrap();
        }
    }

    #[test]
    fn sum_then_leftmost_tie_break() {
        let mut r = Registry::with_basic_classes();
        r.define_class("A", IndexMap::new(), vec![], false, false).unwrap();
        r.define_class("C", IndexMap::new(), vec![], false, false).unwrap();
        table(&mut r, &[&["A", "ANY"], &["ANY", "A"], &["A", "A"]]);
        let pick = |r: &Registry, a: &[&str]| r.select_method("g", &names(a)).unwrap().signature.clone();
        assert_eq!(pick(&r, &["A", "A"]), names(&["A", "A"]));
        assert_eq!(pick(&r, &["A", "C"]), names(&["A", "ANY"]));
        assert!(r.select_method("g", &names(&["C", "C"])).is_err());
    }

    #[test]
    fn multiple_inheritance_tie_is_ambiguous() {
        let mut r = Registry::with_basic_classes();
        r.define_class("P", IndexMap::new(), vec![], false, false).unwrap();
        r.define_class("Q", IndexMap::new(), vec![], false, false).unwrap();
        r.define_class("R", IndexMap::new(), names(&["P", "Q"]), false, false).unwrap();
        table(&mut r, &[&["P"], &["Q"]]);
        let e = r.select_method("g", &names(&["R", "R"])).unwrap_err();
        assert!(e.message.contains("ambiguous"));
    }

    #[test]
    fn integer_extends_numeric() {
        let r = Registry::with_basic_classes();
        assert!(r.value_conforms(&Value::int(1), "numeric"));
        assert!(!r.value_conforms(&Value::string("x"), "numeric"));
        assert!(r.value_conforms(&Value::string("x"), ANY));
    }
}
