//! The universal value representation.
//!
//! Every datum, function, quoted expression and class definition is a
//! [`Value`]: a kind-specific payload plus an optional ordered attribute map.
//! Payloads live behind reference counts and are only ever changed through
//! `Rc::make_mut`, so a binding observes copy semantics even though storage
//! is shared until the first modification. Environments and reference-class
//! instances are the exception: they alias.

use std::rc::Rc;
use std::sync::Arc;

use indexmap::IndexMap;

use crate::builtins::Builtin;
use crate::env::EnvRef;
use crate::error::{bail, EvalResult};
use crate::reader::{Expr, Formal};

pub type Attributes = IndexMap<String, Value>;

#[derive(Debug, Clone)]
pub struct Closure {
    pub formals: Arc<[Formal]>,
    pub body: Arc<Expr>,
    pub env: EnvRef,
}

/// An instance of a formally defined class.
#[derive(Debug, Clone)]
pub struct S4Object {
    pub class_name: String,
    pub slots: IndexMap<String, Value>,
}

/// A reference-class instance. Cloning copies the reference only.
#[derive(Debug, Clone)]
pub struct RefObject {
    pub class_name: Rc<str>,
    pub backing: EnvRef,
}

#[derive(Debug, Clone)]
pub enum Data {
    Null,
    Logical(Rc<Vec<bool>>),
    Integer(Rc<Vec<i64>>),
    Double(Rc<Vec<f64>>),
    Str(Rc<Vec<String>>),
    List(Rc<Vec<Value>>),
    Closure(Rc<Closure>),
    Builtin(Rc<Builtin>),
    Expression(Arc<Expr>),
    Environment(EnvRef),
    S4(Rc<S4Object>),
    RefObj(RefObject),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Null,
    Logical,
    Integer,
    Double,
    Str,
    List,
    Closure,
    Builtin,
    Expression,
    Environment,
    S4,
    RefObj,
}

#[derive(Debug, Clone)]
pub struct Value {
    pub data: Data,
    attrs: Option<Rc<Attributes>>,
}

impl Default for Value {
    fn default() -> Self {
        Value::null()
    }
}

impl From<Data> for Value {
    fn from(data: Data) -> Self {
        Value { data, attrs: None }
    }
}

impl Value {
    pub fn null() -> Self {
        Data::Null.into()
    }
    pub fn double(x: f64) -> Self {
        Self::doubles(vec![x])
    }
    pub fn doubles(xs: Vec<f64>) -> Self {
        Data::Double(Rc::new(xs)).into()
    }
    pub fn int(x: i64) -> Self {
        Self::ints(vec![x])
    }
    pub fn ints(xs: Vec<i64>) -> Self {
        Data::Integer(Rc::new(xs)).into()
    }
    pub fn logical(b: bool) -> Self {
        Self::logicals(vec![b])
    }
    pub fn logicals(bs: Vec<bool>) -> Self {
        Data::Logical(Rc::new(bs)).into()
    }
    pub fn string(s: impl Into<String>) -> Self {
        Self::strings(vec![s.into()])
    }
    pub fn strings(ss: Vec<String>) -> Self {
        Data::Str(Rc::new(ss)).into()
    }
    pub fn list(items: Vec<Value>) -> Self {
        Data::List(Rc::new(items)).into()
    }
    pub fn named_list(items: Vec<(String, Value)>) -> Self {
        let (names, values): (Vec<_>, Vec<_>) = items.into_iter().unzip();
        let mut v = Self::list(values);
        v.attrs_mut().insert("names".into(), Value::strings(names));
        v
    }
    pub fn closure(c: Closure) -> Self {
        Data::Closure(Rc::new(c)).into()
    }
    pub fn expression(e: Arc<Expr>) -> Self {
        Data::Expression(e).into()
    }
    pub fn environment(e: EnvRef) -> Self {
        Data::Environment(e).into()
    }
    pub fn s4(obj: S4Object) -> Self {
        Data::S4(Rc::new(obj)).into()
    }

    pub fn kind(&self) -> Kind {
        match &self.data {
            Data::Null => Kind::Null,
            Data::Logical(_) => Kind::Logical,
            Data::Integer(_) => Kind::Integer,
            Data::Double(_) => Kind::Double,
            Data::Str(_) => Kind::Str,
            Data::List(_) => Kind::List,
            Data::Closure(_) => Kind::Closure,
            Data::Builtin(_) => Kind::Builtin,
            Data::Expression(_) => Kind::Expression,
            Data::Environment(_) => Kind::Environment,
            Data::S4(_) => Kind::S4,
            Data::RefObj(_) => Kind::RefObj,
        }
    }

    pub fn is_null(&self) -> bool {
        matches!(self.data, Data::Null)
    }

    pub fn is_function(&self) -> bool {
        matches!(self.data, Data::Closure(_) | Data::Builtin(_)) || self.is_generator()
    }

    pub fn is_generator(&self) -> bool {
        matches!(&self.data, Data::S4(o) if o.class_name == crate::refclass::GENERATOR_CLASS)
    }

    pub fn is_atomic(&self) -> bool {
        matches!(
            self.data,
            Data::Logical(_) | Data::Integer(_) | Data::Double(_) | Data::Str(_)
        )
    }

    /// Values whose identity is shared by every reference to them.
    pub fn is_reference(&self) -> bool {
        matches!(self.data, Data::Environment(_) | Data::RefObj(_))
    }

    /// Number of elements; non-vector kinds have length 1 (NULL has 0).
    pub fn len(&self) -> usize {
        match &self.data {
            Data::Null => 0,
            Data::Logical(v) => v.len(),
            Data::Integer(v) => v.len(),
            Data::Double(v) => v.len(),
            Data::Str(v) => v.len(),
            Data::List(v) => v.len(),
            _ => 1,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn attributes(&self) -> Option<&Attributes> {
        self.attrs.as_deref()
    }

    pub(crate) fn attrs_mut(&mut self) -> &mut Attributes {
        Rc::make_mut(self.attrs.get_or_insert_with(Default::default))
    }

    pub(crate) fn with_attributes_of(mut self, other: &Value) -> Value {
        self.attrs = other.attrs.clone();
        self
    }

    /// Returns the attribute or NULL when absent.
    pub fn get_attribute(&self, name: &str) -> Value {
        self.attrs
            .as_ref()
            .and_then(|a| a.get(name))
            .cloned()
            .unwrap_or_default()
    }

    /// Returns a copy of `self` with `name` set to `attr`; NULL removes it.
    pub fn set_attribute(mut self, name: &str, attr: Value) -> EvalResult<Value> {
        if name == "class" && !attr.is_null() {
            match &attr.data {
                Data::Str(s) if !s.is_empty() => {}
                _ => bail!("invalid class attribute"),
            }
        }
        if name == "names" && !attr.is_null() {
            match &attr.data {
                Data::Str(s) if s.len() == self.len() => {}
                Data::Str(_) => bail!(
                    "'names' attribute must be the same length as the vector ({} elements)",
                    self.len()
                ),
                _ => bail!("'names' attribute must be a character vector"),
            }
        }
        if attr.is_null() {
            if let Some(a) = &mut self.attrs {
                Rc::make_mut(a).shift_remove(name);
                if a.is_empty() {
                    self.attrs = None;
                }
            }
        } else {
            self.attrs_mut().insert(name.to_string(), attr);
        }
        Ok(self)
    }

    pub fn class_attribute(&self) -> Option<&[String]> {
        match self.attrs.as_ref()?.get("class").map(|c| &c.data) {
            Some(Data::Str(s)) => Some(s),
            _ => None,
        }
    }

    /// True when the value carries an explicit class (attribute or formal class).
    pub fn is_object(&self) -> bool {
        self.class_attribute().is_some() || matches!(self.data, Data::S4(_) | Data::RefObj(_))
    }

    pub fn names(&self) -> Option<Vec<String>> {
        match self.attrs.as_ref()?.get("names").map(|c| &c.data) {
            Some(Data::Str(s)) => Some(s.to_vec()),
            _ => None,
        }
    }

    /// Name of the base kind, used when no class attribute is present.
    pub fn base_class(&self) -> &str {
        match &self.data {
            Data::Null => "NULL",
            Data::Logical(_) => "logical",
            Data::Integer(_) => "integer",
            Data::Double(_) => "numeric",
            Data::Str(_) => "character",
            Data::List(_) => "list",
            Data::Closure(_) | Data::Builtin(_) => "function",
            Data::Expression(_) => "expression",
            Data::Environment(_) => "environment",
            Data::S4(o) => &o.class_name,
            Data::RefObj(r) => &r.class_name,
        }
    }

    /// A copy sharing no storage with `self`, except that environments and
    /// reference instances keep pointing at the same object.
    pub fn deep_copy(&self) -> Value {
        let data = match &self.data {
            Data::Null => Data::Null,
            Data::Logical(v) => Data::Logical(Rc::new(v.to_vec())),
            Data::Integer(v) => Data::Integer(Rc::new(v.to_vec())),
            Data::Double(v) => Data::Double(Rc::new(v.to_vec())),
            Data::Str(v) => Data::Str(Rc::new(v.to_vec())),
            Data::List(v) => Data::List(Rc::new(v.iter().map(Value::deep_copy).collect())),
            Data::Closure(c) => Data::Closure(Rc::new((**c).clone())),
            Data::Builtin(b) => Data::Builtin(b.clone()),
            Data::Expression(e) => Data::Expression(Arc::new((**e).clone())),
            Data::Environment(e) => Data::Environment(e.clone()),
            Data::S4(o) => Data::S4(Rc::new(S4Object {
                class_name: o.class_name.clone(),
                slots: o.slots.iter().map(|(k, v)| (k.clone(), v.deep_copy())).collect(),
            })),
            Data::RefObj(r) => Data::RefObj(r.clone()),
        };
        let attrs = self.attrs.as_ref().map(|a| {
            Rc::new(a.iter().map(|(k, v)| (k.clone(), v.deep_copy())).collect())
        });
        Value { data, attrs }
    }

    pub fn as_closure(&self) -> Option<&Rc<Closure>> {
        match &self.data {
            Data::Closure(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_env(&self) -> Option<&EnvRef> {
        match &self.data {
            Data::Environment(e) => Some(e),
            _ => None,
        }
    }

    pub fn as_doubles(&self) -> Option<&[f64]> {
        match &self.data {
            Data::Double(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_strings(&self) -> Option<&[String]> {
        match &self.data {
            Data::Str(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Value]> {
        match &self.data {
            Data::List(v) => Some(v),
            _ => None,
        }
    }

    /// First element as a double, coercing logical and integer.
    pub fn scalar_f64(&self) -> Option<f64> {
        match &self.data {
            Data::Double(v) => v.first().copied(),
            Data::Integer(v) => v.first().map(|&i| i as f64),
            Data::Logical(v) => v.first().map(|&b| if b { 1.0 } else { 0.0 }),
            _ => None,
        }
    }

    pub fn scalar_str(&self) -> Option<&str> {
        match &self.data {
            Data::Str(v) if v.len() == 1 => Some(&v[0]),
            _ => None,
        }
    }
}

/// The class vector used for S3 dispatch: the class attribute if present,
/// otherwise a one-element vector naming the base kind. Never empty.
pub fn implicit_class(v: &Value) -> Vec<String> {
    match v.class_attribute() {
        Some(c) => c.to_vec(),
        None => vec![v.base_class().to_string()],
    }
}

fn same_f64(a: f64, b: f64) -> bool {
    a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan())
}

/// Structural equality: doubles compare bitwise except that NaN equals NaN;
/// environments and reference instances compare by identity.
pub fn identical(a: &Value, b: &Value) -> bool {
    let data_eq = match (&a.data, &b.data) {
        (Data::Null, Data::Null) => true,
        (Data::Logical(x), Data::Logical(y)) => x == y,
        (Data::Integer(x), Data::Integer(y)) => x == y,
        (Data::Double(x), Data::Double(y)) => {
            x.len() == y.len() && x.iter().zip(y.iter()).all(|(p, q)| same_f64(*p, *q))
        }
        (Data::Str(x), Data::Str(y)) => x == y,
        (Data::List(x), Data::List(y)) => {
            x.len() == y.len() && x.iter().zip(y.iter()).all(|(p, q)| identical(p, q))
        }
        (Data::Closure(x), Data::Closure(y)) => {
            Rc::ptr_eq(x, y)
                || (x.formals == y.formals && x.body == y.body && x.env.ptr_eq(&y.env))
        }
        (Data::Builtin(x), Data::Builtin(y)) => x.name == y.name,
        (Data::Expression(x), Data::Expression(y)) => x == y,
        (Data::Environment(x), Data::Environment(y)) => x.ptr_eq(y),
        (Data::S4(x), Data::S4(y)) => {
            x.class_name == y.class_name
                && x.slots.len() == y.slots.len()
                && x.slots
                    .iter()
                    .all(|(k, v)| y.slots.get(k).is_some_and(|w| identical(v, w)))
        }
        (Data::RefObj(x), Data::RefObj(y)) => x.backing.ptr_eq(&y.backing),
        _ => false,
    };
    data_eq && attrs_identical(a.attributes(), b.attributes())
}

fn attrs_identical(a: Option<&Attributes>, b: Option<&Attributes>) -> bool {
    let empty = Attributes::new();
    let a = a.unwrap_or(&empty);
    let b = b.unwrap_or(&empty);
    a.len() == b.len() && a.iter().all(|(k, v)| b.get(k).is_some_and(|w| identical(v, w)))
}
