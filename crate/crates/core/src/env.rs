//! Environments: mutable name→binding frames with a parent chain.
//!
//! A reference is a name plus an environment. Environments are the only
//! aliasing values; everything stored in them is observed with copy semantics.

use std::cell::RefCell;
use std::fmt;
use std::rc::Rc;
use std::sync::Arc;

use indexmap::IndexMap;

use crate::reader::Expr;
use crate::value::{identical, Value};

#[derive(Debug, Clone)]
pub enum PromiseState {
    Pending { expr: Arc<Expr>, env: EnvRef },
    /// Being forced right now; forcing again means a cyclic dependency.
    Forcing { expr: Arc<Expr>, env: EnvRef },
    Forced(Value),
}

/// An unevaluated expression with the environment it must be evaluated in.
#[derive(Debug, Clone)]
pub struct Promise(Rc<RefCell<PromiseState>>);

impl Promise {
    pub fn new(expr: Arc<Expr>, env: EnvRef) -> Self {
        Promise(Rc::new(RefCell::new(PromiseState::Pending { expr, env })))
    }

    pub fn forced(v: Value) -> Self {
        Promise(Rc::new(RefCell::new(PromiseState::Forced(v))))
    }

    pub fn value(&self) -> Option<Value> {
        match &*self.0.borrow() {
            PromiseState::Forced(v) => Some(v.clone()),
            _ => None,
        }
    }

    pub fn is_forced(&self) -> bool {
        matches!(&*self.0.borrow(), PromiseState::Forced(_))
    }

    pub fn expr(&self) -> Option<Arc<Expr>> {
        match &*self.0.borrow() {
            PromiseState::Pending { expr, .. } | PromiseState::Forcing { expr, .. } => {
                Some(expr.clone())
            }
            PromiseState::Forced(_) => None,
        }
    }

    pub(crate) fn state(&self) -> PromiseState {
        self.0.borrow().clone()
    }

    pub(crate) fn set_state(&self, s: PromiseState) {
        *self.0.borrow_mut() = s;
    }

    pub fn ptr_eq(&self, other: &Promise) -> bool {
        Rc::ptr_eq(&self.0, &other.0)
    }
}

#[derive(Debug, Clone)]
pub enum Binding {
    Immediate(Value),
    Lazy(Promise),
    /// Reads call `get`; writes call `set` with the new value.
    Active { get: Value, set: Option<Value> },
    /// A formal with neither an actual argument nor a default.
    Missing,
}

/// Declared type and mutability of one reference-class field.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldDecl {
    pub class: String,
    pub read_only: bool,
}

/// Write checks attached to the backing environment of a reference instance.
#[derive(Debug, Clone)]
pub struct FieldGuard {
    pub class_name: String,
    pub fields: IndexMap<String, FieldDecl>,
    /// Set once construction finishes; read-only fields reject writes after.
    pub locked: bool,
}

pub struct Frame {
    bindings: IndexMap<String, Binding>,
    parent: Option<EnvRef>,
    tag: String,
    guard: Option<FieldGuard>,
}

#[derive(Clone)]
pub struct EnvRef(Rc<RefCell<Frame>>);

impl fmt::Debug for EnvRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<environment: {}>", self.0.borrow().tag)
    }
}

impl EnvRef {
    pub fn new_root(tag: impl Into<String>) -> Self {
        Self::make(None, tag.into())
    }

    pub fn new_child(parent: &EnvRef, tag: impl Into<String>) -> Self {
        Self::make(Some(parent.clone()), tag.into())
    }

    fn make(parent: Option<EnvRef>, tag: String) -> Self {
        EnvRef(Rc::new(RefCell::new(Frame {
            bindings: IndexMap::new(),
            parent,
            tag,
            guard: None,
        })))
    }

    pub fn ptr_eq(&self, other: &EnvRef) -> bool {
        Rc::ptr_eq(&self.0, &other.0)
    }

    /// Stable identity for the lifetime of the environment.
    pub fn id(&self) -> usize {
        Rc::as_ptr(&self.0) as *const () as usize
    }

    pub fn parent(&self) -> Option<EnvRef> {
        self.0.borrow().parent.clone()
    }

    pub fn tag(&self) -> String {
        self.0.borrow().tag.clone()
    }

    pub fn get_local(&self, name: &str) -> Option<Binding> {
        self.0.borrow().bindings.get(name).cloned()
    }

    pub fn has_local(&self, name: &str) -> bool {
        self.0.borrow().bindings.contains_key(name)
    }

    pub fn set_binding(&self, name: impl Into<String>, b: Binding) {
        self.0.borrow_mut().bindings.insert(name.into(), b);
    }

    pub fn set_immediate(&self, name: impl Into<String>, v: Value) {
        self.set_binding(name, Binding::Immediate(v));
    }

    pub fn remove(&self, name: &str) -> Option<Binding> {
        self.0.borrow_mut().bindings.shift_remove(name)
    }

    /// Binding names in insertion order.
    pub fn names(&self) -> Vec<String> {
        self.0.borrow().bindings.keys().cloned().collect()
    }

    /// The first environment on the chain, starting here, that binds `name`.
    pub fn find_frame(&self, name: &str) -> Option<EnvRef> {
        let mut cur = Some(self.clone());
        while let Some(env) = cur {
            if env.has_local(name) {
                return Some(env);
            }
            cur = env.parent();
        }
        None
    }

    pub fn guard(&self) -> Option<FieldGuard> {
        self.0.borrow().guard.clone()
    }

    pub(crate) fn set_guard(&self, guard: Option<FieldGuard>) {
        self.0.borrow_mut().guard = guard;
    }

    /// Point-in-time copy of this frame's bindings for later comparison.
    pub fn snapshot(&self) -> FrameSnapshot {
        let frame = self.0.borrow();
        FrameSnapshot {
            env_id: self.id(),
            bindings: frame
                .bindings
                .iter()
                .map(|(k, b)| (k.clone(), BindingSnapshot::of(b)))
                .collect(),
        }
    }
}

#[derive(Debug, Clone)]
pub enum BindingSnapshot {
    Value(Value),
    /// A promise and its value if it had been forced.
    Promise(Promise, Option<Value>),
    Active(Value, Option<Value>),
    Missing,
}

impl BindingSnapshot {
    fn of(b: &Binding) -> Self {
        match b {
            Binding::Immediate(v) => BindingSnapshot::Value(v.clone()),
            Binding::Lazy(p) => BindingSnapshot::Promise(p.clone(), p.value()),
            Binding::Active { get, set } => BindingSnapshot::Active(get.clone(), set.clone()),
            Binding::Missing => BindingSnapshot::Missing,
        }
    }

    /// Forcing a pending promise is memoization, not a change.
    fn same(&self, other: &BindingSnapshot) -> bool {
        match (self, other) {
            (BindingSnapshot::Value(a), BindingSnapshot::Value(b)) => identical(a, b),
            (BindingSnapshot::Promise(a, None), BindingSnapshot::Promise(b, _)) => a.ptr_eq(b),
            (BindingSnapshot::Promise(_, Some(a)), BindingSnapshot::Promise(_, Some(b))) => identical(a, b),
            (BindingSnapshot::Value(a), BindingSnapshot::Promise(_, Some(b)))
            | (BindingSnapshot::Promise(_, Some(a)), BindingSnapshot::Value(b)) => identical(a, b),
            (BindingSnapshot::Active(g1, s1), BindingSnapshot::Active(g2, s2)) => {
                identical(g1, g2)
                    && match (s1, s2) {
                        (Some(a), Some(b)) => identical(a, b),
                        (None, None) => true,
                        _ => false,
                    }
            }
            (BindingSnapshot::Missing, BindingSnapshot::Missing) => true,
            _ => false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FrameSnapshot {
    pub env_id: usize,
    pub bindings: IndexMap<String, BindingSnapshot>,
}

impl FrameSnapshot {
    /// Names whose binding was added, removed, or changed between snapshots.
    pub fn diff(&self, later: &FrameSnapshot) -> Vec<String> {
        let mut changed: Vec<String> = self
            .bindings
            .iter()
            .filter(|(k, b)| later.bindings.get(*k).is_none_or(|l| !b.same(l)))
            .map(|(k, _)| k.clone())
            .collect();
        changed.extend(
            later
                .bindings
                .keys()
                .filter(|k| !self.bindings.contains_key(*k))
                .cloned(),
        );
        changed
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_walks_parent_chain() {
        let root = EnvRef::new_root("global");
        let child = EnvRef::new_child(&root, "call:f");
        root.set_immediate("x", Value::double(1.0));
        assert!(child.find_frame("x").unwrap().ptr_eq(&root));
        assert!(child.find_frame("y").is_none());
    }

    #[test]
    fn snapshot_diff_reports_changes() {
        let env = EnvRef::new_root("global");
        env.set_immediate("a", Value::double(1.0));
        env.set_immediate("b", Value::double(2.0));
        let before = env.snapshot();
        env.set_immediate("a", Value::double(1.0));
        assert!(before.diff(&env.snapshot()).is_empty());
        env.set_immediate("b", Value::double(3.0));
        env.set_immediate("c", Value::null());
        assert_eq!(before.diff(&env.snapshot()), ["b", "c"]);
    }
}
