//! What each base name does to functional validity.

use std::collections::HashMap;

use super::ReasonKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Effect {
    Pure,
    /// Violates functional validity in the given way whenever referenced.
    Violates(ReasonKind),
    /// `assign`: nonlocal only when an environment argument is supplied.
    Assign,
}

/// Builtin purity table. Names absent from the table are not base names.
#[derive(Debug, Clone)]
pub struct PurityTable {
    effects: HashMap<String, Effect>,
}

const PURE: &[&str] = &[
    // arithmetic, comparison and logic
    "+", "-", "*", "/", "^", "==", "!=", "<", "<=", ">", ">=", "!", "&&", "||", ":",
    "sum", "prod", "mean", "min", "max", "abs", "sqrt", "exp", "log", "floor", "ceiling", "round",
    "pi",
    // vectors and lists
    "c", "list", "length", "names", "set_names", "numeric", "character", "logical", "integer",
    "seq_len", "seq_along", "rev", "rep", "any", "all", "which", "unlist", "paste", "paste0",
    "sprintf", "nchar", "as.numeric", "as.double", "as.integer", "as.character", "as.logical",
    "as.list", "is.numeric", "is.character", "is.logical", "is.function", "is.list", "is.null",
    "is.environment", "identical", "lapply", "sapply", "deep_copy",
    // attributes and informal classes
    "attr", "set_attr", "structure", "class", "unclass", "inherits", "UseMethod",
    // control
    "quote", "missing", "return", "invisible", "stop", "warning", "stopifnot",
    // output
    "print", "print.default", "cat", "format",
    // environments local to the call
    "environment", "new_env",
    // explicit-argument option access
    "get_option_from",
    // formal classes: reading and instantiating, not defining
    "new", "slot", "slot_set", "is", "class_distance", "signature", "standard_generic",
    "get_class", "get_generic", "get_method", "select_method", "is_virtual_class",
    "field", "active", "copy",
];

const VIOLATING: &[(&str, ReasonKind)] = &[
    ("options", ReasonKind::StateRead),
    ("get_option", ReasonKind::StateRead),
    (".Options", ReasonKind::StateRead),
    ("set_seed", ReasonKind::RngDependence),
    ("rng_draw", ReasonKind::RngDependence),
    (".Random.seed", ReasonKind::RngDependence),
    ("globalenv", ReasonKind::GlobalReference),
    ("foreign", ReasonKind::ForeignCode),
    ("eval", ReasonKind::DynamicCode),
    ("get", ReasonKind::DynamicCode),
    ("exists", ReasonKind::DynamicCode),
    ("set_class", ReasonKind::DynamicCode),
    ("set_generic", ReasonKind::DynamicCode),
    ("set_method", ReasonKind::DynamicCode),
    ("set_ref_class", ReasonKind::DynamicCode),
];

impl PurityTable {
    pub fn standard() -> Self {
        let mut effects: HashMap<String, Effect> =
            PURE.iter().map(|n| (n.to_string(), Effect::Pure)).collect();
        for (n, k) in VIOLATING {
            effects.insert(n.to_string(), Effect::Violates(*k));
        }
        effects.insert("assign".into(), Effect::Assign);
        PurityTable { effects }
    }

    pub fn effect(&self, name: &str) -> Option<Effect> {
        self.effects.get(name).copied()
    }

    pub fn set(&mut self, name: &str, effect: Effect) {
        self.effects.insert(name.to_string(), effect);
    }

    pub fn remove(&mut self, name: &str) {
        self.effects.remove(name);
    }
}

impl Default for PurityTable {
    fn default() -> Self {
        Self::standard()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_builtin_is_classified() {
        let t = PurityTable::standard();
        let missing: Vec<_> = crate::builtin_names().into_iter().filter(|n| t.effect(n).is_none()).collect();
        assert!(missing.is_empty(), "unclassified builtins: {missing:?}");
    }

    #[test]
    fn table_entries_are_real_names() {
        let names = crate::builtin_names();
        let t = PurityTable::standard();
        for n in t.effects.keys() {
            assert!(names.contains(&n.as_str()) || n.starts_with('.') || n == "pi", "{n} is not a base name");
        }
    }
}
