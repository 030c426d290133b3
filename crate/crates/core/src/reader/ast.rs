//! Expression trees produced by the parser.
//!
//! Every node carries the source location it came from. Control syntax and
//! operators have dedicated node kinds for evaluation speed, but every node
//! can be viewed as a plain call through [`Expr::canonical`].

use std::fmt;
use std::sync::Arc;

/// One-based line and column of a node's origin.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Loc {
    pub line: u32,
    pub column: u32,
}

impl Loc {
    pub const fn new(line: u32, column: u32) -> Self {
        Loc { line, column }
    }
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// Literal constants that can appear in source text.
#[derive(Debug, Clone)]
pub enum Literal {
    Null,
    Logical(bool),
    Integer(i64),
    Double(f64),
    Str(String),
}

impl PartialEq for Literal {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Literal::Null, Literal::Null) => true,
            (Literal::Logical(a), Literal::Logical(b)) => a == b,
            (Literal::Integer(a), Literal::Integer(b)) => a == b,
            (Literal::Double(a), Literal::Double(b)) => {
                a.to_bits() == b.to_bits() || (a.is_nan() && b.is_nan())
            }
            (Literal::Str(a), Literal::Str(b)) => a == b,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arg {
    pub name: Option<String>,
    pub value: Arc<Expr>,
}

impl Arg {
    pub fn positional(value: Expr) -> Self {
        Arg { name: None, value: Arc::new(value) }
    }

    pub fn named(name: impl Into<String>, value: Expr) -> Self {
        Arg { name: Some(name.into()), value: Arc::new(value) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Formal {
    pub name: String,
    pub default: Option<Arc<Expr>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Constant(Literal),
    Symbol(String),
    Call { callee: Box<Expr>, args: Vec<Arg> },
    Function { formals: Arc<[Formal]>, body: Arc<Expr> },
    Assign { target: Box<Expr>, value: Box<Expr> },
    SuperAssign { target: Box<Expr>, value: Box<Expr> },
    Block(Vec<Expr>),
    If { cond: Box<Expr>, then: Box<Expr>, otherwise: Option<Box<Expr>> },
    While { cond: Box<Expr>, body: Box<Expr> },
    Index { object: Box<Expr>, indices: Vec<Arg> },
    IndexAssign { object: Box<Expr>, indices: Vec<Arg>, value: Box<Expr> },
    FieldAccess { object: Box<Expr>, name: String },
    FieldAssign { object: Box<Expr>, name: String, value: Box<Expr> },
}

/// An expression node. Equality ignores source locations.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub loc: Loc,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Expr {
    pub fn new(kind: ExprKind, loc: Loc) -> Self {
        Expr { kind, loc }
    }

    pub fn symbol(name: impl Into<String>, loc: Loc) -> Self {
        Expr::new(ExprKind::Symbol(name.into()), loc)
    }

    pub fn constant(lit: Literal, loc: Loc) -> Self {
        Expr::new(ExprKind::Constant(lit), loc)
    }

    pub fn call(name: &str, args: Vec<Arg>, loc: Loc) -> Self {
        Expr::new(
            ExprKind::Call { callee: Box::new(Expr::symbol(name, loc)), args },
            loc,
        )
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match &self.kind {
            ExprKind::Symbol(s) => Some(s),
            _ => None,
        }
    }

    /// Name of the callee when this is a call through a plain symbol.
    pub fn called_name(&self) -> Option<&str> {
        match &self.kind {
            ExprKind::Call { callee, .. } => callee.as_symbol(),
            _ => None,
        }
    }

    pub fn is_assignment(&self) -> bool {
        matches!(
            self.kind,
            ExprKind::Assign { .. }
                | ExprKind::SuperAssign { .. }
                | ExprKind::IndexAssign { .. }
                | ExprKind::FieldAssign { .. }
        )
    }

    /// The call-form view of this node: control structures and operators are
    /// reported as calls to `if`, `while`, `{`, `<-`, `<<-`, `[`, `[<-`, `$`,
    /// `$<-` and `function`. Constants and symbols have no call form.
    pub fn canonical(&self) -> Option<CallView<'_>> {
        use ExprKind::*;
        let (callee, operands): (&str, Vec<&Expr>) = match &self.kind {
            Constant(_) | Symbol(_) => return None,
            Call { callee, args } => {
                return Some(CallView {
                    callee: CalleeView::from_expr(callee),
                    operands: args.iter().map(|a| &*a.value).collect(),
                });
            }
            Function { body, formals } => {
                let mut ops: Vec<&Expr> =
                    formals.iter().filter_map(|f| f.default.as_deref()).collect();
                ops.push(body);
                ("function", ops)
            }
            Assign { target, value } => ("<-", vec![target, value]),
            SuperAssign { target, value } => ("<<-", vec![target, value]),
            Block(items) => ("{", items.iter().collect()),
            If { cond, then, otherwise } => {
                let mut ops = vec![&**cond, &**then];
                if let Some(e) = otherwise {
                    ops.push(e);
                }
                ("if", ops)
            }
            While { cond, body } => ("while", vec![cond, body]),
            Index { object, indices } => {
                let mut ops = vec![&**object];
                ops.extend(indices.iter().map(|a| &*a.value));
                ("[", ops)
            }
            IndexAssign { object, indices, value } => {
                let mut ops = vec![&**object];
                ops.extend(indices.iter().map(|a| &*a.value));
                ops.push(value);
                ("[<-", ops)
            }
            FieldAccess { object, .. } => ("$", vec![object]),
            FieldAssign { object, value, .. } => ("$<-", vec![object, value]),
        };
        Some(CallView { callee: CalleeView::Name(callee), operands })
    }

    /// Immediate sub-expressions, in source order.
    pub fn children(&self) -> Vec<&Expr> {
        match &self.kind {
            ExprKind::Call { callee, args } => {
                let mut out = vec![&**callee];
                out.extend(args.iter().map(|a| &*a.value));
                out
            }
            _ => self.canonical().map(|c| c.operands).unwrap_or_default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CalleeView<'a> {
    Name(&'a str),
    Computed(&'a Expr),
}

impl<'a> CalleeView<'a> {
    fn from_expr(e: &'a Expr) -> Self {
        match &e.kind {
            ExprKind::Symbol(s) => CalleeView::Name(s),
            _ => CalleeView::Computed(e),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CallView<'a> {
    pub callee: CalleeView<'a>,
    pub operands: Vec<&'a Expr>,
}
