//! Source text to expression trees and back.

mod ast;
mod deparse;
mod lexer;
mod parser;

pub use ast::{Arg, CallView, CalleeView, Expr, ExprKind, Formal, Literal, Loc};
pub use deparse::{deparse, deparse_literal, deparse_name, quote_string};
pub use lexer::is_syntactic_name;


use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
#[error("syntax error at {loc}: {message}")]
pub struct SyntaxError {
    pub loc: Loc,
    pub message: String,
    /// Input ended before the expression was complete.
    pub incomplete: bool,
}

impl SyntaxError {
    pub fn new(loc: Loc, message: impl Into<String>) -> Self {
        SyntaxError { loc, message: message.into(), incomplete: false }
    }
}

/// Parses a whole program into its top-level expressions.
pub fn parse_program(source: &str) -> Result<Vec<Expr>, SyntaxError> {
    parser::Parser::new(source)?.parse_program()
}

/// Parses exactly one expression.
pub fn parse_expr(source: &str) -> Result<Expr, SyntaxError> {
    let mut exprs = parse_program(source)?;
    match exprs.len() {
        1 => Ok(exprs.pop().unwrap()),
        0 => Err(SyntaxError { loc: Loc::new(1, 1), message: "empty input".into(), incomplete: true }),
        _ => Err(SyntaxError::new(exprs[1].loc, "expected a single expression")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one(src: &str) -> Expr {
        parse_expr(src).unwrap()
    }

    fn roundtrip(src: &str) {
        let e = one(src);
        let text = deparse(&e);
        let back = parse_expr(&text).unwrap_or_else(|err| panic!("{text:?}: {err}"));
        assert_eq!(e, back, "deparsed as {text:?}");
    }

    #[test]
    fn assignment_of_sum() {
        let e = one("x <- 1 + 2");
        let ExprKind::Assign { target, value } = &e.kind else { panic!("{e:?}") };
        assert_eq!(target.as_symbol(), Some("x"));
        assert_eq!(value.called_name(), Some("+"));
        let ExprKind::Call { args, .. } = &value.kind else { unreachable!() };
        assert_eq!(args.len(), 2);
        assert_eq!(args[0].value.kind, ExprKind::Constant(Literal::Double(1.0)));
    }

    #[test]
    fn function_with_default() {
        let e = one("f <- function(x, y = 2) x * y");
        let ExprKind::Assign { value, .. } = &e.kind else { panic!() };
        let ExprKind::Function { formals, body } = &value.kind else { panic!() };
        assert_eq!(formals.len(), 2);
        assert_eq!(formals[0].name, "x");
        assert!(formals[0].default.is_none());
        assert_eq!(
            formals[1].default.as_deref().map(|d| &d.kind),
            Some(&ExprKind::Constant(Literal::Double(2.0)))
        );
        assert_eq!(body.called_name(), Some("*"));
    }

    #[test]
    fn factorial_conditional_has_call_form() {
        let e = one("if (x > 0) x * factorial(x - 1) else 1");
        assert!(matches!(e.kind, ExprKind::If { otherwise: Some(_), .. }));
        let view = e.canonical().unwrap();
        assert_eq!(view.callee, CalleeView::Name("if"));
        assert_eq!(view.operands.len(), 3);
    }

    #[test]
    fn precedence_follows_host_table() {
        assert_eq!(deparse(&one("-2^2")), "-2^2");
        let e = one("-2^2");
        assert_eq!(e.called_name(), Some("-"));
        let e = one("!a == b");
        assert_eq!(e.called_name(), Some("!"));
        let e = one("a || b && c");
        assert_eq!(e.called_name(), Some("||"));
        let e = one("1:n - 1");
        assert_eq!(e.called_name(), Some("-"));
        let e = one("x <- y <- 2");
        let ExprKind::Assign { value, .. } = &e.kind else { panic!() };
        assert!(matches!(value.kind, ExprKind::Assign { .. }));
    }

    #[test]
    fn comments_and_separators() {
        let p = parse_program("x <- 1 # one\ny <- 2; z <- 3\n\n# trailing").unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p[1].loc.line, 2);
    }

    #[test]
    fn newlines_inside_parens_are_ignored() {
        let p = parse_program("f(1,\n  2\n)\nx <- (1 +\n 2)").unwrap();
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn operator_at_line_end_continues() {
        let p = parse_program("x <- 1 +\n  2").unwrap();
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn else_on_next_line() {
        let p = parse_program("{\n if (a) 1\n else 2\n}").unwrap();
        let ExprKind::Block(items) = &p[0].kind else { panic!() };
        assert!(matches!(items[0].kind, ExprKind::If { otherwise: Some(_), .. }));
    }

    #[test]
    fn assignment_targets() {
        assert!(matches!(one("x[1] <- 2").kind, ExprKind::IndexAssign { .. }));
        assert!(matches!(one("p$size <- 2").kind, ExprKind::FieldAssign { .. }));
        assert!(matches!(one("x[2] <<- 2").kind, ExprKind::SuperAssign { .. }));
        let err = parse_expr("f(x) <- 2").unwrap_err();
        assert!(err.message.contains("invalid assignment target"));
    }

    #[test]
    fn equals_is_not_assignment() {
        let err = parse_expr("x = 3").unwrap_err();
        assert!(err.message.contains("'='"), "{err}");
        assert_eq!(err.loc, Loc::new(1, 3));
    }

    #[test]
    fn syntax_errors_carry_location_and_token() {
        let err = parse_program("x <- 1\ny <- )").unwrap_err();
        assert_eq!(err.loc, Loc::new(2, 6));
        assert!(err.message.contains("')'"));
        assert!(!err.incomplete);
        let err = parse_program("f <- function(x) {\n x").unwrap_err();
        assert!(err.incomplete);
    }

    #[test]
    fn repeated_formal_rejected() {
        assert!(parse_expr("function(x, x) 1").is_err());
    }

    #[test]
    fn backquoted_names() {
        let e = one("`+.money` <- function(e1, e2) e1");
        let ExprKind::Assign { target, .. } = &e.kind else { panic!() };
        assert_eq!(target.as_symbol(), Some("+.money"));
        roundtrip("`+.money` <- function(e1, e2) e1");
    }

    #[test]
    fn deparse_round_trips() {
        roundtrip("x <<- 1");
        roundtrip("p$evolve()");
        roundtrip("f <- function(x, y = 2) { z <- x * y; z[1] <- 3; z }");
        roundtrip("if (a) if (b) 1 else 2");
        roundtrip("if (a) (if (b) 1) else 2");
        roundtrip("(a + b) * c - d / e^f^g");
        roundtrip("(a - b) - c");
        roundtrip("a - (b - c)");
        roundtrip("(function(x) x)(1)");
        roundtrip("x <- -1:3");
        roundtrip("a + (function(x) x + 1)");
        roundtrip("while (i < 10) i <- i + 1");
        roundtrip("f(a = 1, \"b c\" = 2, 3)[2]");
        roundtrip("s <- \"a\\\"b\\n\"");
        roundtrip("c(1e300, 0.1, 5L, Inf, NaN, NULL, TRUE)");
        roundtrip("!(x <- TRUE)");
        roundtrip("x$`a b` <- 1");
    }

    #[test]
    fn deparse_fixed_tokens() {
        assert_eq!(deparse(&Expr::constant(Literal::Null, Loc::default())), "NULL");
        assert_eq!(deparse(&one("p$evolve()")), "p$evolve()");
        let back = parse_expr(&deparse(&one("x <<- 1"))).unwrap();
        assert!(matches!(back.kind, ExprKind::SuperAssign { .. }));
    }
}
