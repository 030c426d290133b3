use std::sync::Arc;

use super::ast::{Arg, Expr, ExprKind, Formal, Literal, Loc};
use super::lexer::{tokenize, Tok, Token};
use super::SyntaxError;

// Binding powers, loosest first. Mirrors the host language's table for the
// operators the grammar includes.
const BP_ASSIGN: u8 = 1;
const BP_OR: u8 = 2;
const BP_AND: u8 = 3;
const BP_NOT: u8 = 4;
const BP_COMPARE: u8 = 5;
const BP_ADD: u8 = 6;
const BP_MUL: u8 = 7;
const BP_RANGE: u8 = 8;
const BP_UNARY: u8 = 9;
const BP_POW: u8 = 10;

/// Binding power and right-associativity of a binary operator.
pub(crate) fn infix_power(op: &str) -> Option<(u8, bool)> {
    Some(match op {
        "<-" | "<<-" => (BP_ASSIGN, true),
        "||" => (BP_OR, false),
        "&&" => (BP_AND, false),
        "==" | "!=" | "<" | "<=" | ">" | ">=" => (BP_COMPARE, false),
        "+" | "-" => (BP_ADD, false),
        "*" | "/" => (BP_MUL, false),
        ":" => (BP_RANGE, false),
        "^" => (BP_POW, true),
        _ => return None,
    })
}

pub(crate) fn prefix_power(op: &str) -> Option<u8> {
    match op {
        "!" => Some(BP_NOT),
        "-" | "+" => Some(BP_UNARY),
        _ => None,
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Nest {
    Paren,
    Brace,
}

pub struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    nest: Vec<Nest>,
}

impl Parser {
    pub fn new(src: &str) -> Result<Self, SyntaxError> {
        Ok(Parser { tokens: tokenize(src)?, pos: 0, nest: Vec::new() })
    }

    fn newlines_ignored(&self) -> bool {
        self.nest.last() == Some(&Nest::Paren)
    }

    fn skip_newlines(&mut self) {
        while self.tokens[self.pos].tok == Tok::Newline {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> &Token {
        if self.newlines_ignored() {
            self.skip_newlines();
        }
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        self.peek();
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, t: &Token) -> SyntaxError {
        let mut e = SyntaxError::new(t.loc, format!("unexpected {}", t.tok.describe()));
        e.incomplete = t.tok == Tok::Eof;
        e
    }

    fn expect(&mut self, want: Tok) -> Result<Token, SyntaxError> {
        let t = self.next();
        if t.tok == want {
            Ok(t)
        } else {
            Err(self.unexpected(&t))
        }
    }

    pub fn parse_program(&mut self) -> Result<Vec<Expr>, SyntaxError> {
        let mut out = Vec::new();
        loop {
            while matches!(self.tokens[self.pos].tok, Tok::Newline | Tok::Semi) {
                self.pos += 1;
            }
            if self.tokens[self.pos].tok == Tok::Eof {
                return Ok(out);
            }
            out.push(self.parse_expr(BP_ASSIGN)?);
            let t = self.peek().clone();
            match t.tok {
                Tok::Newline | Tok::Semi => self.pos += 1,
                Tok::Eof => {}
                _ => return Err(self.unexpected(&t)),
            }
        }
    }

    fn parse_expr(&mut self, min_bp: u8) -> Result<Expr, SyntaxError> {
        self.skip_newlines();
        let mut lhs = self.parse_prefix()?;
        loop {
            let t = self.peek().clone();
            let Tok::Op(op) = t.tok else { break };
            let Some((bp, right)) = infix_power(op) else {
                if op == "=" {
                    return Err(SyntaxError::new(
                        t.loc,
                        "unexpected '=' (use '<-' for assignment)",
                    ));
                }
                break;
            };
            if bp < min_bp {
                break;
            }
            self.next();
            let rhs = self.parse_expr(if right { bp } else { bp + 1 })?;
            lhs = match op {
                "<-" => make_assign(lhs, rhs, t.loc)?,
                "<<-" => {
                    let lhs = string_target(lhs);
                    check_target(&lhs)?;
                    Expr::new(
                        ExprKind::SuperAssign { target: Box::new(lhs), value: Box::new(rhs) },
                        t.loc,
                    )
                }
                _ => Expr::new(
                    ExprKind::Call {
                        callee: Box::new(Expr::symbol(op, t.loc)),
                        args: vec![Arg::positional(lhs), Arg::positional(rhs)],
                    },
                    t.loc,
                ),
            };
        }
        Ok(lhs)
    }

    fn parse_prefix(&mut self) -> Result<Expr, SyntaxError> {
        let t = self.peek().clone();
        if let Tok::Op(op) = t.tok {
            if let Some(bp) = prefix_power(op) {
                self.next();
                let operand = self.parse_expr(bp)?;
                return Ok(Expr::new(
                    ExprKind::Call {
                        callee: Box::new(Expr::symbol(op, t.loc)),
                        args: vec![Arg::positional(operand)],
                    },
                    t.loc,
                ));
            }
        }
        let primary = self.parse_primary()?;
        self.parse_postfix(primary)
    }

    fn parse_primary(&mut self) -> Result<Expr, SyntaxError> {
        let t = self.next();
        let loc = t.loc;
        let lit = |l| Ok(Expr::constant(l, loc));
        match t.tok {
            Tok::Num(n) => lit(Literal::Double(n)),
            Tok::Int(n) => lit(Literal::Integer(n)),
            Tok::Str(s) => lit(Literal::Str(s)),
            Tok::True => lit(Literal::Logical(true)),
            Tok::False => lit(Literal::Logical(false)),
            Tok::Null => lit(Literal::Null),
            Tok::Inf => lit(Literal::Double(f64::INFINITY)),
            Tok::NaN => lit(Literal::Double(f64::NAN)),
            Tok::Ident(name) => Ok(Expr::symbol(name, loc)),
            Tok::LParen => {
                self.nest.push(Nest::Paren);
                let inner = self.parse_expr(BP_ASSIGN);
                let close = inner.and_then(|e| self.expect(Tok::RParen).map(|_| e));
                self.nest.pop();
                close
            }
            Tok::LBrace => self.parse_block(loc),
            Tok::Function => self.parse_function(loc),
            Tok::If => {
                let cond = self.parse_condition()?;
                let then = self.parse_expr(BP_ASSIGN)?;
                let otherwise = if self.peek_else() {
                    self.next();
                    Some(Box::new(self.parse_expr(BP_ASSIGN)?))
                } else {
                    None
                };
                Ok(Expr::new(
                    ExprKind::If { cond: Box::new(cond), then: Box::new(then), otherwise },
                    loc,
                ))
            }
            Tok::While => {
                let cond = self.parse_condition()?;
                let body = self.parse_expr(BP_ASSIGN)?;
                Ok(Expr::new(
                    ExprKind::While { cond: Box::new(cond), body: Box::new(body) },
                    loc,
                ))
            }
            _ => Err(self.unexpected(&t)),
        }
    }

    fn peek_else(&mut self) -> bool {
        let mut p = self.pos;
        while self.tokens[p].tok == Tok::Newline {
            p += 1;
        }
        if self.tokens[p].tok == Tok::Else {
            self.pos = p;
            true
        } else {
            false
        }
    }

    fn parse_condition(&mut self) -> Result<Expr, SyntaxError> {
        self.expect(Tok::LParen)?;
        self.nest.push(Nest::Paren);
        let cond = self.parse_expr(BP_ASSIGN);
        let res = cond.and_then(|c| self.expect(Tok::RParen).map(|_| c));
        self.nest.pop();
        let c = res?;
        self.skip_newlines();
        Ok(c)
    }

    fn parse_block(&mut self, loc: Loc) -> Result<Expr, SyntaxError> {
        self.nest.push(Nest::Brace);
        let mut items = Vec::new();
        let res = loop {
            while matches!(self.tokens[self.pos].tok, Tok::Newline | Tok::Semi) {
                self.pos += 1;
            }
            if self.tokens[self.pos].tok == Tok::RBrace {
                self.pos += 1;
                break Ok(());
            }
            match self.parse_expr(BP_ASSIGN) {
                Ok(e) => items.push(e),
                Err(e) => break Err(e),
            }
            let t = self.tokens[self.pos].clone();
            match t.tok {
                Tok::Newline | Tok::Semi => self.pos += 1,
                Tok::RBrace => {}
                _ => break Err(self.unexpected(&t)),
            }
        };
        self.nest.pop();
        res.map(|_| Expr::new(ExprKind::Block(items), loc))
    }

    fn parse_function(&mut self, loc: Loc) -> Result<Expr, SyntaxError> {
        self.expect(Tok::LParen)?;
        self.nest.push(Nest::Paren);
        let formals = self.parse_formals();
        self.nest.pop();
        let formals = formals?;
        let body = self.parse_expr(BP_ASSIGN)?;
        Ok(Expr::new(
            ExprKind::Function { formals: formals.into(), body: Arc::new(body) },
            loc,
        ))
    }

    fn parse_formals(&mut self) -> Result<Vec<Formal>, SyntaxError> {
        let mut formals: Vec<Formal> = Vec::new();
        if self.peek().tok == Tok::RParen {
            self.next();
            return Ok(formals);
        }
        loop {
            let t = self.next();
            let Tok::Ident(name) = t.tok else {
                return Err(self.unexpected(&t));
            };
            if formals.iter().any(|f| f.name == name) {
                return Err(SyntaxError::new(
                    t.loc,
                    format!("repeated formal argument '{name}'"),
                ));
            }
            let default = if self.peek().tok == Tok::Op("=") {
                self.next();
                Some(Arc::new(self.parse_expr(BP_ASSIGN)?))
            } else {
                None
            };
            formals.push(Formal { name, default });
            let t = self.next();
            match t.tok {
                Tok::Comma => continue,
                Tok::RParen => return Ok(formals),
                _ => return Err(self.unexpected(&t)),
            }
        }
    }

    fn parse_args(&mut self, close: Tok) -> Result<Vec<Arg>, SyntaxError> {
        self.nest.push(Nest::Paren);
        let res = self.parse_args_inner(close);
        self.nest.pop();
        res
    }

    fn parse_args_inner(&mut self, close: Tok) -> Result<Vec<Arg>, SyntaxError> {
        let mut args = Vec::new();
        if self.peek().tok == close {
            self.next();
            return Ok(args);
        }
        loop {
            let t = self.peek().clone();
            let name = match &t.tok {
                Tok::Ident(n) | Tok::Str(n) => {
                    let mut p = self.pos + 1;
                    while self.tokens[p].tok == Tok::Newline {
                        p += 1;
                    }
                    if self.tokens[p].tok == Tok::Op("=") {
                        self.pos = p + 1;
                        Some(n.clone())
                    } else {
                        None
                    }
                }
                _ => None,
            };
            let value = self.parse_expr(BP_ASSIGN)?;
            args.push(Arg { name, value: Arc::new(value) });
            let t = self.next();
            if t.tok == Tok::Comma {
                continue;
            }
            if t.tok == close {
                return Ok(args);
            }
            return Err(self.unexpected(&t));
        }
    }

    fn parse_postfix(&mut self, mut e: Expr) -> Result<Expr, SyntaxError> {
        loop {
            // Postfix operators must start on the same line unless nested in parens.
            let t = if self.newlines_ignored() { self.peek().clone() } else { self.tokens[self.pos].clone() };
            match t.tok {
                Tok::LParen => {
                    self.next();
                    let args = self.parse_args(Tok::RParen)?;
                    let loc = e.loc;
                    e = Expr::new(ExprKind::Call { callee: Box::new(e), args }, loc);
                }
                Tok::LBracket => {
                    self.next();
                    let indices = self.parse_args(Tok::RBracket)?;
                    let loc = e.loc;
                    e = Expr::new(ExprKind::Index { object: Box::new(e), indices }, loc);
                }
                Tok::Op("$") => {
                    self.next();
                    let n = self.next();
                    let name = match n.tok {
                        Tok::Ident(s) | Tok::Str(s) => s,
                        _ => return Err(self.unexpected(&n)),
                    };
                    e = Expr::new(ExprKind::FieldAccess { object: Box::new(e), name }, t.loc);
                }
                _ => return Ok(e),
            }
        }
    }
}

fn check_target(target: &Expr) -> Result<(), SyntaxError> {
    match &target.kind {
        ExprKind::Symbol(_) => Ok(()),
        ExprKind::Index { object, .. } | ExprKind::FieldAccess { object, .. } => check_target(object),
        _ => Err(SyntaxError::new(target.loc, "invalid assignment target")),
    }
}

/// `"name" <- v` assigns to the symbol `name`.
fn string_target(target: Expr) -> Expr {
    match target.kind {
        ExprKind::Constant(Literal::Str(s)) => Expr::symbol(s, target.loc),
        _ => target,
    }
}

fn make_assign(target: Expr, value: Expr, loc: Loc) -> Result<Expr, SyntaxError> {
    let target = string_target(target);
    check_target(&target)?;
    let value = Box::new(value);
    let kind = match target.kind {
        ExprKind::Symbol(_) => ExprKind::Assign { target: Box::new(target), value },
        ExprKind::Index { object, indices } => ExprKind::IndexAssign { object, indices, value },
        ExprKind::FieldAccess { object, name } => ExprKind::FieldAssign { object, name, value },
        _ => unreachable!("check_target admits only lvalues"),
    };
    Ok(Expr::new(kind, loc))
}
