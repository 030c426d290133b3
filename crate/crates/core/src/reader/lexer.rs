use super::ast::Loc;
use super::SyntaxError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Num(f64),
    Int(i64),
    Str(String),
    Ident(String),
    Function,
    If,
    Else,
    While,
    True,
    False,
    Null,
    Inf,
    NaN,
    Op(&'static str),
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Newline,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Num(n) => format!("numeric constant {n}"),
            Tok::Int(n) => format!("integer constant {n}L"),
            Tok::Str(s) => format!("string constant {s:?}"),
            Tok::Ident(s) => format!("symbol '{s}'"),
            Tok::Function => "'function'".into(),
            Tok::If => "'if'".into(),
            Tok::Else => "'else'".into(),
            Tok::While => "'while'".into(),
            Tok::True => "'TRUE'".into(),
            Tok::False => "'FALSE'".into(),
            Tok::Null => "'NULL'".into(),
            Tok::Inf => "'Inf'".into(),
            Tok::NaN => "'NaN'".into(),
            Tok::Op(o) => format!("'{o}'"),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBrace => "'{'".into(),
            Tok::RBrace => "'}'".into(),
            Tok::LBracket => "'['".into(),
            Tok::RBracket => "']'".into(),
            Tok::Comma => "','".into(),
            Tok::Semi => "';'".into(),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub loc: Loc,
}

// Longest operators first so that `<<-` wins over `<-` and `<`.
const OPERATORS: &[&str] = &[
    "<<-", "<-", "<=", ">=", "==", "!=", "&&", "||", "+", "-", "*", "/", "^", "<", ">", "!",
    "=", "$", ":",
];

pub fn tokenize(src: &str) -> Result<Vec<Token>, SyntaxError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1u32;
    let mut col = 1u32;

    macro_rules! advance {
        ($n:expr) => {{
            for _ in 0..$n {
                if chars[i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                i += 1;
            }
        }};
    }

    while i < chars.len() {
        let c = chars[i];
        let loc = Loc::new(line, col);
        match c {
            ' ' | '\t' | '\r' => advance!(1),
            '\n' => {
                out.push(Token { tok: Tok::Newline, loc });
                advance!(1);
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    advance!(1);
                }
            }
            '(' | ')' | '{' | '}' | '[' | ']' | ',' | ';' => {
                let tok = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    ',' => Tok::Comma,
                    _ => Tok::Semi,
                };
                out.push(Token { tok, loc });
                advance!(1);
            }
            '"' | '\'' => {
                let quote = c;
                advance!(1);
                let mut s = String::new();
                loop {
                    if i >= chars.len() {
                        return Err(SyntaxError::new(loc, "unterminated string constant"));
                    }
                    let ch = chars[i];
                    if ch == quote {
                        advance!(1);
                        break;
                    }
                    if ch == '\\' {
                        if i + 1 >= chars.len() {
                            return Err(SyntaxError::new(loc, "unterminated string constant"));
                        }
                        let esc = chars[i + 1];
                        let decoded = match esc {
                            'n' => '\n',
                            't' => '\t',
                            'r' => '\r',
                            '0' => '\0',
                            '\\' | '"' | '\'' | '`' => esc,
                            other => {
                                return Err(SyntaxError::new(
                                    Loc::new(line, col),
                                    format!("'\\{other}' is an unrecognized escape"),
                                ))
                            }
                        };
                        s.push(decoded);
                        advance!(2);
                        continue;
                    }
                    s.push(ch);
                    advance!(1);
                }
                out.push(Token { tok: Tok::Str(s), loc });
            }
            '`' => {
                advance!(1);
                let mut s = String::new();
                loop {
                    if i >= chars.len() || chars[i] == '\n' {
                        return Err(SyntaxError::new(loc, "unterminated backquoted name"));
                    }
                    if chars[i] == '`' {
                        advance!(1);
                        break;
                    }
                    s.push(chars[i]);
                    advance!(1);
                }
                if s.is_empty() {
                    return Err(SyntaxError::new(loc, "empty backquoted name"));
                }
                out.push(Token { tok: Tok::Ident(s), loc });
            }
            c if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    advance!(1);
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let save = (i, line, col);
                    advance!(1);
                    if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                        advance!(1);
                    }
                    if i < chars.len() && chars[i].is_ascii_digit() {
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            advance!(1);
                        }
                    } else {
                        (i, line, col) = save;
                    }
                }
                let text: String = chars[start..i].iter().collect();
                if i < chars.len() && chars[i] == 'L' {
                    advance!(1);
                    let n: i64 = text.parse().map_err(|_| {
                        SyntaxError::new(loc, format!("invalid integer constant '{text}L'"))
                    })?;
                    out.push(Token { tok: Tok::Int(n), loc });
                } else {
                    let n: f64 = text.parse().map_err(|_| {
                        SyntaxError::new(loc, format!("invalid numeric constant '{text}'"))
                    })?;
                    out.push(Token { tok: Tok::Num(n), loc });
                }
            }
            c if c.is_alphabetic() || c == '.' || c == '_' => {
                if c == '_' {
                    return Err(SyntaxError::new(loc, "unexpected input '_'"));
                }
                let start = i;
                while i < chars.len()
                    && (chars[i].is_alphanumeric() || chars[i] == '.' || chars[i] == '_')
                {
                    advance!(1);
                }
                let word: String = chars[start..i].iter().collect();
                let tok = match word.as_str() {
                    "function" => Tok::Function,
                    "if" => Tok::If,
                    "else" => Tok::Else,
                    "while" => Tok::While,
                    "TRUE" => Tok::True,
                    "FALSE" => Tok::False,
                    "NULL" => Tok::Null,
                    "Inf" => Tok::Inf,
                    "NaN" => Tok::NaN,
                    _ => Tok::Ident(word),
                };
                out.push(Token { tok, loc });
            }
            _ => {
                let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
                match OPERATORS.iter().find(|op| rest.starts_with(**op)) {
                    Some(op) => {
                        out.push(Token { tok: Tok::Op(op), loc });
                        advance!(op.chars().count());
                    }
                    None => {
                        return Err(SyntaxError::new(loc, format!("unexpected input '{c}'")));
                    }
                }
            }
        }
    }
    out.push(Token { tok: Tok::Eof, loc: Loc::new(line, col) });
    Ok(out)
}

/// True when `name` can be written without backquotes.
pub fn is_syntactic_name(name: &str) -> bool {
    let mut chars = name.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    if !(first.is_alphabetic() || first == '.') {
        return false;
    }
    if first == '.' && name.chars().nth(1).is_some_and(|c| c.is_ascii_digit()) {
        return false;
    }
    if !name.chars().all(|c| c.is_alphanumeric() || c == '.' || c == '_') {
        return false;
    }
    !matches!(
        name,
        "function" | "if" | "else" | "while" | "TRUE" | "FALSE" | "NULL" | "Inf" | "NaN"
    )
}
