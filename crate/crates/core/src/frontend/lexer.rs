use std::fmt;

use thiserror::Error;

use super::ast::Span;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TokenKind {
    // keywords
    Val,
    Parties,
    Fn,
    Bound,
    While,
    If,
    Then,
    Else,
    Skip,
    Output,
    Input,
    From,
    Eval,
    Pow,
    Reduce,
    Zeros,
    Int,
    Bool,
    True,
    False,
    // literals and names
    Ident(String),
    Num(i64),
    // punctuation
    Colon,
    Semi,
    Comma,
    Dot,
    At,
    Arrow,
    Assign,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    // operators
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    AndAnd,
    OrOr,
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TokenKind::Val => "`val`",
            TokenKind::Parties => "`parties`",
            TokenKind::Fn => "`fn`",
            TokenKind::Bound => "`bound`",
            TokenKind::While => "`while`",
            TokenKind::If => "`if`",
            TokenKind::Then => "`then`",
            TokenKind::Else => "`else`",
            TokenKind::Skip => "`skip`",
            TokenKind::Output => "`output`",
            TokenKind::Input => "`input`",
            TokenKind::From => "`from`",
            TokenKind::Eval => "`eval`",
            TokenKind::Pow => "`pow`",
            TokenKind::Reduce => "`reduce`",
            TokenKind::Zeros => "`zeros`",
            TokenKind::Int => "`int`",
            TokenKind::Bool => "`bool`",
            TokenKind::True => "`true`",
            TokenKind::False => "`false`",
            TokenKind::Ident(name) => return write!(f, "identifier `{name}`"),
            TokenKind::Num(n) => return write!(f, "number `{n}`"),
            TokenKind::Colon => "`:`",
            TokenKind::Semi => "`;`",
            TokenKind::Comma => "`,`",
            TokenKind::Dot => "`.`",
            TokenKind::At => "`@`",
            TokenKind::Arrow => "`->`",
            TokenKind::Assign => "`:=`",
            TokenKind::LParen => "`(`",
            TokenKind::RParen => "`)`",
            TokenKind::LBrace => "`{`",
            TokenKind::RBrace => "`}`",
            TokenKind::LBracket => "`[`",
            TokenKind::RBracket => "`]`",
            TokenKind::EqEq => "`==`",
            TokenKind::NotEq => "`!=`",
            TokenKind::Lt => "`<`",
            TokenKind::Le => "`<=`",
            TokenKind::Gt => "`>`",
            TokenKind::Ge => "`>=`",
            TokenKind::Plus => "`+`",
            TokenKind::Minus => "`-`",
            TokenKind::Star => "`*`",
            TokenKind::Slash => "`/`",
            TokenKind::Percent => "`%`",
            TokenKind::AndAnd => "`&&`",
            TokenKind::OrOr => "`||`",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexError {
    #[error("{pos}: illegal character {ch:?}")]
    IllegalChar { pos: Span, ch: char },
    #[error("{pos}: integer literal out of range")]
    NumberOverflow { pos: Span },
}

impl LexError {
    pub fn span(&self) -> Span {
        match self {
            LexError::IllegalChar { pos, .. } | LexError::NumberOverflow { pos } => *pos,
        }
    }
}

fn keyword(word: &str) -> Option<TokenKind> {
    Some(match word {
        "val" => TokenKind::Val,
        "parties" => TokenKind::Parties,
        "fn" => TokenKind::Fn,
        "bound" => TokenKind::Bound,
        "while" => TokenKind::While,
        "if" => TokenKind::If,
        "then" => TokenKind::Then,
        "else" => TokenKind::Else,
        "skip" => TokenKind::Skip,
        "output" => TokenKind::Output,
        "input" => TokenKind::Input,
        "from" => TokenKind::From,
        "eval" => TokenKind::Eval,
        "pow" => TokenKind::Pow,
        "reduce" => TokenKind::Reduce,
        "zeros" => TokenKind::Zeros,
        "int" => TokenKind::Int,
        "bool" => TokenKind::Bool,
        "true" => TokenKind::True,
        "false" => TokenKind::False,
        _ => return None,
    })
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    col: u32,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn here(&self) -> Span {
        Span {
            lo: self.pos,
            hi: self.pos,
            line: self.line,
            col: self.col,
        }
    }
}

/// Split source text into tokens. `//` comments and whitespace are dropped.
pub fn tokenize(source: &str) -> Result<Vec<Token>, LexError> {
    let mut cur = Cursor {
        src: source,
        pos: 0,
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    while let Some(c) = cur.peek() {
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        if c == '/' && cur.peek2() == Some('/') {
            while let Some(c) = cur.peek() {
                if c == '\n' {
                    break;
                }
                cur.bump();
            }
            continue;
        }
        let start = cur.here();
        let kind = if c.is_ascii_digit() {
            let mut value: i64 = 0;
            while let Some(d) = cur.peek().and_then(|c| c.to_digit(10)) {
                cur.bump();
                value = value
                    .checked_mul(10)
                    .and_then(|v| v.checked_add(d as i64))
                    .ok_or(LexError::NumberOverflow { pos: start })?;
            }
            TokenKind::Num(value)
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut word = String::new();
            while let Some(c) = cur.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    word.push(c);
                    cur.bump();
                } else {
                    break;
                }
            }
            keyword(&word).unwrap_or(TokenKind::Ident(word))
        } else {
            cur.bump();
            let next = cur.peek();
            let two = |cur: &mut Cursor, k: TokenKind| {
                cur.bump();
                k
            };
            match (c, next) {
                (':', Some('=')) => two(&mut cur, TokenKind::Assign),
                ('=', Some('=')) => two(&mut cur, TokenKind::EqEq),
                ('!', Some('=')) => two(&mut cur, TokenKind::NotEq),
                ('<', Some('=')) => two(&mut cur, TokenKind::Le),
                ('>', Some('=')) => two(&mut cur, TokenKind::Ge),
                ('-', Some('>')) => two(&mut cur, TokenKind::Arrow),
                ('&', Some('&')) => two(&mut cur, TokenKind::AndAnd),
                ('|', Some('|')) => two(&mut cur, TokenKind::OrOr),
                (':', _) => TokenKind::Colon,
                (';', _) => TokenKind::Semi,
                (',', _) => TokenKind::Comma,
                ('.', _) => TokenKind::Dot,
                ('@', _) => TokenKind::At,
                ('(', _) => TokenKind::LParen,
                (')', _) => TokenKind::RParen,
                ('{', _) => TokenKind::LBrace,
                ('}', _) => TokenKind::RBrace,
                ('[', _) => TokenKind::LBracket,
                (']', _) => TokenKind::RBracket,
                ('<', _) => TokenKind::Lt,
                ('>', _) => TokenKind::Gt,
                ('+', _) => TokenKind::Plus,
                ('-', _) => TokenKind::Minus,
                ('*', _) => TokenKind::Star,
                ('/', _) => TokenKind::Slash,
                ('%', _) => TokenKind::Percent,
                _ => return Err(LexError::IllegalChar { pos: start, ch: c }),
            }
        };
        let span = Span {
            hi: cur.pos,
            ..start
        };
        out.push(Token { kind, span });
    }
    Ok(out)
}
