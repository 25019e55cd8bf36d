//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term { ("+"|"-") term }
//! term   := factor { ("*"|"/") factor }
//! factor := unary [ "^" uint ]
//! unary  := [ "-" ] atom
//! atom   := number | "z" | "i" | "pi" | "e" | ident "(" expr ")" | "(" expr ")"
//! ident  := "cosh"|"sinh"|"cos"|"sin"|"exp"|"log"|"tan"|"tanh"
//! ```
//!
//! Whitespace is insignificant; implicit multiplication is not supported.

use super::ast::{Builtin, Expr};
use super::ParseError;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok<'a> {
    Num { value: f64, text: &'a str },
    Ident(&'a str),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

#[derive(Debug, Clone, Copy)]
struct Spanned<'a> {
    tok: Tok<'a>,
    pos: usize,
}

fn syntax(pos: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        position: pos,
        message: message.into(),
    }
}

fn lex(src: &str) -> Result<Vec<Spanned<'_>>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let pos = i;
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'+' => out.push(Spanned { tok: Tok::Plus, pos }),
            b'-' => out.push(Spanned { tok: Tok::Minus, pos }),
            b'*' => out.push(Spanned { tok: Tok::Star, pos }),
            b'/' => out.push(Spanned { tok: Tok::Slash, pos }),
            b'^' => out.push(Spanned { tok: Tok::Caret, pos }),
            b'(' => out.push(Spanned { tok: Tok::LParen, pos }),
            b')' => out.push(Spanned { tok: Tok::RParen, pos }),
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    if i >= bytes.len() || !bytes[i].is_ascii_digit() {
                        return Err(syntax(i, "expected digit after decimal point"));
                    }
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                // Exponent suffix only when unambiguous; a bare trailing
                // "e" stays an identifier token.
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[pos..i];
                let value: f64 = text
                    .parse()
                    .map_err(|_| syntax(pos, format!("malformed number `{text}`")))?;
                out.push(Spanned {
                    tok: Tok::Num { value, text },
                    pos,
                });
                continue;
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                    i += 1;
                }
                out.push(Spanned {
                    tok: Tok::Ident(&src[pos..i]),
                    pos,
                });
                continue;
            }
            _ => {
                return Err(syntax(pos, format!("unexpected character `{}`", c as char)));
            }
        }
        i += 1;
    }
    out.push(Spanned {
        tok: Tok::Eof,
        pos: bytes.len(),
    });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Spanned<'a>>,
    cursor: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Spanned<'a> {
        self.toks[self.cursor]
    }

    fn bump(&mut self) -> Spanned<'a> {
        let t = self.toks[self.cursor];
        if self.cursor + 1 < self.toks.len() {
            self.cursor += 1;
        }
        t
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().tok {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            match self.peek().tok {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.unary()?;
        if self.peek().tok != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let at = self.peek();
        match at.tok {
            // Strictly a digit run: "2.0", "-1" and non-literals are all
            // rejected to keep the function entire.
            Tok::Num { text, .. } if text.bytes().all(|b| b.is_ascii_digit()) => {
                self.bump();
                let n: u32 = text
                    .parse()
                    .map_err(|_| syntax(at.pos, format!("exponent `{text}` too large")))?;
                Ok(Expr::Pow(Box::new(base), n))
            }
            _ => Err(ParseError::NonIntegerExponent { position: at.pos }),
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek().tok == Tok::Minus {
            self.bump();
            Ok(Expr::Neg(Box::new(self.atom()?)))
        } else {
            self.atom()
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let t = self.bump();
        match t.tok {
            Tok::Num { value, .. } => Ok(Expr::Num(value)),
            Tok::Ident("z") => Ok(Expr::Z),
            Tok::Ident("i") => Ok(Expr::ImaginaryUnit),
            Tok::Ident("pi") => Ok(Expr::Pi),
            Tok::Ident("e") => Ok(Expr::EulerE),
            Tok::Ident(name) => match Builtin::from_name(name) {
                Some(g) => {
                    let open = self.peek();
                    if open.tok != Tok::LParen {
                        return Err(syntax(open.pos, format!("expected `(` after `{name}`")));
                    }
                    self.bump();
                    let arg = self.expr()?;
                    let close = self.peek();
                    if close.tok != Tok::RParen {
                        return Err(syntax(close.pos, "expected `)`"));
                    }
                    self.bump();
                    Ok(Expr::Call(g, Box::new(arg)))
                }
                None => Err(ParseError::UnknownIdentifier {
                    name: name.to_string(),
                    position: t.pos,
                }),
            },
            Tok::LParen => {
                let inner = self.expr()?;
                let close = self.peek();
                if close.tok != Tok::RParen {
                    return Err(syntax(close.pos, "expected `)`"));
                }
                self.bump();
                Ok(inner)
            }
            Tok::Eof => Err(syntax(t.pos, "unexpected end of input")),
            _ => Err(syntax(t.pos, "expected a number, `z`, `i`, `pi`, `e` or `(`")),
        }
    }
}

pub(crate) fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    if src.trim().is_empty() {
        return Err(syntax(0, "empty expression"));
    }
    let toks = lex(src)?;
    let mut p = Parser { toks, cursor: 0 };
    let e = p.expr()?;
    let end = p.peek();
    if end.tok != Tok::Eof {
        return Err(syntax(end.pos, "unexpected token after expression"));
    }
    Ok(e)
}
