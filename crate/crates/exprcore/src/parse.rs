use crate::expr::{BinaryOp, Expr, UnaryOp};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown function `{name}` at offset {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("unbalanced parentheses at offset {offset}")]
    UnbalancedParentheses { offset: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn next(&mut self) -> Result<(Tok, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.src[start..];
        let Some(c) = rest.chars().next() else {
            return Ok((Tok::End, start));
        };
        let single = |t: Tok, lx: &mut Self| {
            lx.pos += 1;
            Ok((t, start))
        };
        match c {
            '+' => single(Tok::Plus, self),
            '-' => single(Tok::Minus, self),
            '*' => single(Tok::Star, self),
            '/' => single(Tok::Slash, self),
            '^' => single(Tok::Caret, self),
            '(' => single(Tok::LParen, self),
            ')' => single(Tok::RParen, self),
            c if c.is_ascii_digit() || c == '.' => self.number(start),
            c if c.is_ascii_alphabetic() || c == '_' => {
                let len = rest
                    .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_'))
                    .unwrap_or(rest.len());
                self.pos += len;
                Ok((Tok::Ident(rest[..len].to_string()), start))
            }
            other => Err(ParseError::Syntax {
                offset: start,
                message: format!("unexpected character `{other}`"),
            }),
        }
    }

    fn number(&mut self, start: usize) -> Result<(Tok, usize), ParseError> {
        let bytes = self.src.as_bytes();
        let mut i = start;
        let digits = |i: &mut usize| {
            let s = *i;
            while *i < bytes.len() && bytes[*i].is_ascii_digit() {
                *i += 1;
            }
            *i - s
        };
        let mut n = digits(&mut i);
        if i < bytes.len() && bytes[i] == b'.' {
            i += 1;
            n += digits(&mut i);
        }
        if n == 0 {
            return Err(ParseError::Syntax {
                offset: start,
                message: "malformed number".into(),
            });
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            if digits(&mut j) > 0 {
                i = j;
            }
        }
        let text = &self.src[start..i];
        let value: f64 = text.parse().map_err(|_| ParseError::Syntax {
            offset: start,
            message: format!("malformed number `{text}`"),
        })?;
        if !value.is_finite() {
            return Err(ParseError::Syntax {
                offset: start,
                message: format!("number `{text}` is not finite"),
            });
        }
        self.pos = i;
        Ok((Tok::Num(value), start))
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    tok: Tok,
    at: usize,
}

impl<'a> Parser<'a> {
    fn bump(&mut self) -> Result<(), ParseError> {
        let (t, at) = self.lexer.next()?;
        self.tok = t;
        self.at = at;
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.tok {
                Tok::Plus => BinaryOp::Add,
                Tok::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.tok {
                Tok::Star => BinaryOp::Mul,
                Tok::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.unary()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.tok {
            Tok::Minus => {
                self.bump()?;
                Ok(-self.unary()?)
            }
            Tok::Plus => {
                self.bump()?;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.tok == Tok::Caret {
            self.bump()?;
            let exponent = self.unary()?;
            return Ok(Expr::binary(BinaryOp::Pow, base, exponent));
        }
        Ok(base)
    }

    fn close(&mut self) -> Result<(), ParseError> {
        if self.tok != Tok::RParen {
            return Err(ParseError::Syntax {
                offset: self.at,
                message: "expected `)`".into(),
            });
        }
        self.bump()
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.tok.clone() {
            Tok::Num(v) => {
                self.bump()?;
                Ok(Expr::constant(v))
            }
            Tok::Ident(name) => {
                let at = self.at;
                self.bump()?;
                if self.tok == Tok::LParen {
                    let op = UnaryOp::from_function_name(&name).ok_or(ParseError::UnknownFunction {
                        name: name.clone(),
                        offset: at,
                    })?;
                    self.bump()?;
                    let arg = self.expr()?;
                    self.close()?;
                    Ok(Expr::unary(op, arg))
                } else {
                    Ok(Expr::var(&name))
                }
            }
            Tok::LParen => {
                self.bump()?;
                let inner = self.expr()?;
                self.close()?;
                Ok(inner)
            }
            Tok::RParen => Err(ParseError::UnbalancedParentheses { offset: self.at }),
            Tok::End => Err(ParseError::Syntax {
                offset: self.at,
                message: "unexpected end of input".into(),
            }),
            other => Err(ParseError::Syntax {
                offset: self.at,
                message: format!("unexpected token {other:?}"),
            }),
        }
    }
}

/// Parse infix expression text.
///
/// Precedence from loosest to tightest: `+ -`, `* /`, unary minus, `^`
/// (right associative). Functions: sin, cos, tan, exp, ln (alias log), sqrt.
pub fn parse_expression(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        lexer: Lexer { src: text, pos: 0 },
        tok: Tok::End,
        at: 0,
    };
    p.bump()?;
    let e = p.expr()?;
    match p.tok {
        Tok::End => Ok(e),
        Tok::RParen => Err(ParseError::UnbalancedParentheses { offset: p.at }),
        ref other => Err(ParseError::Syntax {
            offset: p.at,
            message: format!("unexpected token {other:?}"),
        }),
    }
}
