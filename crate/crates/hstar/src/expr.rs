//! S-expression calculator for fractional ideals.
//!
//! Grammar (prefix, no precedence):
//!   atom ::= `S` | `N` | `{a,b,...}`
//!   expr ::= atom
//!          | `(shift expr k)`
//!          | `(sum expr expr)` | `(prod expr expr)`
//!          | `(colon expr expr)` | `(cap expr expr)`
//!          | `(v expr)` | `(star NAME expr)`
//!
//! `S` is the semigroup itself, `N` the full set of non-negative integers,
//! and `{a,b,...}` the fractional ideal generated by the listed integers.

use thiserror::Error;

use crate::ideal::{FracIdeal, IdealError};
use crate::star::StarContext;

#[derive(Debug, Error, PartialEq)]
pub enum ExprError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unknown star operation {0:?}")]
    UnknownStar(String),
    #[error(transparent)]
    Ideal(#[from] IdealError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    /// The semigroup S as an ideal over itself.
    S,
    /// All non-negative integers.
    N,
    /// The fractional ideal generated by an explicit list of integers.
    Gens(Vec<i64>),
    Shift(Box<Expr>, i64),
    Sum(Box<Expr>, Box<Expr>),
    Prod(Box<Expr>, Box<Expr>),
    Colon(Box<Expr>, Box<Expr>),
    Cap(Box<Expr>, Box<Expr>),
    V(Box<Expr>),
    Star(String, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Int(i64),
    Word(String),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Token)>, ExprError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '(' => {
                out.push((i, Token::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Token::RParen));
                i += 1;
            }
            '{' => {
                out.push((i, Token::LBrace));
                i += 1;
            }
            '}' => {
                out.push((i, Token::RBrace));
                i += 1;
            }
            ',' => {
                out.push((i, Token::Comma));
                i += 1;
            }
            '-' | '0'..='9' => {
                let start = i;
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n = src[start..i].parse().map_err(|_| ExprError::Parse {
                    pos: start,
                    msg: format!("bad integer {:?}", &src[start..i]),
                })?;
                out.push((start, Token::Int(n)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((start, Token::Word(src[start..i].to_string())));
            }
            other => {
                return Err(ExprError::Parse {
                    pos: i,
                    msg: format!("unexpected character {other:?}"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [(usize, Token)],
    pos: usize,
    end: usize,
}

impl Parser<'_> {
    fn err(&self, msg: impl Into<String>) -> ExprError {
        let pos = self
            .tokens
            .get(self.pos)
            .map(|&(p, _)| p)
            .unwrap_or(self.end);
        ExprError::Parse {
            pos,
            msg: msg.into(),
        }
    }

    fn next(&mut self) -> Result<&Token, ExprError> {
        let tok = self
            .tokens
            .get(self.pos)
            .map(|(_, t)| t)
            .ok_or_else(|| self.err("unexpected end of input"))?;
        self.pos += 1;
        Ok(tok)
    }

    fn expect(&mut self, want: Token, what: &str) -> Result<(), ExprError> {
        let err = self.err(format!("expected {what}"));
        if *self.next()? == want {
            Ok(())
        } else {
            self.pos -= 1;
            Err(err)
        }
    }

    fn int(&mut self) -> Result<i64, ExprError> {
        let err = self.err("expected an integer");
        match self.next()? {
            Token::Int(n) => Ok(*n),
            _ => {
                self.pos -= 1;
                Err(err)
            }
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let err_atom = self.err("expected an expression");
        match self.next()?.clone() {
            Token::Word(w) if w == "S" => Ok(Expr::S),
            Token::Word(w) if w == "N" => Ok(Expr::N),
            Token::LBrace => {
                let mut gens = vec![self.int()?];
                loop {
                    let err = self.err("expected ',' or '}'");
                    match self.next()? {
                        Token::RBrace => break,
                        Token::Comma => gens.push(self.int()?),
                        _ => {
                            self.pos -= 1;
                            return Err(err);
                        }
                    }
                }
                Ok(Expr::Gens(gens))
            }
            Token::LParen => {
                let err_op = self.err("expected an operator");
                let op = match self.next()? {
                    Token::Word(w) => w.clone(),
                    _ => {
                        self.pos -= 1;
                        return Err(err_op);
                    }
                };
                let node = match op.as_str() {
                    "shift" => {
                        let e = self.expr()?;
                        Expr::Shift(Box::new(e), self.int()?)
                    }
                    "sum" | "prod" | "colon" | "cap" => {
                        let a = Box::new(self.expr()?);
                        let b = Box::new(self.expr()?);
                        match op.as_str() {
                            "sum" => Expr::Sum(a, b),
                            "prod" => Expr::Prod(a, b),
                            "colon" => Expr::Colon(a, b),
                            _ => Expr::Cap(a, b),
                        }
                    }
                    "v" => Expr::V(Box::new(self.expr()?)),
                    "star" => {
                        let err_name = self.err("expected a star name");
                        let name = match self.next()? {
                            Token::Word(w) => w.clone(),
                            _ => {
                                self.pos -= 1;
                                return Err(err_name);
                            }
                        };
                        Expr::Star(name, Box::new(self.expr()?))
                    }
                    other => {
                        self.pos -= 1;
                        return Err(self.err(format!("unknown operator {other:?}")));
                    }
                };
                self.expect(Token::RParen, "')'")?;
                Ok(node)
            }
            _ => {
                self.pos -= 1;
                Err(err_atom)
            }
        }
    }
}

pub fn parse_expr(src: &str) -> Result<Expr, ExprError> {
    let tokens = tokenize(src)?;
    let mut p = Parser {
        tokens: &tokens,
        pos: 0,
        end: src.len(),
    };
    let e = p.expr()?;
    if p.pos != tokens.len() {
        return Err(p.err("trailing input after expression"));
    }
    Ok(e)
}

pub fn eval(ctx: &StarContext, expr: &Expr) -> Result<FracIdeal, ExprError> {
    let sg = &ctx.sg;
    Ok(match expr {
        Expr::S => FracIdeal::semigroup(sg),
        Expr::N => {
            let all: Vec<i64> = (0..=sg.conductor as i64).collect();
            FracIdeal::normalize(sg, &all)?
        }
        Expr::Gens(gens) => FracIdeal::normalize(sg, gens)?,
        Expr::Shift(e, k) => eval(ctx, e)?.shift(*k),
        Expr::Sum(a, b) => eval(ctx, a)?.sum(sg, &eval(ctx, b)?),
        Expr::Prod(a, b) => eval(ctx, a)?.product(sg, &eval(ctx, b)?),
        Expr::Colon(a, b) => eval(ctx, a)?.colon(sg, &eval(ctx, b)?),
        Expr::Cap(a, b) => eval(ctx, a)?.intersect(sg, &eval(ctx, b)?),
        Expr::V(e) => eval(ctx, e)?.dual_v(sg),
        Expr::Star(name, e) => {
            let star = match name.as_str() {
                "d" => ctx.builtin_d(),
                "v" => ctx.builtin_v(),
                other => return Err(ExprError::UnknownStar(other.to_string())),
            };
            ctx.apply(&star, &eval(ctx, e)?)
        }
    })
}

/// Parse and evaluate in one step.
pub fn eval_str(ctx: &StarContext, src: &str) -> Result<FracIdeal, ExprError> {
    eval(ctx, &parse_expr(src)?)
}
