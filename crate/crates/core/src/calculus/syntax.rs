//! Text syntax for types and terms.
//!
//! ```text
//! type  := base | type '->' type          (right-associative)
//! term  := '\' x ':' type '.' term         (body extends to the right)
//!        | cond (';' term)?                (sequencing, right-associative)
//! cond  := app ('?' cond ':' cond)?
//! app   := atom atom*                      (left-associative)
//! atom  := x | true | false | skip | name '(' args ')' | '(' term ')'
//! ```
//!
//! A name immediately followed by `(` is an interface call; whether it is a
//! constant, predicate or action is looked up in the interface. Run-time
//! values print as `@id` (objects) and `*` (the exception); neither can be
//! read back.

use std::fmt;

use thiserror::Error;

use super::{Expr, Type};
use crate::app::{InterfaceDescriptor, NameKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{message} at offset {offset}")]
pub struct SyntaxError {
    pub message: String,
    pub offset: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Seq,
    Cond,
    App,
    Atom,
}

fn prec_of(e: &Expr) -> Prec {
    match e {
        Expr::Lambda { .. } | Expr::Seq(..) => Prec::Seq,
        Expr::Cond(..) => Prec::Cond,
        Expr::App(..) => Prec::App,
        _ => Prec::Atom,
    }
}

struct At<'a>(&'a Expr, Prec);

impl fmt::Display for At<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let At(e, ctx) = *self;
        if prec_of(e) < ctx {
            write!(f, "({})", At(e, Prec::Seq))
        } else {
            write_expr(e, f)
        }
    }
}

fn write_args(args: &[Expr], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "{}", At(a, Prec::Seq))?;
    }
    Ok(())
}

fn write_expr(e: &Expr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e {
        Expr::Var(x) => f.write_str(x),
        Expr::Bool(b) => write!(f, "{b}"),
        Expr::Skip => f.write_str("skip"),
        Expr::Obj(o) => write!(f, "@{}", o.id()),
        Expr::Exception => f.write_str("*"),
        Expr::Lambda { param, ty, body } => write!(f, "\\{param}:{ty}. {}", At(body, Prec::Seq)),
        Expr::Const(name) => write!(f, "{name}()"),
        Expr::Pred(name, args) | Expr::Act(name, args) => {
            write!(f, "{name}(")?;
            write_args(args, f)?;
            f.write_str(")")
        }
        Expr::App(fun, arg) => write!(f, "{} {}", At(fun, Prec::App), At(arg, Prec::Atom)),
        Expr::Cond(t, x, y) => write!(
            f,
            "{} ? {} : {}",
            At(t, Prec::App),
            At(x, Prec::Cond),
            At(y, Prec::Cond)
        ),
        Expr::Seq(a, b) => write!(f, "{}; {}", At(a, Prec::Cond), At(b, Prec::Seq)),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    /// `(` directly after an identifier, with no space between.
    CallParen,
    LParen,
    RParen,
    Backslash,
    Colon,
    Dot,
    Comma,
    Question,
    Semi,
    Arrow,
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, SyntaxError> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    let mut prev_ident_end = None;
    while let Some((i, c)) = chars.next() {
        let tok = match c {
            c if c.is_whitespace() => {
                prev_ident_end = None;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut end = i + c.len_utf8();
                while let Some(&(j, d)) = chars.peek() {
                    if d.is_ascii_alphanumeric() || d == '_' || d == '\'' {
                        end = j + d.len_utf8();
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push((Tok::Ident(src[i..end].to_owned()), i));
                prev_ident_end = Some(end);
                continue;
            }
            '(' if prev_ident_end == Some(i) => Tok::CallParen,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '\\' | 'λ' => Tok::Backslash,
            ':' => Tok::Colon,
            '.' => Tok::Dot,
            ',' => Tok::Comma,
            '?' => Tok::Question,
            ';' => Tok::Semi,
            '-' if chars.peek().map(|&(_, d)| d) == Some('>') => {
                chars.next();
                Tok::Arrow
            }
            '→' => Tok::Arrow,
            other => {
                return Err(SyntaxError { message: format!("unexpected character `{other}`"), offset: i })
            }
        };
        prev_ident_end = None;
        out.push((tok, i));
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    len: usize,
    iface: Option<&'a InterfaceDescriptor>,
}

impl<'a> Parser<'a> {
    fn new(src: &str, iface: Option<&'a InterfaceDescriptor>) -> Result<Self, SyntaxError> {
        Ok(Parser { toks: lex(src)?, pos: 0, len: src.len(), iface })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.len, |&(_, o)| o)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError { message: message.into(), offset: self.offset() })
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), SyntaxError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn ident(&mut self) -> Result<String, SyntaxError> {
        match self.peek() {
            Some(Tok::Ident(name)) => {
                let name = name.clone();
                self.pos += 1;
                Ok(name)
            }
            _ => self.error("expected identifier"),
        }
    }

    fn finish(&self) -> Result<(), SyntaxError> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            self.error("unexpected trailing input")
        }
    }

    fn ty(&mut self) -> Result<Type, SyntaxError> {
        let domain = match self.peek() {
            Some(Tok::LParen) => {
                self.pos += 1;
                let t = self.ty()?;
                self.expect(Tok::RParen, "`)`")?;
                t
            }
            Some(Tok::Ident(name)) => {
                let t = match name.as_str() {
                    "Obj" => Type::Obj,
                    "Bool" => Type::Bool,
                    "Act" => Type::Act,
                    other => return self.error(format!("unknown type `{other}`")),
                };
                self.pos += 1;
                t
            }
            _ => return self.error("expected a type"),
        };
        if self.eat(&Tok::Arrow) {
            Ok(Type::fun(domain, self.ty()?))
        } else {
            Ok(domain)
        }
    }

    fn term(&mut self) -> Result<Expr, SyntaxError> {
        if self.eat(&Tok::Backslash) {
            let param = self.ident()?;
            self.expect(Tok::Colon, "`:` after lambda parameter")?;
            let ty = self.ty()?;
            self.expect(Tok::Dot, "`.` after lambda parameter type")?;
            return Ok(Expr::lambda(param, ty, self.term()?));
        }
        let first = self.cond()?;
        if self.eat(&Tok::Semi) {
            Ok(Expr::seq(first, self.term()?))
        } else {
            Ok(first)
        }
    }

    fn cond(&mut self) -> Result<Expr, SyntaxError> {
        let test = self.app()?;
        if self.eat(&Tok::Question) {
            let then = self.cond()?;
            self.expect(Tok::Colon, "`:` in conditional")?;
            let otherwise = self.cond()?;
            Ok(Expr::cond(test, then, otherwise))
        } else {
            Ok(test)
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(_)) | Some(Tok::LParen))
    }

    fn app(&mut self) -> Result<Expr, SyntaxError> {
        let mut e = self.atom()?;
        while self.starts_atom() {
            e = Expr::app(e, self.atom()?);
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        if self.eat(&Tok::LParen) {
            let e = self.term()?;
            self.expect(Tok::RParen, "`)`")?;
            return Ok(e);
        }
        let start = self.offset();
        let name = self.ident()?;
        if self.eat(&Tok::CallParen) {
            let mut args = Vec::new();
            if !self.eat(&Tok::RParen) {
                loop {
                    args.push(self.term()?);
                    if self.eat(&Tok::RParen) {
                        break;
                    }
                    self.expect(Tok::Comma, "`,` or `)` in argument list")?;
                }
            }
            return self.call(name, args, start);
        }
        Ok(match name.as_str() {
            "true" => Expr::Bool(true),
            "false" => Expr::Bool(false),
            "skip" => Expr::Skip,
            _ => Expr::Var(name),
        })
    }

    fn call(&self, name: String, args: Vec<Expr>, offset: usize) -> Result<Expr, SyntaxError> {
        let Some(iface) = self.iface else {
            return Err(SyntaxError { message: "calls need an interface".into(), offset });
        };
        match iface.kind_of(&name) {
            Some(NameKind::Constant) if args.is_empty() => Ok(Expr::Const(name)),
            Some(NameKind::Constant) => Err(SyntaxError {
                message: format!("constant `{name}` takes no arguments"),
                offset,
            }),
            Some(NameKind::Predicate(_)) => Ok(Expr::Pred(name, args)),
            Some(NameKind::Action(_)) => Ok(Expr::Act(name, args)),
            None => Err(SyntaxError { message: format!("unknown interface name `{name}`"), offset }),
        }
    }
}

pub fn parse_type(src: &str) -> Result<Type, SyntaxError> {
    let mut p = Parser::new(src, None)?;
    let t = p.ty()?;
    p.finish()?;
    Ok(t)
}

/// Parses a source term; interface names are classified using `iface`.
pub fn parse_expr(src: &str, iface: &InterfaceDescriptor) -> Result<Expr, SyntaxError> {
    let mut p = Parser::new(src, Some(iface))?;
    let e = p.term()?;
    p.finish()?;
    Ok(e)
}
