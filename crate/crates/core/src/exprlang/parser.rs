use std::sync::Arc;

use super::ast::{Expr, Func, Node};
use super::lexer::{tokenize, Tok};
use crate::error::{Error, Result};

/// Parses `source` as an expression over `coords`.
///
/// Precedence, tightest first: `^` (right-associative), unary `-`, `*` `/`, `+` `-`.
/// Binary `*`, `/`, `+`, `-` associate to the left. `pi` is a builtin constant unless
/// shadowed by a coordinate of the same name.
pub fn parse(source: &str, coords: &[impl AsRef<str>]) -> Result<Expr> {
    let names: Vec<String> = coords.iter().map(|c| c.as_ref().to_string()).collect();
    for (i, n) in names.iter().enumerate() {
        let ok = !n.is_empty()
            && n.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !ok {
            return Err(Error::InvalidChart(format!("`{n}` is not an identifier")));
        }
        if names[..i].contains(n) {
            return Err(Error::InvalidChart(format!("duplicate coordinate `{n}`")));
        }
    }
    if source.trim().is_empty() {
        return Err(Error::Syntax { offset: 0, message: "expected expression, found end of input".into() });
    }
    let toks = tokenize(source)?;
    let mut p = Parser { toks, pos: 0, names: &names };
    let node = p.expr()?;
    let (t, off) = p.peek();
    if *t != Tok::End {
        return Err(Error::Syntax {
            offset: off,
            message: format!("expected operator or end of input, found {}", t.describe()),
        });
    }
    Ok(Expr::from_node(Arc::new(names), node))
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    names: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> (&Tok, usize) {
        let (t, o) = &self.toks[self.pos];
        (t, *o)
    }

    fn bump_tok(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        let (t, off) = self.peek();
        if *t == want {
            self.bump_tok();
            Ok(())
        } else {
            Err(Error::Syntax {
                offset: off,
                message: format!("expected {}, found {}", want.describe(), t.describe()),
            })
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            match self.peek().0 {
                Tok::Plus => {
                    self.bump_tok();
                    lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump_tok();
                    lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek().0 {
                Tok::Star => {
                    self.bump_tok();
                    lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump_tok();
                    lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if *self.peek().0 == Tok::Minus {
            self.bump_tok();
            let inner = self.unary()?;
            return Ok(match inner {
                Node::Num(v) => Node::Num(-v),
                other => Node::Neg(Box::new(other)),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.primary()?;
        if *self.peek().0 == Tok::Caret {
            self.bump_tok();
            let exp = self.unary()?;
            return Ok(Node::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Node> {
        let (tok, off) = self.bump_tok();
        match tok {
            Tok::Num(v) => Ok(Node::Num(v)),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let is_call = *self.peek().0 == Tok::LParen;
                if is_call {
                    if let Some(f) = Func::from_name(&name) {
                        self.bump_tok();
                        let arg = self.expr()?;
                        self.expect(Tok::RParen)?;
                        return Ok(Node::Call(f, Box::new(arg)));
                    }
                    if name == "bump" {
                        self.bump_tok();
                        return self.bump_args(off);
                    }
                }
                if let Some(i) = self.names.iter().position(|n| *n == name) {
                    return Ok(Node::Var(i));
                }
                if name == "pi" {
                    return Ok(Node::Num(std::f64::consts::PI));
                }
                if is_call {
                    return Err(Error::UnknownIdentifier { name, offset: off });
                }
                if Func::from_name(&name).is_some() || name == "bump" {
                    let (t, o) = self.peek();
                    return Err(Error::Syntax {
                        offset: o,
                        message: format!("expected `(` after `{name}`, found {}", t.describe()),
                    });
                }
                Err(Error::UnknownIdentifier { name, offset: off })
            }
            other => Err(Error::Syntax {
                offset: off,
                message: format!("expected expression, found {}", other.describe()),
            }),
        }
    }

    fn bump_args(&mut self, off: usize) -> Result<Node> {
        let arg = self.expr()?;
        let (t, o) = self.peek();
        if *t != Tok::Semi && *t != Tok::Comma {
            return Err(Error::Syntax { offset: o, message: format!("expected `;`, found {}", t.describe()) });
        }
        self.bump_tok();
        let r0 = self.constant_arg()?;
        self.expect(Tok::Comma)?;
        let r1 = self.constant_arg()?;
        self.expect(Tok::RParen)?;
        if !(r0 < r1) {
            return Err(Error::Syntax { offset: off, message: format!("bump needs r0 < r1, got {r0} and {r1}") });
        }
        Ok(Node::Bump { arg: Box::new(arg), r0, r1 })
    }

    fn constant_arg(&mut self) -> Result<f64> {
        let off = self.peek().1;
        let node = self.expr()?;
        let mut vars = Vec::new();
        node.collect_vars(&mut vars);
        if !vars.is_empty() {
            return Err(Error::Syntax { offset: off, message: "bump bounds must be constant".into() });
        }
        let e = Expr::from_node(Arc::new(Vec::new()), node);
        let v = e.eval(&[]).map_err(|_| Error::Syntax { offset: off, message: "bump bound is not finite".into() })?;
        Ok(v)
    }
}
