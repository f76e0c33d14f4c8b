//! Hand-written recursive descent parser for coefficient expressions.
//!
//! Grammar (precedence low to high):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?          // right-associative
//! atom    := number | 'x' | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! so `^` binds tighter than unary minus (`-x^2` is `-(x^2)`), and the
//! exponent slot re-enters at `unary` (`2^-x` parses). Only the identifiers
//! exp, log, sin, cos, sqrt, tanh are known.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Sqrt,
    Tanh,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "sqrt" => Func::Sqrt,
            "tanh" => Func::Tanh,
            _ => return None,
        })
    }

    pub fn apply(&self, v: f64) -> f64 {
        match self {
            Func::Exp => v.exp(),
            Func::Log => v.ln(),
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Sqrt => v.sqrt(),
            Func::Tanh => v.tanh(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprAst {
    Num(f64),
    Var,
    Neg(Box<ExprAst>),
    Bin(BinOp, Box<ExprAst>, Box<ExprAst>),
    Call(Func, Box<ExprAst>),
}

impl ExprAst {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            ExprAst::Num(v) => *v,
            ExprAst::Var => x,
            ExprAst::Neg(e) => -e.eval(x),
            ExprAst::Bin(op, l, r) => {
                let (a, b) = (l.eval(x), r.eval(x));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                }
            }
            ExprAst::Call(f, e) => f.apply(e.eval(x)),
        }
    }
}

impl fmt::Display for ExprAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExprAst::Num(v) => write!(f, "{v}"),
            ExprAst::Var => write!(f, "x"),
            ExprAst::Neg(e) => write!(f, "(-{e})"),
            ExprAst::Bin(op, l, r) => {
                let s = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                    BinOp::Pow => "^",
                };
                write!(f, "({l}{s}{r})")
            }
            ExprAst::Call(func, e) => {
                let name = match func {
                    Func::Exp => "exp",
                    Func::Log => "log",
                    Func::Sin => "sin",
                    Func::Cos => "cos",
                    Func::Sqrt => "sqrt",
                    Func::Tanh => "tanh",
                };
                write!(f, "{name}({e})")
            }
        }
    }
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
#[error("syntax error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

pub fn parse_expression(src: &str) -> Result<ExprAst, ParseError> {
    let mut p = Parser { src: src.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> ParseError {
        ParseError { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<ExprAst, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = ExprAst::Bin(BinOp::Add, Box::new(lhs), Box::new(rhs));
                }
                Some(b'-') => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    lhs = ExprAst::Bin(BinOp::Sub, Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<ExprAst, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    if self.src.get(self.pos) == Some(&b'*') {
                        return Err(self.err("'**' is not an operator; use '^'"));
                    }
                    let rhs = self.unary()?;
                    lhs = ExprAst::Bin(BinOp::Mul, Box::new(lhs), Box::new(rhs));
                }
                Some(b'/') => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    lhs = ExprAst::Bin(BinOp::Div, Box::new(lhs), Box::new(rhs));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<ExprAst, ParseError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            let e = self.unary()?;
            return Ok(ExprAst::Neg(Box::new(e)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<ExprAst, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let exp = self.unary()?; // right-assoc, allows unary minus exponents
            return Ok(ExprAst::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<ExprAst, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self
                    .src
                    .get(self.pos)
                    .is_some_and(|c| c.is_ascii_alphanumeric() || *c == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                if name == "x" {
                    return Ok(ExprAst::Var);
                }
                if let Some(f) = Func::from_name(name) {
                    if self.peek() != Some(b'(') {
                        return Err(self.err(&format!("expected '(' after {name}")));
                    }
                    self.pos += 1;
                    let arg = self.expr()?;
                    if self.peek() != Some(b')') {
                        return Err(self.err("expected ')'"));
                    }
                    self.pos += 1;
                    return Ok(ExprAst::Call(f, Box::new(arg)));
                }
                self.pos = start;
                Err(self.err(&format!("unknown identifier '{name}'")))
            }
            _ => Err(self.err("expected a number, 'x', a function call, or '('")),
        }
    }

    fn number(&mut self) -> Result<ExprAst, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            while self.src.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        if matches!(self.src.get(self.pos), Some(b'e') | Some(b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            if self.src.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                while self.src.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
            } else {
                self.pos = mark; // 'e' belonged to something else
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<f64>()
            .map(ExprAst::Num)
            .map_err(|_| ParseError { pos: start, msg: format!("bad number '{text}'") })
    }
}
