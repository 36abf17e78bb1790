//! Arithmetic expressions over the variables `t`, `s`, `x`.
//!
//! Grammar: `+ - * / ^`, unary minus, parentheses, decimal literals, the constants `pi` and
//! `e`, and the functions `sin cos tan exp ln sqrt abs`. `^` binds tightest and associates
//! to the right.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("at column {column}: {message}")]
pub struct ExprError {
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Var {
    T,
    S,
    X,
}

impl Var {
    fn name(self) -> char {
        match self {
            Var::T => 't',
            Var::S => 's',
            Var::X => 'x',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Abs,
}

impl Func {
    fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    fn eval(self, v: f64) -> f64 {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Tan => v.tan(),
            Func::Exp => v.exp(),
            Func::Ln => v.ln(),
            Func::Sqrt => v.sqrt(),
            Func::Abs => v.abs(),
        }
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Var),
    Neg(Box<Expr>),
    Bin(Op, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self, ExprError> {
        let mut p = Parser { chars: src.char_indices().collect(), pos: 0, len: src.len() };
        let e = p.expr()?;
        p.skip_ws();
        if let Some(&(i, c)) = p.chars.get(p.pos) {
            return Err(ExprError { column: i + 1, message: format!("unexpected `{c}`") });
        }
        Ok(e)
    }

    /// Parses and rejects variables outside `allowed`.
    pub fn parse_in(src: &str, allowed: &[Var]) -> Result<Self, ExprError> {
        let e = Self::parse(src)?;
        if let Some(v) = e.vars().into_iter().find(|v| !allowed.contains(v)) {
            let names: String = allowed.iter().map(|v| v.name()).collect();
            return Err(ExprError { column: 0, message: format!("variable `{}` not allowed here (allowed: {names})", v.name()) });
        }
        Ok(e)
    }

    pub fn eval(&self, t: f64, s: f64, x: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(Var::T) => t,
            Expr::Var(Var::S) => s,
            Expr::Var(Var::X) => x,
            Expr::Neg(a) => -a.eval(t, s, x),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(t, s, x), b.eval(t, s, x));
                match op {
                    Op::Add => a + b,
                    Op::Sub => a - b,
                    Op::Mul => a * b,
                    Op::Div => a / b,
                    Op::Pow => a.powf(b),
                }
            }
            Expr::Call(f, a) => f.eval(a.eval(t, s, x)),
        }
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v) => out.push(*v),
            Expr::Neg(a) | Expr::Call(_, a) => a.collect_vars(out),
            Expr::Bin(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(v) => write!(f, "{}", v.name()),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Bin(op, a, b) => {
                let sym = match op {
                    Op::Add => '+',
                    Op::Sub => '-',
                    Op::Mul => '*',
                    Op::Div => '/',
                    Op::Pow => '^',
                };
                write!(f, "({a}{sym}{b})")
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

struct Parser {
    chars: Vec<(usize, char)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|(_, c)| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn column(&self) -> usize {
        self.chars.get(self.pos).map_or(self.len, |&(i, _)| i) + 1
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError { column: self.column(), message: message.into() })
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        while let Some(c @ ('+' | '-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if c == '+' { Op::Add } else { Op::Sub };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(c @ ('*' | '/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if c == '*' { Op::Mul } else { Op::Div };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Expr::Bin(Op::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        match self.peek() {
            None => self.err("unexpected end of expression"),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(c) => self.err(format!("unexpected `{c}`")),
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> String {
        let mut s = String::new();
        while let Some(&(_, c)) = self.chars.get(self.pos) {
            if !pred(c) {
                break;
            }
            s.push(c);
            self.pos += 1;
        }
        s
    }

    fn number(&mut self) -> Result<Expr, ExprError> {
        let start = self.column();
        let mut s = self.take_while(|c| c.is_ascii_digit() || c == '.');
        if matches!(self.chars.get(self.pos), Some((_, 'e' | 'E'))) {
            let save = self.pos;
            self.pos += 1;
            let mut exp = String::from("e");
            if let Some(&(_, c @ ('+' | '-'))) = self.chars.get(self.pos) {
                exp.push(c);
                self.pos += 1;
            }
            let digits = self.take_while(|c| c.is_ascii_digit());
            if digits.is_empty() {
                self.pos = save;
            } else {
                s.push_str(&exp);
                s.push_str(&digits);
            }
        }
        s.parse::<f64>().map(Expr::Num).map_err(|_| ExprError { column: start, message: format!("bad number `{s}`") })
    }

    fn ident(&mut self) -> Result<Expr, ExprError> {
        let start = self.column();
        let name = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
        match name.as_str() {
            "t" => return Ok(Expr::Var(Var::T)),
            "s" => return Ok(Expr::Var(Var::S)),
            "x" => return Ok(Expr::Var(Var::X)),
            "pi" => return Ok(Expr::Num(std::f64::consts::PI)),
            "e" => return Ok(Expr::Num(std::f64::consts::E)),
            _ => {}
        }
        let Some(func) = Func::parse(&name) else {
            return Err(ExprError { column: start, message: format!("unknown name `{name}`") });
        };
        if self.peek() != Some('(') {
            return self.err(format!("expected `(` after `{name}`"));
        }
        self.pos += 1;
        let arg = self.expr()?;
        if self.peek() != Some(')') {
            return self.err("expected `)`");
        }
        self.pos += 1;
        Ok(Expr::Call(func, Box::new(arg)))
    }
}
