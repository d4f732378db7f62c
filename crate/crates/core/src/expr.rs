//! A small complex-valued expression language for transcribed closed forms.
//!
//! Grammar: `+ - * / ^`, unary minus, parentheses, numeric literals, the
//! constants `i` and `pi`, and the functions `sqrt conj re im exp ln`.
//! Every other identifier is looked up in the environment at evaluation time.

use crate::calculus::Scalar;
use crate::error::{GeoError, Result};
use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(String),
    Neg(Box<Expr>),
    Bin(char, Box<Expr>, Box<Expr>),
    Call(String, Box<Expr>),
}

pub type Env = HashMap<String, Scalar>;

const FUNCS: [&str; 6] = ["sqrt", "conj", "re", "im", "exp", "ln"];

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Id(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let cs: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let ch = cs[i];
        if ch.is_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() || ch == '.' {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.') {
                i += 1;
            }
            if i < cs.len() && (cs[i] == 'e' || cs[i] == 'E') && i + 1 < cs.len() {
                let j = if cs[i + 1] == '-' || cs[i + 1] == '+' { i + 2 } else { i + 1 };
                if j < cs.len() && cs[j].is_ascii_digit() {
                    i = j;
                    while i < cs.len() && cs[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let t: String = cs[st..i].iter().collect();
            out.push(Tok::Num(t.parse().map_err(|_| GeoError::Parse(format!("bad number `{t}`")))?));
        } else if ch.is_alphabetic() || ch == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Id(cs[st..i].iter().collect()));
        } else if "+-*/^()".contains(ch) {
            out.push(Tok::Op(ch));
            i += 1;
        } else {
            return Err(GeoError::Parse(format!("unexpected `{ch}` in `{s}`")));
        }
    }
    Ok(out)
}

struct Parser {
    t: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.t.get(self.pos)
    }
    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Op(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }
    fn sum(&mut self) -> Result<Expr> {
        let mut e = self.product()?;
        loop {
            if self.eat('+') {
                e = Expr::Bin('+', Box::new(e), Box::new(self.product()?));
            } else if self.eat('-') {
                e = Expr::Bin('-', Box::new(e), Box::new(self.product()?));
            } else {
                return Ok(e);
            }
        }
    }
    fn product(&mut self) -> Result<Expr> {
        let mut e = self.unary()?;
        loop {
            if self.eat('*') {
                e = Expr::Bin('*', Box::new(e), Box::new(self.unary()?));
            } else if self.eat('/') {
                e = Expr::Bin('/', Box::new(e), Box::new(self.unary()?));
            } else {
                return Ok(e);
            }
        }
    }
    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat('+') {
            return self.unary();
        }
        let base = self.atom()?;
        if self.eat('^') {
            // right associative, binds tighter than unary minus on the left
            return Ok(Expr::Bin('^', Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }
    fn atom(&mut self) -> Result<Expr> {
        match self.t.get(self.pos).cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Some(Tok::Id(name)) => {
                self.pos += 1;
                if FUNCS.contains(&name.as_str()) {
                    if !self.eat('(') {
                        return Err(GeoError::Parse(format!("`{name}` needs an argument")));
                    }
                    let arg = self.sum()?;
                    if !self.eat(')') {
                        return Err(GeoError::Parse("missing `)`".into()));
                    }
                    return Ok(Expr::Call(name, Box::new(arg)));
                }
                Ok(Expr::Var(name))
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.sum()?;
                if !self.eat(')') {
                    return Err(GeoError::Parse("missing `)`".into()));
                }
                Ok(e)
            }
            other => Err(GeoError::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

impl Expr {
    pub fn parse(s: &str) -> Result<Expr> {
        let mut p = Parser { t: lex(s)?, pos: 0 };
        let e = p.sum()?;
        if p.pos != p.t.len() {
            return Err(GeoError::Parse(format!("trailing input in `{s}`")));
        }
        Ok(e)
    }

    pub fn eval(&self, env: &Env) -> Result<Scalar> {
        Ok(match self {
            Expr::Num(v) => Scalar::new(*v, 0.0),
            Expr::Var(n) => match (env.get(n), n.as_str()) {
                (Some(v), _) => *v,
                (None, "i") => Scalar::new(0.0, 1.0),
                (None, "pi") => Scalar::new(std::f64::consts::PI, 0.0),
                _ => return Err(GeoError::UnknownId(n.clone())),
            },
            Expr::Neg(a) => -a.eval(env)?,
            Expr::Bin(op, a, b) => {
                let (x, y) = (a.eval(env)?, b.eval(env)?);
                match op {
                    '+' => x + y,
                    '-' => x - y,
                    '*' => x * y,
                    '/' => x / y,
                    _ => {
                        if y.im == 0.0 && y.re.fract() == 0.0 && y.re.abs() < 64.0 {
                            x.powi(y.re as i32)
                        } else {
                            x.powc(y)
                        }
                    }
                }
            }
            Expr::Call(f, a) => {
                let x = a.eval(env)?;
                match f.as_str() {
                    "sqrt" => x.sqrt(),
                    "conj" => x.conj(),
                    "re" => Scalar::new(x.re, 0.0),
                    "im" => Scalar::new(x.im, 0.0),
                    "exp" => x.exp(),
                    _ => x.ln(),
                }
            }
        })
    }

    /// Identifiers the expression reads, excluding the built-in constants.
    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect(&self, out: &mut Vec<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(n) => {
                if n != "i" && n != "pi" {
                    out.push(n.clone())
                }
            }
            Expr::Neg(a) | Expr::Call(_, a) => a.collect(out),
            Expr::Bin(_, a, b) => {
                a.collect(out);
                b.collect(out);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, env: &[(&str, Scalar)]) -> Scalar {
        let env: Env = env.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        Expr::parse(s).unwrap().eval(&env).unwrap()
    }

    #[test]
    fn precedence() {
        assert_eq!(ev("1+2*3", &[]).re, 7.0);
        assert_eq!(ev("-2^2", &[]).re, -4.0);
        assert_eq!(ev("2^3^2", &[]).re, 512.0);
        assert_eq!(ev("(1+2)/3*4", &[]).re, 4.0);
        assert_eq!(ev("1e-2*100", &[]).re, 1.0);
    }

    #[test]
    fn complex_values() {
        let z = Scalar::new(0.3, -1.2);
        assert!((ev("conj(z)*z - re(z)^2 - im(z)^2", &[("z", z)])).norm() < 1e-15);
        assert!((ev("i*i", &[]) + 1.0).norm() < 1e-15);
        assert!((ev("sqrt(4)", &[]) - 2.0).norm() < 1e-15);
    }

    #[test]
    fn errors() {
        assert!(Expr::parse("1+").is_err());
        assert!(Expr::parse("(1").is_err());
        assert!(Expr::parse("2 $ 3").is_err());
        assert!(Expr::parse("q").unwrap().eval(&Env::new()).is_err());
    }
}
