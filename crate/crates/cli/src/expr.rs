//! Arithmetic expressions over `x1..xn` evaluated on jets, so targets given
//! on the command line keep exact derivatives.
//!
//! Grammar: numbers, `x1`..`x9` (also `x`, `y`, `z`), `pi`, `e`, `+ - * / ^`,
//! parentheses and `sin cos exp ln sqrt abs`.

use solnet::target::Jet;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Neg(Box<Expr>),
    Bin(char, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Ln,
    Sqrt,
    Abs,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn lex(s: &str) -> Result<Vec<Tok>, String> {
    let b = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < b.len() && ((b[i] as char).is_ascii_digit() || b[i] == b'.') {
                i += 1;
            }
            if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
                let mut j = i + 1;
                if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
                    j += 1;
                }
                if j < b.len() && b[j].is_ascii_digit() {
                    i = j;
                    while i < b.len() && b[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            out.push(Tok::Num(s[start..i].parse().map_err(|_| format!("bad number {:?}", &s[start..i]))?));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < b.len() && ((b[i] as char).is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push(Tok::Ident(s[start..i].to_string()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(format!("unexpected character {c:?}"));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<Expr, String> {
        let mut lhs = self.product()?;
        loop {
            let op = if self.eat('+') {
                '+'
            } else if self.eat('-') {
                '-'
            } else {
                return Ok(lhs);
            };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.product()?));
        }
    }

    fn product(&mut self) -> Result<Expr, String> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat('*') {
                '*'
            } else if self.eat('/') {
                '/'
            } else {
                return Ok(lhs);
            };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr, String> {
        if self.eat('-') {
            return Ok(match self.unary()? {
                Expr::Num(v) => Expr::Num(-v),
                e => Expr::Neg(Box::new(e)),
            });
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, String> {
        let base = self.atom()?;
        if self.eat('^') {
            return Ok(Expr::Bin('^', Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, String> {
        let tok = self.peek().cloned().ok_or("unexpected end of expression")?;
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::Op('(') => {
                let e = self.sum()?;
                if !self.eat(')') {
                    return Err("missing ')'".into());
                }
                Ok(e)
            }
            Tok::Op(c) => Err(format!("unexpected {c:?}")),
            Tok::Ident(name) => {
                let func = match name.as_str() {
                    "sin" => Some(Func::Sin),
                    "cos" => Some(Func::Cos),
                    "exp" => Some(Func::Exp),
                    "ln" | "log" => Some(Func::Ln),
                    "sqrt" => Some(Func::Sqrt),
                    "abs" => Some(Func::Abs),
                    _ => None,
                };
                if let Some(f) = func {
                    if !self.eat('(') {
                        return Err(format!("{name} needs an argument in parentheses"));
                    }
                    let arg = self.sum()?;
                    if !self.eat(')') {
                        return Err("missing ')'".into());
                    }
                    return Ok(Expr::Call(f, Box::new(arg)));
                }
                match name.as_str() {
                    "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                    "e" => Ok(Expr::Num(std::f64::consts::E)),
                    "x" => Ok(Expr::Var(0)),
                    "y" => Ok(Expr::Var(1)),
                    "z" => Ok(Expr::Var(2)),
                    _ => match name.strip_prefix('x').and_then(|d| d.parse::<usize>().ok()) {
                        Some(i) if i >= 1 => Ok(Expr::Var(i - 1)),
                        _ => Err(format!("unknown name {name:?}")),
                    },
                }
            }
        }
    }
}

impl Expr {
    pub fn parse(s: &str) -> Result<Expr, String> {
        let mut p = Parser { toks: lex(s)?, pos: 0 };
        let e = p.sum()?;
        if p.pos != p.toks.len() {
            return Err(format!("trailing input after token {}", p.pos));
        }
        Ok(e)
    }

    /// Number of variables referenced (highest index plus one).
    pub fn arity(&self) -> usize {
        match self {
            Expr::Num(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Neg(a) | Expr::Call(_, a) => a.arity(),
            Expr::Bin(_, a, b) => a.arity().max(b.arity()),
        }
    }

    pub fn eval(&self, x: &[Jet]) -> Jet {
        match self {
            Expr::Num(v) => Jet::constant(&x[0].space, *v),
            Expr::Var(i) => x[*i].clone(),
            Expr::Neg(a) => -a.eval(x),
            Expr::Bin(op, a, b) => {
                let l = a.eval(x);
                match (op, b.as_ref()) {
                    ('^', Expr::Num(p)) if p.fract() == 0.0 && *p >= 0.0 => l.powi(*p as u32),
                    ('^', Expr::Num(p)) => l.powf(*p),
                    ('^', _) => (b.eval(x) * l.ln()).exp(),
                    ('+', _) => l + b.eval(x),
                    ('-', _) => l - b.eval(x),
                    ('*', _) => l * b.eval(x),
                    _ => l / b.eval(x),
                }
            }
            Expr::Call(f, a) => {
                let v = a.eval(x);
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                    Func::Ln => v.ln(),
                    Func::Sqrt => v.sqrt(),
                    Func::Abs => v.abs(),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use solnet::target::{JetTarget, Target};

    fn value(s: &str, x: &[f64]) -> f64 {
        let e = Expr::parse(s).unwrap();
        JetTarget::new(x.len(), move |v| e.eval(v)).eval(x)
    }

    #[test]
    fn precedence_and_functions() {
        assert_eq!(value("1 + 2 * 3 ^ 2", &[0.0]), 19.0);
        assert_eq!(value("-x1^2", &[3.0]), -9.0);
        assert_eq!(value("2^-1", &[0.0]), 0.5);
        assert_eq!(value("(x1 - x2) / 4", &[3.0, 1.0]), 0.5);
        assert!((value("sin(x1 + x2)/2", &[0.3, 0.4]) - 0.7f64.sin() / 2.0).abs() < 1e-15);
        assert!((value("sqrt(x) * exp(y) - ln(2)", &[4.0, 0.0]) - (2.0 - 2f64.ln())).abs() < 1e-15);
        assert!((value("x1^x2", &[2.0, 3.0]) - 8.0).abs() < 1e-12);
        assert_eq!(value("1.5e1 + pi - pi", &[0.0]), 15.0);
    }

    #[test]
    fn arity_and_errors() {
        assert_eq!(Expr::parse("x1 + x3").unwrap().arity(), 3);
        assert_eq!(Expr::parse("2").unwrap().arity(), 0);
        for bad in ["", "1 +", "sin x", "(1", "w1", "x0", "1 $ 2", "1 2"] {
            assert!(Expr::parse(bad).is_err(), "{bad}");
        }
    }
}
