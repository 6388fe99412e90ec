//! Analytic expression trees over coordinate symbols, with a parenthesized
//! prefix text form such as `(* (sin x0) x1)`.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    /// Coordinate symbol `x^i` (written `x<i>` or, on the fiber, `u<i>`).
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
    Sqrt(Box<Expr>),
}

impl Expr {
    pub fn c(v: f64) -> Expr {
        Expr::Const(v)
    }

    pub fn x(i: usize) -> Expr {
        Expr::Var(i)
    }

    pub fn sin(self) -> Expr {
        match self {
            Expr::Const(v) => Expr::Const(v.sin()),
            e => Expr::Sin(Box::new(e)),
        }
    }

    pub fn cos(self) -> Expr {
        match self {
            Expr::Const(v) => Expr::Const(v.cos()),
            e => Expr::Cos(Box::new(e)),
        }
    }

    pub fn exp(self) -> Expr {
        Expr::Exp(Box::new(self))
    }

    pub fn sqrt(self) -> Expr {
        Expr::Sqrt(Box::new(self))
    }

    pub fn powi(self, n: i32) -> Expr {
        match n {
            0 => Expr::Const(1.0),
            1 => self,
            _ => Expr::Pow(Box::new(self), n),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(v) if *v == 0.0)
    }

    fn is_one(&self) -> bool {
        matches!(self, Expr::Const(v) if *v == 1.0)
    }

    /// Linear combination `Σ c_i x^i` (skips zero coefficients).
    pub fn linear(coeffs: &[f64]) -> Expr {
        coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .fold(Expr::c(0.0), |acc, (i, &c)| acc + Expr::c(c) * Expr::x(i))
    }

    /// Largest coordinate index referenced, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(a)
            | Expr::Pow(a, _)
            | Expr::Sin(a)
            | Expr::Cos(a)
            | Expr::Exp(a)
            | Expr::Sqrt(a) => a.max_var(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                match (a.max_var(), b.max_var()) {
                    (Some(x), Some(y)) => Some(x.max(y)),
                    (x, None) => x,
                    (None, y) => y,
                }
            }
        }
    }

    /// Evaluate with `vars[i]` substituted for `x^i`. `vars` must be non-empty.
    pub fn eval<T: Scalar>(&self, vars: &[T]) -> Result<T> {
        Ok(match self {
            Expr::Const(v) => vars[0].lift(*v),
            Expr::Var(i) => vars
                .get(*i)
                .cloned()
                .ok_or_else(|| Error::DimensionMismatch(format!("x{i} out of range")))?,
            Expr::Neg(a) => -a.eval(vars)?,
            Expr::Add(a, b) => a.eval(vars)? + b.eval(vars)?,
            Expr::Sub(a, b) => a.eval(vars)? - b.eval(vars)?,
            Expr::Mul(a, b) => a.eval(vars)? * b.eval(vars)?,
            Expr::Div(a, b) => a.eval(vars)? * b.eval(vars)?.try_recip()?,
            Expr::Pow(a, n) => a.eval(vars)?.powi(*n)?,
            Expr::Sin(a) => a.eval(vars)?.sin(),
            Expr::Cos(a) => a.eval(vars)?.cos(),
            Expr::Exp(a) => a.eval(vars)?.exp(),
            Expr::Sqrt(a) => a.eval(vars)?.try_sqrt()?,
        })
    }

    pub fn eval_f64(&self, x: &[f64]) -> Result<f64> {
        self.eval(x)
    }

    pub fn parse(src: &str) -> Result<Expr> {
        let tokens = tokenize(src)?;
        let mut pos = 0;
        let e = parse_expr(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(Error::Parse {
                offset: tokens[pos].1,
                message: "trailing input".into(),
            });
        }
        Ok(e)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(v) => write!(f, "{v:?}"),
            Expr::Var(i) => write!(f, "x{i}"),
            Expr::Neg(a) => write!(f, "(- {a})"),
            Expr::Add(a, b) => write!(f, "(+ {a} {b})"),
            Expr::Sub(a, b) => write!(f, "(- {a} {b})"),
            Expr::Mul(a, b) => write!(f, "(* {a} {b})"),
            Expr::Div(a, b) => write!(f, "(/ {a} {b})"),
            Expr::Pow(a, n) => write!(f, "(^ {a} {n})"),
            Expr::Sin(a) => write!(f, "(sin {a})"),
            Expr::Cos(a) => write!(f, "(cos {a})"),
            Expr::Exp(a) => write!(f, "(exp {a})"),
            Expr::Sqrt(a) => write!(f, "(sqrt {a})"),
        }
    }
}

impl std::str::FromStr for Expr {
    type Err = Error;
    fn from_str(s: &str) -> Result<Expr> {
        Expr::parse(s)
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(self, o: Expr) -> Expr {
        match (self, o) {
            (Expr::Const(a), Expr::Const(b)) => Expr::Const(a + b),
            (a, b) if a.is_zero() => b,
            (a, b) if b.is_zero() => a,
            (a, b) => Expr::Add(Box::new(a), Box::new(b)),
        }
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(self, o: Expr) -> Expr {
        match (self, o) {
            (Expr::Const(a), Expr::Const(b)) => Expr::Const(a - b),
            (a, b) if b.is_zero() => a,
            (a, b) if a.is_zero() => -b,
            (a, b) => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }
}

impl Mul for Expr {
    type Output = Expr;
    fn mul(self, o: Expr) -> Expr {
        match (self, o) {
            (Expr::Const(a), Expr::Const(b)) => Expr::Const(a * b),
            (a, b) if a.is_zero() || b.is_zero() => Expr::Const(0.0),
            (a, b) if a.is_one() => b,
            (a, b) if b.is_one() => a,
            (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
        }
    }
}

impl Div for Expr {
    type Output = Expr;
    fn div(self, o: Expr) -> Expr {
        match (self, o) {
            (a, b) if b.is_one() => a,
            (a, b) => Expr::Div(Box::new(a), Box::new(b)),
        }
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self {
            Expr::Const(v) => Expr::Const(-v),
            Expr::Neg(a) => *a,
            e => Expr::Neg(Box::new(e)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Atom(String),
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>> {
    let mut out = Vec::new();
    let mut chars = src.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        match c {
            '(' => {
                out.push((Tok::Open, i));
                chars.next();
            }
            ')' => {
                out.push((Tok::Close, i));
                chars.next();
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            _ => {
                let start = i;
                let mut s = String::new();
                while let Some(&(_, c)) = chars.peek() {
                    if c == '(' || c == ')' || c.is_whitespace() {
                        break;
                    }
                    s.push(c);
                    chars.next();
                }
                out.push((Tok::Atom(s), start));
            }
        }
    }
    Ok(out)
}

fn parse_expr(tokens: &[(Tok, usize)], pos: &mut usize) -> Result<Expr> {
    let (tok, offset) = tokens.get(*pos).ok_or(Error::Parse {
        offset: tokens.last().map(|t| t.1).unwrap_or(0),
        message: "unexpected end of input".into(),
    })?;
    *pos += 1;
    match tok {
        Tok::Close => Err(Error::Parse {
            offset: *offset,
            message: "unexpected ')'".into(),
        }),
        Tok::Atom(a) => parse_atom(a, *offset),
        Tok::Open => {
            let op = match tokens.get(*pos) {
                Some((Tok::Atom(op), _)) => op.clone(),
                _ => {
                    return Err(Error::Parse {
                        offset: *offset,
                        message: "expected operator after '('".into(),
                    })
                }
            };
            *pos += 1;
            let mut args = Vec::new();
            loop {
                match tokens.get(*pos) {
                    Some((Tok::Close, _)) => {
                        *pos += 1;
                        break;
                    }
                    Some(_) => args.push(parse_expr(tokens, pos)?),
                    None => {
                        return Err(Error::Parse {
                            offset: *offset,
                            message: "unclosed '('".into(),
                        })
                    }
                }
            }
            build(&op, args, *offset)
        }
    }
}

fn parse_atom(a: &str, offset: usize) -> Result<Expr> {
    if let Some(rest) = a.strip_prefix('x').or_else(|| a.strip_prefix('u')) {
        if let Ok(i) = rest.parse::<usize>() {
            return Ok(Expr::Var(i));
        }
    }
    if a == "pi" {
        return Ok(Expr::Const(std::f64::consts::PI));
    }
    a.parse::<f64>().map(Expr::Const).map_err(|_| Error::Parse {
        offset,
        message: format!("unknown atom '{a}'"),
    })
}

fn build(op: &str, args: Vec<Expr>, offset: usize) -> Result<Expr> {
    let arity = |n: usize| -> Result<()> {
        if args.len() == n {
            Ok(())
        } else {
            Err(Error::Parse {
                offset,
                message: format!("'{op}' expects {n} argument(s), got {}", args.len()),
            })
        }
    };
    let nonempty = || -> Result<()> {
        if args.is_empty() {
            Err(Error::Parse {
                offset,
                message: format!("'{op}' needs arguments"),
            })
        } else {
            Ok(())
        }
    };
    let unary =
        |args: Vec<Expr>, f: fn(Box<Expr>) -> Expr| f(Box::new(args.into_iter().next().unwrap()));
    Ok(match op {
        "+" => {
            nonempty()?;
            fold(args, |a, b| Expr::Add(Box::new(a), Box::new(b)))
        }
        "*" => {
            nonempty()?;
            fold(args, |a, b| Expr::Mul(Box::new(a), Box::new(b)))
        }
        "-" => match args.len() {
            1 => Expr::Neg(Box::new(args.into_iter().next().unwrap())),
            0 => {
                return Err(Error::Parse {
                    offset,
                    message: "'-' needs arguments".into(),
                })
            }
            _ => fold(args, |a, b| Expr::Sub(Box::new(a), Box::new(b))),
        },
        "/" => {
            arity(2)?;
            let mut it = args.into_iter();
            Expr::Div(Box::new(it.next().unwrap()), Box::new(it.next().unwrap()))
        }
        "^" => {
            arity(2)?;
            let mut it = args.into_iter();
            let base = it.next().unwrap();
            let n = match it.next().unwrap() {
                Expr::Const(v) if v.fract() == 0.0 && v.abs() < 64.0 => v as i32,
                _ => {
                    return Err(Error::Parse {
                        offset,
                        message: "'^' needs an integer exponent".into(),
                    })
                }
            };
            Expr::Pow(Box::new(base), n)
        }
        "sin" => {
            arity(1)?;
            unary(args, Expr::Sin)
        }
        "cos" => {
            arity(1)?;
            unary(args, Expr::Cos)
        }
        "exp" => {
            arity(1)?;
            unary(args, Expr::Exp)
        }
        "sqrt" => {
            arity(1)?;
            unary(args, Expr::Sqrt)
        }
        _ => {
            return Err(Error::Parse {
                offset,
                message: format!("unknown operator '{op}'"),
            })
        }
    })
}

fn fold(args: Vec<Expr>, f: impl Fn(Expr, Expr) -> Expr) -> Expr {
    let mut it = args.into_iter();
    let first = it.next().unwrap();
    it.fold(first, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_evaluate() {
        let e = Expr::parse("(* (sin x0) x1)").unwrap();
        let v = e.eval_f64(&[0.5, 2.0]).unwrap();
        assert!((v - 2.0 * 0.5f64.sin()).abs() < 1e-15);
    }

    #[test]
    fn nary_and_unary_minus() {
        let e = Expr::parse("(+ 1 2 x0 (- x1) (- 10 3 1))").unwrap();
        assert_eq!(
            e.eval_f64(&[4.0, 1.0]).unwrap(),
            1.0 + 2.0 + 4.0 - 1.0 + 6.0
        );
    }

    #[test]
    fn fiber_symbols_alias_coordinates() {
        let e = Expr::parse("(^ u1 3)").unwrap();
        assert_eq!(e, Expr::Pow(Box::new(Expr::Var(1)), 3));
    }

    #[test]
    fn display_round_trips() {
        let src = "(/ (+ (exp x0) -1.25e-3) (sqrt (cos (* x1 pi))))";
        let e = Expr::parse(src).unwrap();
        let again = Expr::parse(&e.to_string()).unwrap();
        assert_eq!(e, again);
    }

    #[test]
    fn parse_errors_carry_offsets() {
        assert!(matches!(
            Expr::parse("(foo x0)"),
            Err(Error::Parse { offset: 0, .. })
        ));
        assert!(matches!(Expr::parse("(sin x0"), Err(Error::Parse { .. })));
        assert!(matches!(
            Expr::parse("(^ x0 1.5)"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            Expr::parse("x0 x1"),
            Err(Error::Parse { offset: 3, .. })
        ));
    }

    #[test]
    fn domain_errors_surface_at_evaluation() {
        let e = Expr::parse("(/ 1 (- x0 x0))").unwrap();
        assert!(matches!(e.eval_f64(&[1.0]), Err(Error::DomainError(_))));
        let s = Expr::parse("(sqrt (- 0 1))").unwrap();
        assert!(matches!(s.eval_f64(&[0.0]), Err(Error::DomainError(_))));
    }

    #[test]
    fn smart_constructors_fold_trivial_constants() {
        assert_eq!(Expr::c(0.0) * Expr::x(1), Expr::c(0.0));
        assert_eq!(Expr::c(1.0) * Expr::x(1), Expr::x(1));
        assert_eq!(Expr::c(2.0) + Expr::c(3.0), Expr::c(5.0));
        assert_eq!(Expr::linear(&[0.0, 2.0]), Expr::c(2.0) * Expr::x(1));
    }
}
