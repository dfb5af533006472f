//! A small closed-form expression language for metric and almost complex
//! structure components.
//!
//! Grammar (whitespace-insensitive), loosest binding first:
//!
//! ```text
//! sum      := product (('+' | '-') product)*
//! product  := unary (('*' | '/') unary)*
//! unary    := '-' unary | power
//! power    := primary ('^' exponent)?
//! primary  := number | 'pi' | 'x1'..'xN' | func '(' sum ')' | '(' sum ')'
//! exponent := ['-'] number | '(' ['-'] number ['/' number] ')'
//! func     := sin | cos | exp | log | sqrt
//! ```
//!
//! Exponents are rational literals, so every expression is smooth wherever
//! it is defined.

use std::fmt;

use thiserror::Error;

use crate::error::{GeomError, Result};
use crate::jet::{ChartPoint, Jet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Neg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Reduced fraction with positive denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rational {
    pub num: i64,
    pub den: i64,
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Option<Self> {
        if den == 0 {
            return None;
        }
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()).max(1) as i64;
        let s = if den < 0 { -1 } else { 1 };
        Some(Self { num: s * num / g, den: s * den / g })
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    /// Zero-based chart coordinate; printed as `x{index+1}`.
    Coord(usize),
    Unary(Func, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Rational),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Empty,
    UnexpectedChar(char),
    UnexpectedToken(String),
    UnexpectedEnd,
    UnknownIdentifier(String),
    IndexOutOfRange { index: usize, dim: usize },
    InvalidNumber(String),
    InvalidExponent(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("parse error at byte {offset}: {kind}")]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Empty => write!(f, "empty expression"),
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character `{c}`"),
            ParseErrorKind::UnexpectedToken(t) => write!(f, "unexpected token `{t}`"),
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of input"),
            ParseErrorKind::UnknownIdentifier(s) => write!(f, "unknown identifier `{s}`"),
            ParseErrorKind::IndexOutOfRange { index, dim } => {
                write!(f, "coordinate x{index} out of range for chart dimension {dim}")
            }
            ParseErrorKind::InvalidNumber(s) => write!(f, "invalid number `{s}`"),
            ParseErrorKind::InvalidExponent(s) => write!(f, "invalid exponent: {s}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(s) | Tok::Ident(s) => write!(f, "{s}"),
            Tok::Plus => write!(f, "+"),
            Tok::Minus => write!(f, "-"),
            Tok::Star => write!(f, "*"),
            Tok::Slash => write!(f, "/"),
            Tok::Caret => write!(f, "^"),
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
        }
    }
}

fn lex(src: &str) -> std::result::Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            _ if c.is_ascii_digit() || c == '.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                out.push((start, Tok::Num(src[start..i].to_string())));
                continue;
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(src[start..i].to_string())));
                continue;
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or(c);
                return Err(ParseError { offset: i, kind: ParseErrorKind::UnexpectedChar(ch) });
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    src_len: usize,
    dim: usize,
    _src: &'a str,
}

type PResult<T> = std::result::Result<T, ParseError>;

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.src_len)
    }

    fn err<T>(&self, kind: ParseErrorKind) -> PResult<T> {
        Err(ParseError { offset: self.offset(), kind })
    }

    fn next(&mut self) -> PResult<Tok> {
        match self.toks.get(self.pos) {
            Some((_, t)) => {
                self.pos += 1;
                Ok(t.clone())
            }
            None => self.err(ParseErrorKind::UnexpectedEnd),
        }
    }

    fn expect(&mut self, want: Tok) -> PResult<()> {
        match self.peek() {
            Some(t) if *t == want => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => {
                let s = t.to_string();
                self.err(ParseErrorKind::UnexpectedToken(s))
            }
            None => self.err(ParseErrorKind::UnexpectedEnd),
        }
    }

    fn sum(&mut self) -> PResult<Expr> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinOp::Add,
                Some(Tok::Minus) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.product()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn product(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Star) => BinOp::Mul,
                Some(Tok::Slash) => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> PResult<Expr> {
        if let Some(Tok::Minus) = self.peek() {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(Expr::Unary(Func::Neg, Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> PResult<Expr> {
        let base = self.primary()?;
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            let exp = self.exponent()?;
            if let Some(Tok::Caret) = self.peek() {
                return self.err(ParseErrorKind::InvalidExponent("chained `^`; parenthesise the base".into()));
            }
            return Ok(Expr::Pow(Box::new(base), exp));
        }
        Ok(base)
    }

    fn integer_literal(&mut self) -> PResult<Rational> {
        let negative = if let Some(Tok::Minus) = self.peek() {
            self.pos += 1;
            true
        } else {
            false
        };
        let at = self.offset();
        match self.next()? {
            Tok::Num(s) => {
                let r = decimal_to_rational(&s).ok_or(ParseError {
                    offset: at,
                    kind: ParseErrorKind::InvalidExponent(format!("`{s}` is not a rational literal")),
                })?;
                Ok(if negative { Rational { num: -r.num, den: r.den } } else { r })
            }
            t => Err(ParseError {
                offset: at,
                kind: ParseErrorKind::InvalidExponent(format!("expected a literal, found `{t}`")),
            }),
        }
    }

    fn exponent(&mut self) -> PResult<Rational> {
        if let Some(Tok::LParen) = self.peek() {
            self.pos += 1;
            let num = self.integer_literal()?;
            let r = if let Some(Tok::Slash) = self.peek() {
                self.pos += 1;
                let at = self.offset();
                let den = self.integer_literal()?;
                let (n, d) = (num.num.checked_mul(den.den), num.den.checked_mul(den.num));
                match (n, d) {
                    (Some(n), Some(d)) if d != 0 => Rational::new(n, d).expect("nonzero denominator"),
                    _ => {
                        return Err(ParseError {
                            offset: at,
                            kind: ParseErrorKind::InvalidExponent("zero or overflowing denominator".into()),
                        })
                    }
                }
            } else {
                num
            };
            self.expect(Tok::RParen)?;
            return Ok(r);
        }
        self.integer_literal()
    }

    fn primary(&mut self) -> PResult<Expr> {
        let at = self.offset();
        match self.next()? {
            Tok::Num(s) => match s.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(Expr::Const(v)),
                _ => Err(ParseError { offset: at, kind: ParseErrorKind::InvalidNumber(s) }),
            },
            Tok::LParen => {
                let e = self.sum()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let func = match name.as_str() {
                    "sin" => Some(Func::Sin),
                    "cos" => Some(Func::Cos),
                    "exp" => Some(Func::Exp),
                    "log" => Some(Func::Log),
                    "sqrt" => Some(Func::Sqrt),
                    _ => None,
                };
                if let Some(f) = func {
                    self.expect(Tok::LParen)?;
                    let arg = self.sum()?;
                    self.expect(Tok::RParen)?;
                    return Ok(Expr::Unary(f, Box::new(arg)));
                }
                if name == "pi" {
                    return Ok(Expr::Const(std::f64::consts::PI));
                }
                if let Some(idx) = name.strip_prefix('x') {
                    if !idx.is_empty() && idx.bytes().all(|b| b.is_ascii_digit()) && !idx.starts_with('0') {
                        let index: usize = idx.parse().map_err(|_| ParseError {
                            offset: at,
                            kind: ParseErrorKind::UnknownIdentifier(name.clone()),
                        })?;
                        if index == 0 || index > self.dim {
                            return Err(ParseError {
                                offset: at,
                                kind: ParseErrorKind::IndexOutOfRange { index, dim: self.dim },
                            });
                        }
                        return Ok(Expr::Coord(index - 1));
                    }
                }
                Err(ParseError { offset: at, kind: ParseErrorKind::UnknownIdentifier(name) })
            }
            t => Err(ParseError { offset: at, kind: ParseErrorKind::UnexpectedToken(t.to_string()) }),
        }
    }
}

fn decimal_to_rational(s: &str) -> Option<Rational> {
    if s.contains(['e', 'E']) {
        return None;
    }
    let (int, frac) = match s.split_once('.') {
        Some((i, f)) => (i, f),
        None => (s, ""),
    };
    if int.is_empty() && frac.is_empty() || frac.len() > 12 {
        return None;
    }
    let digits = format!("{int}{frac}");
    let num: i64 = digits.parse().ok()?;
    let den = 10_i64.checked_pow(frac.len() as u32)?;
    Rational::new(num, den)
}

/// Parse `src` as an expression over chart coordinates `x1..x{dim}`.
pub fn parse(src: &str, dim: usize) -> std::result::Result<Expr, ParseError> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return Err(ParseError { offset: 0, kind: ParseErrorKind::Empty });
    }
    let mut p = Parser { toks, pos: 0, src_len: src.len(), dim, _src: src };
    let e = p.sum()?;
    if let Some(t) = p.peek() {
        let s = t.to_string();
        return p.err(ParseErrorKind::UnexpectedToken(s));
    }
    Ok(e)
}

impl Expr {
    /// Highest coordinate index used, plus one.
    pub fn arity(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Coord(i) => i + 1,
            Expr::Unary(_, a) | Expr::Pow(a, _) => a.arity(),
            Expr::Binary(_, a, b) => a.arity().max(b.arity()),
        }
    }

    /// Evaluate over pre-built coordinate jets.
    pub fn eval_jets(&self, coords: &[Jet]) -> Result<Jet> {
        Ok(match self {
            Expr::Const(v) => Jet::constant(*v),
            Expr::Coord(i) => coords
                .get(*i)
                .cloned()
                .ok_or_else(|| GeomError::Domain(format!("coordinate x{} not available", i + 1)))?,
            Expr::Unary(f, a) => {
                let a = a.eval_jets(coords)?;
                match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Exp => a.exp(),
                    Func::Log => a.ln()?,
                    Func::Sqrt => a.sqrt()?,
                    Func::Neg => -a,
                }
            }
            Expr::Binary(op, a, b) => {
                let (a, b) = (a.eval_jets(coords)?, b.eval_jets(coords)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a.checked_div(&b)?,
                }
            }
            Expr::Pow(a, r) => a.eval_jets(coords)?.powf(r.as_f64())?,
        })
    }

    pub fn eval_f64(&self, x: &[f64]) -> Result<f64> {
        Ok(match self {
            Expr::Const(v) => *v,
            Expr::Coord(i) => {
                *x.get(*i).ok_or_else(|| GeomError::Domain(format!("coordinate x{} not available", i + 1)))?
            }
            Expr::Unary(f, a) => {
                let v = a.eval_f64(x)?;
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                    Func::Log if v > 0.0 => v.ln(),
                    Func::Sqrt if v >= 0.0 => v.sqrt(),
                    Func::Neg => -v,
                    _ => return Err(GeomError::DegenerateValue(format!("{f:?} of {v}"))),
                }
            }
            Expr::Binary(op, a, b) => {
                let (a, b) = (a.eval_f64(x)?, b.eval_f64(x)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div if b != 0.0 => a / b,
                    BinOp::Div => return Err(GeomError::DegenerateValue("division by zero".into())),
                }
            }
            Expr::Pow(a, r) => {
                let v = a.eval_f64(x)?;
                if r.den == 1 {
                    if v == 0.0 && r.num < 0 {
                        return Err(GeomError::DegenerateValue("0 to a negative power".into()));
                    }
                    v.powi(r.num as i32)
                } else if v > 0.0 {
                    v.powf(r.as_f64())
                } else {
                    return Err(GeomError::DegenerateValue(format!("{v} to a fractional power")));
                }
            }
        })
    }
}

/// Evaluate `ast` at `p` as a jet of the given order (1 to 3).
pub fn eval_expr(ast: &Expr, p: &ChartPoint, order: u8) -> Result<Jet> {
    if !(1..=3).contains(&order) {
        return Err(GeomError::Domain(format!("jet order must be 1, 2 or 3, got {order}")));
    }
    ast.eval_jets(&Jet::coordinates(&p.coords, order))
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(v) if *v == std::f64::consts::PI => write!(f, "pi"),
            Expr::Const(v) if *v < 0.0 => write!(f, "({v})"),
            Expr::Const(v) => write!(f, "{v}"),
            Expr::Coord(i) => write!(f, "x{}", i + 1),
            Expr::Unary(Func::Neg, a) => write!(f, "-({a})"),
            Expr::Unary(func, a) => {
                let name = match func {
                    Func::Sin => "sin",
                    Func::Cos => "cos",
                    Func::Exp => "exp",
                    Func::Log => "log",
                    Func::Sqrt => "sqrt",
                    Func::Neg => unreachable!(),
                };
                write!(f, "{name}({a})")
            }
            Expr::Binary(op, a, b) => {
                let s = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                };
                write!(f, "({a} {s} {b})")
            }
            Expr::Pow(a, r) => {
                match a.as_ref() {
                    Expr::Coord(_) | Expr::Binary(..) => write!(f, "{a}")?,
                    Expr::Const(v) if *v >= 0.0 => write!(f, "{a}")?,
                    _ => write!(f, "({a})")?,
                }
                if r.den == 1 && r.num >= 0 {
                    write!(f, "^{}", r.num)
                } else if r.den == 1 {
                    write!(f, "^({})", r.num)
                } else {
                    write!(f, "^({}/{})", r.num, r.den)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn division_root_for_sphere_factor() {
        let e = parse("4/(1+x1^2+x2^2)^2", 2).unwrap();
        assert!(matches!(e, Expr::Binary(BinOp::Div, _, _)));
        let v = e.eval_f64(&[0.0, 0.0]).unwrap();
        assert_eq!(v, 4.0);
    }

    #[test]
    fn sin_pi_is_zero() {
        let e = parse("sin(pi)", 1).unwrap();
        assert!(e.eval_f64(&[0.0]).unwrap().abs() < 1e-15);
    }

    #[test]
    fn coordinate_out_of_range() {
        let err = parse("x3", 2).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::IndexOutOfRange { index: 3, dim: 2 });
        assert_eq!(err.offset, 0);
        let err = parse("x1 + x0", 2).unwrap_err();
        assert_eq!(err.offset, 5);
    }

    #[test]
    fn syntax_errors_report_offsets() {
        assert_eq!(parse("1 + * 2", 1).unwrap_err().offset, 4);
        assert_eq!(parse("(1 + 2", 1).unwrap_err().kind, ParseErrorKind::UnexpectedEnd);
        assert_eq!(parse("foo(1)", 1).unwrap_err().kind, ParseErrorKind::UnknownIdentifier("foo".into()));
        assert_eq!(parse("1 $ 2", 1).unwrap_err(), ParseError { offset: 2, kind: ParseErrorKind::UnexpectedChar('$') });
        assert_eq!(parse("   ", 1).unwrap_err().kind, ParseErrorKind::Empty);
        assert!(matches!(parse("x1^x1", 1).unwrap_err().kind, ParseErrorKind::InvalidExponent(_)));
        assert!(matches!(parse("x1^2^3", 1).unwrap_err().kind, ParseErrorKind::InvalidExponent(_)));
        assert!(matches!(parse("x1^(1/0)", 1).unwrap_err().kind, ParseErrorKind::InvalidExponent(_)));
    }

    #[test]
    fn precedence() {
        let e = parse("-x1^2", 1).unwrap();
        assert_eq!(e.eval_f64(&[3.0]).unwrap(), -9.0);
        let e = parse("2*-x1 + 6/3/2", 1).unwrap();
        assert_eq!(e.eval_f64(&[1.0]).unwrap(), -1.0);
        let e = parse("x1^(-3/2)", 1).unwrap();
        assert!((e.eval_f64(&[4.0]).unwrap() - 0.125).abs() < 1e-15);
        let e = parse("x1^0.5", 1).unwrap();
        assert_eq!(e, Expr::Pow(Box::new(Expr::Coord(0)), Rational { num: 1, den: 2 }));
    }

    #[test]
    fn jets_from_expressions() {
        let p = ChartPoint::new(vec![2.0, 3.0]);
        let j = eval_expr(&parse("x1*x2", 2).unwrap(), &p, 2).unwrap();
        assert_eq!((j.value(), j.d2(0, 1)), (6.0, 1.0));
        let p = ChartPoint::new(vec![1.0, 1.0]);
        let j = eval_expr(&parse("1/(x1^2+x2^2)", 2).unwrap(), &p, 3).unwrap();
        assert_eq!(j.value(), 0.5);
        assert!((j.d1(0) + 0.5).abs() < 1e-15 && (j.d1(1) + 0.5).abs() < 1e-15);
        assert!(eval_expr(&parse("x1", 1).unwrap(), &ChartPoint::new(vec![0.0]), 0).is_err());
        assert!(matches!(
            eval_expr(&parse("1/x1", 1).unwrap(), &ChartPoint::new(vec![0.0]), 1),
            Err(GeomError::DegenerateValue(_))
        ));
    }

    #[test]
    fn orders_agree_on_shared_slots() {
        let e = parse("exp(sin(x1)*x2) / sqrt(1 + x1^2) - log(2 + cos(x2))", 2).unwrap();
        let p = ChartPoint::new(vec![0.3, -0.7]);
        let a = eval_expr(&e, &p, 1).unwrap();
        let b = eval_expr(&e, &p, 3).unwrap();
        assert_eq!(a.value(), b.value());
        assert_eq!(a.grad(), b.grad());
    }

    fn arb_expr(dim: usize) -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            (0.0f64..100.0).prop_map(Expr::Const),
            Just(Expr::Const(std::f64::consts::PI)),
            (0..dim).prop_map(Expr::Coord),
        ];
        leaf.prop_recursive(4, 32, 2, |inner| {
            prop_oneof![
                (
                    inner.clone(),
                    prop_oneof![
                        Just(Func::Sin),
                        Just(Func::Cos),
                        Just(Func::Exp),
                        Just(Func::Log),
                        Just(Func::Sqrt),
                        Just(Func::Neg)
                    ]
                )
                    .prop_map(|(e, f)| Expr::Unary(f, Box::new(e))),
                (
                    inner.clone(),
                    inner.clone(),
                    prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul), Just(BinOp::Div)]
                )
                    .prop_map(|(a, b, op)| Expr::Binary(op, Box::new(a), Box::new(b))),
                (inner, -4i64..5, 1i64..4).prop_map(|(e, n, d)| Expr::Pow(Box::new(e), Rational::new(n, d).unwrap())),
            ]
        })
    }

    proptest! {
        #[test]
        fn pretty_print_round_trips(e in arb_expr(3)) {
            let printed = e.to_string();
            let reparsed = parse(&printed, 3).unwrap();
            prop_assert_eq!(reparsed, e);
        }
    }
}
