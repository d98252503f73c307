//! Recursive-descent parser for series, coefficient, and differential
//! polynomial expressions, plus the small config literals (value groups,
//! c-maps, group elements).
//!
//! Grammar sketch:
//!   expr   := ['-'] term (('+'|'-') term)*
//!   term   := factor (('*'|'/') factor)*
//!   factor := INT | 'x' | Y-var | 't' ['^' group] | 'O(' 't^' group ')'
//!          | '(' expr ')' | factor '^' sint
//!   group  := sint ['/' INT] | '(' sint (',' sint)* ')' | '(' sint '/' INT ')'
//! Exponents after `t^` are group-element literals, parsed greedily: `t^3/2`
//! is t^(3/2); write `(t^3)/2` for the quotient.

use crate::cmap::{AdditiveMap, CMapError};
use crate::coeff::{Coeff, CoeffField};
use crate::dhensel::DiffPoly;
use crate::group::{GroupElement, ValueGroup};
use crate::hahn::{FieldSpec, HahnError, Series};
use crate::linop::LinearDiffOperator;
use crate::poly::Rat;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("parse error at line {line}, column {col}: expected {expected}, found {found}")]
    Unexpected {
        line: usize,
        col: usize,
        expected: String,
        found: String,
    },
    #[error("invalid character '{ch}' at line {line}, column {col}")]
    BadChar { ch: char, line: usize, col: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Hahn(#[from] HahnError),
    #[error(transparent)]
    CMap(#[from] CMapError),
    #[error("the variable x is not available over the field Q")]
    NoXOverQ,
    #[error("exponent {0} does not lie in the value group {1}")]
    ExponentOutsideGroup(String, String),
    #[error("expression involves Y, not a plain series")]
    NotASeries,
    #[error("expression involves t or Y, not a coefficient")]
    NotACoefficient,
    #[error("operator expression must be linear in Y with coefficients in k: {0}")]
    NotAnOperator(String),
    #[error("division by a Y-dependent expression")]
    DivisionByPolynomial,
    #[error("negative power of a Y-dependent expression")]
    NegativePolynomialPower,
    #[error("bad config literal: {0}")]
    Config(String),
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    X,
    T,
    BigO,
    Y(u32),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(n) => write!(f, "{}", n),
            Tok::X => write!(f, "x"),
            Tok::T => write!(f, "t"),
            Tok::BigO => write!(f, "O"),
            Tok::Y(k) => write!(f, "Y{}", "'".repeat(*k as usize)),
            Tok::Plus => write!(f, "+"),
            Tok::Minus => write!(f, "-"),
            Tok::Star => write!(f, "*"),
            Tok::Slash => write!(f, "/"),
            Tok::Caret => write!(f, "^"),
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
            Tok::Comma => write!(f, ","),
            Tok::End => write!(f, "end of input"),
        }
    }
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

fn lex(text: &str) -> Result<Lexer, ParseError> {
    let mut toks = Vec::new();
    let mut line = 1usize;
    let mut col = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&ch) = chars.peek() {
        let (l, c) = (line, col);
        match ch {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            ' ' | '\t' | '\r' => {
                chars.next();
                col += 1;
            }
            '0'..='9' => {
                let mut s = String::new();
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        s.push(d);
                        chars.next();
                        col += 1;
                    } else {
                        break;
                    }
                }
                toks.push((Tok::Int(s.parse().unwrap()), l, c));
            }
            'x' => {
                chars.next();
                col += 1;
                toks.push((Tok::X, l, c));
            }
            't' => {
                chars.next();
                col += 1;
                toks.push((Tok::T, l, c));
            }
            'O' => {
                chars.next();
                col += 1;
                toks.push((Tok::BigO, l, c));
            }
            'Y' => {
                chars.next();
                col += 1;
                let mut primes = 0u32;
                while chars.peek() == Some(&'\'') {
                    chars.next();
                    col += 1;
                    primes += 1;
                }
                toks.push((Tok::Y(primes), l, c));
            }
            '+' => {
                chars.next();
                col += 1;
                toks.push((Tok::Plus, l, c));
            }
            '-' => {
                chars.next();
                col += 1;
                toks.push((Tok::Minus, l, c));
            }
            '*' => {
                chars.next();
                col += 1;
                toks.push((Tok::Star, l, c));
            }
            '/' => {
                chars.next();
                col += 1;
                toks.push((Tok::Slash, l, c));
            }
            '^' => {
                chars.next();
                col += 1;
                toks.push((Tok::Caret, l, c));
            }
            '(' => {
                chars.next();
                col += 1;
                toks.push((Tok::LParen, l, c));
            }
            ')' => {
                chars.next();
                col += 1;
                toks.push((Tok::RParen, l, c));
            }
            ',' => {
                chars.next();
                col += 1;
                toks.push((Tok::Comma, l, c));
            }
            other => {
                return Err(ParseError::BadChar {
                    ch: other,
                    line,
                    col,
                })
            }
        }
    }
    toks.push((Tok::End, line, col));
    Ok(Lexer { toks, pos: 0 })
}

impl Lexer {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek2(&self) -> &Tok {
        let i = (self.pos + 1).min(self.toks.len() - 1);
        &self.toks[i].0
    }

    fn here(&self) -> (usize, usize) {
        let (_, l, c) = self.toks[self.pos];
        (l, c)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: &Tok, expected: &str) -> Result<(), ParseError> {
        if self.peek() == want {
            self.bump();
            Ok(())
        } else {
            let (line, col) = self.here();
            Err(ParseError::Unexpected {
                line,
                col,
                expected: expected.to_string(),
                found: self.peek().to_string(),
            })
        }
    }
}

// ---------------------------------------------------------------------------
// AST
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MulOp {
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedExpression {
    pub terms: Vec<(Sign, ParsedTerm)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTerm {
    pub factors: Vec<(MulOp, ParsedFactor)>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParsedFactor {
    Int(BigInt),
    X,
    YVar(u32),
    /// t with an optional exponent literal; None prints as bare `t`.
    TPow(Option<GroupLiteral>),
    BigO(GroupLiteral),
    Paren(Box<ParsedExpression>),
    Pow(Box<ParsedFactor>, BigInt),
}

#[derive(Debug, Clone, PartialEq)]
pub enum GroupLiteral {
    Int(BigInt),
    Frac(BigInt, BigInt),
    Tuple(Vec<BigInt>),
}

pub fn parse_expression(text: &str) -> Result<ParsedExpression, ParseError> {
    let mut lx = lex(text)?;
    let e = parse_expr(&mut lx)?;
    if lx.peek() != &Tok::End {
        let (line, col) = lx.here();
        return Err(ParseError::Unexpected {
            line,
            col,
            expected: "end of input".to_string(),
            found: lx.peek().to_string(),
        });
    }
    Ok(e)
}

fn parse_expr(lx: &mut Lexer) -> Result<ParsedExpression, ParseError> {
    let mut terms = Vec::new();
    let first_sign = if lx.peek() == &Tok::Minus {
        lx.bump();
        Sign::Minus
    } else {
        Sign::Plus
    };
    terms.push((first_sign, parse_term(lx)?));
    loop {
        match lx.peek() {
            Tok::Plus => {
                lx.bump();
                terms.push((Sign::Plus, parse_term(lx)?));
            }
            Tok::Minus => {
                lx.bump();
                terms.push((Sign::Minus, parse_term(lx)?));
            }
            _ => break,
        }
    }
    Ok(ParsedExpression { terms })
}

fn parse_term(lx: &mut Lexer) -> Result<ParsedTerm, ParseError> {
    let mut factors = vec![(MulOp::Mul, parse_factor(lx)?)];
    loop {
        match lx.peek() {
            Tok::Star => {
                lx.bump();
                factors.push((MulOp::Mul, parse_factor(lx)?));
            }
            Tok::Slash => {
                lx.bump();
                factors.push((MulOp::Div, parse_factor(lx)?));
            }
            _ => break,
        }
    }
    Ok(ParsedTerm { factors })
}

fn parse_factor(lx: &mut Lexer) -> Result<ParsedFactor, ParseError> {
    let (line, col) = lx.here();
    let base = match lx.peek().clone() {
        Tok::Int(n) => {
            lx.bump();
            ParsedFactor::Int(n)
        }
        Tok::X => {
            lx.bump();
            ParsedFactor::X
        }
        Tok::Y(k) => {
            lx.bump();
            ParsedFactor::YVar(k)
        }
        Tok::T => {
            lx.bump();
            if lx.peek() == &Tok::Caret {
                lx.bump();
                let g = parse_group_literal(lx)?;
                ParsedFactor::TPow(Some(g))
            } else {
                ParsedFactor::TPow(None)
            }
        }
        Tok::BigO => {
            lx.bump();
            lx.expect(&Tok::LParen, "'('")?;
            lx.expect(&Tok::T, "'t'")?;
            lx.expect(&Tok::Caret, "'^'")?;
            let g = parse_group_literal(lx)?;
            lx.expect(&Tok::RParen, "')'")?;
            ParsedFactor::BigO(g)
        }
        Tok::LParen => {
            lx.bump();
            let inner = parse_expr(lx)?;
            lx.expect(&Tok::RParen, "')'")?;
            ParsedFactor::Paren(Box::new(inner))
        }
        other => {
            return Err(ParseError::Unexpected {
                line,
                col,
                expected: "a number, x, Y, t, O(...), or '('".to_string(),
                found: other.to_string(),
            })
        }
    };
    // exponentiation binds to the factor; `t^...` already consumed its literal
    if lx.peek() == &Tok::Caret && !matches!(base, ParsedFactor::TPow(_) | ParsedFactor::BigO(_)) {
        lx.bump();
        let neg = if lx.peek() == &Tok::Minus {
            lx.bump();
            true
        } else {
            false
        };
        match lx.peek().clone() {
            Tok::Int(n) => {
                lx.bump();
                let e = if neg { -n } else { n };
                return Ok(ParsedFactor::Pow(Box::new(base), e));
            }
            other => {
                let (line, col) = lx.here();
                return Err(ParseError::Unexpected {
                    line,
                    col,
                    expected: "an integer exponent".to_string(),
                    found: other.to_string(),
                });
            }
        }
    }
    Ok(base)
}

/// Group-element literal after `t^`: `5`, `-2`, `3/2`, `(1/2)`, `(1,-2,0)`.
/// A `/` is consumed only when an integer follows, so `t^2/x` divides.
fn parse_group_literal(lx: &mut Lexer) -> Result<GroupLiteral, ParseError> {
    let (line, col) = lx.here();
    match lx.peek().clone() {
        Tok::Minus => {
            lx.bump();
            match lx.bump() {
                Tok::Int(n) => finish_frac(lx, -n),
                other => Err(ParseError::Unexpected {
                    line,
                    col,
                    expected: "an integer".to_string(),
                    found: other.to_string(),
                }),
            }
        }
        Tok::Int(n) => {
            lx.bump();
            finish_frac(lx, n)
        }
        Tok::LParen => {
            lx.bump();
            let mut entries = Vec::new();
            let first = parse_signed_int(lx)?;
            if lx.peek() == &Tok::Slash {
                lx.bump();
                let den = parse_signed_int(lx)?;
                lx.expect(&Tok::RParen, "')'")?;
                return Ok(GroupLiteral::Frac(first, den));
            }
            entries.push(first);
            while lx.peek() == &Tok::Comma {
                lx.bump();
                entries.push(parse_signed_int(lx)?);
            }
            lx.expect(&Tok::RParen, "')'")?;
            if entries.len() == 1 {
                Ok(GroupLiteral::Int(entries.pop().unwrap()))
            } else {
                Ok(GroupLiteral::Tuple(entries))
            }
        }
        other => Err(ParseError::Unexpected {
            line,
            col,
            expected: "a group element literal".to_string(),
            found: other.to_string(),
        }),
    }
}

fn finish_frac(lx: &mut Lexer, numer: BigInt) -> Result<GroupLiteral, ParseError> {
    if lx.peek() == &Tok::Slash {
        if let Tok::Int(_) = lx.peek2() {
            lx.bump();
            if let Tok::Int(d) = lx.bump() {
                return Ok(GroupLiteral::Frac(numer, d));
            }
            unreachable!();
        }
    }
    Ok(GroupLiteral::Int(numer))
}

fn parse_signed_int(lx: &mut Lexer) -> Result<BigInt, ParseError> {
    let (line, col) = lx.here();
    let neg = if lx.peek() == &Tok::Minus {
        lx.bump();
        true
    } else {
        false
    };
    match lx.bump() {
        Tok::Int(n) => Ok(if neg { -n } else { n }),
        other => Err(ParseError::Unexpected {
            line,
            col,
            expected: "an integer".to_string(),
            found: other.to_string(),
        }),
    }
}

// ---------------------------------------------------------------------------
// Printer (faithful to the tree, reparses to an equal tree)
// ---------------------------------------------------------------------------

impl fmt::Display for ParsedExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (sign, term)) in self.terms.iter().enumerate() {
            if i == 0 {
                if *sign == Sign::Minus {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if *sign == Sign::Minus { "-" } else { "+" })?;
            }
            write!(f, "{}", term)?;
        }
        Ok(())
    }
}

impl fmt::Display for ParsedTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (op, factor)) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "{}", if *op == MulOp::Div { "/" } else { "*" })?;
            }
            write!(f, "{}", factor)?;
        }
        Ok(())
    }
}

impl fmt::Display for ParsedFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParsedFactor::Int(n) => write!(f, "{}", n),
            ParsedFactor::X => write!(f, "x"),
            ParsedFactor::YVar(k) => write!(f, "Y{}", "'".repeat(*k as usize)),
            // integer exponents print parenthesized so a following /INT is
            // not re-read as a fraction exponent; the tree reparses unchanged
            ParsedFactor::TPow(None) => write!(f, "t"),
            ParsedFactor::TPow(Some(GroupLiteral::Int(n))) => write!(f, "t^({})", n),
            ParsedFactor::TPow(Some(g)) => write!(f, "t^{}", g),
            ParsedFactor::BigO(GroupLiteral::Int(n)) => write!(f, "O(t^({}))", n),
            ParsedFactor::BigO(g) => write!(f, "O(t^{})", g),
            ParsedFactor::Paren(e) => write!(f, "({})", e),
            ParsedFactor::Pow(b, e) => {
                if e.is_negative() {
                    write!(f, "{}^-{}", b, e.magnitude())
                } else {
                    write!(f, "{}^{}", b, e)
                }
            }
        }
    }
}

impl fmt::Display for GroupLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupLiteral::Int(n) => write!(f, "{}", n),
            GroupLiteral::Frac(p, q) => write!(f, "({}/{})", p, q),
            GroupLiteral::Tuple(v) => {
                write!(f, "(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}", x)?;
                }
                write!(f, ")")
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Evaluation into differential polynomials and series
// ---------------------------------------------------------------------------

fn group_element_from_literal(
    g: &GroupLiteral,
    group: ValueGroup,
) -> Result<GroupElement, EvalError> {
    let elem = match (g, group) {
        (GroupLiteral::Int(n), ValueGroup::Z) => GroupElement::Int(n.clone()),
        (GroupLiteral::Int(n), ValueGroup::Q | ValueGroup::FracZ(_)) => {
            GroupElement::Rat(Rat::from_integer(n.clone()))
        }
        (GroupLiteral::Frac(p, q), ValueGroup::Q | ValueGroup::FracZ(_)) if !q.is_zero() => {
            GroupElement::Rat(Rat::new(p.clone(), q.clone()))
        }
        (GroupLiteral::Tuple(v), ValueGroup::ZnLex(_)) => GroupElement::Tuple(v.clone()),
        _ => {
            return Err(EvalError::ExponentOutsideGroup(
                g.to_string(),
                group.name(),
            ))
        }
    };
    if !group.admits(&elem) {
        return Err(EvalError::ExponentOutsideGroup(g.to_string(), group.name()));
    }
    Ok(elem)
}

fn eval_factor(f: &ParsedFactor, spec: &FieldSpec) -> Result<DiffPoly, EvalError> {
    match f {
        ParsedFactor::Int(n) => Ok(DiffPoly::constant(
            spec.from_coeff(Coeff::from_rat(Rat::from_integer(n.clone()))),
        )),
        ParsedFactor::X => {
            if spec.coeff == CoeffField::Q {
                return Err(EvalError::NoXOverQ);
            }
            Ok(DiffPoly::constant(spec.from_coeff(Coeff::x())))
        }
        ParsedFactor::YVar(k) => Ok(DiffPoly::variable(spec, *k)),
        ParsedFactor::TPow(g) => {
            let gamma = match g {
                None => one_exponent(spec.group),
                Some(lit) => group_element_from_literal(lit, spec.group)?,
            };
            Ok(DiffPoly::constant(spec.cross_section(&gamma)))
        }
        ParsedFactor::BigO(g) => {
            let gamma = group_element_from_literal(g, spec.group)?;
            Ok(DiffPoly::constant(spec.big_o(gamma)))
        }
        ParsedFactor::Paren(e) => eval_expr(e, spec),
        ParsedFactor::Pow(base, e) => {
            let b = eval_factor(base, spec)?;
            let mag: u32 = e.magnitude().try_into().map_err(|_| {
                EvalError::Config("exponent too large".to_string())
            })?;
            if e.is_negative() {
                let series = as_series(&b).ok_or(EvalError::NegativePolynomialPower)?;
                let inv = spec.invert(&series)?;
                Ok(DiffPoly::constant(spec.pow(&inv, mag)))
            } else {
                let mut acc = DiffPoly::constant(spec.one());
                for _ in 0..mag {
                    acc = acc.mul(spec, &b);
                }
                Ok(acc)
            }
        }
    }
}

fn one_exponent(group: ValueGroup) -> GroupElement {
    match group {
        ValueGroup::Z => GroupElement::Int(BigInt::one()),
        ValueGroup::Q | ValueGroup::FracZ(_) => GroupElement::Rat(Rat::one()),
        ValueGroup::ZnLex(n) => {
            let mut v = vec![BigInt::zero(); n];
            v[0] = BigInt::one();
            GroupElement::Tuple(v)
        }
    }
}

fn as_series(p: &DiffPoly) -> Option<Series> {
    if p.is_zero() {
        return Some(Series::exact_zero());
    }
    if p.total_degree() == 0 {
        return p.coefficient(&vec![]).cloned();
    }
    None
}

fn eval_term(t: &ParsedTerm, spec: &FieldSpec) -> Result<DiffPoly, EvalError> {
    let mut acc: Option<DiffPoly> = None;
    for (op, f) in &t.factors {
        let v = eval_factor(f, spec)?;
        acc = Some(match acc {
            None => match op {
                MulOp::Mul => v,
                MulOp::Div => unreachable!("first factor is multiplied"),
            },
            Some(a) => match op {
                MulOp::Mul => a.mul(spec, &v),
                MulOp::Div => {
                    let series = as_series(&v).ok_or(EvalError::DivisionByPolynomial)?;
                    let inv = spec.invert(&series)?;
                    a.mul(spec, &DiffPoly::constant(inv))
                }
            },
        });
    }
    Ok(acc.expect("terms have at least one factor"))
}

fn eval_expr(e: &ParsedExpression, spec: &FieldSpec) -> Result<DiffPoly, EvalError> {
    let mut acc = DiffPoly::constant(spec.zero());
    for (sign, term) in &e.terms {
        let v = eval_term(term, spec)?;
        let v = if *sign == Sign::Minus { v.neg(spec) } else { v };
        acc = acc.add(spec, &v);
    }
    Ok(acc)
}

/// Full evaluation to a differential polynomial.
pub fn eval_diffpoly(text: &str, spec: &FieldSpec) -> Result<DiffPoly, EvalError> {
    let e = parse_expression(text)?;
    eval_expr(&e, spec)
}

/// Evaluation to a series; Y must not occur.
pub fn eval_series(text: &str, spec: &FieldSpec) -> Result<Series, EvalError> {
    let p = eval_diffpoly(text, spec)?;
    as_series(&p).ok_or(EvalError::NotASeries)
}

/// Evaluation to a coefficient-field element; t and Y must not occur.
pub fn eval_coeff(text: &str, spec: &FieldSpec) -> Result<Coeff, EvalError> {
    let s = eval_series(text, spec)?;
    if s.is_exact_zero() {
        return Ok(Coeff::zero());
    }
    if s.truncation().is_some() || s.terms().len() != 1 || !s.terms()[0].0.is_zero() {
        return Err(EvalError::NotACoefficient);
    }
    Ok(s.terms()[0].1.clone())
}

/// Evaluation to a linear operator: homogeneous of degree 1 in Y with
/// coefficients in the coefficient field.
pub fn eval_operator(text: &str, spec: &FieldSpec) -> Result<LinearDiffOperator, EvalError> {
    let p = eval_diffpoly(text, spec)?;
    let mut coeffs: Vec<Coeff> = Vec::new();
    for (m, c) in p.terms() {
        if crate::dhensel::total_degree(m) != 1 {
            return Err(EvalError::NotAnOperator(format!(
                "monomial of degree {} present",
                crate::dhensel::total_degree(m)
            )));
        }
        let i = m.iter().position(|&e| e == 1).unwrap();
        if c.truncation().is_some() || c.terms().len() != 1 || !c.terms()[0].0.is_zero() {
            return Err(EvalError::NotAnOperator(
                "coefficient is not in k".to_string(),
            ));
        }
        if coeffs.len() <= i {
            coeffs.resize(i + 1, Coeff::zero());
        }
        coeffs[i] = c.terms()[0].1.clone();
    }
    let op = LinearDiffOperator::new(coeffs);
    if op.is_zero() {
        return Err(EvalError::NotAnOperator("zero operator".to_string()));
    }
    Ok(op)
}

// ---------------------------------------------------------------------------
// Config literals
// ---------------------------------------------------------------------------

/// `Z`, `Q`, `Z/2`, `Z^3lex`.
pub fn parse_value_group(text: &str) -> Result<ValueGroup, EvalError> {
    let t = text.trim();
    if t == "Z" {
        return Ok(ValueGroup::Z);
    }
    if t == "Q" {
        return Ok(ValueGroup::Q);
    }
    if let Some(rest) = t.strip_prefix("Z/") {
        let d: u64 = rest
            .parse()
            .map_err(|_| EvalError::Config(format!("bad denominator in {}", text)))?;
        if d == 0 {
            return Err(EvalError::Config("denominator must be >= 1".to_string()));
        }
        return Ok(ValueGroup::FracZ(d));
    }
    if let Some(rest) = t.strip_prefix("Z^") {
        if let Some(n) = rest.strip_suffix("lex") {
            let n: usize = n
                .parse()
                .map_err(|_| EvalError::Config(format!("bad rank in {}", text)))?;
            if n == 0 {
                return Err(EvalError::Config("rank must be >= 1".to_string()));
            }
            return Ok(ValueGroup::ZnLex(n));
        }
    }
    Err(EvalError::Config(format!(
        "unknown value group '{}': expected Z, Q, Z/d, or Z^nlex",
        text
    )))
}

/// `Q` or `Qx`.
pub fn parse_coeff_field(text: &str) -> Result<CoeffField, EvalError> {
    match text.trim() {
        "Q" => Ok(CoeffField::Q),
        "Qx" => Ok(CoeffField::Qx),
        other => Err(EvalError::Config(format!(
            "unknown coefficient field '{}': expected Q or Qx",
            other
        ))),
    }
}

/// A group element literal on its own: `5`, `3/2`, `(1,-2,0)`.
pub fn parse_group_element(text: &str, group: ValueGroup) -> Result<GroupElement, EvalError> {
    let mut lx = lex(text)?;
    let lit = parse_group_literal(&mut lx)?;
    if lx.peek() != &Tok::End {
        let (line, col) = lx.here();
        return Err(ParseError::Unexpected {
            line,
            col,
            expected: "end of input".to_string(),
            found: lx.peek().to_string(),
        }
        .into());
    }
    group_element_from_literal(&lit, group)
}

/// c-map literals: `0`, `1 -> x`, `1/2 -> 1/(2*x)`, `e1 -> 1, e2 -> 1/x`.
pub fn parse_cmap(
    text: &str,
    group: ValueGroup,
    field: CoeffField,
    coeff_spec: &FieldSpec,
) -> Result<AdditiveMap, EvalError> {
    let t = text.trim();
    let t = t.strip_prefix("c:").map(str::trim).unwrap_or(t);
    if t == "0" {
        return Ok(AdditiveMap::zero_map(group, field));
    }
    let generators = group.generators();
    let mut images = vec![Coeff::zero(); generators.len()];
    let mut seen = vec![false; generators.len()];
    for part in t.split(',') {
        let Some((lhs, rhs)) = part.split_once("->") else {
            return Err(EvalError::Config(format!(
                "c-map entry '{}' is missing '->'",
                part.trim()
            )));
        };
        let lhs = lhs.trim();
        let idx = match group {
            ValueGroup::ZnLex(n) => {
                let Some(k) = lhs.strip_prefix('e') else {
                    return Err(EvalError::Config(format!(
                        "c-map generator '{}' should be e1..e{}",
                        lhs, n
                    )));
                };
                let k: usize = k
                    .parse()
                    .map_err(|_| EvalError::Config(format!("bad generator '{}'", lhs)))?;
                if k == 0 || k > n {
                    return Err(EvalError::Config(format!(
                        "generator index {} out of range 1..{}",
                        k, n
                    )));
                }
                k - 1
            }
            ValueGroup::Z | ValueGroup::Q => {
                if lhs != "1" {
                    return Err(EvalError::Config(format!(
                        "c-map generator '{}' should be 1",
                        lhs
                    )));
                }
                0
            }
            ValueGroup::FracZ(d) => {
                let expected = format!("1/{}", d);
                if lhs != expected && lhs != "1" {
                    return Err(EvalError::Config(format!(
                        "c-map generator '{}' should be {}",
                        lhs, expected
                    )));
                }
                0
            }
        };
        if seen[idx] {
            return Err(EvalError::Config(format!(
                "generator '{}' assigned twice",
                lhs
            )));
        }
        seen[idx] = true;
        images[idx] = eval_coeff(rhs.trim(), coeff_spec)?;
    }
    Ok(AdditiveMap::new(group, field, images)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cmap::AdditiveMap;
    use crate::hahn::Valuation;

    fn spec(field: CoeffField, group: ValueGroup) -> FieldSpec {
        let cmap = AdditiveMap::zero_map(group, field);
        let bound = match group {
            ValueGroup::ZnLex(n) => {
                let mut v = vec![0i64; n];
                v[0] = 8;
                GroupElement::tuple(&v)
            }
            ValueGroup::Z => GroupElement::int(8),
            _ => GroupElement::rat(8, 1),
        };
        FieldSpec::new(&cmap, bound)
    }

    #[test]
    fn series_with_half_exponent_and_truncation() {
        let k = spec(CoeffField::Qx, ValueGroup::FracZ(2));
        let s = eval_series("x*t^(1/2) + t^3 + O(t^5)", &k).unwrap();
        assert_eq!(s.terms().len(), 2);
        assert_eq!(s.truncation(), Some(&GroupElement::rat(5, 1)));
        assert_eq!(
            k.valuation(&s),
            Valuation::Finite(GroupElement::rat(1, 2))
        );
    }

    #[test]
    fn diffpoly_parse() {
        let k = spec(CoeffField::Qx, ValueGroup::Z);
        let p = eval_diffpoly("(1+t)*Y' + x*Y - t", &k).unwrap();
        assert_eq!(p.order(), 1);
        assert_eq!(p.total_degree(), 1);
        let red = p.reduce(&k).unwrap();
        assert_eq!(red.total_degree(), 1);
    }

    #[test]
    fn parse_error_position() {
        match parse_expression("t^") {
            Err(ParseError::Unexpected { col, .. }) => assert_eq!(col, 3),
            other => panic!("expected error, got {:?}", other),
        }
    }

    #[test]
    fn greedy_exponent_fraction() {
        // t^3/2 is t^(3/2); t^2/x is (t^2)/x
        let k = spec(CoeffField::Qx, ValueGroup::FracZ(2));
        let a = eval_series("t^3/2", &k).unwrap();
        assert_eq!(k.valuation(&a), Valuation::Finite(GroupElement::rat(3, 2)));
        let b = eval_series("t^2/x", &k).unwrap();
        assert_eq!(b.terms().len(), 1);
        assert_eq!(b.terms()[0].1, Coeff::new(
            crate::poly::Poly::one(),
            crate::poly::Poly::x(),
        ));
    }

    #[test]
    fn roundtrip_print_parse() {
        let cases = [
            "x*t^(1/2) + t^3 + O(t^5)",
            "(1+t)*Y' + x*Y - t",
            "1/(1-t)",
            "-t + 2",
            "t^-1",
            "(x^2+1)/(2*x)",
            "Y''^2 - Y*Y'",
            "O(t^4)",
            "t^(1,-2)",
            "3/4*t^2",
        ];
        for c in cases {
            let e1 = parse_expression(c).unwrap();
            let printed = e1.to_string();
            let e2 = parse_expression(&printed).unwrap();
            assert_eq!(e1, e2, "case {} printed as {}", c, printed);
        }
    }

    #[test]
    fn division_and_inverse() {
        let k = spec(CoeffField::Q, ValueGroup::Z);
        let s = eval_series("1/(1-t) ", &k).unwrap();
        // default bound 8 applies
        assert_eq!(s.terms().len(), 8);
        assert!(s.truncation().is_some());
    }

    #[test]
    fn coeff_rejects_t() {
        let k = spec(CoeffField::Qx, ValueGroup::Z);
        assert!(matches!(
            eval_coeff("1 + t", &k),
            Err(EvalError::NotACoefficient)
        ));
        assert_eq!(eval_coeff("(x^2+1)/(2*x)", &k).unwrap().to_string(), "(x^2+1)/(2*x)");
    }

    #[test]
    fn operator_extraction() {
        let k = spec(CoeffField::Qx, ValueGroup::Z);
        let op = eval_operator("Y' - Y", &k).unwrap();
        assert_eq!(op.coeffs(), &[Coeff::from_int(-1), Coeff::one()]);
        assert!(eval_operator("Y*Y'", &k).is_err());
        assert!(eval_operator("Y' + t*Y", &k).is_err());
    }

    #[test]
    fn config_literals() {
        assert_eq!(parse_value_group("Z").unwrap(), ValueGroup::Z);
        assert_eq!(parse_value_group("Z/2").unwrap(), ValueGroup::FracZ(2));
        assert_eq!(parse_value_group("Z^3lex").unwrap(), ValueGroup::ZnLex(3));
        assert!(parse_value_group("R").is_err());
        let k = spec(CoeffField::Qx, ValueGroup::Z);
        let c = parse_cmap("1 -> x", ValueGroup::Z, CoeffField::Qx, &k).unwrap();
        assert_eq!(c.images(), &[Coeff::x()]);
        let c_pref = parse_cmap("c: 1 -> x", ValueGroup::Z, CoeffField::Qx, &k).unwrap();
        assert_eq!(c_pref.images(), &[Coeff::x()]);
        let k2 = spec(CoeffField::Qx, ValueGroup::ZnLex(2));
        let c2 = parse_cmap("e1 -> 1, e2 -> 1/x", ValueGroup::ZnLex(2), CoeffField::Qx, &k2)
            .unwrap();
        assert_eq!(c2.images().len(), 2);
    }
}
