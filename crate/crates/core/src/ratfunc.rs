//! Rational functions over the rationals in one variable x.
//!
//! Invariants: numerator and denominator coprime, denominator monic and
//! nonzero, zero stored as 0/1. Equality is structural on this canonical form.

use crate::poly::{Poly, Rat};
use num_traits::{One, Signed, Zero};
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return RatFunc {
                num: Poly::zero(),
                den: Poly::one(),
            };
        }
        let g = num.gcd(&den);
        let mut n = num.exact_div(&g);
        let mut d = den.exact_div(&g);
        let lc = d.leading();
        if !lc.is_one() {
            let inv = lc.recip();
            n = n.scale(&inv);
            d = d.scale(&inv);
        }
        RatFunc { num: n, den: d }
    }

    pub fn zero() -> Self {
        RatFunc {
            num: Poly::zero(),
            den: Poly::one(),
        }
    }

    pub fn one() -> Self {
        RatFunc {
            num: Poly::one(),
            den: Poly::one(),
        }
    }

    pub fn from_poly(p: Poly) -> Self {
        RatFunc {
            num: p,
            den: Poly::one(),
        }
    }

    pub fn from_rat(q: Rat) -> Self {
        RatFunc::from_poly(Poly::constant(q))
    }

    pub fn from_int(n: i64) -> Self {
        RatFunc::from_rat(Rat::from_integer(n.into()))
    }

    pub fn x() -> Self {
        RatFunc::from_poly(Poly::x())
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_one()
    }

    pub fn as_rat(&self) -> Option<Rat> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn add(&self, other: &RatFunc) -> RatFunc {
        RatFunc::new(
            self.num.mul(&other.den).add(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn sub(&self, other: &RatFunc) -> RatFunc {
        RatFunc::new(
            self.num.mul(&other.den).sub(&other.num.mul(&self.den)),
            self.den.mul(&other.den),
        )
    }

    pub fn neg(&self) -> RatFunc {
        RatFunc {
            num: self.num.neg(),
            den: self.den.clone(),
        }
    }

    pub fn mul(&self, other: &RatFunc) -> RatFunc {
        RatFunc::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn scale(&self, q: &Rat) -> RatFunc {
        if q.is_zero() {
            return RatFunc::zero();
        }
        RatFunc {
            num: self.num.scale(q),
            den: self.den.clone(),
        }
    }

    pub fn inv(&self) -> Option<RatFunc> {
        if self.is_zero() {
            return None;
        }
        Some(RatFunc::new(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, other: &RatFunc) -> Option<RatFunc> {
        other.inv().map(|i| self.mul(&i))
    }

    /// d/dx by the quotient rule.
    pub fn derive(&self) -> RatFunc {
        if self.den.is_one() {
            return RatFunc::from_poly(self.num.derivative());
        }
        RatFunc::new(
            self.num
                .derivative()
                .mul(&self.den)
                .sub(&self.num.mul(&self.den.derivative())),
            self.den.mul(&self.den),
        )
    }

    pub fn pow(&self, e: i32) -> Option<RatFunc> {
        if e < 0 {
            return self.inv().map(|i| i.pow_u((-e) as u32));
        }
        Some(self.pow_u(e as u32))
    }

    fn pow_u(&self, e: u32) -> RatFunc {
        RatFunc {
            num: self.num.pow(e),
            den: self.den.pow(e),
        }
    }

    /// Splits f = polynomial part + proper part with deg(proper num) < deg den.
    pub fn split_proper(&self) -> (Poly, RatFunc) {
        let (q, r) = self.num.divrem(&self.den);
        (
            q,
            RatFunc {
                num: r,
                den: self.den.clone(),
            },
        )
    }

    pub fn polynomial_part(&self) -> Poly {
        self.split_proper().0
    }

    /// Canonical integer pair (N, D): f = N/D with integer primitive N, D,
    /// positive leading D, gcd of contents 1.
    fn integer_pair(&self) -> (Poly, Poly) {
        if self.is_zero() {
            return (Poly::zero(), Poly::one());
        }
        let (un, ni) = self.num.to_integer_primitive();
        let (ud, di) = self.den.to_integer_primitive();
        let u = un / ud; // p/q in lowest terms
        let n = Poly::from_integer_coeffs(&ni).scale(&Rat::from_integer(u.numer().clone()));
        let d = Poly::from_integer_coeffs(&di).scale(&Rat::from_integer(u.denom().clone()));
        (n, d)
    }

    /// Sign of the leading coefficient of the canonical numerator.
    pub fn is_negative_lead(&self) -> bool {
        self.num.leading().is_negative()
    }

    /// True when the display form needs parentheses inside a product.
    pub fn display_needs_parens(&self) -> bool {
        let (n, _) = self.integer_pair();
        n.coeffs().iter().filter(|c| !c.is_zero()).count() > 1
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, d) = self.integer_pair();
        if d.is_one() {
            return write!(f, "{}", n);
        }
        let n_str = n.to_string();
        let d_str = d.to_string();
        let n_wrapped = if n_str[1..].contains(['+', '-']) {
            format!("({})", n_str)
        } else {
            n_str
        };
        let d_wrapped = if d_str[1..].contains(['+', '-']) || d_str.contains('*') {
            format!("({})", d_str)
        } else {
            d_str
        };
        write!(f, "{}/{}", n_wrapped, d_wrapped)
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({})", self)
    }
}
