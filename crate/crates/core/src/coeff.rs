//! Coefficient differential fields: Q with the trivial derivation and Q(x)
//! with d/dx, behind one field-object interface that nested Hahn layers
//! implement as well.

use crate::factor::{factor_poly, FactorError};
use crate::poly::Rat;
use crate::ratfunc::RatFunc;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

pub type Coeff = RatFunc;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("value is truncated with empty support: more precision needed")]
    NeedsPrecision,
    #[error("elements from mismatched field specs")]
    SpecMismatch,
    #[error(transparent)]
    Factor(#[from] FactorError),
}

/// A differential field given as a context object; elements are plain data.
pub trait DiffField: Clone {
    type Elem: Clone + PartialEq + std::fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn invert(&self, a: &Self::Elem) -> Result<Self::Elem, FieldError>;
    /// The distinguished derivation.
    fn derive(&self, a: &Self::Elem) -> Self::Elem;
    fn scale_rat(&self, q: &Rat, a: &Self::Elem) -> Self::Elem;
    fn from_rat(&self, q: &Rat) -> Self::Elem;
    fn render(&self, a: &Self::Elem) -> String;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, FieldError> {
        Ok(self.mul(a, &self.invert(b)?))
    }
}

/// The two supported coefficient fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffField {
    /// Q, trivial derivation.
    Q,
    /// Q(x), derivation d/dx.
    Qx,
}

impl CoeffField {
    pub fn name(&self) -> &'static str {
        match self {
            CoeffField::Q => "Q",
            CoeffField::Qx => "Qx",
        }
    }

    /// Whether an element belongs to this field (Q only holds constants).
    pub fn admits(&self, a: &Coeff) -> bool {
        match self {
            CoeffField::Q => a.is_constant(),
            CoeffField::Qx => true,
        }
    }

    /// f'/f.
    pub fn dagger(&self, a: &Coeff) -> Result<Coeff, FieldError> {
        if a.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        match self {
            CoeffField::Q => Ok(Coeff::zero()),
            CoeffField::Qx => Ok(a.derive().div(a).unwrap()),
        }
    }

    /// Exact nth root if one exists in the field; for even n the root with
    /// positive leading coefficient is returned.
    pub fn nth_root(&self, a: &Coeff, n: u32) -> Result<Option<Coeff>, FieldError> {
        assert!(n >= 1);
        if a.is_zero() {
            return Ok(Some(Coeff::zero()));
        }
        if n == 1 {
            return Ok(Some(a.clone()));
        }
        match self {
            CoeffField::Q => {
                let q = a.as_rat().expect("Q element must be constant");
                Ok(rat_nth_root(&q, n).map(Coeff::from_rat))
            }
            CoeffField::Qx => {
                let num_f = factor_poly(a.numer())?;
                let den_f = factor_poly(a.denom())?;
                let unit = &num_f.unit / &den_f.unit;
                let Some(root_unit) = rat_nth_root(&unit, n) else {
                    return Ok(None);
                };
                let mut acc = Coeff::from_rat(root_unit);
                for (p, e) in &num_f.factors {
                    if e % n != 0 {
                        return Ok(None);
                    }
                    acc = acc.mul(&Coeff::from_poly(p.pow(e / n)));
                }
                for (p, e) in &den_f.factors {
                    if e % n != 0 {
                        return Ok(None);
                    }
                    acc = acc
                        .div(&Coeff::from_poly(p.pow(e / n)))
                        .expect("irreducible factor is nonzero");
                }
                Ok(Some(acc))
            }
        }
    }
}

impl DiffField for CoeffField {
    type Elem = Coeff;

    fn zero(&self) -> Coeff {
        Coeff::zero()
    }

    fn one(&self) -> Coeff {
        Coeff::one()
    }

    fn is_zero(&self, a: &Coeff) -> bool {
        a.is_zero()
    }

    fn add(&self, a: &Coeff, b: &Coeff) -> Coeff {
        a.add(b)
    }

    fn neg(&self, a: &Coeff) -> Coeff {
        a.neg()
    }

    fn mul(&self, a: &Coeff, b: &Coeff) -> Coeff {
        a.mul(b)
    }

    fn invert(&self, a: &Coeff) -> Result<Coeff, FieldError> {
        a.inv().ok_or(FieldError::DivisionByZero)
    }

    fn derive(&self, a: &Coeff) -> Coeff {
        match self {
            CoeffField::Q => Coeff::zero(),
            CoeffField::Qx => a.derive(),
        }
    }

    fn scale_rat(&self, q: &Rat, a: &Coeff) -> Coeff {
        a.scale(q)
    }

    fn from_rat(&self, q: &Rat) -> Coeff {
        Coeff::from_rat(q.clone())
    }

    fn render(&self, a: &Coeff) -> String {
        a.to_string()
    }
}

/// Exact nth root of a rational, sign rules included.
fn rat_nth_root(q: &Rat, n: u32) -> Option<Rat> {
    if q.is_zero() {
        return Some(Rat::zero());
    }
    if q.is_negative() && n % 2 == 0 {
        return None;
    }
    let num_root = int_nth_root(q.numer(), n)?;
    let den_root = int_nth_root(q.denom(), n)?;
    Some(Rat::new(num_root, den_root))
}

fn int_nth_root(v: &BigInt, n: u32) -> Option<BigInt> {
    let neg = v.is_negative();
    let mag = v.abs();
    let r = mag.nth_root(n);
    if num_traits::pow(r.clone(), n as usize) != mag {
        return None;
    }
    Some(if neg { -r } else { r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat_frac, rat_int, Poly};

    fn fx(num: &[i64], den: &[i64]) -> Coeff {
        Coeff::new(
            Poly::new(num.iter().map(|&c| rat_int(c)).collect()),
            Poly::new(den.iter().map(|&c| rat_int(c)).collect()),
        )
    }

    #[test]
    fn derive_matches_field() {
        let q = CoeffField::Q;
        let qx = CoeffField::Qx;
        assert_eq!(q.derive(&Coeff::from_rat(rat_frac(7, 3))), Coeff::zero());
        // x^2 -> 2x
        assert_eq!(qx.derive(&fx(&[0, 0, 1], &[1])), fx(&[0, 2], &[1]));
        // 1/x -> -1/x^2
        assert_eq!(qx.derive(&fx(&[1], &[0, 1])), fx(&[-1], &[0, 0, 1]));
    }

    #[test]
    fn dagger_examples() {
        let qx = CoeffField::Qx;
        // (x^2)† = 2/x
        assert_eq!(qx.dagger(&fx(&[0, 0, 1], &[1])).unwrap(), fx(&[2], &[0, 1]));
        // (x(x+1))† = (2x+1)/(x^2+x)
        assert_eq!(
            qx.dagger(&fx(&[0, 1, 1], &[1])).unwrap(),
            fx(&[1, 2], &[0, 1, 1])
        );
        // trivial field: 5† = 0
        assert_eq!(
            CoeffField::Q.dagger(&Coeff::from_int(5)).unwrap(),
            Coeff::zero()
        );
        assert_eq!(
            CoeffField::Q.dagger(&Coeff::zero()),
            Err(FieldError::DivisionByZero)
        );
    }

    #[test]
    fn nth_roots() {
        let q = CoeffField::Q;
        let qx = CoeffField::Qx;
        assert_eq!(
            q.nth_root(&Coeff::from_int(4), 2).unwrap(),
            Some(Coeff::from_int(2))
        );
        assert_eq!(q.nth_root(&Coeff::from_int(2), 2).unwrap(), None);
        assert_eq!(
            q.nth_root(&Coeff::from_int(-8), 3).unwrap(),
            Some(Coeff::from_int(-2))
        );
        assert_eq!(q.nth_root(&Coeff::from_int(-4), 2).unwrap(), None);
        // (1/x^2)^(1/2) = 1/x
        assert_eq!(
            qx.nth_root(&fx(&[1], &[0, 0, 1]), 2).unwrap(),
            Some(fx(&[1], &[0, 1]))
        );
        // x has no square root
        assert_eq!(qx.nth_root(&fx(&[0, 1], &[1]), 2).unwrap(), None);
        // 4x^2 -> 2x
        assert_eq!(
            qx.nth_root(&fx(&[0, 0, 4], &[1]), 2).unwrap(),
            Some(fx(&[0, 2], &[1]))
        );
    }
}
