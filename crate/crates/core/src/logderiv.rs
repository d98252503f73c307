//! Membership in the group of logarithmic derivatives of Q(x).
//!
//! g = f'/f for some nonzero f in Q(x) exactly when g has zero polynomial
//! part, a squarefree denominator, and an integer residue at every pole. The
//! residue at an irreducible p dividing the denominator D of the proper part
//! A/D is the class of A * (D/p)^-1 * (p')^-1 mod p, which must reduce to a
//! rational constant. The witness is the product of the p^residue.

use crate::coeff::{Coeff, CoeffField};
use crate::factor::{factor_poly, FactorError};
use crate::poly::{Poly, Rat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed};
use std::fmt;

/// Reason a rational function is not a logarithmic derivative.
#[derive(Debug, Clone, PartialEq)]
pub enum NonMemberReason {
    NonzeroPolynomialPart(Poly),
    NonSimplePole(Poly),
    NonRationalResidue(Poly),
    NonIntegerResidue { pole: Poly, residue: Rat },
}

impl fmt::Display for NonMemberReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NonMemberReason::NonzeroPolynomialPart(p) => {
                write!(f, "nonzero polynomial part {}", p)
            }
            NonMemberReason::NonSimplePole(p) => write!(f, "non-simple pole at {}", p),
            NonMemberReason::NonRationalResidue(p) => {
                write!(f, "non-rational residue at {}", p)
            }
            NonMemberReason::NonIntegerResidue { pole, residue } => {
                write!(f, "non-integer residue {} at {}", residue, pole)
            }
        }
    }
}

/// Outcome of a membership test, self-checking on construction.
#[derive(Debug, Clone, PartialEq)]
pub enum DaggerCertificate {
    Member {
        /// (irreducible, exponent) pairs with f the product of p^n.
        factors: Vec<(Poly, BigInt)>,
        witness: Coeff,
    },
    NonMember(NonMemberReason),
}

impl DaggerCertificate {
    pub fn is_member(&self) -> bool {
        matches!(self, DaggerCertificate::Member { .. })
    }

    pub fn witness(&self) -> Option<&Coeff> {
        match self {
            DaggerCertificate::Member { witness, .. } => Some(witness),
            DaggerCertificate::NonMember(_) => None,
        }
    }
}

/// Decides g in Q(x)† = { f'/f : f nonzero }.
pub fn log_derivative_membership(g: &Coeff) -> Result<DaggerCertificate, FactorError> {
    if g.is_zero() {
        return Ok(DaggerCertificate::Member {
            factors: vec![],
            witness: Coeff::one(),
        });
    }
    let (poly_part, proper) = g.split_proper();
    if !poly_part.is_zero() {
        return Ok(DaggerCertificate::NonMember(
            NonMemberReason::NonzeroPolynomialPart(poly_part),
        ));
    }
    let residues = match pole_residues(&proper)? {
        Ok(r) => r,
        Err(reason) => return Ok(DaggerCertificate::NonMember(reason)),
    };
    let mut factors: Vec<(Poly, BigInt)> = Vec::new();
    for (p, r) in residues {
        if !r.is_integer() {
            return Ok(DaggerCertificate::NonMember(
                NonMemberReason::NonIntegerResidue { pole: p, residue: r },
            ));
        }
        factors.push((p, r.to_integer()));
    }
    let witness = witness_from_factors(&factors);
    // re-check the witness: f'/f must equal g exactly
    let back = CoeffField::Qx
        .dagger(&witness)
        .expect("witness is a nonzero product of irreducibles");
    assert_eq!(&back, g, "membership witness failed verification");
    Ok(DaggerCertificate::Member { factors, witness })
}

/// Residues of a proper rational function at each pole, or the structural
/// obstruction. Requires all poles simple and all residues rational.
fn pole_residues(proper: &Coeff) -> Result<Result<Vec<(Poly, Rat)>, NonMemberReason>, FactorError> {
    if proper.is_zero() {
        return Ok(Ok(vec![]));
    }
    let den = proper.denom();
    let fac = factor_poly(den)?;
    for (p, e) in &fac.factors {
        if *e > 1 {
            return Ok(Err(NonMemberReason::NonSimplePole(p.clone())));
        }
    }
    let num = proper.numer();
    let mut out = Vec::new();
    for (p, _) in &fac.factors {
        let cofactor = den.exact_div(p);
        let Some(cof_inv) = inv_mod(&cofactor, p) else {
            return Ok(Err(NonMemberReason::NonRationalResidue(p.clone())));
        };
        let Some(dp_inv) = inv_mod(&p.derivative(), p) else {
            return Ok(Err(NonMemberReason::NonRationalResidue(p.clone())));
        };
        let res = num.rem(p).mul(&cof_inv).rem(p).mul(&dp_inv).rem(p);
        match res.as_constant() {
            Some(c) => out.push((p.clone(), c)),
            None => return Ok(Err(NonMemberReason::NonRationalResidue(p.clone()))),
        }
    }
    Ok(Ok(out))
}

fn witness_from_factors(factors: &[(Poly, BigInt)]) -> Coeff {
    let mut num = Poly::one();
    let mut den = Poly::one();
    for (p, n) in factors {
        let e = n.magnitude().to_u32_digits().first().copied().unwrap_or(0);
        if n.is_positive() {
            num = num.mul(&p.pow(e));
        } else if n.is_negative() {
            den = den.mul(&p.pow(e));
        }
    }
    Coeff::new(num, den)
}

/// Least n >= 1 with n*g a logarithmic derivative, if any: the lcm of the
/// residue denominators when the structural conditions hold.
pub fn dagger_saturation(g: &Coeff) -> Result<Option<BigInt>, FactorError> {
    if g.is_zero() {
        return Ok(Some(BigInt::one()));
    }
    let (poly_part, proper) = g.split_proper();
    if !poly_part.is_zero() {
        return Ok(None);
    }
    match pole_residues(&proper)? {
        Err(_) => Ok(None),
        Ok(residues) => {
            let mut l = BigInt::one();
            for (_, r) in &residues {
                l = l.lcm(r.denom());
            }
            Ok(Some(l))
        }
    }
}

/// Inverse of a modulo the irreducible p in Q[x], when coprime.
fn inv_mod(a: &Poly, p: &Poly) -> Option<Poly> {
    let a = a.rem(p);
    if a.is_zero() {
        return None;
    }
    let (mut r0, mut r1) = (p.clone(), a);
    let (mut s0, mut s1) = (Poly::zero(), Poly::one());
    while !r1.is_zero() {
        let (q, r) = r0.divrem(&r1);
        let s = s0.sub(&q.mul(&s1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    if r0.degree() != Some(0) {
        return None;
    }
    Some(s0.scale(&r0.leading().recip()).rem(p))
}
