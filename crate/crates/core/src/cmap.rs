//! Additive maps c from the value group into the coefficient field, their
//! kernels, whether the image meets the logarithmic derivatives, and the
//! few/many-constants classification.
//!
//! The valuation group of constants Delta_C = { gamma : c(gamma) in k† } is
//! computed exactly: the structural membership conditions (zero polynomial
//! part, simple poles, rational residues) are Q-linear in gamma, and residue
//! integrality on the resulting lattice is a linear congruence system solved
//! by Hermite normal form.

use crate::coeff::{Coeff, CoeffField};
use crate::factor::{factor_poly, FactorError};
use crate::group::{integer_row_kernel, row_hnf, FgSubgroup, GroupElement, GroupError, ValueGroup};
use crate::logderiv::{log_derivative_membership, DaggerCertificate};
use crate::poly::{Poly, Rat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CMapError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error("operation requires a finitely generated domain, not Q")]
    InfinitelyGenerated,
    #[error("coefficient {0} does not lie in the field {1}")]
    NotInField(String, &'static str),
}

/// c: Gamma -> k, stored by the images of the canonical generators.
#[derive(Debug, Clone, PartialEq)]
pub struct AdditiveMap {
    domain: ValueGroup,
    field: CoeffField,
    images: Vec<Coeff>,
}

impl AdditiveMap {
    pub fn new(
        domain: ValueGroup,
        field: CoeffField,
        images: Vec<Coeff>,
    ) -> Result<Self, CMapError> {
        assert_eq!(
            images.len(),
            domain.generators().len(),
            "one image per canonical generator"
        );
        for im in &images {
            if !field.admits(im) {
                return Err(CMapError::NotInField(im.to_string(), field.name()));
            }
        }
        Ok(AdditiveMap {
            domain,
            field,
            images,
        })
    }

    pub fn zero_map(domain: ValueGroup, field: CoeffField) -> Self {
        let images = vec![Coeff::zero(); domain.generators().len()];
        AdditiveMap {
            domain,
            field,
            images,
        }
    }

    pub fn domain(&self) -> ValueGroup {
        self.domain
    }

    pub fn field(&self) -> CoeffField {
        self.field
    }

    pub fn images(&self) -> &[Coeff] {
        &self.images
    }

    pub fn is_zero_map(&self) -> bool {
        self.images.iter().all(|c| c.is_zero())
    }

    /// Z-linear (Q-linear on Q) evaluation at gamma.
    pub fn eval(&self, gamma: &GroupElement) -> Result<Coeff, CMapError> {
        if !self.domain.admits(gamma) {
            return Err(GroupError::DomainMismatch.into());
        }
        match (self.domain, gamma) {
            (ValueGroup::Z, GroupElement::Int(n)) => {
                Ok(self.images[0].scale(&Rat::from_integer(n.clone())))
            }
            (ValueGroup::Q, GroupElement::Rat(q)) => Ok(self.images[0].scale(q)),
            (ValueGroup::FracZ(d), GroupElement::Rat(q)) => {
                // c(m/d) = m * c(1/d)
                let m = q * Rat::from_integer(BigInt::from(d));
                Ok(self.images[0].scale(&m))
            }
            (ValueGroup::ZnLex(_), GroupElement::Tuple(v)) => {
                let mut acc = Coeff::zero();
                for (x, im) in v.iter().zip(&self.images) {
                    acc = acc.add(&im.scale(&Rat::from_integer(x.clone())));
                }
                Ok(acc)
            }
            _ => Err(GroupError::DomainMismatch.into()),
        }
    }

    pub fn injective(&self) -> bool {
        match self.domain {
            ValueGroup::Z | ValueGroup::Q | ValueGroup::FracZ(_) => !self.images[0].is_zero(),
            ValueGroup::ZnLex(_) => match self.kernel() {
                Ok(k) => k.is_trivial(),
                Err(_) => false,
            },
        }
    }

    /// Generators of { gamma : c(gamma) = 0 }. The domain must be finitely
    /// generated (Z, (1/d)Z, or Z^n).
    pub fn kernel(&self) -> Result<FgSubgroup, CMapError> {
        match self.domain {
            ValueGroup::Q => Err(CMapError::InfinitelyGenerated),
            ValueGroup::Z | ValueGroup::FracZ(_) => {
                let gens = if self.images[0].is_zero() {
                    self.domain.generators()
                } else {
                    vec![]
                };
                Ok(FgSubgroup::new(self.domain, gens)?)
            }
            ValueGroup::ZnLex(_) => {
                let rows = coefficient_rows(&self.images);
                let kernel = integer_row_kernel(&rows, rows.first().map_or(0, |r| r.len()));
                let gens: Vec<GroupElement> = kernel
                    .into_iter()
                    .map(GroupElement::Tuple)
                    .collect();
                Ok(FgSubgroup::new(self.domain, gens)?)
            }
        }
    }

    /// Whether some nonzero c(gamma) is a logarithmic derivative, with a
    /// witness (gamma, f) such that f'/f = c(gamma).
    pub fn image_meets_dagger(&self) -> Result<Option<(GroupElement, Coeff)>, CMapError> {
        if self.field == CoeffField::Q {
            // k† = {0}
            return Ok(None);
        }
        let delta = self.constant_valuation_group()?;
        let candidates: Vec<GroupElement> = match &delta {
            ConstantGroup::Whole(g) => g.generators(),
            ConstantGroup::Sub(s) => s.basis().to_vec(),
        };
        for gamma in candidates {
            let val = self.eval(&gamma)?;
            if !val.is_zero() {
                let cert = log_derivative_membership(&val)?;
                if let DaggerCertificate::Member { witness, .. } = cert {
                    return Ok(Some((gamma, witness)));
                }
            }
        }
        Ok(None)
    }

    /// Delta_C = { gamma : c(gamma) in k† } as a subgroup of the domain.
    pub fn constant_valuation_group(&self) -> Result<ConstantGroup, CMapError> {
        if self.field == CoeffField::Q {
            // k† = {0}: Delta_C is exactly the kernel
            return match self.domain {
                ValueGroup::Q => {
                    if self.images[0].is_zero() {
                        Ok(ConstantGroup::Whole(self.domain))
                    } else {
                        Ok(ConstantGroup::Sub(FgSubgroup::trivial(self.domain)))
                    }
                }
                _ => Ok(ConstantGroup::Sub(self.kernel()?)),
            };
        }
        match self.domain {
            ValueGroup::Z | ValueGroup::FracZ(_) | ValueGroup::Q => {
                let u = &self.images[0];
                if u.is_zero() {
                    return Ok(ConstantGroup::Whole(self.domain));
                }
                let Some(residues) = residue_structure(u)? else {
                    return Ok(ConstantGroup::Sub(FgSubgroup::trivial(self.domain)));
                };
                match self.domain {
                    ValueGroup::Q => {
                        // least positive rational multiplier making all
                        // residues integral
                        let mut b = BigInt::one();
                        for (_, r) in &residues {
                            b = b.lcm(r.denom());
                        }
                        let mut g = BigInt::zero();
                        for (_, r) in &residues {
                            let scaled = r * Rat::from_integer(b.clone());
                            g = g.gcd(&scaled.to_integer());
                        }
                        let gamma0 = GroupElement::Rat(Rat::new(b, g));
                        Ok(ConstantGroup::Sub(FgSubgroup::new(
                            self.domain,
                            vec![gamma0],
                        )?))
                    }
                    _ => {
                        let mut n = BigInt::one();
                        for (_, r) in &residues {
                            n = n.lcm(r.denom());
                        }
                        let gen = self.domain.generators()[0].scale_int(&n);
                        Ok(ConstantGroup::Sub(FgSubgroup::new(self.domain, vec![gen])?))
                    }
                }
            }
            ValueGroup::ZnLex(_) => {
                let lattice = self.dagger_lattice()?;
                let gens: Vec<GroupElement> =
                    lattice.into_iter().map(GroupElement::Tuple).collect();
                Ok(ConstantGroup::Sub(FgSubgroup::new(self.domain, gens)?))
            }
        }
    }

    /// The lattice { gamma in Z^rank : sum gamma_i g_i in Q(x)† }.
    fn dagger_lattice(&self) -> Result<Vec<Vec<BigInt>>, CMapError> {
        // split images into polynomial parts and proper parts over a common
        // denominator
        let mut den = Poly::one();
        for g in &self.images {
            den = den.mul(g.denom()).exact_div(&den.gcd(g.denom())).monic();
        }
        let polys: Vec<Poly> = self.images.iter().map(|g| g.polynomial_part()).collect();
        let propers: Vec<Poly> = self
            .images
            .iter()
            .map(|g| {
                let (_, pr) = g.split_proper();
                // numerator over the common denominator
                pr.numer().mul(&den.exact_div(pr.denom()))
            })
            .collect();

        // constraint columns: each constraint is one rational functional on gamma
        let mut constraints: Vec<Vec<Rat>> = Vec::new(); // constraints[c][i]
        let max_deg = polys.iter().map(|p| p.coeffs().len()).max().unwrap_or(0);
        for k in 0..max_deg {
            constraints.push(polys.iter().map(|p| p.coeff(k)).collect());
        }

        // local data at each irreducible factor of the common denominator
        let fac = factor_poly(&den)?;
        let mut residue_rows: Vec<Vec<Rat>> = Vec::new(); // rational residues per place
        for (p, e) in &fac.factors {
            let deg_p = p.degree().unwrap();
            let cofactor = den.exact_div(&p.pow(*e));
            let cof_inv = inv_mod_power(&cofactor, p, *e);
            let dp_inv = inv_mod_power(&p.derivative().rem(p), p, 1);
            // per-generator local numerators B_i with proper_i/den = B_i / p^e
            // locally; digits of B_i in base p
            let mut digit_table: Vec<Vec<Poly>> = Vec::new();
            for pr in &propers {
                let b = pr.mul(&cof_inv).rem(&p.pow(*e));
                digit_table.push(p_adic_digits(&b, p, *e));
            }
            // orders >= 2 must vanish: digits e-m for m = 2..=e
            for m in 2..=*e {
                let digit_idx = (*e - m) as usize;
                for s in 0..deg_p {
                    constraints.push(
                        digit_table
                            .iter()
                            .map(|digits| digits[digit_idx].coeff(s))
                            .collect(),
                    );
                }
            }
            // residue: digit e-1 divided by p' mod p; non-constant coordinates
            // must vanish, the constant coordinate is the rational residue
            let residues: Vec<Poly> = digit_table
                .iter()
                .map(|digits| digits[(*e - 1) as usize].mul(&dp_inv).rem(p))
                .collect();
            for s in 1..deg_p {
                constraints.push(residues.iter().map(|r| r.coeff(s)).collect());
            }
            residue_rows.push(residues.iter().map(|r| r.coeff(0)).collect());
        }

        // lattice satisfying the equality constraints
        let n = self.images.len();
        let mut scale = BigInt::one();
        for row in &constraints {
            for v in row {
                scale = scale.lcm(v.denom());
            }
        }
        let wrows: Vec<Vec<BigInt>> = (0..n)
            .map(|i| {
                constraints
                    .iter()
                    .map(|c| (&c[i] * Rat::from_integer(scale.clone())).to_integer())
                    .collect()
            })
            .collect();
        let ncols = constraints.len();
        let lambda = if ncols == 0 {
            // no constraints: the whole Z^n
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                        .collect()
                })
                .collect()
        } else {
            integer_row_kernel(&wrows, ncols)
        };
        if lambda.is_empty() {
            return Ok(vec![]);
        }

        // residue integrality on the lattice: congruence system via HNF
        let s = lambda.len();
        let nplaces = residue_rows.len();
        if nplaces == 0 {
            return Ok(lambda);
        }
        let mut q = BigInt::one();
        let mut rmat: Vec<Vec<Rat>> = vec![vec![Rat::zero(); nplaces]; s];
        for (j, lam) in lambda.iter().enumerate() {
            for (pi, row) in residue_rows.iter().enumerate() {
                let mut acc = Rat::zero();
                for (i, v) in lam.iter().enumerate() {
                    acc += &row[i] * Rat::from_integer(v.clone());
                }
                q = q.lcm(acc.denom());
                rmat[j][pi] = acc;
            }
        }
        if q.is_one() {
            return Ok(lambda);
        }
        // rows: s lattice rows scaled, then q * identity
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(s + nplaces);
        for r in &rmat {
            rows.push(
                r.iter()
                    .map(|v| (v * Rat::from_integer(q.clone())).to_integer())
                    .collect(),
            );
        }
        for i in 0..nplaces {
            let mut row = vec![BigInt::zero(); nplaces];
            row[i] = q.clone();
            rows.push(row);
        }
        let combos = integer_row_kernel(&rows, nplaces);
        // project onto the first s coordinates and map through lambda
        let mut gens: Vec<Vec<BigInt>> = Vec::new();
        for combo in combos {
            let t = &combo[..s];
            let mut gamma = vec![BigInt::zero(); self.images.len()];
            for (tj, lam) in t.iter().zip(&lambda) {
                for (g, l) in gamma.iter_mut().zip(lam) {
                    *g += tj * l;
                }
            }
            if gamma.iter().any(|x| !x.is_zero()) {
                gens.push(gamma);
            }
        }
        Ok(row_hnf(gens))
    }
}

/// Residues of a nonzero coefficient at its poles, or None when a structural
/// condition (zero polynomial part, simple poles, rational residues) fails.
fn residue_structure(u: &Coeff) -> Result<Option<Vec<(Poly, Rat)>>, FactorError> {
    match log_derivative_membership_structure(u)? {
        Some(r) => Ok(Some(r)),
        None => Ok(None),
    }
}

fn log_derivative_membership_structure(
    u: &Coeff,
) -> Result<Option<Vec<(Poly, Rat)>>, FactorError> {
    let (poly_part, proper) = u.split_proper();
    if !poly_part.is_zero() {
        return Ok(None);
    }
    let den = proper.denom();
    let fac = factor_poly(den)?;
    if fac.factors.iter().any(|(_, e)| *e > 1) {
        return Ok(None);
    }
    let num = proper.numer();
    let mut out = Vec::new();
    for (p, _) in &fac.factors {
        let cofactor = den.exact_div(p);
        let cof_inv = inv_mod_power(&cofactor, p, 1);
        let dp_inv = inv_mod_power(&p.derivative().rem(p), p, 1);
        let r = num.rem(p).mul(&cof_inv).rem(p).mul(&dp_inv).rem(p);
        match r.as_constant() {
            Some(c) => out.push((p.clone(), c)),
            None => return Ok(None),
        }
    }
    Ok(Some(out))
}

/// Inverse of a modulo p^e in Q[x] (requires gcd(a, p) = 1), by Newton from
/// the inverse mod p.
fn inv_mod_power(a: &Poly, p: &Poly, e: u32) -> Poly {
    let pe = p.pow(e);
    let a = a.rem(&pe);
    // extended Euclid against p^e directly (p irreducible so a is a unit)
    let (mut r0, mut r1) = (pe.clone(), a);
    let (mut s0, mut s1) = (Poly::zero(), Poly::one());
    while !r1.is_zero() {
        let (q, r) = r0.divrem(&r1);
        let s = s0.sub(&q.mul(&s1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    assert_eq!(r0.degree(), Some(0), "inverse modulo p^e must exist");
    s0.scale(&r0.leading().recip()).rem(&pe)
}

/// Digits of b in base p: b = d_0 + d_1 p + ... + d_{e-1} p^{e-1}.
fn p_adic_digits(b: &Poly, p: &Poly, e: u32) -> Vec<Poly> {
    let mut digits = Vec::with_capacity(e as usize);
    let mut rest = b.clone();
    for _ in 0..e {
        let (q, r) = rest.divrem(p);
        digits.push(r);
        rest = q;
    }
    digits
}

fn coefficient_rows(images: &[Coeff]) -> Vec<Vec<BigInt>> {
    // represent each image in a common rational vector space and scale to Z
    let mut den = Poly::one();
    for g in images {
        den = den.mul(g.denom()).exact_div(&den.gcd(g.denom())).monic();
    }
    let nums: Vec<Poly> = images
        .iter()
        .map(|g| g.numer().mul(&den.exact_div(g.denom())))
        .collect();
    let width = nums.iter().map(|p| p.coeffs().len()).max().unwrap_or(0);
    let mut scale = BigInt::one();
    for p in &nums {
        for c in p.coeffs() {
            scale = scale.lcm(c.denom());
        }
    }
    nums.iter()
        .map(|p| {
            (0..width)
                .map(|k| (p.coeff(k) * Rat::from_integer(scale.clone())).to_integer())
                .collect()
        })
        .collect()
}

/// Delta_C, which is all of Gamma exactly when the verdict is many constants.
#[derive(Debug, Clone, PartialEq)]
pub enum ConstantGroup {
    Whole(ValueGroup),
    Sub(FgSubgroup),
}

impl ConstantGroup {
    pub fn is_whole(&self) -> bool {
        match self {
            ConstantGroup::Whole(_) => true,
            ConstantGroup::Sub(s) => s.is_whole_ambient(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        match self {
            ConstantGroup::Whole(_) => false,
            ConstantGroup::Sub(s) => s.is_trivial(),
        }
    }

    pub fn contains(&self, gamma: &GroupElement) -> Result<bool, GroupError> {
        match self {
            ConstantGroup::Whole(_) => Ok(true),
            ConstantGroup::Sub(s) => s.contains(gamma),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            ConstantGroup::Whole(g) => g.name(),
            ConstantGroup::Sub(s) => s.to_string(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstantsVerdict {
    FewConstants,
    ManyConstants,
    Intermediate,
}

impl ConstantsVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            ConstantsVerdict::FewConstants => "FewConstants",
            ConstantsVerdict::ManyConstants => "ManyConstants",
            ConstantsVerdict::Intermediate => "Intermediate",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstantsClassification {
    pub verdict: ConstantsVerdict,
    pub delta_c: ConstantGroup,
    pub injective: bool,
    pub image_meets_dagger: Option<(GroupElement, Coeff)>,
    /// A constant monomial d t^gamma with nonzero gamma, when one exists.
    pub constant_witness: Option<(GroupElement, Coeff)>,
}

/// Classifies the constants of k((t^Gamma)) with the twisted derivation given
/// by c. Checks the two biconditionals relating the classification to
/// injectivity and to c(Gamma) meeting k†.
pub fn classify_constants(c: &AdditiveMap) -> Result<ConstantsClassification, CMapError> {
    let delta_c = c.constant_valuation_group()?;
    let verdict = if delta_c.is_trivial() {
        ConstantsVerdict::FewConstants
    } else if delta_c.is_whole() {
        ConstantsVerdict::ManyConstants
    } else {
        ConstantsVerdict::Intermediate
    };
    let injective = c.injective();
    let image_meets_dagger = c.image_meets_dagger()?;

    // few constants <=> c injective and c(Gamma) meets k† only in 0
    let few = verdict == ConstantsVerdict::FewConstants;
    assert_eq!(
        few,
        injective && image_meets_dagger.is_none(),
        "few-constants biconditional must hold"
    );

    // constant witness: d t^gamma with d† = -c(gamma)
    let mut constant_witness = None;
    if let ConstantGroup::Sub(s) = &delta_c {
        if let Some(gamma) = s.basis().iter().find(|g| !g.is_zero()) {
            let val = c.eval(gamma)?.neg();
            if c.field() == CoeffField::Qx {
                if let DaggerCertificate::Member { witness, .. } =
                    log_derivative_membership(&val)?
                {
                    constant_witness = Some((gamma.clone(), witness));
                }
            } else if val.is_zero() {
                constant_witness = Some((gamma.clone(), Coeff::one()));
            }
        }
    } else if let ConstantGroup::Whole(g) = &delta_c {
        let gamma = g.generators()[0].clone();
        let val = c.eval(&gamma)?.neg();
        if c.field() == CoeffField::Qx {
            if let DaggerCertificate::Member { witness, .. } = log_derivative_membership(&val)? {
                constant_witness = Some((gamma, witness));
            }
        } else if val.is_zero() {
            constant_witness = Some((gamma, Coeff::one()));
        }
    }

    Ok(ConstantsClassification {
        verdict,
        delta_c,
        injective,
        image_meets_dagger,
        constant_witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::rat_int;

    fn fx(num: &[i64], den: &[i64]) -> Coeff {
        Coeff::new(
            Poly::new(num.iter().map(|&c| rat_int(c)).collect()),
            Poly::new(den.iter().map(|&c| rat_int(c)).collect()),
        )
    }

    #[test]
    fn eval_linearity() {
        // c(1) = x on Z: c(3) = 3x
        let c = AdditiveMap::new(ValueGroup::Z, CoeffField::Qx, vec![Coeff::x()]).unwrap();
        assert_eq!(c.eval(&GroupElement::int(3)).unwrap(), fx(&[0, 3], &[1]));
        assert_eq!(c.eval(&GroupElement::int(0)).unwrap(), Coeff::zero());
        // Z^2: c(e1) = 1, c(e2) = 1/x; c((2,-1)) = 2 - 1/x
        let c2 = AdditiveMap::new(
            ValueGroup::ZnLex(2),
            CoeffField::Qx,
            vec![Coeff::one(), fx(&[1], &[0, 1])],
        )
        .unwrap();
        assert_eq!(
            c2.eval(&GroupElement::tuple(&[2, -1])).unwrap(),
            fx(&[-1, 2], &[0, 1])
        );
    }

    #[test]
    fn kernel_of_integer_images() {
        // c(e1) = 1, c(e2) = 2 over trivial-derivation Q: kernel <(-2,1)>
        let c = AdditiveMap::new(
            ValueGroup::ZnLex(2),
            CoeffField::Q,
            vec![Coeff::one(), Coeff::from_int(2)],
        )
        .unwrap();
        let k = c.kernel().unwrap();
        assert_eq!(k.basis().len(), 1);
        assert!(k.contains(&GroupElement::tuple(&[-2, 1])).unwrap());
        assert_eq!(c.eval(&GroupElement::tuple(&[-2, 1])).unwrap(), Coeff::zero());

        // c(1) = x on Z: trivial kernel
        let cx = AdditiveMap::new(ValueGroup::Z, CoeffField::Qx, vec![Coeff::x()]).unwrap();
        assert!(cx.kernel().unwrap().is_trivial());

        // zero map on Z^2: whole Z^2
        let cz = AdditiveMap::zero_map(ValueGroup::ZnLex(2), CoeffField::Q);
        assert!(cz.kernel().unwrap().is_whole_ambient());
    }

    #[test]
    fn image_meets_dagger_examples() {
        // c(1) = 1/x: 1/x = x†, witness gamma = 1, f = x
        let c = AdditiveMap::new(ValueGroup::Z, CoeffField::Qx, vec![fx(&[1], &[0, 1])]).unwrap();
        let hit = c.image_meets_dagger().unwrap();
        let (gamma, f) = hit.unwrap();
        assert_eq!(gamma, GroupElement::int(1));
        assert_eq!(f, Coeff::x());

        // c(1) = 1: nonzero rationals never log derivatives
        let c1 = AdditiveMap::new(ValueGroup::Z, CoeffField::Qx, vec![Coeff::one()]).unwrap();
        assert!(c1.image_meets_dagger().unwrap().is_none());

        // zero map: intersection only at 0
        let cz = AdditiveMap::zero_map(ValueGroup::Z, CoeffField::Qx);
        assert!(cz.image_meets_dagger().unwrap().is_none());
    }

    #[test]
    fn classification_catalog_core() {
        // c = 0 on Z over Q(x): many constants
        let c0 = AdditiveMap::zero_map(ValueGroup::Z, CoeffField::Qx);
        let r0 = classify_constants(&c0).unwrap();
        assert_eq!(r0.verdict, ConstantsVerdict::ManyConstants);

        // c(1) = 1: few constants
        let c1 = AdditiveMap::new(ValueGroup::Z, CoeffField::Qx, vec![Coeff::one()]).unwrap();
        let r1 = classify_constants(&c1).unwrap();
        assert_eq!(r1.verdict, ConstantsVerdict::FewConstants);

        // c(1) = 1/x: many constants with witness (1/x) t
        let ci = AdditiveMap::new(ValueGroup::Z, CoeffField::Qx, vec![fx(&[1], &[0, 1])]).unwrap();
        let ri = classify_constants(&ci).unwrap();
        assert_eq!(ri.verdict, ConstantsVerdict::ManyConstants);
        let (gamma, d) = ri.constant_witness.unwrap();
        assert_eq!(gamma, GroupElement::int(1));
        assert_eq!(d, fx(&[1], &[0, 1]));
    }

    #[test]
    fn zn_lattice_classification() {
        // c(e1) = 1/x, c(e2) = 1: Delta_C = <(1,0)>, injective, intermediate
        let c = AdditiveMap::new(
            ValueGroup::ZnLex(2),
            CoeffField::Qx,
            vec![fx(&[1], &[0, 1]), Coeff::one()],
        )
        .unwrap();
        let r = classify_constants(&c).unwrap();
        assert_eq!(r.verdict, ConstantsVerdict::Intermediate);
        assert!(r.injective);
        match &r.delta_c {
            ConstantGroup::Sub(s) => {
                assert!(s.contains(&GroupElement::tuple(&[1, 0])).unwrap());
                assert!(!s.contains(&GroupElement::tuple(&[0, 1])).unwrap());
                assert!(!s.contains(&GroupElement::tuple(&[1, 1])).unwrap());
            }
            _ => panic!("expected a proper subgroup"),
        }
    }

    #[test]
    fn zn_congruence_lattice() {
        // c(e1) = 1/(2x), c(e2) = 1/(3x): residues a/2 + b/3 must be integral,
        // so Delta_C = { (a,b) : 3a + 2b = 0 mod 6 }
        let c = AdditiveMap::new(
            ValueGroup::ZnLex(2),
            CoeffField::Qx,
            vec![fx(&[1], &[0, 2]), fx(&[1], &[0, 3])],
        )
        .unwrap();
        let r = classify_constants(&c).unwrap();
        let ConstantGroup::Sub(s) = &r.delta_c else {
            panic!("expected a proper lattice")
        };
        for (a, b) in [(2i64, 0i64), (0, 3), (2, 3), (4, 3), (-2, 6)] {
            assert!(
                s.contains(&GroupElement::tuple(&[a, b])).unwrap(),
                "({},{}) should be in Delta_C",
                a,
                b
            );
            assert_eq!((3 * a + 2 * b) % 6, 0);
        }
        for (a, b) in [(1i64, 0i64), (0, 1), (1, 1), (2, 1), (1, 3)] {
            assert!(!s.contains(&GroupElement::tuple(&[a, b])).unwrap());
            assert_ne!((3 * a + 2 * b) % 6, 0);
        }
    }

    #[test]
    fn zn_pole_cancellation() {
        // c(e1) = 1/x^2, c(e2) = -1/x^2 + 1/x: double poles must cancel, so
        // Delta_C = <(1,1)>
        let c = AdditiveMap::new(
            ValueGroup::ZnLex(2),
            CoeffField::Qx,
            vec![fx(&[1], &[0, 0, 1]), fx(&[-1, 1], &[0, 0, 1])],
        )
        .unwrap();
        let r = classify_constants(&c).unwrap();
        let ConstantGroup::Sub(s) = &r.delta_c else {
            panic!("expected a proper lattice")
        };
        assert!(s.contains(&GroupElement::tuple(&[1, 1])).unwrap());
        assert!(s.contains(&GroupElement::tuple(&[-3, -3])).unwrap());
        assert!(!s.contains(&GroupElement::tuple(&[1, 0])).unwrap());
        assert!(!s.contains(&GroupElement::tuple(&[2, 1])).unwrap());
        // and the intersection with the daggers is realized at (1,1) -> 1/x
        let (gamma, f) = r.image_meets_dagger.unwrap();
        assert_eq!(c.eval(&gamma).unwrap(), CoeffField::Qx.dagger(&f).unwrap());
    }

    #[test]
    fn frac_domain_saturation() {
        // Gamma = (1/2)Z, c(1/2) = 1/(2x): residue 1/2, so Delta_C = <1> = Z
        let c = AdditiveMap::new(
            ValueGroup::FracZ(2),
            CoeffField::Qx,
            vec![fx(&[1], &[0, 2])],
        )
        .unwrap();
        let r = classify_constants(&c).unwrap();
        assert_eq!(r.verdict, ConstantsVerdict::Intermediate);
        match &r.delta_c {
            ConstantGroup::Sub(s) => {
                assert!(s.contains(&GroupElement::rat(1, 1)).unwrap());
                assert!(!s.contains(&GroupElement::rat(1, 2)).unwrap());
            }
            _ => panic!("expected subgroup"),
        }
    }
}
