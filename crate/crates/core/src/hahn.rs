//! Hahn series over a differential coefficient field, with the twisted
//! derivation determined by an additive map on the value group.
//!
//! Series are finitely supported term lists with an optional truncation
//! marker: `trunc = Some(b)` means the terms below b are exact and nothing is
//! known from b on. The empty list without a marker is the exact zero; with a
//! marker it is "zero up to the bound", and operations that would need to
//! distinguish raise a needs-precision error instead of guessing.
//!
//! The field object is generic over the coefficient layer, so a Hahn field
//! can serve as the coefficient field of an outer Hahn field.

use crate::cmap::AdditiveMap;
use crate::coeff::{Coeff, CoeffField, DiffField, FieldError};
use crate::group::{GroupElement, GroupError, ValueGroup};
use crate::logderiv::{log_derivative_membership, DaggerCertificate, NonMemberReason};
use crate::poly::{Poly, Rat};
use num_bigint::BigInt;
use num_traits::Zero;
use std::cmp::Ordering;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HahnError {
    #[error("division by zero series")]
    DivisionByZero,
    #[error("series is indeterminate at the needed precision (truncated at {0})")]
    NeedsPrecision(String),
    #[error("series has negative valuation, not in the valuation ring")]
    NotInValuationRing,
    #[error("value group {0} is not supported by this operation")]
    UnsupportedGroup(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Valuation of a series: least exponent, +infinity for exact zero, or an
/// unknown-at-least marker for an empty truncated series.
#[derive(Debug, Clone, PartialEq)]
pub enum Valuation {
    Finite(GroupElement),
    PlusInfinity,
    AboveTruncation(GroupElement),
}

impl Valuation {
    /// v >= bound, reading AboveTruncation(b) as "at least b".
    pub fn at_least(&self, bound: &GroupElement) -> bool {
        match self {
            Valuation::PlusInfinity => true,
            Valuation::Finite(g) => {
                g.cmp_in_group(bound).map(|o| o != Ordering::Less).unwrap_or(false)
            }
            Valuation::AboveTruncation(b) => {
                b.cmp_in_group(bound).map(|o| o != Ordering::Less).unwrap_or(false)
            }
        }
    }

    pub fn finite(&self) -> Option<&GroupElement> {
        match self {
            Valuation::Finite(g) => Some(g),
            _ => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(g) => write!(f, "{}", g),
            Valuation::PlusInfinity => write!(f, "+infinity"),
            Valuation::AboveTruncation(g) => write!(f, ">= {}", g),
        }
    }
}

/// Term list sorted strictly increasing by exponent, no zero coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct HahnSeries<E> {
    terms: Vec<(GroupElement, E)>,
    trunc: Option<GroupElement>,
}

impl<E> HahnSeries<E> {
    /// The exact zero, identical in every Hahn field.
    pub fn exact_zero() -> Self {
        HahnSeries {
            terms: vec![],
            trunc: None,
        }
    }

    pub fn terms(&self) -> &[(GroupElement, E)] {
        &self.terms
    }

    pub fn truncation(&self) -> Option<&GroupElement> {
        self.trunc.as_ref()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.terms.is_empty() && self.trunc.is_none()
    }

    pub fn is_empty_truncated(&self) -> bool {
        self.terms.is_empty() && self.trunc.is_some()
    }
}

/// Result of a constancy test; `exact` is false when the verdict only holds
/// up to the truncation bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constancy {
    pub constant: bool,
    pub exact: bool,
}

/// A Hahn field layer: coefficient field, value group, generator images of
/// the additive map, default truncation bound, display variable.
#[derive(Debug, Clone)]
pub struct HahnField<F: DiffField> {
    pub coeff: F,
    pub group: ValueGroup,
    images: Vec<F::Elem>,
    pub default_bound: GroupElement,
    pub var: &'static str,
}

/// The base field K = k((t^Gamma)) with coefficients in Q or Q(x).
pub type FieldSpec = HahnField<CoeffField>;
pub type Series = HahnSeries<Coeff>;

impl FieldSpec {
    /// Builds the base field from an additive map.
    pub fn new(cmap: &AdditiveMap, default_bound: GroupElement) -> Self {
        assert!(
            default_bound.is_positive(),
            "default truncation bound must be positive"
        );
        HahnField {
            coeff: cmap.field(),
            group: cmap.domain(),
            images: cmap.images().to_vec(),
            default_bound,
            var: "t",
        }
    }

    pub fn additive_map(&self) -> AdditiveMap {
        AdditiveMap::new(self.group, self.coeff, self.images.clone())
            .expect("images validated at construction")
    }
}

impl<F: DiffField> HahnField<F> {
    /// A layer over an arbitrary coefficient field; images must be listed per
    /// canonical generator of the group.
    pub fn layer(
        coeff: F,
        group: ValueGroup,
        images: Vec<F::Elem>,
        default_bound: GroupElement,
        var: &'static str,
    ) -> Self {
        assert_eq!(images.len(), group.generators().len());
        HahnField {
            coeff,
            group,
            images,
            default_bound,
            var,
        }
    }

    /// The additive map of this layer evaluated at gamma.
    pub fn c_eval(&self, gamma: &GroupElement) -> Result<F::Elem, HahnError> {
        if !self.group.admits(gamma) {
            return Err(GroupError::DomainMismatch.into());
        }
        match (self.group, gamma) {
            (ValueGroup::Z, GroupElement::Int(n)) => {
                Ok(self.coeff.scale_rat(&Rat::from_integer(n.clone()), &self.images[0]))
            }
            (ValueGroup::Q, GroupElement::Rat(q)) => {
                Ok(self.coeff.scale_rat(q, &self.images[0]))
            }
            (ValueGroup::FracZ(d), GroupElement::Rat(q)) => {
                let m = q * Rat::from_integer(BigInt::from(d));
                Ok(self.coeff.scale_rat(&m, &self.images[0]))
            }
            (ValueGroup::ZnLex(_), GroupElement::Tuple(v)) => {
                let mut acc = self.coeff.zero();
                for (x, im) in v.iter().zip(&self.images) {
                    let part = self.coeff.scale_rat(&Rat::from_integer(x.clone()), im);
                    acc = self.coeff.add(&acc, &part);
                }
                Ok(acc)
            }
            _ => Err(GroupError::DomainMismatch.into()),
        }
    }

    pub fn zero(&self) -> HahnSeries<F::Elem> {
        HahnSeries {
            terms: vec![],
            trunc: None,
        }
    }

    pub fn one(&self) -> HahnSeries<F::Elem> {
        self.monomial(self.coeff.one(), self.group.zero())
    }

    pub fn from_coeff(&self, c: F::Elem) -> HahnSeries<F::Elem> {
        self.monomial(c, self.group.zero())
    }

    pub fn monomial(&self, c: F::Elem, gamma: GroupElement) -> HahnSeries<F::Elem> {
        assert!(self.group.admits(&gamma), "exponent outside the value group");
        if self.coeff.is_zero(&c) {
            return self.zero();
        }
        HahnSeries {
            terms: vec![(gamma, c)],
            trunc: None,
        }
    }

    /// The cross-section gamma -> t^gamma.
    pub fn cross_section(&self, gamma: &GroupElement) -> HahnSeries<F::Elem> {
        self.monomial(self.coeff.one(), gamma.clone())
    }

    /// An empty series known only up to the bound.
    pub fn big_o(&self, bound: GroupElement) -> HahnSeries<F::Elem> {
        HahnSeries {
            terms: vec![],
            trunc: Some(bound),
        }
    }

    pub fn from_terms(
        &self,
        terms: Vec<(GroupElement, F::Elem)>,
        trunc: Option<GroupElement>,
    ) -> HahnSeries<F::Elem> {
        let mut ts = terms;
        ts.retain(|(_, c)| !self.coeff.is_zero(c));
        ts.sort_by(|a, b| a.0.cmp_in_group(&b.0).expect("exponents from one group"));
        // merge duplicates
        let mut merged: Vec<(GroupElement, F::Elem)> = Vec::with_capacity(ts.len());
        for (g, c) in ts {
            if let Some(last) = merged.last_mut() {
                if last.0 == g {
                    last.1 = self.coeff.add(&last.1, &c);
                    continue;
                }
            }
            merged.push((g, c));
        }
        merged.retain(|(_, c)| !self.coeff.is_zero(c));
        if let Some(b) = &trunc {
            merged.retain(|(g, _)| {
                g.cmp_in_group(b).expect("exponents from one group") == Ordering::Less
            });
        }
        HahnSeries {
            terms: merged,
            trunc,
        }
    }

    pub fn valuation(&self, f: &HahnSeries<F::Elem>) -> Valuation {
        match f.terms.first() {
            Some((g, _)) => Valuation::Finite(g.clone()),
            None => match &f.trunc {
                Some(b) => Valuation::AboveTruncation(b.clone()),
                None => Valuation::PlusInfinity,
            },
        }
    }

    pub fn truncate_at(
        &self,
        f: &HahnSeries<F::Elem>,
        bound: &GroupElement,
    ) -> HahnSeries<F::Elem> {
        let new_trunc = match &f.trunc {
            Some(t) if t.cmp_in_group(bound).expect("one group") == Ordering::Less => t.clone(),
            _ => bound.clone(),
        };
        self.from_terms(f.terms.clone(), Some(new_trunc))
    }

    pub fn add(
        &self,
        f: &HahnSeries<F::Elem>,
        g: &HahnSeries<F::Elem>,
    ) -> HahnSeries<F::Elem> {
        let trunc = match (&f.trunc, &g.trunc) {
            (None, None) => None,
            (Some(a), None) => Some(a.clone()),
            (None, Some(b)) => Some(b.clone()),
            (Some(a), Some(b)) => Some(min_of(a, b)),
        };
        let mut terms = f.terms.clone();
        terms.extend(g.terms.iter().cloned());
        self.from_terms(terms, trunc)
    }

    pub fn neg(&self, f: &HahnSeries<F::Elem>) -> HahnSeries<F::Elem> {
        HahnSeries {
            terms: f
                .terms
                .iter()
                .map(|(g, c)| (g.clone(), self.coeff.neg(c)))
                .collect(),
            trunc: f.trunc.clone(),
        }
    }

    pub fn sub(
        &self,
        f: &HahnSeries<F::Elem>,
        g: &HahnSeries<F::Elem>,
    ) -> HahnSeries<F::Elem> {
        self.add(f, &self.neg(g))
    }

    pub fn scale(&self, c: &F::Elem, f: &HahnSeries<F::Elem>) -> HahnSeries<F::Elem> {
        if self.coeff.is_zero(c) {
            return match &f.trunc {
                None => self.zero(),
                Some(b) => self.big_o(b.clone()),
            };
        }
        self.from_terms(
            f.terms
                .iter()
                .map(|(g, a)| (g.clone(), self.coeff.mul(c, a)))
                .collect(),
            f.trunc.clone(),
        )
    }

    pub fn mul(
        &self,
        f: &HahnSeries<F::Elem>,
        g: &HahnSeries<F::Elem>,
    ) -> HahnSeries<F::Elem> {
        // truncation propagation: error terms F*O(t^b), G*O(t^a), O(t^{a+b})
        let mut bounds: Vec<GroupElement> = Vec::new();
        if let Some(a) = &f.trunc {
            match g.terms.first() {
                Some((vg, _)) => bounds.push(a.add(vg).expect("one group")),
                // empty g: only its own bound (or exact zero) limits anything
                None => {
                    if let Some(b) = &g.trunc {
                        bounds.push(a.add(b).expect("one group"));
                    }
                }
            }
        }
        if let Some(b) = &g.trunc {
            match f.terms.first() {
                Some((vf, _)) => bounds.push(b.add(vf).expect("one group")),
                None => {
                    if let Some(a) = &f.trunc {
                        bounds.push(a.add(b).expect("one group"));
                    }
                }
            }
        }
        if (f.is_exact_zero()) || (g.is_exact_zero()) {
            return self.zero();
        }
        let trunc = bounds
            .into_iter()
            .reduce(|a, b| min_of(&a, &b));
        let mut terms: Vec<(GroupElement, F::Elem)> = Vec::new();
        for (ga, ca) in &f.terms {
            for (gb, cb) in &g.terms {
                terms.push((ga.add(gb).expect("one group"), self.coeff.mul(ca, cb)));
            }
        }
        self.from_terms(terms, trunc)
    }

    pub fn pow(&self, f: &HahnSeries<F::Elem>, e: u32) -> HahnSeries<F::Elem> {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, f);
        }
        acc
    }

    /// Multiplicative inverse. Single terms invert exactly; otherwise the
    /// geometric expansion runs to the input's truncation shifted by -2 v(f),
    /// or to the default bound window for exact input.
    pub fn invert(&self, f: &HahnSeries<F::Elem>) -> Result<HahnSeries<F::Elem>, HahnError> {
        if f.is_exact_zero() {
            return Err(HahnError::DivisionByZero);
        }
        if f.is_empty_truncated() {
            return Err(HahnError::NeedsPrecision(
                f.trunc.as_ref().unwrap().to_string(),
            ));
        }
        let (g0, c0) = f.terms.first().unwrap().clone();
        let c0_inv = self.coeff.invert(&c0)?;
        if f.terms.len() == 1 && f.trunc.is_none() {
            return Ok(self.monomial(c0_inv, g0.neg()));
        }
        // f = c0 t^{g0} (1 + eps), inverse = c0^{-1} t^{-g0} sum (-eps)^k
        let result_trunc = match &f.trunc {
            Some(a) => a.sub(&g0).expect("one group").sub(&g0).expect("one group"),
            None => g0.neg().add(&self.default_bound).expect("one group"),
        };
        let lead = self.monomial(c0.clone(), g0.clone());
        let lead_inv = self.monomial(c0_inv, g0.neg());
        let eps = self.mul(&self.sub(f, &lead), &lead_inv);
        // relative precision window for the geometric sum
        let window = result_trunc.add(&g0).expect("one group");
        let mut acc = self.truncate_at(&self.one(), &window);
        let mut power = acc.clone();
        let neg_eps = self.neg(&eps);
        loop {
            power = self.truncate_at(&self.mul(&power, &neg_eps), &window);
            match self.valuation(&power) {
                Valuation::Finite(_) => acc = self.add(&acc, &power),
                _ => break,
            }
        }
        Ok(self.mul(&lead_inv, &acc))
    }

    pub fn div(
        &self,
        f: &HahnSeries<F::Elem>,
        g: &HahnSeries<F::Elem>,
    ) -> Result<HahnSeries<F::Elem>, HahnError> {
        Ok(self.mul(f, &self.invert(g)?))
    }

    /// The twisted derivation: termwise a' + c(gamma) a.
    pub fn derive(&self, f: &HahnSeries<F::Elem>) -> HahnSeries<F::Elem> {
        let terms = f
            .terms
            .iter()
            .map(|(g, a)| {
                let cg = self.c_eval(g).expect("exponent in group");
                let da = self
                    .coeff
                    .add(&self.coeff.derive(a), &self.coeff.mul(&cg, a));
                (g.clone(), da)
            })
            .collect();
        self.from_terms(terms, f.trunc.clone())
    }

    /// f'/f.
    pub fn dagger(&self, f: &HahnSeries<F::Elem>) -> Result<HahnSeries<F::Elem>, HahnError> {
        self.div(&self.derive(f), f)
    }

    /// The residue morphism into the coefficient field: coefficient at 0.
    pub fn residue(&self, f: &HahnSeries<F::Elem>) -> Result<F::Elem, HahnError> {
        let zero_exp = self.group.zero();
        if let Some(b) = &f.trunc {
            if b.cmp_in_group(&zero_exp)? != Ordering::Greater {
                return Err(HahnError::NeedsPrecision(b.to_string()));
            }
        }
        // terms are sorted, so only the first can sit at or below 0
        match f.terms.first() {
            Some((g, c)) => match g.cmp_in_group(&zero_exp)? {
                Ordering::Less => Err(HahnError::NotInValuationRing),
                Ordering::Equal => Ok(c.clone()),
                Ordering::Greater => Ok(self.coeff.zero()),
            },
            None => Ok(self.coeff.zero()),
        }
    }

    /// Every term satisfies a' + c(gamma) a = 0; a truncated input can only
    /// be certified up to its bound.
    pub fn is_constant(&self, f: &HahnSeries<F::Elem>) -> Constancy {
        let constant = self.derive(f).terms.is_empty();
        Constancy {
            constant,
            exact: f.trunc.is_none(),
        }
    }

    pub fn render(&self, f: &HahnSeries<F::Elem>) -> String {
        if f.is_exact_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (g, c)) in f.terms.iter().enumerate() {
            let (neg, body) = self.render_term(g, c);
            if i == 0 {
                if neg {
                    out.push('-');
                }
                out.push_str(&body);
            } else {
                out.push_str(if neg { " - " } else { " + " });
                out.push_str(&body);
            }
        }
        if let Some(b) = &f.trunc {
            if !out.is_empty() {
                out.push_str(" + ");
            }
            out.push_str(&format!("O({}^{})", self.var, render_exponent(b)));
        }
        out
    }

    fn render_term(&self, g: &GroupElement, c: &F::Elem) -> (bool, String) {
        let one = self.coeff.one();
        let minus_one = self.coeff.neg(&one);
        let (neg, mag) = if c == &minus_one {
            (true, None)
        } else if c == &one {
            (false, None)
        } else {
            let s = self.coeff.render(c);
            if s.starts_with('-') {
                // pull the sign out and re-render the magnitude
                (true, Some(self.coeff.render(&self.coeff.neg(c))))
            } else {
                (false, Some(s))
            }
        };
        let var_part = if g.is_zero() {
            None
        } else {
            let e = render_exponent(g);
            Some(if e == "1" {
                self.var.to_string()
            } else {
                format!("{}^{}", self.var, e)
            })
        };
        let body = match (mag, var_part) {
            (None, None) => "1".to_string(),
            (None, Some(v)) => v,
            (Some(m), None) => m,
            (Some(m), Some(v)) => {
                let wrapped = if m.contains(" + ") || m.contains(" - ") || m[1..].contains(['+', '-'])
                {
                    format!("({})", m)
                } else {
                    m
                };
                format!("{}*{}", wrapped, v)
            }
        };
        (neg, body)
    }
}

fn render_exponent(g: &GroupElement) -> String {
    match g {
        GroupElement::Int(n) => n.to_string(),
        GroupElement::Rat(q) => {
            if q.is_integer() {
                q.to_integer().to_string()
            } else {
                format!("({}/{})", q.numer(), q.denom())
            }
        }
        GroupElement::Tuple(_) => g.to_string(),
    }
}

fn min_of(a: &GroupElement, b: &GroupElement) -> GroupElement {
    match a.cmp_in_group(b).expect("one group") {
        Ordering::Greater => b.clone(),
        _ => a.clone(),
    }
}

/// A Hahn field is itself a differential field, so layers nest.
impl<F: DiffField> DiffField for HahnField<F> {
    type Elem = HahnSeries<F::Elem>;

    fn zero(&self) -> Self::Elem {
        HahnField::zero(self)
    }

    fn one(&self) -> Self::Elem {
        HahnField::one(self)
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        a.is_exact_zero()
    }

    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        HahnField::add(self, a, b)
    }

    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        HahnField::neg(self, a)
    }

    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        HahnField::mul(self, a, b)
    }

    fn invert(&self, a: &Self::Elem) -> Result<Self::Elem, FieldError> {
        HahnField::invert(self, a).map_err(|e| match e {
            HahnError::DivisionByZero => FieldError::DivisionByZero,
            _ => FieldError::NeedsPrecision,
        })
    }

    fn derive(&self, a: &Self::Elem) -> Self::Elem {
        HahnField::derive(self, a)
    }

    fn scale_rat(&self, q: &Rat, a: &Self::Elem) -> Self::Elem {
        let c = self.coeff.from_rat(q);
        self.scale(&c, a)
    }

    fn from_rat(&self, q: &Rat) -> Self::Elem {
        self.from_coeff(self.coeff.from_rat(q))
    }

    fn render(&self, a: &Self::Elem) -> String {
        HahnField::render(self, a)
    }
}

// ---------------------------------------------------------------------------
// The dagger equation a† = u over the base field
// ---------------------------------------------------------------------------

/// Structural reason no a with a† = u exists for any valuation.
#[derive(Debug, Clone, PartialEq)]
pub enum UnsatCertificate {
    /// u - c(m) has a nonzero polynomial part for every m in the group.
    PolynomialPartForAllM { u_part: Poly, image_part: Poly },
    /// Only one m makes the polynomial part vanish, and membership fails.
    UniqueCandidateFails {
        m: GroupElement,
        reason: NonMemberReason,
    },
}

impl fmt::Display for UnsatCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnsatCertificate::PolynomialPartForAllM { u_part, image_part } => write!(
                f,
                "({}) - m*({}) has a nonzero polynomial part for every integer m",
                u_part, image_part
            ),
            UnsatCertificate::UniqueCandidateFails { m, reason } => write!(
                f,
                "the only admissible valuation is m = {}, where membership fails: {}",
                m, reason
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DaggerSolveOutcome {
    /// a = f t^m with a† = u.
    Solution(Series),
    Unsat(UnsatCertificate),
    /// No solution with |m| within the search bound; nothing structural found.
    Unknown { searched: u64 },
}

impl FieldSpec {
    /// Decides existence of a = d t^m (1 + eps) with a† = u, for u in k.
    /// Searching reduces to membership of u - c(m) in k†.
    pub fn solve_dagger(&self, u: &Coeff, k_bound: u64) -> Result<DaggerSolveOutcome, HahnError> {
        let d = match self.group {
            ValueGroup::Z => 1u64,
            ValueGroup::FracZ(d) => d,
            g => return Err(HahnError::UnsupportedGroup(g.name())),
        };
        if self.coeff == CoeffField::Q {
            // k† = {0}: a† = u solvable iff u = c(m) for some m
            let w = &self.images[0];
            if w.is_zero() {
                return if u.is_zero() {
                    Ok(DaggerSolveOutcome::Solution(self.one()))
                } else {
                    Ok(DaggerSolveOutcome::Unsat(
                        UnsatCertificate::PolynomialPartForAllM {
                            u_part: u.polynomial_part(),
                            image_part: Poly::zero(),
                        },
                    ))
                };
            }
            let ratio = u.div(w).unwrap();
            if let Some(j) = ratio.as_rat().filter(|r| r.is_integer()) {
                let m = frac_element(j.to_integer(), d);
                return Ok(DaggerSolveOutcome::Solution(self.cross_section(&m)));
            }
            return Ok(DaggerSolveOutcome::Unsat(
                UnsatCertificate::PolynomialPartForAllM {
                    u_part: u.polynomial_part(),
                    image_part: w.polynomial_part(),
                },
            ));
        }

        let w = self.images[0].clone(); // c of the generator; c(j/d) = j w
        let pu = u.polynomial_part();
        let pw = w.polynomial_part();
        if pw.is_zero() {
            if !pu.is_zero() {
                return Ok(DaggerSolveOutcome::Unsat(
                    UnsatCertificate::PolynomialPartForAllM {
                        u_part: pu,
                        image_part: pw,
                    },
                ));
            }
            // scan j by increasing |j|
            let limit = (k_bound * d) as i64;
            let mut searched = 0u64;
            let mut order: Vec<i64> = vec![0];
            for j in 1..=limit {
                order.push(j);
                order.push(-j);
            }
            for j in order {
                searched += 1;
                let cand = u.sub(&w.scale(&Rat::from_integer(BigInt::from(j))));
                if let DaggerCertificate::Member { witness, .. } =
                    log_derivative_membership(&cand).map_err(FieldError::from)?
                {
                    let m = frac_element(BigInt::from(j), d);
                    return Ok(DaggerSolveOutcome::Solution(
                        self.mul(&self.from_coeff(witness), &self.cross_section(&m)),
                    ));
                }
            }
            return Ok(DaggerSolveOutcome::Unknown { searched });
        }
        // pw nonzero: the polynomial part of u - j w vanishes for at most one
        // rational j, which must be an integer
        let k = (0..pw.coeffs().len())
            .find(|&k| !pw.coeff(k).is_zero())
            .unwrap();
        let j0 = pu.coeff(k) / pw.coeff(k);
        let matches = pu == pw.scale(&j0);
        if !matches || !j0.is_integer() {
            return Ok(DaggerSolveOutcome::Unsat(
                UnsatCertificate::PolynomialPartForAllM {
                    u_part: pu,
                    image_part: pw,
                },
            ));
        }
        let j = j0.to_integer();
        let m = frac_element(j.clone(), d);
        let cand = u.sub(&w.scale(&Rat::from_integer(j)));
        match log_derivative_membership(&cand).map_err(FieldError::from)? {
            DaggerCertificate::Member { witness, .. } => Ok(DaggerSolveOutcome::Solution(
                self.mul(&self.from_coeff(witness), &self.cross_section(&m)),
            )),
            DaggerCertificate::NonMember(reason) => Ok(DaggerSolveOutcome::Unsat(
                UnsatCertificate::UniqueCandidateFails { m, reason },
            )),
        }
    }
}

fn frac_element(j: BigInt, d: u64) -> GroupElement {
    if d == 1 {
        GroupElement::Int(j)
    } else {
        GroupElement::Rat(Rat::new(j, BigInt::from(d)))
    }
}
