//! Differential polynomials over the valuation ring, reduction to the residue
//! field, quasi-linearity, and the effective lifting loop.
//!
//! A quasi-linear P has reduction b + L with L a nonzero linear operator over
//! k. Step zero solves L(z) = -b in k; while the residual r = P(y) has
//! valuation gamma below the bound, the correction u t^gamma solves the
//! gamma-twist of the same L against the leading coefficient of r. Each step
//! strictly increases v(P(y)), and exponents live in (1/d)Z, so the loop
//! reaches any finite bound.

use crate::coeff::Coeff;
use crate::group::{GroupElement, ValueGroup};
use crate::hahn::{FieldSpec, HahnError, Series, Valuation};
use crate::linop::{solve_linear, LinearDiffOperator, SolveError};
use crate::poly::Rat;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

/// Exponent vector over Y, Y', ..., trailing zeros trimmed.
pub type MultiIndex = Vec<u32>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LiftError {
    #[error("the reduction does not have total degree 1")]
    NotQuasiLinear,
    #[error("residue equation {operator} = {rhs} at level {gamma} has no solution in k")]
    LinearSurjectivityFailure {
        gamma: GroupElement,
        operator: LinearDiffOperator,
        rhs: Coeff,
    },
    #[error("value group {0} is not supported by the lifting loop")]
    UnsupportedValueGroup(String),
    #[error("coefficient truncation is below the requested bound")]
    PrecisionExhausted,
    #[error("iteration limit exceeded, which indicates an arithmetic bug")]
    IterationLimit,
    #[error("residue of the radicand has no nth root in k")]
    NoRootInResidue,
    #[error("the radicand series is not constant")]
    NotConstant,
    #[error("valuations do not satisfy v(b) = n v(a)")]
    ValuationMismatch,
    #[error(transparent)]
    Hahn(#[from] HahnError),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Finite sum of monomials in Y, Y', ..., with Hahn series coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffPoly {
    terms: BTreeMap<MultiIndex, Series>,
}

fn trim_index(mut m: MultiIndex) -> MultiIndex {
    while m.last() == Some(&0) {
        m.pop();
    }
    m
}

pub fn total_degree(m: &MultiIndex) -> u32 {
    m.iter().sum()
}

impl DiffPoly {
    fn single(m: MultiIndex, c: Series) -> Self {
        let mut map: BTreeMap<MultiIndex, Series> = BTreeMap::new();
        if !c.is_exact_zero() {
            map.insert(trim_index(m), c);
        }
        DiffPoly { terms: map }
    }

    /// Sums coefficients on equal monomials under the given field.
    pub fn from_terms(spec: &FieldSpec, terms: Vec<(MultiIndex, Series)>) -> Self {
        let mut map: BTreeMap<MultiIndex, Series> = BTreeMap::new();
        for (m, c) in terms {
            let m = trim_index(m);
            match map.remove(&m) {
                Some(old) => {
                    map.insert(m, spec.add(&old, &c));
                }
                None => {
                    map.insert(m, c);
                }
            }
        }
        map.retain(|_, c| !c.is_exact_zero());
        DiffPoly { terms: map }
    }

    pub fn constant(c: Series) -> Self {
        DiffPoly::single(vec![], c)
    }

    /// The monomial Y^(order).
    pub fn variable(spec: &FieldSpec, order: u32) -> Self {
        let mut m = vec![0u32; order as usize + 1];
        m[order as usize] = 1;
        DiffPoly::single(m, spec.one())
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, Series> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest derivative order appearing.
    pub fn order(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.len() as u32)
            .max()
            .map_or(0, |l| l.saturating_sub(1))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(total_degree).max().unwrap_or(0)
    }

    /// The coefficient series of a monomial, if present.
    pub fn coefficient(&self, m: &MultiIndex) -> Option<&Series> {
        self.terms.get(&trim_index(m.clone()))
    }

    pub fn add(&self, spec: &FieldSpec, other: &DiffPoly) -> DiffPoly {
        let mut terms: Vec<(MultiIndex, Series)> = Vec::new();
        for (m, c) in &self.terms {
            terms.push((m.clone(), c.clone()));
        }
        for (m, c) in &other.terms {
            terms.push((m.clone(), c.clone()));
        }
        DiffPoly::from_terms(spec, terms)
    }

    pub fn neg(&self, spec: &FieldSpec) -> DiffPoly {
        DiffPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), spec.neg(c)))
                .collect(),
        }
    }

    pub fn mul(&self, spec: &FieldSpec, other: &DiffPoly) -> DiffPoly {
        let mut terms: Vec<(MultiIndex, Series)> = Vec::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let n = ma.len().max(mb.len());
                let mut m = vec![0u32; n];
                for (i, v) in ma.iter().enumerate() {
                    m[i] += v;
                }
                for (i, v) in mb.iter().enumerate() {
                    m[i] += v;
                }
                terms.push((m, spec.mul(ca, cb)));
            }
        }
        DiffPoly::from_terms(spec, terms)
    }

    /// Substitutes y, computing the twisted derivatives of y once.
    pub fn evaluate(&self, spec: &FieldSpec, y: &Series) -> Series {
        let order = self.order();
        let mut derivatives: Vec<Series> = Vec::with_capacity(order as usize + 1);
        derivatives.push(y.clone());
        for _ in 0..order {
            let next = spec.derive(derivatives.last().unwrap());
            derivatives.push(next);
        }
        let mut acc = spec.zero();
        for (m, c) in &self.terms {
            let mut prod = c.clone();
            for (i, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    prod = spec.mul(&prod, &derivatives[i]);
                }
            }
            acc = spec.add(&acc, &prod);
        }
        acc
    }

    /// Coefficientwise residue morphism into k{Y}.
    pub fn reduce(&self, spec: &FieldSpec) -> Result<ResidueDiffPoly, HahnError> {
        let mut terms: BTreeMap<MultiIndex, Coeff> = BTreeMap::new();
        for (m, c) in &self.terms {
            let r = spec.residue(c)?;
            if !r.is_zero() {
                terms.insert(m.clone(), r);
            }
        }
        Ok(ResidueDiffPoly { terms })
    }

    /// Total degree of the reduction is exactly 1.
    pub fn is_quasi_linear(&self, spec: &FieldSpec) -> Result<bool, HahnError> {
        let red = self.reduce(spec)?;
        Ok(red.total_degree() == 1)
    }

    pub fn render(&self, spec: &FieldSpec) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts: Vec<String> = Vec::new();
        for (m, c) in &self.terms {
            let mut factors: Vec<String> = Vec::new();
            let coeff_str = spec.render(c);
            if coeff_str != "1" || total_degree(m) == 0 {
                if coeff_str.contains(" + ") || coeff_str.contains(" - ") {
                    factors.push(format!("({})", coeff_str));
                } else {
                    factors.push(coeff_str);
                }
            }
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let y = format!("Y{}", "'".repeat(i));
                if e == 1 {
                    factors.push(y);
                } else {
                    factors.push(format!("{}^{}", y, e));
                }
            }
            parts.push(factors.join("*"));
        }
        parts.join(" + ")
    }
}

/// Image of a differential polynomial in k{Y}.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidueDiffPoly {
    terms: BTreeMap<MultiIndex, Coeff>,
}

impl ResidueDiffPoly {
    pub fn terms(&self) -> &BTreeMap<MultiIndex, Coeff> {
        &self.terms
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(total_degree).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The degree-1 part as a linear operator (a_i = coefficient of Y^(i)).
    pub fn degree_one_operator(&self) -> LinearDiffOperator {
        let mut coeffs: Vec<Coeff> = Vec::new();
        for (m, c) in &self.terms {
            if total_degree(m) != 1 {
                continue;
            }
            let i = m.iter().position(|&e| e == 1).unwrap();
            if coeffs.len() <= i {
                coeffs.resize(i + 1, Coeff::zero());
            }
            coeffs[i] = c.clone();
        }
        LinearDiffOperator::new(coeffs)
    }

    pub fn degree_zero_part(&self) -> Coeff {
        self.terms.get(&vec![]).cloned().unwrap_or_else(Coeff::zero)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiftStep {
    pub gamma: GroupElement,
    pub operator: LinearDiffOperator,
    pub rhs: Coeff,
    pub solution: Coeff,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LiftResult {
    pub witness: Series,
    pub steps: Vec<LiftStep>,
    /// P(witness) is exactly zero, not merely below the bound.
    pub exact: bool,
    pub residual_valuation: Valuation,
}

/// Successive approximation of a zero of a quasi-linear P up to the bound.
pub fn dhensel_lift(
    spec: &FieldSpec,
    p: &DiffPoly,
    bound: &GroupElement,
) -> Result<LiftResult, LiftError> {
    let d = match spec.group {
        ValueGroup::Z => 1u64,
        ValueGroup::FracZ(d) => d,
        g => return Err(LiftError::UnsupportedValueGroup(g.name())),
    };
    assert!(bound.is_positive(), "lift bound must be positive");
    let red = p.reduce(spec)?;
    if red.total_degree() != 1 {
        return Err(LiftError::NotQuasiLinear);
    }
    let lbar = red.degree_one_operator();
    let bbar = red.degree_zero_part();

    let max_steps = lift_step_cap(d, bound);
    let mut steps: Vec<LiftStep> = Vec::new();

    // step 0: solve the residue equation
    let rhs0 = bbar.neg();
    let sol0 = solve_linear(spec.coeff, &lbar, &rhs0)?;
    let z = sol0
        .particular
        .ok_or_else(|| LiftError::LinearSurjectivityFailure {
            gamma: spec.group.zero(),
            operator: lbar.clone(),
            rhs: rhs0.clone(),
        })?;
    steps.push(LiftStep {
        gamma: spec.group.zero(),
        operator: lbar.clone(),
        rhs: rhs0,
        solution: z.clone(),
    });
    let mut y = spec.from_coeff(z);

    let mut last_gamma: Option<GroupElement> = None;
    loop {
        if steps.len() > max_steps {
            return Err(LiftError::IterationLimit);
        }
        let r = p.evaluate(spec, &y);
        let val = spec.valuation(&r);
        match &val {
            Valuation::PlusInfinity => {
                return Ok(LiftResult {
                    witness: y,
                    steps,
                    exact: true,
                    residual_valuation: val,
                });
            }
            Valuation::AboveTruncation(b) => {
                if b.cmp_in_group(bound).expect("one group") == Ordering::Less {
                    return Err(LiftError::PrecisionExhausted);
                }
                return Ok(LiftResult {
                    witness: y,
                    steps,
                    exact: false,
                    residual_valuation: val,
                });
            }
            Valuation::Finite(gamma) => {
                if gamma.cmp_in_group(bound).expect("one group") != Ordering::Less {
                    return Ok(LiftResult {
                        witness: y,
                        steps,
                        exact: false,
                        residual_valuation: val,
                    });
                }
                // strict progress invariant
                if let Some(lg) = &last_gamma {
                    if gamma.cmp_in_group(lg).expect("one group") != Ordering::Greater {
                        return Err(LiftError::IterationLimit);
                    }
                }
                last_gamma = Some(gamma.clone());

                let rho = r.terms().first().unwrap().1.clone();
                let cg = spec.c_eval(gamma)?;
                let twisted = lbar.twist(spec.coeff, &cg);
                let rhs = rho.neg();
                let sol = solve_linear(spec.coeff, &twisted, &rhs)?;
                let u = sol.particular.ok_or_else(|| {
                    LiftError::LinearSurjectivityFailure {
                        gamma: gamma.clone(),
                        operator: twisted.clone(),
                        rhs: rhs.clone(),
                    }
                })?;
                steps.push(LiftStep {
                    gamma: gamma.clone(),
                    operator: twisted,
                    rhs,
                    solution: u.clone(),
                });
                y = spec.add(&y, &spec.monomial(u, gamma.clone()));
            }
        }
    }
}

fn lift_step_cap(d: u64, bound: &GroupElement) -> usize {
    let steps = match bound {
        GroupElement::Int(n) => n.to_i64().unwrap_or(i64::MAX / 100).unsigned_abs(),
        GroupElement::Rat(q) => {
            let scaled = q * Rat::from_integer(BigInt::from(d));
            scaled.ceil().to_integer().to_i64().unwrap_or(i64::MAX / 100).unsigned_abs()
        }
        GroupElement::Tuple(_) => 100,
    };
    (10u64.saturating_mul(d).saturating_mul(steps.max(1)) as usize).max(100)
}

/// Newton iteration for an nth root of a unit-valuation series, to the bound.
pub fn hensel_nth_root(
    spec: &FieldSpec,
    u: &Series,
    n: u32,
    bound: &GroupElement,
) -> Result<Series, LiftError> {
    assert!(n >= 1);
    assert!(bound.is_positive());
    match spec.valuation(u) {
        Valuation::Finite(g) if g.is_zero() => {}
        _ => return Err(LiftError::ValuationMismatch),
    }
    if let Some(t) = u.truncation() {
        if t.cmp_in_group(bound).expect("one group") == Ordering::Less {
            return Err(LiftError::PrecisionExhausted);
        }
    }
    let pi_u = spec.residue(u)?;
    let root0 = spec
        .coeff
        .nth_root(&pi_u, n)
        .map_err(HahnError::from)?
        .ok_or(LiftError::NoRootInResidue)?;
    let mut y = spec.from_coeff(root0);
    let n_coeff = spec.from_coeff(Coeff::from_int(n as i64));
    for _ in 0..64 {
        let err = spec.sub(&spec.pow(&y, n), u);
        if spec.valuation(&err).at_least(bound) {
            // exact roots stay exact; otherwise record the bound
            if err.is_exact_zero() && y.truncation().is_none() {
                return Ok(y);
            }
            return Ok(spec.truncate_at(&y, bound));
        }
        let deriv = spec.truncate_at(&spec.mul(&n_coeff, &spec.pow(&y, n - 1)), bound);
        let correction = spec.div(&spec.truncate_at(&err, bound), &deriv)?;
        y = spec.truncate_at(&spec.sub(&y, &correction), bound);
    }
    Err(LiftError::IterationLimit)
}

/// Builds w = a y with y an nth root of b/a^n, so w^n = b, v(w) = v(a), and w
/// is constant (to precision). Reproduces the purity argument for
/// henselian fields with real closed or algebraically closed residue field.
pub fn purity_witness(
    spec: &FieldSpec,
    a: &Series,
    b: &Series,
    n: u32,
    bound: &GroupElement,
) -> Result<Series, LiftError> {
    let va = match spec.valuation(a) {
        Valuation::Finite(g) => g,
        _ => return Err(LiftError::ValuationMismatch),
    };
    let vb = match spec.valuation(b) {
        Valuation::Finite(g) => g,
        _ => return Err(LiftError::ValuationMismatch),
    };
    if vb != va.scale_int(&BigInt::from(n)) {
        return Err(LiftError::ValuationMismatch);
    }
    let an = spec.pow(a, n);
    let u = spec.div(b, &an)?;
    // the residue-root obstruction is reported before the constancy scan
    let pi_u = spec.residue(&u)?;
    if spec.coeff.nth_root(&pi_u, n).map_err(HahnError::from)?.is_none() {
        return Err(LiftError::NoRootInResidue);
    }
    if !spec.is_constant(b).constant {
        return Err(LiftError::NotConstant);
    }
    let y = hensel_nth_root(spec, &u, n, bound)?;
    Ok(spec.mul(a, &y))
}

impl fmt::Display for LiftStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "level {}: solve ({}) = {} -> {}",
            self.gamma, self.operator, self.rhs, self.solution
        )
    }
}
