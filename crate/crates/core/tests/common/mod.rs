//! Shared generators and independent oracles for the integration suites.
//!
//! Everything here is deterministic: generators draw from seeded ChaCha
//! streams, and the oracles recompute expected values by brute force or by
//! closed formulas rather than through the code paths they check.

#![allow(dead_code)]

use hahnlab::cmap::AdditiveMap;
use hahnlab::coeff::{Coeff, CoeffField};
use hahnlab::factor::factor_poly;
use hahnlab::group::{GroupElement, ValueGroup};
use hahnlab::hahn::{FieldSpec, Series};
use hahnlab::linalg::solve_affine;
use hahnlab::linop::LinearDiffOperator;
use hahnlab::poly::{Poly, Rat};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rat(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

pub fn rand_rat(rng: &mut ChaCha8Rng) -> Rat {
    rat(rng.gen_range(-6..=6), rng.gen_range(1..=4))
}

pub fn rand_nonzero_rat(rng: &mut ChaCha8Rng) -> Rat {
    loop {
        let r = rand_rat(rng);
        if !r.is_zero() {
            return r;
        }
    }
}

pub fn rand_poly(rng: &mut ChaCha8Rng, max_deg: usize) -> Poly {
    let deg = rng.gen_range(0..=max_deg);
    Poly::new((0..=deg).map(|_| rand_rat(rng)).collect())
}

pub fn rand_nonzero_poly(rng: &mut ChaCha8Rng, max_deg: usize) -> Poly {
    loop {
        let p = rand_poly(rng, max_deg);
        if !p.is_zero() {
            return p;
        }
    }
}

/// A random rational function with numerator and denominator degree caps.
pub fn rand_ratfunc(rng: &mut ChaCha8Rng, num_deg: usize, den_deg: usize) -> Coeff {
    let num = rand_poly(rng, num_deg);
    let den = rand_nonzero_poly(rng, den_deg);
    Coeff::new(num, den)
}

pub fn rand_nonzero_ratfunc(rng: &mut ChaCha8Rng, num_deg: usize, den_deg: usize) -> Coeff {
    loop {
        let f = rand_ratfunc(rng, num_deg, den_deg);
        if !f.is_zero() {
            return f;
        }
    }
}

pub fn rand_coeff(rng: &mut ChaCha8Rng, field: CoeffField) -> Coeff {
    match field {
        CoeffField::Q => Coeff::from_rat(rand_rat(rng)),
        CoeffField::Qx => rand_ratfunc(rng, 2, 2),
    }
}

/// Builds the base Hahn field over Z with the given c(1) image.
pub fn spec_z(field: CoeffField, image: Coeff) -> FieldSpec {
    let cmap = AdditiveMap::new(ValueGroup::Z, field, vec![image]).unwrap();
    FieldSpec::new(&cmap, GroupElement::int(10))
}

/// The four derivation catalogs used by the random-series laws: c = 0, 1, x,
/// and 1/x over Q(x).
pub fn derivation_catalog() -> Vec<(&'static str, FieldSpec)> {
    let inv_x = Coeff::new(Poly::one(), Poly::x());
    vec![
        ("c=0", spec_z(CoeffField::Qx, Coeff::zero())),
        ("c=1", spec_z(CoeffField::Qx, Coeff::one())),
        ("c=x", spec_z(CoeffField::Qx, Coeff::x())),
        ("c=1/x", spec_z(CoeffField::Qx, inv_x)),
    ]
}

/// Random exact series over Z exponents in [lo, hi] with at most n terms.
pub fn rand_series(
    spec: &FieldSpec,
    rng: &mut ChaCha8Rng,
    max_terms: usize,
    lo: i64,
    hi: i64,
) -> Series {
    let n = rng.gen_range(0..=max_terms);
    let mut terms = Vec::new();
    for _ in 0..n {
        let e = rng.gen_range(lo..=hi);
        terms.push((GroupElement::int(e), rand_coeff(rng, spec.coeff)));
    }
    spec.from_terms(terms, None)
}

pub fn rand_nonzero_series(
    spec: &FieldSpec,
    rng: &mut ChaCha8Rng,
    max_terms: usize,
    lo: i64,
    hi: i64,
) -> Series {
    loop {
        let s = rand_series(spec, rng, max_terms, lo, hi);
        if !s.is_exact_zero() {
            return s;
        }
    }
}

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

/// Coefficients of (1 + c t)^(1/n) through t^(bound-1), by the binomial
/// series: sum_k binom(1/n, k) c^k t^k.
pub fn binomial_root_oracle(c: &Rat, n: u32, bound: usize) -> Vec<Rat> {
    let alpha = Rat::new(BigInt::one(), BigInt::from(n));
    let mut out = Vec::with_capacity(bound);
    let mut binom = Rat::one();
    let mut cpow = Rat::one();
    for k in 0..bound {
        out.push(&binom * &cpow);
        let step = (&alpha - Rat::from_integer(BigInt::from(k as i64)))
            / Rat::from_integer(BigInt::from((k + 1) as i64));
        binom *= step;
        cpow *= c;
    }
    out
}

/// Brute-force existence check for rational solutions of A(y) = b with
/// numerator and denominator degree at most `cap`. Candidate denominators are
/// products of the irreducible factors of the leading coefficient and of the
/// right-hand side denominator (rational solutions cannot have poles
/// elsewhere); for each denominator the numerator is solved exactly by linear
/// algebra.
pub fn brute_force_has_rational_solution(
    field: CoeffField,
    op: &LinearDiffOperator,
    rhs: &Coeff,
    cap: usize,
) -> bool {
    assert_eq!(field, CoeffField::Qx);
    // assemble the candidate pole set
    let mut den_common = Poly::one();
    for a in op.coeffs() {
        den_common = lcm(&den_common, a.denom());
    }
    let lead = op.coeffs().last().unwrap().mul(&Coeff::from_poly(den_common.clone()));
    let mut factors: Vec<Poly> = Vec::new();
    for (p, _) in factor_poly(lead.numer()).unwrap().factors {
        if !factors.contains(&p) {
            factors.push(p);
        }
    }
    for (p, _) in factor_poly(rhs.denom()).unwrap().factors {
        if !factors.contains(&p) {
            factors.push(p);
        }
    }
    // enumerate denominators with total degree <= cap
    let mut denominators: Vec<Poly> = Vec::new();
    collect_denominators(&factors, 0, Poly::one(), cap, &mut denominators);
    for den in denominators {
        if try_solve_with_denominator(field, op, rhs, &den, cap) {
            return true;
        }
    }
    false
}

fn collect_denominators(factors: &[Poly], i: usize, acc: Poly, cap: usize, out: &mut Vec<Poly>) {
    if i == factors.len() {
        out.push(acc);
        return;
    }
    let mut current = acc;
    loop {
        collect_denominators(factors, i + 1, current.clone(), cap, out);
        let next = current.mul(&factors[i]);
        if next.degree_i() as usize > cap {
            break;
        }
        current = next;
    }
}

fn try_solve_with_denominator(
    field: CoeffField,
    op: &LinearDiffOperator,
    rhs: &Coeff,
    den: &Poly,
    cap: usize,
) -> bool {
    let _ = field;
    // y = N / den with deg N <= cap. With P_0 = N and
    // P_{i+1} = P_i' den - (i+1) P_i den', one has y^(i) = P_i / den^(i+1),
    // so A(y) = b clears to the polynomial identity
    //   sum_i q_i P_i(N) den^(r-i) * bden = bnum * den^(r+1),
    // linear in the coefficients of N and free of gcd computations.
    let r = op.order().unwrap();
    let mut q0 = Poly::one();
    for a in op.coeffs() {
        q0 = lcm(&q0, a.denom());
    }
    let cleared: Vec<Poly> = op
        .coeffs()
        .iter()
        .map(|a| a.numer().mul(&q0.exact_div(a.denom())))
        .collect();
    let dden = den.derivative();
    let den_pows: Vec<Poly> = {
        let mut v = vec![Poly::one()];
        for _ in 0..=r {
            v.push(v.last().unwrap().mul(den));
        }
        v
    };
    let bnum = rhs.numer().mul(&q0);
    let bden = rhs.denom();
    let target = bnum.mul(&den_pows[r + 1]);

    let mut cols: Vec<Poly> = Vec::with_capacity(cap + 1);
    for k in 0..=cap {
        let mut p_i = Poly::monomial(Rat::one(), k);
        let mut col = Poly::zero();
        for (i, q) in cleared.iter().enumerate() {
            if !q.is_zero() {
                col = col.add(&q.mul(&p_i).mul(&den_pows[r - i]));
            }
            if i < r {
                p_i = p_i
                    .derivative()
                    .mul(den)
                    .sub(&p_i.mul(&dden).scale(&Rat::from_integer(BigInt::from(i as i64 + 1))));
            }
        }
        cols.push(col.mul(bden));
    }
    let rows = cols
        .iter()
        .map(|p| p.coeffs().len())
        .chain([target.coeffs().len(), 1])
        .max()
        .unwrap();
    let mut mat = vec![vec![Rat::zero(); cap + 1]; rows];
    for (j, p) in cols.iter().enumerate() {
        for (i, v) in p.coeffs().iter().enumerate() {
            mat[i][j] = v.clone();
        }
    }
    let mut b = vec![Rat::zero(); rows];
    for (i, v) in target.coeffs().iter().enumerate() {
        b[i] = v.clone();
    }
    solve_affine(&mat, &b).is_some()
}

fn lcm(a: &Poly, b: &Poly) -> Poly {
    a.mul(b).exact_div(&a.gcd(b)).monic()
}

// ---------------------------------------------------------------------------
// Planted quasi-linear instances for the lifting engine
// ---------------------------------------------------------------------------

pub struct PlantedInstance {
    pub spec: FieldSpec,
    pub poly: hahnlab::dhensel::DiffPoly,
    /// Exact zero for nonlinear instances; for linear ones the right-hand side
    /// support determines the lift exactly.
    pub planted: Series,
    pub linear: bool,
    /// Rhs of the linear form A(Y) = g for the oracle comparison.
    pub linear_rhs: Option<(LinearDiffOperator, Series)>,
}

/// A random operator of order <= 2 whose relevant twists all have trivial
/// rational kernels, so canonical solutions are unique and the lift follows
/// the planted data exactly.
fn rand_kernel_free_operator(
    spec: &FieldSpec,
    rng: &mut ChaCha8Rng,
    levels: i64,
) -> LinearDiffOperator {
    'outer: loop {
        let order = rng.gen_range(1..=2usize);
        let mut coeffs: Vec<Coeff> = (0..=order)
            .map(|_| {
                if rng.gen_bool(0.7) {
                    Coeff::from_rat(rand_rat(rng))
                } else {
                    rand_ratfunc(rng, 1, 0)
                }
            })
            .collect();
        if coeffs.last().unwrap().is_zero() {
            *coeffs.last_mut().unwrap() = Coeff::one();
        }
        let op = LinearDiffOperator::new(coeffs);
        if op.order().is_none() || op.order() == Some(0) {
            continue;
        }
        for gamma in 0..=levels {
            let cg = spec.c_eval(&GroupElement::int(gamma)).unwrap();
            let twisted = op.twist(spec.coeff, &cg);
            match hahnlab::linop::solve_linear(spec.coeff, &twisted, &Coeff::zero()) {
                Ok(sol) if sol.kernel.is_empty() => {}
                _ => continue 'outer,
            }
        }
        return op;
    }
}

/// Linear instance P = A(Y) - g with every level equation solvable by
/// construction (g is assembled from images of random coefficients).
pub fn planted_linear_instance(spec: &FieldSpec, rng: &mut ChaCha8Rng) -> PlantedInstance {
    use hahnlab::dhensel::DiffPoly;
    let op = rand_kernel_free_operator(spec, rng, 12);
    let nterms = rng.gen_range(1..=4usize);
    let mut exps: Vec<i64> = Vec::new();
    while exps.len() < nterms {
        let e = rng.gen_range(0..=9i64);
        if !exps.contains(&e) {
            exps.push(e);
        }
    }
    exps.sort();
    let mut g_terms = Vec::new();
    for e in &exps {
        let w = rand_nonzero_ratfunc(rng, 1, 1);
        let cg = spec.c_eval(&GroupElement::int(*e)).unwrap();
        let img = op.twist(spec.coeff, &cg).apply(spec.coeff, &w);
        g_terms.push((GroupElement::int(*e), img));
    }
    let g = spec.from_terms(g_terms, None);
    // P = sum a_i Y^(i) - g
    let mut p = DiffPoly::constant(spec.neg(&g));
    for (i, a) in op.coeffs().iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let term = DiffPoly::constant(spec.from_coeff(a.clone()))
            .mul(spec, &DiffPoly::variable(spec, i as u32));
        p = p.add(spec, &term);
    }
    PlantedInstance {
        spec: spec.clone(),
        poly: p,
        planted: Series::exact_zero(),
        linear: true,
        linear_rhs: Some((op, g)),
    }
}

/// Nonlinear quasi-linear instance with an exact planted zero y*: the
/// nonlinear part has coefficients of positive valuation and P is
/// L(Y) + N(Y) - (L(y*) + N(y*)).
pub fn planted_nonlinear_instance(spec: &FieldSpec, rng: &mut ChaCha8Rng) -> PlantedInstance {
    use hahnlab::dhensel::DiffPoly;
    let op = rand_kernel_free_operator(spec, rng, 12);
    // planted solution in the valuation ring
    let mut y_terms = Vec::new();
    for _ in 0..rng.gen_range(1..=3usize) {
        let e = rng.gen_range(0..=6i64);
        y_terms.push((GroupElement::int(e), Coeff::from_rat(rand_rat(rng))));
    }
    let y_star = spec.from_terms(y_terms, None);
    // linear part as a differential polynomial
    let mut lp = DiffPoly::constant(spec.zero());
    for (i, a) in op.coeffs().iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        let term = DiffPoly::constant(spec.from_coeff(a.clone()))
            .mul(spec, &DiffPoly::variable(spec, i as u32));
        lp = lp.add(spec, &term);
    }
    // nonlinear monomial with small-valuation coefficient
    let val = rng.gen_range(1..=3i64);
    let ncoeff = spec.monomial(
        Coeff::from_rat(rand_nonzero_rat(rng)),
        GroupElement::int(val),
    );
    let choices: [&[u32]; 3] = [&[2], &[1, 1], &[0, 2]];
    let idx = choices[rng.gen_range(0..3)].to_vec();
    let mut npoly = DiffPoly::constant(ncoeff);
    for (i, &e) in idx.iter().enumerate() {
        for _ in 0..e {
            npoly = npoly.mul(spec, &DiffPoly::variable(spec, i as u32));
        }
    }
    let p0 = lp.add(spec, &npoly);
    let at_star = p0.evaluate(spec, &y_star);
    let p = p0.add(spec, &DiffPoly::constant(spec.neg(&at_star)));
    PlantedInstance {
        spec: spec.clone(),
        poly: p,
        planted: y_star,
        linear: false,
        linear_rhs: None,
    }
}
