//! Exact factorization in `Q[x]` at desk scale.
//!
//! Clears denominators, runs Yun squarefree decomposition, factors each
//! squarefree part over the integers by the classical route: Cantor-Zassenhaus
//! modulo a small prime, linear Hensel lifting past the Mignotte bound, then
//! subset recombination. Inputs above [`MAX_FACTOR_DEGREE`] are rejected.

use crate::poly::{Poly, Rat};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Hard degree cap for factorization inputs.
pub const MAX_FACTOR_DEGREE: usize = 32;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FactorError {
    #[error("polynomial degree {0} exceeds the factorization limit {MAX_FACTOR_DEGREE}")]
    DegreeLimit(usize),
    #[error("factorization budget exceeded")]
    TooHard,
}

/// `f = unit * prod factors[i].0 ^ factors[i].1` with monic irreducible factors,
/// sorted by (degree, coefficients).
#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub unit: Rat,
    pub factors: Vec<(Poly, u32)>,
}

pub fn factor_poly(f: &Poly) -> Result<Factorization, FactorError> {
    if let Some(c) = f.as_constant() {
        return Ok(Factorization {
            unit: c,
            factors: vec![],
        });
    }
    let deg = f.degree().unwrap();
    if deg > MAX_FACTOR_DEGREE {
        return Err(FactorError::DegreeLimit(deg));
    }
    let unit = f.leading();
    let mut factors: Vec<(Poly, u32)> = Vec::new();
    for (sf, mult) in f.squarefree_decomposition() {
        for irr in factor_squarefree(&sf)? {
            factors.push((irr, mult));
        }
    }
    factors.sort_by(|a, b| cmp_poly(&a.0, &b.0));
    Ok(Factorization { unit, factors })
}

fn cmp_poly(a: &Poly, b: &Poly) -> std::cmp::Ordering {
    a.degree_i()
        .cmp(&b.degree_i())
        .then_with(|| a.coeffs().cmp(b.coeffs()))
}

/// Factors a monic squarefree non-constant polynomial into monic irreducibles.
fn factor_squarefree(f: &Poly) -> Result<Vec<Poly>, FactorError> {
    let (_, g) = f.to_integer_primitive();
    let deg = g.len() - 1;
    if deg == 1 {
        return Ok(vec![f.monic()]);
    }
    // Pick the usable prime giving the fewest modular factors.
    let mut best: Option<(u64, Vec<Vec<u64>>)> = None;
    let mut tried = 0;
    for &p in SMALL_PRIMES {
        let lc_mod = (g.last().unwrap().mod_floor(&BigInt::from(p)))
            .to_u64()
            .unwrap();
        if lc_mod == 0 {
            continue;
        }
        let gp = reduce_mod(&g, p);
        if !modp_squarefree(&gp, p) {
            continue;
        }
        tried += 1;
        let fs = modp_factor(&gp, p);
        let better = best.as_ref().map_or(true, |(_, b)| fs.len() < b.len());
        if better {
            best = Some((p, fs));
        }
        if tried >= 4 || best.as_ref().unwrap().1.len() == 1 {
            break;
        }
    }
    let (p, modular) = best.ok_or(FactorError::TooHard)?;
    if modular.len() == 1 {
        return Ok(vec![f.monic()]);
    }

    // Lift to p^k beyond twice the Mignotte bound.
    let lc = g.last().unwrap().clone();
    let norm2 = l2_norm_bound(&g);
    let bound: BigInt = (BigInt::one() << (deg + 1)) * &norm2 * lc.abs();
    let mut pk = BigInt::from(p);
    let mut k = 1u32;
    while pk <= &bound * 2 {
        pk *= p;
        k += 1;
    }
    let lifted = hensel_lift(&g, &modular, p, k)?;

    // Subset recombination.
    let mut pool: Vec<Vec<BigInt>> = lifted;
    let mut target = g;
    let mut found: Vec<Poly> = Vec::new();
    let mut budget: u64 = 2_000_000;
    let mut size = 1usize;
    'outer: while 2 * size <= pool.len() {
        let mut combo = Combinations::new(pool.len(), size);
        while let Some(idx) = combo.next() {
            budget = budget.checked_sub(1).ok_or(FactorError::TooHard)?;
            if budget == 0 {
                return Err(FactorError::TooHard);
            }
            let cand = candidate(&target, &pool, idx, &pk);
            if let Some((factor, quotient)) = try_divide(&target, &cand) {
                found.push(Poly::from_integer_coeffs(&factor).monic());
                // remove used modular factors, keep searching at this size
                let mut keep = Vec::new();
                for (i, item) in pool.iter().enumerate() {
                    if !idx.contains(&i) {
                        keep.push(item.clone());
                    }
                }
                pool = keep;
                target = quotient;
                if target.len() <= 1 {
                    break 'outer;
                }
                continue 'outer;
            }
        }
        size += 1;
    }
    if target.len() > 1 {
        found.push(Poly::from_integer_coeffs(&target).monic());
    }
    found.sort_by(cmp_poly);
    Ok(found)
}

/// lc(target) * product of chosen lifted factors, symmetric mod p^k, primitive.
fn candidate(target: &[BigInt], pool: &[Vec<BigInt>], idx: &[usize], pk: &BigInt) -> Vec<BigInt> {
    let mut prod = vec![target.last().unwrap().mod_floor(pk)];
    for &i in idx {
        prod = zmul_mod(&prod, &pool[i], pk);
    }
    let half = pk / 2;
    let sym: Vec<BigInt> = prod
        .iter()
        .map(|c| {
            if c > &half {
                c - pk
            } else {
                c.clone()
            }
        })
        .collect();
    zprimitive(&sym)
}

/// Exact division test over Z on primitive polynomials.
fn try_divide(target: &[BigInt], cand: &[BigInt]) -> Option<(Vec<BigInt>, Vec<BigInt>)> {
    if cand.len() <= 1 || cand.len() > target.len() {
        return None;
    }
    let a = Poly::from_integer_coeffs(target);
    let b = Poly::from_integer_coeffs(cand);
    let (q, r) = a.divrem(&b);
    if !r.is_zero() {
        return None;
    }
    let (_, qi) = q.to_integer_primitive();
    Some((cand.to_vec(), qi))
}

fn l2_norm_bound(g: &[BigInt]) -> BigInt {
    let sum: BigInt = g.iter().map(|c| c * c).sum();
    sum.sqrt() + 1
}

fn zprimitive(v: &[BigInt]) -> Vec<BigInt> {
    let mut v: Vec<BigInt> = v.to_vec();
    while v.last().map_or(false, |c| c.is_zero()) {
        v.pop();
    }
    if v.is_empty() {
        return v;
    }
    let mut g = BigInt::zero();
    for c in &v {
        g = g.gcd(c);
    }
    if v.last().unwrap().is_negative() {
        g = -g;
    }
    v.iter().map(|c| c / &g).collect()
}

fn zmul_mod(a: &[BigInt], b: &[BigInt], m: &BigInt) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    for c in out.iter_mut() {
        *c = c.mod_floor(m);
    }
    out
}

// ---------------------------------------------------------------------------
// Hensel lifting: monic factorization of lc^-1 * g from mod p to mod p^k.
// ---------------------------------------------------------------------------

fn hensel_lift(
    g: &[BigInt],
    modular: &[Vec<u64>],
    p: u64,
    k: u32,
) -> Result<Vec<Vec<BigInt>>, FactorError> {
    let pb = BigInt::from(p);
    // monic image of g mod p^k
    let mut pk = BigInt::one();
    for _ in 0..k {
        pk *= &pb;
    }
    let lc_inv_pk = mod_inverse(&g.last().unwrap().mod_floor(&pk), &pk).ok_or(FactorError::TooHard)?;
    let ghat: Vec<BigInt> = g.iter().map(|c| (c * &lc_inv_pk).mod_floor(&pk)).collect();

    // current factors as BigInt vectors
    let mut factors: Vec<Vec<BigInt>> = modular
        .iter()
        .map(|f| f.iter().map(|&c| BigInt::from(c)).collect())
        .collect();

    // Bezout data mod p: s_i = (prod_{j != i} f_j)^-1 mod f_i
    let mut bezout: Vec<Vec<u64>> = Vec::new();
    for (i, fi) in modular.iter().enumerate() {
        let mut others = vec![1u64];
        for (j, fj) in modular.iter().enumerate() {
            if j != i {
                others = pmul(&others, fj, p);
                others = pdivrem(&others, fi, p).1;
            }
        }
        let inv = pinvmod(&others, fi, p).ok_or(FactorError::TooHard)?;
        bezout.push(inv);
    }

    let mut pj = pb.clone(); // current modulus p^j
    for _ in 1..k {
        let pj1 = &pj * &pb;
        // error term e = (ghat - prod factors) / p^j  (mod p)
        let mut prod = vec![BigInt::one()];
        for f in &factors {
            prod = zmul_mod(&prod, f, &pj1);
        }
        let mut e: Vec<BigInt> = Vec::with_capacity(ghat.len());
        for i in 0..ghat.len() {
            let gi = ghat.get(i).cloned().unwrap_or_else(BigInt::zero);
            let pi = prod.get(i).cloned().unwrap_or_else(BigInt::zero);
            e.push((gi - pi).mod_floor(&pj1) / &pj);
        }
        let e_mod: Vec<u64> = e
            .iter()
            .map(|c| c.mod_floor(&pb).to_u64().unwrap())
            .collect();
        // delta_i = e * s_i mod f_i (mod p); factor_i += p^j * delta_i
        for (i, f) in factors.iter_mut().enumerate() {
            let fi_mod = reduce_big_mod(f, p);
            let r = pdivrem(&pnorm(e_mod.clone()), &fi_mod, p).1;
            let delta = pdivrem(&pmul(&r, &bezout[i], p), &fi_mod, p).1;
            for (d, &c) in delta.iter().enumerate() {
                if c != 0 {
                    f[d] = (&f[d] + &pj * BigInt::from(c)).mod_floor(&pj1);
                }
            }
        }
        pj = pj1;
    }
    Ok(factors)
}

fn reduce_big_mod(f: &[BigInt], p: u64) -> Vec<u64> {
    pnorm(
        f.iter()
            .map(|c| c.mod_floor(&BigInt::from(p)).to_u64().unwrap())
            .collect(),
    )
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let e = a.extended_gcd(m);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(m))
}

fn reduce_mod(g: &[BigInt], p: u64) -> Vec<u64> {
    pnorm(
        g.iter()
            .map(|c| c.mod_floor(&BigInt::from(p)).to_u64().unwrap())
            .collect(),
    )
}

// ---------------------------------------------------------------------------
// Polynomial arithmetic over F_p, coefficients ascending, no trailing zeros.
// ---------------------------------------------------------------------------

const SMALL_PRIMES: &[u64] = &[
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127, 131, 137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193,
    197, 199, 211, 223, 227, 229, 233,
];

fn pnorm(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn psub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut v = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        v.push((x + p - y) % p);
    }
    pnorm(v)
}

fn pmul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut v = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            v[i + j] = (v[i + j] + (x as u128 * y as u128 % p as u128) as u64) % p;
        }
    }
    pnorm(v)
}

fn pscale(a: &[u64], c: u64, p: u64) -> Vec<u64> {
    pnorm(
        a.iter()
            .map(|&x| (x as u128 * c as u128 % p as u128) as u64)
            .collect(),
    )
}

fn inv_mod_u64(a: u64, p: u64) -> u64 {
    // Fermat: p prime
    pow_mod_u64(a, p - 2, p)
}

fn pow_mod_u64(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = (acc as u128 * b as u128 % p as u128) as u64;
        }
        b = (b as u128 * b as u128 % p as u128) as u64;
        e >>= 1;
    }
    acc
}

fn pdivrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    assert!(!b.is_empty());
    let db = b.len() - 1;
    let linv = inv_mod_u64(*b.last().unwrap(), p);
    let mut r: Vec<u64> = a.to_vec();
    let mut q = vec![0u64; a.len().saturating_sub(db)];
    while r.len() > db {
        let c = (*r.last().unwrap() as u128 * linv as u128 % p as u128) as u64;
        let k = r.len() - 1 - db;
        if c != 0 {
            q[k] = c;
            for (i, &bc) in b.iter().enumerate() {
                let sub = (bc as u128 * c as u128 % p as u128) as u64;
                r[k + i] = (r[k + i] + p - sub) % p;
            }
        }
        r.pop();
        while r.last() == Some(&0) {
            r.pop();
        }
    }
    (pnorm(q), pnorm(r))
}

fn pgcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    while !b.is_empty() {
        let r = pdivrem(&a, &b, p).1;
        a = b;
        b = r;
    }
    if a.is_empty() {
        return a;
    }
    let linv = inv_mod_u64(*a.last().unwrap(), p);
    pscale(&a, linv, p)
}

fn pderive(a: &[u64], p: u64) -> Vec<u64> {
    if a.len() <= 1 {
        return vec![];
    }
    pnorm(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| (c as u128 * (i as u64 % p) as u128 % p as u128) as u64)
            .collect(),
    )
}

/// Inverse of a mod f in F_p[x], when gcd(a, f) = 1.
fn pinvmod(a: &[u64], f: &[u64], p: u64) -> Option<Vec<u64>> {
    // extended Euclid
    let (mut r0, mut r1) = (f.to_vec(), a.to_vec());
    let (mut s0, mut s1) = (vec![], vec![1u64]);
    while !r1.is_empty() {
        let (q, r) = pdivrem(&r0, &r1, p);
        let s = psub(&s0, &pmul(&q, &s1, p), p);
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    if r0.len() != 1 {
        return None;
    }
    let linv = inv_mod_u64(r0[0], p);
    Some(pdivrem(&pscale(&s0, linv, p), f, p).1)
}

fn modp_squarefree(f: &[u64], p: u64) -> bool {
    if f.len() <= 1 {
        return false;
    }
    let d = pderive(f, p);
    if d.is_empty() {
        return false;
    }
    pgcd(f, &d, p).len() == 1
}

fn ppow_mod_big(base: &[u64], e: &BigUint, f: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut b = pdivrem(base, f, p).1;
    for i in 0..e.bits() {
        if e.bit(i) {
            acc = pdivrem(&pmul(&acc, &b, p), f, p).1;
        }
        b = pdivrem(&pmul(&b, &b, p), f, p).1;
    }
    acc
}

/// Full factorization of a squarefree monic-izable polynomial mod p into
/// monic irreducibles, deterministic output order.
fn modp_factor(f: &[u64], p: u64) -> Vec<Vec<u64>> {
    let linv = inv_mod_u64(*f.last().unwrap(), p);
    let f = pscale(f, linv, p);
    let mut out: Vec<Vec<u64>> = Vec::new();

    // distinct-degree splitting
    let mut rest = f.clone();
    let mut h = vec![0u64, 1]; // x
    let mut d = 0usize;
    let mut stages: Vec<(Vec<u64>, usize)> = Vec::new();
    while rest.len() > 1 {
        d += 1;
        if 2 * d + 1 > rest.len() {
            stages.push((rest.clone(), rest.len() - 1));
            break;
        }
        h = ppow_mod_big(&h, &BigUint::from(p), &rest, p);
        let hx = psub(&h, &[0, 1], p);
        let g = pgcd(&hx, &rest, p);
        if g.len() > 1 {
            stages.push((g.clone(), d));
            rest = pdivrem(&rest, &g, p).0;
            h = pdivrem(&h, &rest, p).1;
        }
    }

    // equal-degree splitting per stage
    let mut rng_state: u64 = 0x9e3779b97f4a7c15;
    for (g, d) in stages {
        split_equal_degree(&g, d, p, &mut rng_state, &mut out);
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

fn split_equal_degree(f: &[u64], d: usize, p: u64, rng: &mut u64, out: &mut Vec<Vec<u64>>) {
    if f.len() - 1 == d {
        out.push(f.to_vec());
        return;
    }
    // exponent (p^d - 1)/2
    let e = (BigUint::from(p).pow(d as u32) - BigUint::one()) / BigUint::from(2u32);
    loop {
        // deterministic pseudo-random polynomial of degree < deg f
        let mut r: Vec<u64> = Vec::with_capacity(f.len() - 1);
        for _ in 0..f.len() - 1 {
            *rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            r.push((*rng >> 16) % p);
        }
        let r = pnorm(r);
        if r.len() <= 1 {
            continue;
        }
        let w = ppow_mod_big(&r, &e, f, p);
        let w1 = psub(&w, &[1], p);
        if w1.is_empty() {
            continue;
        }
        let g = pgcd(&w1, f, p);
        if g.len() > 1 && g.len() < f.len() {
            let q = pdivrem(f, &g, p).0;
            split_equal_degree(&g, d, p, rng, out);
            split_equal_degree(&q, d, p, rng, out);
            return;
        }
    }
}

// ---------------------------------------------------------------------------

struct Combinations {
    n: usize,
    idx: Vec<usize>,
    started: bool,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            idx: (0..k).collect(),
            started: false,
        }
    }

    fn next(&mut self) -> Option<&[usize]> {
        let k = self.idx.len();
        if k > self.n {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.idx);
        }
        let mut i = k;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if self.idx[i] != i + self.n - k {
                break;
            }
        }
        self.idx[i] += 1;
        for j in i + 1..k {
            self.idx[j] = self.idx[j - 1] + 1;
        }
        Some(&self.idx)
    }
}
