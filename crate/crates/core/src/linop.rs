//! Linear differential operators over a coefficient field, their twists, and
//! exact rational solutions of A(y) = b.
//!
//! Over Q(x) the solver follows the classical route for linear ODEs: poles of
//! a rational solution sit over the leading coefficient or the right-hand
//! side, local pole orders are bounded by integer roots of the indicial
//! equation at each irreducible, the degree after clearing the universal
//! denominator is bounded by the indicial equation at infinity, and what
//! remains is exact linear algebra on undetermined coefficients.

use crate::coeff::{Coeff, CoeffField, DiffField, FieldError};
use crate::factor::{factor_poly, FactorError};
use crate::linalg::solve_affine;
use crate::poly::{Poly, Rat};
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolveError {
    #[error("the zero operator is not a valid equation")]
    ZeroOperator,
    #[error(transparent)]
    Factor(#[from] FactorError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// a_0 + a_1 D + ... + a_r D^r with trailing zeros trimmed.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearDiffOperator {
    coeffs: Vec<Coeff>,
}

impl LinearDiffOperator {
    pub fn new(mut coeffs: Vec<Coeff>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        LinearDiffOperator { coeffs }
    }

    pub fn zero() -> Self {
        LinearDiffOperator { coeffs: vec![] }
    }

    pub fn identity() -> Self {
        LinearDiffOperator {
            coeffs: vec![Coeff::one()],
        }
    }

    pub fn derivation() -> Self {
        LinearDiffOperator {
            coeffs: vec![Coeff::zero(), Coeff::one()],
        }
    }

    pub fn coeffs(&self) -> &[Coeff] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Coeff {
        self.coeffs.get(i).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Order r, or None for the zero operator.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Sum a_i y^(i) with the i-fold derivation of the field.
    pub fn apply(&self, field: CoeffField, y: &Coeff) -> Coeff {
        let mut acc = Coeff::zero();
        let mut di = y.clone();
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > 0 {
                di = field.derive(&di);
            }
            acc = acc.add(&a.mul(&di));
        }
        acc
    }

    /// Replaces D by D + c0: twist(A, c0)(z) = sum a_i (D + c0)^i (z),
    /// expanded by T_0 = id, T_{i+1}(z) = T_i(z)' + c0 T_i(z).
    pub fn twist(&self, field: CoeffField, c0: &Coeff) -> LinearDiffOperator {
        let mut acc: Vec<Coeff> = vec![Coeff::zero(); self.coeffs.len()];
        // t holds the coefficients of T_i as an operator
        let mut t: Vec<Coeff> = vec![Coeff::one()];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > 0 {
                let mut next: Vec<Coeff> = vec![Coeff::zero(); t.len() + 1];
                for (j, tj) in t.iter().enumerate() {
                    next[j] = next[j].add(&field.derive(tj)).add(&c0.mul(tj));
                    next[j + 1] = next[j + 1].add(tj);
                }
                t = next;
            }
            if !a.is_zero() {
                for (j, tj) in t.iter().enumerate() {
                    acc[j] = acc[j].add(&a.mul(tj));
                }
            }
        }
        LinearDiffOperator::new(acc)
    }

    /// Renders the operator applied to Y, e.g. `(x+1)*Y' + Y`.
    pub fn render_y(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts: Vec<String> = Vec::new();
        for (i, a) in self.coeffs.iter().enumerate().rev() {
            if a.is_zero() {
                continue;
            }
            let yvar = format!("Y{}", "'".repeat(i));
            let (sign, mag) = if a.is_negative_lead() {
                ("-", a.neg())
            } else {
                ("+", a.clone())
            };
            let body = if mag.is_one() {
                yvar
            } else if mag.display_needs_parens() {
                format!("({})*{}", mag, yvar)
            } else {
                format!("{}*{}", mag, yvar)
            };
            if parts.is_empty() {
                parts.push(if sign == "-" {
                    format!("-{}", body)
                } else {
                    body
                });
            } else {
                parts.push(format!(" {} {}", sign, body));
            }
        }
        parts.concat()
    }
}

impl fmt::Display for LinearDiffOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render_y())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSolution {
    /// The canonical particular solution: free coordinates of the
    /// undetermined-coefficient system are zero, so its coordinates along the
    /// kernel basis vanish.
    pub particular: Option<Coeff>,
    pub kernel: Vec<Coeff>,
}

/// Solves A(y) = b for y in the coefficient field.
pub fn solve_linear(
    field: CoeffField,
    op: &LinearDiffOperator,
    rhs: &Coeff,
) -> Result<LinearSolution, SolveError> {
    if op.is_zero() {
        return Err(SolveError::ZeroOperator);
    }
    match field {
        CoeffField::Q => {
            // the derivation vanishes, so A acts as a_0 * id
            let a0 = op.coeff(0);
            if a0.is_zero() {
                Ok(LinearSolution {
                    particular: if rhs.is_zero() {
                        Some(Coeff::zero())
                    } else {
                        None
                    },
                    kernel: vec![Coeff::one()],
                })
            } else {
                Ok(LinearSolution {
                    particular: Some(rhs.div(&a0).unwrap()),
                    kernel: vec![],
                })
            }
        }
        CoeffField::Qx => solve_linear_qx(op, rhs),
    }
}

fn solve_linear_qx(op: &LinearDiffOperator, rhs: &Coeff) -> Result<LinearSolution, SolveError> {
    // clear denominators of the operator
    let mut common = Poly::one();
    for a in op.coeffs() {
        common = lcm_poly(&common, a.denom());
    }
    let cleared: Vec<Poly> = op
        .coeffs()
        .iter()
        .map(|a| {
            a.mul(&Coeff::from_poly(common.clone()))
                .numer()
                .clone()
        })
        .collect();
    let b = rhs.mul(&Coeff::from_poly(common.clone()));

    // candidate poles: irreducible factors of the leading coefficient and of
    // the right-hand side denominator
    let mut places: Vec<Poly> = Vec::new();
    for (p, _) in factor_poly(cleared.last().unwrap())?.factors {
        push_unique(&mut places, p);
    }
    for (p, _) in factor_poly(b.denom())?.factors {
        push_unique(&mut places, p);
    }

    // universal denominator
    let mut denom = Poly::one();
    for p in &places {
        let e = local_pole_bound(&cleared, &b, p);
        if e > 0 {
            denom = denom.mul(&p.pow(e));
        }
    }

    // transformed operator acting on the numerator z, where y = z / denom:
    // c[i][j] are the coefficients of (z/denom)^(i) = sum_j c[i][j] z^(j)
    let u_inv = Coeff::new(Poly::one(), denom.clone());
    let order = op.order().unwrap();
    let mut c: Vec<Vec<Coeff>> = vec![vec![u_inv]];
    for i in 0..order {
        let prev = &c[i];
        let mut next = vec![Coeff::zero(); prev.len() + 1];
        for (j, cj) in prev.iter().enumerate() {
            next[j] = next[j].add(&cj.derive());
            next[j + 1] = next[j + 1].add(cj);
        }
        c.push(next);
    }
    let mut bcoeffs: Vec<Coeff> = vec![Coeff::zero(); order + 1];
    for (i, ai) in cleared.iter().enumerate() {
        let af = Coeff::from_poly(ai.clone());
        for (j, cij) in c[i].iter().enumerate() {
            bcoeffs[j] = bcoeffs[j].add(&af.mul(cij));
        }
    }

    // clear denominators again so everything is polynomial
    let mut dstar = Poly::one();
    for bc in &bcoeffs {
        dstar = lcm_poly(&dstar, bc.denom());
    }
    dstar = lcm_poly(&dstar, b.denom());
    let bhat: Vec<Poly> = bcoeffs
        .iter()
        .map(|bc| bc.mul(&Coeff::from_poly(dstar.clone())).numer().clone())
        .collect();
    let rhat = b.mul(&Coeff::from_poly(dstar.clone())).numer().clone();

    // degree bound from the indicial equation at infinity
    let delta = bhat
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .map(|(j, p)| p.degree_i() - j as i64)
        .max()
        .unwrap();
    let mut inf_indicial = Poly::zero();
    for (j, p) in bhat.iter().enumerate() {
        if !p.is_zero() && p.degree_i() - j as i64 == delta {
            inf_indicial = inf_indicial.add(&falling_factorial(j).scale(&p.leading()));
        }
    }
    let mut n_bound: i64 = -1;
    if !rhat.is_zero() {
        n_bound = n_bound.max(rhat.degree_i() - delta);
    }
    for root in inf_indicial.integer_roots() {
        if root.is_positive() || root.is_zero() {
            n_bound = n_bound.max(root.to_i64().unwrap_or(0));
        }
    }

    if n_bound < 0 {
        return Ok(LinearSolution {
            particular: if rhs.is_zero() {
                Some(Coeff::zero())
            } else {
                None
            },
            kernel: vec![],
        });
    }

    // undetermined coefficients z = z_0 + ... + z_N x^N
    let n = n_bound as usize;
    let mut cols: Vec<Poly> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let mut col = Poly::zero();
        for (j, p) in bhat.iter().enumerate() {
            if j > m || p.is_zero() {
                continue;
            }
            let ff: Rat = (0..j)
                .map(|l| Rat::from_integer(BigInt::from((m - l) as i64)))
                .product();
            if ff.is_zero() {
                continue;
            }
            col = col.add(&p.mul(&Poly::monomial(ff, m - j)));
        }
        cols.push(col);
    }
    let nrows = cols
        .iter()
        .map(|c| c.coeffs().len())
        .chain([rhat.coeffs().len(), 1])
        .max()
        .unwrap();
    let mut mat = vec![vec![Rat::zero(); n + 1]; nrows];
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col.coeffs().iter().enumerate() {
            mat[i][j] = v.clone();
        }
    }
    let mut rvec = vec![Rat::zero(); nrows];
    for (i, v) in rhat.coeffs().iter().enumerate() {
        rvec[i] = v.clone();
    }

    let solved = solve_affine(&mat, &rvec);
    let to_coeff = |z: &[Rat]| -> Coeff {
        Coeff::new(Poly::new(z.to_vec()), denom.clone())
    };
    match solved {
        None => {
            // kernel is still wanted: solve the homogeneous system
            let zeros = vec![Rat::zero(); nrows];
            let (_, basis) = solve_affine(&mat, &zeros).expect("homogeneous is consistent");
            Ok(LinearSolution {
                particular: None,
                kernel: basis.iter().map(|v| to_coeff(v)).collect(),
            })
        }
        Some((part, basis)) => Ok(LinearSolution {
            particular: Some(to_coeff(&part)),
            kernel: basis.iter().map(|v| to_coeff(v)).collect(),
        }),
    }
}

/// Largest admissible pole order of a rational solution at the irreducible p.
fn local_pole_bound(cleared: &[Poly], rhs: &Coeff, p: &Poly) -> u32 {
    let orders: Vec<i64> = cleared.iter().map(|a| nu_p(a, p)).collect();
    let mu = orders
        .iter()
        .enumerate()
        .filter(|(_, &m)| m >= 0)
        .map(|(i, &m)| m - i as i64)
        .min()
        .unwrap();

    // indicial polynomial at p, a polynomial in e with coefficients in Q[x]/(p)
    // evaluated at lambda = -e
    let pbar_prime = p.derivative().rem(p);
    let mut lambda_coeffs: Vec<Poly> = vec![];
    for (i, a) in cleared.iter().enumerate() {
        let m = orders[i];
        if m < 0 || m - (i as i64) != mu {
            continue;
        }
        let mut abar = a.clone();
        for _ in 0..m {
            abar = abar.exact_div(p);
        }
        abar = abar.rem(p);
        let mut scalar = abar;
        for _ in 0..i {
            scalar = scalar.mul(&pbar_prime).rem(p);
        }
        // falling factorial in lambda, then substitute lambda = -e
        let ff = falling_factorial(i);
        let ff_neg = substitute_negated(&ff);
        for (k, ck) in ff_neg.coeffs().iter().enumerate() {
            if lambda_coeffs.len() <= k {
                lambda_coeffs.resize(k + 1, Poly::zero());
            }
            lambda_coeffs[k] = lambda_coeffs[k].add(&scalar.scale(ck)).rem(p);
        }
    }
    // integer roots common to all x-coordinates
    let deg_p = p.degree().unwrap();
    let mut gcd_poly = Poly::zero();
    for s in 0..deg_p {
        let coord = Poly::new(lambda_coeffs.iter().map(|c| c.coeff(s)).collect());
        gcd_poly = gcd_poly.gcd(&coord);
    }
    let mut best: i64 = 0;
    if !gcd_poly.is_constant() {
        for r in gcd_poly.integer_roots() {
            if r.is_positive() {
                best = best.max(r.to_i64().unwrap_or(0));
            }
        }
    }
    if !rhs.is_zero() {
        let forced = mu - nu_p_ratfunc(rhs, p);
        best = best.max(forced);
    }
    best.max(0) as u32
}

/// p-adic order of a polynomial (-1 encodes the zero polynomial).
fn nu_p(a: &Poly, p: &Poly) -> i64 {
    if a.is_zero() {
        return -1;
    }
    let mut a = a.clone();
    let mut n = 0i64;
    loop {
        let (q, r) = a.divrem(p);
        if !r.is_zero() {
            return n;
        }
        a = q;
        n += 1;
    }
}

fn nu_p_ratfunc(f: &Coeff, p: &Poly) -> i64 {
    if f.is_zero() {
        return 0;
    }
    nu_p(f.numer(), p) - nu_p(f.denom(), p)
}

/// lambda (lambda-1) ... (lambda-i+1) as a polynomial.
fn falling_factorial(i: usize) -> Poly {
    let mut acc = Poly::one();
    for l in 0..i {
        acc = acc.mul(&Poly::new(vec![
            -Rat::from_integer(BigInt::from(l as i64)),
            Rat::one(),
        ]));
    }
    acc
}

/// q(lambda) -> q(-e) as a polynomial in e.
fn substitute_negated(q: &Poly) -> Poly {
    Poly::new(
        q.coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| if k % 2 == 1 { -c.clone() } else { c.clone() })
            .collect(),
    )
}

fn lcm_poly(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() || b.is_zero() {
        return Poly::zero();
    }
    a.mul(b).exact_div(&a.gcd(b)).monic()
}

fn push_unique(v: &mut Vec<Poly>, p: Poly) {
    if !v.contains(&p) {
        v.push(p);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{rat_frac, rat_int};

    fn fx(num: &[i64], den: &[i64]) -> Coeff {
        Coeff::new(
            Poly::new(num.iter().map(|&c| rat_int(c)).collect()),
            Poly::new(den.iter().map(|&c| rat_int(c)).collect()),
        )
    }

    fn op(coeffs: &[Coeff]) -> LinearDiffOperator {
        LinearDiffOperator::new(coeffs.to_vec())
    }

    #[test]
    fn apply_examples() {
        // A = D on y = x gives 1
        let d = LinearDiffOperator::derivation();
        assert_eq!(d.apply(CoeffField::Qx, &Coeff::x()), Coeff::one());
        // A = D + 1/x on 1/x gives 0
        let a = op(&[fx(&[1], &[0, 1]), Coeff::one()]);
        assert_eq!(a.apply(CoeffField::Qx, &fx(&[1], &[0, 1])), Coeff::zero());
        // order-0 operator over Q
        let two = op(&[Coeff::from_int(2)]);
        assert_eq!(
            two.apply(CoeffField::Q, &Coeff::from_int(3)),
            Coeff::from_int(6)
        );
    }

    #[test]
    fn twist_examples() {
        let d = LinearDiffOperator::derivation();
        // twist(D, 1) = D + 1
        assert_eq!(
            d.twist(CoeffField::Qx, &Coeff::one()),
            op(&[Coeff::one(), Coeff::one()])
        );
        // twist(D^2, 1) = D^2 + 2D + 1
        let d2 = op(&[Coeff::zero(), Coeff::zero(), Coeff::one()]);
        assert_eq!(
            d2.twist(CoeffField::Qx, &Coeff::one()),
            op(&[Coeff::one(), Coeff::from_int(2), Coeff::one()])
        );
        // twist by 0 is the identity transformation
        assert_eq!(d.twist(CoeffField::Qx, &Coeff::zero()), d);
    }

    #[test]
    fn solve_first_order_with_polynomial_rhs() {
        // y' - y = x has particular -x-1 and empty kernel
        let a = op(&[Coeff::from_int(-1), Coeff::one()]);
        let sol = solve_linear(CoeffField::Qx, &a, &Coeff::x()).unwrap();
        assert_eq!(sol.particular, Some(fx(&[-1, -1], &[1])));
        assert!(sol.kernel.is_empty());
    }

    #[test]
    fn solve_derivation_kernel() {
        // y' = 0: particular 0, kernel {1}
        let d = LinearDiffOperator::derivation();
        let sol = solve_linear(CoeffField::Qx, &d, &Coeff::zero()).unwrap();
        assert_eq!(sol.particular, Some(Coeff::zero()));
        assert_eq!(sol.kernel, vec![Coeff::one()]);
    }

    #[test]
    fn solve_trivial_field() {
        // over Q the derivation is zero, so D has no particular for b = 1
        let d = LinearDiffOperator::derivation();
        let sol = solve_linear(CoeffField::Q, &d, &Coeff::one()).unwrap();
        assert_eq!(sol.particular, None);
        assert_eq!(sol.kernel, vec![Coeff::one()]);
    }

    #[test]
    fn solve_with_pole_in_kernel() {
        // x y' + y = 0 has kernel 1/x
        let a = op(&[Coeff::one(), Coeff::x()]);
        let sol = solve_linear(CoeffField::Qx, &a, &Coeff::zero()).unwrap();
        assert_eq!(sol.kernel, vec![fx(&[1], &[0, 1])]);
        assert_eq!(sol.particular, Some(Coeff::zero()));
    }

    #[test]
    fn euler_operator_kernel() {
        // x^2 y'' + x y' - y has kernel spanned by x and 1/x
        let a = op(&[Coeff::from_int(-1), Coeff::x(), fx(&[0, 0, 1], &[1])]);
        let sol = solve_linear(CoeffField::Qx, &a, &Coeff::zero()).unwrap();
        assert_eq!(sol.kernel.len(), 2);
        for k in &sol.kernel {
            assert_eq!(a.apply(CoeffField::Qx, k), Coeff::zero());
        }
        let spans = |target: &Coeff| {
            // membership in the 2-dimensional span over Q by brute scan
            for p in -3i64..=3 {
                for q in -3i64..=3 {
                    let cand = sol.kernel[0]
                        .scale(&rat_frac(p, 1))
                        .add(&sol.kernel[1].scale(&rat_frac(q, 1)));
                    if &cand == target {
                        return true;
                    }
                }
            }
            false
        };
        assert!(spans(&Coeff::x()));
        assert!(spans(&fx(&[1], &[0, 1])));
    }

    #[test]
    fn second_derivative_kernel() {
        let a = op(&[Coeff::zero(), Coeff::zero(), Coeff::one()]);
        let sol = solve_linear(CoeffField::Qx, &a, &Coeff::zero()).unwrap();
        assert_eq!(sol.kernel.len(), 2);
        // 1 and x up to the echelon normalization
        for k in &sol.kernel {
            assert!(k.is_polynomial());
            assert!(k.numer().degree().unwrap() <= 1);
        }
    }

    #[test]
    fn solve_unsolvable_rhs() {
        // y' = 1/x has no rational solution
        let d = LinearDiffOperator::derivation();
        let sol = solve_linear(CoeffField::Qx, &d, &fx(&[1], &[0, 1])).unwrap();
        assert_eq!(sol.particular, None);
    }

    #[test]
    fn soundness_on_solutions() {
        // (D + x)(y) = x^2 + 1 + ... pick rhs = A(x) and recover a solution
        let a = op(&[Coeff::x(), Coeff::one()]);
        let rhs = a.apply(CoeffField::Qx, &Coeff::x());
        let sol = solve_linear(CoeffField::Qx, &a, &rhs).unwrap();
        let y = sol.particular.unwrap();
        assert_eq!(a.apply(CoeffField::Qx, &y), rhs);
        for k in &sol.kernel {
            assert_eq!(a.apply(CoeffField::Qx, k), Coeff::zero());
        }
    }

    #[test]
    fn zero_operator_rejected() {
        assert_eq!(
            solve_linear(CoeffField::Qx, &LinearDiffOperator::zero(), &Coeff::one()),
            Err(SolveError::ZeroOperator)
        );
    }
}
