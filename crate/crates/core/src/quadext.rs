//! The quadratic extension F = K(w) with w^2 = s t over the two-layer tower
//! K = (Q(x)((s^Z)))((t^Z)), where s' = s and t' = 0.
//!
//! Elements a + b w derive by (a + b w)' = a' + (b' + b w†) w with
//! w† = (s t)†/2 = 1/2. The constant scan shows v(C_F^x) is Z: a constant at
//! a half-integer valuation would force a leading coefficient u of the inner
//! layer to satisfy u† = -k0 - 1/2, a nonzero rational, and nonzero rational
//! constants are never logarithmic derivatives of Q(x).

use crate::cmap::AdditiveMap;
use crate::coeff::{Coeff, CoeffField, DiffField};
use crate::group::{FgSubgroup, GroupElement, ValueGroup};
use crate::hahn::{HahnField, HahnSeries};
use crate::logderiv::{log_derivative_membership, DaggerCertificate};
use crate::poly::Rat;
use num_bigint::BigInt;

pub type InnerField = HahnField<CoeffField>;
pub type OuterField = HahnField<InnerField>;
pub type InnerSeries = HahnSeries<Coeff>;
pub type OuterSeries = HahnSeries<InnerSeries>;

/// The tower with the extension datum m = s t and the twist constant w† = m†/2.
#[derive(Debug, Clone)]
pub struct QuadTower {
    pub inner: InnerField,
    pub outer: OuterField,
    pub m: OuterSeries,
    pub w_dagger: OuterSeries,
    /// Whether w generates a proper extension (m is not a square in K).
    pub proper: bool,
}

impl QuadTower {
    /// The standard tower: inner layer s over Q(x) with c_s(1) = 1, outer
    /// layer t with c_t(1) = 0, and m = s t.
    pub fn standard(default_bound: i64) -> Self {
        let cmap_s = AdditiveMap::new(ValueGroup::Z, CoeffField::Qx, vec![Coeff::one()])
            .expect("1 lies in Q(x)");
        let inner = HahnField::layer(
            CoeffField::Qx,
            ValueGroup::Z,
            cmap_s.images().to_vec(),
            GroupElement::int(default_bound),
            "s",
        );
        let outer = HahnField::layer(
            inner.clone(),
            ValueGroup::Z,
            vec![inner.zero()],
            GroupElement::int(default_bound),
            "t",
        );
        let s = inner.cross_section(&GroupElement::int(1));
        let m = outer.monomial(s, GroupElement::int(1));
        let m_dagger = outer.dagger(&m).expect("m is a nonzero monomial");
        let w_dagger = outer.scale_rat(&Rat::new(BigInt::from(1), BigInt::from(2)), &m_dagger);
        QuadTower {
            inner,
            outer,
            m,
            w_dagger,
            // the exponent of t in m is odd, so m is not a square in K
            proper: true,
        }
    }

    pub fn zero(&self) -> QuadExtElement {
        QuadExtElement {
            a: self.outer.zero(),
            b: self.outer.zero(),
        }
    }

    pub fn from_base(&self, a: OuterSeries) -> QuadExtElement {
        QuadExtElement {
            a,
            b: self.outer.zero(),
        }
    }

    pub fn w(&self) -> QuadExtElement {
        QuadExtElement {
            a: self.outer.zero(),
            b: self.outer.one(),
        }
    }

    pub fn add(&self, x: &QuadExtElement, y: &QuadExtElement) -> QuadExtElement {
        QuadExtElement {
            a: self.outer.add(&x.a, &y.a),
            b: self.outer.add(&x.b, &y.b),
        }
    }

    pub fn neg(&self, x: &QuadExtElement) -> QuadExtElement {
        QuadExtElement {
            a: self.outer.neg(&x.a),
            b: self.outer.neg(&x.b),
        }
    }

    /// (a1 + b1 w)(a2 + b2 w) with w^2 = m.
    pub fn mul(&self, x: &QuadExtElement, y: &QuadExtElement) -> QuadExtElement {
        let cross = self.outer.mul(&self.outer.mul(&x.b, &y.b), &self.m);
        QuadExtElement {
            a: self.outer.add(&self.outer.mul(&x.a, &y.a), &cross),
            b: self
                .outer
                .add(&self.outer.mul(&x.a, &y.b), &self.outer.mul(&x.b, &y.a)),
        }
    }

    /// (a + b w)' = a' + (b' + b w†) w.
    pub fn derive(&self, x: &QuadExtElement) -> QuadExtElement {
        let b_part = self
            .outer
            .add(&self.outer.derive(&x.b), &self.outer.mul(&x.b, &self.w_dagger));
        QuadExtElement {
            a: self.outer.derive(&x.a),
            b: b_part,
        }
    }

    pub fn is_zero(&self, x: &QuadExtElement) -> bool {
        x.a.is_exact_zero() && x.b.is_exact_zero()
    }

    pub fn render(&self, x: &QuadExtElement) -> String {
        match (x.a.is_exact_zero(), x.b.is_exact_zero()) {
            (true, true) => "0".to_string(),
            (false, true) => self.outer.render(&x.a),
            (true, false) => format!("({})*w", self.outer.render(&x.b)),
            (false, false) => format!(
                "({}) + ({})*w",
                self.outer.render(&x.a),
                self.outer.render(&x.b)
            ),
        }
    }
}

/// a + b w over the tower base field.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadExtElement {
    pub a: OuterSeries,
    pub b: OuterSeries,
}

/// One refuted half-integer level: a constant with a component at inner level
/// k0 would need an element of Q(x) with logarithmic derivative -k0 - 1/2.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfLevelRefutation {
    pub inner_level: i64,
    pub required_dagger: Coeff,
    pub reason: String,
}

#[derive(Debug, Clone)]
pub struct ConstantScanReport {
    pub bound: i64,
    /// Every half-integer valuation in [-bound, bound] is excluded.
    pub no_half_integer_constants: bool,
    pub refutations: Vec<HalfLevelRefutation>,
    /// Integer valuations realized by constants (powers of t).
    pub integer_constant_valuations: Vec<i64>,
    /// is_pure(Z <= (1/2)Z) with witness on failure.
    pub purity: (bool, Option<(GroupElement, BigInt)>),
}

/// Scans for constants of F at half-integer valuations up to the bound.
///
/// A constant a + b w needs a' = 0 and b' + b/2 = 0; writing b over the t
/// layer and then the s layer, the leading inner coefficient u in Q(x) of a
/// nonzero b would satisfy u† = -k0 - 1/2 for its s-level k0. Each candidate
/// level is refuted by the membership test, so b = 0 and every constant lies
/// in K with integer valuation; powers of t realize all of them.
pub fn ext_constant_scan(tower: &QuadTower, bound: i64) -> ConstantScanReport {
    assert!(bound >= 1);
    let mut refutations = Vec::new();
    let mut all_refuted = true;
    for k0 in -bound..=bound {
        let required = Coeff::from_rat(Rat::new(
            BigInt::from(-2 * k0 - 1),
            BigInt::from(2),
        ));
        let cert = log_derivative_membership(&required)
            .expect("rational constants factor trivially");
        match cert {
            DaggerCertificate::NonMember(reason) => refutations.push(HalfLevelRefutation {
                inner_level: k0,
                required_dagger: required,
                reason: reason.to_string(),
            }),
            DaggerCertificate::Member { .. } => {
                all_refuted = false;
            }
        }
    }

    // integer valuations: t^l is constant since t' = 0
    let mut integer_constant_valuations = Vec::new();
    for l in -bound..=bound {
        let tl = tower.outer.cross_section(&GroupElement::int(l));
        if tower.outer.is_constant(&tl).constant {
            integer_constant_valuations.push(l);
        }
    }

    let z_in_half = FgSubgroup::new(ValueGroup::FracZ(2), vec![GroupElement::rat(1, 1)])
        .expect("Z embeds in (1/2)Z");
    let purity = z_in_half.is_pure();

    ConstantScanReport {
        bound,
        no_half_integer_constants: all_refuted,
        refutations,
        integer_constant_valuations,
        purity,
    }
}
