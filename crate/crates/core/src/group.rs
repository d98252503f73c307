//! Ordered abelian value groups and their finitely generated subgroups.
//!
//! Supported groups: Z, Q, (1/d)Z, and Z^n with lexicographic order. Subgroup
//! membership, torsion indices and purity are decided exactly by Hermite and
//! Smith normal forms over the integers; rational inputs are scaled to a
//! common denominator first.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;
use thiserror::Error;

pub type Rat = BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("elements from mismatched value groups")]
    DomainMismatch,
}

/// The ambient ordered abelian group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueGroup {
    Z,
    Q,
    /// (1/d)Z for d >= 1.
    FracZ(u64),
    /// Z^n with lexicographic order, n >= 1.
    ZnLex(usize),
}

impl ValueGroup {
    pub fn is_archimedean(&self) -> bool {
        match self {
            ValueGroup::Z | ValueGroup::Q | ValueGroup::FracZ(_) => true,
            ValueGroup::ZnLex(n) => *n == 1,
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            ValueGroup::ZnLex(n) => *n,
            _ => 1,
        }
    }

    /// Smallest positive denominator scale: elements of the group times this
    /// are integers (Q has no uniform scale; callers pass per-instance lcm).
    pub fn denominator(&self) -> Option<u64> {
        match self {
            ValueGroup::Z => Some(1),
            ValueGroup::FracZ(d) => Some(*d),
            ValueGroup::Q => None,
            ValueGroup::ZnLex(_) => Some(1),
        }
    }

    pub fn zero(&self) -> GroupElement {
        match self {
            ValueGroup::Z => GroupElement::Int(BigInt::zero()),
            ValueGroup::Q | ValueGroup::FracZ(_) => GroupElement::Rat(Rat::zero()),
            ValueGroup::ZnLex(n) => GroupElement::Tuple(vec![BigInt::zero(); *n]),
        }
    }

    /// The canonical generators: 1 for Z and Q, 1/d for (1/d)Z, the standard
    /// basis for Z^n.
    pub fn generators(&self) -> Vec<GroupElement> {
        match self {
            ValueGroup::Z => vec![GroupElement::Int(BigInt::one())],
            ValueGroup::Q => vec![GroupElement::Rat(Rat::one())],
            ValueGroup::FracZ(d) => vec![GroupElement::Rat(Rat::new(
                BigInt::one(),
                BigInt::from(*d),
            ))],
            ValueGroup::ZnLex(n) => (0..*n)
                .map(|i| {
                    let mut v = vec![BigInt::zero(); *n];
                    v[i] = BigInt::one();
                    GroupElement::Tuple(v)
                })
                .collect(),
        }
    }

    pub fn admits(&self, g: &GroupElement) -> bool {
        match (self, g) {
            (ValueGroup::Z, GroupElement::Int(_)) => true,
            (ValueGroup::Q, GroupElement::Rat(_)) => true,
            (ValueGroup::FracZ(d), GroupElement::Rat(q)) => {
                (q * Rat::from_integer(BigInt::from(*d))).is_integer()
            }
            (ValueGroup::ZnLex(n), GroupElement::Tuple(v)) => v.len() == *n,
            _ => false,
        }
    }

    pub fn name(&self) -> String {
        match self {
            ValueGroup::Z => "Z".to_string(),
            ValueGroup::Q => "Q".to_string(),
            ValueGroup::FracZ(d) => format!("Z/{}", d),
            ValueGroup::ZnLex(n) => format!("Z^{}lex", n),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupElement {
    Int(BigInt),
    Rat(Rat),
    Tuple(Vec<BigInt>),
}

impl GroupElement {
    pub fn int(n: i64) -> Self {
        GroupElement::Int(BigInt::from(n))
    }

    pub fn rat(p: i64, q: i64) -> Self {
        GroupElement::Rat(Rat::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn tuple(v: &[i64]) -> Self {
        GroupElement::Tuple(v.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn is_zero(&self) -> bool {
        match self {
            GroupElement::Int(n) => n.is_zero(),
            GroupElement::Rat(q) => q.is_zero(),
            GroupElement::Tuple(v) => v.iter().all(|x| x.is_zero()),
        }
    }

    pub fn add(&self, other: &GroupElement) -> Result<GroupElement, GroupError> {
        match (self, other) {
            (GroupElement::Int(a), GroupElement::Int(b)) => Ok(GroupElement::Int(a + b)),
            (GroupElement::Rat(a), GroupElement::Rat(b)) => Ok(GroupElement::Rat(a + b)),
            (GroupElement::Tuple(a), GroupElement::Tuple(b)) if a.len() == b.len() => Ok(
                GroupElement::Tuple(a.iter().zip(b).map(|(x, y)| x + y).collect()),
            ),
            _ => Err(GroupError::DomainMismatch),
        }
    }

    pub fn neg(&self) -> GroupElement {
        match self {
            GroupElement::Int(n) => GroupElement::Int(-n),
            GroupElement::Rat(q) => GroupElement::Rat(-q),
            GroupElement::Tuple(v) => GroupElement::Tuple(v.iter().map(|x| -x).collect()),
        }
    }

    pub fn sub(&self, other: &GroupElement) -> Result<GroupElement, GroupError> {
        self.add(&other.neg())
    }

    pub fn scale_int(&self, n: &BigInt) -> GroupElement {
        match self {
            GroupElement::Int(a) => GroupElement::Int(a * n),
            GroupElement::Rat(q) => GroupElement::Rat(q * Rat::from_integer(n.clone())),
            GroupElement::Tuple(v) => GroupElement::Tuple(v.iter().map(|x| x * n).collect()),
        }
    }

    /// Total order: natural on Z and Q, lexicographic on tuples.
    pub fn cmp_in_group(&self, other: &GroupElement) -> Result<Ordering, GroupError> {
        match (self, other) {
            (GroupElement::Int(a), GroupElement::Int(b)) => Ok(a.cmp(b)),
            (GroupElement::Rat(a), GroupElement::Rat(b)) => Ok(a.cmp(b)),
            (GroupElement::Tuple(a), GroupElement::Tuple(b)) if a.len() == b.len() => {
                Ok(a.cmp(b))
            }
            _ => Err(GroupError::DomainMismatch),
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            GroupElement::Int(n) => n.is_positive(),
            GroupElement::Rat(q) => q.is_positive(),
            GroupElement::Tuple(v) => v
                .iter()
                .find(|x| !x.is_zero())
                .map_or(false, |x| x.is_positive()),
        }
    }

    /// Integer coordinates after scaling by `scale` (rank-many entries).
    fn scaled_coords(&self, scale: &BigInt) -> Vec<BigInt> {
        match self {
            GroupElement::Int(n) => vec![n * scale],
            GroupElement::Rat(q) => {
                let s = q * Rat::from_integer(scale.clone());
                assert!(s.is_integer(), "scale does not clear the denominator");
                vec![s.to_integer()]
            }
            GroupElement::Tuple(v) => v.iter().map(|x| x * scale).collect(),
        }
    }

    fn from_scaled_coords(group: ValueGroup, coords: &[BigInt], scale: &BigInt) -> GroupElement {
        match group {
            ValueGroup::Z => GroupElement::Int(coords[0].clone() / scale),
            ValueGroup::Q | ValueGroup::FracZ(_) => {
                GroupElement::Rat(Rat::new(coords[0].clone(), scale.clone()))
            }
            ValueGroup::ZnLex(_) => {
                GroupElement::Tuple(coords.iter().map(|c| c / scale).collect())
            }
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Int(n) => write!(f, "{}", n),
            GroupElement::Rat(q) => {
                if q.is_integer() {
                    write!(f, "{}", q.to_integer())
                } else {
                    write!(f, "{}/{}", q.numer(), q.denom())
                }
            }
            GroupElement::Tuple(v) => {
                write!(f, "(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}", x)?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A finitely generated subgroup with its canonical (Hermite) basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FgSubgroup {
    ambient: ValueGroup,
    generators: Vec<GroupElement>,
    /// Canonical basis: Hermite-reduced rows for Z^n, a single nonnegative
    /// generator for the rank-one groups.
    basis: Vec<GroupElement>,
    /// Common denominator scale used for the integer lattice view.
    scale: BigInt,
}

impl FgSubgroup {
    pub fn new(ambient: ValueGroup, generators: Vec<GroupElement>) -> Result<Self, GroupError> {
        for g in &generators {
            if !ambient.admits(g) {
                return Err(GroupError::DomainMismatch);
            }
        }
        let scale = common_scale(ambient, &generators);
        let rows: Vec<Vec<BigInt>> = generators
            .iter()
            .map(|g| g.scaled_coords(&scale))
            .collect();
        let hnf = row_hnf(rows);
        let basis = hnf
            .iter()
            .map(|r| GroupElement::from_scaled_coords(ambient, r, &scale))
            .collect();
        Ok(FgSubgroup {
            ambient,
            generators,
            basis,
            scale,
        })
    }

    pub fn trivial(ambient: ValueGroup) -> Self {
        FgSubgroup::new(ambient, vec![]).expect("empty generator list is valid")
    }

    pub fn ambient(&self) -> ValueGroup {
        self.ambient
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn basis(&self) -> &[GroupElement] {
        &self.basis
    }

    pub fn is_trivial(&self) -> bool {
        self.basis.is_empty()
    }

    /// Whether the subgroup is the whole ambient group (never true for Q).
    pub fn is_whole_ambient(&self) -> bool {
        match self.ambient {
            ValueGroup::Q => false,
            _ => {
                let gens = self.ambient.generators();
                gens.iter()
                    .all(|g| self.contains(g).unwrap_or(false))
            }
        }
    }

    /// Same subgroup as another (canonical bases compared after rescale).
    pub fn same_subgroup(&self, other: &FgSubgroup) -> bool {
        if self.ambient != other.ambient {
            return false;
        }
        self.basis.len() == other.basis.len()
            && self
                .basis
                .iter()
                .all(|g| other.contains(g).unwrap_or(false))
            && other
                .basis
                .iter()
                .all(|g| self.contains(g).unwrap_or(false))
    }

    fn lattice_rows(&self, scale: &BigInt) -> Vec<Vec<BigInt>> {
        self.generators
            .iter()
            .map(|g| g.scaled_coords(scale))
            .collect()
    }

    /// Scale covering both the subgroup and an extra element.
    fn joint_scale(&self, g: &GroupElement) -> BigInt {
        let mut s = self.scale.clone();
        if let GroupElement::Rat(q) = g {
            s = s.lcm(q.denom());
        }
        s
    }

    /// True iff gamma is an integer combination of the generators.
    pub fn contains(&self, gamma: &GroupElement) -> Result<bool, GroupError> {
        Ok(self.member_witness(gamma)?.is_some())
    }

    /// Integer coefficients expressing gamma over the canonical basis.
    pub fn member_witness(&self, gamma: &GroupElement) -> Result<Option<Vec<BigInt>>, GroupError> {
        if !self.ambient.admits(gamma) {
            return Err(GroupError::DomainMismatch);
        }
        let scale = self.joint_scale(gamma);
        let hnf = row_hnf(self.lattice_rows(&scale));
        let mut target = gamma.scaled_coords(&scale);
        let mut coeffs = Vec::with_capacity(hnf.len());
        for row in &hnf {
            let pivot = row.iter().position(|x| !x.is_zero()).unwrap();
            let (q, r) = target[pivot].div_rem(&row[pivot]);
            if !r.is_zero() {
                return Ok(None);
            }
            for (t, x) in target.iter_mut().zip(row) {
                *t -= &q * x;
            }
            coeffs.push(q);
        }
        if target.iter().all(|x| x.is_zero()) {
            Ok(Some(coeffs))
        } else {
            Ok(None)
        }
    }

    /// Least n >= 1 with n*gamma in the subgroup, if any.
    pub fn torsion_index(&self, gamma: &GroupElement) -> Result<Option<BigInt>, GroupError> {
        if !self.ambient.admits(gamma) {
            return Err(GroupError::DomainMismatch);
        }
        if gamma.is_zero() {
            return Ok(Some(BigInt::one()));
        }
        let scale = self.joint_scale(gamma);
        let hnf = row_hnf(self.lattice_rows(&scale));
        let target: Vec<Rat> = gamma
            .scaled_coords(&scale)
            .iter()
            .map(|x| Rat::from_integer(x.clone()))
            .collect();
        // solve x * hnf = target over Q by forward substitution on pivots
        let mut residual = target;
        let mut coeffs: Vec<Rat> = Vec::with_capacity(hnf.len());
        for row in &hnf {
            let pivot = row.iter().position(|x| !x.is_zero()).unwrap();
            let c = &residual[pivot] / Rat::from_integer(row[pivot].clone());
            for (t, x) in residual.iter_mut().zip(row) {
                *t -= &c * Rat::from_integer(x.clone());
            }
            coeffs.push(c);
        }
        if residual.iter().any(|x| !x.is_zero()) {
            return Ok(None); // outside the Q-span
        }
        let mut n = BigInt::one();
        for c in &coeffs {
            n = n.lcm(c.denom());
        }
        Ok(Some(n))
    }

    /// Purity in the ambient group: n*gamma in the subgroup implies gamma is.
    /// On failure returns a witness (gamma, n) with n*gamma inside, gamma not.
    pub fn is_pure(&self) -> (bool, Option<(GroupElement, BigInt)>) {
        if self.is_trivial() {
            return (true, None);
        }
        if let ValueGroup::Q = self.ambient {
            // any nonzero finitely generated subgroup of Q is cyclic and not
            // pure: half the generator is a witness
            let g = &self.basis[0];
            let witness = match g {
                GroupElement::Rat(q) => {
                    GroupElement::Rat(q / Rat::from_integer(BigInt::from(2)))
                }
                _ => unreachable!(),
            };
            return (false, Some((witness, BigInt::from(2))));
        }
        let scale = self.scale.clone();
        let rows = self.lattice_rows(&scale);
        let (diag, w) = smith_normal_form(rows);
        for (i, d) in diag.iter().enumerate() {
            if !d.is_zero() && d.abs() > BigInt::one() {
                let coords = &w[i];
                let gamma = GroupElement::from_scaled_coords(self.ambient, coords, &scale);
                return (false, Some((gamma, d.abs())));
            }
        }
        (true, None)
    }
}

impl fmt::Display for FgSubgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, b) in self.basis.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", b)?;
        }
        write!(f, "> in {}", self.ambient.name())
    }
}

fn common_scale(ambient: ValueGroup, gens: &[GroupElement]) -> BigInt {
    match ambient {
        ValueGroup::Z | ValueGroup::ZnLex(_) => BigInt::one(),
        ValueGroup::FracZ(d) => BigInt::from(d),
        ValueGroup::Q => {
            let mut s = BigInt::one();
            for g in gens {
                if let GroupElement::Rat(q) = g {
                    s = s.lcm(q.denom());
                }
            }
            s
        }
    }
}

/// Row-style Hermite normal form of the row lattice: echelon rows with
/// positive pivots, entries above each pivot reduced into [0, pivot).
/// Zero rows are dropped, so the result is a canonical basis.
pub fn row_hnf(mut rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    rows.retain(|r| r.iter().any(|x| !x.is_zero()));
    if rows.is_empty() {
        return rows;
    }
    let ncols = rows[0].len();
    let mut top = 0usize;
    for col in 0..ncols {
        // gcd-eliminate below `top` in this column
        loop {
            let mut best: Option<usize> = None;
            for i in top..rows.len() {
                if !rows[i][col].is_zero()
                    && best.map_or(true, |b| rows[i][col].abs() < rows[b][col].abs())
                {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            rows.swap(top, b);
            let mut done = true;
            for i in top + 1..rows.len() {
                if rows[i][col].is_zero() {
                    continue;
                }
                let q = div_round(&rows[i][col], &rows[top][col]);
                for c in 0..ncols {
                    let v = &rows[i][c] - &q * &rows[top][c];
                    rows[i][c] = v;
                }
                if !rows[i][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if rows.get(top).map_or(false, |r| !r[col].is_zero()) {
            if rows[top][col].is_negative() {
                for c in 0..ncols {
                    rows[top][c] = -rows[top][c].clone();
                }
            }
            // reduce entries above the pivot into [0, pivot)
            for i in 0..top {
                let q = rows[i][col].div_floor(&rows[top][col]);
                if !q.is_zero() {
                    for c in 0..ncols {
                        let v = &rows[i][c] - &q * &rows[top][c];
                        rows[i][c] = v;
                    }
                }
            }
            top += 1;
            if top == rows.len() {
                break;
            }
        }
    }
    rows.truncate(top);
    rows
}

/// Integer kernel of the matrix with the given rows: the lattice of integer
/// vectors v with `sum v[i] * rows[i] = 0`, via HNF of `[rows | I]`.
pub fn integer_row_kernel(rows: &[Vec<BigInt>], ncols: usize) -> Vec<Vec<BigInt>> {
    let n = rows.len();
    let mut aug: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for (i, r) in rows.iter().enumerate() {
        assert_eq!(r.len(), ncols);
        let mut row = r.clone();
        for j in 0..n {
            row.push(if i == j { BigInt::one() } else { BigInt::zero() });
        }
        aug.push(row);
    }
    // eliminate on the first ncols columns only
    let mut top = 0usize;
    for col in 0..ncols {
        loop {
            let mut best: Option<usize> = None;
            for i in top..aug.len() {
                if !aug[i][col].is_zero()
                    && best.map_or(true, |b| aug[i][col].abs() < aug[b][col].abs())
                {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            aug.swap(top, b);
            let mut done = true;
            for i in top + 1..aug.len() {
                if aug[i][col].is_zero() {
                    continue;
                }
                let q = div_round(&aug[i][col], &aug[top][col]);
                for c in 0..ncols + n {
                    let v = &aug[i][c] - &q * &aug[top][c];
                    aug[i][c] = v;
                }
                if !aug[i][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if top < aug.len() && !aug[top][col].is_zero() {
            top += 1;
            if top == aug.len() {
                break;
            }
        }
    }
    let mut kernel = Vec::new();
    for row in aug.iter().skip(top) {
        if row[..ncols].iter().all(|x| x.is_zero()) {
            kernel.push(row[ncols..].to_vec());
        }
    }
    // canonical basis of the kernel lattice
    row_hnf(kernel)
}

/// Smith normal form of the row lattice. Returns the diagonal entries and the
/// inverse column transform W: row i of W is the ambient element that maps to
/// the i-th Smith basis vector, so non-unit diagonal entries yield purity
/// witnesses directly.
pub fn smith_normal_form(mut a: Vec<Vec<BigInt>>) -> (Vec<BigInt>, Vec<Vec<BigInt>>) {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut w: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { BigInt::one() } else { BigInt::zero() })
                .collect()
        })
        .collect();
    let mut t = 0usize;
    while t < m.min(n) {
        // find a nonzero entry in the submatrix
        let mut pivot: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if !a[i][j].is_zero()
                    && pivot.map_or(true, |(pi, pj)| a[i][j].abs() < a[pi][pj].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        a.swap(t, pi);
        if pj != t {
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            w.swap(t, pj);
        }
        // clear row and column t
        loop {
            let mut clean = true;
            for i in t + 1..m {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = div_round(&a[i][t], &a[t][t]);
                for c in 0..n {
                    let v = &a[i][c] - &q * &a[t][c];
                    a[i][c] = v;
                }
                if !a[i][t].is_zero() {
                    // remainder smaller than pivot: swap up and restart
                    a.swap(t, i);
                    clean = false;
                }
            }
            for j in t + 1..n {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = div_round(&a[t][j], &a[t][t]);
                // col j -= q * col t; W: row t += q * row j
                for row in a.iter_mut() {
                    let v = &row[j] - &q * &row[t];
                    row[j] = v;
                }
                for c in 0..n {
                    let v = &w[t][c] + &q * &w[j][c];
                    w[t][c] = v;
                }
                if !a[t][j].is_zero() {
                    // swap columns t and j; W: swap rows
                    for row in a.iter_mut() {
                        row.swap(t, j);
                    }
                    w.swap(t, j);
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        // divisibility: a[t][t] must divide the rest of the submatrix
        let mut retry = false;
        'scan: for i in t + 1..m {
            for j in t + 1..n {
                if !(&a[i][j] % &a[t][t]).is_zero() {
                    // row t += row i, then re-eliminate
                    for c in 0..n {
                        let v = &a[t][c] + &a[i][c];
                        a[t][c] = v;
                    }
                    retry = true;
                    break 'scan;
                }
            }
        }
        if retry {
            continue;
        }
        if a[t][t].is_negative() {
            for row in a.iter_mut() {
                row[t] = -row[t].clone();
            }
            w[t] = w[t].iter().map(|x| -x).collect();
        }
        t += 1;
    }
    let diag = (0..m.min(n)).map(|i| a[i][i].clone()).collect();
    (diag, w)
}

/// Symmetric rounding division: q minimizing |a - q b|.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_rem(b);
    let twice: BigInt = &r * 2;
    if twice.abs() > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}
