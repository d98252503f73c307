//! Dense exact linear algebra over the rationals, sized for desk-scale
//! undetermined-coefficient systems.

use crate::poly::Rat;
use num_traits::Zero;

/// Solves A z = b. Returns (particular with all free variables set to zero,
/// nullspace basis), or None when inconsistent. The nullspace basis vectors
/// each have a single free coordinate set to 1, so the particular solution has
/// zero coordinates along every basis vector's free slot.
pub fn solve_affine(a: &[Vec<Rat>], b: &[Rat]) -> Option<(Vec<Rat>, Vec<Vec<Rat>>)> {
    let rows = a.len();
    assert_eq!(rows, b.len());
    let cols = a.first().map_or(0, |r| r.len());
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(r, rhs)| {
            let mut row = r.clone();
            row.push(rhs.clone());
            row
        })
        .collect();

    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut row = 0usize;
    for col in 0..cols {
        let Some(pr) = (row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, pr);
        let inv = m[row][col].clone().recip();
        for c in col..=cols {
            let v = &m[row][c] * &inv;
            m[row][c] = v;
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..=cols {
                    let v = &m[r][c] - &(&m[row][c] * &factor);
                    m[r][c] = v;
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }

    // inconsistency: zero row with nonzero rhs
    for r in row..rows {
        if !m[r][cols].is_zero() {
            return None;
        }
    }

    let mut particular = vec![Rat::zero(); cols];
    for (i, &pc) in pivot_cols.iter().enumerate() {
        particular[pc] = m[i][cols].clone();
    }

    let mut basis = Vec::new();
    for free in 0..cols {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = vec![Rat::zero(); cols];
        v[free] = Rat::from_integer(1.into());
        for (i, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -m[i][free].clone();
        }
        basis.push(v);
    }
    Some((particular, basis))
}
