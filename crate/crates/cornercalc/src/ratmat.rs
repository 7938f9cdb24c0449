//! Small dense exact linear algebra over arbitrary-precision rationals.
//!
//! Everything here operates on matrices of at most a few dozen entries; the
//! implementations favor exactness and clarity over asymptotics.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

#[cfg(test)]
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Reduced row echelon form in place; returns the pivot column of each
/// nonzero row, in row order.
pub fn rref(rows: &mut Vec<Vec<Rat>>) -> Vec<usize> {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let Some(p) = (row..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(row, p);
        let inv = rows[row][col].clone();
        for x in rows[row].iter_mut() {
            *x = &*x / &inv;
        }
        for r in 0..rows.len() {
            if r != row && !rows[r][col].is_zero() {
                let factor = rows[r][col].clone();
                for c in 0..ncols {
                    let delta = &factor * &rows[row][c];
                    rows[r][c] = &rows[r][c] - delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows.len() {
            break;
        }
    }
    rows.truncate(row);
    pivots
}

pub fn rank(rows: &[Vec<Rat>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

/// Solves `sum_i c_i * columns[i] = target` for linearly independent columns.
/// Returns `None` when the system is inconsistent.
pub fn solve_in_column_span(columns: &[Vec<Rat>], target: &[Rat]) -> Option<Vec<Rat>> {
    let n = target.len();
    assert!(columns.iter().all(|c| c.len() == n), "ragged column data");
    let k = columns.len();
    // Augmented system [columns | target], one row per coordinate.
    let mut m: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rat> = columns.iter().map(|c| c[i].clone()).collect();
            row.push(target[i].clone());
            row
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.contains(&k) {
        return None; // pivot in the augmented column: inconsistent
    }
    let mut coeffs = vec![Rat::zero(); k];
    for (row, &col) in pivots.iter().enumerate() {
        coeffs[col] = m[row][k].clone();
    }
    // Columns are required to be independent, so the solution is unique;
    // verify exactly rather than trusting the caller.
    for i in 0..n {
        let mut acc = Rat::zero();
        for (j, col) in columns.iter().enumerate() {
            acc += &coeffs[j] * &col[i];
        }
        if acc != target[i] {
            return None;
        }
    }
    Some(coeffs)
}

/// Determinant of a square integer matrix by fraction-free elimination.
pub fn det_bigint(matrix: &[Vec<BigInt>]) -> BigInt {
    let n = matrix.len();
    if n == 0 {
        return BigInt::one();
    }
    assert!(matrix.iter().all(|r| r.len() == n), "matrix not square");
    let mut m = matrix.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev; // exact division (Bareiss)
            }
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// Basis of the right nullspace `{ x : rows * x = 0 }`.
pub fn nullspace(rows: &[Vec<Rat>], ncols: usize) -> Vec<Vec<Rat>> {
    let mut m = rows.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); ncols];
            v[f] = Rat::one();
            for (row, &p) in pivots.iter().enumerate() {
                v[p] = -m[row][f].clone();
            }
            v
        })
        .collect()
}

/// Canonical form of a subspace given by spanning rows: RREF with zero rows
/// dropped. Equal subspaces yield identical forms.
pub fn canonical_rowspace(rows: &[Vec<Rat>]) -> Vec<Vec<Rat>> {
    let mut m = rows.to_vec();
    rref(&mut m);
    m
}

/// Intersection of two row spaces inside an ambient space of dimension
/// `ncols`, in canonical form.
pub fn intersect_rowspaces(a: &[Vec<Rat>], b: &[Vec<Rat>], ncols: usize) -> Vec<Vec<Rat>> {
    // rowspace(A) = { x : <n, x> = 0 for all n in nullspace(A) }, so the
    // intersection is the nullspace of the stacked annihilators.
    let mut constraints = nullspace(a, ncols);
    constraints.extend(nullspace(b, ncols));
    let constraint_rows: Vec<Vec<Rat>> = constraints;
    canonical_rowspace(&nullspace(&constraint_rows, ncols))
}

/// True when `x` lies in the row space of `rows`.
pub fn in_rowspace(rows: &[Vec<Rat>], x: &[Rat]) -> bool {
    let r = rank(rows);
    let mut stacked = rows.to_vec();
    stacked.push(x.to_vec());
    rank(&stacked) == r
}

pub fn is_nonneg(x: &Rat) -> bool {
    !x.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rv(xs: &[i64]) -> Vec<Rat> {
        xs.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn rref_identifies_rank() {
        let rows = vec![rv(&[1, 2, 3]), rv(&[2, 4, 6]), rv(&[0, 1, 1])];
        assert_eq!(rank(&rows), 2);
    }

    #[test]
    fn solve_recovers_exact_coefficients() {
        let cols = vec![rv(&[1, 0, 1]), rv(&[1, 1, 0])];
        let target = rv(&[3, 1, 2]);
        let c = solve_in_column_span(&cols, &target).unwrap();
        assert_eq!(c, rv(&[2, 1]));
    }

    #[test]
    fn solve_detects_inconsistency() {
        let cols = vec![rv(&[1, 0, 0])];
        let target = rv(&[0, 1, 0]);
        assert!(solve_in_column_span(&cols, &target).is_none());
    }

    #[test]
    fn bareiss_determinant() {
        let m = vec![
            vec![BigInt::from(1), BigInt::from(1), BigInt::from(1)],
            vec![BigInt::from(0), BigInt::from(1), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(0), BigInt::from(1)],
        ];
        assert_eq!(det_bigint(&m), BigInt::from(1));
        let m2 = vec![
            vec![BigInt::from(2), BigInt::from(0)],
            vec![BigInt::from(0), BigInt::from(3)],
        ];
        assert_eq!(det_bigint(&m2), BigInt::from(6));
    }

    #[test]
    fn nullspace_of_plane_pair_is_line() {
        // x + y = 0 and y + z = 0 meet in the line (1, -1, 1).
        let rows = vec![rv(&[1, 1, 0]), rv(&[0, 1, 1])];
        let ns = nullspace(&rows, 3);
        assert_eq!(ns.len(), 1);
        assert_eq!(ns[0], rv(&[1, -1, 1]));
    }

    #[test]
    fn rowspace_intersection_of_generic_planes_is_line() {
        let a = vec![rv(&[1, 0, 0]), rv(&[0, 1, 0])]; // xy-plane
        let b = vec![rv(&[0, 1, 0]), rv(&[0, 0, 1])]; // yz-plane
        let meet = intersect_rowspaces(&a, &b, 3);
        assert_eq!(meet, vec![rv(&[0, 1, 0])]);
    }
}
