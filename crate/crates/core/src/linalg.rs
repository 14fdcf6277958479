//! Small exact linear-algebra routines over rationals and integers.

// Row operations read one row while mutating another, which rules out
// iterating the mutated row directly.
#![allow(clippy::needless_range_loop)]

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::rational::Rat;

/// Rank of a set of rational row vectors (Gaussian elimination).
pub fn rank(rows: &[Vec<Rat>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let ncols = rows[0].len();
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let mut r = 0;
    for col in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(pivot) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, pivot);
        for i in 0..m.len() {
            if i != r && !m[i][col].is_zero() {
                let factor = &m[i][col] / &m[r][col];
                for j in col..ncols {
                    let delta = &factor * &m[r][j];
                    m[i][j] -= delta;
                }
            }
        }
        r += 1;
    }
    r
}

/// Integer row vectors as rationals.
pub fn to_rational_rows(rows: &[Vec<i64>]) -> Vec<Vec<Rat>> {
    rows.iter()
        .map(|r| r.iter().map(|&x| Rat::from_integer(BigInt::from(x))).collect())
        .collect()
}

/// Solves `sum_l alpha_l * cols[l] = target` exactly. Returns `None` when the
/// system is inconsistent or underdetermined (dependent columns).
pub fn solve_columns(cols: &[Vec<i64>], target: &[i64]) -> Option<Vec<Rat>> {
    let r = cols.len();
    let dim = target.len();
    // Augmented matrix: dim rows, r + 1 columns.
    let mut m: Vec<Vec<Rat>> = (0..dim)
        .map(|i| {
            let mut row: Vec<Rat> = cols
                .iter()
                .map(|c| Rat::from_integer(BigInt::from(c[i])))
                .collect();
            row.push(Rat::from_integer(BigInt::from(target[i])));
            row
        })
        .collect();
    let mut pivot_row_of_col: Vec<Option<usize>> = vec![None; r];
    let mut row = 0;
    for col in 0..r {
        if row == dim {
            break;
        }
        let Some(p) = (row..dim).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        for i in 0..dim {
            if i != row && !m[i][col].is_zero() {
                let factor = &m[i][col] / &m[row][col];
                for j in col..=r {
                    let delta = &factor * &m[row][j];
                    m[i][j] -= delta;
                }
            }
        }
        pivot_row_of_col[col] = Some(row);
        row += 1;
    }
    // Inconsistent if a zero row has nonzero augment.
    for i in row..dim {
        if !m[i][r].is_zero() {
            return None;
        }
    }
    // Underdetermined if some column has no pivot.
    let mut alpha = vec![Rat::zero(); r];
    for col in 0..r {
        let pr = pivot_row_of_col[col]?;
        alpha[col] = &m[pr][r] / &m[pr][col];
    }
    Some(alpha)
}

/// Basis of the right nullspace `{ s : rows * s = 0 }`.
pub fn nullspace(rows: &[Vec<Rat>], ncols: usize) -> Vec<Vec<Rat>> {
    let mut m: Vec<Vec<Rat>> = rows.to_vec();
    let nrows = m.len();
    let mut pivot_col_of_row: Vec<usize> = Vec::new();
    let mut is_pivot_col = vec![false; ncols];
    let mut r = 0;
    for col in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][col].recip();
        for j in 0..ncols {
            m[r][j] *= &inv;
        }
        for i in 0..nrows {
            if i != r && !m[i][col].is_zero() {
                let factor = m[i][col].clone();
                for j in 0..ncols {
                    let delta = &factor * &m[r][j];
                    m[i][j] -= delta;
                }
            }
        }
        pivot_col_of_row.push(col);
        is_pivot_col[col] = true;
        r += 1;
    }
    let mut basis = Vec::new();
    for free in 0..ncols {
        if is_pivot_col[free] {
            continue;
        }
        let mut s = vec![Rat::zero(); ncols];
        s[free] = Rat::one();
        for (row, &pc) in pivot_col_of_row.iter().enumerate() {
            s[pc] = -m[row][free].clone();
        }
        basis.push(s);
    }
    basis
}

/// Determinant of a square integer matrix (fraction-free Bareiss).
pub fn det_bigint(matrix: &[Vec<BigInt>]) -> BigInt {
    let n = matrix.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut m: Vec<Vec<BigInt>> = matrix.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = num / &prev; // exact by Bareiss
            }
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn rank_of_dependent_rows() {
        let rows = to_rational_rows(&[vec![1, 2], vec![2, 4], vec![0, 1]]);
        assert_eq!(rank(&rows), 2);
        assert_eq!(rank(&to_rational_rows(&[vec![0, 0]])), 0);
    }

    #[test]
    fn solve_columns_exact() {
        // (1,1) = 1/2*(1,-1) + 1/2*(1,1)? -> alpha for target (1,0):
        let cols = vec![vec![1, -1], vec![1, 1]];
        let alpha = solve_columns(&cols, &[1, 0]).unwrap();
        assert_eq!(alpha, vec![crate::rational::rat(1, 2), crate::rational::rat(1, 2)]);
        assert!(solve_columns(&[vec![1, 0], vec![2, 0]], &[0, 1]).is_none());
    }

    #[test]
    fn nullspace_dimensions() {
        let rows = to_rational_rows(&[vec![1, -1, 0]]);
        let basis = nullspace(&rows, 3);
        assert_eq!(basis.len(), 2);
        for s in &basis {
            assert_eq!(&s[0] - &s[1], int(0));
        }
    }

    #[test]
    fn determinants() {
        let m = |rows: &[[i64; 2]; 2]| {
            rows.iter()
                .map(|r| r.iter().map(|&x| num_bigint::BigInt::from(x)).collect())
                .collect::<Vec<Vec<num_bigint::BigInt>>>()
        };
        assert_eq!(det_bigint(&m(&[[1, -1], [1, 1]])), num_bigint::BigInt::from(2));
        assert_eq!(det_bigint(&m(&[[1, 0], [0, 1]])), num_bigint::BigInt::from(1));
        assert_eq!(det_bigint(&m(&[[1, 2], [2, 4]])), num_bigint::BigInt::from(0));
        let m3: Vec<Vec<num_bigint::BigInt>> = vec![
            vec![2.into(), 0.into(), 1.into()],
            vec![1.into(), 3.into(), (-1).into()],
            vec![0.into(), 1.into(), 4.into()],
        ];
        assert_eq!(det_bigint(&m3), num_bigint::BigInt::from(27));
    }
}
