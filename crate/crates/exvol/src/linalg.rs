//! Small dense kernels shared by the invariant computations.
//!
//! Everything here operates on row-major `Vec<Vec<_>>` matrices of the tiny
//! sizes that occur in practice (2n x 2n with n <= 4 or so), so plain
//! partial-pivot elimination is both adequate and easy to audit.

use num_complex::Complex64;

/// Determinant of a square complex matrix: closed forms for the common
/// tiny sizes, LU with partial pivoting above.
pub(crate) fn complex_det(m: &[Vec<Complex64>]) -> Complex64 {
    let n = m.len();
    match n {
        0 => return Complex64::new(1.0, 0.0),
        1 => return m[0][0],
        2 => return m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => {}
    }
    let mut a: Vec<Vec<Complex64>> = m.to_vec();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| {
                a[r][col]
                    .norm_sqr()
                    .partial_cmp(&a[s][col].norm_sqr())
                    .unwrap()
            })
            .unwrap();
        if a[pivot][col].norm_sqr() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                let s = a[col][k];
                a[row][k] -= factor * s;
            }
        }
    }
    det
}

/// Determinant of a square real matrix: closed forms for the common tiny
/// sizes, LU with partial pivoting above.
pub(crate) fn real_det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    match n {
        0 => return 1.0,
        1 => return m[0][0],
        2 => return m[0][0] * m[1][1] - m[0][1] * m[1][0],
        _ => {}
    }
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| a[r][col].abs().partial_cmp(&a[s][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            for k in col..n {
                let s = a[col][k];
                a[row][k] -= factor * s;
            }
        }
    }
    det
}

/// Cholesky factor of a symmetric matrix, or `None` when it is not
/// positive definite. Used only as the positive-definiteness test.
pub(crate) fn cholesky(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = m[i][j];
            for k in 0..j {
                sum -= l[i][k] * l[j][k];
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return None;
                }
                l[i][i] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    Some(l)
}

/// Rank over the rationals of an integer matrix, by fraction-free
/// (Bareiss) elimination on i128.
pub(crate) fn integer_rank(m: &[Vec<i64>]) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut rank = 0;
    let mut prev = 1i128;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let pivot = (rank..rows).find(|&r| a[r][col] != 0);
        let Some(pivot) = pivot else { continue };
        a.swap(pivot, rank);
        for row in rank + 1..rows {
            for k in col + 1..cols {
                a[row][k] = (a[rank][col] * a[row][k] - a[row][col] * a[rank][k]) / prev;
            }
            a[row][col] = 0;
        }
        prev = a[rank][col];
        rank += 1;
    }
    rank
}

/// Row-style Hermite normal form of a full-row-rank integer matrix.
///
/// The result is the unique basis of the row lattice with pivots positive,
/// entries above each pivot reduced into [0, pivot), and pivot columns
/// strictly increasing. Two coefficient matrices span the same sublattice
/// exactly when their forms agree, which is what the class enumeration
/// uses for deduplication.
pub(crate) fn row_hnf(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let rows = m.len();
    let cols = if rows > 0 { m[0].len() } else { 0 };
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    let mut pivot_row = 0;
    for col in 0..cols {
        if pivot_row == rows {
            break;
        }
        // Euclidean passes until a single nonzero entry remains in this column.
        loop {
            let mut best: Option<usize> = None;
            for r in pivot_row..rows {
                if a[r][col] != 0 {
                    best = match best {
                        Some(b) if a[b][col].abs() <= a[r][col].abs() => Some(b),
                        _ => Some(r),
                    };
                }
            }
            let Some(best) = best else { break };
            a.swap(pivot_row, best);
            let mut done = true;
            for r in pivot_row + 1..rows {
                if a[r][col] != 0 {
                    let q = div_round(a[r][col], a[pivot_row][col]);
                    for k in 0..cols {
                        a[r][k] -= q * a[pivot_row][k];
                    }
                    if a[r][col] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if a[pivot_row][col] == 0 {
            continue;
        }
        if a[pivot_row][col] < 0 {
            for k in 0..cols {
                a[pivot_row][k] = -a[pivot_row][k];
            }
        }
        let pivot = a[pivot_row][col];
        for r in 0..pivot_row {
            let q = a[r][col].div_euclid(pivot);
            if q != 0 {
                for k in 0..cols {
                    a[r][k] -= q * a[pivot_row][k];
                }
            }
        }
        pivot_row += 1;
    }
    a.iter()
        .map(|r| r.iter().map(|&x| x as i64).collect())
        .collect()
}

/// Integer quotient rounded toward the nearest integer (ties toward zero),
/// which keeps remainders small during the HNF passes.
fn div_round(a: i128, b: i128) -> i128 {
    let q = a.div_euclid(b);
    let r = a - q * b;
    if 2 * r.abs() > b.abs() {
        q + r.signum() * b.signum()
    } else {
        q
    }
}

/// Determinant of a square integer matrix, exactly, by cofactor expansion.
/// Only called on the small matrices (n <= 6) used for unimodularity checks.
pub(crate) fn integer_det(m: &[Vec<i64>]) -> i128 {
    let a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    integer_det_rec(&a)
}

fn integer_det_rec(a: &[Vec<i128>]) -> i128 {
    let n = a.len();
    match n {
        0 => 1,
        1 => a[0][0],
        2 => a[0][0] * a[1][1] - a[0][1] * a[1][0],
        _ => {
            let mut det = 0i128;
            for col in 0..n {
                if a[0][col] == 0 {
                    continue;
                }
                let minor: Vec<Vec<i128>> = a[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|&(j, _)| j != col)
                            .map(|(_, &x)| x)
                            .collect()
                    })
                    .collect();
                let sign = if col % 2 == 0 { 1 } else { -1 };
                det += sign * a[0][col] * integer_det_rec(&minor);
            }
            det
        }
    }
}
