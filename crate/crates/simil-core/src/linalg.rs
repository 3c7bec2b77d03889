//! Exact Gaussian elimination on small rational matrices.
//!
//! Deterministic first-nonzero pivoting: with exact arithmetic there is no
//! stability concern, and a fixed pivot order makes every downstream
//! construction reproducible.

use crate::num::Q;
use num_traits::Zero;

/// Rank of the row set.
pub fn rank(rows: &[Vec<Q>]) -> usize {
    let mut m: Vec<Vec<Q>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let factor = &m[i][c] / &m[r][c];
                for j in c..cols {
                    let sub = &factor * &m[r][j];
                    m[i][j] = &m[i][j] - sub;
                }
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// One solution of `M x = t` (free variables set to zero), or None if the
/// system is inconsistent.
pub fn solve(m: &[Vec<Q>], t: &[Q]) -> Option<Vec<Q>> {
    assert_eq!(m.len(), t.len(), "row/target length mismatch");
    let cols = m.first().map_or(0, Vec::len);
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .zip(t)
        .map(|(row, ti)| {
            let mut r = row.clone();
            r.push(ti.clone());
            r
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let factor = &a[i][c] / &a[r][c];
                for j in c..=cols {
                    let sub = &factor * &a[r][j];
                    a[i][j] = &a[i][j] - sub;
                }
            }
        }
        pivots.push((r, c));
        r += 1;
        if r == a.len() {
            break;
        }
    }
    for row in a.iter().skip(r) {
        if !row[cols].is_zero() {
            return None;
        }
    }
    let mut x = vec![Q::zero(); cols];
    for (ri, ci) in pivots {
        x[ci] = &a[ri][cols] / &a[ri][ci];
    }
    Some(x)
}

/// A nonzero combination `lambda` with `sum_i lambda_i * rows_i = 0`, or None
/// if the rows are linearly independent.
pub fn null_combination(rows: &[Vec<Q>]) -> Option<Vec<Q>> {
    let n = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    // Row-reduce [rows | I]; a zero row in the left block exposes the
    // combination in the right block.
    let mut a: Vec<Vec<Q>> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            for j in 0..n {
                r.push(if i == j { Q::from_integer(1.into()) } else { Q::zero() });
            }
            r
        })
        .collect();
    let total = cols + n;
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..n).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        for i in 0..n {
            if i != r && !a[i][c].is_zero() {
                let factor = &a[i][c] / &a[r][c];
                for j in 0..total {
                    let sub = &factor * &a[r][j];
                    a[i][j] = &a[i][j] - sub;
                }
            }
        }
        r += 1;
        if r == n {
            break;
        }
    }
    for row in a.iter().skip(r) {
        if row[..cols].iter().all(Zero::is_zero) {
            return Some(row[cols..].to_vec());
        }
    }
    None
}

/// Certificate of affine dependence: a nonzero `lambda` with
/// `sum lambda_i = 0` and `sum lambda_i * p_i = 0`, or None if the points are
/// affinely independent.
pub fn affine_dependence(points: &[Vec<Q>]) -> Option<Vec<Q>> {
    let rows: Vec<Vec<Q>> = points
        .iter()
        .map(|p| {
            let mut r = p.clone();
            r.push(Q::from_integer(1.into()));
            r
        })
        .collect();
    null_combination(&rows)
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    assert_eq!(a.len(), b.len(), "dot length mismatch");
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
