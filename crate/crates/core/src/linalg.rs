//! Dense linear algebra over the coefficient field.

use crate::scalar::Scalar;

/// Reduced row echelon form. Returns the nonzero rows and their pivot columns.
pub fn rref<T: Scalar>(rows: &[Vec<T>], ncols: usize) -> (Vec<Vec<T>>, Vec<usize>) {
    let mut m: Vec<Vec<T>> = rows.iter().filter(|row| row.iter().any(|v| !v.is_zero())).cloned().collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = T::one() / m[r][c].clone();
        let support: Vec<usize> = (c..ncols).filter(|&k| !m[r][k].is_zero()).collect();
        for &k in &support {
            m[r][k] = m[r][k].clone() * inv.clone();
        }
        let pivot_row = std::mem::take(&mut m[r]);
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for &k in &support {
                row[k] = row[k].clone() - f.clone() * pivot_row[k].clone();
            }
        }
        m[r] = pivot_row;
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank<T: Scalar>(rows: &[Vec<T>], ncols: usize) -> usize {
    rref(rows, ncols).1.len()
}

/// Basis of `{x : A x = 0}` for `A` given by rows.
pub fn nullspace<T: Scalar>(rows: &[Vec<T>], ncols: usize) -> Vec<Vec<T>> {
    let (r, pivots) = rref(rows, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![T::zero(); ncols];
            v[f] = T::one();
            for (row, &p) in r.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

/// Reduce `v` against an RREF basis (zeroing its pivot coordinates).
pub fn reduce_against<T: Scalar>(v: &[T], basis: &[Vec<T>], pivots: &[usize]) -> Vec<T> {
    let mut out = v.to_vec();
    for (row, &p) in basis.iter().zip(pivots) {
        if out[p].is_zero() {
            continue;
        }
        let f = out[p].clone();
        for (o, b) in out.iter_mut().zip(row) {
            *o = o.clone() - f.clone() * b.clone();
        }
    }
    out
}
