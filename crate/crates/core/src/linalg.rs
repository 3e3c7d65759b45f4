//! Dense linear algebra over a [`FieldSpec`].

use crate::field::{FieldElement, FieldSpec};

pub type Matrix = Vec<Vec<FieldElement>>;

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(field: &FieldSpec, m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !field.is_zero(&m[i][c])) else {
            continue;
        };
        m.swap(r, p);
        let inv = field.inv(&m[r][c]).unwrap();
        for x in m[r].iter_mut() {
            *x = field.mul(x, &inv);
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || field.is_zero(&row[c]) {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x = field.sub(x, &field.mul(&f, y));
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(field: &FieldSpec, m: &Matrix) -> usize {
    rref(field, &mut m.clone()).len()
}

/// Basis of the right kernel `{x : m x = 0}`.
pub fn kernel(field: &FieldSpec, m: &Matrix, cols: usize) -> Vec<Vec<FieldElement>> {
    let mut a = m.clone();
    let pivots = rref(field, &mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![field.zero(); cols];
            v[f] = field.one();
            for (r, &p) in pivots.iter().enumerate() {
                v[p] = field.neg(&a[r][f]);
            }
            v
        })
        .collect()
}

/// One solution of `m x = b` with free variables set to zero, if consistent.
pub fn solve(field: &FieldSpec, m: &Matrix, b: &[FieldElement]) -> Option<Vec<FieldElement>> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut a: Matrix = m
        .iter()
        .zip(b)
        .map(|(row, x)| {
            let mut r = row.clone();
            r.push(x.clone());
            r
        })
        .collect();
    let pivots = rref(field, &mut a);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![field.zero(); cols];
    for (r, &p) in pivots.iter().enumerate() {
        x[p] = a[r][cols].clone();
    }
    Some(x)
}

pub fn determinant(field: &FieldSpec, m: &Matrix) -> FieldElement {
    let n = m.len();
    let mut a = m.clone();
    let mut det = field.one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !field.is_zero(&a[i][c])) else {
            return field.zero();
        };
        if p != c {
            a.swap(p, c);
            det = field.neg(&det);
        }
        det = field.mul(&det, &a[c][c]);
        let inv = field.inv(&a[c][c]).unwrap();
        for i in c + 1..n {
            if field.is_zero(&a[i][c]) {
                continue;
            }
            let f = field.mul(&a[i][c], &inv);
            for j in c..n {
                let t = field.mul(&f, &a[c][j]);
                a[i][j] = field.sub(&a[i][j], &t);
            }
        }
    }
    det
}

pub fn inverse(field: &FieldSpec, m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    let mut a: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { field.one() } else { field.zero() }));
            r
        })
        .collect();
    let pivots = rref(field, &mut a);
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_mul(field: &FieldSpec, a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    (0..inner).fold(field.zero(), |acc, k| field.add(&acc, &field.mul(&row[k], &b[k][j])))
                })
                .collect()
        })
        .collect()
}

pub fn identity(field: &FieldSpec, n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { field.one() } else { field.zero() }).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_system() {
        let f = FieldSpec::prime(101).unwrap();
        let m: Matrix = vec![
            vec![f.from_i64(1), f.from_i64(2)],
            vec![f.from_i64(3), f.from_i64(4)],
        ];
        assert_eq!(determinant(&f, &m), f.from_i64(-2));
        let inv = inverse(&f, &m).unwrap();
        assert_eq!(mat_mul(&f, &m, &inv), identity(&f, 2));
        let x = solve(&f, &m, &[f.from_i64(5), f.from_i64(6)]).unwrap();
        assert_eq!(x, vec![f.from_i64(-4), f.div(&f.from_i64(9), &f.from_i64(2)).unwrap()]);
        let sing: Matrix = vec![vec![f.one(), f.one()], vec![f.one(), f.one()]];
        assert_eq!(kernel(&f, &sing, 2), vec![vec![f.from_i64(-1), f.one()]]);
        assert!(solve(&f, &sing, &[f.one(), f.zero()]).is_none());
    }
}
