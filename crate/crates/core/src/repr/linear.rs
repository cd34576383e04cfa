//! Dense linear algebra over a [`Field`].

use crate::field::{Elem, Field};

pub fn mul(k: &Field, a: &[Vec<Elem>], b: &[Vec<Elem>]) -> Vec<Vec<Elem>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|c| (0..inner).fold(k.zero(), |acc, x| k.add(&acc, &k.mul(&row[x], &b[x][c]))))
                .collect()
        })
        .collect()
}

pub fn apply(k: &Field, a: &[Vec<Elem>], v: &[Elem]) -> Vec<Elem> {
    a.iter().map(|row| row.iter().zip(v).fold(k.zero(), |acc, (x, y)| k.add(&acc, &k.mul(x, y)))).collect()
}

pub fn transpose(a: &[Vec<Elem>]) -> Vec<Vec<Elem>> {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|c| a.iter().map(|row| row[c].clone()).collect()).collect()
}

/// `Āᵀ`.
pub fn conj_transpose(k: &Field, a: &[Vec<Elem>]) -> Vec<Vec<Elem>> {
    transpose(a).iter().map(|row| row.iter().map(|x| k.conj(x)).collect()).collect()
}

pub fn identity(k: &Field, n: usize) -> Vec<Vec<Elem>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { k.one() } else { k.zero() }).collect()).collect()
}

pub fn is_zero(k: &Field, a: &[Vec<Elem>]) -> bool {
    a.iter().all(|row| row.iter().all(|x| k.is_zero(x)))
}

/// Row echelon form; returns the rank.
#[cfg(test)]
fn echelon(k: &Field, mut m: Vec<Vec<Elem>>) -> (usize, Vec<Vec<Elem>>) {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !k.is_zero(&m[r][c])) else { continue };
        m.swap(rank, p);
        let inv = k.inv(&m[rank][c]).expect("nonzero pivot");
        for r in 0..rows {
            if r != rank && !k.is_zero(&m[r][c]) {
                let f = k.mul(&m[r][c], &inv);
                for x in c..cols {
                    let d = k.mul(&f, &m[rank][x]);
                    m[r][x] = k.sub(&m[r][x], &d);
                }
            }
        }
        rank += 1;
    }
    (rank, m)
}

#[cfg(test)]
pub fn rank(k: &Field, vectors: &[Vec<Elem>]) -> usize {
    echelon(k, vectors.to_vec()).0
}

/// `None` when singular.
#[cfg(test)]
pub fn inverse(k: &Field, a: &[Vec<Elem>]) -> Option<Vec<Vec<Elem>>> {
    let n = a.len();
    let aug: Vec<Vec<Elem>> = a.iter().zip(identity(k, n)).map(|(r, e)| r.iter().cloned().chain(e).collect()).collect();
    let (_, m) = echelon(k, aug);
    let mut out = Vec::with_capacity(n);
    for (i, row) in m.iter().enumerate() {
        let piv = &row[i];
        if k.is_zero(piv) {
            return None;
        }
        let inv = k.inv(piv).ok()?;
        out.push(row[n..].iter().map(|x| k.mul(x, &inv)).collect());
    }
    Some(out)
}

/// For `v_i, v_j`: `Some(Some(λ))` when `v_i = λ v_j` with `v_j ≠ 0`,
/// `Some(None)` when `v_j = 0`, and `None` when they are independent.
pub fn dependence(k: &Field, vi: &[Elem], vj: &[Elem]) -> Option<Option<Elem>> {
    let Some(p) = vj.iter().position(|x| !k.is_zero(x)) else { return Some(None) };
    let lambda = k.div(&vi[p], &vj[p]).expect("nonzero pivot");
    vi.iter().zip(vj).all(|(x, y)| *x == k.mul(&lambda, y)).then_some(Some(lambda))
}

/// Columns: the given independent vectors, then standard basis vectors
/// chosen greedily to complete a basis.
#[cfg(test)]
pub fn complete_basis(k: &Field, given: &[Vec<Elem>]) -> Vec<Vec<Elem>> {
    let r = given[0].len();
    let mut cols: Vec<Vec<Elem>> = given.to_vec();
    for e in identity(k, r) {
        if cols.len() == r {
            break;
        }
        cols.push(e);
        if rank(k, &cols) < cols.len() {
            cols.pop();
        }
    }
    transpose(&cols)
}
