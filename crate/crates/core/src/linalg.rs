//! Dense exact linear algebra over `BigRational`.

use num_traits::{One, Zero};

use crate::rat::Rat;

pub type Mat = Vec<Vec<Rat>>;

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut Mat) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[Vec<Rat>]) -> usize {
    let mut a = m.to_vec();
    rref(&mut a).len()
}

/// Basis of `{x : m x = 0}`.
pub fn nullspace(m: &[Vec<Rat>], cols: usize) -> Vec<Vec<Rat>> {
    let mut a = m.to_vec();
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rat::zero(); cols];
            v[f] = Rat::one();
            for (row, &pc) in pivots.iter().enumerate() {
                v[pc] = -a[row][f].clone();
            }
            v
        })
        .collect()
}

/// Solves `a x = b` for square nonsingular `a`.
pub fn solve(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    let mut aug: Mat = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() != n || pivots.iter().any(|&p| p >= n) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n].clone()).collect())
}

pub fn det(a: &[Vec<Rat>]) -> Rat {
    let n = a.len();
    let mut m = a.to_vec();
    let mut d = Rat::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
            return Rat::zero();
        };
        if p != c {
            m.swap(p, c);
            d = -d;
        }
        d *= &m[c][c];
        let inv = m[c][c].recip();
        for i in c + 1..n {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] * &inv;
            for j in c..n {
                let t = &f * &m[c][j];
                m[i][j] -= t;
            }
        }
    }
    d
}

fn differences(points: &[Vec<Rat>]) -> Mat {
    let o = &points[0];
    points[1..]
        .iter()
        .map(|p| p.iter().zip(o).map(|(a, b)| a - b).collect())
        .collect()
}

/// Dimension of the affine hull (`-1` is represented as `None` for no points).
pub fn affine_dim(points: &[Vec<Rat>]) -> Option<usize> {
    if points.is_empty() {
        return None;
    }
    Some(rank(&differences(points)))
}

pub fn affinely_independent(points: &[Vec<Rat>]) -> bool {
    affine_dim(points).is_some_and(|d| d + 1 == points.len())
}

/// Affine coordinates (weights summing to one) of `x` with respect to an
/// affinely independent list `basis`, if `x` lies in their affine hull.
pub fn affine_coords(basis: &[Vec<Rat>], x: &[Rat]) -> Option<Vec<Rat>> {
    let k = basis.len();
    let dim = x.len();
    // rows: coordinates and the sum-to-one row; columns: basis points.
    let mut m: Mat = (0..dim)
        .map(|r| {
            let mut row: Vec<Rat> = basis.iter().map(|b| b[r].clone()).collect();
            row.push(x[r].clone());
            row
        })
        .collect();
    let mut ones = vec![Rat::one(); k];
    ones.push(Rat::one());
    m.push(ones);
    let pivots = rref(&mut m);
    if pivots.contains(&k) {
        return None;
    }
    let mut w = vec![Rat::zero(); k];
    for (row, &pc) in pivots.iter().enumerate() {
        w[pc] = m[row][k].clone();
    }
    Some(w)
}

/// Affine isomorphism from the affine hull of a point set onto `Q^d`,
/// realised by selecting the pivot coordinates of the direction space.
#[derive(Debug, Clone)]
pub struct AffineChart {
    pub dim: usize,
    pub coords: Vec<usize>,
}

impl AffineChart {
    pub fn of(points: &[Vec<Rat>]) -> Self {
        if points.len() < 2 {
            return AffineChart { dim: 0, coords: Vec::new() };
        }
        let mut d = differences(points);
        let coords = rref(&mut d);
        AffineChart { dim: coords.len(), coords }
    }

    pub fn project(&self, x: &[Rat]) -> Vec<Rat> {
        self.coords.iter().map(|&c| x[c].clone()).collect()
    }
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
