//! Facet enumeration of full-dimensional point sets by the double
//! description method, in exact arithmetic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::linalg::{self, dot};
use crate::rat::Rat;
use crate::{Error, Result};

/// A facet `normal·x ≤ offset` of `conv(points)`, with its tight points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facet {
    pub normal: Vec<Rat>,
    pub offset: Rat,
    pub tight: Vec<usize>,
}

type Bits = u128;

struct Ray {
    y: Vec<Rat>,
    zero: Bits,
}

fn primitive(y: Vec<Rat>) -> Vec<Rat> {
    let l = y.iter().fold(BigInt::one(), |l, r| l.lcm(r.denom()));
    let ints: Vec<BigInt> = y.iter().map(|r| (r * Rat::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return y;
    }
    ints.into_iter().map(|x| Rat::from_integer(x / &g)).collect()
}

/// Facets of the convex hull of `points ⊂ Q^d`, which must affinely span `Q^d`.
pub fn facets(points: &[Vec<Rat>]) -> Result<Vec<Facet>> {
    let m = points.len();
    let d = points.first().map_or(0, Vec::len);
    if m > Bits::BITS as usize {
        return Err(Error::InvalidArgument(format!("hull of {m} points exceeds the supported 128")));
    }
    if linalg::affine_dim(points) != Some(d) {
        return Err(Error::InvalidArgument("points do not affinely span the ambient space".into()));
    }
    if d == 0 {
        return Ok(Vec::new());
    }
    let dim = d + 1;
    // Row k encodes offset - normal·p_k >= 0 for y = (normal, offset).
    let rows: Vec<Vec<Rat>> = points
        .iter()
        .map(|p| {
            let mut r: Vec<Rat> = p.iter().map(|x| -x.clone()).collect();
            r.push(Rat::one());
            r
        })
        .collect();

    let mut basis_rows: Vec<usize> = Vec::new();
    for k in 0..m {
        let mut cand: Vec<Vec<Rat>> = basis_rows.iter().map(|&i| rows[i].clone()).collect();
        cand.push(rows[k].clone());
        if linalg::rank(&cand) == cand.len() {
            basis_rows.push(k);
            if basis_rows.len() == dim {
                break;
            }
        }
    }
    debug_assert_eq!(basis_rows.len(), dim);

    // Initial rays: columns of the inverse of the basis matrix.
    let bmat: Vec<Vec<Rat>> = basis_rows.iter().map(|&i| rows[i].clone()).collect();
    let mut rays: Vec<Ray> = Vec::with_capacity(dim);
    for j in 0..dim {
        let mut e = vec![Rat::zero(); dim];
        e[j] = Rat::one();
        let y = primitive(linalg::solve(&bmat, &e).expect("basis rows are independent"));
        let zero = basis_rows.iter().enumerate().filter(|&(i, _)| i != j).fold(0, |z, (_, &k)| z | 1 << k);
        rays.push(Ray { y, zero });
    }
    let mut processed: Bits = basis_rows.iter().fold(0, |z, &k| z | 1 << k);

    for k in 0..m {
        if processed >> k & 1 == 1 {
            continue;
        }
        let vals: Vec<Rat> = rays.iter().map(|r| dot(&rows[k], &r.y)).collect();
        let mut next: Vec<Ray> = Vec::new();
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for (i, v) in vals.iter().enumerate() {
            if v.is_positive() {
                pos.push(i);
            } else if v.is_negative() {
                neg.push(i);
            }
        }
        for &p in &pos {
            for &q in &neg {
                let common = rays[p].zero & rays[q].zero;
                if (common.count_ones() as usize) + 2 < dim {
                    continue;
                }
                let adjacent = rays
                    .iter()
                    .enumerate()
                    .all(|(w, r)| w == p || w == q || r.zero & common != common);
                if !adjacent {
                    continue;
                }
                let y: Vec<Rat> = rays[q]
                    .y
                    .iter()
                    .zip(&rays[p].y)
                    .map(|(yq, yp)| &vals[p] * yq - &vals[q] * yp)
                    .collect();
                next.push(Ray { y: primitive(y), zero: common | 1 << k });
            }
        }
        for (i, ray) in rays.into_iter().enumerate() {
            if vals[i].is_positive() {
                next.push(ray);
            } else if vals[i].is_zero() {
                next.push(Ray { y: ray.y, zero: ray.zero | 1 << k });
            }
        }
        rays = next;
        processed |= 1 << k;
    }

    let mut out: Vec<Facet> = rays
        .into_iter()
        .map(|r| {
            let offset = r.y[d].clone();
            let normal = r.y[..d].to_vec();
            let tight = (0..m).filter(|&k| r.zero >> k & 1 == 1).collect();
            Facet { normal, offset, tight }
        })
        .collect();
    out.sort_by(|a, b| a.tight.cmp(&b.tight));
    Ok(out)
}
