//! Dense univariate polynomials in `t` over a [`BaseField`], lowest degree first.

use super::base::{BaseElem, BaseField};

/// Coefficients from degree 0 upward; never has trailing zeros.
pub type Poly = Vec<BaseElem>;

pub fn trim(k: &BaseField, mut p: Poly) -> Poly {
    while p.last().is_some_and(|c| k.is_zero(c)) {
        p.pop();
    }
    p
}

pub fn constant(k: &BaseField, c: BaseElem) -> Poly {
    trim(k, vec![c])
}

pub fn one(k: &BaseField) -> Poly {
    vec![k.one()]
}

pub fn is_one(k: &BaseField, p: &Poly) -> bool {
    p.len() == 1 && k.is_one(&p[0])
}

pub fn degree(p: &Poly) -> Option<usize> {
    p.len().checked_sub(1)
}

/// Lowest degree with a nonzero coefficient.
pub fn ord(k: &BaseField, p: &Poly) -> Option<usize> {
    p.iter().position(|c| !k.is_zero(c))
}

pub fn add(k: &BaseField, x: &Poly, y: &Poly) -> Poly {
    let n = x.len().max(y.len());
    let z = k.zero();
    let out = (0..n).map(|i| k.add(x.get(i).unwrap_or(&z), y.get(i).unwrap_or(&z))).collect();
    trim(k, out)
}

pub fn neg(k: &BaseField, x: &Poly) -> Poly {
    x.iter().map(|c| k.neg(c)).collect()
}

pub fn sub(k: &BaseField, x: &Poly, y: &Poly) -> Poly {
    add(k, x, &neg(k, y))
}

pub fn scale(k: &BaseField, x: &Poly, c: &BaseElem) -> Poly {
    trim(k, x.iter().map(|a| k.mul(a, c)).collect())
}

pub fn mul(k: &BaseField, x: &Poly, y: &Poly) -> Poly {
    if x.is_empty() || y.is_empty() {
        return Vec::new();
    }
    let mut out = vec![k.zero(); x.len() + y.len() - 1];
    for (i, a) in x.iter().enumerate() {
        if k.is_zero(a) {
            continue;
        }
        for (j, b) in y.iter().enumerate() {
            out[i + j] = k.add(&out[i + j], &k.mul(a, b));
        }
    }
    trim(k, out)
}

/// Quotient and remainder; `y` must be nonzero.
pub fn divrem(k: &BaseField, x: &Poly, y: &Poly) -> (Poly, Poly) {
    let dy = degree(y).expect("division by the zero polynomial");
    let lead_inv = k.inv(&y[dy]).unwrap();
    let mut r = x.clone();
    if r.len() <= dy {
        return (Vec::new(), r);
    }
    let mut q = vec![k.zero(); r.len() - dy];
    while let Some(dr) = degree(&r) {
        if dr < dy {
            break;
        }
        let c = k.mul(&r[dr], &lead_inv);
        let shift = dr - dy;
        for (i, b) in y.iter().enumerate() {
            r[shift + i] = k.sub(&r[shift + i], &k.mul(&c, b));
        }
        q[shift] = c;
        r = trim(k, r);
    }
    (trim(k, q), r)
}

/// `x / y` where the division is known to be exact.
pub fn exact_div(k: &BaseField, x: &Poly, y: &Poly) -> Poly {
    if is_one(k, y) {
        return x.clone();
    }
    let (q, r) = divrem(k, x, y);
    debug_assert!(r.is_empty(), "inexact polynomial division");
    q
}

pub fn monic(k: &BaseField, x: &Poly) -> Poly {
    match x.last() {
        None => Vec::new(),
        Some(l) if k.is_one(l) => x.clone(),
        Some(l) => scale(k, x, &k.inv(l).unwrap()),
    }
}

/// Monic greatest common divisor.
pub fn gcd(k: &BaseField, x: &Poly, y: &Poly) -> Poly {
    let (mut a, mut b) = (monic(k, x), monic(k, y));
    while !b.is_empty() {
        let (_, r) = divrem(k, &a, &b);
        a = b;
        b = monic(k, &r);
    }
    a
}

/// Coefficient-wise involution, with `t ↦ −t` when `twist` is set.
pub fn conj(k: &BaseField, x: &Poly, twist: bool) -> Poly {
    x.iter()
        .enumerate()
        .map(|(i, c)| {
            let c = k.conj(c);
            if twist && i % 2 == 1 {
                k.neg(&c)
            } else {
                c
            }
        })
        .collect()
}

/// Drops the factor `t^s` (the low `s` coefficients must vanish).
pub fn shift_down(x: &Poly, s: usize) -> Poly {
    x[s.min(x.len())..].to_vec()
}

pub fn monomial(k: &BaseField, c: BaseElem, deg: usize) -> Poly {
    let mut v = vec![k.zero(); deg];
    v.push(c);
    trim(k, v)
}
