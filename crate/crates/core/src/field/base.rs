//! Coefficient fields: `Q`, `F_p`, and quadratic extensions `F0[α]/(α²+cα+d)`
//! with an involution `α ↦ e + fα`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::rat::{fmt_rat, Rat};
use crate::{Error, Result};

/// Element `a + bα` (with `b = 0` over a prime field). In characteristic `p`
/// both parts are integers in `0..p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BaseElem {
    pub a: Rat,
    pub b: Rat,
}

/// `α² + cα + d` with involution `α ↦ e + fα`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quadratic {
    pub c: Rat,
    pub d: Rat,
    pub e: Rat,
    pub f: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseField {
    /// 0 for the rationals, otherwise a prime.
    pub p: u64,
    pub quad: Option<Quadratic>,
}

pub(crate) fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|k| k * k <= p).all(|k| p % k != 0)
}

/// `p`-adic valuation of a nonzero integer.
pub(crate) fn int_val(x: &BigInt, p: &BigInt) -> i64 {
    let mut x = x.abs();
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(p);
        if !r.is_zero() {
            return v;
        }
        x = q;
        v += 1;
    }
}

/// `p`-adic valuation of a rational (`None` for zero).
pub(crate) fn rat_val(x: &Rat, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let p = BigInt::from(p);
    Some(int_val(x.numer(), &p) - int_val(x.denom(), &p))
}

/// Inverse of a unit modulo `m = p^k` via Euler's theorem.
pub(crate) fn inv_mod_prime_power(x: &BigInt, p: &BigInt, k: u32) -> BigInt {
    let m = p.pow(k);
    let phi = p.pow(k - 1) * (p - BigInt::one());
    x.mod_floor(&m).modpow(&(phi - BigInt::one()), &m)
}

impl BaseField {
    pub fn new(p: u64, quad: Option<Quadratic>) -> Result<Self> {
        if p != 0 && !is_prime(p) {
            return Err(Error::InvalidSpec(format!("characteristic {p} is not prime")));
        }
        let mut k = BaseField { p, quad: None };
        let quad = match quad {
            None => None,
            Some(q) => Some(Quadratic { c: k.scalar(&q.c)?, d: k.scalar(&q.d)?, e: k.scalar(&q.e)?, f: k.scalar(&q.f)? }),
        };
        k.quad = quad;
        if let Some(q) = &k.quad {
            if k.has_root(&q.c, &q.d) {
                return Err(Error::InvalidSpec("minimal polynomial is reducible".into()));
            }
            let image = BaseElem { a: q.e.clone(), b: q.f.clone() };
            let at = k.add(&k.add(&k.mul(&image, &image), &k.scale(&image, &q.c)), &k.from_scalar(q.d.clone()));
            if !k.is_zero(&at) {
                return Err(Error::InvalidSpec("involution does not send α to a root".into()));
            }
            if k.conj(&image) != k.alpha() {
                return Err(Error::InvalidSpec("involution has order greater than two".into()));
            }
        }
        Ok(k)
    }

    /// Whether `x² + cx + d` has a root in the prime field.
    fn has_root(&self, c: &Rat, d: &Rat) -> bool {
        if self.p == 0 {
            let disc = c * c - Rat::from_integer(4.into()) * d;
            if disc.is_negative() {
                return false;
            }
            let (n, m) = (disc.numer(), disc.denom());
            n.sqrt().pow(2) == *n && m.sqrt().pow(2) == *m
        } else {
            (0..self.p).any(|x| {
                let x = Rat::from_integer(x.into());
                self.scalar(&(&x * &x + c * &x + d)).unwrap().is_zero()
            })
        }
    }

    pub fn is_quadratic(&self) -> bool {
        self.quad.is_some()
    }

    /// Reduces a rational into the prime field.
    pub fn scalar(&self, r: &Rat) -> Result<Rat> {
        if self.p == 0 {
            return Ok(r.clone());
        }
        let p = BigInt::from(self.p);
        let den = r.denom().mod_floor(&p);
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let inv = den.modpow(&(&p - BigInt::from(2)), &p);
        Ok(Rat::from_integer((r.numer() * inv).mod_floor(&p)))
    }

    fn s(&self, r: Rat) -> Rat {
        if self.p == 0 {
            r
        } else {
            let p = BigInt::from(self.p);
            Rat::from_integer(r.to_integer().mod_floor(&p))
        }
    }

    pub fn zero(&self) -> BaseElem {
        BaseElem { a: Rat::zero(), b: Rat::zero() }
    }

    pub fn one(&self) -> BaseElem {
        BaseElem { a: Rat::one(), b: Rat::zero() }
    }

    pub fn alpha(&self) -> BaseElem {
        BaseElem { a: Rat::zero(), b: Rat::one() }
    }

    /// An already-reduced scalar.
    pub fn from_scalar(&self, a: Rat) -> BaseElem {
        BaseElem { a, b: Rat::zero() }
    }

    pub fn from_rat(&self, r: &Rat) -> Result<BaseElem> {
        Ok(self.from_scalar(self.scalar(r)?))
    }

    pub fn from_int(&self, n: i64) -> BaseElem {
        self.from_rat(&Rat::from_integer(n.into())).expect("integers reduce")
    }

    pub fn is_zero(&self, x: &BaseElem) -> bool {
        x.a.is_zero() && x.b.is_zero()
    }

    pub fn is_one(&self, x: &BaseElem) -> bool {
        x.a.is_one() && x.b.is_zero()
    }

    pub fn add(&self, x: &BaseElem, y: &BaseElem) -> BaseElem {
        BaseElem { a: self.s(&x.a + &y.a), b: self.s(&x.b + &y.b) }
    }

    pub fn sub(&self, x: &BaseElem, y: &BaseElem) -> BaseElem {
        BaseElem { a: self.s(&x.a - &y.a), b: self.s(&x.b - &y.b) }
    }

    pub fn neg(&self, x: &BaseElem) -> BaseElem {
        BaseElem { a: self.s(-&x.a), b: self.s(-&x.b) }
    }

    pub fn scale(&self, x: &BaseElem, r: &Rat) -> BaseElem {
        BaseElem { a: self.s(&x.a * r), b: self.s(&x.b * r) }
    }

    pub fn mul(&self, x: &BaseElem, y: &BaseElem) -> BaseElem {
        if x.b.is_zero() && y.b.is_zero() {
            return self.from_scalar(self.s(&x.a * &y.a));
        }
        let q = self.quad.as_ref().expect("α only exists in quadratic bases");
        let bb = &x.b * &y.b;
        BaseElem {
            a: self.s(&x.a * &y.a - &q.d * &bb),
            b: self.s(&x.a * &y.b + &x.b * &y.a - &q.c * &bb),
        }
    }

    /// `N(a + bα) = a² − abc + b²d`.
    pub fn norm(&self, x: &BaseElem) -> Rat {
        match &self.quad {
            None => self.s(&x.a * &x.a),
            Some(q) => self.s(&x.a * &x.a - &x.a * &x.b * &q.c + &x.b * &x.b * &q.d),
        }
    }

    fn scalar_inv(&self, r: &Rat) -> Rat {
        if self.p == 0 {
            r.recip()
        } else {
            let p = BigInt::from(self.p);
            Rat::from_integer(r.to_integer().modpow(&(&p - BigInt::from(2)), &p))
        }
    }

    pub fn inv(&self, x: &BaseElem) -> Option<BaseElem> {
        if self.is_zero(x) {
            return None;
        }
        if x.b.is_zero() {
            return Some(self.from_scalar(self.scalar_inv(&x.a)));
        }
        let q = self.quad.as_ref().unwrap();
        let ninv = self.scalar_inv(&self.norm(x));
        Some(BaseElem { a: self.s((&x.a - &x.b * &q.c) * &ninv), b: self.s(-&x.b * &ninv) })
    }

    pub fn conj(&self, x: &BaseElem) -> BaseElem {
        match &self.quad {
            None => x.clone(),
            Some(q) => BaseElem { a: self.s(&x.a + &x.b * &q.e), b: self.s(&x.b * &q.f) },
        }
    }

    /// Text form that the expression parser reads back; `sym` names `α`.
    pub fn format(&self, x: &BaseElem, sym: &str) -> String {
        if x.b.is_zero() {
            return fmt_rat(&x.a);
        }
        let bpart = if x.b.is_one() {
            sym.to_string()
        } else if (-&x.b).is_one() {
            format!("-{sym}")
        } else {
            format!("{}*{sym}", fmt_rat(&x.b))
        };
        if x.a.is_zero() {
            bpart
        } else if bpart.starts_with('-') {
            format!("{}{bpart}", fmt_rat(&x.a))
        } else {
            format!("{}+{bpart}", fmt_rat(&x.a))
        }
    }
}
