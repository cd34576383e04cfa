//! Multivariate polynomials over a [`Field`]: multiaffine generating
//! polynomials and small sparse polynomials of degree ≤ 2 per variable.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::cube::Subset;
use crate::field::{Elem, Field};
use crate::subdivision::SubsetFunction;
use crate::{Error, Result};

/// `Σ_T c_T x^T`, stored densely by the bitmask of `T`.
#[derive(Debug, Clone)]
pub struct MultiAffinePoly {
    field: Arc<Field>,
    n: usize,
    coeffs: Vec<Elem>,
}

impl PartialEq for MultiAffinePoly {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.coeffs == other.coeffs
    }
}

impl MultiAffinePoly {
    /// `coeffs[T]` is the coefficient of `x^T`.
    pub fn new(field: Arc<Field>, n: usize, coeffs: Vec<Elem>) -> Self {
        assert_eq!(coeffs.len(), 1 << n, "one coefficient per subset");
        MultiAffinePoly { field, n, coeffs }
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Coefficient of `x^T`.
    pub fn coeff(&self, t: Subset) -> &Elem {
        &self.coeffs[t.bits as usize]
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    /// `c_S`, the coefficient of `x^{[n]∖S}`.
    pub fn complement_coeff(&self, s: Subset) -> &Elem {
        self.coeff(s.complement())
    }

    /// `p_S = ν(c_S)`.
    pub fn valuations(&self) -> Result<SubsetFunction> {
        let k = &self.field;
        let values = Subset::all(self.n).map(|s| k.valuation(self.complement_coeff(s))).collect::<Result<Vec<_>>>()?;
        SubsetFunction::new(self.n, values)
    }

    pub fn eval(&self, point: &[Elem]) -> Elem {
        let k = &self.field;
        let mut acc = k.zero();
        for (mask, c) in self.coeffs.iter().enumerate() {
            if k.is_zero(c) {
                continue;
            }
            let mut term = c.clone();
            for (i, x) in point.iter().enumerate().take(self.n) {
                if mask & (1 << i) != 0 {
                    term = k.mul(&term, x);
                }
            }
            acc = k.add(&acc, &term);
        }
        acc
    }

    /// `λ ⋆ f = f(λ_1 x_1, …, λ_n x_n)`.
    pub fn scale_vars(&self, lambda: &[Elem]) -> Result<MultiAffinePoly> {
        check_scale(&self.field, self.n, lambda)?;
        let k = &self.field;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(mask, c)| {
                Subset::new(mask as u32, self.n).elems().fold(c.clone(), |acc, i| k.mul(&acc, &lambda[i]))
            })
            .collect();
        Ok(MultiAffinePoly { field: k.clone(), n: self.n, coeffs })
    }

    pub fn to_small(&self) -> SmallPoly {
        let mut out = SmallPoly::zero(self.field.clone(), self.n);
        for (mask, c) in self.coeffs.iter().enumerate() {
            let exps = (0..self.n).map(|i| ((mask >> i) & 1) as u8).collect();
            out.add_term(exps, c.clone());
        }
        out
    }

    /// Text form with variables `x1 … xn`.
    pub fn format(&self) -> String {
        self.to_small().to_string()
    }
}

fn check_scale(k: &Field, n: usize, lambda: &[Elem]) -> Result<()> {
    if lambda.len() != n {
        return Err(Error::DimensionMismatch(format!("expected {n} scale factors, got {}", lambda.len())));
    }
    if lambda.iter().any(|x| k.is_zero(x)) {
        return Err(Error::InvalidArgument("scale factors must be nonzero".into()));
    }
    Ok(())
}

/// Sparse polynomial: exponent vector → nonzero coefficient.
#[derive(Debug, Clone)]
pub struct SmallPoly {
    field: Arc<Field>,
    n: usize,
    terms: BTreeMap<Vec<u8>, Elem>,
}

impl PartialEq for SmallPoly {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.terms == other.terms
    }
}

impl SmallPoly {
    pub fn zero(field: Arc<Field>, n: usize) -> Self {
        SmallPoly { field, n, terms: BTreeMap::new() }
    }

    pub fn constant(field: Arc<Field>, n: usize, c: Elem) -> Self {
        let mut p = SmallPoly::zero(field, n);
        p.add_term(vec![0; n], c);
        p
    }

    pub fn var(field: Arc<Field>, n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        let one = field.one();
        let mut p = SmallPoly::zero(field, n);
        p.add_term(e, one);
        p
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u8>, Elem> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exps: &[u8]) -> Elem {
        self.terms.get(exps).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn add_term(&mut self, exps: Vec<u8>, c: Elem) {
        let k = &self.field;
        if k.is_zero(&c) {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(old) => {
                let s = k.add(old, &c);
                if k.is_zero(&s) {
                    self.terms.remove(&exps);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(exps, c);
            }
        }
    }

    fn map_coeffs(&self, f: impl Fn(&[u8], &Elem) -> Elem) -> SmallPoly {
        let mut out = SmallPoly::zero(self.field.clone(), self.n);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(e, c));
        }
        out
    }

    pub fn add(&self, other: &SmallPoly) -> SmallPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> SmallPoly {
        let k = self.field.clone();
        self.map_coeffs(|_, c| k.neg(c))
    }

    pub fn sub(&self, other: &SmallPoly) -> SmallPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &SmallPoly) -> SmallPoly {
        let k = &self.field;
        let mut out = SmallPoly::zero(k.clone(), self.n);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, k.mul(c1, c2));
            }
        }
        out
    }

    pub fn scale(&self, c: &Elem) -> SmallPoly {
        let k = self.field.clone();
        self.map_coeffs(|_, x| k.mul(x, c))
    }

    /// Applies the involution to every coefficient.
    pub fn conj(&self) -> SmallPoly {
        let k = self.field.clone();
        self.map_coeffs(|_, x| k.conj(x))
    }

    /// `f(σx)` for `σ = ±1`.
    pub fn subst_sign(&self, sigma: i64) -> SmallPoly {
        let k = self.field.clone();
        self.map_coeffs(|e, x| {
            let deg: u32 = e.iter().map(|&d| u32::from(d)).sum();
            if sigma < 0 && deg % 2 == 1 {
                k.neg(x)
            } else {
                x.clone()
            }
        })
    }

    /// `λ ⋆ f`.
    pub fn scale_vars(&self, lambda: &[Elem]) -> Result<SmallPoly> {
        check_scale(&self.field, self.n, lambda)?;
        let k = self.field.clone();
        Ok(self.map_coeffs(|e, x| {
            let mut acc = x.clone();
            for (i, &d) in e.iter().enumerate() {
                for _ in 0..d {
                    acc = k.mul(&acc, &lambda[i]);
                }
            }
            acc
        }))
    }

    /// `∂f/∂x_i`.
    pub fn derivative(&self, i: usize) -> SmallPoly {
        let k = &self.field;
        let mut out = SmallPoly::zero(k.clone(), self.n);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.add_term(e2, k.mul(c, &k.int(i64::from(e[i]))));
        }
        out
    }

    pub fn eval(&self, point: &[Elem]) -> Elem {
        let k = &self.field;
        let mut acc = k.zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (i, &d) in e.iter().enumerate() {
                for _ in 0..d {
                    term = k.mul(&term, &point[i]);
                }
            }
            acc = k.add(&acc, &term);
        }
        acc
    }

    /// Coefficient-wise residue; every coefficient must have `ν ≥ 0`.
    pub fn residue(&self) -> Result<SmallPoly> {
        let target = self.field.residue_field();
        let mut out = SmallPoly::zero(target, self.n);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), self.field.residue(c)?);
        }
        Ok(out)
    }

    /// Whether every exponent is 0 or 1.
    pub fn is_multiaffine(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&d| d <= 1))
    }

    /// Dense multiaffine form; `None` if some exponent exceeds 1.
    pub fn to_multiaffine(&self) -> Option<MultiAffinePoly> {
        if !self.is_multiaffine() {
            return None;
        }
        let k = &self.field;
        let mut coeffs = vec![k.zero(); 1 << self.n];
        for (e, c) in &self.terms {
            let mask: usize = e.iter().enumerate().map(|(i, &d)| usize::from(d) << i).sum();
            coeffs[mask] = c.clone();
        }
        Some(MultiAffinePoly::new(k.clone(), self.n, coeffs))
    }
}

impl fmt::Display for SmallPoly {
    /// Terms by descending total degree, `x1 … xn` as variable names.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let k = &self.field;
        let mut terms: Vec<(&Vec<u8>, &Elem)> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().map(|&d| u32::from(d)).sum();
            let db: u32 = b.iter().map(|&d| u32::from(d)).sum();
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        let mut out = String::new();
        for (e, c) in terms {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &d)| d > 0)
                .map(|(i, &d)| if d == 1 { format!("x{}", i + 1) } else { format!("x{}^{d}", i + 1) })
                .collect();
            let coef = k.format(c);
            let simple = !coef[1..].contains(['+', '-', '/']);
            let term = if mono.is_empty() {
                if simple {
                    coef
                } else {
                    format!("({coef})")
                }
            } else if coef == "1" {
                mono.join("*")
            } else if coef == "-1" {
                format!("-{}", mono.join("*"))
            } else if simple {
                format!("{coef}*{}", mono.join("*"))
            } else {
                format!("({coef})*{}", mono.join("*"))
            };
            if !out.is_empty() && !term.starts_with('-') {
                out.push('+');
            }
            out.push_str(&term);
        }
        f.write_str(&out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_and_products() {
        let k = Arc::new(Field::named("q-tadic").unwrap());
        let x1 = SmallPoly::var(k.clone(), 2, 0);
        let x2 = SmallPoly::var(k.clone(), 2, 1);
        let f = x1.mul(&x2).add(&SmallPoly::constant(k.clone(), 2, k.t()));
        let sq = f.mul(&f);
        assert_eq!(sq.derivative(0), f.derivative(0).mul(&f).scale(&k.int(2)));
        assert_eq!(f.subst_sign(-1), f);
        assert_eq!(x1.subst_sign(-1), x1.neg());
        assert_eq!(f.to_string(), "x1*x2+t");
        let m = f.to_multiaffine().unwrap();
        assert_eq!(m.to_small(), f);
        assert!(sq.to_multiaffine().is_none());
    }

    #[test]
    fn scale_vars_composes() {
        let k = Arc::new(Field::named("q-5adic").unwrap());
        let f = MultiAffinePoly::new(k.clone(), 2, vec![k.int(1), k.int(2), k.int(3), k.int(4)]);
        let l1 = [k.int(5), k.int(7)];
        let l2 = [k.rat(&crate::rat::ratio(1, 5)).unwrap(), k.int(2)];
        let both: Vec<Elem> = l1.iter().zip(&l2).map(|(a, b)| k.mul(a, b)).collect();
        assert_eq!(f.scale_vars(&l1).unwrap().scale_vars(&l2).unwrap(), f.scale_vars(&both).unwrap());
        assert_eq!(f.scale_vars(&[k.one(), k.one()]).unwrap(), f);
        assert!(f.scale_vars(&[k.zero(), k.one()]).is_err());
    }
}
