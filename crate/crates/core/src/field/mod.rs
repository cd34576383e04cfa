//! Valued fields with involution.
//!
//! An element is a rational function in `t` over a base field `B`, where `B`
//! is `Q`, `F_p`, or a quadratic extension `F0[α]/(α² + cα + d)` carrying the
//! involution `α ↦ e + fα`. The involution acts on coefficients and, when
//! the field spec is twisted, also sends `t ↦ −t`. Supported valuations:
//!
//! * `t`-adic: trivial on `B`, `ν(t) = 1`;
//! * `p`-adic: on `B` (inert: `ν(a + bα) = min(ν(a), ν(b))`; split: via a
//!   Hensel-lifted root `α̂ ∈ Z_p`), extended to `B(t)` by the Gauss norm
//!   `ν(Σ a_i t^i) = min ν(a_i)`;
//! * trivial.

pub mod base;
mod parse;
pub mod poly;

use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use self::base::{int_val, inv_mod_prime_power, rat_val, BaseElem, BaseField, Quadratic};
use self::poly::Poly;
use crate::rat::{rat, ExtRat, Rat};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BaseSpec {
    Rationals {
        #[serde(default, skip_serializing_if = "is_zero_u64")]
        char: u64,
    },
    /// `α² + cα + d = 0`, involution `α ↦ conj[0] + conj[1]·α`.
    Quadratic {
        c: i64,
        d: i64,
        conj: [i64; 2],
        #[serde(default, skip_serializing_if = "is_zero_u64")]
        char: u64,
    },
}

fn is_zero_u64(x: &u64) -> bool {
    *x == 0
}

fn is_false(x: &bool) -> bool {
    !*x
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PadicMode {
    Inert,
    Split,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ValuationSpec {
    #[serde(rename = "t-adic")]
    TAdic,
    #[serde(rename = "p-adic")]
    PAdic {
        p: u64,
        mode: PadicMode,
        /// Split mode: residue mod `p` of the root that `α` is identified with.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        root: Option<u64>,
    },
    #[serde(rename = "trivial")]
    Trivial,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub base: BaseSpec,
    pub twist: bool,
    pub valuation: ValuationSpec,
    /// Set when the involution deliberately fails to preserve the valuation.
    #[serde(default, skip_serializing_if = "is_false")]
    pub violating: bool,
}

impl FieldSpec {
    /// Named specs used throughout tests, benches and the command line.
    pub fn catalog() -> Vec<(&'static str, FieldSpec)> {
        let q = BaseSpec::Rationals { char: 0 };
        let qi = BaseSpec::Quadratic { c: 0, d: 1, conj: [0, -1], char: 0 };
        let eis = BaseSpec::Quadratic { c: 1, d: 1, conj: [-1, -1], char: 0 };
        let f4 = BaseSpec::Quadratic { c: 1, d: 1, conj: [1, 1], char: 2 };
        let spec = |base: &BaseSpec, twist, valuation| FieldSpec { base: base.clone(), twist, valuation, violating: false };
        let inert = |p| ValuationSpec::PAdic { p, mode: PadicMode::Inert, root: None };
        vec![
            ("q-tadic", spec(&q, false, ValuationSpec::TAdic)),
            ("qi-tadic", spec(&qi, false, ValuationSpec::TAdic)),
            ("qi-twist-tadic", spec(&qi, true, ValuationSpec::TAdic)),
            ("q-twist-tadic", spec(&q, true, ValuationSpec::TAdic)),
            ("q-2adic", spec(&q, false, inert(2))),
            ("q-5adic", spec(&q, false, inert(5))),
            ("eis-2adic", spec(&eis, false, inert(2))),
            ("qi-3adic", spec(&qi, false, inert(3))),
            ("f4-trivial", spec(&f4, false, ValuationSpec::Trivial)),
            ("f4-tadic", spec(&f4, false, ValuationSpec::TAdic)),
            (
                "violating",
                FieldSpec {
                    base: BaseSpec::Quadratic { c: 1, d: 2, conj: [-1, -1], char: 0 },
                    twist: false,
                    valuation: ValuationSpec::PAdic { p: 2, mode: PadicMode::Split, root: Some(0) },
                    violating: true,
                },
            ),
        ]
    }

    pub fn named(name: &str) -> Result<FieldSpec> {
        FieldSpec::catalog()
            .into_iter()
            .find(|(n, _)| *n == name)
            .map(|(_, s)| s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown field {name:?}")))
    }
}

/// Lower bound and hard cap on `p`-adic precision for split valuations.
const HENSEL_START: u32 = 16;
pub const HENSEL_CAP: u32 = 1 << 14;

/// A root of `x² + cx + d` in `Z_p`, lifted on demand.
#[derive(Debug)]
struct Hensel {
    p: BigInt,
    c: BigInt,
    d: BigInt,
    /// `(k, r)` with `r` a root modulo `p^k`; only ever grows.
    cache: RwLock<(u32, BigInt)>,
}

impl Hensel {
    fn root_mod(&self, k: u32) -> Result<BigInt> {
        if k > HENSEL_CAP {
            return Err(Error::PrecisionExceeded(k as usize));
        }
        {
            let g = self.cache.read().expect("lock");
            if g.0 >= k {
                return Ok(g.1.mod_floor(&self.p.pow(k)));
            }
        }
        let mut w = self.cache.write().expect("lock");
        while w.0 < k {
            let k2 = w.0 * 2;
            let m = self.p.pow(k2);
            let r = &w.1;
            let f = r * r + &self.c * r + &self.d;
            let fp = BigInt::from(2) * r + &self.c;
            let next = (r - f * inv_mod_prime_power(&fp, &self.p, k2)).mod_floor(&m);
            *w = (k2, next);
        }
        Ok(w.1.mod_floor(&self.p.pow(k)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Val {
    TAdic,
    Trivial,
    PAdic { p: u64 },
    Split { p: u64 },
}

/// An element of `B(t)`: `num/den` with `den` monic and coprime to `num`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem {
    num: Poly,
    den: Poly,
}

impl Elem {
    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }
}

/// A field built from a validated [`FieldSpec`].
#[derive(Debug)]
pub struct Field {
    spec: FieldSpec,
    base: BaseField,
    val: Val,
    hensel: Option<Hensel>,
    residue: OnceLock<Arc<Field>>,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", serde_json::to_string(&self.spec).expect("serializable"))
    }
}

impl Field {
    pub fn new(spec: FieldSpec) -> Result<Self> {
        let (p0, quad) = match &spec.base {
            BaseSpec::Rationals { char } => (*char, None),
            BaseSpec::Quadratic { c, d, conj, char } => {
                (*char, Some(Quadratic { c: rat(*c), d: rat(*d), e: rat(conj[0]), f: rat(conj[1]) }))
            }
        };
        let base = BaseField::new(p0, quad)?;
        let (val, hensel) = match &spec.valuation {
            ValuationSpec::TAdic => (Val::TAdic, None),
            ValuationSpec::Trivial => (Val::Trivial, None),
            ValuationSpec::PAdic { p, mode, root } => {
                if p0 != 0 {
                    return Err(Error::InvalidSpec("p-adic valuations need a characteristic-zero base".into()));
                }
                if !base::is_prime(*p) {
                    return Err(Error::InvalidSpec(format!("{p} is not prime")));
                }
                match (&spec.base, mode) {
                    (BaseSpec::Rationals { .. }, _) => (Val::PAdic { p: *p }, None),
                    (BaseSpec::Quadratic { c, d, conj, .. }, PadicMode::Inert) => {
                        let q = Quadratic { c: rat(*c), d: rat(*d), e: rat(conj[0]), f: rat(conj[1]) };
                        BaseField::new(*p, Some(q)).map_err(|_| {
                            Error::InvalidSpec(format!("minimal polynomial is not irreducible mod {p}; use split mode"))
                        })?;
                        (Val::PAdic { p: *p }, None)
                    }
                    (BaseSpec::Quadratic { c, d, .. }, PadicMode::Split) => {
                        let r0 = root.ok_or_else(|| Error::InvalidSpec("split mode needs a root".into()))?;
                        let (pb, cb, db, rb) = (BigInt::from(*p), BigInt::from(*c), BigInt::from(*d), BigInt::from(r0));
                        let f = (&rb * &rb + &cb * &rb + &db).mod_floor(&pb);
                        let fp = (BigInt::from(2) * &rb + &cb).mod_floor(&pb);
                        if !f.is_zero() || fp.is_zero() {
                            return Err(Error::InvalidSpec(format!("{r0} is not a simple root mod {p}")));
                        }
                        let h = Hensel { p: pb, c: cb, d: db, cache: RwLock::new((1, rb)) };
                        (Val::Split { p: *p }, Some(h))
                    }
                }
            }
        };
        let field = Field { spec, base, val, hensel, residue: OnceLock::new() };
        field.check_compatibility()?;
        Ok(field)
    }

    pub fn named(name: &str) -> Result<Self> {
        Field::new(FieldSpec::named(name)?)
    }

    /// Confirms the `violating` flag is honest on a set of probe elements.
    fn check_compatibility(&self) -> Result<()> {
        let mut probes = vec![self.t(), self.add(&self.t(), &self.one())];
        if let Ok(a) = self.alpha() {
            for k in -3..=3 {
                probes.push(self.add(&a, &self.int(k)));
                probes.push(self.add(&self.mul(&self.int(2), &a), &self.int(k)));
            }
        }
        let mut violated = false;
        for x in &probes {
            violated |= self.valuation(x)? != self.valuation(&self.conj(x))?;
        }
        match (violated, self.spec.violating) {
            (true, false) => Err(Error::InvalidSpec("involution does not preserve the valuation".into())),
            (false, true) => Err(Error::InvalidSpec("flagged violating, but the involution preserves the valuation".into())),
            _ => Ok(()),
        }
    }

    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn base(&self) -> &BaseField {
        &self.base
    }

    /// `α² = −1` over the rationals: the generator may be written `i`.
    pub fn is_gaussian(&self) -> bool {
        matches!(self.spec.base, BaseSpec::Quadratic { c: 0, d: 1, char: 0, .. })
    }

    /// The involution is the identity.
    pub fn involution_is_trivial(&self) -> bool {
        let twist_trivial = !self.spec.twist || self.base.p == 2;
        let base_trivial = match &self.spec.base {
            BaseSpec::Rationals { .. } => true,
            BaseSpec::Quadratic { conj, .. } => *conj == [0, 1],
        };
        twist_trivial && base_trivial
    }

    pub fn characteristic(&self) -> u64 {
        self.base.p
    }

    pub fn residue_characteristic(&self) -> u64 {
        match self.val {
            Val::PAdic { p } | Val::Split { p } => p,
            _ => self.base.p,
        }
    }

    pub fn valuation_is_trivial(&self) -> bool {
        self.val == Val::Trivial
    }

    fn make(&self, num: Poly, den: Poly) -> Elem {
        let k = &self.base;
        if num.is_empty() {
            return self.zero();
        }
        if poly::is_one(k, &den) {
            return Elem { num, den };
        }
        let (num, den) = match poly::ord(k, &den) {
            // Monomial denominator c·t^d: the gcd is a power of t.
            Some(d) if d + 1 == den.len() => {
                let s = d.min(poly::ord(k, &num).expect("nonzero"));
                (poly::shift_down(&num, s), poly::shift_down(&den, s))
            }
            _ => {
                let g = poly::gcd(k, &num, &den);
                (poly::exact_div(k, &num, &g), poly::exact_div(k, &den, &g))
            }
        };
        self.normalized(num, den)
    }

    /// Makes an already coprime denominator monic.
    fn normalized(&self, num: Poly, den: Poly) -> Elem {
        let k = &self.base;
        let lead = den.last().expect("nonzero denominator");
        if k.is_one(lead) {
            return Elem { num, den };
        }
        let inv = k.inv(lead).unwrap();
        Elem { num: poly::scale(k, &num, &inv), den: poly::scale(k, &den, &inv) }
    }

    pub fn from_polys(&self, num: Poly, den: Poly) -> Result<Elem> {
        let den = poly::trim(&self.base, den);
        if den.is_empty() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.make(poly::trim(&self.base, num), den))
    }

    pub fn from_poly(&self, num: Poly) -> Elem {
        self.make(poly::trim(&self.base, num), poly::one(&self.base))
    }

    pub fn zero(&self) -> Elem {
        Elem { num: Vec::new(), den: poly::one(&self.base) }
    }

    pub fn one(&self) -> Elem {
        self.int(1)
    }

    pub fn int(&self, n: i64) -> Elem {
        self.constant(self.base.from_int(n))
    }

    pub fn rat(&self, r: &Rat) -> Result<Elem> {
        Ok(self.constant(self.base.from_rat(r)?))
    }

    pub fn constant(&self, c: BaseElem) -> Elem {
        Elem { num: poly::constant(&self.base, c), den: poly::one(&self.base) }
    }

    pub fn t(&self) -> Elem {
        self.t_pow(1)
    }

    pub fn t_pow(&self, k: usize) -> Elem {
        Elem { num: poly::monomial(&self.base, self.base.one(), k), den: poly::one(&self.base) }
    }

    pub fn alpha(&self) -> Result<Elem> {
        if !self.base.is_quadratic() {
            return Err(Error::InvalidArgument("the base field has no generator α".into()));
        }
        Ok(self.constant(self.base.alpha()))
    }

    pub fn is_zero(&self, x: &Elem) -> bool {
        x.num.is_empty()
    }

    pub fn is_one(&self, x: &Elem) -> bool {
        poly::is_one(&self.base, &x.num) && poly::is_one(&self.base, &x.den)
    }

    pub fn is_polynomial(&self, x: &Elem) -> bool {
        poly::is_one(&self.base, &x.den)
    }

    pub fn add(&self, x: &Elem, y: &Elem) -> Elem {
        let k = &self.base;
        if x.den == y.den {
            let num = poly::add(k, &x.num, &y.num);
            return if poly::is_one(k, &x.den) { Elem { num, den: x.den.clone() } } else { self.make(num, x.den.clone()) };
        }
        let num = poly::add(k, &poly::mul(k, &x.num, &y.den), &poly::mul(k, &y.num, &x.den));
        self.make(num, poly::mul(k, &x.den, &y.den))
    }

    pub fn neg(&self, x: &Elem) -> Elem {
        Elem { num: poly::neg(&self.base, &x.num), den: x.den.clone() }
    }

    pub fn sub(&self, x: &Elem, y: &Elem) -> Elem {
        self.add(x, &self.neg(y))
    }

    pub fn mul(&self, x: &Elem, y: &Elem) -> Elem {
        let k = &self.base;
        let num = poly::mul(k, &x.num, &y.num);
        if poly::is_one(k, &x.den) && poly::is_one(k, &y.den) {
            return if num.is_empty() { self.zero() } else { Elem { num, den: x.den.clone() } };
        }
        self.make(num, poly::mul(k, &x.den, &y.den))
    }

    pub fn inv(&self, x: &Elem) -> Result<Elem> {
        if self.is_zero(x) {
            return Err(Error::DivisionByZero);
        }
        Ok(self.normalized(x.den.clone(), x.num.clone()))
    }

    pub fn div(&self, x: &Elem, y: &Elem) -> Result<Elem> {
        Ok(self.mul(x, &self.inv(y)?))
    }

    pub fn pow(&self, x: &Elem, e: i64) -> Result<Elem> {
        let b = if e < 0 { self.inv(x)? } else { x.clone() };
        let mut acc = self.one();
        let mut sq = b;
        let mut n = e.unsigned_abs();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            n >>= 1;
            if n > 0 {
                sq = self.mul(&sq, &sq);
            }
        }
        Ok(acc)
    }

    /// Multiplies by a rational scalar.
    pub fn scale(&self, x: &Elem, r: &Rat) -> Result<Elem> {
        Ok(self.mul(x, &self.rat(r)?))
    }

    pub fn conj(&self, x: &Elem) -> Elem {
        let k = &self.base;
        let twist = self.spec.twist;
        self.normalized(poly::conj(k, &x.num, twist), poly::conj(k, &x.den, twist))
    }

    fn base_val(&self, c: &BaseElem) -> Result<Option<i64>> {
        if self.base.is_zero(c) {
            return Ok(None);
        }
        Ok(Some(match self.val {
            Val::TAdic | Val::Trivial => 0,
            Val::PAdic { p } => [rat_val(&c.a, p), rat_val(&c.b, p)].into_iter().flatten().min().unwrap(),
            Val::Split { p } => self.split_val(c, p)?,
        }))
    }

    fn clear_denominators(c: &BaseElem) -> (BigInt, BigInt, BigInt) {
        let m = c.a.denom().lcm(c.b.denom());
        let big = |r: &Rat| (r * Rat::from_integer(m.clone())).to_integer();
        (big(&c.a), big(&c.b), m)
    }

    fn split_val(&self, c: &BaseElem, p: u64) -> Result<i64> {
        if c.b.is_zero() {
            return Ok(rat_val(&c.a, p).unwrap());
        }
        let h = self.hensel.as_ref().unwrap();
        let (a, b, m) = Field::clear_denominators(c);
        let vm = int_val(&m, &h.p);
        let mut k = HENSEL_START;
        loop {
            let r = h.root_mod(k)?;
            let x = (&a + &b * r).mod_floor(&h.p.pow(k));
            if !x.is_zero() {
                return Ok(int_val(&x, &h.p) - vm);
            }
            k *= 2;
        }
    }

    fn poly_val(&self, x: &Poly) -> Result<Option<i64>> {
        match self.val {
            Val::TAdic => Ok(poly::ord(&self.base, x).map(|o| o as i64)),
            _ => {
                let mut best: Option<i64> = None;
                for c in x {
                    if let Some(v) = self.base_val(c)? {
                        best = Some(best.map_or(v, |b| b.min(v)));
                    }
                }
                Ok(best)
            }
        }
    }

    /// Integer-valued; `∞` for zero.
    pub fn valuation(&self, x: &Elem) -> Result<ExtRat> {
        match self.poly_val(&x.num)? {
            None => Ok(ExtRat::Inf),
            Some(vn) => {
                let vd = self.poly_val(&x.den)?.expect("nonzero denominator");
                Ok(ExtRat::Fin(rat(vn - vd)))
            }
        }
    }

    /// Sign in the ordered field `Q(t)`, `t` a positive infinitesimal.
    pub fn sign(&self, x: &Elem) -> Result<i32> {
        if !matches!(self.spec.base, BaseSpec::Rationals { char: 0 }) || self.val != Val::TAdic {
            return Err(Error::Unordered);
        }
        let low = |p: &Poly| -> i32 {
            let o = poly::ord(&self.base, p).unwrap();
            if p[o].a.is_positive() {
                1
            } else {
                -1
            }
        };
        if self.is_zero(x) {
            return Ok(0);
        }
        Ok(low(&x.num) * low(&x.den))
    }

    /// The field the residue map lands in.
    pub fn residue_field(&self) -> Arc<Field> {
        self.residue
            .get_or_init(|| {
                let char_p = self.residue_characteristic();
                let base = match (&self.spec.base, self.val) {
                    (_, Val::Trivial) => return Arc::new(Field::new(self.spec.clone()).expect("valid")),
                    (b, Val::TAdic) => b.clone(),
                    (BaseSpec::Quadratic { c, d, conj, .. }, Val::PAdic { .. }) => {
                        let r = |x: i64| x.rem_euclid(char_p as i64);
                        BaseSpec::Quadratic { c: r(*c), d: r(*d), conj: [r(conj[0]), r(conj[1])], char: char_p }
                    }
                    _ => BaseSpec::Rationals { char: char_p },
                };
                let twist = self.spec.twist && self.val != Val::TAdic;
                let spec = FieldSpec { base, twist, valuation: ValuationSpec::Trivial, violating: false };
                Arc::new(Field::new(spec).expect("residue fields are valid"))
            })
            .clone()
    }

    fn residue_base(&self, c: &BaseElem, target: &Field) -> Result<BaseElem> {
        let tb = target.base();
        match self.val {
            Val::TAdic | Val::Trivial => Ok(c.clone()),
            Val::PAdic { .. } => Ok(BaseElem { a: tb.scalar(&c.a)?, b: tb.scalar(&c.b)? }),
            Val::Split { .. } => {
                let h = self.hensel.as_ref().unwrap();
                let (a, b, m) = Field::clear_denominators(c);
                let vm = int_val(&m, &h.p) as u32;
                let r = h.root_mod(vm + 1)?;
                let x = (&a + &b * r).mod_floor(&h.p.pow(vm + 1)) / h.p.pow(vm);
                let unit = &m / h.p.pow(vm);
                Ok(tb.from_scalar(tb.scalar(&Rat::new(x, unit))?))
            }
        }
    }

    /// Image in the residue field; requires `ν(x) ≥ 0`.
    pub fn residue(&self, x: &Elem) -> Result<Elem> {
        let target = self.residue_field();
        if self.val == Val::Trivial {
            return Ok(x.clone());
        }
        let v = self.valuation(x)?;
        if v < ExtRat::zero() {
            return Err(Error::NegativeValuation);
        }
        if self.is_zero(x) {
            return Ok(target.zero());
        }
        let k = &self.base;
        let (num, den) = match self.val {
            Val::TAdic => {
                let o = poly::ord(k, &x.den).unwrap();
                (poly::shift_down(&x.num, o), poly::shift_down(&x.den, o))
            }
            _ => {
                let vd = self.poly_val(&x.den)?.unwrap();
                let pk = Rat::from_integer(BigInt::from(self.residue_characteristic()).pow(vd.unsigned_abs() as u32));
                let sc = k.from_scalar(if vd >= 0 { pk.recip() } else { pk });
                (poly::scale(k, &x.num, &sc), poly::scale(k, &x.den, &sc))
            }
        };
        let reduce = |p: &Poly| -> Result<Poly> {
            let v: Vec<BaseElem> = p.iter().map(|c| self.residue_base(c, &target)).collect::<Result<_>>()?;
            Ok(poly::trim(target.base(), v))
        };
        let (mut rn, mut rd) = (reduce(&num)?, reduce(&den)?);
        if self.val == Val::TAdic {
            rn.truncate(1);
            rd.truncate(1);
            rn = poly::trim(target.base(), rn);
        }
        target.from_polys(rn, rd)
    }

    pub fn parse(&self, src: &str) -> Result<Elem> {
        parse::parse(self, src)
    }

    fn format_poly(&self, p: &Poly) -> String {
        let sym = if self.is_gaussian() { "i" } else { "a" };
        let k = &self.base;
        let mut out = String::new();
        for (i, c) in p.iter().enumerate() {
            if k.is_zero(c) {
                continue;
            }
            let mut coef = k.format(c, sym);
            let compound = !c.a.is_zero() && !c.b.is_zero();
            if compound && (i > 0 || !out.is_empty()) {
                coef = format!("({coef})");
            }
            let term = match i {
                0 => coef,
                _ => {
                    let tp = if i == 1 { "t".to_string() } else { format!("t^{i}") };
                    if k.is_one(c) {
                        tp
                    } else if k.is_one(&k.neg(c)) {
                        format!("-{tp}")
                    } else {
                        format!("{coef}*{tp}")
                    }
                }
            };
            if !out.is_empty() && !term.starts_with('-') {
                out.push('+');
            }
            out.push_str(&term);
        }
        if out.is_empty() {
            "0".into()
        } else {
            out
        }
    }

    /// Canonical text that [`Field::parse`] reads back to the same element.
    pub fn format(&self, x: &Elem) -> String {
        if self.is_polynomial(x) {
            self.format_poly(&x.num)
        } else {
            format!("({})/({})", self.format_poly(&x.num), self.format_poly(&x.den))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn v(k: &Field, s: &str) -> ExtRat {
        k.valuation(&k.parse(s).unwrap()).unwrap()
    }

    #[test]
    fn catalog_is_valid() {
        for (name, spec) in FieldSpec::catalog() {
            let k = Field::new(spec.clone()).unwrap_or_else(|e| panic!("{name}: {e}"));
            let json = serde_json::to_string(k.spec()).unwrap();
            let back: FieldSpec = serde_json::from_str(&json).unwrap();
            assert_eq!(back, spec);
        }
    }

    #[test]
    fn spec_json_shape() {
        let s: FieldSpec = serde_json::from_str(
            r#"{"base":{"kind":"quadratic","c":1,"d":1,"conj":[-1,-1]},"twist":false,"valuation":{"kind":"p-adic","p":2,"mode":"inert"}}"#,
        )
        .unwrap();
        assert_eq!(s, FieldSpec::named("eis-2adic").unwrap());
    }

    #[test]
    fn invalid_specs() {
        let mut s = FieldSpec::named("violating").unwrap();
        s.violating = false;
        assert!(Field::new(s).is_err());
        let mut s = FieldSpec::named("eis-2adic").unwrap();
        s.violating = true;
        assert!(Field::new(s).is_err());
        let s = FieldSpec {
            base: BaseSpec::Quadratic { c: 0, d: 1, conj: [0, -1], char: 0 },
            twist: false,
            valuation: ValuationSpec::PAdic { p: 2, mode: PadicMode::Inert, root: None },
            violating: false,
        };
        assert!(Field::new(s).is_err());
    }

    #[test]
    fn conjugations() {
        let k = Field::named("eis-2adic").unwrap();
        assert_eq!(k.format(&k.conj(&k.parse("a").unwrap())), "-1-a");
        let tw = Field::named("qi-twist-tadic").unwrap();
        assert_eq!(tw.conj(&tw.t()), tw.neg(&tw.t()));
        assert_eq!(tw.format(&tw.conj(&tw.parse("i*t+2").unwrap())), "2+i*t");
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for name in ["eis-2adic", "qi-twist-tadic", "f4-tadic", "violating"] {
            let k = Field::named(name).unwrap();
            for _ in 0..30 {
                let x = random_elem(&k, &mut rng);
                assert_eq!(k.conj(&k.conj(&x)), x);
            }
        }
    }

    fn random_elem(k: &Field, rng: &mut ChaCha8Rng) -> Elem {
        let mut x = k.zero();
        let a = k.alpha().unwrap_or_else(|_| k.one());
        for deg in 0..3 {
            let c = k.add(&k.int(rng.gen_range(-4..5)), &k.mul(&a, &k.int(rng.gen_range(-4..5))));
            x = k.add(&x, &k.mul(&c, &k.t_pow(deg)));
        }
        if rng.gen_bool(0.3) {
            let d = k.add(&k.t(), &k.int(rng.gen_range(1..4)));
            x = k.div(&x, &d).unwrap();
        }
        x
    }

    #[test]
    fn documented_valuations() {
        let qi = Field::named("qi-tadic").unwrap();
        assert_eq!(v(&qi, "-3*t+t^3"), ExtRat::from(1));
        assert_eq!(v(&qi, "0"), ExtRat::Inf);
        assert_eq!(v(&qi, "1/t^2"), ExtRat::from(-2));
        let e = Field::named("eis-2adic").unwrap();
        assert_eq!(v(&e, "2-4*a"), ExtRat::from(1));
        assert_eq!(v(&e, "-55"), ExtRat::from(0));
        assert_eq!(v(&e, "4"), ExtRat::from(2));
        let bad = Field::named("violating").unwrap();
        assert_eq!(v(&bad, "a"), ExtRat::from(1));
        assert_eq!(v(&bad, "-1-a"), ExtRat::from(0));
        assert_eq!(v(&bad, "-55"), ExtRat::from(0));
        assert_eq!(v(&bad, "4"), ExtRat::from(2));
        assert_eq!(v(&bad, "a/2"), ExtRat::from(0));
        assert_eq!(v(&bad, "a^5+2"), ExtRat::from(1));
    }

    #[test]
    fn hensel_root_is_a_root() {
        let k = Field::named("violating").unwrap();
        let h = k.hensel.as_ref().unwrap();
        let r = h.root_mod(200).unwrap();
        let m = h.p.pow(200);
        assert!((&r * &r + &r + BigInt::from(2)).mod_floor(&m).is_zero());
        assert!(h.root_mod(HENSEL_CAP + 1).is_err());
    }

    #[test]
    fn valuation_axioms() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (name, _) in FieldSpec::catalog() {
            let k = Field::named(name).unwrap();
            for _ in 0..40 {
                let (x, y) = (random_elem(&k, &mut rng), random_elem(&k, &mut rng));
                let (vx, vy) = (k.valuation(&x).unwrap(), k.valuation(&y).unwrap());
                assert_eq!(k.valuation(&k.mul(&x, &y)).unwrap(), &vx + &vy, "{name}");
                let vs = k.valuation(&k.add(&x, &y)).unwrap();
                assert!(vs >= vx.clone().min(vy.clone()), "{name}");
                if vx != vy {
                    assert_eq!(vs, vx.clone().min(vy.clone()), "{name}");
                }
                if !k.spec().violating {
                    assert_eq!(k.valuation(&k.conj(&x)).unwrap(), vx, "{name}");
                }
            }
        }
    }

    #[test]
    fn fixed_plus_antifixed_lemma() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for name in ["qi-tadic", "qi-3adic", "qi-twist-tadic", "q-twist-tadic", "q-5adic"] {
            let k = Field::named(name).unwrap();
            assert_ne!(k.residue_characteristic(), 2);
            for _ in 0..40 {
                let x = random_elem(&k, &mut rng);
                let y = random_elem(&k, &mut rng);
                let inv2 = k.rat(&crate::rat::ratio(1, 2)).unwrap();
                let a = k.mul(&k.add(&x, &k.conj(&x)), &inv2);
                let b = k.mul(&k.sub(&y, &k.conj(&y)), &inv2);
                let lhs = k.valuation(&k.add(&a, &b)).unwrap();
                let rhs = k.valuation(&a).unwrap().min(k.valuation(&b).unwrap());
                assert_eq!(lhs, rhs, "{name}");
            }
        }
    }

    #[test]
    fn signs() {
        let k = Field::named("q-tadic").unwrap();
        let s = |e: &str| k.sign(&k.parse(e).unwrap()).unwrap();
        assert_eq!(s("t^3+t^1"), 1);
        assert_eq!(s("0"), 0);
        assert_eq!(s("-2*t+t^2"), -1);
        assert_eq!(s("1/(t-t^2)"), 1);
        assert_eq!(s("1/(t^2-t)"), -1);
        assert_eq!(Field::named("qi-tadic").unwrap().sign(&k.one()), Err(Error::Unordered));
    }

    #[test]
    fn residues() {
        let qi = Field::named("qi-tadic").unwrap();
        let r = qi.residue(&qi.parse("-1+i*t").unwrap()).unwrap();
        assert_eq!(qi.residue_field().format(&r), "-1");
        assert_eq!(qi.residue(&qi.parse("1/t").unwrap()), Err(Error::NegativeValuation));
        let r = qi.residue(&qi.parse("(t+i*t^2)/(3*t)").unwrap()).unwrap();
        assert_eq!(qi.residue_field().format(&r), "1/3");
        let e = Field::named("eis-2adic").unwrap();
        let rf = e.residue_field();
        assert!(rf.is_zero(&e.residue(&e.int(2)).unwrap()));
        let ra = e.residue(&e.alpha().unwrap()).unwrap();
        assert_eq!(rf.format(&rf.conj(&ra)), "1+a");
        let bad = Field::named("violating").unwrap();
        let rb = bad.residue_field();
        assert!(rb.is_zero(&bad.residue(&bad.alpha().unwrap()).unwrap()));
        assert!(rb.is_one(&bad.residue(&bad.parse("-1-a").unwrap()).unwrap()));
        assert!(rb.is_one(&bad.residue(&bad.parse("a/2").unwrap()).unwrap()));
    }

    #[test]
    fn residue_is_a_homomorphism() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (name, _) in FieldSpec::catalog() {
            let k = Field::named(name).unwrap();
            let rf = k.residue_field();
            let mut done = 0;
            while done < 25 {
                let (x, y) = (random_elem(&k, &mut rng), random_elem(&k, &mut rng));
                if k.valuation(&x).unwrap() < ExtRat::zero() || k.valuation(&y).unwrap() < ExtRat::zero() {
                    continue;
                }
                let (rx, ry) = (k.residue(&x).unwrap(), k.residue(&y).unwrap());
                assert_eq!(k.residue(&k.add(&x, &y)).unwrap(), rf.add(&rx, &ry), "{name}");
                assert_eq!(k.residue(&k.mul(&x, &y)).unwrap(), rf.mul(&rx, &ry), "{name}");
                if !k.spec().violating {
                    assert_eq!(k.residue(&k.conj(&x)).unwrap(), rf.conj(&rx), "{name}");
                }
                done += 1;
            }
        }
    }

    #[test]
    fn parse_print_round_trip() {
        let e = Field::named("eis-2adic").unwrap();
        assert_eq!(e.parse("1+2*a").unwrap(), e.add(&e.one(), &e.mul(&e.int(2), &e.alpha().unwrap())));
        assert_eq!(e.format(&e.parse("(3-a)/1").unwrap()), "3-a");
        let q = Field::named("q-tadic").unwrap();
        assert_eq!(q.format(&q.parse("t^2+1").unwrap()), "1+t^2");
        assert_eq!(q.format(&q.parse("-(1/2)*t - t^-1").unwrap()), "(-1-1/2*t^2)/(t)");
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (name, _) in FieldSpec::catalog() {
            let k = Field::named(name).unwrap();
            for _ in 0..30 {
                let x = random_elem(&k, &mut rng);
                let s = k.format(&x);
                assert_eq!(k.parse(&s).unwrap(), x, "{name}: {s}");
            }
        }
    }

    #[test]
    fn parse_errors() {
        let q = Field::named("q-tadic").unwrap();
        assert!(matches!(q.parse("a+1"), Err(Error::Parse { pos: 0, .. })));
        assert!(matches!(q.parse("1+"), Err(Error::Parse { pos: 2, .. })));
        assert!(matches!(q.parse("(1"), Err(Error::Parse { .. })));
        assert!(matches!(q.parse("1/0"), Err(Error::Parse { .. })));
        let e = Field::named("eis-2adic").unwrap();
        assert!(e.parse("i").is_err());
        let f4 = Field::named("f4-trivial").unwrap();
        assert!(f4.parse("1/2").is_err());
        assert!(f4.is_zero(&f4.parse("a^2+a+1").unwrap()));
    }
}
