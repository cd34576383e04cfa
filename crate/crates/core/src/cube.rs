//! Subsets of `[n]`, faces of the 0-1 cube, the signed-permutation group
//! `B_n`, and convex circuit representations of cube points.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::linalg;
use crate::rat::Rat;
use crate::{Error, Result};

pub const MAX_N: usize = 16;

pub fn check_n(n: usize) -> Result<()> {
    if (1..=MAX_N).contains(&n) {
        Ok(())
    } else {
        Err(Error::GroundSetSize(n))
    }
}

/// A subset of `[n]` stored as a bitmask; bit `i` is element `i + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset {
    pub bits: u32,
    pub n: u8,
}

impl Subset {
    pub fn new(bits: u32, n: usize) -> Self {
        debug_assert!(n <= MAX_N && (bits >> n) == 0);
        Subset { bits, n: n as u8 }
    }

    pub fn empty(n: usize) -> Self {
        Subset::new(0, n)
    }

    pub fn full(n: usize) -> Self {
        Subset::new(full_mask(n), n)
    }

    /// Builds a subset from 1-based elements.
    pub fn from_elems(n: usize, elems: &[usize]) -> Self {
        let bits = elems.iter().fold(0u32, |b, &e| b | 1 << (e - 1));
        Subset::new(bits, n)
    }

    pub fn n(self) -> usize {
        self.n as usize
    }

    pub fn len(self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.bits >> i & 1 == 1
    }

    pub fn complement(self) -> Self {
        Subset::new(!self.bits & full_mask(self.n()), self.n())
    }

    pub fn sym_diff(self, other: Subset) -> Self {
        Subset::new(self.bits ^ other.bits, self.n())
    }

    /// `S Δ {i}` for a 0-based element `i`.
    pub fn toggle(self, i: usize) -> Self {
        Subset::new(self.bits ^ (1 << i), self.n())
    }

    pub fn hamming(self, other: Subset) -> usize {
        (self.bits ^ other.bits).count_ones() as usize
    }

    /// 0-based elements in increasing order.
    pub fn elems(self) -> impl Iterator<Item = usize> {
        let bits = self.bits;
        (0..self.n()).filter(move |&i| bits >> i & 1 == 1)
    }

    pub fn indicator(self) -> Vec<Rat> {
        (0..self.n()).map(|i| if self.contains(i) { Rat::one() } else { Rat::zero() }).collect()
    }

    pub fn all(n: usize) -> impl Iterator<Item = Subset> {
        (0..1u32 << n).map(move |b| Subset::new(b, n))
    }

    pub fn parse(s: &str, n: usize) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidArgument(format!("bad subset {s:?} for n = {n}"));
        if s.is_empty() || s == "∅" {
            return Ok(Subset::empty(n));
        }
        let elems: Vec<usize> = if n > 9 || s.contains(',') {
            s.split(',').map(|e| e.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?
        } else {
            s.chars().map(|c| c.to_digit(10).map(|d| d as usize).ok_or_else(bad)).collect::<Result<_>>()?
        };
        let mut bits = 0u32;
        for e in elems {
            if e == 0 || e > n || bits >> (e - 1) & 1 == 1 {
                return Err(bad());
            }
            bits |= 1 << (e - 1);
        }
        Ok(Subset::new(bits, n))
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.elems().map(|i| (i + 1).to_string()).collect();
        if self.n() <= 9 {
            f.write_str(&parts.concat())
        } else {
            f.write_str(&parts.join(","))
        }
    }
}

impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Subsets deserialize only with a known `n`; this helper carries it.
pub fn deserialize_subset<'de, D: Deserializer<'de>>(d: D, n: usize) -> std::result::Result<Subset, D::Error> {
    let s = String::deserialize(d)?;
    Subset::parse(&s, n).map_err(serde::de::Error::custom)
}

pub fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// A face of `[0,1]^n`: the free coordinates vary, the rest are fixed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CubeFace {
    pub n: usize,
    /// Mask of free coordinates.
    pub free_mask: u32,
    /// Values of the fixed coordinates (bits inside `free_mask` are zero).
    pub fixed_bits: u32,
}

impl CubeFace {
    pub fn whole(n: usize) -> Self {
        CubeFace { n, free_mask: full_mask(n), fixed_bits: 0 }
    }

    pub fn dim(&self) -> usize {
        self.free_mask.count_ones() as usize
    }

    pub fn free(&self) -> Vec<usize> {
        (0..self.n).filter(|&i| self.free_mask >> i & 1 == 1).collect()
    }

    /// Global subset for a local subset of the free coordinates.
    pub fn lift(&self, local: u32) -> Subset {
        let mut bits = self.fixed_bits;
        for (k, i) in self.free().into_iter().enumerate() {
            if local >> k & 1 == 1 {
                bits |= 1 << i;
            }
        }
        Subset::new(bits, self.n)
    }

    pub fn contains(&self, s: Subset) -> bool {
        s.bits & !self.free_mask == self.fixed_bits
    }

    /// Vertices in local order (local bitmask `0..2^dim`).
    pub fn vertices(&self) -> Vec<Subset> {
        (0..1u32 << self.dim()).map(|l| self.lift(l)).collect()
    }

    /// Local subset of a global subset lying in this face.
    pub fn localize(&self, s: Subset) -> u32 {
        self.free().iter().enumerate().fold(0, |acc, (k, &i)| acc | ((s.bits >> i & 1) << k))
    }

    /// Smallest face containing both subsets.
    pub fn spanned_by(a: Subset, b: Subset) -> Self {
        let free = a.bits ^ b.bits;
        CubeFace { n: a.n(), free_mask: free, fixed_bits: a.bits & !free }
    }
}

pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Pattern notation: `*` for free coordinates, `0`/`1` for fixed ones.
impl fmt::Display for CubeFace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let c = if self.free_mask >> i & 1 == 1 {
                '*'
            } else if self.fixed_bits >> i & 1 == 1 {
                '1'
            } else {
                '0'
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl Serialize for CubeFace {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// All faces of dimension `dim`, ordered by free set (lexicographic) then by
/// the fixed values.
pub fn enumerate_faces(n: usize, dim: usize) -> Result<Vec<CubeFace>> {
    check_n(n)?;
    if dim > n {
        return Err(Error::InvalidArgument(format!("face dimension {dim} exceeds n = {n}")));
    }
    let mut faces = Vec::new();
    for free in combinations(n, dim) {
        let free_mask = free.iter().fold(0u32, |m, &i| m | 1 << i);
        let fixed: Vec<usize> = (0..n).filter(|i| !free.contains(i)).collect();
        for v in 0..1u32 << fixed.len() {
            let fixed_bits = fixed.iter().enumerate().fold(0u32, |b, (k, &i)| b | (v >> k & 1) << i);
            faces.push(CubeFace { n, free_mask, fixed_bits });
        }
    }
    Ok(faces)
}

/// Element of the hyperoctahedral group `B_n`: flip the bits in `flips`,
/// then send coordinate `i` to `perm[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedSymmetry {
    pub perm: Vec<usize>,
    pub flips: u32,
}

impl SignedSymmetry {
    pub fn identity(n: usize) -> Self {
        SignedSymmetry { perm: (0..n).collect(), flips: 0 }
    }

    fn permute_bits(perm: &[usize], bits: u32) -> u32 {
        perm.iter().enumerate().fold(0u32, |b, (i, &j)| b | (bits >> i & 1) << j)
    }

    pub fn apply(&self, s: Subset) -> Subset {
        Subset::new(Self::permute_bits(&self.perm, s.bits ^ self.flips), s.n())
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &SignedSymmetry) -> SignedSymmetry {
        let perm = other.perm.iter().map(|&j| self.perm[j]).collect();
        let inv_other = other.inverse_perm();
        let flips = other.flips ^ Self::permute_bits(&inv_other, self.flips);
        SignedSymmetry { perm, flips }
    }

    fn inverse_perm(&self) -> Vec<usize> {
        let mut inv = vec![0; self.perm.len()];
        for (i, &j) in self.perm.iter().enumerate() {
            inv[j] = i;
        }
        inv
    }

    pub fn inverse(&self) -> SignedSymmetry {
        SignedSymmetry { flips: Self::permute_bits(&self.perm, self.flips), perm: self.inverse_perm() }
    }

    /// All `2^n · n!` elements.
    pub fn group(n: usize) -> Vec<SignedSymmetry> {
        let mut perms = vec![Vec::new()];
        for k in 0..n {
            let mut next = Vec::new();
            for p in &perms {
                for pos in 0..=k {
                    let mut q: Vec<usize> = p.clone();
                    q.insert(pos, k);
                    next.push(q);
                }
            }
            perms = next;
        }
        let mut out = Vec::with_capacity(perms.len() << n);
        for p in perms {
            for flips in 0..1u32 << n {
                out.push(SignedSymmetry { perm: p.clone(), flips });
            }
        }
        out
    }
}

/// A point written as a strict convex combination of affinely independent
/// cube vertices. Support is kept sorted by bitmask.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConvexCircuit {
    pub support: Vec<Subset>,
    pub weights: Vec<Rat>,
    pub barycenter: Vec<Rat>,
}

impl ConvexCircuit {
    pub fn new(mut terms: Vec<(Subset, Rat)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidArgument("empty circuit".into()));
        }
        terms.sort_by_key(|(s, _)| s.bits);
        let n = terms[0].0.n();
        let support: Vec<Subset> = terms.iter().map(|t| t.0).collect();
        let weights: Vec<Rat> = terms.iter().map(|t| t.1.clone()).collect();
        let mut barycenter = vec![Rat::zero(); n];
        for (s, w) in &terms {
            for i in s.elems() {
                barycenter[i] += w;
            }
        }
        let c = ConvexCircuit { support, weights, barycenter };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let one = Rat::one();
        if self.weights.iter().any(|w| !w.is_positive() || (w >= &one && self.weights.len() > 1)) {
            return Err(Error::InvalidArgument("circuit weights must lie in (0,1)".into()));
        }
        if self.weights.iter().sum::<Rat>() != one {
            return Err(Error::InvalidArgument("circuit weights must sum to 1".into()));
        }
        let pts: Vec<Vec<Rat>> = self.support.iter().map(|s| s.indicator()).collect();
        if !linalg::affinely_independent(&pts) {
            return Err(Error::InvalidArgument("circuit support is affinely dependent".into()));
        }
        Ok(())
    }

    pub fn apply(&self, g: &SignedSymmetry) -> ConvexCircuit {
        let terms = self.support.iter().zip(&self.weights).map(|(s, w)| (g.apply(*s), w.clone())).collect();
        ConvexCircuit::new(terms).expect("symmetries preserve circuits")
    }

    pub fn support_bits(&self) -> Vec<u32> {
        self.support.iter().map(|s| s.bits).collect()
    }
}

/// Distinct images of a circuit under the whole of `B_n`.
pub fn orbit(n: usize, circuit: &ConvexCircuit) -> BTreeSet<ConvexCircuit> {
    SignedSymmetry::group(n).iter().map(|g| circuit.apply(g)).collect()
}

/// Every convex circuit representation of `(1/2, …, 1/2)` by brute force
/// over vertex subsets, each returned once, in canonical order.
pub fn center_circuits(n: usize) -> Result<Vec<ConvexCircuit>> {
    check_n(n)?;
    if n > 5 {
        return Err(Error::InvalidArgument(format!("exhaustive circuit enumeration limited to n <= 5, got {n}")));
    }
    let verts: Vec<Subset> = Subset::all(n).collect();
    let pts: Vec<Vec<Rat>> = verts.iter().map(|s| s.indicator()).collect();
    let center = vec![Rat::new(1.into(), 2.into()); n];
    let full = full_mask(n);
    let mut out = BTreeSet::new();
    for k in 2..=n + 1 {
        for idx in combinations(verts.len(), k) {
            let (or, and) = idx.iter().fold((0u32, full), |(o, a), &i| (o | verts[i].bits, a & verts[i].bits));
            if or != full || and != 0 {
                continue;
            }
            let sub: Vec<Vec<Rat>> = idx.iter().map(|&i| pts[i].clone()).collect();
            if !linalg::affinely_independent(&sub) {
                continue;
            }
            let Some(w) = linalg::affine_coords(&sub, &center) else { continue };
            if w.iter().all(|x| x.is_positive()) {
                let terms = idx.iter().map(|&i| verts[i]).zip(w).collect();
                out.insert(ConvexCircuit::new(terms)?);
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// The three `B_4`-orbit representatives for the centre of the 4-cube.
pub fn center_representatives_4() -> Vec<ConvexCircuit> {
    let s = |e: &[usize]| Subset::from_elems(4, e);
    let h = Rat::new(1.into(), 2.into());
    let q = Rat::new(1.into(), 4.into());
    let third = Rat::new(1.into(), 3.into());
    let sixth = Rat::new(1.into(), 6.into());
    vec![
        ConvexCircuit::new(vec![(s(&[]), h.clone()), (s(&[1, 2, 3, 4]), h)]).unwrap(),
        ConvexCircuit::new(vec![
            (s(&[]), q.clone()),
            (s(&[1, 4]), q.clone()),
            (s(&[1, 2, 3]), q.clone()),
            (s(&[2, 3, 4]), q),
        ])
        .unwrap(),
        ConvexCircuit::new(vec![
            (s(&[]), third),
            (s(&[1, 2, 3]), sixth.clone()),
            (s(&[1, 2, 4]), sixth.clone()),
            (s(&[1, 3, 4]), sixth.clone()),
            (s(&[2, 3, 4]), sixth),
        ])
        .unwrap(),
    ]
}
