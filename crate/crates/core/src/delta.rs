//! Δ-matroids: the symmetric exchange axiom, evenness, polytope edges,
//! rank functions and random generation.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cube::{check_n, Subset};
use crate::linalg;
use crate::rat::{rat, ExtRat, Rat};
use crate::subdivision::{self, SubsetFunction};
use crate::{Error, Result};

/// A family of subsets of `[n]` (the candidate bases).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisFamily {
    n: usize,
    bases: BTreeSet<Subset>,
}

impl BasisFamily {
    pub fn new(n: usize, bases: impl IntoIterator<Item = Subset>) -> Result<Self> {
        check_n(n)?;
        let bases: BTreeSet<Subset> = bases.into_iter().collect();
        if bases.is_empty() {
            return Err(Error::EmptyFamily);
        }
        if bases.iter().any(|b| b.n() != n) {
            return Err(Error::InvalidArgument("basis over a different ground set".into()));
        }
        Ok(BasisFamily { n, bases })
    }

    pub fn from_strs(n: usize, bases: &[&str]) -> Result<Self> {
        let v = bases.iter().map(|s| Subset::parse(s, n)).collect::<Result<Vec<_>>>()?;
        BasisFamily::new(n, v)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bases(&self) -> impl Iterator<Item = Subset> + '_ {
        self.bases.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.bases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn contains(&self, s: Subset) -> bool {
        self.bases.contains(&s)
    }

    /// Twist by `X`: replace every basis `B` by `B Δ X`.
    pub fn twist(&self, x: Subset) -> BasisFamily {
        BasisFamily { n: self.n, bases: self.bases.iter().map(|b| b.sym_diff(x)).collect() }
    }

    fn table(&self) -> Vec<bool> {
        let mut t = vec![false; 1 << self.n];
        for b in &self.bases {
            t[b.bits as usize] = true;
        }
        t
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisFamilyJson {
    pub n: usize,
    pub bases: Vec<String>,
}

impl From<&BasisFamily> for BasisFamilyJson {
    fn from(f: &BasisFamily) -> Self {
        BasisFamilyJson { n: f.n, bases: f.bases.iter().map(|b| b.to_string()).collect() }
    }
}

impl TryFrom<BasisFamilyJson> for BasisFamily {
    type Error = Error;
    fn try_from(j: BasisFamilyJson) -> Result<Self> {
        let strs: Vec<&str> = j.bases.iter().map(String::as_str).collect();
        BasisFamily::from_strs(j.n, &strs)
    }
}

/// A failing instance of the exchange axiom: no `b ∈ A Δ B` makes
/// `A Δ {a, b}` a basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExchangeViolation {
    pub a: Subset,
    pub b: Subset,
    /// 0-based element of `A Δ B`.
    pub elem: usize,
}

pub(crate) fn exchange_violation(n: usize, table: &[bool]) -> Option<ExchangeViolation> {
    let members: Vec<u32> = (0..table.len() as u32).filter(|&b| table[b as usize]).collect();
    for &a in members.iter().rev() {
        for &b in &members {
            let diff = a ^ b;
            for i in (0..n).filter(|&i| diff >> i & 1 == 1) {
                let ok = (0..n).filter(|&j| diff >> j & 1 == 1).any(|j| {
                    let swapped = a ^ (1 << i) ^ (1 << j) ^ if i == j { 1 << i } else { 0 };
                    table[swapped as usize]
                });
                if !ok {
                    return Some(ExchangeViolation { a: Subset::new(a, n), b: Subset::new(b, n), elem: i });
                }
            }
        }
    }
    None
}

/// Checks the symmetric exchange axiom; `Err` carries a violating triple.
pub fn is_delta_matroid(f: &BasisFamily) -> std::result::Result<(), ExchangeViolation> {
    match exchange_violation(f.n, &f.table()) {
        None => Ok(()),
        Some(v) => Err(v),
    }
}

/// Even Δ-matroid: a Δ-matroid whose bases all have the same size parity.
pub fn is_even(f: &BasisFamily) -> bool {
    let mut sizes = f.bases().map(|b| b.len() % 2);
    let first = sizes.next().expect("nonempty");
    sizes.all(|s| s == first) && is_delta_matroid(f).is_ok()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum EdgeClass {
    /// `±e_i`
    Unit,
    /// `±(e_i + e_j)`
    Sum,
    /// `±(e_i - e_j)`
    Difference,
    /// Length at least three.
    Longer,
}

impl EdgeClass {
    pub fn of(a: Subset, b: Subset) -> Self {
        match a.hamming(b) {
            1 => EdgeClass::Unit,
            2 => {
                let (only_a, only_b) = (a.bits & !b.bits, b.bits & !a.bits);
                if only_a == 0 || only_b == 0 {
                    EdgeClass::Sum
                } else {
                    EdgeClass::Difference
                }
            }
            _ => EdgeClass::Longer,
        }
    }
}

/// Edges of the polytope `conv{e_B : B ∈ F}` by exact LP face tests.
pub fn polytope_edges(f: &BasisFamily) -> Result<Vec<(Subset, Subset, EdgeClass)>> {
    let p = SubsetFunction::indicator_zero(f);
    let mut out = Vec::new();
    let bases: Vec<Subset> = f.bases().collect();
    for (i, &a) in bases.iter().enumerate() {
        for &b in &bases[i + 1..] {
            if subdivision::is_edge(&p, a, b)? {
                out.push((a, b, EdgeClass::of(a, b)));
            }
        }
    }
    Ok(out)
}

/// Rank function values indexed by subset bitmask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankTable {
    pub n: usize,
    pub values: Vec<usize>,
}

impl RankTable {
    pub fn get(&self, s: Subset) -> usize {
        self.values[s.bits as usize]
    }
}

/// `r(S) = max_B |B ∩ S| + |B^C ∩ S^C|`, computed both from this formula and
/// as `n - min_B |B Δ S|`; the two must agree.
pub fn rank_function(f: &BasisFamily) -> RankTable {
    let n = f.n;
    let values: Vec<usize> = Subset::all(n)
        .map(|s| {
            let by_max = f.bases().map(|b| (b.bits & s.bits).count_ones() as usize
                        + (b.complement().bits & s.complement().bits).count_ones() as usize).max().unwrap();
            let by_distance = n - f.bases().map(|b| b.hamming(s)).min().unwrap();
            assert_eq!(by_max, by_distance, "rank formulas disagree at {s}");
            by_max
        })
        .collect();
    RankTable { n, values }
}

/// `p_S = -r(S)`.
pub fn neg_rank_as_valuation(f: &BasisFamily) -> SubsetFunction {
    let r = rank_function(f);
    SubsetFunction::from_fn(f.n, |s| ExtRat::Fin(rat(-(r.get(s) as i64)))).expect("finite")
}

pub const DEFAULT_SAMPLING_BUDGET: usize = 100_000;

/// Deterministic random Δ-matroid on `[n]`, `n ≤ 8`.
///
/// Even seeds use rejection sampling over random families (falling back to
/// the minor-support generator when the budget runs out); odd seeds take the
/// support of the principal minors of a random symmetric or skew-symmetric
/// integer matrix, twisted by a random set.
pub fn random_delta_matroid(n: usize, seed: u64) -> Result<BasisFamily> {
    random_delta_matroid_with_budget(n, seed, DEFAULT_SAMPLING_BUDGET)
}

pub fn random_delta_matroid_with_budget(n: usize, seed: u64, budget: usize) -> Result<BasisFamily> {
    check_n(n)?;
    if n > 8 {
        return Err(Error::InvalidArgument(format!("random generation supports n <= 8, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let family = if seed % 2 == 0 {
        match rejection_sample(n, &mut rng, budget) {
            Some(f) => f,
            None => minor_support(n, &mut rng),
        }
    } else {
        minor_support(n, &mut rng)
    };
    if let Err(v) = is_delta_matroid(&family) {
        return Err(Error::BudgetExhausted(format!("generator produced a non-Δ-matroid ({v:?})")));
    }
    Ok(family)
}

fn rejection_sample(n: usize, rng: &mut ChaCha8Rng, budget: usize) -> Option<BasisFamily> {
    let size = 1usize << n;
    for _ in 0..budget {
        let q: f64 = rng.gen();
        let table: Vec<bool> = (0..size).map(|_| rng.gen_bool(q)).collect();
        if !table.iter().any(|&x| x) {
            continue;
        }
        if exchange_violation(n, &table).is_none() {
            let bases = (0..size as u32).filter(|&b| table[b as usize]).map(|b| Subset::new(b, n));
            return BasisFamily::new(n, bases).ok();
        }
    }
    None
}

/// Support of the principal minors of a random (skew-)symmetric matrix.
pub fn minor_support(n: usize, rng: &mut impl Rng) -> BasisFamily {
    let skew = rng.gen_bool(0.5);
    let density: f64 = rng.gen_range(0.2..0.9);
    let mut a = vec![vec![Rat::from_integer(0.into()); n]; n];
    for i in 0..n {
        for j in i..n {
            if (i == j && skew) || !rng.gen_bool(density) {
                continue;
            }
            let v = rng.gen_range(-2i64..=2);
            a[i][j] = rat(v);
            a[j][i] = if skew { rat(-v) } else { rat(v) };
        }
    }
    let bases = Subset::all(n).filter(|s| {
        let idx: Vec<usize> = s.elems().collect();
        let sub: Vec<Vec<Rat>> = idx.iter().map(|&i| idx.iter().map(|&j| a[i][j].clone()).collect()).collect();
        s.is_empty() || !num_traits::Zero::is_zero(&linalg::det(&sub))
    });
    let twist = Subset::new(rng.gen_range(0..1u32 << n), n);
    BasisFamily::new(n, bases).expect("empty set is always a basis").twist(twist)
}
