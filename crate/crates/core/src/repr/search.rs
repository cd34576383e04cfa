//! Seeded random search for counterexamples to the rank-one extensions.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{principal_minor_valuations, MatrixK, Tag};
use crate::exec::Exec;
use crate::field::{Elem, Field, FieldSpec, ValuationSpec};
use crate::subdivision::{is_valuated_delta_matroid_with, Certificate};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Shape {
    /// `A = B + α v v̄ᵀ`, `B` skew-Hermitian, `ᾱ = α`.
    SkewHermitianPlusRankOne,
    /// `A = B + ω α v v̄ᵀ`, `B` Hermitian, `ᾱ = α`, `ω̄ = ω + 1`
    /// (characteristic 2).
    Char2OmegaRankOne,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchConfig {
    pub shape: Shape,
    pub spec: FieldSpec,
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub trial: u64,
    pub trial_seed: u64,
    /// `{spec, tag, entries}` for `A`.
    pub matrix: Value,
    pub b: Value,
    pub alpha: String,
    pub v: Vec<String>,
    pub p: Value,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchReport {
    pub config: SearchConfig,
    /// Whether a proved case guarantees zero counterexamples for this spec.
    pub covered: bool,
    pub trials_run: u64,
    pub counterexamples: Vec<Counterexample>,
}

/// Seed of an individual trial, independent of scheduling.
fn trial_seed(seed: u64, trial: u64) -> u64 {
    let mut z = seed ^ trial.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniformizer-like element: `t` for `t`-adic, `p` for `p`-adic, `1` for
/// the trivial valuation.
pub fn uniformizer(k: &Field) -> Elem {
    match &k.spec().valuation {
        ValuationSpec::TAdic => k.t(),
        ValuationSpec::PAdic { p, .. } => k.int(*p as i64),
        ValuationSpec::Trivial => k.one(),
    }
}

/// `(a + bα)·π^e` with small `a, b` and `e ∈ −2..=3`; zero about one time
/// in eight.
pub fn sample_elem(k: &Field, rng: &mut impl Rng) -> Elem {
    if rng.gen_ratio(1, 8) {
        return k.zero();
    }
    let a = k.int(rng.gen_range(-3..=3));
    let unit = match k.alpha() {
        Ok(alpha) => k.add(&a, &k.mul(&alpha, &k.int(rng.gen_range(-3..=3)))),
        Err(_) => a,
    };
    let unit = if k.is_zero(&unit) { k.one() } else { unit };
    let e = rng.gen_range(-2..=3);
    k.mul(&unit, &k.pow(&uniformizer(k), e).expect("uniformizer is nonzero"))
}

pub fn random_vector(k: &Field, n: usize, rng: &mut impl Rng) -> Vec<Elem> {
    (0..n).map(|_| sample_elem(k, rng)).collect()
}

/// Diagonal from `x ± x̄`, upper triangle random, lower triangle forced.
fn random_sigma_hermitian(k: &Arc<Field>, n: usize, sigma: i64, rng: &mut impl Rng) -> Vec<Vec<Elem>> {
    let mut m = vec![vec![k.zero(); n]; n];
    for i in 0..n {
        let x = sample_elem(k, rng);
        m[i][i] = if sigma > 0 { k.add(&x, &k.conj(&x)) } else { k.sub(&x, &k.conj(&x)) };
        for j in i + 1..n {
            let x = sample_elem(k, rng);
            let c = k.conj(&x);
            m[j][i] = if sigma > 0 { c } else { k.neg(&c) };
            m[i][j] = x;
        }
    }
    m
}

pub fn random_hermitian(k: &Arc<Field>, n: usize, rng: &mut impl Rng) -> MatrixK {
    MatrixK::new(k.clone(), random_sigma_hermitian(k, n, 1, rng), Tag::Hermitian).expect("Hermitian by construction")
}

pub fn random_skew_hermitian(k: &Arc<Field>, n: usize, rng: &mut impl Rng) -> MatrixK {
    MatrixK::new(k.clone(), random_sigma_hermitian(k, n, -1, rng), Tag::SkewHermitian).expect("skew-Hermitian by construction")
}

/// Nonzero element of the fixed field, `x + x̄` (or `x x̄` when that vanishes).
fn fixed_nonzero(k: &Field, rng: &mut impl Rng) -> Elem {
    loop {
        let x = sample_elem(k, rng);
        let s = k.add(&x, &k.conj(&x));
        if !k.is_zero(&s) {
            return s;
        }
        let nrm = k.mul(&x, &k.conj(&x));
        if !k.is_zero(&nrm) {
            return nrm;
        }
    }
}

/// Whether a proved case covers `(shape, spec)`.
pub fn is_covered(shape: Shape, k: &Field) -> bool {
    match shape {
        Shape::SkewHermitianPlusRankOne => {
            k.residue_characteristic() != 2 || k.characteristic() == 2 || k.involution_is_trivial()
        }
        Shape::Char2OmegaRankOne => k.valuation_is_trivial(),
    }
}

fn validate(config: &SearchConfig) -> Result<Arc<Field>> {
    if config.spec.violating {
        return Err(Error::InvalidSpec("the involution must preserve the valuation".into()));
    }
    crate::cube::check_n(config.n)?;
    let k = Arc::new(Field::new(config.spec.clone())?);
    if config.shape == Shape::Char2OmegaRankOne {
        let omega = k.alpha().map_err(|_| Error::InvalidSpec("needs a quadratic base F[ω]".into()))?;
        if k.characteristic() != 2 || k.conj(&omega) != k.add(&omega, &k.one()) {
            return Err(Error::InvalidSpec("needs characteristic 2 with ω̄ = ω + 1".into()));
        }
    }
    Ok(k)
}

fn run_trial(k: &Arc<Field>, config: &SearchConfig, trial: u64) -> Result<Option<Counterexample>> {
    let seed = trial_seed(config.seed, trial);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = config.n;
    let (b, coef) = match config.shape {
        Shape::SkewHermitianPlusRankOne => (random_skew_hermitian(k, n, &mut rng), fixed_nonzero(k, &mut rng)),
        Shape::Char2OmegaRankOne => {
            let b = random_hermitian(k, n, &mut rng);
            let alpha = fixed_nonzero(k, &mut rng);
            (b, k.mul(&k.alpha().expect("validated"), &alpha))
        }
    };
    let v = random_vector(k, n, &mut rng);
    let entries: Vec<Vec<Elem>> = (0..n)
        .map(|i| (0..n).map(|j| k.add(b.get(i, j), &k.mul(&coef, &k.mul(&v[i], &k.conj(&v[j]))))).collect())
        .collect();
    let a = MatrixK::new(k.clone(), entries, Tag::General)?;
    let p = principal_minor_valuations(&a)?;
    let verdict = is_valuated_delta_matroid_with(&p, Exec::Sequential)?;
    if verdict.valuated {
        return Ok(None);
    }
    Ok(Some(Counterexample {
        trial,
        trial_seed: seed,
        matrix: a.to_json(),
        b: b.to_json(),
        alpha: k.format(&coef),
        v: v.iter().map(|x| k.format(x)).collect(),
        p: p.to_json(),
        certificate: verdict.certificate,
    }))
}

/// Runs `trials` independent seeded trials; counterexamples come back in
/// trial order whatever the execution mode.
pub fn conjecture_search(config: &SearchConfig, exec: Exec) -> Result<SearchReport> {
    let k = validate(config)?;
    let results = exec.map((0..config.trials).collect(), |trial| run_trial(&k, config, trial));
    let mut counterexamples = Vec::new();
    for r in results {
        if let Some(c) = r? {
            counterexamples.push(c);
        }
    }
    Ok(SearchReport { config: config.clone(), covered: is_covered(config.shape, &k), trials_run: config.trials, counterexamples })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(shape: Shape, name: &str, trials: u64) -> SearchConfig {
        SearchConfig { shape, spec: FieldSpec::named(name).unwrap(), n: 3, trials, seed: 7 }
    }

    #[test]
    fn covered_specs_have_no_counterexamples() {
        let r = conjecture_search(&config(Shape::SkewHermitianPlusRankOne, "qi-3adic", 60), Exec::Parallel).unwrap();
        assert!(r.covered);
        assert!(r.counterexamples.is_empty());
        let r = conjecture_search(&config(Shape::Char2OmegaRankOne, "f4-trivial", 60), Exec::Parallel).unwrap();
        assert!(r.covered);
        assert!(r.counterexamples.is_empty());
    }

    #[test]
    fn deterministic_across_modes() {
        let c = config(Shape::SkewHermitianPlusRankOne, "eis-2adic", 40);
        let a = conjecture_search(&c, Exec::Sequential).unwrap();
        let b = conjecture_search(&c, Exec::Parallel).unwrap();
        assert!(!a.covered);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn rejects_unsuitable_specs() {
        assert!(conjecture_search(&config(Shape::Char2OmegaRankOne, "qi-tadic", 1), Exec::Sequential).is_err());
        assert!(conjecture_search(&config(Shape::SkewHermitianPlusRankOne, "violating", 1), Exec::Sequential).is_err());
    }
}
