//! Explicit constructions: skew-symmetric plus rank one, maximal isotropic
//! subspaces of symplectic, quadratic and Hermitian spaces, and the
//! three-element realization over the ordered field `Q(t)`.

use std::sync::Arc;

use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{det, linear, principal_minor_valuations, MatrixK, Tag};
use crate::cube::Subset;
use crate::field::{Elem, Field};
use crate::rat::{ExtRat, Rat};
use crate::subdivision::{check3, is_valuated_delta_matroid, SubsetFunction, Verdict};
use crate::{Error, Result};

/// Adjugate via cofactors: `adj(M)_{kl} = (−1)^{k+l} det M(l, k)`.
fn adjugate(k: &Field, m: &[Vec<Elem>]) -> Vec<Vec<Elem>> {
    let n = m.len();
    if n == 1 {
        return vec![vec![k.one()]];
    }
    (0..n)
        .map(|r| {
            (0..n)
                .map(|c| {
                    let minor: Vec<Vec<Elem>> = (0..n)
                        .filter(|&i| i != c)
                        .map(|i| (0..n).filter(|&j| j != r).map(|j| m[i][j].clone()).collect())
                        .collect();
                    let d = det(k, &minor);
                    if (r + c) % 2 == 1 {
                        k.neg(&d)
                    } else {
                        d
                    }
                })
                .collect()
        })
        .collect()
}

/// `uᵀ M w`.
fn bilinear(k: &Field, u: &[Elem], m: &[Vec<Elem>], w: &[Elem]) -> Elem {
    let mw = linear::apply(k, m, w);
    u.iter().zip(&mw).fold(k.zero(), |acc, (x, y)| k.add(&acc, &k.mul(x, y)))
}

/// `B + c·u wᵀ`.
fn plus_rank_one(k: &Field, b: &[Vec<Elem>], c: &Elem, u: &[Elem], w: &[Elem]) -> Vec<Vec<Elem>> {
    b.iter()
        .zip(u)
        .map(|(row, ui)| row.iter().zip(w).map(|(x, wj)| k.add(x, &k.mul(c, &k.mul(ui, wj)))).collect())
        .collect()
}

#[derive(Debug, Clone)]
pub struct SkewRankOneReport {
    pub matrix: MatrixK,
    pub p: SubsetFunction,
    /// Odd `|S|`: `B_S = 0`; even `|S|`: `v[S]ᵀ adj(B[S]) v[S] = 0`.
    pub parity_holds: bool,
    /// `A_S = B_S + α v[S]ᵀ adj(B[S]) v[S]` for every `S`.
    pub determinant_lemma_holds: bool,
    pub verdict: Verdict,
}

impl SkewRankOneReport {
    pub fn pass(&self) -> bool {
        self.parity_holds && self.determinant_lemma_holds && self.verdict.valuated
    }
}

/// `A = B + α v vᵀ` with `B` skew-symmetric.
pub fn skew_plus_rank_one(b: &MatrixK, alpha: &Elem, v: &[Elem]) -> Result<SkewRankOneReport> {
    if b.tag() != Tag::SkewSymmetric {
        return Err(Error::Structure("skew-symmetric".into()));
    }
    let n = b.rows();
    if v.len() != n {
        return Err(Error::DimensionMismatch(format!("vector must have length {n}")));
    }
    let k = b.field().clone();
    let a = MatrixK::new(k.clone(), plus_rank_one(&k, b.entries(), alpha, v, v), Tag::General)?;
    let mut parity = true;
    let mut lemma = true;
    for s in Subset::all(n) {
        let idx: Vec<usize> = s.elems().collect();
        let bs = b.submatrix(&idx, &idx);
        let vs: Vec<Elem> = idx.iter().map(|&i| v[i].clone()).collect();
        let b_s = det(&k, &bs);
        let q = if idx.is_empty() { k.zero() } else { bilinear(&k, &vs, &adjugate(&k, &bs), &vs) };
        parity &= if s.len() % 2 == 1 { k.is_zero(&b_s) } else { k.is_zero(&q) };
        lemma &= a.principal_minor(s) == k.add(&b_s, &k.mul(alpha, &q));
    }
    let p = principal_minor_valuations(&a)?;
    let verdict = is_valuated_delta_matroid(&p)?;
    Ok(SkewRankOneReport { matrix: a, p, parity_holds: parity, determinant_lemma_holds: lemma, verdict })
}

/// The form on `V = H_1 ⊕ … ⊕ H_n (⊕ W)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormKind {
    /// `b = Σ x_i y'_i − y_i x'_i`; `L = rowspan(A | I)` with `A` symmetric.
    Symplectic,
    /// `q = Σ x_i y_i`; `A` skew-symmetric.
    QuadraticEven,
    /// `q = Σ x_i y_i + α z²`; `L = rowspan(A | I | v)` with `A = B − α v vᵀ`.
    QuadraticOdd,
    /// `b = Σ x_i ȳ'_i + y_i x̄'_i`; `A` skew-Hermitian.
    HermitianEven,
}

impl FormKind {
    pub const ALL: [FormKind; 4] = [FormKind::Symplectic, FormKind::QuadraticEven, FormKind::QuadraticOdd, FormKind::HermitianEven];

    fn required_tag(self) -> Tag {
        match self {
            FormKind::Symplectic => Tag::Symmetric,
            FormKind::QuadraticEven | FormKind::QuadraticOdd => Tag::SkewSymmetric,
            FormKind::HermitianEven => Tag::SkewHermitian,
        }
    }
}

/// The matrix `A` in the normal form `M = (A | I [| v])`; for the odd
/// quadratic case `matrix` is `B` and `A = B − α v vᵀ`.
pub fn reduced_isotropic_matrix(form: FormKind, matrix: &MatrixK, alpha: Option<&Elem>, v: Option<&[Elem]>) -> Result<MatrixK> {
    let want = form.required_tag();
    if !matrix.satisfies(want) {
        return Err(Error::Structure(format!("{want:?} (required by the {form:?} form)")));
    }
    if form == FormKind::HermitianEven && matrix.field().involution_is_trivial() {
        return Err(Error::Precondition("the Hermitian form needs a nontrivial involution".into()));
    }
    let k = matrix.field().clone();
    match form {
        FormKind::QuadraticOdd => {
            let (alpha, v) = alpha.zip(v).ok_or_else(|| Error::InvalidArgument("quadratic-odd needs α and v".into()))?;
            if k.is_zero(alpha) {
                return Err(Error::InvalidArgument("α must be nonzero".into()));
            }
            if v.len() != matrix.rows() {
                return Err(Error::DimensionMismatch(format!("vector must have length {}", matrix.rows())));
            }
            MatrixK::new(k.clone(), plus_rank_one(&k, matrix.entries(), &k.neg(alpha), v, v), Tag::General)
        }
        _ => MatrixK::new(k, matrix.entries().to_vec(), Tag::General),
    }
}

#[derive(Debug, Clone)]
pub struct IsotropicReport {
    pub form: FormKind,
    /// Rows spanning `L` in coordinates `(e_1…e_n, f_1…f_n [, g])`.
    pub generator: Vec<Vec<Elem>>,
    pub p: SubsetFunction,
    /// The form vanishes identically on `L`.
    pub isotropic: bool,
    /// Column-selection minors equal `det(G) · A_S` for every `S`.
    pub minors_agree: bool,
    pub verdict: Verdict,
}

impl IsotropicReport {
    pub fn pass(&self) -> bool {
        self.isotropic && self.minors_agree && self.verdict.valuated
    }
}

/// `p_S(L) = ν(det M[{e_i : i ∈ S} ∪ {f_i : i ∉ S}])` for the maximal
/// isotropic subspace spanned by the rows of `M = G·(A | I [| v])`, where
/// `G` (default identity) is an invertible row mixing.
pub fn isotropic_rep(
    form: FormKind,
    matrix: &MatrixK,
    alpha: Option<&Elem>,
    v: Option<&[Elem]>,
    mixing: Option<&[Vec<Elem>]>,
) -> Result<IsotropicReport> {
    let a = reduced_isotropic_matrix(form, matrix, alpha, v)?;
    let k = a.field().clone();
    let n = a.rows();
    let g = match mixing {
        None => linear::identity(&k, n),
        Some(g) => {
            if g.len() != n || g.iter().any(|r| r.len() != n) {
                return Err(Error::DimensionMismatch(format!("mixing matrix must be {n}×{n}")));
            }
            g.to_vec()
        }
    };
    let det_g = det(&k, &g);
    if k.is_zero(&det_g) {
        return Err(Error::InvalidArgument("mixing matrix is singular".into()));
    }
    let mut normal: Vec<Vec<Elem>> = (0..n)
        .map(|i| {
            let mut row = a.entries()[i].clone();
            row.extend((0..n).map(|j| if i == j { k.one() } else { k.zero() }));
            if form == FormKind::QuadraticOdd {
                row.push(v.expect("checked")[i].clone());
            }
            row
        })
        .collect();
    normal = linear::mul(&k, &g, &normal);
    let dim = normal[0].len();

    let isotropic = {
        let form_matrix = form_matrix(&k, form, n, dim, alpha);
        match form {
            FormKind::Symplectic => {
                let gram = linear::mul(&k, &linear::mul(&k, &normal, &form_matrix), &linear::transpose(&normal));
                linear::is_zero(&k, &gram)
            }
            FormKind::HermitianEven => {
                let gram = linear::mul(&k, &linear::mul(&k, &normal, &form_matrix), &linear::conj_transpose(&k, &normal));
                linear::is_zero(&k, &gram)
            }
            FormKind::QuadraticEven | FormKind::QuadraticOdd => {
                // q(uᵀM) = uᵀ (M U Mᵀ) u vanishes for all u iff M U Mᵀ is alternating.
                let gram = linear::mul(&k, &linear::mul(&k, &normal, &form_matrix), &linear::transpose(&normal));
                (0..n).all(|i| k.is_zero(&gram[i][i]) && (0..n).all(|j| k.is_zero(&k.add(&gram[i][j], &gram[j][i]))))
            }
        }
    };

    let mut minors_agree = true;
    let mut values = Vec::with_capacity(1 << n);
    for s in Subset::all(n) {
        let cols: Vec<usize> = (0..n).map(|i| if s.contains(i) { i } else { n + i }).collect();
        let sel: Vec<Vec<Elem>> = normal.iter().map(|row| cols.iter().map(|&c| row[c].clone()).collect()).collect();
        let minor = det(&k, &sel);
        minors_agree &= minor == k.mul(&det_g, &a.principal_minor(s));
        values.push(k.valuation(&minor)?);
    }
    let p = SubsetFunction::new(n, values)?;
    let verdict = is_valuated_delta_matroid(&p)?;
    Ok(IsotropicReport { form, generator: normal, p, isotropic, minors_agree, verdict })
}

/// Gram matrix of the (bilinear part of the) form in the chosen basis; for
/// quadratic forms the upper-triangular representative `U` with
/// `q(x) = xᵀ U x`.
fn form_matrix(k: &Field, form: FormKind, n: usize, dim: usize, alpha: Option<&Elem>) -> Vec<Vec<Elem>> {
    let mut m = vec![vec![k.zero(); dim]; dim];
    for i in 0..n {
        match form {
            FormKind::Symplectic => {
                m[i][n + i] = k.one();
                m[n + i][i] = k.int(-1);
            }
            FormKind::QuadraticEven | FormKind::QuadraticOdd => m[i][n + i] = k.one(),
            FormKind::HermitianEven => {
                m[i][n + i] = k.one();
                m[n + i][i] = k.one();
            }
        }
    }
    if form == FormKind::QuadraticOdd {
        m[2 * n][2 * n] = alpha.expect("checked").clone();
    }
    m
}

/// Principal-minor realization of a three-element valuated Δ-matroid.
#[derive(Debug, Clone, Serialize)]
pub struct Realization {
    /// Positive integer `L` with `L·p` integral; the construction realizes
    /// `L·p`, which induces the same subdivision.
    pub scale: String,
    /// `a_S` by subset bitmask, as field expressions in `t`.
    pub a: Vec<String>,
    pub valuations_match: bool,
    /// `a_i a_j − a_ij ≥ 0`.
    pub pair_inequalities: bool,
    /// `a_ik a_jk − a_k a_ijk ≥ 0`.
    pub triple_inequalities: bool,
    pub hypdet: String,
    pub hypdet_sign: i32,
    pub pass: bool,
}

/// The 12-term quartic in the principal minors of a 3×3 Hermitian matrix.
pub fn hypdet(k: &Field, a: &[Elem]) -> Elem {
    let x = |s: &str| a[Subset::parse(s, 3).expect("valid subset").bits as usize].clone();
    let prod = |c: i64, parts: &[&str]| parts.iter().fold(k.int(c), |acc, s| k.mul(&acc, &x(s)));
    let terms = [
        prod(1, &["", "", "123", "123"]),
        prod(1, &["1", "1", "23", "23"]),
        prod(1, &["2", "2", "13", "13"]),
        prod(1, &["3", "3", "12", "12"]),
        prod(-2, &["", "1", "23", "123"]),
        prod(-2, &["", "2", "13", "123"]),
        prod(-2, &["", "3", "12", "123"]),
        prod(-2, &["1", "2", "13", "23"]),
        prod(-2, &["1", "3", "12", "23"]),
        prod(-2, &["2", "3", "12", "13"]),
        prod(4, &["", "12", "13", "23"]),
        prod(4, &["1", "2", "3", "123"]),
    ];
    terms.iter().fold(k.zero(), |acc, t| k.add(&acc, t))
}

/// Builds `a_∅ = 1, a_i = −t^{q_i}, a_ij = −t^{q_ij}, a_123 = t^{q_123}`
/// over `Q(t)` for `q = L·p` and verifies the semialgebraic description of
/// principal minors of 3×3 Hermitian matrices by exact sign computations.
pub fn realize3(p: &SubsetFunction) -> Result<Realization> {
    if p.n() != 3 {
        return Err(Error::Precondition(format!("realization needs n = 3, got {}", p.n())));
    }
    let finite: Vec<Rat> = p
        .values()
        .iter()
        .map(|v| v.finite().cloned())
        .collect::<Option<_>>()
        .ok_or_else(|| Error::Precondition("all values must be finite".into()))?;
    if finite[0] != Rat::from_integer(0.into()) {
        return Err(Error::Precondition("p_∅ must be 0".into()));
    }
    let c3 = check3(p)?;
    if !c3.pass {
        let cert = serde_json::to_string(&is_valuated_delta_matroid(p)?.certificate).expect("serializable");
        return Err(Error::Precondition(format!("not a valuated Δ-matroid: {cert}")));
    }
    let scale = finite.iter().fold(num_bigint::BigInt::one(), |l, r| l.lcm(r.denom()));
    let q: Vec<i64> = finite
        .iter()
        .map(|r| {
            let v = (r * Rat::from_integer(scale.clone())).to_integer();
            i64::try_from(v).map_err(|_| Error::InvalidArgument("value too large".into()))
        })
        .collect::<Result<_>>()?;
    let k = Arc::new(Field::named("q-tadic")?);
    let tp = |e: i64| k.pow(&k.t(), e).expect("t is nonzero");
    let a: Vec<Elem> = Subset::all(3)
        .map(|s| match s.len() {
            0 => k.one(),
            3 => tp(q[7]),
            _ => k.neg(&tp(q[s.bits as usize])),
        })
        .collect();
    let valuations_match =
        a.iter().zip(&q).all(|(x, &e)| k.valuation(x).map(|v| v == ExtRat::from(e)).unwrap_or(false));
    let nonneg = |x: Elem| k.sign(&x).map(|s| s >= 0);
    let mut pair = true;
    let mut triple = true;
    for (i, j, l) in [(1usize, 2usize, 4usize), (1, 4, 2), (2, 4, 1)] {
        pair &= nonneg(k.sub(&k.mul(&a[i], &a[j]), &a[i | j]))?;
        // a_{il} a_{jl} − a_l a_{123} with l the remaining element.
        triple &= nonneg(k.sub(&k.mul(&a[i | l], &a[j | l]), &k.mul(&a[l], &a[7])))?;
    }
    let h = hypdet(&k, &a);
    let hypdet_sign = k.sign(&h)?;
    let pass = valuations_match && pair && triple && hypdet_sign <= 0;
    Ok(Realization {
        scale: scale.to_string(),
        a: a.iter().map(|x| k.format(x)).collect(),
        valuations_match,
        pair_inequalities: pair,
        triple_inequalities: triple,
        hypdet: k.format(&h),
        hypdet_sign,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    fn by3(v: &[Rat]) -> SubsetFunction {
        let v: Vec<ExtRat> = v.iter().cloned().map(ExtRat::from).collect();
        SubsetFunction::by_size(3, &v).unwrap()
    }

    fn qt() -> Arc<Field> {
        Arc::new(Field::named("q-tadic").unwrap())
    }

    fn skew(k: &Arc<Field>, rows: &[&[&str]]) -> MatrixK {
        let rows: Vec<Vec<&str>> = rows.iter().map(|r| r.to_vec()).collect();
        MatrixK::parse(k.clone(), &rows, Tag::SkewSymmetric).unwrap()
    }

    #[test]
    fn skew_plus_rank_one_identities() {
        let k = qt();
        let b = skew(&k, &[&["0", "t", "1", "2"], &["-t", "0", "t^2", "1-t"], &["-1", "-t^2", "0", "3"], &["-2", "t-1", "-3", "0"]]);
        let v: Vec<Elem> = ["1", "t", "2+t", "-1"].iter().map(|s| k.parse(s).unwrap()).collect();
        let r = skew_plus_rank_one(&b, &k.parse("t^2").unwrap(), &v).unwrap();
        assert!(r.pass());
        let r0 = skew_plus_rank_one(&b, &k.zero(), &v).unwrap();
        assert!(r0.pass());
        for s in Subset::all(4).filter(|s| s.len() % 2 == 1) {
            assert!(r0.p.get(s).is_inf());
        }
        let not_skew = MatrixK::parse(k.clone(), &[vec!["1", "0"], vec!["0", "1"]], Tag::Symmetric).unwrap();
        assert!(skew_plus_rank_one(&not_skew, &k.one(), &[k.one(), k.one()]).is_err());
    }

    #[test]
    fn isotropic_forms() {
        let k = qt();
        let sym = MatrixK::parse(k.clone(), &[vec!["t", "1", "2"], vec!["1", "0", "t"], vec!["2", "t", "1+t"]], Tag::Symmetric).unwrap();
        let r = isotropic_rep(FormKind::Symplectic, &sym, None, None, None).unwrap();
        assert!(r.pass());
        assert_eq!(r.p, principal_minor_valuations(&sym).unwrap());
        let zero = skew(&k, &[&["0", "0", "0"], &["0", "0", "0"], &["0", "0", "0"]]);
        let r = isotropic_rep(FormKind::QuadraticEven, &zero, None, None, None).unwrap();
        assert!(r.pass());
        for s in Subset::all(3) {
            assert_eq!(r.p.get(s).is_inf(), !s.is_empty());
        }
        let b = skew(&k, &[&["0", "t", "1"], &["-t", "0", "2"], &["-1", "-2", "0"]]);
        let v: Vec<Elem> = ["1", "t", "1"].iter().map(|s| k.parse(s).unwrap()).collect();
        let mix: Vec<Vec<Elem>> = [["1", "t", "0"], ["0", "1", "0"], ["2", "0", "t"]]
            .iter()
            .map(|r| r.iter().map(|s| k.parse(s).unwrap()).collect())
            .collect();
        let r = isotropic_rep(FormKind::QuadraticOdd, &b, Some(&k.int(3)), Some(&v), Some(&mix)).unwrap();
        assert!(r.pass());
        assert!(isotropic_rep(FormKind::Symplectic, &b, None, None, None).is_err());
        assert!(isotropic_rep(FormKind::HermitianEven, &b, None, None, None).is_err());

        let ki = Arc::new(Field::named("qi-tadic").unwrap());
        let sh = MatrixK::parse(ki.clone(), &[vec!["i*t", "1+i"], vec!["-1+i", "0"]], Tag::SkewHermitian).unwrap();
        let r = isotropic_rep(FormKind::HermitianEven, &sh, None, None, None).unwrap();
        assert!(r.pass());
    }

    #[test]
    fn realize_examples() {
        let p = by3(&[rat(0), rat(1), rat(0), rat(1)]);
        let r = realize3(&p).unwrap();
        assert!(r.pass);
        assert_eq!(r.a, ["1", "-t", "-t", "-1", "-t", "-1", "-1", "t"]);
        let r = realize3(&by3(&[rat(0), rat(0), rat(0), rat(0)])).unwrap();
        assert!(r.pass);
        assert_eq!(r.a, ["1", "-1", "-1", "-1", "-1", "-1", "-1", "1"]);
        let bad = by3(&[rat(0), rat(1), rat(1), rat(0)]);
        assert!(matches!(realize3(&bad), Err(Error::Precondition(_))));
        let half = by3(&[rat(0), crate::rat::ratio(1, 2), rat(0), crate::rat::ratio(1, 2)]);
        let r = realize3(&half).unwrap();
        assert_eq!(r.scale, "2");
        assert!(r.pass);
    }
}
