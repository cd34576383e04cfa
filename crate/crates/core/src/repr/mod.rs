//! Matrices over valued fields and the representability side of the theory:
//! principal minors, determinantal polynomials, Rayleigh differences and
//! their factorization, and explicit constructions.

mod construct;
pub(crate) mod linear;
mod poly;
mod rayleigh;
mod search;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cube::{check_n, Subset};
use crate::field::poly as upoly;
use crate::field::{Elem, Field, FieldSpec};
use crate::subdivision::SubsetFunction;
use crate::{Error, Result};

pub use construct::{
    hypdet, isotropic_rep, realize3, reduced_isotropic_matrix, skew_plus_rank_one, FormKind, IsotropicReport, Realization,
    SkewRankOneReport,
};
pub use poly::{MultiAffinePoly, SmallPoly};
pub use rayleigh::{rayleigh, rayleigh_by_derivatives, residue_poly, verify_factorization, Branch, Factorization};
pub use search::{
    conjecture_search, is_covered, random_hermitian, uniformizer, random_skew_hermitian, random_vector, sample_elem, Counterexample, SearchConfig,
    SearchReport, Shape,
};

/// Structural type of a matrix, verified at construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tag {
    /// `Ā = Aᵀ`
    Hermitian,
    /// `Ā = −Aᵀ`
    SkewHermitian,
    /// `A = Aᵀ`
    Symmetric,
    /// `A = −Aᵀ` with zero diagonal.
    SkewSymmetric,
    General,
}

/// A matrix over a valued field.
#[derive(Debug, Clone)]
pub struct MatrixK {
    field: Arc<Field>,
    entries: Vec<Vec<Elem>>,
    tag: Tag,
}

impl MatrixK {
    pub fn new(field: Arc<Field>, entries: Vec<Vec<Elem>>, tag: Tag) -> Result<Self> {
        let rows = entries.len();
        let cols = entries.first().map_or(0, Vec::len);
        if entries.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged matrix rows".into()));
        }
        if tag != Tag::General && rows != cols {
            return Err(Error::DimensionMismatch(format!("{tag:?} matrices must be square")));
        }
        let m = MatrixK { field, entries, tag };
        if !m.satisfies(tag) {
            return Err(Error::Structure(format!("matrix is not {tag:?}")));
        }
        Ok(m)
    }

    pub fn parse(field: Arc<Field>, rows: &[Vec<&str>], tag: Tag) -> Result<Self> {
        let entries = rows.iter().map(|r| r.iter().map(|s| field.parse(s)).collect::<Result<Vec<_>>>()).collect::<Result<_>>()?;
        MatrixK::new(field, entries, tag)
    }

    /// Whether the entries have the structure `tag` describes.
    pub fn satisfies(&self, tag: Tag) -> bool {
        let k = &self.field;
        let n = self.rows();
        if tag == Tag::General {
            return true;
        }
        if n != self.cols() {
            return false;
        }
        let a = &self.entries;
        (0..n).all(|i| {
            (0..n).all(|j| match tag {
                Tag::Hermitian => k.conj(&a[i][j]) == a[j][i],
                Tag::SkewHermitian => k.conj(&a[i][j]) == k.neg(&a[j][i]),
                Tag::Symmetric => a[i][j] == a[j][i],
                Tag::SkewSymmetric => a[i][j] == k.neg(&a[j][i]) && (i != j || k.is_zero(&a[i][i])),
                Tag::General => true,
            })
        })
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn tag(&self) -> Tag {
        self.tag
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn cols(&self) -> usize {
        self.entries.first().map_or(0, Vec::len)
    }

    pub fn entries(&self) -> &[Vec<Elem>] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &Elem {
        &self.entries[i][j]
    }

    /// `σ` with `Ā = σAᵀ`; symmetric matrices count as Hermitian when the
    /// involution is trivial.
    pub fn sigma(&self) -> Option<i64> {
        let trivial = self.field.involution_is_trivial();
        match self.tag {
            Tag::Hermitian => Some(1),
            Tag::SkewHermitian => Some(-1),
            Tag::Symmetric if trivial => Some(1),
            Tag::SkewSymmetric if trivial => Some(-1),
            _ => None,
        }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Vec<Vec<Elem>> {
        rows.iter().map(|&i| cols.iter().map(|&j| self.entries[i][j].clone()).collect()).collect()
    }

    /// `A_S`, with `A_∅ = 1`.
    pub fn principal_minor(&self, s: Subset) -> Elem {
        let idx: Vec<usize> = s.elems().collect();
        det(&self.field, &self.submatrix(&idx, &idx))
    }

    pub fn to_json(&self) -> Value {
        let k = &self.field;
        let entries: Vec<Vec<String>> = self.entries.iter().map(|r| r.iter().map(|e| k.format(e)).collect()).collect();
        serde_json::json!({ "spec": k.spec(), "tag": self.tag, "entries": entries })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::InvalidArgument(format!("matrix JSON: {m}"));
        let spec: FieldSpec = serde_json::from_value(v.get("spec").cloned().ok_or_else(|| bad("missing \"spec\""))?)
            .map_err(|e| bad(&format!("spec: {e}")))?;
        let tag: Tag = match v.get("tag") {
            None => Tag::General,
            Some(t) => serde_json::from_value(t.clone()).map_err(|e| bad(&format!("tag: {e}")))?,
        };
        let rows: Vec<Vec<String>> = serde_json::from_value(v.get("entries").cloned().ok_or_else(|| bad("missing \"entries\""))?)
            .map_err(|e| bad(&format!("entries: {e}")))?;
        let field = Arc::new(Field::new(spec)?);
        let rows: Vec<Vec<&str>> = rows.iter().map(|r| r.iter().map(String::as_str).collect()).collect();
        MatrixK::parse(field, &rows, tag)
    }
}

/// Determinant over the field: denominators are cleared row by row, then a
/// division-free cofactor expansion (size ≤ 4) or fraction-free Bareiss
/// elimination runs over the polynomial ring.
pub fn det(k: &Field, m: &[Vec<Elem>]) -> Elem {
    let n = m.len();
    if n == 0 {
        return k.one();
    }
    let b = k.base();
    let mut scale = upoly::one(b);
    let rows: Vec<Vec<upoly::Poly>> = m
        .iter()
        .map(|row| {
            let l = row.iter().fold(upoly::one(b), |l, e| {
                if upoly::is_one(b, e.den()) {
                    l
                } else {
                    let g = upoly::gcd(b, &l, e.den());
                    upoly::mul(b, &l, &upoly::exact_div(b, e.den(), &g))
                }
            });
            let out = row.iter().map(|e| upoly::mul(b, e.num(), &upoly::exact_div(b, &l, e.den()))).collect();
            scale = upoly::mul(b, &scale, &l);
            out
        })
        .collect();
    let d = if n <= 4 { cofactor_det(k, &rows) } else { bareiss_det(k, rows) };
    k.from_polys(d, scale).expect("nonzero scale")
}

fn cofactor_det(k: &Field, rows: &[Vec<upoly::Poly>]) -> upoly::Poly {
    fn rec(k: &Field, rows: &[Vec<upoly::Poly>], r: usize, cols: &[usize]) -> upoly::Poly {
        let b = k.base();
        if cols.len() == 1 {
            return rows[r][cols[0]].clone();
        }
        let mut acc: upoly::Poly = Vec::new();
        for (pos, &c) in cols.iter().enumerate() {
            if rows[r][c].is_empty() {
                continue;
            }
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let term = upoly::mul(b, &rows[r][c], &rec(k, rows, r + 1, &rest));
            acc = if pos % 2 == 0 { upoly::add(b, &acc, &term) } else { upoly::sub(b, &acc, &term) };
        }
        acc
    }
    let cols: Vec<usize> = (0..rows.len()).collect();
    rec(k, rows, 0, &cols)
}

fn bareiss_det(k: &Field, mut a: Vec<Vec<upoly::Poly>>) -> upoly::Poly {
    let b = k.base();
    let n = a.len();
    let mut negate = false;
    let mut prev = upoly::one(b);
    for p in 0..n - 1 {
        if a[p][p].is_empty() {
            match (p + 1..n).find(|&r| !a[r][p].is_empty()) {
                None => return Vec::new(),
                Some(r) => {
                    a.swap(p, r);
                    negate = !negate;
                }
            }
        }
        for i in p + 1..n {
            for j in p + 1..n {
                let x = upoly::sub(b, &upoly::mul(b, &a[i][j], &a[p][p]), &upoly::mul(b, &a[i][p], &a[p][j]));
                a[i][j] = upoly::exact_div(b, &x, &prev);
            }
        }
        prev = a[p][p].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if negate {
        upoly::neg(b, &d)
    } else {
        d
    }
}

/// All principal minors, indexed by subset bitmask.
pub fn principal_minors(a: &MatrixK) -> Result<Vec<Elem>> {
    let n = a.rows();
    check_n(n)?;
    if a.cols() != n {
        return Err(Error::DimensionMismatch("principal minors need a square matrix".into()));
    }
    Ok(Subset::all(n).map(|s| a.principal_minor(s)).collect())
}

/// `p_S = ν(A_S)`.
pub fn principal_minor_valuations(a: &MatrixK) -> Result<SubsetFunction> {
    let minors = principal_minors(a)?;
    let k = a.field();
    let values = minors.iter().map(|m| k.valuation(m)).collect::<Result<Vec<_>>>()?;
    SubsetFunction::new(a.rows(), values)
}

/// Coefficients of `det(Σ_i x_i v_i v̄_iᵀ + A)` as a multiaffine polynomial,
/// by evaluation at 0-1 points and Möbius inversion.
pub fn det_poly(a: &MatrixK, vectors: &[Vec<Elem>]) -> Result<MultiAffinePoly> {
    let r = a.rows();
    if a.cols() != r {
        return Err(Error::DimensionMismatch("det_poly needs a square matrix".into()));
    }
    if vectors.iter().any(|v| v.len() != r) {
        return Err(Error::DimensionMismatch(format!("vectors must have length {r}")));
    }
    let n = vectors.len();
    check_n(n)?;
    let k = a.field().clone();
    let terms: Vec<(Vec<Elem>, Vec<Elem>)> =
        vectors.iter().map(|v| (v.clone(), v.iter().map(|y| k.conj(y)).collect())).collect();
    Ok(multiaffine_det(&k, a.entries(), &terms))
}

/// `det(B + Σ_k x_k u_k w_kᵀ)` for square `B` and rank-one terms `(u_k, w_k)`,
/// recovered from its values at 0-1 points.
pub(crate) fn multiaffine_det(k: &Arc<Field>, base: &[Vec<Elem>], terms: &[(Vec<Elem>, Vec<Elem>)]) -> MultiAffinePoly {
    let n = terms.len();
    let outer: Vec<Vec<Vec<Elem>>> =
        terms.iter().map(|(u, w)| u.iter().map(|x| w.iter().map(|y| k.mul(x, y)).collect()).collect()).collect();
    let mut values: Vec<Elem> = (0..1usize << n)
        .map(|mask| {
            let mut m = base.to_vec();
            for (i, o) in outer.iter().enumerate() {
                if mask & (1 << i) == 0 {
                    continue;
                }
                for (row, orow) in m.iter_mut().zip(o) {
                    for (x, y) in row.iter_mut().zip(orow) {
                        *x = k.add(x, y);
                    }
                }
            }
            det(k, &m)
        })
        .collect();
    mobius(k, &mut values);
    MultiAffinePoly::new(k.clone(), n, values)
}

/// In place: `c_T = Σ_{U ⊆ T} (−1)^{|T∖U|} d_U`.
pub(crate) fn mobius(k: &Field, values: &mut [Elem]) {
    let size = values.len();
    let mut bit = 1;
    while bit < size {
        for mask in 0..size {
            if mask & bit != 0 {
                values[mask] = k.sub(&values[mask], &values[mask ^ bit]);
            }
        }
        bit <<= 1;
    }
}

/// Standard basis vectors `e_1, …, e_n`.
pub fn unit_vectors(k: &Field, n: usize) -> Vec<Vec<Elem>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { k.one() } else { k.zero() }).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::ExtRat;

    pub(crate) fn field(name: &str) -> Arc<Field> {
        Arc::new(Field::named(name).unwrap())
    }

    pub(crate) fn first_example() -> MatrixK {
        let k = field("qi-tadic");
        MatrixK::parse(k, &[vec!["t", "i", "i"], vec!["-i", "t", "i"], vec!["-i", "-i", "t"]], Tag::Hermitian).unwrap()
    }

    pub(crate) fn eis_hermitian() -> MatrixK {
        let k = field("eis-2adic");
        let rows = [vec!["1", "1+2*a", "1+2*a"], vec!["-1-2*a", "1", "1+2*a"], vec!["-1-2*a", "-1-2*a", "1"]];
        MatrixK::parse(k, &rows, Tag::Hermitian).unwrap()
    }

    pub(crate) fn eis_skew() -> MatrixK {
        let k = field("eis-2adic");
        let rows = [vec!["0", "1", "1"], vec!["-1", "0", "1+2*a"], vec!["-1", "1+2*a", "0"]];
        MatrixK::parse(k, &rows, Tag::SkewHermitian).unwrap()
    }

    pub(crate) fn violating_example() -> MatrixK {
        let k = field("violating");
        let rows = [vec!["4", "4+a", "3-a"], vec!["3-a", "4", "4+a"], vec!["4+a", "3-a", "4"]];
        MatrixK::parse(k, &rows, Tag::Hermitian).unwrap()
    }

    pub(crate) fn by_size(p: &SubsetFunction) -> Vec<String> {
        (0..=p.n()).map(|k| {
            let vals: std::collections::BTreeSet<String> =
                Subset::all(p.n()).filter(|s| s.len() == k).map(|s| p.get(s).to_string()).collect();
            vals.into_iter().collect::<Vec<_>>().join("|")
        })
        .collect()
    }

    #[test]
    fn example_valuations() {
        assert_eq!(by_size(&principal_minor_valuations(&first_example()).unwrap()), ["0", "1", "0", "1"]);
        assert_eq!(by_size(&principal_minor_valuations(&eis_hermitian()).unwrap()), ["0", "0", "1", "3"]);
        assert_eq!(by_size(&principal_minor_valuations(&eis_skew()).unwrap()), ["0", "inf", "0", "1"]);
        assert_eq!(by_size(&principal_minor_valuations(&violating_example()).unwrap()), ["0", "2", "1", "0"]);
    }

    #[test]
    fn tags_are_checked() {
        let k = field("qi-tadic");
        assert!(MatrixK::parse(k.clone(), &[vec!["t", "i"], vec!["i", "t"]], Tag::Hermitian).is_err());
        assert!(MatrixK::parse(k.clone(), &[vec!["i", "1"], vec!["-1", "2*i"]], Tag::SkewHermitian).is_ok());
        assert!(MatrixK::parse(k, &[vec!["1", "2"]], Tag::Symmetric).is_err());
    }

    #[test]
    fn determinant_routes_agree() {
        let k = field("q-tadic");
        let rows: Vec<Vec<String>> = (0..6)
            .map(|i| (0..6).map(|j| format!("{}+{}*t+1/(t+{})", (i * 7 + j * 3) % 5, (i + 2 * j) % 3, (i + j) % 2 + 1)).collect())
            .collect();
        let m: Vec<Vec<Elem>> = rows.iter().map(|r| r.iter().map(|s| k.parse(s).unwrap()).collect()).collect();
        for size in 1..=6 {
            let sub: Vec<Vec<Elem>> = m[..size].iter().map(|r| r[..size].to_vec()).collect();
            let d = det(&k, &sub);
            let mut g = sub.clone();
            let mut acc = k.one();
            for c in 0..size {
                let Some(piv) = (c..size).find(|&r| !k.is_zero(&g[r][c])) else {
                    acc = k.zero();
                    break;
                };
                if piv != c {
                    g.swap(piv, c);
                    acc = k.neg(&acc);
                }
                acc = k.mul(&acc, &g[c][c]);
                for r in c + 1..size {
                    let f = k.div(&g[r][c], &g[c][c]).unwrap();
                    for j in c..size {
                        let x = k.mul(&f, &g[c][j]);
                        g[r][j] = k.sub(&g[r][j], &x);
                    }
                }
            }
            assert_eq!(d, acc, "size {size}");
        }
    }

    #[test]
    fn det_poly_of_first_example() {
        let a = first_example();
        let k = a.field().clone();
        let f = det_poly(&a, &unit_vectors(&k, 3)).unwrap();
        let c = |t: &str| k.format(f.coeff(Subset::parse(t, 3).unwrap()));
        assert_eq!(c("123"), "1");
        assert_eq!(c("12"), "t");
        assert_eq!(c("3"), "-1+t^2");
        assert_eq!(c(""), "-3*t+t^3");
        for s in Subset::all(3) {
            assert_eq!(f.coeff(s.complement()), &a.principal_minor(s));
        }
    }

    #[test]
    fn det_poly_of_counterexample() {
        let a = violating_example();
        let k = a.field().clone();
        let f = det_poly(&a, &unit_vectors(&k, 3)).unwrap();
        let expected = ["-55", "2", "2", "4", "2", "4", "4", "1"];
        for s in Subset::all(3) {
            assert_eq!(k.format(f.coeff(s)), expected[s.bits as usize]);
        }
        let p = principal_minor_valuations(&a).unwrap();
        assert_eq!(p.get(Subset::empty(3)), &ExtRat::zero());
    }

    #[test]
    fn json_round_trip() {
        let a = eis_hermitian();
        let j = a.to_json();
        assert_eq!(j["tag"], "hermitian");
        let b = MatrixK::from_json(&j).unwrap();
        assert_eq!(b.entries(), a.entries());
        let doc = serde_json::json!({
            "spec": {"base": {"kind":"quadratic","c":0,"d":1,"conj":[0,-1]}, "twist": false, "valuation": {"kind":"t-adic"}},
            "tag": "hermitian",
            "entries": [["t","i","i"],["-i","t","i"],["-i","-i","t"]]
        });
        assert_eq!(MatrixK::from_json(&doc).unwrap().entries(), first_example().entries());
    }
}
