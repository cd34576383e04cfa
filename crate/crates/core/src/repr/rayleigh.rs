//! Rayleigh differences `Δ_ij(f)` and their factorization for determinantal
//! polynomials of (skew-)Hermitian matrices.

use serde::Serialize;

use super::poly::{MultiAffinePoly, SmallPoly};
use super::{det_poly, linear, multiaffine_det, MatrixK};
use crate::field::Elem;
use crate::{Error, Result};

/// `Δ_ij(f) = f_i^j f_j^i − f_ij f^{ij}` from the four slices of `f` along
/// `x_i, x_j` (indices are 0-based).
pub fn rayleigh(f: &MultiAffinePoly, i: usize, j: usize) -> Result<SmallPoly> {
    let n = f.n();
    if i == j || i >= n || j >= n {
        return Err(Error::InvalidArgument(format!("need distinct variables below {n}, got {i} and {j}")));
    }
    let k = f.field();
    let (bi, bj) = (1usize << i, 1usize << j);
    let mut slices = [SmallPoly::zero(k.clone(), n), SmallPoly::zero(k.clone(), n), SmallPoly::zero(k.clone(), n), SmallPoly::zero(k.clone(), n)];
    for (mask, c) in f.coeffs().iter().enumerate() {
        let slot = usize::from(mask & bi != 0) + 2 * usize::from(mask & bj != 0);
        let rest = mask & !(bi | bj);
        let exps = (0..n).map(|v| ((rest >> v) & 1) as u8).collect();
        slices[slot].add_term(exps, c.clone());
    }
    let [f_none, f_i, f_j, f_ij] = slices;
    let delta = f_i.mul(&f_j).sub(&f_ij.mul(&f_none));
    debug_assert_eq!(delta, rayleigh_by_derivatives(&f.to_small(), i, j));
    Ok(delta)
}

/// `∂_i f · ∂_j f − f · ∂_i∂_j f` computed by formal differentiation.
pub fn rayleigh_by_derivatives(f: &SmallPoly, i: usize, j: usize) -> SmallPoly {
    let di = f.derivative(i);
    let dj = f.derivative(j);
    di.mul(&dj).sub(&f.mul(&di.derivative(j)))
}

/// Coefficient-wise residue of a polynomial over the valuation ring.
pub fn residue_poly(f: &SmallPoly) -> Result<SmallPoly> {
    f.residue()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// `v_i, v_j` independent: change of basis plus condensation.
    Independent,
    /// `v_i = λ v_j` (or `v_j = 0`).
    Dependent,
}

/// Outcome of checking `Δ_ij(f) = σ^{r−1} g(x) ḡ(σx)`.
#[derive(Debug, Clone)]
pub struct Factorization {
    pub branch: Branch,
    pub sigma: i64,
    /// Size `r` of the matrix; the sign is `σ^{r−1}`.
    pub size: usize,
    pub g: SmallPoly,
    pub rayleigh: SmallPoly,
    pub product: SmallPoly,
    pub holds: bool,
}

/// Builds the factor `g` independently of `Δ_ij(f)` and compares exactly.
pub fn verify_factorization(a: &MatrixK, vectors: &[Vec<Elem>], i: usize, j: usize) -> Result<Factorization> {
    let sigma = a
        .sigma()
        .ok_or_else(|| Error::Structure("Hermitian or skew-Hermitian (σ = ±1)".into()))?;
    let f = det_poly(a, vectors)?;
    let delta = rayleigh(&f, i, j)?;
    let k = a.field().clone();
    let r = a.rows();
    let n = vectors.len();

    let (branch, g) = match linear::dependence(&k, &vectors[i], &vectors[j]) {
        Some(lambda) => {
            // Δ_ij(f) = λλ̄ (∂_j f)², so g = λ ∂_j f.
            let g = match lambda {
                Some(l) => f.to_small().derivative(j).scale(&l),
                None => SmallPoly::zero(k.clone(), n),
            };
            (Branch::Dependent, g)
        }
        None => {
            // With U = (v_i | v_j | …) and M' = U⁻¹ M Ū⁻ᵀ, the condensation
            // factor is det M'(1,2) = −(Ūᵀ adj(M) U)_{21} / κ with
            // κ = det U · conj(det U). Hence κ·det M'(1,2) = −v̄_jᵀ adj(M) v_i,
            // the bordered determinant det [[M, v_i], [v̄_jᵀ, 0]], which is
            // multiaffine in x and needs no inverse.
            let mut base: Vec<Vec<Elem>> = a
                .entries()
                .iter()
                .zip(&vectors[i])
                .map(|(row, vi)| row.iter().cloned().chain(std::iter::once(vi.clone())).collect())
                .collect();
            base.push(vectors[j].iter().map(|y| k.conj(y)).chain(std::iter::once(k.zero())).collect());
            let terms: Vec<(Vec<Elem>, Vec<Elem>)> = vectors
                .iter()
                .map(|v| {
                    let left = v.iter().cloned().chain(std::iter::once(k.zero())).collect();
                    let right = v.iter().map(|y| k.conj(y)).chain(std::iter::once(k.zero())).collect();
                    (left, right)
                })
                .collect();
            (Branch::Independent, multiaffine_det(&k, &base, &terms).to_small())
        }
    };
    let sign = if sigma < 0 && r % 2 == 0 { k.int(-1) } else { k.one() };
    let product = g.mul(&g.conj().subst_sign(sigma)).scale(&sign);
    let holds = product == delta;
    Ok(Factorization { branch, sigma, size: r, g, rayleigh: delta, product, holds })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::field::Field;
    use crate::repr::tests::{eis_hermitian, first_example};
    use crate::repr::{random_skew_hermitian, random_vector, sample_elem, unit_vectors, Tag};

    #[test]
    fn first_example_rayleigh() {
        let a = first_example();
        let k = a.field().clone();
        let f = det_poly(&a, &unit_vectors(&k, 3)).unwrap();
        let d = rayleigh(&f, 0, 1).unwrap();
        assert_eq!(d.to_string(), "x3^2+2*t*x3+(1+t^2)");
        let fac = verify_factorization(&a, &unit_vectors(&k, 3), 0, 1).unwrap();
        assert!(fac.holds);
        assert_eq!(fac.branch, Branch::Independent);
        // g = ±(−1 + it + ix₃), up to a unit of the fixed field.
        let g = fac.g.to_string();
        assert!(g == "i*x3+(-1+i*t)" || g == "-i*x3+(-1-i*t)", "{g}");
        let r = residue_poly(&d).unwrap();
        assert_eq!(r.to_string(), "x3^2+1");
        let ri = r.field().clone();
        let x3 = SmallPoly::var(ri.clone(), 3, 2);
        let i = SmallPoly::constant(ri.clone(), 3, ri.alpha().unwrap());
        let m1 = SmallPoly::constant(ri.clone(), 3, ri.int(-1));
        assert_eq!(m1.add(&i.mul(&x3)).mul(&m1.sub(&i.mul(&x3))), r);
    }

    #[test]
    fn eisenstein_rayleigh() {
        let a = eis_hermitian();
        let k = a.field().clone();
        let f = det_poly(&a, &unit_vectors(&k, 3)).unwrap();
        let d = rayleigh(&f, 0, 1).unwrap();
        let three = k.int(3);
        let x3 = SmallPoly::var(k.clone(), 3, 2);
        let expected = x3.mul(&x3).add(&x3.scale(&k.int(2))).add(&SmallPoly::constant(k.clone(), 3, k.int(4))).scale(&three);
        assert_eq!(d, expected);
        assert_eq!(residue_poly(&d).unwrap().to_string(), "x3^2");
        assert!(verify_factorization(&a, &unit_vectors(&k, 3), 0, 1).unwrap().holds);
    }

    #[test]
    fn slices_match_derivatives() {
        let k = Arc::new(Field::named("qi-twist-tadic").unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let coeffs = (0..16).map(|_| sample_elem(&k, &mut rng)).collect();
            let f = MultiAffinePoly::new(k.clone(), 4, coeffs);
            for (i, j) in [(0, 1), (2, 3), (3, 0)] {
                assert_eq!(rayleigh(&f, i, j).unwrap(), rayleigh_by_derivatives(&f.to_small(), i, j));
            }
        }
        let f = MultiAffinePoly::new(k.clone(), 2, vec![k.zero(), k.zero(), k.zero(), k.one()]);
        assert!(rayleigh(&f, 0, 1).unwrap().is_zero());
        assert!(rayleigh(&f, 1, 1).is_err());
    }

    #[test]
    fn factorization_branches() {
        let k = Arc::new(Field::named("qi-twist-tadic").unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..6 {
            let a = random_skew_hermitian(&k, 4, &mut rng);
            let mut vs: Vec<Vec<Elem>> = (0..3).map(|_| random_vector(&k, 4, &mut rng)).collect();
            if trial % 2 == 1 {
                let lambda = sample_elem(&k, &mut rng);
                vs[0] = vs[1].iter().map(|x| k.mul(&lambda, x)).collect();
            }
            let fac = verify_factorization(&a, &vs, 0, 1).unwrap();
            assert!(fac.holds, "trial {trial}");
            assert_eq!(fac.sigma, -1);
            let expected = if trial % 2 == 1 || linear::rank(&k, &vs[..2]) < 2 { Branch::Dependent } else { Branch::Independent };
            assert_eq!(fac.branch, expected);
        }
        let q = Arc::new(Field::named("q-tadic").unwrap());
        let sym: Vec<Vec<Elem>> = (0..3).map(|i| (0..3).map(|j| q.int((i * j + i + j) as i64 % 4)).collect()).collect();
        let sym = MatrixK::new(q.clone(), sym, Tag::Symmetric).unwrap();
        assert_eq!(sym.sigma(), Some(1));
        assert!(verify_factorization(&sym, &unit_vectors(&q, 3), 1, 2).unwrap().holds);
        let general = MatrixK::new(q.clone(), sym.entries().to_vec(), Tag::General).unwrap();
        assert!(verify_factorization(&general, &unit_vectors(&q, 3), 1, 2).is_err());
    }

    #[test]
    fn scaling_lemma() {
        let k = Arc::new(Field::named("eis-2adic").unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let coeffs = (0..8).map(|_| sample_elem(&k, &mut rng)).collect();
            let f = MultiAffinePoly::new(k.clone(), 3, coeffs);
            let lambda: Vec<Elem> = (0..3)
                .map(|_| loop {
                    let x = sample_elem(&k, &mut rng);
                    if !k.is_zero(&x) {
                        break x;
                    }
                })
                .collect();
            let (i, j) = (rng.gen_range(0..2), 2);
            let lhs = rayleigh(&f.scale_vars(&lambda).unwrap(), i, j).unwrap();
            let rhs = rayleigh(&f, i, j).unwrap().scale_vars(&lambda).unwrap().scale(&k.mul(&lambda[i], &lambda[j]));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn condensation_factor_matches_change_of_basis() {
        let k = Arc::new(Field::named("qi-tadic").unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut checked = 0;
        while checked < 3 {
            let a = crate::repr::random_hermitian(&k, 3, &mut rng);
            let vs: Vec<Vec<Elem>> = (0..3).map(|_| random_vector(&k, 3, &mut rng)).collect();
            if linear::rank(&k, &vs[..2]) < 2 {
                continue;
            }
            checked += 1;
            let fac = verify_factorization(&a, &vs, 0, 1).unwrap();
            assert!(fac.holds);
            // Oracle: transform so that v_1, v_2 become e_1, e_2 and take the
            // (1,2)-deleted determinant directly.
            let u = linear::complete_basis(&k, &vs[..2]);
            let u_inv = linear::inverse(&k, &u).unwrap();
            let a2 = linear::mul(&k, &linear::mul(&k, &u_inv, a.entries()), &linear::conj_transpose(&k, &u_inv));
            let w: Vec<Vec<Elem>> = vs.iter().map(|v| linear::apply(&k, &u_inv, v)).collect();
            let rows = [1, 2];
            let cols = [0, 2];
            let base: Vec<Vec<Elem>> = rows.iter().map(|&x| cols.iter().map(|&y| a2[x][y].clone()).collect()).collect();
            let terms: Vec<(Vec<Elem>, Vec<Elem>)> = w
                .iter()
                .map(|wk| (rows.iter().map(|&x| wk[x].clone()).collect(), cols.iter().map(|&y| k.conj(&wk[y])).collect()))
                .collect();
            let du = crate::repr::det(&k, &u);
            let kappa = k.mul(&du, &k.conj(&du));
            let g = multiaffine_det(&k, &base, &terms).to_small().scale(&kappa);
            assert!(g == fac.g || g == fac.g.neg());
        }
    }
}
