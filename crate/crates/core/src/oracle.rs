//! Finite space-direction evaluation of the functional on quasi-local
//! operators, and the adjoint action that adds one site.
//!
//! An operator `X` on `m` spin-½ space sites is paired with the eigenvectors
//! as
//!
//! ```text
//! Z{X} = Σ_{c,d} X[d, c] ⟨κ+α| M¹_{c₁d₁} ⋯ Mᵐ_{c_m d_m} |κ⟩ / (∏ T(ξ_j, κ) ⟨κ+α|κ⟩)
//! ```
//!
//! where `M^j` is the Matsubara monodromy at `ξ_j` with columns scaled by
//! `diag(q^κ, q^{-κ})`. Site 1 is the most significant bit of a row index
//! and bit value 0 is spin up.

use crate::error::{Error, Result};
use crate::model::{Zeta, C64, ONE, ZERO};
use crate::omega::OmegaModel;
use crate::operators::{build_l, embed, monodromy, SiteRep};
use crate::spectral::overlap;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A matrix acting on `m` consecutive spin-½ sites.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiLocalOp {
    pub matrix: DMatrix<C64>,
}

impl QuasiLocalOp {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        let dim = matrix.nrows();
        if dim != matrix.ncols() || dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidInput(format!(
                "operator must be square of size 2^m, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(QuasiLocalOp { matrix })
    }

    pub fn identity(m: usize) -> Self {
        QuasiLocalOp {
            matrix: DMatrix::identity(1 << m, 1 << m),
        }
    }

    pub fn sites(&self) -> usize {
        self.matrix.nrows().trailing_zeros() as usize
    }

    /// The change of the number of down spins, if it is the same for every
    /// nonzero entry.
    pub fn spin(&self) -> Option<i64> {
        let mut found = None;
        for r in 0..self.matrix.nrows() {
            for c in 0..self.matrix.ncols() {
                if self.matrix[(r, c)] != ZERO {
                    let s = r.count_ones() as i64 - c.count_ones() as i64;
                    match found {
                        None => found = Some(s),
                        Some(t) if t != s => return None,
                        _ => {}
                    }
                }
            }
        }
        Some(found.unwrap_or(0))
    }

    /// Random entries in `[-1, 1] + i[-1, 1]` restricted to spin zero.
    pub fn random_spin_zero(m: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dim = 1usize << m;
        let mut matrix = DMatrix::from_element(dim, dim, ZERO);
        for r in 0..dim {
            for c in 0..dim {
                let v = C64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0);
                if r.count_ones() == c.count_ones() {
                    matrix[(r, c)] = v;
                }
            }
        }
        QuasiLocalOp { matrix }
    }

    /// `diag(a, b) ⊗ self`, a new first site.
    pub fn prepend_diag(&self, a: C64, b: C64) -> Self {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![a, b]));
        QuasiLocalOp {
            matrix: d.kronecker(&self.matrix),
        }
    }
}

/// Evaluator of `Z_m` for one parameter set.
pub struct SpaceOracle<'a> {
    model: &'a OmegaModel,
    pairing: C64,
}

impl<'a> SpaceOracle<'a> {
    pub fn new(model: &'a OmegaModel) -> Result<Self> {
        let pairing = overlap(&model.kappa_alpha.eigen.left, &model.kappa.eigen.right);
        if pairing.norm() < 1e-12 {
            return Err(Error::InvalidInput(
                "eigenvectors at κ and κ+α have vanishing overlap".into(),
            ));
        }
        Ok(SpaceOracle { model, pairing })
    }

    fn scaled_monodromy(&self, xi: Zeta) -> Result<[[DMatrix<C64>; 2]; 2]> {
        let p = &self.model.params;
        let t = monodromy(p, xi)?;
        let (up, down) = (p.q_pow(p.kappa), p.q_pow(-p.kappa));
        Ok([
            [t.a() * up, t.b() * down],
            [t.c() * up, t.d() * down],
        ])
    }

    /// `Z_m{X}` with space inhomogeneities `xis`.
    pub fn z(&self, op: &QuasiLocalOp, xis: &[Zeta]) -> Result<C64> {
        let m = op.sites();
        if xis.len() != m {
            return Err(Error::InvalidInput(format!(
                "operator has {m} sites but {} inhomogeneities were given",
                xis.len()
            )));
        }
        let mut norm = self.pairing;
        let mut mons = Vec::with_capacity(m);
        for &xi in xis {
            norm *= self.model.kappa.t(xi.z2());
            mons.push(self.scaled_monodromy(xi)?);
        }
        let u = &self.model.kappa_alpha.eigen.left;
        let v = &self.model.kappa.eigen.right;
        let dim = 1usize << m;
        let mut total = ZERO;
        for d in 0..dim {
            for c in 0..dim {
                let x = op.matrix[(d, c)];
                if x == ZERO {
                    continue;
                }
                // apply M^m first, M^1 last
                let mut w: DVector<C64> = v.clone();
                for j in (0..m).rev() {
                    let bit = m - 1 - j;
                    let (cj, dj) = ((c >> bit) & 1, (d >> bit) & 1);
                    w = &mons[j][cj][dj] * w;
                }
                total += x * overlap(u, &w);
            }
        }
        Ok(total / norm)
    }

    /// `Z_{m+1}{𝕋(X)}` at `(ξ_1, …, ξ_m, ζ)` against `ρ(ζ) Z_m{X}`, as a
    /// relative residual.
    pub fn adjoint_identity_residual(&self, op: &QuasiLocalOp, xis: &[Zeta], zeta: Zeta) -> Result<f64> {
        let grown = adjoint_action(op, xis, zeta, self.model.params.alpha, self.model.params.ln_q)?;
        let mut all = xis.to_vec();
        all.push(zeta);
        let lhs = self.z(&grown, &all)?;
        let rhs = self.model.rho(zeta.z2())? * self.z(op, xis)?;
        Ok((lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(1e-300))
    }

    /// `½ Z_1{t*(ζ)(q^{2αS(0)})}`: the adjoint action on the bare tail
    /// evaluated at `ξ_1 = ζ`.
    pub fn half_t_star(&self, zeta: Zeta) -> Result<C64> {
        let p = &self.model.params;
        let grown = adjoint_action(&QuasiLocalOp::identity(0), &[], zeta, p.alpha, p.ln_q)?;
        self.z(&grown, &[zeta])
    }

    /// `Z_{m+1}{q^{ασ³} ⊗ X}` against `ρ(1) Z_m{X}` in the homogeneous case.
    pub fn shift_residual(&self, op: &QuasiLocalOp) -> Result<f64> {
        let p = &self.model.params;
        let grown = op.prepend_diag(p.q_pow(p.alpha), p.q_pow(-p.alpha));
        let lhs = self.z(&grown, &vec![Zeta::one(); op.sites() + 1])?;
        let rhs = self.model.rho(ONE)? * self.z(op, &vec![Zeta::one(); op.sites()])?;
        Ok((lhs - rhs).norm() / lhs.norm().max(rhs.norm()).max(1e-300))
    }
}

/// `R_j = Σ_{c,d} L(ζ/ξ_j)_{cd} ⊗ E_{cd}` with the auxiliary space last.
fn r_matrix(j: usize, m: usize, x: Zeta, ln_q: C64) -> Result<DMatrix<C64>> {
    let rep = SiteRep::new(1, ln_q)?;
    let l = build_l(&rep, x, ln_q);
    let dims = vec![2; m + 1];
    let dim = 1usize << (m + 1);
    let mut out = DMatrix::from_element(dim, dim, ZERO);
    for c in 0..2 {
        for d in 0..2 {
            let mut e = DMatrix::from_element(2, 2, ZERO);
            e[(c, d)] = ONE;
            out += embed(&l.blocks[c][d], j, &dims) * embed(&e, m, &dims);
        }
    }
    Ok(out)
}

/// `𝕋_ζ(X) = T_a(ζ) (X ⊗ q^{ασ³_a}) T_a(ζ)⁻¹` with the space monodromy
/// `T_a = R_m ⋯ R_1`. The auxiliary site becomes site `m+1`.
pub fn adjoint_action(op: &QuasiLocalOp, xis: &[Zeta], zeta: Zeta, alpha: C64, ln_q: C64) -> Result<QuasiLocalOp> {
    let m = op.sites();
    if xis.len() != m {
        return Err(Error::InvalidInput(format!(
            "operator has {m} sites but {} inhomogeneities were given",
            xis.len()
        )));
    }
    let dim = 1usize << (m + 1);
    let mut t = DMatrix::<C64>::identity(dim, dim);
    for (j, xi) in xis.iter().enumerate() {
        t = r_matrix(j, m, zeta.ratio(xi), ln_q)? * t;
    }
    let inv = t.clone().try_inverse().ok_or(Error::SingularConjugation)?;
    if t.norm() * inv.norm() > 1e12 {
        return Err(Error::SingularConjugation);
    }
    let twist = DMatrix::from_diagonal(&DVector::from_vec(vec![
        (alpha * ln_q).exp(),
        (-alpha * ln_q).exp(),
    ]));
    let xe = op.matrix.kronecker(&twist);
    Ok(QuasiLocalOp {
        matrix: &t * xe * inv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn identity_has_unit_value() {
        let m = OmegaModel::new(&fixtures::p0()).unwrap();
        let o = SpaceOracle::new(&m).unwrap();
        let xis = [Zeta::from_z2(C64::new(0.7, 0.2)), Zeta::from_z2(C64::new(1.2, -0.4))];
        let z = o.z(&QuasiLocalOp::identity(2), &xis).unwrap();
        assert!((z - ONE).norm() < 1e-12);
    }

    #[test]
    fn random_operator_is_spin_zero() {
        let x = QuasiLocalOp::random_spin_zero(3, 7);
        assert_eq!(x.spin(), Some(0));
        assert_eq!(x.sites(), 3);
        assert_eq!(x, QuasiLocalOp::random_spin_zero(3, 7));
    }

    #[test]
    fn conjugation_by_resonant_monodromy_fails() {
        let p = fixtures::p0();
        let xi = Zeta::from_z2(C64::new(0.8, 0.1));
        let zeta = xi.shifted(-1.0, p.ln_q);
        let r = adjoint_action(&QuasiLocalOp::identity(1), &[xi], zeta, p.alpha, p.ln_q);
        assert_eq!(r, Err(Error::SingularConjugation));
    }

    #[test]
    fn adjoint_identity_and_shift() {
        let m = OmegaModel::new(&fixtures::p0()).unwrap();
        let o = SpaceOracle::new(&m).unwrap();
        let x = QuasiLocalOp::random_spin_zero(2, 11);
        let xis = [Zeta::from_z2(C64::new(0.7, 0.2)), Zeta::from_z2(C64::new(1.2, -0.4))];
        let zeta = Zeta::from_z2(C64::new(-0.5, 0.9));
        let r = o.adjoint_identity_residual(&x, &xis, zeta).unwrap();
        assert!(r < 1e-10, "{r}");
        let s = o.shift_residual(&x).unwrap();
        assert!(s < 1e-10, "{s}");
    }
}
