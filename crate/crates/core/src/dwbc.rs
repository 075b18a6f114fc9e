//! Six-vertex partition function with domain-wall boundary conditions and its
//! determinant representation through `A⁺` of a spin-½ chain.

use crate::abelian::monomial_periods;
use crate::error::{Error, Result};
use crate::model::{Contour, ModelParams, Site, Zeta, C64, ONE, ZERO};
use crate::operators::monodromy;
use crate::poly::Poly;
use nalgebra::{DMatrix, DVector};

/// `n` horizontal lines with inhomogeneities `τ_j` and `n` vertical lines
/// with spectral parameters `ξ_j`.
#[derive(Clone, Debug)]
pub struct DwbcInstance {
    pub params: ModelParams,
    pub xis: Vec<C64>,
}

impl DwbcInstance {
    pub fn new(ln_q: C64, taus: &[C64], xis: &[C64]) -> Result<Self> {
        if taus.is_empty() || taus.len() != xis.len() {
            return Err(Error::InvalidInput(format!(
                "need n ≥ 1 with as many τ as ξ, got {} and {}",
                taus.len(),
                xis.len()
            )));
        }
        for (i, a) in xis.iter().enumerate() {
            for b in &xis[i + 1..] {
                if (a * a - b * b).norm() < 1e-12 {
                    return Err(Error::InvalidInput(format!("ξ² values coincide at {}", a * a)));
                }
            }
        }
        let sites = taus.iter().map(|&t| Site::spin_half(t)).collect();
        let params = ModelParams::chain(ln_q, sites)?;
        Ok(DwbcInstance {
            params,
            xis: xis.to_vec(),
        })
    }

    pub fn n(&self) -> usize {
        self.xis.len()
    }

    pub fn taus(&self) -> Vec<C64> {
        self.params.sites.iter().map(|s| s.tau).collect()
    }

    /// `⟨-| B(ξ_1) ⋯ B(ξ_k) |+⟩ / ∏ ξ_j` for the first `k` spectral parameters
    /// (all spins up is index 0, all spins down the last index).
    pub fn contraction(&self, k: usize) -> Result<C64> {
        let dim: usize = self.params.sites.iter().map(Site::dim).product();
        let mut v = DVector::from_element(dim, ZERO);
        v[0] = ONE;
        let mut scale = ONE;
        for xi in self.xis[..k].iter().rev() {
            let t = monodromy(&self.params, Zeta::from_zeta(*xi))?;
            v = t.b() * v;
            scale *= xi;
        }
        Ok(v[dim - 1] / scale)
    }

    /// `M_n`.
    pub fn partition(&self) -> Result<C64> {
        self.contraction(self.n())
    }

    /// Largest entry of `B(ξ)` that would change `S³` by anything but one
    /// lowering step; exactly zero when the ice rule holds.
    pub fn ice_rule_violation(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for xi in &self.xis {
            let t = monodromy(&self.params, Zeta::from_zeta(*xi))?;
            let b = t.b();
            for r in 0..b.nrows() {
                for c in 0..b.ncols() {
                    // bit set = spin down
                    if r.count_ones() != c.count_ones() + 1 {
                        worst = worst.max(b[(r, c)].norm());
                    }
                }
            }
        }
        Ok(worst)
    }

    /// `A⁺` with measure `∏ (z - ξ_j²)`, rows `Γ_0..Γ_n`, columns `z^0..z^n`.
    pub fn period_matrix(&self) -> Result<DMatrix<C64>> {
        let roots: Vec<C64> = self.xis.iter().map(|x| x * x).collect();
        monomial_periods(&self.params, &Poly::from_roots(&roots))
    }

    /// `(-1)^{n(n-1)/2} ∏ τ_j^{-2} ∏_{i,j} (q τ_i² - q⁻¹ τ_j²) ∏_{i<j} (τ_i² - τ_j²)`.
    pub fn determinant_prefactor(&self) -> C64 {
        let n = self.n();
        let q = self.params.q();
        let t2: Vec<C64> = self.params.sites.iter().map(Site::tau2).collect();
        let mut pre = if (n * (n - 1) / 2).is_multiple_of(2) { ONE } else { -ONE };
        for i in 0..n {
            pre /= t2[i];
            for j in 0..n {
                pre *= q * t2[i] - t2[j] / q;
            }
            for j in i + 1..n {
                pre *= t2[i] - t2[j];
            }
        }
        pre
    }

    /// `D_n`: the prefactor times the minor of `A⁺` on rows and columns `1..n`.
    pub fn determinant_form(&self) -> Result<C64> {
        let a = self.period_matrix()?;
        let n = self.n();
        Ok(self.determinant_prefactor() * a.view((1, 1), (n, n)).determinant())
    }

    /// Integrals `∫_Γ z^j ∏(z - ξ_k²) φ` for `j = 0..n` on `Γ_0` and `Γ_∞`.
    pub fn contour_integrals(&self) -> Result<(Vec<C64>, Vec<C64>)> {
        let roots: Vec<C64> = self.xis.iter().map(|x| x * x).collect();
        let m = Poly::from_roots(&roots);
        let row = |g: Contour| -> Result<Vec<C64>> {
            (0..=self.n())
                .map(|j| self.params.integrate(|z| z.powi(j as i32) * m.eval(z), g))
                .collect()
        };
        Ok((row(Contour::Origin)?, row(Contour::Infinity)?))
    }
}

/// `M_n(ξ_1, …, ξ_{n-1}, τ_n) / M_{n-1}(ξ_1, …, ξ_{n-1})`:
///
/// ```text
/// q^{1/2-n} (q²-1) τ_n⁻¹ ∏_{j<n} (q²ξ_j² - τ_n²)(q²τ_n² - τ_j²) / (τ_j² τ_n²)
/// ```
pub fn recurrence_factor(ln_q: C64, taus: &[C64], xis: &[C64]) -> C64 {
    let n = taus.len();
    let q2 = (2.0 * ln_q).exp();
    let tn = taus[n - 1];
    let tn2 = tn * tn;
    let mut f = ((0.5 - n as f64) * ln_q).exp() * (q2 - ONE) / tn;
    for j in 0..n - 1 {
        let tj2 = taus[j] * taus[j];
        let xj2 = xis[j] * xis[j];
        f *= (q2 * xj2 - tn2) * (q2 * tn2 - tj2) / (tj2 * tn2);
    }
    f
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn ln_q() -> C64 {
        fixtures::Q_STANDARD.ln()
    }

    #[test]
    fn single_line_is_b_of_one_site() {
        let tau = c(1.1, 0.0);
        let xi = c(0.7, 0.3);
        let inst = DwbcInstance::new(ln_q(), &[tau], &[xi]).unwrap();
        let q = fixtures::Q_STANDARD;
        // B = η x F q^{(H-1)/2} on v_0 with H = 1: η ξ/τ
        let eta = q.sqrt() * (q - 1.0 / q);
        let expected = eta / tau;
        assert!((inst.partition().unwrap() - expected).norm() < 1e-13);
    }

    #[test]
    fn shorter_products_vanish() {
        let inst = DwbcInstance::new(ln_q(), &fixtures::dwbc_taus(3), &[c(0.7, 0.3), c(1.2, -0.1), c(0.5, 0.5)]).unwrap();
        for k in 0..3 {
            assert_eq!(inst.contraction(k).unwrap(), ZERO);
        }
        assert_eq!(inst.ice_rule_violation().unwrap(), 0.0);
    }

    #[test]
    fn recurrence_holds() {
        let taus = fixtures::dwbc_taus(3);
        let xis_short = [c(0.7, 0.3), c(1.2, -0.1)];
        let mut xis = xis_short.to_vec();
        xis.push(taus[2]);
        let big = DwbcInstance::new(ln_q(), &taus, &xis).unwrap().partition().unwrap();
        let small = DwbcInstance::new(ln_q(), &taus[..2], &xis_short).unwrap().partition().unwrap();
        let f = recurrence_factor(ln_q(), &taus, &xis);
        assert!((big - f * small).norm() < 1e-10 * big.norm(), "{big} {}", f * small);
    }

    #[test]
    fn determinant_ratio_is_independent_of_xi() {
        let taus = fixtures::dwbc_taus(3);
        let ratio = |xis: &[C64]| {
            let inst = DwbcInstance::new(ln_q(), &taus, xis).unwrap();
            inst.determinant_form().unwrap() / inst.partition().unwrap()
        };
        let r1 = ratio(&[c(0.7, 0.3), c(1.2, -0.1), c(0.5, 0.5)]);
        let r2 = ratio(&[c(-0.4, 0.8), c(0.9, 0.9), c(1.5, 0.2)]);
        assert!((r1 - r2).norm() < 1e-9 * r1.norm(), "{r1} {r2}");
    }

    #[test]
    fn contour_values() {
        let xis = [c(0.7, 0.3), c(1.2, -0.1)];
        let inst = DwbcInstance::new(ln_q(), &fixtures::dwbc_taus(2), &xis).unwrap();
        let (origin, inf) = inst.contour_integrals().unwrap();
        let two_pi_i = c(0.0, 2.0 * std::f64::consts::PI);
        let prod: C64 = xis.iter().map(|x| x * x).product();
        assert!((origin[0] - two_pi_i * prod).norm() < 1e-12);
        assert!(origin[1..].iter().all(|v| *v == ZERO));
        let q = fixtures::Q_STANDARD;
        let t4: C64 = fixtures::dwbc_taus(2).iter().map(|t| t.powi(4)).product();
        for v in &inf[..2] {
            assert!(v.norm() < 1e-12, "{v}");
        }
        assert!((inf[2] + two_pi_i * t4 / q.powi(4)).norm() < 1e-10, "{}", inf[2]);
    }
}
