//! The functions `ρ(ζ)` and `ω(ζ, ξ)`.
//!
//! `ω` is built in closed form from `X = (A⁺)⁻¹B⁺` plus an explicit
//! symmetric part. An independent construction solves the characterization
//! instead: the known singular part plus `ζ^α C(ζ²)/T(ζ,κ)` with `C` of
//! degree `n`, fixed by the `n+1` normalization integrals. At `α = 0` the
//! closed form needs `Δ⁻¹` on an untwisted constant and does not exist, so
//! only the characterization is available there.
//!
//! Internally everything is evaluated in the stripped form `ζ^{-α} ω(ζ, ξ)`,
//! a single-valued function of `z = ζ²` for fixed `ξ`.

use crate::abelian::{check_conditioning, monomial_periods, stripped_measures, PeriodData};
use crate::error::{Error, Result};
use crate::model::{psi_rational, Contour, ModelParams, Zeta, C64, ONE};
use crate::poly::Poly;
use crate::spectral::SpectralData;
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

/// Evaluator for `ρ` and `ω` on one parameter set.
#[derive(Clone, Debug)]
pub struct OmegaModel {
    pub params: ModelParams,
    pub kappa: SpectralData,
    pub kappa_alpha: SpectralData,
    /// `A⁺`, available for every `α`.
    pub a_plus: DMatrix<C64>,
    /// Full period data, absent when the closed form does not exist.
    pub periods: Option<PeriodData>,
    x: Option<DMatrix<C64>>,
    measure_plus: Poly,
    a_poly: Poly,
    d_poly: Poly,
}

impl OmegaModel {
    pub fn new(params: &ModelParams) -> Result<Self> {
        let kappa = SpectralData::compute(params, params.kappa)?;
        let kappa_alpha = if params.alpha == C64::new(0.0, 0.0) {
            kappa.clone()
        } else {
            SpectralData::compute(params, params.kappa + params.alpha)?
        };
        let (measure_plus, _) = stripped_measures(&kappa, &kappa_alpha);
        let a_plus = monomial_periods(params, &measure_plus)?;
        check_conditioning(&a_plus)?;
        let periods = match PeriodData::compute(params, &kappa, &kappa_alpha) {
            Ok(p) => Some(p),
            Err(Error::DegenerateTwist { .. }) => None,
            Err(e) => return Err(e),
        };
        let x = periods.as_ref().map(PeriodData::x_matrix).transpose()?;
        Ok(OmegaModel {
            params: params.clone(),
            kappa,
            kappa_alpha,
            a_plus,
            periods,
            x,
            measure_plus,
            a_poly: params.a_poly(),
            d_poly: params.d_poly(),
        })
    }

    pub fn alpha(&self) -> C64 {
        self.params.alpha
    }

    pub fn has_closed_form(&self) -> bool {
        self.x.is_some()
    }

    /// `X = (A⁺)⁻¹ B⁺` when the closed form exists.
    pub fn x_matrix(&self) -> Option<&DMatrix<C64>> {
        self.x.as_ref()
    }

    fn t_kappa(&self, z: C64) -> Result<C64> {
        let t = self.kappa.t(z);
        if t.norm() < 1e-13 * self.kappa.t_poly.norm() {
            return Err(Error::TransferZero(z));
        }
        Ok(t)
    }

    /// `Q⁻(ζ,κ+α) Q⁺(ζ,κ) φ(ζ)` with the twist powers stripped, at `z = ζ²`.
    pub fn measure(&self, z: C64) -> C64 {
        self.measure_plus.eval(z) * self.params.phi(z)
    }

    /// `ρ(ζ) = T(ζ, κ+α) / T(ζ, κ)` at `z = ζ²`.
    pub fn rho(&self, z: C64) -> Result<C64> {
        Ok(self.kappa_alpha.t(z) / self.t_kappa(z)?)
    }

    /// `ζ^{-α} ψ(q^s ζ/ξ, α) = (q^s/ξ)^α R(q^{2s} z/ξ²)`.
    fn psi_stripped(&self, z: C64, xi: Zeta, s: f64) -> Result<C64> {
        let u = self.params.q_pow_f(2.0 * s) * z / xi.z2();
        if (u - ONE).norm() < 1e-14 {
            return Err(Error::PoleHit(z));
        }
        let pre = (self.alpha() * (s * self.params.ln_q - xi.ln)).exp();
        Ok(pre * psi_rational(u))
    }

    /// Stripped singular part:
    /// `-Δψ(ζ/ξ) + 4/(T(ζ)T(ξ)) (a(ξ)d(q⁻¹ξ)ψ(qζ/ξ) - a(qξ)d(ξ)ψ(q⁻¹ζ/ξ))`.
    pub fn omega_sing_stripped(&self, z: C64, xi: Zeta) -> Result<C64> {
        let w = xi.z2();
        let q2 = self.params.q_pow_f(2.0);
        let (a, d) = (&self.a_poly, &self.d_poly);
        let up = self.psi_stripped(z, xi, 1.0)?;
        let down = self.psi_stripped(z, xi, -1.0)?;
        let tt = self.t_kappa(z)? * self.t_kappa(w)?;
        Ok(-(up - down) + 4.0 / tt * (a.eval(w) * d.eval(w / q2) * up - a.eval(q2 * w) * d.eval(w) * down))
    }

    /// Singular part `ω_sing(ζ, ξ)`.
    pub fn omega_sing(&self, zeta: Zeta, xi: Zeta) -> Result<C64> {
        Ok(zeta.pow(self.alpha()) * self.omega_sing_stripped(zeta.z2(), xi)?)
    }

    /// Stripped closed form
    /// `4/(T(ζ)T(ξ)) v⁺(ζ)ᵗ X v⁻(ξ) + ω_sym(ζ, ξ)`.
    pub fn omega_closed_stripped(&self, z: C64, xi: Zeta) -> Result<C64> {
        let x = self.x.as_ref().ok_or(Error::DegenerateTwist {
            twist: self.alpha(),
            mode: 0,
        })?;
        let n = self.params.n();
        let w = xi.z2();
        let tz = self.t_kappa(z)?;
        let tw = self.t_kappa(w)?;
        let tt = tz * tw;
        let vm = DVector::from_fn(n + 1, |j, _| xi.pow(-self.alpha() + 2.0 * j as f64));
        let xv = x * vm;
        let main: C64 = (0..=n).rev().fold(C64::new(0.0, 0.0), |acc, i| acc * z + xv[i]);
        let (a, d) = (&self.a_poly, &self.d_poly);
        let up = self.psi_stripped(z, xi, 1.0)?;
        let down = self.psi_stripped(z, xi, -1.0)?;
        let mid = self.psi_stripped(z, xi, 0.0)?;
        let tka_z = self.kappa_alpha.t(z);
        let tka_w = self.kappa_alpha.t(w);
        let sym = ((4.0 * a.eval(w) * d.eval(z) - tt) * up
            - (4.0 * a.eval(z) * d.eval(w) - tt) * down
            - 2.0 * mid * (tz * tka_w - tw * tka_z))
            / tt;
        Ok(4.0 / tt * main + sym)
    }

    /// `ζ^{-α} D̄ψ` term of the normalization, written on the contour side:
    /// `h(z) = D̄ψ̃ · P⁻_{κ+α}(z) (a(z) q^{-γ} P⁺_κ(q⁻²z) - d(z) q^γ P⁺_κ(q²z))`
    /// with `D̄F = F(q·) + F(q⁻¹·) - 2ρ(ξ)F` acting on `ξ`.
    pub fn normalization_term(&self, xi: Zeta, contour: Contour) -> Result<C64> {
        let p = &self.params;
        let w = xi.z2();
        let rho = self.rho(w)?;
        let q2 = p.q_pow_f(2.0);
        let g = self.kappa.gamma;
        let alpha = self.alpha();
        let tilde = |z: C64, s: f64| -> C64 {
            let pre = (-alpha * (xi.ln + s * p.ln_q)).exp();
            pre * psi_rational(z / (w * p.q_pow_f(2.0 * s)))
        };
        let h = |z: C64| -> C64 {
            let dbar = tilde(z, 1.0) + tilde(z, -1.0) - 2.0 * rho * tilde(z, 0.0);
            let shifted = self.a_poly.eval(z) * p.q_pow(-g) * self.kappa.plus.eval(z / q2)
                - self.d_poly.eval(z) * p.q_pow(g) * self.kappa.plus.eval(z * q2);
            dbar * self.kappa_alpha.minus.eval(z) * shifted
        };
        p.integrate(h, contour)
    }

    /// Coefficients of `C(ζ²)` in the characterization solve.
    pub fn characterization_coeffs(&self, xi: Zeta) -> Result<DVector<C64>> {
        let p = &self.params;
        let contours = p.finite_contours();
        let mut rhs = DVector::zeros(contours.len());
        for (m, &g) in contours.iter().enumerate() {
            let sing = p.try_integrate(
                |z| Ok(self.kappa.t(z) * self.omega_sing_stripped(z, xi)? * self.measure_plus.eval(z)),
                g,
            )?;
            rhs[m] = -sing - self.normalization_term(xi, g)?;
        }
        self.a_plus
            .clone()
            .lu()
            .solve(&rhs)
            .ok_or(Error::SingularPeriodMatrix(0.0))
    }

    /// Stripped `ω` from the characterization.
    pub fn omega_char_stripped(&self, z: C64, xi: Zeta) -> Result<C64> {
        let c = self.characterization_coeffs(xi)?;
        let cz: C64 = c.iter().rev().fold(C64::new(0.0, 0.0), |acc, &x| acc * z + x);
        Ok(self.omega_sing_stripped(z, xi)? + cz / self.t_kappa(z)?)
    }

    /// Stripped `ω`: closed form when available, otherwise characterization.
    pub fn omega_stripped(&self, z: C64, xi: Zeta) -> Result<C64> {
        if self.has_closed_form() {
            self.omega_closed_stripped(z, xi)
        } else {
            self.omega_char_stripped(z, xi)
        }
    }

    /// `ω(ζ, ξ)`.
    pub fn omega(&self, zeta: Zeta, xi: Zeta) -> Result<C64> {
        Ok(zeta.pow(self.alpha()) * self.omega_stripped(zeta.z2(), xi)?)
    }

    /// `ω(ζ, ξ)` from the characterization.
    pub fn omega_by_characterization(&self, zeta: Zeta, xi: Zeta) -> Result<C64> {
        Ok(zeta.pow(self.alpha()) * self.omega_char_stripped(zeta.z2(), xi)?)
    }

    /// Relative residuals of the normalization conditions
    /// `∫_{Γ_m} T(ζ,κ) ω Q⁻Q⁺φ dζ²/ζ² + (D̄ψ term) = 0`, `m = 0..n`.
    pub fn normalization_residuals(&self, xi: Zeta) -> Result<Vec<f64>> {
        let p = &self.params;
        let mut out = Vec::new();
        for g in p.finite_contours() {
            let first = p.try_integrate(
                |z| Ok(self.kappa.t(z) * self.omega_stripped(z, xi)? * self.measure_plus.eval(z)),
                g,
            )?;
            let second = self.normalization_term(xi, g)?;
            let scale = first.norm().max(second.norm()).max(1e-300);
            out.push((first + second).norm() / scale);
        }
        Ok(out)
    }

    /// Held-out residual of the claim that `ζ^{-α}T(ζ,κ)(ω - ω_sing)` is a
    /// polynomial in `ζ²` of degree at most `n`.
    pub fn singular_part_residual(&self, xi: Zeta) -> Result<f64> {
        let n = self.params.n();
        let nodes = n + 1;
        let radius = 3.0;
        let g = |z: C64| -> Result<C64> {
            Ok(self.kappa.t(z) * (self.omega_stripped(z, xi)? - self.omega_sing_stripped(z, xi)?))
        };
        let mut vals = Vec::with_capacity(nodes);
        for k in 0..nodes {
            vals.push(g(C64::from_polar(radius, 2.0 * PI * k as f64 / nodes as f64))?);
        }
        let coeffs: Vec<C64> = (0..nodes)
            .map(|j| {
                let s: C64 = vals
                    .iter()
                    .enumerate()
                    .map(|(k, v)| v * C64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / nodes as f64))
                    .sum();
                s / (nodes as f64 * radius.powi(j as i32))
            })
            .collect();
        let fit = Poly(coeffs);
        let mut worst: f64 = 0.0;
        for z in [C64::new(0.4, 0.1), C64::new(2.2, -1.7), C64::new(-1.1, 0.6)] {
            let v = g(z)?;
            worst = worst.max((v - fit.eval(z)).norm() / v.norm().max(fit.norm()));
        }
        Ok(worst)
    }

    /// Closed-form residues of `ω` with respect to `dζ²/ζ²` at
    /// `ζ² = q²ξ²` and `ζ² = q⁻²ξ²`, in that order:
    /// `1 - 4a(qξ)d(ξ)/(T(ξ)T(qξ))` and `-(1 - 4a(ξ)d(q⁻¹ξ)/(T(ξ)T(q⁻¹ξ)))`.
    pub fn singular_residues(&self, xi: Zeta) -> Result<(C64, C64)> {
        let w = xi.z2();
        let q2 = self.params.q_pow_f(2.0);
        let (a, d) = (&self.a_poly, &self.d_poly);
        let tw = self.t_kappa(w)?;
        let up = ONE - 4.0 * a.eval(q2 * w) * d.eval(w) / (tw * self.t_kappa(q2 * w)?);
        let down = -(ONE - 4.0 * a.eval(w) * d.eval(w / q2) / (tw * self.t_kappa(w / q2)?));
        Ok((up, down))
    }

    /// Residue of `ω dζ²/ζ²` at `ζ = q^s ξ` measured on a small circle.
    pub fn measured_residue(&self, xi: Zeta, s: f64, radius: f64) -> Result<C64> {
        let centre = xi.shifted(s, self.params.ln_q);
        let c2 = centre.z2();
        let nodes = 64;
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..nodes {
            let e = C64::from_polar(radius, 2.0 * PI * k as f64 / nodes as f64);
            // continue ln ζ from the centre so the twist factor stays on one branch
            let zeta = Zeta::from_ln(centre.ln + 0.5 * (ONE + e / c2).ln());
            let om = self.omega(zeta, xi)?;
            acc += om * e / zeta.z2();
        }
        Ok(acc / nodes as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn residues_match_closed_forms() {
        let m = OmegaModel::new(&fixtures::p0()).unwrap();
        let xi = Zeta::from_z2(c(0.5, 0.9));
        let (up, down) = m.singular_residues(xi).unwrap();
        let mu = m.measured_residue(xi, 1.0, 1e-3).unwrap();
        let md = m.measured_residue(xi, -1.0, 1e-3).unwrap();
        assert!((mu - up).norm() < 1e-9 * up.norm(), "{mu} {up}");
        assert!((md - down).norm() < 1e-9 * down.norm(), "{md} {down}");
    }

    #[test]
    fn rho_is_one_without_disorder() {
        let p = fixtures::p0().with_twists(c(0.4, 0.0), c(0.0, 0.0)).unwrap();
        let m = OmegaModel::new(&p).unwrap();
        assert!(!m.has_closed_form());
        for z in [c(0.3, 0.2), c(-1.5, 0.7), c(2.0, 0.0)] {
            assert!((m.rho(z).unwrap() - ONE).norm() < 1e-12);
        }
    }

    #[test]
    fn diagonal_is_regular() {
        let m = OmegaModel::new(&fixtures::p0()).unwrap();
        let xi = Zeta::from_z2(c(0.7, 0.4));
        // a pole would make successive differences grow tenfold; regular
        // behaviour makes them shrink tenfold
        let at = |eps: f64| m.omega(Zeta::from_z2(xi.z2() + c(eps, eps)), xi).unwrap();
        let d1 = (at(1e-4) - at(1e-5)).norm();
        let d2 = (at(1e-5) - at(1e-6)).norm();
        assert!(d2 < 0.2 * d1, "{d1} {d2}");
        assert!(d2 < 1e-2);
    }
}
