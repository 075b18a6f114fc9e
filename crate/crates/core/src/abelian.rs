//! Deformed Abelian integrals: the period matrices `A±`, `B±`, the kernel
//! `r±` with its expansion polynomials `p±_m`, and q-exact forms.
//!
//! All integrals are `∮ f(ζ) Q∓ Q± φ(ζ) dζ²/ζ²` with the bare factor `2πi`.
//! The twists of `f` and of the measure cancel, so every integrand reduces
//! to a rational function of `z = ζ²`:
//!
//! * `ζ^{α+2j} Q⁻(ζ,κ+α) Q⁺(ζ,κ) = z^j M⁺(z)` with `M⁺ = P⁻_{κ+α} P⁺_κ`,
//! * `ζ^{-α+2j} Q⁺(ζ,κ+α) Q⁻(ζ,κ) = z^j M⁻(z)` with `M⁻ = P⁺_{κ+α} P⁻_κ`.

use crate::error::{Error, Result};
use crate::model::{mode_gap, Contour, ModelParams, TwistedLaurent, C64, ONE, ZERO};
use crate::poly::{Poly, Poly2};
use crate::spectral::SpectralData;
use nalgebra::DMatrix;

/// Stripped measures `(M⁺, M⁻)` built from the data at `κ` and `κ+α`.
pub fn stripped_measures(kappa: &SpectralData, kappa_alpha: &SpectralData) -> (Poly, Poly) {
    (
        &kappa_alpha.minus * &kappa.plus,
        &kappa_alpha.plus * &kappa.minus,
    )
}

/// Divides the `z^k` mode by `q^{twist+2k} - q^{-twist-2k}`.
fn delta_inverse_z(params: &ModelParams, p: &Poly2, twist: C64) -> Result<Poly2> {
    for k in 0..=p.deg_z() {
        let g = mode_gap(twist + 2.0 * k as f64, params.ln_q);
        if g.norm() < 1e-12 {
            return Err(Error::DegenerateTwist {
                twist,
                mode: k as i64,
            });
        }
    }
    Ok(p.map_z_modes(|k| mode_gap(twist + 2.0 * k as f64, params.ln_q)))
}

/// The kernel `ζ^{-twist} ξ^{twist} r(ζ, ξ)` as a polynomial in `(ζ², ξ²)`.
///
/// With `DD_f(u, w) = (f(u) - f(w))/(u - w)` and `h_f = ½(u + w) DD_f`:
///
/// ```text
/// r = T_κ Δ⁻¹[h_{T_κ}] + T_{κ+α} Δ⁻¹[h_{T_{κ+α}}]
///   - T_κ Δ⁻¹[q^α h_{T_{κ+α}}(q²z, w)] - T_{κ+α} Δ⁻¹[q^{-α} h_{T_κ}(q⁻²z, w)]
///   + d(z) q^α h_a(q²z, w) - a(z) q^{-α} h_d(q⁻²z, w)
/// ```
///
/// where `α` is `twist` (`+α` gives `r⁺`, `-α` gives `r⁻`) and `Δ⁻¹` acts on
/// `ζ^{twist} z^k` in the first variable.
pub fn r_kernel(params: &ModelParams, t_k: &Poly, t_ka: &Poly, twist: C64) -> Result<Poly2> {
    let q2 = params.q_pow_f(2.0);
    let qa = params.q_pow(twist);
    let a = params.a_poly();
    let d = params.d_poly();
    let h = |p: &Poly, s: C64| p.divided_difference().times_half_sum(s);

    let t1 = delta_inverse_z(params, &h(t_k, ONE), twist)?.times_z_poly(t_k);
    let t2 = delta_inverse_z(params, &h(t_ka, ONE), twist)?.times_z_poly(t_ka);
    let t3 = delta_inverse_z(params, &h(t_ka, qa).rescale_z(q2), twist)?.times_z_poly(t_k);
    let t4 = delta_inverse_z(params, &h(t_k, ONE / qa).rescale_z(ONE / q2), twist)?.times_z_poly(t_ka);
    let t5 = h(&a, qa).rescale_z(q2).times_z_poly(&d);
    let t6 = h(&d, ONE / qa).rescale_z(ONE / q2).times_z_poly(&a);

    let mut r = t1;
    r.add_scaled(&t2, ONE);
    r.add_scaled(&t3, -ONE);
    r.add_scaled(&t4, -ONE);
    r.add_scaled(&t5, ONE);
    r.add_scaled(&t6, -ONE);
    Ok(r)
}

/// `A±`, `B±` and the data they are built from.
#[derive(Clone, Debug)]
pub struct PeriodData {
    pub a_plus: DMatrix<C64>,
    pub a_minus: DMatrix<C64>,
    pub b_plus: DMatrix<C64>,
    pub b_minus: DMatrix<C64>,
    pub measure_plus: Poly,
    pub measure_minus: Poly,
    pub r_plus: Poly2,
    pub r_minus: Poly2,
}

/// `[∫_{Γ_i} f_j(z) M(z)]_{i,j}` over `Γ_0..Γ_n`.
pub fn period_matrix<F: Fn(usize, C64) -> C64>(
    params: &ModelParams,
    measure: &Poly,
    cols: usize,
    f: F,
) -> Result<DMatrix<C64>> {
    let contours = params.finite_contours();
    let mut out = DMatrix::zeros(contours.len(), cols);
    for (i, &g) in contours.iter().enumerate() {
        for j in 0..cols {
            out[(i, j)] = params.integrate(|z| f(j, z) * measure.eval(z), g)?;
        }
    }
    Ok(out)
}

/// Monomial periods `A_{ij} = ∫_{Γ_i} z^j M(z)`.
pub fn monomial_periods(params: &ModelParams, measure: &Poly) -> Result<DMatrix<C64>> {
    period_matrix(params, measure, params.n() + 1, |j, z| z.powi(j as i32))
}

impl PeriodData {
    pub fn compute(params: &ModelParams, kappa: &SpectralData, kappa_alpha: &SpectralData) -> Result<Self> {
        let (mp, mm) = stripped_measures(kappa, kappa_alpha);
        let r_plus = r_kernel(params, &kappa.t_poly, &kappa_alpha.t_poly, params.alpha)?;
        let r_minus = r_kernel(params, &kappa.t_poly, &kappa_alpha.t_poly, -params.alpha)?;
        let n = params.n();
        let cols = n + 1;
        let p_plus: Vec<Poly> = (0..cols).map(|m| r_plus.w_coefficient(m)).collect();
        let p_minus: Vec<Poly> = (0..cols).map(|m| r_minus.w_coefficient(m)).collect();
        Ok(PeriodData {
            a_plus: monomial_periods(params, &mp)?,
            a_minus: monomial_periods(params, &mm)?,
            b_plus: period_matrix(params, &mp, cols, |j, z| p_plus[j].eval(z))?,
            b_minus: period_matrix(params, &mm, cols, |j, z| p_minus[j].eval(z))?,
            measure_plus: mp,
            measure_minus: mm,
            r_plus,
            r_minus,
        })
    }

    /// `‖B⁺(A⁻)ᵗ - A⁺(B⁻)ᵗ‖ / (‖A⁺‖ ‖B⁻‖)`.
    pub fn bilinear_residual(&self) -> f64 {
        let lhs = &self.b_plus * self.a_minus.transpose();
        let rhs = &self.a_plus * self.b_minus.transpose();
        (lhs - rhs).norm() / (self.a_plus.norm() * self.b_minus.norm())
    }

    /// `(A⁺)⁻¹ B⁺`.
    pub fn x_matrix(&self) -> Result<DMatrix<C64>> {
        check_conditioning(&self.a_plus)?;
        self.a_plus
            .clone()
            .lu()
            .solve(&self.b_plus)
            .ok_or(Error::SingularPeriodMatrix(0.0))
    }
}

/// Rejects matrices whose reciprocal condition number is below `1e-13`.
pub fn check_conditioning(m: &DMatrix<C64>) -> Result<()> {
    let sv = m.singular_values();
    let rcond = sv.min() / sv.max();
    if rcond.is_nan() || rcond <= 1e-13 {
        return Err(Error::SingularPeriodMatrix(rcond));
    }
    Ok(())
}

fn twisted(p: &Poly) -> TwistedLaurent {
    TwistedLaurent::from_poly(ZERO, p)
}

/// The six terms of the q-exact form `E(f)` for `f` of twist `±α`:
///
/// ```text
/// E(f) = T_κ Δ⁻¹(f T_κ) + T_{κ+α} Δ⁻¹(f T_{κ+α})
///      - T_κ Δ⁻¹((f T_{κ+α})(qζ)) - T_{κ+α} Δ⁻¹((f T_κ)(q⁻¹ζ))
///      + a(qζ) d(ζ) f(qζ) - d(q⁻¹ζ) a(ζ) f(q⁻¹ζ)
/// ```
pub fn exact_form_terms(params: &ModelParams, t_k: &Poly, t_ka: &Poly, f: &TwistedLaurent) -> Result<Vec<TwistedLaurent>> {
    let lq = params.ln_q;
    let tk = twisted(t_k);
    let tka = twisted(t_ka);
    let a = twisted(&params.a_poly());
    let d = twisted(&params.d_poly());
    Ok(vec![
        tk.mul(&f.mul(&tk).delta_inverse(lq)?),
        tka.mul(&f.mul(&tka).delta_inverse(lq)?),
        tk.mul(&f.mul(&tka).shift(1.0, lq).delta_inverse(lq)?).scale(-ONE),
        tka.mul(&f.mul(&tk).shift(-1.0, lq).delta_inverse(lq)?).scale(-ONE),
        a.shift(1.0, lq).mul(&d).mul(&f.shift(1.0, lq)),
        d.shift(-1.0, lq).mul(&a).mul(&f.shift(-1.0, lq)).scale(-ONE),
    ])
}

/// The q-exact form `E(f)`; its deformed integrals vanish on every contour.
pub fn exact_form(params: &ModelParams, t_k: &Poly, t_ka: &Poly, f: &TwistedLaurent) -> Result<TwistedLaurent> {
    let mut out = TwistedLaurent::zero(f.twist);
    for t in &exact_form_terms(params, t_k, t_ka, f)? {
        out = out.try_add(t)?;
    }
    Ok(out)
}

/// `∫_Γ E(f) Q∓Q± φ dζ²/ζ²` for `f` of twist `sign·α`, together with the
/// largest magnitude among the integrals of the six terms, for relative
/// comparisons.
pub fn exact_form_integral(
    params: &ModelParams,
    kappa: &SpectralData,
    kappa_alpha: &SpectralData,
    f: &TwistedLaurent,
    sign: i32,
    contour: Contour,
) -> Result<(C64, f64)> {
    let (mp, mm) = stripped_measures(kappa, kappa_alpha);
    let measure = if sign >= 0 { mp } else { mm };
    let mut value = ZERO;
    let mut scale: f64 = 0.0;
    for term in exact_form_terms(params, &kappa.t_poly, &kappa_alpha.t_poly, f)? {
        let stripped = term
            .to_poly()
            .ok_or_else(|| Error::InvalidInput("exact form has negative powers".into()))?;
        let v = params.integrate(|z| stripped.eval(z) * measure.eval(z), contour)?;
        scale = scale.max(v.norm());
        value += v;
    }
    Ok((value, scale))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::Zeta;

    fn data() -> (ModelParams, SpectralData, SpectralData) {
        let p = fixtures::p0();
        let k = SpectralData::compute(&p, p.kappa).unwrap();
        let ka = SpectralData::compute(&p, p.kappa + p.alpha).unwrap();
        (p, k, ka)
    }

    #[test]
    fn r_plus_has_degree_n_in_w_and_no_diagonal_pole() {
        let (p, k, ka) = data();
        let r = r_kernel(&p, &k.t_poly, &ka.t_poly, p.alpha).unwrap();
        assert!(r.deg_w() <= p.n());
        let z = C64::new(0.8, 0.3);
        let near = r.eval(z, z + C64::new(1e-9, 0.0));
        assert!((near - r.eval(z, z)).norm() < 1e-6 * (1.0 + near.norm()));
    }

    #[test]
    fn origin_row_is_a_unit_vector() {
        let (p, k, ka) = data();
        let pd = PeriodData::compute(&p, &k, &ka).unwrap();
        for j in 1..=p.n() {
            assert_eq!(pd.a_plus[(0, j)], ZERO);
        }
        assert!(pd.bilinear_residual() < 1e-8);
        assert_eq!(pd.a_plus.shape(), (3, 3));
    }

    #[test]
    fn exact_form_is_linear_and_zero_on_zero() {
        let (p, k, ka) = data();
        let zero = TwistedLaurent::zero(p.alpha);
        let e0 = exact_form(&p, &k.t_poly, &ka.t_poly, &zero).unwrap();
        assert!(e0.coeffs.iter().all(|c| c.norm() == 0.0));
        let f = TwistedLaurent::monomial(p.alpha, 1);
        let g = TwistedLaurent::new(p.alpha, 0, vec![C64::new(0.3, 1.0), C64::new(-2.0, 0.5)]);
        let ef = exact_form(&p, &k.t_poly, &ka.t_poly, &f).unwrap();
        let eg = exact_form(&p, &k.t_poly, &ka.t_poly, &g).unwrap();
        let efg = exact_form(&p, &k.t_poly, &ka.t_poly, &f.try_add(&g).unwrap()).unwrap();
        let zeta = Zeta::from_z2(C64::new(0.4, -1.3));
        let lhs = efg.eval(zeta);
        assert!((lhs - ef.eval(zeta) - eg.eval(zeta)).norm() < 1e-12 * lhs.norm());
    }

    #[test]
    fn resonant_twist_is_rejected() {
        let (p, k, ka) = data();
        assert!(matches!(
            r_kernel(&p, &k.t_poly, &ka.t_poly, ZERO),
            Err(Error::DegenerateTwist { mode: 0, .. })
        ));
    }
}
