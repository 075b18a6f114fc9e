//! Determinant formula and Taylor-coefficient tables around `ζ² = 1`.

use crate::error::{Error, Result};
use crate::model::{format_complex, Zeta, C64, ONE, ZERO};
use crate::omega::OmegaModel;
use nalgebra::DMatrix;
use serde::Serialize;
use std::f64::consts::PI;

/// `∏_p 2ρ(ζ⁰_p) · det(ω(ζ⁺_i, ζ⁻_j))`.
pub fn z_detform(model: &OmegaModel, zeros: &[Zeta], plus: &[Zeta], minus: &[Zeta]) -> Result<C64> {
    if plus.len() != minus.len() {
        return Err(Error::InvalidInput(format!(
            "{} plus points but {} minus points",
            plus.len(),
            minus.len()
        )));
    }
    let mut prefactor = ONE;
    for z in zeros {
        prefactor *= 2.0 * model.rho(z.z2())?;
    }
    let k = plus.len();
    if k == 0 {
        return Ok(prefactor);
    }
    let mut m = DMatrix::from_element(k, k, ZERO);
    for (i, zp) in plus.iter().enumerate() {
        for (j, zm) in minus.iter().enumerate() {
            m[(i, j)] = model.omega(*zp, *zm)?;
        }
    }
    Ok(prefactor * m.determinant())
}

/// Values of the functional on the basis descendants, as Taylor coefficients.
/// Serializes complex entries as `"re+imi"` strings.
#[derive(Clone, Debug, Serialize)]
pub struct BasisTable {
    pub pmax: usize,
    pub radius: f64,
    /// `t_star[p-1]`: coefficient of `(ζ²-1)^{p-1}` in `2ρ(ζ)`.
    #[serde(serialize_with = "ser_vec")]
    pub t_star: Vec<C64>,
    /// `bc[i-1][j-1]`: coefficient of `(ζ²-1)^{i-1}(ξ²-1)^{j-1}` in
    /// `ζ^{-α-2} ξ^{α+2} ω(ζ, ξ)`.
    #[serde(serialize_with = "ser_mat")]
    pub bc: Vec<Vec<C64>>,
    /// Largest change of any coefficient when the radius is halved.
    pub drift: f64,
}

fn ser_vec<S: serde::Serializer>(v: &[C64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for z in v {
        seq.serialize_element(&format_complex(*z))?;
    }
    seq.end()
}

fn ser_mat<S: serde::Serializer>(v: &[Vec<C64>], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for row in v {
        let texts: Vec<String> = row.iter().map(|z| format_complex(*z)).collect();
        seq.serialize_element(&texts)?;
    }
    seq.end()
}

/// Ratio of the `ξ²` circle radius to the `ζ²` circle radius.
const INNER_RATIO: f64 = 0.6;

/// Distance from `ζ² = 1` to the nearest singularity seen by the table, in
/// units where the extraction circles must stay strictly inside.
fn singularity_margin(model: &OmegaModel, radius: f64) -> f64 {
    let mut dist = f64::INFINITY;
    for root in model.kappa.t_poly.roots() {
        dist = dist.min((root - ONE).norm() - radius);
    }
    for s in [2.0, -2.0] {
        let qs = model.params.q_pow_f(s);
        // |z - q^s w| on |z-1| = r, |w-1| = 0.6 r
        dist = dist.min((ONE - qs).norm() - radius - qs.norm() * INNER_RATIO * radius);
    }
    dist
}

fn nodes(pmax: usize) -> usize {
    (4 * pmax).max(32)
}

fn table_at(model: &OmegaModel, pmax: usize, radius: f64) -> Result<(Vec<C64>, Vec<Vec<C64>>)> {
    let margin = singularity_margin(model, radius);
    if margin < 0.5 * radius {
        return Err(Error::RadiusTooLarge {
            radius,
            distance: margin + radius,
        });
    }
    let k = nodes(pmax);
    let circle = |r: f64| -> Vec<C64> {
        (0..k)
            .map(|i| ONE + C64::from_polar(r, 2.0 * PI * i as f64 / k as f64))
            .collect()
    };
    let zs = circle(radius);
    let ws = circle(INNER_RATIO * radius);
    let twiddle = |m: usize, i: usize| C64::from_polar(1.0, -2.0 * PI * (m * i) as f64 / k as f64);

    let mut rho_vals = Vec::with_capacity(k);
    for &z in &zs {
        rho_vals.push(2.0 * model.rho(z)?);
    }
    let t_star = (0..pmax)
        .map(|m| {
            let s: C64 = rho_vals.iter().enumerate().map(|(i, v)| v * twiddle(m, i)).sum();
            s / (k as f64 * radius.powi(m as i32))
        })
        .collect();

    let alpha = model.alpha();
    let mut grid = DMatrix::from_element(k, k, ZERO);
    for (b, &w) in ws.iter().enumerate() {
        let xi = Zeta::from_z2(w);
        let xi_factor = xi.pow(alpha);
        for (a, &z) in zs.iter().enumerate() {
            grid[(a, b)] = w / z * xi_factor * model.omega_stripped(z, xi)?;
        }
    }
    let rw = INNER_RATIO * radius;
    let bc = (0..pmax)
        .map(|i| {
            (0..pmax)
                .map(|j| {
                    let mut s = ZERO;
                    for a in 0..k {
                        for b in 0..k {
                            s += grid[(a, b)] * twiddle(i, a) * twiddle(j, b);
                        }
                    }
                    s / ((k * k) as f64 * radius.powi(i as i32) * rw.powi(j as i32))
                })
                .collect()
        })
        .collect();
    Ok((t_star, bc))
}

/// Taylor coefficients by sampling on circles about `ζ² = ξ² = 1` and
/// discrete Fourier inversion. `ζ²` runs on radius `radius`, `ξ²` on
/// `0.6 · radius`.
pub fn basis_table(model: &OmegaModel, pmax: usize, radius: f64) -> Result<BasisTable> {
    if pmax == 0 {
        return Err(Error::InvalidInput("pmax must be positive".into()));
    }
    if radius.is_nan() || radius <= 0.0 {
        return Err(Error::InvalidInput("radius must be positive".into()));
    }
    let (t_star, bc) = table_at(model, pmax, radius)?;
    let (t_half, bc_half) = table_at(model, pmax, 0.5 * radius)?;
    let mut drift: f64 = 0.0;
    for (a, b) in t_star.iter().zip(&t_half) {
        drift = drift.max((a - b).norm() / (1.0 + a.norm()));
    }
    for (ra, rb) in bc.iter().zip(&bc_half) {
        for (a, b) in ra.iter().zip(rb) {
            drift = drift.max((a - b).norm() / (1.0 + a.norm()));
        }
    }
    Ok(BasisTable {
        pmax,
        radius,
        t_star,
        bc,
        drift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn detform_special_cases() {
        let m = OmegaModel::new(&fixtures::p0()).unwrap();
        assert_eq!(z_detform(&m, &[], &[], &[]).unwrap(), ONE);
        let zp = Zeta::from_z2(c(0.4, 0.7));
        let zm = Zeta::from_z2(c(1.3, -0.2));
        let one = z_detform(&m, &[], &[zp], &[zm]).unwrap();
        assert!((one - m.omega(zp, zm).unwrap()).norm() < 1e-15);
        let z0 = z_detform(&m, &[zp], &[], &[]).unwrap();
        assert!((z0 - 2.0 * m.rho(zp.z2()).unwrap()).norm() < 1e-15);
        assert!(z_detform(&m, &[], &[zp], &[]).is_err());
    }

    #[test]
    fn table_resums_to_direct_values() {
        let m = OmegaModel::new(&fixtures::p0()).unwrap();
        let small = basis_table(&m, 4, 0.1).unwrap();
        assert!(small.drift < 1e-7, "{}", small.drift);
        // high orders lose digits as r^-p at the halved radius, so only
        // the resummation is checked here
        let t = basis_table(&m, 12, 0.1).unwrap();
        assert!((t.t_star[0] - 2.0 * m.rho(ONE).unwrap()).norm() < 1e-12);
        let (dz, dw) = (c(0.02, 0.01), c(-0.005, -0.015));
        let mut series = ZERO;
        for (i, row) in t.bc.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                series += v * dz.powi(i as i32) * dw.powi(j as i32);
            }
        }
        let xi = Zeta::from_z2(ONE + dw);
        let direct = (ONE + dw) / (ONE + dz) * xi.pow(m.alpha()) * m.omega_stripped(ONE + dz, xi).unwrap();
        assert!((series - direct).norm() < 1e-9 * direct.norm(), "{series} {direct}");
        let rho_series: C64 = t.t_star.iter().enumerate().map(|(p, v)| v * dz.powi(p as i32)).sum();
        assert!((rho_series - 2.0 * m.rho(ONE + dz).unwrap()).norm() < 1e-11);
    }

    #[test]
    fn oversized_radius_rejected() {
        let m = OmegaModel::new(&fixtures::p0()).unwrap();
        assert!(matches!(basis_table(&m, 2, 0.9), Err(Error::RadiusTooLarge { .. })));
    }
}
