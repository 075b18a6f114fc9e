//! Browser bindings for parameter exploration. Complex results come back as
//! flat `[re, im, re, im, …]` arrays with `NaN` where a point hits a pole.
//!
//! The sites are those of fixture P0; `q`, `κ` and `α` are free.

use matsubara::dwbc::DwbcInstance;
use matsubara::verify::random_xis;
use matsubara::{fixtures, OmegaModel, Zeta, C64};
use wasm_bindgen::prelude::*;

const NAN: C64 = C64::new(f64::NAN, f64::NAN);

fn flatten(values: impl IntoIterator<Item = C64>) -> Vec<f64> {
    values.into_iter().flat_map(|z| [z.re, z.im]).collect()
}

fn demo_model(q_re: f64, q_im: f64, kappa: f64, alpha: f64) -> Result<OmegaModel, String> {
    let base = fixtures::p0();
    let p = matsubara::ModelParams::new(C64::new(q_re, q_im), base.sites, C64::new(kappa, 0.0), C64::new(alpha, 0.0))
        .map_err(|e| e.to_string())?;
    OmegaModel::new(&p).map_err(|e| e.to_string())
}

/// `ω(ζ, ξ)` for fixed `ξ²` on a `steps × steps` grid of `ζ²`, row by row
/// from `im_min`.
#[allow(clippy::too_many_arguments)]
pub fn omega_values(
    model: &OmegaModel,
    xi2: C64,
    re_min: f64,
    re_max: f64,
    im_min: f64,
    im_max: f64,
    steps: usize,
) -> Vec<f64> {
    let xi = Zeta::from_z2(xi2);
    let t = |k: usize| if steps < 2 { 0.0 } else { k as f64 / (steps - 1) as f64 };
    let mut out = Vec::with_capacity(steps * steps);
    for i in 0..steps {
        for r in 0..steps {
            let z2 = C64::new(re_min + (re_max - re_min) * t(r), im_min + (im_max - im_min) * t(i));
            out.push(model.omega(Zeta::from_z2(z2), xi).unwrap_or(NAN));
        }
    }
    flatten(out)
}

/// `ρ` at `points` equally spaced angles on `|ζ²| = radius`.
pub fn rho_values(model: &OmegaModel, radius: f64, points: usize) -> Vec<f64> {
    flatten((0..points).map(|k| {
        let z2 = C64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / points as f64);
        model.rho(z2).unwrap_or(NAN)
    }))
}

/// `M_n` and `D_n / M_n` for `samples` seeded spectral-parameter sets, as
/// `[M re, M im, ratio re, ratio im]` per set.
pub fn dwbc_values(n: usize, samples: usize) -> Result<Vec<f64>, String> {
    if !(1..=3).contains(&n) {
        return Err(format!("n must be 1, 2 or 3, got {n}"));
    }
    let taus = fixtures::dwbc_taus(n);
    let mut out = Vec::with_capacity(4 * samples);
    for seed in 0..samples as u64 {
        let inst = DwbcInstance::new(fixtures::Q_STANDARD.ln(), &taus, &random_xis(n, seed)).map_err(|e| e.to_string())?;
        let m = inst.partition().map_err(|e| e.to_string())?;
        let d = inst.determinant_form().map_err(|e| e.to_string())?;
        out.extend(flatten([m, d / m]));
    }
    Ok(out)
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn omega_grid(
    q_re: f64,
    q_im: f64,
    kappa: f64,
    alpha: f64,
    xi2_re: f64,
    xi2_im: f64,
    re_min: f64,
    re_max: f64,
    im_min: f64,
    im_max: f64,
    steps: usize,
) -> Result<Vec<f64>, JsError> {
    let model = demo_model(q_re, q_im, kappa, alpha).map_err(|e| JsError::new(&e))?;
    Ok(omega_values(&model, C64::new(xi2_re, xi2_im), re_min, re_max, im_min, im_max, steps))
}

#[wasm_bindgen]
pub fn rho_curve(q_re: f64, q_im: f64, kappa: f64, alpha: f64, radius: f64, points: usize) -> Result<Vec<f64>, JsError> {
    let model = demo_model(q_re, q_im, kappa, alpha).map_err(|e| JsError::new(&e))?;
    Ok(rho_values(&model, radius, points))
}

#[wasm_bindgen]
pub fn dwbc(n: usize, samples: usize) -> Result<Vec<f64>, JsError> {
    dwbc_values(n, samples).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_layout() {
        let m = demo_model(0.6, 0.25, 0.4, 0.35).unwrap();
        let v = omega_values(&m, C64::new(-1.0, 0.5), 0.3, 1.8, -0.8, 0.8, 4);
        assert_eq!(v.len(), 2 * 16);
        let direct = m.omega(Zeta::from_z2(C64::new(0.3, -0.8)), Zeta::from_z2(C64::new(-1.0, 0.5))).unwrap();
        assert_eq!((v[0], v[1]), (direct.re, direct.im));
    }

    #[test]
    fn rho_without_disorder_is_flat() {
        let m = demo_model(0.6, 0.25, 0.4, 0.0).unwrap();
        for pair in rho_values(&m, 1.3, 8).chunks(2) {
            assert!((pair[0] - 1.0).abs() < 1e-12 && pair[1].abs() < 1e-12);
        }
    }

    #[test]
    fn dwbc_ratio_is_constant() {
        let v = dwbc_values(3, 4).unwrap();
        let ratios: Vec<C64> = v.chunks(4).map(|c| C64::new(c[2], c[3])).collect();
        for r in &ratios[1..] {
            assert!((r - ratios[0]).norm() < 1e-9 * ratios[0].norm());
        }
        assert!(dwbc_values(4, 1).is_err());
    }

    #[test]
    fn bad_parameters_report_errors() {
        assert!(demo_model(0.0, 0.0, 0.4, 0.35).is_err());
    }
}
