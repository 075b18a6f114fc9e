//! Standard parameter sets used by tests, the verification suites and the CLI.

use crate::model::{ModelParams, Site, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub const Q_STANDARD: C64 = C64::new(0.6, 0.25);

/// Two spin-1/2 sites, `τ = (1.1, 0.9)`, `κ = 0.4`, `α = 0.35`, sector 0.
pub fn p0() -> ModelParams {
    ModelParams::new(
        Q_STANDARD,
        vec![Site::spin_half(c(1.1, 0.0)), Site::spin_half(c(0.9, 0.0))],
        c(0.4, 0.0),
        c(0.35, 0.0),
    )
    .expect("fixture P0 is valid")
}

/// Spins `(1/2, 1/2, 1)`, `τ = (1.1, 0.9, 1.2)`, same `q`, `κ`, `α` as P0.
pub fn p1() -> ModelParams {
    ModelParams::new(
        Q_STANDARD,
        vec![
            Site::spin_half(c(1.1, 0.0)),
            Site::spin_half(c(0.9, 0.0)),
            Site::new(2, c(1.2, 0.0)),
        ],
        c(0.4, 0.0),
        c(0.35, 0.0),
    )
    .expect("fixture P1 is valid")
}

/// Inhomogeneities of the domain-wall fixtures D2 (first two) and D3.
pub fn dwbc_taus(n: usize) -> Vec<C64> {
    [c(1.1, 0.0), c(0.9, 0.0), c(1.3, 0.0)][..n].to_vec()
}

/// Classical-limit fixture C0.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalFixture {
    /// `τ_m²`.
    pub tau2: Vec<C64>,
    /// Limits `σ_m = lim ν s_m`, so `q^{s_m} → e^{iπσ_m}`.
    pub sigma: Vec<f64>,
    /// `k = lim κν`, so `q^κ → e^{iπk}`.
    pub k: C64,
    pub nu_ladder: Vec<f64>,
}

pub fn c0() -> ClassicalFixture {
    ClassicalFixture {
        tau2: vec![c(1.0, 0.0), c(0.0, 1.5)],
        sigma: vec![0.2, 0.2],
        k: c(0.4, 0.0),
        nu_ladder: vec![0.2, 0.1, 0.05],
    }
}

/// Looks up a fixture by name (`p0`, `p1`).
pub fn by_name(name: &str) -> Option<ModelParams> {
    match name.to_ascii_lowercase().as_str() {
        "p0" => Some(p0()),
        "p1" => Some(p1()),
        _ => None,
    }
}
