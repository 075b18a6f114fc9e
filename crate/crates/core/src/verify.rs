//! Verification suites: each check records the identity it tests, the
//! measured residual and the tolerance it is held to.

use crate::abelian::{exact_form_integral, PeriodData};
use crate::classical::{quantum_classical_gap, CanonicalRho, classical_curve, RHO_SAMPLES};
use crate::dwbc::{recurrence_factor, DwbcInstance};
use crate::error::{Error, Result};
use crate::expectation::z_detform;
use crate::fixtures::{self, ClassicalFixture};
use crate::model::{two_pi_i, ModelParams, TwistedLaurent, Zeta, C64, ONE, ZERO};
use crate::omega::OmegaModel;
use crate::oracle::{QuasiLocalOp, SpaceOracle};
use crate::spectral::SpectralData;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    All,
    Wronskian,
    Baxter,
    Bilinear,
    ExactForm,
    Omega,
    Oracle,
    Dwbc,
    Classical,
}

impl Suite {
    pub const PARTS: [Suite; 8] = [
        Suite::Baxter,
        Suite::Wronskian,
        Suite::Bilinear,
        Suite::ExactForm,
        Suite::Omega,
        Suite::Oracle,
        Suite::Dwbc,
        Suite::Classical,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Wronskian => "wronskian",
            Suite::Baxter => "baxter",
            Suite::Bilinear => "bilinear",
            Suite::ExactForm => "exactform",
            Suite::Omega => "omega",
            Suite::Oracle => "oracle",
            Suite::Dwbc => "dwbc",
            Suite::Classical => "classical",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        std::iter::once(Suite::All)
            .chain(Suite::PARTS)
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown suite '{s}'")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub equation: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub checks: Vec<Check>,
}

impl Report {
    fn new(suite: Suite) -> Self {
        Report {
            suite: suite.name().to_string(),
            checks: Vec::new(),
        }
    }

    fn push(&mut self, name: impl Into<String>, equation: &str, residual: f64, tolerance: f64) {
        self.checks.push(Check {
            name: name.into(),
            equation: equation.to_string(),
            residual,
            tolerance,
            // NaN never passes
            pass: residual <= tolerance,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// Parameter sets used when none are supplied.
pub fn default_models() -> Vec<(String, ModelParams)> {
    vec![("P0".into(), fixtures::p0()), ("P1".into(), fixtures::p1())]
}

/// Runs a suite. Spectral suites use `models`; the domain-wall and classical
/// suites use their own fixtures.
pub fn run(suite: Suite, models: &[(String, ModelParams)]) -> Result<Report> {
    let mut report = Report::new(suite);
    let parts: Vec<Suite> = if suite == Suite::All {
        Suite::PARTS.to_vec()
    } else {
        vec![suite]
    };
    for part in parts {
        match part {
            Suite::Dwbc => dwbc_checks(&mut report)?,
            Suite::Classical => classical_checks(&mut report, &fixtures::c0())?,
            _ => {
                for (label, params) in models {
                    model_checks(&mut report, part, label, params)?;
                }
            }
        }
    }
    Ok(report)
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

/// Points for two-point checks, away from the fixtures' singular sets.
pub const ZETA2_GRID: [C64; 5] = [
    C64::new(0.45, 0.3),
    C64::new(-0.8, 0.5),
    C64::new(1.7, -0.4),
    C64::new(0.2, -1.1),
    C64::new(-1.3, -0.9),
];
pub const XI2_GRID: [C64; 5] = [
    C64::new(0.6, -0.2),
    C64::new(-0.4, 1.2),
    C64::new(1.1, 0.7),
    C64::new(-1.6, -0.3),
    C64::new(0.9, -1.4),
];

/// Ten points for `W d φ = 1`.
pub fn sample_points() -> Vec<C64> {
    (0..10)
        .map(|k| C64::from_polar(0.4 + 0.25 * k as f64, 0.7 + 2.1 * k as f64))
        .collect()
}

fn model_checks(report: &mut Report, part: Suite, label: &str, p: &ModelParams) -> Result<()> {
    match part {
        Suite::Baxter => {
            for (tw, lambda) in [("κ", p.kappa), ("κ+α", p.kappa + p.alpha)] {
                let s = SpectralData::compute(p, lambda)?;
                let (plus, minus) = s.baxter_residuals(p);
                report.push(format!("{label} Q+ at {tw}"), "T Q = a Q(q·) + d Q(q⁻¹·)", plus, 1e-10);
                report.push(format!("{label} Q- at {tw}"), "T Q = a Q(q·) + d Q(q⁻¹·)", minus, 1e-10);
                report.push(
                    format!("{label} T at {tw} held-out node"),
                    "deg T = n interpolation",
                    s.heldout_residual,
                    1e-9,
                );
            }
        }
        Suite::Wronskian => {
            for (tw, lambda) in [("κ", p.kappa), ("κ+α", p.kappa + p.alpha)] {
                let s = SpectralData::compute(p, lambda)?;
                report.push(
                    format!("{label} Wronskian at {tw}"),
                    "q^-γ Q+(ζ)Q-(qζ) - q^γ Q-(ζ)Q+(qζ) = W/(q^γ - q^-γ)",
                    s.wronskian_residual(p)?,
                    1e-10,
                );
            }
            let (w, d) = (p.w_poly(), p.d_poly());
            let worst = sample_points()
                .into_iter()
                .map(|z| (w.eval(z) * d.eval(z) * p.phi(z) - ONE).norm())
                .fold(0.0, f64::max);
            report.push(format!("{label} W d φ at 10 points"), "W d φ = 1", worst, 1e-12);
        }
        Suite::Bilinear => {
            let k = SpectralData::compute(p, p.kappa)?;
            let ka = SpectralData::compute(p, p.kappa + p.alpha)?;
            let pd = PeriodData::compute(p, &k, &ka)?;
            report.push(
                format!("{label} bilinear relation"),
                "B+ (A-)ᵗ = A+ (B-)ᵗ",
                pd.bilinear_residual(),
                1e-8,
            );
        }
        Suite::ExactForm => {
            let k = SpectralData::compute(p, p.kappa)?;
            let ka = SpectralData::compute(p, p.kappa + p.alpha)?;
            let mut worst: f64 = 0.0;
            for sign in [1, -1] {
                for power in 0..=p.n() as i64 {
                    let f = TwistedLaurent::monomial(sign as f64 * p.alpha, power);
                    for g in p.finite_contours() {
                        let (v, scale) = exact_form_integral(p, &k, &ka, &f, sign, g)?;
                        // every term vanishes identically on Γ_0 for k ≥ 1
                        if v != ZERO {
                            worst = worst.max(v.norm() / scale);
                        }
                    }
                }
            }
            report.push(
                format!("{label} exact forms ζ^(±α) ζ^(2k), k = 0..n, all contours"),
                "∫ E(f) Q∓Q± φ = 0",
                worst,
                1e-9,
            );
        }
        Suite::Omega => omega_checks(report, label, p)?,
        Suite::Oracle => oracle_checks(report, label, p)?,
        Suite::All | Suite::Dwbc | Suite::Classical => unreachable!("dispatched in run"),
    }
    Ok(())
}

fn omega_checks(report: &mut Report, label: &str, p: &ModelParams) -> Result<()> {
    let m = OmegaModel::new(p)?;
    let xi = Zeta::from_z2(XI2_GRID[0]);
    report.push(
        format!("{label} singular part polynomiality"),
        "T (ω - ω_sing) ζ^-α is a polynomial of degree n in ζ²",
        m.singular_part_residual(xi)?,
        1e-8,
    );
    let norm = m.normalization_residuals(xi)?.into_iter().fold(0.0, f64::max);
    report.push(format!("{label} normalization m = 0..n"), "∫_Γm T ω Q-Q+ φ + D̄ψ term = 0", norm, 1e-8);

    let flipped = OmegaModel::new(&p.with_twists(-p.kappa, -p.alpha)?)?;
    let mut sym: f64 = 0.0;
    let mut uniq: f64 = 0.0;
    for &z2 in &ZETA2_GRID {
        for &w2 in &XI2_GRID {
            let (zeta, xi) = (Zeta::from_z2(z2), Zeta::from_z2(w2));
            let direct = m.omega(zeta, xi)?;
            sym = sym.max(rel(flipped.omega(xi, zeta)?, direct));
            if m.has_closed_form() {
                uniq = uniq.max(rel(m.omega_by_characterization(zeta, xi)?, direct));
            }
        }
    }
    report.push(format!("{label} symmetry on 5x5 grid"), "ω(ξ,ζ|-κ,-α) = ω(ζ,ξ|κ,α)", sym, 1e-8);
    if m.has_closed_form() {
        report.push(
            format!("{label} closed form vs characterization on 5x5 grid"),
            "uniqueness of the characterization",
            uniq,
            1e-8,
        );
    }

    let (up, down) = m.singular_residues(xi)?;
    let radius = 1e-3 * xi.z2().norm();
    let res = rel(m.measured_residue(xi, 1.0, radius)?, up).max(rel(m.measured_residue(xi, -1.0, radius)?, down));
    report.push(format!("{label} residues at ζ² = q^±2 ξ²"), "ω residue closed forms", res, 1e-8);

    detform_checks(report, label, &m)
}

fn detform_checks(report: &mut Report, label: &str, m: &OmegaModel) -> Result<()> {
    let z = |i: usize| Zeta::from_z2(ZETA2_GRID[i]);
    let x = |i: usize| Zeta::from_z2(XI2_GRID[i]);
    let base = z_detform(m, &[], &[z(0), z(1)], &[x(0), x(1)])?;
    let swapped = z_detform(m, &[], &[z(1), z(0)], &[x(0), x(1)])?;
    report.push(
        format!("{label} detform antisymmetry"),
        "Z{ζ+ swap} = -Z",
        (base + swapped).norm() / base.norm().max(1e-300),
        1e-12,
    );
    let with_zero = z_detform(m, &[z(2)], &[z(0), z(1)], &[x(0), x(1)])?;
    let expected = 2.0 * m.rho(z(2).z2())? * base;
    report.push(format!("{label} detform t* factor"), "Z{t*(ζ0) X} = 2ρ(ζ0) Z{X}", rel(with_zero, expected), 1e-12);
    Ok(())
}

fn oracle_checks(report: &mut Report, label: &str, p: &ModelParams) -> Result<()> {
    let m = OmegaModel::new(p)?;
    let o = SpaceOracle::new(&m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let point = |rng: &mut ChaCha8Rng| {
        let r = 0.6 + 0.8 * rng.random::<f64>();
        let th = 2.0 * std::f64::consts::PI * rng.random::<f64>();
        Zeta::from_z2(C64::from_polar(r, th))
    };
    let mut ident: f64 = 0.0;
    let mut identity_norm: f64 = 0.0;
    let mut shift: f64 = 0.0;
    for trial in 0..20u64 {
        let sites = 1 + (trial % 3) as usize;
        let x = QuasiLocalOp::random_spin_zero(sites, trial);
        let xis: Vec<Zeta> = (0..sites).map(|_| point(&mut rng)).collect();
        let zeta = point(&mut rng);
        ident = ident.max(o.adjoint_identity_residual(&x, &xis, zeta)?);
        shift = shift.max(o.shift_residual(&x)?);
        identity_norm = identity_norm.max((o.z(&QuasiLocalOp::identity(sites), &xis)? - ONE).norm());
    }
    report.push(
        format!("{label} 20 random spin-0 operators, m ≤ 3"),
        "Z_(m+1){T_a (X ⊗ q^ασ³) T_a⁻¹} = ρ Z_m{X}",
        ident,
        1e-9,
    );
    report.push(format!("{label} identity normalization"), "Z{1} = 1", identity_norm, 1e-12);
    report.push(format!("{label} homogeneous shift"), "Z{q^ασ³ ⊗ X} = ρ(1) Z{X}", shift, 1e-9);

    let mut t_star: f64 = 0.0;
    for &z2 in &ZETA2_GRID {
        let zeta = Zeta::from_z2(z2);
        t_star = t_star.max(rel(o.half_t_star(zeta)?, m.rho(z2)?));
    }
    report.push(format!("{label} t* on the tail"), "½ Z{t*(ζ)} = ρ(ζ)", t_star, 1e-9);

    let untwisted = OmegaModel::new(&p.with_twists(p.kappa, ZERO)?)?;
    let mut flat: f64 = 0.0;
    for &z2 in &ZETA2_GRID {
        flat = flat.max((untwisted.rho(z2)? - ONE).norm());
    }
    report.push(format!("{label} ρ without disorder"), "α = 0 ⇒ ρ = 1", flat, 1e-12);
    Ok(())
}

/// Reproducible spectral parameters for the domain-wall checks.
pub fn random_xis(n: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let r = 0.5 + rng.random::<f64>();
            let th = 2.0 * std::f64::consts::PI * rng.random::<f64>();
            C64::from_polar(r, th)
        })
        .collect()
}

fn dwbc_checks(report: &mut Report) -> Result<()> {
    let ln_q = fixtures::Q_STANDARD.ln();
    for n in [2usize, 3] {
        let label = format!("D{n}");
        let taus = fixtures::dwbc_taus(n);
        let mut ratios = Vec::new();
        let mut ice: f64 = 0.0;
        let mut perm: f64 = 0.0;
        for seed in 0..10u64 {
            let xis = random_xis(n, seed);
            let inst = DwbcInstance::new(ln_q, &taus, &xis)?;
            let m = inst.partition()?;
            ice = ice.max(inst.ice_rule_violation()?);
            let mut rev = xis.clone();
            rev.reverse();
            perm = perm.max(rel(DwbcInstance::new(ln_q, &taus, &rev)?.partition()?, m));
            ratios.push(inst.determinant_form()? / m);
        }
        let mean: C64 = ratios.iter().sum::<C64>() / ratios.len() as f64;
        let var = ratios.iter().map(|r| (r - mean).norm_sqr()).sum::<f64>() / ratios.len() as f64 / mean.norm_sqr();
        report.push(format!("{label} ice rule"), "B lowers S³ by one", ice, 0.0);
        report.push(format!("{label} permutation symmetry"), "M_n symmetric in ξ", perm, 1e-12);
        report.push(format!("{label} D_n/M_n over 10 ξ sets"), "D_n ∝ M_n (relative variance)", var, 1e-8);

        let head = random_xis(n - 1, 100 + n as u64);
        let mut xis = head.clone();
        xis.push(taus[n - 1]);
        let big = DwbcInstance::new(ln_q, &taus, &xis)?.partition()?;
        let small = DwbcInstance::new(ln_q, &taus[..n - 1], &head)?.partition()?;
        let f = recurrence_factor(ln_q, &taus, &xis);
        report.push(
            format!("{label} recurrence"),
            "M_n(…, ξ_n = τ_n) = factor · M_(n-1)",
            rel(big, f * small),
            1e-10,
        );

        let inst = DwbcInstance::new(ln_q, &taus, &random_xis(n, 7))?;
        let (origin, inf) = inst.contour_integrals()?;
        let xi2: C64 = inst.xis.iter().map(|x| x * x).product();
        let sign = if n % 2 == 0 { ONE } else { -ONE };
        let stated_origin = -sign * two_pi_i() * xi2;
        let vanish_origin = origin[1..].iter().map(|v| v.norm()).fold(0.0, f64::max);
        let vanish_inf = inf[..n].iter().map(|v| v.norm()).fold(0.0, f64::max);
        report.push(format!("{label} Γ_0 at j = 0, stated value"), "(-1)^(n-1) 2πi ∏ξ²", rel(origin[0], stated_origin), 1e-10);
        report.push(format!("{label} Γ_0 at j ≥ 1"), "= 0", vanish_origin, 1e-10);
        report.push(format!("{label} Γ_∞ at j = n, stated value"), "-2πi", rel(inf[n], -two_pi_i()), 1e-10);
        report.push(format!("{label} Γ_∞ at j < n"), "= 0", vanish_inf, 1e-10);
        let q = fixtures::Q_STANDARD;
        let t4: C64 = taus.iter().map(|t| t.powi(4)).product();
        report.push(
            format!("{label} Γ_0 at j = 0, derived value"),
            "(-1)^n 2πi ∏ξ²",
            rel(origin[0], sign * two_pi_i() * xi2),
            1e-10,
        );
        report.push(
            format!("{label} Γ_∞ at j = n, derived value"),
            "-2πi ∏τ⁴ q^(-2n)",
            rel(inf[n], -two_pi_i() * t4 / q.powi(2 * n as i32)),
            1e-10,
        );
    }
    Ok(())
}

fn classical_checks(report: &mut Report, fixture: &ClassicalFixture) -> Result<()> {
    let canon = CanonicalRho::new(classical_curve(fixture)?)?;
    report.push("C0 X symmetry", "X = Xᵗ", canon.x_asymmetry(), 1e-8);
    let mut sym: f64 = 0.0;
    for (x, y) in RHO_SAMPLES {
        sym = sym.max(rel(canon.rho(x, y)?, canon.rho(y, x)?));
    }
    report.push("C0 ρ symmetry", "ρ(x,y) = ρ(y,x)", sym, 1e-8);
    let det = canon.pi.determinant().norm();
    report.push("C0 a-period nondegeneracy", "det ∮_c σ ≠ 0 (reported as 1/|det|)", 1.0 / det, 1e6);
    let gap = quantum_classical_gap(fixture)?;
    let verdict = |ok: bool| if ok { 0.0 } else { 1.0 };
    report.push(
        format!("C0 measure gap {:?}", gap.measure_gap),
        "Q+Q-φ → 1/((K⁻¹-K)√P), strictly decreasing in ν",
        verdict(gap.measure_decreasing()),
        0.0,
    );
    report.push(
        format!("C0 ρ_ν gap {:?}", gap.rho_gap),
        "ρ_ν → 4ρ/(K⁻¹-K)², strictly decreasing in ν",
        verdict(gap.rho_decreasing()),
        0.0,
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in std::iter::once(Suite::All).chain(Suite::PARTS) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("everything".parse::<Suite>().is_err());
    }
}
