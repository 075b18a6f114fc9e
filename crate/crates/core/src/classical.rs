//! The `ν → 0` limit at `α = 0`: the hyperelliptic curve `w² = P(z)`, its
//! differentials and a-periods, the canonical bidifferential `ρ(x, y)`, and
//! the gaps between quantum objects and their classical counterparts.
//!
//! Here `q = e^{iπν}`, `q^{s_m} → Q_m = e^{iπσ_m}` and `q^κ → K = e^{iπk}`.

use crate::error::{Error, Result};
use crate::fixtures::ClassicalFixture;
use crate::model::{ModelParams, Site, Zeta, C64, I, ONE, ZERO};
use crate::omega::OmegaModel;
use crate::poly::Poly;
use nalgebra::DMatrix;
use serde::Serialize;
use std::f64::consts::PI;

/// Quadrature nodes on each a-cycle; the check doubles them.
pub const CONTOUR_NODES: usize = 400;

/// Sample points for the measure limit.
pub const MEASURE_SAMPLES: [C64; 7] = [
    C64::new(0.3, 0.0),
    C64::new(0.0, -0.3),
    C64::new(2.0, 0.0),
    C64::new(-3.0, 0.0),
    C64::new(0.0, 3.0),
    C64::new(0.6, 0.2),
    C64::new(-0.5, 0.5),
];

/// Sample pairs `(x, y)` for the bidifferential limit.
pub const RHO_SAMPLES: [(C64, C64); 4] = [
    (C64::new(0.3, 0.0), C64::new(-2.0, 0.0)),
    (C64::new(0.2, 0.1), C64::new(3.0, 0.0)),
    (C64::new(-2.5, 0.0), C64::new(0.0, 3.0)),
    (C64::new(0.25, 0.0), C64::new(0.0, 0.3)),
];

/// `∏_m (z c_m / τ_m² - 1)`.
fn weight(tau2: &[C64], phase: &[C64]) -> Poly {
    tau2.iter()
        .zip(phase)
        .fold(Poly::constant(ONE), |acc, (t2, c)| &acc * &Poly::linear(-ONE, c / t2))
}

/// `w² = P(z) = T(z)² - 4 a(z) d(z)` with its cuts.
#[derive(Clone, Debug)]
pub struct HyperellipticCurve {
    pub t: Poly,
    pub a: Poly,
    pub d: Poly,
    pub p: Poly,
    /// Branch points grouped by cut; cut `m` sits near `τ_m²`.
    pub cuts: Vec<(C64, C64)>,
    /// `K = lim q^κ`.
    pub k: C64,
    /// `±sqrt(lead P)`, the sign chosen so that `√P ~ (K - K⁻¹)/(K + K⁻¹) T`.
    root_lead: C64,
}

impl HyperellipticCurve {
    /// `a`, `d` from the limits `Q_m = e^{iπσ_m}`; `t` is the classical
    /// transfer polynomial.
    pub fn new(t: Poly, tau2: &[C64], sigma: &[f64], k: C64) -> Result<Self> {
        let n = tau2.len();
        if n < 2 || sigma.len() != n || t.degree() != n {
            return Err(Error::InvalidInput(format!(
                "curve needs n ≥ 2 sites and a degree-n transfer polynomial, got n = {n}, deg T = {}",
                t.degree()
            )));
        }
        let up: Vec<C64> = sigma.iter().map(|s| (2.0 * PI * s * I).exp()).collect();
        let down: Vec<C64> = up.iter().map(|u| ONE / u).collect();
        let a = weight(tau2, &up);
        let d = weight(tau2, &down);
        let p = &(&t * &t) - &(&a * &d).scale(C64::new(4.0, 0.0));
        let roots = polish_roots(&p, p.roots());
        let cuts = pair_roots(&roots, tau2)?;
        let kk = (PI * k * I).exp();
        let mut curve = HyperellipticCurve {
            t,
            a,
            d,
            p,
            cuts,
            k: kk,
            root_lead: ZERO,
        };
        let lead = curve.p.coeff(2 * n);
        curve.root_lead = lead.sqrt();
        let far = C64::new(1e4, 0.0);
        let target = (kk - ONE / kk) / (kk + ONE / kk) * curve.t.eval(far);
        let w = curve.sqrt_p(far)?;
        if (w - target).norm() > (w + target).norm() {
            curve.root_lead = -curve.root_lead;
        }
        Ok(curve)
    }

    pub fn n(&self) -> usize {
        self.cuts.len()
    }

    pub fn genus(&self) -> usize {
        self.n() - 1
    }

    pub fn branch_points(&self) -> Vec<C64> {
        self.cuts.iter().flat_map(|&(x, y)| [x, y]).collect()
    }

    /// `√P` on the first sheet, with straight cuts between paired points.
    pub fn sqrt_p(&self, z: C64) -> Result<C64> {
        let mut out = self.root_lead;
        for &(b1, b2) in &self.cuts {
            let c = 0.5 * (b1 + b2);
            let h = 0.5 * (b2 - b1);
            let u = z - c;
            // on the segment (-h, h) the principal root below jumps
            let s = u / h;
            if s.im.abs() < 1e-12 && s.re.abs() <= 1.0 {
                return Err(Error::BranchTrackingLost(z));
            }
            out *= u * (ONE - (h / u).powi(2)).sqrt();
        }
        Ok(out)
    }

    /// `η^± = (T ± √P) / (2d)`, the two roots of `d η² - T η + a = 0`.
    pub fn eta(&self, z: C64) -> Result<(C64, C64)> {
        let w = self.sqrt_p(z)?;
        let (t, d) = (self.t.eval(z), self.d.eval(z));
        Ok(((t + w) / (2.0 * d), (t - w) / (2.0 * d)))
    }

    /// Density of `σ_j = z^{j-1} dz / √P`, `j = 0..n`.
    pub fn sigma(&self, j: usize, z: C64) -> Result<C64> {
        Ok(z.powi(j as i32 - 1) / self.sqrt_p(z)?)
    }

    /// `s̃_j = z^j [d/dz (z^{-2j} P)]_+`.
    pub fn sigma_tilde_numerator(&self, j: usize) -> Poly {
        let deg = self.p.degree();
        let mut out = vec![ZERO; deg + 1];
        for (k, &pk) in self.p.coeffs().iter().enumerate() {
            let e = k as i64 - 2 * j as i64;
            if e >= 1 {
                out[(e - 1) as usize + j] += e as f64 * pk;
            }
        }
        Poly(out).trimmed(0.0)
    }

    /// Density of `σ̃_j = s̃_j dz / (2√P)`, `j = 0..n-1`.
    pub fn sigma_tilde(&self, j: usize, z: C64) -> Result<C64> {
        Ok(self.sigma_tilde_numerator(j).eval(z) / (2.0 * self.sqrt_p(z)?))
    }

    /// Nodes and weights of the cycle `c_m`: an ellipse around cut `m`
    /// (`m = 1..n`), or a circle around the origin (`m = 0`).
    pub fn contour(&self, m: usize, nodes: usize) -> Result<Vec<(C64, C64)>> {
        if m > self.n() {
            return Err(Error::InvalidInput(format!("no cycle c_{m}")));
        }
        let step = 2.0 * PI / nodes as f64;
        let (c, h, ax, bx) = if m == 0 {
            let r = 0.5 * self.branch_points().iter().map(|x| x.norm()).fold(f64::INFINITY, f64::min);
            (ZERO, C64::new(r, 0.0), 1.0, 1.0)
        } else {
            let (b1, b2) = self.cuts[m - 1];
            (0.5 * (b1 + b2), 0.5 * (b2 - b1), 1.3, 0.5)
        };
        Ok((0..nodes)
            .map(|i| {
                let th = step * i as f64;
                let z = c + h * C64::new(ax * th.cos(), bx * th.sin());
                let dz = h * C64::new(-ax * th.sin(), bx * th.cos()) * step;
                (z, dz)
            })
            .collect())
    }

    /// `∮_{c_m} f dz` by the trapezoidal rule, checked against node doubling.
    pub fn period<F: Fn(C64) -> Result<C64>>(&self, m: usize, f: F) -> Result<C64> {
        let run = |nodes: usize| -> Result<C64> {
            let mut s = ZERO;
            for (z, dz) in self.contour(m, nodes)? {
                s += f(z)? * dz;
            }
            Ok(s)
        };
        let coarse = run(CONTOUR_NODES)?;
        let fine = run(2 * CONTOUR_NODES)?;
        let drift = (fine - coarse).norm() / fine.norm().max(1.0);
        if drift > 1e-8 {
            return Err(Error::QuadratureNotConverged(drift));
        }
        Ok(fine)
    }

    /// Intersection `ω₁ ∘ ω₂ = -Σ res(ω₁ d⁻¹ω₂)` for `ω = σ_j` or `σ̃_j`,
    /// from the expansions at `∞^±`.
    pub fn intersection(&self, first: Differential, second: Differential) -> Result<C64> {
        let terms = 4 * self.n() + 8;
        let w1 = self.expand_at_infinity(first, terms);
        let w2 = self.expand_at_infinity(second, terms);
        let prim = w2.primitive()?;
        // both sheets contribute equally; res_∞ f dz = -[z⁻¹] f
        Ok(2.0 * w1.mul(&prim).coeff(-1))
    }

    fn expand_at_infinity(&self, form: Differential, terms: usize) -> Laurent {
        let n = self.n() as i64;
        let inv = self.inverse_root_series(terms);
        let numerator = match form {
            Differential::First(j) => Laurent::monomial(j as i64 - 1, ONE),
            Differential::Second(j) => Laurent::from_poly(&self.sigma_tilde_numerator(j).scale(C64::new(0.5, 0.0))),
        };
        numerator.mul(&Laurent { top: -n, coeffs: inv }).truncated(terms)
    }

    /// Coefficients `r_k` of `1/√P = z^{-n} Σ r_k z^{-k}` at `∞` on the first sheet.
    fn inverse_root_series(&self, terms: usize) -> Vec<C64> {
        let deg = self.p.degree();
        let hat: Vec<C64> = (0..terms)
            .map(|k| if k <= deg { self.p.coeff(deg - k) } else { ZERO })
            .collect();
        let mut s = vec![ZERO; terms];
        s[0] = self.root_lead;
        for k in 1..terms {
            let mut acc = hat[k];
            for i in 1..k {
                acc -= s[i] * s[k - i];
            }
            s[k] = acc / (2.0 * s[0]);
        }
        let mut r = vec![ZERO; terms];
        r[0] = ONE / s[0];
        for k in 1..terms {
            let acc: C64 = (1..=k).map(|i| s[i] * r[k - i]).sum();
            r[k] = -acc / s[0];
        }
        r
    }
}

/// Which differential an intersection refers to.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Differential {
    /// `σ_j`.
    First(usize),
    /// `σ̃_j`.
    Second(usize),
}

/// Truncated Laurent series at infinity; `coeffs[k]` multiplies `z^{top-k}`.
#[derive(Clone, Debug)]
struct Laurent {
    top: i64,
    coeffs: Vec<C64>,
}

impl Laurent {
    fn monomial(power: i64, c: C64) -> Self {
        Laurent { top: power, coeffs: vec![c] }
    }

    fn from_poly(p: &Poly) -> Self {
        let deg = p.degree();
        Laurent {
            top: deg as i64,
            coeffs: (0..=deg).rev().map(|k| p.coeff(k)).collect(),
        }
    }

    fn coeff(&self, power: i64) -> C64 {
        let k = self.top - power;
        if k < 0 {
            return ZERO;
        }
        self.coeffs.get(k as usize).copied().unwrap_or(ZERO)
    }

    fn truncated(mut self, terms: usize) -> Self {
        self.coeffs.truncate(terms);
        self
    }

    fn mul(&self, other: &Self) -> Self {
        let len = self.coeffs.len().min(other.coeffs.len());
        let mut coeffs = vec![ZERO; len];
        for (i, a) in self.coeffs.iter().enumerate().take(len) {
            for (j, b) in other.coeffs.iter().enumerate().take(len - i) {
                coeffs[i + j] += a * b;
            }
        }
        Laurent {
            top: self.top + other.top,
            coeffs,
        }
    }

    /// Term-wise primitive; fails on a residue.
    fn primitive(&self) -> Result<Self> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (k, &c) in self.coeffs.iter().enumerate() {
            let power = self.top - k as i64;
            if power == -1 {
                if c.norm() > 1e-9 {
                    return Err(Error::InvalidInput("differential has a residue at infinity".into()));
                }
                coeffs.push(ZERO);
            } else {
                coeffs.push(c / (power + 1) as f64);
            }
        }
        Ok(Laurent {
            top: self.top + 1,
            coeffs,
        })
    }
}

/// Newton polishing of companion-matrix roots.
fn polish_roots(p: &Poly, roots: Vec<C64>) -> Vec<C64> {
    let dp = p.derivative();
    roots
        .into_iter()
        .map(|mut x| {
            for _ in 0..4 {
                let d = dp.eval(x);
                if d.norm() == 0.0 {
                    break;
                }
                x -= p.eval(x) / d;
            }
            x
        })
        .collect()
}

/// Assigns each root to the `τ_m²` with the nearest `|ln|x|/|τ_m²||`;
/// every cluster must receive exactly two roots.
fn pair_roots(roots: &[C64], tau2: &[C64]) -> Result<Vec<(C64, C64)>> {
    let mut groups: Vec<Vec<C64>> = vec![Vec::new(); tau2.len()];
    for &x in roots {
        let mut scores: Vec<(f64, usize)> = tau2
            .iter()
            .enumerate()
            .map(|(m, t)| ((x.norm() / t.norm()).ln().abs(), m))
            .collect();
        scores.sort_by(|a, b| a.0.total_cmp(&b.0));
        if scores.len() > 1 && scores[1].0 - scores[0].0 < 1e-3 {
            return Err(Error::RootClusterAmbiguous(x));
        }
        groups[scores[0].1].push(x);
    }
    groups
        .into_iter()
        .map(|g| match g.as_slice() {
            [x, y] => Ok((*x, *y)),
            _ => Err(Error::RootClusterAmbiguous(g.first().copied().unwrap_or(ZERO))),
        })
        .collect()
}

/// `ρ(x, y) = -∂_x[√P(x) / (√P(y)(x - y))] + Σ σ̃_i(x)σ_i(y) + Σ X_ij σ_j(x)σ_i(y)`
/// normalized to vanish on the a-cycles `c_1..c_{n-1}` in `x`.
#[derive(Clone, Debug)]
pub struct CanonicalRho {
    pub curve: HyperellipticCurve,
    /// `Π_{jk} = ∮_{c_k} σ_j`.
    pub pi: DMatrix<C64>,
    /// `Π̃_{jk} = ∮_{c_k} σ̃_j`.
    pub pi_tilde: DMatrix<C64>,
    /// `X = -Π̃ Π⁻¹`.
    pub x: DMatrix<C64>,
}

impl CanonicalRho {
    pub fn new(curve: HyperellipticCurve) -> Result<Self> {
        let g = curve.genus();
        let mut pi = DMatrix::from_element(g, g, ZERO);
        let mut pi_tilde = DMatrix::from_element(g, g, ZERO);
        for j in 1..=g {
            for k in 1..=g {
                pi[(j - 1, k - 1)] = curve.period(k, |z| curve.sigma(j, z))?;
                pi_tilde[(j - 1, k - 1)] = curve.period(k, |z| curve.sigma_tilde(j, z))?;
            }
        }
        let svd = pi.clone().svd(false, false);
        let smax = svd.singular_values.max();
        let rcond = if smax > 0.0 { svd.singular_values.min() / smax } else { 0.0 };
        if rcond < 1e-12 {
            return Err(Error::SingularPeriodMatrix(rcond));
        }
        let inv = pi.clone().try_inverse().ok_or(Error::SingularPeriodMatrix(rcond))?;
        let x = -&pi_tilde * inv;
        Ok(CanonicalRho { curve, pi, pi_tilde, x })
    }

    /// Density of `ρ(x, y)`.
    pub fn rho(&self, x: C64, y: C64) -> Result<C64> {
        if (x - y).norm() < 1e-14 {
            return Err(Error::PoleHit(x));
        }
        let c = &self.curve;
        let g = c.genus();
        let (wx, wy) = (c.sqrt_p(x)?, c.sqrt_p(y)?);
        let dwx = c.p.derivative().eval(x) / (2.0 * wx);
        let exact = -(dwx * (x - y) - wx) / (wy * (x - y) * (x - y));
        let mut sum = exact;
        for i in 1..=g {
            sum += c.sigma_tilde(i, x)? * c.sigma(i, y)?;
            for j in 1..=g {
                sum += self.x[(i - 1, j - 1)] * c.sigma(j, x)? * c.sigma(i, y)?;
            }
        }
        Ok(sum)
    }

    /// `‖X - Xᵗ‖ / ‖X‖`.
    pub fn x_asymmetry(&self) -> f64 {
        (&self.x - self.x.transpose()).norm() / self.x.norm().max(1e-300)
    }

    /// `∮_{c_m} ρ(x, y) dx`.
    pub fn a_period(&self, m: usize, y: C64) -> Result<C64> {
        self.curve.period(m, |x| self.rho(x, y))
    }
}

/// Classical data at the smallest `ν` of the ladder.
pub fn classical_curve(fixture: &ClassicalFixture) -> Result<HyperellipticCurve> {
    let nu = fixture
        .nu_ladder
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let model = quantum_model(fixture, nu)?;
    HyperellipticCurve::new(model.kappa.t_poly.clone(), &fixture.tau2, &fixture.sigma, fixture.k)
}

/// The untwisted quantum model at `q = e^{iπν}` with `2s_m = round(2σ_m/ν)`
/// and `κ = k/ν`.
pub fn quantum_model(fixture: &ClassicalFixture, nu: f64) -> Result<OmegaModel> {
    if nu.is_nan() || nu <= 0.0 {
        return Err(Error::InvalidInput(format!("ν must be positive, got {nu}")));
    }
    let sites: Vec<Site> = fixture
        .tau2
        .iter()
        .zip(&fixture.sigma)
        .map(|(t2, s)| Site::new((2.0 * s / nu).round() as u32, t2.sqrt()))
        .collect();
    let params = ModelParams::with_ln_q(C64::new(0.0, PI * nu), sites, fixture.k / nu, ZERO)?;
    LimitPoint::check_untwisted(&params)?;
    OmegaModel::new(&params)
}

/// Quantum quantities that approach the classical ones.
pub struct LimitPoint {
    pub nu: f64,
    pub model: OmegaModel,
}

impl LimitPoint {
    pub fn new(model: OmegaModel, nu: f64) -> Result<Self> {
        Self::check_untwisted(&model.params)?;
        Ok(LimitPoint { nu, model })
    }

    /// The limit is only defined without disorder.
    pub fn check_untwisted(params: &ModelParams) -> Result<()> {
        if params.alpha.norm() > 0.0 {
            return Err(Error::InvalidInput(format!(
                "the classical limit needs α = 0, got {}",
                params.alpha
            )));
        }
        Ok(())
    }

    /// `Q⁺Q⁻φ` at `z`.
    pub fn measure(&self, z: C64) -> C64 {
        self.model.measure(z)
    }

    /// `ρ_ν(x, y) = T(x)T(y) ω(x, y) μ(x)μ(y) / (πiν xy)`.
    pub fn rho_nu(&self, x: C64, y: C64) -> Result<C64> {
        let m = &self.model;
        let omega = m.omega_stripped(x, Zeta::from_z2(y))?;
        Ok(m.kappa.t(x) * m.kappa.t(y) * omega * self.measure(x) * self.measure(y) / (PI * I * self.nu * x * y))
    }
}

/// Per-`ν` gaps between quantum and classical objects.
#[derive(Clone, Debug, Serialize)]
pub struct LimitReport {
    pub nu: Vec<f64>,
    /// `max |μ (K⁻¹ - K) √P - 1|` over [`MEASURE_SAMPLES`].
    pub measure_gap: Vec<f64>,
    /// `max |ρ_ν (K⁻¹ - K)²/4 - ρ| / |ρ|` over [`RHO_SAMPLES`].
    pub rho_gap: Vec<f64>,
    pub x_asymmetry: f64,
}

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

impl LimitReport {
    pub fn measure_decreasing(&self) -> bool {
        strictly_decreasing(&self.measure_gap)
    }

    pub fn rho_decreasing(&self) -> bool {
        strictly_decreasing(&self.rho_gap)
    }
}

/// Runs the ladder in decreasing `ν` and compares against the curve.
pub fn quantum_classical_gap(fixture: &ClassicalFixture) -> Result<LimitReport> {
    let canon = CanonicalRho::new(classical_curve(fixture)?)?;
    let k = canon.curve.k;
    let mut ladder = fixture.nu_ladder.clone();
    ladder.sort_by(|a, b| b.total_cmp(a));
    let mut report = LimitReport {
        nu: ladder.clone(),
        measure_gap: Vec::new(),
        rho_gap: Vec::new(),
        x_asymmetry: canon.x_asymmetry(),
    };
    for nu in ladder {
        let point = LimitPoint::new(quantum_model(fixture, nu)?, nu)?;
        let mut mg: f64 = 0.0;
        for z in MEASURE_SAMPLES {
            let v = point.measure(z) * (ONE / k - k) * canon.curve.sqrt_p(z)?;
            mg = mg.max((v - ONE).norm());
        }
        let mut rg: f64 = 0.0;
        for (x, y) in RHO_SAMPLES {
            let classical = canon.rho(x, y)?;
            let quantum = point.rho_nu(x, y)? * (ONE / k - k).powi(2) / 4.0;
            rg = rg.max((quantum - classical).norm() / classical.norm());
        }
        report.measure_gap.push(mg);
        report.rho_gap.push(rg);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn canon() -> CanonicalRho {
        CanonicalRho::new(classical_curve(&fixtures::c0()).unwrap()).unwrap()
    }

    #[test]
    fn curve_shape() {
        let c = canon();
        let curve = &c.curve;
        assert_eq!(curve.p.degree(), 4);
        for b in curve.branch_points() {
            assert!(curve.p.eval(b).norm() < 1e-10 * curve.p.norm());
        }
        let z = C64::new(0.7, -1.9);
        let (ep, em) = curve.eta(z).unwrap();
        let ratio = curve.a.eval(z) / curve.d.eval(z);
        assert!((ep * em - ratio).norm() < 1e-12 * ratio.norm());
    }

    #[test]
    fn rho_is_symmetric_with_a_double_pole() {
        let c = canon();
        assert!(c.x_asymmetry() < 1e-8, "{}", c.x_asymmetry());
        let (x, y) = (C64::new(0.3, 0.0), C64::new(-2.0, 0.0));
        let (r1, r2) = (c.rho(x, y).unwrap(), c.rho(y, x).unwrap());
        assert!((r1 - r2).norm() < 1e-8 * r1.norm());
        let y = C64::new(-0.5, 0.5);
        let e = C64::new(1e-4, 1e-4);
        let lead = e * e * c.rho(y + e, y).unwrap();
        assert!((lead - ONE).norm() < 1e-6, "{lead}");
    }

    #[test]
    fn a_periods_of_rho_vanish() {
        let c = canon();
        for m in 1..=c.curve.genus() {
            let v = c.a_period(m, C64::new(-2.5, 0.3)).unwrap();
            assert!(v.norm() < 1e-8, "{v}");
        }
    }

    #[test]
    fn twisted_run_is_rejected() {
        let p = fixtures::p0();
        let m = OmegaModel::new(&p).unwrap();
        assert!(matches!(LimitPoint::new(m, 0.1), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn canonical_pairing_at_infinity() {
        let c = canon();
        let g = c.curve.genus();
        for i in 1..=g {
            for j in 1..=g {
                let st = c.curve.intersection(Differential::First(i), Differential::Second(j)).unwrap();
                // -Σ res over both points at infinity
                let expected = if i == j { 2.0 } else { 0.0 };
                assert!((st - expected).norm() < 1e-8, "{st}");
                let ss = c.curve.intersection(Differential::First(i), Differential::First(j)).unwrap();
                let tt = c.curve.intersection(Differential::Second(i), Differential::Second(j)).unwrap();
                assert!(ss.norm() < 1e-8 && tt.norm() < 1e-8);
            }
        }
    }

    #[test]
    fn exact_and_third_kind_periods() {
        let c = canon();
        let curve = &c.curve;
        for m in 1..=curve.n() {
            let v = curve.period(m, |z| curve.sigma_tilde(0, z)).unwrap();
            assert!(v.norm() < 1e-10, "{v}");
        }
        // σ_0 has simple poles at 0^±, so its c_0 period is 2πi/√P(0)
        let v = curve.period(0, |z| curve.sigma(0, z)).unwrap();
        let expected = C64::new(0.0, 2.0 * PI) / curve.sqrt_p(ZERO).unwrap();
        assert!((v - expected).norm() < 1e-10 * expected.norm());
        assert!(c.pi.determinant().norm() > 1e-6);
    }

    #[test]
    fn eta_asymptotics_with_classical_leading_term() {
        let f = fixtures::c0();
        let kk = (PI * f.k * I).exp();
        let tau4: C64 = f.tau2.iter().product();
        let t = Poly(vec![C64::new(0.3, -0.2), C64::new(-0.7, 0.4), (kk + ONE / kk) / tau4]);
        let curve = HyperellipticCurve::new(t, &f.tau2, &f.sigma, f.k).unwrap();
        let q2s: C64 = f.sigma.iter().map(|s| (2.0 * PI * s * I).exp()).product();
        let z = C64::new(1e7, 3e6);
        let (ep, em) = curve.eta(z).unwrap();
        assert!((ep - kk * q2s).norm() < 1e-5, "{ep}");
        assert!((em - q2s / kk).norm() < 1e-5, "{em}");
    }

    #[test]
    fn points_on_a_cut_are_rejected() {
        let c = canon();
        let (b1, b2) = c.curve.cuts[0];
        let mid = 0.5 * (b1 + b2);
        assert!(matches!(c.curve.sqrt_p(mid), Err(Error::BranchTrackingLost(_))));
    }
}
