//! Scalar conventions, model parameters and the elementary weight functions.
//!
//! Spectral parameters are stored as [`Zeta`], i.e. by `ln ζ`. A value given
//! as `ζ²` is lifted with the principal branch, `ln ζ = ½ Log ζ²`. Powers
//! `ζ^γ` are `exp(γ ln ζ)` and the shift `ζ → q^k ζ` adds `k ln q`, so shifted
//! evaluations never jump branch.
//!
//! Polynomials in `ζ²` are stored as [`Poly`] in the variable `z = ζ²`.

use crate::error::{Error, Result};
use crate::poly::Poly;
use num_complex::Complex64;
use std::f64::consts::PI;

pub type C64 = Complex64;

pub(crate) const I: C64 = C64::new(0.0, 1.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);

pub(crate) fn two_pi_i() -> C64 {
    C64::new(0.0, 2.0 * PI)
}

/// A point of the spectral plane carried by its logarithm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Zeta {
    pub ln: C64,
}

impl Zeta {
    pub fn from_ln(ln: C64) -> Self {
        Zeta { ln }
    }

    /// Lifts `ζ²` to `ζ` on the principal branch.
    pub fn from_z2(z2: C64) -> Self {
        Zeta { ln: 0.5 * z2.ln() }
    }

    /// Lifts `ζ` itself (principal log of `ζ`).
    pub fn from_zeta(zeta: C64) -> Self {
        Zeta { ln: zeta.ln() }
    }

    pub fn one() -> Self {
        Zeta { ln: ZERO }
    }

    pub fn value(&self) -> C64 {
        self.ln.exp()
    }

    pub fn z2(&self) -> C64 {
        (2.0 * self.ln).exp()
    }

    /// `ζ^γ`.
    pub fn pow(&self, gamma: C64) -> C64 {
        (gamma * self.ln).exp()
    }

    /// `q^k ζ`.
    pub fn shifted(&self, k: f64, ln_q: C64) -> Self {
        Zeta {
            ln: self.ln + k * ln_q,
        }
    }

    /// `ζ / ξ`.
    pub fn ratio(&self, other: &Zeta) -> Self {
        Zeta {
            ln: self.ln - other.ln,
        }
    }
}

/// One Matsubara site: spin `two_spin / 2` and inhomogeneity `tau`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Site {
    pub two_spin: u32,
    pub tau: C64,
}

impl Site {
    pub fn new(two_spin: u32, tau: C64) -> Self {
        Site { two_spin, tau }
    }

    pub fn spin_half(tau: C64) -> Self {
        Site { two_spin: 1, tau }
    }

    pub fn dim(&self) -> usize {
        self.two_spin as usize + 1
    }

    pub fn spin(&self) -> f64 {
        self.two_spin as f64 / 2.0
    }

    pub fn tau2(&self) -> C64 {
        self.tau * self.tau
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Acceptance threshold for identity residuals.
    pub identity: f64,
    /// Stopping threshold for iterative solvers.
    pub convergence: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            identity: 1e-10,
            convergence: 1e-13,
        }
    }
}

/// Global model configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub ln_q: C64,
    pub sites: Vec<Site>,
    pub kappa: C64,
    pub alpha: C64,
    pub sector: i64,
    pub tol: Tolerances,
    pub osc_truncation: usize,
}

impl ModelParams {
    /// Validated parameters with `ln q` taken as the principal log of `q`.
    pub fn new(q: C64, sites: Vec<Site>, kappa: C64, alpha: C64) -> Result<Self> {
        if q.norm() == 0.0 || !q.is_finite() {
            return Err(Error::InvalidInput("q must be a nonzero finite number".into()));
        }
        Self::with_ln_q(q.ln(), sites, kappa, alpha)
    }

    /// `q = exp(iπν)` with `ln q = iπν` exactly.
    pub fn from_nu(nu: f64, sites: Vec<Site>, kappa: C64, alpha: C64) -> Result<Self> {
        Self::with_ln_q(C64::new(0.0, PI * nu), sites, kappa, alpha)
    }

    pub fn with_ln_q(ln_q: C64, sites: Vec<Site>, kappa: C64, alpha: C64) -> Result<Self> {
        let p = ModelParams {
            ln_q,
            sites,
            kappa,
            alpha,
            sector: 0,
            tol: Tolerances::default(),
            osc_truncation: 80,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_sector(mut self, sector: i64) -> Result<Self> {
        self.sector = sector;
        self.validate()?;
        Ok(self)
    }

    /// Same chain with different twists.
    pub fn with_twists(&self, kappa: C64, alpha: C64) -> Result<Self> {
        let mut p = self.clone();
        p.kappa = kappa;
        p.alpha = alpha;
        p.validate()?;
        Ok(p)
    }

    /// Parameters for monodromy-only uses (domain-wall chains), where the
    /// total spin need not be an integer.
    pub fn chain(ln_q: C64, sites: Vec<Site>) -> Result<Self> {
        let p = ModelParams {
            ln_q,
            sites,
            kappa: ZERO,
            alpha: ZERO,
            sector: 0,
            tol: Tolerances::default(),
            osc_truncation: 80,
        };
        p.validate_chain()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        self.validate_chain()?;
        if !self.two_total_spin().is_multiple_of(2) {
            return Err(Error::InvalidInput("the total spin must be an integer".into()));
        }
        if self.sector.unsigned_abs() > self.two_total_spin() as u64 / 2 {
            return Err(Error::InvalidInput(format!(
                "sector {} outside [-{s}, {s}]",
                self.sector,
                s = self.two_total_spin() / 2
            )));
        }
        Ok(())
    }

    fn validate_chain(&self) -> Result<()> {
        if self.sites.is_empty() {
            return Err(Error::InvalidInput("at least one site is required".into()));
        }
        if !self.ln_q.is_finite() {
            return Err(Error::InvalidInput("ln q must be finite".into()));
        }
        for (m, s) in self.sites.iter().enumerate() {
            if s.two_spin == 0 {
                return Err(Error::InvalidInput(format!("site {m}: spin must be positive")));
            }
            if s.tau.norm() == 0.0 || !s.tau.is_finite() {
                return Err(Error::InvalidInput(format!("site {m}: tau must be nonzero")));
            }
        }
        if !self.kappa.is_finite() || !self.alpha.is_finite() {
            return Err(Error::InvalidInput("twists must be finite".into()));
        }
        // q itself must not be a low root of unity: the representations
        // degenerate when [k]_q vanishes for k up to the largest dimension.
        let kmax = self.sites.iter().map(|s| s.two_spin).max().unwrap_or(1) as i64 + 1;
        for k in 1..=kmax {
            let d = self.q_pow_f(2.0 * k as f64) - ONE;
            if d.norm() < 1e-10 {
                return Err(Error::DegenerateTwist {
                    twist: ZERO,
                    mode: k,
                });
            }
        }
        let poles = self.all_poles();
        for i in 0..poles.len() {
            for j in 0..i {
                if (poles[i] - poles[j]).norm() < 1e-9 * (1.0 + poles[i].norm()) {
                    return Err(Error::PoleCollision(poles[i]));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.sites.len()
    }

    pub fn two_total_spin(&self) -> u32 {
        self.sites.iter().map(|s| s.two_spin).sum()
    }

    /// `Σ s_m`, an integer by validation.
    pub fn total_spin(&self) -> i64 {
        self.two_total_spin() as i64 / 2
    }

    pub fn q(&self) -> C64 {
        self.ln_q.exp()
    }

    /// `q^x`.
    pub fn q_pow(&self, x: C64) -> C64 {
        (x * self.ln_q).exp()
    }

    pub fn q_pow_f(&self, x: f64) -> C64 {
        (x * self.ln_q).exp()
    }

    /// `q^x - q^{-x}`.
    pub fn q_diff(&self, x: C64) -> C64 {
        self.q_pow(x) - self.q_pow(-x)
    }

    /// `a(ζ) = ∏_m (ζ² q^{2s_m+1}/τ_m² - 1)` as a polynomial in `ζ²`.
    pub fn a_poly(&self) -> Poly {
        self.product_poly(|s| self.q_pow_f(s.two_spin as f64 + 1.0) / s.tau2())
    }

    /// `d(ζ) = ∏_m (ζ² q^{-2s_m+1}/τ_m² - 1)`.
    pub fn d_poly(&self) -> Poly {
        self.product_poly(|s| self.q_pow_f(1.0 - s.two_spin as f64) / s.tau2())
    }

    fn product_poly<F: Fn(&Site) -> C64>(&self, slope: F) -> Poly {
        self.sites.iter().fold(Poly::constant(ONE), |acc, s| {
            &acc * &Poly::linear(-ONE, slope(s))
        })
    }

    /// `W(ζ) = ∏_m ∏_{k=1}^{2s_m} (1 - ζ² q^{2k-2s_m+1}/τ_m²)`.
    pub fn w_poly(&self) -> Poly {
        let mut out = Poly::constant(ONE);
        for s in &self.sites {
            for k in 1..=s.two_spin {
                let slope = self.q_pow_f(2.0 * k as f64 - s.two_spin as f64 + 1.0) / s.tau2();
                out = &out * &Poly::linear(ONE, -slope);
            }
        }
        out
    }

    /// Slopes `β` with `φ(ζ) = ∏ 1/(β ζ² - 1)`, grouped by site.
    pub fn phi_slopes(&self) -> Vec<Vec<C64>> {
        self.sites
            .iter()
            .map(|s| {
                (0..=s.two_spin)
                    .map(|k| self.q_pow_f(2.0 * k as f64 + 1.0 - s.two_spin as f64) / s.tau2())
                    .collect()
            })
            .collect()
    }

    /// `φ(ζ)` at `z = ζ²`.
    pub fn phi(&self, z: C64) -> C64 {
        self.phi_slopes()
            .iter()
            .flatten()
            .fold(ONE, |acc, &b| acc / (b * z - ONE))
    }

    fn all_poles(&self) -> Vec<C64> {
        self.phi_slopes().iter().flatten().map(|b| ONE / b).collect()
    }

    /// Poles of `φ` enclosed by a contour, in `ζ²`.
    pub fn contour_poles(&self, contour: Contour) -> Result<Vec<C64>> {
        match contour {
            Contour::Origin => Ok(vec![ZERO]),
            Contour::Site(m) => {
                let slopes = self.phi_slopes();
                let s = slopes.get(m).ok_or_else(|| {
                    Error::InvalidInput(format!("contour index {} out of range", m + 1))
                })?;
                Ok(s.iter().map(|b| ONE / b).collect())
            }
            Contour::Infinity => Ok(Vec::new()),
        }
    }

    /// `Res_{z=z_p} φ(z)` for the pole `z_p = 1/β` of site `m`, slot `k`.
    fn phi_residue(&self, slopes: &[Vec<C64>], m: usize, k: usize) -> C64 {
        let b = slopes[m][k];
        let zp = ONE / b;
        let mut r = ONE / b;
        for (mm, row) in slopes.iter().enumerate() {
            for (kk, &bb) in row.iter().enumerate() {
                if (mm, kk) != (m, k) {
                    r /= bb * zp - ONE;
                }
            }
        }
        r
    }

    /// `∮_Γ h(ζ²) φ(ζ) dζ²/ζ²` as `2πi` times a residue sum, for `h` regular at
    /// the enclosed points. `Γ_∞` is minus the sum over all finite contours, so
    /// it is only meaningful when `h φ / ζ²` has no other finite poles.
    pub fn integrate<F: Fn(C64) -> C64>(&self, h: F, contour: Contour) -> Result<C64> {
        self.try_integrate(|z| Ok(h(z)), contour)
    }

    /// [`Self::integrate`] for integrands that can fail.
    pub fn try_integrate<F: Fn(C64) -> Result<C64>>(&self, h: F, contour: Contour) -> Result<C64> {
        let slopes = self.phi_slopes();
        let site_sum = |m: usize| -> Result<C64> {
            let mut acc = ZERO;
            for k in 0..slopes[m].len() {
                let zp = ONE / slopes[m][k];
                acc += h(zp)? * self.phi_residue(&slopes, m, k) / zp;
            }
            Ok(acc)
        };
        let total = match contour {
            Contour::Origin => h(ZERO)? * self.phi(ZERO),
            Contour::Site(m) => {
                if m >= self.n() {
                    return Err(Error::InvalidInput(format!(
                        "contour index {} out of range",
                        m + 1
                    )));
                }
                site_sum(m)?
            }
            Contour::Infinity => {
                let mut finite = h(ZERO)? * self.phi(ZERO);
                for m in 0..self.n() {
                    finite += site_sum(m)?;
                }
                -finite
            }
        };
        Ok(two_pi_i() * total)
    }

    /// Contours `Γ_0, Γ_1, …, Γ_n`.
    pub fn finite_contours(&self) -> Vec<Contour> {
        Contour::finite(self.n())
    }
}

/// Integration contours: around `0`, around the poles of one site, or around
/// infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Contour {
    Origin,
    /// Zero-based site index.
    Site(usize),
    Infinity,
}

impl Contour {
    /// Index `0` is the origin, `m ≥ 1` the `m`-th site.
    pub fn from_index(i: usize) -> Self {
        if i == 0 {
            Contour::Origin
        } else {
            Contour::Site(i - 1)
        }
    }

    pub fn finite(n: usize) -> Vec<Contour> {
        (0..=n).map(Contour::from_index).collect()
    }
}

/// `ψ(ζ, α) = ζ^α (ζ² + 1) / (2(ζ² - 1))`.
pub fn psi(zeta: Zeta, alpha: C64) -> Result<C64> {
    let z2 = zeta.z2();
    if (z2 - ONE).norm() < 1e-14 {
        return Err(Error::PoleHit(z2));
    }
    Ok(zeta.pow(alpha) * psi_rational(z2))
}

/// `ψ` at a point given as `ζ²`, principal branch.
pub fn eval_psi(zeta2: C64, alpha: C64) -> Result<C64> {
    psi(Zeta::from_z2(zeta2), alpha)
}

/// The twist-free part `(u + 1) / (2(u - 1))`.
pub(crate) fn psi_rational(u: C64) -> C64 {
    (u + ONE) / (2.0 * (u - ONE))
}

/// `ζ^γ · Σ_k c_k ζ^{2k}` with `k` starting at `min_power`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistedLaurent {
    pub twist: C64,
    pub min_power: i64,
    pub coeffs: Vec<C64>,
}

impl TwistedLaurent {
    pub fn new(twist: C64, min_power: i64, coeffs: Vec<C64>) -> Self {
        TwistedLaurent {
            twist,
            min_power,
            coeffs,
        }
    }

    pub fn from_poly(twist: C64, p: &Poly) -> Self {
        TwistedLaurent::new(twist, 0, p.coeffs().to_vec())
    }

    pub fn monomial(twist: C64, k: i64) -> Self {
        TwistedLaurent::new(twist, k, vec![ONE])
    }

    pub fn zero(twist: C64) -> Self {
        TwistedLaurent::new(twist, 0, vec![ZERO])
    }

    pub fn max_power(&self) -> i64 {
        self.min_power + self.coeffs.len() as i64 - 1
    }

    pub fn coeff(&self, k: i64) -> C64 {
        let i = k - self.min_power;
        if i < 0 {
            return ZERO;
        }
        self.coeffs.get(i as usize).copied().unwrap_or(ZERO)
    }

    pub fn eval(&self, zeta: Zeta) -> C64 {
        let z2 = zeta.z2();
        let poly = self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z2 + c);
        zeta.pow(self.twist + 2.0 * self.min_power as f64) * poly
    }

    /// Stripped polynomial part, when all powers are nonnegative.
    pub fn to_poly(&self) -> Option<Poly> {
        if self.min_power < 0 {
            return None;
        }
        let mut c = vec![ZERO; self.min_power as usize];
        c.extend_from_slice(&self.coeffs);
        Some(Poly(c))
    }

    fn same_twist(&self, other: &Self) -> bool {
        (self.twist - other.twist).norm() <= 1e-12 * (1.0 + self.twist.norm())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if !self.same_twist(other) {
            return Err(Error::InvalidInput(format!(
                "cannot add twists {} and {}",
                self.twist, other.twist
            )));
        }
        let lo = self.min_power.min(other.min_power);
        let hi = self.max_power().max(other.max_power());
        let coeffs = (lo..=hi).map(|k| self.coeff(k) + other.coeff(k)).collect();
        Ok(TwistedLaurent::new(self.twist, lo, coeffs))
    }

    pub fn scale(&self, s: C64) -> Self {
        TwistedLaurent::new(
            self.twist,
            self.min_power,
            self.coeffs.iter().map(|c| c * s).collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut coeffs = vec![ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        TwistedLaurent::new(
            self.twist + other.twist,
            self.min_power + other.min_power,
            coeffs,
        )
    }

    /// Exponent of the mode `ζ^{γ+2k}`.
    fn mode_exponent(&self, k: i64) -> C64 {
        self.twist + 2.0 * k as f64
    }

    /// `f(q^s ζ)`.
    pub fn shift(&self, s: f64, ln_q: C64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let k = self.min_power + i as i64;
                c * (s * self.mode_exponent(k) * ln_q).exp()
            })
            .collect();
        TwistedLaurent::new(self.twist, self.min_power, coeffs)
    }

    /// `Δ f(ζ) = f(qζ) - f(q^{-1}ζ)`.
    pub fn delta(&self, ln_q: C64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * mode_gap(self.mode_exponent(self.min_power + i as i64), ln_q))
            .collect();
        TwistedLaurent::new(self.twist, self.min_power, coeffs)
    }

    /// The mode-wise inverse of [`Self::delta`].
    pub fn delta_inverse(&self, ln_q: C64) -> Result<Self> {
        let mut coeffs = Vec::with_capacity(self.coeffs.len());
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = self.min_power + i as i64;
            let g = mode_gap(self.mode_exponent(k), ln_q);
            if g.norm() < 1e-12 {
                if c.norm() == 0.0 {
                    coeffs.push(ZERO);
                    continue;
                }
                return Err(Error::DegenerateTwist {
                    twist: self.twist,
                    mode: k,
                });
            }
            coeffs.push(c / g);
        }
        Ok(TwistedLaurent::new(self.twist, self.min_power, coeffs))
    }
}

/// `q^x - q^{-x}`.
pub(crate) fn mode_gap(x: C64, ln_q: C64) -> C64 {
    (x * ln_q).exp() - (-x * ln_q).exp()
}

/// Parses `"re+imi"`, `"re-imi"`, `"re"`, `"imi"` or `"i"`.
pub fn parse_complex(s: &str) -> Result<C64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::InvalidInput(format!("cannot parse complex number {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return t.parse::<f64>().map(|re| C64::new(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let parse_im = |x: &str| -> Result<f64> {
        match x {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => x.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| bad())?;
            Ok(C64::new(re, parse_im(&body[k..])?))
        }
        None => Ok(C64::new(0.0, parse_im(body)?)),
    }
}

/// 17 significant digits with trailing zeros dropped, so `1.0` prints as `1`
/// and `0.25` as `2.5e-1`.
pub fn format_real(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.16e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent form");
    let mantissa = if mantissa.contains('.') {
        mantissa.trim_end_matches('0').trim_end_matches('.')
    } else {
        mantissa
    };
    if exp == "0" {
        mantissa.to_string()
    } else {
        format!("{mantissa}e{exp}")
    }
}

/// Formats as `"re+imi"`, inverse of [`parse_complex`]. Purely real values
/// drop the imaginary part.
pub fn format_complex(z: C64) -> String {
    if z.im == 0.0 && !z.im.is_sign_negative() {
        return format_real(z.re);
    }
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", format_real(z.re), sign, format_real(z.im.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn p0_like() -> ModelParams {
        ModelParams::new(
            c(0.6, 0.25),
            vec![Site::spin_half(c(1.1, 0.0)), Site::spin_half(c(0.9, 0.0))],
            c(0.4, 0.0),
            c(0.35, 0.0),
        )
        .unwrap()
    }

    #[test]
    fn psi_values() {
        assert!(eval_psi(c(-1.0, 0.0), c(0.3, 0.0)).unwrap().norm() < 1e-15);
        assert!((eval_psi(c(3.0, 0.0), ZERO).unwrap() - ONE).norm() < 1e-15);
        let z = Zeta::from_z2(c(2.5, 1.0));
        let a = c(0.4, 0.0);
        let inv = Zeta::from_ln(-z.ln);
        assert!((psi(inv, -a).unwrap() + psi(z, a).unwrap()).norm() < 1e-14);
        assert!(matches!(eval_psi(ONE, a), Err(Error::PoleHit(_))));
    }

    #[test]
    fn single_site_weights() {
        let q = c(0.7, 0.2);
        let p = ModelParams::new(q, vec![Site::spin_half(ONE), Site::spin_half(ONE)], ZERO, ZERO);
        // two identical sites collide
        assert!(matches!(p, Err(Error::PoleCollision(_))));
        let p = ModelParams::chain(q.ln(), vec![Site::spin_half(ONE)]).unwrap();
        let z = c(0.37, -1.2);
        let q2 = q * q;
        assert!((p.a_poly().eval(z) - (z * q2 - ONE)).norm() < 1e-14);
        assert!((p.d_poly().eval(z) - (z - ONE)).norm() < 1e-14);
        assert!((p.w_poly().eval(z) - (ONE - z * q2)).norm() < 1e-14);
        let phi = ONE / ((z - ONE) * (z * q2 - ONE));
        assert!((p.phi(z) - phi).norm() < 1e-14);
        let poles = p.contour_poles(Contour::Site(0)).unwrap();
        assert!((poles[0] - ONE).norm() < 1e-14);
        assert!((poles[1] - ONE / q2).norm() < 1e-14);
    }

    #[test]
    fn phi_functional_equation_and_wdphi() {
        let p = p0_like();
        let zeta = Zeta::from_z2(c(1.7, -0.3));
        let zq = zeta.shifted(1.0, p.ln_q).z2();
        let (a, d) = (p.a_poly(), p.d_poly());
        let lhs = a.eval(zq) * p.phi(zq);
        let rhs = d.eval(zeta.z2()) * p.phi(zeta.z2());
        assert!((lhs - rhs).norm() < 1e-13 * rhs.norm());
        let z = c(0.3, 0.8);
        let wdphi = p.w_poly().eval(z) * d.eval(z) * p.phi(z);
        assert!((wdphi - ONE).norm() < 1e-13);
    }

    #[test]
    fn total_residue_vanishes() {
        let p = p0_like();
        let h = |z: C64| ONE + 0.5 * z;
        let total: C64 = Contour::finite(p.n())
            .into_iter()
            .chain([Contour::Infinity])
            .map(|g| p.integrate(h, g).unwrap())
            .sum();
        assert!(total.norm() < 1e-14);
        let count: usize = (0..p.n())
            .map(|m| p.contour_poles(Contour::Site(m)).unwrap().len())
            .sum();
        assert_eq!(count, 4);
    }

    #[test]
    fn delta_pair() {
        let lq = c(0.6, 0.25).ln();
        let f = TwistedLaurent::new(c(0.7, 0.0), 0, vec![c(2.0, 0.0), c(3.0, 0.0)]);
        let back = f.delta(lq).delta_inverse(lq).unwrap();
        let z = Zeta::from_z2(c(0.4, 0.9));
        assert!((back.eval(z) - f.eval(z)).norm() < 1e-14);
        let mono = TwistedLaurent::monomial(c(0.7, 0.0), 0);
        let want = mode_gap(c(0.7, 0.0), lq) * z.pow(c(0.7, 0.0));
        assert!((mono.delta(lq).eval(z) - want).norm() < 1e-14);
        // q^{2γ} = 1 for γ = π i / ln q
        let res = TwistedLaurent::monomial(C64::new(0.0, PI) / lq, 0);
        assert!(matches!(res.delta_inverse(lq), Err(Error::DegenerateTwist { .. })));
    }

    #[test]
    fn add_requires_equal_twist() {
        let f = TwistedLaurent::monomial(c(0.5, 0.0), 1);
        let g = TwistedLaurent::monomial(c(0.25, 0.0), 1);
        assert!(f.try_add(&g).is_err());
        let h = f.mul(&g);
        assert_eq!(h.min_power, 2);
        assert!((h.twist - c(0.75, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn complex_round_trip() {
        for s in ["1.5+2i", "-0.25-1e-3i", "3", "-2i", "i", "1e-3+4e+2i"] {
            let z = parse_complex(s).unwrap();
            assert_eq!(parse_complex(&format_complex(z)).unwrap(), z, "{s}");
        }
        assert_eq!(parse_complex("0.6+0.25i").unwrap(), c(0.6, 0.25));
        assert!(parse_complex("abc").is_err());
        assert_eq!(format_complex(ONE), "1");
        assert_eq!(format_complex(c(0.25, -3.0)), "2.5e-1-3i");
        assert_eq!(format_real(0.1 + 0.2), "3.0000000000000004e-1");
    }
}
