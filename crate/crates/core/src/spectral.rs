//! Dominant eigendata of the twisted transfer matrix, its eigenvalue as a
//! polynomial in `ζ²`, and the Baxter polynomials `Q±`.

use crate::error::{Error, Result};
use crate::model::{ModelParams, Zeta, C64, ONE, ZERO};
use crate::operators::{oscillator_trace_apply, sector_indices, transfer};
use crate::poly::Poly;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

const POWER_ITERATION_CAP: usize = 20_000;
const GAP_THRESHOLD: f64 = 1.0 + 1e-6;
const SEED: u64 = 0x5eed;

/// Dominant right/left eigenpair of `T_M(1, λ)` in one sector.
///
/// The left vector is normalised so that the bilinear pairing `left·right`
/// equals one.
#[derive(Clone, Debug)]
pub struct EigenData {
    pub lambda: C64,
    pub sector: i64,
    pub value: C64,
    pub right: DVector<C64>,
    pub left: DVector<C64>,
    /// `|λ1| / |λ2|` inside the sector, infinite for a one-dimensional sector.
    pub gap_ratio: f64,
}

fn bilinear(u: &DVector<C64>, v: &DVector<C64>) -> C64 {
    u.iter().zip(v.iter()).map(|(a, b)| a * b).sum()
}

fn dominant_of_block(block: &DMatrix<C64>, tol: f64) -> Result<(C64, DVector<C64>)> {
    let k = block.nrows();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut v = DVector::from_fn(k, |_, _| C64::new(rng.random::<f64>() + 0.5, rng.random::<f64>() - 0.5));
    v /= C64::new(v.norm(), 0.0);
    let mut prev = ZERO;
    let mut estimate = None;
    for _ in 0..POWER_ITERATION_CAP {
        let w = block * &v;
        let rq = v.dotc(&w);
        let nrm = w.norm();
        if nrm == 0.0 {
            return Err(Error::NotConverged {
                what: "power iteration",
                iterations: 0,
            });
        }
        v = w / C64::new(nrm, 0.0);
        if (rq - prev).norm() <= tol * rq.norm() {
            estimate = Some(rq);
            break;
        }
        prev = rq;
    }
    let mu = estimate.ok_or(Error::NotConverged {
        what: "power iteration",
        iterations: POWER_ITERATION_CAP,
    })?;
    // inverse iteration polishes the vector to machine precision
    let shift = mu * (1.0 + 1e-12);
    let lu = (block - DMatrix::identity(k, k) * shift).lu();
    for _ in 0..4 {
        if let Some(w) = lu.solve(&v) {
            let nrm = w.norm();
            if nrm.is_finite() && nrm > 0.0 {
                v = w / C64::new(nrm, 0.0);
            }
        }
    }
    let value = v.dotc(&(block * &v)) / v.dotc(&v);
    Ok((value, v))
}

/// Dominant eigenpair of `T_M(1, λ)` restricted to the sector of `params`.
pub fn dominant_eigendata(params: &ModelParams, lambda: C64) -> Result<EigenData> {
    let full = transfer(params, Zeta::one(), lambda)?;
    let idx = sector_indices(&params.sites, params.sector);
    if idx.is_empty() {
        return Err(Error::EmptySector(params.sector));
    }
    let k = idx.len();
    let block = DMatrix::from_fn(k, k, |i, j| full[(idx[i], idx[j])]);
    let gap_ratio = if k == 1 {
        f64::INFINITY
    } else {
        let mut mods: Vec<f64> = block
            .clone()
            .schur()
            .eigenvalues()
            .ok_or(Error::NotConverged {
                what: "Schur decomposition",
                iterations: 0,
            })?
            .iter()
            .map(|z| z.norm())
            .collect();
        mods.sort_by(|a, b| b.total_cmp(a));
        mods[0] / mods[1]
    };
    if gap_ratio < GAP_THRESHOLD {
        return Err(Error::NoGap(1.0 / gap_ratio));
    }
    let tol = params.tol.convergence;
    let (value, vr) = dominant_of_block(&block, tol)?;
    let (_, vl) = dominant_of_block(&block.transpose(), tol)?;
    let dim = full.nrows();
    let mut right = DVector::from_element(dim, ZERO);
    let mut left = DVector::from_element(dim, ZERO);
    for (i, &g) in idx.iter().enumerate() {
        right[g] = vr[i];
        left[g] = vl[i];
    }
    let pairing = bilinear(&left, &right);
    if pairing.norm() < 1e-14 {
        return Err(Error::NotConverged {
            what: "left eigenvector pairing",
            iterations: 0,
        });
    }
    left /= pairing;
    let data = EigenData {
        lambda,
        sector: params.sector,
        value,
        right,
        left,
        gap_ratio,
    };
    let res = data.residuals(&full);
    if res.0 > params.tol.identity || res.1 > params.tol.identity {
        return Err(Error::NotConverged {
            what: "dominant eigenpair",
            iterations: POWER_ITERATION_CAP,
        });
    }
    Ok(data)
}

impl EigenData {
    /// Relative residuals `‖Tv - tv‖/‖tv‖` for the right and left vectors.
    pub fn residuals(&self, t: &DMatrix<C64>) -> (f64, f64) {
        let scale = self.value.norm();
        let r = (t * &self.right - &self.right * self.value).norm() / (self.right.norm() * scale);
        let l = (t.transpose() * &self.left - &self.left * self.value).norm()
            / (self.left.norm() * scale);
        (r, l)
    }

    /// `⟨left| M |right⟩ / ⟨left|right⟩`, bilinear.
    pub fn rayleigh(&self, m: &DMatrix<C64>) -> C64 {
        bilinear(&self.left, &(m * &self.right)) / bilinear(&self.left, &self.right)
    }
}

/// Pairing `⟨u|v⟩` without complex conjugation.
pub fn overlap(u: &DVector<C64>, v: &DVector<C64>) -> C64 {
    bilinear(u, v)
}

/// Interpolated `T(ζ, λ)` and its held-out relative residual.
pub fn transfer_poly(params: &ModelParams, eigen: &EigenData) -> Result<(Poly, f64)> {
    let n = params.n();
    let nodes = n + 1;
    let ln2 = 2f64.ln();
    let sample = |phase: f64| -> Result<C64> {
        let zeta = Zeta::from_ln(0.5 * C64::new(ln2, phase));
        Ok(eigen.rayleigh(&transfer(params, zeta, eigen.lambda)?))
    };
    let mut vals = Vec::with_capacity(nodes);
    for k in 0..nodes {
        vals.push(sample(2.0 * PI * k as f64 / nodes as f64)?);
    }
    // discrete Fourier inversion on the circle |ζ²| = 2
    let coeffs = (0..nodes)
        .map(|j| {
            let s: C64 = vals
                .iter()
                .enumerate()
                .map(|(k, v)| v * C64::from_polar(1.0, -2.0 * PI * (j * k) as f64 / nodes as f64))
                .sum();
            s / (nodes as f64 * 2f64.powi(j as i32))
        })
        .collect();
    let poly = Poly(coeffs);
    let phase = PI / nodes as f64;
    let held = sample(phase)?;
    let pred = poly.eval(C64::from_polar(2.0, phase));
    let residual = (held - pred).norm() / held.norm().max(1e-300);
    if residual > 1e-9 {
        return Err(Error::InterpolationInconsistent(residual));
    }
    Ok((poly, residual))
}

/// Twist exponent of `Q±`: `±(λ - σ)`.
pub fn q_twist(lambda: C64, sector: i64, sign: i32) -> C64 {
    (lambda - sector as f64) * sign as f64
}

/// Baxter defect `d(z) q^g P(q²z) + a(z) q^{-g} P(q^{-2}z) - T(z) P(z)` for
/// `Q(ζ) = ζ^g P(ζ²)`.
pub fn baxter_defect(params: &ModelParams, t_poly: &Poly, twist: C64, p: &Poly) -> Poly {
    let q2 = params.q_pow_f(2.0);
    let up = &params.d_poly() * &p.rescale_arg(q2);
    let down = &params.a_poly() * &p.rescale_arg(ONE / q2);
    let lhs = &up.scale(params.q_pow(twist)) + &down.scale(params.q_pow(-twist));
    &lhs - &(t_poly * p)
}

/// Relative size of the Baxter defect.
pub fn baxter_residual(params: &ModelParams, t_poly: &Poly, twist: C64, p: &Poly) -> f64 {
    let q2 = params.q_pow_f(2.0);
    let scale = (&params.d_poly() * &p.rescale_arg(q2)).norm()
        + (&params.a_poly() * &p.rescale_arg(ONE / q2)).norm()
        + (t_poly * p).norm();
    baxter_defect(params, t_poly, twist, p).norm() / scale
}

/// Solves the Baxter equation for the stripped polynomial of `Q±` as the
/// nullspace of the coefficient-matching system.
pub fn solve_baxter(params: &ModelParams, t_poly: &Poly, lambda: C64, sign: i32) -> Result<Poly> {
    let deg = params.total_spin() + sign as i64 * params.sector;
    if deg < 0 {
        return Err(Error::InvalidInput(format!("negative Q degree {deg}")));
    }
    let deg = deg as usize;
    let twist = q_twist(lambda, params.sector, sign);
    let a = params.a_poly();
    let d = params.d_poly();
    let n = params.n();
    let rows = n + deg + 1;
    let mut m = DMatrix::<C64>::zeros(rows, deg + 1);
    for k in 0..=deg {
        let e = twist + 2.0 * k as f64;
        let col = &(&d.scale(params.q_pow(e)) + &a.scale(params.q_pow(-e))) - t_poly;
        for (i, c) in col.coeffs().iter().enumerate() {
            m[(k + i, k)] += c;
        }
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.ok_or(Error::DegenerateNullspace(0))?;
    let sv = &svd.singular_values;
    let smax = sv.max();
    let (imin, smin) = sv
        .iter()
        .enumerate()
        .fold((0, f64::MAX), |acc, (i, &s)| if s < acc.1 { (i, s) } else { acc });
    let null_tol = 1e-9 * smax.max(1e-300);
    let nullity = sv.iter().filter(|&&s| s <= null_tol.max(10.0 * smin)).count();
    if smin > null_tol {
        return Err(Error::DegenerateNullspace(0));
    }
    if nullity != 1 {
        return Err(Error::DegenerateNullspace(nullity));
    }
    let coeffs: Vec<C64> = v_t.row(imin).iter().map(|c| c.conj()).collect();
    Ok(Poly(coeffs))
}

/// `Wr(z) = q^{-γ} P⁺(z) P⁻(q²z) - q^γ P⁻(z) P⁺(q²z)`, the stripped quantum
/// Wronskian `Q⁺(ζ)Q⁻(qζ) - Q⁻(ζ)Q⁺(qζ)`.
pub fn wronskian_poly(params: &ModelParams, gamma: C64, plus: &Poly, minus: &Poly) -> Poly {
    let q2 = params.q_pow_f(2.0);
    let first = (plus * &minus.rescale_arg(q2)).scale(params.q_pow(-gamma));
    let second = (minus * &plus.rescale_arg(q2)).scale(params.q_pow(gamma));
    &first - &second
}

/// `W(z) / (q^γ - q^{-γ})`.
pub fn wronskian_target(params: &ModelParams, gamma: C64) -> Result<Poly> {
    let gap = params.q_diff(gamma);
    if gap.norm() < 1e-12 {
        return Err(Error::DegenerateTwist {
            twist: gamma,
            mode: 0,
        });
    }
    Ok(params.w_poly().scale(ONE / gap))
}

/// Coefficient-wise relative residual of the quantum Wronskian identity.
pub fn wronskian_residual(params: &ModelParams, gamma: C64, plus: &Poly, minus: &Poly) -> Result<f64> {
    let target = wronskian_target(params, gamma)?;
    let wr = wronskian_poly(params, gamma, plus, minus);
    Ok((&wr - &target).norm() / target.norm())
}

/// Spectral data for one twist: eigenpair, `T` polynomial and normalised `Q±`.
#[derive(Clone, Debug)]
pub struct SpectralData {
    pub eigen: EigenData,
    pub t_poly: Poly,
    pub heldout_residual: f64,
    /// Twist of `Q⁺`, `λ - σ`; `Q⁻` carries the opposite twist.
    pub gamma: C64,
    /// `Q⁺(ζ) = ζ^γ plus(ζ²)`.
    pub plus: Poly,
    /// `Q⁻(ζ) = ζ^{-γ} minus(ζ²)`.
    pub minus: Poly,
}

impl SpectralData {
    pub fn compute(params: &ModelParams, lambda: C64) -> Result<Self> {
        let eigen = dominant_eigendata(params, lambda)?;
        let (t_poly, heldout_residual) = transfer_poly(params, &eigen)?;
        let gamma = q_twist(lambda, params.sector, 1);
        let plus = solve_baxter(params, &t_poly, lambda, 1)?;
        let minus = solve_baxter(params, &t_poly, lambda, -1)?;
        let target = wronskian_target(params, gamma)?;
        let wr = wronskian_poly(params, gamma, &plus, &minus);
        // least-squares scale, then check that the ratio really is constant
        let num: C64 = wr.coeffs().iter().zip(target.coeffs()).map(|(w, t)| w.conj() * t).sum();
        let den: f64 = wr.coeffs().iter().map(|w| w.norm_sqr()).sum();
        if den == 0.0 {
            return Err(Error::WronskianMismatch(f64::INFINITY));
        }
        let scale = num / den;
        let mismatch = (&wr.scale(scale) - &target).norm() / target.norm();
        if mismatch > 1e-8 {
            return Err(Error::WronskianMismatch(mismatch));
        }
        Ok(SpectralData {
            eigen,
            t_poly,
            heldout_residual,
            gamma,
            plus,
            minus: minus.scale(scale),
        })
    }

    pub fn lambda(&self) -> C64 {
        self.eigen.lambda
    }

    pub fn t(&self, z: C64) -> C64 {
        self.t_poly.eval(z)
    }

    pub fn q_plus(&self, zeta: Zeta) -> C64 {
        zeta.pow(self.gamma) * self.plus.eval(zeta.z2())
    }

    pub fn q_minus(&self, zeta: Zeta) -> C64 {
        zeta.pow(-self.gamma) * self.minus.eval(zeta.z2())
    }

    /// Baxter residuals for `Q⁺` and `Q⁻`.
    pub fn baxter_residuals(&self, params: &ModelParams) -> (f64, f64) {
        (
            baxter_residual(params, &self.t_poly, self.gamma, &self.plus),
            baxter_residual(params, &self.t_poly, -self.gamma, &self.minus),
        )
    }

    pub fn wronskian_residual(&self, params: &ModelParams) -> Result<f64> {
        wronskian_residual(params, self.gamma, &self.plus, &self.minus)
    }
}

/// Eigenvalue of the oscillator-trace `Q` operator on the dominant vector,
/// `ζ^{λ-σ} Tr_A(L_n ⋯ L_1 q^{2λD})`, for spin-1/2 chains.
///
/// The truncation from `params.osc_truncation` is doubled once as a
/// convergence check.
pub fn oscillator_q_value(params: &ModelParams, zeta: Zeta, eigen: &EigenData) -> Result<C64> {
    let damping = params.q_pow(2.0 * eigen.lambda).norm();
    if damping >= 1.0 {
        return Err(Error::TraceDivergent(damping));
    }
    let n0 = params.osc_truncation;
    let value = |trunc: usize| -> Result<C64> {
        let w = oscillator_trace_apply(params, zeta, eigen.lambda, trunc, &eigen.right)?;
        Ok(zeta.pow(q_twist(eigen.lambda, params.sector, 1)) * overlap(&eigen.left, &w)
            / overlap(&eigen.left, &eigen.right))
    };
    let coarse = value(n0)?;
    let fine = value(2 * n0)?;
    if (fine - coarse).norm() > 1e-9 * fine.norm() {
        return Err(Error::NotConverged {
            what: "oscillator trace",
            iterations: 2 * n0,
        });
    }
    Ok(fine)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn p0_eigendata() {
        let p = fixtures::p0();
        let e = dominant_eigendata(&p, p.kappa).unwrap();
        let t = transfer(&p, Zeta::one(), p.kappa).unwrap();
        let (r, l) = e.residuals(&t);
        assert!(r < 1e-10 && l < 1e-10, "{r} {l}");
        assert!(e.gap_ratio > 1.0);
    }

    #[test]
    fn p0_spectral_identities() {
        let p = fixtures::p0();
        for lam in [p.kappa, p.kappa + p.alpha] {
            let s = SpectralData::compute(&p, lam).unwrap();
            assert!(s.heldout_residual < 1e-9);
            let (bp, bm) = s.baxter_residuals(&p);
            assert!(bp < 1e-10 && bm < 1e-10, "{bp} {bm}");
            assert!(s.wronskian_residual(&p).unwrap() < 1e-10);
            assert_eq!(s.plus.degree(), 1);
            assert_eq!(s.minus.degree(), 1);
        }
    }

    #[test]
    fn transfer_poly_even_in_twist() {
        let p = fixtures::p0();
        let a = SpectralData::compute(&p, p.kappa).unwrap();
        let b = SpectralData::compute(&p, -p.kappa).unwrap();
        assert!((&a.t_poly - &b.t_poly).norm() < 1e-10 * a.t_poly.norm());
    }

    #[test]
    fn oscillator_matches_baxter_up_to_gauge() {
        let p = fixtures::p0();
        let s = SpectralData::compute(&p, p.kappa).unwrap();
        let pts = [
            C64::new(0.5, 0.3),
            C64::new(1.4, -0.2),
            C64::new(-0.7, 0.9),
            C64::new(0.2, -0.6),
            C64::new(1.1, 1.1),
        ];
        let ratios: Vec<C64> = pts
            .iter()
            .map(|&z| {
                let zeta = Zeta::from_z2(z);
                oscillator_q_value(&p, zeta, &s.eigen).unwrap() / s.q_plus(zeta)
            })
            .collect();
        for r in &ratios[1..] {
            assert!((r - ratios[0]).norm() < 1e-8 * ratios[0].norm());
        }
    }

    #[test]
    fn divergent_trace_rejected() {
        let p = fixtures::p0();
        let s = SpectralData::compute(&p, p.kappa).unwrap();
        let mut e = s.eigen.clone();
        // |q^{2λ}| ≥ 1 for this twist since |q| < 1
        e.lambda = C64::new(-0.5, 0.0);
        assert!(matches!(
            oscillator_q_value(&p, Zeta::one(), &e),
            Err(Error::TraceDivergent(_))
        ));
    }
}
