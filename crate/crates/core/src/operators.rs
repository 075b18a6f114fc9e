//! Representation matrices, L-operators, monodromy and transfer matrices on
//! the Matsubara space.
//!
//! Tensor ordering: site 1 is the most significant factor of the Kronecker
//! product. Each site uses the basis `v_0, …, v_{2s}` with `H v_j = (2s-2j) v_j`,
//! so the local `S³` eigenvalue of `v_j` is `s - j`.

use crate::error::{Error, Result};
use crate::model::{ModelParams, Site, Zeta, C64, ONE};
use nalgebra::{DMatrix, DVector};

/// `E, F, H` on the `(2s+1)`-dimensional representation.
#[derive(Clone, Debug)]
pub struct SiteRep {
    pub two_spin: u32,
    pub e: DMatrix<C64>,
    pub f: DMatrix<C64>,
    /// Diagonal of `H`.
    pub h: Vec<f64>,
}

/// `[x]_q = (q^x - q^{-x}) / (q - q^{-1})`.
pub fn q_number(x: f64, ln_q: C64) -> C64 {
    let qx = (x * ln_q).exp();
    let q = ln_q.exp();
    (qx - ONE / qx) / (q - ONE / q)
}

impl SiteRep {
    pub fn new(two_spin: u32, ln_q: C64) -> Result<Self> {
        if two_spin == 0 {
            return Err(Error::InvalidInput("spin must be positive".into()));
        }
        let d = two_spin as usize + 1;
        let mut e = DMatrix::zeros(d, d);
        let mut f = DMatrix::zeros(d, d);
        for j in 0..d {
            if j >= 1 {
                e[(j - 1, j)] = q_number(j as f64, ln_q);
            }
            if j + 1 < d {
                f[(j + 1, j)] = q_number((two_spin as usize - j) as f64, ln_q);
            }
        }
        let h = (0..d).map(|j| two_spin as f64 - 2.0 * j as f64).collect();
        Ok(SiteRep { two_spin, e, f, h })
    }

    pub fn dim(&self) -> usize {
        self.h.len()
    }

    pub fn h_matrix(&self) -> DMatrix<C64> {
        DMatrix::from_diagonal(&DVector::from_iterator(
            self.dim(),
            self.h.iter().map(|&x| C64::new(x, 0.0)),
        ))
    }

    /// `q^{c (H + shift)}` as a diagonal matrix.
    fn q_h(&self, c: f64, shift: f64, ln_q: C64) -> DMatrix<C64> {
        DMatrix::from_diagonal(&DVector::from_iterator(
            self.dim(),
            self.h.iter().map(|&x| (c * (x + shift) * ln_q).exp()),
        ))
    }
}

/// A 2×2 auxiliary block matrix over some quantum space.
#[derive(Clone, Debug)]
pub struct AuxBlocks {
    pub blocks: [[DMatrix<C64>; 2]; 2],
}

impl AuxBlocks {
    pub fn identity(dim: usize) -> Self {
        AuxBlocks {
            blocks: [
                [DMatrix::identity(dim, dim), DMatrix::zeros(dim, dim)],
                [DMatrix::zeros(dim, dim), DMatrix::identity(dim, dim)],
            ],
        }
    }

    pub fn a(&self) -> &DMatrix<C64> {
        &self.blocks[0][0]
    }
    pub fn b(&self) -> &DMatrix<C64> {
        &self.blocks[0][1]
    }
    pub fn c(&self) -> &DMatrix<C64> {
        &self.blocks[1][0]
    }
    pub fn d(&self) -> &DMatrix<C64> {
        &self.blocks[1][1]
    }

    /// Auxiliary matrix product `self · rhs`.
    pub fn mul(&self, rhs: &AuxBlocks) -> AuxBlocks {
        let entry = |a: usize, b: usize| {
            &self.blocks[a][0] * &rhs.blocks[0][b] + &self.blocks[a][1] * &rhs.blocks[1][b]
        };
        AuxBlocks {
            blocks: [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]],
        }
    }

    /// Full matrix with the auxiliary index as the most significant factor.
    pub fn to_matrix(&self) -> DMatrix<C64> {
        let d = self.blocks[0][0].nrows();
        let mut out = DMatrix::zeros(2 * d, 2 * d);
        for a in 0..2 {
            for b in 0..2 {
                out.view_mut((a * d, b * d), (d, d)).copy_from(&self.blocks[a][b]);
            }
        }
        out
    }
}

/// The L-operator of one site at `x = ζ/τ`:
///
/// ```text
/// q^{1/2} ( x² q^{(H+1)/2} - q^{-(H+1)/2}     (q-q⁻¹) x F q^{(H-1)/2}        )
///         ( (q-q⁻¹) x q^{-(H-1)/2} E        x² q^{-(H-1)/2} - q^{(H-1)/2} )
/// ```
pub fn build_l(rep: &SiteRep, x: Zeta, ln_q: C64) -> AuxBlocks {
    let xv = x.value();
    let x2 = x.z2();
    let half = (0.5 * ln_q).exp();
    let eta = half * (ln_q.exp() - (-ln_q).exp());
    let a = (rep.q_h(0.5, 1.0, ln_q) * x2 - rep.q_h(-0.5, 1.0, ln_q)) * half;
    let b = &rep.f * rep.q_h(0.5, -1.0, ln_q) * (eta * xv);
    let c = rep.q_h(-0.5, -1.0, ln_q) * &rep.e * (eta * xv);
    let d = (rep.q_h(-0.5, -1.0, ln_q) * x2 - rep.q_h(0.5, -1.0, ln_q)) * half;
    AuxBlocks {
        blocks: [[a, b], [c, d]],
    }
}

/// Dimensions of the site spaces.
pub fn site_dims(sites: &[Site]) -> Vec<usize> {
    sites.iter().map(Site::dim).collect()
}

/// `1 ⊗ … ⊗ op ⊗ … ⊗ 1` with `op` on factor `k`.
pub fn embed(op: &DMatrix<C64>, k: usize, dims: &[usize]) -> DMatrix<C64> {
    let left: usize = dims[..k].iter().product();
    let right: usize = dims[k + 1..].iter().product();
    let inner = DMatrix::<C64>::identity(right, right);
    let outer = DMatrix::<C64>::identity(left, left);
    outer.kronecker(&op.kronecker(&inner))
}

/// Ordered monodromy `L_n(ζ/τ_n) ⋯ L_1(ζ/τ_1)` as auxiliary blocks over `H_M`.
pub fn monodromy(params: &ModelParams, zeta: Zeta) -> Result<AuxBlocks> {
    let dims = site_dims(&params.sites);
    let total: usize = dims.iter().product();
    let mut t = AuxBlocks::identity(total);
    for (m, site) in params.sites.iter().enumerate() {
        let rep = SiteRep::new(site.two_spin, params.ln_q)?;
        let x = zeta.ratio(&Zeta::from_zeta(site.tau));
        let l = build_l(&rep, x, params.ln_q);
        let full = AuxBlocks {
            blocks: [
                [embed(l.a(), m, &dims), embed(l.b(), m, &dims)],
                [embed(l.c(), m, &dims), embed(l.d(), m, &dims)],
            ],
        };
        t = full.mul(&t);
    }
    Ok(t)
}

/// `T_M(ζ, λ) = q^λ A(ζ) + q^{-λ} D(ζ)`.
pub fn transfer(params: &ModelParams, zeta: Zeta, lambda: C64) -> Result<DMatrix<C64>> {
    let t = monodromy(params, zeta)?;
    Ok(transfer_from_blocks(params, &t, lambda))
}

pub fn transfer_from_blocks(params: &ModelParams, t: &AuxBlocks, lambda: C64) -> DMatrix<C64> {
    t.a() * params.q_pow(lambda) + t.d() * params.q_pow(-lambda)
}

/// Diagonal of total `S³`, for chains whose total spin is an integer.
pub fn total_sz(sites: &[Site]) -> Vec<i64> {
    let mut out = vec![0i64];
    for s in sites {
        // twice the local S³ is 2s - 2j
        out = out
            .iter()
            .flat_map(|&acc| (0..s.dim()).map(move |j| acc + s.two_spin as i64 - 2 * j as i64))
            .collect();
    }
    out.into_iter().map(|x| x / 2).collect()
}

/// Basis indices with total `S³ = σ`.
pub fn sector_indices(sites: &[Site], sigma: i64) -> Vec<usize> {
    total_sz(sites)
        .into_iter()
        .enumerate()
        .filter(|&(_, s)| s == sigma)
        .map(|(i, _)| i)
        .collect()
}

/// Spin reversal `v_j → v_{2s-j}` on every site.
pub fn spin_reversal(sites: &[Site]) -> DMatrix<C64> {
    let dims = site_dims(sites);
    let total: usize = dims.iter().product();
    let mut out = DMatrix::zeros(total, total);
    for idx in 0..total {
        let mut rem = idx;
        let mut flipped = 0;
        let mut stride = total;
        for &d in &dims {
            stride /= d;
            let j = rem / stride;
            rem %= stride;
            flipped += (d - 1 - j) * stride;
        }
        out[(flipped, idx)] = ONE;
    }
    out
}

/// Truncated q-oscillator with `a|k⟩ = (1-q^{2k})|k-1⟩`, `a*|k⟩ = |k+1⟩`.
#[derive(Clone, Debug)]
pub struct Oscillator {
    pub a: DMatrix<C64>,
    pub a_dag: DMatrix<C64>,
    /// Diagonal of the number operator.
    pub number: Vec<f64>,
}

impl Oscillator {
    pub fn new(truncation: usize, ln_q: C64) -> Result<Self> {
        if truncation < 2 {
            return Err(Error::InvalidInput("oscillator truncation must be at least 2".into()));
        }
        let mut a = DMatrix::zeros(truncation, truncation);
        let mut a_dag = DMatrix::zeros(truncation, truncation);
        for k in 1..truncation {
            a[(k - 1, k)] = ONE - (2.0 * k as f64 * ln_q).exp();
            a_dag[(k, k - 1)] = ONE;
        }
        Ok(Oscillator {
            a,
            a_dag,
            number: (0..truncation).map(|k| k as f64).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.number.len()
    }

    /// `q^{c D + shift}` as a diagonal matrix.
    pub fn q_d(&self, c: C64, shift: f64, ln_q: C64) -> DMatrix<C64> {
        DMatrix::from_diagonal(&DVector::from_iterator(
            self.dim(),
            self.number.iter().map(|&k| ((c * k + shift) * ln_q).exp()),
        ))
    }

    /// Oscillator L-operator at `x = ζ/τ`; the 2×2 block index acts on a
    /// spin-1/2 site:
    ///
    /// ```text
    /// ( (1 - x² q^{2D+2}) q^{-D}   -x a q^D )
    /// ( -x a* q^{-D}                 q^D     )
    /// ```
    pub fn l_operator(&self, x: Zeta, ln_q: C64) -> AuxBlocks {
        let xv = x.value();
        let x2 = x.z2();
        let id = DMatrix::<C64>::identity(self.dim(), self.dim());
        let qd = self.q_d(ONE, 0.0, ln_q);
        let qmd = self.q_d(-ONE, 0.0, ln_q);
        let l11 = (id - self.q_d(2.0 * ONE, 2.0, ln_q) * x2) * &qmd;
        let l12 = &self.a * &qd * (-xv);
        let l21 = &self.a_dag * &qmd * (-xv);
        AuxBlocks {
            blocks: [[l11, l12], [l21, qd]],
        }
    }
}

/// `Tr_A(L_n ⋯ L_1 q^{2λD}) v` for a chain of spin-1/2 sites.
pub fn oscillator_trace_apply(
    params: &ModelParams,
    zeta: Zeta,
    lambda: C64,
    truncation: usize,
    v: &DVector<C64>,
) -> Result<DVector<C64>> {
    if params.sites.iter().any(|s| s.two_spin != 1) {
        return Err(Error::InvalidInput(
            "the oscillator construction is implemented for spin-1/2 sites only".into(),
        ));
    }
    let osc = Oscillator::new(truncation, params.ln_q)?;
    let n = params.n();
    let dims = vec![2usize; n];
    let hdim: usize = 1 << n;
    let odim = osc.dim();
    let mut op = osc.q_d(2.0 * lambda, 0.0, params.ln_q).kronecker(&DMatrix::identity(hdim, hdim));
    for (m, site) in params.sites.iter().enumerate() {
        let x = zeta.ratio(&Zeta::from_zeta(site.tau));
        let l = osc.l_operator(x, params.ln_q);
        let mut full = DMatrix::<C64>::zeros(odim * hdim, odim * hdim);
        for r in 0..2 {
            for c in 0..2 {
                let mut unit = DMatrix::<C64>::zeros(2, 2);
                unit[(r, c)] = ONE;
                full += l.blocks[r][c].kronecker(&embed(&unit, m, &dims));
            }
        }
        op = full * op;
    }
    let mut out = DVector::<C64>::zeros(hdim);
    for k in 0..odim {
        let block = op.view((k * hdim, k * hdim), (hdim, hdim));
        out += block * v;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn lq() -> C64 {
        c(0.6, 0.25).ln()
    }

    #[test]
    fn spin_half_rep_is_pauli() {
        let r = SiteRep::new(1, lq()).unwrap();
        assert_eq!(r.e[(0, 1)], ONE);
        assert_eq!(r.f[(1, 0)], ONE);
        assert_eq!(r.h, vec![1.0, -1.0]);
        let r1 = SiteRep::new(2, lq()).unwrap();
        assert_eq!(r1.h, vec![2.0, 0.0, -2.0]);
    }

    #[test]
    fn algebra_relations_spin_three_halves() {
        let r = SiteRep::new(3, lq()).unwrap();
        let h = r.h_matrix();
        let q = lq().exp();
        let qh = DMatrix::from_diagonal(&DVector::from_iterator(4, r.h.iter().map(|&x| (x * lq()).exp())));
        let qmh = DMatrix::from_diagonal(&DVector::from_iterator(4, r.h.iter().map(|&x| (-x * lq()).exp())));
        let rhs = (qh - qmh) / (q - ONE / q);
        let ef = &r.e * &r.f - &r.f * &r.e;
        assert!((ef - rhs).norm() < 1e-13);
        assert!((&h * &r.e - &r.e * &h - &r.e * c(2.0, 0.0)).norm() < 1e-13);
        assert!((&h * &r.f - &r.f * &h + &r.f * c(2.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn l_at_one_is_permutation() {
        let r = SiteRep::new(1, lq()).unwrap();
        let l = build_l(&r, Zeta::one(), lq()).to_matrix();
        let q = lq().exp();
        let eta = (0.5 * lq()).exp() * (q - ONE / q);
        let mut perm = DMatrix::<C64>::zeros(4, 4);
        for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
            perm[(i, j)] = eta;
        }
        assert!((l - perm).norm() < 1e-14);
    }

    #[test]
    fn l_at_inverse_q_is_rank_one() {
        let r = SiteRep::new(1, lq()).unwrap();
        let l = build_l(&r, Zeta::from_ln(-lq()), lq()).to_matrix();
        let sv = l.singular_values();
        let small = sv.iter().filter(|&&s| s < 1e-13).count();
        assert_eq!(small, 3);
    }

    #[test]
    fn b_for_one_site() {
        let p = ModelParams::chain(lq(), vec![Site::spin_half(c(1.1, 0.2))]).unwrap();
        let xi = Zeta::from_zeta(c(0.8, -0.3));
        let t = monodromy(&p, xi).unwrap();
        let q = p.q();
        let want = (0.5 * p.ln_q).exp() * (q - ONE / q) * xi.value() / c(1.1, 0.2);
        assert!((t.b()[(1, 0)] - want).norm() < 1e-14);
    }

    #[test]
    fn reversal_swaps_twist() {
        let p = ModelParams::chain(lq(), vec![Site::new(1, c(1.1, 0.0)), Site::new(2, c(0.9, 0.1))]).unwrap();
        let j = spin_reversal(&p.sites);
        let z = Zeta::from_z2(c(0.7, 0.4));
        let lam = c(0.3, -0.2);
        let t = transfer(&p, z, lam).unwrap();
        let tm = transfer(&p, z, -lam).unwrap();
        assert!((&j * t * &j - tm).norm() < 1e-12);
    }

    #[test]
    fn sector_bookkeeping() {
        let sites = vec![Site::new(1, ONE), Site::new(1, c(2.0, 0.0)), Site::new(2, c(3.0, 0.0))];
        let sz = total_sz(&sites);
        assert_eq!(sz.len(), 12);
        assert_eq!(&sz[..3], &[2, 1, 0]);
        assert_eq!(sector_indices(&sites, 2), vec![0]);
        assert_eq!(sector_indices(&sites, 0).len(), 4);
    }

    #[test]
    fn oscillator_relations() {
        let osc = Oscillator::new(12, lq()).unwrap();
        let q2 = (2.0 * lq()).exp();
        let comm = &osc.a * &osc.a_dag - &osc.a_dag * &osc.a * q2;
        for k in 0..11 {
            assert!((comm[(k, k)] - (ONE - q2)).norm() < 1e-13);
            let n = (&osc.a_dag * &osc.a)[(k, k)];
            assert!((n - (ONE - (2.0 * k as f64 * lq()).exp())).norm() < 1e-13);
        }
    }
}
