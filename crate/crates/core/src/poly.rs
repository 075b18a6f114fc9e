//! Dense univariate and bivariate polynomials with complex coefficients.

use crate::model::C64;
use nalgebra::DMatrix;
use std::ops::{Add, Mul, Neg, Sub};

/// Polynomial in one variable, coefficients stored from low to high degree.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly(pub Vec<C64>);

impl Poly {
    pub fn zero() -> Self {
        Poly(vec![C64::new(0.0, 0.0)])
    }

    pub fn constant(c: C64) -> Self {
        Poly(vec![c])
    }

    pub fn monomial(k: usize) -> Self {
        let mut c = vec![C64::new(0.0, 0.0); k + 1];
        c[k] = C64::new(1.0, 0.0);
        Poly(c)
    }

    /// `c1 z + c0`.
    pub fn linear(c0: C64, c1: C64) -> Self {
        Poly(vec![c0, c1])
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[C64]) -> Self {
        roots
            .iter()
            .fold(Poly::constant(C64::new(1.0, 0.0)), |acc, &r| {
                &acc * &Poly::linear(-r, C64::new(1.0, 0.0))
            })
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.0
    }

    pub fn coeff(&self, k: usize) -> C64 {
        self.0.get(k).copied().unwrap_or_default()
    }

    /// Formal degree: length of the coefficient vector minus one.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.0.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn scale(&self, s: C64) -> Self {
        Poly(self.0.iter().map(|c| c * s).collect())
    }

    /// `p(s z)`.
    pub fn rescale_arg(&self, s: C64) -> Self {
        let mut f = C64::new(1.0, 0.0);
        Poly(
            self.0
                .iter()
                .map(|c| {
                    let v = c * f;
                    f *= s;
                    v
                })
                .collect(),
        )
    }

    pub fn derivative(&self) -> Self {
        if self.0.len() <= 1 {
            return Poly::zero();
        }
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * k as f64)
                .collect(),
        )
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Drops trailing coefficients below `tol` relative to the largest one.
    pub fn trimmed(&self, tol: f64) -> Self {
        let scale = self.0.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut c = self.0.clone();
        while c.len() > 1 && c.last().is_some_and(|x| x.norm() <= tol * scale) {
            c.pop();
        }
        Poly(c)
    }

    /// Roots via the eigenvalues of the companion matrix.
    pub fn roots(&self) -> Vec<C64> {
        let p = self.trimmed(1e-14);
        let n = p.degree();
        if n == 0 {
            return Vec::new();
        }
        let lead = p.0[n];
        let comp = DMatrix::from_fn(n, n, |i, j| {
            if i == 0 {
                -p.0[n - 1 - j] / lead
            } else if i == j + 1 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        nalgebra::linalg::Schur::new(comp)
            .eigenvalues()
            .map(|v| v.iter().copied().collect())
            .unwrap_or_default()
    }

    /// Bivariate divided difference `(p(u) - p(w)) / (u - w)`.
    pub fn divided_difference(&self) -> Poly2 {
        let n = self.0.len().max(2) - 2;
        let mut out = Poly2::zeros(n, n);
        for (k, &c) in self.0.iter().enumerate().skip(1) {
            for i in 0..k {
                out.c[i][k - 1 - i] += c;
            }
        }
        out
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.0.len().max(rhs.0.len());
        Poly((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.0.len().max(rhs.0.len());
        Poly((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = vec![C64::new(0.0, 0.0); self.0.len() + rhs.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in rhs.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }
}

/// Polynomial in two variables `(z, w)`; `c[k][l]` multiplies `z^k w^l`.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly2 {
    pub c: Vec<Vec<C64>>,
}

impl Poly2 {
    /// Zero polynomial of degree `dz` in `z` and `dw` in `w`.
    pub fn zeros(dz: usize, dw: usize) -> Self {
        Poly2 {
            c: vec![vec![C64::new(0.0, 0.0); dw + 1]; dz + 1],
        }
    }

    pub fn deg_z(&self) -> usize {
        self.c.len() - 1
    }

    pub fn deg_w(&self) -> usize {
        self.c[0].len() - 1
    }

    pub fn get(&self, k: usize, l: usize) -> C64 {
        self.c
            .get(k)
            .and_then(|row| row.get(l))
            .copied()
            .unwrap_or_default()
    }

    pub fn eval(&self, z: C64, w: C64) -> C64 {
        self.c
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, row| acc * z + Poly(row.clone()).eval(w))
    }

    /// Coefficient of `w^l` as a polynomial in `z`.
    pub fn w_coefficient(&self, l: usize) -> Poly {
        Poly(self.c.iter().map(|row| row.get(l).copied().unwrap_or_default()).collect())
    }

    /// Multiplies by `s (z + w) / 2`.
    pub fn times_half_sum(&self, s: C64) -> Self {
        let mut out = Poly2::zeros(self.deg_z() + 1, self.deg_w() + 1);
        for (k, row) in self.c.iter().enumerate() {
            for (l, &v) in row.iter().enumerate() {
                out.c[k + 1][l] += 0.5 * s * v;
                out.c[k][l + 1] += 0.5 * s * v;
            }
        }
        out
    }

    /// Substitutes `z → s z`.
    pub fn rescale_z(&self, s: C64) -> Self {
        let mut f = C64::new(1.0, 0.0);
        let mut out = self.clone();
        for row in out.c.iter_mut() {
            for v in row.iter_mut() {
                *v *= f;
            }
            f *= s;
        }
        out
    }

    /// Multiplies by a polynomial in `z`.
    pub fn times_z_poly(&self, p: &Poly) -> Self {
        let mut out = Poly2::zeros(self.deg_z() + p.degree(), self.deg_w());
        for (k, row) in self.c.iter().enumerate() {
            for (i, &pc) in p.0.iter().enumerate() {
                for (l, &v) in row.iter().enumerate() {
                    out.c[k + i][l] += pc * v;
                }
            }
        }
        out
    }

    /// Divides the coefficient of each `z^k` by `f(k)`.
    pub fn map_z_modes<F: Fn(usize) -> C64>(&self, f: F) -> Self {
        let mut out = self.clone();
        for (k, row) in out.c.iter_mut().enumerate() {
            let d = f(k);
            for v in row.iter_mut() {
                *v /= d;
            }
        }
        out
    }

    pub fn add_scaled(&mut self, other: &Poly2, s: C64) {
        let dz = self.deg_z().max(other.deg_z());
        let dw = self.deg_w().max(other.deg_w());
        let mut out = Poly2::zeros(dz, dw);
        for k in 0..=dz {
            for l in 0..=dw {
                out.c[k][l] = self.get(k, l) + s * other.get(k, l);
            }
        }
        *self = out;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn divided_difference_matches_quotient() {
        let p = Poly(vec![c(1.0, 0.5), c(-2.0, 0.0), c(0.3, 0.1), c(0.0, 1.0)]);
        let dd = p.divided_difference();
        let (u, w) = (c(0.7, -0.2), c(-0.4, 1.1));
        let direct = (p.eval(u) - p.eval(w)) / (u - w);
        assert!((dd.eval(u, w) - direct).norm() < 1e-13);
    }

    #[test]
    fn roots_of_product() {
        let r = [c(1.0, 2.0), c(-0.5, 0.0), c(0.1, -0.3)];
        let p = Poly::from_roots(&r);
        let mut found = p.roots();
        for want in r {
            let (i, d) = found
                .iter()
                .enumerate()
                .map(|(i, x)| (i, (x - want).norm()))
                .fold((0, f64::MAX), |a, b| if b.1 < a.1 { b } else { a });
            assert!(d < 1e-12);
            found.remove(i);
        }
    }

    #[test]
    fn rescale_and_derivative() {
        let p = Poly(vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        let s = c(0.5, 0.5);
        let z = c(0.3, -0.8);
        assert!((p.rescale_arg(s).eval(z) - p.eval(s * z)).norm() < 1e-14);
        assert!((p.derivative().eval(z) - (c(2.0, 0.0) + 6.0 * z)).norm() < 1e-14);
    }
}
