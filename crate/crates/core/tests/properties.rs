use matsubara::dwbc::DwbcInstance;
use matsubara::fixtures;
use matsubara::model::{format_complex, parse_complex, psi, TwistedLaurent};
use matsubara::oracle::QuasiLocalOp;
use matsubara::{OmegaModel, Poly, Zeta, C64};
use proptest::prelude::*;
use std::sync::OnceLock;

fn complex(range: f64) -> impl Strategy<Value = C64> {
    (-range..range, -range..range).prop_map(|(re, im)| C64::new(re, im))
}

/// Points with `|ζ²|` in `[0.3, 3]`.
fn annulus() -> impl Strategy<Value = C64> {
    (0.3f64..3.0, -3.1f64..3.1).prop_map(|(r, th)| C64::from_polar(r, th))
}

fn poly(max_len: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(complex(2.0), 1..max_len).prop_map(Poly)
}

fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}

fn p0_omega() -> &'static (OmegaModel, OmegaModel) {
    static MODELS: OnceLock<(OmegaModel, OmegaModel)> = OnceLock::new();
    MODELS.get_or_init(|| {
        let p = fixtures::p0();
        let flipped = p.with_twists(-p.kappa, -p.alpha).unwrap();
        (OmegaModel::new(&p).unwrap(), OmegaModel::new(&flipped).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_evaluates_pointwise(a in poly(6), b in poly(6), z in complex(1.5)) {
        prop_assert!(close((&a * &b).eval(z), a.eval(z) * b.eval(z), 1e-12));
        prop_assert!(close((&a - &b).eval(z), a.eval(z) - b.eval(z), 1e-12));
    }

    #[test]
    fn divided_difference_matches_quotient(p in poly(7), u in complex(1.5), w in complex(1.5)) {
        prop_assume!((u - w).norm() > 1e-2);
        let dd = p.divided_difference();
        prop_assert!(close(dd.eval(u, w), (p.eval(u) - p.eval(w)) / (u - w), 1e-10));
    }

    #[test]
    fn roots_are_zeros(roots in prop::collection::vec(annulus(), 1..5)) {
        let p = Poly::from_roots(&roots);
        for r in p.roots() {
            prop_assert!(p.eval(r).norm() < 1e-8 * (1.0 + p.norm()));
        }
        prop_assert_eq!(p.roots().len(), roots.len());
    }

    #[test]
    fn complex_text_round_trips(re in -1e6f64..1e6, im in -1e6f64..1e6) {
        let z = C64::new(re, im);
        prop_assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
    }

    #[test]
    fn delta_inverse_undoes_delta(
        twist in 0.1f64..0.9,
        min_power in -3i64..3,
        coeffs in prop::collection::vec(complex(2.0), 1..6),
    ) {
        let ln_q = fixtures::Q_STANDARD.ln();
        let f = TwistedLaurent::new(C64::new(twist, 0.0), min_power, coeffs);
        let back = f.delta(ln_q).delta_inverse(ln_q).unwrap();
        for (a, b) in f.coeffs.iter().zip(&back.coeffs) {
            prop_assert!(close(*a, *b, 1e-10));
        }
    }

    #[test]
    fn shift_acts_by_q_powers(z2 in annulus(), k in -3i32..3, gamma in complex(1.0)) {
        let ln_q = fixtures::Q_STANDARD.ln();
        let zeta = Zeta::from_z2(z2);
        let lhs = zeta.shifted(k as f64, ln_q).pow(gamma);
        let rhs = (k as f64 * gamma * ln_q).exp() * zeta.pow(gamma);
        prop_assert!(close(lhs, rhs, 1e-12));
    }

    #[test]
    fn psi_is_odd_under_inversion(z2 in annulus(), alpha in complex(1.0)) {
        prop_assume!((z2 - 1.0).norm() > 1e-2);
        let zeta = Zeta::from_z2(z2);
        let inv = Zeta::from_ln(-zeta.ln);
        prop_assert!(close(psi(inv, -alpha).unwrap(), -psi(zeta, alpha).unwrap(), 1e-12));
    }

    #[test]
    fn w_d_phi_is_one(z in annulus()) {
        for p in [fixtures::p0(), fixtures::p1()] {
            let v = p.w_poly().eval(z) * p.d_poly().eval(z) * p.phi(z);
            prop_assert!(close(v, C64::new(1.0, 0.0), 1e-11));
        }
    }

    #[test]
    fn random_operators_have_spin_zero(m in 1usize..5, seed in any::<u64>()) {
        let x = QuasiLocalOp::random_spin_zero(m, seed);
        prop_assert_eq!(x.spin(), Some(0));
        prop_assert_eq!(x.sites(), m);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn partition_function_is_symmetric(xis in prop::collection::vec(annulus(), 3), swap in 0usize..2) {
        let taus = fixtures::dwbc_taus(3);
        let ln_q = fixtures::Q_STANDARD.ln();
        let xis: Vec<C64> = xis.iter().map(|z| z.sqrt()).collect();
        let Ok(inst) = DwbcInstance::new(ln_q, &taus, &xis) else {
            return Ok(());
        };
        let mut permuted = xis.clone();
        permuted.swap(swap, swap + 1);
        let other = DwbcInstance::new(ln_q, &taus, &permuted).unwrap();
        prop_assert!(close(inst.partition().unwrap(), other.partition().unwrap(), 1e-11));
        prop_assert_eq!(inst.ice_rule_violation().unwrap(), 0.0);
    }

    #[test]
    fn omega_is_symmetric_under_twist_reversal(z2 in annulus(), w2 in annulus()) {
        let (m, flipped) = p0_omega();
        let (zeta, xi) = (Zeta::from_z2(z2), Zeta::from_z2(w2));
        let (Ok(direct), Ok(swapped)) = (m.omega(zeta, xi), flipped.omega(xi, zeta)) else {
            // landed on a pole of ω
            return Ok(());
        };
        prop_assert!(close(direct, swapped, 1e-7), "{} {}", direct, swapped);
    }
}
