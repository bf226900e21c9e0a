use moyal_core::atlas::AnalyticFunction;
use moyal_core::divergence::{prop1_closed_form, prop1_lower_bound, u_functional};
use moyal_core::grid::{dft_forward, field_norm, sample, GridSpec, NormKind, SampledField, Space};
use moyal_core::gs::{term_bound_summable, term_norm_bound_ln};
use moyal_core::multiplier::{
    cauchy_bound, cauchy_domination, default_r_grid, multiplier_certificate, phase, phase_derivative_exact,
    verify_certificate, PhasePoint,
};
use moyal_core::star::moyal_term;
use moyal_core::theta::{apply_theta, pair, theta_abs, ThetaMatrix};
use moyal_core::witness::{build_g_hat, build_omega};
use num_complex::Complex64;
use proptest::prelude::*;

fn theta2() -> impl Strategy<Value = ThetaMatrix> {
    (-3.0f64..3.0).prop_map(ThetaMatrix::symplectic2)
}

fn vec2() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, 2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pair_is_antisymmetric(th in theta2(), p in vec2(), q in vec2()) {
        let a = pair(&th, &p, &q).unwrap();
        let b = pair(&th, &q, &p).unwrap();
        prop_assert!((a + b).abs() <= 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn pair_is_bilinear(th in theta2(), p in vec2(), p2 in vec2(), q in vec2(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let mix: Vec<f64> = p.iter().zip(&p2).map(|(x, y)| a * x + b * y).collect();
        let lhs = pair(&th, &mix, &q).unwrap();
        let rhs = a * pair(&th, &p, &q).unwrap() + b * pair(&th, &p2, &q).unwrap();
        let scale = a.abs() * pair(&th, &p, &q).unwrap().abs() + b.abs() * pair(&th, &p2, &q).unwrap().abs();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * scale.max(1.0));
    }

    #[test]
    fn zero_abs_iff_zero_map(t in prop_oneof![Just(0.0), -2.0f64..2.0], q in vec2()) {
        let th = ThetaMatrix::symplectic2(t);
        let image = apply_theta(&th, &q).unwrap();
        let zero_map = apply_theta(&th, &[1.0, 0.0]).unwrap().iter().chain(&apply_theta(&th, &[0.0, 1.0]).unwrap()).all(|v| *v == 0.0);
        prop_assert_eq!(theta_abs(&th) == 0.0, zero_map);
        if zero_map {
            prop_assert!(image.iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn gaussian_meets_its_decay_bound(gamma in 0.1f64..4.0, x in vec2()) {
        let f = AnalyticFunction::gaussian_centered(gamma, 2).unwrap();
        let v = f.eval(&x).unwrap().norm();
        let r2: f64 = x.iter().map(|a| a * a).sum();
        prop_assert!((v - (-gamma * r2).exp()).abs() <= 1e-15);
    }

    #[test]
    fn bump_transform_vanishes_outside_support(r in 0.5f64..4.0, extra in 1e-9f64..10.0) {
        let b = AnalyticFunction::bump(r, 1.0).unwrap();
        prop_assert_eq!(b.eval_fourier(&[r + extra]).unwrap(), Complex64::new(0.0, 0.0));
        prop_assert_eq!(b.eval_fourier(&[-r - extra]).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn cauchy_bound_increases_with_radius_of_s(k in 0usize..4, r in 1e-3f64..10.0, a in 0.0f64..20.0, grow in 1e-3f64..20.0) {
        let th = ThetaMatrix::symplectic2(1.0);
        let kappa = [k, 0, 0, 0];
        let s1 = PhasePoint::new(vec![a, 0.0], vec![0.0, 0.0]).unwrap();
        let s2 = PhasePoint::new(vec![a + grow, 0.0], vec![0.0, 0.0]).unwrap();
        prop_assert!(cauchy_bound(&th, &kappa, &s2, r) > cauchy_bound(&th, &kappa, &s1, r));
    }

    #[test]
    fn derivatives_dominated_by_cauchy(t in -1.0f64..1.0, p in vec2(), q in vec2(), k in prop::collection::vec(0usize..2, 4), r in 1e-3f64..10.0) {
        let th = ThetaMatrix::symplectic2(t);
        let s = PhasePoint::new(p, q).unwrap();
        let v = phase_derivative_exact(&th, &k, &s).unwrap().norm();
        prop_assert!(v == 0.0 || v.ln() <= cauchy_bound(&th, &k, &s, r) + 1e-9);
    }

    #[test]
    fn chi_factor_bound(t in -0.5f64..0.5, p in prop::collection::vec(-2.0f64..2.0, 2), q in prop::collection::vec(-2.0f64..2.0, 2)) {
        let th = ThetaMatrix::symplectic2(t);
        let s = PhasePoint::new(p, q).unwrap();
        let lhs = (Complex64::new(1.0, 0.0) - phase(&th, &s)).norm();
        prop_assert!(lhs <= th.abs_sum() * (s.norm() * s.norm()).exp() + 1e-15);
    }

    #[test]
    fn closed_form_lower_bound(gamma in 0.2f64..5.0, half in 1usize..15) {
        let n = 2 * half;
        let v = prop1_closed_form(gamma, n);
        prop_assert!(v.ln_mag >= prop1_lower_bound(gamma, n).unwrap());
    }

    #[test]
    fn term_bound_regimes(beta in 0.0f64..0.3, b1 in 0.1f64..2.0, b2 in 0.1f64..2.0, th in 0.01f64..2.0) {
        prop_assert!(term_bound_summable(beta, b1, b2, th));
        // Consecutive ratio ≤ X e^{4β} n^{2β−1} with X = B₁B₂θ_abs; past n* it is below 1/2.
        let x = b1 * b2 * th * (4.0 * beta).exp();
        let n = (2.0 * x).powf(1.0 / (1.0 - 2.0 * beta)).ceil() as usize + 1;
        let a = term_norm_bound_ln(n, beta, b1, b2, th, 0.0);
        let b = term_norm_bound_ln(n + 1, beta, b1, b2, th, 0.0);
        prop_assert!(b < a - std::f64::consts::LN_2 + 1e-12);
        prop_assert!(!term_bound_summable(0.5 + beta + 1e-3, b1, b2, th));
    }

    #[test]
    fn g_hat_even_and_positive(beta in prop_oneof![Just(1.5), Just(2.0), Just(3.0)], s in 0.0f64..60.0) {
        let g = build_g_hat(beta, build_omega(beta).unwrap()).unwrap();
        prop_assert_eq!(g.eval(s), g.eval(-s));
        prop_assert!(g.eval(s) >= 0.0);
        prop_assert!(g.eval(s).ln() + s.powf(1.0 / beta) >= 0.0);
        let w = build_omega(beta).unwrap();
        prop_assert_eq!(w.eval(s / 50.0), w.eval(-s / 50.0));
        prop_assert!(w.eval(s / 50.0) >= 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn odd_moyal_terms_vanish_for_real_f(gamma in 0.5f64..2.0, cx in -0.5f64..0.5, n in prop_oneof![Just(1usize), Just(3), Just(5)]) {
        let f = AnalyticFunction::gaussian(gamma, vec![cx, -0.3]).unwrap();
        let spec = GridSpec::new(2, 16, 3.0).unwrap();
        let h = moyal_term(&f, &f, &ThetaMatrix::symplectic2(1.0), n, spec).unwrap();
        prop_assert!(field_norm(&h, NormKind::Sup) <= 1e-12);
    }

    #[test]
    fn dft_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0, c1 in -1.0f64..1.0, c2 in -1.0f64..1.0) {
        let spec = GridSpec::new(2, 32, 6.0).unwrap();
        let f = sample(&AnalyticFunction::gaussian(1.0, vec![c1, 0.0]).unwrap(), spec, Space::Position).unwrap();
        let g = sample(&AnalyticFunction::gaussian(2.0, vec![0.0, c2]).unwrap(), spec, Space::Position).unwrap();
        let mix = f.zip_with(&g, |x, y| x * a + y * b).unwrap();
        let lhs = dft_forward(&mix).unwrap();
        let rhs = dft_forward(&f).unwrap().zip_with(&dft_forward(&g).unwrap(), |x, y| x * a + y * b).unwrap();
        let scale = field_norm(&rhs, NormKind::Sup).max(1.0);
        prop_assert!(field_norm(&lhs.sub(&rhs).unwrap(), NormKind::Sup) <= 1e-12 * scale);
    }

    #[test]
    fn parseval(gamma in 0.5f64..3.0, c1 in -1.0f64..1.0) {
        let spec = GridSpec::new(2, 64, 8.0).unwrap();
        let f = sample(&AnalyticFunction::gaussian(gamma, vec![c1, 0.5]).unwrap(), spec, Space::Position).unwrap();
        let fh = dft_forward(&f).unwrap();
        let lhs = field_norm(&f, NormKind::L2).powi(2);
        let rhs = field_norm(&fh, NormKind::L2).powi(2) / (2.0 * std::f64::consts::PI).powi(2);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs);
    }

    #[test]
    fn u_functional_weighted_sup_bound(gamma in 0.3f64..3.0, cx in -1.0f64..1.0, cy in -1.0f64..1.0) {
        let spec = GridSpec::new(2, 64, 10.0).unwrap();
        let f = sample(&AnalyticFunction::gaussian(gamma, vec![cx, cy]).unwrap(), spec, Space::Position).unwrap();
        let weighted = SampledField::from_fn(spec, Space::Position, |x| {
            let r = x.iter().map(|a| a * a).sum::<f64>().sqrt();
            Ok(f.value_at(&spec_index(spec, x)) * (1.0 + r).powi(2))
        })
        .unwrap();
        prop_assert!(u_functional(&f).unwrap().norm() <= 2.0 * field_norm(&weighted, NormKind::Sup));
    }

    #[test]
    fn certificates_revalidate(seed in 0u64..1000, t in 0.1f64..1.0) {
        let th = ThetaMatrix::symplectic2(t);
        let c = multiplier_certificate(&th, 1.0, 1.0, 0.5, 2, 50, seed).unwrap();
        let v = verify_certificate(&c, &th, 50, seed + 1).unwrap();
        prop_assert_eq!(v.violations, 0);
        let cc = cauchy_domination(&th, 2, 20, seed, &default_r_grid(9)).unwrap();
        prop_assert_eq!(cc.violations, 0);
    }
}

fn spec_index(spec: GridSpec, x: &[f64]) -> Vec<usize> {
    x.iter().map(|&v| ((v + spec.half_extent()) / spec.dx()).round() as usize).collect()
}
