use super::*;
use crate::atlas::poisson_bracket;
use crate::grid::{field_norm, relative_l2, sup_diff, NormKind};
use num_complex::Complex64;

fn gauss(gamma: f64, c: [f64; 2]) -> AnalyticFunction {
    AnalyticFunction::gaussian(gamma, c.to_vec()).unwrap()
}

/// f×f for f = e^{−|x|²}, θ = tJ: e^{−2|x|²/(1+t²)}/(1 + t²), by completing the square.
fn closed_form(t: f64, spec: GridSpec) -> SampledField {
    SampledField::from_fn(spec, Space::Position, |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        Ok(Complex64::new((-2.0 * r2 / (1.0 + t * t)).exp() / (1.0 + t * t), 0.0))
    })
    .unwrap()
}

#[test]
fn zero_theta_reduces_to_pointwise_product() {
    let spec = GridSpec::new(2, 64, 8.0).unwrap();
    let f = gauss(1.0, [0.3, -0.4]);
    let g = gauss(0.8, [-0.5, 0.2]);
    let want = sample(&f, spec, Space::Position)
        .unwrap()
        .mul(&sample(&g, spec, Space::Position).unwrap())
        .unwrap();
    let th = ThetaMatrix::zero(2);
    for alg in [
        StarAlgorithm::TensorPhaseIFFT,
        StarAlgorithm::ShiftedQuadrature { q_points: 256 },
    ] {
        let h = twisted_product((&f).into(), (&g).into(), &th, &StarConfig::new(alg, spec)).unwrap();
        let e = sup_diff(&h, &want, None).unwrap(); assert!(e <= 1e-10, "{alg:?} {e}");
    }
    let c = StarConfig::new(StarAlgorithm::DirectKernel { quadrature_n: 64 }, spec);
    assert!(matches!(
        twisted_product((&f).into(), (&g).into(), &th, &c),
        Err(Error::ThetaSingular(_))
    ));
}

#[test]
fn gaussian_self_product_closed_form() {
    let spec = GridSpec::new(2, 32, 5.0).unwrap();
    let f = gauss(1.0, [0.0, 0.0]);
    for t in [1.0, 0.5] {
        let th = ThetaMatrix::symplectic2(t);
        let want = closed_form(t, spec);
        for alg in [
            StarAlgorithm::TensorPhaseIFFT,
            StarAlgorithm::ShiftedQuadrature { q_points: 256 },
            StarAlgorithm::DirectKernel { quadrature_n: 64 },
        ] {
            let h = twisted_product((&f).into(), (&f).into(), &th, &StarConfig::new(alg, spec)).unwrap();
            let e = relative_l2(&h, &want).unwrap();
            assert!(e <= 1e-9, "{alg:?} t={t}: {e}");
        }
    }
}

#[test]
fn algorithm_guards() {
    let f = gauss(1.0, [0.0, 0.0]);
    let th = ThetaMatrix::symplectic2(1.0);
    let big = GridSpec::new(2, 128, 10.0).unwrap();
    let a = StarConfig::new(StarAlgorithm::TensorPhaseIFFT, big);
    assert!(matches!(
        twisted_product((&f).into(), (&f).into(), &th, &a),
        Err(Error::MemoryGuard { .. })
    ));
    let spec = GridSpec::new(2, 32, 5.0).unwrap();
    let c = StarConfig::new(StarAlgorithm::DirectKernel { quadrature_n: 48 }, spec);
    assert!(matches!(
        twisted_product((&f).into(), (&f).into(), &th, &c),
        Err(Error::GridMismatch(_))
    ));
    let s = sample(&f, spec, Space::Position).unwrap();
    let b = StarConfig::new(StarAlgorithm::ShiftedQuadrature { q_points: 64 }, spec);
    assert!(twisted_product((&f).into(), (&s).into(), &th, &b).is_err());
    let f1 = gauss(1.0, [0.0, 0.0]);
    let g3 = AnalyticFunction::gaussian_centered(1.0, 3).unwrap();
    assert!(matches!(
        twisted_product((&f1).into(), (&g3).into(), &th, &b),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn sampled_operands_match_analytic_ones() {
    let spec = GridSpec::new(2, 32, 5.0).unwrap();
    let f = gauss(1.0, [0.2, 0.0]);
    let g = gauss(1.5, [0.0, -0.3]);
    let th = ThetaMatrix::symplectic2(1.0);
    let fs = sample(&f, spec, Space::Position).unwrap();
    let gs = sample(&g, spec, Space::Position).unwrap();
    let cfg = StarConfig::new(StarAlgorithm::TensorPhaseIFFT, spec);
    let a = twisted_product((&f).into(), (&g).into(), &th, &cfg).unwrap();
    let b = twisted_product((&fs).into(), (&gs).into(), &th, &cfg).unwrap();
    assert!(relative_l2(&b, &a).unwrap() <= 1e-10);
    let cfg = StarConfig::new(StarAlgorithm::ShiftedQuadrature { q_points: 64 }, spec);
    let c = twisted_product((&fs).into(), (&g).into(), &th, &cfg).unwrap();
    assert!(relative_l2(&c, &a).unwrap() <= 1e-9);
}

#[test]
fn first_moyal_term_is_half_i_bracket() {
    let spec = GridSpec::new(2, 16, 3.0).unwrap();
    let f = gauss(1.0, [0.4, -0.1]);
    let g = gauss(0.7, [-0.3, 0.5]);
    let th = ThetaMatrix::symplectic2(1.0);
    let h1 = moyal_term(&f, &g, &th, 1, spec).unwrap();
    for i in 0..spec.len() {
        let x = spec.point(Space::Position, i);
        let pb = poisson_bracket(&f, &g, &th, &x).unwrap();
        assert!((h1.data[i] - Complex64::new(0.0, 0.5) * pb).norm() <= 1e-12);
    }
    let h_ff = moyal_term(&f, &f, &th, 1, spec).unwrap();
    assert!(field_norm(&h_ff, NormKind::Sup) <= 1e-12);
    let h0 = moyal_term(&f, &g, &th, 0, spec).unwrap();
    let fg = sample(&f, spec, Space::Position)
        .unwrap()
        .mul(&sample(&g, spec, Space::Position).unwrap())
        .unwrap();
    assert!(sup_diff(&h0, &fg, None).unwrap() <= 1e-15);
}

#[test]
fn odd_moyal_terms_vanish_for_equal_real_inputs() {
    let spec = GridSpec::new(2, 16, 3.0).unwrap();
    let f = AnalyticFunction::hermite_gaussian(1.0, vec![1, 2]).unwrap();
    let th = ThetaMatrix::symplectic2(1.0);
    for n in [1, 3, 5] {
        let h = moyal_term(&f, &f, &th, n, spec).unwrap();
        let scale = field_norm(&moyal_term(&f, &f, &th, n - 1, spec).unwrap(), NormKind::Sup);
        assert!(field_norm(&h, NormKind::Sup) <= 1e-12 * scale.max(1.0), "n={n}");
    }
}

#[test]
fn partial_sums_approach_product_for_small_theta() {
    let spec = GridSpec::new(2, 32, 5.0).unwrap();
    let f = gauss(1.0, [0.0, 0.0]);
    let th = ThetaMatrix::symplectic2(0.2);
    let exact = closed_form(0.2, spec);
    let mut prev = f64::INFINITY;
    for n in [0, 2, 4, 8, 12] {
        let s = moyal_partial_sum(&f, &f, &th, n, spec).unwrap();
        let e = sup_diff(&s, &exact, None).unwrap();
        assert!(e < prev);
        prev = e;
    }
    assert!(prev <= 1e-9);
}

#[test]
fn convolution_zero_theta_gaussian_value() {
    let spec = GridSpec::new(2, 64, 8.0).unwrap();
    // f̂ = ĝ = e^{−|q|²/2}: f̂⊛ĝ(0) = ∫ e^{−|q|²} dq = π
    let fh = SampledField::from_fn(spec, Space::Momentum, |p| {
        Ok(Complex64::new((-0.5 * p.iter().map(|v| v * v).sum::<f64>()).exp(), 0.0))
    })
    .unwrap();
    let c = twisted_convolution(&fh, &fh, &ThetaMatrix::zero(2)).unwrap();
    let o = spec.origin_index();
    assert!((c.value_at(&[o, o]).re - std::f64::consts::PI).abs() <= 1e-6);
}

#[test]
fn convolution_rejects_wide_inputs() {
    let spec = GridSpec::new(2, 16, 2.0).unwrap();
    let fh = SampledField::from_fn(spec, Space::Momentum, |_| Ok(Complex64::new(1.0, 0.0))).unwrap();
    assert!(matches!(
        twisted_convolution(&fh, &fh, &ThetaMatrix::symplectic2(1.0)),
        Err(Error::TailMass(_))
    ));
}

#[test]
fn slice_positive_at_origin_for_gaussians() {
    let g = AnalyticFunction::gaussian_centered(1.0, 1).unwrap();
    let v = separable_slice(&g, &g, &g, &g, 0.0).unwrap();
    assert!(v.re > 0.0 && v.im.abs() <= 1e-15 * v.re);
    // ½ e^{−|x|²} at the origin.
    assert!((v.re - 0.5).abs() <= 1e-12);
}

#[test]
fn value_at_origin_quadrature_gaussian() {
    let f = gauss(1.0, [0.0, 0.0]);
    let v = value_at_origin_quadrature(&f, &f, &ThetaMatrix::symplectic2(1.0), 8.0, 16).unwrap();
    assert!((v.re - 0.5).abs() <= 1e-12);
}

