use std::f64::consts::{LN_2, PI};

use connint::distribution::{
    factorized_density, find_local_maxima, n0_density, predicted_spectrum, GammaParam, Region, SquaredArea,
};
use connint::jet::{Jet, PrecisionConfig};
use connint::measure::{
    edges_from_triad, gram_det, measure_weight, triad_gram, Triad, WeightExponent,
};
use connint::moments::{
    arcsin_contact, arcsin_regular_integral, generating_function_I, moment_closed_form, moment_generic, mu_functional,
    GKind, GfRoute, ProbePolynomial,
};
use connint::quadrature::QuadratureSpec;
use connint::selfdual::{
    bivector_from_edges, circ, pairing_invariants, selfdual_decompose, selfdual_part, AreaTensor4, Edge4, Sign,
};
use connint::special::{bessel_k0, k0_integral, ki1};
use connint::xfloat;
use num_complex::Complex64;
use proptest::prelude::*;

fn spatial() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-3.0..3.0f64)
}

fn heron(a: f64, b: f64, c: f64) -> f64 {
    let s = 0.5 * (a + b + c);
    (s * (s - a) * (s - b) * (s - c)).max(0.0).sqrt()
}

fn len(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn area_square_is_minus_heron_squared(a in spatial(), b in spatial()) {
        let l1 = Edge4::new([0.0, a[0], a[1], a[2]]);
        let l2 = Edge4::new([0.0, b[0], b[1], b[2]]);
        let v = bivector_from_edges(&l1, &l2);
        let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
        let area = heron(len(a), len(b), len(d));
        for s in [Sign::Plus, Sign::Minus] {
            let sq = v.square(s);
            prop_assert!((sq.re + area * area).abs() < 1e-12 * (1.0 + area * area), "{sq} vs {area}");
            prop_assert!(sq.im.abs() < 1e-12);
        }
    }

    #[test]
    fn pairing_identity(c in prop::array::uniform6(-2.0..2.0f64)) {
        let t = AreaTensor4::from_components(c);
        let (vv, vsv) = pairing_invariants(&t);
        let tol = 1e-14 * (1.0 + c.iter().map(|x| x * x).sum::<f64>());
        for s in [Sign::Plus, Sign::Minus] {
            let p = selfdual_part(&t, s);
            let lhs = circ(&p, &p) * 2.0;
            let rhs = Complex64::new(vv, s.value() * vsv);
            prop_assert!((lhs - rhs).norm() < tol, "{lhs} vs {rhs}");
            // The three-vector square carries the same invariants.
            let d = selfdual_decompose(&t);
            prop_assert!((d.square(s) - rhs).norm() < tol);
        }
    }

    #[test]
    fn jet_ring_axioms(a in prop::collection::vec(-2.0..2.0f64, 6),
                       b in prop::collection::vec(-2.0..2.0f64, 6),
                       c in prop::collection::vec(-2.0..2.0f64, 6)) {
        let (a, b, c) = (Jet::from_f64(&a, 128), Jet::from_f64(&b, 128), Jet::from_f64(&c, 128));
        let close = |x: &Jet, y: &Jet| x.coeffs_f64().iter().zip(y.coeffs_f64()).all(|(p, q)| (p - q).abs() < 1e-25);
        prop_assert!(close(&a.mul(&b).unwrap(), &b.mul(&a).unwrap()));
        prop_assert!(close(&a.add(&b).unwrap(), &b.add(&a).unwrap()));
        let left = a.mul(&b.add(&c).unwrap()).unwrap();
        let right = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert!(close(&left, &right));
        let assoc_l = a.mul(&b).unwrap().mul(&c).unwrap();
        let assoc_r = a.mul(&b.mul(&c).unwrap()).unwrap();
        prop_assert!(close(&assoc_l, &assoc_r));
    }

    #[test]
    fn jet_sqrt_squares_back(tail in prop::collection::vec(-1.0..1.0f64, 7), c0 in 0.5..4.0f64) {
        let mut coeffs = vec![c0];
        coeffs.extend(tail);
        let a = Jet::from_f64(&coeffs, 192);
        let r = a.sqrt().unwrap();
        let back = r.mul(&r).unwrap();
        for (p, q) in back.coeffs_f64().iter().zip(a.coeffs_f64()) {
            prop_assert!((p - q).abs() < 1e-40f64.max(1e-30 * q.abs()));
        }
    }

    #[test]
    fn n0_positive_off_poles(re in -60.0..60.0f64, im in -60.0..60.0f64, g in 0.1..5.0f64) {
        let gamma = GammaParam::new(g).unwrap();
        if let Ok(p) = n0_density(SquaredArea::new(Complex64::new(re, im)), gamma) {
            prop_assert!(p.value >= 0.0);
            prop_assert!(p.ln_value.is_finite());
        }
    }

    #[test]
    fn gram_identity(seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let t = Triad::random(&mut rng);
        let g = triad_gram(&t);
        let scale: f64 = t.v.iter().map(|v| v.iter().map(|x| x * x).sum::<f64>()).product();
        prop_assert!((g.det - gram_det(&t)).abs() < 1e-12 * scale.max(1.0));
    }

    #[test]
    fn weight_scales_with_power_27(seed in any::<u64>(), lambda in 0.3..3.0f64) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let t = Triad::random(&mut rng);
        let w = measure_weight(&t, WeightExponent::NineHalves);
        let ws = measure_weight(&t.scaled(lambda), WeightExponent::NineHalves);
        prop_assert!((ws - lambda.powi(27) * w).abs() <= 1e-12 * ws.abs().max(1e-300));
    }

    #[test]
    fn triad_round_trip(seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let t = Triad::random(&mut rng);
        if let Ok(e) = edges_from_triad(&t) {
            let back = e.to_triad();
            let s = t.triple().signum();
            let scale = t.v.iter().flatten().fold(1.0f64, |m, x| m.max(x.abs()));
            for a in 0..3 {
                for k in 0..3 {
                    prop_assert!((back.v[a][k] - s * t.v[a][k]).abs() < 1e-12 * scale);
                }
            }
        }
    }
}

/// Derivatives at zero of `exp(sin z)·√(1 + z/2)` from the jet, against a
/// Cauchy-contour quadrature in double precision.
#[test]
fn jet_derivatives_match_contour_integral() {
    let order = 8;
    let x = Jet::variable(order, 192);
    let f = x.sin().exp().unwrap().mul(&x.scale_f64(0.5).add_scalar_f64(1.0).sqrt().unwrap()).unwrap();
    let fz = |z: Complex64| z.sin().exp() * (Complex64::new(1.0, 0.0) + z * 0.5).sqrt();
    let r = 0.5;
    let m = 128;
    for n in 0..=6 {
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..m {
            let th = 2.0 * PI * j as f64 / m as f64;
            let z = Complex64::from_polar(r, th);
            acc += fz(z) * Complex64::from_polar(1.0, -(n as f64) * th);
        }
        let fact: f64 = (1..=n).map(|i| i as f64).product();
        let contour = (acc / m as f64).re * fact / r.powi(n);
        let jet = xfloat::to_f64(&f.derivative_at_zero(n as usize).unwrap());
        assert!((jet - contour).abs() < 1e-12 * (1.0 + contour.abs()), "n={n}: {jet} vs {contour}");
    }
}

#[test]
fn doubling_precision_agrees() {
    for k in [0usize, 3, 8] {
        let lo = moment_closed_form(k, &GKind::Arcsin, &PrecisionConfig::for_moments(k, 256)).unwrap();
        let hi = moment_closed_form(k, &GKind::Arcsin, &PrecisionConfig::for_moments(k, 512)).unwrap();
        assert!(xfloat::rel_diff(&lo.value, &hi.value, 512) < 1e-30, "k={k}");
    }
}

#[test]
fn moment_values() {
    let pc = PrecisionConfig::for_moments(2, 256);
    let lin: Vec<f64> = (0..3)
        .map(|k| moment_closed_form(k, &GKind::Linear, &pc).unwrap().value_f64())
        .collect();
    assert!((lin[0] - PI / 2.0).abs() < 1e-14);
    assert!((lin[1] + 9.0 * PI / 4.0).abs() < 1e-13);
    assert!((lin[2] - 75.0 * PI / 2.0).abs() < 1e-12);

    let a0 = moment_closed_form(0, &GKind::Arcsin, &pc).unwrap().value_f64();
    assert!((a0 - PI * (0.5 + LN_2)).abs() < 1e-14);

    let pc1 = PrecisionConfig::for_moments(1, 256);
    let sin = GKind::Arcsin.x_of_g(&pc1);
    let a1 = moment_generic(1, &sin).unwrap().value_f64();
    assert!((a1 - PI * (2.75 + LN_2)).abs() < 1e-13);

    let id = GKind::Linear.x_of_g(&pc);
    let g0 = moment_generic(0, &id).unwrap().value_f64();
    assert!((g0 - PI / 2.0).abs() < 1e-14);
}

#[test]
fn generating_function_at_point_six() {
    let spec = QuadratureSpec::oracle();
    let closed = generating_function_I(0.6, GfRoute::Closed, &spec).unwrap();
    let radial = generating_function_I(0.6, GfRoute::RadialQuadrature, &spec).unwrap();
    assert!((closed - PI * 1.8f64.ln()).abs() < 1e-14);
    assert!((radial - closed).abs() < 1e-10);
}

#[test]
fn arcsin_integral_part_at_zero() {
    let spec = QuadratureSpec::oracle();
    let reg = arcsin_regular_integral(0, &spec).unwrap();
    assert!((reg - (3.0 - 4.0 * LN_2)).abs() < 1e-10, "{reg}");
    assert!(arcsin_contact(0).is_finite());
}

#[test]
fn special_function_values() {
    let spec = QuadratureSpec::oracle();
    let k1 = bessel_k0(1.0, &spec).unwrap();
    assert!((k1 - 0.421024438240708).abs() < 1e-12);
    assert!((k0_integral(&spec).unwrap() - PI / 2.0).abs() < 1e-10);
    assert!(ki1(40.0, &spec).unwrap() < 1e-17);
    let h = 1e-5;
    let d = (ki1(1.0 + h, &spec).unwrap() - ki1(1.0 - h, &spec).unwrap()) / (2.0 * h);
    assert!((d + k1).abs() < 1e-8);
}

#[test]
fn mu_contact_of_constant_probe() {
    let spec = QuadratureSpec::default();
    let mu = mu_functional(&ProbePolynomial::monomial(0), 1.0, &spec).unwrap();
    let a = Complex64::new(1.0, 1.0);
    let expected = Complex64::new(4.0 * PI, 0.0) / (a * a * a) * (LN_2 - 2.0);
    assert!((mu.contact - expected).norm() < 1e-12);
    let unit = 4.0 * PI * 2f64.powf(-1.5) * (1.0 + 2.0 * LN_2);
    assert!((mu.total_density_consistent().norm() - unit).abs() < 1e-6 * unit);
}

#[test]
fn n0_at_origin_and_near_poles() {
    let g = GammaParam::new(1.0).unwrap();
    let origin = n0_density(SquaredArea::real(0.0), g).unwrap();
    assert!((origin.value - 1.0 / (4.0 * PI * PI)).abs() < 1e-12);
    let pole = g.pole(1);
    assert!(n0_density(SquaredArea::new(pole), g).is_err());
    let mut last = 0.0;
    for d in [1e-1, 1e-2, 1e-3, 1e-4] {
        let v = n0_density(SquaredArea::new(pole + Complex64::new(d, 0.0)), g).unwrap().value;
        assert!(v > last, "density should grow toward the pole");
        assert!((1.0 / v).is_finite());
        last = v;
    }
}

#[test]
fn spectrum_values() {
    let g = GammaParam::new(0.1).unwrap();
    assert!((predicted_spectrum(g, Region::Spacelike, 3).unwrap() - 0.3).abs() < 1e-15);
    assert_eq!(predicted_spectrum(g, Region::Timelike, 5).unwrap(), 5.0);
    assert!(predicted_spectrum(g, Region::Timelike, 0).is_err());
}

#[test]
fn no_prominent_maxima_at_unit_gamma() {
    let g = GammaParam::new(1.0).unwrap();
    for region in [Region::Spacelike, Region::Timelike] {
        let r = find_local_maxima(g, region, 5, 20_000).unwrap();
        assert!(r.maxima.is_empty(), "{:?}", r.maxima);
    }
}

#[test]
fn factorized_density_products() {
    let g = GammaParam::new(1.0).unwrap();
    assert_eq!(factorized_density(&[], g).unwrap(), 1.0);
    let a = SquaredArea::on_ray(Region::Spacelike, 3.0);
    let single = factorized_density(&[a], g).unwrap();
    assert!((single - n0_density(a, g).unwrap().value).abs() < 1e-300);
    let ln_pair = |s: f64| {
        let list = [SquaredArea::on_ray(Region::Spacelike, s), SquaredArea::on_ray(Region::Spacelike, 2.0 * s)];
        factorized_density(&list, g).unwrap().ln()
    };
    let slope = (ln_pair(30.0) - ln_pair(20.0)) / (3.0 * 10.0);
    assert!((slope + PI).abs() < 0.02 * PI, "{slope}");
}
