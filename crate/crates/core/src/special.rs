//! `K₀`, `Ki₁` and the two integral-table identities, evaluated from their
//! defining integrals so that they can serve as independent oracles.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::{integrate, integrate_semi_infinite, integrate_with_breaks, QuadError, QuadratureSpec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecialError {
    #[error("{function} argument {x} outside its domain")]
    Domain { function: &'static str, x: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

/// Above this argument `Ki₁` switches from the φ-form to the η-form.
pub const KI1_CROSSOVER: f64 = 1.0;

/// `e^x K₀(x) = ∫₀^∞ exp(−x(cosh η − 1)) dη`.
pub fn k0_scaled(x: f64, spec: &QuadratureSpec) -> Result<f64, SpecialError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(SpecialError::Domain { function: "K0", x });
    }
    let f = |eta: f64| (-x * (eta.cosh() - 1.0)).exp();
    // beyond H: integrand ≤ exp(−x(cosh H − 1) − x sinh H (η − H))
    let tail = |h: f64| (-x * (h.cosh() - 1.0)).exp() / (x * h.sinh());
    Ok(integrate_semi_infinite(f, 0.0, tail, spec)?.0.value)
}

pub fn bessel_k0(x: f64, spec: &QuadratureSpec) -> Result<f64, SpecialError> {
    Ok(k0_scaled(x, spec)? * (-x).exp())
}

/// `e^x Ki₁(x)`; see [`ki1`].
pub fn ki1_scaled(x: f64, spec: &QuadratureSpec) -> Result<f64, SpecialError> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(SpecialError::Domain { function: "Ki1", x });
    }
    if x < KI1_CROSSOVER {
        Ok(ki1_phi_form(x, spec)? * x.exp())
    } else {
        ki1_eta_form_scaled(x, spec)
    }
}

/// `Ki₁(x) = ∫₀^{π/2} exp(−x / sin φ) dφ = ∫_x^∞ K₀`.
pub fn ki1(x: f64, spec: &QuadratureSpec) -> Result<f64, SpecialError> {
    if x < KI1_CROSSOVER {
        if !(x >= 0.0) || !x.is_finite() {
            return Err(SpecialError::Domain { function: "Ki1", x });
        }
        return ki1_phi_form(x, spec);
    }
    Ok(ki1_scaled(x, spec)? * (-x).exp())
}

/// Bounded φ-form, valid for every `x ≥ 0`.
pub fn ki1_phi_form(x: f64, spec: &QuadratureSpec) -> Result<f64, SpecialError> {
    if x == 0.0 {
        return Ok(FRAC_PI_2);
    }
    let f = |phi: f64| {
        let s = phi.sin();
        if s <= 0.0 {
            0.0
        } else {
            (-x / s).exp()
        }
    };
    Ok(integrate(f, 0.0, FRAC_PI_2, spec)?.value)
}

/// `e^x ∫₀^∞ exp(−x cosh η) / cosh η dη`, for `x > 0`.
pub fn ki1_eta_form_scaled(x: f64, spec: &QuadratureSpec) -> Result<f64, SpecialError> {
    if !(x > 0.0) {
        return Err(SpecialError::Domain { function: "Ki1", x });
    }
    let f = |eta: f64| (-x * (eta.cosh() - 1.0)).exp() / eta.cosh();
    let tail = |h: f64| (-x * (h.cosh() - 1.0)).exp() / (x * h.sinh() * h.cosh());
    Ok(integrate_semi_infinite(f, 0.0, tail, spec)?.0.value)
}

/// `e^z Ki₁(z)` for `Re z > 0`, from the η-form with complex argument.
pub fn ki1_complex_scaled(z: Complex64, spec: &QuadratureSpec) -> Result<Complex64, SpecialError> {
    if !(z.re > 0.0) || !z.is_finite() {
        return Err(SpecialError::Domain { function: "Ki1", x: z.re });
    }
    let part = |eta: f64| (-z * (eta.cosh() - 1.0)).exp() / eta.cosh();
    let tail = |h: f64| (-z.re * (h.cosh() - 1.0)).exp() / (z.re * h.sinh() * h.cosh());
    let re = integrate_semi_infinite(|e| part(e).re, 0.0, tail, spec)?.0.value;
    let im = integrate_semi_infinite(|e| part(e).im, 0.0, tail, spec)?.0.value;
    Ok(Complex64::new(re, im))
}

/// `x / sinh(x)`, regular at the origin.
pub fn x_over_sinh(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x / x.sinh()
    }
}

/// `l · cosh(g l) / sinh(π l)`, with the `l → 0` limit `1/π`.
fn l_cosh_over_sinh(l: f64, g: f64) -> f64 {
    if l < 1e-300 {
        return 1.0 / PI;
    }
    let num = ((g - PI) * l).exp() + ((-g - PI) * l).exp();
    l * num / (-(-2.0 * PI * l).exp_m1())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TableIdentity {
    /// `1/√(1−g²) = (2/π) ∫₀^∞ cosh(gl) K₀(l) dl`
    SechK0,
    /// `g/2 sin g − 1/2 + 1/2 cos g ln(2(1+cos g)) = ∫₀^∞ l/(l²+1) cosh(gl)/sinh(πl) dl`
    SinhContact,
}

/// Both sides of a table identity: `(closed form, quadrature)`.
pub fn table_identity_sides(g: f64, which: TableIdentity, spec: &QuadratureSpec) -> Result<(f64, f64), SpecialError> {
    match which {
        TableIdentity::SechK0 => {
            if !(g.abs() < 1.0) {
                return Err(SpecialError::Domain { function: "sech_K0", x: g });
            }
            let lhs = 1.0 / (1.0 - g * g).sqrt();
            let a = g.abs();
            // cosh(gl) K₀(l) = ½(e^{−(1−a)l} + e^{−(1+a)l}) · e^l K₀(l)
            let inner = QuadratureSpec {
                abs_tol: spec.abs_tol * 1e-2,
                rel_tol: spec.rel_tol * 1e-2,
                ..*spec
            };
            let h = |l: f64| -> f64 {
                let k = k0_scaled(l, &inner).unwrap_or(f64::NAN);
                0.5 * ((-(1.0 - a) * l).exp() + (-(1.0 + a) * l).exp()) * k
            };
            // log singularity at 0: substitute l = u² on [0, 1]
            let head = integrate(|u: f64| if u == 0.0 { 0.0 } else { 2.0 * u * h(u * u) }, 0.0, 1.0, spec)?.value;
            let decay = 1.0 - a;
            let tail = |l: f64| (PI / (2.0 * l)).sqrt() * (-decay * l).exp() / decay;
            let (body, _) = integrate_semi_infinite(h, 1.0, tail, spec)?;
            Ok((lhs, 2.0 / PI * (head + body.value)))
        }
        TableIdentity::SinhContact => {
            if !(g.abs() < PI) {
                return Err(SpecialError::Domain { function: "sinh_contact", x: g });
            }
            let c = g.cos();
            let lhs = 0.5 * g * g.sin() - 0.5 + 0.5 * c * (2.0 * (1.0 + c)).ln();
            let decay = PI - g.abs();
            let f = |l: f64| l_cosh_over_sinh(l, g) / (l * l + 1.0);
            let tail = |l: f64| 2.0 * (-decay * l).exp() / (l * decay * (1.0 - (-2.0 * PI * l).exp()));
            let (r, _) = integrate_semi_infinite(f, 0.0, tail, spec)?;
            Ok((lhs, r.value))
        }
    }
}

/// Closed form minus quadrature for the chosen identity.
pub fn table_identity_residual(g: f64, which: TableIdentity, spec: &QuadratureSpec) -> Result<f64, SpecialError> {
    let (lhs, rhs) = table_identity_sides(g, which, spec)?;
    Ok(lhs - rhs)
}

/// `ln 2 − 1/2`, the value of both sides of the sinh identity at `g = 0`.
pub fn sinh_identity_at_zero() -> f64 {
    LN_2 - 0.5
}

/// `∫₀^∞ K₀(l) dl` by quadrature; equals `π/2`.
pub fn k0_integral(spec: &QuadratureSpec) -> Result<f64, SpecialError> {
    let inner = spec.scaled(1e-2);
    let h = |l: f64| bessel_k0(l, &inner).unwrap_or(f64::NAN);
    let head = integrate(|u: f64| if u == 0.0 { 0.0 } else { 2.0 * u * h(u * u) }, 0.0, 1.0, spec)?.value;
    let tail = |l: f64| (PI / (2.0 * l)).sqrt() * (-l).exp();
    let (body, _) = integrate_semi_infinite(h, 1.0, tail, spec)?;
    Ok(head + body.value)
}

/// `∫₀^∞ Ki₁(l) l^p dl` by quadrature.
pub fn ki1_power_integral(p: u32, spec: &QuadratureSpec) -> Result<f64, SpecialError> {
    let inner = spec.scaled(1e-2);
    let f = |l: f64| ki1_scaled(l, &inner).unwrap_or(f64::NAN) * (-l).exp() * l.powi(p as i32);
    // Ki₁(l) ≤ (π/2) e^{−l}; two extra powers cover the tail integral
    let cut = crate::quadrature::exp_tail_cutoff(p as f64 + 2.0, 1.0, spec.tail_tol);
    let mut breaks: Vec<f64> = (0..=8).map(|i| i as f64 * 0.5).collect();
    let mut x = 4.0;
    while x * 1.25 < cut {
        x *= 1.25;
        breaks.push(x);
    }
    breaks.push(cut);
    Ok(integrate_with_breaks(f, &breaks, spec)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::oracle()
    }

    #[test]
    fn k0_reference_value() {
        // K₀(1) from the defining integral
        let k = bessel_k0(1.0, &spec()).unwrap();
        assert!((k - 0.421_024_438_240_708_3).abs() < 1e-14, "{k}");
    }

    #[test]
    fn k0_small_argument() {
        // K₀(x) ≈ −ln(x/2) − γ_E for small x
        let x = 1e-6;
        let k = bessel_k0(x, &spec()).unwrap();
        let approx = -(x / 2.0).ln() - 0.577_215_664_901_532_9;
        assert!((k - approx).abs() < 1e-9, "{k} {approx}");
    }

    #[test]
    fn k0_asymptotics() {
        for &x in &[20.0, 40.0, 80.0] {
            let r = k0_scaled(x, &spec()).unwrap() * f64::sqrt(x);
            // √(π/2)(1 − 1/(8x) + …)
            let lead = (PI / 2.0).sqrt();
            assert!((r / lead - 1.0).abs() < 1.0 / (7.0 * x), "{x} {r}");
        }
    }

    #[test]
    fn k0_domain() {
        assert!(matches!(bessel_k0(0.0, &spec()), Err(SpecialError::Domain { .. })));
        assert!(matches!(bessel_k0(-1.0, &spec()), Err(SpecialError::Domain { .. })));
    }

    #[test]
    fn ki1_at_origin_and_infinity() {
        assert_eq!(ki1(0.0, &spec()).unwrap(), FRAC_PI_2);
        assert!(ki1(60.0, &spec()).unwrap() < 1e-26);
        assert!(matches!(ki1(-0.1, &spec()), Err(SpecialError::Domain { .. })));
    }

    #[test]
    fn ki1_derivative_is_minus_k0() {
        let h = 1e-5;
        let d = (ki1(1.0 + h, &spec()).unwrap() - ki1(1.0 - h, &spec()).unwrap()) / (2.0 * h);
        assert!((d + bessel_k0(1.0, &spec()).unwrap()).abs() < 1e-8);
    }

    #[test]
    fn ki1_forms_agree_across_crossover() {
        for i in 0..=30 {
            let x = 0.5 + 1.5 * i as f64 / 30.0;
            let phi = ki1_phi_form(x, &spec()).unwrap();
            let eta = ki1_eta_form_scaled(x, &spec()).unwrap() * (-x).exp();
            assert!((phi - eta).abs() < 1e-10, "{x}: {phi} vs {eta}");
        }
    }

    #[test]
    fn monotone_and_positive() {
        let s = QuadratureSpec::default();
        let mut prev = (f64::INFINITY, f64::INFINITY);
        for i in 1..=60 {
            let x = 0.1 * i as f64;
            let (k, ki) = (bessel_k0(x, &s).unwrap(), ki1(x, &s).unwrap());
            assert!(k > 0.0 && ki > 0.0);
            assert!(k < prev.0 && ki < prev.1);
            prev = (k, ki);
        }
    }

    #[test]
    fn table_identities_at_zero() {
        let r = table_identity_residual(0.0, TableIdentity::SechK0, &spec()).unwrap();
        assert!(r.abs() < 1e-10, "{r}");
        let (lhs, rhs) = table_identity_sides(0.0, TableIdentity::SinhContact, &spec()).unwrap();
        assert!((lhs - sinh_identity_at_zero()).abs() < 1e-15);
        assert!((rhs - sinh_identity_at_zero()).abs() < 1e-10, "{rhs}");
    }

    #[test]
    fn sech_identity_near_edge() {
        let r = table_identity_residual(0.9, TableIdentity::SechK0, &QuadratureSpec::default()).unwrap();
        assert!(r.abs() < 1e-8, "{r}");
    }

    #[test]
    fn identity_domains() {
        assert!(table_identity_residual(1.0, TableIdentity::SechK0, &spec()).is_err());
        assert!(table_identity_residual(3.2, TableIdentity::SinhContact, &spec()).is_err());
    }

    #[test]
    fn k0_integrates_to_half_pi() {
        let v = k0_integral(&QuadratureSpec::default()).unwrap();
        assert!((v - FRAC_PI_2).abs() < 1e-9, "{v}");
    }

    #[test]
    fn complex_ki1_matches_real_axis() {
        for &x in &[1.0, 3.5, 12.0] {
            let c = ki1_complex_scaled(Complex64::new(x, 0.0), &spec()).unwrap();
            let r = ki1_scaled(x, &spec()).unwrap();
            assert!((c.re - r).abs() < 1e-13 && c.im.abs() < 1e-15);
        }
        assert!(ki1_complex_scaled(Complex64::new(-1.0, 1.0), &spec()).is_err());
    }

    #[test]
    fn x_over_sinh_limit() {
        assert_eq!(x_over_sinh(0.0), 1.0);
        assert!((x_over_sinh(1e-5) - 1e-5 / 1e-5f64.sinh()).abs() < 1e-15);
    }
}
