//! Moments of the simplest connection integral, by three routes: closed-form
//! derivative formulas, the generating function composed with `x(g)`, and
//! quadrature of the reconstructed radial density.

use std::f64::consts::{LN_2, PI};

use astro_float::BigFloat;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jet::{Jet, JetError, PrecisionConfig};
use crate::quadrature::{integrate, integrate_semi_infinite, QuadError, QuadratureSpec};
use crate::special::{ki1_power_integral, x_over_sinh, SpecialError};
use crate::xfloat::{self, RM};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MomentError {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Special(#[from] SpecialError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error("moment k = {k} needs jet order {required}, have {available}")]
    InsufficientOrder { k: usize, required: usize, available: usize },
    #[error("x(g) has a nonzero even-order coefficient at order {order}")]
    EvenContamination { order: usize },
    #[error("x(g) has vanishing slope at g = 0")]
    DegenerateSlope,
    #[error("no closed form for a generic x(g); use moment_generic")]
    NoClosedForm,
    #[error("argument {x} outside [0, 1]")]
    OutOfRange { x: f64 },
    #[error("gamma must be positive and finite, got {0}")]
    InvalidGamma(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindLabel {
    Linear,
    Arcsin,
    Generic,
}

/// Choice of `g(x)`: `x`, `arcsin x`, or an arbitrary odd `x(g)` jet.
#[derive(Debug, Clone)]
pub enum GKind {
    Linear,
    Arcsin,
    Generic(Jet),
}

impl GKind {
    /// Validates oddness and nonzero slope of the supplied `x(g)`.
    pub fn generic(x_of_g: Jet) -> Result<Self, MomentError> {
        check_odd(&x_of_g)?;
        Ok(GKind::Generic(x_of_g))
    }

    pub fn label(&self) -> KindLabel {
        match self {
            GKind::Linear => KindLabel::Linear,
            GKind::Arcsin => KindLabel::Arcsin,
            GKind::Generic(_) => KindLabel::Generic,
        }
    }

    /// `x(g)` as a jet: `g` or `sin g`.
    pub fn x_of_g(&self, cfg: &PrecisionConfig) -> Jet {
        match self {
            GKind::Linear => Jet::variable(cfg.order, cfg.bits),
            GKind::Arcsin => Jet::variable(cfg.order, cfg.bits).sin(),
            GKind::Generic(j) => j.clone(),
        }
    }
}

fn check_odd(x: &Jet) -> Result<(), MomentError> {
    for (n, c) in x.coeffs().iter().enumerate().step_by(2) {
        if !c.is_zero() {
            return Err(MomentError::EvenContamination { order: n });
        }
    }
    if x.order() < 1 || x.coeff(1).is_zero() {
        return Err(MomentError::DegenerateSlope);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    PaperRaw,
    UnitMass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    ClosedForm,
    GeneratingFunction,
    DensityQuadrature,
}

impl Route {
    pub fn as_str(&self) -> &'static str {
        match self {
            Route::ClosedForm => "closed_form",
            Route::GeneratingFunction => "generating_function",
            Route::DensityQuadrature => "density_quadrature",
        }
    }
}

/// Regular and contact contributions of a density-side moment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityParts {
    pub regular: f64,
    pub contact: f64,
}

#[derive(Debug, Clone)]
pub struct MomentResult {
    pub k: usize,
    pub value: BigFloat,
    pub normalization: Normalization,
    pub route: Route,
    pub kind: KindLabel,
    pub parts: Option<DensityParts>,
}

impl MomentResult {
    pub fn value_f64(&self) -> f64 {
        xfloat::to_f64(&self.value)
    }

    /// Rescales a raw moment by `2/π`, the inverse of the linear `k = 0` value.
    pub fn to_unit_mass(&self) -> MomentResult {
        if self.normalization == Normalization::UnitMass {
            return self.clone();
        }
        let p = self.value.mantissa_max_bit_len().unwrap_or(256).max(64);
        let factor = xfloat::from_i64(2, p).div(&xfloat::pi(p), p, RM);
        MomentResult {
            value: self.value.mul(&factor, p, RM),
            normalization: Normalization::UnitMass,
            parts: self.parts.map(|d| DensityParts {
                regular: d.regular * 2.0 / PI,
                contact: d.contact * 2.0 / PI,
            }),
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GfRoute {
    Closed,
    RadialQuadrature,
}

/// `I(x) = π ∫_x^1 (1/√(1−r²) − 1) dr/r = π ln(1 + √(1−x²))`.
#[allow(non_snake_case)]
pub fn generating_function_I(x: f64, route: GfRoute, spec: &QuadratureSpec) -> Result<f64, MomentError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(MomentError::OutOfRange { x });
    }
    match route {
        GfRoute::Closed => Ok(PI * (1.0 + (1.0 - x * x).sqrt()).ln()),
        GfRoute::RadialQuadrature => {
            // r = 1 − s² removes the inverse-root endpoint singularity
            let f = |s: f64| {
                let r = 1.0 - s * s;
                if r <= 0.0 {
                    return 0.0;
                }
                (2.0 / (1.0 + r).sqrt() - 2.0 * s) / r
            };
            let top = (1.0 - x).sqrt();
            Ok(PI * integrate(f, 0.0, top, spec)?.value)
        }
    }
}

fn sign_pow(k: usize) -> i64 {
    if k.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn require_order(k: usize, required: usize, available: usize) -> Result<(), MomentError> {
    if available < required {
        return Err(MomentError::InsufficientOrder { k, required, available });
    }
    Ok(())
}

/// Raw moment from the two explicit derivative formulas:
/// linear `π(−1)^{k+1} ∂^{2k+1}[1/g − 1/(g√(1−g²))]`,
/// arcsin `π(−1)^{k+1} ∂^{2k+2}[cos g ln(1 + cos g)]`.
pub fn moment_closed_form(k: usize, kind: &GKind, cfg: &PrecisionConfig) -> Result<MomentResult, MomentError> {
    cfg.validate()?;
    let (n, p) = (cfg.order, cfg.bits);
    require_order(k, 2 * k + 2, n)?;
    let deriv = match kind {
        GKind::Linear => {
            let g = Jet::variable(n, p);
            let one = Jet::constant_f64(1.0, n, p);
            let root = one.sub(&g.mul(&g)?)?.sqrt()?;
            let h = one.sub(&one.div(&root)?)?;
            h.odd_quotient()?.derivative_at_zero(2 * k + 1)?
        }
        GKind::Arcsin => {
            let c = Jet::variable(n, p).cos();
            let f = c.mul(&c.add_scalar_f64(1.0).ln()?)?;
            f.derivative_at_zero(2 * k + 2)?
        }
        GKind::Generic(_) => return Err(MomentError::NoClosedForm),
    };
    let scale = xfloat::pi(p).mul(&xfloat::from_i64(-sign_pow(k), p), p, RM);
    Ok(MomentResult {
        k,
        value: deriv.mul(&scale, p, RM),
        normalization: Normalization::PaperRaw,
        route: Route::ClosedForm,
        kind: kind.label(),
        parts: None,
    })
}

/// `I(y) + shift` as a jet in `y`.
fn generating_jet(order: usize, bits: usize, shift: Option<&BigFloat>) -> Result<Jet, MomentError> {
    let y = Jet::variable(order, bits);
    let one = Jet::constant_f64(1.0, order, bits);
    let s = one.sub(&y.mul(&y)?)?.sqrt()?;
    let i = s.add_scalar_f64(1.0).ln()?.scale(&xfloat::pi(bits));
    Ok(match shift {
        Some(c) => i.add_scalar(c),
        None => i,
    })
}

/// `(−1)^{k+1} ∂^{2k+2}[x′(g) I(x(g))]` at `g = 0`.
pub fn moment_generic(k: usize, x_of_g: &Jet) -> Result<MomentResult, MomentError> {
    moment_generic_shifted(k, x_of_g, None)
}

/// As [`moment_generic`], with `I` replaced by `I + shift`.
pub fn moment_generic_shifted(k: usize, x_of_g: &Jet, shift: Option<&BigFloat>) -> Result<MomentResult, MomentError> {
    check_odd(x_of_g)?;
    let (n, p) = (x_of_g.order(), x_of_g.bits());
    require_order(k, 2 * k + 3, n)?;
    let i_of_x = generating_jet(n, p, shift)?.compose(x_of_g)?;
    let integrand = x_of_g.derivative().mul(&i_of_x.truncate(n - 1))?;
    let d = integrand.derivative_at_zero(2 * k + 2)?;
    let value = d.mul(&xfloat::from_i64(-sign_pow(k), p), p, RM);
    let is_sin = {
        let s = Jet::variable(n, p).sin();
        s.coeffs().iter().zip(x_of_g.coeffs()).all(|(a, b)| a == b)
    };
    let is_lin = x_of_g.coeffs().iter().enumerate().all(|(i, c)| {
        if i == 1 {
            *c == xfloat::from_i64(1, p)
        } else {
            c.is_zero()
        }
    });
    Ok(MomentResult {
        k,
        value,
        normalization: Normalization::PaperRaw,
        route: Route::GeneratingFunction,
        kind: if is_lin {
            KindLabel::Linear
        } else if is_sin {
            KindLabel::Arcsin
        } else {
            KindLabel::Generic
        },
        parts: None,
    })
}

/// `4 ∫₀^∞ l^{2j+3} / ((l²+1) sinh πl) dl`.
pub fn arcsin_regular_integral(j: usize, spec: &QuadratureSpec) -> Result<f64, MomentError> {
    let pw = 2 * j as i32 + 2;
    // l/sinh(πl) = (1/π)·(πl)/sinh(πl)
    let f = |l: f64| {
        let s = if l < 30.0 {
            x_over_sinh(PI * l) / PI
        } else {
            2.0 * l * (-PI * l).exp()
        };
        l.powi(pw) / (l * l + 1.0) * s
    };
    let tail = |l: f64| 2.0 * (pw as f64 * l.ln() - PI * l).exp() * (1.0 + pw as f64 / l) / PI;
    let (r, _) = integrate_semi_infinite(f, 0.0, tail, spec)?;
    Ok(4.0 * r.value)
}

/// Contact part `(2 ln2 − 4) f(1) − 4 f′(1)` for `f(x) = x^k`.
pub fn arcsin_contact(k: usize) -> f64 {
    (2.0 * LN_2 - 4.0) - 4.0 * k as f64
}

/// Density-side moment in the unit-mass convention. Linear:
/// `(4/π)(−1)^k ∫ Ki₁(l) l^{2k+1} dl`; arcsin: regular integral plus contacts.
pub fn density_moment_quadrature(k: usize, kind: &GKind, spec: &QuadratureSpec) -> Result<MomentResult, MomentError> {
    let sign = sign_pow(k) as f64;
    let (value, parts) = match kind {
        GKind::Linear => {
            let v = 4.0 / PI * sign * ki1_power_integral(2 * k as u32 + 1, spec)?;
            (v, None)
        }
        GKind::Arcsin => {
            let regular = sign * arcsin_regular_integral(k, spec)?;
            let contact = arcsin_contact(k);
            (regular + contact, Some(DensityParts { regular, contact }))
        }
        GKind::Generic(_) => return Err(MomentError::NoClosedForm),
    };
    Ok(MomentResult {
        k,
        value: xfloat::from_f64(value, 64),
        normalization: Normalization::UnitMass,
        route: Route::DensityQuadrature,
        kind: kind.label(),
        parts,
    })
}

/// Ratio of density-side to closed-form unit-mass moments, fixed at the
/// first `k` and checked for stability across the rest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteConstant {
    pub constant: f64,
    pub ratios: Vec<f64>,
    pub max_rel_spread: f64,
}

pub fn fit_route_constant(closed: &[MomentResult], density: &[MomentResult]) -> RouteConstant {
    let ratios: Vec<f64> = closed
        .iter()
        .zip(density)
        .map(|(c, d)| d.to_unit_mass().value_f64() / c.to_unit_mass().value_f64())
        .collect();
    let constant = ratios.first().copied().unwrap_or(f64::NAN);
    let max_rel_spread = ratios
        .iter()
        .map(|r| ((r - constant) / constant).abs())
        .fold(0.0, f64::max);
    RouteConstant {
        constant,
        ratios,
        max_rel_spread,
    }
}

/// Polynomial `f(z) = Σ c_j z^j` in the squared-area variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbePolynomial {
    pub coeffs: Vec<Complex64>,
}

impl ProbePolynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Self { coeffs }
    }

    pub fn monomial(k: usize) -> Self {
        let mut c = vec![Complex64::new(0.0, 0.0); k + 1];
        c[k] = Complex64::new(1.0, 0.0);
        Self { coeffs: c }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }

    pub fn derivative(&self) -> ProbePolynomial {
        ProbePolynomial {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, c)| c * j as f64)
                .collect(),
        }
    }
}

/// Support point and weights of the contact part of `μ(f)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactTerm {
    pub z0: Complex64,
    pub value_coeff: Complex64,
    pub slope_coeff: Complex64,
}

impl ContactTerm {
    /// `4π(1+i/γ)^{−3}[(ln2 − 2) f(z₀) − 8(1+i/γ)^{−2} f′(z₀)]`.
    pub fn new(gamma: f64) -> Self {
        let c = Complex64::new(1.0, 1.0 / gamma);
        let pref = 4.0 * PI * c.powi(-3);
        ContactTerm {
            z0: 4.0 * c.powi(-2),
            value_coeff: pref * (LN_2 - 2.0),
            slope_coeff: -pref * 8.0 * c.powi(-2),
        }
    }

    pub fn apply(&self, f: &ProbePolynomial) -> Complex64 {
        self.value_coeff * f.eval(self.z0) + self.slope_coeff * f.derivative().eval(self.z0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuValue {
    pub integral: Complex64,
    pub contact: Complex64,
    /// Contact weights doubled, matching the unit-mass density moments.
    pub contact_density_consistent: Complex64,
}

impl MuValue {
    pub fn total(&self) -> Complex64 {
        self.integral + self.contact
    }

    pub fn total_density_consistent(&self) -> Complex64 {
        self.integral + self.contact_density_consistent
    }
}

/// `μ(f)`: the radial integral (contour `v = 2il/(1+i/γ)`) plus contact terms.
pub fn mu_functional(f: &ProbePolynomial, gamma: f64, spec: &QuadratureSpec) -> Result<MuValue, MomentError> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(MomentError::InvalidGamma(gamma));
    }
    let contact = ContactTerm::new(gamma);
    let c = Complex64::new(1.0, 1.0 / gamma);
    let pref = 4.0 * PI * c.powi(-3);
    // f(v²) on the contour is f(−z₀ l²); integrate monomials exactly
    let mut integral = Complex64::new(0.0, 0.0);
    let mut zj = Complex64::new(1.0, 0.0);
    for (j, cj) in f.coeffs.iter().enumerate() {
        if cj.norm() > 0.0 {
            integral += cj * zj * arcsin_regular_integral(j, spec)?;
        }
        zj *= -contact.z0;
    }
    integral *= pref;
    let contact_value = contact.apply(f);
    Ok(MuValue {
        integral,
        contact: contact_value,
        contact_density_consistent: 2.0 * contact_value,
    })
}

/// Effect on the arcsin moments of replacing `I` by `I + C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffShiftReport {
    pub shift: f64,
    pub differences: Vec<f64>,
    /// `max_k |Δ_k − C|`, evaluated in extended precision.
    pub max_residual: f64,
    /// Spread of `Δ_k` across `k`; zero for a pure `f(1)` contact pattern.
    pub max_spread: f64,
    /// Fitted contact weights `Δ_k ≈ a·f(1) + b·f′(1) = a + b·k`.
    pub contact_value: f64,
    pub contact_slope: f64,
    /// Largest part of `Δ_k` not explained by the contact pattern, i.e. the
    /// change it would force on the regular density moments.
    pub regular_change: f64,
}

pub fn cutoff_shift_check(c: f64, k_max: usize, bits: usize) -> Result<CutoffShiftReport, MomentError> {
    let cfg = PrecisionConfig::for_moments(k_max, bits);
    cfg.validate()?;
    let x = GKind::Arcsin.x_of_g(&cfg);
    let shift = xfloat::from_f64(c, bits);
    let mut differences = Vec::with_capacity(k_max + 1);
    let mut diffs_big = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let base = moment_generic(k, &x)?;
        let moved = moment_generic_shifted(k, &x, Some(&shift))?;
        let d = moved.value.sub(&base.value, bits, RM);
        differences.push(xfloat::to_f64(&d));
        diffs_big.push(d);
    }
    let max_residual = diffs_big
        .iter()
        .map(|d| xfloat::to_f64(&d.sub(&shift, bits, RM).abs()))
        .fold(0.0, f64::max);
    let max_spread = diffs_big
        .iter()
        .map(|d| xfloat::to_f64(&d.sub(&diffs_big[0], bits, RM).abs()))
        .fold(0.0, f64::max);
    let a = diffs_big[0].clone();
    let b = match diffs_big.get(1) {
        Some(d1) => d1.sub(&a, bits, RM),
        None => xfloat::zero(bits),
    };
    let regular_change = diffs_big
        .iter()
        .enumerate()
        .map(|(k, d)| {
            let fit = a.add(&b.mul(&xfloat::from_i64(k as i64, bits), bits, RM), bits, RM);
            xfloat::to_f64(&d.sub(&fit, bits, RM).abs())
        })
        .fold(0.0, f64::max);
    Ok(CutoffShiftReport {
        shift: c,
        differences,
        max_residual,
        max_spread,
        contact_value: xfloat::to_f64(&a),
        contact_slope: xfloat::to_f64(&b),
        regular_change,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> PrecisionConfig {
        PrecisionConfig::for_moments(10, 256)
    }

    #[test]
    fn generating_function_endpoints() {
        let s = QuadratureSpec::default();
        assert!((generating_function_I(0.0, GfRoute::Closed, &s).unwrap() - PI * LN_2).abs() < 1e-15);
        assert_eq!(generating_function_I(1.0, GfRoute::Closed, &s).unwrap(), 0.0);
        let q = generating_function_I(0.6, GfRoute::RadialQuadrature, &QuadratureSpec::oracle()).unwrap();
        assert!((q - PI * 1.8f64.ln()).abs() < 1e-10, "{q}");
        assert!(generating_function_I(1.5, GfRoute::Closed, &s).is_err());
    }

    #[test]
    fn linear_closed_form_values() {
        let expect = [PI / 2.0, -9.0 * PI / 4.0, 75.0 * PI / 2.0];
        for (k, e) in expect.iter().enumerate() {
            let m = moment_closed_form(k, &GKind::Linear, &cfg()).unwrap();
            assert!((m.value_f64() - e).abs() < 1e-13 * e.abs());
        }
        assert!((moment_closed_form(0, &GKind::Linear, &cfg()).unwrap().to_unit_mass().value_f64() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn arcsin_values() {
        let m0 = moment_closed_form(0, &GKind::Arcsin, &cfg()).unwrap();
        assert!((m0.value_f64() - PI * (0.5 + LN_2)).abs() < 1e-14);
        let x = Jet::variable(cfg().order, 256).sin();
        let m1 = moment_generic(1, &x).unwrap();
        assert_eq!(m1.kind, KindLabel::Arcsin);
        assert!((m1.value_f64() - PI * (2.75 + LN_2)).abs() < 1e-13);
    }

    #[test]
    fn insufficient_order() {
        let small = PrecisionConfig { bits: 128, order: 4 };
        assert_eq!(
            moment_closed_form(3, &GKind::Linear, &small).unwrap_err(),
            MomentError::InsufficientOrder { k: 3, required: 8, available: 4 }
        );
    }

    #[test]
    fn generic_rejects_even_parts() {
        let x = Jet::from_f64(&[0.0, 1.0, 0.5, 0.0], 128);
        assert_eq!(GKind::generic(x).unwrap_err(), MomentError::EvenContamination { order: 2 });
        let flat = Jet::from_f64(&[0.0, 0.0, 0.0, 1.0], 128);
        assert_eq!(GKind::generic(flat).unwrap_err(), MomentError::DegenerateSlope);
    }

    #[test]
    fn generic_equals_closed_linear() {
        let c = cfg();
        let x = GKind::Linear.x_of_g(&c);
        for k in 0..=10 {
            let a = moment_generic(k, &x).unwrap();
            let b = moment_closed_form(k, &GKind::Linear, &c).unwrap();
            assert!(xfloat::rel_diff(&a.value, &b.value, 256) < 1e-60, "k={k}");
        }
    }

    #[test]
    fn linear_sign_alternates() {
        for k in 0..=8 {
            let m = moment_closed_form(k, &GKind::Linear, &cfg()).unwrap().value_f64();
            assert_eq!(m > 0.0, k % 2 == 0, "k={k}");
        }
    }

    #[test]
    fn density_linear_unit_mass() {
        let m = density_moment_quadrature(0, &GKind::Linear, &QuadratureSpec::default()).unwrap();
        assert!((m.value_f64() - 1.0).abs() < 1e-9, "{}", m.value_f64());
    }

    #[test]
    fn arcsin_integral_part_at_zero() {
        let m = density_moment_quadrature(0, &GKind::Arcsin, &QuadratureSpec::oracle()).unwrap();
        let parts = m.parts.unwrap();
        assert!((parts.regular - (3.0 - 4.0 * LN_2)).abs() < 1e-11, "{}", parts.regular);
        assert!((m.value_f64() + 1.0 + 2.0 * LN_2).abs() < 1e-11);
    }

    #[test]
    fn contact_terms() {
        let ct = ContactTerm::new(1.0);
        let one = ProbePolynomial::monomial(0);
        let expect = 4.0 * PI * Complex64::new(1.0, 1.0).powi(-3) * (LN_2 - 2.0);
        assert!((ct.apply(&one) - expect).norm() < 1e-14);
        assert!(ct.z0.im != 0.0);
        // f = z − z₀ removes the f(z₀) contribution
        let f = ProbePolynomial::new(vec![-ct.z0, Complex64::new(1.0, 0.0)]);
        assert!((ct.apply(&f) - ct.slope_coeff).norm() < 1e-14);
    }

    #[test]
    fn mu_rejects_bad_gamma() {
        let f = ProbePolynomial::monomial(0);
        assert_eq!(
            mu_functional(&f, 0.0, &QuadratureSpec::default()).unwrap_err(),
            MomentError::InvalidGamma(0.0)
        );
    }

    #[test]
    fn shift_zero_is_identity() {
        let r = cutoff_shift_check(0.0, 3, 256).unwrap();
        assert!(r.differences.iter().all(|d| *d == 0.0));
    }
}
