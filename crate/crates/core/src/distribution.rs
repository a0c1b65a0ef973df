//! The reconstructed single-triangle area distribution `N₀` (Minkowski) and
//! its Euclidean counterpart: evaluation, poles, decay rates, local maxima
//! and the `τ = 0` factorized product.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::optimize::{fit_line, golden_section_max};
use crate::quadrature::QuadratureSpec;
use crate::special::{k0_scaled, ki1_complex_scaled, SpecialError};

/// Refusal radius around a pole, in the `v²` plane.
pub const POLE_EXCLUSION: f64 = 1e-6;

/// Required relative excess of a maximum over both neighboring minima.
pub const PROMINENCE_FLOOR: f64 = 0.01;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DistributionError {
    #[error("v² = {v2} lies within {distance:e} of pole n = {n} at {location}")]
    Pole {
        n: u32,
        location: Complex64,
        v2: Complex64,
        distance: f64,
    },
    #[error("gamma must be positive and finite, got {0}")]
    InvalidGamma(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("fit failed: {0}")]
    FitFailure(String),
    #[error("entry {index}: {source}")]
    InEntry {
        index: usize,
        #[source]
        source: Box<DistributionError>,
    },
    #[error(transparent)]
    Special(#[from] SpecialError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaParam(f64);

impl GammaParam {
    pub fn new(gamma: f64) -> Result<Self, DistributionError> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(DistributionError::InvalidGamma(gamma));
        }
        Ok(Self(gamma))
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    /// `1/γ − i`
    pub fn a(&self) -> Complex64 {
        Complex64::new(1.0 / self.0, -1.0)
    }

    /// Pole `n` at `v² = 4n²(1 + i/γ)^{−2}`.
    pub fn pole(&self, n: u32) -> Complex64 {
        let c = Complex64::new(1.0, 1.0 / self.0);
        4.0 * (n as f64).powi(2) * c.powi(-2)
    }

    /// Nearest pole `(n, location, distance)` to `v2`.
    pub fn nearest_pole(&self, v2: Complex64) -> (u32, Complex64, f64) {
        let z1 = self.pole(1);
        let guess = (v2.norm() / z1.norm()).sqrt().round().max(1.0) as u32;
        let lo = guess.saturating_sub(2).max(1);
        (lo..=guess + 2)
            .chain(std::iter::once(1))
            .map(|n| {
                let p = self.pole(n);
                (n, p, (v2 - p).norm())
            })
            .min_by(|a, b| a.2.total_cmp(&b.2))
            .expect("non-empty range")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Spacelike,
    Timelike,
}

impl Region {
    /// `v²` on the physical ray at `|v| = t`.
    pub fn v2(&self, t: f64) -> Complex64 {
        match self {
            Region::Spacelike => Complex64::new(-t * t, 0.0),
            Region::Timelike => Complex64::new(t * t, 0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AreaClass {
    Spacelike,
    Timelike,
    Null,
    Nonphysical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SquaredArea {
    pub v2: Complex64,
}

impl SquaredArea {
    pub fn new(v2: Complex64) -> Self {
        Self { v2 }
    }

    pub fn real(v2: f64) -> Self {
        Self::new(Complex64::new(v2, 0.0))
    }

    pub fn on_ray(region: Region, t: f64) -> Self {
        Self::new(region.v2(t))
    }

    pub fn class(&self) -> AreaClass {
        if self.v2.im != 0.0 {
            AreaClass::Nonphysical
        } else if self.v2.re < 0.0 {
            AreaClass::Spacelike
        } else if self.v2.re > 0.0 {
            AreaClass::Timelike
        } else {
            AreaClass::Null
        }
    }

    /// Principal `√(v²)`; spacelike maps to `i|v|`.
    pub fn v(&self) -> Complex64 {
        self.v2.sqrt()
    }

    pub fn modulus(&self) -> f64 {
        self.v2.norm().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityPoint {
    pub value: f64,
    pub ln_value: f64,
    pub pole_distance: f64,
    pub nearest_pole: u32,
}

/// `ln|sinh z|`, stable for large `|Re z|`.
pub fn ln_abs_sinh(z: Complex64) -> f64 {
    let x = z.re.abs();
    let c2y = (2.0 * z.im).cos();
    if x > 20.0 {
        // |sinh z|² = (cosh 2x − cos 2y)/2
        x - LN_2 + 0.5 * ((-4.0 * x).exp() - 2.0 * (-2.0 * x).exp() * c2y).ln_1p()
    } else {
        0.5 * ((x.sinh()).powi(2) + (z.im.sin()).powi(2)).ln()
    }
}

/// `ln|(w/4) / ((w²/4 + 1) sinh(πw/2))|`, regular at `w = 0`.
pub fn ln_abs_factor(w: Complex64) -> f64 {
    let z = w * (PI / 2.0);
    let ln_ratio = if z.norm() < 1e-3 {
        // (w/4)/sinh(πw/2) = (1/2π)·z/sinh z
        (1.0 / (2.0 * PI)).ln() + (Complex64::new(1.0, 0.0) - z * z / 6.0).norm().ln()
    } else {
        (w / 4.0).norm().ln() - ln_abs_sinh(z)
    };
    ln_ratio - (w * w / 4.0 + 1.0).norm().ln()
}

/// `ln|w/4|² − ln|w²/4 + 1|²`, the rational prefactor divided out before fits.
fn ln_rational_prefactor(w: Complex64) -> f64 {
    if w.norm() == 0.0 {
        return 0.0;
    }
    2.0 * ((w / 4.0).norm().ln() - (w * w / 4.0 + 1.0).norm().ln())
}

fn check_pole(v2: Complex64, gamma: &GammaParam) -> Result<(u32, f64), DistributionError> {
    let (n, location, distance) = gamma.nearest_pole(v2);
    if distance < POLE_EXCLUSION {
        return Err(DistributionError::Pole {
            n,
            location,
            v2,
            distance,
        });
    }
    Ok((n, distance))
}

/// `N₀(v, v*) = |[¼(1/γ−i)²v² + 1]^{−1} ¼(1/γ−i)v / sinh(π/2 (1/γ−i)v)|²`.
pub fn n0_density(v2: SquaredArea, gamma: GammaParam) -> Result<DensityPoint, DistributionError> {
    let (nearest_pole, pole_distance) = check_pole(v2.v2, &gamma)?;
    let ln_value = 2.0 * ln_abs_factor(gamma.a() * v2.v());
    Ok(DensityPoint {
        value: ln_value.exp(),
        ln_value,
        pole_distance,
        nearest_pole,
    })
}

/// Euclidean Immirzi parameter: real, or continued from Minkowski `γ` by
/// `γ_E → −iγ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EuclideanGamma {
    Real(f64),
    FromMinkowski(f64),
}

impl EuclideanGamma {
    /// `1/γ_E`
    fn inverse(&self) -> Result<Complex64, DistributionError> {
        match *self {
            EuclideanGamma::Real(g) if g != 0.0 && g.is_finite() => Ok(Complex64::new(1.0 / g, 0.0)),
            EuclideanGamma::FromMinkowski(g) if g > 0.0 && g.is_finite() => Ok(Complex64::new(0.0, 1.0 / g)),
            EuclideanGamma::Real(g) | EuclideanGamma::FromMinkowski(g) => Err(DistributionError::InvalidGamma(g)),
        }
    }
}

/// One Euclidean factor `(¼cv) / ([¼c²v² + 1] sinh(πcv/2))`.
fn euclidean_factor(c: Complex64, v: f64) -> Result<Complex64, DistributionError> {
    let w = c * v;
    // poles at w = ±2i (double with the first sinh zero) and w = ±2in
    let n = (w.im.abs() / 2.0).round().max(1.0);
    let distance = (w.re.powi(2) + (w.im.abs() - 2.0 * n).powi(2)).sqrt();
    if distance < POLE_EXCLUSION {
        return Err(DistributionError::Pole {
            n: n as u32,
            location: Complex64::new(0.0, 2.0 * n * w.im.signum()),
            v2: Complex64::new(v * v, 0.0),
            distance,
        });
    }
    let z = w * (PI / 2.0);
    let ratio = if z.norm() < 1e-3 {
        (Complex64::new(1.0, 0.0) - z * z / 6.0) / (2.0 * PI)
    } else {
        (w / 4.0) / z.sinh()
    };
    Ok(ratio / (w * w / 4.0 + 1.0))
}

/// `N₀ᴱ(⁺v_E, ⁻v_E)`: the product of the two Euclidean factors with
/// `c± = 1/γ_E ± 1`. Under `γ_E → −iγ` the product is real.
pub fn n0_euclidean(vplus: f64, vminus: f64, gamma_e: EuclideanGamma) -> Result<f64, DistributionError> {
    if !(vplus >= 0.0) || !(vminus >= 0.0) {
        return Err(DistributionError::InvalidArgument(format!(
            "Euclidean areas must be nonnegative, got ({vplus}, {vminus})"
        )));
    }
    let inv = gamma_e.inverse()?;
    let p = euclidean_factor(inv + 1.0, vplus)?;
    let m = euclidean_factor(inv - 1.0, vminus)?;
    let prod = p * m;
    debug_assert!(prod.im.abs() <= 1e-12 * prod.norm().max(f64::MIN_POSITIVE));
    Ok(prod.re)
}

/// `ln N₀ᴱ` on the physical slice `⁺v_E = ⁻v_E = v_E`, stable at large `v_E`.
pub fn n0_euclidean_slice_ln(v: f64, gamma_e: EuclideanGamma) -> Result<f64, DistributionError> {
    let inv = gamma_e.inverse()?;
    let lp = ln_abs_factor((inv + 1.0) * v);
    let lm = ln_abs_factor((inv - 1.0) * v);
    Ok(lp + lm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityVariant {
    /// `g(x) = arcsin x`: the distribution `N₀`.
    Arcsin,
    /// `g(x) = x` comparison: `|Ki₁(z)/z|²`, `z = (1/γ − i)v/2`.
    Linear,
}

/// Linear-variant density `|Ki₁(z)/z|²` in log form.
pub fn linear_variant_ln_density(v2: SquaredArea, gamma: GammaParam, spec: &QuadratureSpec) -> Result<f64, DistributionError> {
    let z = gamma.a() * v2.v() / 2.0;
    let scaled = ki1_complex_scaled(z, spec)?;
    Ok(2.0 * (-z.re + scaled.norm().ln() - z.norm().ln()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitWindow {
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
}

impl Default for FitWindow {
    fn default() -> Self {
        Self {
            lo: 5.0,
            hi: 50.0,
            samples: 64,
        }
    }
}

impl FitWindow {
    fn grid(&self) -> Result<Vec<f64>, DistributionError> {
        if !(self.lo > 0.0) || !(self.hi >= 2.0 * self.lo) || self.samples < 5 {
            return Err(DistributionError::FitFailure(format!(
                "window [{}, {}] with {} samples is too narrow",
                self.lo, self.hi, self.samples
            )));
        }
        let n = self.samples;
        Ok((0..n)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (n - 1) as f64)
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub predicted: f64,
    pub fitted: f64,
    pub rel_error: f64,
    pub rms: f64,
    pub window: FitWindow,
}

fn finish_fit(predicted: f64, xs: &[f64], ys: &[f64], window: FitWindow) -> Result<DecayFit, DistributionError> {
    let line = fit_line(xs, ys).ok_or_else(|| DistributionError::FitFailure("degenerate sample set".into()))?;
    let fitted = -line.slope;
    Ok(DecayFit {
        predicted,
        fitted,
        rel_error: ((fitted - predicted) / predicted).abs(),
        rms: line.rms,
        window,
    })
}

/// Predicted rate: arcsin `π` (spacelike) or `π/γ` (timelike); linear `1` or `1/γ`.
pub fn predicted_decay_rate(region: Region, gamma: GammaParam, variant: DensityVariant) -> f64 {
    let base = match variant {
        DensityVariant::Arcsin => PI,
        DensityVariant::Linear => 1.0,
    };
    match region {
        Region::Spacelike => base,
        Region::Timelike => base / gamma.value(),
    }
}

/// Least-squares log-slope of the density along a physical ray, with the
/// rational prefactor divided out.
pub fn decay_rate(
    region: Region,
    gamma: GammaParam,
    variant: DensityVariant,
    window: FitWindow,
    spec: &QuadratureSpec,
) -> Result<DecayFit, DistributionError> {
    let ts = window.grid()?;
    let ys = ts
        .par_iter()
        .map(|&t| {
            let v2 = SquaredArea::on_ray(region, t);
            match variant {
                DensityVariant::Arcsin => {
                    let w = gamma.a() * v2.v();
                    Ok(n0_density(v2, gamma)?.ln_value - ln_rational_prefactor(w))
                }
                DensityVariant::Linear => {
                    // |Ki₁(z)/z|² ≈ |π/(2z³)| e^{−2 Re z}
                    let z = gamma.a() * v2.v() / 2.0;
                    Ok(linear_variant_ln_density(v2, gamma, spec)? - (PI / (2.0 * z.norm().powi(3))).ln())
                }
            }
        })
        .collect::<Result<Vec<f64>, DistributionError>>()?;
    finish_fit(predicted_decay_rate(region, gamma, variant), &ts, &ys, window)
}

/// Rate of the model integral `2K₀(√(−v²))`, with `√(π/2t)` divided out.
pub fn model_k0_decay(window: FitWindow, spec: &QuadratureSpec) -> Result<DecayFit, DistributionError> {
    let ts = window.grid()?;
    let ys = ts
        .par_iter()
        .map(|&t| Ok((2.0 * k0_scaled(t, spec)?).ln() - t - (PI / (2.0 * t)).sqrt().ln()))
        .collect::<Result<Vec<f64>, DistributionError>>()?;
    finish_fit(1.0, &ts, &ys, window)
}

/// Decay rate of `N₀ᴱ` on the physical slice, prefactors divided out.
pub fn euclidean_decay_rate(gamma_e: EuclideanGamma, window: FitWindow) -> Result<DecayFit, DistributionError> {
    let inv = gamma_e.inverse()?;
    let ts = window.grid()?;
    let ys = ts
        .iter()
        .map(|&t| {
            let wp = (inv + 1.0) * t;
            let wm = (inv - 1.0) * t;
            Ok(n0_euclidean_slice_ln(t, gamma_e)? - 0.5 * (ln_rational_prefactor(wp) + ln_rational_prefactor(wm)))
        })
        .collect::<Result<Vec<f64>, DistributionError>>()?;
    // both factors decay as exp(−π|Re c±| v/2)
    let predicted = PI / 2.0 * ((inv + 1.0).re.abs() + (inv - 1.0).re.abs());
    finish_fit(predicted, &ts, &ys, window)
}

/// `γn` (spacelike) or `n` (timelike).
pub fn predicted_spectrum(gamma: GammaParam, region: Region, n: u32) -> Result<f64, DistributionError> {
    if n < 1 {
        return Err(DistributionError::InvalidArgument("spectrum index n must be ≥ 1".into()));
    }
    Ok(match region {
        Region::Spacelike => gamma.value() * n as f64,
        Region::Timelike => n as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalMaximum {
    pub location: f64,
    pub ln_value: f64,
    /// Relative excess over the higher of the two neighboring minima.
    pub prominence: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximaReport {
    pub gamma: f64,
    pub region: Region,
    pub scan_max: f64,
    pub grid_points: usize,
    pub maxima: Vec<LocalMaximum>,
    /// Candidates rejected by the prominence floor.
    pub rejected: usize,
}

/// Oscillation period of `|sinh|²` along the ray: `2γ` (spacelike) or `2` (timelike).
pub fn maxima_period(gamma: GammaParam, region: Region) -> f64 {
    match region {
        Region::Spacelike => 2.0 * gamma.value(),
        Region::Timelike => 2.0,
    }
}

/// Grid scan of `ln N₀` along the ray, then golden-section refinement of
/// each bracketed maximum; keeps at most `n_max` maxima above the
/// prominence floor.
pub fn find_local_maxima(
    gamma: GammaParam,
    region: Region,
    n_max: usize,
    grid_points: usize,
) -> Result<MaximaReport, DistributionError> {
    if grid_points < 16 {
        return Err(DistributionError::InvalidArgument("grid needs at least 16 points".into()));
    }
    let scan_max = maxima_period(gamma, region) * (n_max as f64 + 1.5);
    let ln_at = |t: f64| -> f64 {
        n0_density(SquaredArea::on_ray(region, t), gamma)
            .map(|d| d.ln_value)
            .unwrap_or(f64::NEG_INFINITY)
    };
    let ts: Vec<f64> = (1..=grid_points).map(|i| scan_max * i as f64 / grid_points as f64).collect();
    let ys: Vec<f64> = ts.par_iter().map(|&t| ln_at(t)).collect();

    let mut peaks = Vec::new();
    for i in 1..ts.len() - 1 {
        if ys[i] > ys[i - 1] && ys[i] >= ys[i + 1] {
            peaks.push(i);
        }
    }
    let mut maxima = Vec::new();
    let mut rejected = 0;
    for (j, &i) in peaks.iter().enumerate() {
        let left_start = if j == 0 { 0 } else { peaks[j - 1] };
        let right_end = peaks.get(j + 1).copied().unwrap_or(ts.len() - 1);
        let left_min = ys[left_start..=i].iter().copied().fold(f64::INFINITY, f64::min);
        let right_min = ys[i..=right_end].iter().copied().fold(f64::INFINITY, f64::min);
        let (loc, lnv) = golden_section_max(ln_at, ts[i - 1], ts[i + 1], 1e-12);
        let prominence = (lnv - left_min.max(right_min)).exp() - 1.0;
        if prominence >= PROMINENCE_FLOOR {
            maxima.push(LocalMaximum {
                location: loc,
                ln_value: lnv,
                prominence,
            });
        } else {
            rejected += 1;
        }
        if maxima.len() == n_max {
            break;
        }
    }
    Ok(MaximaReport {
        gamma: gamma.value(),
        region,
        scan_max,
        grid_points,
        maxima,
        rejected,
    })
}

/// Product of `N₀` over independent triangles (the `τ = 0` case).
pub fn factorized_density(v2_list: &[SquaredArea], gamma: GammaParam) -> Result<f64, DistributionError> {
    let mut ln_total = 0.0;
    for (index, v2) in v2_list.iter().enumerate() {
        match n0_density(*v2, gamma) {
            Ok(p) => ln_total += p.ln_value,
            Err(e) => {
                return Err(DistributionError::InEntry {
                    index,
                    source: Box::new(e),
                })
            }
        }
    }
    Ok(ln_total.exp())
}
