//! The acceptance suite: ten numbered checks, each pairing a closed-form
//! claim with an independent oracle, with its own tolerance and time budget.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distribution::{
    decay_rate, euclidean_decay_rate, find_local_maxima, maxima_period, model_k0_decay, n0_density, predicted_spectrum,
    DensityVariant, EuclideanGamma, FitWindow, GammaParam, Region, SquaredArea,
};
use crate::jet::PrecisionConfig;
use crate::measure::{edges_from_triad, length_moment_scan, Triad};
use crate::moments::{
    cutoff_shift_check, density_moment_quadrature, fit_route_constant, generating_function_I, moment_closed_form,
    moment_generic, GKind, GfRoute,
};
use crate::quadrature::QuadratureSpec;
use crate::selfdual::{round_trip_defect, sigma_algebra_defect, AreaTensor4, SigmaBasis};
use crate::special::{sinh_identity_at_zero, table_identity_residual, table_identity_sides, TableIdentity};
use crate::xfloat;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    pub bits: usize,
    pub quadrature: QuadratureSpec,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            bits: 256,
            quadrature: QuadratureSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    /// Worst observed deviation, in the criterion's own measure.
    pub residual: f64,
    pub tolerance: f64,
    pub elapsed_s: f64,
    pub time_limit_s: f64,
    pub detail: String,
}

impl CriterionOutcome {
    pub fn within_time(&self) -> bool {
        self.elapsed_s <= self.time_limit_s
    }

    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:>2} {:<34} residual {:.3e} (tol {:.1e}) {:.2}s/{:.0}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.residual,
            self.tolerance,
            self.elapsed_s,
            self.time_limit_s,
            self.detail
        )
    }
}

pub const CRITERIA: [(u8, &str, f64); 10] = [
    (1, "moment routes (linear)", 10.0),
    (2, "generating function", 5.0),
    (3, "table identities", 30.0),
    (4, "moment routes (arcsin)", 60.0),
    (5, "distribution asymptotics", 30.0),
    (6, "local maxima", 10.0),
    (7, "Euclidean consistency", 10.0),
    (8, "cutoff-shift invariance", 10.0),
    (9, "measure scaling", 60.0),
    (10, "algebra and round trips", 10.0),
];

struct Check {
    passed: bool,
    residual: f64,
    tolerance: f64,
    detail: String,
}

fn failed(tolerance: f64, err: impl std::fmt::Display) -> Check {
    Check {
        passed: false,
        residual: f64::INFINITY,
        tolerance,
        detail: format!("error: {err}"),
    }
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn c1_linear_routes(cfg: &VerifyConfig) -> Check {
    let tol = 1e-8;
    let run = || -> Result<Check, Box<dyn std::error::Error>> {
        let pc = PrecisionConfig::for_moments(2, cfg.bits);
        let expected = [1.0, -4.5, 75.0];
        let m0 = moment_closed_form(0, &GKind::Linear, &pc)?.value_f64();
        let mut worst: f64 = 0.0;
        let mut parts = Vec::new();
        for (k, e) in expected.iter().enumerate() {
            let closed = moment_closed_form(k, &GKind::Linear, &pc)?.value_f64() / m0;
            let dens = density_moment_quadrature(k, &GKind::Linear, &cfg.quadrature)?.value_f64();
            worst = worst.max(rel(closed, *e)).max(rel(dens, *e));
            parts.push(format!("k={k}: {closed:.10} / {dens:.10}"));
        }
        Ok(Check {
            passed: worst < tol,
            residual: worst,
            tolerance: tol,
            detail: parts.join("; "),
        })
    };
    run().unwrap_or_else(|e| failed(tol, e))
}

fn c2_generating_function(_cfg: &VerifyConfig) -> Check {
    let tol = 1e-10;
    let spec = QuadratureSpec::oracle();
    let mut worst: f64 = 0.0;
    for i in 0..50 {
        let x = 0.01 + 0.98 * i as f64 / 49.0;
        let a = generating_function_I(x, GfRoute::Closed, &spec);
        let b = generating_function_I(x, GfRoute::RadialQuadrature, &spec);
        match (a, b) {
            (Ok(a), Ok(b)) => worst = worst.max((a - b).abs()),
            (Err(e), _) | (_, Err(e)) => return failed(tol, e),
        }
    }
    Check {
        passed: worst < tol,
        residual: worst,
        tolerance: tol,
        detail: "50 points in [0.01, 0.99], absolute".into(),
    }
}

fn c3_table_identities(_cfg: &VerifyConfig) -> Check {
    let tol = 1e-8;
    let spot_tol = 1e-10;
    let spec = QuadratureSpec {
        abs_tol: 1e-13,
        rel_tol: 1e-12,
        ..QuadratureSpec::oracle()
    };
    let grid: Vec<f64> = (0..50).map(|i| -0.95 + 1.9 * (i + 1) as f64 / 51.0).collect();
    let mut worst = [0.0f64; 2];
    for (slot, which) in [TableIdentity::SechK0, TableIdentity::SinhContact].into_iter().enumerate() {
        let results: Vec<_> = {
            use rayon::prelude::*;
            grid.par_iter().map(|&g| table_identity_residual(g, which, &spec)).collect()
        };
        for r in results {
            match r {
                Ok(r) => worst[slot] = worst[slot].max(r.abs()),
                Err(e) => return failed(tol, e),
            }
        }
    }
    let spot = match table_identity_sides(0.0, TableIdentity::SinhContact, &spec) {
        Ok((_, rhs)) => (rhs - sinh_identity_at_zero()).abs(),
        Err(e) => return failed(tol, e),
    };
    let residual = worst[0].max(worst[1]);
    Check {
        passed: residual < tol && spot < spot_tol,
        residual,
        tolerance: tol,
        detail: format!(
            "sech/K0 {:.2e}, sinh {:.2e}; g=0 quadrature vs ln2-1/2: {spot:.2e} (tol {spot_tol:.0e})",
            worst[0], worst[1]
        ),
    }
}

fn c4_arcsin_routes(cfg: &VerifyConfig) -> Check {
    let tol_exact = 1e-25;
    let tol_const = 1e-6;
    let run = || -> Result<Check, Box<dyn std::error::Error>> {
        let pc = PrecisionConfig::for_moments(10, cfg.bits);
        let x = GKind::Arcsin.x_of_g(&pc);
        let mut exact: f64 = 0.0;
        let mut closed = Vec::new();
        for k in 0..=10 {
            let c = moment_closed_form(k, &GKind::Arcsin, &pc)?;
            let g = moment_generic(k, &x)?;
            exact = exact.max(xfloat::rel_diff(&g.value, &c.value, cfg.bits));
            closed.push(c);
        }
        let dens = (0..=6)
            .map(|k| density_moment_quadrature(k, &GKind::Arcsin, &cfg.quadrature))
            .collect::<Result<Vec<_>, _>>()?;
        let fit = fit_route_constant(&closed[..=6], &dens);
        Ok(Check {
            passed: exact < tol_exact && fit.max_rel_spread < tol_const,
            residual: fit.max_rel_spread,
            tolerance: tol_const,
            detail: format!(
                "closed vs generic k<=10: {exact:.2e} (tol {tol_exact:.0e}); density/closed constant {:.12} stable to {:.2e} over k<=6",
                fit.constant, fit.max_rel_spread
            ),
        })
    };
    run().unwrap_or_else(|e| failed(tol_const, e))
}

fn c5_asymptotics(cfg: &VerifyConfig) -> Check {
    let tol = 0.01;
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for gm in [0.5, 1.0, 2.0] {
        let gamma = GammaParam::new(gm).expect("positive gamma");
        for region in [Region::Spacelike, Region::Timelike] {
            match decay_rate(region, gamma, DensityVariant::Arcsin, FitWindow::default(), &cfg.quadrature) {
                Ok(f) => {
                    worst = worst.max(f.rel_error);
                    parts.push(format!("g={gm} {region:?} {:.5}/{:.5}", f.fitted, f.predicted));
                }
                Err(e) => return failed(tol, e),
            }
        }
    }
    match model_k0_decay(FitWindow::default(), &cfg.quadrature) {
        Ok(f) => {
            worst = worst.max(f.rel_error);
            parts.push(format!("2K0 {:.5}/1", f.fitted));
        }
        Err(e) => return failed(tol, e),
    }
    Check {
        passed: worst < tol,
        residual: worst,
        tolerance: tol,
        detail: parts.join("; "),
    }
}

fn c6_maxima(_cfg: &VerifyConfig) -> Check {
    let tol = 0.02;
    let mut worst: f64 = 0.0;
    let mut passed = true;
    let mut parts = Vec::new();
    for (gm, region) in [(0.1, Region::Spacelike), (10.0, Region::Timelike)] {
        let gamma = GammaParam::new(gm).expect("positive gamma");
        let report = match find_local_maxima(gamma, region, 5, 20_000) {
            Ok(r) => r,
            Err(e) => return failed(tol, e),
        };
        let period = maxima_period(gamma, region);
        if report.maxima.len() < 5 {
            passed = false;
        }
        let mut locs = Vec::new();
        for (i, m) in report.maxima.iter().enumerate() {
            let n = i as u32 + 1;
            let target = period * n as f64;
            let dev = rel(m.location, target);
            worst = worst.max(dev);
            let ratio = m.location / predicted_spectrum(gamma, region, n).expect("n >= 1");
            locs.push(format!("{:.4}(dev {:.1}%, /spectrum {:.3})", m.location, 100.0 * dev, ratio));
        }
        parts.push(format!("g={gm} {region:?}: {} of 5 maxima [{}]", report.maxima.len(), locs.join(", ")));
    }
    Check {
        passed: passed && worst < tol,
        residual: worst,
        tolerance: tol,
        detail: parts.join("; "),
    }
}

fn c7_euclidean(_cfg: &VerifyConfig) -> Check {
    let tol = 0.01;
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for gm in [0.5, 1.0, 2.0] {
        match euclidean_decay_rate(EuclideanGamma::FromMinkowski(gm), FitWindow::default()) {
            Ok(f) => {
                let dev = rel(f.fitted, PI);
                worst = worst.max(dev);
                parts.push(format!("g={gm}: {:.6}", f.fitted));
            }
            Err(e) => return failed(tol, e),
        }
    }
    Check {
        passed: worst < tol,
        residual: worst,
        tolerance: tol,
        detail: format!("rate vs pi: {}", parts.join(", ")),
    }
}

fn c8_cutoff_shift(cfg: &VerifyConfig) -> Check {
    let tol = 1e-20;
    match cutoff_shift_check(1.0, 6, cfg.bits) {
        Ok(r) => {
            let residual = r.max_spread.max(r.max_residual).max(r.regular_change);
            Check {
                passed: residual < tol,
                residual,
                tolerance: tol,
                detail: format!(
                    "C=1: differences constant in k (spread {:.1e}); contact fit a={:.3}, b={:.1e}; regular part change {:.1e}",
                    r.max_spread, r.contact_value, r.contact_slope, r.regular_change
                ),
            }
        }
        Err(e) => failed(tol, e),
    }
}

fn c9_measure(cfg: &VerifyConfig) -> Check {
    let tol = 0.05;
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for n in [0u32, 4, 10, 18, 22] {
        match length_moment_scan(n, 4, 32, cfg.seed) {
            Ok(r) => {
                worst = worst.max(r.rel_error());
                parts.push(format!("n={n}: {:.4}", r.exponent));
            }
            Err(e) => return failed(tol, e),
        }
    }
    let flip = match (length_moment_scan(19, 4, 32, cfg.seed), length_moment_scan(20, 4, 32, cfg.seed)) {
        (Ok(a), Ok(b)) => {
            parts.push(format!("n=19 {:?}, n=20 {:?}", a.verdict, b.verdict));
            a.verdict.is_convergent() && !b.verdict.is_convergent()
        }
        (Err(e), _) | (_, Err(e)) => return failed(tol, e),
    };
    Check {
        passed: worst < tol && flip,
        residual: worst,
        tolerance: tol,
        detail: parts.join("; "),
    }
}

fn c10_algebra(cfg: &VerifyConfig) -> Check {
    let tol = 1e-12;
    let basis = SigmaBasis::new();
    let algebra = sigma_algebra_defect(&basis);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut tensor_rt: f64 = 0.0;
    for _ in 0..1000 {
        let comps: [f64; 6] = std::array::from_fn(|_| rng.random_range(-2.0..2.0));
        tensor_rt = tensor_rt.max(round_trip_defect(&AreaTensor4::from_components(comps), &basis));
    }
    let mut triad_rt: f64 = 0.0;
    let mut count = 0;
    while count < 1000 {
        let t = Triad::random(&mut rng);
        let Ok(e) = edges_from_triad(&t) else { continue };
        let back = e.to_triad();
        let s = t.triple().signum();
        for a in 0..3 {
            for k in 0..3 {
                triad_rt = triad_rt.max((back.v[a][k] - s * t.v[a][k]).abs());
            }
        }
        count += 1;
    }
    let n0 = match n0_density(SquaredArea::real(0.0), GammaParam::new(1.0).expect("gamma")) {
        Ok(d) => (d.value - 1.0 / (4.0 * PI * PI)).abs(),
        Err(e) => return failed(tol, e),
    };
    let residual = tensor_rt.max(triad_rt).max(n0);
    Check {
        passed: algebra == 0.0 && residual < tol,
        residual,
        tolerance: tol,
        detail: format!(
            "sigma algebra defect {algebra:.1e} (exact); decompose/recompose {tensor_rt:.1e}; triad/edges {triad_rt:.1e}; N0(0) {n0:.1e}"
        ),
    }
}

/// Runs one criterion by number (1 to 10).
pub fn run_criterion(id: u8, cfg: &VerifyConfig) -> Option<CriterionOutcome> {
    let &(_, name, limit) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let check = match id {
        1 => c1_linear_routes(cfg),
        2 => c2_generating_function(cfg),
        3 => c3_table_identities(cfg),
        4 => c4_arcsin_routes(cfg),
        5 => c5_asymptotics(cfg),
        6 => c6_maxima(cfg),
        7 => c7_euclidean(cfg),
        8 => c8_cutoff_shift(cfg),
        9 => c9_measure(cfg),
        10 => c10_algebra(cfg),
        _ => return None,
    };
    let elapsed_s = start.elapsed().as_secs_f64();
    Some(CriterionOutcome {
        id,
        name: name.to_string(),
        passed: check.passed,
        residual: check.residual,
        tolerance: check.tolerance,
        elapsed_s,
        time_limit_s: limit,
        detail: check.detail,
    })
}

pub fn run_all(cfg: &VerifyConfig) -> Vec<CriterionOutcome> {
    CRITERIA.iter().filter_map(|c| run_criterion(c.0, cfg)).collect()
}
