use anyhow::{anyhow, Result};
use clap::ValueEnum;
use connint::distribution::{
    find_local_maxima, linear_variant_ln_density, maxima_period, n0_density, n0_euclidean_slice_ln, predicted_spectrum,
    EuclideanGamma, GammaParam, Region, SquaredArea,
};
use connint::jet::PrecisionConfig;
use connint::measure::length_moment_scan;
use connint::moments::{density_moment_quadrature, fit_route_constant, moment_closed_form, moment_generic, GKind};
use connint::verify::{run_criterion, VerifyConfig, CRITERIA};
use connint::xfloat;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::output::Table;

/// Residual bound for the `moments` table.
pub const MOMENT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum KindArg {
    Linear,
    Arcsin,
}

impl KindArg {
    fn kind(self) -> GKind {
        match self {
            KindArg::Linear => GKind::Linear,
            KindArg::Arcsin => GKind::Arcsin,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum RegionArg {
    Spacelike,
    Timelike,
}

impl From<RegionArg> for Region {
    fn from(r: RegionArg) -> Self {
        match r {
            RegionArg::Spacelike => Region::Spacelike,
            RegionArg::Timelike => Region::Timelike,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum VariantArg {
    Arcsin,
    Linear,
}

/// A finished table plus any checks that missed their tolerance.
pub struct Report {
    pub table: Table,
    pub failures: Vec<String>,
}

fn echo(cfg: &RunConfig, params: Value) -> Value {
    json!({ "run": cfg, "params": params })
}

fn gamma(cfg: &RunConfig) -> Result<GammaParam> {
    GammaParam::new(cfg.gamma).map_err(|e| anyhow!(e))
}

pub fn moments(cfg: &RunConfig, kind_arg: KindArg) -> Result<Report> {
    let kind = kind_arg.kind();
    let spec = cfg.quadrature()?;
    let pc = PrecisionConfig::for_moments(cfg.kmax, cfg.bits);
    let x = kind.x_of_g(&pc);
    let mut closed = Vec::new();
    let mut generic = Vec::new();
    let mut dens = Vec::new();
    for k in cfg.kmin..=cfg.kmax {
        closed.push(moment_closed_form(k, &kind, &pc)?);
        generic.push(moment_generic(k, &x)?);
        dens.push(density_moment_quadrature(k, &kind, &spec)?);
    }
    // The linear density is unit mass by construction; the arcsin density
    // route carries one global constant, fitted from the first row.
    let constant = match kind_arg {
        KindArg::Linear => 1.0,
        KindArg::Arcsin => fit_route_constant(&closed, &dens).constant,
    };
    let mut table = Table::new(
        "moments",
        echo(cfg, json!({ "kind": kind_arg })),
        &[
            ("k", "index"),
            ("closed_form", "closed_form"),
            ("closed_form_digits", "closed_form"),
            ("generic", "generating_function"),
            ("unit_mass", "closed_form"),
            ("quadrature", "density_quadrature"),
            ("residual_generic", "closed_form_vs_generating_function"),
            ("residual_quadrature", "closed_form_vs_density_quadrature"),
        ],
    );
    table.notes.push(format!("density route constant: {constant} (fit)"));
    table.notes.push("closed_form and generic are raw moments; unit_mass and quadrature are rescaled by 2/pi".into());
    let mut failures = Vec::new();
    for ((c, g), d) in closed.iter().zip(&generic).zip(&dens) {
        let unit = c.to_unit_mass().value_f64();
        let quad = d.value_f64();
        let r_gen = xfloat::rel_diff(&g.value, &c.value, cfg.bits);
        let r_quad = ((quad - constant * unit) / (constant * unit)).abs();
        for (label, r) in [("generic", r_gen), ("quadrature", r_quad)] {
            if r.is_nan() || r >= MOMENT_TOLERANCE {
                failures.push(format!("k = {}: {label} residual {r:e} exceeds {MOMENT_TOLERANCE:e}", c.k));
            }
        }
        table.push(vec![
            c.k.into(),
            c.value_f64().into(),
            xfloat::to_decimal(&c.value).into(),
            g.value_f64().into(),
            unit.into(),
            quad.into(),
            r_gen.into(),
            r_quad.into(),
        ]);
    }
    Ok(Report { table, failures })
}

pub fn density(cfg: &RunConfig, region_arg: RegionArg, variant: VariantArg) -> Result<Report> {
    let g = gamma(cfg)?;
    let region: Region = region_arg.into();
    let spec = cfg.quadrature()?;
    let mut table = Table::new(
        "density",
        echo(cfg, json!({ "region": region_arg, "variant": variant })),
        &[
            ("abs_v", "grid"),
            ("v2", "grid"),
            ("ln_density", "closed_form"),
            ("density", "closed_form"),
            ("pole_distance", "closed_form"),
            ("nearest_pole", "closed_form"),
        ],
    );
    for t in cfg.grid() {
        let v2 = SquaredArea::on_ray(region, t);
        let point = n0_density(v2, g)?;
        let ln = match variant {
            VariantArg::Arcsin => point.ln_value,
            VariantArg::Linear => linear_variant_ln_density(v2, g, &spec)?,
        };
        table.push(vec![
            t.into(),
            v2.v2.into(),
            ln.into(),
            ln.exp().into(),
            point.pole_distance.into(),
            point.nearest_pole.into(),
        ]);
    }
    Ok(Report {
        table,
        failures: Vec::new(),
    })
}

pub fn euclidean_density(cfg: &RunConfig, gamma_e: Option<f64>) -> Result<Report> {
    let ge = match gamma_e {
        Some(x) => EuclideanGamma::Real(x),
        None => EuclideanGamma::FromMinkowski(cfg.gamma),
    };
    let mut table = Table::new(
        "euclidean-density",
        echo(cfg, json!({ "gamma_e": ge })),
        &[("v_e", "grid"), ("ln_density", "closed_form"), ("density", "closed_form")],
    );
    table.notes.push("physical slice: both self-dual magnitudes equal v_e".into());
    for v in cfg.grid() {
        let ln = n0_euclidean_slice_ln(v, ge)?;
        table.push(vec![v.into(), ln.into(), ln.exp().into()]);
    }
    Ok(Report {
        table,
        failures: Vec::new(),
    })
}

pub fn maxima(cfg: &RunConfig, region_arg: RegionArg, n: usize, grid_points: usize) -> Result<Report> {
    let g = gamma(cfg)?;
    let region: Region = region_arg.into();
    let report = find_local_maxima(g, region, n, grid_points)?;
    let period = maxima_period(g, region);
    let mut table = Table::new(
        "maxima",
        echo(cfg, json!({ "region": region_arg, "n": n, "grid_points": grid_points })),
        &[
            ("n", "index"),
            ("location", "scan"),
            ("ln_density", "closed_form"),
            ("prominence", "scan"),
            ("pole_shadow", "closed_form"),
            ("deviation", "scan_vs_closed_form"),
            ("spectrum", "closed_form"),
            ("ratio_to_spectrum", "scan_vs_closed_form"),
        ],
    );
    table.notes.push(format!(
        "found {} of {} requested maxima; {} candidates below the prominence floor",
        report.maxima.len(),
        n,
        report.rejected
    ));
    for (i, m) in report.maxima.iter().enumerate() {
        let idx = i as u32 + 1;
        let shadow = period * idx as f64;
        let spectrum = predicted_spectrum(g, region, idx)?;
        table.push(vec![
            idx.into(),
            m.location.into(),
            m.ln_value.into(),
            m.prominence.into(),
            shadow.into(),
            ((m.location - shadow) / shadow).into(),
            spectrum.into(),
            (m.location / spectrum).into(),
        ]);
    }
    Ok(Report {
        table,
        failures: Vec::new(),
    })
}

pub fn verify(cfg: &RunConfig, ids: &[u8]) -> Result<Report> {
    let vc = VerifyConfig {
        seed: cfg.seed,
        bits: cfg.bits,
        quadrature: cfg.quadrature()?,
    };
    let ids: Vec<u8> = if ids.is_empty() {
        CRITERIA.iter().map(|c| c.0).collect()
    } else {
        ids.to_vec()
    };
    let mut table = Table::new(
        "verify",
        echo(cfg, json!({ "criteria": ids })),
        &[
            ("id", "index"),
            ("name", "label"),
            ("status", "check"),
            ("residual", "check"),
            ("tolerance", "check"),
            ("within_time", "check"),
            ("detail", "check"),
        ],
    );
    let mut failures = Vec::new();
    for id in ids {
        let o = run_criterion(id, &vc).ok_or_else(|| anyhow!("no criterion {id}; valid ids are 1 to 10"))?;
        eprintln!("{}", o.line());
        let ok = o.passed && o.within_time();
        if !ok {
            failures.push(format!("criterion {}: residual {:e} (tolerance {:e})", o.id, o.residual, o.tolerance));
        }
        table.push(vec![
            (o.id as u32).into(),
            o.name.clone().into(),
            if ok { "pass" } else { "fail" }.into(),
            o.residual.into(),
            o.tolerance.into(),
            o.within_time().into(),
            o.detail.clone().into(),
        ]);
    }
    Ok(Report { table, failures })
}

pub fn measure_scan(cfg: &RunConfig, ns: &[u32], decades: u32, samples_per_decade: usize) -> Result<Report> {
    let mut table = Table::new(
        "measure-scan",
        echo(
            cfg,
            json!({ "n": ns, "decades": decades, "samples_per_decade": samples_per_decade }),
        ),
        &[
            ("n", "index"),
            ("exponent", "fit"),
            ("expected", "closed_form"),
            ("rel_error", "fit_vs_closed_form"),
            ("fit_rms", "fit"),
            ("eps_min", "grid"),
            ("eps_max", "grid"),
            ("verdict", "fit"),
        ],
    );
    for &n in ns {
        let r = length_moment_scan(n, decades, samples_per_decade, cfg.seed)?;
        let verdict = serde_json::to_value(r.verdict)?.as_str().unwrap_or_default().to_string();
        table.push(vec![
            n.into(),
            r.exponent.into(),
            r.expected.into(),
            r.rel_error().into(),
            r.fit_rms.into(),
            r.eps_range.0.into(),
            r.eps_range.1.into(),
            verdict.into(),
        ]);
    }
    Ok(Report {
        table,
        failures: Vec::new(),
    })
}
