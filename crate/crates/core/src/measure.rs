//! Configuration-measure factors of a 4-simplex in time gauge: triad Gram
//! determinants, the `|det|^{3/2}` and `|det|^{9/2}` weights, edge
//! reconstruction from area vectors, and the flattening scan that locates
//! the integrability threshold for `⟨lⁿ⟩`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::optimize::fit_line;

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

/// Relative Gram determinant below which a triad counts as coplanar.
pub const DEGENERACY_THRESHOLD: f64 = 1e-28;

/// Half-width of the band around exponent −1 reported as marginal.
pub const MARGINAL_BAND: f64 = 0.02;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("degenerate triad: Gram determinant {det:e} (relative {relative:e})")]
    DegenerateTriad { det: f64, relative: f64 },
    #[error("singular transformation: det A = {0:e}")]
    SingularTransform(f64),
    #[error("scan fit failed: {0}")]
    FitFailure(String),
    #[error("invalid scan parameters: {0}")]
    InvalidParameters(String),
}

pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

fn scale(a: &Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn det3(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det_n(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut det = 1.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .expect("non-empty");
        if m[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        det *= m[col][col];
        for r in col + 1..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    det
}

/// Area vectors `v₁, v₂, v₃` of the three triangles sharing a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Triad {
    pub v: [Vec3; 3],
}

impl Triad {
    pub fn new(v1: Vec3, v2: Vec3, v3: Vec3) -> Self {
        Self { v: [v1, v2, v3] }
    }

    /// `v₁ × v₂ · v₃`
    pub fn triple(&self) -> f64 {
        dot(&cross(&self.v[0], &self.v[1]), &self.v[2])
    }

    pub fn scaled(&self, lambda: f64) -> Triad {
        Triad {
            v: self.v.map(|x| scale(&x, lambda)),
        }
    }

    /// `v_α → A_α^β v_β`
    pub fn transformed(&self, a: &Mat3) -> Triad {
        let mut out = [[0.0; 3]; 3];
        for (alpha, row) in a.iter().enumerate() {
            for (beta, &coef) in row.iter().enumerate() {
                for k in 0..3 {
                    out[alpha][k] += coef * self.v[beta][k];
                }
            }
        }
        Triad { v: out }
    }

    /// Components drawn uniformly from `[−1, 1]`.
    pub fn random<R: Rng>(rng: &mut R) -> Triad {
        let mut v = [[0.0; 3]; 3];
        for row in v.iter_mut() {
            for x in row.iter_mut() {
                *x = rng.random_range(-1.0..1.0);
            }
        }
        Triad { v }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TriadGram {
    pub g: Mat3,
    /// Cofactor determinant of `g`.
    pub det: f64,
}

pub fn triad_gram(t: &Triad) -> TriadGram {
    let mut g = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            g[a][b] = dot(&t.v[a], &t.v[b]);
        }
    }
    TriadGram { g, det: det3(&g) }
}

/// `det‖v_α·v_β‖`, evaluated as `(v₁×v₂·v₃)²` for accuracy near flattening.
pub fn gram_det(t: &Triad) -> f64 {
    t.triple().powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightExponent {
    ThreeHalves,
    NineHalves,
}

impl WeightExponent {
    pub fn value(&self) -> f64 {
        match self {
            WeightExponent::ThreeHalves => 1.5,
            WeightExponent::NineHalves => 4.5,
        }
    }
}

/// `|det‖v_α·v_β‖|^{exponent}`.
pub fn measure_weight(t: &Triad, exponent: WeightExponent) -> f64 {
    gram_det(t).abs().powf(exponent.value())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeTriple {
    pub l: [Vec3; 3],
}

impl EdgeTriple {
    pub fn triple(&self) -> f64 {
        dot(&cross(&self.l[0], &self.l[1]), &self.l[2])
    }

    /// Root-sum-square edge length.
    pub fn total_length(&self) -> f64 {
        self.l.iter().map(|l| dot(l, l)).sum::<f64>().sqrt()
    }

    /// `v_α = ½ l_β × l_γ` for cyclic `(α, β, γ)`.
    pub fn to_triad(&self) -> Triad {
        let l = &self.l;
        Triad {
            v: [
                scale(&cross(&l[1], &l[2]), 0.5),
                scale(&cross(&l[2], &l[0]), 0.5),
                scale(&cross(&l[0], &l[1]), 0.5),
            ],
        }
    }
}

/// `l_α = √2 v_β × v_γ |det|^{−1/4}` for cyclic `(α, β, γ)`, one term per `α`.
pub fn edges_from_triad(t: &Triad) -> Result<EdgeTriple, MeasureError> {
    let det = gram_det(t);
    let scale_ref: f64 = t.v.iter().map(|v| dot(v, v)).product();
    let relative = if scale_ref > 0.0 { det / scale_ref } else { 0.0 };
    if !(relative > DEGENERACY_THRESHOLD) {
        return Err(MeasureError::DegenerateTriad { det, relative });
    }
    let f = std::f64::consts::SQRT_2 * det.powf(-0.25);
    let v = &t.v;
    Ok(EdgeTriple {
        l: [
            scale(&cross(&v[1], &v[2]), f),
            scale(&cross(&v[2], &v[0]), f),
            scale(&cross(&v[0], &v[1]), f),
        ],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub det_a: f64,
    /// `det G(Av) / det G(v)` and its prediction `(det A)²`.
    pub gram_ratio: f64,
    pub gram_expected: f64,
    /// Finite-difference Jacobian of `X → AXAᵀ` on symmetric matrices and
    /// its prediction `(det A)⁴`.
    pub jacobian: f64,
    pub jacobian_expected: f64,
    /// `gram_ratio² / jacobian − 1`, zero when the δ-factor scalings cancel.
    pub cancellation_residual: f64,
}

const SYM_INDEX: [(usize, usize); 6] = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2)];

fn congruence(a: &Mat3, x: &Mat3) -> Mat3 {
    let mut ax = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            ax[i][j] = (0..3).map(|k| a[i][k] * x[k][j]).sum();
        }
    }
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| ax[i][k] * a[j][k]).sum();
        }
    }
    out
}

fn sym_basis(idx: usize) -> Mat3 {
    let (i, j) = SYM_INDEX[idx];
    let mut m = [[0.0; 3]; 3];
    m[i][j] = 1.0;
    m[j][i] = 1.0;
    m
}

/// Checks the compensating exponents behind the invariance of the δ-factors
/// under `v_α → A_α^β v_β`.
pub fn delta_factor_scaling_check(a: &Mat3, t: &Triad) -> Result<ScalingReport, MeasureError> {
    let det_a = det3(a);
    let scale_a: f64 = a.iter().map(|r| dot(r, r).sqrt()).product();
    if det_a.abs() <= 1e-12 * scale_a.max(f64::MIN_POSITIVE) {
        return Err(MeasureError::SingularTransform(det_a));
    }
    let base = triad_gram(t).det;
    if base == 0.0 {
        return Err(MeasureError::DegenerateTriad { det: 0.0, relative: 0.0 });
    }
    let gram_ratio = triad_gram(&t.transformed(a)).det / base;

    // central differences on the six independent components
    let h = 1e-3;
    let mut jac = vec![vec![0.0; 6]; 6];
    for col in 0..6 {
        let e = sym_basis(col);
        let plus = congruence(a, &e.map(|r| r.map(|x| x * h)));
        let minus = congruence(a, &e.map(|r| r.map(|x| -x * h)));
        for (row, &(i, j)) in SYM_INDEX.iter().enumerate() {
            jac[row][col] = (plus[i][j] - minus[i][j]) / (2.0 * h);
        }
    }
    let jacobian = det_n(jac);
    Ok(ScalingReport {
        det_a,
        gram_ratio,
        gram_expected: det_a.powi(2),
        jacobian,
        jacobian_expected: det_a.powi(4),
        cancellation_residual: gram_ratio.powi(2) / jacobian - 1.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Convergent,
    Marginal,
    Divergent,
}

impl Verdict {
    pub fn from_exponent(p: f64) -> Self {
        if p > -1.0 + MARGINAL_BAND {
            Verdict::Convergent
        } else if p >= -1.0 - MARGINAL_BAND {
            Verdict::Marginal
        } else {
            Verdict::Divergent
        }
    }

    pub fn is_convergent(&self) -> bool {
        matches!(self, Verdict::Convergent)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub n: u32,
    pub seed: u64,
    pub samples: usize,
    pub eps_range: (f64, f64),
    pub exponent: f64,
    pub expected: f64,
    pub fit_rms: f64,
    pub verdict: Verdict,
}

impl ScanReport {
    /// `|fitted − expected| / max(|expected|, 1)`.
    pub fn rel_error(&self) -> f64 {
        (self.exponent - self.expected).abs() / self.expected.abs().max(1.0)
    }
}

/// Splits `v₃` into its projection on the plane of `v₁, v₂` and the normal part.
fn split_third(t: &Triad) -> (Vec3, Vec3) {
    let nrm = cross(&t.v[0], &t.v[1]);
    let nn = dot(&nrm, &nrm);
    let along = dot(&t.v[2], &nrm) / nn;
    let normal = scale(&nrm, along);
    let plane = [t.v[2][0] - normal[0], t.v[2][1] - normal[1], t.v[2][2] - normal[2]];
    (plane, normal)
}

/// Integrand `|det|^{9/2} |l|ⁿ` on the flattening family
/// `v₃(ε) = P v₃ + ε N v₃`.
pub fn flattening_integrand(base: &Triad, eps: f64, n: u32) -> Result<f64, MeasureError> {
    let (plane, normal) = split_third(base);
    let v3 = [plane[0] + eps * normal[0], plane[1] + eps * normal[1], plane[2] + eps * normal[2]];
    let t = Triad::new(base.v[0], base.v[1], v3);
    let edges = edges_from_triad(&t)?;
    Ok(measure_weight(&t, WeightExponent::NineHalves) * edges.total_length().powi(n as i32))
}

/// Fits the power of `ε` in the flattening integrand over `decades` decades
/// below `ε = 0.1`, sampling log-uniformly with one seeded substream per
/// decade.
pub fn length_moment_scan(n: u32, decades: u32, samples_per_decade: usize, seed: u64) -> Result<ScanReport, MeasureError> {
    if decades == 0 || samples_per_decade < 2 {
        return Err(MeasureError::InvalidParameters(format!(
            "need ≥ 1 decade and ≥ 2 samples per decade, got {decades} and {samples_per_decade}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = loop {
        let t = Triad::random(&mut rng);
        if gram_det(&t) > 1e-3 {
            break t;
        }
    };
    let top = -1.0;
    let per_decade: Vec<Vec<(f64, f64)>> = (0..decades)
        .into_par_iter()
        .map(|d| {
            let mut r = ChaCha8Rng::seed_from_u64(seed);
            r.set_stream(d as u64 + 1);
            (0..samples_per_decade)
                .map(|_| {
                    let log_eps = top - d as f64 - r.random::<f64>();
                    let eps = 10f64.powf(log_eps);
                    flattening_integrand(&base, eps, n).map(|y| (eps.ln(), y.ln()))
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    let pts: Vec<(f64, f64)> = per_decade.into_iter().flatten().collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = pts.iter().copied().unzip();
    let line = fit_line(&xs, &ys).ok_or_else(|| MeasureError::FitFailure("degenerate sampling".into()))?;
    Ok(ScanReport {
        n,
        seed,
        samples: xs.len(),
        eps_range: (10f64.powf(top - decades as f64), 10f64.powf(top)),
        exponent: line.slope,
        expected: 9.0 - n as f64 / 2.0,
        fit_rms: line.rms,
        verdict: Verdict::from_exponent(line.slope),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthogonal_triad() {
        let a = 1.7;
        let t = Triad::new([a, 0.0, 0.0], [0.0, a, 0.0], [0.0, 0.0, a]);
        let g = triad_gram(&t);
        assert!((g.det - a.powi(6)).abs() < 1e-12);
        assert_eq!(g.g[0][1], 0.0);
        assert!((g.g[2][2] - a * a).abs() < 1e-15);
    }

    #[test]
    fn coplanar_triad() {
        let t = Triad::new([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [1.0, 1.0, 0.0]);
        assert_eq!(triad_gram(&t).det, 0.0);
        assert_eq!(measure_weight(&t, WeightExponent::NineHalves), 0.0);
        assert!(matches!(edges_from_triad(&t), Err(MeasureError::DegenerateTriad { .. })));
    }

    #[test]
    fn weight_values() {
        // triple product 2, so det = 4
        let t = Triad::new([2.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]);
        assert!((measure_weight(&t, WeightExponent::ThreeHalves) - 8.0).abs() < 1e-14);
    }

    #[test]
    fn cube_edges() {
        let b = 1.3;
        let c = b * b / 2.0;
        let t = Triad::new([c, 0.0, 0.0], [0.0, c, 0.0], [0.0, 0.0, c]);
        let e = edges_from_triad(&t).unwrap();
        for (alpha, l) in e.l.iter().enumerate() {
            for k in 0..3 {
                let want = if k == alpha { b } else { 0.0 };
                assert!((l[k] - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn flat_tetrahedron_criterion() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let t = Triad::random(&mut rng);
            let e = edges_from_triad(&t).unwrap();
            let lhs = e.triple().abs();
            let rhs = 2.0 * std::f64::consts::SQRT_2 * gram_det(&t).powf(0.25);
            assert!((lhs - rhs).abs() < 1e-10 * rhs.max(1.0), "{lhs} {rhs}");
        }
    }

    #[test]
    fn spike_formation() {
        let base = Triad::new([1.0, 0.2, 0.0], [0.1, 1.0, 0.3], [0.3, 0.4, 1.0]);
        let (plane, normal) = split_third(&base);
        let len = |eps: f64| {
            let v3 = [plane[0] + eps * normal[0], plane[1] + eps * normal[1], plane[2] + eps * normal[2]];
            edges_from_triad(&Triad::new(base.v[0], base.v[1], v3)).unwrap().l[2]
        };
        let ratio = norm(&len(1e-6)) / norm(&len(1e-4));
        assert!((ratio - 10.0).abs() < 1e-6, "{ratio}");
    }

    #[test]
    fn identity_transform() {
        let id = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        let t = Triad::new([1.0, 0.2, 0.0], [0.1, 1.0, 0.3], [0.3, 0.4, 1.0]);
        let r = delta_factor_scaling_check(&id, &t).unwrap();
        assert!((r.gram_ratio - 1.0).abs() < 1e-12 && (r.jacobian - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_scaling_transform() {
        let l = 1.5;
        let a = [[l, 0.0, 0.0], [0.0, l, 0.0], [0.0, 0.0, l]];
        let t = Triad::new([1.0, 0.2, 0.0], [0.1, 1.0, 0.3], [0.3, 0.4, 1.0]);
        let r = delta_factor_scaling_check(&a, &t).unwrap();
        assert!((r.gram_ratio / l.powi(6) - 1.0).abs() < 1e-12);
        assert!((r.jacobian / l.powi(12) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn singular_transform_rejected() {
        let a = [[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [0.0, 0.0, 1.0]];
        let t = Triad::new([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]);
        assert!(matches!(delta_factor_scaling_check(&a, &t), Err(MeasureError::SingularTransform(_))));
    }

    #[test]
    fn verdict_bands() {
        assert_eq!(Verdict::from_exponent(-0.5), Verdict::Convergent);
        assert_eq!(Verdict::from_exponent(-1.0), Verdict::Marginal);
        assert_eq!(Verdict::from_exponent(-2.0), Verdict::Divergent);
    }

    #[test]
    fn scan_is_deterministic() {
        let a = length_moment_scan(4, 3, 8, 11).unwrap();
        let b = length_moment_scan(4, 3, 8, 11).unwrap();
        assert_eq!(a.exponent.to_bits(), b.exponent.to_bits());
        assert!(length_moment_scan(4, 0, 8, 11).is_err());
    }

    #[test]
    fn det_n_matches_det3() {
        let m = [[2.0, -1.0, 0.5], [0.3, 1.0, 4.0], [1.0, 2.0, -3.0]];
        let v: Vec<Vec<f64>> = m.iter().map(|r| r.to_vec()).collect();
        assert!((det_n(v) - det3(&m)).abs() < 1e-12);
    }
}
