//! (Anti-)self-dual decomposition of area tensors.
//!
//! Index conventions: `g = diag(-1, 1, 1, 1)`, `ε^{0123} = +1` (hence
//! `ε_{0123} = -1`) and `ε_{123} = +1`. Tensors are stored with upper
//! indices unless a function name says otherwise. Spatial index `k` runs
//! over `1..=3` in formulas and over `0..3` in array storage.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Mat4 = [[f64; 4]; 4];
pub type CMat4 = [[Complex64; 4]; 4];
pub type CVec3 = [Complex64; 3];

const METRIC: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("tensor is not antisymmetric: |v[{a}][{b}] + v[{b}][{a}]| = {defect:e}")]
    NotAntisymmetric { a: usize, b: usize, defect: f64 },
    #[error("non-finite tensor component")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Diagonal entry of the Minkowski metric.
#[inline]
pub fn metric(a: usize) -> f64 {
    METRIC[a]
}

fn permutation_sign(idx: &[usize]) -> f64 {
    for i in 0..idx.len() {
        for j in (i + 1)..idx.len() {
            if idx[i] == idx[j] {
                return 0.0;
            }
        }
    }
    let mut sign = 1.0;
    for i in 0..idx.len() {
        for j in (i + 1)..idx.len() {
            if idx[i] > idx[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// `ε^{abcd}` with `ε^{0123} = +1`.
#[inline]
pub fn levi_civita_upper(a: usize, b: usize, c: usize, d: usize) -> f64 {
    permutation_sign(&[a, b, c, d])
}

/// `ε_{abcd} = -ε^{abcd}` (the metric has determinant −1).
#[inline]
pub fn levi_civita_lower(a: usize, b: usize, c: usize, d: usize) -> f64 {
    -levi_civita_upper(a, b, c, d)
}

/// Three-dimensional `ε_{klm}` on array indices `0..3`.
#[inline]
pub fn levi_civita3(k: usize, l: usize, m: usize) -> f64 {
    permutation_sign(&[k, l, m])
}

/// `ε_{kab}` with `k` a spatial array index and `a, b` spacetime indices;
/// zero whenever `a` or `b` is the time index.
#[inline]
fn eps_spatial(k: usize, a: usize, b: usize) -> f64 {
    if a == 0 || b == 0 {
        0.0
    } else {
        levi_civita3(k, a - 1, b - 1)
    }
}

/// Real antisymmetric 4×4 area tensor `v^{ab}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaTensor4 {
    v: Mat4,
}

impl AreaTensor4 {
    pub fn new(v: Mat4) -> Result<Self, AlgebraError> {
        let scale = v
            .iter()
            .flatten()
            .fold(0.0_f64, |m, x| if x.is_finite() { m.max(x.abs()) } else { f64::NAN });
        if !scale.is_finite() {
            return Err(AlgebraError::NonFinite);
        }
        let tol = 1e-12 * scale.max(f64::MIN_POSITIVE);
        for a in 0..4 {
            for b in a..4 {
                let defect = (v[a][b] + v[b][a]).abs();
                if defect > tol {
                    return Err(AlgebraError::NotAntisymmetric { a, b, defect });
                }
            }
        }
        Ok(Self { v })
    }

    /// Builds the tensor from its six independent components
    /// `(v^{01}, v^{02}, v^{03}, v^{23}, v^{31}, v^{12})`.
    pub fn from_components(c: [f64; 6]) -> Self {
        let mut v = [[0.0; 4]; 4];
        let pairs = [(0, 1), (0, 2), (0, 3), (2, 3), (3, 1), (1, 2)];
        for (x, (a, b)) in c.iter().zip(pairs) {
            v[a][b] = *x;
            v[b][a] = -*x;
        }
        Self { v }
    }

    pub fn zero() -> Self {
        Self { v: [[0.0; 4]; 4] }
    }

    pub fn upper(&self) -> &Mat4 {
        &self.v
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.v[a][b]
    }

    /// `v_{ab} = g_{aa} g_{bb} v^{ab}`.
    pub fn lower(&self) -> Mat4 {
        let mut out = [[0.0; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                out[a][b] = metric(a) * metric(b) * self.v[a][b];
            }
        }
        out
    }
}

/// Spatial edge 4-vector `l^a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge4 {
    pub l: [f64; 4],
}

impl Edge4 {
    pub fn new(l: [f64; 4]) -> Self {
        Self { l }
    }

    pub fn spatial(&self) -> [f64; 3] {
        [self.l[1], self.l[2], self.l[3]]
    }

    /// Minkowski product `l·m = g_{ab} l^a m^b`.
    pub fn dot(&self, other: &Edge4) -> f64 {
        (0..4).map(|a| metric(a) * self.l[a] * other.l[a]).sum()
    }
}

/// Pair of complex 3-vectors `±v` carrying the self-dual and anti-self-dual
/// content of an area tensor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaVector {
    pub plus: CVec3,
    pub minus: CVec3,
}

impl AreaVector {
    pub fn part(&self, sign: Sign) -> &CVec3 {
        match sign {
            Sign::Plus => &self.plus,
            Sign::Minus => &self.minus,
        }
    }

    /// Bilinear square `±v · ±v` (no complex conjugation).
    pub fn square(&self, sign: Sign) -> Complex64 {
        let p = self.part(sign);
        p[0] * p[0] + p[1] * p[1] + p[2] * p[2]
    }

    /// `±v_{ab} = ½ ±v^k ±Σ_{kab}`, lower indices.
    pub fn half_lower(&self, sign: Sign, basis: &SigmaBasis) -> CMat4 {
        let p = self.part(sign);
        let sigma = basis.get(sign);
        let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
        for (k, pk) in p.iter().enumerate() {
            for a in 0..4 {
                for b in 0..4 {
                    out[a][b] += 0.5 * pk * sigma[k][a][b];
                }
            }
        }
        out
    }

    /// Sums both halves back to the real tensor (upper indices). The
    /// imaginary remainder is dropped; for vectors produced by
    /// [`selfdual_decompose`] it vanishes identically.
    pub fn recompose(&self, basis: &SigmaBasis) -> AreaTensor4 {
        let p = self.half_lower(Sign::Plus, basis);
        let m = self.half_lower(Sign::Minus, basis);
        let mut v = [[0.0; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                v[a][b] = metric(a) * metric(b) * (p[a][b] + m[a][b]).re;
            }
        }
        AreaTensor4 { v }
    }
}

/// `±Σ_{kab} = E_{kab} ± i L_{kab}` together with the real generators.
#[derive(Debug, Clone)]
pub struct SigmaBasis {
    plus: [CMat4; 3],
    minus: [CMat4; 3],
    e: [Mat4; 3],
    l: [Mat4; 3],
}

impl Default for SigmaBasis {
    fn default() -> Self {
        Self::new()
    }
}

impl SigmaBasis {
    pub fn new() -> Self {
        let mut e = [[[0.0; 4]; 4]; 3];
        let mut l = [[[0.0; 4]; 4]; 3];
        for k in 0..3 {
            let ks = k + 1;
            for a in 0..4 {
                for b in 0..4 {
                    e[k][a][b] = -eps_spatial(k, a, b);
                    let g_ka = if a == ks { metric(ks) } else { 0.0 };
                    let g_kb = if b == ks { metric(ks) } else { 0.0 };
                    let g_0a = if a == 0 { metric(0) } else { 0.0 };
                    let g_0b = if b == 0 { metric(0) } else { 0.0 };
                    l[k][a][b] = g_ka * g_0b - g_0a * g_kb;
                }
            }
        }
        let build = |s: f64| {
            let mut out = [[[Complex64::new(0.0, 0.0); 4]; 4]; 3];
            for k in 0..3 {
                for a in 0..4 {
                    for b in 0..4 {
                        out[k][a][b] = Complex64::new(e[k][a][b], s * l[k][a][b]);
                    }
                }
            }
            out
        };
        Self {
            plus: build(1.0),
            minus: build(-1.0),
            e,
            l,
        }
    }

    /// `±Σ_{kab}` (all indices down).
    pub fn get(&self, sign: Sign) -> &[CMat4; 3] {
        match sign {
            Sign::Plus => &self.plus,
            Sign::Minus => &self.minus,
        }
    }

    pub fn rotation_generators(&self) -> &[Mat4; 3] {
        &self.e
    }

    pub fn boost_generators(&self) -> &[Mat4; 3] {
        &self.l
    }

    /// Matrix `(±Σ_k)^a_b` with the first index raised.
    pub fn mixed(&self, sign: Sign, k: usize) -> CMat4 {
        let s = &self.get(sign)[k];
        let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                out[a][b] = metric(a) * s[a][b];
            }
        }
        out
    }

    /// `±Σ^{ab}_k` with both tensor indices raised.
    pub fn upper(&self, sign: Sign, k: usize) -> CMat4 {
        let s = &self.get(sign)[k];
        let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                out[a][b] = metric(a) * metric(b) * s[a][b];
            }
        }
        out
    }
}

/// Hodge dual `*A^{ab} = ½ ε^{ab}_{cd} A^{cd}` of an upper-index tensor.
pub fn hodge_dual(a_up: &CMat4) -> CMat4 {
    let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..4 {
                for d in 0..4 {
                    let eps = levi_civita_upper(a, b, c, d);
                    if eps != 0.0 {
                        acc += 0.5 * eps * metric(c) * metric(d) * a_up[c][d];
                    }
                }
            }
            out[a][b] = acc;
        }
    }
    out
}

fn to_complex(m: &Mat4) -> CMat4 {
    let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            out[a][b] = Complex64::new(m[a][b], 0.0);
        }
    }
    out
}

/// Four-tensor self-dual part `±v^{ab} = ½ v^{ab} ± (i/4) ε^{ab}_{cd} v^{cd}`.
pub fn selfdual_part(v: &AreaTensor4, sign: Sign) -> CMat4 {
    let vc = to_complex(v.upper());
    let dual = hodge_dual(&vc);
    let i_half = Complex64::new(0.0, 0.5 * sign.value());
    let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            out[a][b] = 0.5 * vc[a][b] + i_half * dual[a][b];
        }
    }
    out
}

/// `A∘B = ½ A_{ab} B^{ab}` for upper-index inputs.
pub fn circ(a_up: &CMat4, b_up: &CMat4) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 0..4 {
        for b in 0..4 {
            acc += metric(a) * metric(b) * a_up[a][b] * b_up[a][b];
        }
    }
    0.5 * acc
}

/// `A*B = ¼ ε_{abcd} A^{ab} B^{cd}`.
pub fn star(a_up: &CMat4, b_up: &CMat4) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let eps = levi_civita_lower(a, b, c, d);
                    if eps != 0.0 {
                        acc += eps * a_up[a][b] * b_up[c][d];
                    }
                }
            }
        }
    }
    0.25 * acc
}

/// `2(±v)_k = −ε_{klm} v^{lm} ± i(v_{k0} − v_{0k})`.
pub fn selfdual_decompose(v: &AreaTensor4) -> AreaVector {
    let up = v.upper();
    let low = v.lower();
    let half = |s: f64| -> CVec3 {
        let mut out = [Complex64::new(0.0, 0.0); 3];
        for (k, slot) in out.iter_mut().enumerate() {
            let mut re = 0.0;
            for l in 0..3 {
                for m in 0..3 {
                    re -= levi_civita3(k, l, m) * up[l + 1][m + 1];
                }
            }
            let im = s * (low[k + 1][0] - low[0][k + 1]);
            *slot = Complex64::new(0.5 * re, 0.5 * im);
        }
        out
    };
    AreaVector {
        plus: half(1.0),
        minus: half(-1.0),
    }
}

/// Dual bivector `v^{ab} = ½ ε^{ab}_{cd} l₁^c l₂^d` of a triangle.
pub fn bivector_tensor(l1: &Edge4, l2: &Edge4) -> AreaTensor4 {
    let mut v = [[0.0; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            let mut acc = 0.0;
            for c in 0..4 {
                for d in 0..4 {
                    let eps = levi_civita_upper(a, b, c, d);
                    if eps != 0.0 {
                        acc += eps * metric(c) * metric(d) * l1.l[c] * l2.l[d];
                    }
                }
            }
            v[a][b] = 0.5 * acc;
        }
    }
    AreaTensor4 { v }
}

/// Area vectors of the triangle spanned by two edges. Equivalent to
/// `2±v = ±i l₁×l₂ − l₁ l₂⁰ + l₂ l₁⁰`.
pub fn bivector_from_edges(l1: &Edge4, l2: &Edge4) -> AreaVector {
    selfdual_decompose(&bivector_tensor(l1, l2))
}

/// Returns `(v∘v, v*v)` for a real tensor.
pub fn pairing_invariants(v: &AreaTensor4) -> (f64, f64) {
    let vc = to_complex(v.upper());
    (circ(&vc, &vc).re, star(&vc, &vc).re)
}

/// Largest defect of `±Σ_k ±Σ_l = −δ_{kl} + ε_{klm} ±Σ_m` and of
/// `*±Σ = ∓i ±Σ` over all components; zero in exact arithmetic.
pub fn sigma_algebra_defect(basis: &SigmaBasis) -> f64 {
    let mut worst: f64 = 0.0;
    for sign in [Sign::Plus, Sign::Minus] {
        for k in 0..3 {
            let mk = basis.mixed(sign, k);
            for l in 0..3 {
                let ml = basis.mixed(sign, l);
                for a in 0..4 {
                    for c in 0..4 {
                        let mut d = Complex64::new(0.0, 0.0);
                        for b in 0..4 {
                            d += mk[a][b] * ml[b][c];
                        }
                        if k == l && a == c {
                            d += 1.0;
                        }
                        for m in 0..3 {
                            d -= levi_civita3(k, l, m) * basis.mixed(sign, m)[a][c];
                        }
                        worst = worst.max(d.norm());
                    }
                }
            }
            let up = basis.upper(sign, k);
            let dual = hodge_dual(&up);
            let factor = Complex64::new(0.0, -sign.value());
            for a in 0..4 {
                for b in 0..4 {
                    worst = worst.max((dual[a][b] - factor * up[a][b]).norm());
                }
            }
        }
    }
    worst
}

/// `max |recompose(decompose(v)) − v|` over components.
pub fn round_trip_defect(v: &AreaTensor4, basis: &SigmaBasis) -> f64 {
    let back = selfdual_decompose(v).recompose(basis);
    let mut worst: f64 = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            worst = worst.max((back.get(a, b) - v.get(a, b)).abs());
        }
    }
    worst
}
