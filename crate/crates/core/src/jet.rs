//! Truncated univariate power series ("jets") at extended precision.
//!
//! A jet of order `N` stores the Taylor coefficients `c_0..=c_N` of a
//! function at `g = 0`. All high-order derivatives at the origin used by the
//! moment formulas are read off these coefficients, so cancellations of
//! factorial size never touch `f64`.

use astro_float::BigFloat;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::xfloat::{self, RM};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JetError {
    #[error("truncation orders differ ({left} vs {right})")]
    OrderMismatch { left: usize, right: usize },
    #[error("singular composition: divisor has zero constant term")]
    SingularComposition,
    #[error("{function} is not analytic at constant term {value}")]
    Domain { function: &'static str, value: f64 },
    #[error("odd quotient needs a zero constant term, found {value}")]
    NonZeroConstant { value: f64 },
    #[error("derivative order {n} exceeds jet order {order}")]
    OrderExceeded { n: usize, order: usize },
    #[error("invalid precision configuration: {0}")]
    InvalidPrecision(String),
}

/// Working precision and default truncation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrecisionConfig {
    pub bits: usize,
    pub order: usize,
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        Self {
            bits: 256,
            order: 64,
        }
    }
}

impl PrecisionConfig {
    pub fn new(bits: usize, order: usize) -> Result<Self, JetError> {
        let cfg = Self { bits, order };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), JetError> {
        if self.bits < 64 {
            return Err(JetError::InvalidPrecision(format!(
                "significand bits {} < 64",
                self.bits
            )));
        }
        if self.order < 2 {
            return Err(JetError::InvalidPrecision(format!("order {} < 2", self.order)));
        }
        Ok(())
    }

    /// Order needed for moments up to `k_max`: the largest derivative taken
    /// is `2 k_max + 2`, plus a headroom of 2.
    pub fn for_moments(k_max: usize, bits: usize) -> Self {
        Self {
            bits,
            order: 2 * k_max + 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum JetFn {
    Sqrt,
    Log,
    Exp,
    Sin,
    Cos,
    Arcsin,
}

#[derive(Debug, Clone)]
pub struct Jet {
    coeffs: Vec<BigFloat>,
    bits: usize,
}

impl Jet {
    pub fn from_coeffs(coeffs: Vec<BigFloat>, bits: usize) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least one coefficient");
        Self { coeffs, bits }
    }

    pub fn from_f64(coeffs: &[f64], bits: usize) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| xfloat::from_f64(c, bits)).collect(), bits)
    }

    pub fn zero(order: usize, bits: usize) -> Self {
        Self::from_coeffs(vec![xfloat::zero(bits); order + 1], bits)
    }

    pub fn constant(c: BigFloat, order: usize, bits: usize) -> Self {
        let mut j = Self::zero(order, bits);
        j.coeffs[0] = c;
        j
    }

    pub fn constant_f64(c: f64, order: usize, bits: usize) -> Self {
        Self::constant(xfloat::from_f64(c, bits), order, bits)
    }

    /// The identity `g ↦ g`.
    pub fn variable(order: usize, bits: usize) -> Self {
        let mut j = Self::zero(order, bits);
        if order >= 1 {
            j.coeffs[1] = xfloat::from_i64(1, bits);
        }
        j
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn coeffs(&self) -> &[BigFloat] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> &BigFloat {
        &self.coeffs[n]
    }

    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(xfloat::to_f64).collect()
    }

    fn p(&self) -> usize {
        self.bits
    }

    fn check_order(&self, other: &Jet) -> Result<(), JetError> {
        if self.order() != other.order() {
            return Err(JetError::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    /// Re-truncates to a lower order.
    pub fn truncate(&self, order: usize) -> Jet {
        let n = order.min(self.order());
        Jet::from_coeffs(self.coeffs[..=n].to_vec(), self.bits)
    }

    pub fn add(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check_order(other)?;
        let p = self.p();
        Ok(Jet::from_coeffs(
            self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.add(b, p, RM)).collect(),
            p,
        ))
    }

    pub fn sub(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check_order(other)?;
        let p = self.p();
        Ok(Jet::from_coeffs(
            self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.sub(b, p, RM)).collect(),
            p,
        ))
    }

    pub fn mul(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check_order(other)?;
        let p = self.p();
        let n = self.order();
        let mut out = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut acc = xfloat::zero(p);
            for i in 0..=k {
                acc = acc.add(&self.coeffs[i].mul(&other.coeffs[k - i], p, RM), p, RM);
            }
            out.push(acc);
        }
        Ok(Jet::from_coeffs(out, p))
    }

    pub fn div(&self, other: &Jet) -> Result<Jet, JetError> {
        self.check_order(other)?;
        if other.coeffs[0].is_zero() {
            return Err(JetError::SingularComposition);
        }
        let p = self.p();
        let n = self.order();
        let b0 = &other.coeffs[0];
        let mut q: Vec<BigFloat> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut acc = self.coeffs[k].clone();
            for i in 1..=k {
                acc = acc.sub(&other.coeffs[i].mul(&q[k - i], p, RM), p, RM);
            }
            q.push(acc.div(b0, p, RM));
        }
        Ok(Jet::from_coeffs(q, p))
    }

    pub fn scale(&self, s: &BigFloat) -> Jet {
        let p = self.p();
        Jet::from_coeffs(self.coeffs.iter().map(|c| c.mul(s, p, RM)).collect(), p)
    }

    pub fn scale_f64(&self, s: f64) -> Jet {
        self.scale(&xfloat::from_f64(s, self.bits))
    }

    pub fn add_scalar(&self, s: &BigFloat) -> Jet {
        let mut out = self.clone();
        out.coeffs[0] = out.coeffs[0].add(s, self.bits, RM);
        out
    }

    pub fn add_scalar_f64(&self, s: f64) -> Jet {
        self.add_scalar(&xfloat::from_f64(s, self.bits))
    }

    pub fn neg(&self) -> Jet {
        Jet::from_coeffs(self.coeffs.iter().map(|c| c.neg()).collect(), self.bits)
    }

    /// Formal derivative; order drops by one.
    pub fn derivative(&self) -> Jet {
        let p = self.p();
        if self.order() == 0 {
            return Jet::zero(0, p);
        }
        Jet::from_coeffs(
            (1..=self.order())
                .map(|k| self.coeffs[k].mul(&xfloat::from_i64(k as i64, p), p, RM))
                .collect(),
            p,
        )
    }

    pub fn sqrt(&self) -> Result<Jet, JetError> {
        let p = self.p();
        let a0 = &self.coeffs[0];
        if !a0.is_positive() || a0.is_zero() {
            return Err(JetError::Domain {
                function: "sqrt",
                value: xfloat::to_f64(a0),
            });
        }
        let n = self.order();
        let b0 = a0.sqrt(p, RM);
        let two_b0 = b0.add(&b0, p, RM);
        let mut b = vec![b0];
        for k in 1..=n {
            let mut acc = self.coeffs[k].clone();
            for i in 1..k {
                acc = acc.sub(&b[i].mul(&b[k - i], p, RM), p, RM);
            }
            b.push(acc.div(&two_b0, p, RM));
        }
        Ok(Jet::from_coeffs(b, p))
    }

    pub fn ln(&self) -> Result<Jet, JetError> {
        let p = self.p();
        let a0 = &self.coeffs[0];
        if !a0.is_positive() || a0.is_zero() {
            return Err(JetError::Domain {
                function: "log",
                value: xfloat::to_f64(a0),
            });
        }
        let n = self.order();
        let b0 = xfloat::with_consts(|cc| a0.ln(p, RM, cc));
        let mut b = vec![b0];
        for k in 1..=n {
            // k a0 b_k = k a_k − Σ_{i=1}^{k−1} i b_i a_{k−i}
            let mut acc = self.coeffs[k].mul(&xfloat::from_i64(k as i64, p), p, RM);
            for i in 1..k {
                let t = b[i]
                    .mul(&self.coeffs[k - i], p, RM)
                    .mul(&xfloat::from_i64(i as i64, p), p, RM);
                acc = acc.sub(&t, p, RM);
            }
            let denom = a0.mul(&xfloat::from_i64(k as i64, p), p, RM);
            b.push(acc.div(&denom, p, RM));
        }
        Ok(Jet::from_coeffs(b, p))
    }

    pub fn exp(&self) -> Result<Jet, JetError> {
        let p = self.p();
        let n = self.order();
        let b0 = xfloat::with_consts(|cc| self.coeffs[0].exp(p, RM, cc));
        if b0.is_inf() || b0.is_nan() {
            return Err(JetError::Domain {
                function: "exp",
                value: xfloat::to_f64(&self.coeffs[0]),
            });
        }
        let mut b = vec![b0];
        for k in 1..=n {
            let mut acc = xfloat::zero(p);
            for i in 1..=k {
                let t = self.coeffs[i]
                    .mul(&b[k - i], p, RM)
                    .mul(&xfloat::from_i64(i as i64, p), p, RM);
                acc = acc.add(&t, p, RM);
            }
            b.push(acc.div(&xfloat::from_i64(k as i64, p), p, RM));
        }
        Ok(Jet::from_coeffs(b, p))
    }

    /// `(sin a, cos a)` from the coupled recurrences `s' = c a'`, `c' = −s a'`.
    pub fn sin_cos(&self) -> (Jet, Jet) {
        let p = self.p();
        let n = self.order();
        let a0 = &self.coeffs[0];
        let (s0, c0) = xfloat::with_consts(|cc| (a0.sin(p, RM, cc), a0.cos(p, RM, cc)));
        let mut s = vec![s0];
        let mut c = vec![c0];
        for k in 1..=n {
            let mut sa = xfloat::zero(p);
            let mut ca = xfloat::zero(p);
            for i in 1..=k {
                let ia = self.coeffs[i].mul(&xfloat::from_i64(i as i64, p), p, RM);
                sa = sa.add(&ia.mul(&c[k - i], p, RM), p, RM);
                ca = ca.add(&ia.mul(&s[k - i], p, RM), p, RM);
            }
            let kk = xfloat::from_i64(k as i64, p);
            s.push(sa.div(&kk, p, RM));
            c.push(ca.div(&kk, p, RM).neg());
        }
        (Jet::from_coeffs(s, p), Jet::from_coeffs(c, p))
    }

    pub fn sin(&self) -> Jet {
        self.sin_cos().0
    }

    pub fn cos(&self) -> Jet {
        self.sin_cos().1
    }

    /// `arcsin a` via `(arcsin a)' = a' / sqrt(1 − a²)`.
    pub fn asin(&self) -> Result<Jet, JetError> {
        let p = self.p();
        let a0 = &self.coeffs[0];
        let one = xfloat::from_i64(1, p);
        if a0.abs().cmp(&one).is_none_or(|c| c >= 0) {
            return Err(JetError::Domain {
                function: "arcsin",
                value: xfloat::to_f64(a0),
            });
        }
        let n = self.order();
        let root = Jet::constant(one, n, p).sub(&self.mul(self)?)?.sqrt()?;
        let slope = self.derivative().div(&root.truncate(n.saturating_sub(1)))?;
        let mut b = vec![xfloat::with_consts(|cc| a0.asin(p, RM, cc))];
        for k in 1..=n {
            b.push(slope.coeffs[k - 1].div(&xfloat::from_i64(k as i64, p), p, RM));
        }
        Ok(Jet::from_coeffs(b, p))
    }

    /// Composes the series `self(y) = Σ c_k y^k` with an inner jet whose
    /// constant term vanishes, by Horner's scheme.
    pub fn compose(&self, inner: &Jet) -> Result<Jet, JetError> {
        if !inner.coeffs[0].is_zero() {
            return Err(JetError::NonZeroConstant {
                value: xfloat::to_f64(&inner.coeffs[0]),
            });
        }
        let n = inner.order();
        let p = self.p();
        let outer = if self.order() > n { self.truncate(n) } else { self.clone() };
        let mut acc = Jet::zero(n, p);
        for c in outer.coeffs.iter().rev() {
            acc = acc.mul(inner)?.add_scalar(c);
        }
        Ok(acc)
    }

    /// Divides by `g`, shifting the coefficients down by one.
    pub fn odd_quotient(&self) -> Result<Jet, JetError> {
        if !self.coeffs[0].is_zero() {
            return Err(JetError::NonZeroConstant {
                value: xfloat::to_f64(&self.coeffs[0]),
            });
        }
        if self.order() == 0 {
            return Ok(Jet::zero(0, self.bits));
        }
        Ok(Jet::from_coeffs(self.coeffs[1..].to_vec(), self.bits))
    }

    /// `n! · c_n`, the `n`-th derivative at the origin.
    pub fn derivative_at_zero(&self, n: usize) -> Result<BigFloat, JetError> {
        if n > self.order() {
            return Err(JetError::OrderExceeded {
                n,
                order: self.order(),
            });
        }
        Ok(self.coeffs[n].mul(&xfloat::factorial(n, self.bits), self.bits, RM))
    }

    /// True when every even-order coefficient is exactly zero.
    pub fn is_odd(&self) -> bool {
        self.coeffs.iter().step_by(2).all(|c| c.is_zero())
    }
}

pub fn jet_arith(a: &Jet, b: &Jet, op: ArithOp) -> Result<Jet, JetError> {
    match op {
        ArithOp::Add => a.add(b),
        ArithOp::Sub => a.sub(b),
        ArithOp::Mul => a.mul(b),
        ArithOp::Div => a.div(b),
    }
}

pub fn jet_fn(a: &Jet, f: JetFn) -> Result<Jet, JetError> {
    match f {
        JetFn::Sqrt => a.sqrt(),
        JetFn::Log => a.ln(),
        JetFn::Exp => a.exp(),
        JetFn::Sin => Ok(a.sin()),
        JetFn::Cos => Ok(a.cos()),
        JetFn::Arcsin => a.asin(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: usize = 256;

    fn assert_coeffs(j: &Jet, expected: &[f64], tol: f64) {
        assert_eq!(j.order() + 1, expected.len(), "length");
        for (k, (got, want)) in j.coeffs_f64().iter().zip(expected).enumerate() {
            assert!((got - want).abs() <= tol, "coeff {k}: {got} vs {want}");
        }
    }

    fn one_minus_g2(order: usize) -> Jet {
        let g = Jet::variable(order, P);
        Jet::constant_f64(1.0, order, P).sub(&g.mul(&g).unwrap()).unwrap()
    }

    #[test]
    fn square_of_one_plus_g() {
        let a = Jet::from_f64(&[1.0, 1.0, 0.0], P);
        assert_coeffs(&jet_arith(&a, &a, ArithOp::Mul).unwrap(), &[1.0, 2.0, 1.0], 0.0);
    }

    #[test]
    fn identity_quotient() {
        let a = Jet::from_f64(&[1.0, 0.0, 0.0], P);
        assert_coeffs(&jet_arith(&a, &a, ArithOp::Div).unwrap(), &[1.0, 0.0, 0.0], 0.0);
    }

    #[test]
    fn geometric_series() {
        let one = Jet::constant_f64(1.0, 5, P);
        let q = one.div(&one.sub(&Jet::variable(5, P)).unwrap()).unwrap();
        assert_coeffs(&q, &[1.0; 6], 1e-70);
    }

    #[test]
    fn division_by_vanishing_constant_is_singular() {
        let g = Jet::variable(4, P);
        assert_eq!(
            Jet::constant_f64(1.0, 4, P).div(&g).unwrap_err(),
            JetError::SingularComposition
        );
    }

    #[test]
    fn order_mismatch_is_reported() {
        let a = Jet::variable(3, P);
        let b = Jet::variable(4, P);
        assert_eq!(a.add(&b).unwrap_err(), JetError::OrderMismatch { left: 3, right: 4 });
    }

    #[test]
    fn binomial_sqrt() {
        let r = jet_fn(&one_minus_g2(4), JetFn::Sqrt).unwrap();
        assert_coeffs(&r, &[1.0, 0.0, -0.5, 0.0, -0.125], 1e-70);
    }

    #[test]
    fn maclaurin_sine() {
        let s = jet_fn(&Jet::from_f64(&[0.0, 1.0, 0.0, 0.0, 0.0, 0.0], P), JetFn::Sin).unwrap();
        assert_coeffs(&s, &[0.0, 1.0, 0.0, -1.0 / 6.0, 0.0, 1.0 / 120.0], 1e-70);
    }

    #[test]
    fn arcsin_inverts_sine() {
        let g = Jet::variable(9, P);
        let back = g.sin().asin().unwrap();
        let mut expected = [0.0; 10];
        expected[1] = 1.0;
        assert_coeffs(&back, &expected, 1e-70);
    }

    #[test]
    fn domain_violations() {
        let neg = Jet::constant_f64(-1.0, 3, P);
        assert!(matches!(neg.sqrt(), Err(JetError::Domain { function: "sqrt", .. })));
        assert!(matches!(neg.ln(), Err(JetError::Domain { function: "log", .. })));
        assert!(matches!(
            Jet::constant_f64(1.0, 3, P).asin(),
            Err(JetError::Domain { function: "arcsin", .. })
        ));
    }

    #[test]
    fn odd_quotient_shifts() {
        let a = Jet::from_f64(&[0.0, 1.0, 0.0, 3.0], P);
        assert_coeffs(&a.odd_quotient().unwrap(), &[1.0, 0.0, 3.0], 0.0);
        let z = Jet::zero(4, P);
        assert_coeffs(&z.odd_quotient().unwrap(), &[0.0; 4], 0.0);
        assert!(matches!(
            Jet::constant_f64(2.0, 3, P).odd_quotient(),
            Err(JetError::NonZeroConstant { .. })
        ));
    }

    #[test]
    fn odd_quotient_of_inverse_root_series() {
        // 1 − (1 − g²)^{−1/2} = −g²/2 − 3g⁴/8 − 5g⁶/16 − …
        let n = 7;
        let inv_root = Jet::constant_f64(1.0, n, P).div(&one_minus_g2(n).sqrt().unwrap()).unwrap();
        let a = Jet::constant_f64(1.0, n, P).sub(&inv_root).unwrap();
        let q = a.odd_quotient().unwrap();
        assert_coeffs(&q, &[0.0, -0.5, 0.0, -0.375, 0.0, -0.3125, 0.0], 1e-70);
    }

    #[test]
    fn derivative_extraction() {
        let e = Jet::variable(6, P).exp().unwrap();
        assert!((xfloat::to_f64(&e.derivative_at_zero(3).unwrap()) - 1.0).abs() < 1e-70);
        let j = Jet::from_f64(&[2.5, 1.0, 4.0], P);
        assert_eq!(xfloat::to_f64(&j.derivative_at_zero(0).unwrap()), 2.5);
        assert_eq!(
            j.derivative_at_zero(3).unwrap_err(),
            JetError::OrderExceeded { n: 3, order: 2 }
        );
    }

    #[test]
    fn cos_log_second_derivative() {
        // cos g · ln(1 + cos g) = ln2 − g²/4 − (ln2) g²/2 + O(g⁴)
        let c = Jet::variable(6, P).cos();
        let f = c.mul(&c.add_scalar_f64(1.0).ln().unwrap()).unwrap();
        let d2 = xfloat::to_f64(&f.derivative_at_zero(2).unwrap());
        assert!((d2 - (-0.5 - std::f64::consts::LN_2)).abs() < 1e-15);
    }

    #[test]
    fn horner_composition_matches_direct_exp() {
        // exp series composed with sin g vs. exp(sin g) by recurrence
        let n = 12;
        let mut ex = Vec::with_capacity(n + 1);
        for k in 0..=n {
            ex.push(xfloat::from_i64(1, P).div(&xfloat::factorial(k, P), P, RM));
        }
        let series = Jet::from_coeffs(ex, P);
        let s = Jet::variable(n, P).sin();
        let composed = series.compose(&s).unwrap();
        let direct = s.exp().unwrap();
        for k in 0..=n {
            assert!(xfloat::rel_diff(composed.coeff(k), direct.coeff(k), P).abs() < 1e-70 || direct.coeff(k).is_zero());
        }
    }

    #[test]
    fn precision_config_validation() {
        assert!(PrecisionConfig::new(32, 10).is_err());
        assert!(PrecisionConfig::new(128, 1).is_err());
        assert_eq!(PrecisionConfig::default(), PrecisionConfig { bits: 256, order: 64 });
        assert_eq!(PrecisionConfig::for_moments(10, 256).order, 24);
    }
}
