//! Thin helpers over `astro_float::BigFloat`: construction, constants and
//! conversion back to `f64` / decimal text.

use std::cell::RefCell;

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};

pub const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

/// Runs `f` with the thread-local constants cache.
pub fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

pub fn from_f64(x: f64, bits: usize) -> BigFloat {
    BigFloat::from_f64(x, bits)
}

pub fn from_i64(x: i64, bits: usize) -> BigFloat {
    BigFloat::from_i64(x, bits)
}

pub fn zero(bits: usize) -> BigFloat {
    BigFloat::new(bits)
}

pub fn pi(bits: usize) -> BigFloat {
    with_consts(|cc| cc.pi(bits, RM))
}

pub fn ln2(bits: usize) -> BigFloat {
    with_consts(|cc| cc.ln_2(bits, RM))
}

/// `n!` computed exactly (up to the working precision).
pub fn factorial(n: usize, bits: usize) -> BigFloat {
    let mut acc = from_i64(1, bits);
    for k in 2..=n as i64 {
        acc = acc.mul(&from_i64(k, bits), bits, RM);
    }
    acc
}

/// Nearest `f64` (truncating below the second mantissa word).
pub fn to_f64(x: &BigFloat) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    if x.is_zero() {
        return 0.0;
    }
    let Some((words, _, sign, exponent, _)) = x.as_raw_parts() else {
        return f64::NAN;
    };
    let n = words.len();
    let top = words[n - 1] as f64;
    let next = if n >= 2 { words[n - 2] as f64 } else { 0.0 };
    // mantissa m ∈ [1/2, 1): value = m · 2^exponent
    let m = (top + next / 18446744073709551616.0) / 18446744073709551616.0;
    let mut v = m;
    let mut e = exponent;
    // split the scaling so that 2^e never overflows on its own
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
    }
    v *= 2f64.powi(e);
    match sign {
        Sign::Neg => -v,
        Sign::Pos => v,
    }
}

/// Decimal rendering with the full working precision.
pub fn to_decimal(x: &BigFloat) -> String {
    with_consts(|cc| x.format(Radix::Dec, RM, cc)).unwrap_or_else(|_| "NaN".to_string())
}

/// `|a - b| / max(|b|, tiny)` evaluated in extended precision, reported as `f64`.
pub fn rel_diff(a: &BigFloat, b: &BigFloat, bits: usize) -> f64 {
    let d = a.sub(b, bits, RM).abs();
    if b.is_zero() {
        return to_f64(&d);
    }
    to_f64(&d.div(&b.abs(), bits, RM))
}
