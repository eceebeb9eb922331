//! Named constants, evaluated in natural-log space.
//!
//! Most of them underflow or overflow `f64` by thousands of orders of
//! magnitude, so the table stores `ln` values and a linear value only where
//! it is representable. Every unqualified `log` is read as the natural log.

use std::str::FromStr;

use dashu_float::DBig;
use serde::Serialize;

use crate::error::{param, Result};

pub const LOG_BASE: &str = "e";
/// Largest ε of the asymptotic regime.
pub const ASYMPTOTIC_EPS: f64 = 1e-4;
/// Significant digits for the decimal evaluations.
pub const DIGITS: usize = 60;

/// `ln(2^8 · 3^2 · 10^3)`
fn ln_eta_denominator() -> f64 {
    (256.0f64 * 9.0 * 1000.0).ln()
}

pub(crate) fn decimal(x: f64, digits: usize) -> DBig {
    DBig::from_str(&format!("{x:.17e}")).expect("formatted float parses").with_precision(digits).value()
}

/// A constant with its natural log and, when finite and nonzero, its value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Constant {
    pub ln: f64,
    pub value: Option<f64>,
}

impl Constant {
    pub fn from_ln(ln: f64) -> Self {
        let v = ln.exp();
        Constant { ln, value: (v.is_finite() && v > 0.0).then_some(v) }
    }
}

/// `ln Γ(d,p) = 10^12 · 2^p · ln² d`
pub fn ln_gamma_dp(d: f64, p: f64) -> f64 {
    1e12 * p.exp2() * d.ln().powi(2)
}

/// `ln α(d) = −10^11 · ln² d`
pub fn ln_alpha_default(d: f64) -> f64 {
    -1e11 * d.ln().powi(2)
}

/// `ln Γ2(d,α,ε) = −ln α − 2 ln ε + 3632 · ln² d`
pub fn ln_gamma2(d: f64, ln_alpha: f64, eps: f64) -> f64 {
    -ln_alpha - 2.0 * eps.ln() + 3632.0 * d.ln().powi(2)
}

/// `ℓ*(d) = ⌊log_{1+1/3000}(5(d−1)/4)⌋`, in decimal arithmetic.
pub fn ell_star(d: usize) -> u64 {
    ell_star_with_digits(d, DIGITS)
}

pub fn ell_star_with_digits(d: usize, digits: usize) -> u64 {
    let x = decimal(5.0 * (d as f64 - 1.0), digits) / decimal(4.0, digits);
    let base = decimal(3001.0, digits) / decimal(3000.0, digits);
    let q = x.ln() / base.ln();
    q.floor().to_f64().value() as u64
}

/// `ℓ*` in double precision, for comparison with [`ell_star`].
pub fn ell_star_f64(d: usize) -> u64 {
    ((1.25 * (d as f64 - 1.0)).ln() / (1.0f64 / 3000.0).ln_1p()).floor() as u64
}

/// `ln α̃ = ln(5α/4) − ℓ* ln(d−1)`
pub fn ln_alpha_tilde(ln_alpha: f64, d: usize) -> f64 {
    1.25f64.ln() + ln_alpha - ell_star(d) as f64 * (d as f64 - 1.0).ln()
}

/// `ln η = ln α̃ + ln ε − ln(2^8·3^2·10^3)`
pub fn ln_eta(ln_alpha: f64, d: usize, eps: f64) -> f64 {
    ln_alpha_tilde(ln_alpha, d) + eps.ln() - ln_eta_denominator()
}

/// `m₂ = ⌈(4 + 2 log₂ m)^{1/ε}⌉` and whether `m >= m₂`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct M2 {
    pub m: u64,
    pub ln_m2: f64,
    /// Exact when below `2^53`.
    pub m2: Option<u64>,
    pub m_at_least_m2: bool,
}

pub fn m2(eps: f64, m: u64) -> M2 {
    let ln_base = (4.0 + 2.0 * (m as f64).log2()).ln();
    let ln_m2 = ln_base / eps;
    let raw = ln_m2.exp();
    let m2 = (raw < 9.007_199_254_740_992e15).then(|| raw.ceil() as u64);
    // m is an integer, so m >= ⌈x⌉ iff m >= x
    let m_at_least_m2 = match m2 {
        Some(v) => m >= v,
        None => (m as f64).ln() >= ln_m2,
    };
    M2 { m, ln_m2, m2, m_at_least_m2 }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantsTable {
    pub log_base: &'static str,
    pub d: usize,
    pub p: f64,
    pub eps: f64,
    pub asymptotic_regime: bool,
    pub alpha_is_default: bool,
    pub gamma_dp: Constant,
    pub gamma1: Constant,
    pub gamma2: Constant,
    pub alpha: Constant,
    pub alpha_d: Constant,
    pub ell_star: u64,
    pub alpha_tilde: Constant,
    pub eta: Constant,
    pub m2: Option<M2>,
}

/// Every named constant for `(d, ε, α, p)`; `α` defaults to `α(d)` and is
/// given by its natural log since the default underflows.
pub fn constants_table(d: usize, eps: f64, ln_alpha: Option<f64>, p: f64, m: Option<u64>) -> Result<ConstantsTable> {
    if d < 3 {
        return param(format!("degree d = {d} must be at least 3"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return param(format!("ε = {eps} must lie in (0, 1)"));
    }
    if !(p >= 1.0 && p.is_finite()) {
        return param(format!("p = {p} must be finite and >= 1"));
    }
    if let Some(a) = ln_alpha {
        if !(a <= 0.0 && a.is_finite()) {
            return param(format!("ln α = {a} must be finite and <= 0"));
        }
    }
    if m == Some(0) {
        return param("m must be positive");
    }
    let df = d as f64;
    let ln_alpha_d = ln_alpha_default(df);
    let ln_a = ln_alpha.unwrap_or(ln_alpha_d);
    Ok(ConstantsTable {
        log_base: LOG_BASE,
        d,
        p,
        eps,
        asymptotic_regime: eps <= ASYMPTOTIC_EPS,
        alpha_is_default: ln_alpha.is_none(),
        gamma_dp: Constant::from_ln(ln_gamma_dp(df, p)),
        gamma1: Constant { ln: (18.0 / eps).ln(), value: Some(18.0 / eps) },
        gamma2: Constant::from_ln(ln_gamma2(df, ln_a, eps)),
        alpha: Constant::from_ln(ln_a),
        alpha_d: Constant::from_ln(ln_alpha_d),
        ell_star: ell_star(d),
        alpha_tilde: Constant::from_ln(ln_alpha_tilde(ln_a, d)),
        eta: Constant::from_ln(ln_eta(ln_a, d, eps)),
        m2: m.map(|m| m2(eps, m)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma1_and_gamma_dp() {
        let t = constants_table(3, 1e-4, None, 1.0, None).unwrap();
        assert!((t.gamma1.value.unwrap() - 180_000.0).abs() < 1e-9);
        assert!(t.asymptotic_regime && t.alpha_is_default);
        let expected = 2e12 * 3f64.ln().powi(2);
        assert!((t.gamma_dp.ln - expected).abs() <= 1e-15 * expected);
        assert_eq!(t.gamma_dp.value, None);
        assert_eq!(t.alpha_d.value, None);
    }

    #[test]
    fn ell_star_paths_agree() {
        for d in 3..40 {
            assert_eq!(ell_star(d), ell_star_f64(d), "d = {d}");
            assert_eq!(ell_star(d), ell_star_with_digits(d, 90));
        }
        assert_eq!(ell_star(3), 2749);
    }

    #[test]
    fn recomposition() {
        let ln_a = -3.0;
        for d in [3, 4, 7] {
            let at = ln_alpha_tilde(ln_a, d);
            assert_eq!(at, 1.25f64.ln() + ln_a - ell_star(d) as f64 * (d as f64 - 1.0).ln());
            let e = ln_eta(ln_a, d, 0.01);
            assert!((e - (at + 0.01f64.ln() - 2_304_000f64.ln())).abs() < 1e-9);
        }
    }

    #[test]
    fn monotone_in_p_and_d() {
        let mut prev = f64::NEG_INFINITY;
        for p in [1.0, 1.5, 2.0, 3.0] {
            let v = ln_gamma_dp(3.0, p);
            assert!(v > prev);
            prev = v;
        }
        prev = f64::NEG_INFINITY;
        for d in 3..20 {
            let v = ln_gamma_dp(d as f64, 1.0);
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn m2_flag() {
        let r = m2(0.1, 10);
        assert!(!r.m_at_least_m2);
        assert!(r.m2.unwrap() > 10);
        let big = m2(0.5, 1 << 20);
        assert_eq!(big.m2, Some(1936));
        assert!(big.m_at_least_m2);
        assert!(m2(1e-4, 10).m2.is_none());
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(constants_table(2, 0.1, None, 1.0, None).is_err());
        assert!(constants_table(3, 0.0, None, 1.0, None).is_err());
        assert!(constants_table(3, 0.1, Some(0.5), 1.0, None).is_err());
        assert!(constants_table(3, 0.1, None, 0.5, None).is_err());
    }
}
