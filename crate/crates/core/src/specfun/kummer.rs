//! Kummer's confluent hypergeometric function ₁F₁(a; b; z).

use super::gamma::ln_gamma_signed;
use super::series::hyper_series;
use super::{is_nonpositive_integer, SeriesPolicy, SpecialValue};
use crate::error::{Error, Result};

const ASYMPTOTIC_MIN_Z: f64 = 30.0;
const ASYMPTOTIC_MAX_TERMS: usize = 200;

/// ₁F₁(a; b; z) = Σ (a)_n / (b)_n zⁿ / n!.
///
/// Negative arguments are mapped through the Kummer transformation
/// ₁F₁(a; b; z) = e^z ₁F₁(b-a; b; -z) unless the series terminates.
pub fn kummer_1f1(a: f64, b: f64, z: f64, policy: &SeriesPolicy) -> Result<SpecialValue> {
    check_args(a, b, z)?;
    if z == 0.0 || a == 0.0 {
        return Ok(SpecialValue::exact(1.0));
    }
    if a == b {
        return finite("kummer_1f1", SpecialValue::exact(z.exp()));
    }
    if z < 0.0 && !is_nonpositive_integer(a) {
        return core(b - a, b, -z, z, policy);
    }
    if z < 0.0 {
        return hyper_series("kummer_1f1", 0.0, |n| ratio(a, b, z, n), 0.0, policy);
    }
    finite("kummer_1f1", core(a, b, z, 0.0, policy)?)
}

/// e^{-z} ₁F₁(a; b; z), bounded for large positive z where ₁F₁ itself overflows.
pub fn kummer_1f1_scaled(a: f64, b: f64, z: f64, policy: &SeriesPolicy) -> Result<SpecialValue> {
    check_args(a, b, z)?;
    if z == 0.0 {
        return Ok(SpecialValue::exact(1.0));
    }
    if a == b {
        return Ok(SpecialValue::exact(1.0));
    }
    if z > 0.0 {
        if is_nonpositive_integer(a) {
            return hyper_series("kummer_1f1_scaled", -z, |n| ratio(a, b, z, n), 0.0, policy);
        }
        return core(a, b, z, -z, policy);
    }
    // e^{-z} ₁F₁(a;b;z) = ₁F₁(b-a; b; -z)
    if is_nonpositive_integer(a) {
        return hyper_series("kummer_1f1_scaled", -z, |n| ratio(a, b, z, n), 0.0, policy);
    }
    finite("kummer_1f1_scaled", core(b - a, b, -z, 0.0, policy)?)
}

fn check_args(a: f64, b: f64, z: f64) -> Result<()> {
    if !a.is_finite() || !b.is_finite() || !z.is_finite() {
        return Err(Error::domain("kummer_1f1", "arguments must be finite"));
    }
    if is_nonpositive_integer(b) {
        return Err(Error::domain("kummer_1f1", format!("b = {b} is a nonpositive integer")));
    }
    Ok(())
}

fn finite(function: &'static str, v: SpecialValue) -> Result<SpecialValue> {
    if v.value.is_finite() {
        Ok(v)
    } else {
        Err(Error::domain(function, "result overflows f64; use the scaled form"))
    }
}

#[inline]
fn ratio(a: f64, b: f64, z: f64, n: usize) -> f64 {
    let n = n as f64;
    (a + n) * z / ((b + n) * (n + 1.0))
}

/// exp(ln_prefactor) ₁F₁(a; b; z) for z > 0.
fn core(a: f64, b: f64, z: f64, ln_prefactor: f64, policy: &SeriesPolicy) -> Result<SpecialValue> {
    if a == 0.0 {
        return Ok(SpecialValue::exact(ln_prefactor.exp()));
    }
    if z >= ASYMPTOTIC_MIN_Z && !is_nonpositive_integer(a) {
        if let Some(v) = asymptotic(a, b, z, ln_prefactor, policy) {
            return Ok(v);
        }
    }
    hyper_series("kummer_1f1", ln_prefactor, |n| ratio(a, b, z, n), 0.0, policy)
}

/// Large-z expansion
/// ₁F₁(a;b;z) ≈ Γ(b)/Γ(a) e^z z^{a-b} Σ_k (b-a)_k (1-a)_k / (k! z^k).
///
/// Returns `None` when the divergent tail or the neglected recessive
/// contribution is too large for the policy.
fn asymptotic(
    a: f64,
    b: f64,
    z: f64,
    ln_prefactor: f64,
    policy: &SeriesPolicy,
) -> Option<SpecialValue> {
    let (lg_b, sg_b) = ln_gamma_signed(b).ok()?;
    let (lg_a, sg_a) = ln_gamma_signed(a).ok()?;
    let ln_lead = lg_b - lg_a + z + (a - b) * z.ln() + ln_prefactor;
    let sign = sg_b * sg_a;

    // Recessive part Γ(b)/Γ(b-a) z^{-a}, relative to the leading part.
    let recessive_rel = if is_nonpositive_integer(b - a) {
        0.0
    } else {
        let (lg_ba, _) = ln_gamma_signed(b - a).ok()?;
        (lg_a - lg_ba - z + (b - 2.0 * a) * z.ln()).exp()
    };
    let tol = policy.rel_tol;
    if recessive_rel > 0.1 * tol {
        return None;
    }

    let mut sum = 1.0;
    let mut term = 1.0_f64;
    let mut abs_sum = 1.0;
    let mut prev_abs = f64::INFINITY;
    for k in 0..ASYMPTOTIC_MAX_TERMS {
        let kf = k as f64;
        let next = term * (b - a + kf) * (1.0 - a + kf) / ((kf + 1.0) * z);
        if next == 0.0 {
            return Some(assemble(sign * sum, 0.0, abs_sum, recessive_rel, ln_lead, k + 1));
        }
        if next.abs() >= prev_abs.min(term.abs()) {
            // divergence sets in before the tolerance was met
            return None;
        }
        if next.abs() <= tol * sum.abs() {
            return Some(assemble(sign * sum, next.abs(), abs_sum, recessive_rel, ln_lead, k + 1));
        }
        prev_abs = term.abs();
        term = next;
        sum += term;
        abs_sum += term.abs();
    }
    None
}

fn assemble(
    sum: f64,
    tail: f64,
    abs_sum: f64,
    recessive_rel: f64,
    ln_lead: f64,
    terms: usize,
) -> SpecialValue {
    let scale = ln_lead.exp();
    let err = tail + 4.0 * f64::EPSILON * abs_sum + recessive_rel * sum.abs();
    SpecialValue {
        value: sum * scale,
        est_error: err * scale,
        terms_used: terms,
    }
}
