//! Bivariate confluent hypergeometric (Humbert) function
//!
//! Φ₂(b₁, b₂; c; x, y) = Σ_m Σ_n (b₁)_m (b₂)_n / (c)_{m+n} · x^m yⁿ / (m! n!).
//!
//! Two routes are provided:
//!
//! * a direct double series, with every term computed from log-magnitudes and
//!   the summation rectangle grown until the trailing row and column are
//!   negligible;
//! * for b₁ = 1, c > 1, 0 ≤ y < x and large x, the incomplete-gamma
//!   expansion
//!   e^{-x} Φ₂(1, b₂; c; x, y) = Γ(c) x^{1-c} Σ_n (b₂)_n (y/x)ⁿ / n! · P(c-1+n, x),
//!   which keeps the cost linear in the number of rows and never forms e^x.

use super::gamma::{gamma_p, ln_gamma_unchecked, ln_pochhammer};
use super::series::NeumaierSum;
use super::{is_nonpositive_integer, SeriesPolicy, SpecialValue};
use crate::error::{Error, Result};

/// Above this x the incomplete-gamma route replaces the double series.
const LARGE_X: f64 = 30.0;

/// The incomplete-gamma recursion is restarted from a direct evaluation
/// this often, which bounds the drift of the repeated subtractions.
const RESYNC: usize = 256;

/// Φ₂(b₁, b₂; c; x, y) for x, y ≥ 0.
pub fn appell_phi2(
    b1: f64,
    b2: f64,
    c: f64,
    x: f64,
    y: f64,
    policy: &SeriesPolicy,
) -> Result<SpecialValue> {
    check(b1, b2, c, x, y)?;
    if x == 0.0 && y == 0.0 {
        return Ok(SpecialValue::exact(1.0));
    }
    if large_x_route(b1, c, x, y) {
        let scaled = incomplete_gamma_route(b2, c, x, y, policy)?;
        let v = scaled.scaled(x.exp());
        if !v.value.is_finite() {
            return Err(Error::domain(
                "appell_phi2",
                "result overflows f64; use exp_scaled_phi2",
            ));
        }
        return Ok(v);
    }
    double_series(b1, b2, c, x, y, 0.0, policy)
}

/// e^{-x} Φ₂(b₁, b₂; c; x, y).
///
/// This is the combination that appears in the SNR distribution function;
/// the product stays representable when the factors separately do not.
pub fn exp_scaled_phi2(
    b1: f64,
    b2: f64,
    c: f64,
    x: f64,
    y: f64,
    policy: &SeriesPolicy,
) -> Result<SpecialValue> {
    check(b1, b2, c, x, y)?;
    if x == 0.0 && y == 0.0 {
        return Ok(SpecialValue::exact(1.0));
    }
    if large_x_route(b1, c, x, y) {
        return incomplete_gamma_route(b2, c, x, y, policy);
    }
    double_series(b1, b2, c, x, y, -x, policy)
}

fn check(b1: f64, b2: f64, c: f64, x: f64, y: f64) -> Result<()> {
    if ![b1, b2, c, x, y].iter().all(|v| v.is_finite()) {
        return Err(Error::domain("appell_phi2", "arguments must be finite"));
    }
    if !(c > 0.0) {
        return Err(Error::domain("appell_phi2", format!("c = {c} must be positive")));
    }
    if x < 0.0 || y < 0.0 {
        return Err(Error::domain(
            "appell_phi2",
            format!("x = {x}, y = {y}: negative arguments are not supported"),
        ));
    }
    Ok(())
}

fn large_x_route(b1: f64, c: f64, x: f64, y: f64) -> bool {
    b1 == 1.0 && c > 1.0 && y < x && x > LARGE_X
}

/// ln |(b)_k v^k / k!| and sign for k = 0..len.
struct Axis {
    b: f64,
    ln_v: f64,
    zero_arg: bool,
    ln: Vec<f64>,
    sign: Vec<f64>,
}

impl Axis {
    fn new(b: f64, v: f64) -> Self {
        Axis {
            b,
            ln_v: if v > 0.0 { v.ln() } else { f64::NEG_INFINITY },
            zero_arg: v == 0.0,
            ln: Vec::new(),
            sign: Vec::new(),
        }
    }

    fn extend_to(&mut self, len: usize) -> Result<()> {
        for k in self.ln.len()..len {
            if k > 0 && self.zero_arg {
                self.ln.push(f64::NEG_INFINITY);
                self.sign.push(0.0);
                continue;
            }
            let (lp, s) = ln_pochhammer(self.b, k)?;
            let kf = k as f64;
            let ln_pow = if k == 0 { 0.0 } else { kf * self.ln_v };
            self.ln.push(lp + ln_pow - ln_gamma_unchecked(kf + 1.0));
            self.sign.push(s);
        }
        Ok(())
    }
}

fn initial_extent(v: f64) -> usize {
    if v == 0.0 {
        1
    } else {
        (v + 8.0 * v.sqrt() + 10.0).ceil() as usize
    }
}

/// Largest ratio |t(k+1)/t(k)| across the boundary at index `k = len - 1`.
fn boundary_ratio(b: f64, c: f64, v: f64, len: usize) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    let k = (len - 1) as f64;
    (b + k).abs() * v / ((c + k) * (k + 1.0))
}

fn double_series(
    b1: f64,
    b2: f64,
    c: f64,
    x: f64,
    y: f64,
    ln_shift: f64,
    policy: &SeriesPolicy,
) -> Result<SpecialValue> {
    if is_nonpositive_integer(c) {
        return Err(Error::domain("appell_phi2", format!("c = {c} is a nonpositive integer")));
    }
    let ln_gamma_c = ln_gamma_unchecked(c);
    let mut ax = Axis::new(b1, x);
    let mut ay = Axis::new(b2, y);
    let mut ln_c: Vec<f64> = Vec::new();
    let mut m_len = initial_extent(x);
    let mut n_len = initial_extent(y);

    loop {
        if m_len > policy.max_terms || n_len > policy.max_terms {
            return Err(Error::NoConvergence {
                function: "appell_phi2",
                terms_used: m_len.max(n_len).min(policy.max_terms),
                estimate: f64::NAN,
                est_error: f64::INFINITY,
            });
        }
        ax.extend_to(m_len)?;
        ay.extend_to(n_len)?;
        for k in ln_c.len()..(m_len + n_len) {
            ln_c.push(ln_gamma_unchecked(c + k as f64) - ln_gamma_c);
        }

        let mut total = NeumaierSum::default();
        let mut last_col = 0.0;
        let mut last_row = 0.0;
        for n in 0..n_len {
            if ay.sign[n] == 0.0 {
                continue;
            }
            let row_ln = ay.ln[n] + ln_shift;
            for m in 0..m_len {
                if ax.sign[m] == 0.0 {
                    continue;
                }
                let t = ax.sign[m] * ay.sign[n] * (ax.ln[m] + row_ln - ln_c[m + n]).exp();
                total.add(t);
                if m == m_len - 1 {
                    last_col += t.abs();
                }
                if n == n_len - 1 {
                    last_row += t.abs();
                }
            }
        }

        let value = total.value();
        let tol = policy.abs_tol.max(policy.rel_tol * value.abs());
        let rho_m = boundary_ratio(b1, c, x, m_len);
        let rho_n = boundary_ratio(b2, c, y, n_len);
        let tail_m = if rho_m < 1.0 { last_col * rho_m / (1.0 - rho_m) } else { f64::INFINITY };
        let tail_n = if rho_n < 1.0 { last_row * rho_n / (1.0 - rho_n) } else { f64::INFINITY };
        let grow_m = !(tail_m <= 0.5 * tol);
        let grow_n = !(tail_n <= 0.5 * tol);
        if !grow_m && !grow_n {
            let corner = if rho_m > 0.0 && rho_n > 0.0 {
                tail_m * rho_n / (1.0 - rho_n)
            } else {
                0.0
            };
            let est = tail_m + tail_n + corner + 4.0 * f64::EPSILON * total.abs_total();
            return Ok(SpecialValue {
                value,
                est_error: est,
                terms_used: m_len * n_len,
            });
        }
        if grow_m {
            m_len += (m_len / 2).max(8);
        }
        if grow_n {
            n_len += (n_len / 2).max(8);
        }
    }
}

fn incomplete_gamma_route(
    b2: f64,
    c: f64,
    x: f64,
    y: f64,
    policy: &SeriesPolicy,
) -> Result<SpecialValue> {
    let rho = y / x;
    let s0 = c - 1.0;
    let ln_scale = ln_gamma_unchecked(c) + (1.0 - c) * x.ln();
    let scale = ln_scale.exp();
    let abs_tol_unscaled = policy.abs_tol / scale;

    let ln_x = x.ln();
    let mut p = gamma_p(s0, x)?;
    // ln d_s with d_s = e^{-x} x^s / Γ(s+1), so that P(s+1, x) = P(s, x) - d_s;
    // kept in logs because d_s underflows long before it matters when x is large
    let mut ln_d = -x + s0 * ln_x - ln_gamma_unchecked(s0 + 1.0);
    let mut w = 1.0_f64;
    let mut sum = NeumaierSum::default();
    let mut tail = f64::INFINITY;

    for n in 0..policy.max_terms {
        let nf = n as f64;
        sum.add(w * p);
        let p_next = if (n + 1) % RESYNC == 0 {
            gamma_p(s0 + nf + 1.0, x)?
        } else {
            (p - ln_d.exp()).max(0.0)
        };
        let ln_d_next = ln_d + ln_x - (s0 + nf + 1.0).ln();
        let w_next = w * (b2 + nf) * rho / (nf + 1.0);
        if w_next == 0.0 || p_next == 0.0 {
            tail = 0.0;
            return Ok(finish_route(sum, tail, n + 1, scale));
        }
        let rho_next = ((b2 + nf + 1.0) * rho / (nf + 2.0)).abs().max(rho);
        if rho_next < 1.0 {
            tail = w_next.abs() * p_next / (1.0 - rho_next);
            let value = sum.value();
            if tail <= abs_tol_unscaled.max(policy.rel_tol * value.abs()) {
                return Ok(finish_route(sum, tail, n + 1, scale));
            }
        }
        p = p_next;
        ln_d = ln_d_next;
        w = w_next;
    }
    Err(Error::NoConvergence {
        function: "exp_scaled_phi2",
        terms_used: policy.max_terms,
        estimate: sum.value() * scale,
        est_error: tail * scale,
    })
}

fn finish_route(sum: NeumaierSum, tail: f64, terms: usize, scale: f64) -> SpecialValue {
    let rounding = (terms as f64 + 4.0) * f64::EPSILON * sum.abs_total();
    SpecialValue {
        value: sum.value() * scale,
        est_error: (tail + rounding) * scale,
        terms_used: terms,
    }
}
