use super::{SeriesPolicy, SpecialValue};
use crate::error::{Error, Result};

const RESCALE_AT: f64 = 1e250;
const LN_RESCALE: f64 = 575.646_273_248_511_4; // ln(1e250)

/// Sums a hypergeometric-type series `exp(ln_prefactor) * Σ t_n` with `t_0 = 1`
/// and `t_{n+1} = t_n * ratio(n)`.
///
/// `limit_ratio` is |lim ratio(n)|; the remainder after term n is estimated as
/// `|t_{n+1}| / (1 - ρ)` with `ρ = max(|ratio(n+1)|, limit_ratio)`, which
/// requires the ratios to approach their limit monotonically from the
/// current value. Terms are kept in a rescaled linear representation so
/// intermediate magnitudes far outside the f64 range are tolerated.
pub(crate) fn hyper_series(
    function: &'static str,
    ln_prefactor: f64,
    ratio: impl Fn(usize) -> f64,
    limit_ratio: f64,
    policy: &SeriesPolicy,
) -> Result<SpecialValue> {
    let mut ln_scale = ln_prefactor;
    let mut term = 1.0_f64;
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    let mut abs_sum = 0.0_f64;
    let ln_abs_tol = policy.abs_tol.ln();
    let mut tail = f64::INFINITY;

    for n in 0..policy.max_terms {
        // Neumaier summation
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
        abs_sum += term.abs();

        let next = term * ratio(n);
        if next == 0.0 {
            return Ok(finish(sum + comp, 0.0, abs_sum, ln_scale, n + 1));
        }
        let rho = ratio(n + 1).abs().max(limit_ratio);
        if rho < 1.0 {
            tail = next.abs() / (1.0 - rho);
            let total = (sum + comp).abs();
            let rel_ok = tail <= policy.rel_tol * total;
            let abs_ok = tail.ln() + ln_scale <= ln_abs_tol;
            if rel_ok || abs_ok {
                return Ok(finish(sum + comp, tail, abs_sum, ln_scale, n + 1));
            }
        }
        term = next;
        if !term.is_finite() {
            break;
        }
        if term.abs() > RESCALE_AT {
            term /= RESCALE_AT;
            sum /= RESCALE_AT;
            comp /= RESCALE_AT;
            abs_sum /= RESCALE_AT;
            ln_scale += LN_RESCALE;
        }
    }
    let scale = ln_scale.exp();
    Err(Error::NoConvergence {
        function,
        terms_used: policy.max_terms,
        estimate: (sum + comp) * scale,
        est_error: tail * scale,
    })
}

fn finish(sum: f64, tail: f64, abs_sum: f64, ln_scale: f64, terms: usize) -> SpecialValue {
    let scale = ln_scale.exp();
    let rounding = 4.0 * f64::EPSILON * abs_sum;
    SpecialValue {
        value: sum * scale,
        est_error: (tail + rounding) * scale,
        terms_used: terms,
    }
}

/// Compensated accumulator for sums whose terms are produced out of order.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct NeumaierSum {
    sum: f64,
    comp: f64,
    abs: f64,
}

impl NeumaierSum {
    #[inline]
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
        self.abs += x.abs();
    }

    #[inline]
    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }

    #[inline]
    pub(crate) fn abs_total(&self) -> f64 {
        self.abs
    }
}
