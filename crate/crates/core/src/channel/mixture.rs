//! The normalized power variable U shared by the envelope and SNR laws.
//!
//! With A = m_Y Ω_X / (m_Y Ω_X + m_X Ω_Y), U = m_X R²/Ω_X is a gamma variate
//! of shape m_X + J and unit scale, where J is negative binomial with
//! parameters (m_Y, A). Its density and distribution function are
//!
//! f_U(u) = A^{m_Y} u^{m_X-1} e^{-u} ₁F₁(m_Y; m_X; (1-A)u) / Γ(m_X),
//! F_U(u) = A^{m_Y} u^{m_X} e^{-u} Φ₂(1, m_Y; m_X+1; u, (1-A)u) / Γ(m_X+1).

use crate::error::{Error, Result};
use crate::quad::{try_integrate, QuadResult, QuadSettings};
use crate::specfun::{exp_scaled_phi2, gamma_p, kummer_1f1_scaled, ln_gamma, SeriesPolicy};

/// Largest number of doubling panels used for a half-infinite integral.
const MAX_PANELS: usize = 900;

#[derive(Debug, Clone, Copy)]
pub(crate) struct PowerMixture {
    pub m_x: f64,
    pub m_y: f64,
    /// A
    pub diffuse: f64,
    /// 1 - A
    pub los: f64,
    /// m_Y ln A
    ln_norm: f64,
    lg_mx: f64,
    lg_mx1: f64,
    pub policy: SeriesPolicy,
}

impl PowerMixture {
    pub fn new(
        m_x: f64,
        m_y: f64,
        diffuse: f64,
        los: f64,
        policy: SeriesPolicy,
    ) -> Result<Self> {
        policy.validate()?;
        Ok(PowerMixture {
            m_x,
            m_y,
            diffuse,
            los,
            ln_norm: m_y * diffuse.ln(),
            lg_mx: ln_gamma(m_x)?,
            lg_mx1: ln_gamma(m_x + 1.0)?,
            policy,
        })
    }

    pub fn has_los(&self) -> bool {
        self.los > 0.0
    }

    /// E[U] = m_X + m_Y (1-A)/A.
    pub fn mean(&self) -> f64 {
        self.m_x + self.m_y * self.los / self.diffuse
    }

    /// e^{-(1-A)u} ₁F₁(m_Y; m_X; (1-A)u).
    fn scaled_kummer(&self, u: f64) -> Result<f64> {
        if !self.has_los() || u == 0.0 {
            return Ok(1.0);
        }
        Ok(kummer_1f1_scaled(self.m_y, self.m_x, self.los * u, &self.policy)?.value)
    }

    /// ln f_U(u) given ln u.
    pub fn ln_density(&self, ln_u: f64) -> Result<f64> {
        let u = ln_u.exp();
        if u.is_infinite() {
            return Ok(f64::NEG_INFINITY);
        }
        let k = self.scaled_kummer(u)?;
        Ok(self.ln_norm - self.lg_mx + (self.m_x - 1.0) * ln_u - self.diffuse * u + k.ln())
    }

    /// f_U(u) du/dw for w = u^{m_X}; bounded on [0, 1].
    fn w_density(&self, u: f64) -> Result<f64> {
        let k = self.scaled_kummer(u)?;
        Ok((self.ln_norm - self.lg_mx1 - self.diffuse * u).exp() * k)
    }

    /// ln(A^{m_Y}/Γ(m_X)), the coefficient of u^{m_X-1} in f_U near 0.
    pub fn ln_origin_coefficient(&self) -> f64 {
        self.ln_norm - self.lg_mx
    }

    /// A^{m_Y} u^{m_X} / Γ(m_X+1), the high-SNR asymptote of F_U.
    pub fn upper_bound(&self, ln_u: f64) -> f64 {
        (self.ln_norm - self.lg_mx1 + self.m_x * ln_u).exp()
    }

    /// F_U(u) given ln u; values above 1 are accepted only within the
    /// evaluation tolerance.
    pub fn cdf(&self, ln_u: f64) -> Result<f64> {
        if ln_u == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        let u = ln_u.exp();
        if u.is_infinite() {
            return Ok(1.0);
        }
        let (value, err) = if self.has_los() {
            let s = exp_scaled_phi2(1.0, self.m_y, self.m_x + 1.0, u, self.los * u, &self.policy)?;
            let ln_front = self.ln_norm - self.lg_mx1 + self.m_x * ln_u;
            let err = if s.est_error > 0.0 {
                (ln_front + s.est_error.ln()).exp()
            } else {
                0.0
            };
            ((ln_front + s.value.ln()).exp(), err)
        } else {
            (gamma_p(self.m_x, u)?, 0.0)
        };
        if value.is_nan() {
            return Err(Error::domain("snr_cdf", format!("evaluation produced NaN at u = {u}")));
        }
        if value > 1.0 {
            let tol = self.policy.abs_tol.max(self.policy.rel_tol) + err + 8.0 * f64::EPSILON;
            if value - 1.0 <= tol {
                return Ok(1.0);
            }
            return Err(Error::OutOfRange {
                quantity: "snr_cdf",
                value,
            });
        }
        Ok(value)
    }

    /// u beyond which P(U > u) ≤ eps, from the Chernoff bound at s = A/2.
    pub fn tail_point(&self, eps: f64) -> f64 {
        let a = self.diffuse;
        2.0 / a * (-eps.ln() - self.m_x * (-0.5 * a).ln_1p() + self.m_y * (2.0 - a).ln())
    }

    /// Newton-safeguarded inversion of F_U in ln u.
    pub fn quantile_ln(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain("quantile", format!("p = {p} must lie in (0, 1)")));
        }
        let mut lo = self.mean().ln();
        let mut hi = lo;
        let mut f_lo = self.cdf(lo)? - p;
        let mut steps = 0;
        while f_lo > 0.0 {
            hi = lo;
            lo -= 2.0;
            f_lo = self.cdf(lo)? - p;
            steps += 1;
            if steps > 400 {
                return Err(Error::domain("quantile", "lower bracket not found"));
            }
        }
        let mut f_hi = self.cdf(hi)? - p;
        while f_hi < 0.0 {
            lo = hi;
            hi += 2.0;
            f_hi = self.cdf(hi)? - p;
            steps += 1;
            if steps > 400 {
                return Err(Error::domain("quantile", "upper bracket not found"));
            }
        }
        if f_hi == 0.0 {
            return Ok(hi);
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..200 {
            let f = self.cdf(x)? - p;
            if f == 0.0 {
                return Ok(x);
            }
            if f < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            // dF/d(ln u) = u f_U(u)
            let slope = (self.ln_density(x)? + x).exp();
            let newton = x - f / slope;
            let next = if slope > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) || hi - lo <= 4.0 * f64::EPSILON * x.abs().max(1.0) {
                return Ok(next);
            }
            x = next;
        }
        Ok(x)
    }

    /// ∫ g(u) f_U(u) du over [u_lo, u_hi], with u_hi possibly infinite.
    ///
    /// [0, 1] is integrated in w = u^{m_X}, which removes the u^{m_X-1}
    /// singularity; beyond 1 the range is split into doubling panels, and a
    /// half-infinite range is closed once the panels lie past the Chernoff
    /// tail point and contribute below the tolerance.
    pub fn integrate<G>(&self, mut g: G, u_lo: f64, u_hi: f64, settings: &QuadSettings) -> Result<QuadResult>
    where
        G: FnMut(f64) -> Result<f64>,
    {
        if !(u_lo >= 0.0) || !(u_hi >= u_lo) {
            return Err(Error::domain("integrate", format!("invalid range [{u_lo}, {u_hi}]")));
        }
        let panel_settings = QuadSettings {
            abs_tol: settings.abs_tol / 4.0,
            ..*settings
        };
        let mut total = QuadResult {
            value: 0.0,
            abs_err: 0.0,
            intervals: 0,
            evaluations: 0,
        };
        if u_lo < 1.0 {
            let top = u_hi.min(1.0);
            let inv_m = 1.0 / self.m_x;
            let r = try_integrate(
                |w| {
                    let u = w.powf(inv_m);
                    Ok(g(u)? * self.w_density(u)?)
                },
                u_lo.powf(self.m_x),
                top.powf(self.m_x),
                &panel_settings,
            )?;
            accumulate(&mut total, r);
        }
        let mut a = u_lo.max(1.0);
        if a >= u_hi {
            return Ok(total);
        }
        let tail = self.tail_point(1e-16);
        for _ in 0..MAX_PANELS {
            let b = (2.0 * a).min(u_hi);
            let r = try_integrate(
                |u| {
                    let d = self.ln_density(u.ln())?.exp();
                    if d == 0.0 {
                        return Ok(0.0);
                    }
                    Ok(g(u)? * d)
                },
                a,
                b,
                &panel_settings,
            )?;
            let contribution = r.value.abs();
            accumulate(&mut total, r);
            if b >= u_hi {
                return Ok(total);
            }
            let negligible = settings.abs_tol.max(settings.rel_tol * total.value.abs()) * 1e-3;
            if u_hi.is_infinite() && a >= tail && contribution <= negligible {
                return Ok(total);
            }
            a = b;
        }
        Err(Error::Quadrature {
            estimate: total.value,
            abs_err: f64::INFINITY,
        })
    }
}

fn accumulate(total: &mut QuadResult, r: QuadResult) {
    total.value += r.value;
    total.abs_err += r.abs_err;
    total.intervals += r.intervals;
    total.evaluations += r.evaluations;
}
