//! Closed-form statistics of the α-BX-shadowed SNR.
//!
//! Every statistic is expressed through the normalized variable
//! u = (γ/γ̄)^{α/2} / C_α, which follows the gamma mixture described in
//! the private `mixture` module. The pdf, cdf, moments, amount of fading,
//! CQEI and outage bounds are closed forms; averages of arbitrary functions
//! (error rates, quadrature cross-checks) go through
//! [`Channel::expectation`].

mod ber;
mod envelope;
mod mixture;
mod params;

pub use ber::{q_function, qam16_gray_ber};
pub use envelope::BxShadowedEnvelope;
pub use params::{db_to_linear, linear_to_db, ChannelParams, EvalPolicy};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{QuadResult, QuadSettings};
use crate::specfun::{gauss_2f1, ln_gamma, SeriesPolicy};
use mixture::PowerMixture;

/// The normalization constant C_α that makes E[γ] = γ̄.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CAlpha {
    value: f64,
}

impl CAlpha {
    pub fn value(&self) -> f64 {
        self.value
    }
}

/// High-SNR bounds on the outage probability together with its exact value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutageBounds {
    pub lower: f64,
    /// May exceed 1 at low SNR.
    pub upper: f64,
    pub exact: f64,
}

/// ln ₂F₁(m_Y, -t; m_X; -m_X Ω_Y / (m_Y Ω_X)) = ln(Γ(m_X) E[U^t] / Γ(m_X + t)).
fn ln_moment_factor(p: &ChannelParams, t: f64, policy: &SeriesPolicy) -> Result<f64> {
    if p.omega_y == 0.0 {
        return Ok(0.0);
    }
    let f = gauss_2f1(p.m_y, -t, p.m_x, p.moment_argument(), policy)?;
    if !(f.value > 0.0) {
        return Err(Error::domain(
            "snr_moment",
            format!("moment factor evaluated to {} for t = {t}", f.value),
        ));
    }
    Ok(f.value.ln())
}

/// ln C_α = (α/2) [ln Γ(m_X) - ln Γ(m_X + 2/α) - ln ₂F₁(m_Y, -2/α; m_X; z)].
fn ln_c_alpha(p: &ChannelParams, lg_m: f64, lg_m1: f64, ln_f1: f64) -> f64 {
    0.5 * p.alpha * (lg_m - lg_m1 - ln_f1)
}

/// C_α for the given parameters.
pub fn c_alpha(p: &ChannelParams, policy: &SeriesPolicy) -> Result<CAlpha> {
    p.validate()?;
    let lg_m = ln_gamma(p.m_x)?;
    let lg_m1 = ln_gamma(p.m_x + 2.0 / p.alpha)?;
    let ln_f1 = ln_moment_factor(p, 2.0 / p.alpha, policy)?;
    Ok(CAlpha {
        value: ln_c_alpha(p, lg_m, lg_m1, ln_f1).exp(),
    })
}

/// A parameter point with every γ-independent quantity precomputed.
#[derive(Debug, Clone)]
pub struct Channel {
    params: ChannelParams,
    policy: EvalPolicy,
    mixture: PowerMixture,
    ln_c: f64,
    ln_gamma_bar: f64,
    lg_m: f64,
    /// ln Γ(m_X + 2/α)
    lg_m1: f64,
    /// ln ₂F₁ at t = 2/α
    ln_f1: f64,
}

impl Channel {
    pub fn new(params: ChannelParams, policy: EvalPolicy) -> Result<Self> {
        params.validate()?;
        policy.series.validate()?;
        let mixture = PowerMixture::new(
            params.m_x,
            params.m_y,
            params.diffuse_weight(),
            params.los_weight(),
            policy.series,
        )?;
        let lg_m = ln_gamma(params.m_x)?;
        let lg_m1 = ln_gamma(params.m_x + 2.0 / params.alpha)?;
        let ln_f1 = ln_moment_factor(&params, 2.0 / params.alpha, &policy.series)?;
        Ok(Channel {
            params,
            policy,
            mixture,
            ln_c: ln_c_alpha(&params, lg_m, lg_m1, ln_f1),
            ln_gamma_bar: params.gamma_bar.ln(),
            lg_m,
            lg_m1,
            ln_f1,
        })
    }

    /// Same parameters with the library's default tolerances.
    pub fn with_defaults(params: ChannelParams) -> Result<Self> {
        Self::new(params, EvalPolicy::default())
    }

    pub fn params(&self) -> &ChannelParams {
        &self.params
    }

    pub fn policy(&self) -> &EvalPolicy {
        &self.policy
    }

    pub fn c_alpha(&self) -> CAlpha {
        CAlpha {
            value: self.ln_c.exp(),
        }
    }

    /// ln u for u = (γ/γ̄)^{α/2} / C_α.
    pub fn ln_u(&self, gamma: f64) -> f64 {
        0.5 * self.params.alpha * (gamma.ln() - self.ln_gamma_bar) - self.ln_c
    }

    /// γ for a given u; inverse of [`Channel::ln_u`].
    pub fn gamma_from_u(&self, u: f64) -> f64 {
        (self.ln_gamma_bar + 2.0 / self.params.alpha * (self.ln_c + u.ln())).exp()
    }

    fn check_gamma(function: &'static str, gamma: f64) -> Result<()> {
        if gamma >= 0.0 {
            Ok(())
        } else {
            Err(Error::domain(function, format!("gamma = {gamma} must be nonnegative")))
        }
    }

    /// Probability density of the instantaneous SNR.
    ///
    /// At γ = 0 the limit is returned: 0 when α m_X / 2 > 1, a finite value
    /// when it equals 1, and +∞ below.
    pub fn pdf(&self, gamma: f64) -> Result<f64> {
        Self::check_gamma("snr_pdf", gamma)?;
        let alpha = self.params.alpha;
        if gamma == 0.0 {
            let e = 0.5 * alpha * self.params.m_x;
            return Ok(if e > 1.0 {
                0.0
            } else if e == 1.0 {
                // f_U(u) ~ A^{m_Y} u^{m_X-1}/Γ(m_X) and u^{m_X} = γ/(γ̄ C^{m_X})
                ((0.5 * alpha).ln() + self.mixture.ln_origin_coefficient()
                    - self.ln_gamma_bar
                    - self.params.m_x * self.ln_c)
                    .exp()
            } else {
                f64::INFINITY
            });
        }
        if gamma.is_infinite() {
            return Ok(0.0);
        }
        let ln_u = self.ln_u(gamma);
        let ln_f = self.mixture.ln_density(ln_u)? + (0.5 * alpha).ln() + ln_u - gamma.ln();
        Ok(ln_f.exp())
    }

    /// Distribution function of the instantaneous SNR.
    pub fn cdf(&self, gamma: f64) -> Result<f64> {
        Self::check_gamma("snr_cdf", gamma)?;
        if gamma == 0.0 {
            return Ok(0.0);
        }
        self.mixture.cdf(self.ln_u(gamma))
    }

    /// γ such that cdf(γ) = p, for p in (0, 1).
    pub fn quantile(&self, p: f64) -> Result<f64> {
        let ln_u = self.mixture.quantile_ln(p)?;
        Ok(self.gamma_from_u(ln_u.exp()))
    }

    /// Raw moment E[γ^k] for real k > 0.
    pub fn moment(&self, k: f64) -> Result<f64> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::domain("snr_moment", format!("order k = {k} must be positive")));
        }
        let p = &self.params;
        let t = 2.0 * k / p.alpha;
        let lg_mk = ln_gamma(p.m_x + t)?;
        let ln_fk = ln_moment_factor(p, t, &self.policy.series)?;
        // grouped so that k = 1 cancels exactly
        let ln = k * self.ln_gamma_bar
            + ((k * (self.lg_m - self.lg_m1) + (lg_mk - self.lg_m)) + (ln_fk - k * self.ln_f1));
        Ok(ln.exp())
    }

    /// Amount of fading Var[γ]/E[γ]²; equals 1 in the Rayleigh case.
    pub fn amount_of_fading(&self) -> Result<f64> {
        let p = &self.params;
        let t2 = 4.0 / p.alpha;
        let lg_m2 = ln_gamma(p.m_x + t2)?;
        let ln_f2 = ln_moment_factor(p, t2, &self.policy.series)?;
        let ln_ratio = (self.lg_m + lg_m2 - 2.0 * self.lg_m1) + (ln_f2 - 2.0 * self.ln_f1);
        Ok(ln_ratio.exp_m1())
    }

    /// Channel quality estimation index, AoF / γ̄.
    pub fn cqei(&self) -> Result<f64> {
        Ok(self.amount_of_fading()? / self.params.gamma_bar)
    }

    /// P(γ ≤ γ_th).
    pub fn outage_probability(&self, gamma_th: f64) -> Result<f64> {
        if !(gamma_th > 0.0) {
            return Err(Error::domain(
                "outage_probability",
                format!("gamma_th = {gamma_th} must be positive"),
            ));
        }
        let value = self.cdf(gamma_th)?;
        #[cfg(debug_assertions)]
        self.check_outage_direct(gamma_th, value);
        Ok(value)
    }

    /// Evaluates the outage probability as bound × e^{-u} × Φ₂ with the
    /// unscaled Φ₂ and asserts agreement with the distribution function.
    #[cfg(debug_assertions)]
    fn check_outage_direct(&self, gamma_th: f64, value: f64) {
        use crate::specfun::appell_phi2;
        let ln_u = self.ln_u(gamma_th);
        let u = ln_u.exp();
        let Ok(phi) = appell_phi2(
            1.0,
            self.params.m_y,
            self.params.m_x + 1.0,
            u,
            self.mixture.los * u,
            &self.policy.series,
        ) else {
            return;
        };
        let direct = self.mixture.upper_bound(ln_u) * (-u).exp() * phi.value;
        if direct.is_finite() && direct <= 1.0 {
            debug_assert!(
                (direct - value).abs() <= 1e-10,
                "outage forms disagree at gamma_th = {gamma_th}: {value} vs {direct}"
            );
        }
    }

    /// The high-SNR bounds of the outage probability and its exact value.
    pub fn outage_bounds(&self, gamma_th: f64) -> Result<OutageBounds> {
        let exact = self.outage_probability(gamma_th)?;
        let ln_u = self.ln_u(gamma_th);
        let upper = self.mixture.upper_bound(ln_u);
        let lower = upper * (-ln_u.exp()).exp();
        Ok(OutageBounds {
            lower,
            upper,
            exact,
        })
    }

    /// E[g(γ)] = ∫₀^∞ g(γ) pdf(γ) dγ.
    pub fn expectation<G>(&self, g: G, settings: &QuadSettings) -> Result<QuadResult>
    where
        G: FnMut(f64) -> Result<f64>,
    {
        self.integrate(g, 0.0, f64::INFINITY, settings)
    }

    /// ∫ g(γ) pdf(γ) dγ over [gamma_lo, gamma_hi]; gamma_hi may be infinite.
    ///
    /// The integral is carried out in u, where the density is free of the
    /// power-law singularity at the origin.
    pub fn integrate<G>(
        &self,
        mut g: G,
        gamma_lo: f64,
        gamma_hi: f64,
        settings: &QuadSettings,
    ) -> Result<QuadResult>
    where
        G: FnMut(f64) -> Result<f64>,
    {
        if !(gamma_lo >= 0.0 && gamma_hi >= gamma_lo) {
            return Err(Error::domain(
                "integrate",
                format!("invalid range [{gamma_lo}, {gamma_hi}]"),
            ));
        }
        let to_u = |gamma: f64| {
            if gamma == 0.0 {
                0.0
            } else if gamma.is_infinite() {
                f64::INFINITY
            } else {
                self.ln_u(gamma).exp()
            }
        };
        let (u_lo, u_hi) = (to_u(gamma_lo), to_u(gamma_hi));
        self.mixture.integrate(
            |u| g(if u == 0.0 { 0.0 } else { self.gamma_from_u(u) }),
            u_lo,
            u_hi,
            settings,
        )
    }

    /// Average of a conditional error rate over the SNR distribution.
    ///
    /// `conditional_ber` must map [0, ∞) into [0, 1]; the integral is taken to
    /// an absolute tolerance of 1e-9.
    pub fn average_error_rate(&self, conditional_ber: &dyn Fn(f64) -> f64) -> Result<f64> {
        let settings = QuadSettings {
            abs_tol: 1e-9,
            rel_tol: 1e-12,
            ..self.policy.quad
        };
        let r = self.expectation(
            |gamma| {
                let b = conditional_ber(gamma);
                if (0.0..=1.0).contains(&b) {
                    Ok(b)
                } else {
                    Err(Error::domain(
                        "average_error_rate",
                        format!("conditional error rate {b} at gamma = {gamma} is not a probability"),
                    ))
                }
            },
            &settings,
        )?;
        Ok(r.value.clamp(0.0, 1.0))
    }
}

/// (P_out, average error rate) pairs along a grid of mean SNRs.
pub fn quality_reliability_curve(
    params: &ChannelParams,
    gamma_th: f64,
    gamma_bar_grid: &[f64],
    conditional_ber: &dyn Fn(f64) -> f64,
    policy: &EvalPolicy,
) -> Result<Vec<(f64, f64)>> {
    if gamma_bar_grid.is_empty() {
        return Err(Error::invalid("gamma_bar_grid", "must not be empty"));
    }
    gamma_bar_grid
        .iter()
        .map(|&gb| {
            let ch = Channel::new(params.with_gamma_bar(gb)?, *policy)?;
            Ok((ch.outage_probability(gamma_th)?, ch.average_error_rate(conditional_ber)?))
        })
        .collect()
}
