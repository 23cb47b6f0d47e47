use super::mixture::PowerMixture;
use crate::error::{Error, Result};
use crate::specfun::SeriesPolicy;

/// The classical BX-shadowed envelope law (no α-transformation).
///
/// R has density
/// f_R(r) = 2 m_X r / Ω_X · f_U(m_X r² / Ω_X), where U is the gamma mixture
/// shared with the SNR model. It serves as the reference density for the
/// Monte-Carlo envelope sampler.
#[derive(Debug, Clone)]
pub struct BxShadowedEnvelope {
    omega_x: f64,
    mixture: PowerMixture,
}

impl BxShadowedEnvelope {
    pub fn new(m_x: f64, m_y: f64, omega_x: f64, omega_y: f64, policy: SeriesPolicy) -> Result<Self> {
        let p = super::ChannelParams::new(m_x, m_y, omega_x, omega_y, 2.0, 1.0)?;
        Ok(BxShadowedEnvelope {
            omega_x,
            mixture: PowerMixture::new(m_x, m_y, p.diffuse_weight(), p.los_weight(), policy)?,
        })
    }

    fn ln_u(&self, r: f64) -> f64 {
        self.mixture.m_x.ln() + 2.0 * r.ln() - self.omega_x.ln()
    }

    pub fn pdf(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::domain("envelope_pdf", format!("r = {r} must be nonnegative")));
        }
        if r == 0.0 {
            let m = self.mixture.m_x;
            return Ok(if m > 0.5 {
                0.0
            } else if m == 0.5 {
                // 2 u f_U(u) / r with u^{1/2} = r (m_X/Ω_X)^{1/2}
                2.0 * self.mixture.ln_origin_coefficient().exp() * (m / self.omega_x).sqrt()
            } else {
                f64::INFINITY
            });
        }
        let ln_u = self.ln_u(r);
        // f_R = f_U(u) du/dr with du/dr = 2u/r
        Ok((self.mixture.ln_density(ln_u)? + 2f64.ln() + ln_u - r.ln()).exp())
    }

    pub fn cdf(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0) {
            return Err(Error::domain("envelope_cdf", format!("r = {r} must be nonnegative")));
        }
        if r == 0.0 {
            return Ok(0.0);
        }
        self.mixture.cdf(self.ln_u(r))
    }

    /// E[R²] = Ω_X + Ω_Y.
    pub fn mean_power(&self) -> f64 {
        self.omega_x * self.mixture.mean() / self.mixture.m_x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rayleigh_envelope() {
        // m_X = 1, Ω_Y = 0: f_R(r) = 2r/Ω e^{-r²/Ω}
        let e = BxShadowedEnvelope::new(1.0, 2.0, 2.0, 0.0, SeriesPolicy::default()).unwrap();
        for r in [0.1_f64, 1.0, 2.5] {
            let expected: f64 = r * (-r * r / 2.0_f64).exp();
            assert!((e.pdf(r).unwrap() - expected).abs() < 1e-14);
            assert!((e.cdf(r).unwrap() - (1.0 - (-r * r / 2.0).exp())).abs() < 1e-14);
        }
    }

    #[test]
    fn mean_power_adds_components() {
        let e = BxShadowedEnvelope::new(1.3, 0.4, 2.0, 0.7, SeriesPolicy::default()).unwrap();
        assert!((e.mean_power() - 2.7).abs() < 1e-14);
    }
}
