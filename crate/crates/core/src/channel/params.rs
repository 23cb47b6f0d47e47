use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::QuadSettings;
use crate::specfun::SeriesPolicy;

/// Converts a decibel value to linear scale, 10^(dB/10).
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power ratio to decibels.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// The five shape parameters of the α-BX-shadowed model and the mean SNR.
///
/// All powers are stored in linear units; use [`ChannelParams::from_db`] when
/// the inputs are given in dB.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Overall fading severity m_X.
    pub m_x: f64,
    /// LoS shadowing severity m_Y.
    pub m_y: f64,
    /// NLoS (diffuse) power Ω_X.
    pub omega_x: f64,
    /// LoS power Ω_Y; zero removes the dominant component.
    pub omega_y: f64,
    /// Nonlinearity exponent α; α = 2 is the linear baseline.
    pub alpha: f64,
    /// Mean SNR γ̄.
    pub gamma_bar: f64,
}

impl ChannelParams {
    pub fn new(
        m_x: f64,
        m_y: f64,
        omega_x: f64,
        omega_y: f64,
        alpha: f64,
        gamma_bar: f64,
    ) -> Result<Self> {
        let p = ChannelParams {
            m_x,
            m_y,
            omega_x,
            omega_y,
            alpha,
            gamma_bar,
        };
        p.validate()?;
        Ok(p)
    }

    /// Builds parameters from Ω_X, Ω_Y and γ̄ given in dB.
    ///
    /// `omega_y_db = -inf` is accepted and maps to Ω_Y = 0.
    pub fn from_db(
        m_x: f64,
        m_y: f64,
        omega_x_db: f64,
        omega_y_db: f64,
        alpha: f64,
        gamma_bar_db: f64,
    ) -> Result<Self> {
        Self::new(
            m_x,
            m_y,
            db_to_linear(omega_x_db),
            db_to_linear(omega_y_db),
            alpha,
            db_to_linear(gamma_bar_db),
        )
    }

    pub fn validate(&self) -> Result<()> {
        positive("m_x", self.m_x)?;
        positive("m_y", self.m_y)?;
        positive("omega_x", self.omega_x)?;
        positive("alpha", self.alpha)?;
        positive("gamma_bar", self.gamma_bar)?;
        if !(self.omega_y >= 0.0) || !self.omega_y.is_finite() {
            return Err(Error::invalid(
                "omega_y",
                format!("{} must be finite and nonnegative", self.omega_y),
            ));
        }
        Ok(())
    }

    pub fn with_gamma_bar(&self, gamma_bar: f64) -> Result<Self> {
        let mut p = *self;
        p.gamma_bar = gamma_bar;
        p.validate()?;
        Ok(p)
    }

    /// A = m_Y Ω_X / (m_Y Ω_X + m_X Ω_Y), the weight of the diffuse part.
    pub fn diffuse_weight(&self) -> f64 {
        let d = self.m_y * self.omega_x;
        d / (d + self.m_x * self.omega_y)
    }

    /// 1 - A = m_X Ω_Y / (m_Y Ω_X + m_X Ω_Y), computed without cancellation.
    pub fn los_weight(&self) -> f64 {
        let l = self.m_x * self.omega_y;
        l / (self.m_y * self.omega_x + l)
    }

    /// The ₂F₁ argument -m_X Ω_Y / (m_Y Ω_X) of the moment formulas.
    pub fn moment_argument(&self) -> f64 {
        -self.m_x * self.omega_y / (self.m_y * self.omega_x)
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("{v} must be finite and strictly positive")))
    }
}

/// Truncation and quadrature settings used by every channel statistic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct EvalPolicy {
    pub series: SeriesPolicy,
    pub quad: QuadSettings,
}

impl EvalPolicy {
    /// Defaults of the command-line tool: abs_tol = 1e-12, rel_tol = 1e-10,
    /// 10⁵ terms per series index.
    pub fn cli_default() -> Self {
        EvalPolicy {
            series: SeriesPolicy::cli_default(),
            quad: QuadSettings::default(),
        }
    }
}
