//! Special functions used by the channel closed forms.
//!
//! Every series evaluation runs under a [`SeriesPolicy`] and returns a
//! [`SpecialValue`] carrying an estimate of the truncation remainder. A series
//! that cannot meet either tolerance within `max_terms` is reported as
//! [`Error::NoConvergence`](crate::Error::NoConvergence) instead of returning
//! a silently truncated value.

mod appell;
mod gamma;
mod gauss;
mod kummer;
mod series;

pub use appell::{appell_phi2, exp_scaled_phi2};
pub use gamma::{gamma_p, gamma_q, ln_gamma, ln_pochhammer};
pub use gauss::gauss_2f1;
pub use kummer::{kummer_1f1, kummer_1f1_scaled};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncation rules shared by every series in this module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesPolicy {
    /// Upper bound on the number of terms per series index.
    pub max_terms: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl SeriesPolicy {
    pub fn new(max_terms: usize, abs_tol: f64, rel_tol: f64) -> Result<Self> {
        let policy = SeriesPolicy {
            max_terms,
            abs_tol,
            rel_tol,
        };
        policy.validate()?;
        Ok(policy)
    }

    /// Looser settings used as the command-line defaults.
    pub fn cli_default() -> Self {
        SeriesPolicy {
            max_terms: 100_000,
            abs_tol: 1e-12,
            rel_tol: 1e-10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_terms < 1 {
            return Err(Error::invalid("max_terms", "must be at least 1"));
        }
        if !(self.abs_tol > 0.0) {
            return Err(Error::invalid("abs_tol", "must be positive"));
        }
        if !(self.rel_tol > 0.0) {
            return Err(Error::invalid("rel_tol", "must be positive"));
        }
        Ok(())
    }
}

impl Default for SeriesPolicy {
    fn default() -> Self {
        SeriesPolicy {
            max_terms: 100_000,
            abs_tol: 1e-300,
            rel_tol: 1e-14,
        }
    }
}

/// Result of a series evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecialValue {
    pub value: f64,
    /// Upper estimate of the truncation remainder (plus accumulated rounding).
    pub est_error: f64,
    pub terms_used: usize,
}

impl SpecialValue {
    pub(crate) fn exact(value: f64) -> Self {
        SpecialValue {
            value,
            est_error: 0.0,
            terms_used: 1,
        }
    }

    pub(crate) fn scaled(self, factor: f64) -> Self {
        SpecialValue {
            value: self.value * factor,
            est_error: self.est_error * factor.abs(),
            terms_used: self.terms_used,
        }
    }
}

/// True when `x` is 0, -1, -2, ...
#[inline]
pub(crate) fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}
