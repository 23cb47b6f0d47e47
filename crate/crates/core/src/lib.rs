//! Closed-form SNR statistics, outage analysis and Monte-Carlo validation for
//! the α-Beaulieu-Xie shadowed fading channel.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: log-gamma, Kummer ₁F₁, Gauss ₂F₁ and the confluent Appell
//!   function Φ₂ with explicit truncation control;
//! * [`quad`]: adaptive Gauss-Kronrod quadrature used for averaging and for
//!   cross-checking the closed forms;
//! * [`channel`]: pdf, cdf, moments, amount of fading, CQEI, outage
//!   probability and its high-SNR bounds, average error rate;
//! * [`mcsim`]: seeded SNR sampling and goodness-of-fit validation;
//! * [`cli`]: parameter sweeps, figure data and the command-line front end.

pub mod channel;
pub mod cli;
pub mod error;
pub mod mcsim;
pub mod quad;
pub mod specfun;

pub use channel::{Channel, ChannelParams, EvalPolicy};
pub use error::{Error, Result};
