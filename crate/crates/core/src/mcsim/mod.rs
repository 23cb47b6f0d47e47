//! Monte-Carlo generation of α-BX-shadowed SNR samples and their validation
//! against the closed forms.
//!
//! The chain follows the physical construction:
//!
//! 1. the LoS power s is drawn from a gamma law of shape m_Y and mean Ω_Y;
//! 2. given s, the BX power R² is a gamma variate of shape m_X + J and scale
//!    Ω_X/m_X with J ~ Poisson(m_X s / Ω_X), the real-shape generalization of
//!    the noncentral chi-square with 2m_X degrees of freedom;
//! 3. the α-transform maps R² to γ = γ̄ (C_α m_X R² / Ω_X)^{2/α}.
//!
//! Sampling is split into fixed chunks of 2¹⁶ draws. Chunk c uses a ChaCha12
//! generator seeded from the user seed, on stream `stream_id`, positioned at
//! word c·2⁴⁰, so the output does not depend on the number of worker threads.

mod export;
mod fit;

pub use export::{read_batch_binary, read_batch_csv, sidecar_path, write_batch, write_batch_with_meta, BatchFormat, BatchSidecar};
pub use fit::{
    ks_critical_value, ks_statistic, validate_against, validate_against_closed_form, CdfTable,
    FitReport, MIN_SAMPLES, MOMENT_BAND,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Gamma, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{c_alpha, ChannelParams};
use crate::error::{Error, Result};
use crate::specfun::SeriesPolicy;

/// Samples per independently positioned generator chunk.
pub const CHUNK_SIZE: usize = 1 << 16;

/// Redraws allowed for a single sample before giving up.
const MAX_REDRAWS_PER_SAMPLE: u32 = 1000;

/// Parameters, sample count and random-stream coordinates of a batch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub params: ChannelParams,
    pub n_samples: usize,
    pub seed: u64,
    pub stream_id: u64,
}

impl SamplerConfig {
    pub fn new(params: ChannelParams, n_samples: usize, seed: u64, stream_id: u64) -> Result<Self> {
        params.validate()?;
        if n_samples == 0 {
            return Err(Error::invalid("n_samples", "must be positive"));
        }
        Ok(SamplerConfig {
            params,
            n_samples,
            seed,
            stream_id,
        })
    }
}

/// Pipeline stages a batch has passed through.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    BxEnvelope,
    LosShadowing,
    AlphaTransform,
}

/// Envelope draws R of the BX-shadowed law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeBatch {
    pub samples: Vec<f64>,
    pub config: SamplerConfig,
    /// Zero-valued draws that were rejected and redrawn.
    pub redraws: u64,
}

/// Instantaneous SNR draws with their provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnrSampleBatch {
    pub samples: Vec<f64>,
    pub config: SamplerConfig,
    /// Zero-valued draws that were rejected and redrawn.
    pub redraws: u64,
    pub stages: Vec<Stage>,
}

/// Fraction of samples at or below a threshold with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutageEstimate {
    pub estimate: f64,
    pub stderr: f64,
}

/// Draws R² given the shape parameters.
struct PowerSampler {
    shadow: Option<Gamma<f64>>,
    /// m_X / Ω_X, the Poisson rate per unit LoS power
    rate: f64,
    m_x: f64,
    scale: f64,
    base: Gamma<f64>,
}

impl PowerSampler {
    fn new(p: &ChannelParams) -> Result<Self> {
        let dist = |shape: f64, scale: f64| {
            Gamma::new(shape, scale)
                .map_err(|e| Error::invalid("params", format!("gamma law ({shape}, {scale}): {e}")))
        };
        let shadow = if p.omega_y > 0.0 {
            Some(dist(p.m_y, p.omega_y / p.m_y)?)
        } else {
            None
        };
        Ok(PowerSampler {
            shadow,
            rate: p.m_x / p.omega_x,
            m_x: p.m_x,
            scale: p.omega_x / p.m_x,
            base: dist(p.m_x, p.omega_x / p.m_x)?,
        })
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let j = match &self.shadow {
            Some(g) => {
                let lambda = self.rate * g.sample(rng);
                if lambda > 0.0 && lambda < Poisson::<f64>::MAX_LAMBDA {
                    Poisson::new(lambda).map(|d| d.sample(rng)).unwrap_or(0.0)
                } else {
                    0.0
                }
            }
            None => 0.0,
        };
        if j == 0.0 {
            self.base.sample(rng)
        } else {
            Gamma::new(self.m_x + j, self.scale)
                .map(|d| d.sample(rng))
                .unwrap_or(f64::NAN)
        }
    }
}

fn chunk_rng(seed: u64, stream_id: u64, chunk: usize) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng.set_word_pos((chunk as u128) << 40);
    rng
}

/// Runs `draw` over all chunks in parallel and concatenates in chunk order.
///
/// `draw` returns `None` for a rejected value, which is redrawn and counted.
fn generate<F>(config: &SamplerConfig, draw: F) -> Result<(Vec<f64>, u64)>
where
    F: Fn(&mut ChaCha12Rng) -> Option<f64> + Sync,
{
    let n = config.n_samples;
    let chunks = n.div_ceil(CHUNK_SIZE);
    let parts: Vec<Result<(Vec<f64>, u64)>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(config.seed, config.stream_id, c);
            let len = CHUNK_SIZE.min(n - c * CHUNK_SIZE);
            let mut out = Vec::with_capacity(len);
            let mut redraws = 0u64;
            for _ in 0..len {
                let mut attempts = 0;
                loop {
                    match draw(&mut rng) {
                        Some(v) => {
                            out.push(v);
                            break;
                        }
                        None => {
                            redraws += 1;
                            attempts += 1;
                            if attempts >= MAX_REDRAWS_PER_SAMPLE {
                                return Err(Error::domain(
                                    "sampler",
                                    "draws keep underflowing to zero for these parameters",
                                ));
                            }
                        }
                    }
                }
            }
            Ok((out, redraws))
        })
        .collect();
    let mut samples = Vec::with_capacity(n);
    let mut redraws = 0;
    for part in parts {
        let (s, r) = part?;
        samples.extend_from_slice(&s);
        redraws += r;
    }
    Ok((samples, redraws))
}

fn positive_finite(v: f64) -> Option<f64> {
    (v > 0.0 && v.is_finite()).then_some(v)
}

/// Envelope draws R whose density is the classical BX-shadowed law.
pub fn sample_bx_shadowed_envelope(config: &SamplerConfig) -> Result<EnvelopeBatch> {
    let sampler = PowerSampler::new(&config.params)?;
    let (samples, redraws) = generate(config, |rng| positive_finite(sampler.draw(rng).sqrt()))?;
    Ok(EnvelopeBatch {
        samples,
        config: *config,
        redraws,
    })
}

/// Log-domain constants of the map R → γ.
struct AlphaMap {
    ln_gamma_bar: f64,
    /// ln(C_α m_X / Ω_X)
    ln_shift: f64,
    exponent: f64,
}

impl AlphaMap {
    fn new(p: &ChannelParams) -> Result<Self> {
        let c = c_alpha(p, &SeriesPolicy::default())?.value();
        Ok(AlphaMap {
            ln_gamma_bar: p.gamma_bar.ln(),
            ln_shift: (c * p.m_x / p.omega_x).ln(),
            exponent: 2.0 / p.alpha,
        })
    }

    /// γ for a squared envelope R².
    #[inline]
    fn apply_power(&self, r2: f64) -> f64 {
        (self.ln_gamma_bar + self.exponent * (self.ln_shift + r2.ln())).exp()
    }
}

/// Maps envelope samples to instantaneous SNR samples,
/// γ = γ̄ (C_α m_X R² / Ω_X)^{2/α}.
///
/// The map is strictly increasing in R. `params` must share the shape
/// parameters the envelope was drawn with; α and γ̄ may differ.
pub fn alpha_transform(envelope: &EnvelopeBatch, params: &ChannelParams) -> Result<SnrSampleBatch> {
    params.validate()?;
    let e = &envelope.config.params;
    if (e.m_x, e.m_y, e.omega_x, e.omega_y) != (params.m_x, params.m_y, params.omega_x, params.omega_y) {
        return Err(Error::invalid(
            "params",
            "shape parameters differ from those the envelope was drawn with",
        ));
    }
    let map = AlphaMap::new(params)?;
    let samples: Vec<f64> = envelope.samples.par_iter().map(|&r| map.apply_power(r * r)).collect();
    if let Some(bad) = samples.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::domain(
            "alpha_transform",
            format!("an SNR sample left the positive finite range ({bad})"),
        ));
    }
    let mut config = envelope.config;
    config.params = *params;
    Ok(SnrSampleBatch {
        samples,
        config,
        redraws: envelope.redraws,
        stages: vec![Stage::BxEnvelope, Stage::LosShadowing, Stage::AlphaTransform],
    })
}

/// The full chain in one pass; a draw whose SNR is not positive and finite
/// is redrawn and counted.
pub fn sample_snr(config: &SamplerConfig) -> Result<SnrSampleBatch> {
    let sampler = PowerSampler::new(&config.params)?;
    let map = AlphaMap::new(&config.params)?;
    let (samples, redraws) = generate(config, |rng| {
        positive_finite(sampler.draw(rng)).and_then(|r2| positive_finite(map.apply_power(r2)))
    })?;
    Ok(SnrSampleBatch {
        samples,
        config: *config,
        redraws,
        stages: vec![Stage::BxEnvelope, Stage::LosShadowing, Stage::AlphaTransform],
    })
}

/// Fraction of samples at or below `gamma_th` and its binomial standard error.
pub fn estimate_outage(batch: &SnrSampleBatch, gamma_th: f64) -> Result<OutageEstimate> {
    if !(gamma_th > 0.0) {
        return Err(Error::domain(
            "estimate_outage",
            format!("gamma_th = {gamma_th} must be positive"),
        ));
    }
    let n = batch.samples.len();
    if n == 0 {
        return Err(Error::InsufficientSamples { required: 1, got: 0 });
    }
    let hits = batch.samples.iter().filter(|&&g| g <= gamma_th).count();
    let p = hits as f64 / n as f64;
    Ok(OutageEstimate {
        estimate: p,
        stderr: (p * (1.0 - p) / n as f64).sqrt(),
    })
}
