use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::SnrSampleBatch;
use crate::channel::{Channel, ChannelParams, EvalPolicy};
use crate::error::{Error, Result};

/// Smallest batch accepted by the validation routines.
pub const MIN_SAMPLES: usize = 10_000;

/// Moment gaps are accepted within this many standard errors.
pub const MOMENT_BAND: f64 = 4.0;

/// Groups of the grouped jackknife used for the amount of fading.
const JACKKNIFE_GROUPS: usize = 100;

/// Node spacing of [`CdfTable`] in the log variable.
const TABLE_STEP: f64 = 0.002;

/// Goodness-of-fit summary of a batch against the closed forms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub n_samples: usize,
    pub significance: f64,
    pub ks_distance: f64,
    pub ks_threshold: f64,
    pub ks_pass: bool,
    /// Keys are the moment orders as written by `f64`'s `Display`.
    pub empirical_moments: BTreeMap<String, f64>,
    pub analytic_moments: BTreeMap<String, f64>,
    pub moment_stderr: BTreeMap<String, f64>,
    /// empirical - analytic
    pub moment_gaps: BTreeMap<String, f64>,
    pub moment_band: f64,
    pub moments_pass: bool,
    pub aof_empirical: f64,
    pub aof_analytic: f64,
    pub aof_stderr: f64,
    pub pass: bool,
}

/// Asymptotic two-sided KS critical value √(-ln(sig/2)/2) / √n.
pub fn ks_critical_value(significance: f64, n: usize) -> f64 {
    (-0.5 * (0.5 * significance).ln()).sqrt() / (n as f64).sqrt()
}

/// sup |F_n - F| for ascending `sorted` samples.
pub fn ks_statistic<F>(sorted: &[f64], mut cdf: F) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x)?;
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    Ok(d)
}

/// Piecewise cubic Hermite table of a distribution function on a uniform
/// grid in a transformed variable x, with F and dF/dx taken at the nodes.
#[derive(Debug, Clone)]
pub struct CdfTable {
    x0: f64,
    step: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl CdfTable {
    pub fn build<F, D>(cdf: F, slope: D, x_lo: f64, x_hi: f64, step: f64) -> Result<Self>
    where
        F: Fn(f64) -> Result<f64> + Sync,
        D: Fn(f64) -> Result<f64> + Sync,
    {
        if !(x_hi >= x_lo && step > 0.0 && x_lo.is_finite() && x_hi.is_finite()) {
            return Err(Error::domain("CdfTable", format!("invalid range [{x_lo}, {x_hi}]")));
        }
        let nodes = ((x_hi - x_lo) / step).ceil() as usize + 2;
        let pairs: Result<Vec<(f64, f64)>> = (0..nodes)
            .into_par_iter()
            .map(|i| {
                let x = x_lo + i as f64 * step;
                Ok((cdf(x)?, slope(x)?))
            })
            .collect();
        let (values, slopes) = pairs?.into_iter().unzip();
        Ok(CdfTable {
            x0: x_lo,
            step,
            values,
            slopes,
        })
    }

    /// Interpolated F(x), or `None` outside the tabulated range.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let t = (x - self.x0) / self.step;
        if !(t >= 0.0) {
            return None;
        }
        let i = t.floor() as usize;
        if i + 1 >= self.values.len() {
            return None;
        }
        let s = t - i as f64;
        let (f0, f1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.slopes[i] * self.step, self.slopes[i + 1] * self.step);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        Some(h00 * f0 + h10 * d0 + h01 * f1 + h11 * d1)
    }
}

/// Tabulates the SNR distribution function in x = ln γ over [γ_lo, γ_hi].
pub(crate) fn snr_cdf_table(channel: &Channel, gamma_lo: f64, gamma_hi: f64) -> Result<CdfTable> {
    CdfTable::build(
        |x| channel.cdf(x.exp()),
        |x| {
            let g = x.exp();
            Ok(g * channel.pdf(g)?)
        },
        gamma_lo.ln(),
        gamma_hi.ln(),
        TABLE_STEP,
    )
}

/// Compares a batch with the closed forms of its own parameters.
pub fn validate_against_closed_form(
    batch: &SnrSampleBatch,
    orders: &[f64],
    significance: f64,
) -> Result<FitReport> {
    validate_against(batch, &batch.config.params, orders, significance)
}

/// Compares a batch with the closed forms of `target`, which may differ from
/// the parameters the batch was drawn with.
pub fn validate_against(
    batch: &SnrSampleBatch,
    target: &ChannelParams,
    orders: &[f64],
    significance: f64,
) -> Result<FitReport> {
    let n = batch.samples.len();
    if n < MIN_SAMPLES {
        return Err(Error::InsufficientSamples {
            required: MIN_SAMPLES,
            got: n,
        });
    }
    if !(significance > 0.0 && significance < 1.0) {
        return Err(Error::invalid("significance", format!("{significance} must lie in (0, 1)")));
    }
    if let Some(k) = orders.iter().find(|k| !(**k > 0.0 && k.is_finite())) {
        return Err(Error::invalid("orders", format!("moment order {k} must be positive")));
    }
    let channel = Channel::new(*target, EvalPolicy::default())?;

    let mut sorted = batch.samples.clone();
    sorted.par_sort_unstable_by(f64::total_cmp);
    let table = snr_cdf_table(&channel, sorted[0], sorted[n - 1])?;
    let ks_distance = ks_statistic(&sorted, |g| match table.eval(g.ln()) {
        Some(v) => Ok(v),
        None => channel.cdf(g),
    })?;
    let ks_threshold = ks_critical_value(significance, n);
    let ks_pass = ks_distance <= ks_threshold;

    let mut empirical_moments = BTreeMap::new();
    let mut analytic_moments = BTreeMap::new();
    let mut moment_stderr = BTreeMap::new();
    let mut moment_gaps = BTreeMap::new();
    let mut moments_pass = true;
    for &k in orders {
        let (mean, se) = mean_and_stderr(batch.samples.iter().map(|g| g.powf(k)), n);
        let analytic = channel.moment(k)?;
        let gap = mean - analytic;
        moments_pass &= gap.abs() <= MOMENT_BAND * se;
        let key = format!("{k}");
        empirical_moments.insert(key.clone(), mean);
        analytic_moments.insert(key.clone(), analytic);
        moment_stderr.insert(key.clone(), se);
        moment_gaps.insert(key, gap);
    }

    let (aof_empirical, aof_stderr) = aof_jackknife(&batch.samples);
    let aof_analytic = channel.amount_of_fading()?;

    Ok(FitReport {
        n_samples: n,
        significance,
        ks_distance,
        ks_threshold,
        ks_pass,
        empirical_moments,
        analytic_moments,
        moment_stderr,
        moment_gaps,
        moment_band: MOMENT_BAND,
        moments_pass,
        aof_empirical,
        aof_analytic,
        aof_stderr,
        pass: ks_pass && moments_pass,
    })
}

/// Sample mean and its standard error s/√n; for a mean, the delete-one
/// jackknife standard error coincides with this value.
fn mean_and_stderr(values: impl Iterator<Item = f64> + Clone, n: usize) -> (f64, f64) {
    let nf = n as f64;
    let mean = values.clone().sum::<f64>() / nf;
    let ss: f64 = values.map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (nf - 1.0) / nf).sqrt())
}

/// Sample variance over squared mean.
fn aof_from_sums(n: f64, s1: f64, s2: f64) -> f64 {
    let mean = s1 / n;
    let var = (s2 - s1 * mean) / (n - 1.0);
    var / (mean * mean)
}

/// Amount of fading of the samples with a grouped-jackknife standard error.
pub(crate) fn aof_jackknife(samples: &[f64]) -> (f64, f64) {
    let n = samples.len();
    let groups = JACKKNIFE_GROUPS.min(n);
    let mut sums = vec![(0.0f64, 0.0f64, 0usize); groups];
    for (i, &g) in samples.iter().enumerate() {
        let slot = &mut sums[i * groups / n];
        slot.0 += g;
        slot.1 += g * g;
        slot.2 += 1;
    }
    let s1: f64 = sums.iter().map(|s| s.0).sum();
    let s2: f64 = sums.iter().map(|s| s.1).sum();
    let full = aof_from_sums(n as f64, s1, s2);
    let leave_out: Vec<f64> = sums
        .iter()
        .map(|&(a, b, c)| aof_from_sums((n - c) as f64, s1 - a, s2 - b))
        .collect();
    let g = groups as f64;
    let mean = leave_out.iter().sum::<f64>() / g;
    let var = leave_out.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() * (g - 1.0) / g;
    (full, var.sqrt())
}
