//! C interface to the α-BX-shadowed channel statistics.
//!
//! A channel is created with [`bxs_channel_new`] and released with
//! [`bxs_channel_free`]. Every other call returns a [`BxsStatus`] and writes
//! its result through an out-pointer, which is left untouched on failure.
//! The text of the most recent failure on the calling thread is available
//! from [`bxs_last_error_message`]. Panics never cross the boundary; they
//! are reported as [`BxsStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use bxshadow::channel::qam16_gray_ber;
use bxshadow::mcsim::{sample_snr, SamplerConfig};
use bxshadow::{Channel, ChannelParams, EvalPolicy};

/// Result codes of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BxsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    Domain = 3,
    NoConvergence = 4,
    Quadrature = 5,
    OutOfRange = 6,
    InsufficientSamples = 7,
    Panic = 99,
}

/// Channel parameters in linear units.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BxsParams {
    pub m_x: f64,
    pub m_y: f64,
    pub omega_x: f64,
    pub omega_y: f64,
    pub alpha: f64,
    pub gamma_bar: f64,
}

/// Outage probability with its high-SNR bounds.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BxsOutageBounds {
    pub lower: f64,
    pub exact: f64,
    /// May exceed 1 at low SNR.
    pub upper: f64,
}

/// Opaque channel handle.
pub struct BxsChannel {
    inner: Channel,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

struct Failure {
    status: BxsStatus,
    message: String,
}

impl From<bxshadow::Error> for Failure {
    fn from(e: bxshadow::Error) -> Self {
        use bxshadow::Error as E;
        let status = match e {
            E::Domain { .. } => BxsStatus::Domain,
            E::NoConvergence { .. } => BxsStatus::NoConvergence,
            E::Quadrature { .. } => BxsStatus::Quadrature,
            E::InvalidParameter { .. } => BxsStatus::InvalidParameter,
            E::OutOfRange { .. } => BxsStatus::OutOfRange,
            E::InsufficientSamples { .. } => BxsStatus::InsufficientSamples,
        };
        Failure {
            status,
            message: e.to_string(),
        }
    }
}

fn null(what: &str) -> Failure {
    Failure {
        status: BxsStatus::NullPointer,
        message: format!("{what} is null"),
    }
}

/// Runs `body`, converting errors and panics into a status code.
fn guard<F>(body: F) -> BxsStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    let failure = match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => return BxsStatus::Ok,
        Ok(Err(f)) => f,
        Err(payload) => {
            let text = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".to_string());
            Failure {
                status: BxsStatus::Panic,
                message: format!("internal panic: {text}"),
            }
        }
    };
    LAST_ERROR.with(|e| *e.borrow_mut() = failure.message);
    failure.status
}

/// Shared body of the scalar queries.
fn query<F>(channel: *const BxsChannel, out: *mut f64, f: F) -> BxsStatus
where
    F: FnOnce(&Channel) -> bxshadow::Result<f64>,
{
    guard(|| {
        // SAFETY: non-null handles come from bxs_channel_new and are only
        // released by bxs_channel_free, per the documented contract.
        let ch = unsafe { channel.as_ref() }.ok_or_else(|| null("channel"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let v = f(&ch.inner)?;
        // SAFETY: `out` is non-null and points to writable storage per contract.
        unsafe { out.write(v) };
        Ok(())
    })
}

fn params_from(p: &BxsParams) -> bxshadow::Result<ChannelParams> {
    ChannelParams::new(p.m_x, p.m_y, p.omega_x, p.omega_y, p.alpha, p.gamma_bar)
}

/// Creates a channel with the library's default accuracy settings.
///
/// # Safety
/// `params` must point to a readable `BxsParams` and `out` to writable
/// storage for one pointer. The handle written to `out` must be released
/// with `bxs_channel_free`.
#[no_mangle]
pub unsafe extern "C" fn bxs_channel_new(params: *const BxsParams, out: *mut *mut BxsChannel) -> BxsStatus {
    guard(|| {
        let p = unsafe { params.as_ref() }.ok_or_else(|| null("params"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = Channel::new(params_from(p)?, EvalPolicy::default())?;
        let handle = Box::into_raw(Box::new(BxsChannel { inner }));
        unsafe { out.write(handle) };
        Ok(())
    })
}

/// Releases a channel; null is accepted and ignored.
///
/// # Safety
/// `channel` must be null or a handle from `bxs_channel_new` that has not
/// been freed yet.
#[no_mangle]
pub unsafe extern "C" fn bxs_channel_free(channel: *mut BxsChannel) {
    if !channel.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(unsafe { Box::from_raw(channel) })));
    }
}

/// The normalization constant C_α of the channel.
///
/// # Safety
/// `channel` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bxs_c_alpha(channel: *const BxsChannel, out: *mut f64) -> BxsStatus {
    query(channel, out, |c| Ok(c.c_alpha().value()))
}

/// Probability density of the SNR at `gamma`.
///
/// # Safety
/// `channel` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bxs_snr_pdf(channel: *const BxsChannel, gamma: f64, out: *mut f64) -> BxsStatus {
    query(channel, out, |c| c.pdf(gamma))
}

/// Distribution function of the SNR at `gamma`.
///
/// # Safety
/// `channel` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bxs_snr_cdf(channel: *const BxsChannel, gamma: f64, out: *mut f64) -> BxsStatus {
    query(channel, out, |c| c.cdf(gamma))
}

/// Raw moment E[γ^k], k > 0.
///
/// # Safety
/// `channel` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bxs_snr_moment(channel: *const BxsChannel, k: f64, out: *mut f64) -> BxsStatus {
    query(channel, out, |c| c.moment(k))
}

/// Amount of fading Var[γ]/E[γ]².
///
/// # Safety
/// `channel` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bxs_amount_of_fading(channel: *const BxsChannel, out: *mut f64) -> BxsStatus {
    query(channel, out, Channel::amount_of_fading)
}

/// Channel quality estimation index.
///
/// # Safety
/// `channel` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bxs_cqei(channel: *const BxsChannel, out: *mut f64) -> BxsStatus {
    query(channel, out, Channel::cqei)
}

/// P(γ ≤ gamma_th).
///
/// # Safety
/// `channel` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bxs_outage_probability(channel: *const BxsChannel, gamma_th: f64, out: *mut f64) -> BxsStatus {
    query(channel, out, |c| c.outage_probability(gamma_th))
}

/// Outage probability with its lower and upper bounds.
///
/// # Safety
/// `channel` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bxs_outage_bounds(
    channel: *const BxsChannel,
    gamma_th: f64,
    out: *mut BxsOutageBounds,
) -> BxsStatus {
    guard(|| {
        let ch = unsafe { channel.as_ref() }.ok_or_else(|| null("channel"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let b = ch.inner.outage_bounds(gamma_th)?;
        unsafe {
            out.write(BxsOutageBounds {
                lower: b.lower,
                exact: b.exact,
                upper: b.upper,
            })
        };
        Ok(())
    })
}

/// Average bit-error rate of Gray-coded QAM-16.
///
/// # Safety
/// `channel` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bxs_average_ber_qam16(channel: *const BxsChannel, out: *mut f64) -> BxsStatus {
    query(channel, out, |c| c.average_error_rate(&qam16_gray_ber))
}

/// Fills `buffer[0..n]` with SNR samples; identical arguments give
/// identical samples.
///
/// # Safety
/// `params` must be readable and `buffer` must hold `n` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn bxs_sample_snr(
    params: *const BxsParams,
    seed: u64,
    stream_id: u64,
    buffer: *mut f64,
    n: usize,
) -> BxsStatus {
    guard(|| {
        let p = unsafe { params.as_ref() }.ok_or_else(|| null("params"))?;
        if buffer.is_null() {
            return Err(null("buffer"));
        }
        let config = SamplerConfig::new(params_from(p)?, n, seed, stream_id)?;
        let batch = sample_snr(&config)?;
        // SAFETY: `buffer` holds n doubles per contract; the batch has n samples.
        let dst = unsafe { std::slice::from_raw_parts_mut(buffer, n) };
        dst.copy_from_slice(&batch.samples);
        Ok(())
    })
}

/// Copies the last failure message of this thread into `buffer` as a
/// NUL-terminated string, truncating to `len` bytes.
///
/// Returns the buffer size needed for the whole message including the NUL;
/// `buffer` may be null to query that size. An empty message means no
/// failure has been recorded.
///
/// # Safety
/// `buffer` must be null or hold `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn bxs_last_error_message(buffer: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buffer.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            // SAFETY: n + 1 <= len bytes are written into the caller's buffer.
            unsafe {
                std::ptr::copy_nonoverlapping(bytes.as_ptr(), buffer.cast::<u8>(), n);
                buffer.add(n).write(0);
            }
        }
        bytes.len() + 1
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bxs_version() -> *const c_char {
    const VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version contains a NUL byte"),
    };
    VERSION.as_ptr()
}
