use std::ffi::CStr;
use std::ptr;

use bxshadow::{Channel, ChannelParams};
use bxshadow_ffi::*;

fn params() -> BxsParams {
    BxsParams {
        m_x: 1.5,
        m_y: 2.5,
        omega_x: 10f64.powf(0.5),
        omega_y: 10f64.powf(-0.5),
        alpha: 3.0,
        gamma_bar: 10.0,
    }
}

fn reference() -> Channel {
    let p = params();
    Channel::with_defaults(ChannelParams::new(p.m_x, p.m_y, p.omega_x, p.omega_y, p.alpha, p.gamma_bar).unwrap())
        .unwrap()
}

fn new_channel(p: &BxsParams) -> *mut BxsChannel {
    let mut ch = ptr::null_mut();
    assert_eq!(unsafe { bxs_channel_new(p, &mut ch) }, BxsStatus::Ok);
    assert!(!ch.is_null());
    ch
}

fn last_error() -> String {
    let needed = unsafe { bxs_last_error_message(ptr::null_mut(), 0) };
    let mut buf = vec![0 as std::ffi::c_char; needed];
    unsafe { bxs_last_error_message(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap().to_owned()
}

#[test]
fn scalar_queries_match_the_rust_api() {
    let ch = new_channel(&params());
    let r = reference();
    let mut v = f64::NAN;
    unsafe {
        assert_eq!(bxs_c_alpha(ch, &mut v), BxsStatus::Ok);
        assert_eq!(v, r.c_alpha().value());
        assert_eq!(bxs_snr_pdf(ch, 5.0, &mut v), BxsStatus::Ok);
        assert_eq!(v, r.pdf(5.0).unwrap());
        assert_eq!(bxs_snr_cdf(ch, 5.0, &mut v), BxsStatus::Ok);
        assert_eq!(v, r.cdf(5.0).unwrap());
        assert_eq!(bxs_snr_moment(ch, 1.0, &mut v), BxsStatus::Ok);
        assert!((v - 10.0).abs() < 1e-12);
        assert_eq!(bxs_amount_of_fading(ch, &mut v), BxsStatus::Ok);
        assert_eq!(v, r.amount_of_fading().unwrap());
        assert_eq!(bxs_cqei(ch, &mut v), BxsStatus::Ok);
        assert_eq!(v, r.cqei().unwrap());
        assert_eq!(bxs_outage_probability(ch, 2.0, &mut v), BxsStatus::Ok);
        assert_eq!(v, r.outage_probability(2.0).unwrap());
        assert_eq!(bxs_average_ber_qam16(ch, &mut v), BxsStatus::Ok);
        assert!(v > 0.0 && v < 0.5);
        let mut b = BxsOutageBounds {
            lower: 0.0,
            exact: 0.0,
            upper: 0.0,
        };
        assert_eq!(bxs_outage_bounds(ch, 0.5, &mut b), BxsStatus::Ok);
        assert!(b.lower <= b.exact && b.exact <= b.upper);
        bxs_channel_free(ch);
    }
}

#[test]
fn failures_report_status_and_message() {
    let mut bad = params();
    bad.m_x = -1.0;
    let mut ch = ptr::null_mut();
    assert_eq!(unsafe { bxs_channel_new(&bad, &mut ch) }, BxsStatus::InvalidParameter);
    assert!(ch.is_null());
    assert!(last_error().contains("m_x"), "{}", last_error());

    let ch = new_channel(&params());
    let mut v = 7.0;
    unsafe {
        assert_eq!(bxs_snr_pdf(ch, -1.0, &mut v), BxsStatus::Domain);
        assert_eq!(v, 7.0, "out must be untouched on failure");
        assert_eq!(bxs_snr_moment(ch, 1.0, ptr::null_mut()), BxsStatus::NullPointer);
        assert_eq!(bxs_cqei(ptr::null(), &mut v), BxsStatus::NullPointer);
        assert!(last_error().contains("channel"));
        bxs_channel_free(ch);
        bxs_channel_free(ptr::null_mut());
    }
}

#[test]
fn truncated_error_message_is_terminated() {
    let mut bad = params();
    bad.alpha = 0.0;
    let mut ch = ptr::null_mut();
    unsafe { bxs_channel_new(&bad, &mut ch) };
    let mut buf = [1 as std::ffi::c_char; 6];
    let needed = unsafe { bxs_last_error_message(buf.as_mut_ptr(), buf.len()) };
    assert!(needed > buf.len());
    assert_eq!(buf[5], 0);
    assert_eq!(unsafe { CStr::from_ptr(buf.as_ptr()) }.to_bytes().len(), 5);
}

#[test]
fn sampling_is_reproducible() {
    let p = params();
    let mut a = vec![0.0; 5000];
    let mut b = vec![0.0; 5000];
    unsafe {
        assert_eq!(bxs_sample_snr(&p, 9, 1, a.as_mut_ptr(), a.len()), BxsStatus::Ok);
        assert_eq!(bxs_sample_snr(&p, 9, 1, b.as_mut_ptr(), b.len()), BxsStatus::Ok);
    }
    assert_eq!(a, b);
    assert!(a.iter().all(|&g| g > 0.0));
    unsafe {
        assert_eq!(bxs_sample_snr(&p, 9, 2, b.as_mut_ptr(), b.len()), BxsStatus::Ok);
        assert_ne!(a, b);
        assert_eq!(bxs_sample_snr(&p, 9, 1, ptr::null_mut(), 10), BxsStatus::NullPointer);
        assert_eq!(bxs_sample_snr(&p, 9, 1, a.as_mut_ptr(), 0), BxsStatus::InvalidParameter);
    }
}

#[test]
fn version_matches_the_crate() {
    let v = unsafe { CStr::from_ptr(bxs_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
