use libm::erfc;

/// Gaussian tail probability Q(x) = P(N(0,1) > x).
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Exact bit-error probability of Gray-coded square QAM-16 on an AWGN
/// channel at symbol SNR `gamma` (linear).
///
/// P_b = [3Q(x) + 2Q(3x) - Q(5x)] / 4 with x = √(γ/5).
pub fn qam16_gray_ber(gamma: f64) -> f64 {
    let x = (gamma.max(0.0) / 5.0).sqrt();
    (0.25 * (3.0 * q_function(x) + 2.0 * q_function(3.0 * x) - q_function(5.0 * x))).clamp(0.0, 1.0)
}
