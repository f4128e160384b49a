//! Kaiser-window FIR design and zero-phase FIR application.

use super::reflect_odd;
use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Largest tap count any design is allowed to request.
pub const MAX_TAPS: usize = 8191;

/// Zeroth-order modified Bessel function of the first kind (power series).
fn bessel_i0(x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..64 {
        term *= (half / k as f64) * (half / k as f64);
        sum += term;
        if term < sum * 1e-18 {
            break;
        }
    }
    sum
}

/// Kaiser window of `n` taps with shape parameter `beta`.
pub fn kaiser_window(n: usize, beta: f64) -> Vec<f64> {
    let denom = bessel_i0(beta);
    let alpha = (n - 1) as f64 / 2.0;
    (0..n)
        .map(|i| {
            let r = (i as f64 - alpha) / alpha;
            bessel_i0(beta * (1.0 - r * r).max(0.0).sqrt()) / denom
        })
        .collect()
}

/// Kaiser beta for the requested stopband attenuation in dB.
fn kaiser_beta(atten_db: f64) -> f64 {
    if atten_db > 50.0 {
        0.1102 * (atten_db - 8.7)
    } else if atten_db >= 21.0 {
        0.5842 * (atten_db - 21.0).powf(0.4) + 0.07886 * (atten_db - 21.0)
    } else {
        0.0
    }
}

/// Tap count and beta for a Kaiser design with normalized transition width
/// `delta_f` (cycles/sample) and `atten_db` of stopband attenuation. The
/// returned count is always odd.
fn kaiser_order(delta_f: f64, atten_db: f64) -> Result<(usize, f64)> {
    let beta = kaiser_beta(atten_db);
    let n = ((atten_db - 7.95) / (14.36 * delta_f)).ceil() as usize + 1;
    let n = n + (n + 1) % 2;
    if n > MAX_TAPS {
        return Err(Error::DesignInfeasible(format!(
            "{n} taps needed for transition {delta_f:.2e} cycles/sample at {atten_db} dB \
             (cap {MAX_TAPS})"
        )));
    }
    Ok((n, beta))
}

/// Kaiser-windowed sinc low-pass. `cutoff` is the half-amplitude frequency
/// in cycles/sample; the DC gain is normalized to exactly 1.
pub fn kaiser_lowpass(cutoff: f64, delta_f: f64, atten_db: f64) -> Result<Vec<f64>> {
    if !(cutoff > 0.0 && cutoff < 0.5) {
        return Err(Error::DesignInfeasible(format!(
            "low-pass cutoff {cutoff} cycles/sample outside (0, 0.5)"
        )));
    }
    let (n, beta) = kaiser_order(delta_f, atten_db)?;
    let win = kaiser_window(n, beta);
    let alpha = (n - 1) as f64 / 2.0;
    let omega = 2.0 * PI * cutoff;
    let mut taps: Vec<f64> = win
        .iter()
        .enumerate()
        .map(|(i, w)| {
            let x = i as f64 - alpha;
            let sinc = if x == 0.0 {
                omega / PI
            } else {
                (omega * x).sin() / (PI * x)
            };
            w * sinc
        })
        .collect();
    let sum: f64 = taps.iter().sum();
    for t in &mut taps {
        *t /= sum;
    }
    Ok(taps)
}

/// Linear-phase high-pass by spectral inversion of a Kaiser low-pass.
///
/// `cutoff_hz` is the half-amplitude point; the transition band is centered
/// on it. The unit-DC low-pass normalization makes the coefficient sum (and
/// therefore the high-pass DC gain) exactly zero.
pub fn design_fir_highpass(
    cutoff_hz: f64,
    fs: f64,
    transition_hz: f64,
    stopband_db: f64,
) -> Result<Vec<f64>> {
    if !(cutoff_hz > 0.0 && cutoff_hz < fs / 2.0) {
        return Err(Error::DesignInfeasible(format!(
            "high-pass cutoff {cutoff_hz} Hz outside (0, {})",
            fs / 2.0
        )));
    }
    if transition_hz <= 0.0 {
        return Err(Error::DesignInfeasible(
            "transition width must be positive".into(),
        ));
    }
    let mut taps = kaiser_lowpass(cutoff_hz / fs, transition_hz / fs, stopband_db)?;
    for t in &mut taps {
        *t = -*t;
    }
    let center = taps.len() / 2;
    taps[center] += 1.0;
    Ok(taps)
}

/// Linear-phase band-pass via the difference of two unit-DC low-pass designs.
pub fn design_fir_bandpass(
    low_hz: f64,
    high_hz: f64,
    fs: f64,
    transition_hz: f64,
    stopband_db: f64,
) -> Result<Vec<f64>> {
    if !(low_hz > 0.0 && low_hz < high_hz && high_hz < fs / 2.0) {
        return Err(Error::DesignInfeasible(format!(
            "band edges ({low_hz}, {high_hz}) Hz invalid for fs {fs}"
        )));
    }
    let delta = transition_hz / fs;
    let hi = kaiser_lowpass(high_hz / fs, delta, stopband_db)?;
    let lo = kaiser_lowpass(low_hz / fs, delta, stopband_db)?;
    // Both designs share the same (delta, atten) and therefore the same
    // length, so the subtraction is tap-aligned.
    Ok(hi.iter().zip(&lo).map(|(a, b)| a - b).collect())
}

/// Convolve with a symmetric odd-length kernel, group delay compensated so
/// the output is time-aligned with the input. Edges use odd reflection;
/// output length equals input length.
pub fn convolve_same(x: &[f64], taps: &[f64]) -> Vec<f64> {
    let half = (taps.len() / 2) as isize;
    (0..x.len() as isize)
        .map(|n| {
            taps.iter()
                .enumerate()
                .map(|(k, &t)| t * reflect_odd(x, n + half - k as isize))
                .sum()
        })
        .collect()
}

/// Magnitude of the frequency response of `taps` at `freq_hz`.
pub fn magnitude_at(taps: &[f64], freq_hz: f64, fs: f64) -> f64 {
    let omega = 2.0 * PI * freq_hz / fs;
    let (mut re, mut im) = (0.0, 0.0);
    for (k, &t) in taps.iter().enumerate() {
        re += t * (omega * k as f64).cos();
        im -= t * (omega * k as f64).sin();
    }
    (re * re + im * im).sqrt()
}
