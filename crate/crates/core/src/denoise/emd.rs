//! Empirical mode decomposition and the EMD-based baseline estimator.

use crate::dsp::iir::{butterworth, filtfilt, Band};
use crate::dsp::spline::{Boundary, CubicSpline, Extend};
use crate::error::{Error, Result};
use crate::signal::Signal;

use super::MethodConfig;

/// Sifting iteration cap per IMF.
const MAX_SIFT_ITERATIONS: usize = 50;

/// An empirical mode decomposition: ordered intrinsic mode functions plus
/// the final residual. The source equals the sum of all parts.
#[derive(Debug, Clone)]
pub struct ImfSet {
    pub imfs: Vec<Signal>,
    pub residual: Signal,
}

impl ImfSet {
    /// Reconstruct the source from the parts.
    pub fn reconstruct(&self) -> Result<Signal> {
        let mut acc = self.residual.samples().to_vec();
        for imf in &self.imfs {
            for (a, v) in acc.iter_mut().zip(imf.samples()) {
                *a += v;
            }
        }
        Signal::new(acc, self.residual.fs(), self.residual.label())
    }
}

/// Interior extrema of `x` (plateaus contribute their midpoint).
fn extrema(x: &[f64]) -> (Vec<usize>, Vec<usize>) {
    let n = x.len();
    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if x[i] > x[i - 1] {
            // scan forward over any plateau
            let start = i;
            let mut j = i;
            while j + 1 < n && x[j + 1] == x[j] {
                j += 1;
            }
            if j + 1 < n && x[j + 1] < x[j] {
                maxima.push((start + j) / 2);
            }
            i = j + 1;
        } else if x[i] < x[i - 1] {
            let start = i;
            let mut j = i;
            while j + 1 < n && x[j + 1] == x[j] {
                j += 1;
            }
            if j + 1 < n && x[j + 1] > x[j] {
                minima.push((start + j) / 2);
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    (maxima, minima)
}

/// Natural-spline envelope through the given extremum indices, with the
/// outermost extrema mirrored across the signal ends so the envelope is
/// interpolated (never extrapolated) over the whole record.
fn envelope(x: &[f64], idx: &[usize]) -> Result<Vec<f64>> {
    let n = x.len();
    let last = (n - 1) as f64;
    let mut xs = Vec::with_capacity(idx.len() + 4);
    let mut ys = Vec::with_capacity(idx.len() + 4);
    // Mirror positions of the first two extrema about 0, in ascending
    // order: -idx[1] < -idx[0] < 0.
    for &i in idx.iter().take(2).rev() {
        if i > 0 {
            xs.push(-(i as f64));
            ys.push(x[i]);
        }
    }
    for &i in idx {
        xs.push(i as f64);
        ys.push(x[i]);
    }
    // Mirror the last two about n-1: 2L - idx[l] < 2L - idx[l-1].
    for &i in idx.iter().rev().take(2) {
        if (i as f64) < last {
            xs.push(2.0 * last - i as f64);
            ys.push(x[i]);
        }
    }
    // A single extremum at 0 or n-1 leaves that side uncovered; pin the
    // end sample itself.
    if xs[0] > 0.0 {
        xs.insert(0, 0.0);
        ys.insert(0, x[0]);
    }
    if *xs.last().unwrap() < last {
        xs.push(last);
        ys.push(x[n - 1]);
    }
    let spline = CubicSpline::fit(&xs, &ys, Boundary::Natural, Extend::Constant)?;
    Ok(spline.evaluate_grid(n))
}

/// Standard sifting: subtract the mean of the upper and lower spline
/// envelopes until the normalized squared difference between successive
/// siftings drops below `sift_tol`; decomposition stops when the residual
/// has no oscillation left (fewer than four interior extrema) or `max_imfs`
/// is reached.
pub fn emd_sift(s: &Signal, max_imfs: usize, sift_tol: f64) -> Result<ImfSet> {
    if s.len() < 4 {
        return Err(Error::Decomposition(format!(
            "signal of {} samples is too short to sift",
            s.len()
        )));
    }
    if sift_tol.is_nan() || sift_tol <= 0.0 {
        return Err(Error::Decomposition(format!(
            "sift tolerance must be positive, got {sift_tol}"
        )));
    }
    let mut residual = s.samples().to_vec();
    let mut imfs = Vec::new();

    while imfs.len() < max_imfs {
        let (maxima, minima) = extrema(&residual);
        if maxima.len() + minima.len() < 4 || maxima.is_empty() || minima.is_empty() {
            break;
        }
        let mut h = residual.clone();
        for _ in 0..MAX_SIFT_ITERATIONS {
            let (mx, mn) = extrema(&h);
            if mx.is_empty() || mn.is_empty() {
                break;
            }
            let upper = envelope(&h, &mx)?;
            let lower = envelope(&h, &mn)?;
            let mut sd_num = 0.0;
            let mut sd_den = 0.0;
            for i in 0..h.len() {
                let mean = (upper[i] + lower[i]) / 2.0;
                sd_num += mean * mean;
                sd_den += h[i] * h[i];
                h[i] -= mean;
            }
            if sd_den == 0.0 || sd_num / sd_den < sift_tol {
                break;
            }
        }
        for (r, v) in residual.iter_mut().zip(&h) {
            *r -= v;
        }
        imfs.push(Signal::new(
            h,
            s.fs(),
            format!("{}:imf{}", s.label(), imfs.len() + 1),
        )?);
    }

    Ok(ImfSet {
        imfs,
        residual: Signal::new(residual, s.fs(), format!("{}:residual", s.label()))?,
    })
}

/// Dominant frequency estimated from the zero-crossing rate, Hz.
fn dominant_frequency(x: &[f64], fs: f64) -> f64 {
    let mut crossings = 0usize;
    for w in x.windows(2) {
        if (w[0] >= 0.0) != (w[1] >= 0.0) {
            crossings += 1;
        }
    }
    crossings as f64 * fs / (2.0 * x.len() as f64)
}

/// EMD baseline removal: the residual plus every IMF whose dominant
/// frequency falls below `emd_blw_freq_hz` forms the raw estimate, which is
/// then smoothed by the zero-phase IIR low-pass at the shared cutoff and
/// subtracted from the input.
pub fn emd_denoise(s: &Signal, config: &MethodConfig) -> Result<Signal> {
    let set = emd_sift(s, config.emd_max_imfs, config.emd_sift_tol)?;
    let mut estimate = set.residual.samples().to_vec();
    for imf in &set.imfs {
        if dominant_frequency(imf.samples(), s.fs()) < config.emd_blw_freq_hz {
            for (e, v) in estimate.iter_mut().zip(imf.samples()) {
                *e += v;
            }
        }
    }
    let (b, a) = butterworth(config.iir_order, config.cutoff_hz, s.fs(), Band::LowPass)?;
    let settle = (s.fs() / config.cutoff_hz).ceil() as usize;
    let smoothed = filtfilt(&b, &a, &estimate, 3 * settle);
    let out: Vec<f64> = s
        .samples()
        .iter()
        .zip(&smoothed)
        .map(|(x, e)| x - e)
        .collect();
    Signal::new(out, s.fs(), s.label())
}
