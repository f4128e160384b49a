//! Distance-based similarity metrics and the sliding covariance diagnostic.
//!
//! Argument convention throughout: `s1` is the clean/original reference and
//! `s2` is the processed signal. MAD and SSD are symmetric; PRD is not, so
//! callers must keep the reference first.

use crate::error::{Error, Result};
use crate::signal::Signal;
use serde::{Deserialize, Serialize};

/// The three metric values for one (method, signal) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricTriple {
    /// Absolute maximum distance, a.u.
    pub mad: f64,
    /// Sum of squared distances, a.u.^2.
    pub ssd: f64,
    /// Percentage root-mean-square difference, percent.
    pub prd: f64,
}

impl MetricTriple {
    pub fn compute(reference: &Signal, processed: &Signal) -> Result<Self> {
        Ok(Self {
            mad: mad(reference, processed)?,
            ssd: ssd(reference, processed)?,
            prd: prd(reference, processed)?,
        })
    }

    /// True when every component is at most the corresponding one of `other`.
    pub fn dominates(&self, other: &MetricTriple) -> bool {
        self.mad <= other.mad && self.ssd <= other.ssd && self.prd <= other.prd
    }
}

/// Absolute maximum distance: `max |s2(m) - s1(m)|`.
pub fn mad(s1: &Signal, s2: &Signal) -> Result<f64> {
    s1.check_compatible(s2)?;
    Ok(s1
        .samples()
        .iter()
        .zip(s2.samples())
        .fold(0.0_f64, |m, (a, b)| m.max((b - a).abs())))
}

/// Sum of squared distances: `sum (s2(m) - s1(m))^2`.
pub fn ssd(s1: &Signal, s2: &Signal) -> Result<f64> {
    s1.check_compatible(s2)?;
    Ok(s1
        .samples()
        .iter()
        .zip(s2.samples())
        .map(|(a, b)| (b - a) * (b - a))
        .sum())
}

/// Percentage root-mean-square difference:
/// `100 * sqrt( sum (s2(m)-s1(m))^2 / sum (s2(m)-mean(s1))^2 )`.
///
/// The denominator is centred on the mean of the reference but summed over
/// the processed signal, exactly as defined; a zero denominator is an error.
pub fn prd(s1: &Signal, s2: &Signal) -> Result<f64> {
    s1.check_compatible(s2)?;
    let mean1 = s1.samples().iter().sum::<f64>() / s1.len() as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for (a, b) in s1.samples().iter().zip(s2.samples()) {
        num += (b - a) * (b - a);
        den += (b - mean1) * (b - mean1);
    }
    if den == 0.0 {
        return Err(Error::UndefinedPrd);
    }
    Ok(100.0 * (num / den).sqrt())
}

/// Covariance of the two signals over a centred sliding window of
/// `window_s` seconds. Windows are clamped (shifted) at the edges so every
/// output sample is the covariance over a full-length window.
pub fn sliding_covariance(s1: &Signal, s2: &Signal, window_s: f64) -> Result<Signal> {
    s1.check_compatible(s2)?;
    let w = (window_s * s1.fs()).round() as usize;
    if w < 3 {
        return Err(Error::InvalidParameter(format!(
            "covariance window of {w} samples is below the 3-sample minimum"
        )));
    }
    if w > s1.len() {
        return Err(Error::DegenerateWindow {
            requested: w,
            available: s1.len(),
        });
    }
    let x = s1.samples();
    let y = s2.samples();
    let n = x.len();
    // Prefix sums for O(1) window statistics.
    let mut px = vec![0.0; n + 1];
    let mut py = vec![0.0; n + 1];
    let mut pxy = vec![0.0; n + 1];
    for i in 0..n {
        px[i + 1] = px[i] + x[i];
        py[i + 1] = py[i] + y[i];
        pxy[i + 1] = pxy[i] + x[i] * y[i];
    }
    let half = w / 2;
    let wf = w as f64;
    let out: Vec<f64> = (0..n)
        .map(|c| {
            let start = c.saturating_sub(half).min(n - w);
            let end = start + w;
            let sx = px[end] - px[start];
            let sy = py[end] - py[start];
            let sxy = pxy[end] - pxy[start];
            sxy / wf - (sx / wf) * (sy / wf)
        })
        .collect();
    Signal::new(out, s1.fs(), format!("cov({}, {})", s1.label(), s2.label()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sig(samples: &[f64], fs: f64) -> Signal {
        Signal::new(samples.to_vec(), fs, "t").unwrap()
    }

    #[test]
    fn mad_hand_values() {
        let a = sig(&[0.0, 0.0, 0.0], 250.0);
        let b = sig(&[0.0, 1.0, -2.0], 250.0);
        assert_eq!(mad(&a, &b).unwrap(), 2.0);
        assert_eq!(mad(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn ssd_hand_values() {
        let a = sig(&[0.0, 0.0, 0.0], 250.0);
        let b = sig(&[0.0, 1.0, -2.0], 250.0);
        assert_eq!(ssd(&a, &b).unwrap(), 5.0);
        assert_eq!(ssd(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn ssd_scales_quadratically() {
        let a = sig(&[0.0, 0.0, 0.0, 0.0], 250.0);
        let b = sig(&[0.1, -0.3, 0.2, 0.4], 250.0);
        let doubled = sig(&[0.2, -0.6, 0.4, 0.8], 250.0);
        let s1 = ssd(&a, &b).unwrap();
        let s2 = ssd(&a, &doubled).unwrap();
        assert!((s2 - 4.0 * s1).abs() < 1e-15);
    }

    #[test]
    fn prd_hand_values() {
        let a = sig(&[1.0, 1.0, 1.0, 1.0], 250.0);
        let b = sig(&[2.0, 2.0, 2.0, 2.0], 250.0);
        // numerator 4, denominator sum (2-1)^2 * 4 = 4
        assert!((prd(&a, &b).unwrap() - 100.0).abs() < 1e-12);
        let c = sig(&[0.0, 1.0, 2.0, 3.0], 250.0);
        assert_eq!(prd(&c, &c).unwrap(), 0.0);
    }

    #[test]
    fn prd_degenerate_denominator_errors() {
        // mean(s1) = 1 and s2 identically 1 makes the denominator zero.
        let a = sig(&[0.0, 2.0], 250.0);
        let b = sig(&[1.0, 1.0], 250.0);
        assert!(matches!(prd(&a, &b), Err(Error::UndefinedPrd)));
    }

    #[test]
    fn prd_is_order_sensitive() {
        let a = sig(&[0.0, 1.0, 4.0, 2.0], 250.0);
        let b = sig(&[0.5, 1.5, 3.0, 2.5], 250.0);
        let ab = prd(&a, &b).unwrap();
        let ba = prd(&b, &a).unwrap();
        assert!((ab - ba).abs() > 1e-6, "{ab} vs {ba}");
    }

    #[test]
    fn metrics_detect_translations() {
        // With a sign-constant difference, shifting s2 by c changes MAD by
        // exactly |c| and strictly increases SSD.
        let s1 = sig(&[0.0, 0.1, 0.2, 0.3], 250.0);
        let s2 = sig(&[0.2, 0.35, 0.45, 0.5], 250.0);
        let c = 0.25;
        let shifted = sig(
            &s2.samples().iter().map(|v| v + c).collect::<Vec<_>>(),
            250.0,
        );
        let m0 = mad(&s1, &s2).unwrap();
        let m1 = mad(&s1, &shifted).unwrap();
        assert!((m1 - m0 - c).abs() < 1e-12, "{m0} -> {m1}");
        assert!(ssd(&s1, &shifted).unwrap() > ssd(&s1, &s2).unwrap());
        assert!(prd(&s1, &shifted).unwrap() != prd(&s1, &s2).unwrap());
    }

    #[test]
    fn mad_bounded_by_sqrt_ssd() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rng.gen_range(2..200);
            let a = sig(
                &(0..n).map(|_| rng.gen_range(-3.0..3.0)).collect::<Vec<_>>(),
                250.0,
            );
            let b = sig(
                &(0..n).map(|_| rng.gen_range(-3.0..3.0)).collect::<Vec<_>>(),
                250.0,
            );
            assert!(mad(&a, &b).unwrap() <= ssd(&a, &b).unwrap().sqrt() + 1e-12);
        }
    }

    #[test]
    fn covariance_of_shifted_signal_equals_variance() {
        let x: Vec<f64> = (0..500).map(|i| (i as f64 * 0.05).sin()).collect();
        let shifted: Vec<f64> = x.iter().map(|v| v + 3.0).collect();
        let a = sig(&x, 250.0);
        let b = sig(&shifted, 250.0);
        let cov = sliding_covariance(&a, &b, 0.2).unwrap();
        let var = sliding_covariance(&a, &a, 0.2).unwrap();
        for (c, v) in cov.samples().iter().zip(var.samples()) {
            assert!((c - v).abs() < 1e-10);
        }
    }

    #[test]
    fn covariance_of_identical_sine_is_positive() {
        let x: Vec<f64> = (0..2000).map(|i| (i as f64 * 0.1).sin()).collect();
        let a = sig(&x, 250.0);
        let cov = sliding_covariance(&a, &a, 1.0).unwrap();
        assert!(cov.samples().iter().all(|&v| v > 0.0));
    }

    #[test]
    fn covariance_of_independent_noise_near_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 5000;
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let a = sig(&x, 250.0);
        let b = sig(&y, 250.0);
        let cov = sliding_covariance(&a, &b, 1.0).unwrap();
        let mean = cov.samples().iter().sum::<f64>() / n as f64;
        let sd = (cov
            .samples()
            .iter()
            .map(|v| (v - mean) * (v - mean))
            .sum::<f64>()
            / n as f64)
            .sqrt();
        // Windows overlap, so the effective sample count is n / window.
        let eff = (n / 250) as f64;
        assert!(mean.abs() <= 3.0 * sd / eff.sqrt(), "mean {mean}, sd {sd}");
    }
}
