//! Moving-average filter method.

use crate::error::{Error, Result};
use crate::signal::Signal;

use super::MethodConfig;

/// Estimate the baseline as a centred moving average and subtract it.
///
/// The estimate is only defined where the window fits entirely; the
/// (N-1)/2 samples at each end are filled with zeros, so the raw signal
/// passes through unchanged there. The default window is fs/cutoff samples,
/// the shortest moving average whose first spectral null sits at the cutoff.
pub fn moving_average(s: &Signal, config: &MethodConfig) -> Result<Signal> {
    let fs = s.fs();
    let mut w = match config.maf_window_s {
        Some(sec) => (sec * fs).round() as usize,
        None => (fs / config.cutoff_hz).round() as usize,
    };
    if w < 3 {
        return Err(Error::InvalidParameter(format!(
            "moving-average window of {w} samples is below the 3-sample minimum"
        )));
    }
    w += (w + 1) % 2; // odd length
    if w >= s.len() {
        return Err(Error::DegenerateWindow {
            requested: w,
            available: s.len(),
        });
    }
    let x = s.samples();
    let n = x.len();
    let half = w / 2;
    let mut prefix = vec![0.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + x[i];
    }
    let out: Vec<f64> = (0..n)
        .map(|i| {
            if i < half || i + half >= n {
                x[i]
            } else {
                x[i] - (prefix[i + half + 1] - prefix[i - half]) / w as f64
            }
        })
        .collect();
    Signal::new(out, fs, s.label())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg_with_window(samples: usize, fs: f64) -> MethodConfig {
        MethodConfig {
            maf_window_s: Some(samples as f64 / fs),
            ..MethodConfig::default()
        }
    }

    #[test]
    fn hand_computed_five_samples() {
        let s = Signal::new(vec![1.0, 2.0, 3.0, 4.0, 5.0], 250.0, "t").unwrap();
        let out = moving_average(&s, &cfg_with_window(3, 250.0)).unwrap();
        // estimate = [0, 2, 3, 4, 0] -> output = [1, 0, 0, 0, 5]
        assert_eq!(out.samples(), &[1.0, 0.0, 0.0, 0.0, 5.0]);
    }

    #[test]
    fn method_is_linear() {
        let a: Vec<f64> = (0..600).map(|i| (i as f64 * 0.07).sin()).collect();
        let b: Vec<f64> = (0..600).map(|i| (i as f64 * 0.013).cos() * 0.4).collect();
        let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let cfg = cfg_with_window(25, 250.0);
        let fa = moving_average(&Signal::new(a.clone(), 250.0, "a").unwrap(), &cfg).unwrap();
        let fb = moving_average(&Signal::new(b, 250.0, "b").unwrap(), &cfg).unwrap();
        let fsum = moving_average(&Signal::new(sum, 250.0, "s").unwrap(), &cfg).unwrap();
        for i in 0..600 {
            let lin = fa.samples()[i] + fb.samples()[i];
            assert!((fsum.samples()[i] - lin).abs() <= 1e-12);
        }
        let scaled: Vec<f64> = a.iter().map(|v| v * -2.5).collect();
        let fscaled =
            moving_average(&Signal::new(scaled, 250.0, "sc").unwrap(), &cfg).unwrap();
        for (y, z) in fscaled.samples().iter().zip(fa.samples()) {
            assert!((y + 2.5 * z).abs() <= 1e-9);
        }
    }

    #[test]
    fn constant_signal_zeroes_interior() {
        let s = Signal::new(vec![2.0; 101], 250.0, "t").unwrap();
        let out = moving_average(&s, &cfg_with_window(11, 250.0)).unwrap();
        for (i, &v) in out.samples().iter().enumerate() {
            if (5..96).contains(&i) {
                assert!(v.abs() < 1e-12, "interior sample {i} = {v}");
            } else {
                assert_eq!(v, 2.0, "edge sample {i}");
            }
        }
    }

    #[test]
    fn default_window_comes_from_cutoff() {
        // fs/cutoff = 360/0.67 = 537.3 -> 537 samples, forced odd.
        let s = Signal::new(vec![0.0; 2000], 360.0, "t").unwrap();
        assert!(moving_average(&s, &MethodConfig::default()).is_ok());
    }

    #[test]
    fn oversized_window_is_rejected() {
        let s = Signal::new(vec![0.0; 10], 250.0, "t").unwrap();
        assert!(matches!(
            moving_average(&s, &cfg_with_window(11, 250.0)),
            Err(Error::DegenerateWindow { .. })
        ));
    }
}
