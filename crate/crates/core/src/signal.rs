//! Signal container and sample-level utilities shared by every module.

use crate::dsp::resample::rational_resample;
use crate::error::{Error, Result};

/// A uniformly sampled real-valued waveform.
///
/// Amplitudes are unit-agnostic (a.u. or mV); the label records provenance
/// but no unit conversion is ever performed.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<f64>,
    fs: f64,
    label: String,
}

impl Signal {
    /// Build a signal, validating the container invariants: a positive
    /// sampling rate, at least one sample, and finite amplitudes throughout.
    pub fn new(samples: Vec<f64>, fs: f64, label: impl Into<String>) -> Result<Self> {
        if !fs.is_finite() || fs <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "sampling rate must be positive and finite, got {fs}"
            )));
        }
        if samples.is_empty() {
            return Err(Error::EmptySignal);
        }
        if let Some((index, &value)) = samples.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFiniteSample { index, value });
        }
        Ok(Self {
            samples,
            fs,
            label: label.into(),
        })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn duration_seconds(&self) -> f64 {
        self.samples.len() as f64 / self.fs
    }

    /// Same samples and rate under a different label.
    pub fn relabeled(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Check that `other` is sample-compatible (same length and rate).
    pub fn check_compatible(&self, other: &Signal) -> Result<()> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        if self.fs != other.fs {
            return Err(Error::RateMismatch {
                left: self.fs,
                right: other.fs,
            });
        }
        Ok(())
    }
}

/// A window into some source signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SegmentRef {
    pub start_index: usize,
    pub length: usize,
    pub center_index: usize,
}

/// Sample-wise difference `a - b`. Both signals must share length and rate.
pub fn subtract(a: &Signal, b: &Signal) -> Result<Signal> {
    a.check_compatible(b)?;
    let samples = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(x, y)| x - y)
        .collect();
    Signal::new(samples, a.fs(), a.label())
}

/// Sample-wise sum `a + b`.
pub fn add(a: &Signal, b: &Signal) -> Result<Signal> {
    a.check_compatible(b)?;
    let samples = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(x, y)| x + y)
        .collect();
    Signal::new(samples, a.fs(), a.label())
}

/// Resample to `target_fs` with a polyphase rational resampler
/// (windowed-sinc anti-alias kernel, 40 dB stopband). Downsampling applies
/// the anti-alias low-pass before decimation; `target_fs == fs` is an exact
/// identity.
pub fn resample(s: &Signal, target_fs: f64) -> Result<Signal> {
    if !target_fs.is_finite() || target_fs <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "target sampling rate must be positive, got {target_fs}"
        )));
    }
    if target_fs == s.fs() {
        return Ok(s.clone());
    }
    let out = rational_resample(s.samples(), s.fs(), target_fs)?;
    Signal::new(out, target_fs, s.label())
}

/// Reference a window of `duration` seconds centered on `center`, clamped to
/// the signal bounds while keeping the requested length whenever possible.
pub fn extract_window(s: &Signal, center: usize, duration: f64) -> Result<SegmentRef> {
    if center >= s.len() {
        return Err(Error::InvalidParameter(format!(
            "window center {center} outside signal of {} samples",
            s.len()
        )));
    }
    let length = (duration * s.fs()).round() as usize;
    if length == 0 {
        return Err(Error::InvalidParameter(
            "window duration rounds to zero samples".into(),
        ));
    }
    if length > s.len() {
        return Err(Error::DegenerateWindow {
            requested: length,
            available: s.len(),
        });
    }
    let half = length / 2;
    let start = center.saturating_sub(half).min(s.len() - length);
    Ok(SegmentRef {
        start_index: start,
        length,
        center_index: center,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(samples: &[f64], fs: f64) -> Signal {
        Signal::new(samples.to_vec(), fs, "test").unwrap()
    }

    #[test]
    fn construction_rejects_invalid_input() {
        assert!(matches!(
            Signal::new(vec![], 250.0, ""),
            Err(Error::EmptySignal)
        ));
        assert!(Signal::new(vec![0.0], 0.0, "").is_err());
        assert!(Signal::new(vec![0.0], -1.0, "").is_err());
        assert!(matches!(
            Signal::new(vec![0.0, f64::NAN], 250.0, ""),
            Err(Error::NonFiniteSample { index: 1, .. })
        ));
        assert!(matches!(
            Signal::new(vec![f64::INFINITY], 250.0, ""),
            Err(Error::NonFiniteSample { index: 0, .. })
        ));
    }

    #[test]
    fn duration_follows_length_over_fs() {
        let s = sig(&vec![0.0; 500], 250.0);
        assert_eq!(s.duration_seconds(), 2.0);
    }

    #[test]
    fn subtract_identity_case() {
        let a = sig(&[1.0, 2.0, 3.0], 250.0);
        let out = subtract(&a, &a).unwrap();
        assert_eq!(out.samples(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn subtract_zero_subtrahend() {
        let a = sig(&[0.0, 1.0, -2.0], 250.0);
        let z = sig(&[0.0, 0.0, 0.0], 250.0);
        assert_eq!(subtract(&a, &z).unwrap().samples(), &[0.0, 1.0, -2.0]);
    }

    #[test]
    fn subtract_hand_computed() {
        let a = sig(&[2.0, 2.0], 250.0);
        let b = sig(&[0.5, 1.5], 250.0);
        assert_eq!(subtract(&a, &b).unwrap().samples(), &[1.5, 0.5]);
    }

    #[test]
    fn subtract_rejects_mismatches() {
        let a = sig(&[1.0, 2.0], 250.0);
        let b = sig(&[1.0], 250.0);
        assert!(matches!(
            subtract(&a, &b),
            Err(Error::LengthMismatch { left: 2, right: 1 })
        ));
        let c = sig(&[1.0, 2.0], 360.0);
        assert!(matches!(subtract(&a, &c), Err(Error::RateMismatch { .. })));
    }

    #[test]
    fn extract_window_arithmetic() {
        let s = sig(&vec![0.0; 1250], 250.0);
        let w = extract_window(&s, 625, 1.0).unwrap();
        assert_eq!(w.start_index, 500);
        assert_eq!(w.length, 250);
        assert_eq!(w.center_index, 625);
    }

    #[test]
    fn extract_window_clamps_at_boundaries() {
        let s = sig(&vec![0.0; 1250], 250.0);
        let w = extract_window(&s, 0, 1.0).unwrap();
        assert_eq!(w.start_index, 0);
        assert_eq!(w.length, 250);
        let w = extract_window(&s, 1249, 1.0).unwrap();
        assert_eq!(w.start_index, 1000);
    }

    #[test]
    fn extract_window_whole_signal() {
        let s = sig(&vec![0.0; 1250], 250.0);
        let w = extract_window(&s, 600, 5.0).unwrap();
        assert_eq!(w.start_index, 0);
        assert_eq!(w.length, 1250);
    }

    #[test]
    fn extract_window_rejects_overlong_duration() {
        let s = sig(&vec![0.0; 1250], 250.0);
        assert!(matches!(
            extract_window(&s, 600, 6.0),
            Err(Error::DegenerateWindow { .. })
        ));
    }

    #[test]
    fn window_always_inside_source() {
        let s = sig(&vec![0.0; 777], 250.0);
        for center in [0usize, 1, 100, 388, 700, 776] {
            let w = extract_window(&s, center, 1.0).unwrap();
            assert!(w.start_index + w.length <= s.len());
            assert!(w.start_index <= w.center_index && w.center_index < s.len());
        }
    }

    #[test]
    fn resample_identity_when_rates_match() {
        let s = sig(&[1.0, 2.0, 3.0], 250.0);
        let out = resample(&s, 250.0).unwrap();
        assert_eq!(out.samples(), s.samples());
    }
}
