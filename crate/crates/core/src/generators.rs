//! Synthetic inputs: artificial ECG, sinusoidal baseline wander, and
//! MAD-normalized contamination mixtures.

use crate::error::{Error, Result};
use crate::signal::Signal;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

/// One Gaussian event of the beat morphology (P, Q, R, S or T).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MorphologyEvent {
    /// Angular position within the cardiac cycle, radians; R sits at 0.
    pub theta: f64,
    /// Event amplitude in model units.
    pub amplitude: f64,
    /// Gaussian width, radians.
    pub width: f64,
}

/// The five-event beat morphology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Morphology {
    pub events: [MorphologyEvent; 5],
}

const DEFAULT_MORPHOLOGY: &str = include_str!("../data/ecg_morphology.txt");

impl Morphology {
    /// The checked-in default morphology (see `data/ecg_morphology.txt`).
    pub fn default_events() -> Self {
        Self::parse(DEFAULT_MORPHOLOGY, "<builtin>").expect("builtin morphology parses")
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Parse the `name = theta, a, b` key/value format.
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut events = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Parse {
                path: source.to_string(),
                line: lineno + 1,
                message,
            };
            let (_, rhs) = line
                .split_once('=')
                .ok_or_else(|| err("expected `name = theta, a, b`".into()))?;
            let fields: Vec<&str> = rhs.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(err(format!("expected 3 numbers, got {}", fields.len())));
            }
            let mut nums = [0.0; 3];
            for (v, f) in nums.iter_mut().zip(&fields) {
                *v = f
                    .parse()
                    .map_err(|_| err(format!("invalid number {f:?}")))?;
            }
            events.push(MorphologyEvent {
                theta: nums[0],
                amplitude: nums[1],
                width: nums[2],
            });
        }
        let events: [MorphologyEvent; 5] = events.try_into().map_err(|v: Vec<_>| Error::Parse {
            path: source.to_string(),
            line: 0,
            message: format!("expected exactly 5 morphology events, got {}", v.len()),
        })?;
        Ok(Self { events })
    }
}

impl Default for Morphology {
    fn default() -> Self {
        Self::default_events()
    }
}

/// Parameters of the synthetic ECG generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcgSynthSpec {
    /// Heart rate, beats per minute.
    pub hr: f64,
    /// Sampling rate, Hz.
    pub fs: f64,
    /// Duration, seconds.
    pub duration_s: f64,
    /// Beat morphology; defaults to the checked-in event table.
    #[serde(default)]
    pub morphology: Morphology,
    /// Fractional standard deviation of RR intervals (0 = strictly periodic).
    #[serde(default)]
    pub rr_jitter: f64,
    /// RNG seed for the RR jitter.
    #[serde(default)]
    pub seed: u64,
}

impl EcgSynthSpec {
    pub fn new(hr: f64, fs: f64, duration_s: f64) -> Self {
        Self {
            hr,
            fs,
            duration_s,
            morphology: Morphology::default_events(),
            rr_jitter: 0.0,
            seed: 0,
        }
    }
}

/// How a clean signal is contaminated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContaminationSpec {
    /// Target MAD between the noisy and clean signals, a.u.
    pub target_mad: f64,
    /// Sine frequency in Hz when the noise is artificial.
    #[serde(default)]
    pub sine_freq: Option<f64>,
}

impl Default for ContaminationSpec {
    fn default() -> Self {
        Self {
            target_mad: 0.5,
            sine_freq: Some(0.60),
        }
    }
}

/// Synthesize an ECG and return it together with the ground-truth R-peak
/// sample indices.
pub fn synth_ecg_traced(spec: &EcgSynthSpec) -> Result<(Signal, Vec<usize>)> {
    if spec.hr.is_nan() || spec.hr <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "heart rate must be positive, got {}",
            spec.hr
        )));
    }
    if spec.fs.is_nan() || spec.fs <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "sampling rate must be positive, got {}",
            spec.fs
        )));
    }
    let n = (spec.fs * spec.duration_s).round() as usize;
    if n == 0 {
        return Err(Error::EmptySignal);
    }
    if spec.rr_jitter < 0.0 {
        return Err(Error::InvalidParameter(
            "rr_jitter must be non-negative".into(),
        ));
    }
    for ev in &spec.morphology.events {
        if ev.width == 0.0 {
            return Err(Error::InvalidParameter(
                "morphology event width must be non-zero".into(),
            ));
        }
    }

    // Lay out cardiac cycles over the record; each cycle spans -pi..pi in
    // phase with the R event at phase 0 (mid-cycle).
    let mean_rr = 60.0 / spec.hr;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut boundaries = vec![0.0_f64];
    while *boundaries.last().unwrap() < spec.duration_s {
        let jitter = if spec.rr_jitter > 0.0 {
            // Box-Muller normal draw, clamped to keep RR positive.
            let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
            let u2: f64 = rng.gen_range(0.0..1.0);
            let z = (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos();
            (1.0 + spec.rr_jitter * z).max(0.3)
        } else {
            1.0
        };
        boundaries.push(boundaries.last().unwrap() + mean_rr * jitter);
    }

    let mut samples = Vec::with_capacity(n);
    let mut cycle = 0usize;
    let mut r_peaks = Vec::new();
    for m in 0..n {
        let t = m as f64 / spec.fs;
        while cycle + 1 < boundaries.len() - 1 && t >= boundaries[cycle + 1] {
            cycle += 1;
        }
        let rr = boundaries[cycle + 1] - boundaries[cycle];
        let theta = -PI + 2.0 * PI * (t - boundaries[cycle]) / rr;
        let mut z = 0.0;
        for ev in &spec.morphology.events {
            let mut d = theta - ev.theta;
            // Wrap the phase distance into [-pi, pi) so event tails continue
            // across cycle boundaries.
            d = (d + PI).rem_euclid(2.0 * PI) - PI;
            z += ev.amplitude * (-d * d / (2.0 * ev.width * ev.width)).exp();
        }
        samples.push(z);
    }
    // R events at mid-cycle; keep only those inside the record.
    for w in boundaries.windows(2) {
        let t_r = (w[0] + w[1]) / 2.0;
        let idx = (t_r * spec.fs).round() as usize;
        if idx < n && t_r < spec.duration_s {
            r_peaks.push(idx);
        }
    }

    // Scale to a 1.6 a.u. peak-to-peak span. The event sum is zero away
    // from the five events, so the isoelectric level stays at exactly 0
    // and the R peak lands near 1.2 a.u.
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &v in &samples {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let span = hi - lo;
    if span > 0.0 {
        for v in &mut samples {
            *v *= 1.6 / span;
        }
    }

    let label = format!("synth-ecg:{}bpm", spec.hr);
    Ok((Signal::new(samples, spec.fs, label)?, r_peaks))
}

/// Synthesize an ECG at the configured heart rate.
pub fn synth_ecg(spec: &EcgSynthSpec) -> Result<Signal> {
    synth_ecg_traced(spec).map(|(s, _)| s)
}

/// A pure sine baseline-wander surrogate: `amplitude * sin(2 pi f m / fs)`.
pub fn synth_sine_blw(freq_hz: f64, fs: f64, duration_s: f64, amplitude: f64) -> Result<Signal> {
    if freq_hz.is_nan() || freq_hz <= 0.0 || freq_hz >= fs / 2.0 {
        return Err(Error::InvalidParameter(format!(
            "sine frequency {freq_hz} Hz outside (0, {})",
            fs / 2.0
        )));
    }
    let n = (fs * duration_s).round() as usize;
    if n == 0 {
        return Err(Error::EmptySignal);
    }
    let samples = (0..n)
        .map(|m| amplitude * (2.0 * PI * freq_hz * m as f64 / fs).sin())
        .collect();
    Signal::new(samples, fs, format!("sine-blw:{freq_hz}Hz"))
}

/// Add `noise` to `clean`, scaled so that `MAD(noisy, clean)` equals the
/// target exactly. Noise longer than the clean signal is truncated from the
/// start of the record; returns the noisy signal and the scale factor used.
pub fn contaminate(
    clean: &Signal,
    noise: &Signal,
    spec: &ContaminationSpec,
) -> Result<(Signal, f64)> {
    if spec.target_mad.is_nan() || spec.target_mad <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "target MAD must be positive, got {}",
            spec.target_mad
        )));
    }
    if clean.fs() != noise.fs() {
        return Err(Error::RateMismatch {
            left: clean.fs(),
            right: noise.fs(),
        });
    }
    if noise.len() < clean.len() {
        return Err(Error::LengthMismatch {
            left: clean.len(),
            right: noise.len(),
        });
    }
    let span = &noise.samples()[..clean.len()];
    let peak = span.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return Err(Error::CannotNormalize);
    }
    let scale = spec.target_mad / peak;
    let samples = clean
        .samples()
        .iter()
        .zip(span)
        .map(|(c, w)| c + scale * w)
        .collect();
    let noisy = Signal::new(
        samples,
        clean.fs(),
        format!("{}+{}", clean.label(), noise.label()),
    )?;
    Ok((noisy, scale))
}
