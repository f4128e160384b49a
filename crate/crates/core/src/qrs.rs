//! R-peak detection so that annotation-dependent methods receive fiducial
//! points. All methods in one experiment receive identical annotations.

use crate::dsp::fir::{convolve_same, design_fir_bandpass};
use crate::error::{Error, Result};
use crate::signal::Signal;
use std::io::Write;
use std::path::Path;

/// Refractory period between beats, seconds.
const REFRACTORY_S: f64 = 0.2;

/// Ascending R-peak sample indices for one signal.
#[derive(Debug, Clone, PartialEq)]
pub struct BeatAnnotations {
    r_peaks: Vec<usize>,
    source_fs: f64,
}

impl BeatAnnotations {
    /// Validate and wrap a set of R-peak indices: strictly ascending with
    /// at least the refractory period between consecutive beats.
    pub fn new(r_peaks: Vec<usize>, source_fs: f64) -> Result<Self> {
        if r_peaks.is_empty() {
            return Err(Error::NoPeaksDetected);
        }
        let min_gap = (REFRACTORY_S * source_fs) as usize;
        for w in r_peaks.windows(2) {
            if w[1] <= w[0] + min_gap {
                return Err(Error::InvalidParameter(format!(
                    "R peaks {} and {} violate the {min_gap}-sample refractory spacing",
                    w[0], w[1]
                )));
            }
        }
        Ok(Self { r_peaks, source_fs })
    }

    pub fn r_peaks(&self) -> &[usize] {
        &self.r_peaks
    }

    pub fn source_fs(&self) -> f64 {
        self.source_fs
    }

    pub fn len(&self) -> usize {
        self.r_peaks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r_peaks.is_empty()
    }

    /// Smallest RR interval, in samples.
    pub fn min_rr_samples(&self) -> Option<usize> {
        self.r_peaks.windows(2).map(|w| w[1] - w[0]).min()
    }

    /// Mean RR interval, seconds.
    pub fn mean_rr_seconds(&self) -> Option<f64> {
        if self.r_peaks.len() < 2 {
            return None;
        }
        let total = (self.r_peaks[self.r_peaks.len() - 1] - self.r_peaks[0]) as f64;
        Some(total / (self.r_peaks.len() - 1) as f64 / self.source_fs)
    }

    /// One sample index per line, for debugging and CLI interchange.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        for r in &self.r_peaks {
            writeln!(out, "{r}")?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv(path: &Path, source_fs: f64) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut peaks = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let idx: usize = line.parse().map_err(|_| Error::Parse {
                path: path.display().to_string(),
                line: lineno + 1,
                message: format!("invalid sample index {line:?}"),
            })?;
            peaks.push(idx);
        }
        Self::new(peaks, source_fs)
    }
}

/// Detect R peaks with a derivative-square-integrate pipeline behind a
/// 5-15 Hz band-pass front end (which removes baseline wander before
/// detection), an adaptive threshold at 0.4x the running mean of accepted
/// integrated peaks, and a refractory constraint. Each detection is
/// relocated to the raw-signal maximum within +-50 ms.
pub fn detect_r_peaks(s: &Signal) -> Result<BeatAnnotations> {
    if s.duration_seconds() < 2.0 {
        return Err(Error::InvalidParameter(format!(
            "QRS detection needs at least 2 s of signal, got {:.3} s",
            s.duration_seconds()
        )));
    }
    let fs = s.fs();
    let x = s.samples();

    let bp_taps = design_fir_bandpass(5.0, 15.0, fs, 3.0, 40.0)?;
    let bp = convolve_same(x, &bp_taps);

    // Five-point derivative, squared.
    let n = bp.len();
    let mut feat = vec![0.0; n];
    for (i, f) in feat.iter_mut().enumerate() {
        let at = |j: isize| -> f64 {
            let k = (i as isize + j).clamp(0, n as isize - 1) as usize;
            bp[k]
        };
        let d = (2.0 * at(2) + at(1) - at(-1) - 2.0 * at(-2)) / 8.0;
        *f = d * d;
    }

    // Centred moving-window integration over 150 ms.
    let w = ((0.15 * fs).round() as usize).max(1);
    let mut prefix = vec![0.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + feat[i];
    }
    let half = w / 2;
    let mwi: Vec<f64> = (0..n)
        .map(|i| {
            let start = i.saturating_sub(half);
            let end = (i + half + 1).min(n);
            (prefix[end] - prefix[start]) / (end - start) as f64
        })
        .collect();

    // Local maxima of the integrated signal (plateau-tolerant).
    let mut maxima = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if mwi[i] > mwi[i - 1] && mwi[i] >= mwi[i + 1] && mwi[i] > 0.0 {
            maxima.push(i);
        }
        i += 1;
    }
    if maxima.is_empty() {
        return Err(Error::NoPeaksDetected);
    }

    // Adaptive threshold seeded from the first two seconds.
    let lead = ((2.0 * fs) as usize).min(n);
    let mut running = mwi[..lead].iter().cloned().fold(0.0_f64, f64::max);
    if running == 0.0 {
        return Err(Error::NoPeaksDetected);
    }
    // Candidates closer than this resolve by amplitude (P/T satellites
    // lose against the QRS burst); generous enough that relocation cannot
    // push two survivors inside the annotation refractory.
    let conflict = (0.25 * fs) as usize;
    let relocate = (0.05 * fs).round() as usize;
    let mut committed: Vec<(usize, f64)> = Vec::new();
    let mut pending: Option<(usize, f64)> = None;
    for &m in &maxima {
        let v = mwi[m];
        if v <= 0.4 * running {
            continue;
        }
        match pending {
            None => pending = Some((m, v)),
            Some((pm, pv)) => {
                if m - pm <= conflict {
                    if v > pv {
                        pending = Some((m, v));
                    }
                } else {
                    committed.push((pm, pv));
                    running = 0.875 * running + 0.125 * pv;
                    pending = Some((m, v));
                }
            }
        }
    }
    if let Some(p) = pending {
        committed.push(p);
    }

    // Relocate each detection to the raw-signal maximum within +-50 ms.
    let refractory = (REFRACTORY_S * fs) as usize;
    let mut peaks: Vec<usize> = Vec::new();
    for (m, _) in committed {
        let lo = m.saturating_sub(relocate);
        let hi = (m + relocate + 1).min(n);
        let r = (lo..hi)
            .max_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap())
            .unwrap();
        if let Some(&last) = peaks.last() {
            if r <= last + refractory {
                continue;
            }
        }
        peaks.push(r);
    }
    BeatAnnotations::new(peaks, fs)
}
