//! Discrete wavelet transform with symmetric boundary extension, the
//! semi-soft shrinkage map, and the wavelet baseline-removal method.

// The filter tables below carry full f64 precision on purpose.
#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};
use crate::signal::Signal;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use super::MethodConfig;

/// Symlet-10 scaling filter.
const SYM10: [f64; 20] = [
    -4.5932942100465204e-4,
    5.7036083618495007e-5,
    4.5931735853117919e-3,
    -8.0435893201645130e-4,
    -2.0354939812311111e-2,
    5.7649120335811497e-3,
    4.9994972077375156e-2,
    -3.1990056882428114e-2,
    -3.5536740473819586e-2,
    3.8382676106707633e-1,
    7.6951003702109794e-1,
    4.7169066693844291e-1,
    -7.0880535783231572e-2,
    -1.5949427888491061e-1,
    1.1609893903711318e-2,
    4.5927239231091509e-2,
    -1.4653825813046105e-3,
    -8.6412992770221503e-3,
    9.5632670722852731e-5,
    7.7015980911445982e-4,
];

/// Daubechies-4 scaling filter.
const DB4: [f64; 8] = [
    2.3037781330889650e-1,
    7.1484657055291565e-1,
    6.3088076792985891e-1,
    -2.7983769416859854e-2,
    -1.8703481171909308e-1,
    3.0841381835560764e-2,
    3.2883011666885200e-2,
    -1.0597401785069032e-2,
];

/// Daubechies-5 scaling filter.
const DB5: [f64; 10] = [
    1.6010239797419291e-1,
    6.0382926979718967e-1,
    7.2430852843777293e-1,
    1.3842814590132073e-1,
    -2.4229488706638203e-1,
    -3.2244869584638375e-2,
    7.7571493840045714e-2,
    -6.2414902127982743e-3,
    -1.2580751999081999e-2,
    3.3357252854737713e-3,
];

/// Daubechies-6 scaling filter.
const DB6: [f64; 12] = [
    1.1154074335010946e-1,
    4.9462389039845309e-1,
    7.5113390802109535e-1,
    3.1525035170919763e-1,
    -2.2626469396543982e-1,
    -1.2976686756726194e-1,
    9.7501605587323049e-2,
    2.7522865530305729e-2,
    -3.1582039317486030e-2,
    5.5384220116149614e-4,
    4.7772575109455106e-3,
    -1.0773010853084796e-3,
];

/// Supported orthogonal wavelets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Wavelet {
    Sym10,
    Db4,
    Db5,
    Db6,
}

impl Wavelet {
    /// Scaling (reconstruction low-pass) filter.
    pub fn scaling_filter(&self) -> &'static [f64] {
        match self {
            Wavelet::Sym10 => &SYM10,
            Wavelet::Db4 => &DB4,
            Wavelet::Db5 => &DB5,
            Wavelet::Db6 => &DB6,
        }
    }

    pub fn filter_len(&self) -> usize {
        self.scaling_filter().len()
    }
}

impl fmt::Display for Wavelet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Wavelet::Sym10 => "sym10",
            Wavelet::Db4 => "db4",
            Wavelet::Db5 => "db5",
            Wavelet::Db6 => "db6",
        })
    }
}

impl FromStr for Wavelet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sym10" | "symlet-10" | "symlet10" => Ok(Wavelet::Sym10),
            "db4" | "daubechies-4" => Ok(Wavelet::Db4),
            "db5" | "daubechies-5" => Ok(Wavelet::Db5),
            "db6" | "daubechies-6" => Ok(Wavelet::Db6),
            other => Err(Error::InvalidParameter(format!(
                "unknown wavelet {other:?}; supported: sym10, db4, db5, db6"
            ))),
        }
    }
}

/// The four filters of the orthogonal two-channel bank derived from the
/// scaling filter h: dec_lo = reverse(h), dec_hi[k] = (-1)^k h[k],
/// rec_lo = h, rec_hi = reverse(dec_hi).
struct FilterBank {
    dec_lo: Vec<f64>,
    dec_hi: Vec<f64>,
    rec_lo: Vec<f64>,
    rec_hi: Vec<f64>,
}

impl FilterBank {
    fn new(wavelet: Wavelet) -> Self {
        let h = wavelet.scaling_filter();
        let len = h.len();
        let dec_lo: Vec<f64> = h.iter().rev().copied().collect();
        let dec_hi: Vec<f64> = (0..len)
            .map(|k| if k % 2 == 0 { h[k] } else { -h[k] })
            .collect();
        let rec_hi: Vec<f64> = dec_hi.iter().rev().copied().collect();
        Self {
            dec_lo,
            dec_hi,
            rec_lo: h.to_vec(),
            rec_hi,
        }
    }
}

/// Half-sample symmetric extension lookup: index into `x` padded by
/// `flen - 1` on each side.
fn sym_ext(x: &[f64], idx: isize) -> f64 {
    let n = x.len() as isize;
    let mut i = idx;
    // Fold until inside [0, n): period of the reflected extension is 2n.
    loop {
        if i < 0 {
            i = -i - 1;
        } else if i >= n {
            i = 2 * n - 1 - i;
        } else {
            return x[i as usize];
        }
    }
}

/// One analysis level: symmetric extension, convolution, downsampling by
/// two. Output length is `(n + flen - 1) / 2` per band.
fn dwt_step(x: &[f64], bank: &FilterBank) -> (Vec<f64>, Vec<f64>) {
    let n = x.len() as isize;
    let flen = bank.dec_lo.len() as isize;
    let out_len = ((n + flen - 1) / 2) as usize;
    let mut approx = Vec::with_capacity(out_len);
    let mut detail = Vec::with_capacity(out_len);
    for j in 0..out_len as isize {
        // Convolution sample at position 2j+1 of the valid convolution of
        // the (flen-1)-padded extension.
        let base = 2 * j + 1 - (flen - 1);
        let mut lo = 0.0;
        let mut hi = 0.0;
        for k in 0..flen {
            let v = sym_ext(x, base + (flen - 1) - k);
            lo += bank.dec_lo[k as usize] * v;
            hi += bank.dec_hi[k as usize] * v;
        }
        approx.push(lo);
        detail.push(hi);
    }
    (approx, detail)
}

/// One synthesis level: upsampling convolution over the fully-overlapping
/// range, producing `2*c - flen + 2` samples, trimmed to `out_len`.
fn idwt_step(approx: &[f64], detail: &[f64], bank: &FilterBank, out_len: usize) -> Vec<f64> {
    let c = approx.len();
    let flen = bank.rec_lo.len();
    let half = flen / 2;
    let rec_len = 2 * c + 2 - flen;
    let mut out = vec![0.0; rec_len];
    for i in (half - 1)..c {
        let o = 2 * (i - (half - 1));
        let mut even = 0.0;
        let mut odd = 0.0;
        for j in 0..half {
            let idx = i - j;
            even += bank.rec_lo[2 * j] * approx[idx] + bank.rec_hi[2 * j] * detail[idx];
            odd += bank.rec_lo[2 * j + 1] * approx[idx] + bank.rec_hi[2 * j + 1] * detail[idx];
        }
        out[o] = even;
        if o + 1 < rec_len {
            out[o + 1] = odd;
        }
    }
    out.truncate(out_len);
    out
}

/// A multi-level DWT: approximation at the deepest level plus detail bands
/// for every level (finest first).
#[derive(Debug, Clone)]
pub struct WaveletDecomposition {
    pub wavelet: Wavelet,
    pub level: usize,
    pub approx: Vec<f64>,
    /// `details[0]` is level 1 (finest), `details[level-1]` the coarsest.
    pub details: Vec<Vec<f64>>,
    /// Input length at each level, for exact reconstruction bookkeeping.
    level_lengths: Vec<usize>,
}

impl WaveletDecomposition {
    /// Decompose `x` down to `level`.
    pub fn analyze(x: &[f64], wavelet: Wavelet, level: usize) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidParameter("wavelet level must be >= 1".into()));
        }
        let bank = FilterBank::new(wavelet);
        let mut current = x.to_vec();
        let mut details = Vec::with_capacity(level);
        let mut level_lengths = Vec::with_capacity(level);
        for _ in 0..level {
            if current.len() < wavelet.filter_len() {
                return Err(Error::LevelInfeasible {
                    level,
                    len: x.len(),
                });
            }
            level_lengths.push(current.len());
            let (a, d) = dwt_step(&current, &bank);
            details.push(d);
            current = a;
        }
        Ok(Self {
            wavelet,
            level,
            approx: current,
            details,
            level_lengths,
        })
    }

    /// Invert the decomposition back to the original length.
    pub fn reconstruct(&self) -> Vec<f64> {
        let bank = FilterBank::new(self.wavelet);
        let mut current = self.approx.clone();
        for lvl in (0..self.level).rev() {
            current = idwt_step(&current, &self.details[lvl], &bank, self.level_lengths[lvl]);
        }
        current
    }
}

/// Continuous piecewise shrinkage: zero below `t1`, identity above `t2`,
/// linear in between.
pub fn semi_soft_threshold(x: f64, t1: f64, t2: f64) -> Result<f64> {
    if t1 < 0.0 || t1 > t2 {
        return Err(Error::InvalidParameter(format!(
            "semi-soft thresholds need 0 <= t1 <= t2, got ({t1}, {t2})"
        )));
    }
    let ax = x.abs();
    Ok(if ax <= t1 {
        0.0
    } else if ax > t2 {
        x
    } else {
        x.signum() * t2 * (ax - t1) / (t2 - t1)
    })
}

/// Wavelet baseline removal: decompose to
/// `level = floor(log2(fs / (2 * cutoff_hz)))`, zero the deepest
/// approximation (the sub-cutoff band), optionally semi-soft-threshold the
/// two coarsest detail bands, reconstruct.
pub fn wavelet_denoise(s: &Signal, config: &MethodConfig) -> Result<Signal> {
    let level = match config.wavelet_level {
        Some(l) => l,
        None => {
            let l = (s.fs() / (2.0 * config.cutoff_hz)).log2().floor();
            if l < 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "auto level underflow: fs {} Hz with cutoff {} Hz",
                    s.fs(),
                    config.cutoff_hz
                )));
            }
            l as usize
        }
    };
    let mut dec = WaveletDecomposition::analyze(s.samples(), config.wavelet_name, level)?;
    for v in &mut dec.approx {
        *v = 0.0;
    }
    if config.threshold_t2 > 0.0 {
        for lvl in dec.details.len().saturating_sub(2)..dec.details.len() {
            for v in &mut dec.details[lvl] {
                *v = semi_soft_threshold(*v, config.threshold_t1, config.threshold_t2)?;
            }
        }
    }
    Signal::new(dec.reconstruct(), s.fs(), s.label())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn filters_are_orthonormal() {
        for w in [Wavelet::Sym10, Wavelet::Db4, Wavelet::Db5, Wavelet::Db6] {
            let h = w.scaling_filter();
            let sum: f64 = h.iter().sum();
            let sumsq: f64 = h.iter().map(|v| v * v).sum();
            assert!((sum - 2.0_f64.sqrt()).abs() < 1e-12, "{w}: sum {sum}");
            assert!((sumsq - 1.0).abs() < 1e-12, "{w}: energy {sumsq}");
            // Double-shift orthogonality.
            for s in 1..h.len() / 2 {
                let dot: f64 = (0..h.len() - 2 * s).map(|k| h[k] * h[k + 2 * s]).sum();
                assert!(dot.abs() < 1e-12, "{w}: shift {s} dot {dot}");
            }
        }
    }

    #[test]
    fn perfect_reconstruction_all_wavelets() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for w in [Wavelet::Sym10, Wavelet::Db4, Wavelet::Db5, Wavelet::Db6] {
            for n in [100usize, 255, 1024, 7777] {
                let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let dec = WaveletDecomposition::analyze(&x, w, 3).unwrap();
                let rec = dec.reconstruct();
                assert_eq!(rec.len(), n);
                let err: f64 = x.iter().zip(&rec).map(|(a, b)| (a - b) * (a - b)).sum();
                let pow: f64 = x.iter().map(|v| v * v).sum();
                let rel = (err / pow).sqrt();
                assert!(rel <= 1e-10, "{w} n={n}: relative RMS {rel}");
            }
        }
    }

    #[test]
    fn deep_reconstruction_sym10_level8() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 108_000;
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let dec = WaveletDecomposition::analyze(&x, Wavelet::Sym10, 8).unwrap();
        let rec = dec.reconstruct();
        let err: f64 = x.iter().zip(&rec).map(|(a, b)| (a - b) * (a - b)).sum();
        let pow: f64 = x.iter().map(|v| v * v).sum();
        assert!((err / pow).sqrt() <= 1e-8);
    }

    #[test]
    fn auto_level_rule() {
        // floor(log2(360 / (2*0.67))) = floor(log2(268.66)) = 8
        let l = (360.0_f64 / (2.0 * 0.67)).log2().floor() as usize;
        assert_eq!(l, 8);
        // At 250 Hz: floor(log2(186.57)) = 7
        let l = (250.0_f64 / (2.0 * 0.67)).log2().floor() as usize;
        assert_eq!(l, 7);
    }

    #[test]
    fn infeasible_level_is_rejected() {
        let x = vec![0.0; 40];
        assert!(matches!(
            WaveletDecomposition::analyze(&x, Wavelet::Sym10, 6),
            Err(Error::LevelInfeasible { .. })
        ));
    }

    #[test]
    fn semi_soft_threshold_map() {
        assert_eq!(semi_soft_threshold(0.5, 1.0, 2.0).unwrap(), 0.0);
        assert_eq!(semi_soft_threshold(3.0, 1.0, 2.0).unwrap(), 3.0);
        let mid = semi_soft_threshold(1.5, 1.0, 2.0).unwrap();
        assert!((mid - 1.0).abs() < 1e-15);
        assert!(semi_soft_threshold(1.0, 2.0, 1.0).is_err());
    }

    #[test]
    fn semi_soft_threshold_is_odd_and_continuous() {
        let (t1, t2) = (0.8, 1.7);
        for i in 0..200 {
            let x = -3.0 + i as f64 * 0.03;
            let f = semi_soft_threshold(x, t1, t2).unwrap();
            let g = semi_soft_threshold(-x, t1, t2).unwrap();
            assert!((f + g).abs() < 1e-12, "odd symmetry at {x}");
        }
        for knee in [t1, t2] {
            let eps = 1e-9;
            let below = semi_soft_threshold(knee - eps, t1, t2).unwrap();
            let above = semi_soft_threshold(knee + eps, t1, t2).unwrap();
            assert!((below - above).abs() < 1e-6, "jump at {knee}");
        }
    }

    #[test]
    fn zeroing_approximation_removes_slow_sine() {
        let fs = 360.0;
        let n = 36_000;
        let x: Vec<f64> = (0..n)
            .map(|m| (2.0 * std::f64::consts::PI * 0.3 * m as f64 / fs).sin())
            .collect();
        let s = Signal::new(x, fs, "slow").unwrap();
        let out = wavelet_denoise(&s, &MethodConfig::default()).unwrap();
        let rms_in = (s.samples().iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
        let rms_out = (out.samples().iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
        assert!(
            rms_out < 0.1 * rms_in,
            "residual RMS ratio {}",
            rms_out / rms_in
        );
    }
}
