//! The nine baseline-wander removal methods, each behind the uniform
//! contract `denoise(input, config, annotations) -> Signal`, plus the
//! numerical primitives they are built from.

mod emd;
mod fir;
mod ica;
mod iir;
mod lms;
mod maf;
mod spline;
mod wavelet;

pub use emd::{emd_denoise, emd_sift, ImfSet};
pub use fir::fir_highpass;
pub use ica::{fastica, ica_denoise, kurtosis, DelayEmbedding, FastIcaOutcome};
pub use iir::iir_highpass_zero_phase;
pub use lms::lms_cascade;
pub use maf::moving_average;
pub use spline::spline_baseline;
pub use wavelet::{semi_soft_threshold, wavelet_denoise, Wavelet, WaveletDecomposition};

pub use crate::dsp::fir::design_fir_highpass;

mod issm;
pub use issm::{issm_denoise, issm_denoise_detailed, IssmOutcome};

use crate::error::{Error, Result};
use crate::qrs::BeatAnnotations;
use crate::signal::Signal;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// The compared methods, named as in the results tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Interpolation using cubic splines through PR-segment knots.
    Splines,
    /// FIR high-pass filter.
    Fir,
    /// Bi-directional (zero-phase) IIR high-pass filter.
    Iir,
    /// Two-stage cascade LMS adaptive filter.
    Af,
    /// Moving-average filter.
    Maf,
    /// Independent component analysis over a delay embedding.
    Ica,
    /// Successive subtraction of per-RR-interval medians.
    Issm,
    /// Empirical mode decomposition.
    Emd,
    /// Wavelet transform filter.
    Wt,
    /// Debug pass-through; measures the raw contamination.
    Identity,
}

/// The nine methods of the comparison, in table order.
pub const METHODS: [Method; 9] = [
    Method::Splines,
    Method::Fir,
    Method::Iir,
    Method::Af,
    Method::Maf,
    Method::Ica,
    Method::Issm,
    Method::Emd,
    Method::Wt,
];

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Splines => "splines",
            Method::Fir => "fir",
            Method::Iir => "iir",
            Method::Af => "af",
            Method::Maf => "maf",
            Method::Ica => "ica",
            Method::Issm => "issm",
            Method::Emd => "emd",
            Method::Wt => "wt",
            Method::Identity => "identity",
        }
    }

    /// True when the method consumes beat annotations.
    pub fn needs_annotations(&self) -> bool {
        matches!(self, Method::Splines | Method::Af | Method::Issm)
    }

    fn valid_names() -> String {
        METHODS
            .iter()
            .map(|m| m.name())
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "splines" => Ok(Method::Splines),
            "fir" => Ok(Method::Fir),
            "iir" => Ok(Method::Iir),
            "af" => Ok(Method::Af),
            "maf" => Ok(Method::Maf),
            "ica" => Ok(Method::Ica),
            "issm" => Ok(Method::Issm),
            "emd" => Ok(Method::Emd),
            "wt" => Ok(Method::Wt),
            "identity" => Ok(Method::Identity),
            other => Err(Error::UnknownMethod {
                name: other.to_string(),
                valid: Method::valid_names(),
            }),
        }
    }
}

/// Per-method parameters. Every under-specified knob is explicit here so a
/// run is fully described by its serialized configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MethodConfig {
    /// High-pass cutoff shared by the filtering methods, Hz.
    pub cutoff_hz: f64,
    /// FIR transition band width, Hz (centred on the cutoff).
    pub fir_transition_hz: f64,
    /// FIR stopband attenuation, dB.
    pub fir_stopband_db: f64,
    /// Butterworth order for the zero-phase IIR method.
    pub iir_order: usize,
    /// Knot placement: seconds before each R peak.
    pub spline_pr_offset_s: f64,
    /// Step size of the first (drift-tracking) LMS stage.
    pub lms_mu1: f64,
    /// Step size of the impulse-correlated second stage.
    pub lms_mu2: f64,
    /// Beat window length in seconds; `None` = 0.8x the minimum RR.
    pub lms_beat_window_s: Option<f64>,
    /// Crossfade the per-beat windows into the residual instead of hard
    /// concatenation. Off by default to preserve the documented artifact.
    pub lms_smooth_joins: bool,
    /// Moving-average window in seconds; `None` = fs/cutoff samples.
    pub maf_window_s: Option<f64>,
    /// Rows of the ICA delay embedding.
    pub ica_channels: usize,
    /// Per-row delay increment, samples.
    pub ica_delay_samples: usize,
    /// Seed for the FastICA weight initialization.
    pub ica_seed: u64,
    pub ica_max_iter: usize,
    pub ica_tol: f64,
    /// Tolerance band for the BLW classifier: components with excess
    /// kurtosis below `-ica_kurtosis_band` are zeroed.
    pub ica_kurtosis_band: f64,
    /// Convergence bound on the per-segment medians, a.u.
    pub issm_threshold: f64,
    pub issm_max_iter: usize,
    pub emd_max_imfs: usize,
    /// Cauchy-type sifting stop criterion.
    pub emd_sift_tol: f64,
    /// IMFs whose dominant frequency is below this join the BLW estimate, Hz.
    pub emd_blw_freq_hz: f64,
    pub wavelet_name: Wavelet,
    /// Decomposition depth; `None` = floor(log2(fs / (2 * cutoff_hz))).
    pub wavelet_level: Option<usize>,
    /// Semi-soft threshold knee points for the two coarsest detail bands;
    /// both zero disables thresholding.
    pub threshold_t1: f64,
    pub threshold_t2: f64,
}

impl Default for MethodConfig {
    fn default() -> Self {
        Self {
            cutoff_hz: 0.67,
            fir_transition_hz: 0.5,
            fir_stopband_db: 40.0,
            iir_order: 4,
            spline_pr_offset_s: 0.066,
            lms_mu1: 0.002,
            lms_mu2: 0.01,
            lms_beat_window_s: None,
            lms_smooth_joins: false,
            maf_window_s: None,
            ica_channels: 60,
            ica_delay_samples: 15,
            ica_seed: 42,
            ica_max_iter: 200,
            ica_tol: 1e-4,
            ica_kurtosis_band: 0.1,
            issm_threshold: 1e-3,
            issm_max_iter: 100,
            emd_max_imfs: 12,
            emd_sift_tol: 0.05,
            emd_blw_freq_hz: 1.0,
            wavelet_name: Wavelet::Sym10,
            wavelet_level: None,
            threshold_t1: 0.0,
            threshold_t2: 0.0,
        }
    }
}

impl MethodConfig {
    /// Serialize to the flat `key = value` text format.
    pub fn to_kv_text(&self) -> String {
        let opt = |v: &Option<f64>| v.map_or("auto".to_string(), |x| x.to_string());
        let lvl = self
            .wavelet_level
            .map_or("auto".to_string(), |x| x.to_string());
        format!(
            "cutoff_hz = {}\n\
             fir_transition_hz = {}\n\
             fir_stopband_db = {}\n\
             iir_order = {}\n\
             spline_pr_offset_s = {}\n\
             lms_mu1 = {}\n\
             lms_mu2 = {}\n\
             lms_beat_window_s = {}\n\
             lms_smooth_joins = {}\n\
             maf_window_s = {}\n\
             ica_channels = {}\n\
             ica_delay_samples = {}\n\
             ica_seed = {}\n\
             ica_max_iter = {}\n\
             ica_tol = {}\n\
             ica_kurtosis_band = {}\n\
             issm_threshold = {}\n\
             issm_max_iter = {}\n\
             emd_max_imfs = {}\n\
             emd_sift_tol = {}\n\
             emd_blw_freq_hz = {}\n\
             wavelet_name = {}\n\
             wavelet_level = {}\n\
             threshold_t1 = {}\n\
             threshold_t2 = {}\n",
            self.cutoff_hz,
            self.fir_transition_hz,
            self.fir_stopband_db,
            self.iir_order,
            self.spline_pr_offset_s,
            self.lms_mu1,
            self.lms_mu2,
            opt(&self.lms_beat_window_s),
            self.lms_smooth_joins,
            opt(&self.maf_window_s),
            self.ica_channels,
            self.ica_delay_samples,
            self.ica_seed,
            self.ica_max_iter,
            self.ica_tol,
            self.ica_kurtosis_band,
            self.issm_threshold,
            self.issm_max_iter,
            self.emd_max_imfs,
            self.emd_sift_tol,
            self.emd_blw_freq_hz,
            self.wavelet_name,
            lvl,
            self.threshold_t1,
            self.threshold_t2,
        )
    }

    /// Parse the flat `key = value` format; unknown keys are rejected.
    pub fn from_kv_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                path: "<config>".into(),
                line: lineno + 1,
                message: format!("expected `key = value`, got {line:?}"),
            })?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    /// Set one configuration key from its text form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("invalid value {value:?} for {key}")))
        }
        fn opt_num(key: &str, value: &str) -> Result<Option<f64>> {
            if value.eq_ignore_ascii_case("auto") {
                Ok(None)
            } else {
                num(key, value).map(Some)
            }
        }
        match key {
            "cutoff_hz" => self.cutoff_hz = num(key, value)?,
            "fir_transition_hz" => self.fir_transition_hz = num(key, value)?,
            "fir_stopband_db" => self.fir_stopband_db = num(key, value)?,
            "iir_order" => self.iir_order = num(key, value)?,
            "spline_pr_offset_s" => self.spline_pr_offset_s = num(key, value)?,
            "lms_mu1" => self.lms_mu1 = num(key, value)?,
            "lms_mu2" => self.lms_mu2 = num(key, value)?,
            "lms_beat_window_s" => self.lms_beat_window_s = opt_num(key, value)?,
            "lms_smooth_joins" => self.lms_smooth_joins = num(key, value)?,
            "maf_window_s" => self.maf_window_s = opt_num(key, value)?,
            "ica_channels" => self.ica_channels = num(key, value)?,
            "ica_delay_samples" => self.ica_delay_samples = num(key, value)?,
            "ica_seed" => self.ica_seed = num(key, value)?,
            "ica_max_iter" => self.ica_max_iter = num(key, value)?,
            "ica_tol" => self.ica_tol = num(key, value)?,
            "ica_kurtosis_band" => self.ica_kurtosis_band = num(key, value)?,
            "issm_threshold" => self.issm_threshold = num(key, value)?,
            "issm_max_iter" => self.issm_max_iter = num(key, value)?,
            "emd_max_imfs" => self.emd_max_imfs = num(key, value)?,
            "emd_sift_tol" => self.emd_sift_tol = num(key, value)?,
            "emd_blw_freq_hz" => self.emd_blw_freq_hz = num(key, value)?,
            "wavelet_name" => self.wavelet_name = value.parse()?,
            "wavelet_level" => {
                self.wavelet_level = if value.eq_ignore_ascii_case("auto") {
                    None
                } else {
                    Some(num(key, value)?)
                }
            }
            "threshold_t1" => self.threshold_t1 = num(key, value)?,
            "threshold_t2" => self.threshold_t2 = num(key, value)?,
            other => return Err(Error::UnknownConfigKey(other.to_string())),
        }
        Ok(())
    }
}

/// Run one method under the uniform contract. Methods that need beat
/// annotations (`splines`, `af`, `issm`) receive them through `annotations`;
/// the rest ignore the argument. Length and sampling rate are preserved and
/// the output is guaranteed finite.
pub fn denoise(
    method: Method,
    input: &Signal,
    config: &MethodConfig,
    annotations: Option<&BeatAnnotations>,
) -> Result<Signal> {
    let ann = || {
        annotations.ok_or_else(|| {
            Error::InvalidParameter(format!("method {method} requires beat annotations"))
        })
    };
    let out = match method {
        Method::Splines => spline_baseline(input, config, ann()?)?,
        Method::Fir => fir_highpass(input, config)?,
        Method::Iir => iir_highpass_zero_phase(input, config)?,
        Method::Af => lms_cascade(input, config, ann()?)?,
        Method::Maf => moving_average(input, config)?,
        Method::Ica => ica_denoise(input, config)?,
        Method::Issm => issm_denoise(input, config, ann()?)?,
        Method::Emd => emd_denoise(input, config)?,
        Method::Wt => wavelet_denoise(input, config)?,
        Method::Identity => input.clone(),
    };
    debug_assert_eq!(out.len(), input.len());
    Ok(out.relabeled(format!("{}[{}]", method, input.label())))
}
