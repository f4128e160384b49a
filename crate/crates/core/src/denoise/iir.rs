//! Bi-directional (zero-phase) IIR high-pass method.

use crate::dsp::iir::{butterworth, filtfilt, Band};
use crate::error::Result;
use crate::signal::Signal;

use super::MethodConfig;

/// Butterworth high-pass applied forward then backward: zero net phase,
/// squared magnitude response. The signal is padded with 3x the filter
/// settling length (fs/cutoff samples) of odd reflection before filtering.
pub fn iir_highpass_zero_phase(s: &Signal, config: &MethodConfig) -> Result<Signal> {
    let (b, a) = butterworth(config.iir_order, config.cutoff_hz, s.fs(), Band::HighPass)?;
    let settle = (s.fs() / config.cutoff_hz).ceil() as usize;
    let out = filtfilt(&b, &a, s.samples(), 3 * settle);
    Signal::new(out, s.fs(), s.label())
}
