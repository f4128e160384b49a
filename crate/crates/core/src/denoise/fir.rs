//! FIR high-pass method.

use crate::dsp::fir::{convolve_same, design_fir_highpass};
use crate::error::Result;
use crate::signal::Signal;

use super::MethodConfig;

/// High-pass the signal with a linear-phase Kaiser FIR, group delay
/// compensated so the output stays time-aligned with the input.
pub fn fir_highpass(s: &Signal, config: &MethodConfig) -> Result<Signal> {
    let taps = design_fir_highpass(
        config.cutoff_hz,
        s.fs(),
        config.fir_transition_hz,
        config.fir_stopband_db,
    )?;
    Signal::new(convolve_same(s.samples(), &taps), s.fs(), s.label())
}
