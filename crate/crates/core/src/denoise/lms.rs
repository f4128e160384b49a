//! Two-stage cascade LMS adaptive filter method.

use crate::error::{Error, Result};
use crate::qrs::BeatAnnotations;
use crate::signal::Signal;

use super::MethodConfig;

/// Stage 1: single-weight adaptive canceller with a constant reference
/// input of 1 (`w <- w + 2*mu1*e`, output `e = x - w`), which tracks DC and
/// slow drift. Stage 2: impulse-correlated adaptive filter with one weight
/// per within-beat sample index, windows anchored at each R peak; inside a
/// window the output is the learned beat template, outside it the stage-1
/// residual passes through. Windows are concatenated back in place without
/// smoothing unless `lms_smooth_joins` is set.
pub fn lms_cascade(s: &Signal, config: &MethodConfig, ann: &BeatAnnotations) -> Result<Signal> {
    if ann.is_empty() {
        return Err(Error::NoPeaksDetected);
    }
    let fs = s.fs();
    let n = s.len();

    // Stage 1: adaptive drift tracker.
    let mut w = 0.0;
    let stage1: Vec<f64> = s
        .samples()
        .iter()
        .map(|&x| {
            let e = x - w;
            w += 2.0 * config.lms_mu1 * e;
            e
        })
        .collect();

    // Stage 2: impulse-correlated filter.
    let min_rr = ann.min_rr_samples().unwrap_or(n);
    let window = match config.lms_beat_window_s {
        Some(sec) => {
            let w = (sec * fs).round() as usize;
            if w > min_rr {
                return Err(Error::BeatWindowTooLong { window: w, min_rr });
            }
            w
        }
        None => ((0.8 * min_rr as f64) as usize).max(1),
    };

    let mut out = stage1.clone();
    let mut template = vec![0.0; window];
    for &r in ann.r_peaks() {
        for (j, t) in template.iter_mut().enumerate() {
            let idx = r + j;
            if idx >= n {
                break;
            }
            let y = *t;
            let e = stage1[idx] - y;
            *t += 2.0 * config.lms_mu2 * e;
            out[idx] = y;
        }
    }

    if config.lms_smooth_joins {
        // Short linear crossfade between the residual and the template at
        // both window edges.
        let fade = ((0.01 * fs).round() as usize).min(window / 2).max(1);
        for &r in ann.r_peaks() {
            for j in 0..fade {
                let alpha = (j + 1) as f64 / (fade + 1) as f64;
                if let Some(v) = out.get_mut(r + j) {
                    *v = alpha * *v + (1.0 - alpha) * stage1[r + j];
                }
                let tail = r + window - 1 - j;
                if tail < n {
                    out[tail] = alpha * out[tail] + (1.0 - alpha) * stage1[tail];
                }
            }
        }
    }

    Signal::new(out, fs, s.label())
}
