//! Successive subtraction of per-RR-interval medians.

use crate::error::{Error, Result};
use crate::qrs::BeatAnnotations;
use crate::signal::Signal;

use super::MethodConfig;

/// Result of the ISSM iteration with its convergence diagnostics.
#[derive(Debug, Clone)]
pub struct IssmOutcome {
    pub signal: Signal,
    pub converged: bool,
    pub iterations: usize,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Iteratively subtract each segment's median (segments are the RR
/// intervals plus the head run before the first R peak and the tail after
/// the last) until every |median| falls at or below `issm_threshold` or the
/// iteration cap is reached.
pub fn issm_denoise_detailed(
    s: &Signal,
    config: &MethodConfig,
    ann: &BeatAnnotations,
) -> Result<IssmOutcome> {
    if ann.len() < 2 {
        return Err(Error::InsufficientBeats {
            needed: 2,
            got: ann.len(),
        });
    }
    if config.issm_max_iter == 0 {
        return Err(Error::InvalidParameter("issm_max_iter must be >= 1".into()));
    }
    let n = s.len();
    let mut bounds = vec![0usize];
    bounds.extend(ann.r_peaks().iter().copied().filter(|&r| r < n));
    bounds.push(n);
    bounds.dedup();

    let mut x = s.samples().to_vec();
    let mut converged = false;
    let mut iterations = 0;
    let mut scratch = Vec::new();
    for _ in 0..config.issm_max_iter {
        iterations += 1;
        let mut worst = 0.0_f64;
        let mut medians = Vec::with_capacity(bounds.len() - 1);
        for w in bounds.windows(2) {
            let seg = &x[w[0]..w[1]];
            if seg.is_empty() {
                medians.push(0.0);
                continue;
            }
            scratch.clear();
            scratch.extend_from_slice(seg);
            let med = median(&mut scratch);
            worst = worst.max(med.abs());
            medians.push(med);
        }
        if worst <= config.issm_threshold {
            converged = true;
            break;
        }
        for (w, med) in bounds.windows(2).zip(&medians) {
            for v in &mut x[w[0]..w[1]] {
                *v -= med;
            }
        }
    }
    Ok(IssmOutcome {
        signal: Signal::new(x, s.fs(), s.label())?,
        converged,
        iterations,
    })
}

/// Uniform-contract wrapper: returns the last iterate whether or not the
/// median criterion was met within the iteration cap.
pub fn issm_denoise(s: &Signal, config: &MethodConfig, ann: &BeatAnnotations) -> Result<Signal> {
    issm_denoise_detailed(s, config, ann).map(|o| o.signal)
}
