//! Cubic-spline interpolation method: estimate the baseline through
//! PR-segment knots and subtract it.

use crate::dsp::spline::{Boundary, CubicSpline, Extend};
use crate::error::{Error, Result};
use crate::qrs::BeatAnnotations;
use crate::signal::Signal;

use super::MethodConfig;

/// Half-width of the knot-value averaging window, seconds.
const KNOT_MEAN_HALFWIDTH_S: f64 = 0.010;

/// Knots sit `spline_pr_offset_s` before each detected R peak, on the PR
/// isoelectric segment; the knot value is the 20 ms local mean around that
/// point. The knot grid is anchored at both record ends with the same
/// local-mean rule (a cubic continued past its last knot diverges within a
/// fraction of an RR interval, so the head and tail must be interpolated,
/// not extrapolated). The natural spline through the knots is the baseline
/// estimate.
pub fn spline_baseline(s: &Signal, config: &MethodConfig, ann: &BeatAnnotations) -> Result<Signal> {
    let fs = s.fs();
    let offset = (config.spline_pr_offset_s * fs).round() as usize;
    let halfw = (KNOT_MEAN_HALFWIDTH_S * fs).round() as usize;
    let x = s.samples();
    let n = x.len();

    let local_mean = |k: usize| {
        let lo = k.saturating_sub(halfw);
        let hi = (k + halfw + 1).min(n);
        x[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
    };

    let mut knots_x = Vec::with_capacity(ann.len() + 2);
    let mut knots_y = Vec::with_capacity(ann.len() + 2);
    for &r in ann.r_peaks() {
        let Some(k) = r.checked_sub(offset) else {
            continue; // PR point of the first beat falls before the record
        };
        if k >= n {
            continue;
        }
        knots_x.push(k as f64);
        knots_y.push(local_mean(k));
    }
    if knots_x.len() < 3 {
        return Err(Error::InsufficientBeats {
            needed: 3,
            got: knots_x.len(),
        });
    }
    if knots_x[0] > 0.0 {
        knots_x.insert(0, 0.0);
        knots_y.insert(0, local_mean(0));
    }
    if *knots_x.last().unwrap() < (n - 1) as f64 {
        knots_x.push((n - 1) as f64);
        knots_y.push(local_mean(n - 1));
    }

    let spline = CubicSpline::fit(&knots_x, &knots_y, Boundary::Natural, Extend::Constant)?;
    let estimate = spline.evaluate_grid(n);
    let out: Vec<f64> = x.iter().zip(&estimate).map(|(v, e)| v - e).collect();
    Signal::new(out, fs, s.label())
}
