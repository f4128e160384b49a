//! Butterworth IIR design (bilinear transform) and zero-phase application.

use super::reflect_odd;
use crate::error::{Error, Result};
use std::f64::consts::PI;

type C = (f64, f64);

fn cmul(a: C, b: C) -> C {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn cdiv(a: C, b: C) -> C {
    let d = b.0 * b.0 + b.1 * b.1;
    ((a.0 * b.0 + a.1 * b.1) / d, (a.1 * b.0 - a.0 * b.1) / d)
}

/// Expand a monic polynomial from its roots; returns real coefficients in
/// descending powers.
fn poly_from_roots(roots: &[C]) -> Vec<f64> {
    let mut coeffs: Vec<C> = vec![(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![(0.0, 0.0); coeffs.len() + 1];
        for (i, &c) in coeffs.iter().enumerate() {
            next[i].0 += c.0;
            next[i].1 += c.1;
            let m = cmul(c, r);
            next[i + 1].0 -= m.0;
            next[i + 1].1 -= m.1;
        }
        coeffs = next;
    }
    coeffs.iter().map(|c| c.0).collect()
}

/// Normalized-prototype Butterworth poles (left half plane, unit cutoff).
fn butter_prototype(order: usize) -> Vec<C> {
    (0..order)
        .map(|k| {
            let theta = PI * (2 * k + 1 + order) as f64 / (2 * order) as f64;
            (theta.cos(), theta.sin())
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Band {
    HighPass,
    LowPass,
}

/// Butterworth digital filter via the bilinear transform with frequency
/// pre-warping. Returns `(b, a)` with `a[0] == 1`.
pub fn butterworth(
    order: usize,
    cutoff_hz: f64,
    fs: f64,
    band: Band,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if order == 0 {
        return Err(Error::DesignInfeasible("IIR order must be >= 1".into()));
    }
    if !(cutoff_hz > 0.0 && cutoff_hz < fs / 2.0) {
        return Err(Error::DesignInfeasible(format!(
            "cutoff {cutoff_hz} Hz outside (0, {})",
            fs / 2.0
        )));
    }
    let warped = 2.0 * fs * (PI * cutoff_hz / fs).tan();
    let proto = butter_prototype(order);

    // Analog transform of the unit prototype.
    let (zeros_a, poles_a, gain_a): (Vec<C>, Vec<C>, f64) = match band {
        Band::HighPass => {
            // s -> warped / s: poles warped/p, n zeros at s = 0,
            // gain = 1 / prod(-p) = 1 for Butterworth.
            let poles = proto
                .iter()
                .map(|&p| cdiv((warped, 0.0), p))
                .collect::<Vec<_>>();
            (vec![(0.0, 0.0); order], poles, 1.0)
        }
        Band::LowPass => {
            // s -> s / warped: poles warped * p, gain = warped^order.
            let poles = proto
                .iter()
                .map(|&p| (p.0 * warped, p.1 * warped))
                .collect::<Vec<_>>();
            (Vec::new(), poles, warped.powi(order as i32))
        }
    };

    // Bilinear transform z = (2fs + s) / (2fs - s).
    let fs2 = 2.0 * fs;
    let map = |s: C| cdiv((fs2 + s.0, s.1), (fs2 - s.0, -s.1));
    let mut zeros_z: Vec<C> = zeros_a.iter().map(|&z| map(z)).collect();
    let poles_z: Vec<C> = poles_a.iter().map(|&p| map(p)).collect();
    // Analog zeros at infinity land at z = -1.
    while zeros_z.len() < poles_z.len() {
        zeros_z.push((-1.0, 0.0));
    }
    let mut num = (1.0, 0.0);
    for z in &zeros_a {
        num = cmul(num, (fs2 - z.0, -z.1));
    }
    let mut den = (1.0, 0.0);
    for p in &poles_a {
        den = cmul(den, (fs2 - p.0, -p.1));
    }
    let gain_z = gain_a * cdiv(num, den).0;

    let b: Vec<f64> = poly_from_roots(&zeros_z)
        .into_iter()
        .map(|c| c * gain_z)
        .collect();
    let a = poly_from_roots(&poles_z);

    if b.iter().chain(&a).any(|c| !c.is_finite()) {
        return Err(Error::UnstableFilter);
    }
    // Stability: every pole strictly inside the unit circle.
    if poles_z.iter().any(|p| p.0 * p.0 + p.1 * p.1 >= 1.0) {
        return Err(Error::UnstableFilter);
    }
    Ok((b, a))
}

/// Direct-form II transposed single-pass filter. `a[0]` must be 1.
pub fn lfilter(b: &[f64], a: &[f64], x: &[f64]) -> Vec<f64> {
    let order = a.len().max(b.len());
    let mut bb = b.to_vec();
    let mut aa = a.to_vec();
    bb.resize(order, 0.0);
    aa.resize(order, 0.0);
    let mut state = vec![0.0; order.saturating_sub(1)];
    let mut y = Vec::with_capacity(x.len());
    for &xi in x {
        let yi = bb[0] * xi + state.first().copied().unwrap_or(0.0);
        for i in 0..state.len() {
            let next = state.get(i + 1).copied().unwrap_or(0.0);
            state[i] = bb[i + 1] * xi + next - aa[i + 1] * yi;
        }
        y.push(yi);
    }
    y
}

/// Forward-backward filtering: zero net phase, magnitude response squared.
/// The input is extended by `pad` samples of odd reflection on each side
/// before filtering and trimmed afterwards.
pub fn filtfilt(b: &[f64], a: &[f64], x: &[f64], pad: usize) -> Vec<f64> {
    let n = x.len();
    let pad = pad.min(n.saturating_sub(1) * 2);
    let mut ext = Vec::with_capacity(n + 2 * pad);
    for i in 0..(n + 2 * pad) {
        ext.push(reflect_odd(x, i as isize - pad as isize));
    }
    let mut y = lfilter(b, a, &ext);
    y.reverse();
    let mut y = lfilter(b, a, &y);
    y.reverse();
    y[pad..pad + n].to_vec()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(got: &[f64], want: &[f64], tol: f64) {
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() <= tol * w.abs().max(1.0), "got {g}, want {w}");
        }
    }

    // Reference coefficients from scipy.signal.butter(4, 0.67, 'highpass', fs=360).
    #[test]
    fn matches_reference_highpass_design_at_360hz() {
        let (b, a) = butterworth(4, 0.67, 360.0, Band::HighPass).unwrap();
        assert_close(
            &b,
            &[
                0.984837461477275,
                -3.9393498459091,
                5.909024768863651,
                -3.9393498459091,
                0.984837461477275,
            ],
            1e-9,
        );
        assert_close(
            &a,
            &[
                1.0,
                -3.969442958150963,
                5.908794875497151,
                -3.9092567244592877,
                0.9699048255290038,
            ],
            1e-9,
        );
    }

    // scipy.signal.butter(4, 0.67, 'highpass', fs=250).
    #[test]
    fn matches_reference_highpass_design_at_250hz() {
        let (b, a) = butterworth(4, 0.67, 250.0, Band::HighPass).unwrap();
        assert_close(
            &b,
            &[
                0.9782388307882772,
                -3.912955323153109,
                5.869432984729663,
                -3.912955323153109,
                0.9782388307882772,
            ],
            1e-9,
        );
        assert_close(
            &a,
            &[
                1.0,
                -3.9559979903331293,
                5.868959475573356,
                -3.8699126166439353,
                0.9569512100620158,
            ],
            1e-9,
        );
    }

    // scipy.signal.butter(2, 0.67, 'highpass', fs=360).
    #[test]
    fn matches_reference_order_two_design() {
        let (b, a) = butterworth(2, 0.67, 360.0, Band::HighPass).unwrap();
        assert_close(
            &b,
            &[0.991765392283382, -1.983530784566764, 0.991765392283382],
            1e-9,
        );
        assert_close(&a, &[1.0, -1.983462974652971, 0.9835985944805564], 1e-9);
    }

    #[test]
    fn lowpass_design_has_unit_dc_gain() {
        // The polynomial expansion cancels catastrophically at such a low
        // cutoff, so the DC gain is only accurate to ~1e-7.
        let (b, a) = butterworth(4, 0.67, 360.0, Band::LowPass).unwrap();
        let gain: f64 = b.iter().sum::<f64>() / a.iter().sum::<f64>();
        assert!((gain - 1.0).abs() < 1e-6, "DC gain {gain}");
    }

    #[test]
    fn rejects_invalid_specs() {
        assert!(butterworth(0, 0.67, 360.0, Band::HighPass).is_err());
        assert!(butterworth(4, 200.0, 360.0, Band::HighPass).is_err());
        assert!(butterworth(4, 0.0, 360.0, Band::HighPass).is_err());
    }

    #[test]
    fn filtfilt_kills_dc_with_highpass() {
        let (b, a) = butterworth(4, 0.67, 360.0, Band::HighPass).unwrap();
        let x = vec![1.0; 4000];
        let y = filtfilt(&b, &a, &x, 1600);
        let max = y.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        assert!(max <= 1e-3, "max residual {max}");
    }
}
