//! Cubic spline interpolation over strictly increasing knots.

use crate::error::{Error, Result};

/// End conditions for the interpolating spline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Zero second derivative at the end knots.
    Natural,
    /// Third-derivative continuity across the second and second-to-last
    /// knots (the MATLAB `spline` convention). Falls back to natural when
    /// fewer than four knots are available.
    NotAKnot,
}

/// Behaviour outside the knot span.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extend {
    /// Hold the nearest knot value.
    Constant,
    /// Continue the first/last segment's cubic polynomial.
    Polynomial,
}

/// An interpolating cubic spline in second-derivative form.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    second: Vec<f64>,
    extend: Extend,
}

/// Solve a tridiagonal system in place (Thomas algorithm).
/// `sub`, `diag`, `sup` are the three bands; `rhs` becomes the solution.
fn solve_tridiagonal(sub: &[f64], diag: &mut [f64], sup: &[f64], rhs: &mut [f64]) {
    let n = diag.len();
    for i in 1..n {
        let w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    rhs[n - 1] /= diag[n - 1];
    for i in (0..n - 1).rev() {
        rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
    }
}

impl CubicSpline {
    pub fn fit(xs: &[f64], ys: &[f64], boundary: Boundary, extend: Extend) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch {
                left: xs.len(),
                right: ys.len(),
            });
        }
        if xs.len() < 2 {
            return Err(Error::InvalidParameter(
                "spline needs at least two knots".into(),
            ));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "spline knots must be strictly increasing".into(),
            ));
        }
        let n = xs.len();
        let second = if n == 2 {
            vec![0.0; 2]
        } else {
            let h: Vec<f64> = xs.windows(2).map(|w| w[1] - w[0]).collect();
            let m = n - 2;
            let mut sub = vec![0.0; m];
            let mut diag = vec![0.0; m];
            let mut sup = vec![0.0; m];
            let mut rhs = vec![0.0; m];
            for i in 0..m {
                sub[i] = h[i];
                diag[i] = 2.0 * (h[i] + h[i + 1]);
                sup[i] = h[i + 1];
                rhs[i] = 6.0 * ((ys[i + 2] - ys[i + 1]) / h[i + 1] - (ys[i + 1] - ys[i]) / h[i]);
            }
            let not_a_knot = boundary == Boundary::NotAKnot && n >= 4;
            if not_a_knot {
                // sigma_0 expressed through sigma_1, sigma_2 via third-derivative
                // continuity at x_1: sigma_0 = (1 + h0/h1) s1 - (h0/h1) s2.
                let r0 = h[0] / h[1];
                diag[0] += h[0] * (1.0 + r0);
                sup[0] -= h[0] * r0;
                // Mirror condition at x_{n-2}.
                let r1 = h[n - 2] / h[n - 3];
                diag[m - 1] += h[n - 2] * (1.0 + r1);
                sub[m - 1] -= h[n - 2] * r1;
            }
            solve_tridiagonal(&sub, &mut diag, &sup, &mut rhs);
            let mut second = vec![0.0; n];
            second[1..n - 1].copy_from_slice(&rhs);
            if not_a_knot {
                let r0 = h[0] / h[1];
                second[0] = (1.0 + r0) * second[1] - r0 * second[2];
                let r1 = h[n - 2] / h[n - 3];
                second[n - 1] = (1.0 + r1) * second[n - 2] - r1 * second[n - 3];
            }
            second
        };
        Ok(Self {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            second,
            extend,
        })
    }

    fn segment_value(&self, i: usize, x: f64) -> f64 {
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = 1.0 - a;
        a * self.ys[i]
            + b * self.ys[i + 1]
            + ((a * a * a - a) * self.second[i] + (b * b * b - b) * self.second[i + 1]) * h * h
                / 6.0
    }

    pub fn evaluate(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x < self.xs[0] {
            return match self.extend {
                Extend::Constant => self.ys[0],
                Extend::Polynomial => self.segment_value(0, x),
            };
        }
        if x > self.xs[n - 1] {
            return match self.extend {
                Extend::Constant => self.ys[n - 1],
                Extend::Polynomial => self.segment_value(n - 2, x),
            };
        }
        // Binary search for the segment containing x.
        let i = match self.xs.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(i) => i - 1,
        };
        self.segment_value(i, x)
    }

    /// Evaluate at integer grid points `0..len`, walking segments linearly.
    pub fn evaluate_grid(&self, len: usize) -> Vec<f64> {
        let n = self.xs.len();
        let mut out = Vec::with_capacity(len);
        let mut seg = 0usize;
        for m in 0..len {
            let x = m as f64;
            if x < self.xs[0] {
                out.push(match self.extend {
                    Extend::Constant => self.ys[0],
                    Extend::Polynomial => self.segment_value(0, x),
                });
                continue;
            }
            if x > self.xs[n - 1] {
                out.push(match self.extend {
                    Extend::Constant => self.ys[n - 1],
                    Extend::Polynomial => self.segment_value(n - 2, x),
                });
                continue;
            }
            while seg < n - 2 && x > self.xs[seg + 1] {
                seg += 1;
            }
            out.push(self.segment_value(seg, x));
        }
        out
    }
}
