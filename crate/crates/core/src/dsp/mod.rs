//! Shared numerical primitives: FIR design, IIR design and zero-phase
//! application, cubic splines, and rational resampling.

pub mod fir;
pub mod iir;
pub mod resample;
pub mod spline;

/// Odd (point-symmetric) reflection of `x` about its end samples, the
/// convention used for every padded convolution in this crate. Indices may
/// range over `-(len-1) ..= 2*(len-1)`; anything further is clamped to the
/// reflected range.
pub(crate) fn reflect_odd(x: &[f64], idx: isize) -> f64 {
    let n = x.len() as isize;
    if idx >= 0 && idx < n {
        x[idx as usize]
    } else if idx < 0 {
        let k = (-idx).min(n - 1) as usize;
        2.0 * x[0] - x[k]
    } else {
        let k = (idx - (n - 1)).min(n - 1) as usize;
        2.0 * x[(n - 1) as usize] - x[(n - 1) as usize - k]
    }
}

#[cfg(test)]
mod tests {
    use super::reflect_odd;

    #[test]
    fn odd_reflection_is_point_symmetric() {
        let x = [1.0, 2.0, 4.0, 8.0];
        assert_eq!(reflect_odd(&x, 0), 1.0);
        assert_eq!(reflect_odd(&x, 3), 8.0);
        // 2*x[0] - x[1]
        assert_eq!(reflect_odd(&x, -1), 0.0);
        // 2*x[3] - x[2]
        assert_eq!(reflect_odd(&x, 4), 12.0);
        assert_eq!(reflect_odd(&x, 5), 14.0);
    }
}
