//! Composite quadrature rules on uniform grids.

use std::ops::{Add, Mul};

/// Composite Simpson rule for samples on a uniform grid with spacing `h`.
///
/// An odd number of intervals is handled by closing the last three intervals
/// with the Simpson 3/8 rule, so the rule stays fourth order.
pub fn simpson<T>(values: &[T], h: f64) -> T
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T> + Default,
{
    let n = values.len();
    assert!(n >= 2, "simpson needs at least two samples");
    let intervals = n - 1;
    if intervals == 1 {
        return (values[0] + values[1]) * (0.5 * h);
    }
    if intervals == 2 {
        return (values[0] + values[1] * 4.0 + values[2]) * (h / 3.0);
    }
    let (even_end, tail) = if intervals.is_multiple_of(2) {
        (n - 1, None)
    } else {
        (n - 4, Some(n - 4))
    };
    let mut total = T::default();
    if even_end > 0 {
        let mut acc = values[0] + values[even_end];
        for (i, v) in values.iter().enumerate().take(even_end).skip(1) {
            acc = acc + *v * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        total = acc * (h / 3.0);
    }
    if let Some(s) = tail {
        let w = values[s] + values[s + 1] * 3.0 + values[s + 2] * 3.0 + values[s + 3];
        total = total + w * (3.0 * h / 8.0);
    }
    total
}

/// Trapezoid rule over one period for samples `f(k h)`, `k = 0..n`, of a
/// periodic function; spectrally accurate for trigonometric polynomials of
/// degree below `n`.
pub fn periodic_trapezoid<T>(values: &[T], h: f64) -> T
where
    T: Copy + Add<Output = T> + Mul<f64, Output = T> + Default,
{
    values.iter().fold(T::default(), |acc, v| acc + *v) * h
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn grid(n: usize, a: f64, b: f64) -> (Vec<f64>, f64) {
        let h = (b - a) / (n - 1) as f64;
        ((0..n).map(|i| a + h * i as f64).collect(), h)
    }

    #[test]
    fn simpson_is_exact_for_cubics() {
        for n in [3, 4, 5, 8, 9, 10] {
            let (x, h) = grid(n, 0.0, 2.0);
            let y: Vec<f64> = x.iter().map(|x| x * x * x - x + 1.0).collect();
            assert_relative_eq!(simpson(&y, h), 4.0 - 2.0 + 2.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn simpson_converges_fourth_order() {
        let err = |n| {
            let (x, h) = grid(n, 0.0, 1.0);
            let y: Vec<f64> = x.iter().map(|x| x.exp()).collect();
            (simpson(&y, h) - (1f64.exp() - 1.0)).abs()
        };
        let ratio = err(33) / err(65);
        assert!(ratio > 14.0 && ratio < 18.0, "ratio {ratio}");
    }

    #[test]
    fn simpson_handles_complex_values() {
        let (x, h) = grid(101, 0.0, 1.0);
        let y: Vec<Complex64> = x.iter().map(|&x| Complex64::new(x, 2.0 * x)).collect();
        let s = simpson(&y, h);
        assert_relative_eq!(s.re, 0.5, epsilon = 1e-14);
        assert_relative_eq!(s.im, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn trapezoid_integrates_trig_polynomials() {
        let n = 16;
        let h = 2.0 * std::f64::consts::PI / n as f64;
        let y: Vec<f64> = (0..n)
            .map(|k| {
                let t = k as f64 * h;
                (3.0 * t).cos().powi(2) + (5.0 * t).sin()
            })
            .collect();
        assert_relative_eq!(periodic_trapezoid(&y, h), std::f64::consts::PI, epsilon = 1e-13);
    }
}
