//! Uniform-grid kernels: Gaussian source, fourth-order differences, composite Simpson.

use crate::error::{Error, Result};

/// Normal density `N(v; lc, sc)`.
#[inline]
pub fn gaussian_delta(v: f64, lc: f64, sc: f64) -> f64 {
    let z = (v - lc) / sc;
    (-0.5 * z * z).exp() / (sc * (2.0 * std::f64::consts::PI).sqrt())
}

/// Quadrature weights over `[0, n h]` for samples at `0, h, …, n h`.
///
/// Even `n` uses composite Simpson. Odd `n` uses Simpson on the first `n − 3`
/// intervals and the 3/8 rule on the last three.
pub fn simpson_weights(n: usize, h: f64) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::Size(format!("Simpson needs at least 2 intervals, got {n}")));
    }
    let mut w = vec![0.0; n + 1];
    let simpson_end = if n % 2 == 0 { n } else { n - 3 };
    if simpson_end > 0 {
        let c = h / 3.0;
        w[0] += c;
        w[simpson_end] += c;
        for (i, wi) in w.iter_mut().enumerate().take(simpson_end).skip(1) {
            *wi += if i % 2 == 1 { 4.0 * c } else { 2.0 * c };
        }
    }
    if simpson_end < n {
        let c = 3.0 * h / 8.0;
        let s = simpson_end;
        w[s] += c;
        w[s + 1] += 3.0 * c;
        w[s + 2] += 3.0 * c;
        w[s + 3] += c;
    }
    Ok(w)
}

/// `∫_0^{upto·h}` of the sampled function.
pub fn simpson_integral(values: &[f64], h: f64, upto: usize) -> Result<f64> {
    if upto >= values.len() {
        return Err(Error::Size(format!(
            "upper node {upto} beyond {} samples",
            values.len()
        )));
    }
    let w = simpson_weights(upto, h)?;
    Ok(w.iter().zip(values).map(|(a, b)| a * b).sum())
}

/// Writes `∂f/∂v` at nodes `1..=N` into `out[1..]`; `out[0]` is set to zero.
pub fn fd4_into(values: &[f64], h: f64, out: &mut [f64]) -> Result<()> {
    let n = values.len().saturating_sub(1);
    if n < 4 {
        return Err(Error::Size(format!("fourth-order stencils need N >= 4, got {n}")));
    }
    debug_assert_eq!(out.len(), values.len());
    let y = values;
    let c = 1.0 / (12.0 * h);
    out[0] = 0.0;
    out[1] = (y[4] - 6.0 * y[3] + 18.0 * y[2] - 10.0 * y[1] - 3.0 * y[0]) * c;
    for k in 2..=n - 2 {
        out[k] = (-y[k + 2] + 8.0 * y[k + 1] - 8.0 * y[k - 1] + y[k - 2]) * c;
    }
    out[n - 1] = (3.0 * y[n] + 10.0 * y[n - 1] - 18.0 * y[n - 2] + 6.0 * y[n - 3] - y[n - 4]) * c;
    out[n] = (25.0 * y[n] - 48.0 * y[n - 1] + 36.0 * y[n - 2] - 16.0 * y[n - 3] + 3.0 * y[n - 4]) * c;
    Ok(())
}

/// Fourth-order derivative at nodes `1..=N` (length `N`).
pub fn fd4_derivative(values: &[f64], h: f64) -> Result<Vec<f64>> {
    let mut out = vec![0.0; values.len()];
    fd4_into(values, h, &mut out)?;
    out.remove(0);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(n: usize, h: f64, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..=n).map(|k| f(k as f64 * h)).collect()
    }

    #[test]
    fn gaussian_peak() {
        let sc = 0.3;
        let peak = gaussian_delta(2.0, 2.0, sc);
        assert!((peak - 1.0 / (sc * (2.0 * std::f64::consts::PI).sqrt())).abs() < 1e-15);
    }

    #[test]
    fn resolved_gaussian_has_unit_mass() {
        let (lc, sc) = (1.0f64, 0.02f64);
        let h = sc / 4.0;
        let n = (2.0 / h).round() as usize;
        let v = sample(n, h, |x| gaussian_delta(x, lc, sc));
        assert!((simpson_integral(&v, h, n).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn simpson_exact_for_cubics() {
        let h = 0.1;
        let v = sample(10, h, |x| x * x * x);
        assert!((simpson_integral(&v, h, 10).unwrap() - 0.25).abs() < 1e-15);
        let v = sample(9, 1.0 / 9.0, |x| x * x * x);
        assert!((simpson_integral(&v, 1.0 / 9.0, 9).unwrap() - 0.25).abs() < 1e-15);
        let v = sample(3, 1.0 / 3.0, |x| x * x * x);
        assert!((simpson_integral(&v, 1.0 / 3.0, 3).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn simpson_size_errors() {
        assert!(simpson_weights(1, 0.1).is_err());
        assert!(simpson_integral(&[0.0, 1.0, 2.0], 1.0, 3).is_err());
    }

    #[test]
    fn odd_and_even_paths_agree() {
        let exact = 1f64.exp() - 1.0;
        let n_even = 400;
        let n_odd = 401;
        let e = simpson_integral(&sample(n_even, 1.0 / n_even as f64, f64::exp), 1.0 / n_even as f64, n_even).unwrap();
        let o = simpson_integral(&sample(n_odd, 1.0 / n_odd as f64, f64::exp), 1.0 / n_odd as f64, n_odd).unwrap();
        assert!((e - o).abs() < 1e-10);
        assert!((e - exact).abs() < 1e-10);
    }

    #[test]
    fn fd4_constant_and_quartic() {
        let d = fd4_derivative(&[2.5; 9], 0.3).unwrap();
        assert_eq!(d.len(), 8);
        assert!(d.iter().all(|x| x.abs() < 1e-13));
        let h = 0.25;
        let v = sample(12, h, |x| x.powi(4));
        let d = fd4_derivative(&v, h).unwrap();
        for (k, dk) in d.iter().enumerate() {
            let x = (k + 1) as f64 * h;
            assert!((dk - 4.0 * x.powi(3)).abs() < 1e-11, "node {}: {dk}", k + 1);
        }
        assert!(fd4_derivative(&[0.0; 4], 1.0).is_err());
    }

    #[test]
    fn fd4_order_on_sine() {
        let err = |n: usize| {
            let h = 2.0 / n as f64;
            let d = fd4_derivative(&sample(n, h, f64::sin), h).unwrap();
            d.iter()
                .enumerate()
                .map(|(k, dk)| (dk - ((k + 1) as f64 * h).cos()).abs())
                .fold(0.0, f64::max)
        };
        let order = (err(40) / err(80)).log2();
        assert!(order > 3.7, "order {order}");
    }
}
