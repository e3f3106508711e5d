//! Fejér kernel and its temporal analogue.

use std::f64::consts::PI;

/// `sin²(nx/2) / (n sin²(x/2))`, equal to `n` on `2πℤ`.
pub fn fejer_sp(x: f64, n: usize) -> f64 {
    assert!(n >= 1, "n must be at least 1");
    let y = x - 2.0 * PI * (x / (2.0 * PI)).round();
    let s = (0.5 * y).sin();
    if s == 0.0 {
        return n as f64;
    }
    let nf = n as f64;
    (0.5 * nf * y).sin().powi(2) / (nf * s * s)
}

/// `w_sp,k = 1 - |k|/n` for `k = 0..n-1` (the kernel uses `±k`).
pub fn fejer_sp_weights(n: usize) -> Vec<f64> {
    (0..n).map(|k| 1.0 - k as f64 / n as f64).collect()
}

/// `Σ_{|k|<n} w_sp,k cos(kx)`.
pub fn fejer_sp_series(x: f64, n: usize) -> f64 {
    cosine_series(&fejer_sp_weights(n), x)
}

/// `w_te,j = (1/m³) Σ_{i=1}^{m-|j|} i²`, for `j = 0..m-1`.
pub fn fejer_te_weights(m: usize) -> Vec<f64> {
    let m3 = (m as f64).powi(3);
    (0..m)
        .map(|j| {
            let mt = (m - j) as u128;
            let s = mt * (mt + 1) * (2 * mt + 1) / 6;
            s as f64 / m3
        })
        .collect()
}

/// `Σ_{|j|<m} w_te,j cos(jx) = m^{-3} Σ_{i,j=1}^m (i∧j)² cos((i-j)x)`.
pub fn fejer_te(x: f64, m: usize) -> f64 {
    assert!(m >= 1, "m must be at least 1");
    cosine_series(&fejer_te_weights(m), x)
}

/// `w_0 + 2 Σ_{k≥1} w_k cos(kx)`
fn cosine_series(w: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for (k, &wk) in w.iter().enumerate().skip(1).rev() {
        acc += wk * (k as f64 * x).cos();
    }
    w[0] + 2.0 * acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        assert_eq!(fejer_sp(0.0, 7), 7.0);
        assert_eq!(fejer_sp(2.0 * PI, 5), 5.0);
        assert!(fejer_sp(PI, 2).abs() < 1e-15);
    }

    #[test]
    fn temporal_weights() {
        let w = fejer_te_weights(2);
        assert_eq!(w, vec![5.0 / 8.0, 1.0 / 8.0]);
        assert!((fejer_te(0.0, 2) - 7.0 / 8.0).abs() < 1e-15);
    }
}
