//! Discrete increment calculus.
//!
//! Operators act on callables so that the same code evaluates symbolic test
//! functions and covariance kernels. Integer-valued arguments are passed as
//! `f64`; every stencil point is `z` plus an integer offset.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact binomial coefficient. Valid for `n ≤ 60`.
pub fn binomial(n: u32, k: u32) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k) as u64;
    let n = n as u64;
    let mut c: u64 = 1;
    for i in 0..k {
        // exact: c * (n - i) is divisible by (i + 1)
        c = c * (n - i) / (i + 1);
    }
    c
}

/// Half-width of the stencil of the order-`p` increment.
pub fn stencil_reach(p: u32) -> u32 {
    p.div_ceil(2)
}

/// Order-`p` increment `𝕴^p[f](z)`.
///
/// Even orders are centred forward differences; odd orders are the
/// `(p-1)`-th forward difference of the symmetric first difference
/// `f(·+1) - f(·-1)`. Panics if `p == 0`.
pub fn inc_p<F: Fn(f64) -> f64>(f: F, p: u32, z: f64) -> f64 {
    assert!(p >= 1, "increment order must be at least 1");
    let mut acc = 0.0;
    if p % 2 == 0 {
        let half = (p / 2) as f64;
        for q in 0..=p {
            let c = binomial(p, q) as f64;
            let sign = if (p - q) % 2 == 0 { 1.0 } else { -1.0 };
            acc += sign * c * f(z - half + q as f64);
        }
    } else {
        let shift = ((p - 1) / 2) as f64;
        for q in 0..p {
            let c = binomial(p - 1, q) as f64;
            let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
            let base = z + q as f64 - shift;
            acc += sign * c * (f(base + 1.0) - f(base - 1.0));
        }
    }
    acc
}

/// Order-`p` increment of an observed sequence at index `idx`, or `None` if the
/// stencil leaves the data.
pub fn inc_seq(data: &[f64], p: u32, idx: usize) -> Option<f64> {
    let reach = stencil_reach(p) as usize;
    if idx < reach || idx + reach >= data.len() {
        return None;
    }
    Some(inc_p(|x| data[x as usize], p, idx as f64))
}

/// Two-dimensional second-order increment `ℐ²[h](q, z)`.
pub fn inc2_2d<H: Fn(f64, f64) -> f64>(h: H, q: f64, z: f64) -> f64 {
    let corners =
        h(q + 1.0, z + 1.0) + h(q - 1.0, z - 1.0) + h(q + 1.0, z - 1.0) + h(q - 1.0, z + 1.0);
    let edges = h(q, z + 1.0) + h(q, z - 1.0) + h(q + 1.0, z) + h(q - 1.0, z);
    4.0 * h(q, z) + corners - 2.0 * edges
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trig {
    Cos,
    Sin,
}

impl Trig {
    /// `cos(x + kπ/2)` or `sin(x + kπ/2)` with the quarter-turn applied exactly.
    fn shifted(self, x: f64, quarter_turns: u32) -> f64 {
        let (s, c) = x.sin_cos();
        let k = match self {
            Trig::Cos => quarter_turns % 4,
            Trig::Sin => (quarter_turns + 3) % 4,
        };
        match k {
            0 => c,
            1 => -s,
            2 => -c,
            _ => s,
        }
    }

    pub fn eval(self, x: f64) -> f64 {
        match self {
            Trig::Cos => x.cos(),
            Trig::Sin => x.sin(),
        }
    }
}

/// Closed form of `𝕴^p` applied to `z ↦ cos(zr)` or `z ↦ sin(zr)`.
pub fn trig_inc(kind: Trig, p: u32, r: f64, z: f64) -> f64 {
    assert!(p >= 1, "increment order must be at least 1");
    let two_p = 2f64.powi(p as i32);
    let half = (r / 2.0).sin();
    let x = z * r;
    if p % 2 == 0 {
        two_p * half.powi(p as i32) * kind.shifted(x, p)
    } else {
        let amp = two_p * r.sin() * half.powi(p as i32 - 1);
        match kind {
            Trig::Cos => -amp * Trig::Sin.shifted(x, p - 1),
            Trig::Sin => amp * Trig::Cos.shifted(x, p - 1),
        }
    }
}

/// Structured kernels `h(q, z)` with closed-form two-dimensional increments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StructuredForm {
    /// `h(q, z) = f(q + z)`
    Sum,
    /// `h(q, z) = f(q - z)`
    Diff,
    /// `h(q, z) = q f(q - z)`
    Product,
    /// `h(q, z) = (q ∧ z) f(q - z)`, `f` even
    Min,
    /// `h(q, z) = f(|q - z|)`
    Abs,
}

impl StructuredForm {
    pub const ALL: [StructuredForm; 5] = [
        StructuredForm::Sum,
        StructuredForm::Diff,
        StructuredForm::Product,
        StructuredForm::Min,
        StructuredForm::Abs,
    ];

    /// The kernel `h` itself, for brute-force comparison.
    pub fn kernel<F: Fn(f64) -> f64>(self, f: &F, q: f64, z: f64) -> f64 {
        match self {
            StructuredForm::Sum => f(q + z),
            StructuredForm::Diff => f(q - z),
            StructuredForm::Product => q * f(q - z),
            StructuredForm::Min => q.min(z) * f(q - z),
            StructuredForm::Abs => f((q - z).abs()),
        }
    }
}

/// Tolerance of the heuristic evenness check used by the min form.
pub const SYMMETRY_TOL: f64 = 1e-10;

/// Checks `f(k) = f(-k)` at `k = 1, 2, 3`.
pub fn check_symmetric<F: Fn(f64) -> f64>(f: &F) -> Result<()> {
    for k in 1..=3i64 {
        let plus = f(k as f64);
        let minus = f(-(k as f64));
        if (plus - minus).abs() > SYMMETRY_TOL * (1.0 + plus.abs().max(minus.abs())) {
            return Err(Error::SymmetryViolation { k, plus, minus });
        }
    }
    Ok(())
}

/// Closed-form `ℐ²[h](q, z)` for the structured kernels.
pub fn inc2_structured<F: Fn(f64) -> f64>(
    form: StructuredForm,
    f: F,
    q: f64,
    z: f64,
) -> Result<f64> {
    let d = q - z;
    Ok(match form {
        StructuredForm::Sum => inc_p(&f, 4, q + z),
        StructuredForm::Diff => inc_p(&f, 4, d),
        StructuredForm::Product => q * inc_p(&f, 4, d) + inc_p(&f, 3, d),
        StructuredForm::Min => {
            check_symmetric(&f)?;
            let a = d.abs();
            let base = q.min(z) * inc_p(&f, 4, a) - inc_p(&f, 3, a);
            if a == 0.0 {
                base + 4.0 * f(1.0) - 2.0 * f(2.0)
            } else if a == 1.0 {
                base - f(1.0)
            } else {
                base
            }
        }
        StructuredForm::Abs => {
            let a = d.abs();
            if a == 0.0 {
                6.0 * f(0.0) - 8.0 * f(1.0) + 2.0 * f(2.0)
            } else if a == 1.0 {
                7.0 * f(1.0) + f(3.0) - 4.0 * f(2.0) - 4.0 * f(0.0)
            } else {
                inc_p(&f, 4, a)
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn explicit_stencils() {
        let f = |x: f64| x.powi(3) + 0.5 * x.sin();
        let z = 1.7;
        assert!((inc_p(f, 1, z) - (f(z + 1.0) - f(z - 1.0))).abs() < 1e-14);
        assert!((inc_p(f, 2, z) - (f(z + 1.0) + f(z - 1.0) - 2.0 * f(z))).abs() < 1e-13);
        let p3 = f(z + 2.0) - 2.0 * f(z + 1.0) + 2.0 * f(z - 1.0) - f(z - 2.0);
        assert!((inc_p(f, 3, z) - p3).abs() < 1e-12);
        let p4 = f(z + 2.0) - 4.0 * f(z + 1.0) + 6.0 * f(z) - 4.0 * f(z - 1.0) + f(z - 2.0);
        assert!((inc_p(f, 4, z) - p4).abs() < 1e-12);
    }

    #[test]
    fn stencil_examples() {
        assert!((inc_p(|x: f64| x.cos(), 2, 0.0) - (2.0 * 1f64.cos() - 2.0)).abs() < 1e-15);
        assert_eq!(inc_p(|x: f64| x * x, 4, 3.0), 0.0);
        assert!((inc_p(|x: f64| (x * PI).cos(), 4, 0.0) - 16.0).abs() < 1e-12);
    }

    #[test]
    fn binomials_are_exact() {
        assert_eq!(binomial(20, 10), 184_756);
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(3, 5), 0);
        assert_eq!(binomial(60, 30), 118_264_581_564_861_424);
    }

    #[test]
    fn trig_examples() {
        assert!((trig_inc(Trig::Cos, 4, PI, 0.0) - 16.0).abs() < 1e-12);
        assert!((trig_inc(Trig::Cos, 3, PI / 2.0, 1.0) - 4.0).abs() < 1e-12);
        assert_eq!(trig_inc(Trig::Sin, 2, 0.37, 0.0), 0.0);
    }

    #[test]
    fn bilinear_and_constant_annihilated() {
        assert_eq!(inc2_2d(|_, _| 3.5, 2.0, 7.0), 0.0);
        assert_eq!(inc2_2d(|q, z| q * z, 4.0, -3.0), 0.0);
        let h = |q: f64, z: f64| q.min(z) * (q - z).powi(2);
        assert_eq!(inc2_2d(h, 5.0, 1.0), 0.0);
    }

    #[test]
    fn min_form_boundary_example() {
        let xi = 0.83;
        let f = |x: f64| (x * xi).cos();
        let q = 4.0;
        let got = inc2_structured(StructuredForm::Min, f, q, q).unwrap();
        let want = q * inc_p(f, 4, 0.0) + 4.0 * xi.cos() - 2.0 * (2.0 * xi).cos();
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn min_form_rejects_asymmetric() {
        let r = inc2_structured(StructuredForm::Min, |x: f64| x.sin(), 3.0, 1.0);
        assert!(matches!(r, Err(Error::SymmetryViolation { .. })));
    }

    #[test]
    fn sequence_adapter() {
        let data = [0.0, 1.0, 4.0, 9.0];
        assert_eq!(inc_seq(&data, 2, 1), Some(2.0));
        assert_eq!(inc_seq(&data, 2, 2), Some(2.0));
        assert_eq!(inc_seq(&data, 2, 0), None);
        assert_eq!(inc_seq(&data, 2, 3), None);
    }
}
