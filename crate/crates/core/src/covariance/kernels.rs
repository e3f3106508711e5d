//! One-dimensional building blocks `x ↦ φ(x)` of the increment covariances.
//!
//! Every increment-level covariance is a combination of integrals of
//! `φ(x)·(weights)·|ω|^{β-d-2}` where `φ` is one of the [`Piece`]s below: the
//! main Fejér-type term or one of the remainder kernels of the `|i-j|` case split.

use crate::specfun::TrigSeries;

/// Temporal kernel with argument `x` (`x = |ω|`, or `η = α√ϑ|ω|` in the box spatial form).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Piece {
    /// `sin⁴(x/2) cos(g x)`
    Main(u64),
    /// `sin⁴(x/2) sin(s x) / x`, the building block of `r^{(1)}`
    R1(u64),
    /// `r^{(2)}` for `|i-j| = 0` or `1`
    R2(u64),
    /// `r^{(3)}` for `|i-j| ≥ 1`
    R3(u64),
}

/// `Σ c_k cos(a_k x) + Σ d_k sinc(b_k x)` with a Taylor branch near zero.
struct EvenCombo {
    cos: &'static [(f64, f64)],
    sinc: &'static [(f64, f64)],
}

const R2_SAME: EvenCombo = EvenCombo {
    cos: &[(4.0, 1.0), (-2.0, 2.0)],
    sinc: &[(-4.0, 1.0), (2.0, 2.0)],
};
const R2_NEXT: EvenCombo = EvenCombo {
    cos: &[(-1.0, 1.0)],
    sinc: &[(3.5, 1.0), (1.5, 3.0), (-4.0, 2.0)],
};

impl EvenCombo {
    fn eval(&self, x: f64) -> f64 {
        if x.abs() < 0.2 {
            let x2 = x * x;
            let mut acc = 0.0;
            let mut pow = 1.0; // x^{2n}
            let mut fact_even = 1.0; // (2n)!
            for n in 0..12 {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                let nn = 2 * n;
                let fact_odd = fact_even * (nn as f64 + 1.0);
                let mut c = 0.0;
                for &(ck, ak) in self.cos {
                    c += ck * ak.powi(nn) / fact_even;
                }
                for &(dk, bk) in self.sinc {
                    c += dk * bk.powi(nn) / fact_odd;
                }
                acc += sign * c * pow;
                pow *= x2;
                fact_even = fact_odd * (nn as f64 + 2.0);
            }
            acc
        } else {
            let mut acc = 0.0;
            for &(ck, ak) in self.cos {
                acc += ck * (ak * x).cos();
            }
            for &(dk, bk) in self.sinc {
                acc += dk * (bk * x).sin() / (bk * x);
            }
            acc
        }
    }

    fn series(&self, p: f64) -> TrigSeries {
        let mut s = TrigSeries::zero();
        for &(ck, ak) in self.cos {
            s = s.add(&TrigSeries::cos(ak * p).scale(ck));
        }
        for &(dk, bk) in self.sinc {
            s = s.add(&TrigSeries::sinc(bk * p).scale(dk));
        }
        s
    }
}

impl Piece {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Piece::Main(g) => (0.5 * x).sin().powi(4) * (g as f64 * x).cos(),
            Piece::R1(s) => {
                let sx = if x.abs() < 1e-300 {
                    s as f64
                } else {
                    (s as f64 * x).sin() / x
                };
                (0.5 * x).sin().powi(4) * sx
            }
            Piece::R2(0) => R2_SAME.eval(x),
            Piece::R2(1) => R2_NEXT.eval(x),
            Piece::R2(_) => 0.0,
            Piece::R3(0) => 0.0,
            Piece::R3(1) => {
                let a = x.sin() * (0.5 * x).sin();
                -8.0 * a * a
            }
            Piece::R3(g) => -8.0 * x.sin() * (0.5 * x).sin().powi(2) * (g as f64 * x).sin(),
        }
    }

    /// Exact trigonometric series of `r ↦ φ(p·r)`.
    pub fn series(self, p: f64) -> TrigSeries {
        match self {
            Piece::Main(g) => TrigSeries::sin4_half(p).mul(&TrigSeries::cos(g as f64 * p)),
            Piece::R1(s) => TrigSeries::sin4_half(p)
                .mul(&TrigSeries::sin(s as f64 * p))
                .mul(&TrigSeries::power(-1.0))
                .scale(1.0 / p),
            Piece::R2(0) => R2_SAME.series(p),
            Piece::R2(1) => R2_NEXT.series(p),
            Piece::R2(_) | Piece::R3(0) => TrigSeries::zero(),
            Piece::R3(1) => TrigSeries::sin2_half(2.0 * p)
                .mul(&TrigSeries::sin2_half(p))
                .scale(-8.0),
            Piece::R3(g) => TrigSeries::sin(p)
                .mul(&TrigSeries::sin2_half(p))
                .mul(&TrigSeries::sin(g as f64 * p))
                .scale(-8.0),
        }
    }

    /// `e` with `φ(x) ~ x^e` at zero (an upper bound when `φ` vanishes identically).
    pub fn origin_exponent(self) -> f64 {
        match self {
            Piece::Main(_) | Piece::R1(_) | Piece::R3(_) => 4.0,
            Piece::R2(_) => 2.0,
        }
    }

    pub fn is_zero(self) -> bool {
        matches!(self, Piece::R2(g) if g >= 2) || matches!(self, Piece::R3(0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_r2(g: u64, x: f64) -> f64 {
        let sinc = |y: f64| y.sin() / y;
        match g {
            0 => 4.0 * x.cos() - 2.0 * (2.0 * x).cos() - 4.0 * sinc(x) + 2.0 * sinc(2.0 * x),
            _ => -x.cos() + 3.5 * sinc(x) + 1.5 * sinc(3.0 * x) - 4.0 * sinc(2.0 * x),
        }
    }

    #[test]
    fn r2_taylor_branch_matches_direct() {
        for g in 0..2 {
            for &x in &[0.05f64, 0.1, 0.199, 0.201, 0.7] {
                let got = Piece::R2(g).eval(x);
                let want = direct_r2(g, x);
                assert!(
                    (got - want).abs() < 1e-12 * want.abs().max(1e-3),
                    "g={g} x={x}: {got} vs {want}"
                );
            }
        }
        // leading behaviour: 4x²/3 and x²/3
        let x = 1e-6;
        assert!((Piece::R2(0).eval(x) / (x * x) - 4.0 / 3.0).abs() < 1e-9);
        assert!((Piece::R2(1).eval(x) / (x * x) - 1.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn series_match_closures() {
        let pieces = [
            Piece::Main(3),
            Piece::R1(5),
            Piece::R2(0),
            Piece::R2(1),
            Piece::R3(1),
            Piece::R3(4),
        ];
        for piece in pieces {
            let s = piece.series(1.7);
            for &r in &[0.4f64, 1.3, 6.0] {
                let a = s.eval(r);
                let b = piece.eval(1.7 * r);
                assert!((a - b).abs() < 1e-12, "{piece:?} at {r}: {a} vs {b}");
            }
        }
    }
}
