//! Finite sums of `c·trig(ωr)·r^p`, the far-field form of every integrand here.

use num_complex::Complex64;

use super::quad::{integrate_panels, Quad};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Wave {
    Cos,
    Sin,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub coef: f64,
    pub wave: Wave,
    pub freq: f64,
    pub power: f64,
}

impl Term {
    pub fn eval(&self, r: f64) -> f64 {
        let t = match self.wave {
            Wave::Cos => (self.freq * r).cos(),
            Wave::Sin => (self.freq * r).sin(),
        };
        self.coef * t * r.powf(self.power)
    }
}

/// `Σ coef·{cos,sin}(freq·r)·r^power`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrigSeries {
    terms: Vec<Term>,
}

impl TrigSeries {
    pub fn zero() -> Self {
        TrigSeries { terms: Vec::new() }
    }

    pub fn term(coef: f64, wave: Wave, freq: f64, power: f64) -> Self {
        TrigSeries {
            terms: vec![Term {
                coef,
                wave,
                freq,
                power,
            }],
        }
        .canonical()
    }

    pub fn constant(c: f64) -> Self {
        Self::term(c, Wave::Cos, 0.0, 0.0)
    }

    /// `r^p`
    pub fn power(p: f64) -> Self {
        Self::term(1.0, Wave::Cos, 0.0, p)
    }

    pub fn cos(freq: f64) -> Self {
        Self::term(1.0, Wave::Cos, freq, 0.0)
    }

    pub fn sin(freq: f64) -> Self {
        Self::term(1.0, Wave::Sin, freq, 0.0)
    }

    /// `sin²(a·r/2) = (1 - cos(a r))/2`
    pub fn sin2_half(a: f64) -> Self {
        Self::constant(0.5).add(&Self::cos(a).scale(-0.5))
    }

    /// `sin⁴(a·r/2) = 3/8 - cos(a r)/2 + cos(2a r)/8`
    pub fn sin4_half(a: f64) -> Self {
        Self::constant(0.375)
            .add(&Self::cos(a).scale(-0.5))
            .add(&Self::cos(2.0 * a).scale(0.125))
    }

    /// `sinc(a r) = sin(a r)/(a r)`
    pub fn sinc(a: f64) -> Self {
        if a == 0.0 {
            return Self::constant(1.0);
        }
        Self::term(1.0 / a, Wave::Sin, a, -1.0)
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn scale(&self, c: f64) -> Self {
        TrigSeries {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coef: t.coef * c,
                    ..*t
                })
                .collect(),
        }
        .canonical()
    }

    pub fn shift_power(&self, dp: f64) -> Self {
        TrigSeries {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    power: t.power + dp,
                    ..*t
                })
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        TrigSeries { terms }.canonical()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(2 * self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let c = 0.5 * a.coef * b.coef;
                let p = a.power + b.power;
                let (s, d) = (a.freq + b.freq, a.freq - b.freq);
                let mut push = |coef: f64, wave: Wave, freq: f64| {
                    terms.push(Term {
                        coef,
                        wave,
                        freq,
                        power: p,
                    })
                };
                match (a.wave, b.wave) {
                    (Wave::Cos, Wave::Cos) => {
                        push(c, Wave::Cos, d);
                        push(c, Wave::Cos, s);
                    }
                    (Wave::Sin, Wave::Sin) => {
                        push(c, Wave::Cos, d);
                        push(-c, Wave::Cos, s);
                    }
                    (Wave::Sin, Wave::Cos) => {
                        push(c, Wave::Sin, s);
                        push(c, Wave::Sin, d);
                    }
                    (Wave::Cos, Wave::Sin) => {
                        push(c, Wave::Sin, s);
                        push(-c, Wave::Sin, d);
                    }
                }
            }
        }
        TrigSeries { terms }.canonical()
    }

    /// Nonnegative frequencies, like terms merged, zero terms dropped, fixed order.
    fn canonical(mut self) -> Self {
        for t in &mut self.terms {
            if t.freq < 0.0 {
                t.freq = -t.freq;
                if t.wave == Wave::Sin {
                    t.coef = -t.coef;
                }
            }
            if t.freq == 0.0 && t.wave == Wave::Sin {
                t.coef = 0.0;
            }
        }
        self.terms.sort_by(|x, y| {
            x.wave
                .cmp(&y.wave)
                .then(x.power.total_cmp(&y.power))
                .then(x.freq.total_cmp(&y.freq))
        });
        let mut out: Vec<Term> = Vec::with_capacity(self.terms.len());
        for t in self.terms {
            match out.last_mut() {
                Some(last)
                    if last.wave == t.wave && last.power == t.power && last.freq == t.freq =>
                {
                    last.coef += t.coef;
                }
                _ => out.push(t),
            }
        }
        out.retain(|t| t.coef != 0.0);
        TrigSeries { terms: out }
    }

    pub fn eval(&self, r: f64) -> f64 {
        let lr = r.ln();
        let mut acc = 0.0;
        let mut cached_p = f64::NAN;
        let mut cached_rp = 0.0;
        for t in &self.terms {
            if t.power != cached_p {
                cached_p = t.power;
                cached_rp = (t.power * lr).exp();
            }
            let w = match t.wave {
                Wave::Cos => (t.freq * r).cos(),
                Wave::Sin => (t.freq * r).sin(),
            };
            acc += t.coef * w * cached_rp;
        }
        acc
    }

    pub fn max_freq(&self) -> f64 {
        self.terms.iter().map(|t| t.freq).fold(0.0, f64::max)
    }

    pub fn min_nonzero_freq(&self) -> Option<f64> {
        self.terms
            .iter()
            .filter(|t| t.freq > 0.0)
            .map(|t| t.freq)
            .min_by(f64::total_cmp)
    }
}

/// `ω·X` above which a term's tail is summed asymptotically.
pub const ASYMPTOTIC_ONSET: f64 = 40.0;

/// `∫_x^∞ term` for a single term, `x > 0`.
pub fn term_tail(t: &Term, x: f64, abs_tol: f64, rel_tol: f64, max_sub: usize) -> Result<Quad> {
    if t.freq == 0.0 {
        return match t.wave {
            Wave::Sin => Ok(Quad::ZERO),
            Wave::Cos => {
                if t.power >= -1.0 {
                    return Err(Error::Divergent(format!(
                        "r^{} is not integrable at infinity",
                        t.power
                    )));
                }
                Ok(Quad {
                    value: t.coef * x.powf(t.power + 1.0) / (-(t.power + 1.0)),
                    error: 0.0,
                })
            }
        };
    }
    if t.power >= 0.0 {
        return Err(Error::Divergent(format!(
            "oscillatory term with power {} >= 0",
            t.power
        )));
    }
    let onset = ASYMPTOTIC_ONSET / t.freq;
    let mut out = Quad::ZERO;
    let mut start = x;
    if onset > x {
        let unit = Term { coef: 1.0, ..*t };
        let f = |u: f64| {
            let r = u.exp();
            unit.eval(r) * r
        };
        let (la, lb) = (x.ln(), onset.ln());
        let n = ((lb - la) / std::f64::consts::LN_2).ceil().max(1.0) as usize;
        let breaks: Vec<f64> = (0..=n)
            .map(|i| la + (lb - la) * i as f64 / n as f64)
            .collect();
        let q = integrate_panels(
            &f,
            &breaks,
            abs_tol / t.coef.abs().max(1e-300),
            rel_tol,
            max_sub,
        )?;
        out = q.scale(t.coef);
        start = onset;
    }
    let asym = oscillatory_tail(t.freq, -t.power, start);
    let v = match t.wave {
        Wave::Cos => asym.0.re,
        Wave::Sin => asym.0.im,
    };
    Ok(out
        + Quad {
            value: t.coef * v,
            error: t.coef.abs() * asym.1,
        })
}

/// Asymptotic expansion of `∫_x^∞ e^{iωr} r^{-ν} dr` for `ωx` large:
/// `-e^{iωx} x^{-ν}/(iω) Σ_n (ν)_n/(iωx)^n`, truncated at the smallest term.
/// Returns the value and the size of the first omitted term.
pub fn oscillatory_tail(omega: f64, nu: f64, x: f64) -> (Complex64, f64) {
    let z = Complex64::new(0.0, omega * x);
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut last = 1.0;
    let mut err = 0.0;
    for n in 0..200 {
        let next = term * (nu + n as f64) / z;
        let size = next.norm();
        if size >= last {
            err = last;
            break;
        }
        sum += next;
        term = next;
        last = size;
        if size < 1e-18 * sum.norm() {
            err = size;
            break;
        }
    }
    let phase = Complex64::new(0.0, omega * x).exp();
    let lead = -phase * x.powf(-nu) / Complex64::new(0.0, omega);
    (lead * sum, lead.norm() * err)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_identities() {
        let s = TrigSeries::sin4_half(1.3)
            .mul(&TrigSeries::cos(0.7))
            .mul(&TrigSeries::power(-2.5));
        for &r in &[0.3f64, 1.7, 5.2, 11.0] {
            let direct = (0.65 * r).sin().powi(4) * (0.7 * r).cos() * r.powf(-2.5);
            assert!((s.eval(r) - direct).abs() < 1e-13, "{r}");
        }
        let s = TrigSeries::sin(2.0)
            .mul(&TrigSeries::sin(0.5))
            .add(&TrigSeries::sinc(3.0));
        for &r in &[0.3f64, 1.7, 5.2] {
            let direct = (2.0 * r).sin() * (0.5 * r).sin() + (3.0 * r).sin() / (3.0 * r);
            assert!((s.eval(r) - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn merges_like_terms() {
        let s = TrigSeries::cos(1.0)
            .add(&TrigSeries::cos(-1.0))
            .add(&TrigSeries::sin(0.0));
        assert_eq!(s.len(), 1);
        assert_eq!(s.terms()[0].coef, 2.0);
    }

    #[test]
    fn asymptotic_tail_matches_quadrature() {
        // ∫_x^∞ cos(ωr) r^{-2} dr checked against dense quadrature on a long range plus the next tail.
        let (omega, x) = (3.0, 20.0);
        let (asym, err) = oscillatory_tail(omega, 2.0, x);
        assert!(err < 1e-15);
        let far = 200.0;
        let breaks: Vec<f64> = (0..=2000)
            .map(|i| x + (far - x) * i as f64 / 2000.0)
            .collect();
        let q = integrate_panels(
            &|r: f64| (omega * r).cos() / (r * r),
            &breaks,
            1e-16,
            1e-14,
            100,
        )
        .unwrap();
        let rest = oscillatory_tail(omega, 2.0, far).0;
        assert!((q.value + rest.re - asym.re).abs() < 1e-14);
    }

    #[test]
    fn pure_power_tail() {
        let t = Term {
            coef: 2.0,
            wave: Wave::Cos,
            freq: 0.0,
            power: -3.0,
        };
        let q = term_tail(&t, 2.0, 1e-15, 1e-14, 100).unwrap();
        assert!((q.value - 0.25).abs() < 1e-16);
        let bad = Term {
            coef: 1.0,
            wave: Wave::Cos,
            freq: 0.0,
            power: -0.5,
        };
        assert!(term_tail(&bad, 1.0, 1e-15, 1e-14, 100).is_err());
    }

    #[test]
    fn slow_term_tail() {
        // ∫_1^∞ sin(r/10)/r dr = π/2 - Si(0.1)
        let t = Term {
            coef: 1.0,
            wave: Wave::Sin,
            freq: 0.1,
            power: -1.0,
        };
        let q = term_tail(&t, 1.0, 1e-15, 1e-13, 1000).unwrap();
        let si = 0.1 - 0.1f64.powi(3) / 18.0 + 0.1f64.powi(5) / 600.0 - 0.1f64.powi(7) / 35280.0;
        assert!(
            (q.value - (std::f64::consts::FRAC_PI_2 - si)).abs() < 1e-12,
            "{}",
            q.value
        );
    }
}
