//! Model parameters and sampling geometry.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Riesz noise profile: spatial covariance `|x-y|^{-β}` in dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseProfile {
    pub beta: f64,
    pub d: u32,
}

impl NoiseProfile {
    pub fn new(beta: f64, d: u32) -> Result<Self> {
        let p = NoiseProfile { beta, d };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(invalid("dimension d must be at least 1"));
        }
        let upper = 2.0_f64.min(self.d as f64);
        // β = d = 1 is space-time white noise, the boundary case of the Riesz family.
        let ok = (self.beta > 0.0 && self.beta < upper) || self.is_white_noise();
        if !ok {
            return Err(invalid(format!(
                "beta must lie in (0, min(2, d)) = (0, {upper}) or equal 1 when d = 1, got {}",
                self.beta
            )));
        }
        Ok(())
    }

    pub fn is_white_noise(&self) -> bool {
        self.d == 1 && self.beta == 1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Wave speed ϑ.
    pub vartheta: f64,
    pub beta: f64,
    pub d: u32,
}

impl ModelParams {
    pub fn new(vartheta: f64, beta: f64, d: u32) -> Result<Self> {
        let p = ModelParams { vartheta, beta, d };
        p.validate()?;
        Ok(p)
    }

    pub fn profile(&self) -> NoiseProfile {
        NoiseProfile {
            beta: self.beta,
            d: self.d,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.vartheta > 0.0 && self.vartheta.is_finite()) {
            return Err(invalid(format!(
                "vartheta must be positive, got {}",
                self.vartheta
            )));
        }
        self.profile().validate()
    }

    pub fn with_vartheta(&self, vartheta: f64) -> Self {
        ModelParams { vartheta, ..*self }
    }
}

/// Observation geometry. Spatial points are `x_k = λkρ`, times `t_i = δi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SamplingDesign {
    /// `n` second-order spatial increments at fixed time `t` from `x_0..x_{n+1}`.
    Spatial { t: f64, lambda: f64, n: usize },
    /// `m` second-order temporal increments at a fixed point from `t_0..t_{m+1}`.
    Temporal { delta: f64, m: usize },
    /// `m × n` box increments.
    Spacetime {
        lambda: f64,
        delta: f64,
        n: usize,
        m: usize,
    },
}

impl SamplingDesign {
    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(format!("{name} must be positive, got {v}")))
            }
        };
        let count = |name: &str, v: usize| {
            if v >= 1 {
                Ok(())
            } else {
                Err(invalid(format!("{name} must be at least 1")))
            }
        };
        match *self {
            SamplingDesign::Spatial { t, lambda, n } => {
                pos("t", t)?;
                pos("lambda", lambda)?;
                count("n", n)
            }
            SamplingDesign::Temporal { delta, m } => {
                pos("delta", delta)?;
                count("m", m)
            }
            SamplingDesign::Spacetime {
                lambda,
                delta,
                n,
                m,
            } => {
                pos("lambda", lambda)?;
                pos("delta", delta)?;
                count("n", n)?;
                count("m", m)
            }
        }
    }

    /// Number of increments the design produces.
    pub fn dim(&self) -> usize {
        match *self {
            SamplingDesign::Spatial { n, .. } => n,
            SamplingDesign::Temporal { m, .. } => m,
            SamplingDesign::Spacetime { n, m, .. } => n * m,
        }
    }

    /// `α = δ/λ` for space-time designs.
    pub fn alpha(&self) -> Option<f64> {
        match *self {
            SamplingDesign::Spacetime { lambda, delta, .. } => Some(delta / lambda),
            _ => None,
        }
    }
}
