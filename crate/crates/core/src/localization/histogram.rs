use crate::error::{Error, Result};

/// Discrete position belief: one probability per cell, normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct HistogramBelief {
    probs: Vec<f64>,
}

impl HistogramBelief {
    pub fn uniform(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidConfig("belief length must be >= 1".into()));
        }
        Ok(Self {
            probs: vec![1.0 / len as f64; len],
        })
    }

    /// Normalizes the given masses; they must be non-negative with positive
    /// total.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidConfig("belief length must be >= 1".into()));
        }
        if probs.iter().any(|&p| !(p >= 0.0)) {
            return Err(Error::InvalidConfig(format!(
                "negative or NaN probability in {probs:?}"
            )));
        }
        let total: f64 = probs.iter().sum();
        if !(total > 0.0) {
            return Err(Error::ZeroMass);
        }
        Ok(Self {
            probs: probs.into_iter().map(|p| p / total).collect(),
        })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        false // length >= 1 by construction
    }

    /// Deterministic motion by `shift` cells; mass pushed past either end
    /// accumulates at the boundary cell (the robot stops at the wall).
    pub fn predict(&self, shift: i64) -> HistogramBelief {
        let n = self.probs.len();
        let mut out = vec![0.0; n];
        for (i, &p) in self.probs.iter().enumerate() {
            let j = (i as i64 + shift).clamp(0, n as i64 - 1) as usize;
            out[j] += p;
        }
        HistogramBelief { probs: out }
    }

    /// Deterministic motion on a cyclic corridor: cell i moves to
    /// (i + shift) mod n.
    pub fn predict_cyclic(&self, shift: i64) -> HistogramBelief {
        let n = self.probs.len() as i64;
        let mut out = vec![0.0; self.probs.len()];
        for (i, &p) in self.probs.iter().enumerate() {
            let j = (i as i64 + shift).rem_euclid(n) as usize;
            out[j] += p;
        }
        HistogramBelief { probs: out }
    }

    /// Measurement update: elementwise product with exp(log_liks), then
    /// renormalize.  Zero posterior mass (all surviving cells at -inf) is an
    /// error so the caller can decide how to recover.
    pub fn update(&self, log_liks: &[f64]) -> Result<HistogramBelief> {
        if log_liks.len() != self.probs.len() {
            return Err(Error::LengthMismatch {
                belief: self.probs.len(),
                likelihood: log_liks.len(),
            });
        }
        // shift by the max finite log-likelihood so products survive exp
        let m = log_liks
            .iter()
            .copied()
            .filter(|l| l.is_finite())
            .fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return Err(Error::ZeroMass);
        }
        let weighted: Vec<f64> = self
            .probs
            .iter()
            .zip(log_liks)
            .map(|(&p, &l)| p * (l - m).exp())
            .collect();
        let total: f64 = weighted.iter().sum();
        if !(total > 0.0) {
            return Err(Error::ZeroMass);
        }
        Ok(HistogramBelief {
            probs: weighted.into_iter().map(|w| w / total).collect(),
        })
    }
}
