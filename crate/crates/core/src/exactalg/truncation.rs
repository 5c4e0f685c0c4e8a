use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Window of retained monomials: `muExp <= max_mu`, `min_eps <= epsExp <= max_eps`.
///
/// The μ cap is an honest power-series truncation (μ only ever appears with
/// nonnegative exponent). The ε window is a guard rail: whenever it drops a
/// nonzero term the result is flagged as clipped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TruncationContext {
    pub max_mu: u32,
    pub min_eps: i32,
    pub max_eps: Option<i32>,
}

impl TruncationContext {
    pub fn new(max_mu: u32, min_eps: i32, max_eps: Option<i32>) -> Result<Self> {
        if let Some(hi) = max_eps {
            if hi < min_eps {
                return Err(Error::InvalidWindow(format!(
                    "min_eps {min_eps} exceeds max_eps {hi}"
                )));
            }
        }
        Ok(TruncationContext {
            max_mu,
            min_eps,
            max_eps,
        })
    }

    /// μ cap with an ε window wide enough for any computation in this crate.
    pub fn with_mu_cap(max_mu: u32) -> Self {
        TruncationContext {
            max_mu,
            min_eps: -256,
            max_eps: None,
        }
    }

    /// Most restrictive common window.
    pub fn intersect(&self, other: &Self) -> Self {
        let max_eps = match (self.max_eps, other.max_eps) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, None) => a,
            (None, b) => b,
        };
        let min_eps = self.min_eps.max(other.min_eps);
        TruncationContext {
            max_mu: self.max_mu.min(other.max_mu),
            min_eps,
            // an empty intersection keeps a degenerate but valid window
            max_eps: max_eps.map(|m| m.max(min_eps)),
        }
    }

    pub fn keeps_mu(&self, mu: u32) -> bool {
        mu <= self.max_mu
    }

    pub fn keeps_eps(&self, eps: i32) -> bool {
        eps >= self.min_eps && self.max_eps.is_none_or(|m| eps <= m)
    }

    /// Window seen by `ε^k · f` when `f` lives in `self`.
    pub fn shift_eps(&self, k: i32) -> Self {
        TruncationContext {
            max_mu: self.max_mu,
            min_eps: self.min_eps + k,
            max_eps: self.max_eps.map(|m| m + k),
        }
    }
}

impl fmt::Display for TruncationContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.max_eps {
            Some(m) => write!(f, "mu<={}, eps in [{}, {}]", self.max_mu, self.min_eps, m),
            None => write!(f, "mu<={}, eps>={}", self.max_mu, self.min_eps),
        }
    }
}
