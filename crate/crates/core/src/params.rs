//! Kinetic exponents of the activator-inhibitor model and the regime
//! predicates built from them.
//!
//! The exponents enter the kinetics as `u^p / v^q` (activator) and
//! `u^r / v^s` (inhibitor). Three combinations govern the dynamics:
//! the cross-inhibition index `gamma = q / (s + 1)`, the net growth index
//! `omega = p - r * gamma` and the self-activation index `pi = (p - 1) / r`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Kinetic exponents, diffusivities and inhibitor response time.
///
/// `p > 1` is deliberately not enforced: the global-existence experiment runs
/// with `p = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub s: f64,
    #[serde(rename = "D1", default = "one")]
    pub d1: f64,
    /// Inhibitor diffusivity, only used by the two-species system.
    #[serde(rename = "D2", default = "one")]
    pub d2: f64,
    #[serde(default)]
    pub tau: f64,
}

fn one() -> f64 {
    1.0
}

impl Parameters {
    pub fn new(p: f64, q: f64, r: f64, s: f64) -> Self {
        Self {
            p,
            q,
            r,
            s,
            d1: 1.0,
            d2: 1.0,
            tau: 0.0,
        }
    }

    pub fn with_diffusion(mut self, d1: f64, d2: f64) -> Self {
        self.d1 = d1;
        self.d2 = d2;
        self
    }

    pub fn with_tau(mut self, tau: f64) -> Self {
        self.tau = tau;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.p, self.q, self.r, self.s, self.d1, self.d2, self.tau];
        if all.iter().any(|v| !v.is_finite()) {
            return invalid("parameters must be finite");
        }
        if self.s <= -1.0 {
            return invalid(format!("s must exceed -1 (got {})", self.s));
        }
        if self.r <= 0.0 {
            return invalid(format!("r must be positive (got {})", self.r));
        }
        if self.q < 0.0 {
            return invalid(format!("q must be non-negative (got {})", self.q));
        }
        if self.d1 <= 0.0 || self.d2 <= 0.0 {
            return invalid("diffusivities must be positive");
        }
        if self.tau < 0.0 {
            return invalid(format!("tau must be non-negative (got {})", self.tau));
        }
        Ok(())
    }

    pub fn indices(&self) -> Result<DerivedIndices> {
        derive_indices(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedIndices {
    /// Cross-inhibition index `q / (s + 1)`.
    pub gamma: f64,
    /// `p - r * gamma`; homogeneous states blow up only when this exceeds 1.
    pub omega: f64,
    /// Self-activation index `(p - 1) / r`.
    pub pi: f64,
}

pub fn derive_indices(params: &Parameters) -> Result<DerivedIndices> {
    if params.s <= -1.0 {
        return invalid(format!("s must exceed -1 (got {})", params.s));
    }
    if params.r <= 0.0 {
        return invalid(format!("r must be positive (got {})", params.r));
    }
    let gamma = params.q / (params.s + 1.0);
    Ok(DerivedIndices {
        gamma,
        omega: params.p - params.r * gamma,
        pi: (params.p - 1.0) / params.r,
    })
}

/// `p - r * gamma < 1`: spatially homogeneous states cannot blow up.
pub fn turing_condition(idx: &DerivedIndices) -> bool {
    idx.omega < 1.0
}

/// Hypotheses of the global-existence result:
/// `pi < min{1, 2/N, (1 - 1/r)/2}` and `0 < gamma < 1`.
pub fn thm4_condition(params: &Parameters, dimension: u32) -> bool {
    let Ok(idx) = derive_indices(params) else {
        return false;
    };
    if dimension == 0 {
        return false;
    }
    let bound = 1.0_f64
        .min(2.0 / dimension as f64)
        .min(0.5 * (1.0 - 1.0 / params.r));
    idx.pi < bound && idx.gamma > 0.0 && idx.gamma < 1.0
}

/// Hypotheses of the diffusion-driven blow-up result for spiky radial data:
/// `N >= 3`, `1 <= r <= p`, `p > N/(N-2)`, `2/N < pi < gamma`, `gamma > 1`.
pub fn thm5_condition(params: &Parameters, dimension: u32) -> bool {
    let Ok(idx) = derive_indices(params) else {
        return false;
    };
    if dimension < 3 {
        return false;
    }
    let n = dimension as f64;
    (1.0..=params.p).contains(&params.r)
        && params.p > n / (n - 2.0)
        && 2.0 / n < idx.pi
        && idx.pi < idx.gamma
        && idx.gamma > 1.0
}
