//! Isotropic domain evolution `x = rho(t) * xi` and the time-dependent
//! coefficients it induces on the reference domain.
//!
//! Two clocks are in play. The physical time `t` and the rescaled time
//! `sigma(t) = int_0^t rho^-2`, in which the diffusion coefficient is frozen.
//! Writing `phi(sigma) = rho(t)`, the reference-domain equation picks up the
//! dissipation coefficient `Phi = phi^2 + N phi'/phi` and the reaction
//! coefficient `Psi = phi^(2(1-gamma)) Phi^gamma`. In the `t` clock the same
//! dissipation reads `L(t) = 1 + N rho'/rho`, and `Phi = phi^2 L`.
//!
//! Every law uses closed forms; quadrature only serves as a cross-check.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quad;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawKind {
    Static,
    ExpGrowth,
    ExpDecay,
    Logistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionLaw {
    #[serde(rename = "evolution")]
    pub kind: LawKind,
    #[serde(default)]
    pub beta: f64,
    /// Logistic carrying ratio `lim rho(t)`; growth for `m > 1`, decay for `m < 1`.
    #[serde(default = "default_m")]
    pub m: f64,
    #[serde(default = "default_dimension")]
    pub dimension: u32,
}

fn default_m() -> f64 {
    1.5
}

fn default_dimension() -> u32 {
    2
}

/// Extremes of `Phi` and `Psi` over a sigma interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientBounds {
    pub phi_min: f64,
    pub phi_max: f64,
    pub psi_min: f64,
    pub psi_max: f64,
}

impl EvolutionLaw {
    pub fn static_domain(dimension: u32) -> Self {
        Self {
            kind: LawKind::Static,
            beta: 0.0,
            m: default_m(),
            dimension,
        }
    }

    pub fn exp_growth(beta: f64, dimension: u32) -> Self {
        Self {
            kind: LawKind::ExpGrowth,
            beta,
            m: default_m(),
            dimension,
        }
    }

    pub fn exp_decay(beta: f64, dimension: u32) -> Self {
        Self {
            kind: LawKind::ExpDecay,
            beta,
            m: default_m(),
            dimension,
        }
    }

    pub fn logistic(beta: f64, m: f64, dimension: u32) -> Self {
        Self {
            kind: LawKind::Logistic,
            beta,
            m,
            dimension,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dimension) {
            return invalid(format!("dimension must be 1, 2 or 3 (got {})", self.dimension));
        }
        if !self.beta.is_finite() || self.beta < 0.0 {
            return invalid(format!("beta must be finite and >= 0 (got {})", self.beta));
        }
        let n = self.dimension as f64;
        match self.kind {
            LawKind::Static | LawKind::ExpGrowth => {}
            LawKind::ExpDecay => {
                if self.beta * n >= 1.0 {
                    return invalid(format!(
                        "exponential decay needs beta < 1/N (beta = {}, N = {})",
                        self.beta, self.dimension
                    ));
                }
            }
            LawKind::Logistic => {
                if !(self.m.is_finite() && self.m > 0.0) {
                    return invalid(format!("logistic m must be positive (got {})", self.m));
                }
                if self.m == 1.0 {
                    return invalid("logistic m must differ from 1");
                }
                if self.l_of_t(0.0) <= 0.0 {
                    return invalid("logistic decay too fast: L(0) <= 0");
                }
            }
        }
        Ok(())
    }

    fn n(&self) -> f64 {
        self.dimension as f64
    }

    /// Scale factor `rho(t)`, with `rho(0) = 1`.
    pub fn rho(&self, t: f64) -> f64 {
        match self.kind {
            LawKind::Static => 1.0,
            LawKind::ExpGrowth => (self.beta * t).exp(),
            LawKind::ExpDecay => (-self.beta * t).exp(),
            LawKind::Logistic => 1.0 / self.logistic_denominator(t),
        }
    }

    // 1 / rho(t) for the logistic law, written to avoid overflow of e^{beta t}.
    fn logistic_denominator(&self, t: f64) -> f64 {
        let inv_m = 1.0 / self.m;
        (-self.beta * t).exp() * (1.0 - inv_m) + inv_m
    }

    /// Relative growth rate `rho'(t) / rho(t)`.
    pub fn growth_rate(&self, t: f64) -> f64 {
        match self.kind {
            LawKind::Static => 0.0,
            LawKind::ExpGrowth => self.beta,
            LawKind::ExpDecay => -self.beta,
            LawKind::Logistic => {
                let e = (-self.beta * t).exp();
                self.beta * (1.0 - 1.0 / self.m) * e / self.logistic_denominator(t)
            }
        }
    }

    /// `L(t) = 1 + N rho'(t)/rho(t)`.
    pub fn l_of_t(&self, t: f64) -> f64 {
        1.0 + self.n() * self.growth_rate(t)
    }

    /// `int_0^t L = t + N ln rho(t)`.
    pub fn integral_of_l(&self, t: f64) -> f64 {
        t + self.n() * self.rho(t).ln()
    }

    /// `sigma(t) = int_0^t rho^-2`.
    pub fn sigma_of_t(&self, t: f64) -> f64 {
        let b = self.beta;
        match self.kind {
            LawKind::Static => t,
            _ if b == 0.0 => t,
            LawKind::ExpGrowth => -(-2.0 * b * t).exp_m1() / (2.0 * b),
            LawKind::ExpDecay => (2.0 * b * t).exp_m1() / (2.0 * b),
            LawKind::Logistic => {
                // rho^-2 = (a e^{-bt} + c)^2 with a = 1 - 1/m, c = 1/m
                let c = 1.0 / self.m;
                let a = 1.0 - c;
                a * a * (-(-2.0 * b * t).exp_m1()) / (2.0 * b)
                    + 2.0 * a * c * (-(-b * t).exp_m1()) / b
                    + c * c * t
            }
        }
    }

    /// `sigma(t)` by adaptive quadrature of `rho^-2`; independent of the
    /// closed forms in [`sigma_of_t`](Self::sigma_of_t).
    pub fn sigma_of_t_quadrature(&self, t: f64) -> f64 {
        let f = |theta: f64| {
            let rho = self.rho(theta);
            1.0 / (rho * rho)
        };
        quad::adaptive_simpson(&f, 0.0, t, 1e-13 * t.max(1.0))
    }

    /// Supremum of attainable sigma values; finite only for exponential growth.
    pub fn sigma_max(&self) -> f64 {
        match self.kind {
            LawKind::ExpGrowth if self.beta > 0.0 => 1.0 / (2.0 * self.beta),
            _ => f64::INFINITY,
        }
    }

    fn check_sigma(&self, sigma: f64) -> Result<()> {
        let max = self.sigma_max();
        if !(sigma >= 0.0 && sigma < max) {
            return Err(Error::OutsideHorizon { sigma, max });
        }
        Ok(())
    }

    /// Inverse of [`sigma_of_t`](Self::sigma_of_t).
    pub fn t_of_sigma(&self, sigma: f64) -> Result<f64> {
        self.check_sigma(sigma)?;
        let b = self.beta;
        Ok(match self.kind {
            LawKind::Static => sigma,
            _ if b == 0.0 => sigma,
            LawKind::ExpGrowth => -(-2.0 * b * sigma).ln_1p() / (2.0 * b),
            LawKind::ExpDecay => (2.0 * b * sigma).ln_1p() / (2.0 * b),
            LawKind::Logistic => {
                if sigma == 0.0 {
                    return Ok(0.0);
                }
                // rho lies between 1 and m, so sigma(t) is pinched between
                // t / max(1, m)^2 and t / min(1, m)^2.
                let lo = sigma * self.m.min(1.0).powi(2);
                let hi = sigma * self.m.max(1.0).powi(2);
                quad::bisect_increasing(|t| self.sigma_of_t(t) - sigma, lo, hi, 1e-14)
            }
        })
    }

    /// `phi(sigma) = rho(t(sigma))`.
    pub fn phi(&self, sigma: f64) -> Result<f64> {
        self.check_sigma(sigma)?;
        let b = self.beta;
        Ok(match self.kind {
            LawKind::Static => 1.0,
            LawKind::ExpGrowth => 1.0 / (1.0 - 2.0 * b * sigma).sqrt(),
            LawKind::ExpDecay => 1.0 / (1.0 + 2.0 * b * sigma).sqrt(),
            LawKind::Logistic => self.rho(self.t_of_sigma(sigma)?),
        })
    }

    /// Dissipation coefficient `Phi(sigma) = phi^2 + N phi'/phi`.
    pub fn phi_coeff(&self, sigma: f64) -> Result<f64> {
        self.check_sigma(sigma)?;
        let b = self.beta;
        let n = self.n();
        Ok(match self.kind {
            LawKind::Static => 1.0,
            LawKind::ExpGrowth => (1.0 + n * b) / (1.0 - 2.0 * b * sigma),
            LawKind::ExpDecay => (1.0 - n * b) / (1.0 + 2.0 * b * sigma),
            LawKind::Logistic => {
                let t = self.t_of_sigma(sigma)?;
                let rho = self.rho(t);
                rho * rho * self.l_of_t(t)
            }
        })
    }

    /// Reaction coefficient `Psi(sigma) = phi^(2(1-gamma)) Phi^gamma`.
    pub fn psi_coeff(&self, sigma: f64, gamma: f64) -> Result<f64> {
        self.check_sigma(sigma)?;
        let b = self.beta;
        let n = self.n();
        Ok(match self.kind {
            LawKind::Static => 1.0,
            LawKind::ExpGrowth => (1.0 + n * b).powf(gamma) / (1.0 - 2.0 * b * sigma),
            LawKind::ExpDecay => (1.0 - n * b).powf(gamma) / (1.0 + 2.0 * b * sigma),
            LawKind::Logistic => {
                let phi = self.phi(sigma)?;
                phi.powf(2.0 * (1.0 - gamma)) * self.phi_coeff(sigma)?.powf(gamma)
            }
        })
    }

    /// Infima and suprema of `Phi` and `Psi` on `[from, to]` (`to` may be
    /// infinite). Exact for the exponential and static laws, which are
    /// monotone in sigma; the logistic law is scanned on a dense grid.
    pub fn coefficient_bounds(&self, gamma: f64, from: f64, to: f64) -> Result<CoefficientBounds> {
        if !(from >= 0.0 && to >= from) {
            return invalid(format!("bad horizon [{from}, {to}]"));
        }
        self.check_sigma(from)?;
        let at = |s: f64| -> Result<(f64, f64)> { Ok((self.phi_coeff(s)?, self.psi_coeff(s, gamma)?)) };
        let (phi_a, psi_a) = at(from)?;
        let bounds = match self.kind {
            LawKind::Static => CoefficientBounds {
                phi_min: 1.0,
                phi_max: 1.0,
                psi_min: 1.0,
                psi_max: 1.0,
            },
            LawKind::ExpGrowth => {
                let (phi_b, psi_b) = if to >= self.sigma_max() {
                    (f64::INFINITY, f64::INFINITY)
                } else {
                    at(to)?
                };
                CoefficientBounds {
                    phi_min: phi_a,
                    phi_max: phi_b,
                    psi_min: psi_a,
                    psi_max: psi_b,
                }
            }
            LawKind::ExpDecay => {
                let (phi_b, psi_b) = if to.is_infinite() { (0.0, 0.0) } else { at(to)? };
                CoefficientBounds {
                    phi_min: phi_b,
                    phi_max: phi_a,
                    psi_min: psi_b,
                    psi_max: psi_a,
                }
            }
            LawKind::Logistic => {
                let mut b = CoefficientBounds {
                    phi_min: phi_a,
                    phi_max: phi_a,
                    psi_min: psi_a,
                    psi_max: psi_a,
                };
                let mut include = |phi: f64, psi: f64| {
                    b.phi_min = b.phi_min.min(phi);
                    b.phi_max = b.phi_max.max(phi);
                    b.psi_min = b.psi_min.min(psi);
                    b.psi_max = b.psi_max.max(psi);
                };
                let t_from = self.t_of_sigma(from)?;
                let t_to = if to.is_infinite() {
                    // rho -> m and L -> 1: Phi and Psi both tend to m^2.
                    include(self.m * self.m, self.m * self.m);
                    t_from + 60.0 / self.beta.max(1e-3)
                } else {
                    self.t_of_sigma(to)?
                };
                const SAMPLES: usize = 4000;
                for k in 1..=SAMPLES {
                    let t = t_from + (t_to - t_from) * k as f64 / SAMPLES as f64;
                    let rho = self.rho(t);
                    let l = self.l_of_t(t);
                    let phi = rho * rho * l;
                    include(phi, rho.powf(2.0 * (1.0 - gamma)) * phi.powf(gamma));
                }
                b
            }
        };
        Ok(bounds)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn laws() -> [EvolutionLaw; 5] {
        [
            EvolutionLaw::static_domain(2),
            EvolutionLaw::exp_growth(0.1, 2),
            EvolutionLaw::exp_decay(0.1, 2),
            EvolutionLaw::logistic(0.1, 1.5, 2),
            EvolutionLaw::logistic(0.1, 0.5, 3),
        ]
    }

    #[test]
    fn rho_examples() {
        assert_eq!(EvolutionLaw::static_domain(2).rho(7.0), 1.0);
        assert_eq!(EvolutionLaw::exp_growth(0.1, 2).rho(0.0), 1.0);
        let lg = EvolutionLaw::logistic(0.1, 1.5, 2);
        assert_relative_eq!(lg.rho(0.0), 1.0);
        assert_relative_eq!(lg.rho(1e4), 1.5, max_relative = 1e-12);
    }

    #[test]
    fn l_examples() {
        assert_relative_eq!(EvolutionLaw::exp_growth(0.1, 2).l_of_t(3.0), 1.2, epsilon = 1e-15);
        assert_eq!(EvolutionLaw::static_domain(2).l_of_t(3.0), 1.0);
        let lg = EvolutionLaw::logistic(0.1, 1.5, 2);
        assert_relative_eq!(lg.l_of_t(0.0), 1.0 + 0.2 * (1.0 - 2.0 / 3.0), epsilon = 1e-15);
    }

    #[test]
    fn l_matches_derivative_of_log_rho() {
        for law in laws() {
            for &t in &[0.0, 0.7, 3.0, 12.0] {
                let h = 1e-5;
                let fd = ((law.rho(t + h).ln() - law.rho((t - h).max(0.0)).ln()) / (t + h - (t - h).max(0.0)))
                    * law.dimension as f64
                    + 1.0;
                assert_relative_eq!(law.l_of_t(t), fd, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(EvolutionLaw::static_domain(2).sigma_of_t(2.0), 2.0);
        let g = EvolutionLaw::exp_growth(0.1, 2);
        assert_relative_eq!(g.sigma_of_t(400.0), 5.0, max_relative = 1e-12);
        assert_eq!(EvolutionLaw::exp_decay(0.1, 2).sigma_of_t(0.0), 0.0);
    }

    #[test]
    fn t_of_sigma_examples() {
        assert_eq!(EvolutionLaw::static_domain(2).t_of_sigma(3.0).unwrap(), 3.0);
        let g = EvolutionLaw::exp_growth(0.1, 2);
        let t = g.t_of_sigma(0.3311).unwrap();
        assert_relative_eq!(t, -(1.0f64 - 0.2 * 0.3311).ln() / 0.2, max_relative = 1e-14);
        assert!((t - 0.3425).abs() < 1e-4);
        assert!(matches!(g.t_of_sigma(5.0), Err(Error::OutsideHorizon { .. })));
        assert!(g.t_of_sigma(-0.1).is_err());
    }

    #[test]
    fn phi_and_psi_examples() {
        let g = EvolutionLaw::exp_growth(0.1, 2);
        let d = EvolutionLaw::exp_decay(0.1, 2);
        let s = EvolutionLaw::static_domain(2);
        assert_relative_eq!(g.phi_coeff(0.0).unwrap(), 1.2, epsilon = 1e-15);
        assert_relative_eq!(d.phi_coeff(0.0).unwrap(), 0.8, epsilon = 1e-15);
        assert_eq!(s.phi_coeff(1.7).unwrap(), 1.0);
        assert_eq!(s.psi_coeff(1.7, 0.3).unwrap(), 1.0);
        assert_relative_eq!(d.psi_coeff(0.0, 2.0 / 3.0).unwrap(), 0.861_773_876, max_relative = 1e-8);
        assert!(g.phi_coeff(5.0).is_err());
        for law in laws() {
            for &sg in &[0.0, 0.4, 1.3] {
                assert_relative_eq!(
                    law.psi_coeff(sg, 1.0).unwrap(),
                    law.phi_coeff(sg).unwrap(),
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn closed_forms_match_generic_definition() {
        // Phi = phi^2 L(t(sigma)) and Psi = phi^(2-2g) Phi^g for every law.
        let gamma = 0.37;
        for law in laws() {
            for &sg in &[0.0, 0.2, 1.1, 3.0] {
                let t = law.t_of_sigma(sg).unwrap();
                let rho = law.rho(t);
                let phi = rho * rho * law.l_of_t(t);
                assert_relative_eq!(law.phi_coeff(sg).unwrap(), phi, max_relative = 1e-10);
                let psi = rho.powf(2.0 - 2.0 * gamma) * phi.powf(gamma);
                assert_relative_eq!(law.psi_coeff(sg, gamma).unwrap(), psi, max_relative = 1e-10);
                assert_relative_eq!(law.phi(sg).unwrap(), rho, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn bounds_examples() {
        let d = EvolutionLaw::exp_decay(0.1, 2);
        let b = d.coefficient_bounds(0.5, 0.0, 3.0).unwrap();
        assert_relative_eq!(b.phi_max, 0.8, epsilon = 1e-15);
        assert_relative_eq!(b.phi_min, 0.8 / 1.6, epsilon = 1e-15);
        let b = d.coefficient_bounds(0.5, 0.0, f64::INFINITY).unwrap();
        assert_eq!(b.phi_min, 0.0);

        let s = EvolutionLaw::static_domain(2).coefficient_bounds(0.5, 0.0, 10.0).unwrap();
        assert_eq!((s.phi_min, s.phi_max, s.psi_min, s.psi_max), (1.0, 1.0, 1.0, 1.0));

        let g = EvolutionLaw::exp_growth(0.1, 2);
        let b = g.coefficient_bounds(0.5, 0.0, 2.5).unwrap();
        assert_relative_eq!(b.phi_min, 1.2, epsilon = 1e-15);
        assert_relative_eq!(b.phi_max, 2.4, epsilon = 1e-14);
        assert!(g.coefficient_bounds(0.5, 0.0, 5.0).unwrap().phi_max.is_infinite());
    }

    #[test]
    fn logistic_bounds_bracket_samples() {
        let law = EvolutionLaw::logistic(0.1, 0.5, 3);
        let b = law.coefficient_bounds(2.0, 0.0, 4.0).unwrap();
        assert!(b.phi_min <= b.phi_max && b.psi_min <= b.psi_max && b.phi_min > 0.0);
        for k in 0..=40 {
            let sg = 4.0 * k as f64 / 40.0;
            let phi = law.phi_coeff(sg).unwrap();
            assert!(phi >= b.phi_min - 1e-12 && phi <= b.phi_max + 1e-12);
        }
    }

    #[test]
    fn validation() {
        assert!(EvolutionLaw::exp_decay(0.5, 2).validate().is_err());
        assert!(EvolutionLaw::logistic(0.1, 1.0, 2).validate().is_err());
        assert!(EvolutionLaw::static_domain(4).validate().is_err());
        for law in laws() {
            law.validate().unwrap();
        }
    }

    #[test]
    fn static_law_is_identity() {
        let s = EvolutionLaw::static_domain(3);
        for &x in &[0.0, 0.5, 9.0] {
            assert_eq!(s.rho(x), 1.0);
            assert_eq!(s.l_of_t(x), 1.0);
            assert_eq!(s.phi_coeff(x).unwrap(), 1.0);
            assert_eq!(s.psi_coeff(x, 0.7).unwrap(), 1.0);
        }
    }

    #[test]
    fn logistic_sigma_quadrature_agrees_with_richardson() {
        for law in [EvolutionLaw::logistic(0.1, 1.5, 2), EvolutionLaw::logistic(0.3, 0.5, 1)] {
            for &t in &[0.5, 4.0, 25.0] {
                // composite trapezoid on n and 2n panels, Richardson-combined
                let trap = |n: usize| {
                    let h = t / n as f64;
                    let f = |x: f64| law.rho(x).powi(-2);
                    let inner: f64 = (1..n).map(|k| f(k as f64 * h)).sum();
                    h * (0.5 * (f(0.0) + f(t)) + inner)
                };
                let rich = (4.0 * trap(4096) - trap(2048)) / 3.0;
                assert_relative_eq!(law.sigma_of_t_quadrature(t), rich, max_relative = 1e-8);
                assert_relative_eq!(law.sigma_of_t(t), rich, max_relative = 1e-8);
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn sigma_round_trip(t in 0.0f64..40.0, which in 0usize..5) {
            let law = laws()[which];
            let sg = law.sigma_of_t(t);
            let back = law.t_of_sigma(sg).unwrap();
            prop_assert!((back - t).abs() <= 1e-10 * t.max(1e-3), "t = {t}, back = {back}");
        }

        #[test]
        fn sigma_strictly_increasing(t in 0.0f64..30.0, dt in 1e-6f64..1.0, which in 0usize..5) {
            let law = laws()[which];
            prop_assert!(law.sigma_of_t(t + dt) > law.sigma_of_t(t));
        }

        #[test]
        fn decay_coefficients_stay_below_one(sg in 1e-6f64..200.0, gamma in 0.01f64..0.99) {
            let d = EvolutionLaw::exp_decay(0.1, 2);
            let phi = d.phi_coeff(sg).unwrap();
            let psi = d.psi_coeff(sg, gamma).unwrap();
            let small_phi = d.phi(sg).unwrap();
            prop_assert!(phi > 0.0 && phi < 1.0);
            prop_assert!(psi > 0.0 && psi < 1.0);
            prop_assert!(phi < small_phi * small_phi && small_phi * small_phi <= 1.0);
        }
    }
}
