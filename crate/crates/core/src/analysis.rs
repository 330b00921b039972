//! Blow-up bounds for the spatial mean, comparison and moment criteria,
//! blow-up detection with extrapolation, rate fitting and localization.
//!
//! The mean `F` of a solution is a supersolution of the Bernoulli problem
//! `F' = -Phi F + Psi F^omega`. Substituting `G = F^(1-omega)` linearizes it,
//! and `F` diverges once `(omega-1) I(sigma)` reaches `F(0)^(1-omega)`, where
//! `I(sigma) = int_0^sigma Psi(th) exp((1-omega) int_0^th Phi) dth`.
//! In the t clock the same integral reads `int_0^T L^gamma exp((1-omega) int_0^t L) dt`.

use crate::error::{invalid, Error, Result};
use crate::evolution::{CoefficientBounds, EvolutionLaw, LawKind};
use crate::mesh::{Field, Grid};
use crate::params::{DerivedIndices, Parameters};
use crate::quad;
use crate::series::{Clock, TimeSeries};

fn require_superlinear(idx: &DerivedIndices) -> Result<f64> {
    let w = idx.omega - 1.0;
    if !(w > 0.0) {
        return invalid(format!("the mean bounds need omega > 1 (omega = {})", idx.omega));
    }
    Ok(w)
}

// t-clock integrand of I, with the exponent accumulated in closed form
fn i_integrand(law: &EvolutionLaw, idx: &DerivedIndices, t: f64) -> f64 {
    law.l_of_t(t).powf(idx.gamma) * ((1.0 - idx.omega) * law.integral_of_l(t)).exp()
}

fn i_of_t(law: &EvolutionLaw, idx: &DerivedIndices, t_end: f64) -> f64 {
    let f = |t: f64| i_integrand(law, idx, t);
    if t_end.is_infinite() {
        let l_min = law.l_of_t(0.0).min(1.0);
        quad::integrate_to_infinity(&f, 0.0, (idx.omega - 1.0) * l_min, 1e-13)
    } else {
        quad::adaptive_simpson(&f, 0.0, t_end, 1e-13)
    }
}

/// `I(sigma_end)`; `sigma_end` may be the law's horizon or infinite.
pub fn i_sigma_upto(law: &EvolutionLaw, idx: &DerivedIndices, sigma_end: f64) -> Result<f64> {
    let w = require_superlinear(idx)?;
    law.validate()?;
    let n = law.dimension as f64;
    let b = law.beta;
    let g = idx.gamma;
    let sigma_end = sigma_end.min(law.sigma_max());
    if !(sigma_end >= 0.0) {
        return invalid("negative horizon");
    }
    Ok(match law.kind {
        LawKind::Logistic => {
            let t_end = if sigma_end.is_infinite() { f64::INFINITY } else { law.t_of_sigma(sigma_end)? };
            i_of_t(law, idx, t_end)
        }
        _ if b == 0.0 || law.kind == LawKind::Static => -(-w * sigma_end).exp_m1() / w,
        LawKind::ExpGrowth => {
            let k = w * (1.0 + n * b) / (2.0 * b);
            (1.0 + n * b).powf(g - 1.0) * (1.0 - (1.0 - 2.0 * b * sigma_end).max(0.0).powf(k)) / w
        }
        LawKind::ExpDecay => {
            let k = w * (1.0 - n * b) / (2.0 * b);
            let tail = if sigma_end.is_infinite() { 0.0 } else { (1.0 + 2.0 * b * sigma_end).powf(-k) };
            (1.0 - n * b).powf(g - 1.0) * (1.0 - tail) / w
        }
        LawKind::Static => unreachable!(),
    })
}

/// `I` over the whole attainable range of the law.
pub fn i_sigma(law: &EvolutionLaw, idx: &DerivedIndices) -> Result<f64> {
    i_sigma_upto(law, idx, f64::INFINITY)
}

/// Smallest initial mean for which the Bernoulli bound predicts blow-up,
/// `((omega - 1) I)^(1/(1-omega))`.
pub fn mean_threshold(law: &EvolutionLaw, idx: &DerivedIndices) -> Result<f64> {
    let w = require_superlinear(idx)?;
    Ok((w * i_sigma(law, idx)?).powf(-1.0 / w))
}

/// Threshold for the logistic law by quadrature in t.
pub fn sk1_threshold(idx: &DerivedIndices, beta: f64, m: f64, dimension: u32) -> Result<f64> {
    let law = EvolutionLaw::logistic(beta, m, dimension);
    law.validate()?;
    mean_threshold(&law, idx)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport {
    pub omega: f64,
    pub u0_mean: f64,
    pub i_sigma: Option<f64>,
    pub mean_threshold: Option<f64>,
    /// Upper bound for the blow-up time of the mean, in both clocks.
    pub sigma_upper: Option<f64>,
    pub t_upper: Option<f64>,
    pub applicable: bool,
}

impl BoundReport {
    /// `key=value` lines.
    pub fn to_kv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |x| format!("{x}"));
        format!(
            "applicable={}\nomega={}\nu0_mean={}\nI_sigma={}\nmean_threshold={}\nsigma_upper={}\nt_upper={}\n",
            self.applicable,
            self.omega,
            self.u0_mean,
            opt(self.i_sigma),
            opt(self.mean_threshold),
            opt(self.sigma_upper),
            opt(self.t_upper)
        )
    }
}

/// Closed-form upper bound for the blow-up time of the mean. Not applicable
/// when `omega <= 1` or when the initial mean does not exceed the threshold.
pub fn bernoulli_bound(law: &EvolutionLaw, idx: &DerivedIndices, u0_mean: f64) -> Result<BoundReport> {
    law.validate()?;
    let mut rep = BoundReport {
        omega: idx.omega,
        u0_mean,
        i_sigma: None,
        mean_threshold: None,
        sigma_upper: None,
        t_upper: None,
        applicable: false,
    };
    if !(idx.omega > 1.0) {
        return Ok(rep);
    }
    if !(u0_mean > 0.0) {
        return Err(Error::NonPositiveMean(u0_mean));
    }
    let w = idx.omega - 1.0;
    rep.i_sigma = Some(i_sigma(law, idx)?);
    let threshold = mean_threshold(law, idx)?;
    rep.mean_threshold = Some(threshold);
    if !(u0_mean > threshold) {
        return Ok(rep);
    }
    rep.applicable = true;
    let n = law.dimension as f64;
    let b = law.beta;
    let x = u0_mean.powf(-w);
    let sigma = match law.kind {
        _ if law.kind == LawKind::Static || (b == 0.0 && law.kind != LawKind::Logistic) => (-x).ln_1p() / (-w),
        LawKind::ExpGrowth => {
            let k = w * (1.0 + n * b) / (2.0 * b);
            (1.0 - (1.0 - x * (1.0 + n * b).powf(1.0 - idx.gamma)).powf(1.0 / k)) / (2.0 * b)
        }
        LawKind::ExpDecay => {
            let k = w * (1.0 - n * b) / (2.0 * b);
            ((1.0 - x * (1.0 - n * b).powf(1.0 - idx.gamma)).powf(-1.0 / k) - 1.0) / (2.0 * b)
        }
        _ => {
            let target = x / w;
            let mut hi = 1.0;
            while i_of_t(law, idx, hi) < target {
                hi *= 2.0;
                if hi > 1e6 {
                    return invalid("logistic bound did not bracket");
                }
            }
            let t = quad::bisect_increasing(|t| i_of_t(law, idx, t) - target, 0.0, hi, 1e-13);
            rep.t_upper = Some(t);
            law.sigma_of_t(t)
        }
    };
    rep.sigma_upper = Some(sigma);
    if rep.t_upper.is_none() {
        rep.t_upper = Some(law.t_of_sigma(sigma)?);
    }
    Ok(rep)
}

/// Numerical solution of the Bernoulli comparison problem.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliSolution {
    /// Clock the problem was integrated in (t only for the logistic law).
    pub clock: Clock,
    /// `(clock, F)` at every accepted step.
    pub points: Vec<(f64, f64)>,
    pub blowup_sigma: Option<f64>,
    pub blowup_t: Option<f64>,
}

impl BernoulliSolution {
    /// `F` at `clock` by linear interpolation; `None` past the last point.
    pub fn value_at(&self, clock: f64) -> Option<f64> {
        let k = self.points.partition_point(|&(c, _)| c < clock);
        if k == 0 {
            return self.points.first().filter(|p| p.0 == clock).map(|p| p.1);
        }
        let &(c1, f1) = self.points.get(k)?;
        let (c0, f0) = self.points[k - 1];
        Some(f0 + (f1 - f0) * (clock - c0) / (c1 - c0))
    }
}

/// Integrates `F' = -Phi F + Psi F^omega` (`F' = -L F + L^gamma F^omega` for
/// the logistic law, in t) from `F(0) = u0_mean` up to `end` in that clock,
/// with classical RK4 and step-doubling error control; `max_step` caps the
/// step. Divergence is declared once `F` exceeds `1e10 max(1, F(0))`, and the
/// time left to the pole is added from the leading-order tail.
pub fn bernoulli_oracle(
    law: &EvolutionLaw,
    idx: &DerivedIndices,
    u0_mean: f64,
    max_step: f64,
    end: f64,
) -> Result<BernoulliSolution> {
    law.validate()?;
    if !(max_step > 0.0) {
        return invalid("max_step must be positive");
    }
    if !(u0_mean > 0.0) {
        return Err(Error::NonPositiveMean(u0_mean));
    }
    let omega = idx.omega;
    let gamma = idx.gamma;
    let in_t = law.kind == LawKind::Logistic;
    let end = if in_t { end } else { end.min(law.sigma_max() * (1.0 - 1e-9)) };
    let coeff = |c: f64| -> (f64, f64) {
        if in_t {
            let l = law.l_of_t(c);
            (l, l.powf(gamma))
        } else {
            (
                law.phi_coeff(c).unwrap_or(f64::INFINITY),
                law.psi_coeff(c, gamma).unwrap_or(f64::INFINITY),
            )
        }
    };
    let f = |c: f64, y: f64| {
        let (a, b) = coeff(c);
        -a * y + b * y.powf(omega)
    };
    let rk4 = |c: f64, y: f64, h: f64| {
        let k1 = f(c, y);
        let k2 = f(c + 0.5 * h, y + 0.5 * h * k1);
        let k3 = f(c + 0.5 * h, y + 0.5 * h * k2);
        let k4 = f(c + h, y + h * k3);
        y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    };
    let cap = 1e10 * u0_mean.max(1.0);
    let tol = 1e-11;
    let mut c = 0.0;
    let mut y = u0_mean;
    let mut h = max_step;
    let mut points = vec![(c, y)];
    let mut blowup = None;
    while c < end {
        let h_try = h.min(end - c);
        let full = rk4(c, y, h_try);
        let half = rk4(c + 0.5 * h_try, rk4(c, y, 0.5 * h_try), 0.5 * h_try);
        let err = (half - full).abs() / 15.0;
        let scale = tol * half.abs().max(1e-12);
        if !half.is_finite() || !full.is_finite() || err > scale {
            h = 0.25 * h_try;
            if h < 1e-15 * c.max(1.0) {
                return Err(Error::StepUnderflow { clock: c, sup: y });
            }
            continue;
        }
        c += h_try;
        y = half + (half - full) / 15.0;
        points.push((c, y));
        if y >= cap {
            let (_, psi) = coeff(c);
            blowup = Some(c + y.powf(1.0 - omega) / ((omega - 1.0) * psi));
            break;
        }
        if !(y > 0.0) {
            break;
        }
        let grow = if err > 0.0 { 0.9 * (scale / err).powf(0.2) } else { 4.0 };
        h = (h_try * grow.clamp(0.2, 4.0)).min(max_step);
    }
    let (blowup_sigma, blowup_t) = match blowup {
        None => (None, None),
        Some(b) if in_t => (Some(law.sigma_of_t(b)), Some(b)),
        Some(b) => (Some(b), law.t_of_sigma(b).ok()),
    };
    Ok(BernoulliSolution {
        clock: if in_t { Clock::T } else { Clock::Sigma },
        points,
        blowup_sigma,
        blowup_t,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Obu1Check {
    /// `0 < gamma < 1` and `r <= 1 < (p-1)/r`.
    pub applicable: bool,
    /// `w(0) < (m_Psi / M_Phi) zeta(0)^(1-gamma)`
    pub condition1: bool,
    /// `(p-1)/r >= 2` and `w(0) < 1`
    pub condition2: bool,
    pub zeta0: f64,
    pub w0: f64,
}

/// Moment criteria for blow-up of the non-local equation, with
/// `zeta = ⨍u^r` and `w = ⨍u^(r+1-p)`.
pub fn obu1_check(u0: &Field, params: &Parameters, bounds: &CoefficientBounds) -> Result<Obu1Check> {
    let idx = params.indices()?;
    let zeta0 = crate::mesh::mean(u0, params.r)?;
    let w0 = crate::mesh::mean(u0, params.r + 1.0 - params.p)?;
    let applicable = idx.gamma > 0.0 && idx.gamma < 1.0 && params.r <= 1.0 && 1.0 < idx.pi;
    let ratio = bounds.psi_min / bounds.phi_max;
    Ok(Obu1Check {
        applicable,
        condition1: w0 < ratio * zeta0.powf(1.0 - idx.gamma),
        condition2: idx.pi >= 2.0 && w0 < 1.0,
        zeta0,
        w0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    BlowUp,
    Quench,
    Bounded,
    HorizonReached,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::BlowUp => "BlowUp",
            Verdict::Quench => "Quench",
            Verdict::Bounded => "Bounded",
            Verdict::HorizonReached => "HorizonReached",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowUpReport {
    pub verdict: Verdict,
    pub event_t: Option<f64>,
    pub event_sigma: Option<f64>,
    pub extrapolated_t: Option<f64>,
    pub extrapolated_sigma: Option<f64>,
    pub rate_exponent: Option<f64>,
    pub max_sup: f64,
    pub final_sup: f64,
    pub final_t: f64,
    pub final_sigma: f64,
    pub samples: usize,
}

impl BlowUpReport {
    pub fn to_kv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "n/a".to_string(), |x| format!("{x}"));
        format!(
            "verdict={}\nevent_time_t={}\nevent_time_sigma={}\nextrapolated_time_t={}\nextrapolated_time_sigma={}\nfitted_rate_exponent={}\nmax_sup_norm={}\nfinal_sup_norm={}\nfinal_t={}\nfinal_sigma={}\nsamples={}\n",
            self.verdict,
            opt(self.event_t),
            opt(self.event_sigma),
            opt(self.extrapolated_t),
            opt(self.extrapolated_sigma),
            opt(self.rate_exponent),
            self.max_sup,
            self.final_sup,
            self.final_t,
            self.final_sigma,
            self.samples
        )
    }
}

/// Default sup-norm window for rate fits.
pub const RATE_WINDOW: (f64, f64) = (1e2, 1e5);

/// Fewest and most samples used by the blow-up extrapolation.
const EXTRAPOLATION_MIN: usize = 5;
const EXTRAPOLATION_MAX: usize = 8;

/// Blow-up time from `sup^-(p-1)` being linear in the clock near the pole:
/// fits the last five to eight samples (all with `sup < below`) and returns
/// the zero of the fitted line.
pub fn extrapolate_blowup(series: &TimeSeries, p: f64, clock: Clock, below: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::NoFit(format!("no power-law blow-up model for p = {p}")));
    }
    let pre: Vec<_> = series.samples.iter().filter(|s| s.sup_norm < below).collect();
    if pre.len() < EXTRAPOLATION_MIN {
        return Err(Error::NoFit(format!("{} samples before the threshold, need {EXTRAPOLATION_MIN}", pre.len())));
    }
    let tail = &pre[pre.len().saturating_sub(EXTRAPOLATION_MAX)..];
    let xs: Vec<f64> = tail.iter().map(|s| s.clock(clock)).collect();
    let ys: Vec<f64> = tail.iter().map(|s| s.sup_norm.powf(1.0 - p)).collect();
    match quad::linear_fit(&xs, &ys) {
        Some((slope, intercept)) if slope < 0.0 => Ok(-intercept / slope),
        _ => Err(Error::NoFit("sup norm is not growing towards a pole".into())),
    }
}

/// Classifies a run from its series. Blow-up is the first sample at or above
/// `blowup`, quenching the first at or below `quench`; otherwise `Bounded`.
pub fn detect_blowup(series: &TimeSeries, p: f64, blowup: f64, quench: f64) -> BlowUpReport {
    let last = series.last().copied();
    let mut rep = BlowUpReport {
        verdict: Verdict::Bounded,
        event_t: None,
        event_sigma: None,
        extrapolated_t: None,
        extrapolated_sigma: None,
        rate_exponent: None,
        max_sup: series.max_sup(),
        final_sup: last.map_or(f64::NAN, |s| s.sup_norm),
        final_t: last.map_or(f64::NAN, |s| s.t),
        final_sigma: last.map_or(f64::NAN, |s| s.sigma),
        samples: series.len(),
    };
    if let Some(k) = series.samples.iter().position(|s| s.sup_norm >= blowup) {
        let hit = series.samples[k];
        rep.verdict = Verdict::BlowUp;
        rep.event_t = Some(hit.t);
        rep.event_sigma = Some(hit.sigma);
        let head = TimeSeries {
            samples: series.samples[..k].to_vec(),
        };
        rep.extrapolated_t = extrapolate_blowup(&head, p, Clock::T, blowup).ok();
        rep.extrapolated_sigma = extrapolate_blowup(&head, p, Clock::Sigma, blowup).ok();
        if let Some(star) = rep.extrapolated_sigma {
            rep.rate_exponent = fit_rate(&head, Clock::Sigma, star, (RATE_WINDOW.0, RATE_WINDOW.1.min(blowup))).ok();
        }
    } else if let Some(s) = series.samples.iter().find(|s| s.sup_norm <= quench) {
        rep.verdict = Verdict::Quench;
        rep.event_t = Some(s.t);
        rep.event_sigma = Some(s.sigma);
    }
    rep
}

/// Least-squares slope of `ln sup` against `ln(star - clock)` over samples
/// whose sup norm lies in `window`; about `-1/(p-1)` for a pole of order `1/(p-1)`.
pub fn fit_rate(series: &TimeSeries, clock: Clock, star: f64, window: (f64, f64)) -> Result<f64> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = series
        .samples
        .iter()
        .filter(|s| s.sup_norm >= window.0 && s.sup_norm <= window.1 && s.clock(clock) < star)
        .map(|s| ((star - s.clock(clock)).ln(), s.sup_norm.ln()))
        .unzip();
    if xs.len() < 3 {
        return Err(Error::NoFit(format!("{} samples in the window, need 3", xs.len())));
    }
    if ys.iter().all(|&y| y == ys[0]) {
        return Err(Error::NoFit("sup norm is constant over the window".into()));
    }
    quad::linear_fit(&xs, &ys)
        .map(|(slope, _)| slope)
        .ok_or_else(|| Error::NoFit("zero variance in the window".into()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowupLocation {
    pub index: usize,
    /// `(x, y)` on the square, `(R, 0)` on the ball.
    pub position: (f64, f64),
    /// Exponent `e` of the envelope `C R^-e` fitted on `[2h, 0.5]` (ball only).
    pub envelope_exponent: Option<f64>,
}

/// Location of the maximum of a snapshot, plus the radial envelope exponent.
pub fn locate_blowup(snapshot: &Field) -> BlowupLocation {
    let (index, _) = snapshot
        .values
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (k, &v)| if v > best.1 { (k, v) } else { best });
    match snapshot.grid {
        Grid::Rect(g) => BlowupLocation {
            index,
            position: g.coords(index),
            envelope_exponent: None,
        },
        Grid::Radial(g) => {
            let h = g.h();
            let (xs, ys): (Vec<f64>, Vec<f64>) = (0..g.points)
                .map(|i| (g.radius(i), snapshot.values[i]))
                .filter(|&(r, v)| r >= 2.0 * h - 1e-12 && r <= 0.5 + 1e-12 && v > 0.0)
                .map(|(r, v)| (r.ln(), v.ln()))
                .unzip();
            BlowupLocation {
                index,
                position: (g.radius(index), 0.0),
                envelope_exponent: quad::linear_fit(&xs, &ys).map(|(slope, _)| -slope),
            }
        }
    }
}
