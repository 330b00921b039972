//! Explicit Euler integration of the non-local equation (in either clock),
//! the shadow ODE-PDE system and the two-species system.
//!
//! The step is the configured `dt` clipped by three caps: the explicit
//! diffusion limit of the mesh, a relative growth limit
//! `growth_limit * sup|u| / sup|u'|` that resolves blow-up, and the
//! relaxation rate of the inhibitor when it has one. Steps also shrink to
//! land exactly on snapshot times and on the end of the horizon.

use serde::{Deserialize, Serialize};

use crate::analysis::{detect_blowup, BlowUpReport, Verdict};
use crate::error::{invalid, Error, Result};
use crate::evolution::{EvolutionLaw, LawKind};
use crate::initdata::{build_initial, InitSpec};
use crate::mesh::{Field, Grid, Mesh, RadialBoundary};
use crate::params::{DerivedIndices, Parameters};
use crate::pow::{with_pow, Pow};
use crate::series::{Sample, TimeSeries};

/// Positivity floor for the inhibitor.
pub const INHIBITOR_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    /// `u_t = D1/rho^2 Δu - L u + c(L) u^p / (⨍u^r)^gamma`
    NonlocalT,
    /// `u_σ = D1 Δu - Phi u + Psi u^p / (⨍u^r)^gamma`
    NonlocalSigma,
    /// `u_σ = D1 Δu - Phi u + phi^2 u^p / eta^q`, `tau eta' = -Phi eta + phi^2 ⨍u^r / eta^s`
    ShadowTau,
    /// `u_t = D1/rho^2 Δu - L u + u^p/v^q`, `tau v_t = D2/rho^2 Δv - L v + u^r/v^s`
    #[serde(rename = "full_rd")]
    FullRD,
}

impl SystemKind {
    pub fn uses_sigma_clock(self) -> bool {
        matches!(self, SystemKind::NonlocalSigma | SystemKind::ShadowTau)
    }
}

/// Reaction coefficient `c(L)` of the t-clock non-local equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReactionScaling {
    /// `c = L^-gamma`
    #[default]
    InverseGamma,
    /// `c = L^gamma`, the form obtained by rescaling the sigma-clock
    /// equation, and the quasi-steady limit of the two-species system.
    Gamma,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemSpec {
    pub kind: SystemKind,
    #[serde(default)]
    pub reaction_scaling: ReactionScaling,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    /// Base step in the system's native clock.
    pub dt: f64,
    /// Horizon in the native clock.
    pub end_time: f64,
    #[serde(default = "default_blowup")]
    pub blowup_threshold: f64,
    #[serde(default = "default_quench")]
    pub quench_threshold: f64,
    #[serde(default = "default_stride")]
    pub sample_stride: u64,
    /// Initial inhibitor for the shadow system; quasi-steady value when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta0: Option<f64>,
    #[serde(default = "default_v0")]
    pub v0: f64,
    /// Fraction of the explicit stability limits actually used.
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default = "default_growth")]
    pub growth_limit: f64,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    #[serde(default)]
    pub snapshot_final: bool,
}

fn default_blowup() -> f64 {
    1e6
}
fn default_quench() -> f64 {
    1e-3
}
fn default_stride() -> u64 {
    50
}
fn default_v0() -> f64 {
    2.0
}
fn default_cfl() -> f64 {
    1.0
}
fn default_growth() -> f64 {
    0.1
}

impl SolverSettings {
    pub fn new(dt: f64, end_time: f64) -> Self {
        Self {
            dt,
            end_time,
            blowup_threshold: default_blowup(),
            quench_threshold: default_quench(),
            sample_stride: default_stride(),
            eta0: None,
            v0: default_v0(),
            cfl: default_cfl(),
            growth_limit: default_growth(),
            snapshot_times: Vec::new(),
            snapshot_final: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default)]
    pub name: String,
    pub system: SystemSpec,
    pub params: Parameters,
    pub evolution: EvolutionLaw,
    pub grid: Grid,
    pub init: InitSpec,
    pub solver: SolverSettings,
}

impl RunConfig {
    pub fn validate(&self) -> Result<DerivedIndices> {
        let idx = self.params.indices()?;
        self.evolution.validate()?;
        self.grid.validate()?;
        self.init.validate()?;
        let kind = self.system.kind;
        match self.grid {
            Grid::Rect(_) if self.evolution.dimension != 2 => {
                return invalid("the square grid needs dimension = 2");
            }
            Grid::Radial(g) if g.dimension != self.evolution.dimension => {
                return invalid(format!(
                    "radial grid dimension {} differs from evolution dimension {}",
                    g.dimension, self.evolution.dimension
                ));
            }
            _ => {}
        }
        if kind.uses_sigma_clock() && self.evolution.kind == LawKind::Logistic {
            return Err(Error::Unsupported(
                "the logistic law has no closed-form inverse clock; use a t-clock system".into(),
            ));
        }
        if matches!(kind, SystemKind::ShadowTau | SystemKind::FullRD) && !(self.params.tau > 0.0) {
            return invalid("tau must be positive for systems with an inhibitor equation");
        }
        if kind == SystemKind::FullRD && !(self.params.d2 > 0.0) {
            return invalid("D2 must be positive");
        }
        if !(self.params.d1 >= 0.0) {
            return invalid("D1 must be non-negative");
        }
        let s = &self.solver;
        if !(s.dt > 0.0 && s.dt.is_finite()) {
            return invalid(format!("dt must be positive (got {})", s.dt));
        }
        if !(s.end_time > 0.0 && s.end_time.is_finite()) {
            return invalid(format!("end_time must be positive (got {})", s.end_time));
        }
        if !(s.quench_threshold >= 0.0 && s.blowup_threshold > s.quench_threshold) {
            return invalid("need 0 <= quench_threshold < blowup_threshold");
        }
        if s.sample_stride == 0 {
            return invalid("sample_stride must be at least 1");
        }
        if !(s.cfl > 0.0 && s.cfl <= 1.0) {
            return invalid("cfl must lie in (0, 1]");
        }
        if !(s.growth_limit > 0.0 && s.growth_limit <= 1.0) {
            return invalid("growth_limit must lie in (0, 1]");
        }
        if matches!(s.eta0, Some(e) if !(e > 0.0)) || !(s.v0 > 0.0) {
            return invalid("initial inhibitor values must be positive");
        }
        if s.snapshot_times.iter().any(|&x| !(x >= 0.0 && x <= s.end_time)) {
            return invalid("snapshot times must lie in [0, end_time]");
        }
        Ok(idx)
    }
}

/// Inhibitor state.
#[derive(Debug, Clone, PartialEq)]
pub enum Aux {
    None,
    Eta(f64),
    V(Vec<f64>),
}

#[derive(Debug, Clone, Copy)]
struct Coeffs {
    diff_u: f64,
    diff_v: f64,
    decay: f64,
    gain: f64,
    source: f64,
    // L in the t clock, Phi/phi^2 in the sigma clock
    l: f64,
}

/// Right-hand side summary used by the step controller.
#[derive(Debug, Clone, Copy, Default)]
struct RhsInfo {
    du_max: f64,
    aux_rate: f64,
    aux_rel: f64,
}

/// Compiled model: configuration plus mesh and precomputed powers.
#[derive(Debug, Clone)]
pub struct Model {
    pub config: RunConfig,
    pub indices: DerivedIndices,
    pub mesh: Mesh,
    pw_p: Pow,
    pw_q: Pow,
    pw_r: Pow,
    pw_s: Pow,
    pw_s1: Pow,
}

impl Model {
    pub fn new(config: RunConfig) -> Result<Self> {
        let indices = config.validate()?;
        let mesh = Mesh::new(config.grid)?;
        let pr = config.params;
        Ok(Self {
            indices,
            mesh,
            pw_p: Pow::new(pr.p),
            pw_q: Pow::new(pr.q),
            pw_r: Pow::new(pr.r),
            pw_s: Pow::new(pr.s),
            pw_s1: Pow::new(pr.s + 1.0),
            config,
        })
    }

    pub fn kind(&self) -> SystemKind {
        self.config.system.kind
    }

    fn law(&self) -> &EvolutionLaw {
        &self.config.evolution
    }

    fn coeffs(&self, clock: f64) -> Result<Coeffs> {
        let law = self.law();
        let pr = &self.config.params;
        let gamma = self.indices.gamma;
        Ok(match self.kind() {
            SystemKind::NonlocalSigma | SystemKind::ShadowTau => {
                let phi_big = law.phi_coeff(clock)?;
                let phi = law.phi(clock)?;
                let phi2 = phi * phi;
                let gain = match self.kind() {
                    SystemKind::NonlocalSigma => law.psi_coeff(clock, gamma)?,
                    _ => phi2,
                };
                Coeffs {
                    diff_u: pr.d1,
                    diff_v: 0.0,
                    decay: phi_big,
                    gain,
                    source: phi2,
                    l: phi_big / phi2,
                }
            }
            SystemKind::NonlocalT | SystemKind::FullRD => {
                let rho = law.rho(clock);
                let l = law.l_of_t(clock);
                let gain = match (self.kind(), self.config.system.reaction_scaling) {
                    (SystemKind::FullRD, _) => 1.0,
                    (_, ReactionScaling::InverseGamma) => l.powf(-gamma),
                    (_, ReactionScaling::Gamma) => l.powf(gamma),
                };
                Coeffs {
                    diff_u: pr.d1 / (rho * rho),
                    diff_v: pr.d2 / (rho * rho),
                    decay: l,
                    gain,
                    source: 1.0,
                    l,
                }
            }
        })
    }

    fn dirichlet(&self) -> bool {
        matches!(self.config.grid, Grid::Radial(g) if g.boundary == RadialBoundary::Dirichlet)
    }

    /// Non-local mean `⨍u^r`.
    fn zeta(&self, u: &[f64]) -> Result<f64> {
        let r = self.config.params.r;
        let z = self.mesh.mean_unchecked(u, r);
        if !(z > 0.0) {
            return Err(Error::NonPositiveMean(z));
        }
        Ok(z)
    }

    /// Pointwise right-hand side at `clock`. Returns `u'` and the inhibitor
    /// derivative (`None`, `eta'` or `v'`).
    pub fn rhs(&self, u: &Field, aux: &Aux, clock: f64) -> Result<(Field, Aux)> {
        let n = u.values.len();
        let mut du = vec![0.0; n];
        let mut daux = match aux {
            Aux::V(v) => Aux::V(vec![0.0; v.len()]),
            Aux::Eta(_) => Aux::Eta(0.0),
            Aux::None => Aux::None,
        };
        let mut lap = vec![0.0; n];
        let mut lap_v = vec![0.0; n];
        self.rhs_into(&u.values, aux, clock, &mut du, &mut daux, &mut lap, &mut lap_v)?;
        Ok((Field::new(u.grid, du)?, daux))
    }

    #[allow(clippy::too_many_arguments)]
    fn rhs_into(
        &self,
        u: &[f64],
        aux: &Aux,
        clock: f64,
        du: &mut [f64],
        daux: &mut Aux,
        lap: &mut [f64],
        lap_v: &mut [f64],
    ) -> Result<RhsInfo> {
        let c = self.coeffs(clock)?;
        let pr = &self.config.params;
        let tau = pr.tau;
        let gamma = self.indices.gamma;
        let pw_p = self.pw_p;
        self.mesh.laplacian_into(u, lap);
        let mut info = RhsInfo::default();

        let pointwise = |k: f64, du: &mut [f64]| {
            with_pow!(pw_p, up => {
                let mut m = 0.0f64;
                for ((d, &ui), &li) in du.iter_mut().zip(u).zip(lap.iter()) {
                    let val = c.diff_u * li - c.decay * ui + k * up(ui);
                    *d = val;
                    m = m.max(val.abs());
                }
                m
            })
        };

        match (self.kind(), aux, &mut *daux) {
            (SystemKind::NonlocalSigma | SystemKind::NonlocalT, _, _) => {
                let zeta = self.zeta(u)?;
                info.du_max = pointwise(c.gain / zeta.powf(gamma), du);
            }
            (SystemKind::ShadowTau, Aux::Eta(eta), Aux::Eta(deta)) => {
                let eta = *eta;
                let zeta = self.zeta(u)?;
                info.du_max = pointwise(c.gain / self.pw_q.apply(eta), du);
                *deta = (-c.decay * eta + c.source * zeta / self.pw_s.apply(eta)) / tau;
                info.aux_rate = (c.decay + pr.s.abs() * c.source * zeta / self.pw_s1.apply(eta)) / tau;
                info.aux_rel = deta.abs() / eta;
            }
            (SystemKind::FullRD, Aux::V(v), Aux::V(dv)) => {
                self.mesh.laplacian_into(v, lap_v);
                let (pw_q, pw_r, pw_s) = (self.pw_q, self.pw_r, self.pw_s);
                let s_abs = pr.s.abs();
                let inv_tau = 1.0 / tau;
                let mut du_max = 0.0f64;
                let mut rate = 0.0f64;
                let mut rel = 0.0f64;
                for i in 0..u.len() {
                    let ui = u[i];
                    let vi = v[i];
                    let inv_v = 1.0 / vi;
                    let src = pw_r.apply(ui) * pw_s.apply(inv_v);
                    let d = c.diff_u * lap[i] - c.decay * ui + pw_p.apply(ui) * pw_q.apply(inv_v);
                    let e = (c.diff_v * lap_v[i] - c.decay * vi + src) * inv_tau;
                    du[i] = d;
                    dv[i] = e;
                    du_max = du_max.max(d.abs());
                    rate = rate.max(src * inv_v);
                    rel = rel.max(e.abs() * inv_v);
                }
                rate = (c.decay + s_abs * rate) * inv_tau;
                info.du_max = du_max;
                info.aux_rate = rate;
                info.aux_rel = rel;
            }
            _ => return Err(Error::Unsupported("inhibitor state does not match the system".into())),
        }
        if self.dirichlet() {
            let last = u.len() - 1;
            du[last] = 0.0;
            if let Aux::V(dv) = daux {
                dv[last] = 0.0;
            }
        }
        Ok(info)
    }

    fn diffusion_cap(&self, clock: f64) -> Result<f64> {
        let c = self.coeffs(clock)?;
        let limit = self.mesh.stability_limit() * self.config.solver.cfl;
        let mut cap = if c.diff_u > 0.0 { limit / c.diff_u } else { f64::INFINITY };
        if self.kind() == SystemKind::FullRD {
            cap = cap.min(limit * self.config.params.tau / c.diff_v);
        }
        Ok(cap)
    }

    fn other_clock(&self, clock: f64) -> Result<f64> {
        if self.kind().uses_sigma_clock() {
            self.law().t_of_sigma(clock)
        } else {
            Ok(self.law().sigma_of_t(clock))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepStatus {
    Advanced { dt: f64 },
    /// The next step would reach the end of the attainable sigma range.
    Horizon,
}

/// Mutable state of a run.
#[derive(Debug, Clone)]
pub struct RunState {
    pub model: Model,
    pub u: Vec<f64>,
    pub aux: Aux,
    pub t: f64,
    pub sigma: f64,
    pub steps: u64,
    du: Vec<f64>,
    daux: Aux,
    lap: Vec<f64>,
    lap_v: Vec<f64>,
    sup: f64,
    min: f64,
}

impl RunState {
    pub fn new(config: RunConfig) -> Result<Self> {
        let model = Model::new(config)?;
        let cfg = &model.config;
        let u0 = build_initial(&cfg.init, cfg.grid, cfg.params.p)?;
        let sup = crate::mesh::sup_norm(&u0);
        let min = u0.min();
        if !(cfg.solver.blowup_threshold > sup) {
            return invalid(format!(
                "blowup_threshold {} must exceed the initial sup norm {sup}",
                cfg.solver.blowup_threshold
            ));
        }
        if !(cfg.solver.quench_threshold < min) {
            return invalid(format!(
                "quench_threshold {} must be below the initial minimum {min}",
                cfg.solver.quench_threshold
            ));
        }
        let n = u0.values.len();
        let aux = match cfg.system.kind {
            SystemKind::NonlocalT | SystemKind::NonlocalSigma => Aux::None,
            SystemKind::ShadowTau => {
                let eta = match cfg.solver.eta0 {
                    Some(e) => e,
                    None => {
                        let zeta = model.zeta(&u0.values)?;
                        let c = model.coeffs(0.0)?;
                        (c.source * zeta / c.decay).powf(1.0 / (cfg.params.s + 1.0))
                    }
                };
                Aux::Eta(eta)
            }
            SystemKind::FullRD => Aux::V(vec![cfg.solver.v0; n]),
        };
        let daux = match &aux {
            Aux::V(v) => Aux::V(vec![0.0; v.len()]),
            Aux::Eta(_) => Aux::Eta(0.0),
            Aux::None => Aux::None,
        };
        Ok(Self {
            model,
            u: u0.values,
            aux,
            daux,
            t: 0.0,
            sigma: 0.0,
            steps: 0,
            du: vec![0.0; n],
            lap: vec![0.0; n],
            lap_v: vec![0.0; n],
            sup,
            min,
        })
    }

    pub fn clock(&self) -> f64 {
        if self.model.kind().uses_sigma_clock() {
            self.sigma
        } else {
            self.t
        }
    }

    fn set_clock(&mut self, clock: f64) -> Result<()> {
        let other = self.model.other_clock(clock)?;
        if self.model.kind().uses_sigma_clock() {
            self.sigma = clock;
            self.t = other;
        } else {
            self.t = clock;
            self.sigma = other;
        }
        Ok(())
    }

    pub fn sup_norm(&self) -> f64 {
        self.sup
    }

    pub fn min_u(&self) -> f64 {
        self.min
    }

    pub fn field(&self) -> Field {
        Field {
            grid: self.model.config.grid,
            values: self.u.clone(),
        }
    }

    /// One explicit Euler step, never going past `target` in the native clock.
    pub fn step_towards(&mut self, target: f64) -> Result<StepStatus> {
        let clock = self.clock();
        // the coefficients degenerate at the end of the sigma range, so the
        // gate uses the nominal step rather than the adaptive one
        let horizon = self.model.law().sigma_max();
        if self.model.kind().uses_sigma_clock() && clock + self.model.config.solver.dt >= horizon {
            return Ok(StepStatus::Horizon);
        }
        let info = self.model.rhs_into(
            &self.u,
            &self.aux,
            clock,
            &mut self.du,
            &mut self.daux,
            &mut self.lap,
            &mut self.lap_v,
        )?;
        let settings = &self.model.config.solver;
        let mut dt = settings.dt.min(self.model.diffusion_cap(clock)?);
        if info.du_max > 0.0 {
            dt = dt.min(settings.growth_limit * self.sup / info.du_max);
        }
        if info.aux_rate > 0.0 {
            dt = dt.min(settings.cfl / info.aux_rate);
        }
        if info.aux_rel > 0.0 {
            dt = dt.min(settings.growth_limit / info.aux_rel);
        }
        let mut next = clock + dt;
        if next >= target * (1.0 - 1e-12) {
            dt = target - clock;
            next = target;
        }
        if !(next > clock) {
            return Err(Error::StepUnderflow { clock, sup: self.sup });
        }

        let mut sup = f64::NEG_INFINITY;
        let mut min = f64::INFINITY;
        for (ui, di) in self.u.iter_mut().zip(&self.du) {
            *ui += dt * di;
            sup = sup.max(*ui);
            min = min.min(*ui);
        }
        match (&mut self.aux, &self.daux) {
            (Aux::Eta(eta), Aux::Eta(deta)) => {
                *eta += dt * deta;
                if !eta.is_finite() {
                    return Err(Error::NonFinite { t: self.t });
                }
                if *eta < INHIBITOR_FLOOR {
                    return Err(Error::NonPositive { what: "eta", value: *eta });
                }
            }
            (Aux::V(v), Aux::V(dv)) => {
                let mut vmin = f64::INFINITY;
                for (vi, di) in v.iter_mut().zip(dv) {
                    *vi += dt * di;
                    vmin = vmin.min(*vi);
                }
                if vmin.is_nan() {
                    return Err(Error::NonFinite { t: self.t });
                }
                if vmin < INHIBITOR_FLOOR {
                    return Err(Error::NonPositive { what: "v", value: vmin });
                }
            }
            _ => {}
        }
        if !sup.is_finite() || min.is_nan() {
            return Err(Error::NonFinite { t: self.t });
        }
        if !(min > 0.0) {
            return Err(Error::NonPositive { what: "u", value: min });
        }
        self.sup = sup;
        self.min = min;
        self.steps += 1;
        self.set_clock(next)?;
        Ok(StepStatus::Advanced { dt })
    }

    /// One step bounded by the configured end of the horizon.
    pub fn step(&mut self) -> Result<StepStatus> {
        let end = self.model.config.solver.end_time;
        self.step_towards(end)
    }

    pub fn sample(&self) -> Result<Sample> {
        let mesh = &self.model.mesh;
        let pr = &self.model.config.params;
        let zeta = self.model.zeta(&self.u)?;
        let aux = match &self.aux {
            Aux::Eta(e) => *e,
            Aux::V(v) => v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            Aux::None => {
                let l = self.model.coeffs(self.clock())?.l;
                (zeta / l).powf(1.0 / (pr.s + 1.0))
            }
        };
        Ok(Sample {
            t: self.t,
            sigma: self.sigma,
            sup_norm: self.sup,
            mean_u: mesh.mean_unchecked(&self.u, 1.0),
            zeta,
            w_moment: mesh.mean_unchecked(&self.u, pr.r + 1.0 - pr.p),
            aux,
            min_u: self.min,
            steps: self.steps,
        })
    }
}

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub series: TimeSeries,
    pub report: BlowUpReport,
    /// `(native clock, field)` pairs; the final state is included when requested.
    pub snapshots: Vec<(f64, Field)>,
    pub final_field: Field,
    pub steps: u64,
}

/// Sup norms grow by at least this factor between forced samples.
const SAMPLE_GROWTH: f64 = 1.25;

/// Integrates until blow-up, quenching, the horizon or `end_time`.
pub fn advance(config: &RunConfig) -> Result<RunOutput> {
    let mut st = RunState::new(config.clone())?;
    let settings = st.model.config.solver.clone();
    let p = st.model.config.params.p;
    let mut series = TimeSeries::default();
    let mut snapshots = Vec::new();

    let mut marks: Vec<f64> = settings.snapshot_times.clone();
    marks.sort_by(f64::total_cmp);
    marks.dedup();
    let mut marks = marks.into_iter().peekable();
    while let Some(&m) = marks.peek() {
        if m > 0.0 {
            break;
        }
        snapshots.push((0.0, st.field()));
        marks.next();
    }

    series.push(st.sample()?);
    let mut last_sampled_sup = st.sup_norm();
    let mut reached_end = false;
    loop {
        let sup = st.sup_norm();
        if sup >= settings.blowup_threshold || sup <= settings.quench_threshold {
            break;
        }
        if st.clock() >= settings.end_time {
            reached_end = true;
            break;
        }
        let target = marks.peek().copied().unwrap_or(settings.end_time);
        match st.step_towards(target)? {
            StepStatus::Horizon => {
                reached_end = true;
                break;
            }
            StepStatus::Advanced { .. } => {}
        }
        let at_mark = st.clock() == target && marks.peek().is_some();
        if at_mark {
            snapshots.push((target, st.field()));
            marks.next();
        }
        let sup = st.sup_norm();
        let terminal = sup >= settings.blowup_threshold
            || sup <= settings.quench_threshold
            || st.clock() >= settings.end_time;
        if terminal
            || at_mark
            || st.steps % settings.sample_stride == 0
            || sup >= SAMPLE_GROWTH * last_sampled_sup
        {
            series.push(st.sample()?);
            last_sampled_sup = sup;
        }
    }
    if series.last().map(|s| s.steps) != Some(st.steps) {
        series.push(st.sample()?);
    }
    if settings.snapshot_final {
        snapshots.push((st.clock(), st.field()));
    }

    let mut report = detect_blowup(&series, p, settings.blowup_threshold, settings.quench_threshold);
    if report.verdict == Verdict::Bounded && reached_end && !is_stationary(&series) {
        report.verdict = Verdict::HorizonReached;
    }
    Ok(RunOutput {
        series,
        report,
        final_field: st.field(),
        snapshots,
        steps: st.steps,
    })
}

fn is_stationary(series: &TimeSeries) -> bool {
    let (lo, hi) = series
        .samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s.sup_norm), hi.max(s.sup_norm)));
    hi - lo <= 1e-9 * hi.abs().max(1e-300)
}
