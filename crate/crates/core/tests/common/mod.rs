#![allow(dead_code)]

use shadowgm_core::presets::{preset, PresetId};
use shadowgm_core::*;
use std::time::Instant;

pub struct Check {
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(pass: bool, detail: impl Into<String>) -> Self {
        Check { pass, detail: detail.into() }
    }

    pub fn line(&self, label: &str) -> String {
        format!("{} {label}: {}", if self.pass { "PASS" } else { "FAIL" }, self.detail)
    }
}

pub fn timed(cfg: &RunConfig) -> (RunOutput, f64) {
    let t0 = Instant::now();
    let out = advance(cfg).unwrap_or_else(|e| panic!("{}: {e}", cfg.name));
    (out, t0.elapsed().as_secs_f64())
}

pub fn run(cfg: &RunConfig) -> RunOutput {
    timed(cfg).0
}

/// Half the nominal step and half the stability fraction.
pub fn refined(cfg: &RunConfig) -> RunConfig {
    let mut c = cfg.clone();
    c.solver.dt *= 0.5;
    c.solver.cfl *= 0.5;
    c.solver.growth_limit *= 0.5;
    c.solver.sample_stride *= 2;
    c
}

pub fn with_grid(cfg: &RunConfig, n: usize) -> RunConfig {
    let mut c = cfg.clone();
    c.grid = match c.grid {
        Grid::Rect(_) => Grid::Rect(RectGrid::new(n, n).unwrap()),
        Grid::Radial(g) => Grid::Radial(RadialGrid { points: n, ..g }),
    };
    c
}

/// Same run posed in the sigma clock.
pub fn sigma_form(cfg: &RunConfig) -> RunConfig {
    let mut c = cfg.clone();
    c.system.kind = SystemKind::NonlocalSigma;
    let law = c.evolution;
    c.solver.end_time = law.sigma_of_t(c.solver.end_time).min(0.999 * law.sigma_max());
    c
}

/// Blow-up time in `clock`, extrapolated when possible.
pub fn blowup_time(rep: &BlowUpReport, clock: Clock) -> Option<f64> {
    if rep.verdict != Verdict::BlowUp {
        return None;
    }
    match clock {
        Clock::T => rep.extrapolated_t.or(rep.event_t),
        Clock::Sigma => rep.extrapolated_sigma.or(rep.event_sigma),
    }
}

pub fn exp1_member(name: &str) -> RunConfig {
    preset(PresetId::Exp1).into_iter().find(|c| c.name == name).unwrap()
}

pub fn u0_mean(cfg: &RunConfig) -> f64 {
    let f = build_initial(&cfg.init, cfg.grid, cfg.params.p).unwrap();
    mean(&f, 1.0).unwrap()
}

fn interp(series: &TimeSeries, sigma: f64) -> Option<f64> {
    let s = &series.samples;
    let k = s.partition_point(|x| x.sigma < sigma);
    if k == 0 || k >= s.len() {
        return None;
    }
    let (a, b) = (&s[k - 1], &s[k]);
    Some(a.sup_norm + (b.sup_norm - a.sup_norm) * (sigma - a.sigma) / (b.sigma - a.sigma))
}

fn pseudo(k: usize, seed: u64) -> f64 {
    let x = ((k as u64 + 1).wrapping_mul(6364136223846793005).wrapping_add(seed)) >> 11;
    (x as f64) / (1u64 << 53) as f64
}

// ---- property checks shared by the property suite and the acceptance run ----

pub fn green_identity() -> Check {
    let grids = [
        Grid::Rect(RectGrid::new(17, 23).unwrap()),
        Grid::Radial(RadialGrid::new(40, 1).unwrap()),
        Grid::Radial(RadialGrid::new(40, 2).unwrap()),
        Grid::Radial(RadialGrid::new(40, 3).unwrap()),
    ];
    let mut worst = 0.0f64;
    for (gi, grid) in grids.into_iter().enumerate() {
        let mesh = Mesh::new(grid).unwrap();
        let n = grid.len();
        for seed in 0..8u64 {
            let f: Vec<f64> = (0..n).map(|k| pseudo(k, seed * 7 + gi as u64)).collect();
            let g: Vec<f64> = (0..n).map(|k| pseudo(k, seed * 13 + 101)).collect();
            let mut lf = vec![0.0; n];
            let mut lg = vec![0.0; n];
            mesh.laplacian_into(&f, &mut lf);
            mesh.laplacian_into(&g, &mut lg);
            let w = mesh.weights();
            let a: f64 = (0..n).map(|k| w[k] * lf[k] * g[k]).sum();
            let b: f64 = (0..n).map(|k| w[k] * f[k] * lg[k]).sum();
            let total: f64 = (0..n).map(|k| w[k] * lf[k]).sum();
            let scale = (0..n).map(|k| w[k] * lf[k].abs()).sum::<f64>().max(1.0);
            worst = worst.max((a - b).abs() / scale).max(total.abs() / scale);
        }
    }
    Check::new(worst < 1e-12, format!("symmetry and conservation defect {worst:.2e}"))
}

pub fn quadratic_exactness() -> Check {
    let mut worst = 0.0f64;
    let grid = RectGrid::new(11, 13).unwrap();
    let lap = laplacian_rect(&Field::from_fn(Grid::Rect(grid), |x, y| x * x + y * y)).unwrap();
    for j in 1..grid.ny - 1 {
        for i in 1..grid.nx - 1 {
            worst = worst.max((lap.values[grid.index(i, j)] - 4.0).abs() / 4.0);
        }
    }
    for n in 1..=3 {
        let grid = Grid::Radial(RadialGrid::new(33, n).unwrap());
        let lap = laplacian_radial(&Field::from_fn(grid, |r, _| r * r)).unwrap();
        let want = 2.0 * n as f64;
        for v in &lap.values[..32] {
            worst = worst.max((v - want).abs() / want);
        }
    }
    Check::new(worst < 1e-10, format!("worst relative error {worst:.2e}"))
}

pub fn moment_inequality() -> Check {
    let grids = [Grid::Rect(RectGrid::new(9, 7).unwrap()), Grid::Radial(RadialGrid::new(30, 3).unwrap())];
    let mut worst = f64::NEG_INFINITY;
    for (gi, grid) in grids.into_iter().enumerate() {
        for seed in 0..20u64 {
            let vals = (0..grid.len()).map(|k| 0.05 + 4.0 * pseudo(k, seed + 31 * gi as u64)).collect();
            let f = Field::new(grid, vals).unwrap();
            let (p, r) = (1.0 + 4.0 * pseudo(0, seed + 7), 0.2 + 2.8 * pseudo(1, seed + 9));
            let zeta = mean(&f, r).unwrap();
            let hi = mean(&f, p - 1.0 + r).unwrap();
            let lo = mean(&f, r + 1.0 - p).unwrap();
            worst = worst.max(zeta * zeta / (hi * lo));
        }
    }
    Check::new(worst <= 1.0 + 1e-12, format!("largest zeta^2 / (moment product) {worst:.6}"))
}

pub fn spiky_mean_limit() -> Check {
    let grid = Grid::Radial(RadialGrid::new(4096, 3).unwrap());
    let f = build_initial(&InitSpec::Spiky { delta: 0.01, lambda: 1.0 }, grid, 4.0).unwrap();
    let m = mean(&f, 1.0).unwrap();
    Check::new((m - 9.0 / 7.0).abs() < 2e-3, format!("mean {m:.5} vs 9/7"))
}

pub fn clock_round_trip() -> Check {
    let laws = [
        EvolutionLaw::static_domain(2),
        EvolutionLaw::exp_growth(0.1, 2),
        EvolutionLaw::exp_decay(0.1, 3),
        EvolutionLaw::logistic(0.1, 1.5, 2),
        EvolutionLaw::logistic(0.1, 0.5, 3),
    ];
    let mut worst = 0.0f64;
    for law in laws {
        for k in 0..50 {
            let t = 0.2 * k as f64;
            let s = law.sigma_of_t(t);
            let back = law.t_of_sigma(s).unwrap();
            worst = worst.max((back - t).abs() / t.max(1.0));
        }
    }
    Check::new(worst < 1e-9, format!("worst round-trip error {worst:.2e}"))
}

pub fn fixed_point_drift() -> Check {
    let mut cfg = with_grid(&exp1_member("static"), 16);
    cfg.init = InitSpec::Constant { c: 1.0 };
    let mut st = RunState::new(cfg).unwrap();
    for _ in 0..1000 {
        st.step().unwrap();
    }
    let drift = st.u.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
    Check::new(drift < 1e-10, format!("drift after 1000 steps {drift:.2e}"))
}

/// Constant data must follow the Euler recursion of the kinetic ODE exactly.
pub fn homogeneous_consistency() -> Check {
    let mut worst = 0.0f64;
    for kind in [SystemKind::NonlocalT, SystemKind::NonlocalSigma] {
        for law in [EvolutionLaw::static_domain(2), EvolutionLaw::exp_decay(0.1, 2), EvolutionLaw::exp_growth(0.1, 2)] {
            let mut cfg = with_grid(&exp1_member("static"), 8);
            cfg.system.kind = kind;
            cfg.evolution = law;
            cfg.init = InitSpec::Constant { c: 1.5 };
            cfg.solver.end_time = 0.3;
            let idx = cfg.validate().unwrap();
            let mut st = RunState::new(cfg).unwrap();
            let mut y = 1.5f64;
            for _ in 0..300 {
                let c0 = st.clock();
                let StepStatus::Advanced { dt } = st.step().unwrap() else { break };
                let (decay, growth) = match kind {
                    SystemKind::NonlocalT => {
                        let l = law.l_of_t(c0);
                        (l, l.powf(-idx.gamma))
                    }
                    _ => (law.phi_coeff(c0).unwrap(), law.psi_coeff(c0, idx.gamma).unwrap()),
                };
                y += dt * (-decay * y + growth * y.powf(idx.omega));
                for v in &st.u {
                    worst = worst.max((v - y).abs() / y);
                }
            }
        }
    }
    Check::new(worst < 1e-10, format!("worst deviation from the scalar recursion {worst:.2e}"))
}

/// `min u(sigma) >= min u0 exp(-M_Phi sigma)` for laws with bounded decay.
pub fn positivity_bound() -> Check {
    let mut worst = f64::INFINITY;
    for name in ["static", "exp_decay"] {
        let cfg = sigma_form(&with_grid(&exp1_member(name), 48));
        let law = cfg.evolution;
        let u0 = build_initial(&cfg.init, cfg.grid, cfg.params.p).unwrap();
        let out = run(&cfg);
        let end = out.report.final_sigma;
        let m_phi = law.coefficient_bounds(0.5, 0.0, end).unwrap().phi_max;
        for s in &out.series.samples {
            let bound = u0.min() * (-m_phi * s.sigma).exp();
            worst = worst.min(s.min_u / bound);
        }
    }
    Check::new(worst >= 1.0 - 1e-3, format!("smallest ratio min u / bound {worst:.6}"))
}

pub fn clock_consistency() -> Check {
    let mut base = with_grid(&exp1_member("exp_decay"), 48);
    base.system.reaction_scaling = ReactionScaling::Gamma;
    let t_out = run(&base);
    let s_out = run(&sigma_form(&base));
    let law = base.evolution;
    match (blowup_time(&t_out.report, Clock::T), blowup_time(&s_out.report, Clock::Sigma)) {
        (Some(t), Some(s)) => {
            let ts = law.t_of_sigma(s).unwrap();
            let rel = (t - ts).abs() / t;
            Check::new(rel <= 0.03, format!("t clock {t:.5}, sigma clock {s:.5} -> t {ts:.5}, rel {rel:.2e}"))
        }
        _ => Check::new(false, "one of the runs did not blow up"),
    }
}

pub fn refinement_stability() -> Check {
    let mut worst = 0.0f64;
    let mut detail = String::new();
    for name in ["static", "exp_growth"] {
        let cfg = with_grid(&exp1_member(name), 48);
        let a = blowup_time(&run(&cfg).report, Clock::T);
        let b = blowup_time(&run(&refined(&cfg)).report, Clock::T);
        match (a, b) {
            (Some(a), Some(b)) => {
                let rel = (a - b).abs() / a;
                worst = worst.max(rel);
                detail.push_str(&format!("{name} {a:.5}/{b:.5} "));
            }
            _ => return Check::new(false, format!("{name}: no blow-up")),
        }
    }
    Check::new(worst < 0.05, format!("{detail}rel change {worst:.2e}"))
}

pub fn shadow_limit() -> Check {
    let mut nl = with_grid(&exp1_member("static"), 32);
    nl.system.kind = SystemKind::NonlocalSigma;
    nl.solver.sample_stride = 1;
    let mut sh = nl.clone();
    sh.system.kind = SystemKind::ShadowTau;
    sh.params = sh.params.with_tau(1e-3);
    let nl_out = run(&nl);
    let sh_out = run(&sh);
    let Some(t_star) = blowup_time(&nl_out.report, Clock::Sigma) else {
        return Check::new(false, "nonlocal run did not blow up");
    };
    let mut worst = 0.0f64;
    let mut n = 0;
    for s in &sh_out.series.samples {
        if s.sigma > 0.9 * t_star {
            break;
        }
        if let Some(v) = interp(&nl_out.series, s.sigma) {
            worst = worst.max((s.sup_norm - v).abs() / v);
            n += 1;
        }
    }
    Check::new(n > 10 && worst <= 0.05, format!("{n} samples up to 0.9 T*, worst rel diff {worst:.2e}"))
}

pub fn property_suite() -> Vec<(&'static str, Check)> {
    vec![
        ("quadratic exactness", quadratic_exactness()),
        ("green identity", green_identity()),
        ("moment inequality", moment_inequality()),
        ("spiky mean", spiky_mean_limit()),
        ("clock round trip", clock_round_trip()),
        ("fixed point", fixed_point_drift()),
        ("homogeneous data", homogeneous_consistency()),
        ("positivity", positivity_bound()),
        ("clock consistency", clock_consistency()),
        ("step refinement", refinement_stability()),
        ("shadow limit", shadow_limit()),
    ]
}
