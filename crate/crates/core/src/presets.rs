//! Named experiment setups: cosine data on the square under the four
//! evolution laws, quenching, bounded versus blowing-up exponent sets, spiky
//! radial data, and the two-species system against the non-local equation.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::evolution::EvolutionLaw;
use crate::initdata::InitSpec;
use crate::mesh::{Grid, RadialBoundary, RadialGrid, RectGrid};
use crate::params::Parameters;
use crate::solver::{ReactionScaling, RunConfig, SolverSettings, SystemKind, SystemSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PresetId {
    Exp1,
    Exp1q,
    Exp2a,
    Exp2b,
    Exp3,
    Exp4,
}

impl PresetId {
    pub const ALL: [PresetId; 6] = [
        PresetId::Exp1,
        PresetId::Exp1q,
        PresetId::Exp2a,
        PresetId::Exp2b,
        PresetId::Exp3,
        PresetId::Exp4,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PresetId::Exp1 => "exp1",
            PresetId::Exp1q => "exp1q",
            PresetId::Exp2a => "exp2a",
            PresetId::Exp2b => "exp2b",
            PresetId::Exp3 => "exp3",
            PresetId::Exp4 => "exp4",
        }
    }
}

impl fmt::Display for PresetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PresetId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PresetId::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown preset `{s}`")))
    }
}

/// Adjustments allowed on top of a preset.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    /// Nodes per axis on the square, or radial node count.
    pub grid_points: Option<usize>,
    pub dt: Option<f64>,
    pub blowup_threshold: Option<f64>,
    pub quench_threshold: Option<f64>,
    pub end_time: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if let Some(n) = self.grid_points {
            cfg.grid = match cfg.grid {
                Grid::Rect(_) => Grid::Rect(RectGrid { nx: n, ny: n }),
                Grid::Radial(g) => Grid::Radial(RadialGrid { points: n, ..g }),
            };
        }
        let s = &mut cfg.solver;
        if let Some(v) = self.dt {
            s.dt = v;
        }
        if let Some(v) = self.blowup_threshold {
            s.blowup_threshold = v;
        }
        if let Some(v) = self.quench_threshold {
            s.quench_threshold = v;
        }
        if let Some(v) = self.end_time {
            s.end_time = v;
            s.snapshot_times.retain(|&x| x <= v);
        }
    }
}

pub const TABLE_ONE: Parameters = Parameters {
    p: 3.0,
    q: 2.0,
    r: 1.0,
    s: 2.0,
    d1: 1.0,
    d2: 1.0,
    tau: 0.0,
};

const BETA: f64 = 0.1;
const SQUARE: usize = 128;
const RADIAL: usize = 512;

fn square() -> Grid {
    Grid::Rect(RectGrid { nx: SQUARE, ny: SQUARE })
}

fn config(name: &str, kind: SystemKind, params: Parameters, law: EvolutionLaw, grid: Grid, init: InitSpec, solver: SolverSettings) -> RunConfig {
    RunConfig {
        name: name.to_string(),
        system: SystemSpec {
            kind,
            reaction_scaling: ReactionScaling::InverseGamma,
        },
        params,
        evolution: law,
        grid,
        init,
        solver,
    }
}

fn cosine() -> InitSpec {
    InitSpec::Cosine { c: 2.0 }
}

/// The four domain laws with cosine data and the Table-1 exponents.
fn exp1() -> Vec<RunConfig> {
    let mut solver = SolverSettings::new(5e-4, 2.0);
    solver.blowup_threshold = 1e4;
    solver.sample_stride = 20;
    [
        ("static", EvolutionLaw::static_domain(2)),
        ("exp_growth", EvolutionLaw::exp_growth(BETA, 2)),
        ("exp_decay", EvolutionLaw::exp_decay(BETA, 2)),
        ("logistic_growth", EvolutionLaw::logistic(BETA, 1.5, 2)),
    ]
    .into_iter()
    .map(|(name, law)| config(name, SystemKind::NonlocalT, TABLE_ONE, law, square(), cosine(), solver.clone()))
    .collect()
}

fn exp1q() -> Vec<RunConfig> {
    let mut solver = SolverSettings::new(5e-4, 20.0);
    solver.sample_stride = 100;
    vec![config(
        "quench",
        SystemKind::NonlocalT,
        Parameters::new(1.4, 1.0, 1.0, 2.0),
        EvolutionLaw::exp_growth(BETA, 2),
        Grid::Rect(RectGrid { nx: 64, ny: 64 }),
        cosine(),
        solver,
    )]
}

fn exp2(name: &str, params: Parameters) -> Vec<RunConfig> {
    let mut solver = SolverSettings::new(5e-4, 10.0);
    solver.sample_stride = 200;
    vec![config(
        name,
        SystemKind::NonlocalT,
        params,
        EvolutionLaw::exp_growth(BETA, 2),
        square(),
        cosine(),
        solver,
    )]
}

fn exp3() -> Vec<RunConfig> {
    let mut solver = SolverSettings::new(5e-4, 2.0);
    solver.sample_stride = 200;
    solver.blowup_threshold = 1e4;
    solver.snapshot_final = true;
    let grid = Grid::Radial(RadialGrid {
        points: RADIAL,
        dimension: 3,
        boundary: RadialBoundary::Neumann,
    });
    let params = Parameters::new(4.0, 4.0, 2.0, 1.0);
    let init = InitSpec::Spiky { delta: 0.8, lambda: 0.1 };
    [
        ("static", EvolutionLaw::static_domain(3)),
        ("exp_decay", EvolutionLaw::exp_decay(BETA, 3)),
        ("logistic_decay", EvolutionLaw::logistic(BETA, 0.5, 3)),
    ]
    .into_iter()
    .map(|(name, law)| config(name, SystemKind::NonlocalT, params, law, grid, init, solver.clone()))
    .collect()
}

fn exp4() -> Vec<RunConfig> {
    let mut solver = SolverSettings::new(1e-4, 2.0);
    solver.sample_stride = 2000;
    solver.v0 = 2.0;
    let law = EvolutionLaw::exp_decay(BETA, 2);
    let full = TABLE_ONE.with_diffusion(0.01, 1.0).with_tau(0.01);
    let nonlocal = TABLE_ONE.with_diffusion(0.01, 1.0);
    vec![
        config("full", SystemKind::FullRD, full, law, square(), cosine(), solver.clone()),
        config("nonlocal", SystemKind::NonlocalT, nonlocal, law, square(), cosine(), solver),
    ]
}

/// Member runs of a preset.
pub fn preset(id: PresetId) -> Vec<RunConfig> {
    match id {
        PresetId::Exp1 => exp1(),
        PresetId::Exp1q => exp1q(),
        PresetId::Exp2a => exp2("global", Parameters::new(1.0, 2.0, 3.0, 2.0)),
        PresetId::Exp2b => exp2("blowup", Parameters::new(3.0, 2.0, 1.0, 1.0)),
        PresetId::Exp3 => exp3(),
        PresetId::Exp4 => exp4(),
    }
}

pub fn preset_with(id: PresetId, overrides: &Overrides) -> Vec<RunConfig> {
    let mut runs = preset(id);
    for cfg in &mut runs {
        overrides.apply(cfg);
    }
    runs
}
