//! Simulation and analysis of a non-local activator equation on isotropically
//! evolving domains, its shadow ODE-PDE system and the two-species system it
//! reduces from.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod evolution;
pub mod initdata;
pub mod mesh;
pub mod params;
mod pow;
pub mod presets;
mod quad;
pub mod series;
pub mod solver;

pub use analysis::{
    bernoulli_bound, bernoulli_oracle, detect_blowup, extrapolate_blowup, fit_rate, i_sigma, i_sigma_upto,
    locate_blowup, mean_threshold, obu1_check, sk1_threshold, BernoulliSolution, BlowUpReport, BlowupLocation,
    BoundReport, Obu1Check, Verdict,
};
pub use error::{Error, Result};
pub use evolution::{CoefficientBounds, EvolutionLaw, LawKind};
pub use initdata::{build_initial, spiky_profile, InitSpec};
pub use mesh::{laplacian_radial, laplacian_rect, mean, sup_norm, Field, Grid, Mesh, RadialBoundary, RadialGrid, RectGrid};
pub use params::{derive_indices, thm4_condition, thm5_condition, turing_condition, DerivedIndices, Parameters};
pub use series::{Clock, Sample, TimeSeries};
pub use solver::{
    advance, Aux, Model, ReactionScaling, RunConfig, RunOutput, RunState, SolverSettings, StepStatus, SystemKind,
    SystemSpec,
};
