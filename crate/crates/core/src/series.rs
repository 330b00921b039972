//! Sampled scalar diagnostics of a run.

use std::io::{self, Write};

/// One diagnostic sample. `aux` is the inhibitor `eta` for the shadow system,
/// `sup v` for the two-species system, and the quasi-steady inhibitor
/// `(zeta / L)^(1/(s+1))` for the non-local equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub sigma: f64,
    pub sup_norm: f64,
    pub mean_u: f64,
    pub zeta: f64,
    pub w_moment: f64,
    pub aux: f64,
    pub min_u: f64,
    pub steps: u64,
}

pub const CSV_HEADER: &str = "t,sigma,sup_norm,mean_u,zeta,w_moment,eta_or_supv";

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TimeSeries {
    pub samples: Vec<Sample>,
}

/// Which clock a fit or extrapolation works in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clock {
    T,
    Sigma,
}

impl Sample {
    pub fn clock(&self, clock: Clock) -> f64 {
        match clock {
            Clock::T => self.t,
            Clock::Sigma => self.sigma,
        }
    }
}

impl TimeSeries {
    pub fn push(&mut self, s: Sample) {
        self.samples.push(s);
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    pub fn max_sup(&self) -> f64 {
        self.samples.iter().map(|s| s.sup_norm).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Builds a series from `(sigma, sup_norm)` pairs with `t = sigma`;
    /// the remaining columns mirror the sup norm.
    pub fn from_sup(points: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let samples = points
            .into_iter()
            .enumerate()
            .map(|(k, (sigma, sup))| Sample {
                t: sigma,
                sigma,
                sup_norm: sup,
                mean_u: sup,
                zeta: sup,
                w_moment: 1.0,
                aux: 1.0,
                min_u: sup,
                steps: k as u64,
            })
            .collect();
        Self { samples }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for s in &self.samples {
            writeln!(
                w,
                "{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
                s.t, s.sigma, s.sup_norm, s.mean_u, s.zeta, s.w_moment, s.aux
            )?;
        }
        Ok(())
    }
}
