//! Structured grids on the unit square and the unit N-ball, Neumann
//! Laplacians and normalized quadrature for domain averages.
//!
//! The radial operator is written in conservative flux form on cells
//! `[R_i - h/2, R_i + h/2]`, so its weighted sum vanishes identically and the
//! origin row reduces to `2N (f_1 - f_0) / h^2`, the `N u_RR(0)` limit.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::pow::{with_pow, Pow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectGrid {
    pub nx: usize,
    pub ny: usize,
}

impl RectGrid {
    pub fn new(nx: usize, ny: usize) -> Result<Self> {
        if nx < 3 || ny < 3 {
            return invalid(format!("rectangle grid needs at least 3 nodes per axis (got {nx}x{ny})"));
        }
        Ok(Self { nx, ny })
    }

    pub fn hx(&self) -> f64 {
        1.0 / (self.nx - 1) as f64
    }

    pub fn hy(&self) -> f64 {
        1.0 / (self.ny - 1) as f64
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major index; rows run along `y`.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn coords(&self, k: usize) -> (f64, f64) {
        ((k % self.nx) as f64 * self.hx(), (k / self.nx) as f64 * self.hy())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialBoundary {
    #[default]
    Neumann,
    /// Outer node held at its initial value.
    Dirichlet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RadialGrid {
    pub points: usize,
    pub dimension: u32,
    #[serde(default)]
    pub boundary: RadialBoundary,
}

impl RadialGrid {
    pub fn new(points: usize, dimension: u32) -> Result<Self> {
        if points < 3 {
            return invalid(format!("radial grid needs at least 3 nodes (got {points})"));
        }
        if !(1..=3).contains(&dimension) {
            return invalid(format!("radial dimension must be 1, 2 or 3 (got {dimension})"));
        }
        Ok(Self {
            points,
            dimension,
            boundary: RadialBoundary::Neumann,
        })
    }

    pub fn with_boundary(mut self, boundary: RadialBoundary) -> Self {
        self.boundary = boundary;
        self
    }

    pub fn h(&self) -> f64 {
        1.0 / (self.points - 1) as f64
    }

    pub fn radius(&self, i: usize) -> f64 {
        if i + 1 == self.points {
            1.0
        } else {
            i as f64 * self.h()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Grid {
    Rect(RectGrid),
    Radial(RadialGrid),
}

impl Grid {
    pub fn len(&self) -> usize {
        match self {
            Grid::Rect(g) => g.len(),
            Grid::Radial(g) => g.points,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Grid::Rect(g) => RectGrid::new(g.nx, g.ny).map(|_| ()),
            Grid::Radial(g) => RadialGrid::new(g.points, g.dimension).map(|_| ()),
        }
    }
}

/// Nodal values on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return invalid(format!("field has {} values for {} nodes", values.len(), grid.len()));
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    /// Evaluates `f` at node coordinates: `(x, y)` on the square, `(R, 0)` on the ball.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = match grid {
            Grid::Rect(g) => (0..g.len())
                .map(|k| {
                    let (x, y) = g.coords(k);
                    f(x, y)
                })
                .collect(),
            Grid::Radial(g) => (0..g.points).map(|i| f(g.radius(i), 0.0)).collect(),
        };
        Self { grid, values }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// CSV snapshot. Rectangle: a `nx,ny` line, then one line of `nx`
    /// values per grid row. Radial: `R,value` header and one line per node.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        match self.grid {
            Grid::Rect(g) => {
                writeln!(w, "{},{}", g.nx, g.ny)?;
                for row in self.values.chunks(g.nx) {
                    let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
                    writeln!(w, "{}", line.join(","))?;
                }
            }
            Grid::Radial(g) => {
                writeln!(w, "R,value")?;
                for (i, v) in self.values.iter().enumerate() {
                    writeln!(w, "{:e},{v:e}", g.radius(i))?;
                }
            }
        }
        Ok(())
    }
}

/// Precomputed operator data for one grid: quadrature weights normalized to
/// unit sum, and for the ball the face fluxes of each cell.
#[derive(Debug, Clone)]
pub struct Mesh {
    grid: Grid,
    weights: Vec<f64>,
    // radial: coefficient of (f_{i+1} - f_i) and of (f_i - f_{i-1})
    right: Vec<f64>,
    left: Vec<f64>,
    max_diag: f64,
}

impl Mesh {
    pub fn new(grid: Grid) -> Result<Self> {
        grid.validate()?;
        match grid {
            Grid::Rect(g) => {
                let wx = trapezoid_weights(g.nx);
                let wy = trapezoid_weights(g.ny);
                let weights = (0..g.len()).map(|k| wx[k % g.nx] * wy[k / g.nx]).collect();
                let max_diag = 2.0 / (g.hx() * g.hx()) + 2.0 / (g.hy() * g.hy());
                Ok(Self {
                    grid,
                    weights,
                    right: Vec::new(),
                    left: Vec::new(),
                    max_diag,
                })
            }
            Grid::Radial(g) => {
                let n = g.dimension as i32;
                let h = g.h();
                let m = g.points;
                let mut weights = Vec::with_capacity(m);
                let mut right = Vec::with_capacity(m);
                let mut left = Vec::with_capacity(m);
                for i in 0..m {
                    let r = g.radius(i);
                    let rp = (r + 0.5 * h).min(1.0);
                    let rm = (r - 0.5 * h).max(0.0);
                    let vol = (rp.powi(n) - rm.powi(n)) / n as f64;
                    weights.push(n as f64 * vol);
                    let fr = if i + 1 < m { rp.powi(n - 1) / (h * vol) } else { 0.0 };
                    let fl = if i > 0 { rm.powi(n - 1) / (h * vol) } else { 0.0 };
                    right.push(fr);
                    left.push(fl);
                }
                let max_diag = right.iter().zip(&left).map(|(a, b)| a + b).fold(0.0, f64::max);
                Ok(Self {
                    grid,
                    weights,
                    right,
                    left,
                    max_diag,
                })
            }
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Quadrature weights; they sum to one, so `sum w_i f_i` is the domain average.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Largest explicit-Euler step for `u_t = Δu` that keeps the update monotone.
    pub fn stability_limit(&self) -> f64 {
        1.0 / self.max_diag
    }

    /// Writes `Δf` into `out`.
    pub fn laplacian_into(&self, f: &[f64], out: &mut [f64]) {
        debug_assert_eq!(f.len(), self.grid.len());
        debug_assert_eq!(out.len(), f.len());
        match self.grid {
            Grid::Rect(g) => rect_laplacian(g, f, out),
            Grid::Radial(_) => {
                let m = f.len();
                out[0] = self.right[0] * (f[1] - f[0]);
                for i in 1..m - 1 {
                    out[i] = self.right[i] * (f[i + 1] - f[i]) - self.left[i] * (f[i] - f[i - 1]);
                }
                out[m - 1] = -self.left[m - 1] * (f[m - 1] - f[m - 2]);
            }
        }
    }

    /// `⨍ f^power`.
    pub fn mean(&self, f: &[f64], power: f64) -> Result<f64> {
        check_power_domain(f, power)?;
        Ok(self.mean_unchecked(f, power))
    }

    pub(crate) fn mean_unchecked(&self, f: &[f64], power: f64) -> f64 {
        with_pow!(Pow::new(power), pw => weighted_sum(&self.weights, f, pw))
    }
}

// Four independent partial sums so the loop vectorizes.
#[inline(always)]
fn weighted_sum(w: &[f64], f: &[f64], pw: impl Fn(f64) -> f64) -> f64 {
    let mut acc = [0.0f64; 4];
    let wc = w.chunks_exact(4);
    let fc = f.chunks_exact(4);
    let (wr, fr) = (wc.remainder(), fc.remainder());
    for (a, b) in wc.zip(fc) {
        for k in 0..4 {
            acc[k] += a[k] * pw(b[k]);
        }
    }
    let mut tail = 0.0;
    for (a, &b) in wr.iter().zip(fr) {
        tail += a * pw(b);
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

fn check_power_domain(f: &[f64], power: f64) -> Result<()> {
    let needs_positive = power < 0.0;
    let needs_nonnegative = power.fract() != 0.0;
    for &x in f {
        if (needs_positive && x <= 0.0) || (needs_nonnegative && x < 0.0) {
            return Err(Error::NonPositive {
                what: "field value under a fractional or negative power",
                value: x,
            });
        }
    }
    Ok(())
}

fn trapezoid_weights(n: usize) -> Vec<f64> {
    let h = 1.0 / (n - 1) as f64;
    let mut w = vec![h; n];
    w[0] = 0.5 * h;
    w[n - 1] = 0.5 * h;
    w
}

fn rect_laplacian(g: RectGrid, f: &[f64], out: &mut [f64]) {
    let (nx, ny) = (g.nx, g.ny);
    let ax = 1.0 / (g.hx() * g.hx());
    let ay = 1.0 / (g.hy() * g.hy());
    for j in 0..ny {
        let row = j * nx;
        // mirrored neighbours across the boundary
        let down = if j == 0 { row + nx } else { row - nx };
        let up = if j + 1 == ny { row - nx } else { row + nx };
        let fr = &f[row..row + nx];
        let fd = &f[down..down + nx];
        let fu = &f[up..up + nx];
        let o = &mut out[row..row + nx];
        o[0] = ax * 2.0 * (fr[1] - fr[0]) + ay * (fu[0] + fd[0] - 2.0 * fr[0]);
        for i in 1..nx - 1 {
            o[i] = ax * (fr[i + 1] + fr[i - 1] - 2.0 * fr[i]) + ay * (fu[i] + fd[i] - 2.0 * fr[i]);
        }
        let l = nx - 1;
        o[l] = ax * 2.0 * (fr[l - 1] - fr[l]) + ay * (fu[l] + fd[l] - 2.0 * fr[l]);
    }
}

pub fn laplacian_rect(f: &Field) -> Result<Field> {
    match f.grid {
        Grid::Rect(_) => laplacian(f),
        Grid::Radial(_) => Err(Error::Unsupported("laplacian_rect on a radial grid".into())),
    }
}

pub fn laplacian_radial(f: &Field) -> Result<Field> {
    match f.grid {
        Grid::Radial(_) => laplacian(f),
        Grid::Rect(_) => Err(Error::Unsupported("laplacian_radial on a rectangle grid".into())),
    }
}

fn laplacian(f: &Field) -> Result<Field> {
    let mesh = Mesh::new(f.grid)?;
    let mut out = vec![0.0; f.values.len()];
    mesh.laplacian_into(&f.values, &mut out);
    Field::new(f.grid, out)
}

/// Domain average `⨍ f^power`.
pub fn mean(f: &Field, power: f64) -> Result<f64> {
    Mesh::new(f.grid)?.mean(&f.values, power)
}

pub fn sup_norm(f: &Field) -> f64 {
    f.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}
