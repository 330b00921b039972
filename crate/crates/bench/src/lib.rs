//! Fixtures for the benchmarks.

use shadowgm_core::presets::{preset, PresetId};
use shadowgm_core::{build_initial, Field, Grid, RadialGrid, RectGrid, RunConfig};

pub fn square(n: usize) -> Grid {
    Grid::Rect(RectGrid::new(n, n).expect("grid"))
}

pub fn ball(points: usize) -> Grid {
    Grid::Radial(RadialGrid::new(points, 3).expect("grid"))
}

/// Smooth positive test field.
pub fn bumpy(grid: Grid) -> Field {
    Field::from_fn(grid, |x, y| 2.0 + (3.0 * x).cos() * (2.0 * y).cos())
}

/// First member of a preset, resized to `n` nodes per axis.
pub fn member(id: PresetId, k: usize, n: usize) -> RunConfig {
    let mut cfg = preset(id).swap_remove(k);
    cfg.grid = match cfg.grid {
        Grid::Rect(_) => square(n),
        Grid::Radial(g) => Grid::Radial(RadialGrid { points: n, ..g }),
    };
    cfg
}

pub fn initial(cfg: &RunConfig) -> Field {
    build_initial(&cfg.init, cfg.grid, cfg.params.p).expect("initial data")
}
