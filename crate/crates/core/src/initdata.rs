//! Initial data: the shifted cosine on the square (or along `R` on the ball),
//! constants, and the capped power-law spike `lambda * psi_delta(R)`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::mesh::{Field, Grid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "init", rename_all = "snake_case")]
pub enum InitSpec {
    /// `cos(pi y) + c` on the square, `cos(pi R) + c` on the ball.
    Cosine {
        #[serde(default = "default_offset")]
        c: f64,
    },
    Spiky { delta: f64, lambda: f64 },
    Constant { c: f64 },
}

fn default_offset() -> f64 {
    2.0
}

impl InitSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            InitSpec::Cosine { c } if !(c > 1.0) => invalid(format!("cosine offset c must exceed 1 (got {c})")),
            InitSpec::Constant { c } if !(c > 0.0 && c.is_finite()) => {
                invalid(format!("constant datum must be positive (got {c})"))
            }
            InitSpec::Spiky { delta, lambda } if !(delta > 0.0 && delta < 1.0 && lambda > 0.0) => invalid(format!(
                "spiky datum needs 0 < delta < 1 and lambda > 0 (got delta = {delta}, lambda = {lambda})"
            )),
            _ => Ok(()),
        }
    }
}

/// `psi_delta(R)` with `a = 2/(p-1)`: `R^-a` outside `delta`, and inside the
/// parabola `delta^-a (1 + a/2) - (a/2) delta^-(a+2) R^2` that joins it with
/// matching value and slope.
pub fn spiky_profile(radius: f64, delta: f64, p: f64) -> f64 {
    let a = 2.0 / (p - 1.0);
    if radius >= delta {
        radius.powf(-a)
    } else {
        delta.powf(-a) * (1.0 + 0.5 * a) - 0.5 * a * delta.powf(-(a + 2.0)) * radius * radius
    }
}

/// Nodal initial field. `p` fixes the spike exponent and is ignored otherwise.
pub fn build_initial(spec: &InitSpec, grid: Grid, p: f64) -> Result<Field> {
    spec.validate()?;
    let pi = std::f64::consts::PI;
    Ok(match (*spec, grid) {
        (InitSpec::Constant { c }, _) => Field::constant(grid, c),
        (InitSpec::Cosine { c }, Grid::Rect(_)) => Field::from_fn(grid, |_, y| (pi * y).cos() + c),
        (InitSpec::Cosine { c }, Grid::Radial(_)) => Field::from_fn(grid, |r, _| (pi * r).cos() + c),
        (InitSpec::Spiky { .. }, Grid::Rect(_)) => return invalid("spiky datum is only defined on the ball"),
        (InitSpec::Spiky { delta, lambda }, Grid::Radial(_)) => {
            if !(p > 1.0) {
                return invalid(format!("spiky datum needs p > 1 (got {p})"));
            }
            Field::from_fn(grid, |r, _| lambda * spiky_profile(r, delta, p))
        }
    })
}
