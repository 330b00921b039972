/// A power `x^e` with the exponent classified once, so hot loops avoid
/// `powf` for the integer and half-integer exponents that dominate in practice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Pow {
    Zero,
    One,
    Square,
    Cube,
    Recip,
    RecipSquare,
    Int(i32),
    Half,
    Real(f64),
}

impl Pow {
    pub(crate) fn new(e: f64) -> Self {
        if e == 0.0 {
            Pow::Zero
        } else if e == 1.0 {
            Pow::One
        } else if e == 2.0 {
            Pow::Square
        } else if e == 3.0 {
            Pow::Cube
        } else if e == -1.0 {
            Pow::Recip
        } else if e == -2.0 {
            Pow::RecipSquare
        } else if e == 0.5 {
            Pow::Half
        } else if e.fract() == 0.0 && e.abs() <= 64.0 {
            Pow::Int(e as i32)
        } else {
            Pow::Real(e)
        }
    }

    #[inline(always)]
    pub(crate) fn apply(self, x: f64) -> f64 {
        match self {
            Pow::Zero => 1.0,
            Pow::One => x,
            Pow::Square => x * x,
            Pow::Cube => x * x * x,
            Pow::Recip => 1.0 / x,
            Pow::RecipSquare => 1.0 / (x * x),
            Pow::Int(k) => match k {
                2 => x * x,
                3 => x * x * x,
                4 => {
                    let y = x * x;
                    y * y
                }
                -1 => 1.0 / x,
                -2 => 1.0 / (x * x),
                -3 => 1.0 / (x * x * x),
                _ => x.powi(k),
            },
            Pow::Half => x.sqrt(),
            // exp/ln is markedly cheaper than powf for positive bases
            Pow::Real(e) if x > 0.0 => (e * x.ln()).exp(),
            Pow::Real(e) => x.powf(e),
        }
    }
}

/// Expands `$body` once per exponent class with `$f` bound to a concrete
/// power function, so the per-node loop inside `$body` carries no dispatch.
macro_rules! with_pow {
    ($pw:expr, $f:ident => $body:expr) => {
        match $pw {
            $crate::pow::Pow::Zero => {
                let $f = |_: f64| 1.0;
                $body
            }
            $crate::pow::Pow::One => {
                let $f = |x: f64| x;
                $body
            }
            $crate::pow::Pow::Int(2) => {
                let $f = |x: f64| x * x;
                $body
            }
            $crate::pow::Pow::Int(3) => {
                let $f = |x: f64| x * x * x;
                $body
            }
            other => {
                let $f = move |x: f64| other.apply(x);
                $body
            }
        }
    };
}
pub(crate) use with_pow;
