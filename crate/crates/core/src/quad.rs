//! Small numerical kernels shared by the evolution and analysis modules.

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Integral over `[a, inf)` of an integrand that decays at least like
/// `exp(-decay * x)`. Integrates panel by panel until the tail estimate is
/// below `tol`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: &F, a: f64, decay: f64, tol: f64) -> f64 {
    let width = (1.0 / decay.max(1e-8)).max(1e-3);
    let mut total = 0.0;
    let mut lo = a;
    for _ in 0..10_000 {
        let hi = lo + width;
        let piece = adaptive_simpson(f, lo, hi, tol * 1e-2);
        total += piece;
        // remaining tail of an exponentially decaying panel sequence
        let ratio = (-decay * width).exp();
        if ratio < 1.0 && piece.abs() * ratio / (1.0 - ratio) < tol {
            break;
        }
        lo = hi;
    }
    total
}

/// Root of an increasing function on `[lo, hi]` with `g(lo) <= 0 <= g(hi)`,
/// by bisection to relative tolerance `rtol`.
pub fn bisect_increasing<F: Fn(f64) -> f64>(g: F, mut lo: f64, mut hi: f64, rtol: f64) -> f64 {
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= rtol * hi.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Ordinary least squares fit `y = slope * x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    let n = xs.len();
    if n < 2 || n != ys.len() {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx <= 0.0 || !sxx.is_finite() {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}
