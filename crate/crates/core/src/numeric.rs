//! One-dimensional numeric routines used by the oracle.

const INV_GOLDEN_SQ: f64 = 0.381_966_011_250_105_2; // 2 - phi

/// Golden-section search for the maximum of `f` on `[lo, hi]`.
///
/// Returns `(x_max, f_max)`. The bracket shrinks by a constant factor per
/// iteration until its width falls below `tol` or `max_evals` function
/// evaluations have been spent.
pub fn golden_max(
    f: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    max_evals: usize,
) -> (f64, f64) {
    let mut x1 = lo + INV_GOLDEN_SQ * (hi - lo);
    let mut x2 = hi - INV_GOLDEN_SQ * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut evals = 2;

    while evals < max_evals && (hi - lo).abs() > tol {
        if f1 > f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = lo + INV_GOLDEN_SQ * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = hi - INV_GOLDEN_SQ * (hi - lo);
            f2 = f(x2);
        }
        evals += 1;
    }

    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// One step of parabolic refinement around `x`: fit a parabola through
/// `x - h`, `x`, `x + h` and move to its vertex, clamped to `[lo, hi]`.
///
/// Comparison-based golden-section search stalls near `sqrt(eps)` for a
/// smooth maximum; a single fit recovers the vertex of a quadratic to
/// near machine precision.
pub fn parabolic_refine(f: impl Fn(f64) -> f64, x: f64, h: f64, lo: f64, hi: f64) -> f64 {
    let c = x.clamp(lo + h, hi - h);
    if c - h < lo || c + h > hi {
        return x; // interval too narrow to fit
    }
    let (fm, f0, fp) = (f(c - h), f(c), f(c + h));
    let denom = fm - 2.0 * f0 + fp;
    if denom == 0.0 {
        return x;
    }
    let vertex = c + 0.5 * h * (fm - fp) / denom;
    if vertex.is_finite() {
        vertex.clamp(lo, hi)
    } else {
        x
    }
}

/// Golden-section maximization followed by one parabolic refinement.
///
/// The refined vertex wins unless it scores clearly worse: near a smooth
/// maximum the two candidates differ by less than evaluation noise, and
/// the fitted vertex is the more accurate of the two.
pub fn golden_max_refined(
    f: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
    max_evals: usize,
) -> (f64, f64) {
    let (x, fx) = golden_max(&f, lo, hi, tol, max_evals);
    let h = 1e-3 * (hi - lo);
    let r = parabolic_refine(&f, x, h, lo, hi);
    let fr = f(r);
    if fr >= fx - 1e-12 * (fx.abs() + 1.0) {
        (r, fr)
    } else {
        (x, fx)
    }
}

/// Vertex of the parabola through three points of `f`. Returns `None` when
/// the fit is not strictly concave.
pub fn quadratic_vertex(f: impl Fn(f64) -> f64, x0: f64, x1: f64, x2: f64) -> Option<f64> {
    let (f0, f1, f2) = (f(x0), f(x1), f(x2));
    // Lagrange coefficients of the fitted quadratic a x^2 + b x + c.
    let d0 = (x0 - x1) * (x0 - x2);
    let d1 = (x1 - x0) * (x1 - x2);
    let d2 = (x2 - x0) * (x2 - x1);
    let a = f0 / d0 + f1 / d1 + f2 / d2;
    let b = -f0 * (x1 + x2) / d0 - f1 * (x0 + x2) / d1 - f2 * (x0 + x1) / d2;
    if a >= 0.0 || !a.is_finite() {
        return None;
    }
    Some(-b / (2.0 * a))
}

/// Bisection for a root of `f` on `[lo, hi]`; requires a sign change.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iterations: usize) -> Option<f64> {
    let (mut flo, fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Some(lo);
    }
    if fhi == 0.0 {
        return Some(hi);
    }
    if flo.signum() == fhi.signum() {
        return None;
    }
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        let fmid = f(mid);
        if fmid == 0.0 {
            return Some(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * mid.abs() {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Central finite difference of `f` at `x` with step `h`.
pub fn central_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}
