//! Adaptive Simpson quadrature used by the analytic-vs-numeric cross-checks.

/// Adaptive Simpson rule on `[a, b]` with absolute tolerance `tol`.
///
/// The integrand must be finite on the closed interval; callers map
/// improper integrals onto a bounded domain first (the distortion module
/// substitutes `t = 1/x^p` and powers of the integration variable to absorb
/// endpoint singularities).
pub(crate) fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    simpson_rec(&f, a, b, fa, fm, fb, simpson_estimate(a, b, fa, fm, fb), tol, 48)
}

fn simpson_estimate(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
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
    let left = simpson_estimate(a, m, fa, flm, fm);
    let right = simpson_estimate(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_smooth_function() {
        let v = adaptive_simpson(|x| x.sin(), 0.0, std::f64::consts::PI, 1e-12);
        assert!((v - 2.0).abs() < 1e-10);
    }

    #[test]
    fn integrates_step_function() {
        // Discontinuities slow the subdivision down but stay within tolerance.
        let v = adaptive_simpson(|x| if x < 0.3 { 1.0 } else { 0.0 }, 0.0, 1.0, 1e-10);
        assert!((v - 0.3).abs() < 1e-8);
    }
}
