//! Shared numerical helpers: compensated summation, the Gamma function, adaptive Simpson
//! quadrature and least-squares slope fits.

use crate::error::{Error, Result};

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Compensated sum of a slice, in order.
pub fn compensated_sum(xs: &[f64]) -> f64 {
    xs.iter().copied().collect::<CompensatedSum>().value()
}

/// Gamma function for real arguments (reflection below 1/2).
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}

pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// Surface area of the unit sphere `S^{d-1}` in `R^d` (equals 2 for `d = 1`).
pub fn sphere_area(dim: usize) -> f64 {
    let h = dim as f64 / 2.0;
    2.0 * std::f64::consts::PI.powf(h) / gamma(h)
}

/// Total order on floats for sorting; NaNs are rejected upstream.
#[inline]
pub fn cmp_f64(a: &f64, b: &f64) -> std::cmp::Ordering {
    a.total_cmp(b)
}

/// Result of an adaptive quadrature.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
///
/// Intervals are bisected until the Richardson error estimate drops below
/// `max(abs_tol, rel_tol * |whole|)`, or `max_depth` is reached, in which case the
/// accumulated error estimate is still returned and the caller decides.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_depth: u32,
) -> Quadrature {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut evals = 3;
    let mut err = CompensatedSum::new();
    let value = simpson_rec(f, a, b, fa, fm, fb, whole, abs_tol, max_depth, &mut evals, &mut err);
    Quadrature {
        value,
        error: err.value(),
        evaluations: evals,
    }
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
    evals: &mut usize,
    err: &mut CompensatedSum,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    *evals += 2;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        err.add(delta.abs() / 15.0);
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1, evals, err)
        + simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1, evals, err)
}

/// Integrates `f` over `[a, b]` split into panels of width at most `panel`, each handled by
/// adaptive Simpson with an absolute tolerance proportional to its share of `tol`.
///
/// Panels let oscillatory integrands be cut at their zeros so each piece is smooth.
pub fn panel_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    panel: f64,
    tol: f64,
    max_depth: u32,
) -> Result<Quadrature> {
    if !(b > a) {
        return Ok(Quadrature {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let n_panels = ((b - a) / panel).ceil().max(1.0) as usize;
    let width = (b - a) / n_panels as f64;
    let per_panel = tol / n_panels as f64;
    let mut value = CompensatedSum::new();
    let mut error = 0.0;
    let mut evaluations = 0;
    for k in 0..n_panels {
        let lo = a + k as f64 * width;
        let hi = if k + 1 == n_panels { b } else { lo + width };
        let q = adaptive_simpson(f, lo, hi, per_panel, max_depth);
        value.add(q.value);
        error += q.error;
        evaluations += q.evaluations;
    }
    if !error.is_finite() || error > 10.0 * tol {
        return Err(Error::QuadratureFailed { tol, achieved: error });
    }
    Ok(Quadrature {
        value: value.value(),
        error,
        evaluations,
    })
}

/// Ordinary least-squares line through `(x_i, y_i)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope (0 when only two points are fitted).
    pub stderr: f64,
}

impl LineFit {
    /// 95% normal-approximation confidence interval for the slope.
    pub fn slope_interval(&self) -> (f64, f64) {
        (self.slope - 1.96 * self.stderr, self.slope + 1.96 * self.stderr)
    }
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(crate::error::invalid(
            "fit_line",
            format!("need at least two paired points, got {} and {}", xs.len(), ys.len()),
        ));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= 0.0 {
        return Err(crate::error::invalid("fit_line", "abscissae are all equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let stderr = if xs.len() > 2 {
        let rss: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| (y - intercept - slope * x).powi(2))
            .sum();
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LineFit {
        slope,
        intercept,
        stderr,
    })
}

/// Slope of `ln y` against `ln x`.
pub fn log_log_fit(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(crate::error::invalid("log_log_fit", "all values must be positive"));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    fit_line(&lx, &ly)
}

/// Sample mean and standard error of the mean.
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = compensated_sum(xs) / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn gamma_reference_values() {
        assert_relative_eq!(gamma(0.5), PI.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(gamma(1.5), PI.sqrt() / 2.0, max_relative = 1e-13);
        assert_relative_eq!(gamma(5.0), 24.0, max_relative = 1e-13);
        // high-precision reference values
        assert_relative_eq!(gamma(0.05), 19.470_085_311_255_513, max_relative = 1e-12);
        assert_relative_eq!(gamma(0.3), 2.991_568_987_687_590_6, max_relative = 1e-12);
        assert_relative_eq!(gamma(2.75), 1.608_359_421_985_545_7, max_relative = 1e-12);
        assert_relative_eq!(gamma(33.7), 3.032_162_654_739_841_6e36, max_relative = 1e-12);
        // 49! computed exactly as a float product
        let fact49: f64 = (1..=49).map(|k| k as f64).product();
        assert_relative_eq!(gamma(50.0), fact49, max_relative = 1e-12);
        // negative non-integer argument via reflection: Γ(-1/2) = -2√π
        assert_relative_eq!(gamma(-0.5), -2.0 * PI.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn simpson_integrates_smooth_functions() {
        let q = adaptive_simpson(&|x: f64| x.sin(), 0.0, PI, 1e-12, 40);
        assert_relative_eq!(q.value, 2.0, max_relative = 1e-11);
        let q = panel_simpson(&|x: f64| (PI * x).sin().powi(2), 0.0, 10.0, 1.0, 1e-10, 40).unwrap();
        assert_relative_eq!(q.value, 5.0, max_relative = 1e-10);
    }

    #[test]
    fn compensated_sum_recovers_cancellation() {
        let xs = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(compensated_sum(&xs), 2.0);
    }

    #[test]
    fn line_fit_exact() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-0.5)).collect();
        let fit = log_log_fit(&xs, &ys).unwrap();
        assert_relative_eq!(fit.slope, -0.5, epsilon = 1e-12);
        assert!(fit.stderr < 1e-12);
    }

    #[test]
    fn sphere_areas() {
        assert_relative_eq!(sphere_area(1), 2.0, max_relative = 1e-14);
        assert_relative_eq!(sphere_area(2), 2.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(sphere_area(3), 4.0 * PI, max_relative = 1e-14);
    }
}
