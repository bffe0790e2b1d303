//! Fourier-side tools in one dimension: weighted spectral norms, the Fourier form of `E_γ²`,
//! and the oscillating density pair used to show the comparison inequalities are tight.
//!
//! Transforms use `f̂(ω) = ∫ f(x) e^{−iωx} dx`, so Parseval reads `∫|f|² = (1/2π)∫|f̂|²`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::energy::{Constant, GammaOrder};
use crate::error::{invalid, Error, Result};
use crate::measures::{EmpiricalMeasure, Sampler};
use crate::numerics::{adaptive_simpson, log_log_fit, panel_simpson, CompensatedSum, LineFit};
use crate::rng::StreamRng;

/// `sin(πx)` with exact argument reduction.
pub fn sinpi(x: f64) -> f64 {
    let k = x.round();
    let y = x - k;
    let s = (PI * y).sin();
    if (k as i64).rem_euclid(2) == 0 {
        s
    } else {
        -s
    }
}

/// Below this distance from `±r` the pole-cancelling series is used.
const POLE_GUARD: f64 = 1e-6;

/// `sin(πy)/y` for small `y`.
fn sinc_pi_series(y: f64) -> f64 {
    let z = (PI * y).powi(2);
    PI * (1.0 - z / 6.0 * (1.0 - z / 20.0 * (1.0 - z / 42.0)))
}

/// Transform of `f(x) = 1{|x| ≤ π} sin(rx)`:
/// `f̂(ω) = −2i (−1)^r r sin(πω)/(ω² − r²)`, with the removable poles at `±r` handled by a
/// series in `ω ∓ r` (`f̂(±r) = ∓iπ`).
pub fn fhat_base(r: u32, omega: f64) -> Complex64 {
    let rf = r as f64;
    let sign_r = if r.is_multiple_of(2) { 1.0 } else { -1.0 };
    let im = if (omega - rf).abs() < POLE_GUARD {
        let y = omega - rf;
        -2.0 * rf * sinc_pi_series(y) / (omega + rf)
    } else if (omega + rf).abs() < POLE_GUARD {
        let y = omega + rf;
        -2.0 * rf * sinc_pi_series(y) / (omega - rf)
    } else {
        -2.0 * sign_r * rf * sinpi(omega) / ((omega - rf) * (omega + rf))
    };
    Complex64::new(0.0, im)
}

/// `f̂_β(ω) = f̂(ω)^β` for the `β`-fold self-convolution.
pub fn fhat_power(r: u32, beta_bar: u32, omega: f64) -> Complex64 {
    fhat_base(r, omega).powu(beta_bar)
}

/// `|f̂(ω)|² ≤ coef · ω^{−power}` for `ω ≥` the cutoff; used to bound the neglected tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailModel {
    pub coef: f64,
    pub power: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub omega_max: f64,
    /// Panel width; cut at the zeros of oscillatory spectra.
    pub panel: f64,
    /// Relative tolerance on the integral over `[0, omega_max]`.
    pub rel_tol: f64,
    pub max_depth: u32,
    pub tail: Option<TailModel>,
}

impl QuadConfig {
    pub fn new(omega_max: f64, panel: f64) -> Self {
        Self {
            omega_max,
            panel,
            rel_tol: 1e-8,
            max_depth: 40,
            tail: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourierNorm {
    /// `∫_{|ω| ≤ Ω} |f̂(ω)|² |ω|^{2t} dω` (both half-axes).
    pub value: f64,
    pub quad_error: f64,
    /// Bound on the neglected `|ω| > Ω` part; zero when no tail model was given.
    pub tail_bound: f64,
}

/// `∫ |f̂(ω)|² |ω|^{2t} dω` for an even `|f̂|`, by panelled adaptive Simpson on `[0, Ω]`,
/// doubled.
///
/// The first panel is integrated in `s = √ω`, which removes the integrable power singularity
/// at the origin that negative `t` can create.
pub fn weighted_fourier_norm_sq<F>(fhat: &F, t: f64, cfg: &QuadConfig) -> Result<FourierNorm>
where
    F: Fn(f64) -> Complex64 + Sync,
{
    if !(cfg.omega_max > 0.0 && cfg.panel > 0.0 && cfg.rel_tol > 0.0) {
        return Err(invalid("quad", "cutoff, panel and tolerance must be positive"));
    }
    let floor = 1e-12 * cfg.panel;
    let h = |w: f64| {
        let w = w.max(floor);
        fhat(w).norm_sqr() * w.powf(2.0 * t)
    };
    let first = cfg.panel.min(cfg.omega_max);
    let sub = |s: f64| 2.0 * s * h(s * s);
    // rough scale for the tolerance
    let coarse_n = ((cfg.omega_max / cfg.panel).ceil() as usize).clamp(1, 1 << 20);
    let coarse_step = cfg.omega_max / coarse_n as f64;
    let mut coarse = CompensatedSum::new();
    for k in 0..coarse_n {
        coarse.add(h((k as f64 + 0.5) * coarse_step) * coarse_step);
    }
    let tol = (cfg.rel_tol * coarse.value().abs()).max(1e-300);
    let head = adaptive_simpson(&sub, 0.0, first.sqrt(), tol / 8.0, cfg.max_depth);
    let body = panel_simpson(&h, first, cfg.omega_max, cfg.panel, tol, cfg.max_depth)?;
    let total = head.value + body.value;
    let error = head.error + body.error;
    if error > 10.0 * tol.max(cfg.rel_tol * total.abs()) {
        return Err(Error::QuadratureFailed {
            tol,
            achieved: error,
        });
    }
    let tail_bound = cfg.tail.map_or(0.0, |tm| {
        let q = tm.power - 2.0 * t - 1.0;
        if q > 0.0 {
            2.0 * tm.coef * cfg.omega_max.powf(-q) / q
        } else {
            f64::INFINITY
        }
    });
    Ok(FourierNorm {
        value: 2.0 * total,
        quad_error: 2.0 * error,
        tail_bound,
    })
}

/// `G(x) = ∫_x^∞ cos u u^{−p} du` for `p ∈ (1, 3)`, tabulated once per `p`.
///
/// Above [`CosPowerTable::FAR`] the asymptotic series is used, below 1 the termwise-integrated
/// Taylor series, and in between cubic Hermite interpolation with the exact derivative
/// `G'(x) = −cos x x^{−p}` on nodes filled by 5-point Gauss–Legendre from `FAR` downwards.
struct CosPowerTable {
    p: f64,
    values: Vec<f64>,
}

impl CosPowerTable {
    const FAR: f64 = 200.0;
    const STEP: f64 = 1.0 / 256.0;

    fn new(p: f64) -> Self {
        const GL: [(f64, f64); 5] = [
            (0.0, 0.568_888_888_888_888_9),
            (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
            (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
            (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
            (0.906_179_845_938_664, 0.236_926_885_056_189_1),
        ];
        let nodes = ((Self::FAR - 1.0) / Self::STEP).round() as usize;
        let mut values = vec![0.0; nodes + 1];
        values[nodes] = cos_power_asymptotic(Self::FAR, p);
        for j in (0..nodes).rev() {
            let mid = 1.0 + (j as f64 + 0.5) * Self::STEP;
            let half = 0.5 * Self::STEP;
            let piece: f64 = GL
                .iter()
                .map(|(t, w)| {
                    let u = mid + half * t;
                    w * u.cos() * u.powf(-p)
                })
                .sum();
            values[j] = values[j + 1] + half * piece;
        }
        Self { p, values }
    }

    fn eval(&self, x: f64) -> f64 {
        let p = self.p;
        if x >= Self::FAR {
            return cos_power_asymptotic(x, p);
        }
        if x <= 1.0 {
            // G(1) + Σ_k (−1)^k (1 − x^{2k+1−p}) / ((2k)! (2k+1−p))
            let mut total = self.values[0];
            let mut fact = 1.0;
            for k in 0..12 {
                let q = 2.0 * k as f64 + 1.0 - p;
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                total += sign * (1.0 - x.powf(q)) / (fact * q);
                fact *= ((2 * k + 1) * (2 * k + 2)) as f64;
            }
            return total;
        }
        let t = (x - 1.0) / Self::STEP;
        let j = (t.floor() as usize).min(self.values.len() - 2);
        let s = t - j as f64;
        let (x0, x1) = (1.0 + j as f64 * Self::STEP, 1.0 + (j + 1) as f64 * Self::STEP);
        let d0 = -x0.cos() * x0.powf(-p) * Self::STEP;
        let d1 = -x1.cos() * x1.powf(-p) * Self::STEP;
        let (s2, s3) = (s * s, s * s * s);
        (2.0 * s3 - 3.0 * s2 + 1.0) * self.values[j]
            + (s3 - 2.0 * s2 + s) * d0
            + (-2.0 * s3 + 3.0 * s2) * self.values[j + 1]
            + (s3 - s2) * d1
    }

    /// `∫_Ω^∞ cos(aω) ω^{−p} dω` for `a ≥ 0`.
    fn tail(&self, a: f64, omega: f64) -> f64 {
        let p = self.p;
        if a == 0.0 {
            return omega.powf(1.0 - p) / (p - 1.0);
        }
        // u = aω
        a.powf(p - 1.0) * self.eval(a * omega)
    }
}

/// Asymptotic expansion of `∫_X^∞ cos u u^{−p} du`, accurate for large `X`.
fn cos_power_asymptotic(x: f64, p: f64) -> f64 {
    // Re of i e^{ix} Σ_k (−i)^k (p)_k x^{−p−k}
    let mut term = Complex64::new(0.0, 1.0) * Complex64::from_polar(x.powf(-p), x);
    let mut sum = term.re;
    for k in 0..8 {
        term *= Complex64::new(0.0, -(p + k as f64) / x);
        sum += term.re;
    }
    sum
}

#[cfg(test)]
fn cos_power_integral(x: f64, p: f64) -> f64 {
    const FAR: f64 = 200.0;
    if x >= FAR {
        return cos_power_asymptotic(x, p);
    }
    let mut total = cos_power_asymptotic(FAR, p);
    let mut start = x;
    if x < 1.0 {
        // ∫_x^1 u^{−p} exactly plus the regular remainder (cos u − 1) u^{−p}
        total += (x.powf(1.0 - p) - 1.0) / (p - 1.0);
        let reg = |u: f64| {
            if u == 0.0 {
                0.0
            } else {
                -2.0 * (0.5 * u).sin().powi(2) * u.powf(-p)
            }
        };
        total += adaptive_simpson(&reg, x, 1.0, 1e-15, 40).value;
        start = 1.0;
    }
    let f = |u: f64| u.cos() * u.powf(-p);
    total += panel_simpson(&f, start, FAR, PI / 2.0, 1e-14, 40)
        .map(|q| q.value)
        .unwrap_or_else(|_| adaptive_simpson(&f, start, FAR, 1e-14, 50).value);
    total
}

/// `E_γ²(μ, ν)` for one-dimensional measures from the Fourier form
/// `F_γ(1) ∫ |μ̂(ω) − ν̂(ω)|² |ω|^{−1−γ} dω`.
///
/// The body `[0, Ω]` is integrated numerically with `Ω = 2000/spread`; the tail is added
/// exactly pair by pair through `|Δ(ω)|² = Σ c_a c_b cos(ω(z_a − z_b))`.
pub fn fourier_energy_sq_1d(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure, gamma: f64) -> Result<f64> {
    let g = GammaOrder::new(gamma, 1)?;
    mu.check_same_dim(nu)?;
    if mu.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: mu.dim(),
        });
    }
    let atoms = crate::energy::signed_atoms_1d(mu, nu);
    let lo = atoms.iter().map(|a| a.0).fold(f64::INFINITY, f64::min);
    let hi = atoms.iter().map(|a| a.0).fold(f64::NEG_INFINITY, f64::max);
    let spread = hi - lo;
    if spread == 0.0 {
        return Ok(0.0);
    }
    // center to keep phases small
    let mid = 0.5 * (lo + hi);
    let centered: Vec<(f64, f64)> = atoms.iter().map(|(z, c)| (z - mid, *c)).collect();
    let delta = |w: f64| -> Complex64 {
        let mut re = CompensatedSum::new();
        let mut im = CompensatedSum::new();
        for (z, c) in &centered {
            // e^{iθ} − 1 = −2 sin²(θ/2) + i sin θ
            let th = w * z;
            re.add(-2.0 * c * (0.5 * th).sin().powi(2));
            im.add(c * th.sin());
        }
        Complex64::new(re.value(), im.value())
    };
    let omega = 2000.0 / spread;
    let mut cfg = QuadConfig::new(omega, PI / spread);
    cfg.rel_tol = 1e-9;
    let p = 1.0 + gamma;
    let body = weighted_fourier_norm_sq(&delta, -0.5 * p, &cfg)?;
    let n = centered.len();
    let table = CosPowerTable::new(p);
    let tail_rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|a| {
            let (za, ca) = centered[a];
            let mut s = CompensatedSum::new();
            s.add(ca * ca * table.tail(0.0, omega));
            for (zb, cb) in &centered[a + 1..] {
                s.add(2.0 * ca * cb * table.tail((za - zb).abs(), omega));
            }
            s.value()
        })
        .collect();
    let tail: f64 = tail_rows.iter().sum();
    Ok(g.constant(Constant::F) * (body.value + 2.0 * tail))
}

/// Which density of the construction to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstructionSide {
    P,
    Q,
    Baseline,
}

/// `f_{β̄} = f * ⋯ * f` (`β̄` factors) on the grid `x_k = k h`, `|k| ≤ β̄ J` with `h = π/J`.
///
/// For `β̄ ≥ 2` the table is the inverse DFT of `f̂^{β̄}` sampled on a period that holds the whole
/// support, so the only error is aliasing of the `|ω|^{−2β̄}` tail.
pub fn f_beta_table(r: u32, beta_bar: u32, per_unit: u32) -> Result<(f64, Vec<f64>)> {
    if r == 0 || beta_bar == 0 {
        return Err(invalid("r", "frequency and convolution order must be positive"));
    }
    let j = (per_unit as usize) * r as usize;
    if j < 16 * r as usize {
        return Err(Error::GridResolution(format!(
            "{per_unit} points per unit frequency is below the 16 required"
        )));
    }
    let h = PI / j as f64;
    let bb = beta_bar as usize;
    if bb == 1 {
        let base = (0..=2 * j)
            .map(|k| {
                let kk = k as i64 - j as i64;
                if kk.unsigned_abs() as usize == j {
                    0.0
                } else {
                    (r as f64 * kk as f64 * h).sin()
                }
            })
            .collect();
        return Ok((h, base));
    }
    let out_len = bb * 2 * j + 1;
    let size = out_len.next_power_of_two();
    let period = size as f64 * h;
    let shift = (bb * j) as f64 * h;
    let mut buf: Vec<Complex64> = (0..size)
        .into_par_iter()
        .map(|k| {
            let kk = if k <= size / 2 { k as f64 } else { k as f64 - size as f64 };
            let w = 2.0 * PI * kk / period;
            let v = fhat_power(r, beta_bar, w) * Complex64::from_polar(1.0, -w * shift);
            if k == size / 2 {
                Complex64::new(v.re, 0.0)
            } else {
                v
            }
        })
        .collect();
    FftPlanner::<f64>::new().plan_fft_inverse(size).process(&mut buf);
    Ok((h, buf[..out_len].iter().map(|z| z.re / period).collect()))
}

/// Trapezoid cumulative integral on a uniform grid.
fn cumulative(values: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = CompensatedSum::new();
    out.push(0.0);
    for w in values.windows(2) {
        acc.add(0.5 * h * (w[0] + w[1]));
        out.push(acc.value());
    }
    out
}

/// Cumulative trapezoid with the `h²/12 (f'(x) − f'(x₀))` Euler–Maclaurin correction, for
/// smooth oscillatory integrands.
fn cumulative_corrected(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = cumulative(values, h);
    if n < 3 {
        return out;
    }
    let deriv = |k: usize| -> f64 {
        if k == 0 {
            (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h)
        } else if k == n - 1 {
            (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * h)
        } else {
            (values[k + 1] - values[k - 1]) / (2.0 * h)
        }
    };
    let d0 = deriv(0);
    for (k, v) in out.iter_mut().enumerate() {
        *v -= h * h / 12.0 * (deriv(k) - d0);
    }
    out
}

fn trapezoid(values: &[f64], h: f64) -> f64 {
    *cumulative(values, h).last().unwrap_or(&0.0)
}

/// Points per unit of `π/r` on the spatial grids (spacing `π/(32r)`).
const GRID_PER_UNIT: u32 = 32;

/// The pair `p_ε = p₀ + εκ g/2`, `q_ε = p₀ − εκ g/2` with `g(x) = f_{β̄}(β̄x)`,
/// `f(x) = 1{|x| ≤ π} sin(rx)`, `β̄ = ⌈β⌉ + 1` and `r = ⌈ε^{−1/β}⌉`.
///
/// `κ = 2/‖g‖₁` fixes `TV(p_ε, q_ε) = ε`. `p₀ ∝ exp(−1/(1 − (x/B)²))` on `|x| < B = β̄π + 1`.
/// All densities are tabulated on a grid of spacing `π/(32 r β̄)`.
#[derive(Debug, Clone)]
pub struct Construction1D {
    beta: f64,
    beta_bar: u32,
    epsilon: f64,
    r: u32,
    kappa: f64,
    half_width: f64,
    h: f64,
    /// grid index of x = 0
    center: usize,
    g: Vec<f64>,
    p0: Vec<f64>,
    cdf_p: Arc<Vec<f64>>,
    cdf_q: Arc<Vec<f64>>,
    cdf_p0: Arc<Vec<f64>>,
    tv: f64,
}

impl Construction1D {
    pub fn build(beta: f64, epsilon: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(invalid("beta", format!("must be positive, got {beta}")));
        }
        if !(0.0..1.0).contains(&epsilon) {
            return Err(invalid("epsilon", format!("must lie in [0, 1), got {epsilon}")));
        }
        let beta_bar = beta.ceil() as u32 + 1;
        let r = if epsilon == 0.0 {
            1
        } else {
            (epsilon.powf(-1.0 / beta) - 1e-9).ceil().max(1.0) as u32
        };
        let (hf, f_table) = f_beta_table(r, beta_bar, GRID_PER_UNIT)?;
        let h = hf / beta_bar as f64;
        let half_width = beta_bar as f64 * PI + 1.0;
        let m = (half_width / h).ceil() as usize;
        let kf = (f_table.len() - 1) / 2;
        let xs = |j: usize| (j as f64 - m as f64) * h;
        let g: Vec<f64> = (0..=2 * m)
            .map(|j| {
                let off = j as i64 - m as i64;
                if off.unsigned_abs() as usize <= kf {
                    f_table[(off + kf as i64) as usize]
                } else {
                    0.0
                }
            })
            .collect();
        let bump: Vec<f64> = (0..=2 * m)
            .map(|j| {
                let u = xs(j) / half_width;
                if u.abs() < 1.0 {
                    (-1.0 / (1.0 - u * u)).exp()
                } else {
                    0.0
                }
            })
            .collect();
        let z = trapezoid(&bump, h);
        let p0: Vec<f64> = bump.iter().map(|v| v / z).collect();
        let g_l1 = trapezoid(&g.iter().map(|v| v.abs()).collect::<Vec<_>>(), h);
        let kappa = 2.0 / g_l1;
        let amp = 0.5 * epsilon * kappa;
        let p: Vec<f64> = p0.iter().zip(&g).map(|(a, b)| a + amp * b).collect();
        let q: Vec<f64> = p0.iter().zip(&g).map(|(a, b)| a - amp * b).collect();
        let min_density = p.iter().chain(&q).copied().fold(f64::INFINITY, f64::min);
        if min_density < -1e-14 {
            return Err(Error::NegativeDensity {
                epsilon,
                min_density,
            });
        }
        let diff: Vec<f64> = p.iter().zip(&q).map(|(a, b)| (a - b).abs()).collect();
        let tv = 0.5 * trapezoid(&diff, h);
        let cdf = |d: &[f64]| -> Arc<Vec<f64>> {
            let c = cumulative(&d.iter().map(|v| v.max(0.0)).collect::<Vec<_>>(), h);
            let total = *c.last().expect("nonempty grid");
            Arc::new(c.into_iter().map(|v| v / total).collect())
        };
        Ok(Self {
            beta,
            beta_bar,
            epsilon,
            r,
            kappa,
            half_width,
            h,
            center: m,
            cdf_p: cdf(&p),
            cdf_q: cdf(&q),
            cdf_p0: cdf(&p0),
            g,
            p0,
            tv,
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn beta_bar(&self) -> u32 {
        self.beta_bar
    }
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
    pub fn r(&self) -> u32 {
        self.r
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    /// Spatial grid spacing.
    pub fn step(&self) -> f64 {
        self.h
    }
    /// Support half-width `B` of the baseline.
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.g.len())
            .map(|j| (j as f64 - self.center as f64) * self.h)
            .collect()
    }

    fn amplitude(&self) -> f64 {
        0.5 * self.epsilon * self.kappa
    }

    pub fn density(&self, side: ConstructionSide) -> Vec<f64> {
        let a = match side {
            ConstructionSide::P => self.amplitude(),
            ConstructionSide::Q => -self.amplitude(),
            ConstructionSide::Baseline => 0.0,
        };
        self.p0.iter().zip(&self.g).map(|(b, g)| b + a * g).collect()
    }

    pub fn cdf(&self, side: ConstructionSide) -> &[f64] {
        match side {
            ConstructionSide::P => &self.cdf_p,
            ConstructionSide::Q => &self.cdf_q,
            ConstructionSide::Baseline => &self.cdf_p0,
        }
    }

    /// `TV(p_ε, q_ε) = ½∫|p_ε − q_ε|` on the grid.
    pub fn tv(&self) -> f64 {
        self.tv
    }

    /// `∫ g` on the grid; zero up to rounding.
    pub fn perturbation_integral(&self) -> f64 {
        trapezoid(&self.g, self.h)
    }

    /// `x ↦ ∫_{−∞}^x (p_ε − q_ε)`.
    fn cdf_gap(&self) -> Vec<f64> {
        let a = 2.0 * self.amplitude();
        cumulative_corrected(&self.g, self.h).into_iter().map(|v| a * v).collect()
    }

    /// `d̄_H(p_ε, q_ε) = max_b |∫_{−∞}^b (p_ε − q_ε)|`.
    pub fn dhbar(&self) -> f64 {
        self.cdf_gap().iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `E_1²(p_ε, q_ε) = 2∫ (P_ε − Q_ε)²` from the tabulated densities.
    pub fn energy1_sq(&self) -> f64 {
        let sq: Vec<f64> = self.cdf_gap().iter().map(|v| v * v).collect();
        2.0 * trapezoid(&sq, self.h)
    }

    /// `p̂_ε − q̂_ε = εκ/β̄ · f̂(ω/β̄)^{β̄}`.
    pub fn spectrum_gap(&self, omega: f64) -> Complex64 {
        let bb = self.beta_bar as f64;
        fhat_power(self.r, self.beta_bar, omega / bb) * (2.0 * self.amplitude() / bb)
    }

    fn gap_quad(&self) -> QuadConfig {
        let bb = self.beta_bar as f64;
        let mut cfg = QuadConfig::new(64.0 * self.r as f64 * bb, bb);
        // |f̂(u)| ≤ (8/3) r/u² for u > 2r, with u = ω/β̄
        let c = 2.0 * self.amplitude() / bb * (8.0 / 3.0 * self.r as f64 * bb * bb).powi(self.beta_bar as i32);
        cfg.tail = Some(TailModel {
            coef: c * c,
            power: 4.0 * self.beta_bar as f64,
        });
        cfg
    }

    /// `E_γ²(p_ε, q_ε)` through the Fourier form.
    pub fn energy_sq_fourier(&self, gamma: f64) -> Result<f64> {
        let g = GammaOrder::new(gamma, 1)?;
        let n = weighted_fourier_norm_sq(&|w| self.spectrum_gap(w), -0.5 * (1.0 + gamma), &self.gap_quad())?;
        Ok(g.constant(Constant::F) * n.value)
    }

    /// `‖p_ε − q_ε‖_{t,2} = (∫|ω|^{2t}|p̂_ε − q̂_ε|²)^{1/2}`.
    pub fn sobolev_gap(&self, t: f64) -> Result<f64> {
        let n = weighted_fourier_norm_sq(&|w| self.spectrum_gap(w), t, &self.gap_quad())?;
        Ok(n.value.sqrt())
    }

    pub fn sampler(&self, side: ConstructionSide) -> GridSampler {
        GridSampler {
            x0: -(self.center as f64) * self.h,
            h: self.h,
            cdf: match side {
                ConstructionSide::P => self.cdf_p.clone(),
                ConstructionSide::Q => self.cdf_q.clone(),
                ConstructionSide::Baseline => self.cdf_p0.clone(),
            },
        }
    }
}

/// Inverse-CDF sampler for a tabulated density with piecewise-linear CDF.
#[derive(Debug, Clone)]
pub struct GridSampler {
    x0: f64,
    h: f64,
    cdf: Arc<Vec<f64>>,
}

impl GridSampler {
    /// The tabulated CDF at `x` (linear between nodes).
    pub fn cdf_at(&self, x: f64) -> f64 {
        let t = (x - self.x0) / self.h;
        if t <= 0.0 {
            return 0.0;
        }
        let last = self.cdf.len() - 1;
        if t >= last as f64 {
            return 1.0;
        }
        let i = t.floor() as usize;
        let f = t - i as f64;
        self.cdf[i] * (1.0 - f) + self.cdf[i + 1] * f
    }

    pub fn quantile(&self, u: f64) -> f64 {
        let i = self.cdf.partition_point(|c| *c < u).clamp(1, self.cdf.len() - 1);
        let (a, b) = (self.cdf[i - 1], self.cdf[i]);
        let f = if b > a { (u - a) / (b - a) } else { 0.5 };
        self.x0 + (i as f64 - 1.0 + f) * self.h
    }

    /// `n` draws as a plain vector.
    pub fn draw_values(&self, n: usize, rng: &mut StreamRng) -> Vec<f64> {
        (0..n).map(|_| self.quantile(rng.random::<f64>())).collect()
    }
}

impl Sampler for GridSampler {
    fn dim(&self) -> usize {
        1
    }

    fn draw_into(&self, n: usize, rng: &mut StreamRng, out: &mut Vec<f64>) {
        out.extend((0..n).map(|_| self.quantile(rng.random::<f64>())));
    }
}

/// Builds the density pair for smoothness `beta` and TV level `epsilon`.
pub fn build_construction_pair(beta: f64, epsilon: f64) -> Result<Construction1D> {
    Construction1D::build(beta, epsilon)
}

/// A fitted log-log slope for one quantity across `r`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeRecord {
    pub quantity: String,
    pub slope: f64,
    pub stderr: f64,
    pub expected: f64,
    pub r_list: Vec<u32>,
    pub values: Vec<f64>,
}

/// Quantities of `f_{β̄}` at one frequency.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub r: u32,
    /// `‖f_{β̄}‖_{t,2}` for each requested `t`, in order.
    pub sobolev: Vec<f64>,
    pub l1: f64,
    pub dhbar: f64,
}

pub fn scaling_row(r: u32, beta_bar: u32, ts: &[f64]) -> Result<ScalingRow> {
    let mut cfg = QuadConfig::new(64.0 * r as f64, 1.0);
    let c = (8.0 / 3.0 * r as f64).powi(beta_bar as i32);
    cfg.tail = Some(TailModel {
        coef: c * c,
        power: 4.0 * beta_bar as f64,
    });
    let sobolev = ts
        .iter()
        .map(|&t| {
            weighted_fourier_norm_sq(&|w| fhat_power(r, beta_bar, w), t, &cfg).map(|n| n.value.sqrt())
        })
        .collect::<Result<Vec<f64>>>()?;
    let (h, table) = f_beta_table(r, beta_bar, GRID_PER_UNIT)?;
    let l1 = trapezoid(&table.iter().map(|v| v.abs()).collect::<Vec<_>>(), h);
    let dhbar = cumulative(&table, h).iter().fold(0.0f64, |m, v| m.max(v.abs()));
    Ok(ScalingRow { r, sobolev, l1, dhbar })
}

/// Log-log slopes in `r` of `‖f_{β̄}‖_{t,2}` (expected `t`), `‖f_{β̄}‖₁` (expected 0) and
/// `d̄_H(f_{β̄}, 0)` (expected −1).
pub fn verify_scaling(beta_bar: u32, ts: &[f64], r_list: &[u32]) -> Result<Vec<SlopeRecord>> {
    if r_list.len() < 2 || r_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("r_list", "need at least two strictly increasing frequencies"));
    }
    for &t in ts {
        if t <= -(beta_bar as f64 + 0.5) {
            return Err(invalid("t", format!("{t} makes the weighted norm diverge at the origin")));
        }
    }
    let rows = r_list
        .par_iter()
        .map(|&r| scaling_row(r, beta_bar, ts))
        .collect::<Result<Vec<_>>>()?;
    let rs: Vec<f64> = r_list.iter().map(|&r| r as f64).collect();
    let record = |quantity: String, expected: f64, values: Vec<f64>| -> Result<SlopeRecord> {
        let LineFit { slope, stderr, .. } = log_log_fit(&rs, &values)?;
        Ok(SlopeRecord {
            quantity,
            slope,
            stderr,
            expected,
            r_list: r_list.to_vec(),
            values,
        })
    };
    let mut out = Vec::new();
    for (i, &t) in ts.iter().enumerate() {
        out.push(record(
            format!("sobolev_t={t}"),
            t,
            rows.iter().map(|row| row.sobolev[i]).collect(),
        )?);
    }
    out.push(record("l1".into(), 0.0, rows.iter().map(|row| row.l1).collect())?);
    out.push(record("dhbar".into(), -1.0, rows.iter().map(|row| row.dhbar).collect())?);
    Ok(out)
}

/// One row of the ε sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TightnessRow {
    pub epsilon: f64,
    pub r: u32,
    pub tv: f64,
    pub energy1: f64,
    pub dhbar: f64,
    /// `‖p_ε − q_ε‖_{β,2}`
    pub sobolev_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TightnessReport {
    pub beta: f64,
    pub rows: Vec<TightnessRow>,
    /// slope of `log E_1` on `log TV`; the lower bound predicts `(β+1)/β`
    pub energy_slope: LineFit,
    /// slope of `log d̄_H` on `log TV`; predicted `(β+1)/β`
    pub dhbar_slope: LineFit,
    pub expected_slope: f64,
}

pub fn tightness_sweep(beta: f64, eps_list: &[f64]) -> Result<TightnessReport> {
    let rows = eps_list
        .par_iter()
        .map(|&eps| {
            let c = Construction1D::build(beta, eps)?;
            Ok(TightnessRow {
                epsilon: eps,
                r: c.r(),
                tv: c.tv(),
                energy1: c.energy1_sq().sqrt(),
                dhbar: c.dhbar(),
                sobolev_gap: c.sobolev_gap(beta)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let tv: Vec<f64> = rows.iter().map(|r| r.tv).collect();
    let e: Vec<f64> = rows.iter().map(|r| r.energy1).collect();
    let d: Vec<f64> = rows.iter().map(|r| r.dhbar).collect();
    Ok(TightnessReport {
        beta,
        energy_slope: log_log_fit(&tv, &e)?,
        dhbar_slope: log_log_fit(&tv, &d)?,
        expected_slope: (beta + 1.0) / beta,
        rows,
    })
}
