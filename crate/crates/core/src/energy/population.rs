//! Analytic population oracles for `E_γ²(ν_n, ν)` when `ν` is known.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::measures::{norm, DistributionSpec, EmpiricalMeasure};
use crate::numerics::{adaptive_simpson, compensated_sum, gamma as gamma_fn, log_log_fit, mean_and_se, sphere_area, LineFit};
use crate::rng;

use super::{pow_from_sq, GammaOrder};

/// A distribution whose potential `φ(x) = E‖x − Y‖^γ` and self-energy `E‖Y − Y'‖^γ` are known.
pub trait PopulationOracle: Sync {
    fn dim(&self) -> usize;
    fn gamma(&self) -> f64;
    fn potential(&self, x: &[f64]) -> f64;
    fn self_energy(&self) -> f64;
}

/// `E_γ²(μ, ν) = 2 Σ w_i φ(x_i) − Σ w_i w_j ‖x_i − x_j‖^γ − E‖Y − Y'‖^γ` for a population `ν`.
pub fn energy_sq_to_population(mu: &EmpiricalMeasure, oracle: &dyn PopulationOracle) -> Result<f64> {
    if mu.dim() != oracle.dim() {
        return Err(crate::Error::DimensionMismatch {
            expected: oracle.dim(),
            found: mu.dim(),
        });
    }
    let gamma = oracle.gamma();
    let cross: Vec<f64> = mu
        .points()
        .zip(mu.weights())
        .map(|(x, w)| w * oracle.potential(x))
        .collect();
    let own = super::self_sum(mu, gamma, false);
    let value = 2.0 * compensated_sum(&cross) - own - oracle.self_energy();
    Ok(value.max(0.0))
}

const TABLE_SIZE: usize = 2048;

/// Uniform distribution on the unit ball of `R^d`.
///
/// From a point at radius `ρ` the ball boundary along a direction at angle `α` to `x` lies at
/// distance `L(α) = −ρ cos α + √(1 − ρ² sin² α)`, so
/// `φ(ρ) = |S^{d−2}| / (V_d (γ + d)) ∫_0^π L(α)^{γ+d} sin^{d−2} α dα`,
/// a smooth one-dimensional integral. `φ` is tabulated on `[0, 1]` and interpolated with
/// four-point Lagrange stencils.
#[derive(Debug, Clone)]
pub struct UniformBallPotential {
    dim: usize,
    gamma: f64,
    table: Vec<f64>,
    self_energy: f64,
}

impl UniformBallPotential {
    pub fn new(g: &GammaOrder) -> Self {
        let dim = g.dim();
        let gamma = g.gamma();
        let table: Vec<f64> = (0..=TABLE_SIZE)
            .map(|k| ball_potential_exact(dim, gamma, k as f64 / TABLE_SIZE as f64))
            .collect();
        let self_energy = if dim == 1 {
            2f64.powf(gamma + 1.0) / ((gamma + 1.0) * (gamma + 2.0))
        } else {
            // E φ(|Y|) with |Y| having density d ρ^{d−1}
            let d = dim as f64;
            adaptive_simpson(
                &|rho: f64| d * rho.powf(d - 1.0) * ball_potential_exact(dim, gamma, rho),
                0.0,
                1.0,
                1e-13,
                30,
            )
            .value
        };
        Self {
            dim,
            gamma,
            table,
            self_energy,
        }
    }

    /// `φ` at radius `rho ≤ 1` by direct quadrature.
    pub fn exact(&self, rho: f64) -> f64 {
        ball_potential_exact(self.dim, self.gamma, rho)
    }

    fn interpolate(&self, rho: f64) -> f64 {
        let h = 1.0 / TABLE_SIZE as f64;
        let t = rho / h;
        let base = (t.floor() as isize - 1).clamp(0, TABLE_SIZE as isize - 3) as usize;
        let mut out = 0.0;
        for i in 0..4 {
            let xi = (base + i) as f64;
            let mut l = 1.0;
            for j in 0..4 {
                if i != j {
                    let xj = (base + j) as f64;
                    l *= (t - xj) / (xi - xj);
                }
            }
            out += l * self.table[base + i];
        }
        out
    }
}

impl PopulationOracle for UniformBallPotential {
    fn dim(&self) -> usize {
        self.dim
    }

    fn gamma(&self) -> f64 {
        self.gamma
    }

    fn potential(&self, x: &[f64]) -> f64 {
        let rho = norm(x);
        if rho > 1.0 {
            // off the support: no table, integrate directly
            return ball_potential_outside(self.dim, self.gamma, x);
        }
        if self.dim == 1 {
            return ball_potential_exact(1, self.gamma, rho);
        }
        self.interpolate(rho)
    }

    fn self_energy(&self) -> f64 {
        self.self_energy
    }
}

fn ball_volume(dim: usize) -> f64 {
    let d = dim as f64;
    PI.powf(d / 2.0) / gamma_fn(d / 2.0 + 1.0)
}

fn ball_potential_exact(dim: usize, gamma: f64, rho: f64) -> f64 {
    let p = gamma + 1.0;
    if dim == 1 {
        return ((1.0 + rho).powf(p) + (1.0 - rho).powf(p)) / (2.0 * p);
    }
    let d = dim as f64;
    let k = (d - 2.0) as i32;
    let integrand = |a: f64| {
        let (s, c) = a.sin_cos();
        let l = (-rho * c + (1.0 - rho * rho * s * s).max(0.0).sqrt()).max(0.0);
        l.powf(gamma + d) * s.powi(k)
    };
    let q = adaptive_simpson(&integrand, 0.0, PI, 1e-14, 40);
    sphere_area(dim - 1) / (ball_volume(dim) * (gamma + d)) * q.value
}

/// Fallback for points outside the ball: plain polar quadrature over the ball.
fn ball_potential_outside(dim: usize, gamma: f64, x: &[f64]) -> f64 {
    let rho = norm(x);
    if dim == 1 {
        let p = gamma + 1.0;
        return ((rho + 1.0).powf(p) - (rho - 1.0).powf(p)) / (2.0 * p);
    }
    let d = dim as f64;
    let k = (d - 2.0) as i32;
    let zc = sphere_area(dim - 1) / sphere_area(dim);
    let inner = |s: f64| {
        let q = adaptive_simpson(
            &|t: f64| pow_from_sq(rho * rho + s * s - 2.0 * rho * s * t.cos(), gamma) * t.sin().powi(k),
            0.0,
            PI,
            1e-12,
            30,
        );
        d * s.powf(d - 1.0) * zc * q.value
    };
    adaptive_simpson(&inner, 0.0, 1.0, 1e-11, 30).value
}

/// Validates a uniform-ball oracle request.
pub fn uniform_ball_oracle(gamma: f64, dim: usize) -> Result<UniformBallPotential> {
    if dim == 0 {
        return Err(invalid("dim", "must be positive"));
    }
    Ok(UniformBallPotential::new(&GammaOrder::new(gamma, dim)?))
}

/// `M_γ` of the uniform unit ball: `E‖Y‖^γ = d/(d + γ)`.
pub fn uniform_ball_moment(gamma: f64, dim: usize) -> f64 {
    dim as f64 / (dim as f64 + gamma)
}

/// `10 d^{γ/2} M_γ(ν) / n`.
pub fn concentration_bound(gamma: f64, dim: usize, moment: f64, n: usize) -> f64 {
    10.0 * (dim as f64).powf(gamma / 2.0) * moment / n as f64
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationRow {
    pub dim: usize,
    pub gamma: f64,
    pub n: usize,
    pub trials: usize,
    pub mean: f64,
    pub std_error: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationCurve {
    pub dim: usize,
    pub gamma: f64,
    pub rows: Vec<ConcentrationRow>,
    pub slope: LineFit,
    pub within_bound: bool,
}

/// Monte Carlo `E[E_γ²(ν_n, ν)]` for `ν` uniform on the unit ball, against the
/// `10 d^{γ/2} M_γ(ν)/n` bound. Trial `t` at the `i`-th size uses substream `t` of
/// `child_seed(seed, i)`.
pub fn concentration_curve(gamma: f64, dim: usize, n_list: &[usize], trials: usize, seed: u64) -> Result<ConcentrationCurve> {
    if n_list.len() < 2 || trials < 2 || n_list.contains(&0) {
        return Err(invalid("n_list", "need two or more positive sizes and at least two trials"));
    }
    let oracle = uniform_ball_oracle(gamma, dim)?;
    let sampler = DistributionSpec::UniformBall { dim }.sampler()?;
    let moment = uniform_ball_moment(gamma, dim);
    let mut rows = Vec::with_capacity(n_list.len());
    for (i, &n) in n_list.iter().enumerate() {
        let s = rng::child_seed(seed, i as u64);
        let vals = (0..trials)
            .into_par_iter()
            .map(|t| {
                let x = sampler.draw(n, &mut rng::substream(s, t as u64))?;
                energy_sq_to_population(&x, &oracle)
            })
            .collect::<Result<Vec<f64>>>()?;
        let (mean, std_error) = mean_and_se(&vals);
        rows.push(ConcentrationRow {
            dim,
            gamma,
            n,
            trials,
            mean,
            std_error,
            bound: concentration_bound(gamma, dim, moment, n),
        });
    }
    let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let ms: Vec<f64> = rows.iter().map(|r| r.mean).collect();
    Ok(ConcentrationCurve {
        dim,
        gamma,
        within_bound: rows.iter().all(|r| r.mean <= r.bound),
        slope: log_log_fit(&ns, &ms)?,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{sample, DistributionSpec};
    use approx::assert_relative_eq;

    #[test]
    fn one_dimensional_closed_form() {
        let o = uniform_ball_oracle(1.0, 1).unwrap();
        // E|x − U| for U ~ U[−1, 1] is (1 + x²)/2
        assert_relative_eq!(o.potential(&[0.3]), (1.0 + 0.09) / 2.0, epsilon = 1e-15);
        assert_relative_eq!(o.self_energy(), 2.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(o.potential(&[2.0]), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn disc_center_and_rim() {
        let o = uniform_ball_oracle(1.0, 2).unwrap();
        // E|Y| = 2/3 and E|e − Y| = 32/(9π) on the unit disc
        assert_relative_eq!(o.potential(&[0.0, 0.0]), 2.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(o.potential(&[0.0, 1.0]), 32.0 / (9.0 * PI), epsilon = 1e-10);
        // mean distance between two uniform points of the disc: 128/(45π)
        assert_relative_eq!(o.self_energy(), 128.0 / (45.0 * PI), epsilon = 1e-10);
    }

    #[test]
    fn interpolation_matches_quadrature() {
        for (gamma, d) in [(0.5, 3), (1.0, 5), (1.5, 2)] {
            let o = uniform_ball_oracle(gamma, d).unwrap();
            for k in 0..37 {
                let rho = k as f64 / 36.0 * 0.999_7;
                let mut x = vec![0.0; d];
                x[0] = rho;
                assert_relative_eq!(o.potential(&x), o.exact(rho), epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn outside_branch_is_continuous() {
        let o = uniform_ball_oracle(1.0, 3).unwrap();
        let inside = o.potential(&[0.0, 0.0, 0.999_999]);
        let outside = o.potential(&[0.0, 0.0, 1.000_001]);
        assert!((inside - outside).abs() < 1e-5);
    }

    #[test]
    fn sample_mean_of_potential_matches_self_energy() {
        let o = uniform_ball_oracle(0.7, 4).unwrap();
        let x = sample(&DistributionSpec::UniformBall { dim: 4 }, 20_000, 3).unwrap();
        let vals: Vec<f64> = x.points().map(|p| o.potential(p)).collect();
        let (m, se) = crate::numerics::mean_and_se(&vals);
        assert!((m - o.self_energy()).abs() < 4.0 * se);
    }

    #[test]
    fn concentration_small() {
        let c = concentration_curve(1.0, 2, &[20, 80], 100, 1).unwrap();
        assert!(c.within_bound);
        assert!((c.slope.slope + 1.0).abs() < 0.3, "{:?}", c.slope);
        assert_relative_eq!(uniform_ball_moment(1.0, 2), 2.0 / 3.0);
    }
}
