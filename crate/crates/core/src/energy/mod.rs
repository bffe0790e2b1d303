//! The generalized energy distance
//!
//! ```text
//! E_γ²(μ, ν) = E[2‖X − Y‖^γ − ‖X − X'‖^γ − ‖Y − Y'‖^γ],   γ ∈ (0, 2),
//! ```
//!
//! computed as a weighted V-statistic, as an unbiased U-statistic, through the kernel
//! `k_γ(x, y) = ‖x‖^γ + ‖y‖^γ − ‖x − y‖^γ`, and against analytic population oracles.
//! Pairwise sums are row-partitioned for rayon and reduced in a fixed order with
//! compensated summation, so results do not depend on the thread count.

mod population;

pub use population::{
    concentration_bound, concentration_curve, energy_sq_to_population, uniform_ball_moment, uniform_ball_oracle,
    ConcentrationCurve, ConcentrationRow, PopulationOracle, UniformBallPotential,
};

use std::cmp::Ordering;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::measures::EmpiricalMeasure;
use crate::numerics::{cmp_f64, compensated_sum, gamma as gamma_fn, sphere_area, CompensatedSum};

/// Validated exponent `γ ∈ (0, 2)` for a fixed ambient dimension, with its constants cached.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaOrder {
    gamma: f64,
    dim: usize,
    f: f64,
    s: f64,
    cpsi: f64,
    dh_factor: f64,
}

/// Names of the cached constants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Constant {
    /// Fourier-form weight `F_γ(d)`.
    F,
    /// Sliced-form normalizer `S_γ(d)`.
    S,
    /// `C_{ψ_γ}` from the Fourier representation of `ψ_γ`.
    Cpsi,
    /// `π^{(d-1)/4} / √Γ((d+1)/2)`, the ratio between the average halfspace distance and `E_1`.
    DhFactor,
}

impl GammaOrder {
    pub fn new(gamma: f64, dim: usize) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 2.0) {
            return Err(Error::InvalidGamma(gamma));
        }
        if dim == 0 {
            return Err(invalid("dim", "dimension must be positive"));
        }
        let d = dim as f64;
        let f = gamma * 2f64.powf(gamma - 1.0) * gamma_fn((d + gamma) / 2.0)
            / (PI.powf(d / 2.0) * gamma_fn(1.0 - gamma / 2.0));
        let (s, cpsi) = if gamma == 1.0 {
            (PI.powf((d - 1.0) / 2.0) / (4.0 * gamma_fn((d + 1.0) / 2.0)), 1.0 / PI)
        } else {
            let c = (PI * (gamma - 1.0) / 4.0).cos();
            let g = gamma_fn((1.0 - gamma) / 2.0);
            let s = PI.powf(d / 2.0 + 1.0) * gamma_fn(1.0 - gamma / 2.0)
                / (gamma * 2f64.powf(gamma + 1.0) * gamma_fn((d + gamma) / 2.0) * c * c * g * g);
            (s, 1.0 / (c * g))
        };
        let dh_factor = PI.powf((d - 1.0) / 4.0) / gamma_fn((d + 1.0) / 2.0).sqrt();
        Ok(Self {
            gamma,
            dim,
            f,
            s,
            cpsi,
            dh_factor,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constant(&self, name: Constant) -> f64 {
        match name {
            Constant::F => self.f,
            Constant::S => self.s,
            Constant::Cpsi => self.cpsi,
            Constant::DhFactor => self.dh_factor,
        }
    }

    /// The same exponent in another dimension.
    pub fn with_dim(&self, dim: usize) -> Result<Self> {
        Self::new(self.gamma, dim)
    }

    /// Factor turning the direction average of squared one-dimensional energies into `E_γ²`:
    /// `S_γ(1) |S^{d-1}| / (2 S_γ(d))`.
    ///
    /// The `1/2` accounts for `v` and `−v` giving the same projected energy; with it the factor
    /// is exactly 1 in one dimension.
    pub fn slice_factor(&self) -> f64 {
        let one = Self::new(self.gamma, 1).expect("valid gamma");
        one.s / self.s * sphere_area(self.dim) / 2.0
    }

    /// `‖x‖^γ` given `‖x‖²`.
    #[inline]
    pub fn pow_from_sq(&self, d2: f64) -> f64 {
        pow_from_sq(d2, self.gamma)
    }
}

/// Convenience: the value of a named constant.
pub fn constants(g: &GammaOrder, name: Constant) -> f64 {
    g.constant(name)
}

#[inline]
pub(crate) fn pow_from_sq(d2: f64, gamma: f64) -> f64 {
    if d2 == 0.0 {
        0.0
    } else if gamma == 1.0 {
        d2.sqrt()
    } else if gamma == 0.5 {
        d2.sqrt().sqrt()
    } else if gamma == 1.5 {
        let r = d2.sqrt();
        r * r.sqrt()
    } else {
        d2.powf(0.5 * gamma)
    }
}

#[inline]
pub(crate) fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn check_dims(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure, g: &GammaOrder) -> Result<()> {
    mu.check_same_dim(nu)?;
    if mu.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: mu.dim(),
        });
    }
    Ok(())
}

/// `k_γ(x, y) = ‖x‖^γ + ‖y‖^γ − ‖x − y‖^γ`.
pub fn kernel_gamma(x: &[f64], y: &[f64], g: &GammaOrder) -> Result<f64> {
    for v in [x, y] {
        if v.len() != g.dim() {
            return Err(Error::DimensionMismatch {
                expected: g.dim(),
                found: v.len(),
            });
        }
    }
    let nx = g.pow_from_sq(x.iter().map(|v| v * v).sum());
    let ny = g.pow_from_sq(y.iter().map(|v| v * v).sum());
    Ok(nx + ny - g.pow_from_sq(dist_sq(x, y)))
}

/// `Σ_i Σ_j a_i b_j ‖x_i − y_j‖^γ` with rows reduced in order.
fn cross_sum(a: &EmpiricalMeasure, b: &EmpiricalMeasure, gamma: f64) -> f64 {
    let rows: Vec<f64> = (0..a.len())
        .into_par_iter()
        .map(|i| {
            let x = a.point(i);
            let mut s = CompensatedSum::new();
            for (y, w) in b.points().zip(b.weights()) {
                s.add(w * pow_from_sq(dist_sq(x, y), gamma));
            }
            a.weights()[i] * s.value()
        })
        .collect();
    compensated_sum(&rows)
}

/// `Σ_{i ≠ i'} a_i a_{i'} ‖x_i − x_{i'}‖^γ`, optionally with unit weights.
fn self_sum(a: &EmpiricalMeasure, gamma: f64, unit_weights: bool) -> f64 {
    let n = a.len();
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = a.point(i);
            let mut s = CompensatedSum::new();
            for j in (i + 1)..n {
                let w = if unit_weights { 1.0 } else { a.weights()[j] };
                s.add(w * pow_from_sq(dist_sq(x, a.point(j)), gamma));
            }
            let wi = if unit_weights { 1.0 } else { a.weights()[i] };
            2.0 * wi * s.value()
        })
        .collect();
    compensated_sum(&rows)
}

/// Orders the pair by a total order on measures so that `f(μ, ν)` and `f(ν, μ)` perform the
/// same floating-point operations.
fn canonical<'a>(mu: &'a EmpiricalMeasure, nu: &'a EmpiricalMeasure) -> (&'a EmpiricalMeasure, &'a EmpiricalMeasure) {
    let order = mu
        .len()
        .cmp(&nu.len())
        .then_with(|| lexicographic(mu.coords(), nu.coords()))
        .then_with(|| lexicographic(mu.weights(), nu.weights()));
    if order == Ordering::Greater {
        (nu, mu)
    } else {
        (mu, nu)
    }
}

fn lexicographic(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or_else(|| a.len().cmp(&b.len()))
}

/// Weighted V-statistic `E_γ²(μ, ν)`; nonnegative (rounding below zero is clamped).
///
/// Exactly symmetric: the operands are evaluated in a canonical order.
pub fn energy_sq_vstat(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure, g: &GammaOrder) -> Result<f64> {
    check_dims(mu, nu, g)?;
    let (mu, nu) = canonical(mu, nu);
    let gamma = g.gamma();
    let cross = cross_sum(mu, nu, gamma);
    let smu = self_sum(mu, gamma, false);
    let snu = self_sum(nu, gamma, false);
    let mut acc = CompensatedSum::new();
    acc.add(2.0 * cross);
    acc.add(-smu);
    acc.add(-snu);
    Ok(acc.value().max(0.0))
}

/// Unbiased U-statistic: within-sample sums exclude the diagonal. May be negative.
pub fn energy_sq_ustat(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure, g: &GammaOrder) -> Result<f64> {
    check_dims(mu, nu, g)?;
    let (mu, nu) = canonical(mu, nu);
    for m in [mu, nu] {
        if m.len() < 2 {
            return Err(invalid("n", "U-statistic needs at least two points per sample"));
        }
        if !m.is_uniform() {
            return Err(invalid("weights", "U-statistic requires uniform weights"));
        }
    }
    let gamma = g.gamma();
    let (n, m) = (mu.len() as f64, nu.len() as f64);
    let cross = cross_sum(mu, nu, gamma);
    let smu = self_sum(mu, gamma, true) / (n * (n - 1.0));
    let snu = self_sum(nu, gamma, true) / (m * (m - 1.0));
    let mut acc = CompensatedSum::new();
    acc.add(2.0 * cross);
    acc.add(-smu);
    acc.add(-snu);
    Ok(acc.value())
}

/// Kernel (MMD) form `Σ w w' k_γ(x, x') + Σ u u' k_γ(y, y') − 2 Σ w u k_γ(x, y)`.
///
/// Evaluated term by term from [`kernel_gamma`]; it is an independent route to the same value
/// as [`energy_sq_vstat`].
pub fn energy_sq_mmd(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure, g: &GammaOrder) -> Result<f64> {
    check_dims(mu, nu, g)?;
    let (mu, nu) = canonical(mu, nu);
    let gram = |a: &EmpiricalMeasure, b: &EmpiricalMeasure| -> f64 {
        let rows: Vec<f64> = (0..a.len())
            .into_par_iter()
            .map(|i| {
                let x = a.point(i);
                let mut s = CompensatedSum::new();
                for (y, w) in b.points().zip(b.weights()) {
                    s.add(w * kernel_gamma(x, y, g).expect("dimensions checked"));
                }
                a.weights()[i] * s.value()
            })
            .collect();
        compensated_sum(&rows)
    };
    let mut acc = CompensatedSum::new();
    acc.add(gram(mu, mu));
    acc.add(gram(nu, nu));
    acc.add(-2.0 * gram(mu, nu));
    Ok(acc.value())
}

/// `E_1²` of one-dimensional signed atoms `(position, signed weight)` via `2∫ D(t)² dt`, where
/// `D` is the running sum of signed weights. Sorts `atoms` in place; `O(N log N)`.
pub fn cramer_energy_sq(atoms: &mut [(f64, f64)]) -> f64 {
    atoms.sort_by(|a, b| cmp_f64(&a.0, &b.0));
    let mut running = CompensatedSum::new();
    let mut acc = CompensatedSum::new();
    for k in 0..atoms.len().saturating_sub(1) {
        running.add(atoms[k].1);
        let gap = atoms[k + 1].0 - atoms[k].0;
        if gap > 0.0 {
            let d = running.value();
            acc.add(d * d * gap);
        }
    }
    (2.0 * acc.value()).max(0.0)
}

pub(crate) fn signed_atoms_1d(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure) -> Vec<(f64, f64)> {
    mu.coords()
        .iter()
        .zip(mu.weights())
        .map(|(x, w)| (*x, *w))
        .chain(nu.coords().iter().zip(nu.weights()).map(|(y, u)| (*y, -*u)))
        .collect()
}

/// `E_γ²` by the fastest exact route: the sorted CDF formula in one dimension with `γ = 1`,
/// otherwise the pairwise V-statistic.
pub fn energy_sq(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure, g: &GammaOrder) -> Result<f64> {
    check_dims(mu, nu, g)?;
    let (mu, nu) = canonical(mu, nu);
    if g.dim() == 1 && g.gamma() == 1.0 {
        return Ok(cramer_energy_sq(&mut signed_atoms_1d(mu, nu)));
    }
    energy_sq_vstat(mu, nu, g)
}

/// Default cap on per-point gradient norms when `γ < 1`.
pub const DEFAULT_GRADIENT_CAP: f64 = 1e6;

/// Value and derivatives of `E_γ²(μ, ν)` with respect to the atoms of `μ`.
#[derive(Debug, Clone)]
pub struct EnergyGradient {
    pub value: f64,
    /// Row-major `∂E²/∂y_j`, same layout as `μ.coords()`.
    pub locations: Vec<f64>,
    /// `∂E²/∂w_j`, treating the weights as free variables.
    pub weights: Vec<f64>,
}

/// Gradient of the V-statistic in the locations and weights of `mu`.
///
/// Coincident pairs contribute zero (a valid subgradient for `γ ≥ 1`). For `γ < 1` each
/// per-point location gradient is clipped to norm `cap`.
pub fn energy_sq_with_grad(
    mu: &EmpiricalMeasure,
    nu: &EmpiricalMeasure,
    g: &GammaOrder,
    cap: f64,
) -> Result<EnergyGradient> {
    check_dims(mu, nu, g)?;
    let gamma = g.gamma();
    let dim = g.dim();
    let w = mu.weights();
    // per row j: (cross_j, self_j, location gradient)
    let rows: Vec<(f64, f64, Vec<f64>)> = (0..mu.len())
        .into_par_iter()
        .map(|j| {
            let y = mu.point(j);
            let mut grad = vec![0.0; dim];
            let mut cross = CompensatedSum::new();
            let mut own = CompensatedSum::new();
            for (x, u) in nu.points().zip(nu.weights()) {
                let d2 = dist_sq(y, x);
                if d2 > 0.0 {
                    let p = pow_from_sq(d2, gamma);
                    cross.add(u * p);
                    let coef = 2.0 * gamma * u * p / d2;
                    for k in 0..dim {
                        grad[k] += coef * (y[k] - x[k]);
                    }
                }
            }
            for (jp, wp) in w.iter().enumerate() {
                if jp == j {
                    continue;
                }
                let z = mu.point(jp);
                let d2 = dist_sq(y, z);
                if d2 > 0.0 {
                    let p = pow_from_sq(d2, gamma);
                    own.add(wp * p);
                    let coef = 2.0 * gamma * wp * p / d2;
                    for k in 0..dim {
                        grad[k] -= coef * (y[k] - z[k]);
                    }
                }
            }
            for v in grad.iter_mut() {
                *v *= w[j];
            }
            if gamma < 1.0 {
                let n = crate::measures::norm(&grad);
                if n > cap {
                    for v in grad.iter_mut() {
                        *v *= cap / n;
                    }
                }
            }
            (cross.value(), own.value(), grad)
        })
        .collect();
    let snu = self_sum(nu, gamma, false);
    let mut value = CompensatedSum::new();
    let mut locations = Vec::with_capacity(mu.len() * dim);
    let mut weights = Vec::with_capacity(mu.len());
    for (j, (cross, own, grad)) in rows.into_iter().enumerate() {
        value.add(2.0 * w[j] * cross);
        value.add(-w[j] * own);
        weights.push(2.0 * cross - 2.0 * own);
        locations.extend(grad);
    }
    value.add(-snu);
    Ok(EnergyGradient {
        value: value.value().max(0.0),
        locations,
        weights,
    })
}

/// Gradient of `E_γ²(μ, ν)` with respect to each (uniformly weighted) point of `μ`.
pub fn grad_energy_sq(
    mu: &EmpiricalMeasure,
    nu: &EmpiricalMeasure,
    g: &GammaOrder,
    cap: Option<f64>,
) -> Result<Vec<Vec<f64>>> {
    if !mu.is_uniform() {
        return Err(invalid("weights", "location gradient expects a uniformly weighted sample"));
    }
    let eg = energy_sq_with_grad(mu, nu, g, cap.unwrap_or(DEFAULT_GRADIENT_CAP))?;
    Ok(eg.locations.chunks_exact(mu.dim()).map(<[f64]>::to_vec).collect())
}
