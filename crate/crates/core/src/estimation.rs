//! Minimum-energy estimation: SGD fitting of parametric generators, the codeword-embedded
//! discrete estimator, and the sample-size stopping rule.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::{energy_sq, energy_sq_vstat, energy_sq_with_grad, GammaOrder, DEFAULT_GRADIENT_CAP};
use crate::error::{invalid, Error, Result};
use crate::measures::{EmpiricalMeasure, Sampler};
use crate::numerics::{log_log_fit, mean_and_se, LineFit};
use crate::rng::{self, StreamRng};

// ---------------------------------------------------------------------------------------------
// Generators

/// Parametric family of generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GeneratorKind {
    /// `K` unit-covariance Gaussians; `θ = (logits[K], means[K·d])`.
    GaussianMixture { dim: usize, components: usize },
    /// `x = A z + b` with `z ~ N(0, I)`; `θ = (A[d·d] row-major, b[d])`.
    PushforwardAffine { dim: usize },
}

impl GeneratorKind {
    pub fn dim(&self) -> usize {
        match *self {
            GeneratorKind::GaussianMixture { dim, .. } | GeneratorKind::PushforwardAffine { dim } => dim,
        }
    }

    pub fn n_params(&self) -> usize {
        match *self {
            GeneratorKind::GaussianMixture { dim, components } => components * (1 + dim),
            GeneratorKind::PushforwardAffine { dim } => dim * dim + dim,
        }
    }
}

/// A generator family together with its current parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorModel {
    pub kind: GeneratorKind,
    pub theta: Vec<f64>,
}

/// Standard-normal noise that determines a batch; holding it fixed freezes the batch.
#[derive(Debug, Clone, PartialEq)]
pub struct Noise {
    /// `m` rows of `d` values for the affine model; `K·m` rows for the mixture.
    pub values: Vec<f64>,
    pub m: usize,
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let mx = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = logits.iter().map(|l| (l - mx).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

impl GeneratorModel {
    pub fn new(kind: GeneratorKind, theta: Vec<f64>) -> Result<Self> {
        if kind.dim() == 0 {
            return Err(invalid("dim", "must be positive"));
        }
        if let GeneratorKind::GaussianMixture { components: 0, .. } = kind {
            return Err(invalid("components", "must be positive"));
        }
        if theta.len() != kind.n_params() {
            return Err(invalid(
                "theta",
                format!("expected {} parameters, got {}", kind.n_params(), theta.len()),
            ));
        }
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(invalid("theta", "parameters must be finite"));
        }
        Ok(Self { kind, theta })
    }

    /// Equal weights and the given means, or identity map with the given offset.
    pub fn mixture(means: &[Vec<f64>]) -> Result<Self> {
        let dim = means.first().map_or(0, Vec::len);
        let mut theta = vec![0.0; means.len()];
        for m in means {
            if m.len() != dim {
                return Err(invalid("means", "all means need the same dimension"));
            }
            theta.extend_from_slice(m);
        }
        Self::new(
            GeneratorKind::GaussianMixture {
                dim,
                components: means.len(),
            },
            theta,
        )
    }

    pub fn affine(matrix: &[Vec<f64>], offset: &[f64]) -> Result<Self> {
        let dim = offset.len();
        let mut theta = Vec::with_capacity(dim * dim + dim);
        for row in matrix {
            if row.len() != dim {
                return Err(invalid("matrix", "must be square with the offset's dimension"));
            }
            theta.extend_from_slice(row);
        }
        if matrix.len() != dim {
            return Err(invalid("matrix", "must be square with the offset's dimension"));
        }
        theta.extend_from_slice(offset);
        Self::new(GeneratorKind::PushforwardAffine { dim }, theta)
    }

    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    /// Mixture weights (softmax of the logits); `[1]` for the affine model.
    pub fn weights(&self) -> Vec<f64> {
        match self.kind {
            GeneratorKind::GaussianMixture { components, .. } => softmax(&self.theta[..components]),
            GeneratorKind::PushforwardAffine { .. } => vec![1.0],
        }
    }

    /// Mean vectors of the mixture, or the offset of the affine map.
    pub fn means(&self) -> Vec<Vec<f64>> {
        let d = self.dim();
        match self.kind {
            GeneratorKind::GaussianMixture { components, .. } => {
                self.theta[components..].chunks_exact(d).map(<[f64]>::to_vec).collect()
            }
            GeneratorKind::PushforwardAffine { .. } => vec![self.theta[d * d..].to_vec()],
        }
    }

    pub fn draw_noise(&self, m: usize, rng: &mut StreamRng) -> Noise {
        let rows = match self.kind {
            GeneratorKind::GaussianMixture { components, .. } => components * m,
            GeneratorKind::PushforwardAffine { .. } => m,
        };
        let values = (0..rows * self.dim()).map(|_| StandardNormal.sample(rng)).collect();
        Noise { values, m }
    }

    /// The batch measure `T_θ(z)`.
    ///
    /// For the mixture every component contributes its own `m` points `μ_c + z` with weight
    /// `π_c/m`, so the logits enter through the weights and receive pathwise gradients.
    pub fn batch(&self, noise: &Noise) -> Result<EmpiricalMeasure> {
        let d = self.dim();
        match self.kind {
            GeneratorKind::GaussianMixture { components, .. } => {
                let pi = self.weights();
                let mut coords = Vec::with_capacity(noise.values.len());
                let mut w = Vec::with_capacity(components * noise.m);
                for (c, pc) in pi.iter().enumerate() {
                    let mean = &self.theta[components + c * d..components + (c + 1) * d];
                    for j in 0..noise.m {
                        let z = &noise.values[(c * noise.m + j) * d..(c * noise.m + j + 1) * d];
                        coords.extend(mean.iter().zip(z).map(|(a, b)| a + b));
                        w.push(pc / noise.m as f64);
                    }
                }
                EmpiricalMeasure::from_flat(d, coords, Some(w))
            }
            GeneratorKind::PushforwardAffine { .. } => {
                let (a, b) = self.theta.split_at(d * d);
                let mut coords = Vec::with_capacity(noise.values.len());
                for z in noise.values.chunks_exact(d) {
                    for k in 0..d {
                        let row = &a[k * d..(k + 1) * d];
                        coords.push(b[k] + row.iter().zip(z).map(|(x, y)| x * y).sum::<f64>());
                    }
                }
                EmpiricalMeasure::from_flat(d, coords, None)
            }
        }
    }

    /// `m` draws from the model (a mixture draws a component per sample).
    pub fn sample(&self, m: usize, seed: u64) -> Result<EmpiricalMeasure> {
        let mut rng = rng::substream(seed, 0);
        self.sampler().draw(m, &mut rng)
    }

    pub fn sampler(&self) -> GeneratorSampler {
        GeneratorSampler { model: self.clone() }
    }

    /// Chains `∂E²/∂(locations, weights)` of a batch into `∂E²/∂θ`.
    pub fn pullback(&self, noise: &Noise, loc: &[f64], wgrad: &[f64]) -> Vec<f64> {
        let d = self.dim();
        let mut g = vec![0.0; self.theta.len()];
        match self.kind {
            GeneratorKind::GaussianMixture { components, .. } => {
                let pi = self.weights();
                let mut dpi = vec![0.0; components];
                for c in 0..components {
                    for j in 0..noise.m {
                        let row = c * noise.m + j;
                        for k in 0..d {
                            g[components + c * d + k] += loc[row * d + k];
                        }
                        dpi[c] += wgrad[row] / noise.m as f64;
                    }
                }
                // softmax: ∂π_c/∂ℓ_a = π_c(δ_ca − π_a)
                let avg: f64 = dpi.iter().zip(&pi).map(|(a, b)| a * b).sum();
                for a in 0..components {
                    g[a] = pi[a] * (dpi[a] - avg);
                }
            }
            GeneratorKind::PushforwardAffine { .. } => {
                for (row, z) in noise.values.chunks_exact(d).enumerate() {
                    for k in 0..d {
                        let gk = loc[row * d + k];
                        for l in 0..d {
                            g[k * d + l] += gk * z[l];
                        }
                        g[d * d + k] += gk;
                    }
                }
            }
        }
        g
    }

    /// `E_γ²(T_θ(z), data)` and its gradient in `θ` for a frozen batch.
    pub fn loss_and_grad(
        &self,
        noise: &Noise,
        data: &EmpiricalMeasure,
        g: &GammaOrder,
        cap: f64,
    ) -> Result<(f64, Vec<f64>)> {
        let batch = self.batch(noise)?;
        let eg = energy_sq_with_grad(&batch, data, g, cap)?;
        Ok((eg.value, self.pullback(noise, &eg.locations, &eg.weights)))
    }
}

/// Samples a [`GeneratorModel`] as an ordinary distribution.
#[derive(Debug, Clone)]
pub struct GeneratorSampler {
    model: GeneratorModel,
}

impl Sampler for GeneratorSampler {
    fn dim(&self) -> usize {
        self.model.dim()
    }

    fn draw_into(&self, n: usize, rng: &mut StreamRng, out: &mut Vec<f64>) {
        let m = &self.model;
        let d = m.dim();
        match m.kind {
            GeneratorKind::GaussianMixture { components, .. } => {
                let pi = m.weights();
                for _ in 0..n {
                    let u: f64 = rng.random();
                    let mut c = 0;
                    let mut acc = pi[0];
                    while u >= acc && c + 1 < components {
                        c += 1;
                        acc += pi[c];
                    }
                    let mean = &m.theta[components + c * d..components + (c + 1) * d];
                    for v in mean {
                        let z: f64 = StandardNormal.sample(rng);
                        out.push(v + z);
                    }
                }
            }
            GeneratorKind::PushforwardAffine { .. } => {
                let noise = m.draw_noise(n, rng);
                let b = m.batch(&noise).expect("finite parameters");
                out.extend_from_slice(b.coords());
            }
        }
    }
}

/// Relative disagreement between the analytic `θ`-gradient and central differences.
pub fn gradient_check(
    model: &GeneratorModel,
    noise: &Noise,
    data: &EmpiricalMeasure,
    g: &GammaOrder,
    step: f64,
) -> Result<f64> {
    let (_, analytic) = model.loss_and_grad(noise, data, g, f64::INFINITY)?;
    let mut worst: f64 = 0.0;
    let scale = analytic.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-12);
    for i in 0..model.theta.len() {
        let eval = |delta: f64| -> Result<f64> {
            let mut t = model.theta.clone();
            t[i] += delta;
            let m = GeneratorModel::new(model.kind, t)?;
            energy_sq_vstat(&m.batch(noise)?, data, g)
        };
        let fd = (eval(step)? - eval(-step)?) / (2.0 * step);
        worst = worst.max((fd - analytic[i]).abs() / analytic[i].abs().max(1e-3 * scale));
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SgdOptions {
    pub steps: usize,
    pub batch_m: usize,
    pub learning_rate: f64,
    pub seed: u64,
    /// Per-point gradient cap, effective for `γ < 1`.
    #[serde(default = "default_cap")]
    pub gradient_cap: f64,
}

fn default_cap() -> f64 {
    DEFAULT_GRADIENT_CAP
}

impl Default for SgdOptions {
    fn default() -> Self {
        Self {
            steps: 2000,
            batch_m: 64,
            learning_rate: 0.05,
            seed: 0,
            gradient_cap: DEFAULT_GRADIENT_CAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitResult {
    pub model: GeneratorModel,
    /// Batch loss `E_γ²` before each update.
    pub trace: Vec<f64>,
    /// Startup gradient self-check (relative error).
    pub gradient_check: f64,
}

/// Tolerance of the startup gradient check.
const JACOBIAN_TOL: f64 = 1e-4;

/// Plain constant-step gradient descent on `θ ↦ E_γ²(T_θ(z_t), ν_n)` with fresh noise each step.
pub fn fit_min_energy_sgd(
    data: &EmpiricalMeasure,
    model: &GeneratorModel,
    g: &GammaOrder,
    opts: &SgdOptions,
) -> Result<FitResult> {
    if model.dim() != data.dim() || g.dim() != data.dim() {
        return Err(Error::DimensionMismatch {
            expected: data.dim(),
            found: model.dim(),
        });
    }
    if opts.batch_m < 2 {
        return Err(invalid("batch_m", "need at least two generator samples per step"));
    }
    if !(opts.learning_rate >= 0.0) || !opts.learning_rate.is_finite() {
        return Err(invalid("learning_rate", "must be finite and nonnegative"));
    }
    // self-check on a small frozen batch against a data subset
    let mut check_rng = rng::named(opts.seed, "gradient-check");
    let check_noise = model.draw_noise(3, &mut check_rng);
    let rows: Vec<usize> = (0..data.len().min(40)).collect();
    let sub = data.select(&rows)?;
    let check = gradient_check(model, &check_noise, &sub, g, 1e-6)?;
    if !(check <= JACOBIAN_TOL) {
        return Err(Error::JacobianMismatch { rel_err: check });
    }
    let mut m = model.clone();
    let mut trace = Vec::with_capacity(opts.steps);
    let mut rng = rng::named(opts.seed, "sgd");
    for step in 0..opts.steps {
        let noise = m.draw_noise(opts.batch_m, &mut rng);
        let (loss, grad) = m.loss_and_grad(&noise, data, g, opts.gradient_cap)?;
        if !loss.is_finite() || grad.iter().any(|v| !v.is_finite()) {
            return Err(Error::Diverged { step });
        }
        trace.push(loss);
        for (t, gi) in m.theta.iter_mut().zip(&grad) {
            *t -= opts.learning_rate * gi;
        }
        if m.theta.iter().any(|v| !v.is_finite()) {
            return Err(Error::Diverged { step });
        }
    }
    Ok(FitResult {
        model: m,
        trace,
        gradient_check: check,
    })
}

// ---------------------------------------------------------------------------------------------
// Codebooks and the discrete estimator

/// `k` distinct codewords in `{±1/√d'}^{d'}` with certified minimum distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Codebook {
    pub codewords: Vec<Vec<f64>>,
    pub dim: usize,
    pub min_dist: f64,
    pub seed: u64,
}

/// Initial code dimension `⌈4 ln k⌉`.
pub fn code_dim(k: usize) -> usize {
    ((4.0 * (k as f64).ln()).ceil() as usize).max(1)
}

const CODEBOOK_RETRIES: usize = 8;

/// Random sign codes: start at `d' = ⌈4 ln k⌉`, doubling `d'` until the minimum pairwise
/// distance `2√(h_min/d')` reaches `delta_target`.
pub fn build_codebook(k: usize, delta_target: f64, seed: u64) -> Result<Codebook> {
    if k < 2 {
        return Err(invalid("k", "need at least two symbols"));
    }
    if !(delta_target > 0.0 && delta_target < 2f64.sqrt()) {
        return Err(invalid("delta_target", format!("must lie in (0, √2), got {delta_target}")));
    }
    let mut dim = code_dim(k);
    let mut best_seen: f64 = 0.0;
    for attempt in 0..=CODEBOOK_RETRIES {
        let mut r = rng::substream(seed, attempt as u64);
        let bits: Vec<Vec<bool>> = (0..k).map(|_| (0..dim).map(|_| r.random::<bool>()).collect()).collect();
        let h_min = (0..k)
            .into_par_iter()
            .map(|i| {
                ((i + 1)..k)
                    .map(|j| bits[i].iter().zip(&bits[j]).filter(|(a, b)| a != b).count())
                    .min()
                    .unwrap_or(usize::MAX)
            })
            .min()
            .unwrap_or(0);
        let min_dist = 2.0 * (h_min as f64 / dim as f64).sqrt();
        best_seen = best_seen.max(min_dist);
        if h_min > 0 && min_dist >= delta_target {
            let s = 1.0 / (dim as f64).sqrt();
            let codewords = bits
                .iter()
                .map(|b| b.iter().map(|&x| if x { s } else { -s }).collect())
                .collect();
            return Ok(Codebook {
                codewords,
                dim,
                min_dist,
                seed,
            });
        }
        dim *= 2;
    }
    Err(Error::CodebookFailed {
        achieved: best_seen,
        target: delta_target,
    })
}

impl Codebook {
    pub fn k(&self) -> usize {
        self.codewords.len()
    }

    /// Matrix `D_ij = ‖a_i − a_j‖`.
    pub fn distance_matrix(&self) -> Vec<Vec<f64>> {
        self.codewords
            .iter()
            .map(|a| {
                self.codewords
                    .iter()
                    .map(|b| a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt())
                    .collect()
            })
            .collect()
    }

    /// Brute-force minimum pairwise distance.
    pub fn recompute_min_dist(&self) -> f64 {
        let d = self.distance_matrix();
        let mut m = f64::INFINITY;
        for (i, row) in d.iter().enumerate() {
            for v in &row[i + 1..] {
                m = m.min(*v);
            }
        }
        m
    }

    /// The distribution `Σ p_i δ_{a_i}` as an empirical measure.
    pub fn measure(&self, pmf: &[f64]) -> Result<EmpiricalMeasure> {
        EmpiricalMeasure::with_weights(&self.codewords, pmf.to_vec())
    }
}

/// `q(w) = −wᵀ D w`, which equals `E_1²` between the embedded pmfs when `w = p − q`.
pub fn quadratic_form(dist: &[Vec<f64>], w: &[f64]) -> f64 {
    let mut s = 0.0;
    for (i, row) in dist.iter().enumerate() {
        let ri: f64 = row.iter().zip(w).map(|(d, x)| d * x).sum();
        s -= w[i] * ri;
    }
    s
}

/// `TV(p, q) = ½ Σ |p_i − q_i|`.
pub fn tv_discrete(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Feasible set for the discrete estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimplexConstraint {
    /// Only the listed symbols may carry mass.
    Support(Vec<usize>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimplexOptions {
    pub max_iter: usize,
    pub gap_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_iter: 200_000,
            gap_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteFit {
    pub pmf: Vec<f64>,
    pub objective: f64,
    /// Frank–Wolfe duality gap at the returned iterate.
    pub fw_gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Euclidean projection onto the probability simplex.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut css = 0.0;
    let mut theta = 0.0;
    for (i, ui) in u.iter().enumerate() {
        css += ui;
        let t = (css - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

/// Minimizes `E_1²(Σ ν'_i δ_{a_i}, Σ ν̂_i δ_{a_i})` over the (restricted) simplex by
/// accelerated projected gradient with restarts, stopping on the Frank–Wolfe gap.
///
/// Without a constraint the minimizer is `ν̂` itself.
pub fn fit_discrete_simplex(
    counts: &[u64],
    cb: &Codebook,
    constraint: Option<&SimplexConstraint>,
    opts: &SimplexOptions,
) -> Result<DiscreteFit> {
    let k = cb.k();
    if counts.len() != k {
        return Err(invalid("counts", format!("{} counts for {k} codewords", counts.len())));
    }
    let n: u64 = counts.iter().sum();
    if n == 0 {
        return Err(invalid("counts", "histogram is empty"));
    }
    let target: Vec<f64> = counts.iter().map(|c| *c as f64 / n as f64).collect();
    let allowed: Vec<usize> = match constraint {
        None => (0..k).collect(),
        Some(SimplexConstraint::Support(s)) => {
            if s.is_empty() || s.iter().any(|i| *i >= k) {
                return Err(invalid("support", "must be a nonempty set of valid symbols"));
            }
            let mut s = s.clone();
            s.sort_unstable();
            s.dedup();
            s
        }
    };
    let dist = cb.distance_matrix();
    // reduced problem on the allowed coordinates: w = x − target, fixed part on the rest
    let a = allowed.len();
    let sub: Vec<Vec<f64>> = allowed.iter().map(|&i| allowed.iter().map(|&j| dist[i][j]).collect()).collect();
    let lipschitz = 2.0 * sub.iter().map(|r| r.iter().sum::<f64>()).fold(0.0, f64::max).max(1e-12);
    let grad = |x: &[f64]| -> Vec<f64> {
        let mut w = target.iter().map(|t| -t).collect::<Vec<f64>>();
        for (p, &i) in allowed.iter().enumerate() {
            w[i] += x[p];
        }
        allowed
            .iter()
            .map(|&i| -2.0 * dist[i].iter().zip(&w).map(|(d, v)| d * v).sum::<f64>())
            .collect()
    };
    let objective = |x: &[f64]| -> f64 {
        let mut w: Vec<f64> = target.iter().map(|t| -t).collect();
        for (p, &i) in allowed.iter().enumerate() {
            w[i] += x[p];
        }
        quadratic_form(&dist, &w)
    };
    let fw_gap = |x: &[f64], g: &[f64]| -> f64 {
        let inner: f64 = x.iter().zip(g).map(|(a, b)| a * b).sum();
        inner - g.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let mut x = vec![1.0 / a as f64; a];
    let mut y = x.clone();
    let mut t: f64 = 1.0;
    let mut iterations = 0;
    let mut gap = fw_gap(&x, &grad(&x));
    while gap >= opts.gap_tol && iterations < opts.max_iter {
        iterations += 1;
        let gy = grad(&y);
        let step: Vec<f64> = y.iter().zip(&gy).map(|(v, g)| v - g / lipschitz).collect();
        let x_new = project_simplex(&step);
        let t_new = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
        // restart momentum when it points uphill
        let uphill: f64 = gy.iter().zip(x_new.iter().zip(&x)).map(|(g, (a, b))| g * (a - b)).sum();
        if uphill > 0.0 {
            y = x_new.clone();
            t = 1.0;
        } else {
            let beta = (t - 1.0) / t_new;
            y = x_new.iter().zip(&x).map(|(a, b)| a + beta * (a - b)).collect();
            t = t_new;
        }
        x = x_new;
        gap = fw_gap(&x, &grad(&x));
    }
    let mut pmf = vec![0.0; k];
    for (p, &i) in allowed.iter().enumerate() {
        pmf[i] = x[p];
    }
    Ok(DiscreteFit {
        objective: objective(&x),
        pmf,
        fw_gap: gap,
        iterations,
        converged: gap < opts.gap_tol,
    })
}

/// Multinomial counts of `n` draws from `pmf`.
pub fn multinomial_counts(pmf: &[f64], n: usize, rng: &mut StreamRng) -> Vec<u64> {
    let mut cdf = Vec::with_capacity(pmf.len());
    let mut acc = 0.0;
    for p in pmf {
        acc += p;
        cdf.push(acc);
    }
    let mut counts = vec![0u64; pmf.len()];
    for _ in 0..n {
        let u: f64 = rng.random::<f64>() * acc;
        let i = cdf.partition_point(|c| *c <= u).min(pmf.len() - 1);
        counts[i] += 1;
    }
    counts
}

/// Random pmf with i.i.d. exponential weights (uniform on the simplex).
pub fn random_pmf(k: usize, rng: &mut StreamRng) -> Vec<f64> {
    let e: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRow {
    pub n: usize,
    pub trials: usize,
    pub mean_tv_sq: f64,
    pub se_tv_sq: f64,
    /// `mean · n / (k log k)`
    pub scaled: f64,
    /// largest `L¹` distance between the solver output and the empirical pmf
    pub max_l1_to_empirical: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    pub k: usize,
    pub code_dim: usize,
    pub min_dist: f64,
    pub rows: Vec<RateRow>,
    pub slope: LineFit,
    /// `max_n mean · n/(k log k)`: the observed constant in the `k log k / n` rate.
    pub observed_constant: f64,
}

/// `E TV²(ν̂, ν)` of the discrete estimator against sample size for a random `ν` on `k`
/// symbols.
pub fn discrete_rate_experiment(
    k: usize,
    n_list: &[usize],
    trials: usize,
    delta_target: f64,
    seed: u64,
) -> Result<RateReport> {
    if n_list.len() < 2 || trials == 0 {
        return Err(invalid("n_list", "need at least two sample sizes and one trial"));
    }
    let cb = build_codebook(k, delta_target, rng::child_seed(seed, 0))?;
    let truth = random_pmf(k, &mut rng::named(seed, "truth"));
    let opts = SimplexOptions::default();
    let mut rows = Vec::with_capacity(n_list.len());
    for (ni, &n) in n_list.iter().enumerate() {
        let results = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut r = rng::substream(rng::child_seed(seed, 1 + ni as u64), t as u64);
                let counts = multinomial_counts(&truth, n, &mut r);
                let fit = fit_discrete_simplex(&counts, &cb, None, &opts)?;
                let emp: Vec<f64> = counts.iter().map(|c| *c as f64 / n as f64).collect();
                let l1: f64 = fit.pmf.iter().zip(&emp).map(|(a, b)| (a - b).abs()).sum();
                Ok((tv_discrete(&fit.pmf, &truth).powi(2), l1))
            })
            .collect::<Result<Vec<(f64, f64)>>>()?;
        let tv2: Vec<f64> = results.iter().map(|r| r.0).collect();
        let (mean, se) = mean_and_se(&tv2);
        rows.push(RateRow {
            n,
            trials,
            mean_tv_sq: mean,
            se_tv_sq: se,
            scaled: mean * n as f64 / (k as f64 * (k as f64).ln()),
            max_l1_to_empirical: results.iter().map(|r| r.1).fold(0.0, f64::max),
        });
    }
    let ns: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let ms: Vec<f64> = rows.iter().map(|r| r.mean_tv_sq).collect();
    Ok(RateReport {
        k,
        code_dim: cb.dim,
        min_dist: cb.min_dist,
        slope: log_log_fit(&ns, &ms)?,
        observed_constant: rows.iter().map(|r| r.scaled).fold(0.0, f64::max),
        rows,
    })
}

// ---------------------------------------------------------------------------------------------
// γ schedules and the stopping rule

/// Sample-size dependent choices of `γ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GammaPreset {
    One,
    /// `γ = 1/ln n`
    InvLog,
    /// `γ = 1/ln ln n`
    InvLogLog,
}

impl GammaPreset {
    pub fn value(&self, n: usize) -> Result<f64> {
        let nf = n as f64;
        let g = match self {
            GammaPreset::One => 1.0,
            GammaPreset::InvLog => 1.0 / nf.ln(),
            GammaPreset::InvLogLog => 1.0 / nf.ln().ln(),
        };
        if !(g > 0.0 && g < 2.0) {
            return Err(Error::InvalidGamma(g));
        }
        Ok(g)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StoppingConfig {
    /// Training sample size.
    pub n: usize,
    pub delta: f64,
    pub gamma: f64,
    pub c_cal: f64,
    pub tau: f64,
}

impl StoppingConfig {
    pub fn new(n: usize, delta: f64, gamma: f64, c_cal: f64, tau: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "must be positive"));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(invalid("delta", format!("must lie in (0, 1), got {delta}")));
        }
        if !(gamma > 0.0 && gamma < 2.0) {
            return Err(Error::InvalidGamma(gamma));
        }
        if !(c_cal > 0.0) || !(tau > 0.0) {
            return Err(invalid("c_cal", "calibration constants must be positive"));
        }
        Ok(Self {
            n,
            delta,
            gamma,
            c_cal,
            tau,
        })
    }

    /// `m_k = ⌈c n ln(k²/δ)/ln(1/δ)⌉`, nondecreasing in `k ≥ 1`.
    pub fn m_k(&self, k: usize) -> usize {
        let kf = k as f64;
        let v = self.c_cal * self.n as f64 * (kf * kf / self.delta).ln() / (1.0 / self.delta).ln();
        // guard against ⌈·⌉ of a value one ulp above an integer
        let r = v.round();
        if (v - r).abs() <= 1e-9 * v.abs().max(1.0) {
            r as usize
        } else {
            v.ceil() as usize
        }
    }

    /// `τ √(ln(1/δ)/n)`.
    pub fn threshold(&self) -> f64 {
        self.tau * ((1.0 / self.delta).ln() / self.n as f64).sqrt()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StopReport {
    /// First candidate index (1-based) meeting the threshold.
    pub stopped_at: Option<usize>,
    pub certificate: Option<f64>,
    pub threshold: f64,
    /// `E_γ` of every candidate examined.
    pub values: Vec<f64>,
    pub schedule: Vec<usize>,
    pub exhausted: bool,
}

/// Examines candidates `k = 1, 2, …`: draws `m_k` samples from candidate `k` and stops at the
/// first with `E_γ(μ_{k,m_k}, ν_n) ≤ τ √(ln(1/δ)/n)`.
pub fn stopping_verifier<'a, I>(
    data: &EmpiricalMeasure,
    candidates: I,
    cfg: &StoppingConfig,
    seed: u64,
) -> Result<StopReport>
where
    I: IntoIterator<Item = &'a dyn Sampler>,
{
    let g = GammaOrder::new(cfg.gamma, data.dim())?;
    let threshold = cfg.threshold();
    let mut values = Vec::new();
    let mut schedule = Vec::new();
    for (i, cand) in candidates.into_iter().enumerate() {
        let k = i + 1;
        let m = cfg.m_k(k);
        let mut r = rng::substream(seed, k as u64);
        let sample = cand.draw(m, &mut r)?;
        let e = energy_sq(&sample, data, &g)?.sqrt();
        values.push(e);
        schedule.push(m);
        if e <= threshold {
            return Ok(StopReport {
                stopped_at: Some(k),
                certificate: Some(e),
                threshold,
                values,
                schedule,
                exhausted: false,
            });
        }
    }
    Ok(StopReport {
        stopped_at: None,
        certificate: None,
        threshold,
        values,
        schedule,
        exhausted: true,
    })
}
