//! Weighted empirical measures, CSV ingestion and reference-distribution samplers.

use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::{self, StreamRng};
use crate::spectral::{Construction1D, ConstructionSide};

/// A finite weighted point set `Σ w_i δ_{x_i}` in `R^d`.
///
/// Coordinates are stored row-major in one buffer. Weights are always explicit so every
/// statistic is written once for the weighted case.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    dim: usize,
    coords: Vec<f64>,
    weights: Vec<f64>,
}

const WEIGHT_SUM_TOL: f64 = 1e-12;

impl EmpiricalMeasure {
    /// Uniformly weighted measure on the given points.
    pub fn new(points: &[Vec<f64>]) -> Result<Self> {
        let dim = points.first().ok_or(Error::EmptyMeasure)?.len();
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim, coords, None)
    }

    pub fn with_weights(points: &[Vec<f64>], weights: Vec<f64>) -> Result<Self> {
        let m = Self::new(points)?;
        Self::from_flat(m.dim, m.coords, Some(weights))
    }

    /// Builds a measure from a row-major coordinate buffer; `None` weights mean uniform.
    pub fn from_flat(dim: usize, coords: Vec<f64>, weights: Option<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dim", "dimension must be positive"));
        }
        if coords.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: coords.len() % dim,
            });
        }
        let n = coords.len() / dim;
        if let Some((k, v)) = coords.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: k / dim,
                column: k % dim,
                value: *v,
            });
        }
        let weights = match weights {
            None => vec![1.0 / n as f64; n],
            Some(w) => {
                if w.len() != n {
                    return Err(invalid(
                        "weights",
                        format!("{} weights for {} points", w.len(), n),
                    ));
                }
                normalize_checked(w)?
            }
        };
        Ok(Self {
            dim,
            coords,
            weights,
        })
    }

    /// One-dimensional uniformly weighted measure.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        Self::from_flat(1, values.to_vec(), None)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// True when every weight equals `1/n` exactly.
    pub fn is_uniform(&self) -> bool {
        let u = 1.0 / self.len() as f64;
        self.weights.iter().all(|w| *w == u)
    }

    /// The measure with every coordinate multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            coords: self.coords.iter().map(|x| x * c).collect(),
            weights: self.weights.clone(),
        }
    }

    /// Applies `f` to every point (e.g. a rotation), keeping weights.
    pub fn map_points<F: Fn(&[f64]) -> Vec<f64>>(&self, f: F) -> Result<Self> {
        let mut coords = Vec::with_capacity(self.coords.len());
        let mut dim = None;
        for p in self.points() {
            let q = f(p);
            match dim {
                None => dim = Some(q.len()),
                Some(d) if d != q.len() => {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: q.len(),
                    })
                }
                _ => {}
            }
            coords.extend(q);
        }
        Self::from_flat(dim.unwrap_or(self.dim), coords, Some(self.weights.clone()))
    }

    pub fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    /// Concatenates the supports of two uniformly weighted samples into one uniform sample.
    pub fn pooled(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        Self::from_flat(self.dim, coords, None)
    }

    /// Uniform sub-sample made of the given row indices.
    pub fn select(&self, rows: &[usize]) -> Result<Self> {
        let mut coords = Vec::with_capacity(rows.len() * self.dim);
        for &r in rows {
            coords.extend_from_slice(self.point(r));
        }
        Self::from_flat(self.dim, coords, None)
    }

    /// Maximum Euclidean norm over the support.
    pub fn max_norm(&self) -> f64 {
        self.points().map(norm).fold(0.0, f64::max)
    }
}

fn normalize_checked(w: Vec<f64>) -> Result<Vec<f64>> {
    for (row, v) in w.iter().enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite {
                row,
                column: 0,
                value: *v,
            });
        }
        if *v < 0.0 {
            return Err(Error::NegativeWeight { row, value: *v });
        }
    }
    let sum = crate::numerics::compensated_sum(&w);
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::WeightsNotNormalized { sum });
    }
    if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
        return Ok(w.into_iter().map(|v| v / sum).collect());
    }
    Ok(w)
}

#[inline]
pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `M_γ(ν) = Σ w_i ‖x_i‖^γ`.
pub fn moment_gamma(m: &EmpiricalMeasure, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(invalid("gamma", format!("moment order must be positive, got {gamma}")));
    }
    Ok(m
        .points()
        .zip(m.weights())
        .map(|(p, w)| w * norm(p).powf(gamma))
        .collect::<crate::numerics::CompensatedSum>()
        .value())
}

/// Reads a measure from CSV with header `x0,...,x{d-1}` and an optional trailing `w` column.
pub fn load_csv(path: impl AsRef<Path>, expected_dim: Option<usize>) -> Result<EmpiricalMeasure> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file, expected_dim).map_err(|e| match e {
        Error::Csv { message, .. } => Error::Csv {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })
}

/// Parses CSV content from any reader; see [`load_csv`].
pub fn read_csv<R: std::io::Read>(reader: R, expected_dim: Option<usize>) -> Result<EmpiricalMeasure> {
    let csv_err = |message: String| Error::Csv {
        path: Default::default(),
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| csv_err(e.to_string()))?.clone();
    let has_w = headers.iter().next_back() == Some("w");
    let dim = headers.len() - usize::from(has_w);
    for (j, h) in headers.iter().take(dim).enumerate() {
        if h != format!("x{j}") {
            return Err(csv_err(format!("header column {j} is `{h}`, expected `x{j}`")));
        }
    }
    if dim == 0 {
        return Err(csv_err("header has no coordinate columns".into()));
    }
    if let Some(d) = expected_dim {
        if d != dim {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: dim,
            });
        }
    }
    let mut coords = Vec::new();
    let mut weights = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(e.to_string()))?;
        if rec.len() != headers.len() {
            return Err(Error::DimensionMismatch {
                expected: headers.len(),
                found: rec.len(),
            });
        }
        for (column, field) in rec.iter().enumerate() {
            let v: f64 = field
                .parse()
                .map_err(|_| csv_err(format!("row {row}, column {column}: cannot parse `{field}`")))?;
            if !v.is_finite() {
                return Err(Error::NonFinite { row, column, value: v });
            }
            if column < dim {
                coords.push(v);
            } else {
                if v < 0.0 {
                    return Err(Error::NegativeWeight { row, value: v });
                }
                weights.push(v);
            }
        }
    }
    if coords.is_empty() {
        return Err(Error::EmptyMeasure);
    }
    EmpiricalMeasure::from_flat(dim, coords, has_w.then_some(weights))
}

/// Writes a measure as CSV, always including the weight column.
pub fn save_csv(m: &EmpiricalMeasure, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut out = String::new();
    write_csv(m, &mut out);
    std::fs::write(path, out).map_err(io)
}

pub fn write_csv(m: &EmpiricalMeasure, out: &mut String) {
    use std::fmt::Write;
    let header: Vec<String> = (0..m.dim()).map(|j| format!("x{j}")).collect();
    let _ = writeln!(out, "{},w", header.join(","));
    for (p, w) in m.points().zip(m.weights()) {
        for v in p {
            let _ = write!(out, "{v:?},");
        }
        let _ = writeln!(out, "{w:?}");
    }
}

/// Mixture component with isotropic Gaussian noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureComponent {
    pub weight: f64,
    pub mean: Vec<f64>,
    pub scale: f64,
}

/// Reference distributions used by the experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DistributionSpec {
    /// Uniform on the closed unit ball of `R^dim`.
    UniformBall { dim: usize },
    Gaussian { mean: Vec<f64>, scale: f64 },
    GaussianMixture { components: Vec<MixtureComponent> },
    /// Finite distribution on explicit support points (e.g. codewords).
    Discrete { points: Vec<Vec<f64>>, pmf: Vec<f64> },
    /// One member of the oscillating density pair, or its smooth baseline.
    Construction1d {
        beta: f64,
        epsilon: f64,
        side: ConstructionSide,
    },
}

/// A prepared sampler that owns no randomness; callers pass the generator.
pub trait Sampler: Send + Sync {
    fn dim(&self) -> usize;

    /// Appends `n` draws (row-major) to `out`.
    fn draw_into(&self, n: usize, rng: &mut StreamRng, out: &mut Vec<f64>);

    fn draw(&self, n: usize, rng: &mut StreamRng) -> Result<EmpiricalMeasure> {
        let mut out = Vec::with_capacity(n * self.dim());
        self.draw_into(n, rng, &mut out);
        EmpiricalMeasure::from_flat(self.dim(), out, None)
    }
}

impl DistributionSpec {
    pub fn dim(&self) -> usize {
        match self {
            DistributionSpec::UniformBall { dim } => *dim,
            DistributionSpec::Gaussian { mean, .. } => mean.len(),
            DistributionSpec::GaussianMixture { components } => {
                components.first().map_or(0, |c| c.mean.len())
            }
            DistributionSpec::Discrete { points, .. } => points.first().map_or(0, Vec::len),
            DistributionSpec::Construction1d { .. } => 1,
        }
    }

    /// Validates parameters and prepares a reusable sampler.
    pub fn sampler(&self) -> Result<Box<dyn Sampler>> {
        match self {
            DistributionSpec::UniformBall { dim } => {
                if *dim == 0 {
                    return Err(invalid("dim", "must be positive"));
                }
                Ok(Box::new(UniformBall { dim: *dim }))
            }
            DistributionSpec::Gaussian { mean, scale } => {
                check_gaussian(mean, *scale)?;
                Ok(Box::new(Mixture::new(vec![MixtureComponent {
                    weight: 1.0,
                    mean: mean.clone(),
                    scale: *scale,
                }])?))
            }
            DistributionSpec::GaussianMixture { components } => {
                Ok(Box::new(Mixture::new(components.clone())?))
            }
            DistributionSpec::Discrete { points, pmf } => {
                Ok(Box::new(DiscreteSampler::new(points.clone(), pmf.clone())?))
            }
            DistributionSpec::Construction1d {
                beta,
                epsilon,
                side,
            } => {
                let c = Construction1D::build(*beta, *epsilon)?;
                Ok(Box::new(c.sampler(*side)))
            }
        }
    }
}

/// `n` i.i.d. draws from `spec`; identical `(spec, n, seed)` give identical output.
pub fn sample(spec: &DistributionSpec, n: usize, seed: u64) -> Result<EmpiricalMeasure> {
    if n == 0 {
        return Err(invalid("n", "sample size must be at least 1"));
    }
    let s = spec.sampler()?;
    let mut rng = rng::substream(seed, 0);
    s.draw(n, &mut rng)
}

fn check_gaussian(mean: &[f64], scale: f64) -> Result<()> {
    if mean.is_empty() {
        return Err(invalid("mean", "must be non-empty"));
    }
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(invalid("scale", format!("must be positive, got {scale}")));
    }
    Ok(())
}

fn check_pmf(pmf: &[f64], name: &'static str) -> Result<()> {
    if pmf.is_empty() {
        return Err(invalid(name, "must be non-empty"));
    }
    if pmf.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
        return Err(invalid(name, "entries must be finite and nonnegative"));
    }
    let s: f64 = pmf.iter().sum();
    if (s - 1.0).abs() > 1e-9 {
        return Err(invalid(name, format!("entries sum to {s}, expected 1")));
    }
    Ok(())
}

/// Normal direction times `U^{1/d}` radius.
struct UniformBall {
    dim: usize,
}

impl Sampler for UniformBall {
    fn dim(&self) -> usize {
        self.dim
    }

    fn draw_into(&self, n: usize, rng: &mut StreamRng, out: &mut Vec<f64>) {
        let mut z = vec![0.0; self.dim];
        for _ in 0..n {
            let mut r2: f64;
            loop {
                r2 = 0.0;
                for v in z.iter_mut() {
                    *v = StandardNormal.sample(rng);
                    r2 += *v * *v;
                }
                if r2 > 0.0 {
                    break;
                }
            }
            let u: f64 = rng.random();
            let radius = u.powf(1.0 / self.dim as f64) / r2.sqrt();
            out.extend(z.iter().map(|v| v * radius));
            // rounding can push the norm a hair above 1
            let start = out.len() - self.dim;
            let nrm = norm(&out[start..]);
            if nrm > 1.0 {
                for v in &mut out[start..] {
                    *v /= nrm;
                }
            }
        }
    }
}

struct Mixture {
    components: Vec<MixtureComponent>,
    cumulative: Vec<f64>,
}

impl Mixture {
    fn new(components: Vec<MixtureComponent>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| invalid("components", "need at least one component"))?;
        let dim = first.mean.len();
        for c in &components {
            check_gaussian(&c.mean, c.scale)?;
            if c.mean.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: c.mean.len(),
                });
            }
        }
        let w: Vec<f64> = components.iter().map(|c| c.weight).collect();
        check_pmf(&w, "component weights")?;
        Ok(Self {
            cumulative: cumulative(&w),
            components,
        })
    }
}

fn cumulative(p: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    p.iter()
        .map(|v| {
            acc += v;
            acc
        })
        .collect()
}

fn pick(cumulative: &[f64], u: f64) -> usize {
    let total = *cumulative.last().unwrap_or(&1.0);
    let idx = cumulative.partition_point(|c| *c <= u * total);
    idx.min(cumulative.len() - 1)
}

impl Sampler for Mixture {
    fn dim(&self) -> usize {
        self.components[0].mean.len()
    }

    fn draw_into(&self, n: usize, rng: &mut StreamRng, out: &mut Vec<f64>) {
        for _ in 0..n {
            let c = if self.components.len() == 1 {
                &self.components[0]
            } else {
                &self.components[pick(&self.cumulative, rng.random())]
            };
            for m in &c.mean {
                let z: f64 = StandardNormal.sample(rng);
                out.push(m + c.scale * z);
            }
        }
    }
}

struct DiscreteSampler {
    points: Vec<Vec<f64>>,
    cumulative: Vec<f64>,
}

impl DiscreteSampler {
    fn new(points: Vec<Vec<f64>>, pmf: Vec<f64>) -> Result<Self> {
        check_pmf(&pmf, "pmf")?;
        if points.len() != pmf.len() {
            return Err(invalid(
                "pmf",
                format!("{} probabilities for {} support points", pmf.len(), points.len()),
            ));
        }
        let dim = points[0].len();
        if dim == 0 || points.iter().any(|p| p.len() != dim) {
            return Err(invalid("points", "support points must share a positive dimension"));
        }
        Ok(Self {
            points,
            cumulative: cumulative(&pmf),
        })
    }
}

impl Sampler for DiscreteSampler {
    fn dim(&self) -> usize {
        self.points[0].len()
    }

    fn draw_into(&self, n: usize, rng: &mut StreamRng, out: &mut Vec<f64>) {
        for _ in 0..n {
            let i = pick(&self.cumulative, rng.random());
            out.extend_from_slice(&self.points[i]);
        }
    }
}
