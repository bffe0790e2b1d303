//! Two-sample tests from `E_γ`, `d̄_H` and `T_{d,k}`: permutation calibration, the `t_n`
//! threshold schedule, and power curves.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::{energy_sq, GammaOrder};
use crate::error::{invalid, Result};
use crate::estimation::GammaPreset;
use crate::halfspace::{dhbar_auto, t_stat_dk, DhbarMethod};
use crate::measures::{DistributionSpec, EmpiricalMeasure, Sampler};
use crate::numerics::{cmp_f64, mean_and_se};
use crate::rng;
use crate::sliced::{BinnedEnergy1D, Grid1D};

/// Directions used by `d̄_H` and `T_{d,k}` when no exact method applies.
pub const SEARCH_DIRECTIONS: usize = 512;
/// One-dimensional `E_γ²` with `γ ≠ 1` switches to the binned evaluator above this pooled size.
pub const BINNED_ABOVE: usize = 4096;
const BINNED_BINS: usize = 1 << 15;

/// A two-sample statistic; larger values are evidence against `μ = ν`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Statistic {
    /// `E_γ²` (V-statistic).
    Energy { gamma: f64 },
    /// `E_γ²` with `γ` chosen from the per-sample size `n`.
    EnergyPreset { preset: GammaPreset },
    Dhbar,
    TDk { k: u32 },
}

/// A statistic value and the algorithm that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatValue {
    pub value: f64,
    pub method: String,
}

impl Statistic {
    pub fn name(&self) -> String {
        match self {
            Statistic::Energy { gamma } => format!("energy(gamma={gamma})"),
            Statistic::EnergyPreset { preset } => format!("energy(gamma={})", preset_name(*preset)),
            Statistic::Dhbar => "dhbar".to_string(),
            Statistic::TDk { k } => format!("t_dk(k={k})"),
        }
    }

    /// `γ` used for samples of size `n` (energy statistics only).
    pub fn gamma_for(&self, n: usize) -> Option<Result<f64>> {
        match self {
            Statistic::Energy { gamma } => Some(Ok(*gamma)),
            Statistic::EnergyPreset { preset } => Some(preset.value(n)),
            _ => None,
        }
    }

    /// Evaluates on uniformly weighted samples; `seed` fixes any search directions.
    pub fn evaluate(&self, x: &EmpiricalMeasure, y: &EmpiricalMeasure, seed: u64) -> Result<StatValue> {
        x.check_same_dim(y)?;
        match self {
            Statistic::Energy { .. } | Statistic::EnergyPreset { .. } => {
                let gamma = self.gamma_for(x.len().min(y.len())).expect("energy statistic")?;
                energy_value(x, y, gamma)
            }
            Statistic::Dhbar => {
                let (w, m) = dhbar_auto(x, y, SEARCH_DIRECTIONS, seed)?;
                let method = match m {
                    DhbarMethod::Exact1d => "exact-1d",
                    DhbarMethod::Exact2d => "exact-2d",
                    DhbarMethod::Heuristic => "heuristic-512",
                };
                Ok(StatValue {
                    value: w.value,
                    method: method.to_string(),
                })
            }
            Statistic::TDk { k } => {
                let w = t_stat_dk(x, y, *k, SEARCH_DIRECTIONS, seed)?;
                Ok(StatValue {
                    value: w.value,
                    method: if x.dim() == 1 { "directions-pm1" } else { "directions-512" }.to_string(),
                })
            }
        }
    }
}

fn preset_name(p: GammaPreset) -> &'static str {
    match p {
        GammaPreset::One => "1",
        GammaPreset::InvLog => "1/log n",
        GammaPreset::InvLogLog => "1/log log n",
    }
}

fn energy_value(x: &EmpiricalMeasure, y: &EmpiricalMeasure, gamma: f64) -> Result<StatValue> {
    let g = GammaOrder::new(gamma, x.dim())?;
    if x.dim() == 1 && gamma != 1.0 && x.len() + y.len() > BINNED_ABOVE && x.is_uniform() && y.is_uniform() {
        let (lo, hi) = x
            .coords()
            .iter()
            .chain(y.coords())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
        let pad = 1e-9 * (hi - lo).max(1.0);
        let grid = Grid1D {
            lo: lo - pad,
            hi: hi + pad,
            bins: BINNED_BINS,
        };
        let b = BinnedEnergy1D::new(grid, gamma)?;
        return Ok(StatValue {
            value: b.energy_sq(x.coords(), y.coords()),
            method: "binned-1d".to_string(),
        });
    }
    let method = if x.dim() == 1 && gamma == 1.0 { "cramer-1d" } else { "vstat" };
    Ok(StatValue {
        value: energy_sq(x, y, &g)?,
        method: method.to_string(),
    })
}

/// How a test decides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Calibration {
    /// Reject when the permutation p-value is at most the level.
    Permutation { permutations: usize },
    /// Reject when the statistic exceeds the empirical `1 − level` quantile of the statistic
    /// simulated with both samples drawn from the first distribution.
    NullSimulation,
    /// Reject when the statistic is at least `t_n = n^{−exponent}`.
    Threshold { exponent: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestReport {
    pub statistic_name: String,
    pub method: String,
    pub observed: f64,
    /// Permutation mode: the `⌊level(B+1)⌋`-th largest permuted value, which the observed value
    /// must strictly exceed; threshold mode: `t_n`.
    pub threshold: f64,
    pub p_value: Option<f64>,
    pub reject: bool,
    pub level: f64,
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub permutations: usize,
}

/// Minimum number of relabelings.
pub const MIN_PERMUTATIONS: usize = 99;

fn check_level(level: f64) -> Result<()> {
    if !(level > 0.0 && level < 1.0) {
        return Err(invalid("level", format!("must lie in (0, 1), got {level}")));
    }
    Ok(())
}

/// Permutation values of an arbitrary statistic: relabeling `i` uses substream `i + 1`.
pub fn permutation_values<F>(x: &EmpiricalMeasure, y: &EmpiricalMeasure, stat: F, b: usize, seed: u64) -> Result<Vec<f64>>
where
    F: Fn(&EmpiricalMeasure, &EmpiricalMeasure) -> Result<f64> + Sync,
{
    let pooled = x.pooled(y)?;
    let n = x.len();
    (0..b)
        .into_par_iter()
        .map(|i| {
            let mut idx: Vec<usize> = (0..pooled.len()).collect();
            idx.shuffle(&mut rng::substream(seed, i as u64 + 1));
            let a = pooled.select(&idx[..n])?;
            let c = pooled.select(&idx[n..])?;
            stat(&a, &c)
        })
        .collect()
}

/// `p = (1 + #{perm ≥ observed})/(B + 1)`; values within `1e-12` relative count as ties.
pub fn permutation_p_value(observed: f64, perms: &[f64]) -> f64 {
    let tol = 1e-12 * observed.abs();
    let ge = perms.iter().filter(|v| **v >= observed - tol).count();
    (1 + ge) as f64 / (perms.len() + 1) as f64
}

fn permutation_threshold(perms: &[f64], level: f64) -> f64 {
    let j = (level * (perms.len() + 1) as f64 + 1e-9).floor() as usize;
    if j == 0 {
        return f64::INFINITY;
    }
    let mut s = perms.to_vec();
    s.sort_by(|a, b| cmp_f64(b, a));
    s[j - 1]
}

/// Permutation test for an arbitrary statistic closure.
#[allow(clippy::too_many_arguments)]
pub fn permutation_test_with<F>(
    x: &EmpiricalMeasure,
    y: &EmpiricalMeasure,
    name: &str,
    method: &str,
    stat: F,
    level: f64,
    b: usize,
    seed: u64,
) -> Result<TestReport>
where
    F: Fn(&EmpiricalMeasure, &EmpiricalMeasure) -> Result<f64> + Sync,
{
    check_level(level)?;
    if b < MIN_PERMUTATIONS {
        return Err(invalid("permutations", format!("need at least {MIN_PERMUTATIONS}, got {b}")));
    }
    if !x.is_uniform() || !y.is_uniform() {
        return Err(invalid("weights", "permutation tests need uniformly weighted samples"));
    }
    let observed = stat(x, y)?;
    let perms = permutation_values(x, y, &stat, b, seed)?;
    let p = permutation_p_value(observed, &perms);
    Ok(TestReport {
        statistic_name: name.to_string(),
        method: method.to_string(),
        observed,
        threshold: permutation_threshold(&perms, level),
        p_value: Some(p),
        reject: p <= level,
        level,
        n: x.len(),
        m: y.len(),
        seed,
        permutations: b,
    })
}

/// Pools the samples and recomputes `statistic` on `b` random relabelings.
pub fn permutation_test(
    x: &EmpiricalMeasure,
    y: &EmpiricalMeasure,
    statistic: &Statistic,
    level: f64,
    b: usize,
    seed: u64,
) -> Result<TestReport> {
    let dir_seed = rng::child_seed(seed, 0);
    let method = statistic.evaluate(x, y, dir_seed)?.method;
    // γ follows the original sample sizes, which relabeling preserves
    permutation_test_with(
        x,
        y,
        &statistic.name(),
        &method,
        |a, c| Ok(statistic.evaluate(a, c, dir_seed)?.value),
        level,
        b,
        seed,
    )
}

/// `t_n = n^{−exponent}` for `exponent ∈ (0, 1/2)`.
pub fn threshold_schedule(n: usize, exponent: f64) -> Result<f64> {
    if !(exponent > 0.0 && exponent < 0.5) {
        return Err(invalid("exponent", format!("must lie in (0, 1/2), got {exponent}")));
    }
    if n == 0 {
        return Err(invalid("n", "must be positive"));
    }
    Ok((n as f64).powf(-exponent))
}

pub const DEFAULT_THRESHOLD_EXPONENT: f64 = 0.25;

/// Rejects when the statistic is at least `t_n`, with `n` the smaller sample size.
pub fn threshold_test(x: &EmpiricalMeasure, y: &EmpiricalMeasure, statistic: &Statistic, exponent: f64, seed: u64) -> Result<TestReport> {
    let t = threshold_schedule(x.len().min(y.len()), exponent)?;
    let v = statistic.evaluate(x, y, rng::child_seed(seed, 0))?;
    Ok(TestReport {
        statistic_name: statistic.name(),
        method: v.method,
        observed: v.value,
        threshold: t,
        p_value: None,
        reject: v.value >= t,
        level: f64::NAN,
        n: x.len(),
        m: y.len(),
        seed,
        permutations: 0,
    })
}

// ---------------------------------------------------------------------------------------------
// Power curves

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerOptions {
    pub n_list: Vec<usize>,
    pub trials: usize,
    pub level: f64,
    pub calibration: Calibration,
    pub seed: u64,
}

/// One row of a power curve (CSV columns `statistic, n, trials, power, mean_stat, se_stat,
/// seed` plus the null summary).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PowerRecord {
    pub statistic: String,
    pub n: usize,
    pub trials: usize,
    pub power: f64,
    pub mean_stat: f64,
    pub se_stat: f64,
    pub seed: u64,
    /// Mean and standard error of the simulated null statistic (null-simulation mode).
    pub null_mean: Option<f64>,
    pub null_se: Option<f64>,
    pub critical_value: Option<f64>,
}

/// Exact-size randomized critical value of an empirical null: `(c, φ)` with
/// `P₀(T > c) + φ P₀(T = c) = level`.
pub fn randomized_critical_value(null: &[f64], level: f64) -> (f64, f64) {
    let mut s = null.to_vec();
    s.sort_by(|a, b| cmp_f64(b, a));
    let total = s.len() as f64;
    let mut i = 0;
    while i < s.len() {
        let v = s[i];
        let mut j = i;
        while j < s.len() && s[j] == v {
            j += 1;
        }
        let above = i as f64 / total;
        let at = (j - i) as f64 / total;
        if above + at > level {
            return (v, ((level - above) / at).clamp(0.0, 1.0));
        }
        i = j;
    }
    (f64::NEG_INFINITY, 1.0)
}

/// Expected rejection indicator under the randomized rule.
fn randomized_power(values: &[f64], c: f64, phi: f64) -> f64 {
    let r: f64 = values
        .iter()
        .map(|v| if *v > c { 1.0 } else if *v == c { phi } else { 0.0 })
        .sum();
    r / values.len() as f64
}

/// Draws `n` points from each sampler for every trial (the same samples feed every
/// statistic) and estimates the rejection frequency and the mean statistic.
pub fn power_curve(
    pair: (&DistributionSpec, &DistributionSpec),
    statistics: &[Statistic],
    opts: &PowerOptions,
) -> Result<Vec<PowerRecord>> {
    let p = pair.0.sampler()?;
    let q = pair.1.sampler()?;
    power_curve_samplers(p.as_ref(), q.as_ref(), statistics, opts)
}

pub fn power_curve_samplers(
    p: &dyn Sampler,
    q: &dyn Sampler,
    statistics: &[Statistic],
    opts: &PowerOptions,
) -> Result<Vec<PowerRecord>> {
    check_level(opts.level)?;
    if p.dim() != q.dim() {
        return Err(crate::Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    if opts.trials < 2 || opts.n_list.is_empty() || opts.n_list.contains(&0) {
        return Err(invalid("trials", "need at least two trials and positive sample sizes"));
    }
    if let Calibration::Permutation { permutations } = opts.calibration {
        if permutations < MIN_PERMUTATIONS {
            return Err(invalid("permutations", format!("need at least {MIN_PERMUTATIONS}")));
        }
    }
    let mut out = Vec::new();
    for (ni, &n) in opts.n_list.iter().enumerate() {
        let alt_seed = rng::child_seed(opts.seed, 2 * ni as u64);
        let null_seed = rng::child_seed(opts.seed, 2 * ni as u64 + 1);
        let draw_pair = |a: &dyn Sampler, b: &dyn Sampler, s: u64, t: usize| -> Result<(EmpiricalMeasure, EmpiricalMeasure)> {
            let mut r = rng::substream(s, t as u64);
            Ok((a.draw(n, &mut r)?, b.draw(n, &mut r)?))
        };
        // per trial: one statistic vector (alt) and, when needed, one null vector
        let alt: Vec<Vec<(f64, bool)>> = (0..opts.trials)
            .into_par_iter()
            .map(|t| {
                let (x, y) = draw_pair(p, q, alt_seed, t)?;
                statistics
                    .iter()
                    .map(|s| trial_value(s, &x, &y, opts, rng::child_seed(alt_seed, t as u64)))
                    .collect()
            })
            .collect::<Result<_>>()?;
        let null: Option<Vec<Vec<f64>>> = match opts.calibration {
            Calibration::NullSimulation => Some(
                (0..opts.trials)
                    .into_par_iter()
                    .map(|t| {
                        let (x, y) = draw_pair(p, p, null_seed, t)?;
                        statistics
                            .iter()
                            .map(|s| Ok(s.evaluate(&x, &y, rng::child_seed(null_seed, t as u64))?.value))
                            .collect()
                    })
                    .collect::<Result<_>>()?,
            ),
            _ => None,
        };
        for (si, s) in statistics.iter().enumerate() {
            let values: Vec<f64> = alt.iter().map(|row| row[si].0).collect();
            let (mean, se) = mean_and_se(&values);
            let mut rec = PowerRecord {
                statistic: s.name(),
                n,
                trials: opts.trials,
                power: 0.0,
                mean_stat: mean,
                se_stat: se,
                seed: opts.seed,
                null_mean: None,
                null_se: None,
                critical_value: None,
            };
            match &null {
                Some(nv) => {
                    let nvals: Vec<f64> = nv.iter().map(|row| row[si]).collect();
                    let (nm, nse) = mean_and_se(&nvals);
                    let (c, phi) = randomized_critical_value(&nvals, opts.level);
                    rec.power = randomized_power(&values, c, phi);
                    rec.null_mean = Some(nm);
                    rec.null_se = Some(nse);
                    rec.critical_value = Some(c);
                }
                None => {
                    rec.power = alt.iter().filter(|row| row[si].1).count() as f64 / opts.trials as f64;
                }
            }
            out.push(rec);
        }
    }
    Ok(out)
}

fn trial_value(s: &Statistic, x: &EmpiricalMeasure, y: &EmpiricalMeasure, opts: &PowerOptions, seed: u64) -> Result<(f64, bool)> {
    match opts.calibration {
        Calibration::Permutation { permutations } => {
            let r = permutation_test(x, y, s, opts.level, permutations, seed)?;
            Ok((r.observed, r.reject))
        }
        Calibration::Threshold { exponent } => {
            let r = threshold_test(x, y, s, exponent, seed)?;
            Ok((r.observed, r.reject))
        }
        Calibration::NullSimulation => Ok((s.evaluate(x, y, seed)?.value, false)),
    }
}

/// `n ≤ (ln 1/ε)^{c''} ε^{−(2β+d+1)/β}`: sample sizes below which `d̄_H` cannot separate the
/// construction pair.
pub fn dhbar_budget(beta: f64, epsilon: f64, dim: usize, c2: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) || !(beta > 0.0) {
        return Err(invalid("epsilon", "need ε ∈ (0, 1) and β > 0"));
    }
    Ok((1.0 / epsilon).ln().powf(c2) * epsilon.powf(-(2.0 * beta + dim as f64 + 1.0) / beta))
}

/// Writes records as CSV with columns `statistic, n, trials, power, mean_stat, se_stat, seed,
/// null_mean, null_se, critical_value`.
pub fn power_records_csv(records: &[PowerRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "statistic",
        "n",
        "trials",
        "power",
        "mean_stat",
        "se_stat",
        "seed",
        "null_mean",
        "null_se",
        "critical_value",
    ])
    .expect("in-memory write");
    let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:e}"));
    for r in records {
        w.write_record([
            r.statistic.clone(),
            r.n.to_string(),
            r.trials.to_string(),
            format!("{}", r.power),
            format!("{:e}", r.mean_stat),
            format!("{:e}", r.se_stat),
            r.seed.to_string(),
            opt(r.null_mean),
            opt(r.null_se),
            opt(r.critical_value),
        ])
        .expect("in-memory write");
    }
    let bytes = w.into_inner().expect("in-memory write");
    String::from_utf8(bytes).expect("csv output is utf-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{energy_sq_mmd, energy_sq_vstat};
    use crate::measures::sample;
    use approx::assert_relative_eq;

    fn gauss(mean: f64, d: usize) -> DistributionSpec {
        DistributionSpec::Gaussian {
            mean: vec![mean; d],
            scale: 1.0,
        }
    }

    #[test]
    fn p_value_formula() {
        let perms = vec![0.5; 99];
        assert_relative_eq!(permutation_p_value(1.0, &perms), 0.01);
        assert_relative_eq!(permutation_p_value(0.5, &perms), 1.0);
        assert_eq!(permutation_threshold(&(0..99).map(f64::from).collect::<Vec<_>>(), 0.05), 94.0);
    }

    #[test]
    fn separated_gaussians_reject() {
        let x = sample(&gauss(0.0, 2), 100, 1).unwrap();
        let y = sample(&gauss(3.0, 2), 100, 2).unwrap();
        for s in [Statistic::Energy { gamma: 1.0 }, Statistic::Dhbar, Statistic::TDk { k: 1 }] {
            let r = permutation_test(&x, &y, &s, 0.05, 99, 3).unwrap();
            assert!(r.p_value.unwrap() <= 0.01, "{}", r.statistic_name);
            assert!(r.reject);
            assert!(r.observed > r.threshold);
        }
    }

    #[test]
    fn identical_statistics_give_identical_p_values() {
        let x = sample(&gauss(0.0, 2), 30, 4).unwrap();
        let y = sample(&gauss(0.3, 2), 25, 5).unwrap();
        let g = GammaOrder::new(1.3, 2).unwrap();
        let a = permutation_test_with(&x, &y, "v", "", |a, b| energy_sq_vstat(a, b, &g), 0.05, 199, 7).unwrap();
        let b = permutation_test_with(&x, &y, "k", "", |a, b| energy_sq_mmd(a, b, &g), 0.05, 199, 7).unwrap();
        assert_eq!(a.p_value, b.p_value);
    }

    #[test]
    fn permutation_is_deterministic() {
        let x = sample(&gauss(0.0, 1), 40, 4).unwrap();
        let y = sample(&gauss(0.2, 1), 40, 5).unwrap();
        let s = Statistic::Dhbar;
        assert_eq!(
            permutation_test(&x, &y, &s, 0.05, 199, 9).unwrap(),
            permutation_test(&x, &y, &s, 0.05, 199, 9).unwrap()
        );
        assert!(permutation_test(&x, &y, &s, 0.05, 50, 9).is_err());
    }

    #[test]
    fn schedule_examples() {
        assert_relative_eq!(threshold_schedule(16, 0.25).unwrap(), 0.5, epsilon = 1e-15);
        let mut last = 0.0;
        for e in 2..=6 {
            let n = 10usize.pow(e);
            let v = threshold_schedule(n, 0.25).unwrap() * (n as f64).sqrt();
            assert!(v > last);
            last = v;
        }
        assert!(threshold_schedule(10, 0.5).is_err());
        assert!(threshold_schedule(10, 0.0).is_err());
    }

    #[test]
    fn randomized_critical_value_has_exact_size() {
        let null: Vec<f64> = (0..100).map(|i| (i / 10) as f64).collect();
        let (c, phi) = randomized_critical_value(&null, 0.05);
        assert_eq!(c, 9.0);
        assert_relative_eq!(phi, 0.5);
        assert_relative_eq!(randomized_power(&null, c, phi), 0.05, epsilon = 1e-15);
    }

    #[test]
    fn binned_energy_tracks_pairwise_ordering() {
        let x = sample(&gauss(0.0, 1), 2100, 1).unwrap();
        let y = sample(&gauss(0.1, 1), 2100, 2).unwrap();
        let s = Statistic::Energy { gamma: 0.5 };
        let v = s.evaluate(&x, &y, 0).unwrap();
        assert_eq!(v.method, "binned-1d");
        let exact = energy_sq_vstat(&x, &y, &GammaOrder::new(0.5, 1).unwrap()).unwrap();
        assert!((v.value - exact).abs() < 1e-3 * exact, "{} vs {exact}", v.value);
    }

    #[test]
    fn null_power_is_near_level() {
        let spec = gauss(0.0, 1);
        let opts = PowerOptions {
            n_list: vec![50],
            trials: 400,
            level: 0.1,
            calibration: Calibration::NullSimulation,
            seed: 3,
        };
        let recs = power_curve((&spec, &spec), &[Statistic::Dhbar, Statistic::Energy { gamma: 1.0 }], &opts).unwrap();
        for r in &recs {
            assert!((r.power - 0.1).abs() < 0.06, "{r:?}");
        }
        let csv = power_records_csv(&recs);
        assert!(csv.starts_with("statistic,n,trials,power,mean_stat,se_stat,seed"));
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn threshold_mode() {
        let x = sample(&gauss(0.0, 1), 64, 1).unwrap();
        let y = sample(&gauss(5.0, 1), 64, 2).unwrap();
        let r = threshold_test(&x, &y, &Statistic::TDk { k: 0 }, 0.25, 0).unwrap();
        assert!(r.reject && r.p_value.is_none());
        assert_relative_eq!(r.threshold, 64f64.powf(-0.25));
    }

    #[test]
    fn budget_formula() {
        assert_relative_eq!(dhbar_budget(1.0, 0.1, 1, 1.0).unwrap(), 10f64.ln() * 1e4, max_relative = 1e-12);
    }
}
