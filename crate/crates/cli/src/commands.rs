use std::path::Path;
use std::time::Instant;

use energy_core::energy::{
    concentration_curve, energy_sq_mmd, energy_sq_ustat, energy_sq_vstat, Constant, GammaOrder,
};
use energy_core::estimation::{
    build_codebook, discrete_rate_experiment, fit_discrete_simplex, fit_min_energy_sgd, GammaPreset,
    GeneratorKind, GeneratorModel, SgdOptions, SimplexConstraint, SimplexOptions, StoppingConfig,
};
use energy_core::halfspace::{
    dh_average, dhbar_1d, dhbar_2d_bruteforce, dhbar_2d_exact, dhbar_3d_exact, dhbar_auto, dhbar_heuristic,
    sandwich_constant, t_stat_dk,
};
use energy_core::measures::{load_csv, Sampler};
use energy_core::rng;
use energy_core::sliced::{energy_sq_1d_exact, sliced_energy_sq_mc, Projection1D};
use energy_core::spectral::{tightness_sweep, verify_scaling, Construction1D, ConstructionSide};
use energy_core::testing::{
    dhbar_budget, permutation_test, power_curve, power_records_csv, threshold_test, Calibration, PowerOptions,
};
use energy_core::{DistributionSpec, EmpiricalMeasure, Error, Result};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::*;

/// Everything a run produces, held in memory until it is written.
pub struct Artifacts {
    pub result: Value,
    /// `(file name, contents)` written next to `summary.json`.
    pub files: Vec<(String, Vec<u8>)>,
}

impl Artifacts {
    fn only(result: Value) -> Self {
        Self {
            result,
            files: Vec::new(),
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable result")
}

fn table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory write")
}

fn load(path: &Option<std::path::PathBuf>) -> Result<EmpiricalMeasure> {
    load_csv(path.as_ref().expect("validated"), None)
}

fn load_pair(x: &Option<std::path::PathBuf>, y: &Option<std::path::PathBuf>) -> Result<(EmpiricalMeasure, EmpiricalMeasure)> {
    let a = load(x)?;
    let b = load_csv(y.as_ref().expect("validated"), Some(a.dim()))?;
    Ok((a, b))
}

/// Fitted model file: `{kind, dim, theta, seed}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FittedModel {
    pub kind: GeneratorKind,
    pub dim: usize,
    pub theta: Vec<f64>,
    pub seed: u64,
}

fn read_model(path: &Path) -> Result<GeneratorModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let f: FittedModel = serde_json::from_str(&text).map_err(|e| Error::InvalidParameter {
        name: "model file",
        reason: format!("{}: {e}", path.display()),
    })?;
    GeneratorModel::new(f.kind, f.theta)
}

pub fn run(cfg: &ExperimentConfig) -> Result<Artifacts> {
    let seed = cfg.seed;
    match &cfg.params {
        Params::Energy(p) => energy(p),
        Params::Slice(p) => slice(p, seed),
        Params::Halfspace(p) => halfspace(p, seed),
        Params::Tstat(p) => {
            let (x, y) = load_pair(&p.x, &p.y)?;
            let w = t_stat_dk(&x, &y, p.k, p.n_dirs, seed)?;
            Ok(Artifacts::only(json!({ "k": p.k, "witness": w, "value": w.value, "n": x.len(), "m": y.len() })))
        }
        Params::Fit(p) => fit(p, seed),
        Params::Discrete(p) => discrete(p, seed),
        Params::Stop(p) => stop(p, seed),
        Params::Test(p) => {
            let (x, y) = load_pair(&p.x, &p.y)?;
            let report = match p.calibration {
                Calibration::Permutation { permutations } => {
                    permutation_test(&x, &y, &p.statistic, p.level, permutations, seed)?
                }
                Calibration::Threshold { exponent } => threshold_test(&x, &y, &p.statistic, exponent, seed)?,
                Calibration::NullSimulation => unreachable!("rejected during validation"),
            };
            Ok(Artifacts::only(to_value(&report)))
        }
        Params::Power(p) => power(p, seed),
        Params::ConstructPair(p) => construct_pair(p),
        Params::ConstructVerify(p) => construct_verify(p),
        Params::ConstructTightness(p) => {
            let rep = tightness_sweep(p.beta, &p.eps_list)?;
            let rows = rep.rows.iter().map(|r| {
                vec![
                    r.epsilon.to_string(),
                    r.r.to_string(),
                    r.tv.to_string(),
                    r.energy1.to_string(),
                    r.dhbar.to_string(),
                    r.sobolev_gap.to_string(),
                ]
            });
            let csv = table(&["epsilon", "r", "tv", "energy1", "dhbar", "sobolev_gap"], rows);
            Ok(Artifacts {
                result: to_value(&rep),
                files: vec![("tightness.csv".into(), csv)],
            })
        }
        Params::RatesDiscrete(p) => {
            let rep = discrete_rate_experiment(p.k, &p.n_list, p.trials, p.delta_target, seed)?;
            let mut rows: Vec<Vec<String>> = rep
                .rows
                .iter()
                .map(|r| {
                    vec![
                        "data".into(),
                        r.n.to_string(),
                        r.trials.to_string(),
                        r.mean_tv_sq.to_string(),
                        r.se_tv_sq.to_string(),
                        r.scaled.to_string(),
                        r.max_l1_to_empirical.to_string(),
                        String::new(),
                        String::new(),
                    ]
                })
                .collect();
            rows.push(vec![
                "slope".into(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                rep.observed_constant.to_string(),
                String::new(),
                rep.slope.slope.to_string(),
                rep.slope.stderr.to_string(),
            ]);
            let csv = table(
                &["row", "n", "trials", "mean_tv_sq", "se_tv_sq", "scaled", "max_l1_to_empirical", "slope", "slope_stderr"],
                rows,
            );
            Ok(Artifacts {
                result: to_value(&rep),
                files: vec![("rates.csv".into(), csv)],
            })
        }
        Params::RatesConcentration(p) => {
            let mut curves = Vec::new();
            let mut idx = 0u64;
            for &d in &p.dims {
                for &g in &p.gammas {
                    curves.push(concentration_curve(g, d, &p.n_list, p.trials, rng::child_seed(seed, idx))?);
                    idx += 1;
                }
            }
            let rows = curves.iter().flat_map(|c| {
                c.rows.iter().map(|r| {
                    vec![
                        r.dim.to_string(),
                        r.gamma.to_string(),
                        r.n.to_string(),
                        r.trials.to_string(),
                        r.mean.to_string(),
                        r.std_error.to_string(),
                        r.bound.to_string(),
                    ]
                })
            });
            let csv = table(&["dim", "gamma", "n", "trials", "mean", "std_error", "bound"], rows);
            Ok(Artifacts {
                result: json!({ "curves": curves, "all_within_bound": curves.iter().all(|c| c.within_bound) }),
                files: vec![("concentration.csv".into(), csv)],
            })
        }
        Params::Bench(p) => bench(p, seed),
    }
}

fn energy(p: &EnergyParams) -> Result<Artifacts> {
    let (x, y) = load_pair(&p.x, &p.y)?;
    let g = GammaOrder::new(p.gamma, x.dim())?;
    let e2 = match p.estimator {
        Estimator::Vstat => energy_sq_vstat(&x, &y, &g)?,
        Estimator::Ustat => energy_sq_ustat(&x, &y, &g)?,
        Estimator::Mmd => energy_sq_mmd(&x, &y, &g)?,
    };
    // the U-statistic may be negative; E_γ is then undefined
    let e = if e2 >= 0.0 { Some(e2.sqrt()) } else { None };
    Ok(Artifacts::only(json!({
        "energy_sq": e2,
        "energy": e,
        "n": x.len(),
        "m": y.len(),
        "gamma": p.gamma,
        "estimator": p.estimator,
    })))
}

fn slice(p: &SliceParams, seed: u64) -> Result<Artifacts> {
    let (x, y) = load_pair(&p.x, &p.y)?;
    let g = GammaOrder::new(p.gamma, x.dim())?;
    let est = sliced_energy_sq_mc(&x, &y, &g, p.n_dirs, seed)?;
    let mut out = json!({
        "energy_sq": est.value,
        "std_error": est.std_error,
        "n_dirs": est.n_dirs,
        "gamma": p.gamma,
        "n": x.len(),
        "m": y.len(),
    });
    if let Some(v) = &p.direction {
        let proj = Projection1D::new(&x, &y, v)?;
        out["direction_energy_sq"] = json!(energy_sq_1d_exact(&proj, p.gamma)?);
    }
    Ok(Artifacts::only(out))
}

fn halfspace(p: &HalfspaceParams, seed: u64) -> Result<Artifacts> {
    let (x, y) = load_pair(&p.x, &p.y)?;
    let d = x.dim();
    let (value, witness, method): (f64, Option<Value>, &str) = match p.method {
        HalfspaceMethod::Auto => {
            let (w, m) = dhbar_auto(&x, &y, p.n_dirs, seed)?;
            (w.value, Some(to_value(&w)), match m {
                energy_core::halfspace::DhbarMethod::Exact1d => "exact-1d",
                energy_core::halfspace::DhbarMethod::Exact2d => "exact-2d",
                energy_core::halfspace::DhbarMethod::Heuristic => "heuristic",
            })
        }
        HalfspaceMethod::Exact => match d {
            1 => {
                let w = dhbar_1d(&x, &y)?;
                (w.value, Some(to_value(&w)), "exact-1d")
            }
            2 => {
                let w = dhbar_2d_exact(&x, &y)?;
                (w.value, Some(to_value(&w)), "exact-2d")
            }
            3 => (dhbar_3d_exact(&x, &y)?, None, "exact-3d"),
            _ => {
                return Err(Error::InvalidParameter {
                    name: "method",
                    reason: format!("no exact algorithm in dimension {d}"),
                })
            }
        },
        HalfspaceMethod::Bruteforce => (dhbar_2d_bruteforce(&x, &y)?, None, "bruteforce-2d"),
        HalfspaceMethod::Heuristic => {
            let w = dhbar_heuristic(&x, &y, p.n_dirs, seed)?;
            (w.value, Some(to_value(&w)), "heuristic")
        }
    };
    Ok(Artifacts::only(json!({
        "dhbar": value,
        "witness": witness,
        "method": method,
        "dh_average": dh_average(&x, &y)?,
        "sandwich_constant": sandwich_constant(d),
        "n": x.len(),
        "m": y.len(),
    })))
}

fn default_theta(p: &FitParams, data: &EmpiricalMeasure) -> Vec<f64> {
    let d = data.dim();
    match p.model {
        ModelKindName::GaussianMixture => {
            let k = p.components;
            let mut t = vec![0.0; k];
            for c in 0..k {
                t.extend_from_slice(data.point(c * data.len() / k));
            }
            t
        }
        ModelKindName::PushforwardAffine => {
            let mut t = vec![0.0; d * d + d];
            for i in 0..d {
                t[i * d + i] = 1.0;
            }
            for (x, w) in data.points().zip(data.weights()) {
                for k in 0..d {
                    t[d * d + k] += w * x[k];
                }
            }
            t
        }
    }
}

fn fit(p: &FitParams, seed: u64) -> Result<Artifacts> {
    let data = load(&p.data)?;
    let d = data.dim();
    let kind = match p.model {
        ModelKindName::GaussianMixture => GeneratorKind::GaussianMixture {
            dim: d,
            components: p.components,
        },
        ModelKindName::PushforwardAffine => GeneratorKind::PushforwardAffine { dim: d },
    };
    let theta = p.init.clone().unwrap_or_else(|| default_theta(p, &data));
    let model = GeneratorModel::new(kind, theta)?;
    let gamma = match p.gamma_preset {
        Some(pr) => GammaPreset::from(pr).value(data.len())?,
        None => p.gamma,
    };
    let g = GammaOrder::new(gamma, d)?;
    let opts = SgdOptions {
        steps: p.steps,
        batch_m: p.batch_m,
        learning_rate: p.learning_rate,
        seed,
        gradient_cap: p.gradient_cap,
    };
    let fit = fit_min_energy_sgd(&data, &model, &g, &opts)?;
    let fitted = FittedModel {
        kind,
        dim: d,
        theta: fit.model.theta.clone(),
        seed,
    };
    let trace = table(
        &["step", "energy_sq"],
        fit.trace.iter().enumerate().map(|(i, v)| vec![i.to_string(), v.to_string()]),
    );
    let model_json = serde_json::to_vec_pretty(&to_value(&fitted)).expect("serializable");
    Ok(Artifacts {
        result: json!({
            "model": fitted,
            "weights": fit.model.weights(),
            "means": fit.model.means(),
            "gamma": gamma,
            "gradient_check": fit.gradient_check,
            "final_loss": fit.trace.last(),
            "steps": fit.trace.len(),
        }),
        files: vec![("trace.csv".into(), trace), ("model.json".into(), model_json)],
    })
}

fn discrete(p: &DiscreteParams, seed: u64) -> Result<Artifacts> {
    let counts = p.counts.as_ref().expect("validated");
    let cb = build_codebook(counts.len(), p.delta_target, seed)?;
    let constraint = p.support.clone().map(SimplexConstraint::Support);
    let opts = SimplexOptions {
        max_iter: p.max_iter,
        ..SimplexOptions::default()
    };
    let fit = fit_discrete_simplex(counts, &cb, constraint.as_ref(), &opts)?;
    let n: u64 = counts.iter().sum();
    let rows = counts.iter().zip(&fit.pmf).enumerate().map(|(i, (c, e))| {
        vec![i.to_string(), c.to_string(), (*c as f64 / n as f64).to_string(), e.to_string()]
    });
    let csv = table(&["symbol", "count", "empirical", "estimate"], rows);
    Ok(Artifacts {
        result: json!({
            "fit": fit,
            "code_dim": cb.dim,
            "min_dist": cb.min_dist,
            "k": cb.k(),
            "n": n,
        }),
        files: vec![("discrete.csv".into(), csv)],
    })
}

fn stop(p: &StopParams, seed: u64) -> Result<Artifacts> {
    let data = load(&p.data)?;
    let samplers: Vec<Box<dyn Sampler>> = p
        .candidates
        .iter()
        .map(|c| -> Result<Box<dyn Sampler>> {
            let s: Box<dyn Sampler> = match c {
                Candidate::Distribution { spec } => spec.sampler()?,
                Candidate::ModelFile { path } => Box::new(read_model(path)?.sampler()),
                Candidate::Model { model } => Box::new(GeneratorModel::new(model.kind, model.theta.clone())?.sampler()),
            };
            if s.dim() != data.dim() {
                return Err(Error::DimensionMismatch {
                    expected: data.dim(),
                    found: s.dim(),
                });
            }
            Ok(s)
        })
        .collect::<Result<_>>()?;
    let gamma = match p.gamma_preset {
        Some(pr) => GammaPreset::from(pr).value(data.len())?,
        None => p.gamma,
    };
    let cfg = StoppingConfig::new(data.len(), p.delta, gamma, p.c_cal, p.tau)?;
    let report = energy_core::estimation::stopping_verifier(&data, samplers.iter().map(|b| b.as_ref()), &cfg, seed)?;
    let rows = report
        .values
        .iter()
        .zip(&report.schedule)
        .enumerate()
        .map(|(i, (v, m))| vec![(i + 1).to_string(), m.to_string(), v.to_string()]);
    let csv = table(&["k", "m_k", "energy"], rows);
    Ok(Artifacts {
        result: json!({ "report": report, "gamma": gamma, "c_cal": p.c_cal, "tau": p.tau, "delta": p.delta, "n": data.len() }),
        files: vec![("stop.csv".into(), csv)],
    })
}

fn power(p: &PowerParams, seed: u64) -> Result<Artifacts> {
    let pair = p.pair.clone().unwrap_or_else(|| construction_pair(p.beta, p.epsilon));
    let opts = PowerOptions {
        n_list: p.n_list.clone(),
        trials: p.trials,
        level: p.level,
        calibration: p.calibration,
        seed,
    };
    let records = power_curve((&pair.p, &pair.q), &p.statistics, &opts)?;
    let budget = match (&pair.p, p.pair.is_none()) {
        (DistributionSpec::Construction1d { beta, epsilon, .. }, true) if *epsilon > 0.0 => {
            Some(dhbar_budget(*beta, *epsilon, 1, 1.0)?)
        }
        _ => None,
    };
    Ok(Artifacts {
        result: json!({ "records": records, "dhbar_budget": budget }),
        files: vec![("power.csv".into(), power_records_csv(&records).into_bytes())],
    })
}

fn construct_pair(p: &ConstructPairParams) -> Result<Artifacts> {
    let c = Construction1D::build(p.beta, p.epsilon)?;
    let xs = c.grid();
    let dp = c.density(ConstructionSide::P);
    let dq = c.density(ConstructionSide::Q);
    let d0 = c.density(ConstructionSide::Baseline);
    let rows = (0..xs.len()).map(|i| vec![xs[i].to_string(), dp[i].to_string(), dq[i].to_string(), d0[i].to_string()]);
    let csv = table(&["x", "p", "q", "p0"], rows);
    let g = GammaOrder::new(1.0, 1)?;
    Ok(Artifacts {
        result: json!({
            "beta": c.beta(),
            "beta_bar": c.beta_bar(),
            "epsilon": c.epsilon(),
            "r": c.r(),
            "kappa": c.kappa(),
            "tv": c.tv(),
            "energy1": c.energy1_sq().sqrt(),
            "energy1_fourier": c.energy_sq_fourier(1.0)?.sqrt(),
            "dhbar": c.dhbar(),
            "dh_from_energy": g.constant(Constant::DhFactor) * c.energy1_sq().sqrt(),
            "sobolev_gap_beta": c.sobolev_gap(c.beta())?,
            "half_width": c.half_width(),
            "step": c.step(),
        }),
        files: vec![("construction.csv".into(), csv)],
    })
}

fn construct_verify(p: &ConstructVerifyParams) -> Result<Artifacts> {
    let bb = p.beta.ceil() as u32 + 1;
    let ts = p.ts.clone().unwrap_or_else(|| {
        let mut t = vec![-1.0, 0.0, 1.0, bb as f64 - 1.0];
        t.dedup();
        t
    });
    let slopes = verify_scaling(bb, &ts, &p.r_list)?;
    let rows = slopes.iter().flat_map(|s| {
        s.r_list
            .iter()
            .zip(&s.values)
            .map(move |(r, v)| vec![s.quantity.clone(), r.to_string(), v.to_string()])
    });
    let csv = table(&["quantity", "r", "value"], rows);
    let all_within = slopes.iter().all(|s| (s.slope - s.expected).abs() <= 0.1);
    Ok(Artifacts {
        result: json!({ "beta": p.beta, "beta_bar": bb, "ts": ts, "slopes": slopes, "all_within_0_1": all_within }),
        files: vec![("scaling.csv".into(), csv)],
    })
}

fn bench(p: &BenchParams, seed: u64) -> Result<Artifacts> {
    let g = GammaOrder::new(p.gamma, p.dim)?;
    let spec = DistributionSpec::UniformBall { dim: p.dim };
    let sampler = spec.sampler()?;
    let mut values = Vec::new();
    for (i, &n) in p.sizes.iter().enumerate() {
        let mut r = rng::substream(seed, i as u64);
        let x = sampler.draw(n, &mut r)?;
        let y = sampler.draw(n, &mut r)?;
        let mut v = 0.0;
        let start = Instant::now();
        for _ in 0..p.reps {
            v = energy_sq_vstat(&x, &y, &g)?;
        }
        let per = start.elapsed().as_secs_f64() / p.reps as f64;
        eprintln!("bench n={n} d={} gamma={}: {:.3} ms per evaluation", p.dim, p.gamma, per * 1e3);
        values.push(json!({ "n": n, "energy_sq": v }));
    }
    Ok(Artifacts::only(json!({ "runs": values, "dim": p.dim, "gamma": p.gamma, "reps": p.reps })))
}
