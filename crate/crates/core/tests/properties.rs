//! Property checks through the public API.

use energy_core::energy::{energy_sq_vstat, GammaOrder};
use energy_core::estimation::{
    build_codebook, fit_min_energy_sgd, quadratic_form, random_pmf, tv_discrete, GeneratorModel, SgdOptions,
};
use energy_core::halfspace::{dhbar_1d, dhbar_2d_exact, dhbar_heuristic};
use energy_core::measures::{sample, DistributionSpec};
use energy_core::numerics::log_log_fit;
use energy_core::rng::{child_seed, substream, StreamRng};
use energy_core::sliced::{sliced_energy_sq_mc, Projection1D};
use energy_core::spectral::tightness_sweep;
use energy_core::testing::{permutation_test, permutation_test_with, power_curve, Calibration, PowerOptions, Statistic};
use energy_core::EmpiricalMeasure;
use rand::Rng;

fn ball_points(rng: &mut StreamRng, dim: usize, k: usize) -> Vec<Vec<f64>> {
    let s = DistributionSpec::UniformBall { dim }.sampler().unwrap();
    let m = s.draw(k, rng).unwrap();
    m.points().map(<[f64]>::to_vec).collect()
}

fn gaussian_cloud(rng: &mut StreamRng, dim: usize, n: usize) -> EmpiricalMeasure {
    let mean: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    DistributionSpec::Gaussian { mean, scale: 1.0 }.sampler().unwrap().draw(n, rng).unwrap()
}

#[test]
fn triangle_inequality_on_random_triples() {
    let mut rng = substream(1, 0);
    for gamma in [0.5, 1.0, 1.5] {
        for t in 0..334 {
            let d = 1 + t % 3;
            let g = GammaOrder::new(gamma, d).unwrap();
            let a = gaussian_cloud(&mut rng, d, 20);
            let b = gaussian_cloud(&mut rng, d, 20);
            let c = gaussian_cloud(&mut rng, d, 20);
            let e = |x: &EmpiricalMeasure, y: &EmpiricalMeasure| energy_sq_vstat(x, y, &g).unwrap().sqrt();
            assert!(e(&a, &c) <= e(&a, &b) + e(&b, &c) + 1e-10, "gamma {gamma} triple {t}");
            assert_eq!(e(&a, &b), e(&b, &a));
        }
    }
}

fn energy_tv_max_ratio(seed: u64) -> f64 {
    let mut rng = substream(seed, 0);
    let mut worst: f64 = 0.0;
    for t in 0..1000 {
        let d = 1 + t % 3;
        let k = rng.random_range(2..=12);
        let pts = ball_points(&mut rng, d, k);
        let p = random_pmf(k, &mut rng);
        let q = random_pmf(k, &mut rng);
        let g = GammaOrder::new([0.5, 1.0, 1.5][t % 3], d).unwrap();
        let mu = EmpiricalMeasure::with_weights(&pts, p.clone()).unwrap();
        let nu = EmpiricalMeasure::with_weights(&pts, q.clone()).unwrap();
        let e = energy_sq_vstat(&mu, &nu, &g).unwrap().sqrt();
        worst = worst.max(e / tv_discrete(&p, &q));
    }
    worst
}

#[test]
fn energy_over_tv_is_bounded_and_stable() {
    let a = energy_tv_max_ratio(2);
    let b = energy_tv_max_ratio(3);
    assert!(a.is_finite() && b.is_finite());
    assert!(a.max(b) < 10.0 * a.min(b), "{a} vs {b}");
}

#[test]
fn coordinate_scaling_multiplies_by_c_gamma() {
    let mut rng = substream(4, 0);
    for gamma in [0.5, 1.0, 1.5] {
        let g = GammaOrder::new(gamma, 2).unwrap();
        let x = gaussian_cloud(&mut rng, 2, 30);
        let y = gaussian_cloud(&mut rng, 2, 25);
        let e = energy_sq_vstat(&x, &y, &g).unwrap();
        let c: f64 = 2.7;
        let s = energy_sq_vstat(&x.scaled(c), &y.scaled(c), &g).unwrap();
        assert!((s - c.powf(gamma) * e).abs() <= 1e-12 * s, "gamma {gamma}");
    }
}

#[test]
fn rotation_leaves_energy_unchanged() {
    let mut rng = substream(5, 0);
    let (s, c) = 0.83f64.sin_cos();
    let rot = |m: &EmpiricalMeasure| m.map_points(|p| vec![c * p[0] - s * p[1], s * p[0] + c * p[1]]).unwrap();
    for gamma in [0.5, 1.0, 1.5] {
        let g = GammaOrder::new(gamma, 2).unwrap();
        let x = gaussian_cloud(&mut rng, 2, 40);
        let y = gaussian_cloud(&mut rng, 2, 35);
        let e = energy_sq_vstat(&x, &y, &g).unwrap();
        let r = energy_sq_vstat(&rot(&x), &rot(&y), &g).unwrap();
        assert!((e - r).abs() <= 1e-12 * e);
        let a = sliced_energy_sq_mc(&x, &y, &g, 2000, 7).unwrap();
        let b = sliced_energy_sq_mc(&rot(&x), &rot(&y), &g, 2000, 8).unwrap();
        let se = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
        assert!((a.value - b.value).abs() <= 3.0 * se, "gamma {gamma}");
    }
}

#[test]
fn one_dimensional_cdf_gap_is_e1() {
    let mut rng = substream(6, 0);
    let g = GammaOrder::new(1.0, 1).unwrap();
    for _ in 0..20 {
        let x = gaussian_cloud(&mut rng, 1, 33);
        let y = gaussian_cloud(&mut rng, 1, 17);
        let e = energy_sq_vstat(&x, &y, &g).unwrap();
        // 2 ∫ (F_x − F_y)² computed from the merged step functions
        let p = Projection1D::from_1d(&x, &y).unwrap();
        let cdf = energy_core::sliced::energy_sq_1d_exact(&p, 1.0).unwrap();
        assert!((e - cdf).abs() <= 1e-10 * e.max(1.0));
    }
}

#[test]
fn dhbar_never_exceeds_tv() {
    let mut rng = substream(7, 0);
    for t in 0..300 {
        let d = 1 + t % 2;
        let k = rng.random_range(2..=15);
        let pts = ball_points(&mut rng, d, k);
        let p = random_pmf(k, &mut rng);
        let q = random_pmf(k, &mut rng);
        let mu = EmpiricalMeasure::with_weights(&pts, p.clone()).unwrap();
        let nu = EmpiricalMeasure::with_weights(&pts, q.clone()).unwrap();
        let tv = tv_discrete(&p, &q);
        let exact = if d == 1 { dhbar_1d(&mu, &nu).unwrap().value } else { dhbar_2d_exact(&mu, &nu).unwrap().value };
        let heur = dhbar_heuristic(&mu, &nu, 64, t as u64).unwrap().value;
        assert!(exact <= tv + 1e-12 && heur <= exact + 1e-12, "instance {t}");
    }
}

#[test]
fn vc_decay_of_empirical_dhbar() {
    for d in [1usize, 2] {
        let spec = DistributionSpec::UniformBall { dim: d };
        let ns = [25usize, 100, 400];
        let means: Vec<f64> = ns
            .iter()
            .enumerate()
            .map(|(i, &n)| {
                // the population is stood in for by a 20n-point reference sample
                let vals: Vec<f64> = (0..200)
                    .map(|t| {
                        let s = child_seed(child_seed(8, d as u64), (i * 1000 + t) as u64);
                        let x = sample(&spec, n, s).unwrap();
                        let r = sample(&spec, 20 * n, s ^ 0xABCD).unwrap();
                        if d == 1 {
                            dhbar_1d(&x, &r).unwrap().value
                        } else {
                            dhbar_heuristic(&x, &r, 128, s).unwrap().value
                        }
                    })
                    .collect();
                vals.iter().sum::<f64>() / vals.len() as f64
            })
            .collect();
        let nf: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
        let fit = log_log_fit(&nf, &means).unwrap();
        assert!((fit.slope + 0.5).abs() <= 0.1, "d {d}: slope {}", fit.slope);
    }
}

#[test]
fn heuristic_is_monotone_in_directions() {
    let mut rng = substream(9, 0);
    let x = gaussian_cloud(&mut rng, 3, 60);
    let y = gaussian_cloud(&mut rng, 3, 50);
    let mut last = 0.0;
    for n_dirs in [1, 4, 16, 64, 256] {
        let v = dhbar_heuristic(&x, &y, n_dirs, 3).unwrap().value;
        assert!(v >= last);
        last = v;
    }
}

#[test]
fn construction_stays_in_the_smooth_class() {
    let rep = tightness_sweep(1.0, &[0.2, 0.1, 0.05, 0.025]).unwrap();
    let gaps: Vec<f64> = rep.rows.iter().map(|r| r.sobolev_gap).collect();
    let (lo, hi) = gaps.iter().fold((f64::INFINITY, 0f64), |(a, b), v| (a.min(*v), b.max(*v)));
    assert!(hi <= 4.0 * lo, "{gaps:?}");
}

#[test]
fn codebook_quadratic_form_is_nonnegative_and_comparable_to_tv() {
    let cb = build_codebook(16, 1.0, 10).unwrap();
    let dist = cb.distance_matrix();
    let mut rng = substream(10, 0);
    let mut lowest = f64::INFINITY;
    for _ in 0..1000 {
        let mut w: Vec<f64> = (0..16).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mean = w.iter().sum::<f64>() / 16.0;
        w.iter_mut().for_each(|v| *v -= mean);
        assert!(quadratic_form(&dist, &w) >= -1e-12);
        let p = random_pmf(16, &mut rng);
        let q = random_pmf(16, &mut rng);
        let diff: Vec<f64> = p.iter().zip(&q).map(|(a, b)| a - b).collect();
        let tv = tv_discrete(&p, &q);
        let ratio = quadratic_form(&dist, &diff) * 16.0 * (cb.dim as f64).sqrt() / (cb.min_dist * tv * tv);
        lowest = lowest.min(ratio);
    }
    assert!(lowest > 0.0);
}

#[test]
fn sgd_loss_decreases() {
    let data = sample(&DistributionSpec::Gaussian { mean: vec![2.0, -1.0], scale: 1.0 }, 500, 11).unwrap();
    let g = GammaOrder::new(1.0, 2).unwrap();
    let start = GeneratorModel::affine(&[vec![0.5, 0.0], vec![0.0, 0.5]], &[0.0, 0.0]).unwrap();
    let opts = SgdOptions {
        steps: 300,
        batch_m: 64,
        learning_rate: 0.2,
        seed: 11,
        ..SgdOptions::default()
    };
    let fit = fit_min_energy_sgd(&data, &start, &g, &opts).unwrap();
    let median = |s: &[f64]| {
        let mut v = s.to_vec();
        v.sort_by(f64::total_cmp);
        v[v.len() / 2]
    };
    let k = fit.trace.len() / 10;
    assert!(median(&fit.trace[fit.trace.len() - k..]) < median(&fit.trace[..k]));
}

#[test]
fn permutation_p_values_are_super_uniform() {
    let spec = DistributionSpec::Gaussian { mean: vec![0.0], scale: 1.0 };
    let mut ps: Vec<f64> = (0..500u64)
        .map(|t| {
            let x = sample(&spec, 25, child_seed(12, 2 * t)).unwrap();
            let y = sample(&spec, 25, child_seed(12, 2 * t + 1)).unwrap();
            permutation_test(&x, &y, &Statistic::Energy { gamma: 1.0 }, 0.05, 99, t)
                .unwrap()
                .p_value
                .unwrap()
        })
        .collect();
    ps.sort_by(f64::total_cmp);
    for (i, p) in ps.iter().enumerate() {
        // ECDF just below p counts i values
        assert!(i as f64 / 500.0 <= p + 0.03, "ECDF {} at {p}", i as f64 / 500.0);
    }
}

#[test]
fn permutation_machinery_is_statistic_agnostic() {
    let mut rng = substream(13, 0);
    let x = gaussian_cloud(&mut rng, 2, 30);
    let y = gaussian_cloud(&mut rng, 2, 30);
    let g = GammaOrder::new(1.0, 2).unwrap();
    let a = permutation_test(&x, &y, &Statistic::Energy { gamma: 1.0 }, 0.05, 199, 5).unwrap();
    let b = permutation_test_with(&x, &y, "vstat", "vstat", |u, v| energy_sq_vstat(u, v, &g), 0.05, 199, 5).unwrap();
    assert_eq!(a.p_value, b.p_value);
}

#[test]
fn power_is_monotone_in_n() {
    let p = DistributionSpec::Gaussian { mean: vec![0.0], scale: 1.0 };
    let q = DistributionSpec::Gaussian { mean: vec![0.3], scale: 1.0 };
    let opts = PowerOptions {
        n_list: vec![20, 40, 80, 160],
        trials: 100,
        level: 0.05,
        calibration: Calibration::NullSimulation,
        seed: 14,
    };
    let stats = [Statistic::Energy { gamma: 1.0 }, Statistic::Dhbar];
    let recs = power_curve((&p, &q), &stats, &opts).unwrap();
    for s in &stats {
        let powers: Vec<f64> = recs.iter().filter(|r| r.statistic == s.name()).map(|r| r.power).collect();
        let inversions = powers.windows(2).filter(|w| w[1] < w[0]).count();
        assert!(inversions <= 1, "{}: {powers:?}", s.name());
    }
}
