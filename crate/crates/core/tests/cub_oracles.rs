mod common;

use common::*;
use cubfuzz_core::config::{AnalysisConfig, ShelterMode};
use cubfuzz_core::pipeline::fit_item;
use cubfuzz_core::*;
use rand::Rng;

fn opts() -> FitOptions {
    FitOptions::default()
}

#[test]
fn loglik_matches_direct_summation() {
    let freq = [1u64, 1, 2, 2, 6, 4, 4];
    let sample = RatingSample::from_frequencies(&freq).unwrap();
    let model = CubModel::Baseline(CubParams::new(0.7, 0.3).unwrap());
    let expected = oracle_loglik(&freq, |r| oracle_cub(0.7, 0.3, 7, r));
    assert!((loglik(&sample, &model).unwrap() - expected).abs() < 1e-12);
}

#[test]
fn uniform_sample_maximized_at_minimal_pi() {
    let freq = [10u64; 7];
    let sample = RatingSample::from_frequencies(&freq).unwrap();
    let fit = fit_cub(&sample, &opts()).unwrap();
    let mut best = (f64::NEG_INFINITY, 0.0);
    for i in 0..=100 {
        for j in 0..=100 {
            let (p, x) = (i as f64 / 100.0, j as f64 / 100.0);
            let l = oracle_loglik(&freq, |r| oracle_cub(p, x, 7, r));
            if l > best.0 {
                best = (l, p);
            }
        }
    }
    assert_eq!(best.1, 0.0);
    assert!(fit.model.feeling_weight() <= 1e-5, "{:?}", fit.model);
    assert!(fit.boundary);
    assert!(fit.loglik >= best.0 - 1e-6);
}

#[test]
fn em_trace_is_monotone_on_random_samples() {
    let mut rng = rng(21);
    for _ in 0..30 {
        let m = [5usize, 7, 9][rng.random_range(0..3)];
        let sample = RatingSample::from_frequencies(&random_freq(m, rng.random_range(20..800), &mut rng)).unwrap();
        if sample.frequencies().iter().filter(|&&c| c > 0).count() < 2 {
            continue;
        }
        let base = fit_cub(&sample, &opts()).unwrap();
        let shelter = fit_cub_shelter(&sample, ShelterChoice::Auto, &opts()).unwrap();
        for fit in [&base, &shelter] {
            for w in fit.trace.windows(2) {
                assert!(w[1] >= w[0] - 1e-10, "{} -> {}", w[0], w[1]);
            }
        }
        assert!(shelter.loglik >= base.loglik - 1e-9);
    }
}

#[test]
fn delta_zero_data_gives_small_delta() {
    let model = CubModel::Baseline(CubParams::new(0.7, 0.3).unwrap());
    let sample = simulate(&model, 7, 3000, 31).unwrap();
    let base = fit_cub(&sample, &opts()).unwrap();
    let fit = fit_cub_shelter(&sample, ShelterChoice::Auto, &opts()).unwrap();
    let CubModel::Shelter(p) = fit.model else { panic!() };
    assert!(p.delta <= 0.03, "{p:?}");
    assert!(
        (p.pi_star - base.model.feeling_weight()).abs() <= 0.03,
        "{p:?} vs {:?}",
        base.model
    );
    assert!((p.xi - base.model.xi()).abs() <= 0.03);
}

#[test]
fn mass_at_shelter_gives_upper_clamp() {
    let sample = RatingSample::from_frequencies(&[0, 0, 0, 50, 0, 0, 0]).unwrap();
    let strict = fit_cub_shelter(&sample, ShelterChoice::Fixed(4), &opts());
    assert!(matches!(strict, Err(Error::DegenerateSample(_))));
    let lenient = FitOptions {
        allow_degenerate: true,
        ..opts()
    };
    let fit = fit_cub_shelter(&sample, ShelterChoice::Fixed(4), &lenient).unwrap();
    let CubModel::Shelter(p) = fit.model else { panic!() };
    assert!(p.delta > 0.999, "{p:?}");
    assert!(fit.boundary);
}

/// At an end category the feeling component can also carry all the mass, so
/// delta is not identified; only the fitted probability is pinned down.
#[test]
fn mass_at_end_category_is_fitted() {
    let sample = RatingSample::from_frequencies(&[0, 0, 0, 0, 0, 0, 50]).unwrap();
    let lenient = FitOptions {
        allow_degenerate: true,
        ..opts()
    };
    let fit = fit_cub_shelter(&sample, ShelterChoice::Fixed(7), &lenient).unwrap();
    assert!(fit.model.pmf(7, 7).unwrap() > 1.0 - 1e-4);
    assert!(fit.loglik > -50.0 * 1e-4);
}

#[test]
fn reversed_sample_reflects_estimates() {
    let mut rng = rng(41);
    for _ in 0..10 {
        let (pi, xi) = (rng.random_range(0.3..0.95), rng.random_range(0.1..0.9));
        let sample = simulate(
            &CubModel::Baseline(CubParams::new(pi, xi).unwrap()),
            7,
            800,
            rng.random(),
        )
        .unwrap();
        let a = fit_cub(&sample, &opts()).unwrap();
        let b = fit_cub(&sample.reversed(), &opts()).unwrap();
        assert!((a.model.xi() - (1.0 - b.model.xi())).abs() < 1e-6);
        assert!((a.model.feeling_weight() - b.model.feeling_weight()).abs() < 1e-6);

        let c = rng.random_range(1..=7);
        let a = fit_cub_shelter(&sample, ShelterChoice::Fixed(c), &opts()).unwrap();
        let b = fit_cub_shelter(&sample.reversed(), ShelterChoice::Fixed(8 - c), &opts()).unwrap();
        let (CubModel::Shelter(p), CubModel::Shelter(q)) = (a.model, b.model) else {
            panic!()
        };
        assert!((p.xi - (1.0 - q.xi)).abs() < 1e-6);
        assert!((p.delta - q.delta).abs() < 1e-6);
        assert!((p.pi_star - q.pi_star).abs() < 1e-6);
    }
}

#[test]
fn std_error_in_bootstrap_range() {
    let model = CubModel::Baseline(CubParams::new(0.8, 0.2).unwrap());
    let sample = simulate(&model, 7, 2000, 51).unwrap();
    let fit = fit_cub(&sample, &opts()).unwrap();
    let se_pi = fit.std_errors.as_ref().unwrap().get("pi").unwrap();
    assert!((0.005..=0.05).contains(&se_pi), "se(pi) = {se_pi}");

    let quick = FitOptions {
        compute_std_errors: false,
        ..opts()
    };
    let mut rng = rng(52);
    let estimates: Vec<f64> = (0..200)
        .map(|_| {
            let ratings: Vec<i64> = (0..sample.n())
                .map(|_| sample.ratings()[rng.random_range(0..sample.n())] as i64)
                .collect();
            let s = RatingSample::new(&ratings, 7).unwrap();
            fit_cub(&s, &quick).unwrap().model.feeling_weight()
        })
        .collect();
    let mean = estimates.iter().sum::<f64>() / 200.0;
    let sd = (estimates.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / 199.0).sqrt();
    assert!((0.005..=0.05).contains(&sd), "bootstrap sd {sd}");
    assert!((se_pi / sd - 1.0).abs() < 0.3, "analytic {se_pi} vs bootstrap {sd}");
}

#[test]
fn std_errors_halve_when_counts_quadruple() {
    let freq = [5u64, 8, 12, 20, 40, 60, 55];
    let big: Vec<u64> = freq.iter().map(|c| 4 * c).collect();
    let a = fit_cub(&RatingSample::from_frequencies(&freq).unwrap(), &opts()).unwrap();
    let b = fit_cub(&RatingSample::from_frequencies(&big).unwrap(), &opts()).unwrap();
    let (sa, sb) = (a.std_errors.unwrap(), b.std_errors.unwrap());
    for (x, y) in sa.values.iter().zip(&sb.values) {
        assert!((y / x - 0.5).abs() <= 0.025, "{x} -> {y}");
    }
}

#[test]
fn boundary_fit_has_no_std_errors() {
    let sample = RatingSample::from_frequencies(&[10u64; 7]).unwrap();
    let fit = fit_cub(&sample, &opts()).unwrap();
    assert!(fit.boundary);
    assert!(fit.std_errors.is_none());
    assert!(matches!(
        std_errors(&fit, &sample),
        Err(Error::IllConditionedInformation)
    ));
}

#[test]
fn simulated_frequencies_converge() {
    let params = CubParams::new(0.6, 0.35).unwrap();
    let sample = simulate(&CubModel::Baseline(params), 7, 100_000, 61).unwrap();
    let n = sample.n() as f64;
    for r in 1..=7 {
        let f = sample.count(r) as f64 / n;
        assert!((f - oracle_cub(0.6, 0.35, 7, r)).abs() <= 0.02);
    }
    let s = ShelterParams::new(0.7, 0.3, 0.15, 2).unwrap();
    let sample = simulate(&CubModel::Shelter(s), 9, 100_000, 62).unwrap();
    for r in 1..=9 {
        let f = sample.count(r) as f64 / n;
        assert!((f - oracle_shelter(0.7, 0.3, 0.15, 2, 9, r)).abs() <= 0.02);
    }
}

#[test]
fn simulate_edge_and_determinism() {
    let all_top = simulate(&CubModel::Baseline(CubParams::new(1.0, 0.0).unwrap()), 7, 200, 1).unwrap();
    assert_eq!(all_top.count(7), 200);
    let model = CubModel::Baseline(CubParams::new(0.5, 0.5).unwrap());
    assert_eq!(
        simulate(&model, 7, 300, 9).unwrap(),
        simulate(&model, 7, 300, 9).unwrap()
    );
    assert_ne!(
        simulate(&model, 7, 300, 9).unwrap(),
        simulate(&model, 7, 300, 10).unwrap()
    );
}

/// Size of the shelter test when the truth has no shelter.
#[test]
fn shelter_rejected_on_delta_zero_data() {
    let config = AnalysisConfig {
        shelter: ShelterMode::Auto,
        ..AnalysisConfig::default()
    };
    let model = CubModel::Baseline(CubParams::new(0.75, 0.3).unwrap());
    let rejected = (0..50)
        .filter(|rep| {
            let sample = simulate(&model, 7, 1000, 7000 + rep).unwrap();
            !fit_item(&sample, &config).unwrap().shelter_retained
        })
        .count();
    println!("shelter rejected in {rejected}/50 replications");
    assert!(rejected >= 45, "shelter rejected in only {rejected}/50 replications");
}
