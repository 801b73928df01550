use std::io::Cursor;

use cubfuzz_core::config::{AnalysisConfig, ShelterMode, WeightsSpec};
use cubfuzz_core::pipeline::{run_all, Aggregate};
use cubfuzz_core::report::{aggregate_table, fit_table, profile_table, read_ifs_csv, respondent_table};
use cubfuzz_core::*;

fn simulated_table(k: usize, n: usize, seed: u64) -> RatingsTable {
    let samples: Vec<RatingSample> = (0..k)
        .map(|j| {
            let model = CubModel::Baseline(CubParams::new(0.6 + 0.05 * j as f64, 0.2 + 0.1 * j as f64).unwrap());
            simulate(&model, 7, n, seed + j as u64).unwrap()
        })
        .collect();
    let names = (1..=k).map(|j| format!("item{j}")).collect();
    RatingsTable::from_samples(names, &samples).unwrap()
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr
        .records()
        .map(|r| r.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn fit_report_has_one_row_per_item() {
    let table = simulated_table(5, 400, 100);
    let report = run_all(&table, &AnalysisConfig::default()).unwrap();
    assert_eq!(report.failures(), 0);
    let (header, rows) = parse_csv(&fit_table(&report.fits));
    assert_eq!(rows.len(), 5);
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    for row in &rows {
        assert_eq!(row[col("model")], "cub");
        for name in ["pi", "xi", "se_pi", "se_xi", "bic"] {
            let v: f64 = row[col(name)].parse().unwrap();
            assert!(v.is_finite());
        }
        assert_eq!(row[col("pi")].split('.').nth(1).unwrap().len(), 6);
    }
}

#[test]
fn runs_are_deterministic() {
    let table = simulated_table(3, 300, 7);
    let config = AnalysisConfig {
        shelter: ShelterMode::Auto,
        ..AnalysisConfig::default()
    };
    let a = report::to_json(&run_all(&table, &config).unwrap());
    let b = report::to_json(&run_all(&table, &config).unwrap());
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["fits"].as_array().unwrap().len(), 3);
}

#[test]
fn na_rows_are_dropped_listwise_for_aggregation() {
    let csv = "a,b\n5,6\nNA,7\n3,NA\n4,4\n6,2\n";
    let scale = RatingScale::new(7).unwrap();
    let table = RatingsTable::from_reader(Cursor::new(csv), &scale).unwrap();
    assert_eq!(table.item_sample(0).unwrap().n(), 4);
    assert_eq!(table.complete_rows().len(), 3);
    let config = AnalysisConfig {
        systems: vec![FuzzySystem::Spline],
        ..AnalysisConfig::default()
    };
    let report = run_all(&table, &config).unwrap();
    assert_eq!(report.aggregates[0].n_complete, 3);
}

#[test]
fn every_weight_column_sums_to_one() {
    let table = simulated_table(4, 300, 33);
    let report = run_all(&table, &AnalysisConfig::default()).unwrap();
    let (header, rows) = parse_csv(&aggregate_table(&report.aggregates));
    let (sys, item, weight) = (
        header.iter().position(|h| h == "system").unwrap(),
        header.iter().position(|h| h == "item").unwrap(),
        header.iter().position(|h| h == "weight").unwrap(),
    );
    for system in ["cub_fuzzy", "spline", "empirical"] {
        let total: f64 = rows
            .iter()
            .filter(|r| r[sys] == system && r[item] != "composite")
            .map(|r| r[weight].parse::<f64>().unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-5, "{system}: {total}");
    }
}

#[test]
fn identical_items_with_uniform_weights_match_single_item() {
    let one = simulated_table(1, 200, 5);
    let ratings: Vec<Option<usize>> = one.rows().iter().map(|r| r[0]).collect();
    let twin = RatingsTable::new(
        vec!["x".into(), "y".into()],
        ratings.iter().map(|&r| vec![r, r]).collect(),
        7,
    )
    .unwrap();
    let config = AnalysisConfig {
        systems: vec![FuzzySystem::CubFuzzy],
        weights: WeightsSpec::Uniform,
        ..AnalysisConfig::default()
    };
    let a = run_all(&one, &config).unwrap();
    let b = run_all(&twin, &config).unwrap();
    let overall = |r: &pipeline::RunReport| match &r.aggregates[0].result {
        Some(Aggregate::Intuitionistic(c)) => c.overall,
        other => panic!("{other:?}"),
    };
    let (x, y) = (overall(&a), overall(&b));
    assert!((x.mu - y.mu).abs() < 1e-12 && (x.nu - y.nu).abs() < 1e-12);
}

#[test]
fn empirical_with_uncertainty_weights_is_an_error() {
    let table = simulated_table(2, 100, 9);
    let config = AnalysisConfig {
        systems: vec![FuzzySystem::Empirical],
        weights: WeightsSpec::Uncertainty,
        ..AnalysisConfig::default()
    };
    let report = run_all(&table, &config).unwrap();
    assert!(report.aggregates[0].error.as_deref().unwrap().contains("hesitancy"));
    assert_eq!(report.failures(), 1);
}

#[test]
fn failing_item_does_not_stop_others() {
    let rows = (0..20).map(|j| vec![Some(4), Some(1 + j % 7)]).collect();
    let table = RatingsTable::new(vec!["flat".into(), "ok".into()], rows, 7).unwrap();
    let config = AnalysisConfig {
        systems: vec![FuzzySystem::CubFuzzy],
        ..AnalysisConfig::default()
    };
    let report = run_all(&table, &config).unwrap();
    assert!(report.fits[0].failed());
    assert!(!report.fits[1].failed());
    assert!(report.failures() >= 1);
}

#[test]
fn negative_orientation_reverses_ratings() {
    let table = simulated_table(2, 300, 77);
    let mut config = AnalysisConfig {
        systems: vec![FuzzySystem::CubFuzzy],
        ..AnalysisConfig::default()
    };
    let pos = run_all(&table, &config).unwrap();
    config.scale.orientation = Orientation::Negative;
    let neg = run_all(&table, &config).unwrap();
    let xi = |r: &pipeline::RunReport| r.fits[0].value.as_ref().unwrap().baseline.model.xi();
    assert!((xi(&pos) - (1.0 - xi(&neg))).abs() < 1e-6);
}

#[test]
fn emitted_tables_parse_back() {
    let table = simulated_table(3, 250, 11);
    let report = run_all(&table, &AnalysisConfig::default()).unwrap();
    let (header, rows) = parse_csv(&profile_table(&report.profiles));
    assert_eq!(rows.len(), 3 * 3 * 7);
    let mu = header.iter().position(|h| h == "mu").unwrap();
    for (i, row) in rows.iter().enumerate() {
        let v: f64 = row[mu].parse().unwrap();
        let p = &report.profiles[i / 21].items[(i / 7) % 3].value.as_ref().unwrap();
        assert!((v - p.mu(i % 7 + 1)).abs() <= 5e-7);
    }
    let Some(Aggregate::Intuitionistic(c)) = &report.aggregates[0].result else {
        panic!()
    };
    let back = read_ifs_csv(Cursor::new(respondent_table(c))).unwrap();
    assert_eq!(back.len(), c.per_respondent.len());
    for (t, a) in back.iter().zip(&c.per_respondent) {
        assert!((t.mu - a.mu).abs() <= 5e-7 && (t.nu - a.nu).abs() <= 5e-7);
    }
    assert!(hamming_distance(&back, &back).unwrap() == 0.0);
}

#[test]
fn csv_round_trip_preserves_samples() {
    let table = simulated_table(3, 150, 21);
    let mut buf = Vec::new();
    table.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(!text.contains('\r'));
    let back = RatingsTable::from_reader(Cursor::new(text), &RatingScale::new(7).unwrap()).unwrap();
    assert_eq!(back, table);
    for k in 0..3 {
        assert_eq!(back.item_sample(k).unwrap(), table.item_sample(k).unwrap());
    }
}
