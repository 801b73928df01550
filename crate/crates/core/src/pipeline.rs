//! Fit -> fuzzify -> aggregate over a questionnaire table.
//!
//! Each stage collects per-item outcomes instead of stopping at the first
//! failure; [`Outcome::failed`] lets callers derive an exit status.

use serde::Serialize;

use crate::aggregate::{
    composite, composite_membership, log_inverse_weights, CompositeResult, MembershipComposite, WeightScheme,
    WeightVector,
};
use crate::config::{AnalysisConfig, ShelterMode};
use crate::cub::{fit_cub, fit_cub_shelter, lr_test, CubFit, LrTest};
use crate::error::{Error, Result};
use crate::fuzzy::{cub_fuzzy_profile, empirical_profile, spline_profile, FuzzyProfile, FuzzySystem};
use crate::rating::{Orientation, RatingSample, RatingScale};
use crate::table::RatingsTable;

/// Result of one computation, kept alongside its siblings.
#[derive(Debug, Clone, Serialize)]
pub struct Outcome<T> {
    pub item: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<T>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl<T> Outcome<T> {
    fn from_result(item: &str, r: Result<T>) -> Self {
        match r {
            Ok(v) => Self {
                item: item.to_owned(),
                value: Some(v),
                error: None,
            },
            Err(e) => Self {
                item: item.to_owned(),
                value: None,
                error: Some(e.to_string()),
            },
        }
    }

    pub fn failed(&self) -> bool {
        self.error.is_some()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ItemFit {
    pub n: usize,
    pub baseline: CubFit,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shelter: Option<CubFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lrt: Option<LrTest>,
    /// p-value behind the retention decision: the LRT p-value, times `m`
    /// (capped at 1) when the shelter category was picked automatically.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub retention_p_value: Option<f64>,
    pub shelter_retained: bool,
    /// Feeling weight feeding the CUB-Fuzzy system.
    pub pi1: f64,
}

impl ItemFit {
    /// The shelter fit when retained, else the baseline fit.
    pub fn selected(&self) -> &CubFit {
        match (&self.shelter, self.shelter_retained) {
            (Some(s), true) => s,
            _ => &self.baseline,
        }
    }
}

/// Fits the baseline model and, when configured, the shelter model plus the LRT
/// deciding whether it is kept at level `alpha`.
pub fn fit_item(sample: &RatingSample, config: &AnalysisConfig) -> Result<ItemFit> {
    let opts = config.fit_options();
    let baseline = fit_cub(sample, &opts)?;
    let (shelter, lrt) = match config.shelter.choice() {
        None => (None, None),
        Some(choice) => {
            let s = fit_cub_shelter(sample, choice, &opts)?;
            let t = lr_test(&baseline, &s)?;
            (Some(s), Some(t))
        }
    };
    // Picking the best of m categories inflates the size of a chi2(1) test.
    let retention_p_value = lrt.map(|t| match config.shelter {
        ShelterMode::Auto => (t.p_value * sample.m() as f64).min(1.0),
        _ => t.p_value,
    });
    let shelter_retained = retention_p_value.is_some_and(|p| p < config.alpha);
    let pi1 = match (&shelter, shelter_retained) {
        (Some(s), true) => s.model.feeling_weight(),
        _ => baseline.model.feeling_weight(),
    };
    Ok(ItemFit {
        n: sample.n(),
        baseline,
        shelter,
        lrt,
        retention_p_value,
        shelter_retained,
        pi1,
    })
}

/// Table with negatively oriented ratings reflected.
pub fn oriented_table(table: &RatingsTable, scale: &RatingScale) -> RatingsTable {
    match scale.orientation() {
        Orientation::Positive => table.clone(),
        Orientation::Negative => table.reversed(),
    }
}

pub fn run_fit(table: &RatingsTable, config: &AnalysisConfig) -> Result<Vec<Outcome<ItemFit>>> {
    let scale = config.validate()?;
    let table = oriented_table(table, &scale);
    Ok(table
        .item_names()
        .iter()
        .enumerate()
        .map(|(k, name)| Outcome::from_result(name, table.item_sample(k).and_then(|s| fit_item(&s, config))))
        .collect())
}

/// Profiles of every item under one system.
#[derive(Debug, Clone, Serialize)]
pub struct SystemProfiles {
    pub system: FuzzySystem,
    pub items: Vec<Outcome<FuzzyProfile>>,
}

impl SystemProfiles {
    pub fn complete(&self) -> Option<Vec<FuzzyProfile>> {
        self.items.iter().map(|o| o.value.clone()).collect()
    }
}

/// Builds the profile of every item under every configured system. CUB-Fuzzy
/// profiles use the feeling weights of `fits` (same order as the table items).
pub fn run_fuzzy(
    table: &RatingsTable,
    config: &AnalysisConfig,
    fits: &[Outcome<ItemFit>],
) -> Result<Vec<SystemProfiles>> {
    let scale = config.validate()?;
    let table = oriented_table(table, &scale);
    let spline_cfg = config.spline.build(&scale);
    let mut out = Vec::new();
    for &system in &config.systems {
        let items = table
            .item_names()
            .iter()
            .enumerate()
            .map(|(k, name)| {
                let profile = match system {
                    FuzzySystem::Spline => spline_profile(&scale, &spline_cfg),
                    FuzzySystem::Empirical => table.item_sample(k).and_then(|s| empirical_profile(&s.edf(), &scale)),
                    FuzzySystem::CubFuzzy => {
                        let fit = fits.get(k).ok_or(Error::LengthMismatch {
                            expected: table.n_items(),
                            found: fits.len(),
                        });
                        fit.and_then(|f| match (&f.value, &f.error) {
                            (Some(fit), _) => table
                                .item_sample(k)
                                .and_then(|s| cub_fuzzy_profile(&s.edf(), fit.pi1, &scale)),
                            (None, e) => Err(Error::DegenerateSample(format!(
                                "no CUB fit: {}",
                                e.as_deref().unwrap_or("unknown")
                            ))),
                        })
                    }
                };
                Outcome::from_result(name, profile)
            })
            .collect();
        out.push(SystemProfiles { system, items });
    }
    Ok(out)
}

/// Weights for `profiles` under `scheme`, with proportions taken over `rows`.
pub fn weights_for(scheme: &WeightScheme, profiles: &[FuzzyProfile], rows: &[Vec<usize>]) -> Result<WeightVector> {
    let k = profiles.len();
    if rows.is_empty() {
        return Err(Error::EmptyRows);
    }
    let n = rows.len() as f64;
    let proportion = |f: &dyn Fn(&FuzzyProfile, usize) -> Option<f64>| -> Result<Vec<f64>> {
        (0..k)
            .map(|j| {
                let p = &profiles[j];
                rows.iter()
                    .map(|row| f(p, row[j]).ok_or(Error::MissingHesitancy(p.system.name())))
                    .sum::<Result<f64>>()
                    .map(|s| s / n)
            })
            .collect()
    };
    match scheme {
        WeightScheme::Uniform => WeightVector::uniform(k),
        WeightScheme::Custom(w) => {
            if w.len() != k {
                return Err(Error::LengthMismatch {
                    expected: k,
                    found: w.len(),
                });
            }
            WeightVector::new(w.clone())
        }
        WeightScheme::Membership => log_inverse_weights(&proportion(&|p, r| Some(p.mu(r)))?),
        WeightScheme::Uncertainty => log_inverse_weights(&proportion(&|p, r| p.u(r))?),
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Aggregate {
    Intuitionistic(CompositeResult),
    Membership(MembershipComposite),
}

impl Aggregate {
    pub fn weights(&self) -> &WeightVector {
        match self {
            Aggregate::Intuitionistic(c) => &c.weights,
            Aggregate::Membership(c) => &c.weights,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SystemAggregate {
    pub system: FuzzySystem,
    pub scheme: String,
    pub n_complete: usize,
    pub item_names: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Aggregate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn scheme_name(s: &WeightScheme) -> String {
    match s {
        WeightScheme::Uncertainty => "uncertainty".into(),
        WeightScheme::Membership => "membership".into(),
        WeightScheme::Uniform => "uniform".into(),
        WeightScheme::Custom(_) => "custom".into(),
    }
}

pub fn aggregate_system(table: &RatingsTable, config: &AnalysisConfig, profiles: &SystemProfiles) -> SystemAggregate {
    let mut report = SystemAggregate {
        system: profiles.system,
        scheme: String::new(),
        n_complete: 0,
        item_names: table.item_names().to_vec(),
        result: None,
        error: None,
    };
    let run = |report: &mut SystemAggregate| -> Result<Aggregate> {
        let scale = config.validate()?;
        let rows = oriented_table(table, &scale).complete_rows();
        report.n_complete = rows.len();
        let scheme = config.weights.scheme_for(profiles.system)?;
        report.scheme = scheme_name(&scheme);
        let items = profiles.complete().ok_or_else(|| {
            Error::DegenerateSample(format!("some {} profiles could not be built", profiles.system.name()))
        })?;
        if rows.is_empty() {
            return Err(Error::EmptyRows);
        }
        if profiles.system == FuzzySystem::Empirical && scheme == WeightScheme::Uncertainty {
            return Err(Error::MissingHesitancy(profiles.system.name()));
        }
        let w = weights_for(&scheme, &items, &rows)?;
        if items.iter().all(FuzzyProfile::is_intuitionistic) {
            composite(&rows, &items, &w).map(Aggregate::Intuitionistic)
        } else {
            composite_membership(&rows, &items, &w).map(Aggregate::Membership)
        }
    };
    match run(&mut report) {
        Ok(a) => report.result = Some(a),
        Err(e) => report.error = Some(e.to_string()),
    }
    report
}

pub fn run_aggregate(
    table: &RatingsTable,
    config: &AnalysisConfig,
    profiles: &[SystemProfiles],
) -> Vec<SystemAggregate> {
    profiles.iter().map(|p| aggregate_system(table, config, p)).collect()
}

/// Everything a full run produces.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub config: AnalysisConfig,
    pub scale: RatingScale,
    pub n_rows: usize,
    pub fits: Vec<Outcome<ItemFit>>,
    pub profiles: Vec<SystemProfiles>,
    pub aggregates: Vec<SystemAggregate>,
}

impl RunReport {
    pub fn failures(&self) -> usize {
        self.fits.iter().filter(|o| o.failed()).count()
            + self
                .profiles
                .iter()
                .flat_map(|p| &p.items)
                .filter(|o| o.failed())
                .count()
            + self.aggregates.iter().filter(|a| a.error.is_some()).count()
    }
}

/// Fits only what the configured systems need.
pub fn run_all(table: &RatingsTable, config: &AnalysisConfig) -> Result<RunReport> {
    let scale = config.validate()?;
    let fits = if config.systems.contains(&FuzzySystem::CubFuzzy) {
        run_fit(table, config)?
    } else {
        Vec::new()
    };
    let profiles = run_fuzzy(table, config, &fits)?;
    let aggregates = run_aggregate(table, config, &profiles);
    Ok(RunReport {
        config: config.clone(),
        scale,
        n_rows: table.n_rows(),
        fits,
        profiles,
        aggregates,
    })
}
