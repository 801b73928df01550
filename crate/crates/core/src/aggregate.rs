//! Defuzzification: item weights, per-respondent IWAM pairs, composite
//! indicators and distances between collections of IFS triples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::{FuzzyProfile, IfsTriple};
use crate::rating::{Edf, RatingSample, RatingScale};

/// Proportions below this are raised to it before taking logarithms.
pub const PROPORTION_FLOOR: f64 = 1e-9;

const WEIGHT_SUM_TOL: f64 = 1e-9;

/// Non-negative item weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    /// Accepts weights that already sum to one (within 1e-9) and renormalizes them exactly.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidWeights("no weights".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidWeights("weights must be finite and non-negative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidWeights(format!("weights sum to {total}, not 1")));
        }
        Ok(Self::normalized_unchecked(weights, total))
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidWeights("no weights".into()));
        }
        Ok(Self(vec![1.0 / k as f64; k]))
    }

    fn normalized_unchecked(weights: Vec<f64>, total: f64) -> Self {
        Self(weights.into_iter().map(|w| w / total).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightScheme {
    /// Log-inverse of the fuzzy proportion of uncertainty.
    Uncertainty,
    /// Log-inverse of the fuzzy proportion of membership.
    Membership,
    Uniform,
    Custom(Vec<f64>),
}

/// `(1/n) sum_j mu(r_j)`
pub fn fuzzy_prop_membership(profile: &FuzzyProfile, sample: &RatingSample) -> Result<f64> {
    weighted_mean(profile.membership(), sample)
}

/// `(1/n) sum_j u(r_j)`; the empirical system has no hesitancy and is rejected.
pub fn fuzzy_prop_uncertainty(profile: &FuzzyProfile, sample: &RatingSample) -> Result<f64> {
    let u = profile
        .hesitancy()
        .ok_or(Error::MissingHesitancy(profile.system.name()))?;
    weighted_mean(u, sample)
}

fn weighted_mean(values: &[f64], sample: &RatingSample) -> Result<f64> {
    if values.len() != sample.m() {
        return Err(Error::LengthMismatch {
            expected: values.len(),
            found: sample.m(),
        });
    }
    let total: f64 = values
        .iter()
        .zip(sample.frequencies())
        .map(|(v, &c)| v * c as f64)
        .sum();
    Ok(total / sample.n() as f64)
}

/// Closed form of the CUB-Fuzzy uncertainty proportion: `(1 - pi1) (F(u_b - 1) - F(l_b))`.
pub fn uncertainty_proportion_closed_form(pi1: f64, edf: &Edf, scale: &RatingScale) -> f64 {
    (1.0 - pi1) * (edf.at(scale.upper_bound() - 1) - edf.at(scale.lower_bound()))
}

/// `w_k = ln(1/g_k) / sum_l ln(1/g_l)`, so items with smaller proportions weigh more.
pub fn log_inverse_weights(g: &[f64]) -> Result<WeightVector> {
    if g.is_empty() {
        return Err(Error::InvalidWeights("no proportions".into()));
    }
    if let Some(bad) = g.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::InvalidWeights(format!("proportion {bad} is outside [0, 1]")));
    }
    let logs: Vec<f64> = g.iter().map(|&v| -v.max(PROPORTION_FLOOR).ln()).collect();
    let total: f64 = logs.iter().sum();
    if total <= 0.0 {
        return Err(Error::WeightsUndefined);
    }
    Ok(WeightVector::normalized_unchecked(logs, total))
}

/// IWAM pair of one respondent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RespondentAggregate {
    pub mu: f64,
    pub nu: f64,
}

impl RespondentAggregate {
    pub fn triple(&self) -> IfsTriple {
        IfsTriple::from_pair(self.mu, self.nu)
    }
}

fn check_shapes(k: usize, profiles: &[FuzzyProfile], w: &WeightVector) -> Result<()> {
    if profiles.len() != k {
        return Err(Error::LengthMismatch {
            expected: profiles.len(),
            found: k,
        });
    }
    if w.len() != k {
        return Err(Error::LengthMismatch {
            expected: k,
            found: w.len(),
        });
    }
    Ok(())
}

fn check_rating(profile: &FuzzyProfile, r: usize) -> Result<()> {
    if r == 0 || r > profile.m() {
        return Err(Error::CategoryOutOfRange {
            category: r,
            m: profile.m(),
        });
    }
    Ok(())
}

/// Weighted mean of the item memberships and non-memberships at the respondent's ratings.
pub fn iwam(row: &[usize], profiles: &[FuzzyProfile], w: &WeightVector) -> Result<RespondentAggregate> {
    check_shapes(row.len(), profiles, w)?;
    let (mut mu, mut nu) = (0.0, 0.0);
    for ((&r, p), &wk) in row.iter().zip(profiles).zip(w.as_slice()) {
        check_rating(p, r)?;
        let t = p.triple(r).ok_or(Error::MissingHesitancy(p.system.name()))?;
        mu += wk * t.mu;
        nu += wk * t.nu;
    }
    Ok(RespondentAggregate { mu, nu })
}

/// Membership-only IWAM, usable with every system.
pub fn iwam_membership(row: &[usize], profiles: &[FuzzyProfile], w: &WeightVector) -> Result<f64> {
    check_shapes(row.len(), profiles, w)?;
    let mut mu = 0.0;
    for ((&r, p), &wk) in row.iter().zip(profiles).zip(w.as_slice()) {
        check_rating(p, r)?;
        mu += wk * p.mu(r);
    }
    Ok(mu)
}

/// Item-level means over respondents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Indicators {
    pub mu: f64,
    pub nu: f64,
    pub u: f64,
    pub score: f64,
    pub accuracy: f64,
}

impl Indicators {
    fn from_means(mu: f64, nu: f64) -> Self {
        Self {
            mu,
            nu,
            u: 1.0 - mu - nu,
            score: mu - nu,
            accuracy: mu + nu,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompositeResult {
    pub overall: Indicators,
    /// `sum_k w_k u_bar^(k)`, which coincides with `overall.u`.
    pub weighted_item_uncertainty: f64,
    pub items: Vec<Indicators>,
    pub weights: WeightVector,
    pub per_respondent: Vec<RespondentAggregate>,
}

/// Uniform mean over respondents of their IWAM pairs, plus per-item aggregates.
pub fn composite(rows: &[Vec<usize>], profiles: &[FuzzyProfile], w: &WeightVector) -> Result<CompositeResult> {
    if rows.is_empty() {
        return Err(Error::EmptyRows);
    }
    let k = profiles.len();
    let per_respondent = rows
        .iter()
        .map(|row| iwam(row, profiles, w))
        .collect::<Result<Vec<_>>>()?;
    let n = rows.len() as f64;
    let mu_bar = per_respondent.iter().map(|a| a.mu).sum::<f64>() / n;
    let nu_bar = per_respondent.iter().map(|a| a.nu).sum::<f64>() / n;

    let mut items = Vec::with_capacity(k);
    for (idx, p) in profiles.iter().enumerate() {
        let (mut mu, mut nu) = (0.0, 0.0);
        for row in rows {
            let t = p.triple(row[idx]).ok_or(Error::MissingHesitancy(p.system.name()))?;
            mu += t.mu;
            nu += t.nu;
        }
        items.push(Indicators::from_means(mu / n, nu / n));
    }
    let weighted_item_uncertainty = items.iter().zip(w.as_slice()).map(|(it, wk)| wk * it.u).sum();

    Ok(CompositeResult {
        overall: Indicators::from_means(mu_bar, nu_bar),
        weighted_item_uncertainty,
        items,
        weights: w.clone(),
        per_respondent,
    })
}

/// Composite for membership-only (classical fuzzy set) profiles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipComposite {
    pub mu_bar: f64,
    pub item_mu: Vec<f64>,
    pub weights: WeightVector,
    pub per_respondent: Vec<f64>,
}

pub fn composite_membership(
    rows: &[Vec<usize>],
    profiles: &[FuzzyProfile],
    w: &WeightVector,
) -> Result<MembershipComposite> {
    if rows.is_empty() {
        return Err(Error::EmptyRows);
    }
    let per_respondent = rows
        .iter()
        .map(|row| iwam_membership(row, profiles, w))
        .collect::<Result<Vec<_>>>()?;
    let n = rows.len() as f64;
    let item_mu = (0..profiles.len())
        .map(|k| rows.iter().map(|row| profiles[k].mu(row[k])).sum::<f64>() / n)
        .collect();
    Ok(MembershipComposite {
        mu_bar: per_respondent.iter().sum::<f64>() / n,
        item_mu,
        weights: w.clone(),
        per_respondent,
    })
}

/// `sum_k w_k mu^(k)(r)` for each category `r`.
pub fn category_weighted_membership(profiles: &[FuzzyProfile], w: &WeightVector) -> Result<Vec<f64>> {
    let first = profiles.first().ok_or(Error::EmptyRows)?;
    check_shapes(profiles.len(), profiles, w)?;
    let m = first.m();
    if let Some(p) = profiles.iter().find(|p| p.m() != m) {
        return Err(Error::LengthMismatch {
            expected: m,
            found: p.m(),
        });
    }
    Ok((1..=m)
        .map(|r| profiles.iter().zip(w.as_slice()).map(|(p, wk)| wk * p.mu(r)).sum())
        .collect())
}

/// Normalized Hamming distance `(1/2n) sum_i (|dmu| + |dnu| + |du|)`.
pub fn hamming_distance(b: &[IfsTriple], c: &[IfsTriple]) -> Result<f64> {
    if b.len() != c.len() {
        return Err(Error::LengthMismatch {
            expected: b.len(),
            found: c.len(),
        });
    }
    if b.is_empty() {
        return Err(Error::EmptyRows);
    }
    let total: f64 = b
        .iter()
        .zip(c)
        .map(|(x, y)| (x.mu - y.mu).abs() + (x.nu - y.nu).abs() + (x.u - y.u).abs())
        .sum();
    Ok(total / (2.0 * b.len() as f64))
}
