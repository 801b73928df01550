//! Ordinal rating scales, samples of ratings and their empirical distribution function.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest scale length accepted (the shelter model needs m > 4).
pub const MIN_CATEGORIES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// Higher categories express a stronger feeling.
    #[default]
    Positive,
    Negative,
}

/// An ordinal scale with categories `1..=m`.
///
/// `indifference` is the category splitting membership from non-membership;
/// categories at or below `lower_bound` are crisp non-members and categories at
/// or above `upper_bound` are crisp members.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatingScale {
    m: usize,
    indifference: usize,
    lower_bound: usize,
    upper_bound: usize,
    orientation: Orientation,
}

impl RatingScale {
    /// Odd-length scale with the indifference point at the middle category and
    /// crisp bounds at the extremes.
    pub fn new(m: usize) -> Result<Self> {
        if m.is_multiple_of(2) {
            return Err(Error::InvalidScale(format!(
                "even scale length {m} needs an explicit indifference point"
            )));
        }
        Self::with_anchors(m, m.div_ceil(2), 1, m)
    }

    pub fn with_anchors(m: usize, indifference: usize, lower_bound: usize, upper_bound: usize) -> Result<Self> {
        let scale = Self {
            m,
            indifference,
            lower_bound,
            upper_bound,
            orientation: Orientation::Positive,
        };
        scale.validate()?;
        Ok(scale)
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.m < MIN_CATEGORIES {
            return Err(Error::InvalidScale(format!(
                "m = {} but at least {MIN_CATEGORIES} categories are required",
                self.m
            )));
        }
        let ok = 1 <= self.lower_bound
            && self.lower_bound < self.indifference
            && self.indifference < self.upper_bound
            && self.upper_bound <= self.m;
        if !ok {
            return Err(Error::InvalidScale(format!(
                "need 1 <= l_b < i_p < u_b <= m, got l_b={}, i_p={}, u_b={}, m={}",
                self.lower_bound, self.indifference, self.upper_bound, self.m
            )));
        }
        Ok(())
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn indifference(&self) -> usize {
        self.indifference
    }

    pub fn lower_bound(&self) -> usize {
        self.lower_bound
    }

    pub fn upper_bound(&self) -> usize {
        self.upper_bound
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Categories strictly between the crisp bounds.
    pub fn non_crisp(&self) -> std::ops::Range<usize> {
        self.lower_bound + 1..self.upper_bound
    }

    pub fn reflect(&self, r: usize) -> usize {
        self.m + 1 - r
    }
}

/// Ratings for one item together with their frequency table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatingSample {
    m: usize,
    ratings: Vec<usize>,
    freq: Vec<u64>,
}

impl RatingSample {
    pub fn new(ratings: &[i64], m: usize) -> Result<Self> {
        if ratings.is_empty() {
            return Err(Error::EmptySample);
        }
        let mut freq = vec![0u64; m];
        let mut checked = Vec::with_capacity(ratings.len());
        for (index, &value) in ratings.iter().enumerate() {
            if value < 1 || value as usize > m {
                return Err(Error::RatingOutOfRange { index, value, m });
            }
            freq[value as usize - 1] += 1;
            checked.push(value as usize);
        }
        Ok(Self {
            m,
            ratings: checked,
            freq,
        })
    }

    /// Sample with the given counts per category, ratings listed in ascending order.
    pub fn from_frequencies(freq: &[u64]) -> Result<Self> {
        let ratings: Vec<usize> = freq
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| std::iter::repeat_n(i + 1, c as usize))
            .collect();
        if ratings.is_empty() {
            return Err(Error::EmptySample);
        }
        Ok(Self {
            m: freq.len(),
            ratings,
            freq: freq.to_vec(),
        })
    }

    pub(crate) fn from_checked(ratings: Vec<usize>, m: usize) -> Self {
        let mut freq = vec![0u64; m];
        for &r in &ratings {
            freq[r - 1] += 1;
        }
        Self { m, ratings, freq }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.ratings.len()
    }

    pub fn ratings(&self) -> &[usize] {
        &self.ratings
    }

    /// Counts indexed by `category - 1`.
    pub fn frequencies(&self) -> &[u64] {
        &self.freq
    }

    pub fn count(&self, category: usize) -> u64 {
        self.freq[category - 1]
    }

    pub fn mean(&self) -> f64 {
        let total: u64 = self.freq.iter().enumerate().map(|(i, &c)| (i as u64 + 1) * c).sum();
        total as f64 / self.n() as f64
    }

    pub fn edf(&self) -> Edf {
        let n = self.n() as f64;
        let mut running = 0u64;
        let values = self
            .freq
            .iter()
            .map(|&c| {
                running += c;
                running as f64 / n
            })
            .collect();
        Edf { values }
    }

    /// Maps every rating `r` to `m - r + 1`.
    pub fn reversed(&self) -> Self {
        let ratings = self.ratings.iter().map(|&r| self.m + 1 - r).collect();
        let mut freq = self.freq.clone();
        freq.reverse();
        Self {
            m: self.m,
            ratings,
            freq,
        }
    }
}

pub fn build_sample(ratings: &[i64], scale: &RatingScale) -> Result<RatingSample> {
    RatingSample::new(ratings, scale.m())
}

pub fn reverse_sample(sample: &RatingSample) -> RatingSample {
    sample.reversed()
}

/// Reverses negatively oriented samples so that higher categories mean a stronger feeling.
pub fn oriented(sample: &RatingSample, scale: &RatingScale) -> RatingSample {
    match scale.orientation() {
        Orientation::Positive => sample.clone(),
        Orientation::Negative => sample.reversed(),
    }
}

/// Empirical distribution function `F(1), ..., F(m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Edf {
    values: Vec<f64>,
}

impl Edf {
    /// Validates a user-supplied table of cumulative relative frequencies.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        let last = values.last().copied().unwrap_or(f64::NAN);
        let monotone = values.windows(2).all(|w| w[0] <= w[1]);
        let bounded = values.iter().all(|v| (0.0..=1.0).contains(v));
        if values.is_empty() || !monotone || !bounded || (last - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(
                "an EDF must be non-decreasing in [0, 1] and end at 1".into(),
            ));
        }
        Ok(Self { values })
    }

    pub fn m(&self) -> usize {
        self.values.len()
    }

    /// `F(r)` with the convention `F(0) = 0`.
    pub fn at(&self, r: usize) -> f64 {
        if r == 0 {
            0.0
        } else {
            self.values[r - 1]
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}
