//! Per-category intuitionistic fuzzy profiles `(mu, nu, u)` of an item.
//!
//! Three evaluation systems are provided:
//!
//! * CUB-Fuzzy: a linear spline in the empirical distribution function scaled by
//!   the fitted feeling weight, with constant hesitancy `1 - pi1` on the
//!   non-crisp categories;
//! * spline: a data-free spline in the category index with hesitancy
//!   `mu^theta (1 - mu)^eta`;
//! * empirical: a classical (membership-only) fuzzy set built from increments of
//!   the empirical distribution function.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rating::{Edf, RatingScale};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FuzzySystem {
    CubFuzzy,
    Spline,
    Empirical,
}

impl FuzzySystem {
    pub fn name(&self) -> &'static str {
        match self {
            FuzzySystem::CubFuzzy => "cub_fuzzy",
            FuzzySystem::Spline => "spline",
            FuzzySystem::Empirical => "empirical",
        }
    }
}

impl std::str::FromStr for FuzzySystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cub_fuzzy" | "cub-fuzzy" | "cub" => Ok(FuzzySystem::CubFuzzy),
            "spline" => Ok(FuzzySystem::Spline),
            "empirical" => Ok(FuzzySystem::Empirical),
            other => Err(Error::Config(format!("unknown fuzzy system {other:?}"))),
        }
    }
}

/// Membership, non-membership and hesitancy of one element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IfsTriple {
    pub mu: f64,
    pub nu: f64,
    pub u: f64,
}

impl IfsTriple {
    /// Triple with hesitancy `1 - mu - nu`.
    pub fn from_pair(mu: f64, nu: f64) -> Self {
        Self {
            mu,
            nu,
            u: 1.0 - mu - nu,
        }
    }

    /// `mu - nu`
    pub fn score(&self) -> f64 {
        self.mu - self.nu
    }

    /// `mu + nu`
    pub fn accuracy(&self) -> f64 {
        self.mu + self.nu
    }
}

pub fn fuzzy_score(t: &IfsTriple) -> f64 {
    t.score()
}

pub fn fuzzy_accuracy(t: &IfsTriple) -> f64 {
    t.accuracy()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplineConfig {
    pub epsilon: f64,
    pub theta: f64,
    pub eta: f64,
    /// First non-crisp category (membership is 0 below it).
    pub a: usize,
    /// Last non-crisp category (membership is 1 above it).
    pub b: usize,
}

impl SplineConfig {
    /// Linear spline with `theta = eta = 1`, `a = 1` and `b = m - 1`.
    pub fn for_scale(scale: &RatingScale) -> Self {
        Self {
            epsilon: 1.0,
            theta: 1.0,
            eta: 1.0,
            a: 1,
            b: scale.m() - 1,
        }
    }

    // negated comparisons so that NaN fails too
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self, scale: &RatingScale) -> Result<()> {
        let ip = scale.indifference();
        if !(self.epsilon > 0.0) || !(self.theta >= 1.0) || !(self.eta >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "spline needs epsilon > 0 and theta, eta >= 1; got {:?}",
                self
            )));
        }
        if !(1 <= self.a && self.a < ip && ip < self.b && self.b <= scale.m()) {
            return Err(Error::InvalidParameter(format!(
                "spline needs 1 <= a < i_p < b <= m; got a={}, i_p={ip}, b={}, m={}",
                self.a,
                self.b,
                scale.m()
            )));
        }
        Ok(())
    }
}

/// Fuzzy evaluation of every category of one item.
///
/// `nu` and `u` are absent for the empirical system.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FuzzyProfile {
    pub system: FuzzySystem,
    pub scale: RatingScale,
    mu: Vec<f64>,
    nu: Option<Vec<f64>>,
    u: Option<Vec<f64>>,
    /// Feeling weight used by the CUB-Fuzzy system.
    pub pi1: Option<f64>,
    /// The empirical system had no mass above the lower crisp bound.
    pub degenerate: bool,
}

impl FuzzyProfile {
    pub fn m(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self, r: usize) -> f64 {
        self.mu[r - 1]
    }

    pub fn nu(&self, r: usize) -> Option<f64> {
        self.nu.as_ref().map(|v| v[r - 1])
    }

    pub fn u(&self, r: usize) -> Option<f64> {
        self.u.as_ref().map(|v| v[r - 1])
    }

    pub fn membership(&self) -> &[f64] {
        &self.mu
    }

    pub fn non_membership(&self) -> Option<&[f64]> {
        self.nu.as_deref()
    }

    pub fn hesitancy(&self) -> Option<&[f64]> {
        self.u.as_deref()
    }

    pub fn is_intuitionistic(&self) -> bool {
        self.nu.is_some()
    }

    pub fn triple(&self, r: usize) -> Option<IfsTriple> {
        Some(IfsTriple {
            mu: self.mu(r),
            nu: self.nu(r)?,
            u: self.u(r)?,
        })
    }

    pub fn triples(&self) -> Option<Vec<IfsTriple>> {
        (1..=self.m()).map(|r| self.triple(r)).collect()
    }
}

/// CUB-Fuzzy profile from the item's EDF and the fitted feeling weight `pi1`.
///
/// Assumes positive orientation; reverse the sample beforehand otherwise.
/// A side of the scale with no mass between the crisp bound and the
/// indifference point gets a flat membership of `pi1 / 2`.
pub fn cub_fuzzy_profile(edf: &Edf, pi1: f64, scale: &RatingScale) -> Result<FuzzyProfile> {
    if !(0.0..=1.0).contains(&pi1) {
        return Err(Error::InvalidParameter(format!("pi1 = {pi1} is outside [0, 1]")));
    }
    let m = scale.m();
    if edf.m() != m {
        return Err(Error::LengthMismatch {
            expected: m,
            found: edf.m(),
        });
    }
    let (lb, ip, ub) = (scale.lower_bound(), scale.indifference(), scale.upper_bound());
    let f = |r: usize| edf.at(r);
    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
    let half = pi1 / 2.0;

    let mut mu = Vec::with_capacity(m);
    let mut nu = Vec::with_capacity(m);
    let mut u = Vec::with_capacity(m);
    for r in 1..=m {
        if r <= lb {
            mu.push(0.0);
            nu.push(1.0);
            u.push(0.0);
        } else if r >= ub {
            mu.push(1.0);
            nu.push(0.0);
            u.push(0.0);
        } else {
            let shift = if r <= ip {
                -half * ratio(f(ip) - f(r), f(ip) - f(lb))
            } else {
                half * ratio(f(r) - f(ip), f(ub - 1) - f(ip))
            };
            let m_r = half + shift;
            mu.push(m_r);
            // 1 - mu - (1 - pi1)
            nu.push((pi1 - m_r).max(0.0));
            u.push(1.0 - pi1);
        }
    }
    Ok(FuzzyProfile {
        system: FuzzySystem::CubFuzzy,
        scale: *scale,
        mu,
        nu: Some(nu),
        u: Some(u),
        pi1: Some(pi1),
        degenerate: false,
    })
}

/// Spline membership in the category index. Raw values are clamped into `[0, 1]`
/// before the hesitancy is computed.
pub fn spline_profile(scale: &RatingScale, cfg: &SplineConfig) -> Result<FuzzyProfile> {
    cfg.validate(scale)?;
    let ip = scale.indifference() as f64;
    let width = (cfg.b - cfg.a) as f64;
    let mut mu = Vec::with_capacity(scale.m());
    let mut nu = Vec::with_capacity(scale.m());
    let mut u = Vec::with_capacity(scale.m());
    for r in 1..=scale.m() {
        let x = r as f64;
        let raw = if r < cfg.a {
            0.0
        } else if r > cfg.b {
            1.0
        } else if x <= ip {
            0.5 - 0.5 * (2.0 * (ip - x) / width).powf(cfg.epsilon)
        } else {
            0.5 + 0.5 * (2.0 * (x - ip) / width).powf(cfg.epsilon)
        };
        let m_r = raw.clamp(0.0, 1.0);
        let u_r = m_r.powf(cfg.theta) * (1.0 - m_r).powf(cfg.eta);
        mu.push(m_r);
        u.push(u_r);
        nu.push((1.0 - m_r - u_r).max(0.0));
    }
    Ok(FuzzyProfile {
        system: FuzzySystem::Spline,
        scale: *scale,
        mu,
        nu: Some(nu),
        u: Some(u),
        pi1: None,
        degenerate: false,
    })
}

/// Membership-only profile accumulating EDF increments between the crisp bounds.
///
/// When every rating lies at or below the lower bound the increments are
/// undefined; the profile is then 0 below the upper bound and flagged degenerate.
pub fn empirical_profile(edf: &Edf, scale: &RatingScale) -> Result<FuzzyProfile> {
    let m = scale.m();
    if edf.m() != m {
        return Err(Error::LengthMismatch {
            expected: m,
            found: edf.m(),
        });
    }
    let (lb, ub) = (scale.lower_bound(), scale.upper_bound());
    let remaining = 1.0 - edf.at(lb);
    let degenerate = remaining <= 0.0;
    let mut mu = Vec::with_capacity(m);
    let mut running = 0.0;
    for r in 1..=m {
        if r <= lb {
            mu.push(0.0);
        } else if r >= ub {
            mu.push(1.0);
        } else {
            if !degenerate {
                running += (edf.at(r) - edf.at(r - 1)) / remaining;
            }
            mu.push(running.min(1.0));
        }
    }
    Ok(FuzzyProfile {
        system: FuzzySystem::Empirical,
        scale: *scale,
        mu,
        nu: None,
        u: None,
        pi1: None,
        degenerate,
    })
}
