//! Analysis configuration, loadable from TOML.
//!
//! ```toml
//! systems = ["cub_fuzzy", "spline"]
//! shelter = "auto"        # "none", "auto" or a category number
//! alpha = 0.05
//! weights = "auto"        # "auto", "uncertainty", "membership", "uniform" or a file path
//! seed = 42
//!
//! [scale]
//! m = 7
//!
//! [spline]
//! epsilon = 2.0
//!
//! [em]
//! max_iter = 1000
//! tol = 1e-8
//! ```

use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::aggregate::WeightScheme;
use crate::cub::{FitOptions, ShelterChoice};
use crate::error::{Error, Result};
use crate::fuzzy::{FuzzySystem, SplineConfig};
use crate::rating::{Orientation, RatingScale};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScaleSpec {
    pub m: usize,
    pub ip: Option<usize>,
    pub lb: Option<usize>,
    pub ub: Option<usize>,
    pub orientation: Orientation,
}

impl Default for ScaleSpec {
    fn default() -> Self {
        Self {
            m: 7,
            ip: None,
            lb: None,
            ub: None,
            orientation: Orientation::Positive,
        }
    }
}

impl ScaleSpec {
    pub fn build(&self) -> Result<RatingScale> {
        let ip = match self.ip {
            Some(ip) => ip,
            None if self.m % 2 == 1 => self.m.div_ceil(2),
            None => {
                return Err(Error::InvalidScale(format!(
                    "even scale length {} needs an explicit indifference point",
                    self.m
                )))
            }
        };
        Ok(
            RatingScale::with_anchors(self.m, ip, self.lb.unwrap_or(1), self.ub.unwrap_or(self.m))?
                .with_orientation(self.orientation),
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplineSpec {
    pub epsilon: Option<f64>,
    pub theta: Option<f64>,
    pub eta: Option<f64>,
    pub a: Option<usize>,
    pub b: Option<usize>,
}

impl SplineSpec {
    pub fn build(&self, scale: &RatingScale) -> SplineConfig {
        let d = SplineConfig::for_scale(scale);
        SplineConfig {
            epsilon: self.epsilon.unwrap_or(d.epsilon),
            theta: self.theta.unwrap_or(d.theta),
            eta: self.eta.unwrap_or(d.eta),
            a: self.a.unwrap_or(d.a),
            b: self.b.unwrap_or(d.b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(try_from = "toml::Value", into = "String")]
pub enum ShelterMode {
    #[default]
    None,
    Auto,
    Fixed(usize),
}

impl ShelterMode {
    pub fn choice(&self) -> Option<ShelterChoice> {
        match self {
            ShelterMode::None => None,
            ShelterMode::Auto => Some(ShelterChoice::Auto),
            ShelterMode::Fixed(c) => Some(ShelterChoice::Fixed(*c)),
        }
    }
}

impl FromStr for ShelterMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(ShelterMode::None),
            "auto" => Ok(ShelterMode::Auto),
            other => other
                .parse()
                .map(ShelterMode::Fixed)
                .map_err(|_| Error::Config(format!("shelter must be none, auto or a category, got {other:?}"))),
        }
    }
}

impl TryFrom<toml::Value> for ShelterMode {
    type Error = Error;

    fn try_from(v: toml::Value) -> Result<Self> {
        match v {
            toml::Value::String(s) => s.parse(),
            toml::Value::Integer(c) if c >= 1 => Ok(ShelterMode::Fixed(c as usize)),
            other => Err(Error::Config(format!("invalid shelter setting {other}"))),
        }
    }
}

impl From<ShelterMode> for String {
    fn from(m: ShelterMode) -> String {
        match m {
            ShelterMode::None => "none".into(),
            ShelterMode::Auto => "auto".into(),
            ShelterMode::Fixed(c) => c.to_string(),
        }
    }
}

/// Item weighting; `Auto` pairs each system with its customary scheme.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(from = "String", into = "String")]
pub enum WeightsSpec {
    #[default]
    Auto,
    Uncertainty,
    Membership,
    Uniform,
    Custom(PathBuf),
}

impl From<String> for WeightsSpec {
    fn from(s: String) -> Self {
        match s.as_str() {
            "auto" => WeightsSpec::Auto,
            "uncertainty" => WeightsSpec::Uncertainty,
            "membership" => WeightsSpec::Membership,
            "uniform" => WeightsSpec::Uniform,
            _ => WeightsSpec::Custom(PathBuf::from(s)),
        }
    }
}

impl From<WeightsSpec> for String {
    fn from(w: WeightsSpec) -> String {
        match w {
            WeightsSpec::Auto => "auto".into(),
            WeightsSpec::Uncertainty => "uncertainty".into(),
            WeightsSpec::Membership => "membership".into(),
            WeightsSpec::Uniform => "uniform".into(),
            WeightsSpec::Custom(p) => p.display().to_string(),
        }
    }
}

impl WeightsSpec {
    /// Scheme used for `system`. Custom files are read here.
    pub fn scheme_for(&self, system: FuzzySystem) -> Result<WeightScheme> {
        Ok(match self {
            WeightsSpec::Auto => match system {
                FuzzySystem::CubFuzzy => WeightScheme::Uncertainty,
                FuzzySystem::Spline => WeightScheme::Uniform,
                FuzzySystem::Empirical => WeightScheme::Membership,
            },
            WeightsSpec::Uncertainty => WeightScheme::Uncertainty,
            WeightsSpec::Membership => WeightScheme::Membership,
            WeightsSpec::Uniform => WeightScheme::Uniform,
            WeightsSpec::Custom(path) => WeightScheme::Custom(read_weights_file(path)?),
        })
    }
}

/// Numbers separated by commas or whitespace; a leading non-numeric header line is skipped.
pub fn read_weights_file(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    let mut lines = text.lines().peekable();
    if let Some(first) = lines.peek() {
        let numeric = first
            .split([',', ' ', '\t'])
            .filter(|t| !t.is_empty())
            .all(|t| t.parse::<f64>().is_ok());
        if !numeric {
            lines.next();
        }
    }
    lines
        .flat_map(|l| l.split([',', ' ', '\t']))
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("{}: bad weight {t:?}", path.display())))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmSpec {
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for EmSpec {
    fn default() -> Self {
        let d = FitOptions::default();
        Self {
            max_iter: d.max_iter,
            tol: d.tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub scale: ScaleSpec,
    pub systems: Vec<FuzzySystem>,
    pub spline: SplineSpec,
    pub shelter: ShelterMode,
    pub alpha: f64,
    pub weights: WeightsSpec,
    pub seed: u64,
    pub em: EmSpec,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            scale: ScaleSpec::default(),
            systems: vec![FuzzySystem::CubFuzzy, FuzzySystem::Spline, FuzzySystem::Empirical],
            spline: SplineSpec::default(),
            shelter: ShelterMode::None,
            alpha: 0.05,
            weights: WeightsSpec::Auto,
            seed: 0,
            em: EmSpec::default(),
        }
    }
}

impl AnalysisConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn fit_options(&self) -> FitOptions {
        FitOptions {
            max_iter: self.em.max_iter,
            tol: self.em.tol,
            ..FitOptions::default()
        }
    }

    pub fn validate(&self) -> Result<RatingScale> {
        let scale = self.scale.build()?;
        if !(0.0 < self.alpha && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha = {} must lie in (0, 1)", self.alpha)));
        }
        if self.systems.contains(&FuzzySystem::Spline) {
            self.spline.build(&scale).validate(&scale)?;
        }
        if let ShelterMode::Fixed(c) = self.shelter {
            if c == 0 || c > scale.m() {
                return Err(Error::Config(format!(
                    "shelter category {c} is outside 1..={}",
                    scale.m()
                )));
            }
        }
        Ok(scale)
    }
}
