//! CUB mixture models for ordinal rating data and the intuitionistic fuzzy
//! evaluation of questionnaires built on them.
//!
//! * [`rating`]: scales, samples and empirical distribution functions.
//! * [`cub`]: CUB pmf (with optional shelter effect), EM fitting, standard
//!   errors, BIC, likelihood ratio test, simulation.
//! * [`fuzzy`]: CUB-Fuzzy, spline and empirical per-category profiles.
//! * [`aggregate`]: item weights, IWAM, composite indicators, Hamming distance.
//! * [`table`], [`config`], [`pipeline`], [`report`]: CSV ingestion and the
//!   fit -> fuzzify -> aggregate workflow used by the command line tool.

pub mod aggregate;
pub mod config;
pub mod cub;
pub mod error;
pub mod fuzzy;
pub mod pipeline;
pub mod rating;
pub mod report;
pub mod table;

pub use aggregate::{
    category_weighted_membership, composite, fuzzy_prop_membership, fuzzy_prop_uncertainty, hamming_distance, iwam,
    log_inverse_weights, CompositeResult, RespondentAggregate, WeightScheme, WeightVector,
};
pub use cub::{
    cub_pmf, cub_shelter_pmf, fit_cub, fit_cub_shelter, loglik, lr_test, shifted_binomial, simulate, std_errors,
    CubFit, CubModel, CubParams, FitOptions, ShelterChoice, ShelterParams,
};
pub use error::{Error, Result};
pub use fuzzy::{
    cub_fuzzy_profile, empirical_profile, fuzzy_accuracy, fuzzy_score, spline_profile, FuzzyProfile, FuzzySystem,
    IfsTriple, SplineConfig,
};
pub use rating::{build_sample, reverse_sample, Edf, Orientation, RatingSample, RatingScale};
pub use table::{ingest_csv, RatingsTable};
