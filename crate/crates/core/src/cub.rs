//! CUB mixture models: a shifted Binomial "feeling" component mixed with a
//! discrete Uniform "uncertainty" component, optionally inflated at a shelter
//! category.
//!
//! Fitting is by EM on the frequency table. The feeling-component weight is kept
//! above [`PARAM_FLOOR`] and the feeling parameter inside
//! `[PARAM_FLOOR, 1 - PARAM_FLOOR]` so that every responsibility stays finite;
//! the shelter weight may reach zero, where the shelter model nests the baseline.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rating::{RatingSample, MIN_CATEGORIES};

pub const PARAM_FLOOR: f64 = 1e-6;

/// Distance from a clamp at which a fitted parameter is reported as a boundary estimate.
const BOUNDARY_MARGIN: f64 = 1e-5;

/// Central finite-difference step for the observed information.
const FD_STEP: f64 = 1e-4;

fn check_category(m: usize, r: usize) -> Result<()> {
    if r == 0 || r > m {
        return Err(Error::CategoryOutOfRange { category: r, m });
    }
    Ok(())
}

fn check_unit(name: &str, value: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::InvalidParameter(format!("{name} = {value} is outside [0, 1]")));
    }
    Ok(())
}

fn check_scale_len(m: usize) -> Result<()> {
    if m < MIN_CATEGORIES {
        return Err(Error::InvalidScale(format!(
            "m = {m} but at least {MIN_CATEGORIES} categories are required"
        )));
    }
    Ok(())
}

/// Shifted Binomial probabilities `b_1(xi), ..., b_m(xi)`; `0^0 = 1` at the ends.
fn binomial_probs(m: usize, xi: f64) -> Vec<f64> {
    let trials = (m - 1) as i32;
    let mut coef = 1.0f64;
    (0..m)
        .map(|k| {
            // k = r - 1 successes of probability 1 - xi
            let p = coef * xi.powi(trials - k as i32) * (1.0 - xi).powi(k as i32);
            coef = coef * (trials - k as i32) as f64 / (k + 1) as f64;
            p
        })
        .collect()
}

/// `b_r(xi) = C(m-1, r-1) xi^(m-r) (1-xi)^(r-1)`.
pub fn shifted_binomial(m: usize, xi: f64, r: usize) -> Result<f64> {
    check_scale_len(m)?;
    check_unit("xi", xi)?;
    check_category(m, r)?;
    Ok(binomial_probs(m, xi)[r - 1])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CubParams {
    pub pi: f64,
    pub xi: f64,
}

impl CubParams {
    pub fn new(pi: f64, xi: f64) -> Result<Self> {
        check_unit("pi", pi)?;
        check_unit("xi", xi)?;
        Ok(Self { pi, xi })
    }

    pub fn reflected(&self) -> Self {
        Self {
            pi: self.pi,
            xi: 1.0 - self.xi,
        }
    }
}

/// Shelter model in the `(pi*, xi, delta)` parameterization with shelter category `shelter`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShelterParams {
    pub pi_star: f64,
    pub xi: f64,
    pub delta: f64,
    pub shelter: usize,
}

impl ShelterParams {
    pub fn new(pi_star: f64, xi: f64, delta: f64, shelter: usize) -> Result<Self> {
        check_unit("pi_star", pi_star)?;
        check_unit("xi", xi)?;
        check_unit("delta", delta)?;
        if shelter == 0 {
            return Err(Error::InvalidParameter("shelter category must be >= 1".into()));
        }
        Ok(Self {
            pi_star,
            xi,
            delta,
            shelter,
        })
    }

    /// From the mixture weights `pi1` (Binomial) and `pi2` (Uniform); the shelter gets `1 - pi1 - pi2`.
    pub fn from_mixture(pi1: f64, pi2: f64, xi: f64, shelter: usize) -> Result<Self> {
        if pi1 <= 0.0 || pi2 < 0.0 || pi1 + pi2 > 1.0 + 1e-15 {
            return Err(Error::InvalidParameter(format!(
                "need pi1 > 0, pi2 >= 0, pi1 + pi2 <= 1; got {pi1}, {pi2}"
            )));
        }
        let feeling_and_uniform = pi1 + pi2;
        Self::new(
            pi1 / feeling_and_uniform,
            xi,
            (1.0 - feeling_and_uniform).max(0.0),
            shelter,
        )
    }

    pub fn pi1(&self) -> f64 {
        self.pi_star * (1.0 - self.delta)
    }

    pub fn pi2(&self) -> f64 {
        (1.0 - self.pi_star) * (1.0 - self.delta)
    }

    pub fn reflected(&self, m: usize) -> Self {
        Self {
            xi: 1.0 - self.xi,
            shelter: m + 1 - self.shelter,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum CubModel {
    Baseline(CubParams),
    Shelter(ShelterParams),
}

impl From<CubParams> for CubModel {
    fn from(p: CubParams) -> Self {
        CubModel::Baseline(p)
    }
}

impl From<ShelterParams> for CubModel {
    fn from(p: ShelterParams) -> Self {
        CubModel::Shelter(p)
    }
}

impl CubModel {
    pub fn xi(&self) -> f64 {
        match self {
            CubModel::Baseline(p) => p.xi,
            CubModel::Shelter(p) => p.xi,
        }
    }

    /// Weight of the feeling component: `pi` for the baseline model, `pi1` with shelter.
    pub fn feeling_weight(&self) -> f64 {
        match self {
            CubModel::Baseline(p) => p.pi,
            CubModel::Shelter(p) => p.pi1(),
        }
    }

    pub fn n_free_params(&self) -> usize {
        match self {
            CubModel::Baseline(_) => 2,
            CubModel::Shelter(_) => 3,
        }
    }

    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            CubModel::Baseline(_) => &["pi", "xi"],
            CubModel::Shelter(_) => &["pi_star", "xi", "delta"],
        }
    }

    fn param_vector(&self) -> Vec<f64> {
        match self {
            CubModel::Baseline(p) => vec![p.pi, p.xi],
            CubModel::Shelter(p) => vec![p.pi_star, p.xi, p.delta],
        }
    }

    fn with_param_vector(&self, v: &[f64]) -> Self {
        match self {
            CubModel::Baseline(_) => CubModel::Baseline(CubParams { pi: v[0], xi: v[1] }),
            CubModel::Shelter(p) => CubModel::Shelter(ShelterParams {
                pi_star: v[0],
                xi: v[1],
                delta: v[2],
                shelter: p.shelter,
            }),
        }
    }

    pub fn reflected(&self, m: usize) -> Self {
        match self {
            CubModel::Baseline(p) => CubModel::Baseline(p.reflected()),
            CubModel::Shelter(p) => CubModel::Shelter(p.reflected(m)),
        }
    }

    /// All `m` probabilities.
    pub fn probabilities(&self, m: usize) -> Result<Vec<f64>> {
        check_scale_len(m)?;
        match self {
            CubModel::Baseline(p) => {
                check_unit("pi", p.pi)?;
                check_unit("xi", p.xi)?;
                let uniform = (1.0 - p.pi) / m as f64;
                Ok(binomial_probs(m, p.xi)
                    .into_iter()
                    .map(|b| p.pi * b + uniform)
                    .collect())
            }
            CubModel::Shelter(p) => {
                check_unit("pi_star", p.pi_star)?;
                check_unit("xi", p.xi)?;
                check_unit("delta", p.delta)?;
                check_category(m, p.shelter)?;
                let uniform = (1.0 - p.pi_star) / m as f64;
                Ok(binomial_probs(m, p.xi)
                    .into_iter()
                    .enumerate()
                    .map(|(i, b)| {
                        let spike = if i + 1 == p.shelter { p.delta } else { 0.0 };
                        spike + (1.0 - p.delta) * (p.pi_star * b + uniform)
                    })
                    .collect())
            }
        }
    }

    pub fn pmf(&self, m: usize, r: usize) -> Result<f64> {
        check_scale_len(m)?;
        check_category(m, r)?;
        Ok(self.probabilities(m)?[r - 1])
    }
}

/// `pi b_r(xi) + (1 - pi) / m`.
pub fn cub_pmf(params: &CubParams, m: usize, r: usize) -> Result<f64> {
    CubModel::Baseline(*params).pmf(m, r)
}

/// `delta [r = c] + (1 - delta) (pi* b_r(xi) + (1 - pi*) / m)`.
pub fn cub_shelter_pmf(params: &ShelterParams, m: usize, r: usize) -> Result<f64> {
    CubModel::Shelter(*params).pmf(m, r)
}

/// Shelter pmf in the mixture-weight form `pi1 b_r(xi) + pi2 / m + (1 - pi1 - pi2) [r = c]`.
pub fn shelter_mixture_pmf(pi1: f64, pi2: f64, xi: f64, shelter: usize, m: usize, r: usize) -> Result<f64> {
    check_scale_len(m)?;
    check_category(m, r)?;
    check_category(m, shelter)?;
    check_unit("xi", xi)?;
    if pi1 < 0.0 || pi2 < 0.0 || pi1 + pi2 > 1.0 + 1e-15 {
        return Err(Error::InvalidParameter(format!("invalid mixture weights {pi1}, {pi2}")));
    }
    let b = binomial_probs(m, xi)[r - 1];
    let spike = if r == shelter { 1.0 - pi1 - pi2 } else { 0.0 };
    Ok(pi1 * b + pi2 / m as f64 + spike)
}

fn loglik_from_probs(freq: &[u64], probs: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for (i, (&f, &p)) in freq.iter().zip(probs).enumerate() {
        if f == 0 {
            continue;
        }
        if p <= 0.0 {
            return Err(Error::ZeroProbability { category: i + 1 });
        }
        total += f as f64 * p.ln();
    }
    Ok(total)
}

/// Sum of log-probabilities of the observed ratings.
pub fn loglik(sample: &RatingSample, model: &CubModel) -> Result<f64> {
    let probs = model.probabilities(sample.m())?;
    loglik_from_probs(sample.frequencies(), &probs)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub max_iter: usize,
    /// Stop once `|delta loglik| / (1 + |loglik|)` drops below this.
    pub tol: f64,
    /// Accept samples whose ratings are all identical.
    pub allow_degenerate: bool,
    pub compute_std_errors: bool,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iter: 1000,
            tol: 1e-8,
            allow_degenerate: false,
            compute_std_errors: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShelterChoice {
    Fixed(usize),
    /// Fit every category and keep the best BIC, ties going to the smaller category.
    Auto,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StdErrors {
    pub names: Vec<&'static str>,
    pub values: Vec<f64>,
    pub covariance: Vec<Vec<f64>>,
}

impl StdErrors {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|&n| n == name).map(|i| self.values[i])
    }

    /// Delta-method standard errors of `(pi1, pi2)` for a shelter fit.
    pub fn mixture_weights(&self, params: &ShelterParams) -> Option<(f64, f64)> {
        if self.names.len() != 3 {
            return None;
        }
        let (ps, d) = (params.pi_star, params.delta);
        let g1 = [1.0 - d, 0.0, -ps];
        let g2 = [-(1.0 - d), 0.0, -(1.0 - ps)];
        let quad = |g: &[f64; 3]| -> f64 {
            let mut s = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    s += g[i] * self.covariance[i][j] * g[j];
                }
            }
            s.max(0.0).sqrt()
        };
        Some((quad(&g1), quad(&g2)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CubFit {
    pub model: CubModel,
    pub loglik: f64,
    pub n_iter: usize,
    pub converged: bool,
    /// Some parameter sits at (or within 1e-5 of) its clamp.
    pub boundary: bool,
    pub n: usize,
    pub bic: f64,
    pub std_errors: Option<StdErrors>,
    /// Log-likelihood before each M-step and at the returned estimate, for the
    /// EM run that produced the estimate.
    #[serde(skip)]
    pub trace: Vec<f64>,
}

impl CubFit {
    fn from_em(em: EmRun, n: usize) -> Self {
        let k = em.model.n_free_params() as f64;
        Self {
            boundary: is_boundary(&em.model),
            bic: -2.0 * em.loglik + k * (n as f64).ln(),
            model: em.model,
            loglik: em.loglik,
            n_iter: em.n_iter,
            converged: em.converged,
            n,
            std_errors: None,
            trace: em.trace,
        }
    }
}

fn is_boundary(model: &CubModel) -> bool {
    let near = |x: f64, lo: f64, hi: f64| x <= lo + BOUNDARY_MARGIN || x >= hi - BOUNDARY_MARGIN;
    match model {
        CubModel::Baseline(p) => p.pi <= PARAM_FLOOR + BOUNDARY_MARGIN || near(p.xi, PARAM_FLOOR, 1.0 - PARAM_FLOOR),
        CubModel::Shelter(p) => {
            p.pi1() <= PARAM_FLOOR + BOUNDARY_MARGIN
                || near(p.xi, PARAM_FLOOR, 1.0 - PARAM_FLOOR)
                || near(p.delta, 0.0, 1.0 - PARAM_FLOOR)
        }
    }
}

/// Maximizes `sum_i a_i ln(w_i)` over the simplex subject to `w_i >= floors[i]`.
///
/// `shares` must be non-negative and sum to one.
fn project_weights(shares: &[f64], floors: &[f64]) -> Vec<f64> {
    let mut pinned = vec![false; shares.len()];
    loop {
        let fixed: f64 = floors.iter().zip(&pinned).filter(|(_, &p)| p).map(|(f, _)| f).sum();
        let free: f64 = shares.iter().zip(&pinned).filter(|(_, &p)| !p).map(|(a, _)| a).sum();
        let scale = if free > 0.0 { (1.0 - fixed) / free } else { 0.0 };
        let mut changed = false;
        for i in 0..shares.len() {
            if !pinned[i] && shares[i] * scale < floors[i] {
                pinned[i] = true;
                changed = true;
            }
        }
        if !changed {
            return shares
                .iter()
                .zip(floors)
                .zip(&pinned)
                .map(|((&a, &f), &p)| if p { f } else { a * scale })
                .collect();
        }
    }
}

fn clamp_xi(xi: f64) -> f64 {
    xi.clamp(PARAM_FLOOR, 1.0 - PARAM_FLOOR)
}

/// Moment-based starting value for the feeling parameter.
fn initial_xi(sample: &RatingSample) -> f64 {
    let m = sample.m() as f64;
    ((m - sample.mean()) / (m - 1.0)).clamp(0.05, 0.95)
}

struct EmRun {
    model: CubModel,
    loglik: f64,
    n_iter: usize,
    converged: bool,
    trace: Vec<f64>,
}

/// Component weights and feeling parameter during EM; `delta` is zero without shelter.
#[derive(Clone, Copy)]
struct EmState {
    pi1: f64,
    pi2: f64,
    delta: f64,
    xi: f64,
}

fn em(freq: &[u64], shelter: Option<usize>, start: EmState, opts: &FitOptions) -> Result<EmRun> {
    let m = freq.len();
    let n: f64 = freq.iter().sum::<u64>() as f64;
    let mut state = start;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut n_iter = 0;

    let probs_of = |s: &EmState| -> (Vec<f64>, Vec<f64>) {
        let b = binomial_probs(m, s.xi);
        let p = b
            .iter()
            .enumerate()
            .map(|(i, &bi)| {
                let spike = if Some(i + 1) == shelter { s.delta } else { 0.0 };
                s.pi1 * bi + s.pi2 / m as f64 + spike
            })
            .collect();
        (b, p)
    };

    loop {
        let (b, p) = probs_of(&state);
        let ll = loglik_from_probs(freq, &p)?;
        if let Some(&prev) = trace.last() {
            let change: f64 = ll - prev;
            if change.abs() / (1.0 + ll.abs()) < opts.tol {
                trace.push(ll);
                converged = true;
                break;
            }
        }
        trace.push(ll);
        if n_iter >= opts.max_iter {
            break;
        }

        // E-step: expected counts per component.
        let (mut feel, mut unif, mut spike, mut feel_r) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..m {
            let f = freq[i] as f64;
            if f == 0.0 {
                continue;
            }
            let tau = state.pi1 * b[i] / p[i];
            let tau_u = state.pi2 / m as f64 / p[i];
            feel += f * tau;
            feel_r += f * tau * (i + 1) as f64;
            unif += f * tau_u;
            if Some(i + 1) == shelter {
                spike += f * state.delta / p[i];
            }
        }

        // M-step.
        let xi = if feel > 0.0 {
            clamp_xi((m as f64 - feel_r / feel) / (m as f64 - 1.0))
        } else {
            state.xi
        };
        state = match shelter {
            None => {
                let w = project_weights(&[feel / n, 1.0 - feel / n], &[PARAM_FLOOR, 0.0]);
                EmState {
                    pi1: w[0],
                    pi2: w[1],
                    delta: 0.0,
                    xi,
                }
            }
            Some(_) => {
                let total = feel + unif + spike;
                let w = project_weights(&[feel / total, unif / total, spike / total], &[PARAM_FLOOR, 0.0, 0.0]);
                EmState {
                    pi1: w[0],
                    pi2: w[1],
                    delta: w[2],
                    xi,
                }
            }
        };
        n_iter += 1;
    }

    let loglik = *trace.last().expect("at least one evaluation");
    let model = match shelter {
        None => CubModel::Baseline(CubParams {
            pi: state.pi1,
            xi: state.xi,
        }),
        Some(c) => CubModel::Shelter(ShelterParams {
            pi_star: state.pi1 / (state.pi1 + state.pi2),
            xi: state.xi,
            delta: state.delta,
            shelter: c,
        }),
    };
    Ok(EmRun {
        model,
        loglik,
        n_iter,
        converged,
        trace,
    })
}

fn check_fit_input(sample: &RatingSample, opts: &FitOptions) -> Result<()> {
    check_scale_len(sample.m())?;
    if sample.n() < 2 {
        return Err(Error::DegenerateSample("at least two ratings are needed".into()));
    }
    let occupied = sample.frequencies().iter().filter(|&&c| c > 0).count();
    if occupied == 1 && !opts.allow_degenerate {
        return Err(Error::DegenerateSample("all ratings are identical".into()));
    }
    Ok(())
}

fn finish(mut fit: CubFit, sample: &RatingSample, opts: &FitOptions) -> CubFit {
    if opts.compute_std_errors && !fit.boundary {
        fit.std_errors = std_errors(&fit, sample).ok();
    }
    fit
}

/// Baseline CUB fit by EM.
///
/// The likelihood is flat in `pi` at zero, so EM crawls towards that boundary
/// when the data look uniform; an estimate below 0.05 is therefore compared
/// against a restart from the lower clamp and the better of the two kept.
pub fn fit_cub(sample: &RatingSample, opts: &FitOptions) -> Result<CubFit> {
    check_fit_input(sample, opts)?;
    let xi0 = initial_xi(sample);
    let start = EmState {
        pi1: 0.5,
        pi2: 0.5,
        delta: 0.0,
        xi: xi0,
    };
    let mut run = em(sample.frequencies(), None, start, opts)?;
    if run.model.feeling_weight() < 0.05 {
        let floor_start = EmState {
            pi1: PARAM_FLOOR,
            pi2: 1.0 - PARAM_FLOOR,
            delta: 0.0,
            xi: run.model.xi(),
        };
        let restart = em(sample.frequencies(), None, floor_start, opts)?;
        if restart.loglik > run.loglik {
            run = EmRun {
                n_iter: run.n_iter + restart.n_iter,
                ..restart
            };
        }
    }
    Ok(finish(CubFit::from_em(run, sample.n()), sample, opts))
}

/// CUB fit with a shelter category, either fixed or chosen by BIC.
pub fn fit_cub_shelter(sample: &RatingSample, shelter: ShelterChoice, opts: &FitOptions) -> Result<CubFit> {
    check_fit_input(sample, opts)?;
    let m = sample.m();
    let start = EmState {
        pi1: 0.5 * (1.0 - 0.1),
        pi2: 0.5 * (1.0 - 0.1),
        delta: 0.1,
        xi: initial_xi(sample),
    };
    // The baseline fit is the delta = 0 member of every shelter family; keeping it
    // as a fallback makes the shelter log-likelihood never fall below the baseline.
    let base = fit_cub(
        sample,
        &FitOptions {
            compute_std_errors: false,
            ..*opts
        },
    )?;
    let fit_at = |c: usize| -> Result<CubFit> {
        let run = em(sample.frequencies(), Some(c), start, opts)?;
        if run.loglik >= base.loglik {
            return Ok(CubFit::from_em(run, sample.n()));
        }
        let embedded = EmRun {
            model: CubModel::Shelter(ShelterParams {
                pi_star: base.model.feeling_weight(),
                xi: base.model.xi(),
                delta: 0.0,
                shelter: c,
            }),
            loglik: base.loglik,
            n_iter: run.n_iter,
            converged: run.converged,
            trace: run.trace,
        };
        Ok(CubFit::from_em(embedded, sample.n()))
    };
    let best = match shelter {
        ShelterChoice::Fixed(c) => {
            check_category(m, c)?;
            fit_at(c)?
        }
        ShelterChoice::Auto => {
            let mut best: Option<CubFit> = None;
            for c in 1..=m {
                let fit = fit_at(c)?;
                if best.as_ref().is_none_or(|b| fit.bic < b.bic) {
                    best = Some(fit);
                }
            }
            best.expect("m >= 5 candidates")
        }
    };
    Ok(finish(best, sample, opts))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LrTest {
    pub statistic: f64,
    pub p_value: f64,
    pub df: usize,
}

/// Likelihood ratio test of the shelter fit against the nested baseline fit,
/// referred to a chi-square law with one degree of freedom.
pub fn lr_test(base: &CubFit, shelter: &CubFit) -> Result<LrTest> {
    let statistic = 2.0 * (shelter.loglik - base.loglik);
    if statistic < -1e-6 {
        return Err(Error::NegativeLrStatistic(statistic));
    }
    let statistic = statistic.max(0.0);
    Ok(LrTest {
        statistic,
        p_value: chi2_1_survival(statistic),
        df: 1,
    })
}

/// `P(X > x)` for `X ~ chi2(1)`.
pub fn chi2_1_survival(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    statrs::function::erf::erfc((x / 2.0).sqrt())
}

/// Standard errors from the inverse observed information, which is obtained by
/// central finite differences of the log-likelihood.
#[allow(clippy::needless_range_loop)]
pub fn std_errors(fit: &CubFit, sample: &RatingSample) -> Result<StdErrors> {
    let x0 = fit.model.param_vector();
    let too_close = x0.iter().any(|&x| x - 2.0 * FD_STEP < 0.0 || x + 2.0 * FD_STEP > 1.0);
    if fit.boundary || too_close {
        return Err(Error::IllConditionedInformation);
    }
    let k = x0.len();
    let h = FD_STEP;
    let ll = |x: &[f64]| loglik(sample, &fit.model.with_param_vector(x));
    let shifted = |moves: &[(usize, f64)]| -> Result<f64> {
        let mut x = x0.clone();
        for &(i, d) in moves {
            x[i] += d;
        }
        ll(&x)
    };
    let centre = ll(&x0)?;
    let mut info = vec![vec![0.0; k]; k];
    for i in 0..k {
        let second = (shifted(&[(i, h)])? - 2.0 * centre + shifted(&[(i, -h)])?) / (h * h);
        info[i][i] = -second;
        for j in 0..i {
            let mixed = (shifted(&[(i, h), (j, h)])? - shifted(&[(i, h), (j, -h)])? - shifted(&[(i, -h), (j, h)])?
                + shifted(&[(i, -h), (j, -h)])?)
                / (4.0 * h * h);
            info[i][j] = -mixed;
            info[j][i] = -mixed;
        }
    }
    let covariance = invert_spd(&info).ok_or(Error::IllConditionedInformation)?;
    let values = (0..k).map(|i| covariance[i][i].sqrt()).collect();
    Ok(StdErrors {
        names: fit.model.param_names().to_vec(),
        values,
        covariance,
    })
}

/// Inverse of a symmetric positive-definite matrix via Cholesky; `None` if not SPD.
// `!(d > 0.0)` also rejects NaN
#[allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]
fn invert_spd(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let k = a.len();
    let mut l = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..=i {
            let s: f64 = (0..j).map(|p| l[i][p] * l[j][p]).sum();
            if i == j {
                let d = a[i][i] - s;
                if !(d > 0.0) || !d.is_finite() {
                    return None;
                }
                l[i][j] = d.sqrt();
            } else {
                l[i][j] = (a[i][j] - s) / l[j][j];
            }
        }
    }
    // Solve L L^T X = I column by column.
    let mut inv = vec![vec![0.0; k]; k];
    for col in 0..k {
        let mut y = vec![0.0; k];
        for i in 0..k {
            let rhs = if i == col { 1.0 } else { 0.0 };
            let s: f64 = (0..i).map(|p| l[i][p] * y[p]).sum();
            y[i] = (rhs - s) / l[i][i];
        }
        let mut x = vec![0.0; k];
        for i in (0..k).rev() {
            let s: f64 = (i + 1..k).map(|p| l[p][i] * x[p]).sum();
            x[i] = (y[i] - s) / l[i][i];
        }
        for i in 0..k {
            inv[i][col] = x[i];
        }
    }
    Some(inv)
}

/// Draws `n` i.i.d. ratings by inverse-CDF sampling; deterministic for a given seed.
pub fn simulate(model: &CubModel, m: usize, n: usize, seed: u64) -> Result<RatingSample> {
    if n == 0 {
        return Err(Error::EmptySample);
    }
    let probs = model.probabilities(m)?;
    let mut cdf: Vec<f64> = probs
        .iter()
        .scan(0.0, |acc, &p| {
            *acc += p;
            Some(*acc)
        })
        .collect();
    cdf[m - 1] = 1.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ratings = (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            cdf.partition_point(|&c| c <= u).min(m - 1) + 1
        })
        .collect();
    Ok(RatingSample::from_checked(ratings, m))
}
