//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Binomial coefficient through exact integer products.
pub fn choose(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) as u128 / (i + 1) as u128;
    }
    c as f64
}

pub fn oracle_binom(m: usize, xi: f64, r: usize) -> f64 {
    let n = (m - 1) as u64;
    let k = (r - 1) as u64;
    choose(n, k) * xi.powf((n - k) as f64) * (1.0 - xi).powf(k as f64)
}

pub fn oracle_cub(pi: f64, xi: f64, m: usize, r: usize) -> f64 {
    pi * oracle_binom(m, xi, r) + (1.0 - pi) / m as f64
}

pub fn oracle_shelter(pi_star: f64, xi: f64, delta: f64, c: usize, m: usize, r: usize) -> f64 {
    let d = if r == c { 1.0 } else { 0.0 };
    delta * d + (1.0 - delta) * oracle_cub(pi_star, xi, m, r)
}

/// Log-likelihood of a frequency table, summed category by category.
pub fn oracle_loglik(freq: &[u64], pmf: impl Fn(usize) -> f64) -> f64 {
    freq.iter()
        .enumerate()
        .filter(|(_, &f)| f > 0)
        .map(|(i, &f)| f as f64 * pmf(i + 1).ln())
        .sum()
}

/// Raw ratings drawn by inverse CDF from explicit probabilities.
pub fn draw(probs: &[f64], n: usize, rng: &mut impl Rng) -> Vec<i64> {
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            for (i, p) in probs.iter().enumerate() {
                acc += p;
                if u < acc {
                    return i as i64 + 1;
                }
            }
            probs.len() as i64
        })
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random frequency table on `m` categories with total `n`.
pub fn random_freq(m: usize, n: usize, rng: &mut impl Rng) -> Vec<u64> {
    let w: Vec<f64> = (0..m).map(|_| rng.random::<f64>().powi(2)).collect();
    let total: f64 = w.iter().sum();
    let probs: Vec<f64> = w.iter().map(|x| x / total).collect();
    let mut freq = vec![0u64; m];
    for r in draw(&probs, n, rng) {
        freq[r as usize - 1] += 1;
    }
    freq
}
