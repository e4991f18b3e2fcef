//! Asymptotic behaviour of the frequency and Pareto posteriors.

use opbayes::capital::sample_pareto;
use opbayes::{
    freq_two_source_estimate, ExpertPanel, FrequencyCellState, GammaParams, ParetoCellState,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson};

pub const COUNTS: [u64; 15] = [0, 0, 0, 0, 1, 0, 1, 1, 1, 0, 2, 1, 1, 2, 0];
pub const LOSSES: [f64; 15] = [
    1.17, 1.29, 1.00, 1.55, 2.66, 1.02, 1.28, 1.10, 1.06, 1.02, 1.59, 1.35, 1.91, 1.23, 1.03,
];
pub const SEEDS: u64 = 20;
/// Seeds that must land within tolerance for a "with high probability" limit.
pub const MOST_SEEDS: usize = 19;

pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check {
        name,
        passed,
        detail,
    }
}

pub fn freq_prior() -> GammaParams {
    GammaParams::new(3.407, 0.147).unwrap()
}

pub fn pareto_prior() -> GammaParams {
    GammaParams::new(4.0, 9.0 / 8.0).unwrap()
}

fn freq_bayes(prior: GammaParams, counts: &[u64], opinions: Vec<f64>, xi: f64) -> f64 {
    let panel = ExpertPanel::new(opinions, xi).unwrap();
    FrequencyCellState::with_counts(prior, 1.0, counts.to_vec(), panel)
        .unwrap()
        .bayes_estimate()
        .unwrap()
}

fn pareto_bayes(prior: GammaParams, losses: &[f64], opinions: Vec<f64>, xi: f64) -> f64 {
    let panel = ExpertPanel::new(opinions, xi).unwrap();
    ParetoCellState::with_losses(prior, 1.0, losses.to_vec(), panel)
        .unwrap()
        .bayes_estimate()
        .unwrap()
}

fn expert_draws(truth: f64, xi: f64, m: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let g = Gamma::new(xi, truth / xi).unwrap();
    (0..m).map(|_| g.sample(rng)).collect()
}

/// Errors of a randomized limit over `SEEDS` fixed seeds.
fn errors_over_seeds(mut err: impl FnMut(&mut ChaCha8Rng) -> f64) -> Vec<f64> {
    (0..SEEDS)
        .map(|s| err(&mut ChaCha8Rng::seed_from_u64(s)))
        .collect()
}

/// Passes when at least `min_hits` seeds land within `tol`.
fn seeds_check(name: &'static str, errs: &[f64], tol: f64, min_hits: usize, what: &str) -> Check {
    let hits = errs.iter().filter(|&&e| e < tol).count();
    let worst = errs.iter().copied().fold(0.0, f64::max);
    check(
        name,
        hits >= min_hits,
        format!(
            "{what}: {hits}/{} seeds within {tol} (need {min_hits}), worst {worst:.3e}",
            errs.len()
        ),
    )
}

pub fn frequency_limits() -> Vec<Check> {
    let truth = 0.6;
    let mut out = Vec::new();

    let errs = errors_over_seeds(|rng| {
        let pois = Poisson::new(truth).unwrap();
        let counts: Vec<u64> = (0..10_000).map(|_| pois.sample(rng) as u64).collect();
        (freq_bayes(freq_prior(), &counts, vec![0.7], 4.0) - truth).abs()
    });
    out.push(seeds_check(
        "(a) many years: estimate → λ",
        &errs,
        0.05,
        SEEDS as usize,
        "|bayes − 0.6| at K=1e4",
    ));

    let b = freq_bayes(freq_prior(), &COUNTS, vec![0.7], 1e8);
    out.push(check(
        "(b) ξ → ∞: estimate → ϑ̄",
        (b - 0.7).abs() < 1e-3,
        format!("ξ=1e8: bayes={b:.9}, ϑ̄=0.7 (tol 1e-3)"),
    ));

    let errs = errors_over_seeds(|rng| {
        let opinions = expert_draws(truth, 4.0, 10_000, rng);
        (freq_bayes(freq_prior(), &COUNTS, opinions, 4.0) - truth).abs()
    });
    out.push(seeds_check(
        "(c) many experts: estimate → λ",
        &errs,
        0.05,
        MOST_SEEDS,
        "|bayes − 0.6| at M=1e4",
    ));

    let d = freq_bayes(freq_prior(), &COUNTS, vec![0.7], 1e-8);
    let two = freq_two_source_estimate(freq_prior(), 1.0, &COUNTS).unwrap();
    out.push(check(
        "(d) ξ → 0: estimate → two-source",
        (d - two).abs() < 1e-3,
        format!("ξ=1e-8: bayes={d:.9}, two-source={two:.9} (tol 1e-3)"),
    ));

    let c = 1e6;
    let tight = GammaParams::new(3.407 * c, 0.147 / c).unwrap();
    let e = freq_bayes(tight, &COUNTS, vec![0.7], 4.0);
    let mean = 3.407 * 0.147;
    out.push(check(
        "(e) prior Vco → 0: estimate → prior mean",
        (e - mean).abs() < 1e-3,
        format!("c=1e6: bayes={e:.9}, α₀β₀={mean:.9} (tol 1e-3)"),
    ));
    out
}

pub fn pareto_limits() -> Vec<Check> {
    let truth = 4.0;
    let mut out = Vec::new();

    let errs = errors_over_seeds(|rng| {
        let losses: Vec<f64> = (0..10_000)
            .map(|_| sample_pareto(truth, 1.0, rng).unwrap())
            .collect();
        (pareto_bayes(pareto_prior(), &losses, vec![3.5], 4.0) - truth).abs()
    });
    out.push(seeds_check(
        "(a) many losses: estimate → γ",
        &errs,
        0.1,
        MOST_SEEDS,
        "|bayes − 4| at K=1e4",
    ));

    let b = pareto_bayes(pareto_prior(), &LOSSES, vec![3.5], 1e8);
    out.push(check(
        "(b) ξ → ∞: estimate → ϑ̄",
        (b - 3.5).abs() < 1e-3,
        format!("ξ=1e8: bayes={b:.9}, ϑ̄=3.5 (tol 1e-3)"),
    ));

    let errs = errors_over_seeds(|rng| {
        let opinions = expert_draws(truth, 4.0, 10_000, rng);
        (pareto_bayes(pareto_prior(), &LOSSES, opinions, 4.0) - truth).abs()
    });
    out.push(seeds_check(
        "(c) many experts: estimate → γ",
        &errs,
        0.1,
        MOST_SEEDS,
        "|bayes − 4| at M=1e4",
    ));

    let d = pareto_bayes(pareto_prior(), &LOSSES, vec![3.5], 1e-8);
    let log_sum: f64 = LOSSES.iter().map(|x| x.ln()).sum();
    let closed = (4.0 + 15.0) / (8.0 / 9.0 + log_sum);
    out.push(check(
        "(d) ξ → 0: estimate → Gamma closed form",
        (d - closed).abs() < 1e-3,
        format!("ξ=1e-8: bayes={d:.9}, (α₀+K)/(1/β₀+Σln X)={closed:.9} (tol 1e-3)"),
    ));

    let c = 1e6;
    let tight = GammaParams::new(4.0 * c, 9.0 / 8.0 / c).unwrap();
    let e = pareto_bayes(tight, &LOSSES, vec![3.5], 4.0);
    out.push(check(
        "(e) prior Vco → 0: estimate → prior mean",
        (e - 4.5).abs() < 1e-3,
        format!("c=1e6: bayes={e:.9}, α₀β₀=4.5 (tol 1e-3)"),
    ));
    out
}
