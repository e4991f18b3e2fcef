//! Predictive annual-loss simulation with parameter uncertainty and VaR.
//!
//! Every path draws a fresh intensity `Λ` and severity parameter from their
//! posteriors, then a Poisson count `N ~ Pois(V·Λ)` and `N` severities. The
//! annual loss is their sum (zero when `N = 0`).
//!
//! Pareto cells with a drawn tail index `Γ ≤ 1` have infinite mean severity;
//! only quantiles of the totals are reported, never their mean.

use std::thread;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Open01, StandardNormal};

use crate::error::{domain, invalid, Error, Result};
use crate::frequency::FrequencyCellState;
use crate::gig::{BranchSampler, GigParams};
use crate::lognormal::LognormalCellState;
use crate::pareto::ParetoCellState;
use crate::special_fn::ln_gamma;

/// Stated alongside every aggregated capital figure.
pub const SUM_OF_VAR_NOTE: &str =
    "summing per-cell VaR is equivalent to assuming perfect dependence between cells";

/// Paths per deterministic block.
pub const DEFAULT_BLOCK_SIZE: usize = 4_096;

const POISSON_INVERSION_LIMIT: f64 = 30.0;

#[derive(Debug, Clone, PartialEq)]
pub enum Severity {
    Lognormal(LognormalCellState),
    Pareto(ParetoCellState),
}

/// Frequency and severity of one risk cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellModel {
    frequency: FrequencyCellState,
    severity: Severity,
}

impl CellModel {
    pub fn new(frequency: FrequencyCellState, severity: Severity) -> Self {
        Self {
            frequency,
            severity,
        }
    }

    pub fn frequency(&self) -> &FrequencyCellState {
        &self.frequency
    }

    pub fn severity(&self) -> &Severity {
        &self.severity
    }

    pub fn volume(&self) -> f64 {
        self.frequency.volume()
    }
}

/// One simulated year.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictiveSample {
    pub lambda_draw: f64,
    /// `Δ` for lognormal cells, `Γ` for Pareto cells.
    pub severity_param_draw: f64,
    pub count: u64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarEstimate {
    pub level: f64,
    pub value: f64,
    pub n_sims: usize,
    pub standard_error_note: String,
}

enum ParamDraw {
    Fixed(f64),
    Gig(BranchSampler),
}

impl ParamDraw {
    fn new(posterior: GigParams, uncertain: bool) -> Result<Self> {
        Ok(if uncertain {
            ParamDraw::Gig(BranchSampler::new(posterior)?)
        } else {
            ParamDraw::Fixed(posterior.mean()?)
        })
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        match self {
            ParamDraw::Fixed(v) => Ok(*v),
            ParamDraw::Gig(s) => s.sample(rng),
        }
    }
}

enum SeverityDraw {
    Lognormal {
        loc_mean: f64,
        loc_sd: f64,
        sigma: f64,
    },
    Pareto {
        index: ParamDraw,
        threshold: f64,
    },
}

/// A cell with its samplers set up once.
struct PreparedCell {
    volume: f64,
    lambda: ParamDraw,
    severity: SeverityDraw,
}

impl PreparedCell {
    fn new(cell: &CellModel, uncertain: bool) -> Result<Self> {
        let lambda = ParamDraw::new(cell.frequency.posterior(), uncertain)?;
        let severity = match &cell.severity {
            Severity::Lognormal(s) => SeverityDraw::Lognormal {
                loc_mean: s.posterior().mean(),
                loc_sd: if uncertain {
                    s.posterior().stdev()
                } else {
                    0.0
                },
                sigma: s.obs_sigma(),
            },
            Severity::Pareto(s) => SeverityDraw::Pareto {
                index: ParamDraw::new(s.posterior(), uncertain)?,
                threshold: s.threshold(),
            },
        };
        Ok(Self {
            volume: cell.volume(),
            lambda,
            severity,
        })
    }

    fn path<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<PredictiveSample> {
        let lambda_draw = self.lambda.draw(rng)?;
        let count = sample_poisson(self.volume * lambda_draw, rng)?;
        let (severity_param_draw, total) = match &self.severity {
            SeverityDraw::Lognormal {
                loc_mean,
                loc_sd,
                sigma,
            } => {
                let z: f64 = StandardNormal.sample(rng);
                let delta = loc_mean + loc_sd * z;
                let mut total = 0.0;
                for _ in 0..count {
                    total += sample_lognormal(delta, *sigma, rng)?;
                }
                (delta, total)
            }
            SeverityDraw::Pareto { index, threshold } => {
                let gamma = index.draw(rng)?;
                let mut total = 0.0;
                for _ in 0..count {
                    total += sample_pareto(gamma, *threshold, rng)?;
                }
                (gamma, total)
            }
        };
        Ok(PredictiveSample {
            lambda_draw,
            severity_param_draw,
            count,
            total,
        })
    }
}

/// `n_sims` predictive years drawn from a single stream.
pub fn simulate_annual_losses<R: Rng + ?Sized>(
    cell: &CellModel,
    n_sims: usize,
    rng: &mut R,
) -> Result<Vec<PredictiveSample>> {
    check_n_sims(n_sims)?;
    let prepared = PreparedCell::new(cell, true)?;
    (0..n_sims).map(|_| prepared.path(rng)).collect()
}

fn check_n_sims(n_sims: usize) -> Result<()> {
    if n_sims == 0 {
        Err(invalid("number of simulations must be at least 1"))
    } else {
        Ok(())
    }
}

/// Block-parallel simulation run.
///
/// Paths are cut into blocks of `block_size`; block `b` draws from a ChaCha8
/// stream keyed by `(seed, b)`. Output depends on the seed and block size
/// only, not on the number of workers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Simulation {
    pub n_sims: usize,
    pub seed: u64,
    pub workers: usize,
    pub parameter_uncertainty: bool,
    pub block_size: usize,
}

impl Simulation {
    pub fn new(n_sims: usize, seed: u64) -> Self {
        Self {
            n_sims,
            seed,
            workers: 1,
            parameter_uncertainty: true,
            block_size: DEFAULT_BLOCK_SIZE,
        }
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    /// With `false`, parameters are fixed at their posterior means.
    pub fn parameter_uncertainty(mut self, on: bool) -> Self {
        self.parameter_uncertainty = on;
        self
    }

    pub fn block_size(mut self, block_size: usize) -> Self {
        self.block_size = block_size;
        self
    }

    pub fn run(&self, cell: &CellModel) -> Result<Vec<PredictiveSample>> {
        check_n_sims(self.n_sims)?;
        if self.workers == 0 || self.block_size == 0 {
            return Err(invalid("workers and block size must be at least 1"));
        }
        let prepared = PreparedCell::new(cell, self.parameter_uncertainty)?;
        let n_blocks = self.n_sims.div_ceil(self.block_size);
        let workers = self.workers.min(n_blocks);

        let run_block = |block: usize| -> Result<Vec<PredictiveSample>> {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            rng.set_stream(block as u64);
            let start = block * self.block_size;
            let len = self.block_size.min(self.n_sims - start);
            (0..len).map(|_| prepared.path(&mut rng)).collect()
        };

        let mut blocks: Vec<Option<Vec<PredictiveSample>>> = vec![None; n_blocks];
        if workers == 1 {
            for (b, slot) in blocks.iter_mut().enumerate() {
                *slot = Some(run_block(b)?);
            }
        } else {
            let results = thread::scope(|scope| {
                let handles: Vec<_> = (0..workers)
                    .map(|w| {
                        let run_block = &run_block;
                        scope.spawn(move || {
                            (w..n_blocks)
                                .step_by(workers)
                                .map(|b| run_block(b).map(|v| (b, v)))
                                .collect::<Result<Vec<_>>>()
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("simulation worker panicked"))
                    .collect::<Vec<_>>()
            });
            for r in results {
                for (b, v) in r? {
                    blocks[b] = Some(v);
                }
            }
        }
        Ok(blocks.into_iter().flatten().flatten().collect())
    }

    /// VaR of the simulated annual totals.
    pub fn var(&self, cell: &CellModel, level: f64) -> Result<VarEstimate> {
        check_level(level)?;
        let totals: Vec<f64> = self.run(cell)?.iter().map(|s| s.total).collect();
        empirical_var(&totals, level)
    }
}

fn check_level(level: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(domain(format!("VaR level must lie in (0, 1), got {level}")))
    }
}

/// 1-based rank `⌈level·n⌉`, with products that are integers up to rounding
/// treated as exact.
pub fn order_statistic_rank(level: f64, n: usize) -> usize {
    let x = level * n as f64;
    let r = x.round();
    let rank = if (x - r).abs() <= 1e-9 * r.max(1.0) {
        r
    } else {
        x.ceil()
    };
    (rank as usize).clamp(1, n)
}

/// Empirical quantile: the `⌈level·n⌉`-th smallest total.
pub fn empirical_var(totals: &[f64], level: f64) -> Result<VarEstimate> {
    check_level(level)?;
    if totals.is_empty() {
        return Err(invalid("VaR needs at least one simulated total"));
    }
    if let Some(bad) = totals.iter().find(|t| t.is_nan()) {
        return Err(Error::Numerical(format!("simulated total is {bad}")));
    }
    let mut sorted = totals.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let rank = order_statistic_rank(level, n);
    // distribution-free 95% band from the binomial law of the rank
    let spread = 1.96 * (n as f64 * level * (1.0 - level)).sqrt();
    let lo = ((n as f64 * level - spread).floor() as usize).clamp(1, n);
    let hi = ((n as f64 * level + spread).ceil() as usize).clamp(1, n);
    Ok(VarEstimate {
        level,
        value: sorted[rank - 1],
        n_sims: n,
        standard_error_note: format!(
            "order statistic {rank} of {n}; 95% band [{}, {}]",
            sorted[lo - 1],
            sorted[hi - 1]
        ),
    })
}

/// Sum of per-cell VaR at a common level.
pub fn aggregate_var_sum(cells: &[VarEstimate]) -> Result<f64> {
    let first = cells
        .first()
        .ok_or_else(|| invalid("no cells to aggregate"))?;
    for c in cells {
        if c.level != first.level {
            return Err(Error::LevelMismatch {
                expected: first.level,
                found: c.level,
            });
        }
    }
    Ok(cells.iter().map(|c| c.value).sum())
}

/// Poisson draw: sequential inversion below mean 30, transformed rejection
/// with squeeze (PTRS) above.
pub fn sample_poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64> {
    if !(mean >= 0.0 && mean.is_finite()) {
        return Err(domain(format!(
            "Poisson mean must be finite and >= 0, got {mean}"
        )));
    }
    if mean == 0.0 {
        return Ok(0);
    }
    if mean < POISSON_INVERSION_LIMIT {
        return Ok(poisson_inversion(mean, rng));
    }
    Ok(poisson_ptrs(mean, rng))
}

fn poisson_inversion<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    let cap = (mean + 40.0 * mean.sqrt() + 100.0) as u64;
    'draw: loop {
        let u: f64 = rng.gen();
        let mut p = (-mean).exp();
        let mut cdf = p;
        let mut k = 0u64;
        while u > cdf {
            k += 1;
            p *= mean / k as f64;
            cdf += p;
            if k > cap {
                // cdf stalled just below u through rounding
                continue 'draw;
            }
        }
        return k;
    }
}

fn poisson_ptrs<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    let slam = mean.sqrt();
    let loglam = mean.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = rng.gen::<f64>() - 0.5;
        let v: f64 = rng.gen();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + mean + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        if v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln()
            <= -mean + k * loglam - ln_gamma(k + 1.0)
        {
            return k as u64;
        }
    }
}

/// `exp(μ + σZ)`.
pub fn sample_lognormal<R: Rng + ?Sized>(mu: f64, sigma: f64, rng: &mut R) -> Result<f64> {
    if !(mu.is_finite() && sigma > 0.0 && sigma.is_finite()) {
        return Err(domain(format!(
            "lognormal needs finite μ and σ > 0, got ({mu}, {sigma})"
        )));
    }
    let z: f64 = StandardNormal.sample(rng);
    Ok((mu + sigma * z).exp())
}

/// `L·U^{−1/γ}` for `U` in `(0, 1]`.
pub fn pareto_from_uniform(u: f64, gamma: f64, threshold: f64) -> f64 {
    threshold * u.powf(-1.0 / gamma)
}

pub fn sample_pareto<R: Rng + ?Sized>(gamma: f64, threshold: f64, rng: &mut R) -> Result<f64> {
    if !(gamma > 0.0 && gamma.is_finite() && threshold > 0.0 && threshold.is_finite()) {
        return Err(domain(format!(
            "Pareto needs γ > 0 and L > 0, got ({gamma}, {threshold})"
        )));
    }
    let u: f64 = Open01.sample(rng);
    Ok(pareto_from_uniform(u, gamma, threshold))
}
