//! Lognormal severity with a normal prior on the location `Δ` and normally
//! distributed expert opinions about `Δ`.
//!
//! The posterior of `Δ` is `N(μ̂, σ̂)` with
//!
//! ```text
//! σ̂² = (1/σ₀² + K/σ² + M/ξ²)⁻¹
//! μ̂  = w₁·μ₀ + w₂·mean(ln X) + w₃·mean(ϑ)
//! ```
//!
//! where `w₁ = σ̂²/σ₀²`, `w₂ = σ̂²K/σ²`, `w₃ = σ̂²M/ξ²`. Here `ξ` is the
//! standard deviation of an opinion given `Δ`.

use crate::error::{domain, Error, Result};
use crate::frequency::ExpertPanel;

/// A normal law `N(mean, stdev)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalParams {
    mean: f64,
    stdev: f64,
}

impl NormalParams {
    pub fn new(mean: f64, stdev: f64) -> Result<Self> {
        if !mean.is_finite() {
            return Err(domain(format!("normal mean must be finite, got {mean}")));
        }
        if !(stdev > 0.0 && stdev.is_finite()) {
            return Err(domain(format!(
                "normal stdev must be positive, got {stdev}"
            )));
        }
        Ok(Self { mean, stdev })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn stdev(&self) -> f64 {
        self.stdev
    }

    pub fn variance(&self) -> f64 {
        self.stdev * self.stdev
    }
}

/// Prior, data and expert weights in the posterior mean of `Δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CredibilityWeights {
    pub prior: f64,
    pub data: f64,
    pub experts: f64,
}

fn check_sigma(obs_sigma: f64) -> Result<()> {
    if obs_sigma > 0.0 && obs_sigma.is_finite() {
        Ok(())
    } else {
        Err(domain(format!(
            "severity log-stdev must be positive, got {obs_sigma}"
        )))
    }
}

/// Precisions `(1/σ₀², K/σ², M/ξ²)`.
fn precisions(prior: NormalParams, obs_sigma: f64, k: usize, panel: &ExpertPanel) -> [f64; 3] {
    let experts = if panel.is_empty() {
        0.0
    } else {
        panel.len() as f64 / (panel.xi() * panel.xi())
    };
    [
        1.0 / prior.variance(),
        k as f64 / (obs_sigma * obs_sigma),
        experts,
    ]
}

pub fn credibility_weights(
    prior: NormalParams,
    obs_sigma: f64,
    k: usize,
    panel: &ExpertPanel,
) -> Result<CredibilityWeights> {
    check_sigma(obs_sigma)?;
    let [p0, p1, p2] = precisions(prior, obs_sigma, k, panel);
    let var = 1.0 / (p0 + p1 + p2);
    Ok(CredibilityWeights {
        prior: var * p0,
        data: var * p1,
        experts: var * p2,
    })
}

/// Posterior of the location `Δ` given log-losses and expert opinions.
pub fn lognormal_posterior(
    prior: NormalParams,
    obs_sigma: f64,
    log_losses: &[f64],
    panel: &ExpertPanel,
) -> Result<NormalParams> {
    check_sigma(obs_sigma)?;
    if let Some(bad) = log_losses.iter().find(|x| !x.is_finite()) {
        return Err(domain(format!("log-loss must be finite, got {bad}")));
    }
    let [p0, p1, p2] = precisions(prior, obs_sigma, log_losses.len(), panel);
    let var = 1.0 / (p0 + p1 + p2);
    let data_sum: f64 = log_losses.iter().sum();
    let expert_term = if panel.is_empty() {
        0.0
    } else {
        panel.sum() / (panel.xi() * panel.xi())
    };
    let mean = var * (prior.mean() * p0 + data_sum / (obs_sigma * obs_sigma) + expert_term);
    NormalParams::new(mean, var.sqrt())
}

/// Sample standard deviation of the opinions, used as `ξ`.
pub fn xi_from_opinions_stdev(opinions: &[f64]) -> Result<f64> {
    let sd = sample_stdev(opinions)?;
    if sd == 0.0 {
        return Err(Error::Degenerate(
            "expert opinions are all equal; their spread cannot serve as ξ".into(),
        ));
    }
    Ok(sd)
}

/// Mean and standard deviation with divisor `n − 1`.
pub(crate) fn sample_mean_stdev(xs: &[f64]) -> Result<(f64, f64)> {
    if xs.len() < 2 {
        return Err(Error::InsufficientExperts {
            needed: 2,
            got: xs.len(),
        });
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
    Ok((mean, (ss / (n - 1.0)).sqrt()))
}

fn sample_stdev(xs: &[f64]) -> Result<f64> {
    sample_mean_stdev(xs).map(|(_, sd)| sd)
}

/// One risk cell's lognormal severity inputs and the posterior they imply.
#[derive(Debug, Clone, PartialEq)]
pub struct LognormalCellState {
    prior: NormalParams,
    obs_sigma: f64,
    log_losses: Vec<f64>,
    panel: ExpertPanel,
    posterior: NormalParams,
}

impl LognormalCellState {
    pub fn new(prior: NormalParams, obs_sigma: f64, panel: ExpertPanel) -> Result<Self> {
        let posterior = lognormal_posterior(prior, obs_sigma, &[], &panel)?;
        Ok(Self {
            prior,
            obs_sigma,
            log_losses: Vec::new(),
            panel,
            posterior,
        })
    }

    /// Build from raw severities `X > 0`, which are logged here.
    pub fn with_losses(
        prior: NormalParams,
        obs_sigma: f64,
        losses: &[f64],
        panel: ExpertPanel,
    ) -> Result<Self> {
        let log_losses = losses
            .iter()
            .map(|&x| log_severity(x))
            .collect::<Result<Vec<_>>>()?;
        let posterior = lognormal_posterior(prior, obs_sigma, &log_losses, &panel)?;
        Ok(Self {
            prior,
            obs_sigma,
            log_losses,
            panel,
            posterior,
        })
    }

    /// The state after one more raw severity.
    pub fn update_loss(&self, loss: f64) -> Result<Self> {
        let mut log_losses = self.log_losses.clone();
        log_losses.push(log_severity(loss)?);
        let posterior = lognormal_posterior(self.prior, self.obs_sigma, &log_losses, &self.panel)?;
        Ok(Self {
            log_losses,
            posterior,
            panel: self.panel.clone(),
            ..*self
        })
    }

    pub fn prior(&self) -> NormalParams {
        self.prior
    }

    pub fn obs_sigma(&self) -> f64 {
        self.obs_sigma
    }

    pub fn log_losses(&self) -> &[f64] {
        &self.log_losses
    }

    pub fn panel(&self) -> &ExpertPanel {
        &self.panel
    }

    pub fn posterior(&self) -> NormalParams {
        self.posterior
    }

    pub fn weights(&self) -> Result<CredibilityWeights> {
        credibility_weights(
            self.prior,
            self.obs_sigma,
            self.log_losses.len(),
            &self.panel,
        )
    }

    /// Posterior mean of `Δ`.
    pub fn bayes_estimate(&self) -> f64 {
        self.posterior.mean()
    }

    /// Mean of `ln X`; needs at least one loss.
    pub fn mle(&self) -> Result<f64> {
        if self.log_losses.is_empty() {
            return Err(Error::UndefinedEstimator(
                "location MLE needs at least one loss".into(),
            ));
        }
        Ok(self.log_losses.iter().sum::<f64>() / self.log_losses.len() as f64)
    }

    /// Posterior mean ignoring the experts.
    pub fn two_source_estimate(&self) -> Result<f64> {
        lognormal_posterior(
            self.prior,
            self.obs_sigma,
            &self.log_losses,
            &ExpertPanel::empty(),
        )
        .map(|p| p.mean())
    }
}

fn log_severity(x: f64) -> Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x.ln())
    } else {
        Err(domain(format!(
            "lognormal severity must be positive, got {x}"
        )))
    }
}
