//! Pareto severity above a known threshold `L` with a Gamma (or GIG) prior on
//! the tail index `Γ` and Gamma-distributed expert opinions about `Γ`.
//!
//! The posterior of `Γ` is `GIG(ν, ω, φ)` with
//!
//! ```text
//! ν = ν₀ − Mξ + K
//! ω = ω₀ + Σ ln(X_k / L)
//! φ = φ₀ + ξ·M·ϑ̄
//! ```
//!
//! A Gamma prior `Γ(α₀, β₀)` enters as `(α₀ − 1, 1/β₀, 0)`.

use crate::error::{domain, Error, Result};
use crate::frequency::{with_experts, ExpertPanel, RatePrior};
use crate::gig::{GammaParams, GigParams};

fn check_threshold(threshold: f64) -> Result<()> {
    if threshold > 0.0 && threshold.is_finite() {
        Ok(())
    } else {
        Err(domain(format!(
            "threshold must be positive, got {threshold}"
        )))
    }
}

/// `ln(X / L)`, rejecting losses below the threshold.
fn log_excess(loss: f64, threshold: f64) -> Result<f64> {
    if loss >= threshold && loss.is_finite() {
        Ok((loss / threshold).ln())
    } else {
        Err(domain(format!(
            "loss {loss} is below the threshold {threshold}"
        )))
    }
}

/// `Σ ln(X_k / L)`, accumulated left to right.
fn log_excess_sum(losses: &[f64], threshold: f64) -> Result<f64> {
    losses
        .iter()
        .try_fold(0.0, |acc, &x| Ok(acc + log_excess(x, threshold)?))
}

/// `(ν₀ − Mξ + K, ω₀ + Σ ln(X/L), φ₀ + ξΣϑ)`.
fn posterior_from_totals(
    prior: GigParams,
    panel: &ExpertPanel,
    log_sum: f64,
    count: usize,
) -> Result<GigParams> {
    let base = with_experts(prior, panel)?;
    GigParams::new(base.nu() + count as f64, base.omega() + log_sum, base.phi())
}

pub fn pareto_posterior_gig_prior(
    prior: GigParams,
    threshold: f64,
    losses: &[f64],
    panel: &ExpertPanel,
) -> Result<GigParams> {
    check_threshold(threshold)?;
    posterior_from_totals(
        prior,
        panel,
        log_excess_sum(losses, threshold)?,
        losses.len(),
    )
}

pub fn pareto_posterior(
    prior: GammaParams,
    threshold: f64,
    losses: &[f64],
    panel: &ExpertPanel,
) -> Result<GigParams> {
    pareto_posterior_gig_prior(prior.to_gig(), threshold, losses, panel)
}

/// `K / Σ ln(X_k / L)`.
pub fn pareto_mle(losses: &[f64], threshold: f64) -> Result<f64> {
    check_threshold(threshold)?;
    if losses.is_empty() {
        return Err(Error::UndefinedEstimator(
            "tail-index MLE needs at least one loss".into(),
        ));
    }
    let total = log_excess_sum(losses, threshold)?;
    if total == 0.0 {
        return Err(Error::Degenerate(
            "every loss equals the threshold; the tail-index MLE is unbounded".into(),
        ));
    }
    Ok(losses.len() as f64 / total)
}

/// One risk cell's Pareto severity inputs and the posterior they imply.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoCellState {
    prior: RatePrior,
    threshold: f64,
    losses: Vec<f64>,
    log_sum: f64,
    panel: ExpertPanel,
    posterior: GigParams,
}

impl ParetoCellState {
    pub fn new(prior: impl Into<RatePrior>, threshold: f64, panel: ExpertPanel) -> Result<Self> {
        Self::with_losses(prior, threshold, Vec::new(), panel)
    }

    pub fn with_losses(
        prior: impl Into<RatePrior>,
        threshold: f64,
        losses: Vec<f64>,
        panel: ExpertPanel,
    ) -> Result<Self> {
        let prior = prior.into();
        check_threshold(threshold)?;
        let log_sum = log_excess_sum(&losses, threshold)?;
        let posterior = posterior_from_totals(prior.as_gig(), &panel, log_sum, losses.len())?;
        Ok(Self {
            prior,
            threshold,
            losses,
            log_sum,
            panel,
            posterior,
        })
    }

    /// The state after one more loss.
    pub fn update_loss(&self, loss: f64) -> Result<Self> {
        let log_sum = self.log_sum + log_excess(loss, self.threshold)?;
        let mut losses = self.losses.clone();
        losses.push(loss);
        let posterior =
            posterior_from_totals(self.prior.as_gig(), &self.panel, log_sum, losses.len())?;
        Ok(Self {
            prior: self.prior,
            threshold: self.threshold,
            losses,
            log_sum,
            panel: self.panel.clone(),
            posterior,
        })
    }

    pub fn prior(&self) -> RatePrior {
        self.prior
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn losses(&self) -> &[f64] {
        &self.losses
    }

    pub fn panel(&self) -> &ExpertPanel {
        &self.panel
    }

    pub fn posterior(&self) -> GigParams {
        self.posterior
    }

    /// Posterior mean `E[Γ | X, ϑ]`.
    pub fn bayes_estimate(&self) -> Result<f64> {
        self.posterior.mean()
    }

    pub fn mode_estimate(&self) -> Result<f64> {
        self.posterior.mode()
    }

    pub fn mle(&self) -> Result<f64> {
        pareto_mle(&self.losses, self.threshold)
    }

    /// Posterior mean ignoring the experts.
    pub fn two_source_estimate(&self) -> Result<f64> {
        pareto_posterior_gig_prior(
            self.prior.as_gig(),
            self.threshold,
            &self.losses,
            &ExpertPanel::empty(),
        )?
        .mean()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gig::GigBranch;

    const LOSSES: [f64; 15] = [
        1.17, 1.29, 1.00, 1.55, 2.66, 1.02, 1.28, 1.10, 1.06, 1.02, 1.59, 1.35, 1.91, 1.23, 1.03,
    ];

    fn prior() -> GammaParams {
        GammaParams::new(4.0, 9.0 / 8.0).unwrap()
    }

    fn log_sum() -> f64 {
        LOSSES.iter().fold(0.0, |acc, x| acc + x.ln())
    }

    #[test]
    fn worked_example_parameters() {
        let panel = ExpertPanel::new(vec![3.5], 4.0).unwrap();
        let post = pareto_posterior(prior(), 1.0, &LOSSES, &panel).unwrap();
        assert_eq!(post.nu(), 14.0);
        assert_eq!(post.phi(), 14.0);
        assert_eq!(post.omega(), 8.0 / 9.0 + log_sum());
    }

    #[test]
    fn prior_only() {
        let state = ParetoCellState::new(prior(), 1.0, ExpertPanel::empty()).unwrap();
        assert_eq!(state.posterior(), prior().to_gig());
        assert!((state.bayes_estimate().unwrap() - 4.5).abs() < 1e-15);
    }

    #[test]
    fn conjugate_without_experts() {
        let post = pareto_posterior(prior(), 1.0, &LOSSES, &ExpertPanel::empty()).unwrap();
        assert_eq!(post.branch(), GigBranch::Gamma);
        let shape = 4.0 + 15.0;
        let rate = 8.0 / 9.0 + log_sum();
        assert_eq!(post.nu() + 1.0, shape);
        assert!((post.omega() - rate).abs() < 1e-13);
        assert!((post.mean().unwrap() - shape / rate).abs() < 1e-13);
    }

    #[test]
    fn boundary_loss_moves_only_nu() {
        let g = GigParams::new(2.0, 1.5, 0.4).unwrap();
        let one = pareto_posterior_gig_prior(g, 2.0, &[2.0], &ExpertPanel::empty()).unwrap();
        assert_eq!((one.nu(), one.omega(), one.phi()), (3.0, 1.5, 0.4));
        assert_eq!(
            pareto_posterior_gig_prior(g, 2.0, &[], &ExpertPanel::empty()).unwrap(),
            g
        );
    }

    #[test]
    fn sequential_equals_batch() {
        let panel = ExpertPanel::new(vec![3.5], 4.0).unwrap();
        let mut state = ParetoCellState::new(prior(), 1.0, panel.clone()).unwrap();
        for &x in &LOSSES {
            let next = state.update_loss(x).unwrap();
            assert_eq!(next.posterior().phi(), state.posterior().phi());
            state = next;
        }
        let batch = ParetoCellState::with_losses(prior(), 1.0, LOSSES.to_vec(), panel).unwrap();
        assert_eq!(state, batch);
    }

    #[test]
    fn rejects_losses_below_threshold() {
        assert!(pareto_posterior(prior(), 1.5, &[1.2], &ExpertPanel::empty()).is_err());
        let state = ParetoCellState::new(prior(), 1.0, ExpertPanel::empty()).unwrap();
        assert!(state.update_loss(0.5).is_err());
        assert!(pareto_mle(&[0.9], 1.0).is_err());
    }

    #[test]
    fn mle_cases() {
        assert!((pareto_mle(&LOSSES, 1.0).unwrap() - 15.0 / log_sum()).abs() < 1e-13);
        assert!((pareto_mle(&[std::f64::consts::E], 1.0).unwrap() - 1.0).abs() < 1e-15);
        let scaled: Vec<f64> = LOSSES.iter().map(|x| x * 8.0).collect();
        let a = pareto_mle(&scaled, 8.0).unwrap();
        assert!((a - pareto_mle(&LOSSES, 1.0).unwrap()).abs() < 1e-12);
        assert!(matches!(
            pareto_mle(&[1.0, 1.0], 1.0),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            pareto_mle(&[], 1.0),
            Err(Error::UndefinedEstimator(_))
        ));
    }
}
