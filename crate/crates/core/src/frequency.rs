//! Poisson frequency with a Gamma (or GIG) industry prior and Gamma-distributed
//! expert opinions.
//!
//! Given `Λ`, annual counts are `Pois(V·Λ)` and each expert opinion is
//! `Γ(ξ, Λ/ξ)`. The posterior of `Λ` is `GIG(ν, ω, φ)` with
//!
//! ```text
//! ν = α₀ − 1 − Mξ + Σ N_k
//! ω = V·K + 1/β₀
//! φ = ξ·M·ϑ̄
//! ```
//!
//! Observations enter through `ν` and `ω`, experts through `ν` and `φ`.
//! The posterior is evaluated from the sufficient statistics `(ΣN, K)`, so a
//! batch fit, a year-by-year fit and the closed form agree to the last bit.

use crate::error::{domain, Error, Result};
use crate::gig::{GammaParams, GigParams};

/// Point opinions from `M` experts plus the credibility parameter `ξ`.
///
/// Larger `ξ` means more trusted experts: for Gamma opinions the conditional
/// coefficient of variation is `1/√ξ`; for the lognormal severity model `ξ`
/// is the opinions' standard deviation instead.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpertPanel {
    opinions: Vec<f64>,
    xi: f64,
}

impl ExpertPanel {
    pub fn new(opinions: Vec<f64>, xi: f64) -> Result<Self> {
        if let Some(bad) = opinions.iter().find(|o| !o.is_finite()) {
            return Err(domain(format!("expert opinion must be finite, got {bad}")));
        }
        if !opinions.is_empty() && !(xi > 0.0 && xi.is_finite()) {
            return Err(domain(format!(
                "credibility parameter ξ must be positive, got {xi}"
            )));
        }
        Ok(Self { opinions, xi })
    }

    /// A panel with no experts; `ξ` is irrelevant.
    pub fn empty() -> Self {
        Self {
            opinions: Vec::new(),
            xi: 1.0,
        }
    }

    pub fn opinions(&self) -> &[f64] {
        &self.opinions
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn len(&self) -> usize {
        self.opinions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.opinions.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.opinions.iter().sum()
    }

    pub fn mean(&self) -> Option<f64> {
        (!self.is_empty()).then(|| self.sum() / self.len() as f64)
    }

    /// Reject non-positive opinions, which Gamma-distributed opinions cannot take.
    pub(crate) fn require_positive(&self) -> Result<()> {
        match self.opinions.iter().find(|&&o| o <= 0.0) {
            Some(o) => Err(domain(format!(
                "opinions about a positive parameter must be > 0, got {o}"
            ))),
            None => Ok(()),
        }
    }

    /// `(M·ξ, ξ·Σϑ)`: the shifts the panel applies to `ν` and `φ`.
    pub(crate) fn gig_shift(&self) -> (f64, f64) {
        if self.is_empty() {
            (0.0, 0.0)
        } else {
            (self.len() as f64 * self.xi, self.xi * self.sum())
        }
    }
}

/// Industry prior for a positive rate or tail index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RatePrior {
    Gamma(GammaParams),
    Gig(GigParams),
}

impl RatePrior {
    pub fn as_gig(&self) -> GigParams {
        match self {
            RatePrior::Gamma(g) => g.to_gig(),
            RatePrior::Gig(g) => *g,
        }
    }

    pub fn mean(&self) -> Result<f64> {
        match self {
            RatePrior::Gamma(g) => Ok(g.mean()),
            RatePrior::Gig(g) => g.mean(),
        }
    }
}

impl From<GammaParams> for RatePrior {
    fn from(g: GammaParams) -> Self {
        RatePrior::Gamma(g)
    }
}

impl From<GigParams> for RatePrior {
    fn from(g: GigParams) -> Self {
        RatePrior::Gig(g)
    }
}

/// Prior combined with the expert panel, before any counts.
pub(crate) fn with_experts(prior: GigParams, panel: &ExpertPanel) -> Result<GigParams> {
    panel.require_positive()?;
    let (nu_shift, phi_shift) = panel.gig_shift();
    GigParams::new(
        prior.nu() - nu_shift,
        prior.omega(),
        prior.phi() + phi_shift,
    )
}

fn check_volume(volume: f64) -> Result<()> {
    if volume > 0.0 && volume.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("volume must be positive, got {volume}")))
    }
}

/// `(ν₀ − Mξ + ΣN, ω₀ + V·K, φ₀ + ξΣϑ)`.
fn posterior_from_totals(
    prior: GigParams,
    panel: &ExpertPanel,
    volume: f64,
    total: u64,
    years: usize,
) -> Result<GigParams> {
    let base = with_experts(prior, panel)?;
    GigParams::new(
        base.nu() + total as f64,
        base.omega() + volume * years as f64,
        base.phi(),
    )
}

/// Posterior under a GIG prior `(ν₀, ω₀, φ₀)`:
/// `ν = ν₀ − Mξ + ΣN`, `ω = ω₀ + V·K`, `φ = φ₀ + ξMϑ̄`.
pub fn freq_posterior_gig_prior(
    prior: GigParams,
    volume: f64,
    counts: &[u64],
    panel: &ExpertPanel,
) -> Result<GigParams> {
    check_volume(volume)?;
    posterior_from_totals(prior, panel, volume, counts.iter().sum(), counts.len())
}

/// Posterior of `Λ` under the Gamma prior `Γ(α₀, β₀)`.
pub fn freq_posterior(
    prior: GammaParams,
    volume: f64,
    counts: &[u64],
    panel: &ExpertPanel,
) -> Result<GigParams> {
    freq_posterior_gig_prior(prior.to_gig(), volume, counts, panel)
}

/// Maximum likelihood estimate `N̄ / V`.
pub fn freq_mle(counts: &[u64], volume: f64) -> Result<f64> {
    check_volume(volume)?;
    if counts.is_empty() {
        return Err(Error::UndefinedEstimator(
            "frequency MLE needs at least one year of counts".into(),
        ));
    }
    let total: u64 = counts.iter().sum();
    Ok(total as f64 / counts.len() as f64 / volume)
}

/// Bayes estimate without experts, written as a credibility blend:
/// `w·α₀β₀ + (1 − w)·N̄/V` with `w = 1/(V·K·β₀ + 1)`.
pub fn freq_two_source_estimate(prior: GammaParams, volume: f64, counts: &[u64]) -> Result<f64> {
    check_volume(volume)?;
    if counts.is_empty() {
        return Ok(prior.mean());
    }
    let k = counts.len() as f64;
    let w = 1.0 / (volume * k * prior.scale() + 1.0);
    Ok(w * prior.mean() + (1.0 - w) * freq_mle(counts, volume)?)
}

/// One risk cell's frequency inputs together with the posterior they imply.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyCellState {
    prior: RatePrior,
    volume: f64,
    counts: Vec<u64>,
    total: u64,
    panel: ExpertPanel,
    posterior: GigParams,
}

impl FrequencyCellState {
    /// A cell with no observed years yet.
    pub fn new(prior: impl Into<RatePrior>, volume: f64, panel: ExpertPanel) -> Result<Self> {
        Self::with_counts(prior, volume, Vec::new(), panel)
    }

    pub fn with_counts(
        prior: impl Into<RatePrior>,
        volume: f64,
        counts: Vec<u64>,
        panel: ExpertPanel,
    ) -> Result<Self> {
        let prior = prior.into();
        let posterior = freq_posterior_gig_prior(prior.as_gig(), volume, &counts, &panel)?;
        Ok(Self {
            prior,
            volume,
            total: counts.iter().sum(),
            counts,
            panel,
            posterior,
        })
    }

    /// The state after observing one more year.
    pub fn update_year(&self, count: u64) -> Result<Self> {
        let mut counts = self.counts.clone();
        counts.push(count);
        let total = self.total + count;
        let posterior = posterior_from_totals(
            self.prior.as_gig(),
            &self.panel,
            self.volume,
            total,
            counts.len(),
        )?;
        Ok(Self {
            prior: self.prior,
            volume: self.volume,
            counts,
            total,
            panel: self.panel.clone(),
            posterior,
        })
    }

    pub fn prior(&self) -> RatePrior {
        self.prior
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn panel(&self) -> &ExpertPanel {
        &self.panel
    }

    pub fn posterior(&self) -> GigParams {
        self.posterior
    }

    /// Posterior mean `E[Λ | N, ϑ]`.
    pub fn bayes_estimate(&self) -> Result<f64> {
        self.posterior.mean()
    }

    pub fn mode_estimate(&self) -> Result<f64> {
        self.posterior.mode()
    }

    pub fn mode_estimate_approx(&self) -> Result<f64> {
        self.posterior.mode_approx()
    }

    pub fn mle(&self) -> Result<f64> {
        freq_mle(&self.counts, self.volume)
    }

    /// Estimate from the prior and the counts alone, ignoring the experts.
    pub fn two_source_estimate(&self) -> Result<f64> {
        match self.prior {
            RatePrior::Gamma(g) => freq_two_source_estimate(g, self.volume, &self.counts),
            RatePrior::Gig(g) => {
                freq_posterior_gig_prior(g, self.volume, &self.counts, &ExpertPanel::empty())?
                    .mean()
            }
        }
    }
}
