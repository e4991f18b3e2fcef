//! Bayesian combination of internal loss data, industry priors and expert
//! opinions for operational risk.
//!
//! Frequencies follow a Poisson law and severities a lognormal or Pareto law.
//! Posteriors for the frequency intensity and the Pareto tail index are
//! generalized inverse Gaussian (GIG); the lognormal location posterior is
//! normal. Predictive annual losses and VaR come from Monte Carlo.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod capital;
pub mod error;
pub mod frequency;
pub mod gig;
pub mod lognormal;
pub mod pareto;
pub mod quadrature;
pub mod special_fn;

pub use calibration::{
    fit_gamma_from_constraint, fit_gamma_moments, gamma_from_mean_vco, xi_from_opinions_moments,
    PriorConstraint,
};
pub use capital::{
    aggregate_var_sum, empirical_var, simulate_annual_losses, CellModel, PredictiveSample,
    Severity, Simulation, VarEstimate, SUM_OF_VAR_NOTE,
};
pub use error::{Error, Result};
pub use frequency::{
    freq_mle, freq_posterior, freq_posterior_gig_prior, freq_two_source_estimate, ExpertPanel,
    FrequencyCellState, RatePrior,
};
pub use gig::{BranchSampler, GammaParams, GigBranch, GigParams, GigSampler};
pub use lognormal::{
    credibility_weights, lognormal_posterior, xi_from_opinions_stdev, CredibilityWeights,
    LognormalCellState, NormalParams,
};
pub use pareto::{pareto_mle, pareto_posterior, pareto_posterior_gig_prior, ParetoCellState};
pub use special_fn::{bessel_ratio, log_bessel_k};
