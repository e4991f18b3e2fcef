//! Prior hyper-parameters and expert credibility from industry information.

use crate::error::{domain, Error, Result};
use crate::gig::GammaParams;
use crate::lognormal::sample_mean_stdev;
use crate::special_fn::regularized_gamma_p;

/// Lower and upper ends of the shape search.
pub const SHAPE_BRACKET: (f64, f64) = (1e-3, 1e4);

/// Coefficients of variation below this overflow the shape `1/vco²`.
pub const MIN_VCO: f64 = 1e-6;

const PROB_TOL: f64 = 1e-9;
const SCAN_POINTS: usize = 400;

/// `E[Λ] = mean` and `P[low ≤ Λ ≤ high] = prob`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PriorConstraint {
    mean: f64,
    low: f64,
    high: f64,
    prob: f64,
}

impl PriorConstraint {
    pub fn new(mean: f64, low: f64, high: f64, prob: f64) -> Result<Self> {
        if !(low > 0.0 && low < mean && mean < high && high.is_finite()) {
            return Err(domain(format!(
                "need 0 < low < mean < high, got low={low}, mean={mean}, high={high}"
            )));
        }
        if !(prob > 0.0 && prob < 1.0) {
            return Err(domain(format!(
                "interval probability must lie in (0, 1), got {prob}"
            )));
        }
        Ok(Self {
            mean,
            low,
            high,
            prob,
        })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.low, self.high)
    }

    pub fn prob(&self) -> f64 {
        self.prob
    }

    /// `P[low ≤ Λ ≤ high]` under `Γ(shape, mean/shape)`.
    pub fn interval_prob(&self, shape: f64) -> Result<f64> {
        let scale = self.mean / shape;
        Ok(regularized_gamma_p(shape, self.high / scale)?
            - regularized_gamma_p(shape, self.low / scale)?)
    }
}

/// Gamma prior with the constrained mean and interval probability.
///
/// The mean is held exactly by `β₀ = mean/α₀`; `α₀` is found by scanning the
/// log-spaced bracket for the first sign change and bisecting inside it.
pub fn fit_gamma_from_constraint(c: &PriorConstraint) -> Result<GammaParams> {
    let excess = |shape: f64| c.interval_prob(shape).map(|p| p - c.prob);
    let (lo, hi) = SHAPE_BRACKET;
    let ratio = (hi / lo).powf(1.0 / SCAN_POINTS as f64);
    let mut a = lo;
    let mut fa = excess(a)?;
    let mut bracket = None;
    for i in 1..=SCAN_POINTS {
        let b = if i == SCAN_POINTS {
            hi
        } else {
            lo * ratio.powi(i as i32)
        };
        let fb = excess(b)?;
        if fa == 0.0 {
            bracket = Some((a, a, fa));
            break;
        }
        if fa.signum() != fb.signum() {
            bracket = Some((a, b, fa));
            break;
        }
        a = b;
        fa = fb;
    }
    let (mut a, mut b, fa) = bracket.ok_or_else(|| {
        Error::Infeasible(format!(
            "no Gamma shape in [{lo}, {hi}] gives P[{} ≤ Λ ≤ {}] = {}",
            c.low, c.high, c.prob
        ))
    })?;
    for _ in 0..200 {
        if b - a <= 1e-14 * b {
            break;
        }
        let m = 0.5 * (a + b);
        let fm = excess(m)?;
        if fm.abs() < PROB_TOL * 1e-3 {
            a = m;
            b = m;
            break;
        }
        if fm.signum() == fa.signum() {
            a = m;
        } else {
            b = m;
        }
    }
    let shape = 0.5 * (a + b);
    let fit = GammaParams::new(shape, c.mean / shape)?;
    let err = excess(shape)?.abs();
    if err > PROB_TOL {
        return Err(Error::Numerical(format!(
            "constraint fit missed the interval probability by {err}"
        )));
    }
    Ok(fit)
}

/// `Γ(1/vco², mean·vco²)`.
pub fn gamma_from_mean_vco(mean: f64, vco: f64) -> Result<GammaParams> {
    if !(mean > 0.0 && mean.is_finite()) {
        return Err(domain(format!("mean must be positive, got {mean}")));
    }
    if !(vco >= MIN_VCO && vco.is_finite()) {
        return Err(domain(format!(
            "coefficient of variation must be at least {MIN_VCO}, got {vco}"
        )));
    }
    GammaParams::new(1.0 / (vco * vco), mean * vco * vco)
}

/// `ξ = (mean / stdev)²` of the opinions, stdev with divisor `M − 1`.
pub fn xi_from_opinions_moments(opinions: &[f64]) -> Result<f64> {
    if let Some(bad) = opinions.iter().find(|&&o| !(o > 0.0 && o.is_finite())) {
        return Err(domain(format!("opinions must be positive, got {bad}")));
    }
    let (mean, sd) = sample_mean_stdev(opinions)?;
    if sd == 0.0 {
        return Err(Error::Degenerate(
            "expert opinions are all equal; ξ would be infinite".into(),
        ));
    }
    let r = mean / sd;
    Ok(r * r)
}

/// Method of moments: `β₀ = var/mean`, `α₀ = mean/β₀`.
pub fn fit_gamma_moments(samples: &[f64]) -> Result<GammaParams> {
    if let Some(bad) = samples.iter().find(|&&s| !(s > 0.0 && s.is_finite())) {
        return Err(domain(format!(
            "industry samples must be positive, got {bad}"
        )));
    }
    if samples.len() < 2 {
        return Err(Error::Degenerate(format!(
            "method of moments needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    let (mean, sd) = sample_mean_stdev(samples)?;
    let var = sd * sd;
    if var == 0.0 {
        return Err(Error::Degenerate(
            "industry samples have zero variance".into(),
        ));
    }
    let scale = var / mean;
    GammaParams::new(mean / scale, scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_frequency_prior() {
        let c = PriorConstraint::new(0.5, 0.25, 0.75, 2.0 / 3.0).unwrap();
        let g = fit_gamma_from_constraint(&c).unwrap();
        assert!((g.shape() - 3.407).abs() < 0.017, "{}", g.shape());
        assert!((g.scale() - 0.147).abs() < 0.001, "{}", g.scale());
        assert_eq!(g.shape() * g.scale(), 0.5);
        assert!((c.interval_prob(g.shape()).unwrap() - 2.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn wide_interval_high_prob() {
        let c = PriorConstraint::new(1.0, 0.01, 50.0, 0.999).unwrap();
        match fit_gamma_from_constraint(&c) {
            Ok(g) => assert!((c.interval_prob(g.shape()).unwrap() - 0.999).abs() < 1e-6),
            Err(e) => assert!(matches!(e, Error::Infeasible(_))),
        }
    }

    #[test]
    fn infeasible_constraint() {
        // the narrowest Gamma in the bracket still leaves too much mass outside
        let c = PriorConstraint::new(1.0, 0.999_999, 1.000_001, 0.9).unwrap();
        assert!(matches!(
            fit_gamma_from_constraint(&c),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn constraint_validation() {
        assert!(PriorConstraint::new(0.5, 0.6, 0.75, 0.5).is_err());
        assert!(PriorConstraint::new(0.5, 0.25, 0.75, 1.0).is_err());
    }

    #[test]
    fn mean_vco() {
        let g = gamma_from_mean_vco(4.5, 0.5).unwrap();
        assert_eq!((g.shape(), g.scale()), (4.0, 1.125));
        let g = gamma_from_mean_vco(0.5, 0.3).unwrap();
        assert!((g.mean() - 0.5).abs() < 1e-12);
        assert!((g.vco() - 0.3).abs() < 1e-12);
        assert!(gamma_from_mean_vco(1.0, 1e-7).is_err());
    }

    #[test]
    fn xi_moments() {
        let xi = xi_from_opinions_moments(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let sd = (5.0f64 / 3.0).sqrt();
        assert!((xi - (2.5 / sd).powi(2)).abs() < 1e-12);
        // mean 2, stdev 1: Vco 0.5
        assert!((xi_from_opinions_moments(&[1.0, 2.0, 3.0]).unwrap() - 4.0).abs() < 1e-12);
        assert!(matches!(
            xi_from_opinions_moments(&[2.0, 2.0, 2.0]),
            Err(Error::Degenerate(_))
        ));
        assert!(matches!(
            xi_from_opinions_moments(&[2.0]),
            Err(Error::InsufficientExperts { .. })
        ));
    }

    #[test]
    fn moments_fit() {
        let g = fit_gamma_moments(&[1.0, 3.0]).unwrap();
        assert!((g.shape() - 2.0).abs() < 1e-15 && (g.scale() - 1.0).abs() < 1e-15);
        assert!(matches!(
            fit_gamma_moments(&[2.0, 2.0]),
            Err(Error::Degenerate(_))
        ));
    }
}
