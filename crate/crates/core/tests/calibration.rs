use opbayes::calibration::{fit_gamma_from_constraint, fit_gamma_moments, PriorConstraint};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

#[test]
fn moments_fit_recovers_simulated_gamma() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let g = Gamma::new(3.0, 0.2).unwrap();
    let xs: Vec<f64> = (0..100_000).map(|_| g.sample(&mut rng)).collect();
    let fit = fit_gamma_moments(&xs).unwrap();
    assert!((fit.shape() / 3.0 - 1.0).abs() < 0.05, "{}", fit.shape());
    assert!((fit.scale() / 0.2 - 1.0).abs() < 0.05, "{}", fit.scale());
}

#[test]
fn frequency_prior_constraint_closure() {
    let c = PriorConstraint::new(0.5, 0.25, 0.75, 2.0 / 3.0).unwrap();
    let g = fit_gamma_from_constraint(&c).unwrap();
    assert_eq!(g.mean(), 0.5);
    assert!((c.interval_prob(g.shape()).unwrap() - 2.0 / 3.0).abs() < 1e-6);
}
