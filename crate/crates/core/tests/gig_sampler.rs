mod common;

use opbayes::gig::{sample_any, BranchSampler};
use opbayes::GigParams;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const N: usize = 100_000;

const SAMPLER_CASES: [(f64, f64, f64); 6] = [
    (-2.0, 0.2, 5.0),
    (-2.0, 3.0, 0.5),
    (0.5, 1.0, 1.0),
    (0.5, 10.0, 0.1),
    (8.0, 2.0, 1.0),
    (8.0, 0.1, 20.0),
];

fn draws(p: GigParams, seed: u64) -> Vec<f64> {
    let s = BranchSampler::new(p).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..N).map(|_| s.sample(&mut rng).unwrap()).collect()
}

#[test]
fn moments_and_ks() {
    for (i, &(nu, omega, phi)) in SAMPLER_CASES.iter().enumerate() {
        let p = GigParams::new(nu, omega, phi).unwrap();
        let mut xs = draws(p, i as u64);
        let m: Vec<f64> = (1..=4).map(|r| p.moment(r).unwrap()).collect();
        let se1 = ((m[1] - m[0] * m[0]) / N as f64).sqrt();
        let se2 = ((m[3] - m[1] * m[1]) / N as f64).sqrt();
        let z1 = (common::raw_moment(&xs, 1) - m[0]) / se1;
        let z2 = (common::raw_moment(&xs, 2) - m[1]) / se2;
        assert!(z1.abs() < 3.0, "({nu},{omega},{phi}) mean z={z1}");
        assert!(z2.abs() < 3.0, "({nu},{omega},{phi}) second moment z={z2}");

        xs.sort_by(f64::total_cmp);
        let d = common::ks_statistic(&p.cdf_sorted(&xs).unwrap());
        assert!(
            d < common::ks_critical_1pct(N),
            "({nu},{omega},{phi}) D={d}"
        );
    }
}

#[test]
fn worked_parameters_mean() {
    let p = GigParams::new(1.0, 2.0, 3.0).unwrap();
    let xs = draws(p, 7);
    let var = p.variance().unwrap();
    let z = (common::raw_moment(&xs, 1) - p.mean().unwrap()) / (var / N as f64).sqrt();
    assert!(z.abs() < 3.0, "z={z}");
}

#[test]
fn boundary_branches_sample_correctly() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for p in [
        GigParams::new(2.0, 1.5, 0.0).unwrap(),
        GigParams::new(-5.0, 0.0, 2.0).unwrap(),
    ] {
        let xs: Vec<f64> = (0..N).map(|_| sample_any(&p, &mut rng).unwrap()).collect();
        let m = p.mean().unwrap();
        let se = (p.variance().unwrap() / N as f64).sqrt();
        assert!((common::raw_moment(&xs, 1) - m).abs() < 3.0 * se);
    }
}
