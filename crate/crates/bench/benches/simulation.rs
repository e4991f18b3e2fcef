use criterion::{criterion_group, criterion_main, Criterion};
use opbayes::{
    CellModel, ExpertPanel, FrequencyCellState, GammaParams, ParetoCellState, Severity, Simulation,
};

fn cell() -> CellModel {
    let freq = FrequencyCellState::with_counts(
        GammaParams::new(3.407, 0.147).unwrap(),
        1.0,
        vec![0, 0, 0, 0, 1, 0, 1, 1, 1, 0, 2, 1, 1, 2, 0],
        ExpertPanel::new(vec![0.7], 4.0).unwrap(),
    )
    .unwrap();
    let sev = ParetoCellState::with_losses(
        GammaParams::new(4.0, 1.125).unwrap(),
        1.0,
        vec![
            1.17, 1.29, 1.00, 1.55, 2.66, 1.02, 1.28, 1.10, 1.06, 1.02, 1.59, 1.35, 1.91, 1.23,
            1.03,
        ],
        ExpertPanel::new(vec![3.5], 4.0).unwrap(),
    )
    .unwrap();
    CellModel::new(freq, Severity::Pareto(sev))
}

fn var(c: &mut Criterion) {
    let cell = cell();
    let mut g = c.benchmark_group("var_1e4_paths");
    g.sample_size(20);
    for workers in [1, 4] {
        g.bench_function(format!("{workers}_workers"), |b| {
            b.iter(|| {
                Simulation::new(10_000, 3)
                    .workers(workers)
                    .var(&cell, 0.999)
                    .unwrap()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, var);
criterion_main!(benches);
