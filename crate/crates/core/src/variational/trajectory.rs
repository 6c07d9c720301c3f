use crate::physics::PhysicsParams;

use super::VariationalState;

/// Quantum velocity `(σ̇/2σ)(x - q) + q̇`.
pub fn velocity_field(state: &VariationalState, params: &PhysicsParams, x: f64) -> f64 {
    state.sigma_dot / (2.0 * state.sigma) * (x - state.q) + state.q_dot(params)
}

/// Pathlines of the velocity field, one row per seed with one entry per
/// series sample: `x(t) = q(t) + √(σ(t)/σ(0))·(x₀ - q(0))`.
pub fn bohmian_trajectories(seeds: &[f64], series: &[VariationalState]) -> Vec<Vec<f64>> {
    let Some(first) = series.first() else {
        return vec![Vec::new(); seeds.len()];
    };
    let scales: Vec<f64> = series
        .iter()
        .map(|s| (s.sigma / first.sigma).sqrt())
        .collect();
    seeds
        .iter()
        .map(|&x0| {
            let offset = x0 - first.q;
            series
                .iter()
                .zip(&scales)
                .map(|(s, &scale)| s.q + scale * offset)
                .collect()
        })
        .collect()
}
