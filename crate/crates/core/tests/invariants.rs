use std::f64::consts::PI;

use proptest::prelude::*;

use gpwave::madelung::{decompose, residuals, DEFAULT_EPS_MASK};
use gpwave::spectral::{evolve, initial_field_from_state, observables, split_step};
use gpwave::variational::{propagate, synthesize, InteractionVariant, Integrator};
use gpwave::{Grid, OmegaSquaredSchedule, PhysicsParams, VariationalState, WaveField};

fn params(g: f64) -> PhysicsParams {
    PhysicsParams::new(1.0, 1.0, g, OmegaSquaredSchedule::constant(1.0))
}

fn grid() -> Grid {
    Grid::new(-16.0, 16.0, 512).unwrap()
}

fn final_field(start: &WaveField, p: &PhysicsParams, t0: f64, t1: f64, dt: f64) -> WaveField {
    let mut last = None;
    evolve(start, p, t0, t1, dt, usize::MAX, |f| last = Some(f.clone())).unwrap();
    last.unwrap()
}

#[test]
fn decomposed_phase_matches_analytic_phase_up_to_a_constant() {
    let p = params(0.7);
    let s = VariationalState {
        t: 0.0,
        q: -0.4,
        p: 0.9,
        sigma: 1.1,
        sigma_dot: -0.3,
        s0: 2.5,
    };
    let psi = synthesize(&s, &p, &grid()).unwrap();
    let m = decompose(&psi, &p, DEFAULT_EPS_MASK).unwrap();
    let g = grid();
    let offsets: Vec<f64> = (0..g.n())
        .filter(|&j| m.mask[j])
        .map(|j| m.phase[j] - s.phase_at(&p, g.x(j)))
        .collect();
    let c = offsets[0];
    // the unwrapped phase differs from the analytic one by a multiple of 2π
    assert!(((c / (2.0 * PI)).round() * 2.0 * PI - c).abs() < 1e-9, "offset {c}");
    for o in offsets {
        assert!((o - c).abs() < 1e-9);
    }
}

#[test]
fn gp_potential_of_synthesized_packet() {
    let p = params(2.0);
    let s = VariationalState::from_initial_conditions(&p, 0.5, 0.0, 0.8, 0.0);
    let psi = synthesize(&s, &p, &grid()).unwrap();
    let m = decompose(&psi, &p, DEFAULT_EPS_MASK).unwrap();
    let j = m
        .rho
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(j, _)| j)
        .unwrap();
    assert!((m.gp_potential[j] - 2.0 * m.rho[j]).abs() < 1e-15);
    // quantum potential of a Gaussian: ℏ²/(2mσ)·(1 - (x-q)²/σ)
    for (k, &inside) in m.mask.iter().enumerate() {
        if inside {
            let d = grid().x(k) - s.q;
            let exact = 0.5 / s.sigma * (1.0 - d * d / s.sigma);
            assert!((m.quantum_potential[k] - exact).abs() < 1e-6, "x = {}", grid().x(k));
        }
    }
}

#[test]
fn residuals_ignore_global_phase() {
    let p = params(1.0);
    let s = VariationalState::from_initial_conditions(&p, 1.0, 0.3, 1.2, 0.0);
    let a = initial_field_from_state(&s, &p, &grid()).unwrap();
    let b = split_step(&a, &p, 0.0, 1e-3).unwrap();
    let r0 = residuals(&a, &b, &p, DEFAULT_EPS_MASK).unwrap();
    let alpha = 1.234;
    let r1 = residuals(&a.with_global_phase(alpha), &b.with_global_phase(alpha), &p, DEFAULT_EPS_MASK).unwrap();
    assert!((r0.continuity.max_norm - r1.continuity.max_norm).abs() < 1e-10);
    assert!((r0.hamilton_jacobi.max_norm - r1.hamilton_jacobi.max_norm).abs() < 1e-8);
    assert!((r0.euler.max_norm - r1.euler.max_norm).abs() < 1e-8);
}

#[test]
fn spectral_evolution_is_time_reversible() {
    // Conjugation reverses the flow of a constant-trap GPE.
    let p = params(2.0);
    let s = VariationalState::from_initial_conditions(&p, 1.0, 0.5, 1.0, 0.0);
    let start = initial_field_from_state(&s, &p, &grid()).unwrap();
    let forward = final_field(&start, &p, 0.0, 1.0, 1e-3);
    let mut back = forward.clone();
    back.values.iter_mut().for_each(|v| *v = v.conj());
    let returned = final_field(&back, &p, 0.0, 1.0, 1e-3);
    let err = returned
        .values
        .iter()
        .zip(&start.values)
        .map(|(a, b)| (a.conj() - b).norm())
        .fold(0.0, f64::max);
    assert!(err < 1e-10, "{err}");
}

#[test]
fn variational_evolution_is_time_reversible() {
    let p = params(1.5);
    let s = VariationalState::from_initial_conditions(&p, 0.8, -0.2, 1.4, 0.3);
    let v = InteractionVariant::default();
    let end = *propagate(&s, &p, v, 3.0, 1e-3, Integrator::Rk4, 1000).unwrap().last().unwrap();
    let flipped = VariationalState {
        t: 0.0,
        p: -end.p,
        sigma_dot: -end.sigma_dot,
        ..end
    };
    let back = *propagate(&flipped, &p, v, 3.0, 1e-3, Integrator::Rk4, 1000).unwrap().last().unwrap();
    assert!((back.q - s.q).abs() < 1e-10);
    assert!((back.p + s.p).abs() < 1e-10);
    assert!((back.sigma - s.sigma).abs() < 1e-10);
    assert!((back.sigma_dot + s.sigma_dot).abs() < 1e-10);
}

#[test]
fn centre_motion_is_independent_of_coupling_and_width() {
    let base = propagate(
        &VariationalState::from_initial_conditions(&params(0.0), 1.0, 0.2, 1.0, 0.0),
        &params(0.0),
        InteractionVariant::default(),
        5.0,
        1e-2,
        Integrator::Rk4,
        1,
    )
    .unwrap();
    for (g, sigma0) in [(3.0, 1.0), (0.0, 2.5), (-0.5, 0.6)] {
        let p = params(g);
        let other = propagate(
            &VariationalState::from_initial_conditions(&p, 1.0, 0.2, sigma0, 0.0),
            &p,
            InteractionVariant::default(),
            5.0,
            1e-2,
            Integrator::Rk4,
            1,
        )
        .unwrap();
        for (a, b) in base.iter().zip(&other) {
            assert_eq!(a.q, b.q);
            assert_eq!(a.p, b.p);
        }
    }
}

#[test]
fn kohn_mode_in_modulated_trap() {
    // ⟨x⟩ follows the classical trajectory even when ω² varies in time.
    let p = PhysicsParams::new(
        1.0,
        1.0,
        3.0,
        OmegaSquaredSchedule::Modulated {
            omega0_sq: 1.0,
            epsilon: 0.3,
            big_omega: 1.7,
        },
    );
    let s = VariationalState::from_initial_conditions(&p, 1.0, 0.0, 1.0, 0.0);
    let var = propagate(&s, &p, InteractionVariant::default(), 2.0 * PI, 1e-3, Integrator::Rk4, 10).unwrap();
    let start = initial_field_from_state(&s, &p, &grid()).unwrap();
    let pde = evolve(&start, &p, 0.0, 2.0 * PI, 1e-3, 10, |_| {}).unwrap();
    let dev = var.iter().zip(&pde).map(|(v, o)| (v.q - o.mean_x).abs()).fold(0.0, f64::max);
    assert!(dev < 1e-5, "{dev}");
}

#[test]
fn coherent_state_keeps_its_width() {
    let p = params(0.0);
    let s = VariationalState::from_initial_conditions(&p, 2.0, 0.0, 1.0, 0.0);
    let start = initial_field_from_state(&s, &p, &grid()).unwrap();
    let pde = evolve(&start, &p, 0.0, 2.0 * PI, 1e-3, 100, |_| {}).unwrap();
    for o in pde {
        assert!((o.var_x - 0.5).abs() < 1e-6);
    }
}

#[test]
fn synthesized_packet_energy_matches_variational_energy_at_g0() {
    // E = p²/2m + ½mω²q² + ℏ²/(4mσ) + mσ̇²/(16σ) + ¼mω²σ for a Gaussian.
    let p = params(0.0);
    let s = VariationalState {
        t: 0.0,
        q: 0.5,
        p: 0.3,
        sigma: 1.5,
        sigma_dot: 0.4,
        s0: 0.0,
    };
    let psi = synthesize(&s, &p, &grid()).unwrap();
    let e = observables(&psi, &p).energy;
    let exact = 0.5 * s.p * s.p + 0.5 * s.q * s.q + 0.25 / s.sigma + s.sigma_dot.powi(2) / (16.0 * s.sigma) + 0.25 * s.sigma;
    assert!((e - exact).abs() < 1e-10, "{e} vs {exact}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn synthesis_round_trip(q in -3.0..3.0f64, p in -2.0..2.0f64, sigma in 0.3..3.0f64, sd in -1.0..1.0f64) {
        let params = params(1.0);
        let s = VariationalState { t: 0.0, q, p, sigma, sigma_dot: sd, s0: 0.0 };
        let g = grid();
        let psi = synthesize(&s, &params, &g).unwrap();
        prop_assert!((psi.norm() - 1.0).abs() < 1e-12);
        let m = decompose(&psi, &params, DEFAULT_EPS_MASK).unwrap();
        for j in 0..g.n() {
            if m.mask[j] {
                let x = g.x(j);
                prop_assert!((m.rho[j] - s.density_at(x)).abs() < 1e-10);
                let v = gpwave::variational::velocity_field(&s, &params, x);
                prop_assert!((m.v_qu[j] - v).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn single_step_preserves_norm(g in -2.0..5.0f64, x0 in -2.0..2.0f64, sigma in 0.5..2.0f64) {
        let p = params(g);
        let s = VariationalState::from_initial_conditions(&p, x0, 0.0, sigma, 0.0);
        let f = initial_field_from_state(&s, &p, &grid()).unwrap();
        let next = split_step(&f, &p, 0.0, 1e-3).unwrap();
        prop_assert!((next.norm() - f.norm()).abs() < 1e-14);
    }
}
