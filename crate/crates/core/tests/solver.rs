use std::f64::consts::PI;

use decaylab::character::synthesize_with_character;
use decaylab::propagator::semigroup_apply;
use decaylab::solver::{
    integrate, nonlinear_term, picard_solve, run_simulation, step, Integrator, SolverConfig,
};
use decaylab::spectral::{dealias, sobolev_seminorm_sq};
use decaylab::{Error, Grid, RotationParams, SpectralField};
use num_complex::Complex64;

fn hhalf_rel(a: &SpectralField, b: &SpectralField) -> f64 {
    (sobolev_seminorm_sq(&a.sub(b).unwrap(), 0.5) / sobolev_seminorm_sq(b, 0.5)).sqrt()
}

fn config(grid: Grid, dt: f64, t_final: f64, omega: f64) -> SolverConfig {
    SolverConfig {
        grid,
        omega,
        dt,
        t_final,
        record_interval: t_final / 10.0,
        epsilon_budget: 1.0,
        dealias: true,
        nonlinear: true,
        splitting_alpha: 4.0,
    }
}

#[test]
fn zero_field_stays_zero() {
    let g = Grid::new(16, 2.0 * PI).unwrap();
    let zero = SpectralField::zeros(g);
    assert!(step(&zero, 0.01, RotationParams::new(5.0).unwrap())
        .unwrap()
        .is_zero());
    let series = run_simulation(&config(g, 0.002, 0.02, 3.0), &zero).unwrap();
    for r in &series.records {
        assert_eq!(
            (r.l2_sq, r.hhalf_sq, r.bilinear_ratio, r.energy_residual),
            (0.0, 0.0, 0.0, 0.0)
        );
        assert_eq!(r.smallness_flag, 0);
    }
}

#[test]
fn shear_mode_is_an_exact_solution() {
    // u = a cos(ξ·x) with a ⊥ ξ has (u·∇)u = 0, so only the linear flow acts
    let g = Grid::new(16, 2.0 * PI).unwrap();
    let mut u = SpectralField::zeros(g);
    let a = Complex64::new(0.4, 0.0);
    let z = Complex64::new(0.0, 0.0);
    u.set_hermitian_pair([1, 2, 0], [z, z, a]).unwrap();
    let n = nonlinear_term(&u, false);
    assert!(n.max_abs() < 1e-16);
    for omega in [0.0, 7.0] {
        let p = RotationParams::new(omega).unwrap();
        let stepped = step(&u, 0.05, p).unwrap();
        let exact = semigroup_apply(&u, 0.05, p).unwrap();
        assert!(stepped.sub(&exact).unwrap().max_abs() <= 1e-14 * exact.max_abs());
    }
}

#[test]
fn quadratic_interactions_land_on_sums_of_wavevectors() {
    // two transverse modes at k and p interact only at ±k±p (and 0, ±2k, ±2p)
    let g = Grid::new(16, 2.0 * PI).unwrap();
    let mut u = SpectralField::zeros(g);
    let z = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    u.set_hermitian_pair([1, 0, 0], [z, one, z]).unwrap();
    u.set_hermitian_pair([0, 1, 0], [z, z, one]).unwrap();
    let n = nonlinear_term(&u, false);
    let allowed = |idx: [usize; 3]| {
        let s = idx.map(|k| g.signed_index(k));
        let combos = [[1, 1, 0], [1, -1, 0], [2, 0, 0], [0, 2, 0], [0, 0, 0]];
        combos
            .iter()
            .any(|c| (0..3).all(|i| s[i] == c[i]) || (0..3).all(|i| s[i] == -c[i]))
    };
    let mut touched = 0;
    for flat in 0..g.len() {
        let m = n.mode(flat);
        let mag = m.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if mag > 1e-14 {
            assert!(
                allowed(g.unflat(flat)),
                "unexpected mode {:?}",
                g.unflat(flat)
            );
            touched += 1;
        }
    }
    assert!(touched > 0);
}

#[test]
fn linear_stepping_matches_the_semigroup() {
    let g = Grid::new(16, 4.0 * PI).unwrap();
    let u = dealias(&synthesize_with_character(0.0, g, 2, 0.3).unwrap());
    let mut c = config(g, 0.01, 0.5, 4.0);
    c.nonlinear = false;
    let (_, last) = integrate(&c, &u).unwrap();
    let exact = semigroup_apply(&u, 0.5, RotationParams::new(4.0).unwrap()).unwrap();
    assert!(last.sub(&exact).unwrap().max_abs() <= 1e-12 * exact.max_abs());
}

#[test]
fn stepper_is_fourth_order() {
    let g = Grid::new(16, 2.0 * PI).unwrap();
    let u = dealias(&synthesize_with_character(0.0, g, 5, 2.0).unwrap());
    let p = RotationParams::new(2.0).unwrap();
    let evolve = |steps: usize| {
        let it = Integrator::new(g, 0.4 / steps as f64, p, true, true).unwrap();
        let mut v = u.clone();
        for _ in 0..steps {
            v = it.step(&v).unwrap();
        }
        v
    };
    let reference = evolve(256);
    let e1 = hhalf_rel(&evolve(8), &reference);
    let e2 = hhalf_rel(&evolve(16), &reference);
    let e3 = hhalf_rel(&evolve(32), &reference);
    let (o1, o2) = ((e1 / e2).log2(), (e2 / e3).log2());
    assert!(
        e1 > 1e-10,
        "nonlinear effect too small to measure order ({e1:e})"
    );
    assert!(o1 > 3.5 && o2 > 3.5, "observed orders {o1:.2}, {o2:.2}");
}

#[test]
fn small_data_hhalf_norm_is_lyapunov() {
    let g = Grid::new(32, 8.0 * PI).unwrap();
    for omega in [0.0, 10.0] {
        let u = synthesize_with_character(0.0, g, 11, 0.05).unwrap();
        let mut c = config(g, 0.01, 1.0, omega);
        c.record_interval = 0.02;
        c.epsilon_budget = 0.05;
        let s = run_simulation(&c, &u).unwrap();
        for w in s.records.windows(2) {
            assert!(w[1].hhalf_sq <= w[0].hhalf_sq * (1.0 + 1e-8));
        }
        assert!(!s.smallness_violated());
        let worst = s
            .records
            .iter()
            .map(|r| r.energy_residual.abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-3, "energy residual {worst:e}");
    }
}

#[test]
fn budget_and_blow_up_guards() {
    let g = Grid::new(16, 2.0 * PI).unwrap();
    let u = synthesize_with_character(0.0, g, 1, 0.5).unwrap();
    let mut c = config(g, 0.002, 0.02, 0.0);
    c.epsilon_budget = 0.1;
    assert!(matches!(
        run_simulation(&c, &u),
        Err(Error::Precondition(_))
    ));
    let mut bad = u.clone();
    bad.component_mut(0)[3] = Complex64::new(f64::NAN, 0.0);
    let it = Integrator::new(g, 0.01, RotationParams::heat(), true, true).unwrap();
    assert!(matches!(
        it.step_from(&bad, None, 1.0),
        Err(Error::BlowUp { .. })
    ));
}

#[test]
fn picard_reduces_to_the_linear_flow() {
    let g = Grid::new(16, 4.0 * PI).unwrap();
    let u = dealias(&synthesize_with_character(0.5, g, 3, 0.05).unwrap());
    let p = RotationParams::new(3.0).unwrap();
    let zero_iter = picard_solve(&u, 0.25, 0, 8, p).unwrap();
    assert_eq!(zero_iter.iterations, 0);
    assert_eq!(zero_iter.solution, semigroup_apply(&u, 0.25, p).unwrap());
    let zero = picard_solve(&SpectralField::zeros(g), 0.25, 5, 8, p).unwrap();
    assert!(zero.solution.is_zero());
    assert!(zero.distances.iter().all(|&d| d == 0.0));
}

#[test]
fn picard_agrees_with_the_stepper() {
    let g = Grid::new(16, 4.0 * PI).unwrap();
    let u = dealias(&synthesize_with_character(0.0, g, 9, 0.05).unwrap());
    let p = RotationParams::new(1.0).unwrap();
    let picard = picard_solve(&u, 0.25, 20, 32, p).unwrap();
    assert!(picard
        .distances
        .windows(2)
        .all(|w| w[1] <= w[0] || w[1] < 1e-15));
    let it = Integrator::new(g, 0.25 / 64.0, p, true, true).unwrap();
    let mut v = u.clone();
    for _ in 0..64 {
        v = it.step(&v).unwrap();
    }
    assert!(hhalf_rel(&picard.solution, &v) < 1e-6);
}

#[test]
fn picard_rejects_bad_input() {
    let g = Grid::new(8, 2.0 * PI).unwrap();
    let u = SpectralField::zeros(g);
    assert!(picard_solve(&u, 0.0, 3, 4, RotationParams::heat()).is_err());
    assert!(picard_solve(&u, 1.0, 3, 1, RotationParams::heat()).is_err());
}
