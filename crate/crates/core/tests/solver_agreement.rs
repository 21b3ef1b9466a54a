use radswap_core::pde_solver::{run_coupled, CoupledConfig, InitialPairs, KineticParams};
use radswap_core::FormFactor;

fn base() -> CoupledConfig {
    CoupledConfig {
        r_max: 16.0,
        shells: 256,
        truncation: 40,
        params: KineticParams {
            kappa: 1.0,
            diff_plus: 0.25,
            diff_minus: 0.25,
            gamma_singlet: 2.0 / 3.0,
            gamma_triplet: 1.0 / 3.0,
            form_factor: FormFactor::Exponential { scale: 1.0 },
        },
        initial: InitialPairs { density: 0.5, index: 0 },
        dt: 1e-3,
        t_end: 4.0,
        checkpoints: 10,
    }
}

#[test]
fn hierarchy_matches_scalar_equation() {
    let t0 = std::time::Instant::now();
    let report = run_coupled(&base()).unwrap();
    for c in &report.checkpoints {
        println!("t={:.2} g_h={:.8} g_a={:.8} xi0_h={:.6e} xi0_s={:.6e} rel={:.3e} far={:.3e}", c.t, c.density_hierarchy, c.density_analytic, c.xi0_hierarchy, c.xi0_scalar, c.xi_relative_linf, c.far_mass);
    }
    println!("elapsed {:?}", t0.elapsed());
    assert!(report.max_xi_relative_linf < 1e-4);
    assert!(report.max_density_relative_error < 5e-3);
}

use radswap_core::pde_solver::{
    xi_from_hierarchy, xi_steady_state, HierarchyField, HierarchyStepper, SolverError, SwapMode,
    XiStepper,
};

#[test]
fn gaussian_form_factor_and_mixed_start() {
    let mut cfg = base();
    cfg.shells = 128;
    cfg.dt = 4e-3;
    cfg.t_end = 2.0;
    cfg.params.form_factor = FormFactor::Gaussian { width: 1.0 };
    cfg.initial = InitialPairs { density: 1.2, index: 3 };
    let report = run_coupled(&cfg).unwrap();
    assert!(report.max_xi_relative_linf < 1e-4, "{}", report.max_xi_relative_linf);
    assert!(report.max_density_relative_error < 5e-3);
}

#[test]
fn hierarchy_reaches_a_stationary_point() {
    let mut cfg = base();
    cfg.shells = 128;
    let grid = cfg.grid().unwrap();
    let p = cfg.params;
    let stepper = HierarchyStepper::new(grid, p).unwrap();
    let w = stepper.source_profile().to_vec();
    let mut state = HierarchyField::with_pairs(grid, cfg.truncation, 0, p.steady_density(), &w).unwrap();
    let dt = 5e-3;
    for _ in 0..3000 {
        state = stepper.step(&state, dt).unwrap();
    }
    let rate = stepper.rate(&state).unwrap();
    let residual = rate.max_abs();
    assert!(residual < 1e-6 * p.gamma_total(), "residual {residual:e}");

    // The stationary ξ must solve the linear steady-state problem.
    let xi = xi_from_hierarchy(&state).unwrap().field;
    let ss = xi_steady_state(&grid, &p, state.density()).unwrap();
    assert!(xi.relative_linf_distance(&ss) < 1e-5, "{}", xi.relative_linf_distance(&ss));
    assert!(xi.in_physical_range(1e-12));
}

#[test]
fn swapping_does_not_change_xi() {
    let mut cfg = base();
    cfg.shells = 128;
    let grid = cfg.grid().unwrap();
    let p = cfg.params;
    let exact = HierarchyStepper::new(grid, p).unwrap();
    let reset = HierarchyStepper::new(grid, p).unwrap().with_mode(SwapMode::ClassicalReset);
    let scalar = XiStepper::new(grid, p).unwrap();
    let w = exact.source_profile().to_vec();
    let mut a = HierarchyField::with_pairs(grid, cfg.truncation, 0, 0.5, &w).unwrap();
    let mut b = a.clone();
    let mut xi = radswap_core::pde_solver::XiField::new(grid, w.iter().map(|v| v / 0.5).collect()).unwrap();
    let mut g = 0.5;
    let dt = 4e-3;
    for step in 1..=750 {
        a = exact.step(&a, dt).unwrap();
        b = reset.step(&b, dt).unwrap();
        (xi, g) = scalar.step(&xi, g, dt).unwrap();
        if step % 150 == 0 {
            let xa = xi_from_hierarchy(&a).unwrap().field;
            let xb = xi_from_hierarchy(&b).unwrap().field;
            assert!(xa.relative_linf_distance(&xi) < 1e-9);
            assert!(xb.relative_linf_distance(&xi) < 1e-9);
            assert!((a.density() - b.density()).abs() < 1e-12);
        }
    }
    // Individual index populations differ: no swapping means no n ≥ 2 pairs.
    assert!(a.index_masses()[2] > 1e-3);
    assert_eq!(b.index_masses()[2], 0.0);
    assert!(b.partnerless() > 0.1);
}

#[test]
fn unstable_step_is_rejected_before_stepping() {
    let mut cfg = base();
    cfg.dt = 0.05;
    let mut calls = 0;
    let err = radswap_core::pde_solver::run_coupled_with(&cfg, |_| calls += 1).unwrap_err();
    assert!(matches!(err, SolverError::StabilityViolation { .. }));
    assert_eq!(calls, 0);
}

#[test]
fn no_source_and_no_pairs_stays_empty() {
    let mut cfg = base();
    cfg.shells = 64;
    cfg.t_end = 0.5;
    cfg.params.gamma_singlet = 0.0;
    cfg.params.gamma_triplet = 0.0;
    cfg.initial = InitialPairs { density: 0.0, index: 0 };
    let report = run_coupled(&cfg).unwrap();
    for c in &report.checkpoints {
        assert_eq!(c.density_hierarchy, 0.0);
        assert_eq!(c.density_scalar, 0.0);
        assert!(c.xi_hierarchy.iter().chain(&c.xi_scalar).all(|v| *v == 0.0));
    }
}
