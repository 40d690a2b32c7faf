use std::f64::consts::PI;
use std::sync::Arc;

use dlv_core::model::{DlvModel, JetPoint};
use dlv_core::simulate::*;
use dlv_core::solutions::{instantiate, param_map, reference, ClosedFormSolution, PdeField, SolutionId};
use dlv_core::{DomainError, SimError, Value};

/// `u = e^{-k²t/λ} cos(kx)` for the pure-diffusion model.
struct CosMode {
    model: DlvModel,
    k: f64,
}

impl CosMode {
    fn new(k: f64) -> Self {
        let z = Value::int(0);
        let model = DlvModel::new(vec![Value::int(2); 2], vec![z; 2], vec![vec![z; 2]; 2]).unwrap();
        CosMode { model, k }
    }
}

impl PdeField for CosMode {
    fn model(&self) -> &DlvModel {
        &self.model
    }

    fn jet(&self, t: f64, x: f64) -> Result<JetPoint, DomainError> {
        let (k, l) = (self.k, 2.0);
        let e = (-k * k * t / l).exp();
        let (c, s) = ((k * x).cos(), (k * x).sin());
        Ok(JetPoint {
            t,
            x,
            u: vec![e * c; 2],
            u_t: vec![-k * k / l * e * c; 2],
            u_x: vec![-k * e * s; 2],
            u_xx: vec![-k * k * e * c; 2],
        })
    }
}

fn trig_neumann() -> (ClosedFormSolution, Grid1D) {
    // C2 = 0 makes x = 0 and x = π/k zero-flux ends.
    let sol = instantiate(SolutionId::CD11_TRIG, &param_map([("C2", Value::int(0))])).unwrap();
    let k = (-sol.derived_value("beta").unwrap().to_f64() * 2.0).sqrt();
    (sol, Grid1D::new(0.0, PI / k, 101).unwrap())
}

fn fisher_grid(nx: usize) -> (ClosedFormSolution, Grid1D) {
    let sol = reference(SolutionId::FISHER_FRONT);
    let l = truncation_half_width(&sol, 0.0).unwrap();
    (sol, Grid1D::new(-l, l, nx).unwrap())
}

fn refine(g: &Grid1D) -> Vec<Grid1D> {
    [101, 201, 401].iter().map(|&n| Grid1D::new(g.a, g.b, n).unwrap()).collect()
}

#[test]
fn grid_invariants() {
    assert!(matches!(Grid1D::new(0.0, 1.0, 7), Err(SimError::Grid(_))));
    assert!(Grid1D::new(1.0, 1.0, 10).is_err());
    let g = Grid1D::new(-1.0, 1.0, 11).unwrap();
    assert!((g.dx() - 0.2).abs() < 1e-15);
    assert_eq!(g.x(10), 1.0);
    assert_eq!(g.nodes().len(), 11);
}

#[test]
fn initial_state_reproduces_the_closed_form() {
    let (sol, g) = fisher_grid(201);
    let s = init_from_solution(&sol, &g, 0.0).unwrap();
    for j in [0, 57, 100, 200] {
        assert_eq!(s.values[0][j], sol.eval(0.0, g.x(j)).unwrap()[0]);
    }
    assert_eq!(error_vs_solution(&g, &s, &sol).unwrap(), (0.0, 0.0));

    let comp = reference(SolutionId::CD11_COMP);
    let w = comp.window();
    let g = Grid1D::new(w.x.0, w.x.1, 65).unwrap();
    let s = init_from_solution(&comp, &g, 0.0).unwrap();
    assert_eq!(error_vs_solution(&g, &s, &comp).unwrap(), (0.0, 0.0));
}

#[test]
fn singular_node_is_named() {
    let sol = reference(SolutionId::FISHER_COTH);
    let g = Grid1D::new(-1.0, 1.0, 21).unwrap();
    match init_from_solution(&sol, &g, 0.0) {
        Err(SimError::SingularNode { node, x, .. }) => {
            assert_eq!(node, 10);
            assert!(x.abs() < 1e-12);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn steady_state_is_a_fixed_point() {
    let comp = reference(SolutionId::CD11_COMP);
    let model = comp.model().clone();
    let g = Grid1D::new(0.0, 3.0, 40).unwrap();
    for ss in model.steady_states().states {
        let s0 = FieldState { t: 0.0, values: ss.u.iter().map(|&v| vec![v; g.nx]).collect() };
        for scheme in [Scheme::ExplicitRK4, Scheme::Imex] {
            let s1 = step(&model, &g, &s0, &BoundaryCondition::neumann(2), 1e-3, scheme).unwrap();
            for (a, b) in s1.values.iter().flatten().zip(s0.values.iter().flatten()) {
                assert!((a - b).abs() <= 1e-14, "{a} vs {b}");
            }
        }
    }
}

#[test]
fn fourier_mode_decays_at_the_heat_rate() {
    let k = 3.0;
    let mode = CosMode::new(k);
    let g = Grid1D::new(0.0, 2.0 * PI / k, 201).unwrap();
    let s0 = init_from_solution(&mode, &g, 0.0).unwrap();
    let dt = 0.4 * cfl_limit(mode.model(), &g);
    let s1 = step(mode.model(), &g, &s0, &BoundaryCondition::neumann(2), dt, Scheme::ExplicitRK4).unwrap();
    let factor = (-k * k * dt / 2.0).exp();
    let dx = g.dx();
    for j in 0..g.nx {
        let want = factor * s0.values[0][j];
        assert!((s1.values[0][j] - want).abs() <= dt.powi(3) + dt * dx * dx * k.powi(4), "node {j}");
    }
}

#[test]
fn pure_diffusion_converges_at_second_order() {
    let mode = CosMode::new(2.0);
    let g = Grid1D::new(0.0, PI, 101).unwrap();
    let study = convergence_order(mode.model(), &mode, &refine(&g), &BoundaryCondition::neumann(2), 0.0, 0.5, 0.4, Scheme::ExplicitRK4)
        .unwrap();
    assert!(study.order >= 1.9, "{study:?}");
}

#[test]
fn rk4_local_error_is_dominated_by_the_stencil() {
    let sol = reference(SolutionId::CD11_TRIG);
    let w = sol.window();
    let bc = BoundaryCondition::from_solution(Arc::new(sol.clone()));
    let mut last = f64::INFINITY;
    for nx in [51, 101, 201] {
        let g = Grid1D::new(w.x.0, w.x.1, nx).unwrap();
        let dt = cfl_limit(sol.model(), &g);
        let s0 = init_from_solution(&sol, &g, 0.0).unwrap();
        let s1 = step(sol.model(), &g, &s0, &bc, dt, Scheme::ExplicitRK4).unwrap();
        let (err, _) = error_vs_solution(&g, &s1, &sol).unwrap();
        let dx = g.dx();
        assert!(err <= 2.0 * (dt.powi(5) + dt * dx * dx), "nx={nx}: {err}");
        assert!(err < last / 10.0);
        last = err;
    }
}

#[test]
fn trig_window_converges_at_second_order() {
    let (sol, g) = trig_neumann();
    let study = convergence_order(sol.model(), &sol, &refine(&g), &BoundaryCondition::neumann(2), 0.0, 0.5, 0.4, Scheme::ExplicitRK4)
        .unwrap();
    assert!(study.order >= 1.9, "{study:?}");

    // Dirichlet data from the closed form on the default window.
    let sol = reference(SolutionId::CD11_TRIG);
    let w = sol.window();
    let g = Grid1D::new(w.x.0, w.x.1, 101).unwrap();
    let bc = BoundaryCondition::from_solution(Arc::new(sol.clone()));
    let study = convergence_order(sol.model(), &sol, &refine(&g), &bc, 0.0, 0.5, 0.4, Scheme::ExplicitRK4).unwrap();
    assert!(study.order >= 1.9, "{study:?}");
}

#[test]
fn fisher_front_converges_at_second_order() {
    let (sol, g) = fisher_grid(101);
    let study =
        convergence_order(sol.model(), &sol, &refine(&g), &BoundaryCondition::neumann(2), 0.0, 0.5, 0.4, Scheme::ExplicitRK4).unwrap();
    assert!(study.order >= 1.9, "{study:?}");
}

#[test]
fn fisher_truncated_run_tracks_the_front() {
    let (sol, g) = fisher_grid(801);
    let a = 24.0 * sol.front().unwrap().mu.to_f64().powi(2);
    assert!(g.b >= 40.0 / a.sqrt() - 1e-12);
    let cfg = SimConfig { dt: 0.4 * g.dx() * g.dx() * sol.model().lambda_f64().iter().cloned().fold(f64::INFINITY, f64::min), t_final: 1.0, scheme: Scheme::ExplicitRK4, snapshot_stride: 1000 };
    let traj = run(sol.model(), &g, init_from_solution(&sol, &g, 0.0).unwrap(), &BoundaryCondition::neumann(2), &cfg).unwrap();
    assert!(traj.failure.is_none());
    assert_eq!(traj.last().t, 1.0);
    let (linf, _) = error_vs_solution(&g, traj.last(), &sol).unwrap();
    assert!(linf <= 5.0 * g.dx() * g.dx() + 1e-6, "{linf}");
}

#[test]
fn competition_dirichlet_problem_is_reproduced() {
    let sol = reference(SolutionId::CD11_COMP);
    let w = sol.window();
    let g = Grid1D::new(w.x.0, w.x.1, 801).unwrap();
    let model = sol.model();
    let asym = sol.time_asymptote().unwrap();
    // u = a1/b, v = 0 at both ends.
    assert_eq!(sol.eval(0.3, g.a).unwrap(), asym);
    let bc = BoundaryCondition::dirichlet(&asym, &asym);
    let cfg = SimConfig { dt: cfl_limit(model, &g), t_final: 1.0, scheme: Scheme::ExplicitRK4, snapshot_stride: usize::MAX };
    let traj = run(model, &g, init_from_solution(&sol, &g, 0.0).unwrap(), &bc, &cfg).unwrap();
    let (linf, _) = error_vs_solution(&g, traj.last(), &sol).unwrap();
    assert!(linf <= 5.0 * g.dx() * g.dx(), "{linf}");
}

#[test]
fn perturbed_competition_data_reaches_the_same_asymptote() {
    let sol = reference(SolutionId::CD11_COMP);
    let w = sol.window();
    let g = Grid1D::new(w.x.0, w.x.1, 81).unwrap();
    let asym = sol.time_asymptote().unwrap();
    let mut s0 = init_from_solution(&sol, &g, 0.0).unwrap();
    let mid = (g.a + g.b) / 2.0;
    for j in 1..g.nx - 1 {
        s0.values[1][j] += 1e-3 * (-(g.x(j) - mid).powi(2) * 20.0).exp();
    }
    let bc = BoundaryCondition::dirichlet(&asym, &asym);
    let cfg = SimConfig { dt: 1e-3, t_final: 20.0, scheme: Scheme::Imex, snapshot_stride: usize::MAX };
    let traj = run(sol.model(), &g, s0, &bc, &cfg).unwrap();
    let last = traj.last();
    for (i, v) in last.values.iter().enumerate() {
        for x in v {
            assert!((x - asym[i]).abs() < 1e-3, "component {i}: {x}");
        }
    }
}

#[test]
fn three_component_dirichlet_run_approaches_the_asymptote() {
    let sol = reference(SolutionId::CD13_3COMP);
    assert_eq!(sol.derived_value("delta"), Some(Value::ratio(-5, 2)));
    let w = sol.window();
    assert!((w.x.1 - PI / 5f64.sqrt()).abs() < 1e-12);
    let g = Grid1D::new(w.x.0, w.x.1, 81).unwrap();
    let left = sol.eval(0.0, g.a).unwrap();
    let right = sol.eval(0.0, g.b).unwrap();
    let bc = BoundaryCondition::dirichlet(&left, &right);
    let cfg = SimConfig { dt: 0.9 * cfl_limit(sol.model(), &g), t_final: 10.0, scheme: Scheme::ExplicitRK4, snapshot_stride: usize::MAX };
    let traj = run(sol.model(), &g, init_from_solution(&sol, &g, 0.0).unwrap(), &bc, &cfg).unwrap();
    let asym = sol.time_asymptote().unwrap();
    for (i, v) in traj.last().values.iter().enumerate() {
        for x in v {
            assert!((x - asym[i]).abs() < 1e-3, "component {i}: {x} vs {}", asym[i]);
        }
    }
}

#[test]
fn imex_tracks_the_closed_form() {
    let sol = reference(SolutionId::CD11_TRIG);
    let w = sol.window();
    let bc = BoundaryCondition::from_solution(Arc::new(sol.clone()));
    let mut errs = Vec::new();
    for dt in [0.02, 0.01, 0.005] {
        let g = Grid1D::new(w.x.0, w.x.1, 801).unwrap();
        let cfg = SimConfig { dt, t_final: 0.5, scheme: Scheme::Imex, snapshot_stride: usize::MAX };
        assert!(dt > cfl_limit(sol.model(), &g));
        let traj = run(sol.model(), &g, init_from_solution(&sol, &g, 0.0).unwrap(), &bc, &cfg).unwrap();
        errs.push(error_vs_solution(&g, traj.last(), &sol).unwrap().0);
    }
    assert!(errs[2] < 1e-2);
    // First order in time from the explicit reaction.
    assert!(errs[0] / errs[1] > 1.6 && errs[1] / errs[2] > 1.6, "{errs:?}");
}

#[test]
fn zero_flux_diffusion_conserves_mass() {
    let mode = CosMode::new(1.0);
    let g = Grid1D::new(0.0, 5.0, 64).unwrap();
    let mut s0 = init_from_solution(&mode, &g, 0.0).unwrap();
    for (j, v) in s0.values[0].iter_mut().enumerate() {
        *v += (j as f64 * 0.37).sin().powi(2);
    }
    let before = s0.integrals(&g)[0];
    for scheme in [Scheme::ExplicitRK4, Scheme::Imex] {
        let cfg = SimConfig { dt: cfl_limit(mode.model(), &g), t_final: 1.0, scheme, snapshot_stride: 1 };
        let traj = run(mode.model(), &g, s0.clone(), &BoundaryCondition::neumann(2), &cfg).unwrap();
        let after = traj.last().integrals(&g)[0];
        assert!((after - before).abs() <= 1e-10, "{scheme:?}: {before} → {after}");
    }
}

#[test]
fn runs_are_deterministic_and_strided() {
    let (sol, g) = trig_neumann();
    let cfg = SimConfig { dt: cfl_limit(sol.model(), &g), t_final: 0.1, scheme: Scheme::ExplicitRK4, snapshot_stride: 10 };
    let s0 = init_from_solution(&sol, &g, 0.0).unwrap();
    let a = run(sol.model(), &g, s0.clone(), &BoundaryCondition::neumann(2), &cfg).unwrap();
    let b = run(sol.model(), &g, s0, &BoundaryCondition::neumann(2), &cfg).unwrap();
    assert_eq!(a, b);
    let steps = (0.1 / cfg.dt).ceil() as usize;
    assert_eq!(a.snapshots.len(), 1 + steps / 10 + usize::from(steps % 10 != 0));
    assert_eq!(a.snapshots[0].t, 0.0);
    assert_eq!(a.last().t, 0.1);
    assert_eq!(snapshot_csv(&g, &a.snapshots), snapshot_csv(&g, &b.snapshots));
}

#[test]
fn explicit_step_respects_the_diffusion_limit() {
    let (sol, g) = trig_neumann();
    let limit = cfl_limit(sol.model(), &g);
    let lmin = sol.model().lambda_f64().iter().cloned().fold(f64::INFINITY, f64::min);
    assert!((limit - 0.9 * lmin * g.dx() * g.dx() / 2.0).abs() < 1e-18);
    let s0 = init_from_solution(&sol, &g, 0.0).unwrap();
    let bc = BoundaryCondition::neumann(2);
    assert!(matches!(step(sol.model(), &g, &s0, &bc, 1.01 * limit, Scheme::ExplicitRK4), Err(SimError::Cfl { .. })));
    assert!(step(sol.model(), &g, &s0, &bc, 1.01 * limit, Scheme::Imex).is_ok());
    assert!(matches!(step(sol.model(), &g, &s0, &BoundaryCondition::neumann(3), limit, Scheme::ExplicitRK4), Err(SimError::Dimension(_))));
}

#[test]
fn data_next_to_the_singular_plane_is_reported_as_blow_up() {
    let sol = reference(SolutionId::FISHER_COTH);
    let g = Grid1D::new(0.02, 4.0, 200).unwrap();
    let s0 = init_from_solution(&sol, &g, 0.0).unwrap();
    assert!(s0.values.iter().flatten().all(|v| v.is_finite()));
    let cfg = SimConfig { dt: cfl_limit(sol.model(), &g), t_final: 1.0, scheme: Scheme::ExplicitRK4, snapshot_stride: 1 };
    let traj = run(sol.model(), &g, s0, &BoundaryCondition::neumann(2), &cfg).unwrap();
    match traj.failure {
        Some(SimError::BlowUp { t, .. }) => {
            assert!(t > 0.0 && t <= 1.0);
            assert!(traj.snapshots.iter().flat_map(|s| s.values.iter().flatten()).all(|v| v.is_finite()));
        }
        other => panic!("expected blow-up, got {other:?}"),
    }
}

#[test]
fn snapshot_and_manifest_layout() {
    let (sol, g) = trig_neumann();
    let s0 = init_from_solution(&sol, &g, 0.0).unwrap();
    let csv = snapshot_csv(&g, &[s0]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,x,u1,u2"));
    assert_eq!(lines.count(), g.nx);
    let cfg = SimConfig { dt: 1e-4, t_final: 1.0, scheme: Scheme::Imex, snapshot_stride: 5 };
    let text = manifest(sol.model(), &g, &BoundaryCondition::dirichlet(&[1.0, 0.0], &[1.0, 0.0]), &cfg);
    assert!(text.contains("nx = 101"));
    assert!(text.contains("scheme = imex"));
    assert!(text.contains("bc_left = dirichlet(1.0000000000000000e0),dirichlet(0.0000000000000000e0)"));
    assert!(text.contains(&format!("model_hash = {:016x}", sol.model().fingerprint())));
}
