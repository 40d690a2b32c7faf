use std::sync::Arc;

use dlv_core::solutions::{reference, residual_sweep, PdeField, SolutionId, Window};
use dlv_core::symmetry::fields::{NullLineField, SemiCoupledField};
use dlv_core::symmetry::{
    g_function, generating_operator, invariant_surface_residual, lie_transform, operator_catalog, registered_pairs,
    relative_surface_residual, GBranch, SymmetryOperator,
};
use dlv_core::{DlvModel, SymmetryError, Value};

fn v(n: i64) -> Value {
    Value::int(n)
}

fn find(model: &DlvModel, id: &str) -> SymmetryOperator {
    operator_catalog(model).into_iter().find(|o| o.id() == id).unwrap_or_else(|| panic!("no operator {id}"))
}

#[test]
fn registered_pairs_satisfy_invariant_surface_conditions() {
    for (op_id, sid) in registered_pairs() {
        let sol = reference(sid);
        let op = generating_operator(&sol).unwrap();
        assert_eq!(op.id(), op_id);
        let mut checked = 0;
        for (t, x) in sol.window().grid(9) {
            match relative_surface_residual(&op, &sol, t, x) {
                Ok(r) => {
                    assert!(r <= 1e-10, "{op_id} vs {sid} at ({t},{x}): {r:e}");
                    checked += 1;
                }
                Err(SymmetryError::Domain(_)) => {}
                Err(e) => panic!("{e}"),
            }
        }
        assert!(checked > 70, "{sid}: only {checked} points checked");
    }
}

#[test]
fn affine_operator_listed_for_equal_row_system() {
    let m = DlvModel::two_component([v(2), v(1)], [v(3), v(4)], (v(1), v(1)), (v(1), v(1))).unwrap();
    let ids: Vec<String> = operator_catalog(&m).iter().map(|o| o.id().to_string()).collect();
    for id in ["Pt", "Px", "Q_uv_affine", "Q_uv_u", "Q_uv_v"] {
        assert!(ids.contains(&id.to_string()), "{ids:?}");
    }
    let op = find(&m, "Q_uv_affine");
    let c = op.coefficients(0.0, 0.0, &[1.0, 2.0]).unwrap();
    assert_eq!((c.xi0, c.xi1), (1.0, 0.0));
    assert_eq!(c.eta, vec![-(3.0 * 2.0 + 4.0 + 12.0), 22.0]);
}

#[test]
fn zero_rates_admit_dilation() {
    let m = DlvModel::two_component([v(1), v(3)], [v(0), v(0)], (v(-1), v(-2)), (v(-1), v(-1))).unwrap();
    let ids: Vec<String> = operator_catalog(&m).iter().map(|o| o.id().to_string()).collect();
    assert_eq!(ids, ["Pt", "Px", "D"]);
}

#[test]
fn translations_are_never_removed() {
    for sol in dlv_core::solutions::all_references() {
        let ids: Vec<String> = operator_catalog(sol.model()).iter().map(|o| o.id().to_string()).collect();
        assert_eq!(&ids[..2], ["Pt", "Px"]);
    }
}

#[test]
fn space_shift_preserves_fisher_front() {
    let sol = reference(SolutionId::FISHER_FRONT);
    let op = find(sol.model(), "Px");
    let tr = lie_transform(&op, 1.7, Arc::new(sol.clone())).unwrap();
    let (r, _) = residual_sweep(&tr, sol.window(), 21);
    assert!(r <= 1e-9);
    assert_eq!(tr.eval(0.2, 1.7).unwrap(), sol.eval(0.2, 0.0).unwrap());
}

#[test]
fn dilation_identity_and_group_law() {
    let f = NullLineField::new(v(2), 0.7, 1.3);
    let op = find(f.model(), "D");
    let base: Arc<dyn PdeField> = Arc::new(f.clone());
    let id = lie_transform(&op, 0.0, base.clone()).unwrap();
    assert_eq!(id.eval(0.3, 0.4).unwrap(), f.eval(0.3, 0.4).unwrap());
    let a = lie_transform(&op, 0.3, base.clone()).unwrap();
    let ab = lie_transform(&op, 0.5, Arc::new(a)).unwrap();
    let c = lie_transform(&op, 0.8, base).unwrap();
    let w = Window { t: (0.0, 1.0), x: (-2.0, 2.0) };
    for (t, x) in w.grid(7) {
        let (p, q) = (ab.eval(t, x).unwrap(), c.eval(t, x).unwrap());
        assert!(p.iter().zip(&q).all(|(a, b)| (a - b).abs() <= 1e-12));
        assert!(c.relative_residual(t, x).unwrap() <= 1e-12);
    }
}

#[test]
fn semi_coupled_flows_preserve_solutions() {
    let w = Window { t: (0.0, 1.0), x: (-2.0, 2.0) };
    // Logistic first equation (a1 != 0) and the pure quadratic one (a1 = 0).
    for (a1, b1, expected) in [(v(1), v(-2), "shift_v_logistic"), (v(0), v(-1), "R")] {
        let f = SemiCoupledField::new(Value::ratio(3, 2), a1, b1, 0.4, 1.0, 0.5, 2.0);
        let (r0, _) = residual_sweep(&f, w, 11);
        assert!(r0 <= 1e-12, "{r0:e}");
        let ops = operator_catalog(f.model());
        assert!(ops.iter().any(|o| o.id() == expected));
        let base: Arc<dyn PdeField> = Arc::new(f);
        for op in ops.iter().filter(|o| o.flow().is_some()) {
            for eps in [0.3, -0.8] {
                let tr = lie_transform(op, eps, base.clone()).unwrap();
                let (r, _) = residual_sweep(&tr, w, 11);
                assert!(r <= 1e-11, "{} eps={eps}: {r:e}", op.id());
            }
            let once = lie_transform(op, 0.7, base.clone()).unwrap();
            let twice = lie_transform(op, 0.4, Arc::new(lie_transform(op, 0.3, base.clone()).unwrap())).unwrap();
            for (t, x) in w.grid(5) {
                let (p, q) = (once.eval(t, x).unwrap(), twice.eval(t, x).unwrap());
                assert!(p.iter().zip(&q).all(|(a, b)| (a - b).abs() <= 1e-12), "{}", op.id());
            }
        }
    }
}

#[test]
fn unsupported_and_mismatched_flows_are_errors() {
    let sol = reference(SolutionId::CD11_TRIG);
    let q = generating_operator(&sol).unwrap();
    assert!(matches!(lie_transform(&q, 0.1, Arc::new(sol.clone())), Err(SymmetryError::FlowUnsupported(_))));
    let f = NullLineField::new(v(2), 1.0, 1.0);
    let d = find(f.model(), "D");
    assert!(matches!(lie_transform(&d, 0.1, Arc::new(sol.clone())), Err(SymmetryError::NotApplicable { .. })));
    let three = reference(SolutionId::CH12_TW);
    assert!(matches!(
        invariant_surface_residual(&d, &three, 0.0, 0.0),
        Err(SymmetryError::ComponentMismatch { .. })
    ));
}

#[test]
fn translation_flows_on_all_autonomous_entries() {
    for sol in dlv_core::solutions::all_references() {
        for id in ["Pt", "Px"] {
            let op = find(sol.model(), id);
            let tr = lie_transform(&op, 0.25, Arc::new(sol.clone())).unwrap();
            let w = sol.window();
            let shifted = if id == "Pt" {
                Window { t: (w.t.0 + 0.25, w.t.1 + 0.25), x: w.x }
            } else {
                Window { t: w.t, x: (w.x.0 + 0.25, w.x.1 + 0.25) }
            };
            let (r, _) = residual_sweep(&tr, shifted, 9);
            assert!(r <= 1e-9, "{} under {id}: {r:e}", sol.id());
        }
    }
}

#[test]
fn g_function_branches() {
    let m = |l1: Value, a1: i64, a2: i64| {
        DlvModel::two_component([l1, v(1)], [v(a1), v(a2)], (v(1), v(1)), (v(1), v(1))).unwrap()
    };
    let g = g_function(&m(Value::ratio(3, 4), 3, 2), (1.0, 0.5, -0.25)).unwrap();
    assert_eq!(g.branch, GBranch::Trig);
    assert!((g.kappa - 6f64.sqrt()).abs() < 1e-15);
    let gp = g_function(&m(v(2), 2, 1), (1.0, 0.5, -0.25)).unwrap();
    assert_eq!(gp.branch, GBranch::Poly);
    let ge = g_function(&m(v(2), 3, 1), (1.0, 0.5, -0.25)).unwrap();
    assert_eq!(ge.branch, GBranch::Exp);
    for gf in [g, gp, ge] {
        for i in 0..2 {
            for (t, x) in (Window { t: (0.0, 1.0), x: (-1.0, 1.0) }).grid(5) {
                let r = gf.pde_residual(i, t, x);
                let j = gf.eval(i, t, x);
                assert!(r.abs() <= 1e-12 * (1.0 + j.g.abs() + j.g_xx.abs()), "{:?}: {r:e}", gf.branch);
            }
        }
    }
    let pure = g_function(&m(Value::ratio(3, 4), 3, 2), (1.0, 0.0, 0.0)).unwrap();
    let j = pure.eval(0, 0.5, 0.3);
    assert_eq!(j.g_x, 0.0);
    assert!((j.g - (6.0 * 0.5 / 0.75f64).exp()).abs() < 1e-12);
    assert!(g_function(&m(v(1), 3, 2), (1.0, 0.0, 0.0)).is_err());
}

#[test]
fn proportional_rate_operator_excludes_its_singular_time() {
    // a_i = a λ_i with a = 1, λ = (2, 1): the denominator e^{-t} − α vanishes at t = 0 for α = 1.
    let m = DlvModel::two_component([v(2), v(1)], [v(2), v(1)], (v(1), v(1)), (v(1), v(1))).unwrap();
    let op = find(&m, "Q_uv_prop_alpha");
    assert!(op.coefficients(0.0, 0.0, &[1.0, 1.0]).is_none());
    assert!(op.coefficients(0.5, 0.0, &[1.0, 1.0]).is_some());
}

#[test]
fn m_component_family_only_for_four_or_more() {
    let ones = vec![vec![v(1); 4]; 4];
    let m = DlvModel::new(vec![v(1), v(2), v(3), v(4)], vec![v(1), v(0), v(2), v(5)], ones).unwrap();
    let n = operator_catalog(&m).iter().filter(|o| o.id().starts_with("Q_")).count();
    assert_eq!(n, 12);
}
