use std::collections::BTreeMap;

use dlv_core::solutions::{
    all_references, heat_kernel_family, instantiate, param_map, reference, residual_sweep, HeatProfile,
    HkCoefficients, PdeField, SolutionId,
};
use dlv_core::{SolutionError, Value};

#[test]
fn every_entry_solves_its_model_on_a_21_by_21_grid() {
    for sol in all_references() {
        let (worst, skipped) = residual_sweep(&sol, sol.window(), 21);
        assert!(worst <= 1e-9, "{}: residual {worst:e}", sol.id());
        assert!(skipped < 21, "{}: {skipped} points outside the domain", sol.id());
    }
}

fn fd_errors(sol: &dyn PdeField, t: f64, x: f64, h: f64) -> f64 {
    let e = |t, x| sol.eval(t, x).unwrap();
    let jet = sol.jet(t, x).unwrap();
    let mut worst = 0.0f64;
    for i in 0..jet.m() {
        let c4 = |f: &dyn Fn(f64) -> f64, z: f64| (-f(z + 2.0 * h) + 8.0 * f(z + h) - 8.0 * f(z - h) + f(z - 2.0 * h)) / (12.0 * h);
        let ux = c4(&|z| e(t, z)[i], x);
        let ut = c4(&|z| e(z, x)[i], t);
        let uxx = (-e(t, x + 2.0 * h)[i] + 16.0 * e(t, x + h)[i] - 30.0 * e(t, x)[i] + 16.0 * e(t, x - h)[i]
            - e(t, x - 2.0 * h)[i])
            / (12.0 * h * h);
        let scale = 1.0 + jet.u_t[i].abs().max(jet.u_x[i].abs()).max(jet.u_xx[i].abs());
        let err = (ux - jet.u_x[i]).abs().max((ut - jet.u_t[i]).abs()).max((uxx - jet.u_xx[i]).abs());
        worst = worst.max(err / scale);
    }
    worst
}

#[test]
fn jets_agree_with_fourth_order_differences() {
    for sol in all_references() {
        let w = sol.window();
        let t = 0.5 * (w.t.0 + w.t.1).max(0.1);
        let x = w.x.0 + 0.37 * (w.x.1 - w.x.0);
        let h = if sol.id().is_tanh_type() { 4e-2 } else { 1e-2 };
        let e1 = fd_errors(&sol, t, x, h);
        let e2 = fd_errors(&sol, t, x, h / 2.0);
        assert!(e2 < 1e-4, "{}: fd error {e2:e}", sol.id());
        // Order is only measurable while truncation dominates roundoff.
        if sol.id().is_tanh_type() && e2 > 1e-9 {
            let order = (e1 / e2).log2();
            assert!(order >= 3.5, "{}: observed order {order}", sol.id());
        }
    }
}

#[test]
fn jet_u_is_eval_bit_exact() {
    for sol in all_references() {
        for (t, x) in sol.window().grid(5) {
            if let Ok(j) = sol.jet(t, x) {
                assert_eq!(j.u, sol.eval(t, x).unwrap());
            }
        }
    }
}

#[test]
fn ch12_reference_values_at_origin() {
    let s = reference(SolutionId::CH12_TW);
    assert_eq!(s.eval(0.0, 0.0).unwrap(), vec![12.5, 6.25, 4.0]);
    assert_eq!(s.derived_value("alpha"), Some(Value::ratio(11, 2)));
}

#[test]
fn cpp_numeric_instance_is_exact() {
    let s = reference(SolutionId::CPP_FRONT);
    assert_eq!(s.derived_value("lambda1"), Some(Value::ratio(5, 2)));
    assert_eq!(s.derived_value("lambda2"), Some(Value::ratio(13, 6)));
    assert_eq!(s.derived_value("amp_u"), Some(Value::ratio(147, 53)));
    assert_eq!(s.derived_value("amp_v"), Some(Value::ratio(1, 53)));
    assert_eq!(s.derived_value("speed"), Some(Value::int(3)));
}

#[test]
fn fisher_coth_rejects_the_blow_up_plane() {
    let s = reference(SolutionId::FISHER_COTH);
    let f = s.front().unwrap();
    let t = 0.3;
    let x = f.speed.to_f64() * t;
    assert!(s.eval(t, x).is_err());
    assert!(s.eval(t, x + 1.0).is_ok());
}

#[test]
fn hk_sin_closed_form() {
    let s = reference(SolutionId::HK_SIN);
    let (t, x) = (0.2, 0.7);
    let w = s.eval(t, x).unwrap()[2];
    assert!((w - (1.0 / 3.0 + 0.2 * (3.0f64 * x).sin() * (-9.0f64 * t).exp())).abs() < 1e-15);
}

#[test]
fn heat_kernel_matches_sine_closed_form() {
    let fam = heat_kernel_family(HeatProfile::Sin { beta: 0.2, gamma: 3.0 }, Value::ratio(1, 3), HkCoefficients::default())
        .unwrap();
    let sin = reference(SolutionId::HK_SIN);
    for (t, x) in sin.window().grid(11) {
        let a = fam.eval(t, x).unwrap();
        let b = sin.eval(t, x).unwrap();
        for i in 0..3 {
            assert!((a[i] - b[i]).abs() <= 1e-8, "({t},{x}) {a:?} vs {b:?}");
        }
    }
}

#[test]
fn heat_kernel_linear_combination_is_caloric() {
    let s = reference(SolutionId::HK_FAMILY);
    let c: Vec<f64> = ["A", "B", "C"].iter().map(|k| s.derived_value(k).unwrap().to_f64()).collect();
    for (t, x) in s.window().grid(11) {
        let j = s.jet(t, x).unwrap();
        let u: f64 = (0..3).map(|i| c[i] * (j.u_t[i] - j.u_xx[i])).sum();
        assert!(u.abs() <= 1e-8, "({t},{x}) {u:e}");
    }
}

#[test]
fn zero_profile_gives_a_steady_state() {
    let s = heat_kernel_family(HeatProfile::GaussianBump { amp: 0.0, center: 0.0, width: 1.0 }, Value::ratio(1, 3), HkCoefficients::default())
        .unwrap();
    let u0 = s.eval(0.0, 0.0).unwrap();
    assert_eq!(s.eval(0.7, 2.0).unwrap(), u0);
    assert!(s.model().reaction(&u0).iter().all(|r| r.abs() < 1e-14));
}

#[test]
fn restriction_errors() {
    let bad = |id, pairs: Vec<(&str, Value)>| instantiate(id, &param_map(pairs));
    assert!(matches!(bad(SolutionId::CD11_TRIG, vec![("a1", Value::int(4)), ("a2", Value::int(3))]), Err(SolutionError::Restriction { .. })));
    assert!(bad(SolutionId::PREDPREY_FRONT, vec![("a1", Value::int(0))]).is_err());
    assert!(bad(SolutionId::HK_SIN, vec![("c1", Value::int(3)), ("b2", Value::ratio(1, 3))]).is_err());
    assert!(bad(SolutionId::FISHER_FRONT, vec![("a2", Value::int(2))]).is_err());
    assert!(instantiate(SolutionId::RM2000_A, &BTreeMap::new()).is_ok());
}

#[test]
fn asymptotes_are_steady_states() {
    for sol in all_references() {
        if let Some(lim) = sol.time_asymptote() {
            let set = sol.model().steady_states();
            assert!(set.contains(sol.model(), &lim, 1e-10), "{}: {lim:?}", sol.id());
        }
    }
}

#[test]
fn declared_nonnegative_entries_are_nonnegative() {
    for sol in all_references().into_iter().filter(|s| s.declared_nonnegative()) {
        for (t, x) in sol.window().grid(41) {
            if let Ok(u) = sol.eval(t, x) {
                assert!(u.iter().all(|v| *v >= -1e-12), "{} at ({t},{x}): {u:?}", sol.id());
            }
        }
    }
}

#[test]
fn boundary_conditions_hold() {
    let cd21 = reference(SolutionId::CD21_CASE1);
    let p = cd21.derived_value("neumann_period").unwrap().to_f64();
    for m in 0..3 {
        let x = p * (0.5 + m as f64);
        let j = cd21.jet(0.4, x).unwrap();
        assert!(j.u_x.iter().all(|d| d.abs() <= 1e-10));
    }
    let cd13 = reference(SolutionId::CD13_3COMP);
    let len = cd13.derived_value("dirichlet_length").unwrap().to_f64();
    let a = cd13.eval(0.3, 0.0).unwrap();
    let b = cd13.eval(0.3, len).unwrap();
    let lim = cd13.time_asymptote().unwrap();
    for i in 0..3 {
        assert!((a[i] - lim[i]).abs() < 1e-12 && (b[i] - lim[i]).abs() < 1e-12);
    }
}
