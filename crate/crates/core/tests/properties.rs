use dlv_core::simulate::{step, BoundaryCondition, FieldState, Grid1D, Scheme};
use dlv_core::solutions::{instantiate, param_map, residual_sweep, PdeField, SolutionId};
use dlv_core::{DlvModel, Value};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exact_arithmetic_agrees_with_floats(a in -40i64..40, b in 1i64..30, c in -40i64..40, d in 1i64..30) {
        let (x, y) = (Value::ratio(a, b), Value::ratio(c, d));
        let (xf, yf) = (a as f64 / b as f64, c as f64 / d as f64);
        prop_assert!(((x + y).to_f64() - (xf + yf)).abs() <= 1e-12);
        prop_assert!(((x * y).to_f64() - xf * yf).abs() <= 1e-12);
        prop_assert!((x * y).is_exact());
    }

    #[test]
    fn trig_family_solves_its_model(a1 in 1i64..8, da in 1i64..5, l2 in 1i64..4, dl in 1i64..4, c1 in -3i64..3, c2 in -3i64..3) {
        // a1 < a2 and lambda1 > lambda2 keep beta negative.
        let raw = param_map([
            ("a1", Value::int(a1)),
            ("a2", Value::int(a1 + da)),
            ("lambda1", Value::int(l2 + dl)),
            ("lambda2", Value::int(l2)),
            ("C1", Value::ratio(c1, 2)),
            ("C2", Value::ratio(c2, 3)),
        ]);
        let sol = instantiate(SolutionId::CD11_TRIG, &raw).unwrap();
        let (r, _) = residual_sweep(&sol, sol.window(), 9);
        prop_assert!(r <= 1e-9, "residual {r:e}");
    }

    #[test]
    fn steady_states_are_fixed_points_of_the_simulator(
        l in 1i64..4, a1 in 1i64..6, a2 in 1i64..6, b11 in 1i64..4, b12 in 0i64..3, b21 in 0i64..3, b22 in 1i64..4,
    ) {
        let v = Value::int;
        let model = DlvModel::two_component([v(l), v(1)], [v(a1), v(a2)], (v(-b11), v(-b12)), (v(-b21), v(-b22))).unwrap();
        let g = Grid1D::new(0.0, 1.0, 16).unwrap();
        for ss in model.steady_states().states {
            let s0 = FieldState { t: 0.0, values: ss.u.iter().map(|&u| vec![u; g.nx]).collect() };
            let s1 = step(&model, &g, &s0, &BoundaryCondition::neumann(2), 1e-3, Scheme::ExplicitRK4).unwrap();
            for (p, q) in s1.values.iter().flatten().zip(s0.values.iter().flatten()) {
                prop_assert!((p - q).abs() <= 1e-12 * (1.0 + q.abs()));
            }
        }
    }
}

#[test]
fn trig_family_jets_are_finite() {
    let sol = instantiate(SolutionId::CD11_TRIG, &param_map([("C2", Value::int(0))])).unwrap();
    for (t, x) in sol.window().grid(5) {
        assert!(sol.jet(t, x).unwrap().is_finite());
    }
}
