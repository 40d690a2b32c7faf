use dlv_core::solutions::{reference, PdeField, SolutionId};
use dlv_core::tanh_engine::*;
use dlv_core::{TanhError, Value};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn degree_balancing() {
    let two = reference(SolutionId::RM2000_A);
    let three = reference(SolutionId::CPP_FRONT);
    assert_eq!(balance_degrees(two.model()), vec![2, 2]);
    assert_eq!(balance_degrees(three.model()), vec![2, 2, 2]);
    assert_eq!(mixed_degrees(two.model(), &[1, 2]).unwrap(), vec![1, 2]);
    assert_eq!(mixed_degrees(three.model(), &[1, 1, 2]).unwrap(), vec![1, 1, 2]);
    assert_eq!(mixed_degrees(two.model(), &[3, 2]), Err(TanhError::Degree(3)));
    assert!(mixed_degrees(two.model(), &[2]).is_err());
}

#[test]
fn zero_expansion_satisfies_the_system() {
    let sol = reference(SolutionId::CH12_TW);
    let ans = TanhAnsatz::new(sol.model(), &[2, 2, 2]).unwrap();
    let sys = build_system(&ans);
    assert_eq!(sys.n_unknowns(), 11);
    assert_eq!(sys.residual_norm(&vec![0.0; 11]), 0.0);
    // Coefficients zero but μ, α arbitrary: still a solution.
    let mut x = vec![0.0; 11];
    x[9] = 1.3;
    x[10] = -0.4;
    assert_eq!(sys.residual_norm(&x), 0.0);
}

#[test]
fn every_front_entry_satisfies_its_system() {
    let mut exact = 0;
    for id in SolutionId::ALL.into_iter().filter(|id| id.is_tanh_type()) {
        let rep = verify_reference_instance(id).unwrap();
        assert!(rep.max_residual <= 1e-12, "{id}: {rep:?}");
        assert_ne!(rep.exact, Some(false), "{id}");
        if rep.exact == Some(true) {
            exact += 1;
        }
    }
    // CH12 (a = 25) and the competition-prey-predator front are rational.
    assert!(exact >= 2, "{exact}");
    assert_eq!(verify_reference_instance(SolutionId::CH12_TW).unwrap().exact, Some(true));
    assert_eq!(verify_reference_instance(SolutionId::CPP_FRONT).unwrap().exact, Some(true));
}

#[test]
fn coth_variant_uses_the_same_algebra() {
    let rep = verify_reference_instance(SolutionId::FISHER_COTH).unwrap();
    assert!(rep.max_residual <= 1e-12);
    let (ans, _) = front_ansatz(&reference(SolutionId::FISHER_COTH)).unwrap();
    assert!(ans.coth);
}

#[test]
fn non_front_entries_are_rejected() {
    assert!(matches!(verify_reference_instance(SolutionId::CD11_TRIG), Err(TanhError::NotTanhType(_))));
    assert!(front_ansatz(&reference(SolutionId::HK_SIN)).is_err());
}

#[test]
fn collected_coefficients_reproduce_direct_substitution() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for id in [SolutionId::PREDPREY_FRONT, SolutionId::CPP_FRONT, SolutionId::HUNG11_TW] {
        let (ans, _) = front_ansatz(&reference(id)).unwrap();
        let sys = build_system(&ans);
        for _ in 0..20 {
            let x: Vec<f64> = (0..sys.n_unknowns()).map(|_| rng.gen_range(-2.0..2.0)).collect();
            for k in 0..7 {
                let t = -0.9 + 0.3 * k as f64;
                let direct = ans.residual_at(&x, t);
                for (i, d) in direct.iter().enumerate() {
                    let c = sys.component_poly_at(&x, i, t);
                    assert!((c - d).abs() <= 1e-12 * (1.0 + d.abs()), "{id} T={t}: {c} vs {d}");
                }
            }
        }
    }
}

#[test]
fn newton_recovers_the_prey_predator_front() {
    let (ans, point) = front_ansatz(&reference(SolutionId::PREDPREY_FRONT)).unwrap();
    let sys = build_system(&ans);
    let seed: Vec<f64> = point.iter().map(|v| v * 1.1).collect();
    let out = newton_solve(&sys, &seed, NewtonOptions::default());
    assert!(out.is_converged(), "{out:?}");
    for (a, b) in out.point().iter().zip(&point) {
        assert!((a - b).abs() <= 1e-8, "{a} vs {b}");
    }
}

#[test]
fn zero_seed_is_a_degenerate_point() {
    let (ans, point) = front_ansatz(&reference(SolutionId::PREDPREY_FRONT)).unwrap();
    let sys = build_system(&ans);
    match newton_solve(&sys, &vec![0.0; point.len()], NewtonOptions::default()) {
        NewtonOutcome::Failed { reason, residual, .. } => {
            assert_eq!(reason, NewtonFailure::SingularJacobian);
            assert_eq!(residual, 0.0);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn discovery_recovers_the_diffusivities() {
    let sol = reference(SolutionId::CPP_FRONT);
    let (ans, point) = front_ansatz(&sol).unwrap();
    // Model and w-coefficients fixed, along with μ and α; λ1, λ2 and the u, v
    // coefficients unknown.
    let mut ans = ans;
    for (name, v) in [("A3_0", 2), ("A3_1", 4), ("A3_2", 2), ("mu", -1), ("alpha", 3)] {
        ans = ans.fix(name, Value::int(v)).unwrap();
    }
    ans = ans.free("lambda1").unwrap().free("lambda2").unwrap();
    let sys = build_system(&ans);
    assert_eq!(sys.unknowns, ["A1_0", "A1_1", "A2_0", "A2_1", "lambda1", "lambda2"]);
    let truth = [point[0], point[1], point[2], point[3], 2.5, 13.0 / 6.0];
    let runs = multistart(&sys, 64, 3.0, MULTISTART_SEED, NewtonOptions::default());
    let hits: Vec<&NewtonOutcome> = runs
        .iter()
        .map(|(_, o)| o)
        .filter(|o| o.is_converged() && o.point().iter().zip(&truth).all(|(a, b)| (a - b).abs() <= 1e-10))
        .collect();
    assert!(!hits.is_empty(), "no start recovered the instance");
    // Reproducible.
    let again = multistart(&sys, 64, 3.0, MULTISTART_SEED, NewtonOptions::default());
    assert_eq!(runs, again);
}

#[test]
fn dump_lists_every_equation() {
    let (ans, _) = front_ansatz(&reference(SolutionId::RM2000_A)).unwrap();
    let sys = build_system(&ans);
    let text = sys.dump();
    assert!(text.starts_with("unknowns: A1_0, A1_1, A2_0, A2_1, A2_2, mu, alpha"));
    assert_eq!(text.lines().filter(|l| l.starts_with("equation")).count(), sys.equations.len());
    assert!(text.contains("mu^2"));
}
