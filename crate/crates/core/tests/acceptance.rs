//! End-to-end acceptance checks: one PASS/FAIL line per criterion, nonzero
//! exit status if any fails.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use dlv_core::reduction::{exact_reduction, reduced_residual, registered_triples};
use dlv_core::simulate::{
    cfl_limit, convergence_order, error_vs_solution, init_from_solution, run, truncation_half_width, BoundaryCondition,
    Grid1D, Scheme, SimConfig,
};
use dlv_core::solutions::{
    all_references, heat_kernel_family, instantiate, param_map, reference, residual_sweep, HeatProfile, HkCoefficients,
    PdeField, SolutionId, Window,
};
use dlv_core::symmetry::fields::NullLineField;
use dlv_core::symmetry::{generating_operator, invariant_surface_residual, lie_transform, operator_catalog, registered_pairs};
use dlv_core::tanh_engine::{build_system, front_ansatz, newton_solve, verify_reference_instance, NewtonOptions};
use dlv_core::Value;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn q(n: i64, d: i64) -> Value {
    Value::ratio(n, d)
}

fn residual_suite() -> Outcome {
    let start = Instant::now();
    let refs = all_references();
    ensure(refs.len() >= 15, format!("only {} catalog entries", refs.len()))?;
    let mut worst = 0.0f64;
    for sol in &refs {
        let (r, skipped) = residual_sweep(sol, sol.window(), 21);
        ensure(skipped < 21 * 21 / 2, format!("{}: {skipped} of 441 points outside the domain", sol.id()))?;
        ensure(r <= 1e-9, format!("{}: relative residual {r:e}", sol.id()))?;
        worst = worst.max(r);
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 10.0, format!("took {secs:.1}s"))?;
    Ok(format!("{} entries, worst relative residual {worst:.1e}, {secs:.2}s", refs.len()))
}

fn numeric_instance() -> Outcome {
    let raw: BTreeMap<String, Value> = param_map([
        ("a1", Value::int(11)),
        ("a2", Value::int(9)),
        ("a3", Value::int(4)),
        ("b1", q(1, 2)),
        ("b2", q(1, 6)),
        ("b3", Value::int(5)),
        ("c1", Value::int(6)),
        ("c2", Value::int(2)),
        ("c3", Value::int(7)),
    ]);
    let sol = instantiate(SolutionId::CPP_FRONT, &raw).map_err(|e| e.to_string())?;
    let want = [
        ("lambda1", q(5, 2)),
        ("lambda2", q(13, 6)),
        ("speed", Value::int(3)),
        ("amp_u", q(147, 53)),
        ("amp_v", q(1, 53)),
        ("amp_w", Value::int(2)),
    ];
    for (k, v) in want {
        let got = sol.derived_value(k).ok_or(format!("missing {k}"))?;
        ensure(got.is_exact() && got == v, format!("{k} = {got}, expected {v}"))?;
    }
    let (r, _) = residual_sweep(&sol, sol.window(), 21);
    ensure(r <= 1e-9, format!("residual {r:e}"))?;
    Ok(format!("lambda = (5/2, 13/6), speed 3, amplitudes (147/53, 1/53, 2) exact; residual {r:.1e}"))
}

fn derived_constants() -> Outcome {
    let cases: [(SolutionId, Vec<(&str, Value)>, &str, Value); 4] = [
        (SolutionId::CH12_TW, vec![("a", Value::int(25)), ("e", Value::int(2))], "alpha", q(11, 2)),
        (
            SolutionId::CD11_COMP,
            vec![("a1", Value::int(3)), ("a2", Value::int(4)), ("lambda1", Value::int(2)), ("lambda2", Value::int(1))],
            "beta",
            Value::int(-1),
        ),
        (
            SolutionId::CD21_CASE1,
            vec![("a1", Value::int(3)), ("a2", Value::int(2)), ("lambda1", q(3, 4)), ("lambda2", Value::int(1))],
            "kappa^2",
            Value::int(6),
        ),
        (
            SolutionId::CD13_3COMP,
            vec![("a1", q(9, 2)), ("a2", Value::int(2)), ("lambda1", Value::int(1)), ("lambda2", Value::int(2))],
            "delta",
            q(-5, 2),
        ),
    ];
    let mut out = Vec::new();
    for (id, params, key, want) in cases {
        let sol = instantiate(id, &param_map(params)).map_err(|e| e.to_string())?;
        let got = sol.derived_value(key).ok_or(format!("{id}: missing {key}"))?;
        ensure((got.to_f64() - want.to_f64()).abs() <= 1e-14, format!("{id}: {key} = {got}, expected {want}"))?;
        out.push(format!("{key}={got}"));
    }
    Ok(out.join(", "))
}

fn tanh_engine() -> Outcome {
    let mut worst = 0.0f64;
    let mut n = 0;
    for id in SolutionId::ALL.into_iter().filter(|id| id.is_tanh_type()) {
        let rep = verify_reference_instance(id).map_err(|e| e.to_string())?;
        ensure(rep.max_residual <= 1e-12, format!("{id}: coefficient residual {:e}", rep.max_residual))?;
        worst = worst.max(rep.max_residual);
        n += 1;
    }
    let (ans, point) = front_ansatz(&reference(SolutionId::PREDPREY_FRONT)).map_err(|e| e.to_string())?;
    let sys = build_system(&ans);
    let seed: Vec<f64> = point.iter().map(|v| 1.1 * v).collect();
    let out = newton_solve(&sys, &seed, NewtonOptions::default());
    ensure(out.is_converged(), format!("Newton did not converge: {out:?}"))?;
    let err = out.point().iter().zip(&point).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    ensure(err <= 1e-8, format!("recovered scalars off by {err:e}"))?;
    Ok(format!("{n} fronts, worst residual {worst:.1e}; Newton recovery error {err:.1e}"))
}

fn invariant_surfaces() -> Outcome {
    let mut worst = 0.0f64;
    let pairs = registered_pairs();
    for (op_id, sid) in &pairs {
        let sol = reference(*sid);
        let op = generating_operator(&sol).ok_or(format!("{sid}: no generating operator"))?;
        ensure(op.id() == *op_id, format!("{sid}: generated {} instead of {op_id}", op.id()))?;
        let mut checked = 0;
        for (t, x) in sol.window().grid(9) {
            let Ok(r) = invariant_surface_residual(&op, &sol, t, x) else { continue };
            let r = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            ensure(r <= 1e-10, format!("{op_id} on {sid} at ({t}, {x}): {r:e}"))?;
            worst = worst.max(r);
            checked += 1;
        }
        ensure(checked >= 60, format!("{sid}: only {checked} of 81 points inside the domain"))?;
    }
    Ok(format!("{} pairs, worst |Q(u)| {worst:.1e}", pairs.len()))
}

fn reduction_consistency() -> Outcome {
    let triples = registered_triples();
    let (mut lift, mut red) = (0.0f64, 0.0f64);
    for (aid, sid) in &triples {
        let sol = reference(*sid);
        let (ans, profile) = exact_reduction(&sol).map_err(|e| format!("{sid}: {e}"))?;
        ensure(ans.id() == *aid, format!("{sid}: ansatz {} instead of {aid}", ans.id()))?;
        let field = ans.lift(profile.clone()).map_err(|e| e.to_string())?;
        for (t, x) in sol.window().grid(21) {
            let Ok(want) = sol.eval(t, x) else { continue };
            let got = field.eval(t, x).map_err(|e| format!("{sid}: {e}"))?;
            for (g, w) in got.iter().zip(&want) {
                let d = (g - w).abs() / (1.0 + w.abs());
                ensure(d <= 1e-12, format!("{sid} at ({t}, {x}): {g} vs {w}"))?;
                lift = lift.max(d);
            }
            let r = reduced_residual(ans.reduced(), &profile, ans.profile_argument(t, x)).map_err(|e| e.to_string())?;
            let r = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            ensure(r <= 1e-10, format!("{sid}: reduced residual {r:e}"))?;
            red = red.max(r);
        }
    }
    Ok(format!("{} triples, lift error {lift:.1e}, reduced residual {red:.1e}", triples.len()))
}

fn refinement(sol: &dyn PdeField, a: f64, b: f64) -> Result<(f64, f64), String> {
    let grids: Vec<Grid1D> = [101, 201, 401].iter().map(|&n| Grid1D::new(a, b, n).unwrap()).collect();
    let m = sol.model().m();
    let study = convergence_order(sol.model(), sol, &grids, &BoundaryCondition::neumann(m), 0.0, 0.5, 0.4, Scheme::ExplicitRK4)
        .map_err(|e| e.to_string())?;
    Ok((study.order, study.constant))
}

fn simulator_convergence() -> Outcome {
    let trig = instantiate(SolutionId::CD11_TRIG, &param_map([("C2", Value::int(0))])).map_err(|e| e.to_string())?;
    let k = (-2.0 * trig.derived_value("beta").unwrap().to_f64()).sqrt();
    let (p1, c1) = refinement(&trig, 0.0, PI / k)?;
    let fisher = reference(SolutionId::FISHER_FRONT);
    let l = truncation_half_width(&fisher, 0.0).ok_or("no truncation width")?;
    let (p2, c2) = refinement(&fisher, -l, l)?;
    ensure(p1 >= 1.9 && p2 >= 1.9, format!("orders {p1:.3} (trig), {p2:.3} (front)"))?;
    Ok(format!("observed order {p1:.3} (trig window, C={c1:.2e}), {p2:.3} (front, C={c2:.2e})"))
}

fn final_error(sol: &dyn PdeField, g: &Grid1D, bc: &BoundaryCondition, t_final: f64) -> Result<f64, String> {
    let cfg = SimConfig { dt: cfl_limit(sol.model(), g), t_final, scheme: Scheme::ExplicitRK4, snapshot_stride: usize::MAX };
    let s0 = init_from_solution(sol, g, 0.0).map_err(|e| e.to_string())?;
    let traj = run(sol.model(), g, s0, bc, &cfg).map_err(|e| e.to_string())?;
    if let Some(e) = traj.failure {
        return Err(e.to_string());
    }
    Ok(error_vs_solution(g, traj.last(), sol).map_err(|e| e.to_string())?.0)
}

fn bvp_reproduction() -> Outcome {
    let fisher = reference(SolutionId::FISHER_FRONT);
    let l = truncation_half_width(&fisher, 0.0).ok_or("no truncation width")?;
    let g = Grid1D::new(-l, l, 801).unwrap();
    let e1 = final_error(&fisher, &g, &BoundaryCondition::neumann(2), 1.0)?;
    let tol1 = 5.0 * g.dx() * g.dx() + 1e-6;
    ensure(e1 <= tol1, format!("front: {e1:e} > {tol1:e}"))?;

    let comp = reference(SolutionId::CD11_COMP);
    let w = comp.window();
    let g = Grid1D::new(w.x.0, w.x.1, 801).unwrap();
    let ends = comp.time_asymptote().ok_or("no asymptote")?;
    let e2 = final_error(&comp, &g, &BoundaryCondition::dirichlet(&ends, &ends), 1.0)?;
    let tol2 = 5.0 * g.dx() * g.dx() + 1e-6;
    ensure(e2 <= tol2, format!("competition: {e2:e} > {tol2:e}"))?;

    let cd13 = reference(SolutionId::CD13_3COMP);
    let w = cd13.window();
    let g = Grid1D::new(w.x.0, w.x.1, 81).unwrap();
    let (left, right) = (cd13.eval(0.0, g.a).unwrap(), cd13.eval(0.0, g.b).unwrap());
    let cfg = SimConfig { dt: cfl_limit(cd13.model(), &g), t_final: 10.0, scheme: Scheme::ExplicitRK4, snapshot_stride: usize::MAX };
    let s0 = init_from_solution(&cd13, &g, 0.0).map_err(|e| e.to_string())?;
    let traj = run(cd13.model(), &g, s0, &BoundaryCondition::dirichlet(&left, &right), &cfg).map_err(|e| e.to_string())?;
    let lim = cd13.time_asymptote().unwrap();
    let e3 = traj
        .last()
        .values
        .iter()
        .zip(&lim)
        .flat_map(|(v, l)| v.iter().map(move |x| (x - l).abs()))
        .fold(0.0, f64::max);
    ensure(e3 < 1e-3, format!("three-component run is {e3:e} from the asymptote at t = 10"))?;
    Ok(format!("front {e1:.2e} (tol {tol1:.2e}), competition {e2:.2e} (tol {tol2:.2e}), three-component {e3:.1e} at t=10"))
}

fn asymptotes() -> Outcome {
    let mut sols: Vec<_> = all_references().into_iter().filter(|s| s.time_asymptote().is_some()).collect();
    for id in [SolutionId::FISHER_FRONT, SolutionId::PREDPREY_FRONT, SolutionId::CD21_CASE1] {
        ensure(sols.iter().any(|s| s.id() == id), format!("{id} has no asymptote"))?;
    }
    for v0 in [Value::int(0), Value::int(1), Value::int(2)] {
        sols.push(instantiate(SolutionId::CD13_3COMP, &param_map([("v0", v0)])).map_err(|e| e.to_string())?);
    }
    let mut survivors = Vec::new();
    for sol in &sols {
        let lim = sol.time_asymptote().unwrap();
        ensure(sol.model().steady_states().contains(sol.model(), &lim, 1e-10), format!("{}: {lim:?} is not a steady state", sol.id()))?;
        if sol.id() == SolutionId::CD13_3COMP {
            survivors.push(lim.iter().filter(|v| v.abs() > 1e-12).count());
        }
    }
    // v0 = 0 and v0 = a2 leave one survivor, an interior v0 leaves two.
    ensure(survivors[1..] == [1, 2, 1], format!("three-component survivors {survivors:?}"))?;
    Ok(format!("{} asymptotes are steady states", sols.len()))
}

fn heat_kernel() -> Outcome {
    let fam = heat_kernel_family(HeatProfile::Sin { beta: 0.2, gamma: 3.0 }, q(1, 3), HkCoefficients::default())
        .map_err(|e| e.to_string())?;
    let sin = reference(SolutionId::HK_SIN);
    let mut diff = 0.0f64;
    for (t, x) in sin.window().grid(11) {
        let (a, b) = (fam.eval(t, x).unwrap(), sin.eval(t, x).unwrap());
        diff = a.iter().zip(&b).fold(diff, |m, (p, q)| m.max((p - q).abs()));
    }
    ensure(diff <= 1e-8, format!("family vs sine closed form: {diff:e}"))?;
    let hk = reference(SolutionId::HK_FAMILY);
    let c: Vec<f64> = ["A", "B", "C"].iter().map(|k| hk.derived_value(k).unwrap().to_f64()).collect();
    let mut heat = 0.0f64;
    for (t, x) in hk.window().grid(11) {
        let j = hk.jet(t, x).unwrap();
        let r: f64 = (0..3).map(|i| c[i] * (j.u_t[i] - j.u_xx[i])).sum();
        heat = heat.max(r.abs());
    }
    ensure(heat <= 1e-8, format!("heat residual {heat:e}"))?;
    Ok(format!("family vs sine {diff:.1e}, heat residual of Au+Bv+Cw {heat:.1e}"))
}

fn lie_flows() -> Outcome {
    let f = NullLineField::new(Value::int(2), 0.7, 1.3);
    let base: Arc<dyn PdeField> = Arc::new(f.clone());
    let w = Window { t: (0.1, 1.0), x: (-2.0, 2.0) };
    let ops = operator_catalog(f.model());
    let (mut res, mut group) = (0.0f64, 0.0f64);
    for id in ["Pt", "Px", "D"] {
        let op = ops.iter().find(|o| o.id() == id).ok_or(format!("no {id} operator"))?;
        for eps in [-1.0, -0.5, 0.5, 1.0] {
            let tr = lie_transform(op, eps, base.clone()).map_err(|e| e.to_string())?;
            let (r, skipped) = residual_sweep(&tr, w, 11);
            ensure(skipped == 0, format!("{id} eps={eps}: {skipped} points outside the domain"))?;
            ensure(r <= 1e-9, format!("{id} eps={eps}: residual {r:e}"))?;
            res = res.max(r);
        }
        let two = lie_transform(op, 0.5, Arc::new(lie_transform(op, -1.0, base.clone()).unwrap())).unwrap();
        let one = lie_transform(op, -0.5, base.clone()).unwrap();
        for (t, x) in w.grid(7) {
            let (a, b) = (two.eval(t, x).unwrap(), one.eval(t, x).unwrap());
            group = a.iter().zip(&b).fold(group, |m, (p, q)| m.max((p - q).abs()));
        }
    }
    ensure(group <= 1e-12, format!("group law off by {group:e}"))?;
    Ok(format!("residual {res:.1e}, group law {group:.1e}"))
}

fn main() -> ExitCode {
    let checks: [(&str, fn() -> Outcome); 11] = [
        ("catalog residuals", residual_suite),
        ("exact numeric front instance", numeric_instance),
        ("derived constants", derived_constants),
        ("tanh engine", tanh_engine),
        ("invariant surfaces", invariant_surfaces),
        ("reduction consistency", reduction_consistency),
        ("simulator convergence", simulator_convergence),
        ("boundary-value reproduction", bvp_reproduction),
        ("asymptotes are steady states", asymptotes),
        ("heat-kernel family", heat_kernel),
        ("Lie flows", lie_flows),
    ];
    let mut failed = 0;
    for (i, (name, check)) in checks.iter().enumerate() {
        match std::panic::catch_unwind(check) {
            Ok(Ok(msg)) => println!("PASS {:>2} {name}: {msg}", i + 1),
            Ok(Err(msg)) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg}", i + 1);
            }
            Err(_) => {
                failed += 1;
                println!("FAIL {:>2} {name}: panicked", i + 1);
            }
        }
    }
    if failed == 0 {
        println!("all {} criteria passed", checks.len());
        ExitCode::SUCCESS
    } else {
        println!("{failed} of {} criteria failed", checks.len());
        ExitCode::FAILURE
    }
}
