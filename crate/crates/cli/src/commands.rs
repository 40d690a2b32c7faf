use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::Arc;

use dlv_core::io::{csv_field, fmt_f64, model_from_toml, model_to_toml, solution_spec_from_toml};
use dlv_core::reduction::{consistency_check, exact_reduction, profile_csv};
use dlv_core::simulate::{
    cfl_limit, error_vs_solution, init_from_solution, manifest, run, snapshot_csv, truncation_half_width,
    BoundaryCondition, FieldState, Grid1D, Scheme, SimConfig,
};
use dlv_core::solutions::{info, instantiate, residual_sweep, ClosedFormSolution, PdeField, SolutionId, Window};
use dlv_core::symmetry::{generating_operator, relative_surface_residual};
use dlv_core::tanh_engine::{build_system, front_ansatz, multistart, verify_front, NewtonOptions, MULTISTART_SEED};
use dlv_core::value::parse_value;
use dlv_core::{DlvModel, ReductionError, TanhError, Value};

use crate::error::CliError;
use crate::presets::{self, SimPreset};
use crate::SimulateArgs;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn runtime(e: impl ToString) -> CliError {
    CliError::Runtime(e.to_string())
}

fn parse_params(raw: &[String]) -> Result<BTreeMap<String, Value>, CliError> {
    let mut out = BTreeMap::new();
    for p in raw {
        let (k, v) = p.split_once('=').ok_or_else(|| usage(format!("--param expects name=value, got `{p}`")))?;
        let v = parse_value(v).ok_or_else(|| usage(format!("`{v}` is not a number")))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

fn parse_id(s: &str) -> Result<SolutionId, CliError> {
    s.parse().map_err(|_| usage(format!("unknown solution id `{s}` (see `dlv list`)")))
}

fn solution(id: &str, params: &[String]) -> Result<ClosedFormSolution, CliError> {
    let id = parse_id(id)?;
    instantiate(id, &parse_params(params)?).map_err(|e| usage(e.to_string()))
}

fn parse_grid(s: &str) -> Result<(f64, f64, usize), CliError> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || usage(format!("--grid expects A,B,n, got `{s}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let a = parts[0].parse().map_err(|_| bad())?;
    let b = parts[1].parse().map_err(|_| bad())?;
    let n = parts[2].parse().map_err(|_| bad())?;
    if !(b > a) || n < 2 {
        return Err(bad());
    }
    Ok((a, b, n))
}

/// Write `text` to `path`, creating parent directories.
fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| runtime(format!("cannot create {}: {e}", dir.display())))?;
    }
    fs::write(path, text).map_err(|e| runtime(format!("cannot write {}: {e}", path.display())))
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x}")).collect();
    format!("({})", parts.join(", "))
}

pub fn list() -> Result<(), CliError> {
    for id in SolutionId::ALL {
        let i = info(id);
        println!("{:<16} m={}  {}", i.name, i.m, i.source);
    }
    Ok(())
}

pub fn show(id: &str, params: &[String]) -> Result<(), CliError> {
    let sol = solution(id, params)?;
    let i = info(sol.id());
    println!("{}: {}", i.name, i.source);
    println!("parameters:");
    for (k, v) in sol.params() {
        let doc = i.params.iter().find(|p| p.name == k).map(|p| p.doc).unwrap_or("");
        if doc.is_empty() {
            println!("  {k} = {v}");
        } else {
            println!("  {k} = {v}  # {doc}");
        }
    }
    if !i.restrictions.is_empty() {
        println!("restrictions:");
        for r in i.restrictions {
            println!("  {r}");
        }
    }
    if !sol.derived().is_empty() {
        println!("derived:");
        for (k, v) in sol.derived() {
            println!("  {k} = {v}");
        }
    }
    let w = sol.window();
    println!("window: t in [{}, {}], x in [{}, {}]", w.t.0, w.t.1, w.x.0, w.x.1);
    if let Some(a) = sol.time_asymptote() {
        println!("time asymptote: {}", fmt_vec(&a));
    }
    println!("model:");
    for line in model_to_toml(sol.model()).lines() {
        println!("  {line}");
    }
    print_steady(sol.model());
    Ok(())
}

struct Check {
    id: SolutionId,
    name: &'static str,
    value: f64,
    pass: bool,
}

fn checks_for(sol: &ClosedFormSolution, window: Window, n: usize, tol: f64) -> Result<Vec<Check>, CliError> {
    let id = sol.id();
    let mut out = Vec::new();
    let (r, skipped) = residual_sweep(sol, window, n);
    out.push(Check { id, name: "residual", value: r, pass: r <= tol && skipped < n * n });
    if let Some(op) = generating_operator(sol) {
        let mut worst = 0.0f64;
        for (t, x) in window.grid(9) {
            if let Ok(r) = relative_surface_residual(&op, sol, t, x) {
                worst = worst.max(r);
            }
        }
        out.push(Check { id, name: "invariant-surface", value: worst, pass: worst <= 1e-10 });
    }
    if id.is_tanh_type() {
        match verify_front(sol) {
            Ok(rep) => out.push(Check { id, name: "tanh-coefficients", value: rep.max_residual, pass: rep.max_residual <= 1e-12 }),
            Err(e) => return Err(runtime(e)),
        }
    }
    if let Some(lim) = sol.time_asymptote() {
        let set = sol.model().steady_states();
        // Size of the reaction terms at the limit state.
        let dist = sol.model().reaction(&lim).iter().fold(0.0f64, |m, r| m.max(r.abs()));
        out.push(Check { id, name: "asymptote-steady", value: dist, pass: set.contains(sol.model(), &lim, 1e-10) });
    }
    Ok(out)
}

pub fn verify(id: Option<&str>, all: bool, params: &[String], grid: Option<&str>, tol: f64) -> Result<(), CliError> {
    let sols: Vec<ClosedFormSolution> = match (id, all) {
        (Some(_), true) => return Err(usage("give either an id or --all, not both")),
        (None, false) => return Err(usage("give a solution id or --all")),
        (Some(id), false) => vec![solution(id, params)?],
        (None, true) => {
            if !params.is_empty() {
                return Err(usage("--param needs a single solution id"));
            }
            dlv_core::solutions::all_references()
        }
    };
    let grid = grid.map(parse_grid).transpose()?;
    let mut checks = Vec::new();
    for sol in &sols {
        let (window, n) = match grid {
            Some((a, b, n)) => (Window { t: sol.window().t, x: (a, b) }, n),
            None => (sol.window(), 21),
        };
        checks.extend(checks_for(sol, window, n, tol)?);
    }
    if all {
        let covered: std::collections::BTreeSet<SolutionId> = checks.iter().map(|c| c.id).collect();
        assert_eq!(covered.len(), SolutionId::ALL.len(), "verify --all must cover the catalog");
    }
    for c in &checks {
        println!("{} {} {} {:.3e}", c.id, c.name, if c.pass { "PASS" } else { "FAIL" }, c.value);
    }
    if sols.len() == 1 {
        for (k, v) in sols[0].derived() {
            println!("derived {k} = {v}");
        }
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    println!("{} entries, {} checks, {} failed", sols.len(), checks.len(), failed);
    if failed > 0 {
        return Err(CliError::Verification(format!("{failed} check(s) failed")));
    }
    Ok(())
}

/// What a simulation starts from and is compared against.
struct Setup {
    model: DlvModel,
    reference: Option<ClosedFormSolution>,
    init: Option<Vec<f64>>,
    grid: Grid1D,
    bc_default: &'static str,
    t_final: f64,
}

fn front_grid(sol: &ClosedFormSolution, nx: usize) -> Result<Grid1D, CliError> {
    let l = truncation_half_width(sol, 0.0).ok_or_else(|| runtime("front tails never settle"))?;
    Grid1D::new(-l, l, nx).map_err(|e| usage(e.to_string()))
}

fn simulation_setup(args: &SimulateArgs) -> Result<Setup, CliError> {
    let grid_arg = args.grid.as_deref().map(parse_grid).transpose()?;
    let grid_for = |w: (f64, f64), nx: usize| -> Result<Grid1D, CliError> {
        let (a, b, n) = grid_arg.unwrap_or((w.0, w.1, nx));
        Grid1D::new(a, b, n).map_err(|e| usage(e.to_string()))
    };
    if let Some(name) = &args.preset {
        let p = SimPreset::parse(name).ok_or_else(|| usage(format!("unknown preset `{name}` (front | competition | three-component)")))?;
        let sol = instantiate(p.solution(), &parse_params(&args.params.param)?).map_err(|e| usage(e.to_string()))?;
        let grid = match (p, grid_arg) {
            (SimPreset::Front, None) => front_grid(&sol, p.nx())?,
            _ => grid_for(sol.window().x, p.nx())?,
        };
        let bc_default = if p == SimPreset::Front { "neumann" } else { "dirichlet" };
        return Ok(Setup { model: sol.model().clone(), reference: Some(sol), init: None, grid, bc_default, t_final: p.t_final() });
    }
    let sol = if let Some(id) = &args.solution {
        Some(solution(id, &args.params.param)?)
    } else if let Some(path) = &args.spec {
        let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        let spec = solution_spec_from_toml(&text).map_err(|e| usage(e.to_string()))?;
        let mut params = spec.params;
        params.extend(parse_params(&args.params.param)?);
        Some(instantiate(parse_id(&spec.id)?, &params).map_err(|e| usage(e.to_string()))?)
    } else {
        None
    };
    if let Some(sol) = sol {
        let grid = if sol.front().is_some() && grid_arg.is_none() && sol.id() != SolutionId::FISHER_COTH {
            front_grid(&sol, 401)?
        } else {
            grid_for(sol.window().x, 201)?
        };
        return Ok(Setup { model: sol.model().clone(), reference: Some(sol), init: None, grid, bc_default: "exact", t_final: 1.0 });
    }
    if let Some(path) = &args.model {
        let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
        let model = model_from_toml(&text).map_err(|e| usage(e.to_string()))?;
        if args.init.len() != model.m() {
            return Err(usage(format!("--init needs {} values", model.m())));
        }
        let (a, b, n) = grid_arg.ok_or_else(|| usage("--model runs need --grid A,B,nx"))?;
        let grid = Grid1D::new(a, b, n).map_err(|e| usage(e.to_string()))?;
        return Ok(Setup { model, reference: None, init: Some(args.init.clone()), grid, bc_default: "neumann", t_final: 1.0 });
    }
    Err(usage("simulate needs one of --preset, --solution, --spec or --model"))
}

pub fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let setup = simulation_setup(args)?;
    let (model, grid) = (&setup.model, setup.grid);
    let scheme = match args.scheme.as_deref() {
        None => Scheme::ExplicitRK4,
        Some(s) => s.parse().map_err(|_| usage(format!("unknown scheme `{s}` (rk4 | imex)")))?,
    };
    let limit = cfl_limit(model, &grid);
    let dt = args.dt.unwrap_or(match scheme {
        Scheme::ExplicitRK4 => limit,
        Scheme::Imex => 1e-3,
    });
    if scheme == Scheme::ExplicitRK4 && dt > limit {
        return Err(usage(format!(
            "dt = {dt} violates the explicit stability limit; use --dt {} or --scheme imex",
            fmt_f64(limit)
        )));
    }
    let t_final = args.t_final.unwrap_or(setup.t_final);
    let state0 = match (&setup.reference, &setup.init) {
        (Some(sol), _) => init_from_solution(sol, &grid, 0.0).map_err(runtime)?,
        (None, Some(init)) => FieldState { t: 0.0, values: init.iter().map(|&v| vec![v; grid.nx]).collect() },
        (None, None) => unreachable!("setup provides initial data"),
    };
    let m = model.m();
    let bc = match args.bc.as_deref().unwrap_or(setup.bc_default) {
        "neumann" => BoundaryCondition::neumann(m),
        "dirichlet" => {
            let left: Vec<f64> = state0.values.iter().map(|v| v[0]).collect();
            let right: Vec<f64> = state0.values.iter().map(|v| v[grid.nx - 1]).collect();
            BoundaryCondition::dirichlet(&left, &right)
        }
        "exact" => {
            let sol = setup.reference.clone().ok_or_else(|| usage("--bc exact needs a closed-form solution"))?;
            BoundaryCondition::from_solution(Arc::new(sol))
        }
        other => return Err(usage(format!("unknown boundary handling `{other}` (neumann | dirichlet | exact)"))),
    };
    let cfg = SimConfig { dt, t_final, scheme, snapshot_stride: args.stride };
    let traj = run(model, &grid, state0, &bc, &cfg).map_err(runtime)?;
    if let Some(dir) = &args.out {
        write_file(&dir.join("snapshots.csv"), &snapshot_csv(&grid, &traj.snapshots))?;
        write_file(&dir.join("manifest.txt"), &manifest(model, &grid, &bc, &cfg))?;
    }
    let last = traj.last();
    println!("grid [{}, {}] nx={} dx={:.4e}; dt={:.4e}; t={}", grid.a, grid.b, grid.nx, grid.dx(), dt, last.t);
    if let Some(e) = traj.failure {
        return Err(runtime(format!("run stopped: {e}")));
    }
    if let Some(sol) = &setup.reference {
        let (linf, l2) = error_vs_solution(&grid, last, sol).map_err(runtime)?;
        println!("error vs closed form: Linf = {linf:.6e}, L2 = {l2:.6e}, 5 dx^2 = {:.6e}", 5.0 * grid.dx() * grid.dx());
        if let Some(lim) = sol.time_asymptote() {
            let dist = last.values.iter().zip(&lim).flat_map(|(v, l)| v.iter().map(move |x| (x - l).abs())).fold(0.0, f64::max);
            let names: Vec<String> = lim.iter().enumerate().map(|(i, v)| format!("u{} = {v}", i + 1)).collect();
            let surviving: Vec<String> =
                lim.iter().enumerate().filter(|(_, v)| v.abs() > 1e-12).map(|(i, _)| format!("u{}", i + 1)).collect();
            println!("asymptote: {} (surviving: {}); distance at t = {}: {dist:.3e}", names.join(", "), surviving.join(", "), last.t);
        }
    } else {
        let ints = last.integrals(&grid);
        println!("final integrals: {}", fmt_vec(&ints));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
pub fn tanh(
    id: &str,
    params: &[String],
    fix: &[String],
    free: &[String],
    starts: usize,
    range: f64,
    dump: bool,
    tol: f64,
) -> Result<(), CliError> {
    let sol = solution(id, params)?;
    let (ans, point) = front_ansatz(&sol).map_err(|e| match e {
        TanhError::NotTanhType(_) => usage(e.to_string()),
        other => runtime(other),
    })?;
    if fix.is_empty() && free.is_empty() {
        let rep = verify_front(&sol).map_err(runtime)?;
        if dump {
            print!("{}", build_system(&ans).dump());
        }
        let exact = match rep.exact {
            Some(true) => "exact",
            Some(false) => "exact (nonzero)",
            None => "floating point",
        };
        println!(
            "{} equations={} max_relative={:.3e} max_abs={:.3e} arithmetic={exact}",
            rep.id, rep.equations, rep.max_residual, rep.max_abs_residual
        );
        if rep.max_residual > tol || rep.exact == Some(false) {
            return Err(CliError::Verification(format!("coefficient residual {:.3e} > {tol:e}", rep.max_residual)));
        }
        return Ok(());
    }
    // Rediscovery: fix the listed unknowns at the entry's values, free model
    // scalars, then multistart Newton.
    let names = ans.unknowns();
    let mut truth: BTreeMap<String, f64> = names.iter().cloned().zip(point.iter().copied()).collect();
    let mut work = ans.clone();
    for name in fix {
        let v = *truth.get(name).ok_or_else(|| usage(format!("`{name}` is not an unknown (have {})", names.join(", "))))?;
        work = work.fix(name, Value::float(v)).map_err(|e| usage(e.to_string()))?;
    }
    for name in free {
        if let Some(Some(v)) = ans.value(name) {
            truth.insert(name.clone(), v.to_f64());
        }
        work = work.free(name).map_err(|e| usage(e.to_string()))?;
    }
    let sys = build_system(&work);
    if dump {
        print!("{}", sys.dump());
    }
    let runs = multistart(&sys, starts, range, MULTISTART_SEED, NewtonOptions::default());
    let mut distinct: Vec<Vec<f64>> = Vec::new();
    for (_, out) in runs.iter().filter(|(_, o)| o.is_converged()) {
        let p = out.point();
        if !distinct.iter().any(|d| d.iter().zip(p).all(|(a, b)| (a - b).abs() <= 1e-8 * (1.0 + a.abs()))) {
            distinct.push(p.to_vec());
        }
    }
    let converged = runs.iter().filter(|(_, o)| o.is_converged()).count();
    println!("unknowns: {}", sys.unknowns.join(", "));
    println!("starts={starts} converged={converged} distinct={}", distinct.len());
    let want: Vec<f64> = sys.unknowns.iter().map(|n| truth[n]).collect();
    let mut recovered = false;
    for (k, d) in distinct.iter().enumerate() {
        let hit = d.iter().zip(&want).all(|(a, b)| (a - b).abs() <= 1e-8);
        recovered |= hit;
        let vals: Vec<String> = sys.unknowns.iter().zip(d).map(|(n, v)| format!("{n}={v:.12}")).collect();
        println!("solution {k}: {}{}", vals.join(" "), if hit { "  [entry]" } else { "" });
    }
    println!("entry recovered: {}", if recovered { "yes" } else { "no" });
    if converged == 0 {
        return Err(CliError::Verification("no start converged".into()));
    }
    Ok(())
}

pub fn reduce(id: &str, params: &[String], grid: Option<&str>, out: Option<&Path>, tol: f64) -> Result<(), CliError> {
    let sol = solution(id, params)?;
    let (ans, profile) = exact_reduction(&sol).map_err(|e| match e {
        ReductionError::NoReduction(_) => usage(e.to_string()),
        other => runtime(other),
    })?;
    let rs = ans.reduced();
    println!("ansatz: {}", ans.id());
    println!("reduced system: {} (order {}, dimension {})", rs.label(), rs.order(), rs.dim());
    for (k, v) in rs.params() {
        println!("  {k} = {v}");
    }
    for (k, v) in ans.derived() {
        println!("derived {k} = {v}");
    }
    let (window, n) = match grid.map(parse_grid).transpose()? {
        Some((a, b, n)) => (Window { t: sol.window().t, x: (a, b) }, n),
        None => (sol.window(), 21),
    };
    let samples = window.grid(n);
    let rep = consistency_check(&ans, &profile, &samples).map_err(runtime)?;
    println!(
        "consistency: pde_residual={:.3e} reduced_residual={:.3e} derivative_mismatch={:.3e} samples={} skipped={}",
        rep.pde_residual, rep.reduced_residual, rep.derivative_mismatch, rep.samples, rep.skipped
    );
    if let Some(dir) = out {
        let ws: Vec<f64> = samples.iter().map(|&(t, x)| ans.profile_argument(t, x)).collect();
        let (lo, hi) = ws.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), w| (a.min(*w), b.max(*w)));
        let omegas: Vec<f64> = (0..201).map(|k| lo + (hi - lo) * k as f64 / 200.0).collect();
        write_file(&dir.join("profile.csv"), &profile_csv(&profile, &omegas))?;
    }
    if rep.reduced_residual > tol || rep.pde_residual > 1e-9 {
        return Err(CliError::Verification("lifted profile is not consistent".into()));
    }
    Ok(())
}

fn print_steady(model: &DlvModel) {
    let set = model.steady_states();
    println!("steady states:");
    for s in &set.states {
        let exact: Vec<String> = s.exact.iter().map(|v| v.to_string()).collect();
        let active: Vec<String> = s.active_set.iter().map(|i| format!("u{}", i + 1)).collect();
        println!("  ({})  nonzero: {{{}}}", exact.join(", "), active.join(", "));
    }
    for d in &set.degenerate {
        let active: Vec<String> = d.iter().map(|i| format!("u{}", i + 1)).collect();
        println!("  degenerate subset {{{}}}: none or a continuum", active.join(", "));
    }
}

pub fn steady(model: Option<&Path>, sol: Option<&str>, params: &[String]) -> Result<(), CliError> {
    let model = match (model, sol) {
        (Some(path), None) => {
            let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
            model_from_toml(&text).map_err(|e| usage(e.to_string()))?
        }
        (None, Some(id)) => solution(id, params)?.model().clone(),
        _ => return Err(usage("steady needs --model FILE or --solution ID")),
    };
    print_steady(&model);
    Ok(())
}

pub fn figure(fig: &str, out: &Path, nx: usize, nt: usize) -> Result<(), CliError> {
    let preset = presets::figure(fig).ok_or_else(|| {
        let ids: Vec<&str> = presets::FIGURES.iter().map(|f| f.id).collect();
        usage(format!("unknown figure `{fig}` (have {})", ids.join(", ")))
    })?;
    if nx < 2 || nt < 2 {
        return Err(usage("--nx and --nt must be at least 2"));
    }
    let sol = preset.instantiate();
    let (mut a, mut b) = sol.window().x;
    if sol.front().is_some() {
        // Fronts: symmetric about the origin so x = 0 is sampled for odd nx.
        let h = a.abs().max(b.abs());
        (a, b) = (-h, h);
    }
    let mut rows = Vec::with_capacity(nx * nt);
    let mut skipped = 0;
    for i in 0..nt {
        let t = 3.0 * i as f64 / (nt - 1) as f64;
        for j in 0..nx {
            let x = if j == nx - 1 { b } else { a + (b - a) * j as f64 / (nx - 1) as f64 };
            match sol.eval(t, x) {
                Ok(u) => rows.push((t, x, u)),
                Err(_) => skipped += 1,
            }
        }
    }
    let path = out.join(format!("fig-{fig}.csv"));
    write_file(&path, &csv_field(&rows, sol.model().m()))?;
    println!("{}: {} ({})", path.display(), preset.description, preset.solution);
    let derived: Vec<String> = sol.derived().iter().map(|(k, v)| format!("{k} = {v}")).collect();
    println!("derived: {}", derived.join(", "));
    println!("rows: {}, skipped: {skipped}, t in [0, 3], x in [{a}, {b}]", rows.len());
    Ok(())
}
