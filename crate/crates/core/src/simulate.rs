//! Method-of-lines finite-difference simulator on a uniform 1D grid.
//!
//! `u_t = (u_xx + u(a + Bu))/λ` componentwise, second-order central
//! differences in space, zero-flux ends through mirror ghost nodes and
//! strongly imposed Dirichlet ends. Time stepping is classical RK4 (with a
//! diffusion CFL guard) or an IMEX scheme: Crank–Nicolson diffusion with the
//! reaction taken explicitly.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::SimError;
use crate::io::{csv_field, fmt_f64};
use crate::model::DlvModel;
use crate::solutions::PdeField;

/// Fraction of the explicit diffusion limit `min λ·dx²/2` allowed for RK4.
pub const CFL_SAFETY: f64 = 0.9;

/// Magnitude treated as blow-up.
const BLOW_UP: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    pub a: f64,
    pub b: f64,
    pub nx: usize,
}

impl Grid1D {
    pub fn new(a: f64, b: f64, nx: usize) -> Result<Self, SimError> {
        if nx < 8 {
            return Err(SimError::Grid(format!("nx = {nx} < 8")));
        }
        if !(b > a) || !a.is_finite() || !b.is_finite() {
            return Err(SimError::Grid(format!("need finite A < B, got [{a}, {b}]")));
        }
        Ok(Grid1D { a, b, nx })
    }

    pub fn dx(&self) -> f64 {
        (self.b - self.a) / (self.nx - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i == self.nx - 1 {
            self.b
        } else {
            self.a + i as f64 * self.dx()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }
}

/// Component values at the grid nodes: `values[i][j]` is component `i` at
/// node `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldState {
    pub t: f64,
    pub values: Vec<Vec<f64>>,
}

impl FieldState {
    pub fn m(&self) -> usize {
        self.values.len()
    }

    /// Trapezoidal integral of each component.
    pub fn integrals(&self, grid: &Grid1D) -> Vec<f64> {
        let dx = grid.dx();
        self.values
            .iter()
            .map(|v| dx * (v.iter().sum::<f64>() - 0.5 * (v[0] + v[v.len() - 1])))
            .collect()
    }
}

/// Condition for one component at one end.
#[derive(Clone)]
pub enum EndCondition {
    NeumannZero,
    DirichletConstant(f64),
    /// Boundary values (and their time derivative) taken from a field.
    DirichletFromSolution(Arc<dyn PdeField>),
}

impl std::fmt::Debug for EndCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EndCondition::NeumannZero => f.write_str("NeumannZero"),
            EndCondition::DirichletConstant(v) => write!(f, "DirichletConstant({v})"),
            EndCondition::DirichletFromSolution(_) => f.write_str("DirichletFromSolution"),
        }
    }
}

impl EndCondition {
    fn label(&self) -> String {
        match self {
            EndCondition::NeumannZero => "neumann0".into(),
            EndCondition::DirichletConstant(v) => format!("dirichlet({})", fmt_f64(*v)),
            EndCondition::DirichletFromSolution(_) => "dirichlet(solution)".into(),
        }
    }
}

/// Per-component conditions at the left and right ends.
#[derive(Clone, Debug)]
pub struct BoundaryCondition {
    pub left: Vec<EndCondition>,
    pub right: Vec<EndCondition>,
}

impl BoundaryCondition {
    pub fn neumann(m: usize) -> Self {
        BoundaryCondition { left: vec![EndCondition::NeumannZero; m], right: vec![EndCondition::NeumannZero; m] }
    }

    pub fn dirichlet(left: &[f64], right: &[f64]) -> Self {
        BoundaryCondition {
            left: left.iter().map(|&v| EndCondition::DirichletConstant(v)).collect(),
            right: right.iter().map(|&v| EndCondition::DirichletConstant(v)).collect(),
        }
    }

    pub fn from_solution(sol: Arc<dyn PdeField>) -> Self {
        let m = sol.model().m();
        let e = EndCondition::DirichletFromSolution(sol);
        BoundaryCondition { left: vec![e.clone(); m], right: vec![e; m] }
    }

    fn check(&self, m: usize) -> Result<(), SimError> {
        if self.left.len() != m || self.right.len() != m {
            return Err(SimError::Dimension(format!(
                "boundary conditions for {}/{} components, model has {m}",
                self.left.len(),
                self.right.len()
            )));
        }
        Ok(())
    }
}

/// `(value, d/dt value)` of a Dirichlet end at time `t`.
fn dirichlet_data(c: &EndCondition, comp: usize, t: f64, x: f64) -> Result<Option<(f64, f64)>, SimError> {
    match c {
        EndCondition::NeumannZero => Ok(None),
        EndCondition::DirichletConstant(v) => Ok(Some((*v, 0.0))),
        EndCondition::DirichletFromSolution(sol) => {
            let j = sol.jet(t, x).map_err(|e| SimError::Boundary(e.to_string()))?;
            let (v, vt) = (j.u[comp], j.u_t[comp]);
            if !v.is_finite() || !vt.is_finite() {
                return Err(SimError::Boundary(format!("non-finite boundary value at t = {t}, x = {x}")));
            }
            Ok(Some((v, vt)))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scheme {
    ExplicitRK4,
    /// Crank–Nicolson diffusion, explicit (forward Euler) reaction.
    Imex,
}

impl std::str::FromStr for Scheme {
    type Err = SimError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "rk4" => Ok(Scheme::ExplicitRK4),
            "imex" => Ok(Scheme::Imex),
            _ => Err(SimError::Grid(format!("unknown scheme `{s}` (rk4 | imex)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig {
    pub dt: f64,
    pub t_final: f64,
    pub scheme: Scheme,
    /// Keep every `stride`-th state (the initial and final states are always
    /// kept).
    pub snapshot_stride: usize,
}

/// Largest stable RK4 step: `CFL_SAFETY·min λ·dx²/2`.
pub fn cfl_limit(model: &DlvModel, grid: &Grid1D) -> f64 {
    let lmin = model.lambda_f64().iter().cloned().fold(f64::INFINITY, f64::min);
    CFL_SAFETY * lmin * grid.dx() * grid.dx() / 2.0
}

/// Node values of `sol` at time `t0`.
pub fn init_from_solution(sol: &dyn PdeField, grid: &Grid1D, t0: f64) -> Result<FieldState, SimError> {
    let m = sol.model().m();
    let mut values = vec![vec![0.0; grid.nx]; m];
    for j in 0..grid.nx {
        let x = grid.x(j);
        let u = sol.eval(t0, x).map_err(|e| SimError::SingularNode { node: j, x, reason: e.to_string() })?;
        if let Some(i) = u.iter().position(|v| !v.is_finite()) {
            return Err(SimError::SingularNode { node: j, x, reason: format!("component {} is not finite", i + 1) });
        }
        for i in 0..m {
            values[i][j] = u[i];
        }
    }
    Ok(FieldState { t: t0, values })
}

/// Coefficients and scratch buffers for stepping on one grid. States are kept
/// flat (`values[i*nx + j]`) while stepping.
struct Stepper<'a> {
    grid: &'a Grid1D,
    bc: &'a BoundaryCondition,
    m: usize,
    n: usize,
    inv_dx2: f64,
    inv_lambda: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
    k: [Vec<f64>; 4],
    tmp: Vec<f64>,
    // Tridiagonal workspace for the implicit half.
    c: Vec<f64>,
}

impl<'a> Stepper<'a> {
    fn new(model: &DlvModel, grid: &'a Grid1D, bc: &'a BoundaryCondition) -> Result<Self, SimError> {
        let (m, n) = (model.m(), grid.nx);
        bc.check(m)?;
        let zero = vec![0.0; m * n];
        Ok(Stepper {
            grid,
            bc,
            m,
            n,
            inv_dx2: 1.0 / (grid.dx() * grid.dx()),
            inv_lambda: model.lambda_f64().iter().map(|l| 1.0 / l).collect(),
            a: model.a_f64().to_vec(),
            b: model.b_f64().iter().flatten().copied().collect(),
            k: [zero.clone(), zero.clone(), zero.clone(), zero.clone()],
            tmp: zero,
            c: vec![0.0; n],
        })
    }

    fn ends(&self, i: usize, t: f64) -> Result<(Option<(f64, f64)>, Option<(f64, f64)>), SimError> {
        Ok((
            dirichlet_data(&self.bc.left[i], i, t, self.grid.a)?,
            dirichlet_data(&self.bc.right[i], i, t, self.grid.b)?,
        ))
    }

    /// Reaction rate `a_i + Σ_k b_ik u_k` at node `j`.
    #[inline]
    fn rate(&self, u: &[f64], i: usize, j: usize) -> f64 {
        let row = &self.b[i * self.m..(i + 1) * self.m];
        let mut r = self.a[i];
        for (k, bik) in row.iter().enumerate() {
            r += bik * u[k * self.n + j];
        }
        r
    }

    fn rhs(&self, t: f64, u: &[f64], out: &mut [f64]) -> Result<(), SimError> {
        let n = self.n;
        for i in 0..self.m {
            let ui = &u[i * n..(i + 1) * n];
            let il = self.inv_lambda[i];
            let h = self.inv_dx2;
            {
                let o = &mut out[i * n..(i + 1) * n];
                o[0] = (2.0 * (ui[1] - ui[0]) * h) * il;
                o[n - 1] = (2.0 * (ui[n - 2] - ui[n - 1]) * h) * il;
                for j in 1..n - 1 {
                    o[j] = ((ui[j - 1] - 2.0 * ui[j] + ui[j + 1]) * h) * il;
                }
            }
            for j in 0..n {
                let r = self.rate(u, i, j);
                out[i * n + j] += ui[j] * r * il;
            }
            let (l, r) = self.ends(i, t)?;
            if let Some((_, vt)) = l {
                out[i * n] = vt;
            }
            if let Some((_, vt)) = r {
                out[i * n + n - 1] = vt;
            }
        }
        Ok(())
    }

    fn impose(&self, t: f64, u: &mut [f64]) -> Result<(), SimError> {
        let n = self.n;
        for i in 0..self.m {
            let (l, r) = self.ends(i, t)?;
            if let Some((v, _)) = l {
                u[i * n] = v;
            }
            if let Some((v, _)) = r {
                u[i * n + n - 1] = v;
            }
        }
        Ok(())
    }

    fn rk4(&mut self, t: f64, u: &mut [f64], dt: f64) -> Result<(), SimError> {
        let mut k = std::mem::take(&mut self.k);
        let mut tmp = std::mem::take(&mut self.tmp);
        let res = (|| {
            self.rhs(t, u, &mut k[0])?;
            for ((y, u), k) in tmp.iter_mut().zip(u.iter()).zip(&k[0]) {
                *y = u + 0.5 * dt * k;
            }
            self.rhs(t + 0.5 * dt, &tmp, &mut k[1])?;
            for ((y, u), k) in tmp.iter_mut().zip(u.iter()).zip(&k[1]) {
                *y = u + 0.5 * dt * k;
            }
            self.rhs(t + 0.5 * dt, &tmp, &mut k[2])?;
            for ((y, u), k) in tmp.iter_mut().zip(u.iter()).zip(&k[2]) {
                *y = u + dt * k;
            }
            self.rhs(t + dt, &tmp, &mut k[3])?;
            for (idx, y) in u.iter_mut().enumerate() {
                *y += dt / 6.0 * (k[0][idx] + 2.0 * k[1][idx] + 2.0 * k[2][idx] + k[3][idx]);
            }
            self.impose(t + dt, u)
        })();
        self.k = k;
        self.tmp = tmp;
        res
    }

    fn imex(&mut self, t: f64, u: &mut [f64], dt: f64) -> Result<(), SimError> {
        let (m, n) = (self.m, self.n);
        let t1 = t + dt;
        let mut rhs = std::mem::take(&mut self.tmp);
        let mut c = std::mem::take(&mut self.c);
        let res = (|| {
            for i in 0..m {
                let r = 0.5 * dt * self.inv_dx2 * self.inv_lambda[i];
                let ui = &u[i * n..(i + 1) * n];
                for j in 0..n {
                    let lap = if j == 0 {
                        2.0 * (ui[1] - ui[0])
                    } else if j == n - 1 {
                        2.0 * (ui[n - 2] - ui[n - 1])
                    } else {
                        ui[j - 1] - 2.0 * ui[j] + ui[j + 1]
                    };
                    rhs[i * n + j] = ui[j] + r * lap + dt * ui[j] * self.rate(u, i, j) * self.inv_lambda[i];
                }
            }
            for i in 0..m {
                let r = 0.5 * dt * self.inv_dx2 * self.inv_lambda[i];
                let (l, rt) = self.ends(i, t1)?;
                let y = &mut rhs[i * n..(i + 1) * n];
                // Rows: -r·u_{j-1} + (1+2r)·u_j - r·u_{j+1}; mirror ghosts double
                // the inner coupling at zero-flux ends.
                let (d0, up0) = match l {
                    Some((v, _)) => {
                        y[0] = v;
                        (1.0, 0.0)
                    }
                    None => (1.0 + 2.0 * r, -2.0 * r),
                };
                let (dn, lon) = match rt {
                    Some((v, _)) => {
                        y[n - 1] = v;
                        (1.0, 0.0)
                    }
                    None => (1.0 + 2.0 * r, -2.0 * r),
                };
                let mut beta = d0;
                c[0] = up0 / beta;
                y[0] /= beta;
                for j in 1..n {
                    let (lo, di, up) = if j == n - 1 { (lon, dn, 0.0) } else { (-r, 1.0 + 2.0 * r, -r) };
                    beta = di - lo * c[j - 1];
                    c[j] = up / beta;
                    y[j] = (y[j] - lo * y[j - 1]) / beta;
                }
                for j in (0..n - 1).rev() {
                    y[j] -= c[j] * y[j + 1];
                }
            }
            Ok(())
        })();
        if res.is_ok() {
            u.copy_from_slice(&rhs);
        }
        self.tmp = rhs;
        self.c = c;
        res
    }

    fn advance(&mut self, scheme: Scheme, limit: f64, t: f64, u: &mut [f64], dt: f64) -> Result<(), SimError> {
        match scheme {
            Scheme::ExplicitRK4 => {
                // Allow the rounding slack of a step computed as a time difference.
                if dt > limit * (1.0 + 1e-9) {
                    return Err(SimError::Cfl { dt, limit });
                }
                self.rk4(t, u, dt)?;
            }
            Scheme::Imex => self.imex(t, u, dt)?,
        }
        let n = self.n;
        if let Some(idx) = u.iter().position(|x| !x.is_finite() || x.abs() > BLOW_UP) {
            return Err(SimError::BlowUp { t: t + dt, component: idx / n, node: idx % n });
        }
        Ok(())
    }
}

fn flatten(model: &DlvModel, grid: &Grid1D, state: &FieldState) -> Result<Vec<f64>, SimError> {
    let m = model.m();
    if state.m() != m || state.values.iter().any(|v| v.len() != grid.nx) {
        return Err(SimError::Dimension(format!("state is not {m} × {}", grid.nx)));
    }
    Ok(state.values.concat())
}

fn unflatten(t: f64, n: usize, u: &[f64]) -> FieldState {
    FieldState { t, values: u.chunks(n).map(|c| c.to_vec()).collect() }
}

/// One time step of size `dt`.
pub fn step(
    model: &DlvModel,
    grid: &Grid1D,
    state: &FieldState,
    bc: &BoundaryCondition,
    dt: f64,
    scheme: Scheme,
) -> Result<FieldState, SimError> {
    let mut u = flatten(model, grid, state)?;
    let mut st = Stepper::new(model, grid, bc)?;
    st.advance(scheme, cfl_limit(model, grid), state.t, &mut u, dt)?;
    Ok(unflatten(state.t + dt, grid.nx, &u))
}

/// States kept by [`run`]; `failure` is set if the run stopped early.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub snapshots: Vec<FieldState>,
    pub failure: Option<SimError>,
}

impl Trajectory {
    pub fn last(&self) -> &FieldState {
        self.snapshots.last().expect("the initial state is always kept")
    }
}

/// Step from `state0` to `cfg.t_final`. The number of steps is
/// `ceil((T − t0)/dt)` with the last step shortened to land on `T`.
pub fn run(
    model: &DlvModel,
    grid: &Grid1D,
    state0: FieldState,
    bc: &BoundaryCondition,
    cfg: &SimConfig,
) -> Result<Trajectory, SimError> {
    if !(cfg.dt > 0.0) {
        return Err(SimError::Grid(format!("dt = {} must be positive", cfg.dt)));
    }
    let limit = cfl_limit(model, grid);
    if cfg.scheme == Scheme::ExplicitRK4 && cfg.dt > limit {
        return Err(SimError::Cfl { dt: cfg.dt, limit });
    }
    let mut u = flatten(model, grid, &state0)?;
    let mut st = Stepper::new(model, grid, bc)?;
    let t0 = state0.t;
    let span = cfg.t_final - t0;
    let steps = if span <= 0.0 { 0 } else { (span / cfg.dt - 1e-9).ceil() as usize };
    let stride = cfg.snapshot_stride.max(1);
    let mut snapshots = vec![state0];
    let mut t = t0;
    let mut before = u.clone();
    for k in 0..steps {
        let t_next = if k + 1 == steps { cfg.t_final } else { t0 + (k + 1) as f64 * cfg.dt };
        before.copy_from_slice(&u);
        if let Err(e) = st.advance(cfg.scheme, limit, t, &mut u, t_next - t) {
            if snapshots.last().map(|s| s.t) != Some(t) {
                snapshots.push(unflatten(t, grid.nx, &before));
            }
            return Ok(Trajectory { snapshots, failure: Some(e) });
        }
        t = t_next;
        if (k + 1) % stride == 0 || k + 1 == steps {
            snapshots.push(unflatten(t, grid.nx, &u));
        }
    }
    Ok(Trajectory { snapshots, failure: None })
}

/// Nodewise `(L∞, L2)` difference from `sol` at the state's time; the L2 norm
/// is the trapezoidal `sqrt(∫|Δ|²)` summed over components.
pub fn error_vs_solution(grid: &Grid1D, state: &FieldState, sol: &dyn PdeField) -> Result<(f64, f64), SimError> {
    let exact = init_from_solution(sol, grid, state.t)?;
    if exact.m() != state.m() {
        return Err(SimError::Dimension(format!("solution has {} components, state {}", exact.m(), state.m())));
    }
    let dx = grid.dx();
    let (mut linf, mut l2) = (0.0f64, 0.0);
    for (e, s) in exact.values.iter().zip(&state.values) {
        for j in 0..grid.nx {
            let d = (e[j] - s[j]).abs();
            linf = linf.max(d);
            let w = if j == 0 || j == grid.nx - 1 { 0.5 } else { 1.0 };
            l2 += w * d * d * dx;
        }
    }
    Ok((linf, l2.sqrt()))
}

/// Errors of a refinement study and the fitted order.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceStudy {
    pub dx: Vec<f64>,
    pub linf: Vec<f64>,
    /// Least-squares slope of `log L∞` against `log dx`.
    pub order: f64,
    /// `max linf/dx²` over the grids.
    pub constant: f64,
}

/// Run `sol` from its values at `t0` to `t_final` on each grid with
/// `dt = dt_factor·dx²` and fit the observed spatial order. `bc` is built per
/// grid so Dirichlet data can follow the grid ends.
pub fn convergence_order(
    model: &DlvModel,
    sol: &dyn PdeField,
    grids: &[Grid1D],
    bc: &BoundaryCondition,
    t0: f64,
    t_final: f64,
    dt_factor: f64,
    scheme: Scheme,
) -> Result<ConvergenceStudy, SimError> {
    if grids.len() < 3 {
        return Err(SimError::Grid("a refinement study needs at least three grids".into()));
    }
    let mut dx = Vec::new();
    let mut linf = Vec::new();
    for g in grids {
        let h = g.dx();
        let cfg = SimConfig { dt: dt_factor * h * h, t_final, scheme, snapshot_stride: usize::MAX };
        let s0 = init_from_solution(sol, g, t0)?;
        let traj = run(model, g, s0, bc, &cfg)?;
        if let Some(e) = traj.failure {
            return Err(e);
        }
        let (e, _) = error_vs_solution(g, traj.last(), sol)?;
        dx.push(h);
        linf.push(e);
    }
    let lx: Vec<f64> = dx.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = linf.iter().map(|v| v.max(1e-300).ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let constant = dx.iter().zip(&linf).map(|(h, e)| e / (h * h)).fold(0.0, f64::max);
    Ok(ConvergenceStudy { dx, linf, order: sxy / sxx, constant })
}

/// Snapshot CSV `t,x,u1,...` with every node of every state.
pub fn snapshot_csv(grid: &Grid1D, states: &[FieldState]) -> String {
    let m = states.first().map(|s| s.m()).unwrap_or(0);
    let rows: Vec<(f64, f64, Vec<f64>)> = states
        .iter()
        .flat_map(|s| (0..grid.nx).map(move |j| (s.t, grid.x(j), s.values.iter().map(|v| v[j]).collect())))
        .collect();
    csv_field(&rows, m)
}

/// Run manifest as `key = value` lines.
pub fn manifest(model: &DlvModel, grid: &Grid1D, bc: &BoundaryCondition, cfg: &SimConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "grid = [{}, {}]", fmt_f64(grid.a), fmt_f64(grid.b));
    let _ = writeln!(s, "nx = {}", grid.nx);
    let _ = writeln!(s, "dx = {}", fmt_f64(grid.dx()));
    let _ = writeln!(s, "scheme = {}", if cfg.scheme == Scheme::Imex { "imex" } else { "rk4" });
    let _ = writeln!(s, "dt = {}", fmt_f64(cfg.dt));
    let _ = writeln!(s, "t_final = {}", fmt_f64(cfg.t_final));
    let left: Vec<String> = bc.left.iter().map(|c| c.label()).collect();
    let right: Vec<String> = bc.right.iter().map(|c| c.label()).collect();
    let _ = writeln!(s, "bc_left = {}", left.join(","));
    let _ = writeln!(s, "bc_right = {}", right.join(","));
    let _ = writeln!(s, "model_hash = {:016x}", model.fingerprint());
    s
}

/// Half-width `L` of the truncated domain for a front: at least
/// `40/(√24·|μ|)` (that is `40/√a` for the Fisher family, `a = 24μ²`),
/// doubled until every component is within `1e-8` of its limits at `±L`
/// at time `t0`.
pub fn truncation_half_width(sol: &crate::solutions::ClosedFormSolution, t0: f64) -> Option<f64> {
    let front = sol.front()?;
    let mu = front.mu.to_f64().abs();
    let speed = front.speed.to_f64();
    let shift = speed * t0;
    let limits: Vec<(f64, f64)> = front
        .coeffs
        .iter()
        .map(|c| {
            let at = |t: f64| c.iter().rev().fold(0.0, |acc, v| acc * t + v.to_f64());
            let (lo, hi) = (at(-1.0), at(1.0));
            if front.mu.to_f64() > 0.0 {
                (lo, hi)
            } else {
                (hi, lo)
            }
        })
        .collect();
    let mut l = 40.0 / (24f64.sqrt() * mu);
    for _ in 0..20 {
        let ok = [(-1.0, 0usize), (1.0, 1usize)].iter().all(|&(side, k)| {
            sol.eval(t0, shift + side * l).map_or(false, |u| {
                u.iter().zip(&limits).all(|(v, lim)| (v - if k == 0 { lim.0 } else { lim.1 }).abs() < 1e-8)
            })
        });
        if ok {
            return Some(l);
        }
        l *= 1.25;
    }
    None
}
