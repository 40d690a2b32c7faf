//! The tanh method for traveling fronts.
//!
//! With `T = tanh(μω)`, `ω = x − αt` and `dT/dω = μ(1 − T²)`, a front whose
//! components are polynomials `U_i(T)` turns the traveling-wave system
//! `U_i″ + αλ_iU_i′ + U_i(a_i + Σ_j b_ij U_j) = 0` into polynomial identities
//! in `T`. Each coefficient of `T^k` is a polynomial in the scalars of the
//! problem (expansion coefficients, `μ`, `α` and, if requested, model
//! coefficients). The same algebra holds for `T = coth(μω)`.
//!
//! Polynomials carry [`Value`] coefficients, so a system whose scalars are
//! all known rationals is collected exactly.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::TanhError;
use crate::io::fmt_f64;
use crate::model::DlvModel;
use crate::solutions::{reference, ClosedFormSolution, PdeField, SolutionId};
use crate::value::Value;

/// Sparse multivariate polynomial over `nvars` unknowns.
#[derive(Clone, Debug, PartialEq)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Vec<u16>, Value>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Value) -> Self {
        let mut p = MPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    /// The unknown `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = MPoly::zero(nvars);
        p.terms.insert(e, Value::one());
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `(exponents, coefficient)` pairs in graded-lexicographic storage order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u16], Value)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), *c))
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().map(|&k| k as u32).sum()).max().unwrap_or(0)
    }

    /// The value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Value> {
        match self.terms.len() {
            0 => Some(Value::zero()),
            1 => self.terms.get(&vec![0; self.nvars]).copied(),
            _ => None,
        }
    }

    pub fn scale(&self, c: Value) -> Self {
        if c.is_zero() {
            return MPoly::zero(self.nvars);
        }
        let mut p = self.clone();
        p.terms.values_mut().for_each(|v| *v = *v * c);
        p.prune();
        p
    }

    fn prune(&mut self) {
        self.terms.retain(|_, v| !v.is_zero());
    }

    /// Value and the sum of absolute term values at `x`.
    pub fn eval_with_scale(&self, x: &[f64]) -> (f64, f64) {
        let (mut s, mut mag) = (0.0, 0.0);
        for (e, c) in &self.terms {
            let mut t = c.to_f64();
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t *= xi.powi(k as i32);
                }
            }
            s += t;
            mag += t.abs();
        }
        (s, mag)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.eval_with_scale(x).0
    }
}

impl Add for &MPoly {
    type Output = MPoly;
    fn add(self, rhs: &MPoly) -> MPoly {
        let mut p = self.clone();
        for (e, c) in &rhs.terms {
            let slot = p.terms.entry(e.clone()).or_insert_with(Value::zero);
            *slot = *slot + *c;
        }
        p.prune();
        p
    }
}

impl Sub for &MPoly {
    type Output = MPoly;
    fn sub(self, rhs: &MPoly) -> MPoly {
        self + &(-rhs)
    }
}

impl Neg for &MPoly {
    type Output = MPoly;
    fn neg(self) -> MPoly {
        self.scale(Value::int(-1))
    }
}

impl Mul for &MPoly {
    type Output = MPoly;
    fn mul(self, rhs: &MPoly) -> MPoly {
        let mut p = MPoly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Vec<u16> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                let slot = p.terms.entry(e).or_insert_with(Value::zero);
                *slot = *slot + *ca * *cb;
            }
        }
        p.prune();
        p
    }
}

/// Polynomial in `T` with polynomial coefficients (index = power).
type TPoly = Vec<MPoly>;

fn t_add(a: &TPoly, b: &TPoly, n: usize) -> TPoly {
    (0..a.len().max(b.len()))
        .map(|k| match (a.get(k), b.get(k)) {
            (Some(x), Some(y)) => x + y,
            (Some(x), None) | (None, Some(x)) => x.clone(),
            (None, None) => MPoly::zero(n),
        })
        .collect()
}

fn t_mul(a: &TPoly, b: &TPoly, n: usize) -> TPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![MPoly::zero(n); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

fn t_scale(a: &TPoly, c: &MPoly) -> TPoly {
    a.iter().map(|x| x * c).collect()
}

fn t_deriv(a: &TPoly) -> TPoly {
    a.iter().enumerate().skip(1).map(|(k, c)| c.scale(Value::int(k as i64))).collect()
}

fn t_const(n: usize, coeffs: &[i64]) -> TPoly {
    coeffs.iter().map(|&c| MPoly::constant(n, Value::int(c))).collect()
}

/// Degrees from balancing `U″` (degree `N + 2` in `T`) against the quadratic
/// reaction (degree `2N`): `N = 2` for every component.
pub fn balance_degrees(model: &DlvModel) -> Vec<usize> {
    vec![2; model.m()]
}

/// Mixed degrees as used by fronts with some components linear in `T`.
pub fn mixed_degrees(model: &DlvModel, request: &[usize]) -> Result<Vec<usize>, TanhError> {
    if request.len() != model.m() {
        return Err(TanhError::Dimension(format!("{} degrees for {} components", request.len(), model.m())));
    }
    if let Some(&d) = request.iter().find(|&&d| d != 1 && d != 2) {
        return Err(TanhError::Degree(d));
    }
    Ok(request.to_vec())
}

/// The scalars of a tanh expansion, each either known or unknown.
///
/// Names: `A{i}_{k}` (coefficient of `T^k` in component `i`, 1-based),
/// `mu`, `alpha`, `lambda{i}`, `a{i}`, `b{i}{j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TanhAnsatz {
    degrees: Vec<usize>,
    scalars: Vec<(String, Option<Value>)>,
    /// Use `T = coth(μω)` (same polynomial algebra).
    pub coth: bool,
}

impl TanhAnsatz {
    /// Coefficients, `μ` and `α` unknown; model coefficients known.
    pub fn new(model: &DlvModel, degrees: &[usize]) -> Result<Self, TanhError> {
        let degrees = mixed_degrees(model, degrees)?;
        let m = model.m();
        let mut scalars = Vec::new();
        for (i, &n) in degrees.iter().enumerate() {
            for k in 0..=n {
                scalars.push((format!("A{}_{k}", i + 1), None));
            }
        }
        scalars.push(("mu".into(), None));
        scalars.push(("alpha".into(), None));
        for i in 0..m {
            scalars.push((format!("lambda{}", i + 1), Some(model.lambda()[i])));
        }
        for i in 0..m {
            scalars.push((format!("a{}", i + 1), Some(model.a()[i])));
        }
        for i in 0..m {
            for j in 0..m {
                scalars.push((format!("b{}{}", i + 1, j + 1), Some(model.b()[i][j])));
            }
        }
        Ok(TanhAnsatz { degrees, scalars, coth: false })
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn m(&self) -> usize {
        self.degrees.len()
    }

    /// Names of the unknowns, in the order used by [`AlgebraicSystem`].
    pub fn unknowns(&self) -> Vec<String> {
        self.scalars.iter().filter(|(_, v)| v.is_none()).map(|(k, _)| k.clone()).collect()
    }

    pub fn value(&self, name: &str) -> Option<Option<Value>> {
        self.scalars.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    fn slot(&mut self, name: &str) -> Result<&mut Option<Value>, TanhError> {
        self.scalars
            .iter_mut()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v)
            .ok_or_else(|| TanhError::Dimension(format!("no scalar named `{name}`")))
    }

    pub fn fix(mut self, name: &str, value: Value) -> Result<Self, TanhError> {
        *self.slot(name)? = Some(value);
        Ok(self)
    }

    pub fn free(mut self, name: &str) -> Result<Self, TanhError> {
        *self.slot(name)? = None;
        Ok(self)
    }

    /// All scalars known, with the unknowns set to `x`.
    pub fn assign(&self, x: &[f64]) -> Result<Self, TanhError> {
        let names = self.unknowns();
        if names.len() != x.len() {
            return Err(TanhError::Dimension(format!("{} values for {} unknowns", x.len(), names.len())));
        }
        let mut out = self.clone();
        for (n, v) in names.iter().zip(x) {
            out = out.fix(n, Value::float(*v))?;
        }
        Ok(out)
    }

    fn poly(&self, name: &str, index: &BTreeMap<String, usize>, n: usize) -> MPoly {
        match self.value(name).expect("scalar exists") {
            Some(v) => MPoly::constant(n, v),
            None => MPoly::var(n, index[name]),
        }
    }

    /// Direct substitution: the traveling-wave residual of every component at
    /// one value of `T`, with the unknowns set to `x`.
    pub fn residual_at(&self, x: &[f64], t: f64) -> Vec<f64> {
        let names = self.unknowns();
        let get = |name: &str| match self.value(name).expect("scalar exists") {
            Some(v) => v.to_f64(),
            None => x[names.iter().position(|k| k == name).expect("unknown listed")],
        };
        let m = self.m();
        let (mu, alpha) = (get("mu"), get("alpha"));
        let g = 1.0 - t * t;
        let jets: Vec<(f64, f64, f64)> = (0..m)
            .map(|i| {
                let (mut p, mut dp, mut ddp) = (0.0, 0.0, 0.0);
                for k in (0..=self.degrees[i]).rev() {
                    let c = get(&format!("A{}_{k}", i + 1));
                    ddp = ddp * t + 2.0 * dp;
                    dp = dp * t + p;
                    p = p * t + c;
                }
                (p, mu * g * dp, mu * mu * g * (-2.0 * t * dp + g * ddp))
            })
            .collect();
        (0..m)
            .map(|i| {
                let (p, d1, d2) = jets[i];
                let s: f64 = (0..m).map(|j| get(&format!("b{}{}", i + 1, j + 1)) * jets[j].0).sum();
                d2 + alpha * get(&format!("lambda{}", i + 1)) * d1 + p * (get(&format!("a{}", i + 1)) + s)
            })
            .collect()
    }
}

/// One collected equation: the coefficient of `T^power` in the reduced
/// equation of `component` (0-based).
#[derive(Clone, Debug, PartialEq)]
pub struct Equation {
    pub component: usize,
    pub power: usize,
    pub poly: MPoly,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraicSystem {
    pub unknowns: Vec<String>,
    pub equations: Vec<Equation>,
}

/// Expand the ansatz through the traveling-wave reduction and collect the
/// coefficient of every power of `T`.
pub fn build_system(ansatz: &TanhAnsatz) -> AlgebraicSystem {
    let unknowns = ansatz.unknowns();
    let n = unknowns.len();
    let index: BTreeMap<String, usize> = unknowns.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
    let p = |name: &str| ansatz.poly(name, &index, n);
    let m = ansatz.m();
    let us: Vec<TPoly> =
        (0..m).map(|i| (0..=ansatz.degrees[i]).map(|k| p(&format!("A{}_{k}", i + 1))).collect()).collect();
    let mu = p("mu");
    let alpha = p("alpha");
    let mu2 = &mu * &mu;
    let g = t_const(n, &[1, 0, -1]);
    let two_t = t_const(n, &[0, -2]);
    let mut equations = Vec::new();
    for i in 0..m {
        let d1 = t_deriv(&us[i]);
        let d2 = t_deriv(&d1);
        // U′ = μ g U_T,  U″ = μ² g (−2T U_T + g U_TT)
        let first = t_scale(&t_mul(&g, &d1, n), &mu);
        let inner = t_add(&t_mul(&two_t, &d1, n), &t_mul(&g, &d2, n), n);
        let second = t_scale(&t_mul(&g, &inner, n), &mu2);
        let damping = t_scale(&first, &(&alpha * &p(&format!("lambda{}", i + 1))));
        let mut rate: TPoly = vec![p(&format!("a{}", i + 1))];
        for (j, uj) in us.iter().enumerate() {
            rate = t_add(&rate, &t_scale(uj, &p(&format!("b{}{}", i + 1, j + 1))), n);
        }
        let reaction = t_mul(&us[i], &rate, n);
        let total = t_add(&t_add(&second, &damping, n), &reaction, n);
        for (power, poly) in total.into_iter().enumerate() {
            equations.push(Equation { component: i, power, poly });
        }
    }
    AlgebraicSystem { unknowns, equations }
}

impl AlgebraicSystem {
    pub fn n_unknowns(&self) -> usize {
        self.unknowns.len()
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.equations.iter().map(|e| e.poly.eval(x)).collect()
    }

    /// `max_k |F_k(x)| / (1 + Σ|terms of F_k|)`.
    pub fn scaled_residual(&self, x: &[f64]) -> f64 {
        self.equations
            .iter()
            .map(|e| {
                let (v, mag) = e.poly.eval_with_scale(x);
                v.abs() / (1.0 + mag)
            })
            .fold(0.0, f64::max)
    }

    pub fn residual_norm(&self, x: &[f64]) -> f64 {
        self.eval(x).iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// `Σ_k F_(i,k)(x) T^k` for component `i`.
    pub fn component_poly_at(&self, x: &[f64], component: usize, t: f64) -> f64 {
        self.equations
            .iter()
            .filter(|e| e.component == component)
            .map(|e| e.poly.eval(x) * t.powi(e.power as i32))
            .sum()
    }

    /// Forward-difference Jacobian with step `1e-7·(1 + |x_j|)`.
    pub fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let f0 = self.eval(x);
        let mut j = DMatrix::zeros(f0.len(), x.len());
        let mut xp = x.to_vec();
        for c in 0..x.len() {
            let h = 1e-7 * (1.0 + x[c].abs());
            xp[c] = x[c] + h;
            let f1 = self.eval(&xp);
            for r in 0..f0.len() {
                j[(r, c)] = (f1[r] - f0[r]) / h;
            }
            xp[c] = x[c];
        }
        j
    }

    /// Every constant equation is an exact zero (only meaningful when all
    /// scalars are known rationals).
    pub fn is_exactly_satisfied(&self) -> Option<bool> {
        let mut all_exact = true;
        for e in &self.equations {
            match e.poly.as_constant() {
                Some(c) => {
                    if !c.is_exact() {
                        all_exact = false;
                    } else if !c.is_zero() {
                        return Some(false);
                    }
                }
                None => return None,
            }
        }
        all_exact.then_some(true)
    }

    /// Audit listing: one block per equation, one monomial per line.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "unknowns: {}", self.unknowns.join(", "));
        for e in &self.equations {
            let _ = writeln!(s, "equation component={} power={} terms={}", e.component + 1, e.power, e.poly.terms.len());
            for (exps, c) in e.poly.terms() {
                let mono: Vec<String> = exps
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| if k == 1 { self.unknowns[i].clone() } else { format!("{}^{k}", self.unknowns[i]) })
                    .collect();
                let coef = if c.is_exact() { c.to_string() } else { fmt_f64(c.to_f64()) };
                let _ = writeln!(s, "  {coef} {}", if mono.is_empty() { "1".into() } else { mono.join("*") });
            }
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Relative singular-value cutoff for the rank test.
    pub rank_tol: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { tol: 1e-11, max_iter: 100, rank_tol: 1e-9 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NewtonFailure {
    Divergence,
    MaxIterations,
    SingularJacobian,
}

#[derive(Clone, Debug, PartialEq)]
pub enum NewtonOutcome {
    Converged { x: Vec<f64>, residual: f64, iterations: usize },
    Failed { reason: NewtonFailure, best: Vec<f64>, residual: f64, iterations: usize },
}

impl NewtonOutcome {
    pub fn is_converged(&self) -> bool {
        matches!(self, NewtonOutcome::Converged { .. })
    }

    /// The solution or the best iterate.
    pub fn point(&self) -> &[f64] {
        match self {
            NewtonOutcome::Converged { x, .. } => x,
            NewtonOutcome::Failed { best, .. } => best,
        }
    }

    pub fn residual(&self) -> f64 {
        match self {
            NewtonOutcome::Converged { residual, .. } | NewtonOutcome::Failed { residual, .. } => *residual,
        }
    }
}

fn full_column_rank(j: &DMatrix<f64>, rank_tol: f64) -> bool {
    if j.ncols() > j.nrows() {
        return false;
    }
    let sv = j.clone().svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    smax > 0.0 && sv.iter().all(|&s| s > rank_tol * smax)
}

/// Damped Gauss–Newton: least-squares steps from an SVD solve of `J dx = −F`
/// with a backtracking line search on `‖F‖₂`. Success requires
/// `‖F‖∞ ≤ tol` and a Jacobian of full column rank at the solution.
pub fn newton_solve(system: &AlgebraicSystem, seed: &[f64], opts: NewtonOptions) -> NewtonOutcome {
    let norm2 = |f: &[f64]| f.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut x = seed.to_vec();
    let mut f = system.eval(&x);
    let mut it = 0;
    loop {
        let res = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !res.is_finite() {
            return NewtonOutcome::Failed { reason: NewtonFailure::Divergence, best: x, residual: res, iterations: it };
        }
        let jac = system.jacobian(&x);
        if res <= opts.tol {
            return if full_column_rank(&jac, opts.rank_tol) {
                NewtonOutcome::Converged { x, residual: res, iterations: it }
            } else {
                NewtonOutcome::Failed { reason: NewtonFailure::SingularJacobian, best: x, residual: res, iterations: it }
            };
        }
        if it >= opts.max_iter {
            return NewtonOutcome::Failed { reason: NewtonFailure::MaxIterations, best: x, residual: res, iterations: it };
        }
        it += 1;
        let rhs = -DVector::from_vec(f.clone());
        let svd = jac.clone().svd(true, true);
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let dx = match svd.solve(&rhs, 1e-14 * smax.max(1e-300)) {
            Ok(d) => d,
            Err(_) => {
                return NewtonOutcome::Failed {
                    reason: NewtonFailure::SingularJacobian,
                    best: x,
                    residual: res,
                    iterations: it,
                }
            }
        };
        let n0 = norm2(&f);
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let xt: Vec<f64> = x.iter().zip(dx.iter()).map(|(a, d)| a + step * d).collect();
            let ft = system.eval(&xt);
            let nt = norm2(&ft);
            if nt.is_finite() && nt < n0 {
                accepted = Some((xt, ft));
                break;
            }
            step *= 0.5;
        }
        match accepted {
            Some((xt, ft)) => {
                x = xt;
                f = ft;
                if x.iter().any(|v| !v.is_finite() || v.abs() > 1e12) {
                    return NewtonOutcome::Failed {
                        reason: NewtonFailure::Divergence,
                        best: x,
                        residual: res,
                        iterations: it,
                    };
                }
            }
            None => {
                let reason = if full_column_rank(&jac, opts.rank_tol) {
                    NewtonFailure::Divergence
                } else {
                    NewtonFailure::SingularJacobian
                };
                return NewtonOutcome::Failed { reason, best: x, residual: res, iterations: it };
            }
        }
    }
}

/// Seed used by [`multistart`] unless the caller supplies one.
pub const MULTISTART_SEED: u64 = 0xD17;

/// Newton from `starts` random seeds drawn uniformly from `[−range, range]`
/// per unknown. Results are ordered by start index and reproducible for a
/// given `seed`.
pub fn multistart(
    system: &AlgebraicSystem,
    starts: usize,
    range: f64,
    seed: u64,
    opts: NewtonOptions,
) -> Vec<(Vec<f64>, NewtonOutcome)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..starts)
        .map(|_| {
            let s: Vec<f64> = (0..system.n_unknowns()).map(|_| rng.gen_range(-range..=range)).collect();
            let out = newton_solve(system, &s, opts);
            (s, out)
        })
        .collect()
}

/// A catalog front as a tanh ansatz: coefficients, `μ` and `α` unknown, with
/// the entry's values as the reference point.
pub fn front_ansatz(sol: &ClosedFormSolution) -> Result<(TanhAnsatz, Vec<f64>), TanhError> {
    let front = sol.front().ok_or_else(|| TanhError::NotTanhType(sol.id().to_string()))?;
    let degrees: Vec<usize> = front.coeffs.iter().map(|c| c.len().saturating_sub(1)).collect();
    let mut ans = TanhAnsatz::new(sol.model(), &degrees)?;
    ans.coth = front.coth;
    let mut point = Vec::new();
    for c in &front.coeffs {
        point.extend(c.iter().map(|v| v.to_f64()));
    }
    point.push(front.mu.to_f64());
    point.push(front.speed.to_f64());
    Ok((ans, point))
}

/// Outcome of substituting a catalog front into its algebraic system.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceReport {
    pub id: SolutionId,
    pub equations: usize,
    /// `max_k |F_k| / (1 + Σ|terms|)` at the entry's coefficients.
    pub max_residual: f64,
    pub max_abs_residual: f64,
    /// `Some(true)` when every scalar is an exact rational and all
    /// equations vanish exactly.
    pub exact: Option<bool>,
}

/// [`verify_front`] for the reference instance of `id`.
pub fn verify_reference_instance(id: SolutionId) -> Result<InstanceReport, TanhError> {
    if !id.is_tanh_type() {
        return Err(TanhError::NotTanhType(id.to_string()));
    }
    verify_front(&reference(id))
}

/// Build the algebraic system for a front entry and evaluate it at the
/// entry's own coefficients.
pub fn verify_front(sol: &ClosedFormSolution) -> Result<InstanceReport, TanhError> {
    let (ans, point) = front_ansatz(sol)?;
    let sys = build_system(&ans);
    let front = sol.front().expect("checked by front_ansatz");
    let mut known = ans.clone();
    for (name, v) in ans.unknowns().iter().zip(
        front.coeffs.iter().flatten().copied().chain([front.mu, front.speed]),
    ) {
        known = known.fix(name, v)?;
    }
    let exact = build_system(&known).is_exactly_satisfied();
    Ok(InstanceReport {
        id: sol.id(),
        equations: sys.equations.len(),
        max_residual: sys.scaled_residual(&point),
        max_abs_residual: sys.residual_norm(&point),
        exact,
    })
}
