//! Normalized diffusive Lotka–Volterra systems
//!
//! ```text
//! λ_i ∂_t u_i = ∂_xx u_i + u_i (a_i + Σ_j b_ij u_j),   i = 1..m
//! ```
//!
//! Coefficients are stored as [`Value`]s (exact when possible) with `f64`
//! caches for the hot evaluation paths. Models are immutable; substitutions
//! such as `u → −b u` go through [`DlvModel::rescale_components`].

use crate::error::ModelError;
use crate::value::Value;

/// Absolute tolerance of the residual convention `|S| ≤ TOL·(1 + scale)`.
pub const RESIDUAL_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct DlvModel {
    name: Option<String>,
    lambda: Vec<Value>,
    a: Vec<Value>,
    b: Vec<Vec<Value>>,
    lf: Vec<f64>,
    af: Vec<f64>,
    bf: Vec<Vec<f64>>,
}

/// A point of the prolonged space: values and the derivatives that enter the
/// system.
#[derive(Clone, Debug, PartialEq)]
pub struct JetPoint {
    pub t: f64,
    pub x: f64,
    pub u: Vec<f64>,
    pub u_t: Vec<f64>,
    pub u_x: Vec<f64>,
    pub u_xx: Vec<f64>,
}

impl JetPoint {
    /// Jet of a constant state.
    pub fn constant(t: f64, x: f64, u: Vec<f64>) -> Self {
        let m = u.len();
        JetPoint { t, x, u, u_t: vec![0.0; m], u_x: vec![0.0; m], u_xx: vec![0.0; m] }
    }

    pub fn m(&self) -> usize {
        self.u.len()
    }

    pub fn is_finite(&self) -> bool {
        [&self.u, &self.u_t, &self.u_x, &self.u_xx].iter().all(|v| v.iter().all(|x| x.is_finite()))
    }
}

/// Outcome of the nondegeneracy inequalities for two- and three-component
/// systems.
#[derive(Clone, Debug, PartialEq)]
pub struct NondegeneracyReport {
    /// `false` for m ∉ {2, 3}; `checks` is then empty and `pass` is `true`.
    pub applicable: bool,
    pub checks: Vec<(String, bool)>,
    pub pass: bool,
}

/// A constant solution with its support.
#[derive(Clone, Debug, PartialEq)]
pub struct SteadyState {
    pub u: Vec<f64>,
    /// Exact coordinates when the model is rational.
    pub exact: Vec<Value>,
    pub active_set: Vec<usize>,
}

/// All constant solutions found by subset enumeration.
#[derive(Clone, Debug, PartialEq)]
pub struct SteadyStateSet {
    pub states: Vec<SteadyState>,
    /// Active sets whose linear subsystem is singular. Such a subset carries
    /// either no steady state or a continuum of them; it is reported rather
    /// than parametrized.
    pub degenerate: Vec<Vec<usize>>,
}

impl SteadyStateSet {
    /// Whether `u` is one of the isolated states, or a zero of the reaction
    /// whose support sits inside a degenerate active set.
    pub fn contains(&self, model: &DlvModel, u: &[f64], tol: f64) -> bool {
        let close = |s: &SteadyState| {
            s.u.iter().zip(u).all(|(a, b)| (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs())))
        };
        if self.states.iter().any(close) {
            return true;
        }
        let norm = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let r = model.reaction(u);
        let rmax = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if rmax > tol * (1.0 + norm * norm) {
            return false;
        }
        let support: Vec<usize> =
            (0..u.len()).filter(|&i| u[i].abs() > tol * (1.0 + norm)).collect();
        self.degenerate.iter().any(|d| support.iter().all(|i| d.contains(i)))
    }
}

impl DlvModel {
    /// General constructor: `b[i][j]` multiplies `u_i u_j` in equation `i`.
    pub fn new(lambda: Vec<Value>, a: Vec<Value>, b: Vec<Vec<Value>>) -> Result<Self, ModelError> {
        let m = lambda.len();
        if m < 2 {
            return Err(ModelError::TooFewComponents(m));
        }
        if a.len() != m {
            return Err(ModelError::Dimension { what: "a", expected: m, got: a.len() });
        }
        if b.len() != m {
            return Err(ModelError::Dimension { what: "b rows", expected: m, got: b.len() });
        }
        for row in &b {
            if row.len() != m {
                return Err(ModelError::Dimension { what: "b columns", expected: m, got: row.len() });
            }
        }
        for (i, l) in lambda.iter().enumerate() {
            let v = l.to_f64();
            if !(v > 0.0) || !v.is_finite() {
                return Err(ModelError::NonPositiveLambda { index: i, value: v });
            }
        }
        for (i, v) in a.iter().enumerate() {
            if !v.is_finite() {
                return Err(ModelError::NonFinite { what: format!("a[{i}]") });
            }
        }
        for (i, row) in b.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(ModelError::NonFinite { what: format!("b[{i}][{j}]") });
                }
            }
        }
        let lf = lambda.iter().map(|v| v.to_f64()).collect();
        let af = a.iter().map(|v| v.to_f64()).collect();
        let bf = b.iter().map(|r| r.iter().map(|v| v.to_f64()).collect()).collect();
        Ok(DlvModel { name: None, lambda, a, b, lf, af, bf })
    }

    /// `λ1 u_t = u_xx + u(a1 + b1 u + c1 v)`, `λ2 v_t = v_xx + v(a2 + b2 u + c2 v)`.
    pub fn two_component(
        lambda: [Value; 2],
        a: [Value; 2],
        (b1, c1): (Value, Value),
        (b2, c2): (Value, Value),
    ) -> Result<Self, ModelError> {
        DlvModel::new(lambda.to_vec(), a.to_vec(), vec![vec![b1, c1], vec![b2, c2]])
    }

    /// Three-component form with rows `(b_i, c_i, e_i)`.
    pub fn three_component(
        lambda: [Value; 3],
        a: [Value; 3],
        rows: [[Value; 3]; 3],
    ) -> Result<Self, ModelError> {
        DlvModel::new(lambda.to_vec(), a.to_vec(), rows.iter().map(|r| r.to_vec()).collect())
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn m(&self) -> usize {
        self.lambda.len()
    }

    pub fn lambda(&self) -> &[Value] {
        &self.lambda
    }

    pub fn a(&self) -> &[Value] {
        &self.a
    }

    pub fn b(&self) -> &[Vec<Value>] {
        &self.b
    }

    pub fn lambda_f64(&self) -> &[f64] {
        &self.lf
    }

    pub fn a_f64(&self) -> &[f64] {
        &self.af
    }

    pub fn b_f64(&self) -> &[Vec<f64>] {
        &self.bf
    }

    /// `r_i = u_i (a_i + Σ_j b_ij u_j)`. A zero entry of `u` gives an exactly
    /// zero entry of `r`.
    pub fn reaction(&self, u: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), self.m(), "state has wrong length");
        (0..self.m())
            .map(|i| {
                let lin: f64 = self.af[i] + self.bf[i].iter().zip(u).map(|(b, v)| b * v).sum::<f64>();
                u[i] * lin
            })
            .collect()
    }

    /// Jacobian of the reaction, `∂r_i/∂u_j`.
    pub fn reaction_jacobian(&self, u: &[f64]) -> Vec<Vec<f64>> {
        let m = self.m();
        (0..m)
            .map(|i| {
                let lin: f64 = self.af[i] + self.bf[i].iter().zip(u).map(|(b, v)| b * v).sum::<f64>();
                (0..m)
                    .map(|j| {
                        let d = u[i] * self.bf[i][j];
                        if i == j { d + lin } else { d }
                    })
                    .collect()
            })
            .collect()
    }

    /// `S_i = λ_i u_t − u_xx − r_i(u)`.
    pub fn pde_residual(&self, jet: &JetPoint) -> Vec<f64> {
        assert_eq!(jet.m(), self.m(), "jet has wrong component count");
        let r = self.reaction(&jet.u);
        (0..self.m()).map(|i| self.lf[i] * jet.u_t[i] - jet.u_xx[i] - r[i]).collect()
    }

    /// Largest magnitude among the terms that make up the residual; the scale
    /// in the `TOL·(1 + scale)` convention.
    pub fn residual_scale(&self, jet: &JetPoint) -> f64 {
        let mut s = 0.0f64;
        for i in 0..self.m() {
            s = s.max((self.lf[i] * jet.u_t[i]).abs()).max(jet.u_xx[i].abs());
            s = s.max((jet.u[i] * self.af[i]).abs());
            for j in 0..self.m() {
                s = s.max((jet.u[i] * self.bf[i][j] * jet.u[j]).abs());
            }
        }
        s
    }

    /// Max-norm residual divided by `1 + scale`.
    pub fn relative_residual(&self, jet: &JetPoint) -> f64 {
        let r = self.pde_residual(jet);
        let n = r.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        n / (1.0 + self.residual_scale(jet))
    }

    /// Nondegeneracy inequalities: for m = 2,
    /// `b1²+c1² ≠ 0, b2²+c2² ≠ 0, c1²+b2² ≠ 0`; for m = 3,
    /// `c1²+e1² ≠ 0, b2²+e2² ≠ 0, b3²+c3² ≠ 0`.
    pub fn nondegeneracy(&self) -> NondegeneracyReport {
        let nz = |vals: &[Value]| vals.iter().any(|v| !v.is_zero());
        let b = &self.b;
        let checks: Vec<(String, bool)> = match self.m() {
            2 => vec![
                ("b1^2+c1^2 != 0".into(), nz(&[b[0][0], b[0][1]])),
                ("b2^2+c2^2 != 0".into(), nz(&[b[1][0], b[1][1]])),
                ("c1^2+b2^2 != 0".into(), nz(&[b[0][1], b[1][0]])),
            ],
            3 => vec![
                ("c1^2+e1^2 != 0".into(), nz(&[b[0][1], b[0][2]])),
                ("b2^2+e2^2 != 0".into(), nz(&[b[1][0], b[1][2]])),
                ("b3^2+c3^2 != 0".into(), nz(&[b[2][0], b[2][1]])),
            ],
            _ => return NondegeneracyReport { applicable: false, checks: vec![], pass: true },
        };
        let pass = checks.iter().all(|(_, ok)| *ok);
        NondegeneracyReport { applicable: true, checks, pass }
    }

    /// Enumerates every active set `S` and solves
    /// `a_i + Σ_{j∈S} b_ij u_j = 0 (i ∈ S)` exactly (rational elimination
    /// when the coefficients are rational).
    pub fn steady_states(&self) -> SteadyStateSet {
        let m = self.m();
        let mut states = Vec::new();
        let mut degenerate = Vec::new();
        for mask in 0u32..(1 << m) {
            let set: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
            if set.is_empty() {
                states.push(SteadyState { u: vec![0.0; m], exact: vec![Value::zero(); m], active_set: set });
                continue;
            }
            let k = set.len();
            let mut mat: Vec<Vec<Value>> = set
                .iter()
                .map(|&i| {
                    let mut row: Vec<Value> = set.iter().map(|&j| self.b[i][j]).collect();
                    row.push(-self.a[i]);
                    row
                })
                .collect();
            match solve_values(&mut mat, k) {
                Some(sol) => {
                    let mut exact = vec![Value::zero(); m];
                    for (idx, &i) in set.iter().enumerate() {
                        exact[i] = sol[idx];
                    }
                    let u: Vec<f64> = exact.iter().map(|v| v.to_f64()).collect();
                    // A component may solve to zero; the state then belongs to
                    // its actual support and may already be listed.
                    let support: Vec<usize> = set.iter().copied().filter(|&i| !exact[i].is_zero()).collect();
                    if states.iter().any(|s: &SteadyState| s.exact == exact) {
                        continue;
                    }
                    states.push(SteadyState { u, exact, active_set: support });
                }
                None => degenerate.push(set),
            }
        }
        SteadyStateSet { states, degenerate }
    }

    /// Substitution `u_i → s_i ũ_i`: the new model has `b̃_ij = b_ij s_j` and
    /// the same `λ`, `a`. A solution `u` of `self` maps to `ũ_i = u_i / s_i`.
    pub fn rescale_components(&self, scales: &[Value]) -> Result<DlvModel, ModelError> {
        if scales.len() != self.m() {
            return Err(ModelError::Dimension { what: "scales", expected: self.m(), got: scales.len() });
        }
        if let Some(i) = scales.iter().position(|s| s.is_zero()) {
            return Err(ModelError::NonFinite { what: format!("scale[{i}] is zero") });
        }
        let b = self
            .b
            .iter()
            .map(|row| row.iter().zip(scales).map(|(&bij, &sj)| bij * sj).collect())
            .collect();
        let mut out = DlvModel::new(self.lambda.clone(), self.a.clone(), b)?;
        out.name = self.name.clone();
        Ok(out)
    }

    /// True when all coefficients coincide (exactly for rationals, 1e-12
    /// relative otherwise).
    pub fn same_coefficients(&self, other: &DlvModel) -> bool {
        let eq = |x: &Value, y: &Value| x.approx_eq(*y, 1e-12);
        self.m() == other.m()
            && self.lambda.iter().zip(&other.lambda).all(|(x, y)| eq(x, y))
            && self.a.iter().zip(&other.a).all(|(x, y)| eq(x, y))
            && self.b.iter().zip(&other.b).all(|(r, s)| r.iter().zip(s).all(|(x, y)| eq(x, y)))
    }

    /// Stable FNV-1a hash of the textual coefficients, used in run manifests.
    pub fn fingerprint(&self) -> u64 {
        let mut text = String::new();
        for v in self.lambda.iter().chain(&self.a).chain(self.b.iter().flatten()) {
            text.push_str(&v.to_string());
            text.push(';');
        }
        let mut h: u64 = 0xcbf29ce484222325;
        for byte in text.bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        h
    }
}

/// Gaussian elimination with partial pivoting on an augmented `k × (k+1)`
/// matrix. `None` when the system is singular.
fn solve_values(mat: &mut [Vec<Value>], k: usize) -> Option<Vec<Value>> {
    let scale = mat.iter().flatten().fold(0.0f64, |m, v| m.max(v.to_f64().abs())).max(1.0);
    for col in 0..k {
        let piv = (col..k).max_by(|&r, &s| {
            mat[r][col].to_f64().abs().partial_cmp(&mat[s][col].to_f64().abs()).unwrap()
        })?;
        let p = mat[piv][col];
        let singular = match p {
            Value::Exact(r) => *r.numer() == 0,
            Value::Float(x) => x.abs() <= 1e-12 * scale,
        };
        if singular {
            return None;
        }
        mat.swap(col, piv);
        for r in 0..k {
            if r != col {
                let f = mat[r][col] / mat[col][col];
                if !f.is_zero() {
                    for c in col..=k {
                        let v = mat[col][c];
                        mat[r][c] = mat[r][c] - f * v;
                    }
                }
            }
        }
    }
    Some((0..k).map(|i| mat[i][k] / mat[i][i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: i64) -> Value {
        Value::int(n)
    }

    #[test]
    fn reaction_at_unit_density() {
        let m = DlvModel::two_component([v(1), v(2)], [v(3), v(5)], (v(7), v(11)), (v(13), v(17))).unwrap();
        assert_eq!(m.reaction(&[1.0, 1.0]), vec![3.0 + 7.0 + 11.0, 5.0 + 13.0 + 17.0]);
        assert_eq!(m.reaction(&[0.0, 0.0]), vec![0.0, 0.0]);
    }

    #[test]
    fn rejects_bad_dimensions_and_lambda() {
        assert!(matches!(
            DlvModel::new(vec![v(1)], vec![v(1)], vec![vec![v(1)]]),
            Err(ModelError::TooFewComponents(1))
        ));
        assert!(matches!(
            DlvModel::new(vec![v(1), v(0)], vec![v(1), v(1)], vec![vec![v(1), v(1)]; 2]),
            Err(ModelError::NonPositiveLambda { index: 1, .. })
        ));
        assert!(DlvModel::new(vec![v(1), v(1)], vec![v(1)], vec![vec![v(1), v(1)]; 2]).is_err());
    }

    #[test]
    fn uncoupled_heat_system_is_accepted_but_flagged() {
        let m = DlvModel::new(vec![v(1), v(1)], vec![v(0), v(0)], vec![vec![v(0), v(0)]; 2]).unwrap();
        let rep = m.nondegeneracy();
        assert!(rep.applicable && !rep.pass);
    }

    #[test]
    fn competition_steady_states_are_exact() {
        // λ1 u_t = u_xx + u(3 − 3/2 u − 3 v), λ2 v_t = v_xx + v(2 − 2 u − 4 v), λ = (3/4, 1)
        let m = DlvModel::two_component(
            [Value::ratio(3, 4), v(1)],
            [v(3), v(2)],
            (Value::ratio(-3, 2), v(-3)),
            (v(-2), v(-4)),
        )
        .unwrap();
        let ss = m.steady_states();
        let has = |p: [Value; 2]| ss.states.iter().any(|s| s.exact == p.to_vec());
        assert!(has([v(0), v(0)]));
        assert!(has([v(2), v(0)]));
        assert!(has([v(0), Value::ratio(1, 2)]));
        // both rows proportional → interior subsystem is singular
        assert_eq!(ss.degenerate, vec![vec![0, 1]]);
    }

    #[test]
    fn rescaling_maps_solutions() {
        let m = DlvModel::two_component([v(2), v(1)], [v(3), v(4)], (v(1), v(1)), (v(1), v(1))).unwrap();
        let r = m.rescale_components(&[Value::ratio(-1, 2), Value::ratio(-1, 5)]).unwrap();
        assert_eq!(r.b()[0], vec![Value::ratio(-1, 2), Value::ratio(-1, 5)]);
        let u = [0.3, -0.7];
        let ut = [u[0] / -0.5, u[1] / -0.2];
        let r1 = m.reaction(&u);
        let r2 = r.reaction(&ut);
        assert!((r1[0] / -0.5 - r2[0]).abs() < 1e-14);
        assert!((r1[1] / -0.2 - r2[1]).abs() < 1e-14);
    }
}
