//! Lie and Q-conditional symmetry operators as evaluable infinitesimal
//! generators `Q = ξ⁰∂_t + ξ¹∂_x + Σ ηⁱ∂_{uⁱ}`.
//!
//! Full invariance criteria (second prolongation) are not implemented. What
//! is checked instead are the two consequences used downstream:
//!
//! * the invariant-surface conditions `ξ⁰uⁱ_t + ξ¹uⁱ_x − ηⁱ = 0` on solutions
//!   built from an operator's ansatz ([`invariant_surface_residual`]);
//! * residual preservation under the finite group transformations of the Lie
//!   operators whose flows are known ([`lie_transform`]).
//!
//! Conditional operators are listed for the normalized systems in which all
//! interaction coefficients of a column are equal to one. A model that is a
//! component rescaling `u_i → s_i ũ_i` of such a system receives the
//! transported operators, `η_i(u) = s_i η̃_i(u/s)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{DomainError, SymmetryError};
use crate::model::{DlvModel, JetPoint};
use crate::solutions::{ClosedFormSolution, PdeField, SolutionId};
use crate::value::Value;

/// Equality tolerance for derived coefficient identities.
const EQ_TOL: f64 = 1e-12;

/// Relative half-width of the excluded band around a vanishing operator
/// denominator.
const DENOM_GUARD: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorKind {
    Lie,
    /// Nonclassical symmetry: the invariant surface is the full manifold
    /// `Q(u) = Q(v) = … = 0`.
    QConditional,
    /// Q-conditional symmetry of the first type: one invariant-surface
    /// condition suffices.
    QConditionalFirstType,
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OperatorKind::Lie => "Lie",
            OperatorKind::QConditional => "Q-conditional",
            OperatorKind::QConditionalFirstType => "Q-conditional (first type)",
        })
    }
}

/// Coefficients `(ξ⁰, ξ¹, η)` at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Coefficients {
    pub xi0: f64,
    pub xi1: f64,
    pub eta: Vec<f64>,
}

type CoeffFn = dyn Fn(f64, f64, &[f64]) -> Option<Coefficients> + Send + Sync;

/// `c0 + c1 t + c e^{r t}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeFn {
    pub c0: f64,
    pub c1: f64,
    pub c: f64,
    pub r: f64,
}

impl TimeFn {
    pub const fn constant(c0: f64) -> Self {
        TimeFn { c0, c1: 0.0, c: 0.0, r: 0.0 }
    }

    pub const fn linear(c0: f64, c1: f64) -> Self {
        TimeFn { c0, c1, c: 0.0, r: 0.0 }
    }

    pub const fn exp(c: f64, r: f64) -> Self {
        TimeFn { c0: 0.0, c1: 0.0, c, r }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.c0 + self.c1 * t + self.c * (self.r * t).exp()
    }

    pub fn deriv(&self, t: f64) -> f64 {
        self.c1 + self.c * self.r * (self.r * t).exp()
    }
}

/// Finite transformations of the operators with known flows.
#[derive(Clone, Debug, PartialEq)]
pub enum Flow {
    /// `u*(t, x) = u(t − ε, x)`.
    TimeShift,
    /// `u*(t, x) = u(t, x − ε)`.
    SpaceShift,
    /// `u*(t, x) = e^{−2ε} u(e^{−2ε} t, e^{−ε} x)`.
    Dilation,
    /// `u_k* = e^{ε} u_k`.
    Scale { k: usize },
    /// `u_target* = u_target + ε (p(t) + Σ q_j(t) u_j)`, sources ≠ target.
    Shift { target: usize, p: TimeFn, q: Vec<(usize, TimeFn)> },
}

#[derive(Clone)]
pub struct SymmetryOperator {
    id: String,
    kind: OperatorKind,
    m: usize,
    formula: String,
    restriction: String,
    coeff: Arc<CoeffFn>,
    flow: Option<Flow>,
    /// Fingerprint of the model the operator was generated for; `None` for
    /// operators admitted by every system.
    model: Option<u64>,
}

impl fmt::Debug for SymmetryOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymmetryOperator")
            .field("id", &self.id)
            .field("kind", &self.kind)
            .field("m", &self.m)
            .field("formula", &self.formula)
            .field("flow", &self.flow)
            .finish()
    }
}

impl SymmetryOperator {
    fn new(
        id: impl Into<String>,
        kind: OperatorKind,
        m: usize,
        formula: impl Into<String>,
        restriction: impl Into<String>,
        coeff: impl Fn(f64, f64, &[f64]) -> Option<Coefficients> + Send + Sync + 'static,
    ) -> Self {
        SymmetryOperator {
            id: id.into(),
            kind,
            m,
            formula: formula.into(),
            restriction: restriction.into(),
            coeff: Arc::new(coeff),
            flow: None,
            model: None,
        }
    }

    fn with_flow(mut self, flow: Flow) -> Self {
        self.flow = Some(flow);
        self
    }

    fn for_model(mut self, model: &DlvModel) -> Self {
        self.model = Some(model.fingerprint());
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Human-readable coefficient formula.
    pub fn formula(&self) -> &str {
        &self.formula
    }

    /// The coefficient restrictions under which the operator is admitted.
    pub fn restriction(&self) -> &str {
        &self.restriction
    }

    pub fn flow(&self) -> Option<&Flow> {
        self.flow.as_ref()
    }

    /// `(ξ⁰, ξ¹, η)` at `(t, x, u)`; `None` outside the operator's domain.
    pub fn coefficients(&self, t: f64, x: f64, u: &[f64]) -> Option<Coefficients> {
        (self.coeff)(t, x, u)
    }

    /// Whether the operator was generated for (or is universal to) `model`.
    pub fn applies_to(&self, model: &DlvModel) -> bool {
        model.m() == self.m && self.model.map_or(true, |fp| fp == model.fingerprint())
    }

    /// Transport through `u_i = s_i ũ_i`: `self` acts on `ũ`, the result on
    /// `u`.
    fn transported(self, scales: &[f64]) -> Self {
        if scales.iter().all(|&s| s == 1.0) {
            return self;
        }
        let inner = self.coeff.clone();
        let s: Vec<f64> = scales.to_vec();
        let formula = format!(
            "{}   [in ũ_i = u_i/s_i, s = ({})]",
            self.formula,
            s.iter().map(|v| crate::io::fmt_f64(*v)).collect::<Vec<_>>().join(", ")
        );
        SymmetryOperator {
            coeff: Arc::new(move |t, x, u: &[f64]| {
                let ut: Vec<f64> = u.iter().zip(&s).map(|(a, b)| a / b).collect();
                let mut c = inner(t, x, &ut)?;
                for (e, si) in c.eta.iter_mut().zip(&s) {
                    *e *= si;
                }
                Some(c)
            }),
            formula,
            ..self
        }
    }
}

impl fmt::Display for SymmetryOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]: {}", self.id, self.kind, self.formula)?;
        if !self.restriction.is_empty() {
            write!(f, "  (requires {})", self.restriction)?;
        }
        if self.flow.is_some() {
            write!(f, "  flow: yes")?;
        }
        Ok(())
    }
}

fn eq(a: Value, b: Value) -> bool {
    a.approx_eq(b, EQ_TOL)
}

fn c(xi0: f64, xi1: f64, eta: Vec<f64>) -> Option<Coefficients> {
    Some(Coefficients { xi0, xi1, eta })
}

fn comp_name(m: usize, k: usize) -> String {
    match (m, k) {
        (2 | 3, 0) => "u".into(),
        (2 | 3, 1) => "v".into(),
        (3, 2) => "w".into(),
        _ => format!("u{}", k + 1),
    }
}

fn pt(m: usize) -> SymmetryOperator {
    SymmetryOperator::new("Pt", OperatorKind::Lie, m, "∂t", "", move |_, _, _| c(1.0, 0.0, vec![0.0; m]))
        .with_flow(Flow::TimeShift)
}

fn px(m: usize) -> SymmetryOperator {
    SymmetryOperator::new("Px", OperatorKind::Lie, m, "∂x", "", move |_, _, _| c(0.0, 1.0, vec![0.0; m]))
        .with_flow(Flow::SpaceShift)
}

/// Operators admitted by `model`: the translations always, plus every
/// implemented Lie and conditional operator whose restrictions hold.
pub fn operator_catalog(model: &DlvModel) -> Vec<SymmetryOperator> {
    let m = model.m();
    let mut ops = vec![pt(m), px(m)];
    ops.extend(lie_operators(model));
    if m == 2 {
        ops.extend(two_component_conditional(model));
    }
    if m == 3 {
        ops.extend(three_component_conditional(model));
    }
    if m >= 4 {
        ops.extend(m_component_conditional(model));
    }
    ops
}

/// Operators with documentation only (no coefficient evaluation, no flow).
pub const DOCUMENTATION_ONLY: &[&str] = &[
    "semi-coupled systems with b c = 0, λ1 ≠ λ2: Q = ∂t + 2α1/(λ1−λ2) ∂x + (φ(t) e^{α1 x} u + e^{α1 x}(λ2 φ' + a1 φ − α1² φ) + α2 v) ∂v, \
     with φ a nonzero solution of λ2² φ'' + λ2 (a1 − 2α1²) φ' + α1² (α1² − a1) φ = 0",
];

fn lie_operators(model: &DlvModel) -> Vec<SymmetryOperator> {
    let m = model.m();
    let (lam, a, b) = (model.lambda(), model.a(), model.b());
    let mut ops = Vec::new();
    if a.iter().all(|v| v.is_zero()) {
        let formula = format!(
            "2t∂t + x∂x − 2({})",
            (0..m).map(|k| format!("{0}∂{0}", comp_name(m, k))).collect::<Vec<_>>().join(" + ")
        );
        ops.push(
            SymmetryOperator::new("D", OperatorKind::Lie, m, formula, "a_i = 0 for all i", move |t, x, u: &[f64]| {
                c(2.0 * t, x, u.iter().map(|v| -2.0 * v).collect())
            })
            .with_flow(Flow::Dilation)
            .for_model(model),
        );
    }
    // A component that appears in no reaction term except linearly in its own
    // equation can be scaled.
    for k in 0..m {
        if (0..m).all(|i| b[i][k].is_zero()) {
            let name = comp_name(m, k);
            ops.push(
                SymmetryOperator::new(
                    format!("scale_{name}"),
                    OperatorKind::Lie,
                    m,
                    format!("{name}∂{name}"),
                    format!("column {} of B vanishes", k + 1),
                    move |_, _, u: &[f64]| {
                        let mut eta = vec![0.0; u.len()];
                        eta[k] = u[k];
                        c(0.0, 0.0, eta)
                    },
                )
                .with_flow(Flow::Scale { k })
                .for_model(model),
            );
        }
    }
    // u_j carries the linear equation of u_k when both have the same
    // diffusivity and reaction rows: φ = e^{(a_k − a_j) t/λ} u_j.
    for k in 0..m {
        if !(0..m).all(|i| b[i][k].is_zero()) {
            continue;
        }
        for j in 0..m {
            if j == k || lam[j] != lam[k] || !(0..m).all(|i| eq(b[k][i], b[j][i])) {
                continue;
            }
            let r = ((a[k] - a[j]) / lam[k]).to_f64();
            let (nk, nj) = (comp_name(m, k), comp_name(m, j));
            let formula = if r == 0.0 { format!("{nj}∂{nk}") } else { format!("e^{{{r}t}} {nj}∂{nk}") };
            let q = TimeFn::exp(1.0, r);
            ops.push(
                SymmetryOperator::new(
                    format!("shift_{nk}_by_{nj}"),
                    OperatorKind::Lie,
                    m,
                    formula,
                    format!("λ{0} = λ{1}, column {1} of B vanishes, rows {0} and {1} of B coincide", j + 1, k + 1),
                    move |t, _, u: &[f64]| {
                        let mut eta = vec![0.0; u.len()];
                        eta[k] = q.value(t) * u[j];
                        c(0.0, 0.0, eta)
                    },
                )
                .with_flow(Flow::Shift { target: k, p: TimeFn::constant(0.0), q: vec![(j, q)] })
                .for_model(model),
            );
        }
    }
    // Two-component semi-coupled systems with a logistic first equation:
    // u(a1 + b1 u), v(a1 + b1 u), λ1 = λ2.
    if m == 2 && b[0][1].is_zero() && b[1][1].is_zero() && lam[0] == lam[1] && eq(a[0], a[1]) && eq(b[0][0], b[1][0]) {
        let (l, a1, b1) = (lam[0].to_f64(), a[0].to_f64(), b[0][0].to_f64());
        let r = a1 / l;
        if a1 != 0.0 {
            let p = TimeFn::exp(a1, r);
            let q = TimeFn::exp(b1, r);
            ops.push(
                SymmetryOperator::new(
                    "shift_v_logistic",
                    OperatorKind::Lie,
                    2,
                    format!("({a1} + {b1} u) e^{{{r}t}} ∂v"),
                    "c1 = c2 = 0, λ1 = λ2, a1 = a2, b1 = b2",
                    move |t, _, u: &[f64]| c(0.0, 0.0, vec![0.0, p.value(t) + q.value(t) * u[0]]),
                )
                .with_flow(Flow::Shift { target: 1, p, q: vec![(0, q)] })
                .for_model(model),
            );
        } else {
            let q = TimeFn::linear(0.0, b1 / l);
            ops.push(
                SymmetryOperator::new(
                    "R",
                    OperatorKind::Lie,
                    2,
                    format!("(1 + {} t u) ∂v", b1 / l),
                    "a1 = a2 = 0, c1 = c2 = 0, λ1 = λ2, b1 = b2",
                    move |t, _, u: &[f64]| c(0.0, 0.0, vec![0.0, 1.0 + q.value(t) * u[0]]),
                )
                .with_flow(Flow::Shift { target: 1, p: TimeFn::constant(1.0), q: vec![(0, q)] })
                .for_model(model),
            );
        }
    }
    ops
}

/// Scales `s` with `b̃_ij = b_ij s_j = 1` when all rows of `B` coincide and are
/// free of zeros.
fn uniform_scales(model: &DlvModel) -> Option<Vec<f64>> {
    let b = model.b();
    if b[0].iter().any(|v| v.is_zero()) || !b.iter().all(|row| row.iter().zip(&b[0]).all(|(x, y)| eq(*x, *y))) {
        return None;
    }
    Some(b[0].iter().map(|v| 1.0 / v.to_f64()).collect())
}

/// Scales for the first-type family: row 2 is `λ2/λ1` times row 1.
fn first_type_scales(model: &DlvModel) -> Option<Vec<f64>> {
    let (b, lam) = (model.b(), model.lambda());
    if lam[0] == lam[1] || b[0].iter().any(|v| v.is_zero()) {
        return None;
    }
    let r = lam[1] / lam[0];
    if !(eq(b[1][0], r * b[0][0]) && eq(b[1][1], r * b[0][1])) {
        return None;
    }
    Some(b[0].iter().map(|v| 1.0 / v.to_f64()).collect())
}

/// The `∂u − ∂v` direction with amplitude `k`.
fn uv(k: f64) -> Vec<f64> {
    vec![k, -k]
}

fn two_component_conditional(model: &DlvModel) -> Vec<SymmetryOperator> {
    let mut ops = Vec::new();
    let (lam, a) = (model.lambda(), model.a());
    let (l1, l2) = (lam[0].to_f64(), lam[1].to_f64());
    let (a1, a2) = (a[0].to_f64(), a[1].to_f64());
    let dl = l1 - l2;
    if let Some(s) = uniform_scales(model).filter(|_| lam[0] != lam[1]) {
        let q = OperatorKind::QConditional;
        let base = "λ1 ≠ λ2, b1 = b2, c1 = c2, b c ≠ 0";
        if !eq(a[0], a[1]) {
            let rc = format!("{base}, a1 ≠ a2");
            if !a[0].is_zero() && !a[1].is_zero() {
                ops.push(SymmetryOperator::new(
                    "Q_uv_affine",
                    q,
                    2,
                    "(λ1−λ2)∂t − (a1 v + a2 u + a1 a2)(∂u − ∂v)",
                    format!("{rc}, a1 a2 ≠ 0"),
                    move |_, _, u: &[f64]| c(dl, 0.0, uv(-(a1 * u[1] + a2 * u[0] + a1 * a2))),
                ));
            }
            ops.push(SymmetryOperator::new(
                "Q_uv_u",
                q,
                2,
                "(λ1−λ2)∂t + (a1−a2) u(∂u − ∂v)",
                rc.clone(),
                move |_, _, u: &[f64]| c(dl, 0.0, uv((a1 - a2) * u[0])),
            ));
            ops.push(SymmetryOperator::new(
                "Q_uv_v",
                q,
                2,
                "(λ1−λ2)∂t − (a1−a2) v(∂u − ∂v)",
                rc,
                move |_, _, u: &[f64]| c(dl, 0.0, uv(-(a1 - a2) * u[1])),
            ));
        } else {
            let al = a1;
            let rc = format!("{base}, a1 = a2 = a");
            if al != 0.0 {
                ops.push(SymmetryOperator::new(
                    "Q_uv_equal_affine",
                    q,
                    2,
                    "(λ1−λ2)∂t − a(u + v + a)(∂u − ∂v)",
                    format!("{rc} ≠ 0"),
                    move |_, _, u: &[f64]| c(dl, 0.0, uv(-al * (u[0] + u[1] + al))),
                ));
            }
            ops.push(SymmetryOperator::new(
                "Q_uv_equal_scaling",
                q,
                2,
                "(λ1−λ2) t∂t − (λ1 v + λ2 u)(∂u − ∂v)",
                rc,
                move |t, _, u: &[f64]| c(dl * t, 0.0, uv(-(l1 * u[1] + l2 * u[0]))),
            ));
        }
        // a_i = a λ_i.
        let ar = a[0] / lam[0];
        if !ar.is_zero() && eq(a[1], ar * lam[1]) {
            let ac = ar.to_f64();
            let rc = format!("{base}, a_i = a λ_i with a ≠ 0");
            let aff = move |u: &[f64]| l1 * u[1] + l2 * u[0] + ac * l1 * l2;
            ops.push(SymmetryOperator::new(
                "Q_uv_prop_affine",
                q,
                2,
                "(λ1−λ2)∂t − a(λ1 v + λ2 u + a λ1 λ2)(∂u − ∂v)",
                rc.clone(),
                move |_, _, u: &[f64]| c(dl, 0.0, uv(-ac * aff(u))),
            ));
            ops.push(SymmetryOperator::new(
                "Q_uv_prop_u",
                q,
                2,
                "∂t + a u(∂u − ∂v)",
                rc.clone(),
                move |_, _, u: &[f64]| c(1.0, 0.0, uv(ac * u[0])),
            ));
            ops.push(SymmetryOperator::new(
                "Q_uv_prop_v",
                q,
                2,
                "∂t − a v(∂u − ∂v)",
                rc.clone(),
                move |_, _, u: &[f64]| c(1.0, 0.0, uv(-ac * u[1])),
            ));
            ops.push(prop_alpha_operator(l1, l2, ac, 1.0, rc));
        }
        ops = ops.into_iter().map(|o| o.for_model(model).transported(&s)).collect();
    }
    if let Some(s) = first_type_scales(model) {
        for comp in 0..2 {
            if let Ok(g) = g_function(model, (1.0, 1.0, 0.0)) {
                ops.push(first_type_operator(model, comp, g).transported(&s));
            }
        }
    }
    ops
}

/// `∂t + aα(λ1 v + λ2 u + a λ1 λ2)/(e^{−at} − α(λ1−λ2)) (∂u − ∂v)`, defined
/// off the zero set of the denominator.
pub fn prop_alpha_operator(l1: f64, l2: f64, a: f64, alpha: f64, restriction: String) -> SymmetryOperator {
    SymmetryOperator::new(
        "Q_uv_prop_alpha",
        OperatorKind::QConditional,
        2,
        format!("∂t + aα(λ1 v + λ2 u + a λ1 λ2)/(e^{{−at}} − α(λ1−λ2)) (∂u − ∂v), α = {alpha}"),
        format!("{restriction}, α ≠ 0; excludes e^{{−at}} = α(λ1−λ2)"),
        move |t, _, u: &[f64]| {
            let e = (-a * t).exp();
            let k = alpha * (l1 - l2);
            let den = e - k;
            if den.abs() <= DENOM_GUARD * e.abs().max(k.abs()) {
                return None;
            }
            c(1.0, 0.0, uv(a * alpha * (l1 * u[1] + l2 * u[0] + a * l1 * l2) / den))
        },
    )
}

/// `Q^u = ∂x + (g¹_x/g¹) u (∂u − ∂v)` (comp 0) or
/// `Q^v = ∂x + (g²_x/g²) v (∂v − ∂u)` (comp 1) on the normalized first-type
/// system.
pub fn first_type_operator(model: &DlvModel, comp: usize, g: GFunction) -> SymmetryOperator {
    let (id, formula) = if comp == 0 {
        ("Qx_u_g", "∂x + (g¹_x/g¹) u(∂u − ∂v)")
    } else {
        ("Qx_v_g", "∂x + (g²_x/g²) v(∂v − ∂u)")
    };
    let formula = format!("{formula}, (α0, α1, α2) = ({}, {}, {})", g.alpha.0, g.alpha.1, g.alpha.2);
    SymmetryOperator::new(
        id,
        OperatorKind::QConditionalFirstType,
        2,
        formula,
        "λ1 ≠ λ2, row 2 of B equals λ2/λ1 times row 1",
        move |t, x, u: &[f64]| {
            let j = g.eval(comp, t, x);
            if j.g.abs() <= DENOM_GUARD * (g.alpha.0.abs() + g.alpha.1.abs() + g.alpha.2.abs()) {
                return None;
            }
            let k = j.g_x / j.g * u[comp];
            c(0.0, 1.0, if comp == 0 { uv(k) } else { uv(-k) })
        },
    )
    .for_model(model)
}

/// The family `Q^4_i` (with `α = 0`: `Q^2_i`) of three-component systems whose
/// interaction rows all coincide:
/// `∂t + κ_pq u_p(∂_p − ∂_q) + α u_p(∂_plus − ∂_minus)`, listed as
/// `(p, q, plus, minus)` for `i = 1..6`.
fn family_pairs() -> [(usize, usize, usize, usize); 6] {
    [(0, 1, 1, 2), (1, 0, 0, 2), (0, 2, 1, 2), (2, 0, 0, 1), (1, 2, 0, 2), (2, 1, 0, 1)]
}

/// `Q^4_i` for the model (rows of `B` equal), transported to the model's
/// scaling. `None` if the rate ratio is undefined (equal diffusivities).
pub fn three_component_family(model: &DlvModel, i: usize, alpha: f64) -> Option<SymmetryOperator> {
    if model.m() != 3 || !(1..=6).contains(&i) {
        return None;
    }
    let s = uniform_scales(model)?;
    let (p, q, plus, minus) = family_pairs()[i - 1];
    let (lam, a) = (model.lambda(), model.a());
    if lam[p] == lam[q] {
        return None;
    }
    let k = ((a[p] - a[q]) / (lam[p] - lam[q])).to_f64();
    let n = |j| comp_name(3, j);
    let op = SymmetryOperator::new(
        format!("Q3_{i}"),
        OperatorKind::QConditionalFirstType,
        3,
        format!(
            "∂t + (a{p1}−a{q1})/(λ{p1}−λ{q1}) {np}(∂{np} − ∂{nq}) + α {np}(∂{n1} − ∂{n2}), α = {alpha}",
            p1 = p + 1,
            q1 = q + 1,
            np = n(p),
            nq = n(q),
            n1 = n(plus),
            n2 = n(minus)
        ),
        "all rows of B equal, (λ2−λ3)a1 − (λ1−λ3)a2 + (λ1−λ2)a3 = 0 when α ≠ 0",
        move |_, _, u: &[f64]| {
            let mut eta = vec![0.0; 3];
            eta[p] += k * u[p];
            eta[q] -= k * u[p];
            eta[plus] += alpha * u[p];
            eta[minus] -= alpha * u[p];
            c(1.0, 0.0, eta)
        },
    );
    Some(op.for_model(model).transported(&s))
}

fn three_component_conditional(model: &DlvModel) -> Vec<SymmetryOperator> {
    let mut ops = Vec::new();
    let (lam, a, b) = (model.lambda(), model.a(), model.b());
    if uniform_scales(model).is_some() {
        let coplanar = eq(
            (lam[1] - lam[2]) * a[0] - (lam[0] - lam[2]) * a[1] + (lam[0] - lam[1]) * a[2],
            Value::zero(),
        );
        let distinct_rates = !(eq(a[0], a[1]) && eq(a[0], a[2]));
        if distinct_rates || coplanar {
            let alpha = if coplanar { 1.0 } else { 0.0 };
            for i in 1..=6 {
                if let Some(op) = three_component_family(model, i, alpha) {
                    ops.push(op);
                }
            }
        }
        // Extra operator: (λ2−λ3)a1 − λ2 a3 + λ3 a2 = 0, a2 ≠ a3.
        let extra = eq((lam[1] - lam[2]) * a[0] - lam[1] * a[2] + lam[2] * a[1], Value::zero());
        if extra && !eq(a[1], a[2]) && lam[1] != lam[2] {
            let s = uniform_scales(model).expect("checked");
            let r = ((a[1] - a[2]) / (lam[1] - lam[2])).to_f64();
            let beta = 1.0;
            ops.push(
                SymmetryOperator::new(
                    "Q3_beta",
                    OperatorKind::QConditionalFirstType,
                    3,
                    format!("∂t + β e^{{{r}t}} u(∂v − ∂w), β = {beta}"),
                    "all rows of B equal, (λ2−λ3)a1 − λ2 a3 + λ3 a2 = 0, a2 ≠ a3",
                    move |t, _, u: &[f64]| {
                        let k = beta * (r * t).exp() * u[0];
                        c(1.0, 0.0, vec![0.0, k, -k])
                    },
                )
                .for_model(model)
                .transported(&s),
            );
        }
    }
    // Rows 1 and 2 equal of the form (b, b, e), row 3 with equal u, v entries.
    let rows12 = (0..3).all(|j| eq(b[0][j], b[1][j])) && eq(b[0][0], b[0][1]) && !b[0][0].is_zero();
    if rows12 && eq(b[2][0], b[2][1]) && !b[2][0].is_zero() && lam[0] != lam[1] && !eq(a[0], a[1]) {
        let k = ((a[0] - a[1]) / (lam[0] - lam[1])).to_f64();
        let rc = "rows 1, 2 of B equal to (b, b, e), b31 = b32 ≠ 0, a1 ≠ a2";
        ops.push(
            SymmetryOperator::new("Q3_pair_u", OperatorKind::QConditionalFirstType, 3, "∂t + (a1−a2)/(λ1−λ2) u(∂u − ∂v)", rc, move |_, _, u: &[f64]| {
                c(1.0, 0.0, vec![k * u[0], -k * u[0], 0.0])
            })
            .for_model(model),
        );
        ops.push(
            SymmetryOperator::new("Q3_pair_v", OperatorKind::QConditionalFirstType, 3, "∂t + (a1−a2)/(λ1−λ2) v(∂v − ∂u)", rc, move |_, _, u: &[f64]| {
                c(1.0, 0.0, vec![-k * u[1], k * u[1], 0.0])
            })
            .for_model(model),
        );
    }
    ops
}

/// `Q_ij = ∂t + (a_i − a_j)/(λ_i − λ_j) u^i(∂_{u^i} − ∂_{u^j})`.
fn m_component_conditional(model: &DlvModel) -> Vec<SymmetryOperator> {
    let Some(s) = uniform_scales(model) else { return Vec::new() };
    let (lam, a) = (model.lambda(), model.a());
    let m = model.m();
    let mut ops = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if i == j || lam[i] == lam[j] {
                continue;
            }
            let k = ((a[i] - a[j]) / (lam[i] - lam[j])).to_f64();
            ops.push(
                SymmetryOperator::new(
                    format!("Q_{}_{}", i + 1, j + 1),
                    OperatorKind::QConditionalFirstType,
                    m,
                    format!("∂t + (a{0}−a{1})/(λ{0}−λ{1}) u{0}(∂u{0} − ∂u{1})", i + 1, j + 1),
                    "all rows of B equal",
                    move |_, _, u: &[f64]| {
                        let mut eta = vec![0.0; u.len()];
                        eta[i] = k * u[i];
                        eta[j] = -k * u[i];
                        c(1.0, 0.0, eta)
                    },
                )
                .for_model(model)
                .transported(&s),
            );
        }
    }
    ops
}

/// `ξ⁰uⁱ_t + ξ¹uⁱ_x − ηⁱ` for each component at `(t, x)`.
pub fn invariant_surface_residual(
    op: &SymmetryOperator,
    field: &dyn PdeField,
    t: f64,
    x: f64,
) -> Result<Vec<f64>, SymmetryError> {
    let m = field.model().m();
    if op.m != m {
        return Err(SymmetryError::ComponentMismatch { op: op.m, sol: m });
    }
    let jet = field.jet(t, x)?;
    let c = op
        .coefficients(t, x, &jet.u)
        .ok_or_else(|| SymmetryError::OperatorDomain(format!("{} at (t, x) = ({t}, {x})", op.id)))?;
    Ok((0..m).map(|i| c.xi0 * jet.u_t[i] + c.xi1 * jet.u_x[i] - c.eta[i]).collect())
}

/// Relative size of the invariant-surface residual: `‖Q(u)‖∞ / (1 + scale)`
/// with `scale` the largest of the three terms.
pub fn relative_surface_residual(
    op: &SymmetryOperator,
    field: &dyn PdeField,
    t: f64,
    x: f64,
) -> Result<f64, SymmetryError> {
    let jet = field.jet(t, x)?;
    let r = invariant_surface_residual(op, field, t, x)?;
    let c = op.coefficients(t, x, &jet.u).expect("checked by invariant_surface_residual");
    let scale = (0..jet.m())
        .map(|i| (c.xi0 * jet.u_t[i]).abs().max((c.xi1 * jet.u_x[i]).abs()).max(c.eta[i].abs()))
        .fold(0.0, f64::max);
    Ok(r.iter().fold(0.0f64, |m, v| m.max(v.abs())) / (1.0 + scale))
}

/// A solution mapped by the finite transformation of a Lie operator.
#[derive(Clone)]
pub struct TransformedSolution {
    base: Arc<dyn PdeField>,
    flow: Flow,
    eps: f64,
    model: DlvModel,
}

impl fmt::Debug for TransformedSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransformedSolution").field("flow", &self.flow).field("eps", &self.eps).finish()
    }
}

impl TransformedSolution {
    pub fn eps(&self) -> f64 {
        self.eps
    }
}

impl PdeField for TransformedSolution {
    fn model(&self) -> &DlvModel {
        &self.model
    }

    fn jet(&self, t: f64, x: f64) -> Result<JetPoint, DomainError> {
        let e = self.eps;
        match &self.flow {
            Flow::TimeShift => {
                let mut j = self.base.jet(t - e, x)?;
                j.t = t;
                Ok(j)
            }
            Flow::SpaceShift => {
                let mut j = self.base.jet(t, x - e)?;
                j.x = x;
                Ok(j)
            }
            Flow::Dilation => {
                let k = (-e).exp();
                let j = self.base.jet(k * k * t, k * x)?;
                let (k2, k3, k4) = (k * k, k * k * k, k * k * k * k);
                Ok(JetPoint {
                    t,
                    x,
                    u: j.u.iter().map(|v| k2 * v).collect(),
                    u_t: j.u_t.iter().map(|v| k4 * v).collect(),
                    u_x: j.u_x.iter().map(|v| k3 * v).collect(),
                    u_xx: j.u_xx.iter().map(|v| k4 * v).collect(),
                })
            }
            Flow::Scale { k } => {
                let mut j = self.base.jet(t, x)?;
                let f = e.exp();
                j.u[*k] *= f;
                j.u_t[*k] *= f;
                j.u_x[*k] *= f;
                j.u_xx[*k] *= f;
                Ok(j)
            }
            Flow::Shift { target, p, q } => {
                let mut j = self.base.jet(t, x)?;
                let (mut v, mut vt, mut vx, mut vxx) = (p.value(t), p.deriv(t), 0.0, 0.0);
                for (src, f) in q {
                    let fv = f.value(t);
                    v += fv * j.u[*src];
                    vt += f.deriv(t) * j.u[*src] + fv * j.u_t[*src];
                    vx += fv * j.u_x[*src];
                    vxx += fv * j.u_xx[*src];
                }
                j.u[*target] += e * v;
                j.u_t[*target] += e * vt;
                j.u_x[*target] += e * vx;
                j.u_xx[*target] += e * vxx;
                Ok(j)
            }
        }
    }
}

/// Apply the one-parameter group of `op` with parameter `eps` to `base`.
pub fn lie_transform(
    op: &SymmetryOperator,
    eps: f64,
    base: Arc<dyn PdeField>,
) -> Result<TransformedSolution, SymmetryError> {
    let flow = op.flow.clone().ok_or_else(|| SymmetryError::FlowUnsupported(op.id.clone()))?;
    let model = base.model().clone();
    if op.m != model.m() {
        return Err(SymmetryError::ComponentMismatch { op: op.m, sol: model.m() });
    }
    if !op.applies_to(&model) {
        return Err(SymmetryError::NotApplicable {
            op: op.id.clone(),
            reason: format!("generated for a different model; requires {}", op.restriction),
        });
    }
    Ok(TransformedSolution { base, flow, eps, model })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GBranch {
    Trig,
    Exp,
    Poly,
}

/// The pair `g¹, g²` of the first-type family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GFunction {
    pub branch: GBranch,
    /// `(λ1 a2 − λ2 a1)/(λ1 − λ2)`.
    pub k2_signed: f64,
    pub kappa: f64,
    pub alpha: (f64, f64, f64),
    pub lambda: [f64; 2],
}

/// `g` and its derivatives at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GJet {
    pub g: f64,
    pub g_t: f64,
    pub g_x: f64,
    pub g_xx: f64,
}

impl GFunction {
    /// `g^{i+1}` for `i ∈ {0, 1}`.
    pub fn eval(&self, i: usize, t: f64, x: f64) -> GJet {
        let (a0, a1, a2) = self.alpha;
        let l = self.lambda[i];
        let k = self.kappa;
        match self.branch {
            GBranch::Trig => {
                let e = a0 * (k * k * t / l).exp();
                let (s, c) = (k * x).sin_cos();
                let osc = a1 * s + a2 * c;
                GJet { g: e + osc, g_t: k * k / l * e, g_x: k * (a1 * c - a2 * s), g_xx: -k * k * osc }
            }
            GBranch::Exp => {
                let e = a0 * (-k * k * t / l).exp();
                let (ep, em) = ((k * x).exp(), (-k * x).exp());
                let h = a1 * ep + a2 * em;
                GJet { g: e + h, g_t: -k * k / l * e, g_x: k * (a1 * ep - a2 * em), g_xx: k * k * h }
            }
            GBranch::Poly => GJet {
                g: a0 + a1 * x + a2 * l * x * x + 2.0 * a2 * t,
                g_t: 2.0 * a2,
                g_x: a1 + 2.0 * a2 * l * x,
                g_xx: 2.0 * a2 * l,
            },
        }
    }

    /// `λ_i g_t − g_xx − K g`, `K = (λ1 a2 − λ2 a1)/(λ1 − λ2)`.
    pub fn pde_residual(&self, i: usize, t: f64, x: f64) -> f64 {
        let j = self.eval(i, t, x);
        self.lambda[i] * j.g_t - j.g_xx - self.k2_signed * j.g
    }
}

/// `g¹, g²` for the two-component first-type system; the branch follows the
/// sign of `(λ1 a2 − λ2 a1)/(λ1 − λ2)`.
pub fn g_function(model: &DlvModel, alphas: (f64, f64, f64)) -> Result<GFunction, SymmetryError> {
    if model.m() != 2 {
        return Err(SymmetryError::GFunction(format!("needs two components, got {}", model.m())));
    }
    let (lam, a) = (model.lambda(), model.a());
    if lam[0] == lam[1] {
        return Err(SymmetryError::GFunction("λ1 = λ2".into()));
    }
    let k2 = (lam[0] * a[1] - lam[1] * a[0]) / (lam[0] - lam[1]);
    let branch = match k2.signum() {
        1 => GBranch::Trig,
        -1 => GBranch::Exp,
        _ => GBranch::Poly,
    };
    let k2f = k2.to_f64();
    Ok(GFunction {
        branch,
        k2_signed: if branch == GBranch::Poly { 0.0 } else { k2f },
        kappa: k2f.abs().sqrt(),
        alpha: alphas,
        lambda: [lam[0].to_f64(), lam[1].to_f64()],
    })
}

/// Operator/solution pairs in which the solution was constructed from the
/// operator's invariant-surface conditions.
pub fn registered_pairs() -> Vec<(&'static str, SolutionId)> {
    vec![
        ("Q_uv_affine", SolutionId::CD11_EXP),
        ("Q_uv_affine", SolutionId::CD11_TRIG),
        ("Q_uv_affine", SolutionId::CD11_TANH2),
        ("Q_uv_affine", SolutionId::CD11_TANH3),
        ("Q_uv_affine", SolutionId::CD11_COMP),
        ("Qx_u_g", SolutionId::CD21_CASE1),
        ("Q3_1", SolutionId::CD13_3COMP),
    ]
}

/// The operator (with the solution's own parameters) that generated `sol`.
pub fn generating_operator(sol: &ClosedFormSolution) -> Option<SymmetryOperator> {
    let model = sol.model();
    match sol.id() {
        SolutionId::CD11_EXP
        | SolutionId::CD11_TRIG
        | SolutionId::CD11_TANH2
        | SolutionId::CD11_TANH3
        | SolutionId::CD11_COMP => operator_catalog(model).into_iter().find(|o| o.id == "Q_uv_affine"),
        SolutionId::CD21_CASE1 => {
            let f = |k: &str| sol.param(k).map(|v| v.to_f64()).unwrap_or(0.0);
            let g = g_function(model, (f("alpha0"), f("alpha1"), f("alpha2"))).ok()?;
            let s = first_type_scales(model)?;
            Some(first_type_operator(model, 0, g).transported(&s))
        }
        SolutionId::CD13_3COMP => three_component_family(model, 1, sol.param("alpha")?.to_f64()),
        _ => None,
    }
}

/// Test-only fields for the Lie flows that need a nonconstant solution of a
/// semi-coupled or reaction-free-line system.
pub mod fields {
    use super::*;

    /// `λ_i = 1`, `a = 0`, `B = [[1, 1], [k, k]]`: on the line `v = −u` every
    /// reaction term vanishes, so `u = W`, `v = −W` with
    /// `W = β sin(γx) e^{−γ²t}`.
    #[derive(Clone, Debug)]
    pub struct NullLineField {
        model: DlvModel,
        beta: f64,
        gamma: f64,
    }

    impl NullLineField {
        pub fn new(k: Value, beta: f64, gamma: f64) -> Self {
            let one = Value::one();
            let model = DlvModel::two_component([one, one], [Value::zero(), Value::zero()], (one, one), (k, k))
                .expect("valid coefficients")
                .with_name("null-line test system");
            NullLineField { model, beta, gamma }
        }
    }

    impl PdeField for NullLineField {
        fn model(&self) -> &DlvModel {
            &self.model
        }

        fn jet(&self, t: f64, x: f64) -> Result<JetPoint, DomainError> {
            let g = self.gamma;
            let e = self.beta * (-g * g * t).exp();
            let (s, c) = (g * x).sin_cos();
            let w = [e * s, -g * g * e * s, g * e * c, -g * g * e * s];
            Ok(JetPoint {
                t,
                x,
                u: vec![w[0], -w[0]],
                u_t: vec![w[1], -w[1]],
                u_x: vec![w[2], -w[2]],
                u_xx: vec![w[3], -w[3]],
            })
        }
    }

    /// Semi-coupled system `λ u_t = u_xx + u(a1 + b1 u)`,
    /// `λ v_t = v_xx + v(a1 + b1 u)` with the solution
    /// `u = U(t)`, `v = U(t)(c0 + β sin(γx) e^{−γ²t/λ})`, `U` the spatially
    /// uniform logistic solution with `U(0) = u0`.
    #[derive(Clone, Debug)]
    pub struct SemiCoupledField {
        model: DlvModel,
        lambda: f64,
        a1: f64,
        b1: f64,
        u0: f64,
        c0: f64,
        beta: f64,
        gamma: f64,
    }

    impl SemiCoupledField {
        pub fn new(lambda: Value, a1: Value, b1: Value, u0: f64, c0: f64, beta: f64, gamma: f64) -> Self {
            let z = Value::zero();
            let model = DlvModel::two_component([lambda, lambda], [a1, a1], (b1, z), (b1, z))
                .expect("valid coefficients")
                .with_name("semi-coupled test system");
            SemiCoupledField { model, lambda: lambda.to_f64(), a1: a1.to_f64(), b1: b1.to_f64(), u0, c0, beta, gamma }
        }

        /// `(U, U')`.
        fn uniform(&self, t: f64) -> (f64, f64) {
            let (l, a1, b1) = (self.lambda, self.a1, self.b1);
            let u = if a1 == 0.0 {
                1.0 / (1.0 / self.u0 - b1 * t / l)
            } else {
                let e = (a1 * t / l).exp();
                let cc = a1 / self.u0 + b1;
                a1 * e / (cc - b1 * e)
            };
            (u, u * (a1 + b1 * u) / l)
        }
    }

    impl PdeField for SemiCoupledField {
        fn model(&self) -> &DlvModel {
            &self.model
        }

        fn jet(&self, t: f64, x: f64) -> Result<JetPoint, DomainError> {
            let (u, ut) = self.uniform(t);
            if !u.is_finite() {
                return Err(DomainError::Singular { t, x, reason: "uniform state blows up".into() });
            }
            let g = self.gamma;
            let e = self.beta * (-g * g * t / self.lambda).exp();
            let (s, c) = (g * x).sin_cos();
            let h = self.c0 + e * s;
            let h_t = -g * g / self.lambda * e * s;
            Ok(JetPoint {
                t,
                x,
                u: vec![u, u * h],
                u_t: vec![ut, ut * h + u * h_t],
                u_x: vec![0.0, u * g * e * c],
                u_xx: vec![0.0, -u * g * g * e * s],
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solutions::reference;

    #[test]
    fn generic_model_has_only_translations() {
        let v = Value::int;
        let m = DlvModel::two_component([v(1), v(2)], [v(1), v(3)], (v(-1), v(-2)), (v(-3), v(-5))).unwrap();
        let ids: Vec<_> = operator_catalog(&m).iter().map(|o| o.id().to_string()).collect();
        assert_eq!(ids, ["Pt", "Px"]);
    }

    #[test]
    fn time_fn_derivative() {
        let f = TimeFn { c0: 1.0, c1: 2.0, c: 3.0, r: -0.5 };
        let h = 1e-6;
        assert!(((f.value(0.3 + h) - f.value(0.3 - h)) / (2.0 * h) - f.deriv(0.3)).abs() < 1e-8);
    }

    #[test]
    fn cd11_trig_generated_by_affine_operator() {
        let s = reference(SolutionId::CD11_TRIG);
        let op = generating_operator(&s).unwrap();
        let r = invariant_surface_residual(&op, &s, 0.3, 0.4).unwrap();
        assert!(r.iter().all(|v| v.abs() < 1e-10), "{r:?}");
    }
}
