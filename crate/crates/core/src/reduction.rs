//! Ansätze and the ODE systems they reduce a DLV system to.
//!
//! An [`Ansatz`] couples a lift map (profile functions → PDE field with an
//! analytic jet) with the matching [`ReducedSystem`]. Profiles come either
//! from closed forms or from [`integrate_reduced`]; in both cases they carry
//! the highest derivative explicitly so residual checks never differentiate
//! an interpolant twice.
//!
//! Supported ansätze:
//!
//! * traveling waves `u_i = φ_i(x − αt)`;
//! * the two-component exponential-sum ansatz for systems with equal rows,
//!   `u + v = φ1(x)`, with the time dependence `e^{βt}` carried by `φ2`;
//! * the first-type family `u = φ(t)G(t, x)`, `v = ψ(t) − φ(t)G(t, x)` with
//!   `λ1 G_t = G_xx` (trigonometric, exponential or polynomial `G`);
//! * the three-component ansatz `u = φ1(x)e^{δt}/b, …` for competition
//!   systems with equal rows.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{DomainError, ReductionError};
use crate::io::fmt_f64;
use crate::model::{DlvModel, JetPoint};
use crate::ode::{dopri5, Dopri5Options, IntegrationStatus};
use crate::solutions::{ClosedFormSolution, Kind, PdeField, SolutionId};
use crate::value::Value;

/// `(φ, φ′, φ″)` at one value of the profile variable.
#[derive(Clone, Debug, PartialEq)]
pub struct ProfilePoint {
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
    pub ddphi: Vec<f64>,
}

type ProfileFn = dyn Fn(f64) -> Option<ProfilePoint> + Send + Sync;

/// Profile functions of one variable. `eval` returns `None` where the
/// profile is undefined (singular points, outside an integrated range).
#[derive(Clone)]
pub struct Profile {
    dim: usize,
    range: Option<(f64, f64)>,
    f: Arc<ProfileFn>,
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Profile").field("dim", &self.dim).field("range", &self.range).finish_non_exhaustive()
    }
}

impl Profile {
    pub fn new<F>(dim: usize, f: F) -> Self
    where
        F: Fn(f64) -> Option<ProfilePoint> + Send + Sync + 'static,
    {
        Profile { dim, range: None, f: Arc::new(f) }
    }

    pub fn constant(values: Vec<f64>) -> Self {
        let m = values.len();
        Profile::new(m, move |_| Some(ProfilePoint { phi: values.clone(), dphi: vec![0.0; m], ddphi: vec![0.0; m] }))
    }

    /// `C1 cos(kω) + C2 sin(kω)`.
    pub fn harmonic(k: f64, c1: f64, c2: f64) -> Self {
        Profile::new(1, move |w| {
            let (s, c) = (k * w).sin_cos();
            let p = c1 * c + c2 * s;
            Some(ProfilePoint { phi: vec![p], dphi: vec![k * (c2 * c - c1 * s)], ddphi: vec![-k * k * p] })
        })
    }

    /// `C1 e^{kω} + C2 e^{−kω}`.
    pub fn exponential(k: f64, c1: f64, c2: f64) -> Self {
        Profile::new(1, move |w| {
            let (ep, em) = ((k * w).exp(), (-k * w).exp());
            let p = c1 * ep + c2 * em;
            Some(ProfilePoint { phi: vec![p], dphi: vec![k * (c1 * ep - c2 * em)], ddphi: vec![k * k * p] })
        })
    }

    /// Components of `parts` stacked in order.
    pub fn stack(parts: &[Profile]) -> Self {
        let parts: Vec<Profile> = parts.to_vec();
        let dim = parts.iter().map(|p| p.dim).sum();
        let range = parts.iter().filter_map(|p| p.range).reduce(|a, b| (a.0.max(b.0), a.1.min(b.1)));
        let f = move |w: f64| {
            let mut out = ProfilePoint { phi: Vec::new(), dphi: Vec::new(), ddphi: Vec::new() };
            for p in &parts {
                let q = p.eval(w)?;
                out.phi.extend(q.phi);
                out.dphi.extend(q.dphi);
                out.ddphi.extend(q.ddphi);
            }
            Some(out)
        };
        Profile { dim, range, f: Arc::new(f) }
    }

    pub fn with_range(mut self, lo: f64, hi: f64) -> Self {
        self.range = Some((lo.min(hi), lo.max(hi)));
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Interval on which the profile is defined (`None`: everywhere).
    pub fn range(&self) -> Option<(f64, f64)> {
        self.range
    }

    pub fn eval(&self, w: f64) -> Option<ProfilePoint> {
        if let Some((lo, hi)) = self.range {
            let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
            if w < lo - slack || w > hi + slack {
                return None;
            }
        }
        (self.f)(w).filter(|p| p.phi.iter().chain(&p.dphi).chain(&p.ddphi).all(|v| v.is_finite()))
    }

    /// `ω ↦ p(ω − s)`.
    pub fn shifted(&self, s: f64) -> Self {
        let inner = self.clone();
        Profile {
            dim: self.dim,
            range: self.range.map(|(a, b)| (a + s, b + s)),
            f: Arc::new(move |w| inner.eval(w - s)),
        }
    }

    /// `φ + delta` with the derivatives left unchanged (a deliberately
    /// inconsistent profile, for probing the checks).
    pub fn offset(&self, delta: f64) -> Self {
        let inner = self.clone();
        Profile {
            dim: self.dim,
            range: self.range,
            f: Arc::new(move |w| {
                let mut p = inner.eval(w)?;
                p.phi.iter_mut().for_each(|v| *v += delta);
                Some(p)
            }),
        }
    }

    /// Largest central-difference mismatch `|Δφ/2h − φ′|`, `|Δφ′/2h − φ″|` at
    /// `w`, or `None` if the stencil leaves the profile's domain.
    pub fn derivative_mismatch(&self, w: f64, h: f64) -> Option<f64> {
        let (l, c, r) = (self.eval(w - h)?, self.eval(w)?, self.eval(w + h)?);
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            worst = worst.max(((r.phi[i] - l.phi[i]) / (2.0 * h) - c.dphi[i]).abs());
            worst = worst.max(((r.dphi[i] - l.dphi[i]) / (2.0 * h) - c.ddphi[i]).abs());
        }
        Some(worst)
    }
}

/// CSV dump with header `omega,phi1,dphi1,ddphi1[,phi2,...]`; samples where
/// the profile is undefined are skipped.
pub fn profile_csv(p: &Profile, omegas: &[f64]) -> String {
    let mut s = String::from("omega");
    for i in 1..=p.dim() {
        s.push_str(&format!(",phi{i},dphi{i},ddphi{i}"));
    }
    s.push('\n');
    for &w in omegas {
        if let Some(q) = p.eval(w) {
            s.push_str(&fmt_f64(w));
            for i in 0..p.dim() {
                s.push_str(&format!(",{},{},{}", fmt_f64(q.phi[i]), fmt_f64(q.dphi[i]), fmt_f64(q.ddphi[i])));
            }
            s.push('\n');
        }
    }
    s
}

type Rhs = dyn Fn(f64, &[f64], &[f64]) -> Vec<f64> + Send + Sync;

/// An explicit ODE system `φ^{(n)} = F(ω, φ, φ′)` of order `n ∈ {1, 2}`.
///
/// The residual is `φ″ − F(ω, φ, φ′)` (order 2) or `φ′ − F(ω, φ)` (order 1);
/// for the second-order systems this is exactly the reduced equation with
/// unit leading coefficient.
#[derive(Clone)]
pub struct ReducedSystem {
    label: String,
    order: usize,
    dim: usize,
    params: Vec<(String, f64)>,
    rhs: Arc<Rhs>,
}

impl fmt::Debug for ReducedSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ReducedSystem")
            .field("label", &self.label)
            .field("order", &self.order)
            .field("dim", &self.dim)
            .field("params", &self.params)
            .finish_non_exhaustive()
    }
}

impl ReducedSystem {
    /// `φ″ = rhs(ω, φ, φ′)`.
    pub fn second_order<F>(label: impl Into<String>, dim: usize, params: Vec<(String, f64)>, rhs: F) -> Self
    where
        F: Fn(f64, &[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        ReducedSystem { label: label.into(), order: 2, dim, params, rhs: Arc::new(rhs) }
    }

    /// `φ′ = rhs(ω, φ)`.
    pub fn first_order<F>(label: impl Into<String>, dim: usize, params: Vec<(String, f64)>, rhs: F) -> Self
    where
        F: Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        ReducedSystem { label: label.into(), order: 1, dim, params, rhs: Arc::new(move |w, p, _| rhs(w, p)) }
    }

    /// `φ″ + cφ = 0`.
    pub fn linear(label: impl Into<String>, c: f64) -> Self {
        ReducedSystem::second_order(label, 1, vec![("c".into(), c)], move |_, p, _| vec![-c * p[0]])
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn params(&self) -> &[(String, f64)] {
        &self.params
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    /// Highest derivative implied by the system.
    pub fn highest(&self, w: f64, phi: &[f64], dphi: &[f64]) -> Vec<f64> {
        (self.rhs)(w, phi, dphi)
    }

    pub fn residual(&self, w: f64, phi: &[f64], dphi: &[f64], ddphi: &[f64]) -> Vec<f64> {
        let f = (self.rhs)(w, phi, dphi);
        let top = if self.order == 2 { ddphi } else { dphi };
        top.iter().zip(&f).map(|(a, b)| a - b).collect()
    }
}

/// Residual of `rs` at `w` along the profile.
pub fn reduced_residual(rs: &ReducedSystem, p: &Profile, w: f64) -> Result<Vec<f64>, ReductionError> {
    if rs.dim() != p.dim() {
        return Err(ReductionError::Dimension { expected: rs.dim(), got: p.dim() });
    }
    let q = p.eval(w).ok_or(ReductionError::Singular(w))?;
    Ok(rs.residual(w, &q.phi, &q.dphi, &q.ddphi))
}

/// `φ_i″ + αλ_iφ_i′ + φ_i(a_i + Σ_j b_ij φ_j) = 0`.
pub fn tw_reduce(model: &DlvModel, alpha: f64) -> ReducedSystem {
    let lam = model.lambda_f64().to_vec();
    let a = model.a_f64().to_vec();
    let b = model.b_f64().to_vec();
    let mut params = vec![("alpha".to_string(), alpha)];
    params.extend(lam.iter().enumerate().map(|(i, l)| (format!("lambda{}", i + 1), *l)));
    params.extend(a.iter().enumerate().map(|(i, v)| (format!("a{}", i + 1), *v)));
    ReducedSystem::second_order("traveling-wave", model.m(), params, move |_, p, dp| {
        (0..p.len())
            .map(|i| {
                let s: f64 = b[i].iter().zip(p).map(|(bij, pj)| bij * pj).sum();
                -(alpha * lam[i] * dp[i] + p[i] * (a[i] + s))
            })
            .collect()
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AnsatzId {
    /// `u_i = φ_i(x − αt)`.
    TravelingWave,
    /// Two components with equal rows: `u + v = φ1(x)`, the remainder
    /// proportional to `e^{βt}φ2(x)`.
    ExpSum,
    /// `u = φ(t)G`, `v = ψ(t) − φ(t)G`, trigonometric `G`.
    FirstTypeTrig,
    /// As above with exponential `G`.
    FirstTypeExp,
    /// As above with polynomial `G`.
    FirstTypePoly,
    /// Three components with equal rows, `u = φ1(x)e^{δt}/b`, ….
    ThreeComponent,
}

impl AnsatzId {
    pub const ALL: [AnsatzId; 6] = [
        AnsatzId::TravelingWave,
        AnsatzId::ExpSum,
        AnsatzId::FirstTypeTrig,
        AnsatzId::FirstTypeExp,
        AnsatzId::FirstTypePoly,
        AnsatzId::ThreeComponent,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AnsatzId::TravelingWave => "tw",
            AnsatzId::ExpSum => "exp-sum",
            AnsatzId::FirstTypeTrig => "first-type-trig",
            AnsatzId::FirstTypeExp => "first-type-exp",
            AnsatzId::FirstTypePoly => "first-type-poly",
            AnsatzId::ThreeComponent => "three-component",
        }
    }

    /// Whether the profile variable is time (otherwise `x` or `x − αt`).
    pub fn profile_in_time(self) -> bool {
        matches!(self, AnsatzId::FirstTypeTrig | AnsatzId::FirstTypeExp | AnsatzId::FirstTypePoly)
    }
}

impl fmt::Display for AnsatzId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AnsatzId {
    type Err = ReductionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AnsatzId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| ReductionError::Restriction(format!("unknown ansatz `{s}`")))
    }
}

/// Which conditional operator of the equal-rows two-component system the
/// exponential-sum ansatz comes from. They share the second reduced equation
/// and differ in the first: `φ1″ + φ1² + (a1 + a2)φ1 + a1a2 = 0` (affine
/// operator), `φ1″ + φ1² + a2φ1 = 0` (operator proportional to `u`),
/// `φ1″ + φ1² + a1φ1 = 0` (operator proportional to `v`).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SumVariant {
    #[default]
    Affine,
    ProportionalU,
    ProportionalV,
}

/// Free constants of an ansatz.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnsatzParams {
    /// Wave speed (traveling waves) or the operator parameter α
    /// (three-component ansatz).
    pub alpha: f64,
    /// Coefficients `α0, α1, α2` of `G` (first-type family).
    pub g: (f64, f64, f64),
    pub variant: SumVariant,
}

impl Default for AnsatzParams {
    fn default() -> Self {
        AnsatzParams { alpha: 0.0, g: (1.0, 0.0, 0.0), variant: SumVariant::Affine }
    }
}

#[derive(Clone, Debug)]
enum LiftKind {
    Tw {
        alpha: f64,
    },
    ExpSum {
        beta: f64,
        d: f64,
        /// `Ũ = cu·(φ1, 1) − Eφ2/d`, `Ṽ = cv·(φ1, 1) + Eφ2/d`.
        cu: (f64, f64),
        cv: (f64, f64),
        scale: [f64; 2],
    },
    FirstType {
        g: GShape,
        b: f64,
        c: f64,
    },
    ThreeComponent {
        delta: f64,
        alpha: f64,
        scale: [f64; 3],
    },
}

#[derive(Clone, Copy, Debug)]
enum GShape {
    Trig { kappa: f64, l1: f64, al: (f64, f64, f64) },
    Exp { kappa: f64, l1: f64, al: (f64, f64, f64) },
    Poly { l1: f64, al: (f64, f64, f64) },
}

impl GShape {
    /// `(G, G_t, G_x, G_xx)`; every shape solves `λ1 G_t = G_xx`.
    fn eval(&self, t: f64, x: f64) -> (f64, f64, f64, f64) {
        match *self {
            GShape::Trig { kappa: k, l1, al: (a0, a1, a2) } => {
                let e = (-k * k * t / l1).exp();
                let (s, c) = (k * x).sin_cos();
                let osc = e * (a1 * s + a2 * c);
                (a0 + osc, -k * k / l1 * osc, e * k * (a1 * c - a2 * s), -k * k * osc)
            }
            GShape::Exp { kappa: k, l1, al: (a0, a1, a2) } => {
                let e = (k * k * t / l1).exp();
                let (ep, em) = ((k * x).exp(), (-k * x).exp());
                let h = e * (a1 * ep + a2 * em);
                (a0 + h, k * k / l1 * h, e * k * (a1 * ep - a2 * em), k * k * h)
            }
            GShape::Poly { l1, al: (a0, a1, a2) } => {
                (a0 + a1 * x + a2 * l1 * x * x + 2.0 * a2 * t, 2.0 * a2, a1 + 2.0 * a2 * l1 * x, 2.0 * a2 * l1)
            }
        }
    }
}

/// A lift map together with its reduced system.
#[derive(Clone, Debug)]
pub struct Ansatz {
    id: AnsatzId,
    model: DlvModel,
    reduced: ReducedSystem,
    lift: LiftKind,
    derived: Vec<(String, Value)>,
}

impl Ansatz {
    pub fn id(&self) -> AnsatzId {
        self.id
    }

    pub fn model(&self) -> &DlvModel {
        &self.model
    }

    pub fn reduced(&self) -> &ReducedSystem {
        &self.reduced
    }

    /// Derived constants (`β`, `δ`, `κ²`, …).
    pub fn derived(&self) -> &[(String, Value)] {
        &self.derived
    }

    pub fn derived_value(&self, name: &str) -> Option<Value> {
        self.derived.iter().find(|(k, _)| k == name).map(|(_, v)| *v)
    }

    /// The profile variable at `(t, x)`.
    pub fn profile_argument(&self, t: f64, x: f64) -> f64 {
        match self.lift {
            LiftKind::Tw { alpha } => x - alpha * t,
            LiftKind::FirstType { .. } => t,
            _ => x,
        }
    }

    /// The scalar linear reduction obtained by freezing the nonlinear part
    /// at a constant solution: `φ2″ − βλ1φ2 = 0` (exponential-sum ansatz with
    /// `φ1 = −a1`) or `φ1″ − λ2δφ1 = 0` (three-component ansatz with
    /// `φ2 + φ3 = a2`, needs `a2 = a3`).
    pub fn linear_reduction(&self) -> Option<ReducedSystem> {
        let lam = self.model.lambda_f64();
        match self.lift {
            LiftKind::ExpSum { beta, .. } => {
                Some(ReducedSystem::linear("exp-sum linear", -beta * lam[0]))
            }
            LiftKind::ThreeComponent { delta, .. } if self.model.a()[1] == self.model.a()[2] => {
                Some(ReducedSystem::linear("three-component linear", -lam[1] * delta))
            }
            _ => None,
        }
    }

    pub fn lift(&self, profile: Profile) -> Result<LiftedField, ReductionError> {
        if profile.dim() != self.reduced.dim() {
            return Err(ReductionError::Dimension { expected: self.reduced.dim(), got: profile.dim() });
        }
        Ok(LiftedField { ansatz: Arc::new(self.clone()), profile })
    }

    fn lift_jet(&self, t: f64, x: f64, p: &ProfilePoint) -> JetPoint {
        match self.lift {
            LiftKind::Tw { alpha } => JetPoint {
                t,
                x,
                u: p.phi.clone(),
                u_t: p.dphi.iter().map(|d| -alpha * d).collect(),
                u_x: p.dphi.clone(),
                u_xx: p.ddphi.clone(),
            },
            LiftKind::ExpSum { beta, d, cu, cv, scale } => {
                let e = (beta * t).exp();
                let (f1, f2) = (&p.phi, &p.dphi);
                let dd = &p.ddphi;
                let r = e / d;
                let comp = |c: (f64, f64), sgn: f64, s: f64| {
                    (
                        s * (c.0 * f1[0] + c.1 + sgn * r * f1[1]),
                        s * sgn * beta * r * f1[1],
                        s * (c.0 * f2[0] + sgn * r * f2[1]),
                        s * (c.0 * dd[0] + sgn * r * dd[1]),
                    )
                };
                let (u, ut, ux, uxx) = comp(cu, -1.0, scale[0]);
                let (v, vt, vx, vxx) = comp(cv, 1.0, scale[1]);
                JetPoint { t, x, u: vec![u, v], u_t: vec![ut, vt], u_x: vec![ux, vx], u_xx: vec![uxx, vxx] }
            }
            LiftKind::FirstType { g, b, c } => {
                let (gg, gt, gx, gxx) = g.eval(t, x);
                let (ph, ps) = (p.phi[0], p.phi[1]);
                let (dph, dps) = (p.dphi[0], p.dphi[1]);
                let (uu, ut, ux, uxx) = (ph * gg, dph * gg + ph * gt, ph * gx, ph * gxx);
                JetPoint {
                    t,
                    x,
                    u: vec![-uu / b, -(ps - uu) / c],
                    u_t: vec![-ut / b, -(dps - ut) / c],
                    u_x: vec![-ux / b, ux / c],
                    u_xx: vec![-uxx / b, uxx / c],
                }
            }
            LiftKind::ThreeComponent { delta, alpha, scale } => {
                let e = (delta * t).exp();
                let k = [1.0, alpha / delta - 1.0, -alpha / delta];
                let base = [0.0, 1.0, 1.0];
                let mut jet = JetPoint::constant(t, x, vec![0.0; 3]);
                for i in 0..3 {
                    let s = scale[i];
                    let own = |v: &[f64]| if i == 0 { 0.0 } else { v[i] };
                    jet.u[i] = s * (base[i] * own(&p.phi) + k[i] * p.phi[0] * e);
                    jet.u_t[i] = s * k[i] * delta * p.phi[0] * e;
                    jet.u_x[i] = s * (base[i] * own(&p.dphi) + k[i] * p.dphi[0] * e);
                    jet.u_xx[i] = s * (base[i] * own(&p.ddphi) + k[i] * p.ddphi[0] * e);
                }
                jet
            }
        }
    }
}

/// PDE field obtained by lifting a profile.
#[derive(Clone, Debug)]
pub struct LiftedField {
    ansatz: Arc<Ansatz>,
    profile: Profile,
}

impl LiftedField {
    pub fn ansatz(&self) -> &Ansatz {
        &self.ansatz
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }
}

impl PdeField for LiftedField {
    fn model(&self) -> &DlvModel {
        &self.ansatz.model
    }

    fn jet(&self, t: f64, x: f64) -> Result<JetPoint, DomainError> {
        let w = self.ansatz.profile_argument(t, x);
        if let Some((lo, hi)) = self.profile.range() {
            if w < lo || w > hi {
                return Err(DomainError::OutOfDomain {
                    t,
                    x,
                    reason: format!("profile argument {w} outside [{lo}, {hi}]"),
                });
            }
        }
        let p = self.profile.eval(w).ok_or_else(|| DomainError::Singular {
            t,
            x,
            reason: format!("profile undefined at {w}"),
        })?;
        Ok(self.ansatz.lift_jet(t, x, &p))
    }
}

fn restriction(ok: bool, msg: &str) -> Result<(), ReductionError> {
    if ok {
        Ok(())
    } else {
        Err(ReductionError::Restriction(msg.into()))
    }
}

fn close(a: Value, b: Value) -> bool {
    match (a.as_rational(), b.as_rational()) {
        (Some(x), Some(y)) => x == y,
        _ => a.approx_eq(b, 1e-12),
    }
}

fn sum_exp_system(a1: f64, a2: f64, gamma: f64, variant: SumVariant) -> ReducedSystem {
    let (c1, c0) = match variant {
        SumVariant::Affine => (a1 + a2, a1 * a2),
        SumVariant::ProportionalU => (a2, 0.0),
        SumVariant::ProportionalV => (a1, 0.0),
    };
    let params = vec![("a1".into(), a1), ("a2".into(), a2), ("gamma".into(), gamma)];
    ReducedSystem::second_order("exp-sum", 2, params, move |_, p, _| {
        vec![-(p[0] * p[0] + c1 * p[0] + c0), -(gamma * p[1] + p[0] * p[1])]
    })
}

/// Build the ansatz `id` for `model`, checking the model restrictions it
/// needs.
pub fn build_ansatz(id: AnsatzId, model: &DlvModel, params: AnsatzParams) -> Result<Ansatz, ReductionError> {
    let lam = model.lambda();
    let a = model.a();
    let b = model.b();
    let m = model.m();
    let (lift, reduced, derived): (LiftKind, ReducedSystem, Vec<(String, Value)>) = match id {
        AnsatzId::TravelingWave => {
            (LiftKind::Tw { alpha: params.alpha }, tw_reduce(model, params.alpha), Vec::new())
        }
        AnsatzId::ExpSum => {
            restriction(m == 2, "two components")?;
            restriction(lam[0] != lam[1], "lambda1 != lambda2")?;
            restriction(a[0] != a[1], "a1 != a2")?;
            restriction(close(b[0][0], b[1][0]) && close(b[0][1], b[1][1]), "equal interaction rows")?;
            restriction(!b[0][0].is_zero() && !b[0][1].is_zero(), "nonzero interaction coefficients")?;
            let beta = (a[0] - a[1]) / (lam[0] - lam[1]);
            let gamma = (a[1] * lam[0] - a[0] * lam[1]) / (lam[0] - lam[1]);
            let (a1, a2) = (a[0].to_f64(), a[1].to_f64());
            let d = a1 - a2;
            let (cu, cv) = match params.variant {
                SumVariant::Affine => ((a1 / d, a1 * a2 / d), (-a2 / d, -a1 * a2 / d)),
                SumVariant::ProportionalU => ((0.0, 0.0), (1.0, 0.0)),
                SumVariant::ProportionalV => ((1.0, 0.0), (0.0, 0.0)),
            };
            let scale = [1.0 / b[0][0].to_f64(), 1.0 / b[0][1].to_f64()];
            let lift = LiftKind::ExpSum { beta: beta.to_f64(), d, cu, cv, scale };
            let rs = sum_exp_system(a1, a2, gamma.to_f64(), params.variant);
            (lift, rs, vec![("beta".into(), beta), ("gamma".into(), gamma)])
        }
        AnsatzId::FirstTypeTrig | AnsatzId::FirstTypeExp | AnsatzId::FirstTypePoly => {
            restriction(m == 2, "two components")?;
            restriction(lam[0] != lam[1], "lambda1 != lambda2")?;
            let (bb, cc) = (-b[0][0], -b[0][1]);
            restriction(!bb.is_zero() && !cc.is_zero(), "nonzero interaction coefficients")?;
            let r = lam[1] / lam[0];
            restriction(
                close(b[1][0], r * b[0][0]) && close(b[1][1], r * b[0][1]),
                "second row equal to lambda2/lambda1 times the first",
            )?;
            let k2 = (lam[0] * a[1] - lam[1] * a[0]) / (lam[0] - lam[1]);
            let (l1, l2) = (lam[0].to_f64(), lam[1].to_f64());
            let (a1, a2) = (a[0].to_f64(), a[1].to_f64());
            let al = params.g;
            let kappa = k2.to_f64().abs().sqrt();
            let g = match id {
                AnsatzId::FirstTypeTrig => {
                    restriction(k2.signum() > 0, "(lambda1 a2 - lambda2 a1)/(lambda1 - lambda2) > 0")?;
                    GShape::Trig { kappa, l1, al }
                }
                AnsatzId::FirstTypeExp => {
                    restriction(k2.signum() < 0, "(lambda1 a2 - lambda2 a1)/(lambda1 - lambda2) < 0")?;
                    GShape::Exp { kappa, l1, al }
                }
                _ => {
                    restriction(k2.is_zero(), "a2 = a1 lambda2/lambda1")?;
                    GShape::Poly { l1, al }
                }
            };
            let a0 = al.0;
            let params_list = vec![
                ("lambda1".into(), l1),
                ("lambda2".into(), l2),
                ("a1".into(), a1),
                ("a2".into(), a2),
                ("alpha0".into(), al.0),
                ("alpha2".into(), al.2),
            ];
            let rs = if id == AnsatzId::FirstTypePoly {
                let a2g = al.2;
                ReducedSystem::first_order("first-type poly", 2, params_list, move |_, p| {
                    vec![
                        p[0] * (a1 + p[1]) / l1,
                        ((l2 / l1) * (a1 + p[1]) * p[1] - 2.0 * a2g * (l1 - l2) * p[0]) / l2,
                    ]
                })
            } else {
                ReducedSystem::first_order("first-type", 2, params_list, move |_, p| {
                    vec![p[0] * (a1 + p[1]) / l1, ((a2 + l2 * p[1] / l1) * p[1] + a0 * (a1 * l2 / l1 - a2) * p[0]) / l2]
                })
            };
            let lift = LiftKind::FirstType { g, b: bb.to_f64(), c: cc.to_f64() };
            (lift, rs, vec![("kappa^2".into(), k2)])
        }
        AnsatzId::ThreeComponent => {
            restriction(m == 3, "three components")?;
            restriction(lam[0] != lam[1], "lambda1 != lambda2")?;
            restriction(a[0] != a[1], "a1 != a2")?;
            restriction(
                (0..3).all(|j| close(b[0][j], b[1][j]) && close(b[0][j], b[2][j])),
                "equal interaction rows",
            )?;
            restriction((0..3).all(|j| !b[0][j].is_zero()), "nonzero interaction coefficients")?;
            let case = (lam[1] - lam[2]) * a[0] - (lam[0] - lam[2]) * a[1] + (lam[0] - lam[1]) * a[2];
            restriction(
                close(case, Value::zero()),
                "(lambda2-lambda3)a1 - (lambda1-lambda3)a2 + (lambda1-lambda2)a3 = 0",
            )?;
            let delta = (a[0] - a[1]) / (lam[0] - lam[1]);
            let gamma = (lam[0] * a[1] - lam[1] * a[0]) / (lam[0] - lam[1]);
            let g = gamma.to_f64();
            let (a2, a3) = (a[1].to_f64(), a[2].to_f64());
            let rs = ReducedSystem::second_order(
                "three-component",
                3,
                vec![("delta".into(), delta.to_f64()), ("gamma".into(), g), ("alpha".into(), params.alpha)],
                move |_, p, _| {
                    let s = p[1] + p[2];
                    vec![-p[0] * (g - s), -p[1] * (a2 - s), -p[2] * (a3 - s)]
                },
            );
            // u = φ1 e^{δt}/b etc. with b, c, e the negated row entries.
            let scale = [-1.0 / b[0][0].to_f64(), -1.0 / b[0][1].to_f64(), -1.0 / b[0][2].to_f64()];
            let lift = LiftKind::ThreeComponent { delta: delta.to_f64(), alpha: params.alpha, scale };
            (lift, rs, vec![("delta".into(), delta), ("gamma".into(), gamma)])
        }
    };
    Ok(Ansatz { id, model: model.clone(), reduced, lift, derived })
}

/// Outcome of [`integrate_reduced`]. When the integrator stopped early the
/// profile covers the part that was reached and `diagnostic` says why.
#[derive(Clone, Debug)]
pub struct Integrated {
    pub profile: Profile,
    pub reached: f64,
    pub diagnostic: Option<ReductionError>,
}

/// Integrate `rs` from `init` (`(φ, φ′)` for second-order systems, `φ` for
/// first-order ones) over `range` with local tolerance `tol`.
pub fn integrate_reduced(
    rs: &ReducedSystem,
    init: &[f64],
    range: (f64, f64),
    tol: f64,
) -> Result<Integrated, ReductionError> {
    integrate_reduced_with(rs, init, range, Dopri5Options::with_tol(tol))
}

/// [`integrate_reduced`] with explicit integrator options.
pub fn integrate_reduced_with(
    rs: &ReducedSystem,
    init: &[f64],
    range: (f64, f64),
    opts: Dopri5Options,
) -> Result<Integrated, ReductionError> {
    let n = rs.dim();
    if init.len() != n * rs.order() {
        return Err(ReductionError::Dimension { expected: n * rs.order(), got: init.len() });
    }
    let sys = rs.clone();
    let sol = if rs.order() == 2 {
        dopri5(
            move |w, y, dy| {
                let f = sys.highest(w, &y[..n], &y[n..]);
                dy[..n].copy_from_slice(&y[n..]);
                dy[n..].copy_from_slice(&f);
            },
            range.0,
            init,
            range.1,
            opts,
        )
    } else {
        dopri5(move |w, y, dy| dy.copy_from_slice(&sys.highest(w, y, &[])), range.0, init, range.1, opts)
    };
    let reached = sol.reached;
    let target = range.1;
    let diagnostic = match sol.status {
        IntegrationStatus::Complete => None,
        IntegrationStatus::StepUnderflow { reached } | IntegrationStatus::MaxSteps { reached } => {
            Some(ReductionError::StepUnderflow { at: reached, reached, target })
        }
        IntegrationStatus::NonFinite { reached } => Some(ReductionError::NonFinite(reached)),
    };
    let sys = rs.clone();
    let order = rs.order();
    let sol = Arc::new(sol);
    let profile = Profile::new(n, move |w| {
        let y = sol.eval(w);
        if order == 2 {
            let dd = sys.highest(w, &y[..n], &y[n..]);
            Some(ProfilePoint { phi: y[..n].to_vec(), dphi: y[n..].to_vec(), ddphi: dd })
        } else {
            let d = sys.highest(w, &y, &[]);
            // φ″ = d/dω F(ω, φ(ω)) along the trajectory, by a central
            // difference of F (not of the interpolant).
            let h = 1e-5 * (1.0 + w.abs());
            let fwd: Vec<f64> = y.iter().zip(&d).map(|(a, b)| a + h * b).collect();
            let bwd: Vec<f64> = y.iter().zip(&d).map(|(a, b)| a - h * b).collect();
            let (fp, fm) = (sys.highest(w + h, &fwd, &[]), sys.highest(w - h, &bwd, &[]));
            let dd = fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect();
            Some(ProfilePoint { phi: y, dphi: d, ddphi: dd })
        }
    })
    .with_range(range.0, reached);
    Ok(Integrated { profile, reached, diagnostic })
}

/// Residual summary of a lifted profile over a sample grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ConsistencyReport {
    /// Largest relative PDE residual of the lifted jet.
    pub pde_residual: f64,
    /// Largest absolute reduced residual along the profile.
    pub reduced_residual: f64,
    /// Largest central-difference mismatch between the profile's value and
    /// derivative columns (the interpolation error of numerical profiles).
    pub derivative_mismatch: f64,
    pub samples: usize,
    pub skipped: usize,
}

impl ConsistencyReport {
    /// `pde_residual ≤ c·(reduced_residual + derivative_mismatch) + 1e-12`.
    pub fn consistent(&self, c: f64) -> bool {
        self.pde_residual <= c * (self.reduced_residual + self.derivative_mismatch) + 1e-12
    }
}

/// Lift `p` through `ansatz` and compare PDE and reduced residuals on `grid`.
pub fn consistency_check(
    ansatz: &Ansatz,
    p: &Profile,
    grid: &[(f64, f64)],
) -> Result<ConsistencyReport, ReductionError> {
    let field = ansatz.lift(p.clone())?;
    let mut rep =
        ConsistencyReport { pde_residual: 0.0, reduced_residual: 0.0, derivative_mismatch: 0.0, samples: 0, skipped: 0 };
    for &(t, x) in grid {
        let jet = match field.jet(t, x) {
            Ok(j) if j.is_finite() => j,
            _ => {
                rep.skipped += 1;
                continue;
            }
        };
        let w = ansatz.profile_argument(t, x);
        let r = reduced_residual(ansatz.reduced(), p, w)?;
        rep.samples += 1;
        rep.pde_residual = rep.pde_residual.max(ansatz.model().relative_residual(&jet));
        rep.reduced_residual = rep.reduced_residual.max(r.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        let h = 1e-4 * (1.0 + w.abs());
        if let Some(d) = p.derivative_mismatch(w, h) {
            rep.derivative_mismatch = rep.derivative_mismatch.max(d);
        }
    }
    Ok(rep)
}

/// Profile of a polynomial-in-tanh front in the traveling coordinate.
fn front_profile(mu: f64, coth: bool, coeffs: Vec<Vec<f64>>, guard: f64) -> Profile {
    let m = coeffs.len();
    Profile::new(m, move |w| {
        let z = mu * w;
        let tt = if coth {
            if z.abs() < guard {
                return None;
            }
            1.0 / z.tanh()
        } else {
            z.tanh()
        };
        let g = 1.0 - tt * tt;
        let mut out = ProfilePoint { phi: vec![0.0; m], dphi: vec![0.0; m], ddphi: vec![0.0; m] };
        for (i, c) in coeffs.iter().enumerate() {
            let (mut p, mut dp, mut ddp) = (0.0, 0.0, 0.0);
            for &ck in c.iter().rev() {
                ddp = ddp * tt + 2.0 * dp;
                dp = dp * tt + p;
                p = p * tt + ck;
            }
            out.phi[i] = p;
            out.dphi[i] = mu * g * dp;
            out.ddphi[i] = mu * mu * g * (-2.0 * tt * dp + g * ddp);
        }
        Some(out)
    })
}

/// Catalog entries that arise from one of the ansätze, with the ansatz that
/// produces them.
pub fn registered_triples() -> Vec<(AnsatzId, SolutionId)> {
    let mut v: Vec<(AnsatzId, SolutionId)> = SolutionId::ALL
        .into_iter()
        .filter(|id| id.is_tanh_type())
        .map(|id| (AnsatzId::TravelingWave, id))
        .collect();
    v.extend([
        (AnsatzId::ExpSum, SolutionId::CD11_EXP),
        (AnsatzId::ExpSum, SolutionId::CD11_TRIG),
        (AnsatzId::ExpSum, SolutionId::CD11_TANH2),
        (AnsatzId::ExpSum, SolutionId::CD11_TANH3),
        (AnsatzId::ExpSum, SolutionId::CD11_COMP),
        (AnsatzId::FirstTypeTrig, SolutionId::CD21_CASE1),
        (AnsatzId::ThreeComponent, SolutionId::CD13_3COMP),
    ]);
    v
}

/// The ansatz of `sol` together with the exact reduced solution that lifts
/// to it.
pub fn exact_reduction(sol: &ClosedFormSolution) -> Result<(Ansatz, Profile), ReductionError> {
    let model = sol.model();
    let none = || ReductionError::NoReduction(sol.id().to_string());
    match &sol.kind {
        Kind::Front(f) => {
            let params = AnsatzParams { alpha: f.speed, ..Default::default() };
            let ans = build_ansatz(AnsatzId::TravelingWave, model, params)?;
            Ok((ans, front_profile(f.mu, f.coth, f.coeffs.clone(), sol.guard())))
        }
        Kind::Cd11(c) => {
            let ans = build_ansatz(AnsatzId::ExpSum, model, AnsatzParams::default())?;
            let phi2 = if c.trig { Profile::harmonic(c.k, c.c1, c.c2) } else { Profile::exponential(c.k, c.c1, c.c2) };
            let a1 = model.a_f64()[0];
            Ok((ans, Profile::stack(&[Profile::constant(vec![-a1]), phi2])))
        }
        Kind::CdTanh(c) => {
            let ans = build_ansatz(AnsatzId::ExpSum, model, AnsatzParams::default())?;
            let c = c.clone();
            let guard = sol.guard();
            let profile = Profile::new(2, move |x| {
                if c.sinh_variant && c.s * x < guard.max(1e-3) {
                    return None;
                }
                let (p1, d1, dd1) = c.phi1(x);
                let (p2, d2, dd2) = c.phi2(x);
                Some(ProfilePoint { phi: vec![p1, p2], dphi: vec![d1, d2], ddphi: vec![dd1, dd2] })
            });
            Ok((ans, profile))
        }
        Kind::Cd21(c) => {
            let params = AnsatzParams { g: (c.al0, c.al1, c.al2), ..Default::default() };
            let ans = build_ansatz(AnsatzId::FirstTypeTrig, model, params)?;
            let c = c.clone();
            let profile = Profile::new(2, move |t| {
                let (a1, a2, l1, l2, b) = (c.a1, c.a2, c.l1, c.l2, c.b);
                let e1 = (a1 * t / l1).exp();
                let e2 = (a2 * t / l2).exp();
                let d = c.denominator(t);
                if d == 0.0 {
                    return None;
                }
                let dt = c.al0 * b * a1 / l1 * e1 + c.cc2 * a2 * e2;
                let dtt = c.al0 * b * (a1 / l1).powi(2) * e1 + c.cc2 * a2 * a2 / l2 * e2;
                // φ = −b a1 e1/d, ψ = −n/d.
                let h = a1 * e1 / d;
                let h_t = a1 * (a1 / l1 * e1 * d - e1 * dt) / (d * d);
                let n = c.al0 * a1 * b * e1 + c.cc2 * a2 * l1 * e2;
                let n_t = c.al0 * a1 * a1 * b / l1 * e1 + c.cc2 * a2 * a2 * l1 / l2 * e2;
                let n_tt = c.al0 * b * a1.powi(3) / (l1 * l1) * e1 + c.cc2 * a2.powi(3) * l1 / (l2 * l2) * e2;
                // Second derivatives via the quotient rule for q = num/d.
                let q2 = |num: f64, num_t: f64, num_tt: f64| {
                    (num_tt - 2.0 * num_t * dt / d - num * dtt / d + 2.0 * num * dt * dt / (d * d)) / d
                };
                let e1_t = a1 / l1 * e1;
                let e1_tt = a1 / l1 * e1_t;
                Some(ProfilePoint {
                    phi: vec![-b * h, -n / d],
                    dphi: vec![-b * h_t, -(n_t * d - n * dt) / (d * d)],
                    ddphi: vec![-b * a1 * q2(e1, e1_t, e1_tt), -q2(n, n_t, n_tt)],
                })
            });
            Ok((ans, profile))
        }
        Kind::Cd13(c) => {
            let params = AnsatzParams { alpha: c.alpha, ..Default::default() };
            let ans = build_ansatz(AnsatzId::ThreeComponent, model, params)?;
            let profile = Profile::stack(&[
                Profile::harmonic(c.k, c.cc1, c.cc2),
                Profile::constant(vec![c.v0, c.a2 - c.v0]),
            ]);
            Ok((ans, profile))
        }
        Kind::Heat(_) => Err(none()),
    }
}
