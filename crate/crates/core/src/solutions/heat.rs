//! Heat-kernel family: three-component systems whose reaction factors are
//! linearly dependent, so that a line `u = p0 + p1 w`, `v = q0 + q1 w` on
//! which all factors vanish carries any solution `w` of the heat equation.

use std::f64::consts::PI;

use super::{require, Built, ClosedFormSolution, Kind, Params, SolutionId, Window, DEFAULT_GUARD};
use crate::error::{DomainError, SolutionError};
use crate::model::{DlvModel, JetPoint};
use crate::quadrature::gauss_hermite;
use crate::value::Value;

/// Default number of Gauss–Hermite nodes for the kernel integral.
pub const DEFAULT_NODES: usize = 64;

/// Bounded initial profile `f` of the heat-equation component.
#[derive(Clone, Debug)]
pub enum HeatProfile {
    /// `β sin(γ y)`.
    Sin { beta: f64, gamma: f64 },
    /// `amp · exp(−((y − center)/width)²)`.
    GaussianBump { amp: f64, center: f64, width: f64 },
    /// Natural cubic spline through `(xs[i], ys[i])`, held constant at the end
    /// values outside `[xs[0], xs[n−1]]`.
    Tabulated(Spline),
}

impl HeatProfile {
    pub fn tabulated(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, SolutionError> {
        Spline::new(xs, ys).map(HeatProfile::Tabulated)
    }

    /// `(f, f', f'')` at `y`.
    pub fn eval3(&self, y: f64) -> (f64, f64, f64) {
        match self {
            HeatProfile::Sin { beta, gamma } => {
                let (s, c) = (gamma * y).sin_cos();
                (beta * s, beta * gamma * c, -beta * gamma * gamma * s)
            }
            HeatProfile::GaussianBump { amp, center, width } => {
                let z = (y - center) / width;
                let g = amp * (-z * z).exp();
                (g, -2.0 * z / width * g, (4.0 * z * z - 2.0) / (width * width) * g)
            }
            HeatProfile::Tabulated(s) => s.eval3(y),
        }
    }

    /// Pointwise `t → ∞` limit of the kernel term: the mean of the limits of
    /// `f` at `±∞` (zero for the sine and bump profiles).
    fn far_mean(&self) -> Option<f64> {
        match self {
            HeatProfile::Sin { .. } | HeatProfile::GaussianBump { .. } => Some(0.0),
            HeatProfile::Tabulated(s) => Some(0.5 * (s.ys[0] + s.ys[s.ys.len() - 1])),
        }
    }
}

/// Natural cubic spline with clamped (constant) extrapolation.
#[derive(Clone, Debug)]
pub struct Spline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    m: Vec<f64>,
}

impl Spline {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, SolutionError> {
        let bad = |c: &str| SolutionError::Restriction { condition: c.to_string(), source_eq: "tabulated profile" };
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(bad("at least two (x, y) pairs of equal length"));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) || xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(bad("finite, strictly increasing abscissae"));
        }
        let n = xs.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm for the interior second derivatives.
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            let mut sup = vec![0.0; k];
            for i in 0..k {
                let h0 = xs[i + 1] - xs[i];
                let h1 = xs[i + 2] - xs[i + 1];
                diag[i] = 2.0 * (h0 + h1);
                sup[i] = h1;
                rhs[i] = 6.0 * ((ys[i + 2] - ys[i + 1]) / h1 - (ys[i + 1] - ys[i]) / h0);
            }
            for i in 1..k {
                let w = (xs[i + 1] - xs[i]) / diag[i - 1];
                diag[i] -= w * sup[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                m[i + 1] = (rhs[i] - sup[i] * m[i + 2]) / diag[i];
            }
        }
        Ok(Spline { xs, ys, m })
    }

    pub fn eval3(&self, y: f64) -> (f64, f64, f64) {
        let n = self.xs.len();
        if y <= self.xs[0] {
            return (self.ys[0], 0.0, 0.0);
        }
        if y >= self.xs[n - 1] {
            return (self.ys[n - 1], 0.0, 0.0);
        }
        let i = self.xs.partition_point(|&x| x <= y).saturating_sub(1).min(n - 2);
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let h = x1 - x0;
        let (a, b) = ((x1 - y) / h, (y - x0) / h);
        let (m0, m1) = (self.m[i], self.m[i + 1]);
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let f = a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let df = (y1 - y0) / h + (-(3.0 * a * a - 1.0) * m0 + (3.0 * b * b - 1.0) * m1) * h / 6.0;
        let ddf = a * m0 + b * m1;
        (f, df, ddf)
    }
}

/// Free interaction coefficients of the heat-kernel family; `b3`, `c3` are
/// derived so that the third reaction factor also vanishes on the line.
#[derive(Clone, Copy, Debug)]
pub struct HkCoefficients {
    pub c1: Value,
    pub b2: Value,
    pub e1: Value,
    pub e2: Value,
    pub c2: Value,
    pub e3: Value,
}

impl Default for HkCoefficients {
    fn default() -> Self {
        HkCoefficients {
            c1: Value::ratio(1, 2),
            b2: Value::ratio(1, 3),
            e1: Value::ratio(2, 5),
            e2: Value::ratio(3, 7),
            c2: Value::ratio(7, 10),
            e3: Value::ratio(11, 10),
        }
    }
}

#[derive(Clone, Debug)]
enum Source {
    /// `w = w0 + β sin(γx) e^{−γ²t}` in closed form.
    Sin { beta: f64, gamma: f64 },
    /// Gauss–Hermite evaluation of the heat kernel applied to `profile`.
    Kernel { profile: HeatProfile, nodes: Vec<f64>, weights: Vec<f64> },
}

#[derive(Clone, Debug)]
pub(crate) struct Heat {
    w0: f64,
    p: (f64, f64),
    q: (f64, f64),
    src: Source,
}

impl Heat {
    /// `(W, W_t, W_x, W_xx)`.
    fn w(&self, t: f64, x: f64) -> Result<[f64; 4], DomainError> {
        if t < 0.0 {
            return Err(DomainError::OutOfDomain { t, x, reason: "heat kernel requires t >= 0".into() });
        }
        match &self.src {
            Source::Sin { beta, gamma } => {
                let e = (-gamma * gamma * t).exp();
                let (s, c) = (gamma * x).sin_cos();
                let g2 = gamma * gamma;
                Ok([self.w0 + beta * s * e, -g2 * beta * s * e, beta * gamma * c * e, -g2 * beta * s * e])
            }
            Source::Kernel { profile, nodes, weights } => {
                if t == 0.0 {
                    let (f, df, ddf) = profile.eval3(x);
                    return Ok([self.w0 + f, ddf, df, ddf]);
                }
                let rt = t.sqrt();
                let (mut w, mut wt, mut wx, mut wxx) = (0.0, 0.0, 0.0, 0.0);
                // Nodes are symmetric: pair s and −s so the time derivative,
                // Σ w f'(x + 2√t s) s/√t, cancels exactly in the odd part.
                let n = nodes.len();
                for k in 0..n / 2 {
                    let (s, wk) = (nodes[n - 1 - k], weights[n - 1 - k]);
                    let (fp, dfp, ddfp) = profile.eval3(x + 2.0 * rt * s);
                    let (fm, dfm, ddfm) = profile.eval3(x - 2.0 * rt * s);
                    w += wk * (fp + fm);
                    wx += wk * (dfp + dfm);
                    wxx += wk * (ddfp + ddfm);
                    wt += wk * s * (dfp - dfm);
                }
                if n % 2 == 1 {
                    let (f, df, ddf) = profile.eval3(x);
                    w += weights[n / 2] * f;
                    wx += weights[n / 2] * df;
                    wxx += weights[n / 2] * ddf;
                }
                let c = 1.0 / PI.sqrt();
                Ok([self.w0 + c * w, c * wt / rt, c * wx, c * wxx])
            }
        }
    }

    pub(crate) fn jet(&self, t: f64, x: f64) -> Result<JetPoint, DomainError> {
        let [w, wt, wx, wxx] = self.w(t, x)?;
        let (p0, p1) = self.p;
        let (q0, q1) = self.q;
        Ok(JetPoint {
            t,
            x,
            u: vec![p0 + p1 * w, q0 + q1 * w, w],
            u_t: vec![p1 * wt, q1 * wt, wt],
            u_x: vec![p1 * wx, q1 * wx, wx],
            u_xx: vec![p1 * wxx, q1 * wxx, wxx],
        })
    }
}

/// Everything derived from the interaction coefficients.
struct Line {
    model: DlvModel,
    p: (Value, Value),
    q: (Value, Value),
    derived: Vec<(String, Value)>,
}

fn line(k: &HkCoefficients, src: &'static str) -> Result<Line, SolutionError> {
    let one = Value::one();
    let HkCoefficients { c1, b2, e1, e2, c2, e3 } = *k;
    let den = c1 * b2 - one;
    require(!den.is_zero(), "c1 b2 != 1", src)?;
    let p = ((c1 - one) / den, (e1 - c1 * e2) / den);
    let q = ((b2 - one) / den, (e2 - b2 * e1) / den);
    // b3 p0 + c3 q0 = 1, b3 p1 + c3 q1 = −1.
    let det = p.0 * q.1 - p.1 * q.0;
    require(!det.is_zero(), "third linear factor solvable for (b3, c3)", src)?;
    let b3 = (q.1 + q.0) / det;
    let c3 = (-p.0 - p.1) / det;
    // A + b2 B = −b3, c1 A + B = −c3 with C = 1.
    let big_a = (b2 * c3 - b3) / (one - b2 * c1);
    let big_b = -c3 - c1 * big_a;
    let neg = |v: Value| -v;
    let model = DlvModel::three_component(
        [one, one, one],
        [one, c2, e3],
        [
            [neg(one), neg(c1), neg(e1)],
            [neg(c2 * b2), neg(c2), neg(c2 * e2)],
            [neg(e3 * b3), neg(e3 * c3), neg(e3)],
        ],
    )?;
    let derived = vec![
        ("b3".into(), b3),
        ("c3".into(), c3),
        ("p0".into(), p.0),
        ("p1".into(), p.1),
        ("q0".into(), q.0),
        ("q1".into(), q.1),
        ("A".into(), big_a),
        ("B".into(), big_b),
        ("C".into(), one),
    ];
    Ok(Line { model, p, q, derived })
}

fn built(line: Line, w0: Value, src: Source, far: Option<f64>) -> Built {
    let pf = (line.p.0.to_f64(), line.p.1.to_f64());
    let qf = (line.q.0.to_f64(), line.q.1.to_f64());
    let asymptote = far.map(|m| {
        let w = w0.to_f64() + m;
        vec![pf.0 + pf.1 * w, qf.0 + qf.1 * w, w]
    });
    Built {
        model: line.model,
        derived: line.derived,
        window: Window { t: (0.0, 1.0), x: (-3.0, 3.0) },
        asymptote,
        nonnegative: false,
        kind: Kind::Heat(Heat { w0: w0.to_f64(), p: pf, q: qf, src }),
    }
}

fn kernel(profile: HeatProfile, nodes: usize) -> Source {
    let (nodes, weights) = gauss_hermite(nodes);
    Source::Kernel { profile, nodes, weights }
}

fn coeffs(p: &Params) -> HkCoefficients {
    HkCoefficients { c1: p.get("c1"), b2: p.get("b2"), e1: p.get("e1"), e2: p.get("e2"), c2: p.get("c2"), e3: p.get("e3") }
}

pub(super) fn hk_family(p: &Params, src: &'static str) -> Result<Built, SolutionError> {
    let l = line(&coeffs(p), src)?;
    let profile = HeatProfile::GaussianBump { amp: p.f("amp"), center: p.f("center"), width: p.f("width") };
    require(p.f("width") > 0.0, "width > 0", src)?;
    let far = profile.far_mean();
    Ok(built(l, p.get("w0"), kernel(profile, DEFAULT_NODES), far))
}

pub(super) fn hk_sin(p: &Params, src: &'static str) -> Result<Built, SolutionError> {
    let l = line(&coeffs(p), src)?;
    let (beta, gamma) = (p.f("beta"), p.f("gamma"));
    let far = if gamma != 0.0 { Some(0.0) } else { None };
    Ok(built(l, p.get("w0"), Source::Sin { beta, gamma }, far))
}

/// HK_FAMILY with an arbitrary bounded profile, using `nodes` Gauss–Hermite
/// nodes (see [`heat_kernel_family`] for the 64-node default).
pub fn heat_kernel_family_with_nodes(
    profile: HeatProfile,
    w0: Value,
    coeffs: HkCoefficients,
    nodes: usize,
) -> Result<ClosedFormSolution, SolutionError> {
    if nodes < 2 {
        return Err(SolutionError::Restriction { condition: "at least two quadrature nodes".into(), source_eq: "heat kernel" });
    }
    let src = super::info(SolutionId::HK_FAMILY).source;
    let l = line(&coeffs, src)?;
    let far = profile.far_mean();
    let b = built(l, w0, kernel(profile, nodes), far);
    let c = coeffs;
    let params = vec![
        ("w0".to_string(), w0),
        ("c1".to_string(), c.c1),
        ("b2".to_string(), c.b2),
        ("e1".to_string(), c.e1),
        ("e2".to_string(), c.e2),
        ("c2".to_string(), c.c2),
        ("e3".to_string(), c.e3),
    ];
    Ok(ClosedFormSolution {
        id: SolutionId::HK_FAMILY,
        model: b.model.with_name(SolutionId::HK_FAMILY.as_str()),
        params,
        derived: b.derived,
        window: b.window,
        asymptote: b.asymptote,
        nonnegative: false,
        guard: DEFAULT_GUARD,
        kind: b.kind,
    })
}

/// HK_FAMILY with an arbitrary bounded profile and 64-node quadrature.
pub fn heat_kernel_family(
    profile: HeatProfile,
    w0: Value,
    coeffs: HkCoefficients,
) -> Result<ClosedFormSolution, SolutionError> {
    heat_kernel_family_with_nodes(profile, w0, coeffs, DEFAULT_NODES)
}
