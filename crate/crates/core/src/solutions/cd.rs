//! Solutions built from conditional-symmetry ansätze: the two-component
//! `u + v` systems, the first-type family with `g`-functions, and the
//! three-component competition solution.

use std::f64::consts::PI;

use super::{require, Built, Kind, Params, Window};
use crate::error::{DomainError, SolutionError};
use crate::model::{DlvModel, JetPoint};
use crate::quadrature::integrate_adaptive;
use crate::value::Value;

fn v(n: i64) -> Value {
    Value::int(n)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Cd11Branch {
    Exp,
    Trig,
    /// Rescaled trigonometric branch of the competition form.
    Comp,
}

/// `u = off + cu·P(x)e^{βt}`, `v = cv·P(x)e^{βt}` with `P` exponential or
/// trigonometric in `k x`.
#[derive(Clone, Debug)]
pub(crate) struct Cd11 {
    pub trig: bool,
    pub k: f64,
    pub beta: f64,
    pub c1: f64,
    pub c2: f64,
    pub off: f64,
    pub cu: f64,
    pub cv: f64,
}

impl Cd11 {
    fn p(&self, x: f64) -> (f64, f64, f64) {
        let k = self.k;
        if self.trig {
            let (s, c) = (k * x).sin_cos();
            let p = self.c1 * c + self.c2 * s;
            (p, k * (-self.c1 * s + self.c2 * c), -k * k * p)
        } else {
            let (ep, em) = ((k * x).exp(), (-k * x).exp());
            let p = self.c1 * ep + self.c2 * em;
            (p, k * (self.c1 * ep - self.c2 * em), k * k * p)
        }
    }

    pub(crate) fn jet(&self, t: f64, x: f64) -> JetPoint {
        let e = (self.beta * t).exp();
        let (p, dp, ddp) = self.p(x);
        JetPoint {
            t,
            x,
            u: vec![self.off + self.cu * p * e, self.cv * p * e],
            u_t: vec![self.beta * self.cu * p * e, self.beta * self.cv * p * e],
            u_x: vec![self.cu * dp * e, self.cv * dp * e],
            u_xx: vec![self.cu * ddp * e, self.cv * ddp * e],
        }
    }
}

pub(super) fn cd11(p: &Params, src: &'static str, branch: Cd11Branch) -> Result<Built, SolutionError> {
    let (a1, a2, l1, l2) = (p.get("a1"), p.get("a2"), p.get("lambda1"), p.get("lambda2"));
    require(a1 != a2, "a1 != a2", src)?;
    require(l1 != l2, "lambda1 != lambda2", src)?;
    let beta = (a1 - a2) / (l1 - l2);
    let k2 = beta * l1;
    let (model, cd, asymptote, window, nonneg);
    match branch {
        Cd11Branch::Exp => {
            require(beta.signum() > 0, "exponential branch requires beta > 0", src)?;
            let k = k2.to_f64().sqrt();
            model = DlvModel::two_component([l1, l2], [a1, a2], (v(1), v(1)), (v(1), v(1)))?;
            let d = (a2 - a1).to_f64();
            cd = Cd11 { trig: false, k, beta: beta.to_f64(), c1: p.f("C1"), c2: p.f("C2"), off: -a1.to_f64(), cu: 1.0 / d, cv: -1.0 / d };
            asymptote = None;
            window = Window { t: (0.0, 1.0), x: (-1.0, 1.0) };
            nonneg = false;
        }
        Cd11Branch::Trig => {
            require(beta.signum() < 0, "trig branch requires beta < 0", src)?;
            let k = (-k2).to_f64().sqrt();
            model = DlvModel::two_component([l1, l2], [a1, a2], (v(1), v(1)), (v(1), v(1)))?;
            let d = (a2 - a1).to_f64();
            cd = Cd11 { trig: true, k, beta: beta.to_f64(), c1: p.f("C1"), c2: p.f("C2"), off: -a1.to_f64(), cu: 1.0 / d, cv: -1.0 / d };
            asymptote = Some(vec![-a1.to_f64(), 0.0]);
            window = Window { t: (0.0, 1.0), x: (0.0, 2.0 * PI / k) };
            nonneg = false;
        }
        Cd11Branch::Comp => {
            let (b, c) = (p.get("b"), p.get("c"));
            require(a1.signum() > 0 && a2.signum() > 0, "a1 > 0 and a2 > 0", src)?;
            require(b.signum() > 0 && c.signum() > 0, "b > 0 and c > 0", src)?;
            require(beta.signum() < 0, "trig branch requires beta < 0", src)?;
            let k = (-k2).to_f64().sqrt();
            model = DlvModel::two_component([l1, l2], [a1, a2], (-b, -c), (-b, -c))?;
            let (a1f, a2f, bf, cf) = (a1.to_f64(), a2.to_f64(), b.to_f64(), c.to_f64());
            cd = Cd11 {
                trig: true,
                k,
                beta: beta.to_f64(),
                c1: 0.0,
                c2: p.f("C2"),
                off: a1f / bf,
                cu: 1.0 / ((a1f - a2f) * bf),
                cv: 1.0 / ((a2f - a1f) * cf),
            };
            asymptote = Some(vec![a1f / bf, 0.0]);
            window = Window { t: (0.0, 1.0), x: (0.0, PI / k) };
            // On [0, π/k]: v ≥ 0 needs C2/(a2−a1) ≥ 0, u ≥ 0 needs a1 ≥ |C2|/|a1−a2|.
            let c2 = p.f("C2");
            nonneg = c2 / (a2f - a1f) >= 0.0 && a1f >= c2.abs() / (a1f - a2f).abs();
        }
    }
    let mut derived = vec![("beta".into(), beta), ("k^2".into(), k2.abs())];
    if branch == Cd11Branch::Comp {
        derived.push(("dirichlet_length".into(), Value::float(PI / cd.k)));
    }
    Ok(Built { model, derived, window, asymptote, nonnegative: nonneg, kind: Kind::Cd11(cd) })
}

/// Solutions from the `tanh²` profile of `φ1`: `φ2 = f·(C1 + C2∫dx/f²)` with
/// `f = cosh³(sx)` (`λ1 = 9/5 λ2`) or `f = sinh(sx)cosh³(sx)` (`λ1 = 4/3 λ2`).
#[derive(Clone, Debug)]
pub(crate) struct CdTanh {
    pub sinh_variant: bool,
    pub a1: f64,
    pub a2: f64,
    pub s: f64,
    pub beta: f64,
    pub c1: f64,
    pub c2: f64,
}

impl CdTanh {
    /// `(φ1, φ1', φ1'')` with `φ1 = (3/2)(a1−a2)(1 − tanh²(sx)) − a1`.
    pub(crate) fn phi1(&self, x: f64) -> (f64, f64, f64) {
        let d = self.a1 - self.a2;
        let th = (self.s * x).tanh();
        let g = 1.0 - th * th;
        (1.5 * d * g - self.a1, -3.0 * d * self.s * th * g, -3.0 * d * self.s * self.s * g * (1.0 - 3.0 * th * th))
    }

    /// `(f, f', f'')`.
    fn f(&self, x: f64) -> (f64, f64, f64) {
        let s = self.s;
        let (sh, ch) = ((s * x).sinh(), (s * x).cosh());
        if self.sinh_variant {
            (sh * ch.powi(3), s * ch * ch * (ch * ch + 3.0 * sh * sh), s * s * sh * ch * (10.0 * ch * ch + 6.0 * sh * sh))
        } else {
            (ch.powi(3), 3.0 * s * ch * ch * sh, 3.0 * s * s * ch * (2.0 * sh * sh + ch * ch))
        }
    }

    /// `∫ dx/f²`: closed form for `cosh³`, adaptive quadrature from `x = 1`
    /// for `sinh cosh³`.
    fn integral(&self, x: f64) -> f64 {
        let s = self.s;
        if self.sinh_variant {
            let f = |y: f64| {
                let (sh, ch) = ((s * y).sinh(), (s * y).cosh());
                let v = sh * ch.powi(3);
                1.0 / (v * v)
            };
            integrate_adaptive(f, 1.0, x, 1e-15, 1e-14).0
        } else {
            let th = (s * x).tanh();
            (th - 2.0 * th.powi(3) / 3.0 + th.powi(5) / 5.0) / s
        }
    }

    /// `(φ2, φ2', φ2'')`.
    pub(crate) fn phi2(&self, x: f64) -> (f64, f64, f64) {
        let (f, df, ddf) = self.f(x);
        let g = if self.c2 == 0.0 { self.c1 } else { self.c1 + self.c2 * self.integral(x) };
        (f * g, df * g + self.c2 / f, ddf * g)
    }

    pub(crate) fn jet(&self, t: f64, x: f64, guard: f64) -> Result<JetPoint, DomainError> {
        if self.sinh_variant && self.s * x < guard.max(1e-3) {
            return Err(DomainError::OutOfDomain { t, x, reason: "requires x > 0 (f has a zero at x = 0)".into() });
        }
        let e = (self.beta * t).exp();
        let (p1, dp1, ddp1) = self.phi1(x);
        let (p2, dp2, ddp2) = self.phi2(x);
        let d = self.a1 - self.a2;
        let (a1, a2) = (self.a1, self.a2);
        Ok(JetPoint {
            t,
            x,
            u: vec![(-e * p2 + a1 * p1 + a1 * a2) / d, (e * p2 - a2 * p1 - a1 * a2) / d],
            u_t: vec![-self.beta * e * p2 / d, self.beta * e * p2 / d],
            u_x: vec![(-e * dp2 + a1 * dp1) / d, (e * dp2 - a2 * dp1) / d],
            u_xx: vec![(-e * ddp2 + a1 * ddp1) / d, (e * ddp2 - a2 * ddp1) / d],
        })
    }
}

pub(super) fn cd_tanh(p: &Params, src: &'static str, sinh_variant: bool) -> Result<Built, SolutionError> {
    let (a1, a2, l2) = (p.get("a1"), p.get("a2"), p.get("lambda2"));
    require(a1.cmp_f64(a2) == Some(std::cmp::Ordering::Greater), "a1 > a2", src)?;
    let l1 = if sinh_variant { Value::ratio(4, 3) * l2 } else { Value::ratio(9, 5) * l2 };
    let beta = (a1 - a2) / (l1 - l2);
    let s = (a1 - a2).sqrt().expect("a1 > a2") / v(2);
    let model = DlvModel::two_component([l1, l2], [a1, a2], (v(1), v(1)), (v(1), v(1)))?;
    let cd = CdTanh {
        sinh_variant,
        a1: a1.to_f64(),
        a2: a2.to_f64(),
        s: s.to_f64(),
        beta: beta.to_f64(),
        c1: p.f("C1"),
        c2: p.f("C2"),
    };
    let sf = s.to_f64();
    let window = if sinh_variant {
        Window { t: (0.0, 0.25), x: (0.2 / sf, 1.5 / sf) }
    } else {
        Window { t: (0.0, 0.5), x: (-1.5 / sf, 1.5 / sf) }
    };
    let derived = vec![("lambda1".into(), l1), ("beta".into(), beta), ("s".into(), s)];
    Ok(Built { model, derived, window, asymptote: None, nonnegative: false, kind: Kind::CdTanh(cd) })
}

/// First-type conditional-symmetry family in the scaled form
/// `λ1 u_t = u_xx + u(a1 − b u − c v)`,
/// `λ2 v_t = v_xx + v(a2 − λ2 b u/λ1 − λ2 c v/λ1)`.
#[derive(Clone, Debug)]
pub(crate) struct Cd21 {
    pub a1: f64,
    pub a2: f64,
    pub l1: f64,
    pub l2: f64,
    pub b: f64,
    pub c: f64,
    pub cc1: f64,
    pub cc2: f64,
    pub al0: f64,
    pub al1: f64,
    pub al2: f64,
    pub kappa: f64,
}

impl Cd21 {
    pub(crate) fn denominator(&self, t: f64) -> f64 {
        let e1 = (self.a1 * t / self.l1).exp();
        let e2 = (self.a2 * t / self.l2).exp();
        self.cc1 + self.al0 * self.b * e1 + self.cc2 * self.l2 * e2
    }

    pub(crate) fn jet(&self, t: f64, x: f64, guard: f64) -> Result<JetPoint, DomainError> {
        let (a1, a2, l1, l2, b, c) = (self.a1, self.a2, self.l1, self.l2, self.b, self.c);
        let k = self.kappa;
        let k2 = k * k;
        let e1 = (a1 * t / l1).exp();
        let e2 = (a2 * t / l2).exp();
        let d = self.cc1 + self.al0 * b * e1 + self.cc2 * l2 * e2;
        let dscale = self.cc1.abs() + (self.al0 * b * e1).abs() + (self.cc2 * l2 * e2).abs();
        if d.abs() <= guard * dscale.max(1e-300) {
            return Err(DomainError::Singular { t, x, reason: "denominator vanishes".into() });
        }
        let dt = self.al0 * b * a1 / l1 * e1 + self.cc2 * a2 * e2;
        let decay = (-k2 * t / l1).exp();
        let (sn, cs) = (k * x).sin_cos();
        let osc = decay * (self.al1 * sn + self.al2 * cs);
        let g = self.al0 + osc;
        let g_t = -k2 / l1 * osc;
        let g_x = decay * k * (self.al1 * cs - self.al2 * sn);
        let g_xx = -k2 * osc;
        let h = a1 * e1 / d;
        let h_t = a1 * (a1 / l1 * e1 * d - e1 * dt) / (d * d);
        let u = h * g;
        let u_t = h_t * g + h * g_t;
        let u_x = h * g_x;
        let u_xx = h * g_xx;
        let n = self.al0 * a1 * b * e1 + self.cc2 * a2 * l1 * e2;
        let n_t = self.al0 * a1 * a1 * b / l1 * e1 + self.cc2 * a2 * a2 * l1 / l2 * e2;
        let r = b / c;
        Ok(JetPoint {
            t,
            x,
            u: vec![u, n / (c * d) - r * u],
            u_t: vec![u_t, (n_t * d - n * dt) / (c * d * d) - r * u_t],
            u_x: vec![u_x, -r * u_x],
            u_xx: vec![u_xx, -r * u_xx],
        })
    }
}

pub(super) fn cd21(p: &Params, src: &'static str) -> Result<Built, SolutionError> {
    let (a1, a2, l1, l2, b, c) = (p.get("a1"), p.get("a2"), p.get("lambda1"), p.get("lambda2"), p.get("b"), p.get("c"));
    require(l1 != l2, "lambda1 != lambda2", src)?;
    require(!(a1 * a2).is_zero(), "a1 a2 != 0", src)?;
    require(!b.is_zero() && !c.is_zero(), "b != 0 and c != 0", src)?;
    let kappa2 = (l1 * a2 - l2 * a1) / (l1 - l2);
    require(kappa2.signum() > 0, "kappa^2 = (lambda1 a2 - lambda2 a1)/(lambda1 - lambda2) > 0", src)?;
    let model = DlvModel::two_component([l1, l2], [a1, a2], (-b, -c), (-(l2 * b / l1), -(l2 * c / l1)))?;
    let cd = Cd21 {
        a1: a1.to_f64(),
        a2: a2.to_f64(),
        l1: l1.to_f64(),
        l2: l2.to_f64(),
        b: b.to_f64(),
        c: c.to_f64(),
        cc1: p.f("C1"),
        cc2: p.f("C2"),
        al0: p.f("alpha0"),
        al1: p.f("alpha1"),
        al2: p.f("alpha2"),
        kappa: kappa2.to_f64().sqrt(),
    };
    if cd.denominator(0.0) == 0.0 {
        return Err(SolutionError::Restriction { condition: "C1 + alpha0 b + C2 lambda2 != 0".into(), source_eq: src });
    }
    let r1 = a1 / l1;
    let r2 = a2 / l2;
    let asymptote = match r1.cmp_f64(r2) {
        Some(std::cmp::Ordering::Greater) if cd.al0 != 0.0 => Some(vec![cd.a1 / cd.b, 0.0]),
        Some(std::cmp::Ordering::Less) if cd.cc2 != 0.0 => Some(vec![0.0, cd.a2 * cd.l1 / (cd.c * cd.l2)]),
        _ => None,
    };
    let pk = PI / cd.kappa;
    let window = Window { t: (0.0, 1.0), x: (0.5 * pk, 1.5 * pk) };
    // Boundedness and nonnegativity on the whole line for t > 0.
    let nonneg = cd.b > 0.0
        && cd.c > 0.0
        && cd.al2 == 0.0
        && cd.al0 > cd.al1.abs()
        && cd.cc2 > f64::max(-(cd.al0 * cd.b + cd.cc1) / cd.l2, cd.b * cd.a1 * cd.al1.abs() / (cd.a2 * cd.l1));
    let derived = vec![
        ("kappa^2".into(), kappa2),
        ("neumann_period".into(), Value::float(pk)),
    ];
    Ok(Built { model, derived, window, asymptote, nonnegative: nonneg, kind: Kind::Cd21(cd) })
}

/// Three-component competition solution:
/// `u = φ e^{δt}/b`, `v = v0/c + (α/δ − 1)φ e^{δt}/c`,
/// `w = (a2 − v0)/e − α φ e^{δt}/(e δ)`, `φ = C1 cos kx + C2 sin kx`.
#[derive(Clone, Debug)]
pub(crate) struct Cd13 {
    pub delta: f64,
    pub k: f64,
    pub cc1: f64,
    pub cc2: f64,
    pub b: f64,
    pub c: f64,
    pub e: f64,
    pub alpha: f64,
    pub v0: f64,
    pub a2: f64,
}

impl Cd13 {
    pub(crate) fn jet(&self, t: f64, x: f64) -> JetPoint {
        let (s, co) = (self.k * x).sin_cos();
        let phi = self.cc1 * co + self.cc2 * s;
        let dphi = self.k * (-self.cc1 * s + self.cc2 * co);
        let ddphi = -self.k * self.k * phi;
        let ex = (self.delta * t).exp();
        let cu = 1.0 / self.b;
        let cv = (self.alpha / self.delta - 1.0) / self.c;
        let cw = -self.alpha / (self.e * self.delta);
        let d = self.delta;
        JetPoint {
            t,
            x,
            u: vec![cu * phi * ex, self.v0 / self.c + cv * phi * ex, (self.a2 - self.v0) / self.e + cw * phi * ex],
            u_t: vec![d * cu * phi * ex, d * cv * phi * ex, d * cw * phi * ex],
            u_x: vec![cu * dphi * ex, cv * dphi * ex, cw * dphi * ex],
            u_xx: vec![cu * ddphi * ex, cv * ddphi * ex, cw * ddphi * ex],
        }
    }
}

pub(super) fn cd13(p: &Params, src: &'static str) -> Result<Built, SolutionError> {
    let (a1, a2, l1, l2) = (p.get("a1"), p.get("a2"), p.get("lambda1"), p.get("lambda2"));
    let (b, c, e) = (p.get("b"), p.get("c"), p.get("e"));
    require(a1 != a2, "a1 != a2 = a3", src)?;
    require(l1 != l2, "lambda1 != lambda2 = lambda3", src)?;
    require(!b.is_zero() && !c.is_zero() && !e.is_zero(), "b, c, e != 0", src)?;
    let delta = (a1 - a2) / (l1 - l2);
    require(delta.signum() < 0, "delta = (a1-a2)/(lambda1-lambda2) < 0", src)?;
    let row = [-b, -c, -e];
    let model = DlvModel::three_component([l1, l2, l2], [a1, a2, a2], [row, row, row])?;
    let k2 = -(delta * l2);
    let cd = Cd13 {
        delta: delta.to_f64(),
        k: k2.to_f64().sqrt(),
        cc1: p.f("C1"),
        cc2: p.f("C2"),
        b: b.to_f64(),
        c: c.to_f64(),
        e: e.to_f64(),
        alpha: p.f("alpha"),
        v0: p.f("v0"),
        a2: a2.to_f64(),
    };
    let asymptote = Some(vec![0.0, cd.v0 / cd.c, (cd.a2 - cd.v0) / cd.e]);
    let len = PI / cd.k;
    let window = Window { t: (0.0, 1.0), x: (0.0, len) };
    // Sign brackets for v0 (with C1 = 0, C2 = 1, b, c, e > 0).
    let (al, d, v0, a2f) = (cd.alpha, cd.delta, cd.v0, cd.a2);
    let bracket = if al <= d {
        0.0 <= v0 && v0 <= a2f - al / d
    } else if al <= 0.0 {
        1.0 - al / d <= v0 && v0 <= a2f - al / d
    } else {
        1.0 - al / d <= v0 && v0 <= a2f
    };
    let nonneg = bracket && cd.cc1 == 0.0 && cd.cc2 == 1.0 && cd.b > 0.0 && cd.c > 0.0 && cd.e > 0.0;
    let derived = vec![("delta".into(), delta), ("k^2".into(), k2), ("dirichlet_length".into(), Value::float(len))];
    Ok(Built { model, derived, window, asymptote, nonnegative: nonneg, kind: Kind::Cd13(cd) })
}
