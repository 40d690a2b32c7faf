//! Traveling fronts whose components are polynomials in `tanh`.

use super::{require, Built, Kind, Params, Window};
use crate::error::{DomainError, SolutionError};
use crate::model::{DlvModel, JetPoint};
use crate::value::Value;

#[derive(Clone, Debug)]
pub(crate) struct PolyFront {
    pub mu: f64,
    pub speed: f64,
    pub coth: bool,
    pub coeffs: Vec<Vec<f64>>,
    pub mu_v: Value,
    pub speed_v: Value,
    pub exact: Vec<Vec<Value>>,
}

impl PolyFront {
    fn new(mu: Value, speed: Value, coth: bool, exact: Vec<Vec<Value>>) -> Self {
        let coeffs = exact.iter().map(|c| c.iter().map(|v| v.to_f64()).collect()).collect();
        PolyFront { mu: mu.to_f64(), speed: speed.to_f64(), coth, coeffs, mu_v: mu, speed_v: speed, exact }
    }

    pub(crate) fn jet(&self, t: f64, x: f64, guard: f64) -> Result<JetPoint, DomainError> {
        let z = self.mu * (x - self.speed * t);
        let tt = if self.coth {
            if z.abs() < guard {
                return Err(DomainError::Singular { t, x, reason: format!("coth argument {z:e}") });
            }
            1.0 / z.tanh()
        } else {
            z.tanh()
        };
        let g = 1.0 - tt * tt;
        let m = self.coeffs.len();
        let mut jet = JetPoint { t, x, u: vec![0.0; m], u_t: vec![0.0; m], u_x: vec![0.0; m], u_xx: vec![0.0; m] };
        for (i, c) in self.coeffs.iter().enumerate() {
            let (p, dp, ddp) = poly_eval(c, tt);
            let ux = self.mu * g * dp;
            jet.u[i] = p;
            jet.u_x[i] = ux;
            jet.u_xx[i] = self.mu * self.mu * g * (-2.0 * tt * dp + g * ddp);
            jet.u_t[i] = -self.speed * ux;
        }
        Ok(jet)
    }

    /// Pointwise limit as `t → +∞`: `T → −sign(μ s)`.
    fn limit(&self) -> Option<Vec<f64>> {
        let dir = self.mu * self.speed;
        if dir == 0.0 {
            return None;
        }
        let tt = if dir > 0.0 { -1.0 } else { 1.0 };
        Some(self.coeffs.iter().map(|c| poly_eval(c, tt).0).collect())
    }
}

/// `P(T), P'(T), P''(T)` by Horner.
fn poly_eval(c: &[f64], t: f64) -> (f64, f64, f64) {
    let (mut p, mut dp, mut ddp) = (0.0, 0.0, 0.0);
    for &ck in c.iter().rev() {
        ddp = ddp * t + 2.0 * dp;
        dp = dp * t + p;
        p = p * t + ck;
    }
    (p, dp, ddp)
}

fn v(n: i64) -> Value {
    Value::int(n)
}

fn q(n: i64, d: i64) -> Value {
    Value::ratio(n, d)
}

/// `k (1 + s T)^2` coefficients (s = ±1).
fn sq(k: Value, s: i64) -> Vec<Value> {
    vec![k, v(2 * s) * k, k]
}

/// `k (1 + s T)` coefficients.
fn lin(k: Value, s: i64) -> Vec<Value> {
    vec![k, v(s) * k]
}

fn window_for(mu: f64, speed: f64) -> Window {
    // About four widths either side of the front at t = 0, one time unit.
    let w = 4.0 / mu.abs().max(1e-3);
    let drift = speed.abs();
    Window { t: (0.0, 1.0), x: (-w - drift * 0.5 + speed * 0.5, w + drift * 0.5 + speed * 0.5) }
}

fn finish(model: DlvModel, front: PolyFront, derived: Vec<(String, Value)>, nonneg: bool) -> Built {
    let window = window_for(front.mu, front.speed);
    let asymptote = if front.coth { None } else { front.limit() };
    Built { model, derived, window, asymptote, nonnegative: nonneg, kind: Kind::Front(front) }
}

pub(super) fn rm2000_a(p: &Params, src: &'static str) -> Result<Built, SolutionError> {
    let a = p.get("a");
    let lam = p.get("lambda");
    require(a.signum() > 0, "a > 0", src)?;
    let b2 = v(2) * lam + q(5, 3) * a - a * lam / v(3);
    let model = DlvModel::two_component([v(1), lam], [v(1), a], (v(-1), q(-1, 3)), (-b2, v(-1)))?;
    let mu = (a / v(24)).sqrt().expect("a > 0");
    let speed = (a - v(6)) / (v(6) * a).sqrt().expect("a > 0");
    let front = PolyFront::new(mu, speed, false, vec![lin(q(1, 2), 1), sq(a / v(4), -1)]);
    let derived = vec![("b2".into(), b2), ("mu".into(), mu), ("speed".into(), speed)];
    Ok(finish(model, front, derived, true))
}

pub(super) fn rm2000_b(p: &Params, src: &'static str) -> Result<Built, SolutionError> {
    let a = p.get("a");
    let c = p.get("c");
    let ac = a * c;
    require((v(1) + ac).signum() > 0, "1 + a c > 0", src)?;
    require(ac != v(5), "a c != 5", src)?;
    let lam2 = (v(1) + a * (c - v(6))) / (v(5) - ac);
    require(lam2.signum() > 0, "lambda2 = (1 + a(c-6))/(5 - a c) > 0", src)?;
    let b2 = ac + v(1) - a;
    let model = DlvModel::two_component([v(1), lam2], [v(1), a], (v(-1), -c), (-b2, v(-1)))?;
    let mu = ((v(1) + ac) / v(24)).sqrt().expect("positive");
    let speed = (ac - v(5)) / (v(6) + v(6) * ac).sqrt().expect("positive");
    let front = PolyFront::new(mu, speed, false, vec![sq(q(1, 4), 1), sq(a / v(4), -1)]);
    let derived = vec![("lambda2".into(), lam2), ("b2".into(), b2), ("mu".into(), mu), ("speed".into(), speed)];
    Ok(finish(model, front, derived, a.signum() >= 0))
}

pub(super) fn fisher(p: &Params, src: &'static str, coth: bool) -> Result<Built, SolutionError> {
    let (a1, a2, b1, b2, c1, c2) = (p.get("a1"), p.get("a2"), p.get("b1"), p.get("b2"), p.get("c1"), p.get("c2"));
    let branch = p.get("branch");
    let (a, b, beta0, beta1);
    if branch == v(0) {
        require(a1 == a2, "a1 = a2 (branch beta0 = 0)", src)?;
        require(c1 != c2 && b1 != b2, "c1 != c2 and b1 != b2 (branch beta0 = 0)", src)?;
        beta0 = v(0);
        beta1 = (b1 - b2) / (c2 - c1);
        a = a1;
        b = (c1 * b2 - b1 * c2) / (c1 - c2);
    } else if branch == v(1) {
        require(!c2.is_zero(), "c2 != 0 (branch beta0 = a2/c2)", src)?;
        beta0 = a2 / c2;
        if c1 != c2 && b1 != b2 {
            beta1 = (b1 - b2) / (c2 - c1);
            require(
                (a1 * beta1 * c2).approx_eq(-(a2 * b1), 1e-12),
                "a1 beta1 c2 = -a2 b1 (branch beta0 = a2/c2 with c1 != c2)",
                src,
            )?;
        } else if c1 == c2 && b1 == b2 {
            require(!(a1 * c1).is_zero(), "a1 c1 != 0", src)?;
            beta1 = -(a2 * b1) / (a1 * c1);
        } else {
            return Err(SolutionError::Restriction {
                condition: "either c1 != c2 and b1 != b2, or c1 = c2 and b1 = b2".into(),
                source_eq: src,
            });
        }
        a = a1 - a2 * c1 / c2;
        b = b1 + c1 * beta1;
    } else {
        return Err(SolutionError::Restriction { condition: "branch must be 0 or 1".into(), source_eq: src });
    }
    require(a.signum() > 0, "a > 0", src)?;
    require(!b.is_zero(), "b != 0", src)?;
    let model = DlvModel::two_component([v(1), v(1)], [a1, a2], (-b1, -c1), (-b2, -c2))?;
    let mu = (a / v(24)).sqrt().expect("a > 0");
    let nu = v(5) * a / v(12);
    let speed = nu / mu;
    let k = a / (v(4) * b);
    let ucoef = sq(k, -1);
    let vcoef = vec![beta0 + beta1 * k, beta1 * v(-2) * k, beta1 * k];
    let front = PolyFront::new(mu, speed, coth, vec![ucoef, vcoef]);
    let derived = vec![
        ("a".into(), a),
        ("b".into(), b),
        ("beta0".into(), beta0),
        ("beta1".into(), beta1),
        ("mu".into(), mu),
        ("speed".into(), speed),
    ];
    let nonneg = !coth && b.signum() > 0 && beta0.signum() >= 0 && (beta0 + beta1 * a / b).signum() >= 0;
    let mut built = finish(model, front, derived, nonneg);
    if coth {
        // Keep the sampling window on one side of the blow-up plane.
        let w = 4.0 / mu.to_f64();
        built.window = Window { t: (0.0, 1.0), x: (speed.to_f64() + 0.5, speed.to_f64() + 0.5 + w) };
    }
    Ok(built)
}

pub(super) fn predprey(p: &Params, src: &'static str) -> Result<Built, SolutionError> {
    let (a1, a2, b1, b2, c) = (p.get("a1"), p.get("a2"), p.get("b1"), p.get("b2"), p.get("c"));
    let disc = a1 * b2 - a2 * b1;
    let s = v(3) * b1 + b2;
    require(disc.signum() > 0, "a1 b2 - a2 b1 > 0 (component v nonpositive otherwise)", src)?;
    require(s.signum() > 0, "3 b1 + b2 > 0", src)?;
    require(!c.is_zero(), "c != 0", src)?;
    let den = a2 * b1 - v(3) * a1 * (v(2) * b1 + b2);
    require(!den.is_zero(), "a2 b1 - 3 a1 (2 b1 + b2) != 0", src)?;
    let lam = (a2 * (v(5) * b1 + b2) - v(2) * a1 * b2) / den;
    require(lam.signum() > 0, "lambda = (a2(5b1+b2) - 2a1b2)/(a2b1 - 3a1(2b1+b2)) > 0", src)?;
    let alpha = den / (v(2) * s * disc).sqrt().expect("positive");
    let mu = (disc / (v(8) * s)).sqrt().expect("positive");
    let model = DlvModel::two_component([v(1), lam], [a1, -a2], (-b1, -c), (b2, v(-3) * c))?;
    let au = (v(3) * a1 + a2) / (v(2) * s);
    let av = disc / (v(4) * c * s);
    let front = PolyFront::new(mu, alpha, false, vec![lin(au, 1), sq(av, 1)]);
    let derived = vec![("lambda".into(), lam), ("alpha".into(), alpha), ("mu".into(), mu)];
    let nonneg = [a1, a2, b1, b2, c].iter().all(|x| x.signum() > 0);
    Ok(finish(model, front, derived, nonneg))
}

pub(super) fn hung11(p: &Params, src: &'static str) -> Result<Built, SolutionError> {
    let a = p.get("a");
    let al = p.get("alpha");
    require(!a.is_zero(), "a != 0", src)?;
    let d1 = v(8) - a + v(4) * al;
    let d2 = v(2) + al - a;
    require(!d1.is_zero(), "8 - a + 4 alpha != 0", src)?;
    require(!d2.is_zero(), "2 + alpha - a != 0", src)?;
    let rows = [
        [v(-1), (v(4) * al - a - v(16)) / a, (a - v(4) - v(2) * al) / d2],
        [(a - v(24)) / d1, v(-1), (a - v(4) + v(2) * al) / d2],
        [(a - v(4) - v(2) * al) / d1, (v(2) * al - a - v(4)) / a, v(-1)],
    ];
    let model = DlvModel::three_component([v(1), v(1), v(1)], [a, a, a], rows)?;
    let front = PolyFront::new(
        v(1),
        al,
        false,
        vec![sq(v(2) + al - a / v(4), -1), sq(a / v(4), 1), lin(a - v(2) - al, -1)],
    );
    let nonneg = (al + v(2)).cmp_f64(a) == Some(std::cmp::Ordering::Less)
        && a.cmp_f64(v(4) * (al + v(2))) == Some(std::cmp::Ordering::Less);
    Ok(finish(model, front, vec![("speed".into(), al)], nonneg))
}

pub(super) fn ch12(p: &Params, src: &'static str) -> Result<Built, SolutionError> {
    let a = p.get("a");
    let e = p.get("e");
    require(!a.is_zero(), "a != 0", src)?;
    require(e != v(1), "e != 1", src)?;
    let em1 = e - v(1);
    let alpha = (a - v(4) + v(20) * e - a * e) / (v(2) * em1);
    let c13 = v(8) * (v(1) - v(3) * e) / (a * em1);
    let rows = [
        [v(-1), c13, -e],
        [(v(8) + v(3) * a + e * (v(24) - v(3) * a)) / (a * em1), v(-1), (a - v(24)) * (v(1) - e) / v(16)],
        [v(2) * (a + v(8) * e - a * e) / (a * em1), c13, v(-1)],
    ];
    let model = DlvModel::three_component([v(1), v(1), v(1)], [a, a, a], rows)?;
    let wk = v(4) / em1;
    let front = PolyFront::new(
        v(1),
        alpha,
        false,
        vec![lin(a / v(2), 1), sq(a / v(4), -1), vec![wk, v(0), -wk]],
    );
    let nonneg = e.signum() > 0 && e.cmp_f64(v(1)) == Some(std::cmp::Ordering::Greater) && a.signum() > 0;
    Ok(finish(model, front, vec![("alpha".into(), alpha)], nonneg))
}

pub(super) fn cpp(p: &Params, src: &'static str) -> Result<Built, SolutionError> {
    let g = |k: &str| p.get(k);
    let (a1, a2, a3) = (g("a1"), g("a2"), g("a3"));
    let (b1, b2, b3) = (g("b1"), g("b2"), g("b3"));
    let (c1, c2, c3) = (g("c1"), g("c2"), g("c3"));
    require(a3 != v(16), "a3 != 16", src)?;
    let lam1 = v(2) * (v(4) + a1) / (v(16) - a3);
    let lam2 = v(2) * (v(4) + a2) / (v(16) - a3);
    require(lam1.signum() > 0 && lam2.signum() > 0, "lambda1, lambda2 > 0", src)?;
    let det = b3 * c2 - b2 * c3;
    require(!det.is_zero(), "b3 c2 - b2 c3 != 0", src)?;
    let lhs = (v(24) + a3) * (b1 * c2 - b2 * c1);
    let rhs = (v(8) - a1) * (b2 * c3 - b3 * c2) + (v(8) - a2) * (b3 * c1 - b1 * c3);
    require(
        lhs.approx_eq(rhs, 1e-12),
        "(24+a3)(b1c2-b2c1) = (8-a1)(b2c3-b3c2) + (8-a2)(b3c1-b1c3)",
        src,
    )?;
    let amp_u = ((v(8) - a2) * c3 + (v(24) + a3) * c2) / (v(2) * det);
    let amp_v = ((a2 - v(8)) * b3 - (v(24) + a3) * b2) / (v(2) * det);
    let speed = (v(16) - a3) / v(4);
    let rows = [[-b1, -c1, v(-1)], [-b2, -c2, v(-1)], [b3, c3, v(-3)]];
    let model = DlvModel::three_component([lam1, lam2, v(1)], [a1, a2, -a3], rows)?;
    // T = tanh(s t − x): μ = −1 with speed s.
    let front = PolyFront::new(v(-1), speed, false, vec![lin(amp_u, 1), lin(amp_v, 1), sq(v(2), 1)]);
    let derived = vec![
        ("lambda1".into(), lam1),
        ("lambda2".into(), lam2),
        ("speed".into(), speed),
        ("amp_u".into(), amp_u),
        ("amp_v".into(), amp_v),
        ("amp_w".into(), v(2)),
    ];
    let nonneg = amp_u.signum() >= 0 && amp_v.signum() >= 0;
    Ok(finish(model, front, derived, nonneg))
}
