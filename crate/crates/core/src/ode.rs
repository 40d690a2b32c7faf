//! Dormand–Prince 5(4) integrator with continuous (dense) output.
//!
//! Used for the reduced ODE systems. The dense output is the classical
//! fourth-order Hairer–Wanner interpolant; evaluating it never re-runs the
//! integrator, so profiles built from it are cheap to sample.

#[derive(Clone, Copy, Debug)]
pub struct Dopri5Options {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; `None` picks `|t1 − t0|·1e-3`.
    pub h0: Option<f64>,
    pub max_steps: usize,
    /// Run with this constant step and no error control.
    pub fixed_step: Option<f64>,
}

impl Default for Dopri5Options {
    fn default() -> Self {
        Dopri5Options { rtol: 1e-10, atol: 1e-12, h0: None, max_steps: 200_000, fixed_step: None }
    }
}

impl Dopri5Options {
    pub fn with_tol(tol: f64) -> Self {
        Dopri5Options { rtol: tol, atol: tol * 1e-2, ..Default::default() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum IntegrationStatus {
    Complete,
    /// The step size collapsed (typically approaching a blow-up); the dense
    /// output covers `[t0, reached]`.
    StepUnderflow { reached: f64 },
    NonFinite { reached: f64 },
    MaxSteps { reached: f64 },
}

#[derive(Clone, Debug)]
struct DenseStep {
    t: f64,
    h: f64,
    r: [Vec<f64>; 5],
}

/// Continuous solution on `[t0, reached]`.
#[derive(Clone, Debug)]
pub struct DenseSolution {
    pub t0: f64,
    pub reached: f64,
    pub status: IntegrationStatus,
    pub n_steps: usize,
    y0: Vec<f64>,
    steps: Vec<DenseStep>,
}

impl DenseSolution {
    pub fn dim(&self) -> usize {
        self.y0.len()
    }

    /// Whether `t` lies in the integrated range.
    pub fn covers(&self, t: f64) -> bool {
        let (lo, hi) = if self.reached >= self.t0 { (self.t0, self.reached) } else { (self.reached, self.t0) };
        t >= lo - 1e-12 * (1.0 + lo.abs()) && t <= hi + 1e-12 * (1.0 + hi.abs())
    }

    /// State at `t` (clamped to the integrated range).
    pub fn eval(&self, t: f64) -> Vec<f64> {
        if self.steps.is_empty() {
            return self.y0.clone();
        }
        let forward = self.reached >= self.t0;
        // Steps are stored in integration order; find the one containing t.
        let idx = match self.steps.binary_search_by(|s| {
            let (a, b) = if forward { (s.t, s.t + s.h) } else { (s.t + s.h, s.t) };
            if t < a {
                if forward { std::cmp::Ordering::Greater } else { std::cmp::Ordering::Less }
            } else if t > b {
                if forward { std::cmp::Ordering::Less } else { std::cmp::Ordering::Greater }
            } else {
                std::cmp::Ordering::Equal
            }
        }) {
            Ok(i) => i,
            Err(i) => i.min(self.steps.len() - 1),
        };
        let s = &self.steps[idx];
        let theta = ((t - s.t) / s.h).clamp(0.0, 1.0);
        let th1 = 1.0 - theta;
        (0..self.dim())
            .map(|i| s.r[0][i] + theta * (s.r[1][i] + th1 * (s.r[2][i] + theta * (s.r[3][i] + th1 * s.r[4][i]))))
            .collect()
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Integrate `y' = f(t, y)` from `t0` to `t1` (either direction).
pub fn dopri5<F>(mut f: F, t0: f64, y0: &[f64], t1: f64, opts: Dopri5Options) -> DenseSolution
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = y0.len();
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let span = (t1 - t0).abs();
    let mut sol = DenseSolution {
        t0,
        reached: t0,
        status: IntegrationStatus::Complete,
        n_steps: 0,
        y0: y0.to_vec(),
        steps: Vec::new(),
    };
    if span == 0.0 {
        return sol;
    }
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut h = dir * opts.fixed_step.or(opts.h0).unwrap_or(span * 1e-3).abs().min(span);
    let mut k1 = vec![0.0; n];
    let (mut k2, mut k3, mut k4, mut k5, mut k6, mut k7) =
        (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let mut ytmp = vec![0.0; n];
    let mut y1 = vec![0.0; n];
    f(t, &y, &mut k1);
    let mut steps = 0usize;
    while dir * (t1 - t) > 1e-14 * (1.0 + t1.abs()) {
        if steps >= opts.max_steps {
            sol.status = IntegrationStatus::MaxSteps { reached: t };
            break;
        }
        if dir * (t + h - t1) > 0.0 {
            h = t1 - t;
        }
        if h.abs() < 1e-14 * (1.0 + t.abs()) {
            sol.status = IntegrationStatus::StepUnderflow { reached: t };
            break;
        }
        for i in 0..n {
            ytmp[i] = y[i] + h * A21 * k1[i];
        }
        f(t + C2 * h, &ytmp, &mut k2);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        f(t + C3 * h, &ytmp, &mut k3);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        f(t + C4 * h, &ytmp, &mut k4);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        f(t + C5 * h, &ytmp, &mut k5);
        for i in 0..n {
            ytmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        f(t + h, &ytmp, &mut k6);
        for i in 0..n {
            y1[i] = y[i] + h * (A71 * k1[i] + A73 * k3[i] + A74 * k4[i] + A75 * k5[i] + A76 * k6[i]);
        }
        f(t + h, &y1, &mut k7);
        steps += 1;

        let finite = y1.iter().chain(k7.iter()).all(|v| v.is_finite());
        let err = if opts.fixed_step.is_some() || !finite {
            if finite { 0.0 } else { f64::INFINITY }
        } else {
            let mut acc = 0.0;
            for i in 0..n {
                let sc = opts.atol + opts.rtol * y[i].abs().max(y1[i].abs());
                let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                acc += (e / sc) * (e / sc);
            }
            (acc / n as f64).sqrt()
        };
        if !finite && opts.fixed_step.is_some() {
            sol.status = IntegrationStatus::NonFinite { reached: t };
            break;
        }
        if err <= 1.0 {
            let ydiff: Vec<f64> = (0..n).map(|i| y1[i] - y[i]).collect();
            let bspl: Vec<f64> = (0..n).map(|i| h * k1[i] - ydiff[i]).collect();
            let r4: Vec<f64> = (0..n).map(|i| ydiff[i] - h * k7[i] - bspl[i]).collect();
            let r5: Vec<f64> = (0..n)
                .map(|i| h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]))
                .collect();
            sol.steps.push(DenseStep { t, h, r: [y.clone(), ydiff, bspl, r4, r5] });
            t += h;
            y.copy_from_slice(&y1);
            k1.copy_from_slice(&k7);
            sol.reached = t;
            if opts.fixed_step.is_none() {
                let fac = (err.max(1e-10).powf(0.2) / 0.9).clamp(0.2, 10.0);
                h /= fac;
            }
        } else if err.is_finite() {
            let fac = (err.powf(0.2) / 0.9).clamp(1.0, 10.0);
            h /= fac;
        } else {
            h *= 0.25;
            if h.abs() < 1e-14 * (1.0 + t.abs()) {
                sol.status = IntegrationStatus::NonFinite { reached: t };
                break;
            }
        }
    }
    sol.n_steps = steps;
    sol
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic(_t: f64, y: &[f64], dy: &mut [f64]) {
        dy[0] = y[1];
        dy[1] = -y[0];
    }

    #[test]
    fn harmonic_oscillator_dense_output() {
        let sol = dopri5(harmonic, 0.0, &[0.0, 1.0], 10.0, Dopri5Options::with_tol(1e-11));
        assert_eq!(sol.status, IntegrationStatus::Complete);
        for k in 0..=200 {
            let t = k as f64 * 0.05;
            let y = sol.eval(t);
            assert!((y[0] - t.sin()).abs() < 1e-8, "t={t}");
            assert!((y[1] - t.cos()).abs() < 1e-8);
        }
    }

    #[test]
    fn fixed_step_order_is_five() {
        let err = |h: f64| {
            let s = dopri5(harmonic, 0.0, &[0.0, 1.0], 2.0, Dopri5Options { fixed_step: Some(h), ..Default::default() });
            (s.eval(2.0)[0] - 2.0f64.sin()).abs()
        };
        let p = (err(0.1) / err(0.05)).log2();
        assert!(p > 4.5, "observed order {p}");
    }

    #[test]
    fn backward_integration() {
        let sol = dopri5(|_, y, dy| dy[0] = y[0], 1.0, &[1.0f64.exp()], 0.0, Dopri5Options::default());
        assert!((sol.eval(0.0)[0] - 1.0).abs() < 1e-9);
        assert!((sol.eval(0.5)[0] - 0.5f64.exp()).abs() < 1e-8);
    }

    #[test]
    fn blow_up_reports_partial_range() {
        // y' = y², y(0) = 1 blows up at t = 1
        let sol = dopri5(|_, y, dy| dy[0] = y[0] * y[0], 0.0, &[1.0], 2.0, Dopri5Options::default());
        assert_ne!(sol.status, IntegrationStatus::Complete);
        assert!(sol.reached < 1.0 && sol.reached > 0.9);
    }
}
