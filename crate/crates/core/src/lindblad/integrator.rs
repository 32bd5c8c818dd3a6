//! Dormand–Prince 5(4) with embedded error estimate and PI step control,
//! specialised to flat complex state vectors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::C64;

/// A first-order system dy/dt = f(t, y) on a flat complex vector.
pub trait OdeSystem {
    fn len(&self) -> usize;
    fn derivative(&self, t: f64, y: &[C64], dy: &mut [C64]);
}

/// Tolerances and limits for the adaptive integrator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorControls {
    /// Local relative tolerance.
    pub rtol: f64,
    /// Local absolute tolerance.
    pub atol: f64,
    /// Upper bound on the step, seconds.
    pub max_step: Option<f64>,
    /// Longest physical time a steady-state search may integrate, seconds.
    pub max_time: f64,
    /// Hard cap on accepted plus rejected steps per call.
    pub max_steps: u64,
}

impl Default for IntegratorControls {
    fn default() -> Self {
        Self { rtol: 1e-8, atol: 1e-10, max_step: None, max_time: 1e-3, max_steps: 50_000_000 }
    }
}

impl IntegratorControls {
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.rtol > 0.0 && self.rtol < 1.0) {
            out.push(format!("rtol must lie in (0, 1) (got {})", self.rtol));
        }
        if !(self.atol > 0.0) {
            out.push(format!("atol must be > 0 (got {})", self.atol));
        }
        if let Some(h) = self.max_step {
            if !(h > 0.0) {
                out.push(format!("max_step must be > 0 (got {h})"));
            }
        }
        if !(self.max_time > 0.0) {
            out.push(format!("max_time must be > 0 (got {})", self.max_time));
        }
        if self.max_steps == 0 {
            out.push("max_steps must be > 0".into());
        }
        out
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: u64,
    pub rejected: u64,
    pub evaluations: u64,
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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

/// Stateful DOPRI5 stepper; the step size carries over between calls so
/// that many closely spaced output times cost nothing extra.
pub struct Dopri5<'a, S: OdeSystem> {
    system: &'a S,
    controls: IntegratorControls,
    k: [Vec<C64>; 7],
    stage: Vec<C64>,
    y_new: Vec<C64>,
    h: Option<f64>,
    err_old: f64,
    fsal_valid: bool,
    stats: StepStats,
}

impl<'a, S: OdeSystem> Dopri5<'a, S> {
    pub fn new(system: &'a S, controls: IntegratorControls) -> Self {
        let n = system.len();
        let zero = || vec![C64::new(0.0, 0.0); n];
        Self {
            system,
            controls,
            k: [zero(), zero(), zero(), zero(), zero(), zero(), zero()],
            stage: zero(),
            y_new: zero(),
            h: None,
            err_old: 1e-4,
            fsal_valid: false,
            stats: StepStats::default(),
        }
    }

    pub fn stats(&self) -> StepStats {
        self.stats
    }

    /// Last proposed step size, if any step has been attempted.
    pub fn step_size(&self) -> Option<f64> {
        self.h
    }

    /// Advance `y` from `*t` to exactly `t_end`.
    pub fn advance(&mut self, t: &mut f64, y: &mut [C64], t_end: f64) -> Result<()> {
        assert_eq!(y.len(), self.system.len());
        if t_end < *t {
            return Err(Error::IntegrationFailure {
                time: *t,
                reason: format!("requested time {t_end:e} lies in the past"),
            });
        }
        if t_end == *t {
            return Ok(());
        }
        let span = t_end - *t;
        if !self.fsal_valid {
            self.system.derivative(*t, y, &mut self.k[0]);
            self.stats.evaluations += 1;
            self.fsal_valid = true;
        }
        let mut h = match self.h {
            Some(h) => h,
            None => self.initial_step(*t, y, span),
        };
        let steps_at_entry = self.stats.accepted + self.stats.rejected;
        loop {
            if let Some(max) = self.controls.max_step {
                h = h.min(max);
            }
            let remaining = t_end - *t;
            let last = h >= remaining * (1.0 - 1e-12);
            let h_try = if last { remaining } else { h };
            let h_min = (16.0 * f64::EPSILON * t.abs()).max(1e-14 * span);
            if h_try < h_min && !last {
                return Err(Error::Stiffness { time: *t, step: h_try });
            }
            if self.stats.accepted + self.stats.rejected - steps_at_entry >= self.controls.max_steps {
                return Err(Error::Stiffness { time: *t, step: h_try });
            }

            let err = self.attempt(*t, y, h_try);
            if !err.is_finite() {
                return Err(Error::IntegrationFailure {
                    time: *t,
                    reason: "non-finite error estimate".into(),
                });
            }
            if err <= 1.0 {
                self.stats.accepted += 1;
                let fac11 = err.powf(0.2 - 0.75 * BETA);
                let fac = (fac11 / self.err_old.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                self.err_old = err.max(1e-4);
                y.copy_from_slice(&self.y_new);
                self.k.swap(0, 6);
                let h_next = h_try / fac;
                if last {
                    *t = t_end;
                    // a clipped final step says little about the natural step
                    self.h = Some(if h_try < h { h.max(h_next) } else { h_next });
                    return Ok(());
                }
                *t += h_try;
                h = h_next;
            } else {
                self.stats.rejected += 1;
                let fac11 = err.powf(0.2 - 0.75 * BETA);
                h = h_try / (fac11 / SAFETY).min(1.0 / FAC_MIN);
            }
        }
    }

    /// One trial step; leaves the candidate in `y_new`, the new derivative
    /// in `k[6]`, and returns the scaled RMS error.
    fn attempt(&mut self, t: f64, y: &[C64], h: f64) -> f64 {
        let sys = self.system;
        let [k1, k2, k3, k4, k5, k6, k7] = &mut self.k;
        let stage = &mut self.stage;

        for i in 0..y.len() {
            stage[i] = y[i] + k1[i] * (h * A21);
        }
        sys.derivative(t + C2 * h, stage, k2);
        for i in 0..y.len() {
            stage[i] = y[i] + (k1[i] * A31 + k2[i] * A32) * h;
        }
        sys.derivative(t + C3 * h, stage, k3);
        for i in 0..y.len() {
            stage[i] = y[i] + (k1[i] * A41 + k2[i] * A42 + k3[i] * A43) * h;
        }
        sys.derivative(t + C4 * h, stage, k4);
        for i in 0..y.len() {
            stage[i] = y[i] + (k1[i] * A51 + k2[i] * A52 + k3[i] * A53 + k4[i] * A54) * h;
        }
        sys.derivative(t + C5 * h, stage, k5);
        for i in 0..y.len() {
            stage[i] = y[i]
                + (k1[i] * A61 + k2[i] * A62 + k3[i] * A63 + k4[i] * A64 + k5[i] * A65) * h;
        }
        sys.derivative(t + h, stage, k6);
        let y_new = &mut self.y_new;
        for i in 0..y.len() {
            y_new[i] = y[i] + (k1[i] * B1 + k3[i] * B3 + k4[i] * B4 + k5[i] * B5 + k6[i] * B6) * h;
        }
        sys.derivative(t + h, y_new, k7);
        self.stats.evaluations += 6;

        let mut acc = 0.0;
        for i in 0..y.len() {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
            let sc = self.controls.atol + self.controls.rtol * y[i].norm_sqr().max(y_new[i].norm_sqr()).sqrt();
            acc += e.norm_sqr() / (sc * sc);
        }
        (acc / y.len() as f64).sqrt()
    }

    /// Hairer's starting-step heuristic.
    fn initial_step(&mut self, t: f64, y: &[C64], span: f64) -> f64 {
        let (rtol, atol) = (self.controls.rtol, self.controls.atol);
        let n = y.len() as f64;
        let mut d0 = 0.0;
        let mut d1 = 0.0;
        for i in 0..y.len() {
            let sc = atol + rtol * y[i].norm();
            d0 += y[i].norm_sqr() / (sc * sc);
            d1 += self.k[0][i].norm_sqr() / (sc * sc);
        }
        let (d0, d1) = ((d0 / n).sqrt(), (d1 / n).sqrt());
        let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * span } else { 0.01 * d0 / d1 };
        h0 = h0.min(span);
        if let Some(max) = self.controls.max_step {
            h0 = h0.min(max);
        }
        for i in 0..y.len() {
            self.stage[i] = y[i] + self.k[0][i] * h0;
        }
        let [_, k2, ..] = &mut self.k;
        self.system.derivative(t + h0, &self.stage, k2);
        self.stats.evaluations += 1;
        let mut d2 = 0.0;
        for i in 0..y.len() {
            let sc = atol + rtol * y[i].norm();
            d2 += (self.k[1][i] - self.k[0][i]).norm_sqr() / (sc * sc);
        }
        let d2 = (d2 / n).sqrt() / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6 * span)
        } else {
            (0.01 / d1.max(d2)).powf(0.2)
        };
        (100.0 * h0).min(h1).min(span)
    }
}
