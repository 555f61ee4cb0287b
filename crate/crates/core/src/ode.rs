//! Dormand–Prince 5(4) embedded Runge–Kutta integrator with proportional-integral
//! step-size control, specialised to fixed-size state arrays.

use crate::error::{Error, Result};
use crate::real::Real;

/// Step-control parameters.
#[derive(Debug, Clone, Copy)]
pub struct StepControl<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_step: T,
    pub max_steps: usize,
}

/// What the observer wants after an accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observe {
    Continue,
    /// The observer changed the state in place; the cached derivative is stale.
    Modified,
    Stop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Finish {
    Completed,
    Stopped,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Outcome<T, const N: usize> {
    pub finish: Finish,
    pub t: T,
    pub y: [T; N],
    pub stats: Stats,
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// fifth-order weights minus fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const MAX_RHS_RETRIES: usize = 40;

fn axpy<T: Real, const N: usize>(y: &[T; N], h: T, terms: &[(T, &[T; N])]) -> [T; N] {
    let mut out = *y;
    for (n, o) in out.iter_mut().enumerate() {
        let mut acc = T::zero();
        for (w, k) in terms {
            acc = acc + *w * k[n];
        }
        *o = *o + h * acc;
    }
    out
}

fn weighted_rms<T: Real, const N: usize>(v: &[T; N], y0: &[T; N], y1: &[T; N], ctl: &StepControl<T>) -> T {
    let mut acc = T::zero();
    for n in 0..N {
        let sc = ctl.abs_tol + ctl.rel_tol * y0[n].abs().max(y1[n].abs());
        let r = v[n] / sc;
        acc = acc + r * r;
    }
    (acc / T::lit(N as f64)).sqrt()
}

fn initial_step<T: Real, const N: usize, F>(
    f: &mut F,
    t0: T,
    y0: &[T; N],
    f0: &[T; N],
    ctl: &StepControl<T>,
    stats: &mut Stats,
) -> T
where
    F: FnMut(T, &[T; N]) -> Result<[T; N]>,
{
    let d0 = weighted_rms(y0, y0, y0, ctl);
    let d1 = weighted_rms(f0, y0, y0, ctl);
    let small = T::lit(1e-5);
    let h0 = if d0 < small || d1 < small {
        T::lit(1e-6)
    } else {
        T::lit(0.01) * d0 / d1
    }
    .min(ctl.max_step);
    let y1 = axpy(y0, h0, &[(T::one(), f0)]);
    stats.evaluations += 1;
    let d2 = match f(t0 + h0, &y1) {
        Ok(f1) => {
            let diff: [T; N] = std::array::from_fn(|n| f1[n] - f0[n]);
            weighted_rms(&diff, y0, y0, ctl) / h0
        }
        Err(_) => return h0,
    };
    let dm = d1.max(d2);
    let h1 = if dm <= T::lit(1e-15) {
        (h0 * T::lit(1e-3)).max(T::lit(1e-6))
    } else {
        (T::lit(0.01) / dm).powf(T::lit(0.2))
    };
    (T::lit(100.0) * h0).min(h1).min(ctl.max_step)
}

/// Integrates `dy/dt = f(t, y)` from `t0` to `t_end > t0`.
///
/// When `sample_interval` is set, steps are clipped so that the integrator
/// lands exactly on `t0 + k * sample_interval`; the observer receives
/// `at_sample = true` on those steps. Otherwise every accepted step is a sample.
/// The observer may edit the state in place (returning [`Observe::Modified`]).
/// A failing right-hand side is treated like a rejected step.
pub fn integrate<T, const N: usize, F, O>(
    mut f: F,
    t0: T,
    y0: [T; N],
    t_end: T,
    ctl: &StepControl<T>,
    sample_interval: Option<T>,
    mut observer: O,
) -> Result<Outcome<T, N>>
where
    T: Real,
    F: FnMut(T, &[T; N]) -> Result<[T; N]>,
    O: FnMut(T, &mut [T; N], bool) -> Observe,
{
    if !(t_end > t0) {
        return Err(Error::DomainError("t_end must exceed the initial time".into()));
    }
    if !(ctl.rel_tol > T::zero() && ctl.abs_tol > T::zero() && ctl.max_step > T::zero()) {
        return Err(Error::DomainError("tolerances and max_step must be positive".into()));
    }
    if let Some(dt) = sample_interval {
        if !(dt > T::zero()) {
            return Err(Error::DomainError("sample interval must be positive".into()));
        }
    }

    let mut stats = Stats::default();
    let mut t = t0;
    let mut y = y0;
    stats.evaluations += 1;
    let mut k1 = f(t, &y)?;
    let mut h = initial_step(&mut f, t, &y, &k1, ctl, &mut stats);
    let mut fac_old = T::lit(1e-4);
    let mut last_rejected = false;
    let mut rhs_failures = 0usize;
    let mut next_sample = 1usize;
    let expo = T::lit(0.2 - BETA * 0.75);
    let eps = T::epsilon();

    loop {
        if stats.accepted + stats.rejected >= ctl.max_steps {
            return Err(Error::StepFailure {
                t: t.as_f64(),
                step: h.as_f64(),
            });
        }
        // target of this step: the next sample time or t_end
        let target = match sample_interval {
            Some(dt) => (t0 + dt * T::lit(next_sample as f64)).min(t_end),
            None => t_end,
        };
        h = h.min(ctl.max_step);
        let mut landing = false;
        if t + h * T::lit(1.0001) >= target {
            h = target - t;
            landing = true;
        }
        if h <= T::lit(16.0) * eps * t.abs().max(T::one()) {
            return Err(Error::StepFailure {
                t: t.as_f64(),
                step: h.as_f64(),
            });
        }

        let stages = (|| -> Result<([T; N], [T; N], [T; N])> {
            let c = |i: usize| T::lit(C[i]);
            let a = |i: usize, j: usize| T::lit(A[i][j]);
            let y2 = axpy(&y, h, &[(a(1, 0), &k1)]);
            let k2 = f(t + c(1) * h, &y2)?;
            let y3 = axpy(&y, h, &[(a(2, 0), &k1), (a(2, 1), &k2)]);
            let k3 = f(t + c(2) * h, &y3)?;
            let y4 = axpy(&y, h, &[(a(3, 0), &k1), (a(3, 1), &k2), (a(3, 2), &k3)]);
            let k4 = f(t + c(3) * h, &y4)?;
            let y5 = axpy(
                &y,
                h,
                &[(a(4, 0), &k1), (a(4, 1), &k2), (a(4, 2), &k3), (a(4, 3), &k4)],
            );
            let k5 = f(t + c(4) * h, &y5)?;
            let y6 = axpy(
                &y,
                h,
                &[
                    (a(5, 0), &k1),
                    (a(5, 1), &k2),
                    (a(5, 2), &k3),
                    (a(5, 3), &k4),
                    (a(5, 4), &k5),
                ],
            );
            let k6 = f(t + h, &y6)?;
            let y_new = axpy(
                &y,
                h,
                &[
                    (a(6, 0), &k1),
                    (a(6, 2), &k3),
                    (a(6, 3), &k4),
                    (a(6, 4), &k5),
                    (a(6, 5), &k6),
                ],
            );
            let k7 = f(t + h, &y_new)?;
            let e = |i: usize| T::lit(E[i]);
            let err_vec: [T; N] = std::array::from_fn(|n| {
                h * (e(0) * k1[n] + e(2) * k3[n] + e(3) * k4[n] + e(4) * k5[n] + e(5) * k6[n]
                    + e(6) * k7[n])
            });
            Ok((y_new, k7, err_vec))
        })();
        stats.evaluations += 6;

        let (y_new, k7, err_vec) = match stages {
            Ok(v) => {
                rhs_failures = 0;
                v
            }
            Err(e) => {
                rhs_failures += 1;
                stats.rejected += 1;
                if rhs_failures > MAX_RHS_RETRIES {
                    return Err(e);
                }
                h = h * T::lit(0.25);
                last_rejected = true;
                continue;
            }
        };

        let err = weighted_rms(&err_vec, &y, &y_new, ctl);
        if !err.is_finite() {
            stats.rejected += 1;
            h = h * T::lit(0.25);
            last_rejected = true;
            continue;
        }
        let fac11 = err.powf(expo);
        let fac = (fac11 / fac_old.powf(T::lit(BETA)) / T::lit(SAFETY))
            .min(T::lit(1.0 / FAC_MIN))
            .max(T::lit(1.0 / FAC_MAX));
        let mut h_new = h / fac;

        if err <= T::one() {
            fac_old = err.max(T::lit(1e-4));
            stats.accepted += 1;
            if last_rejected {
                h_new = h_new.min(h);
            }
            last_rejected = false;
            t = if landing { target } else { t + h };
            y = y_new;
            k1 = k7;
            let at_sample = match sample_interval {
                Some(_) => {
                    if landing && target < t_end {
                        next_sample += 1;
                        true
                    } else {
                        landing
                    }
                }
                None => true,
            };
            match observer(t, &mut y, at_sample) {
                Observe::Continue => {}
                Observe::Modified => {
                    stats.evaluations += 1;
                    k1 = f(t, &y)?;
                }
                Observe::Stop => {
                    return Ok(Outcome {
                        finish: Finish::Stopped,
                        t,
                        y,
                        stats,
                    })
                }
            }
            if landing && t >= t_end {
                return Ok(Outcome {
                    finish: Finish::Completed,
                    t,
                    y,
                    stats,
                });
            }
            // a landing step was artificially short; do not let it shrink the next one
            h = if landing { h_new.max(h) } else { h_new };
        } else {
            stats.rejected += 1;
            last_rejected = true;
            h = h / (fac11 / T::lit(SAFETY)).min(T::lit(1.0 / FAC_MIN));
        }
    }
}
