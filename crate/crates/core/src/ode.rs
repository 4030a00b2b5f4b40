//! Dormand–Prince 5(4) integrator with step-size control.
//!
//! States are fixed-size real arrays; complex components are packed as
//! consecutive (re, im) pairs by the callers. Output is produced exactly at
//! the requested sample times: the step is clipped so that every sample is a
//! step boundary, which also keeps piecewise-linear drive inputs from
//! straddling a kink inside one step.

use crate::error::{Error, Result};

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

// difference between the 5th and 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Step ceiling; `f64::INFINITY` for none.
    pub h_max: f64,
    pub max_steps: usize,
}

impl OdeOptions {
    pub fn new(rtol: f64, atol: f64) -> Self {
        OdeOptions { rtol, atol, h_max: f64::INFINITY, max_steps: 50_000_000 }
    }

    pub fn with_h_max(mut self, h_max: f64) -> Self {
        self.h_max = h_max;
        self
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        if *c == 0.0 {
            continue;
        }
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

fn all_finite<const N: usize>(v: &[f64; N]) -> bool {
    v.iter().all(|x| x.is_finite())
}

/// Integrates `dy/dt = f(t, y)` from `times[0]` with `y(times[0]) = y0` and
/// returns the state at every entry of `times` (which must be strictly
/// increasing). The first returned element is `y0`.
pub fn integrate<const N: usize, F>(
    mut f: F,
    y0: [f64; N],
    times: &[f64],
    opts: &OdeOptions,
) -> Result<(Vec<[f64; N]>, OdeStats)>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    let mut out = Vec::with_capacity(times.len());
    let mut stats = OdeStats::default();
    if times.is_empty() {
        return Ok((out, stats));
    }
    out.push(y0);
    if times.len() == 1 {
        return Ok((out, stats));
    }

    let mut t = times[0];
    let mut y = y0;
    let mut k1 = f(t, &y);
    stats.evaluations += 1;
    if !all_finite(&k1) {
        return Err(Error::NonFinite { time: t });
    }

    let span = times[times.len() - 1] - times[0];
    let mut h = (span / 100.0).min(opts.h_max).min(times[1] - times[0]);
    let mut steps = 0usize;

    for &target in &times[1..] {
        while t < target {
            let remaining = target - t;
            let clipped = h >= remaining;
            let step = if clipped { remaining } else { h };
            if step <= 1e-14 * t.abs().max(1.0) && !clipped {
                return Err(Error::StepUnderflow { time: t, step, detail: None });
            }
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::StepUnderflow {
                    time: t,
                    step,
                    detail: Some(format!("exceeded {} steps", opts.max_steps)),
                });
            }

            let k2 = f(t + C2 * step, &axpy(&y, step, &[(A21, &k1)]));
            let k3 = f(t + C3 * step, &axpy(&y, step, &[(A31, &k1), (A32, &k2)]));
            let k4 = f(t + C4 * step, &axpy(&y, step, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = f(t + C5 * step, &axpy(&y, step, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
            let k6 = f(t + step, &axpy(&y, step, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
            let y_new = axpy(&y, step, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            let t_new = if clipped { target } else { t + step };
            let k7 = f(t_new, &y_new);
            stats.evaluations += 6;

            if ![&k2, &k3, &k4, &k5, &k6, &k7].iter().all(|k| all_finite(k)) || !all_finite(&y_new) {
                return Err(Error::NonFinite { time: t });
            }

            let mut err = 0.0;
            for i in 0..N {
                let e = step * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
                err += (e / sc) * (e / sc);
            }
            let err = (err / N as f64).sqrt();

            if err <= 1.0 {
                stats.accepted += 1;
                t = t_new;
                y = y_new;
                k1 = k7;
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                // a clipped step says nothing about how large the next one may be
                let grown = step * fac;
                h = if clipped { h.max(grown) } else { grown };
                h = h.min(opts.h_max);
            } else {
                stats.rejected += 1;
                h = step * (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            }
        }
        out.push(y);
    }
    Ok((out, stats))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let times: Vec<f64> = (0..=10).map(|i| i as f64 * 0.5).collect();
        let (ys, _) = integrate(|_, y: &[f64; 1]| [-y[0]], [1.0], &times, &OdeOptions::new(1e-10, 1e-12)).unwrap();
        for (t, y) in times.iter().zip(&ys) {
            assert!((y[0] - (-t).exp()).abs() < 1e-9, "t={t}");
        }
    }

    #[test]
    fn harmonic_oscillator_many_periods() {
        let w = 7.0;
        let times: Vec<f64> = (0..=200).map(|i| i as f64 * 0.1).collect();
        let (ys, _) =
            integrate(|_, y: &[f64; 2]| [y[1], -w * w * y[0]], [1.0, 0.0], &times, &OdeOptions::new(1e-11, 1e-13))
                .unwrap();
        for (t, y) in times.iter().zip(&ys) {
            assert!((y[0] - (w * t).cos()).abs() < 1e-8, "t={t}: {}", y[0]);
        }
    }

    #[test]
    fn error_shrinks_with_tolerance() {
        let times = [0.0, 3.0];
        let err = |tol: f64| {
            let (ys, _) =
                integrate(|t, y: &[f64; 1]| [y[0] * t.cos()], [1.0], &times, &OdeOptions::new(tol, tol * 1e-2))
                    .unwrap();
            (ys[1][0] - 3.0f64.sin().exp()).abs()
        };
        assert!(err(1e-10) < err(1e-6));
        assert!(err(1e-10) < 1e-8);
    }

    #[test]
    fn respects_step_ceiling() {
        let times = [0.0, 1.0];
        let (_, stats) =
            integrate(|_, _y: &[f64; 1]| [0.0], [0.0], &times, &OdeOptions::new(1e-6, 1e-8).with_h_max(0.01)).unwrap();
        assert!(stats.accepted >= 100);
    }

    #[test]
    fn non_finite_derivative_is_reported_with_time() {
        let times = [0.0, 2.0];
        let r = integrate(
            |t, y: &[f64; 1]| if t > 1.0 { [f64::NAN] } else { [y[0]] },
            [1.0],
            &times,
            &OdeOptions::new(1e-8, 1e-10),
        );
        match r {
            Err(Error::NonFinite { time }) => assert!(time <= 1.0 && time > 0.5, "{time}"),
            other => panic!("{other:?}"),
        }
    }
}
