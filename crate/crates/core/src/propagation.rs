//! Field propagation through the prepared medium.
//!
//! In retarded time and with lengths measured by `Z = ξτ₁/2π`, the three
//! propagating envelopes obey
//!
//! ```text
//! dg₁/dZ = -2πi K₁ (r_gm + a r_mn)
//! dg₂/dZ = -2πi K₂ r_ln
//! dg₋/dZ = -2πi K₋ r_gl
//! ```
//!
//! with the coherences taken from [`algebraic_coherences`] after solving the
//! reduced atom at every depth. The Stark field does not deplete.
//!
//! The march is classical RK4 in `Z` with step-doubling error control.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{photon_weights, ConversionMetrics};
use crate::model::{MediumSpec, MixingMode, OnePhotonFields, TwoLevelState};
use crate::multilevel::{algebraic_coherences_unchecked, DetuningSet};
use crate::pulse::PulseSpec;
use crate::twolevel::{evolve_with, fmt, EnvelopeDrive, TimeGrid};

pub const PROPAGATION_SAMPLES: usize = 512;

/// Complex envelopes of the propagating fields on the retarded-time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSlice {
    pub grid: TimeGrid,
    pub g1: Vec<Complex64>,
    pub g2: Vec<Complex64>,
    pub gmix: Vec<Complex64>,
}

impl FieldSlice {
    /// Samples one-photon envelopes of the three pulses on `grid`.
    pub fn from_pulses(grid: TimeGrid, pump: &PulseSpec, probe: &PulseSpec, generated: &PulseSpec) -> Self {
        let ts = grid.times();
        let s = |p: &PulseSpec| ts.iter().map(|&t| Complex64::new(p.envelope(t), 0.0)).collect();
        FieldSlice { grid, g1: s(pump), g2: s(probe), gmix: s(generated) }
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.validate()?;
        let n = self.grid.n_samples;
        if self.g1.len() != n || self.g2.len() != n || self.gmix.len() != n {
            return Err(Error::Config(format!(
                "field slice lengths {}/{}/{} do not match {} grid samples",
                self.g1.len(),
                self.g2.len(),
                self.gmix.len(),
                n
            )));
        }
        self.check_finite(0.0)
    }

    fn check_finite(&self, depth: f64) -> Result<()> {
        for k in 0..self.g1.len() {
            let ok = |x: Complex64| x.re.is_finite() && x.im.is_finite();
            if !(ok(self.g1[k]) && ok(self.g2[k]) && ok(self.gmix[k])) {
                return Err(Error::NonFiniteField { depth, time_index: k });
            }
        }
        Ok(())
    }

    /// Linear interpolation of the envelopes at time `t`.
    pub fn at(&self, t: f64) -> (Complex64, Complex64, Complex64) {
        let n = self.g1.len();
        let x = ((t - self.grid.t_start) / self.grid.dt()).clamp(0.0, (n - 1) as f64);
        let k = (x.floor() as usize).min(n - 2);
        let f = x - k as f64;
        let lerp = |v: &[Complex64]| v[k] * (1.0 - f) + v[k + 1] * f;
        (lerp(&self.g1), lerp(&self.g2), lerp(&self.gmix))
    }

    fn fields(&self) -> [&[Complex64]; 3] {
        [&self.g1, &self.g2, &self.gmix]
    }

    fn combine(&self, terms: &[(f64, &[Vec<Complex64>; 3])]) -> FieldSlice {
        let mut out = self.clone();
        for (c, d) in terms {
            for (dst, src) in [&mut out.g1, &mut out.g2, &mut out.gmix].into_iter().zip(d.iter()) {
                dst.iter_mut().zip(src).for_each(|(y, s)| *y += *c * s);
            }
        }
        out
    }
}

/// Step control of the depth march.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepControl {
    /// Relative local error per step, judged by step doubling.
    pub rtol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    /// Tolerance of every atomic re-solve.
    pub atom_tol: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl { rtol: 1e-6, h_init: 100.0, h_min: 1e-6, h_max: f64::INFINITY, atom_tol: 1e-7, max_steps: 100_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropagationSetup {
    pub medium: MediumSpec,
    /// Static two-photon detuning (angular).
    pub delta: f64,
    /// Non-depleting Stark field, one-photon envelope.
    pub stark: PulseSpec,
    pub z_end: f64,
    /// Depths to record besides `0` and `z_end`.
    #[serde(default)]
    pub snapshots: Vec<f64>,
    #[serde(default)]
    pub control: StepControl,
}

/// Atomic response at one recorded depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomSnapshot {
    pub rn: Vec<f64>,
    pub rgn_abs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropagationRecord {
    pub xi_samples: Vec<f64>,
    pub slices: Vec<FieldSlice>,
    /// `None` where the probe entry energy vanishes.
    pub metrics: Vec<Option<ConversionMetrics>>,
    pub atoms: Vec<AtomSnapshot>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl PropagationRecord {
    pub fn entry(&self) -> &FieldSlice {
        &self.slices[0]
    }

    pub fn exit(&self) -> &FieldSlice {
        self.slices.last().expect("record holds the entry slice")
    }
}

/// Right-hand sides of the propagation equations at one instant.
pub fn source_terms(
    fields: &OnePhotonFields,
    st: &TwoLevelState,
    m: &MediumSpec,
) -> Result<(Complex64, Complex64, Complex64)> {
    m.validate()?;
    Ok(source_terms_unchecked(fields, st, m, &near_resonance(m)))
}

fn near_resonance(m: &MediumSpec) -> DetuningSet {
    DetuningSet::new(0.0, m.det_gm, m.det_ln, m.det_nf)
}

fn source_terms_unchecked(
    f: &OnePhotonFields,
    st: &TwoLevelState,
    m: &MediumSpec,
    det: &DetuningSet,
) -> (Complex64, Complex64, Complex64) {
    let c = algebraic_coherences_unchecked(st, f, det, m.a, m.mixing_mode);
    let mi = Complex64::new(0.0, -1.0);
    (mi * m.k1 * (c.r_gm + m.a * c.r_mn), mi * m.k2 * c.r_ln, mi * m.k_mix * c.r_gl)
}

struct Stepper<'a> {
    setup: &'a PropagationSetup,
    det: DetuningSet,
    times: Vec<f64>,
    gst: Vec<Complex64>,
}

impl Stepper<'_> {
    fn atom(&self, s: &FieldSlice) -> Result<Vec<TwoLevelState>> {
        let stark = &self.setup.stark;
        let drive = EnvelopeDrive {
            medium: &self.setup.medium,
            delta: self.setup.delta,
            fields: |t: f64| {
                let (g1, g2, gmix) = s.at(t);
                OnePhotonFields { g1, g2, gmix, gst: Complex64::new(stark.envelope(t), 0.0) }
            },
        };
        Ok(evolve_with(&drive, &s.grid, self.setup.control.atom_tol)?.states)
    }

    fn derivative(&self, s: &FieldSlice, depth: f64) -> Result<[Vec<Complex64>; 3]> {
        s.check_finite(depth)?;
        let states = self.atom(s)?;
        let two_pi = 2.0 * std::f64::consts::PI;
        let n = self.times.len();
        let mut d = [vec![Complex64::default(); n], vec![Complex64::default(); n], vec![Complex64::default(); n]];
        for k in 0..n {
            let f = OnePhotonFields { g1: s.g1[k], g2: s.g2[k], gmix: s.gmix[k], gst: self.gst[k] };
            let (s1, s2, sm) = source_terms_unchecked(&f, &states[k], &self.setup.medium, &self.det);
            d[0][k] = two_pi * s1;
            d[1][k] = two_pi * s2;
            d[2][k] = two_pi * sm;
        }
        Ok(d)
    }

    fn rk4(&self, y: &FieldSlice, z: f64, h: f64, k1: &[Vec<Complex64>; 3]) -> Result<FieldSlice> {
        let k2 = self.derivative(&y.combine(&[(0.5 * h, k1)]), z + 0.5 * h)?;
        let k3 = self.derivative(&y.combine(&[(0.5 * h, &k2)]), z + 0.5 * h)?;
        let k4 = self.derivative(&y.combine(&[(h, &k3)]), z + h)?;
        Ok(y.combine(&[(h / 6.0, k1), (h / 3.0, &k2), (h / 3.0, &k3), (h / 6.0, &k4)]))
    }
}

fn l2(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Marches `entry` through the medium to `setup.z_end`.
pub fn propagate(entry: &FieldSlice, setup: &PropagationSetup) -> Result<PropagationRecord> {
    entry.validate()?;
    setup.medium.validate()?;
    setup.stark.validate()?;
    let ctrl = &setup.control;
    if !(setup.z_end >= 0.0 && setup.z_end.is_finite()) {
        return Err(Error::Config(format!("z_end must be finite and nonnegative, got {}", setup.z_end)));
    }
    if !(ctrl.rtol > 0.0 && ctrl.h_init > 0.0 && ctrl.h_min > 0.0 && ctrl.h_max > 0.0) {
        return Err(Error::Config("step control values must be positive".into()));
    }
    if let Some(z) = setup.snapshots.iter().find(|z| !(**z >= 0.0 && **z <= setup.z_end)) {
        return Err(Error::Config(format!("snapshot depth {z} lies outside [0, {}]", setup.z_end)));
    }
    let w = photon_weights(&setup.medium)?;

    let mut targets: Vec<f64> = setup.snapshots.iter().copied().filter(|&z| z > 0.0).collect();
    targets.push(setup.z_end);
    targets.sort_by(f64::total_cmp);
    targets.dedup();
    targets.retain(|&z| z > 0.0);

    let times = entry.grid.times();
    let gst = times.iter().map(|&t| Complex64::new(setup.stark.envelope(t), 0.0)).collect();
    let stepper = Stepper { setup, det: near_resonance(&setup.medium), times, gst };

    // per-field error floors: the probe scale, carried to the generated
    // wave by its photon weight
    let probe_ref = l2(&entry.g2);
    let floors = [l2(&entry.g1), probe_ref, probe_ref / w.gmix.sqrt()];

    let record_at = |s: &FieldSlice| -> Result<(Option<ConversionMetrics>, AtomSnapshot)> {
        let states = stepper.atom(s)?;
        let metrics =
            if l2(&entry.g2) > 0.0 { Some(ConversionMetrics::compute(s, entry, &setup.medium)?) } else { None };
        Ok((
            metrics,
            AtomSnapshot {
                rn: states.iter().map(|x| x.rn).collect(),
                rgn_abs: states.iter().map(|x| x.rgn.norm()).collect(),
            },
        ))
    };

    let (m0, a0) = record_at(entry)?;
    let mut rec = PropagationRecord {
        xi_samples: vec![0.0],
        slices: vec![entry.clone()],
        metrics: vec![m0],
        atoms: vec![a0],
        accepted_steps: 0,
        rejected_steps: 0,
    };

    let mut y = entry.clone();
    let mut z = 0.0;
    let mut h = ctrl.h_init.min(ctrl.h_max);
    let mut k1: Option<[Vec<Complex64>; 3]> = None;
    for &target in &targets {
        while z < target {
            if rec.accepted_steps + rec.rejected_steps >= ctrl.max_steps {
                return Err(Error::StepUnderflow {
                    time: z,
                    step: h,
                    detail: Some(format!("depth march exceeded {} steps", ctrl.max_steps)),
                });
            }
            let remaining = target - z;
            let clipped = h >= remaining;
            let step = if clipped { remaining } else { h };
            if step < ctrl.h_min && !clipped {
                return Err(Error::StepUnderflow { time: z, step, detail: Some("depth step below h_min".into()) });
            }
            let d0 = match k1.take() {
                Some(d) => d,
                None => stepper.derivative(&y, z)?,
            };
            let big = stepper.rk4(&y, z, step, &d0)?;
            let mid = stepper.rk4(&y, z, 0.5 * step, &d0)?;
            let dmid = stepper.derivative(&mid, z + 0.5 * step)?;
            let fine = stepper.rk4(&mid, z + 0.5 * step, 0.5 * step, &dmid)?;

            let mut err: f64 = 0.0;
            for ((b, f), floor) in big.fields().iter().zip(fine.fields()).zip(floors) {
                let diff: f64 = b.iter().zip(f.iter()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt() / 15.0;
                if diff > 0.0 {
                    let scale = ctrl.rtol * l2(f).max(floor);
                    err = err.max(if scale > 0.0 { diff / scale } else { f64::INFINITY });
                }
            }
            if !err.is_finite() && err != f64::INFINITY {
                return Err(Error::NonFinite { time: z });
            }
            let factor = if err == 0.0 { 4.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 4.0) };
            if err <= 1.0 {
                fine.check_finite(z + step)?;
                y = fine;
                z = if clipped { target } else { z + step };
                rec.accepted_steps += 1;
                let grown = (step * factor).min(ctrl.h_max);
                h = if clipped { h.max(grown).min(ctrl.h_max) } else { grown };
            } else {
                rec.rejected_steps += 1;
                k1 = Some(d0);
                h = step * factor;
                if h < ctrl.h_min {
                    return Err(Error::StepUnderflow {
                        time: z,
                        step: h,
                        detail: Some("depth step below h_min".into()),
                    });
                }
            }
        }
        let (m, a) = record_at(&y)?;
        rec.xi_samples.push(target);
        rec.slices.push(y.clone());
        rec.metrics.push(m);
        rec.atoms.push(a);
    }
    Ok(rec)
}

pub const SNAPSHOT_CSV_HEADER: &str = "T,|g1|^2,|g2|^2,|gmix|^2,r_n,|r_gn|";

pub fn write_snapshot_csv<W: Write>(mut w: W, slice: &FieldSlice, atom: &AtomSnapshot) -> std::io::Result<()> {
    writeln!(w, "{SNAPSHOT_CSV_HEADER}")?;
    for k in 0..slice.g1.len() {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            fmt(slice.grid.time(k)),
            fmt(slice.g1[k].norm_sqr()),
            fmt(slice.g2[k].norm_sqr()),
            fmt(slice.gmix[k].norm_sqr()),
            fmt(atom.rn[k]),
            fmt(atom.rgn_abs[k])
        )?;
    }
    Ok(())
}

/// Run-level summary of a propagation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropagationManifest {
    pub preset: Option<String>,
    pub mode: MixingMode,
    #[serde(rename = "Z")]
    pub z: Vec<f64>,
    pub metrics: Vec<Option<ConversionMetrics>>,
}

impl PropagationManifest {
    pub fn new(preset: Option<String>, mode: MixingMode, rec: &PropagationRecord) -> Self {
        PropagationManifest { preset, mode, z: rec.xi_samples.clone(), metrics: rec.metrics.clone() }
    }
}
