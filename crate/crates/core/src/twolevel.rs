//! Reduced two-level dynamics.
//!
//! With the far-detuned intermediate coherences eliminated, the ladder
//! reduces to a driven two-level system for the upper population `r_n` and
//! the two-photon coherence `r_gn`:
//!
//! ```text
//! dr_n/dt  = Im[(r₁ + r₂)* r_gn]
//! dr_gn/dt = -i (Ω_St - Ω_gn) r_gn - i (r₁ + r₂)(r_n - 1/2)
//! ```
//!
//! Starting from the ground state the evolution is pure, so
//! `|r_gn|² = r_n (1 - r_n)` holds along every trajectory; maximum coherence
//! `|r_gn| = 1/2` is reached exactly when the populations are equal.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{two_photon_quantities_unchecked, DriveConfig, MediumSpec, OnePhotonFields, TwoLevelState};
use crate::ode::{integrate, OdeOptions, OdeStats};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_WINDOW: (f64, f64) = (-6.0, 12.0);
pub const DEFAULT_SAMPLES: usize = 2001;

/// Uniform sampling of scaled time `T = t/τ₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub n_samples: usize,
}

impl Default for TimeGrid {
    fn default() -> Self {
        TimeGrid { t_start: DEFAULT_WINDOW.0, t_end: DEFAULT_WINDOW.1, n_samples: DEFAULT_SAMPLES }
    }
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, n_samples: usize) -> Result<Self> {
        let g = TimeGrid { t_start, t_end, n_samples };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_samples < 2 {
            return Err(Error::Config(format!("time grid needs at least 2 samples, got {}", self.n_samples)));
        }
        if !(self.t_start.is_finite() && self.t_end.is_finite() && self.t_start < self.t_end) {
            return Err(Error::Config(format!(
                "time grid needs t_start < t_end, got [{}, {}]",
                self.t_start, self.t_end
            )));
        }
        Ok(())
    }

    pub fn dt(&self) -> f64 {
        (self.t_end - self.t_start) / (self.n_samples - 1) as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        if k + 1 == self.n_samples {
            self.t_end
        } else {
            self.t_start + k as f64 * self.dt()
        }
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.n_samples).map(|k| self.time(k)).collect()
    }
}

/// Instantaneous drive seen by the reduced two-level atom.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DriveSample {
    /// Pump-only two-photon Rabi frequency `r₁`.
    pub r1: Complex64,
    /// Total coupling `r₁ + r₂`.
    pub coupling: Complex64,
    /// Laser-induced shift `Ω_St`.
    pub shift: f64,
}

/// Anything that can drive the reduced equations.
pub trait TwoPhotonDrive {
    /// Static two-photon detuning `Ω_gn τ₁`.
    fn delta(&self) -> f64;
    fn sample(&self, t: f64) -> DriveSample;
}

impl TwoPhotonDrive for DriveConfig {
    fn delta(&self) -> f64 {
        self.delta
    }

    fn sample(&self, t: f64) -> DriveSample {
        let (r1, coupling, shift) = DriveConfig::sample(self, t);
        DriveSample { r1: Complex64::new(r1, 0.0), coupling, shift }
    }
}

/// Drive assembled pointwise from one-photon envelopes through the medium's
/// two-photon algebra.
pub struct EnvelopeDrive<'a, F> {
    pub medium: &'a MediumSpec,
    pub delta: f64,
    pub fields: F,
}

impl<F: Fn(f64) -> OnePhotonFields> TwoPhotonDrive for EnvelopeDrive<'_, F> {
    fn delta(&self) -> f64 {
        self.delta
    }

    fn sample(&self, t: f64) -> DriveSample {
        let q = two_photon_quantities_unchecked(&(self.fields)(t), self.medium);
        DriveSample { r1: q.r1, coupling: q.coupling(), shift: q.total_shift() }
    }
}

/// Sampled `Ω_St(t)` and `|r₁(t)|` along a trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriveTrace {
    pub omega_st: Vec<f64>,
    pub r1_abs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub states: Vec<TwoLevelState>,
    pub drive_trace: Option<DriveTrace>,
    #[serde(skip)]
    pub stats: OdeStats,
}

pub const TRAJECTORY_CSV_HEADER: &str = "T,r_n,Re(r_gn),Im(r_gn),|r_gn|,Omega_St,r1_abs";

impl Trajectory {
    pub fn last(&self) -> &TwoLevelState {
        self.states.last().expect("trajectory is never empty")
    }

    pub fn final_rn(&self) -> f64 {
        self.last().rn
    }

    pub fn final_coherence(&self) -> f64 {
        self.last().rgn.norm()
    }

    pub fn max_purity_defect(&self) -> f64 {
        self.states.iter().map(TwoLevelState::purity_defect).fold(0.0, f64::max)
    }

    /// Writes the trajectory with the columns of [`TRAJECTORY_CSV_HEADER`].
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{TRAJECTORY_CSV_HEADER}")?;
        for (k, st) in self.states.iter().enumerate() {
            let (om, r1) = match &self.drive_trace {
                Some(d) => (d.omega_st[k], d.r1_abs[k]),
                None => (0.0, 0.0),
            };
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                fmt(self.grid.time(k)),
                fmt(st.rn),
                fmt(st.rgn.re),
                fmt(st.rgn.im),
                fmt(st.rgn.norm()),
                fmt(om),
                fmt(r1)
            )?;
        }
        Ok(())
    }
}

/// Fixed float formatting for every CSV artifact.
pub fn fmt(x: f64) -> String {
    format!("{x:.12e}")
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(Error::Config(format!("tolerance must lie in (0, 1e-3], got {tol}")));
    }
    Ok(())
}

/// Integrates the reduced equations for a [`DriveConfig`] from the ground state.
pub fn evolve(d: &DriveConfig, grid: &TimeGrid, tol: f64) -> Result<Trajectory> {
    d.validate()?;
    evolve_with(d, grid, tol)
}

/// Integrates the reduced equations under any drive, starting from the
/// ground state.
pub fn evolve_with<D: TwoPhotonDrive + ?Sized>(drive: &D, grid: &TimeGrid, tol: f64) -> Result<Trajectory> {
    grid.validate()?;
    check_tol(tol)?;
    let times = grid.times();
    let opts = OdeOptions::new(tol, tol * 1e-2);
    let (ys, stats) = integrate_two_level(drive, &times, &opts)?;
    let states: Vec<TwoLevelState> = ys.iter().map(|y| TwoLevelState::new(y[0], Complex64::new(y[1], y[2]))).collect();
    let (omega_st, r1_abs) = times
        .iter()
        .map(|&t| {
            let s = drive.sample(t);
            (s.shift, s.r1.norm())
        })
        .unzip();
    Ok(Trajectory { grid: *grid, states, drive_trace: Some(DriveTrace { omega_st, r1_abs }), stats })
}

pub(crate) fn integrate_two_level<D: TwoPhotonDrive + ?Sized>(
    drive: &D,
    times: &[f64],
    opts: &OdeOptions,
) -> Result<(Vec<[f64; 3]>, OdeStats)> {
    let delta = drive.delta();
    let rhs = |t: f64, y: &[f64; 3]| {
        let s = drive.sample(t);
        let rgn = Complex64::new(y[1], y[2]);
        let drn = (s.coupling.conj() * rgn).im;
        let i = Complex64::i();
        let drgn = -i * (s.shift - delta) * rgn - i * s.coupling * (y[0] - 0.5);
        [drn, drgn.re, drgn.im]
    };
    integrate(rhs, [0.0; 3], times, opts)
}

/// Closed-form solution for a constant real coupling `r` switched on at
/// `t = 0` with constant mismatch `omega = Ω_gn - Ω_St`:
/// `r_n = (r²/W²) sin²(Wt/2)` with `W = √(r² + Ω²)`.
pub fn analytic_rectangular(r: f64, omega: f64, t: f64) -> TwoLevelState {
    let w2 = r * r + omega * omega;
    if w2 == 0.0 {
        return TwoLevelState::GROUND;
    }
    let w = w2.sqrt();
    let th = w * t;
    let one_minus_cos = 2.0 * (0.5 * th).sin().powi(2);
    let rn = r * r / w2 * (0.5 * th).sin().powi(2);
    // in-phase part carries the mismatch, quadrature part the drive
    let re = -r * omega * one_minus_cos / (2.0 * w2);
    let im = r * th.sin() / (2.0 * w);
    TwoLevelState::new(rn, Complex64::new(re, im))
}

/// Instants at which a Gaussian Stark shift of peak `s` (width `width`,
/// centred at `delay`) equals the static detuning `delta`.
///
/// Returns `None` when the shift never reaches the detuning (|s| < |δ| or
/// opposite signs), including `delta = 0`, where a nonzero shift only
/// touches zero asymptotically.
pub fn crossing_times(s: f64, delta: f64, delay: f64, width: f64) -> Option<(f64, f64)> {
    if width <= 0.0 || delta == 0.0 {
        return None;
    }
    let ratio = s / delta;
    if ratio.is_nan() || ratio < 1.0 {
        return None;
    }
    let half = width * ratio.ln().sqrt();
    Some((delay - half, delay + half))
}

/// Static detuning that puts the first resonance crossing at `t = 0` for a
/// Stark pulse of peak `s` delayed by `delay`.
pub fn pi_half_detuning(s: f64, delay: f64, width: f64) -> f64 {
    s * (-(delay * delay) / (width * width)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Plateau {
    pub t_begin: f64,
    pub t_end: f64,
    pub level: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceStats {
    pub max_coh: f64,
    pub t_of_max: f64,
    pub final_coh: f64,
    pub final_rn: f64,
    pub plateau: Option<Plateau>,
}

/// Plateau detection settings: relative band around the local mean and the
/// minimum duration (in `τ₁`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateauBand {
    pub relative: f64,
    pub min_length: f64,
}

impl Default for PlateauBand {
    fn default() -> Self {
        PlateauBand { relative: 0.05, min_length: 1.0 }
    }
}

pub fn coherence_stats(tr: &Trajectory) -> CoherenceStats {
    coherence_stats_with(tr, PlateauBand::default())
}

pub fn coherence_stats_with(tr: &Trajectory, band: PlateauBand) -> CoherenceStats {
    let coh: Vec<f64> = tr.states.iter().map(|s| s.rgn.norm()).collect();
    let (k_max, max_coh) =
        coh.iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (k, c)| if c > acc.1 { (k, c) } else { acc });

    // the plateau is searched after the pump maximum
    let start = tr
        .drive_trace
        .as_ref()
        .map(|d| {
            d.r1_abs
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (k, &v)| if v > acc.1 { (k, v) } else { acc })
                .0
        })
        .unwrap_or(0);

    let mut best: Option<(usize, usize)> = None;
    for i in start..coh.len() {
        let (mut lo, mut hi, mut sum) = (coh[i], coh[i], 0.0);
        let mut j = i;
        while j < coh.len() {
            let v = coh[j];
            let (nlo, nhi, nsum) = (lo.min(v), hi.max(v), sum + v);
            let mean = nsum / (j - i + 1) as f64;
            if nhi > mean * (1.0 + band.relative) || nlo < mean * (1.0 - band.relative) {
                break;
            }
            lo = nlo;
            hi = nhi;
            sum = nsum;
            j += 1;
        }
        if j > i && best.is_none_or(|(bi, bj)| j - i > bj - bi) {
            best = Some((i, j));
        }
        if j == coh.len() {
            break;
        }
    }
    let plateau = best.and_then(|(i, j)| {
        let t_begin = tr.grid.time(i);
        let t_end = tr.grid.time(j - 1);
        (t_end - t_begin > band.min_length).then(|| Plateau {
            t_begin,
            t_end,
            level: coh[i..j].iter().sum::<f64>() / (j - i) as f64,
        })
    });

    CoherenceStats {
        max_coh,
        t_of_max: tr.grid.time(k_max),
        final_coh: tr.final_coherence(),
        final_rn: tr.final_rn(),
        plateau,
    }
}
