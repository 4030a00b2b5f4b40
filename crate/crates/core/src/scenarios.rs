//! Named parameter sets and the Hg calibration.
//!
//! Reduced-model presets are stored in angular units. Hg presets keep the
//! cyclic amplitudes `G = |g|τ₁/2π` they are usually quoted in and convert
//! on use.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DriveConfig, MediumSpec, MixingMode, OnePhotonFields};
use crate::multilevel::OracleConfig;
use crate::propagation::{FieldSlice, PropagationSetup, StepControl, PROPAGATION_SAMPLES};
use crate::pulse::PulseSpec;
use crate::twolevel::{evolve_with, EnvelopeDrive, TimeGrid, Trajectory, DEFAULT_WINDOW};
use crate::units::UnitConvention;

/// Hg medium constants with the generated wave's coupling normalized to 1.
pub const HG_MEDIUM: MediumSpec = MediumSpec {
    a: 0.345,
    k1: 0.67,
    k2: 0.04,
    k_mix: 1.0,
    det_gm: -2.4e5,
    det_ln: -2.2e4,
    det_nf: 8.9e3,
    mixing_mode: MixingMode::Difference,
};

pub const STARK_WIDTH: f64 = 1.6;

/// Hg four-wave-mixing run in cyclic units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HgRun {
    pub g01: f64,
    pub g0st: f64,
    pub g20: f64,
    /// Static two-photon detuning.
    pub delta: f64,
    pub delay_st: f64,
    #[serde(default = "stark_width")]
    pub width_st: f64,
    pub delay_2: f64,
    #[serde(default = "unit_width")]
    pub width_2: f64,
    pub medium: MediumSpec,
    pub z_end: f64,
    #[serde(default)]
    pub snapshots: Vec<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Retarded-time window `[t_start, t_end]`.
    #[serde(default = "default_window")]
    pub window: [f64; 2],
}

fn stark_width() -> f64 {
    STARK_WIDTH
}

fn unit_width() -> f64 {
    1.0
}

fn default_samples() -> usize {
    PROPAGATION_SAMPLES
}

fn default_window() -> [f64; 2] {
    [DEFAULT_WINDOW.0, DEFAULT_WINDOW.1]
}

impl HgRun {
    fn new(g01: f64, g0st: f64, delta: f64, delay_st: f64, delay_2: f64) -> Self {
        HgRun {
            g01,
            g0st,
            g20: 1.6e-2,
            delta,
            delay_st,
            width_st: STARK_WIDTH,
            delay_2,
            width_2: 1.0,
            medium: HG_MEDIUM,
            z_end: 3e6,
            snapshots: (1..6).map(|k| k as f64 * 5e5).collect(),
            samples: PROPAGATION_SAMPLES,
            window: default_window(),
        }
    }

    fn mode(mut self, mode: MixingMode) -> Self {
        self.medium.mixing_mode = mode;
        self
    }

    pub fn pump(&self) -> PulseSpec {
        PulseSpec::gaussian(2.0 * PI * self.g01, 1.0, 0.0)
    }

    pub fn stark(&self) -> PulseSpec {
        PulseSpec::gaussian(2.0 * PI * self.g0st, self.width_st, self.delay_st)
    }

    pub fn probe(&self) -> PulseSpec {
        PulseSpec::gaussian(2.0 * PI * self.g20, self.width_2, self.delay_2)
    }

    pub fn delta_angular(&self) -> f64 {
        2.0 * PI * self.delta
    }

    pub fn grid(&self) -> Result<TimeGrid> {
        TimeGrid::new(self.window[0], self.window[1], self.samples)
    }

    pub fn entry_slice(&self) -> Result<FieldSlice> {
        Ok(FieldSlice::from_pulses(self.grid()?, &self.pump(), &self.probe(), &PulseSpec::off()))
    }

    pub fn setup(&self, control: StepControl) -> PropagationSetup {
        PropagationSetup {
            medium: self.medium,
            delta: self.delta_angular(),
            stark: self.stark(),
            z_end: self.z_end,
            snapshots: self.snapshots.clone(),
            control,
        }
    }

    /// Atomic response at the medium entrance.
    pub fn entrance_trajectory(&self, grid: &TimeGrid, tol: f64) -> Result<Trajectory> {
        self.medium.validate()?;
        let (pump, stark, probe) = (self.pump(), self.stark(), self.probe());
        let drive = EnvelopeDrive {
            medium: &self.medium,
            delta: self.delta_angular(),
            fields: |t: f64| OnePhotonFields {
                g1: Complex64::new(pump.envelope(t), 0.0),
                g2: Complex64::new(probe.envelope(t), 0.0),
                gmix: Complex64::default(),
                gst: Complex64::new(stark.envelope(t), 0.0),
            },
        };
        evolve_with(&drive, grid, tol)
    }
}

/// What a preset configures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Scenario {
    /// Reduced two-level drive.
    Dynamics {
        drive: DriveConfig,
        #[serde(default)]
        grid: TimeGrid,
    },
    /// Hg entrance dynamics and propagation.
    Hg(HgRun),
    /// Reduced versus full five-level comparison.
    Oracle(OracleConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Preset {
    pub name: String,
    /// Which figure panel and curve the set reproduces.
    pub note: String,
    /// Convention the stored amplitudes are written in.
    pub units: UnitConvention,
    pub scenario: Scenario,
}

const ALIASES: &[(&str, &str)] =
    &[("fig5_a", "fig5a_solid"), ("fig6_a_solid", "fig6a_solid"), ("fig17a_down", "fig17a"), ("fig17b_up", "fig17b")];

fn dyn_preset(name: &str, note: &str, drive: DriveConfig) -> Preset {
    Preset {
        name: name.into(),
        note: note.into(),
        units: UnitConvention::Angular,
        scenario: Scenario::Dynamics { drive, grid: TimeGrid::default() },
    }
}

fn scrap(name: &str, note: &str, delta: f64, s: f64, r: f64, dtau: f64, beta: f64) -> Preset {
    dyn_preset(name, note, DriveConfig::scrap(delta, s, r, dtau, STARK_WIDTH).with_beta(beta))
}

fn hg(name: &str, note: &str, run: HgRun) -> Preset {
    Preset { name: name.into(), note: note.into(), units: UnitConvention::Cyclic, scenario: Scenario::Hg(run) }
}

/// Every registered preset, in figure order.
pub fn presets() -> Vec<Preset> {
    let mut v = Vec::new();

    let r3 = 2.0 * PI / 5.0;
    for (tag, delta) in [("solid", 0.0), ("dashed", 1.259), ("dashdot", 2.5)] {
        let drive = DriveConfig {
            delta,
            pump: PulseSpec::rectangular(r3, 20.0, 10.0),
            stark: PulseSpec::off(),
            beta: 0.0,
            probe: None,
        };
        v.push(Preset {
            name: format!("fig3_{tag}"),
            note: format!("rectangular two-photon pulse, R = 2π/5, δ = {delta}"),
            units: UnitConvention::Angular,
            scenario: Scenario::Dynamics { drive, grid: TimeGrid { t_start: 0.0, t_end: 10.0, n_samples: 2001 } },
        });
    }

    v.push(scrap("fig4_solid", "resonant π/2 Gaussian pulse, no Stark field", 0.0, 0.0, 0.886, 0.0, 0.0));
    v.push(scrap("fig4_dashed", "Stark-assisted persistent coherence, moderate detuning", 5.0, 7.4, 3.18, 1.8, 0.0));
    v.push(scrap("fig4_dashdot", "Stark-assisted persistent coherence, large detuning", 20.0, 23.0, 3.48, 1.34, 0.0));

    for (tag, s) in [("solid", 7.4), ("dashed", 6.7), ("dashdot", 8.1)] {
        v.push(scrap(&format!("fig5a_{tag}"), "robustness against the Stark peak", 5.0, s, 3.18, 1.8, 0.0));
    }
    for (tag, d) in [("solid", 5.0), ("dashed", 4.5), ("dashdot", 5.5)] {
        v.push(scrap(&format!("fig5b_{tag}"), "robustness against the static detuning", d, 7.4, 3.18, 1.8, 0.0));
    }
    for (tag, r) in [("solid", 3.48), ("dashed", 3.85), ("dashdot", 3.15)] {
        v.push(scrap(&format!("fig5c_{tag}"), "robustness against the pump amplitude", 20.0, 23.0, r, 1.34, 0.0));
    }
    for (tag, dt) in [("solid", 1.34), ("dashed", 1.2), ("dashdot", 1.5)] {
        v.push(scrap(&format!("fig5d_{tag}"), "robustness against the Stark delay", 20.0, 23.0, 3.48, dt, 0.0));
    }

    for (tag, r) in [("solid", 30.0), ("dashed", 15.0), ("dashdot", 60.0)] {
        v.push(scrap(&format!("fig6a_{tag}"), "Stark-chirped passage, pump amplitude varied", 24.0, 75.0, r, 1.7, 0.0));
    }
    for (tag, dt) in [("solid", 1.7), ("dashed", 1.1), ("dashdot", 2.3)] {
        v.push(scrap(&format!("fig6b_{tag}"), "Stark-chirped passage, Stark delay varied", 24.0, 75.0, 30.0, dt, 0.0));
    }
    for (tag, s) in [("solid", 75.0), ("dashed", 50.0), ("dashdot", 150.0)] {
        v.push(scrap(&format!("fig6c_{tag}"), "Stark-chirped passage, Stark peak varied", 24.0, s, 30.0, 1.7, 0.0));
    }
    for (tag, d) in [("solid", 24.0), ("dashed", 12.0), ("dashdot", 48.0)] {
        v.push(scrap(
            &format!("fig6d_{tag}"),
            "Stark-chirped passage, static detuning varied",
            d,
            75.0,
            30.0,
            1.7,
            0.0,
        ));
    }

    for (tag, beta, d) in [("solid", 0.0, 0.0), ("dashdot", -1.0, 0.0), ("dashed", -1.0, -0.65)] {
        v.push(scrap(&format!("fig7_{tag}"), "self-shift compensated by static detuning", d, 0.0, 0.886, 0.0, beta));
    }

    for (name, d) in [("fig8a", 0.0), ("fig8b", -3.0), ("fig8c_dashed", -10.0), ("fig8c_solid", -15.0)] {
        v.push(scrap(name, "strong pump with self-shift only", d, 0.0, 20.0, 0.0, -0.5));
    }
    for (tag, r) in [("dashed", 15.0), ("solid", 30.0)] {
        v.push(scrap(
            &format!("fig9_{tag}"),
            "persistent coherence with self-shift and Stark pulse",
            13.65,
            15.0,
            r,
            1.6,
            -0.5,
        ));
    }
    for (tag, d) in [("dashed", 10.0), ("solid", 24.0)] {
        v.push(scrap(&format!("fig10_{tag}"), "Stark-chirped passage with self-shift", d, 75.0, 20.0, 1.4, -0.5));
    }

    v.push(hg(
        "fig11_solid",
        "Hg entrance dynamics with a coherence plateau",
        HgRun::new(910.0, 325.0, 0.5, -3.0, 5.0),
    ));
    v.push(hg(
        "fig11_dashed",
        "Hg entrance dynamics with transient coherence",
        HgRun::new(910.0, 325.0, 5.6, 2.0, 0.0),
    ));
    for (tag, g01) in [("solid", 910.0), ("dashed", 1173.0), ("dashdot", 525.0)] {
        v.push(hg(
            &format!("fig12_{tag}"),
            "Hg entrance dynamics, pump amplitude varied",
            HgRun::new(g01, 325.0, 0.5, -3.0, 5.0),
        ));
    }
    for (tag, g0st) in [("solid", 461.0), ("dashed", 266.0)] {
        v.push(hg(
            &format!("fig13_{tag}"),
            "Hg entrance dynamics, Stark amplitude varied",
            HgRun::new(910.0, g0st, 0.5, -3.0, 5.0),
        ));
    }
    for (tag, d) in [("solid", -4.0), ("dashed", -3.0), ("dashdot", -2.0)] {
        v.push(hg(
            &format!("fig14_{tag}"),
            "Hg entrance dynamics, Stark delay varied",
            HgRun::new(910.0, 325.0, 0.5, d, 5.0),
        ));
    }

    let plateau = HgRun::new(910.0, 325.0, 0.5, -3.0, 5.0);
    let transient = HgRun::new(910.0, 325.0, 5.6, 2.0, 0.0);
    v.push(hg("fig15ac", "pulse shapes after the medium, probe on the plateau", plateau.clone()));
    v.push(hg("fig15bd", "pulse shapes after the medium, probe on the transient peak", transient.clone()));
    v.push(hg("fig16", "pump shape and energy along the medium", plateau.clone()));
    v.push(hg("fig17a", "down-conversion photon gains, probe on the plateau", plateau.clone()));
    v.push(hg("fig17b", "up-conversion photon gains, probe on the plateau", plateau.clone().mode(MixingMode::Sum)));
    v.push(hg("fig17cd", "down-conversion energy and peak power, probe on the transient peak", transient.clone()));
    v.push(hg("fig18", "peak-power profiles along the medium, probe on the transient peak", transient.clone()));
    v.push(hg(
        "fig19_solid",
        "atomic response inside the medium, plateau case",
        HgRun { z_end: 1e6, snapshots: vec![], ..plateau.clone() },
    ));
    v.push(hg(
        "fig19_dashed",
        "atomic response inside the medium, transient case",
        HgRun { z_end: 1e6, snapshots: vec![], ..transient },
    ));
    let mut strong = plateau;
    strong.medium.k2 = 0.4;
    v.push(hg("fig20", "down-conversion with a stronger probe transition", strong));

    for (name, omega) in [("oracle_pi_half", 100.0), ("oracle_marginal", 10.0)] {
        v.push(Preset {
            name: name.into(),
            note: format!("full five-level check of a π/2 pump, |Ω| = {omega}"),
            units: UnitConvention::Angular,
            scenario: Scenario::Oracle(OracleConfig::pump_only(PI.sqrt() / 2.0, omega, 1.0)),
        });
    }
    v
}

pub fn preset_names() -> Vec<String> {
    let mut names: Vec<String> = presets().into_iter().map(|p| p.name).collect();
    names.extend(ALIASES.iter().map(|(a, _)| a.to_string()));
    names
}

/// Looks up a preset by name or alias.
pub fn preset(name: &str) -> Result<Preset> {
    let canonical = ALIASES.iter().find(|(a, _)| *a == name).map_or(name, |(_, c)| c);
    presets()
        .into_iter()
        .find(|p| p.name == canonical)
        .ok_or_else(|| Error::UnknownPreset { name: name.to_string(), known: preset_names() })
}

/// Atomic and optical data of the Hg scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HgCalibration {
    pub lambda1_nm: f64,
    pub lambda_st_nm: f64,
    pub lambda2_nm: f64,
    pub lambda_minus_nm: f64,
    pub lambda_plus_nm: f64,
    pub tau1_ns: f64,
    /// Oscillator strength of the generated transition.
    pub f_lg: f64,
    /// Ground-state degeneracy.
    pub g_g: f64,
}

impl Default for HgCalibration {
    fn default() -> Self {
        HgCalibration {
            lambda1_nm: 268.8,
            lambda_st_nm: 1064.0,
            lambda2_nm: 532.0,
            lambda_minus_nm: 179.8,
            lambda_plus_nm: 107.3,
            tau1_ns: 3.0,
            f_lg: 0.96,
            g_g: 1.0,
        }
    }
}

impl HgCalibration {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.lambda1_nm,
            self.lambda_st_nm,
            self.lambda2_nm,
            self.lambda_minus_nm,
            self.lambda_plus_nm,
            self.tau1_ns,
            self.f_lg,
            self.g_g,
        ];
        if all.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
            return Err(Error::Config("calibration values must be positive".into()));
        }
        let mix = |sign: f64| 1.0 / (2.0 / self.lambda1_nm + sign / self.lambda2_nm);
        for (name, given, expect) in
            [("lambda_minus_nm", self.lambda_minus_nm, mix(-1.0)), ("lambda_plus_nm", self.lambda_plus_nm, mix(1.0))]
        {
            if ((given - expect) / expect).abs() > 5e-3 {
                return Err(Error::Config(format!(
                    "{name} = {given} disagrees with the mixing relation ({expect:.2})"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AbsorptionScale {
    /// Frequency-integrated absorption index, cm⁻¹ s⁻¹.
    pub alpha_minus: f64,
    /// `α₋τ₁/2π`, scaled depth per cm.
    pub per_cm: f64,
    /// Length of one unit of scaled depth, cm.
    pub z0_cm: f64,
}

impl AbsorptionScale {
    pub fn z_to_cm(&self, z: f64) -> f64 {
        z / self.per_cm
    }
}

/// Absorption scale of the generated transition at number density `n_cm3`.
pub fn absorption_scale(cal: &HgCalibration, n_cm3: f64) -> Result<AbsorptionScale> {
    cal.validate()?;
    if !(n_cm3 > 0.0 && n_cm3.is_finite()) {
        return Err(Error::Config(format!("number density must be positive, got {n_cm3}")));
    }
    let alpha_minus = 0.67 * cal.g_g * cal.f_lg * n_cm3 / 4.0;
    let per_cm = alpha_minus * cal.tau1_ns * 1e-9 / (2.0 * PI);
    Ok(AbsorptionScale { alpha_minus, per_cm, z0_cm: 1.0 / per_cm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::two_photon_quantities;
    use crate::units::convert_units;

    #[test]
    fn names_are_unique() {
        let names = preset_names();
        let mut sorted = names.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), names.len());
    }

    #[test]
    fn aliases_resolve() {
        assert_eq!(preset("fig5_a").unwrap().name, "fig5a_solid");
        assert_eq!(preset("fig6_a_solid").unwrap().name, "fig6a_solid");
    }

    #[test]
    fn unknown_name_lists_known() {
        match preset("fig4_sold") {
            Err(Error::UnknownPreset { name, known }) => {
                assert_eq!(name, "fig4_sold");
                assert!(known.iter().any(|k| k == "fig4_solid"));
            }
            other => panic!("{other:?}"),
        }
    }

    fn drive(name: &str) -> DriveConfig {
        match preset(name).unwrap().scenario {
            Scenario::Dynamics { drive, .. } => drive,
            s => panic!("{s:?}"),
        }
    }

    #[test]
    fn reduced_presets_carry_their_numbers() {
        let d = drive("fig4_solid");
        assert_eq!((d.delta, d.stark.amplitude, d.pump.amplitude), (0.0, 0.0, 0.886));
        let d = drive("fig9_solid");
        assert_eq!(
            (d.beta, d.stark.amplitude, d.delta, d.stark.delay, d.pump.amplitude),
            (-0.5, 15.0, 13.65, 1.6, 30.0)
        );
        let d = drive("fig6_a_solid");
        assert_eq!(
            (d.delta, d.stark.amplitude, d.pump.amplitude, d.stark.delay, d.stark.width_ratio, d.beta),
            (24.0, 75.0, 30.0, 1.7, 1.6, 0.0)
        );
    }

    #[test]
    fn hg_preset_numbers() {
        let p = preset("fig11_solid").unwrap();
        assert_eq!(p.units, UnitConvention::Cyclic);
        let Scenario::Hg(run) = p.scenario else { panic!() };
        assert_eq!((run.g01, run.g0st, run.delta, run.delay_st), (910.0, 325.0, 0.5, -3.0));
        assert_eq!(run.medium, HG_MEDIUM);
        let Scenario::Hg(run) = preset("fig20").unwrap().scenario else { panic!() };
        assert_eq!(run.medium.k2, 0.4);
        assert_eq!(run.medium.k1, 0.67);
        let Scenario::Hg(run) = preset("fig17b").unwrap().scenario else { panic!() };
        assert_eq!(run.medium.mixing_mode, MixingMode::Sum);
    }

    #[test]
    fn hg_anchor_r15_s75() {
        let run = HgRun::new(910.0, 325.0, 0.5, -3.0, 5.0);
        let q = two_photon_quantities(
            Complex64::new(run.pump().amplitude, 0.0),
            Complex64::default(),
            Complex64::default(),
            Complex64::new(run.stark().amplitude, 0.0),
            &run.medium,
        )
        .unwrap();
        let r = convert_units(q.r1.norm(), UnitConvention::Angular, UnitConvention::Cyclic);
        let s = convert_units(q.s, UnitConvention::Angular, UnitConvention::Cyclic);
        assert!((r - 15.0).abs() < 0.5, "{r}");
        assert!((s - 75.0).abs() < 1.0, "{s}");
    }

    #[test]
    fn presets_round_trip_through_json() {
        for p in presets() {
            let text = serde_json::to_string(&p).unwrap();
            let back: Preset = serde_json::from_str(&text).unwrap();
            assert_eq!(back, p, "{}", p.name);
        }
    }

    #[test]
    fn calibration_anchor() {
        let s = absorption_scale(&HgCalibration::default(), 1e16).unwrap();
        assert!((s.per_cm / 7.6e5 - 1.0).abs() < 0.05, "{}", s.per_cm);
        assert!((s.z_to_cm(1e6) / 1.3 - 1.0).abs() < 0.05);
        let d = absorption_scale(&HgCalibration::default(), 2e16).unwrap();
        assert!((d.z0_cm - 0.5 * s.z0_cm).abs() < 1e-18);
        assert!(absorption_scale(&HgCalibration::default(), 0.0).is_err());
    }

    #[test]
    fn calibration_wavelengths_are_consistent() {
        HgCalibration::default().validate().unwrap();
        let bad = HgCalibration { lambda_minus_nm: 185.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }
}
