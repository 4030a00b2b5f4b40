//! Full five-level density matrix in the interaction frame.
//!
//! Levels `g`, `m`, `n`, `l`, `f` with couplings
//!
//! ```text
//! G_gm = g₁ e^{-iΩ_gm t}     G_mn = a g₁ e^{-iΩ_mn t}
//! G_gl = g₋ e^{-iΩ_gl t}     G_ln = g₂  e^{-iΩ_ln t}
//! G_nf = g_St e^{-iΩ_nf t}
//! ```
//!
//! and `G_ji = G_ij*`. The populations of `m`, `l`, `f` are neglected, so
//! `ρ_g = 1 - ρ_n`. Integrating this system directly checks the adiabatic
//! elimination behind [`crate::twolevel`] and the algebraic coherences
//! returned by [`algebraic_coherences`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{MediumSpec, MixingMode, OnePhotonFields, TwoLevelState};
use crate::ode::{integrate, OdeOptions};
use crate::pulse::PulseSpec;
use crate::twolevel::{evolve_with, EnvelopeDrive, TimeGrid};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FiveLevelState {
    pub rho_n: f64,
    pub rho_mn: Complex64,
    pub rho_ln: Complex64,
    pub rho_gl: Complex64,
    pub rho_gm: Complex64,
    pub rho_gn: Complex64,
    pub rho_nf: Complex64,
    pub rho_gf: Complex64,
}

impl FiveLevelState {
    pub fn rho_g(&self) -> f64 {
        1.0 - self.rho_n
    }

    fn coherences(&self) -> [Complex64; 7] {
        [self.rho_mn, self.rho_ln, self.rho_gl, self.rho_gm, self.rho_gn, self.rho_nf, self.rho_gf]
    }

    fn pack(&self) -> [f64; 15] {
        let mut y = [0.0; 15];
        y[0] = self.rho_n;
        for (k, c) in self.coherences().iter().enumerate() {
            y[1 + 2 * k] = c.re;
            y[2 + 2 * k] = c.im;
        }
        y
    }

    fn unpack(y: &[f64; 15]) -> Self {
        let c = |k: usize| Complex64::new(y[1 + 2 * k], y[2 + 2 * k]);
        FiveLevelState {
            rho_n: y[0],
            rho_mn: c(0),
            rho_ln: c(1),
            rho_gl: c(2),
            rho_gm: c(3),
            rho_gn: c(4),
            rho_nf: c(5),
            rho_gf: c(6),
        }
    }
}

/// Scaled one-photon and multiphoton detunings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetuningSet {
    pub omega_gm: f64,
    pub omega_mn: f64,
    pub omega_ln: f64,
    pub omega_gl: f64,
    pub omega_nf: f64,
    pub omega_gf: f64,
    pub omega_gn: f64,
}

impl DetuningSet {
    /// Completes the set from the two-photon detuning and the three
    /// independent one-photon detunings.
    pub fn new(omega_gn: f64, omega_gm: f64, omega_ln: f64, omega_nf: f64) -> Self {
        DetuningSet {
            omega_gm,
            omega_mn: omega_gn - omega_gm,
            omega_ln,
            omega_gl: omega_gn - omega_ln,
            omega_nf,
            omega_gf: omega_gn + omega_nf,
            omega_gn,
        }
    }

    pub fn from_medium(m: &MediumSpec, delta: f64) -> Self {
        Self::new(delta, m.det_gm, m.det_ln, m.det_nf)
    }

    /// Reduced-model medium with the same one-photon detunings.
    pub fn medium(&self, a: f64) -> MediumSpec {
        MediumSpec {
            a,
            k1: 1.0,
            k2: 1.0,
            k_mix: 1.0,
            det_gm: self.omega_gm,
            det_ln: self.omega_ln,
            det_nf: self.omega_nf,
            mixing_mode: MixingMode::Difference,
        }
    }

    fn named(&self) -> [(&'static str, f64); 6] {
        [
            ("Omega_gm", self.omega_gm),
            ("Omega_mn", self.omega_mn),
            ("Omega_ln", self.omega_ln),
            ("Omega_gl", self.omega_gl),
            ("Omega_nf", self.omega_nf),
            ("Omega_gf", self.omega_gf),
        ]
    }

    pub fn max_abs(&self) -> f64 {
        self.named().iter().map(|(_, v)| v.abs()).fold(self.omega_gn.abs(), f64::max)
    }

    fn largest(&self) -> (&'static str, f64) {
        self.named()
            .into_iter()
            .fold(("Omega_gn", self.omega_gn), |acc, x| if x.1.abs() > acc.1.abs() { x } else { acc })
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.named() {
            if !v.is_finite() || v == 0.0 {
                return Err(Error::Config(format!("detuning {name} must be finite and nonzero, got {v}")));
            }
        }
        if !self.omega_gn.is_finite() {
            return Err(Error::Config("detuning Omega_gn must be finite".into()));
        }
        let scale = self.max_abs();
        let checks = [
            ("Omega_gm + Omega_mn", self.omega_gm + self.omega_mn),
            ("Omega_gl + Omega_ln", self.omega_gl + self.omega_ln),
            ("Omega_gf - Omega_nf", self.omega_gf - self.omega_nf),
        ];
        for (name, v) in checks {
            if (v - self.omega_gn).abs() > 1e-12 * scale {
                return Err(Error::Config(format!("{name} = {v} disagrees with Omega_gn = {}", self.omega_gn)));
            }
        }
        Ok(())
    }
}

/// One-photon pulses driving the five-level system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldPulses {
    pub pump: PulseSpec,
    #[serde(default = "PulseSpec::off")]
    pub probe: PulseSpec,
    #[serde(default = "PulseSpec::off")]
    pub generated: PulseSpec,
    #[serde(default = "PulseSpec::off")]
    pub stark: PulseSpec,
}

impl FieldPulses {
    pub fn pump_only(pump: PulseSpec) -> Self {
        FieldPulses { pump, probe: PulseSpec::off(), generated: PulseSpec::off(), stark: PulseSpec::off() }
    }

    pub fn at(&self, t: f64) -> OnePhotonFields {
        let c = |p: &PulseSpec| Complex64::new(p.envelope(t), 0.0);
        OnePhotonFields { g1: c(&self.pump), g2: c(&self.probe), gmix: c(&self.generated), gst: c(&self.stark) }
    }

    pub fn validate(&self) -> Result<()> {
        self.pump.validate()?;
        self.probe.validate()?;
        self.generated.validate()?;
        self.stark.validate()
    }
}

fn rhs(y: &[f64; 15], f: &OnePhotonFields, det: &DetuningSet, a: f64, t: f64) -> [f64; 15] {
    let s = FiveLevelState::unpack(y);
    let ph = |w: f64| Complex64::from_polar(1.0, -w * t);
    let g_gm = f.g1 * ph(det.omega_gm);
    let g_mn = a * f.g1 * ph(det.omega_mn);
    let g_gl = f.gmix * ph(det.omega_gl);
    let g_ln = f.g2 * ph(det.omega_ln);
    let g_nf = f.gst * ph(det.omega_nf);
    let (rn, rg) = (s.rho_n, s.rho_g());

    let d_mn = -I * (g_mn * rn + g_gm.conj() * s.rho_gn);
    let d_ln = -I * (g_ln * rn + g_gl.conj() * s.rho_gn);
    let d_gl = I * (s.rho_gn * g_ln.conj() + rg * g_gl);
    let d_gm = I * (s.rho_gn * g_mn.conj() + g_gm * rg);
    let d_gn = -I * (g_gm * s.rho_mn - g_mn * s.rho_gm + g_gl * s.rho_ln - g_ln * s.rho_gl - g_nf.conj() * s.rho_gf);
    let d_n = 2.0 * (g_mn.conj() * s.rho_mn + g_ln.conj() * s.rho_ln + g_nf * s.rho_nf.conj()).im;
    let d_nf = I * g_nf * rn;
    let d_gf = I * s.rho_gn * g_nf;

    FiveLevelState {
        rho_n: d_n,
        rho_mn: d_mn,
        rho_ln: d_ln,
        rho_gl: d_gl,
        rho_gm: d_gm,
        rho_gn: d_gn,
        rho_nf: d_nf,
        rho_gf: d_gf,
    }
    .pack()
}

/// Rate `dρ_n/dt` for the given state, useful for auditing closure.
pub fn population_rate(st: &FiveLevelState, fields: &OnePhotonFields, det: &DetuningSet, a: f64, t: f64) -> f64 {
    rhs(&st.pack(), fields, det, a, t)[0]
}

/// Integrates the full equations from the ground state on `grid`.
///
/// The step is capped at `0.02 / max|Ω|` so every interaction-frame
/// oscillation is resolved.
pub fn evolve_full(
    fields: &FieldPulses,
    det: &DetuningSet,
    a: f64,
    grid: &TimeGrid,
    tol: f64,
) -> Result<Vec<FiveLevelState>> {
    fields.validate()?;
    det.validate()?;
    grid.validate()?;
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(Error::Config(format!("tolerance must lie in (0, 1e-3], got {tol}")));
    }
    if !a.is_finite() {
        return Err(Error::Config("dipole ratio a must be finite".into()));
    }
    let opts = OdeOptions::new(tol, tol * 1e-2).with_h_max(0.02 / det.max_abs());
    let f = |t: f64, y: &[f64; 15]| rhs(y, &fields.at(t), det, a, t);
    match integrate(f, [0.0; 15], &grid.times(), &opts) {
        Ok((ys, _)) => Ok(ys.iter().map(FiveLevelState::unpack).collect()),
        Err(Error::StepUnderflow { time, step, .. }) => {
            let (name, v) = det.largest();
            Err(Error::StepUnderflow {
                time,
                step,
                detail: Some(format!("{name} = {v} is too large for the requested grid and tolerance")),
            })
        }
        Err(e) => Err(e),
    }
}

/// Intermediate coherences slaved to the two-photon state.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AlgebraicCoherences {
    pub r_mn: Complex64,
    pub r_ln: Complex64,
    pub r_gl: Complex64,
    pub r_gm: Complex64,
    pub r_nf: Complex64,
    pub r_gf: Complex64,
}

/// Adiabatically eliminated coherences for a given two-photon state.
///
/// ```text
/// r_mn = (a g₁ r_n + g₁* r_gn)/Ω_mn      r_gm = -(a g₁* r_gn + g₁ r_g)/Ω_gm
/// r_ln = (g₂ r_n + g₋* r_gn)/Ω_ln        r_gl = -(r_gn g₂* + r_g g₋)/Ω_gl
/// r_nf = -g_St r_n/Ω_nf                  r_gf = -r_gn g_St/Ω_gf
/// ```
///
/// In sum-frequency mode the probe and generated wave swap their
/// conjugation in `r_ln` and `r_gl`.
pub fn algebraic_coherences(
    st: &TwoLevelState,
    fields: &OnePhotonFields,
    det: &DetuningSet,
    a: f64,
    mode: MixingMode,
) -> Result<AlgebraicCoherences> {
    det.validate()?;
    Ok(algebraic_coherences_unchecked(st, fields, det, a, mode))
}

pub(crate) fn algebraic_coherences_unchecked(
    st: &TwoLevelState,
    f: &OnePhotonFields,
    det: &DetuningSet,
    a: f64,
    mode: MixingMode,
) -> AlgebraicCoherences {
    let (rn, rg, rgn) = (st.rn, st.rg(), st.rgn);
    let (r_ln, r_gl) = match mode {
        MixingMode::Difference => {
            ((f.g2 * rn + f.gmix.conj() * rgn) / det.omega_ln, -(rgn * f.g2.conj() + rg * f.gmix) / det.omega_gl)
        }
        MixingMode::Sum => {
            ((f.g2 * rn + f.gmix * rgn.conj()) / det.omega_ln, -(rgn * f.g2 + rg * f.gmix) / det.omega_gl)
        }
    };
    AlgebraicCoherences {
        r_mn: (a * f.g1 * rn + f.g1.conj() * rgn) / det.omega_mn,
        r_ln,
        r_gl,
        r_gm: -(a * f.g1.conj() * rgn + f.g1 * rg) / det.omega_gm,
        r_nf: -f.gst * rn / det.omega_nf,
        r_gf: -rgn * f.gst / det.omega_gf,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AdiabaticLevel {
    Ok,
    Warning,
    Violated,
}

/// Ratio thresholds for [`validate_adiabatic`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdiabaticMargins {
    pub ok: f64,
    pub violated: f64,
}

impl Default for AdiabaticMargins {
    fn default() -> Self {
        AdiabaticMargins { ok: 10.0, violated: 3.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionCheck {
    pub transition: String,
    pub detuning: f64,
    pub rabi: f64,
    /// `|Ω| / |G|`, infinite for a null field.
    pub ratio: f64,
    pub level: AdiabaticLevel,
    /// `|G|` is not large against the inverse pulse width.
    pub perturbative: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdiabaticReport {
    pub checks: Vec<TransitionCheck>,
    pub overall: AdiabaticLevel,
}

impl AdiabaticReport {
    pub fn warnings(&self) -> Vec<String> {
        self.checks
            .iter()
            .filter_map(|c| {
                if c.perturbative {
                    Some(format!("{}: perturbative field (|G| = {:.3e})", c.transition, c.rabi))
                } else if c.level != AdiabaticLevel::Ok {
                    Some(format!("{}: |Omega|/|G| = {:.3} ({:?})", c.transition, c.ratio, c.level))
                } else {
                    None
                }
            })
            .collect()
    }
}

/// Checks `|Ω_ij| ≫ |G_ij| ≫ 1` per transition with the default margins.
///
/// `peak` holds the peak one-photon amplitudes.
pub fn validate_adiabatic(peak: &OnePhotonFields, det: &DetuningSet, a: f64) -> AdiabaticReport {
    validate_adiabatic_with(peak, det, a, AdiabaticMargins::default())
}

pub fn validate_adiabatic_with(
    peak: &OnePhotonFields,
    det: &DetuningSet,
    a: f64,
    margins: AdiabaticMargins,
) -> AdiabaticReport {
    let pairs = [
        ("g-m", det.omega_gm, peak.g1.norm()),
        ("m-n", det.omega_mn, (a * peak.g1).norm()),
        ("l-n", det.omega_ln, peak.g2.norm()),
        ("g-l", det.omega_gl, peak.gmix.norm()),
        ("n-f", det.omega_nf, peak.gst.norm()),
    ];
    let checks: Vec<TransitionCheck> = pairs
        .into_iter()
        .map(|(name, detuning, rabi)| {
            let ratio = if rabi == 0.0 { f64::INFINITY } else { detuning.abs() / rabi };
            let level = if ratio >= margins.ok {
                AdiabaticLevel::Ok
            } else if ratio >= margins.violated {
                AdiabaticLevel::Warning
            } else {
                AdiabaticLevel::Violated
            };
            TransitionCheck {
                transition: name.to_string(),
                detuning,
                rabi,
                ratio,
                level,
                perturbative: rabi < margins.ok,
            }
        })
        .collect();
    let overall = checks.iter().map(|c| c.level).max().unwrap_or(AdiabaticLevel::Ok);
    AdiabaticReport { checks, overall }
}

/// Physical inputs shared by the reduced and full models.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub fields: FieldPulses,
    pub detunings: DetuningSet,
    pub a: f64,
    #[serde(default)]
    pub grid: TimeGrid,
    #[serde(default = "default_oracle_tol")]
    pub tol: f64,
}

fn default_oracle_tol() -> f64 {
    1e-8
}

impl OracleConfig {
    /// Pump-only configuration whose reduced two-photon Rabi amplitude is
    /// `r`, with every one-photon detuning of magnitude `omega`.
    pub fn pump_only(r: f64, omega: f64, a: f64) -> Self {
        let g1 = (r * omega / (2.0 * a)).sqrt();
        OracleConfig {
            fields: FieldPulses::pump_only(PulseSpec::gaussian(g1, 1.0, 0.0)),
            detunings: DetuningSet::new(0.0, -omega, -omega, omega),
            a,
            grid: TimeGrid::default(),
            tol: default_oracle_tol(),
        }
    }

    pub fn peak_fields(&self) -> OnePhotonFields {
        let c = |p: &PulseSpec| Complex64::new(p.amplitude, 0.0);
        let f = &self.fields;
        OnePhotonFields { g1: c(&f.pump), g2: c(&f.probe), gmix: c(&f.generated), gst: c(&f.stark) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub config: OracleConfig,
    pub max_pop_err: f64,
    pub max_coh_err: f64,
    pub adiabatic: AdiabaticLevel,
}

/// Runs both models on identical inputs and reports the worst population
/// and phase-aligned coherence mismatch over the grid.
pub fn compare_reduced_vs_full(cfg: &OracleConfig) -> Result<OracleReport> {
    let report = validate_adiabatic(&cfg.peak_fields(), &cfg.detunings, cfg.a);
    if report.overall == AdiabaticLevel::Violated {
        return Err(Error::Config(format!("adiabatic elimination is not justified: {}", report.warnings().join("; "))));
    }
    let full = evolve_full(&cfg.fields, &cfg.detunings, cfg.a, &cfg.grid, cfg.tol)?;
    let medium = cfg.detunings.medium(cfg.a);
    let drive = EnvelopeDrive { medium: &medium, delta: cfg.detunings.omega_gn, fields: |t| cfg.fields.at(t) };
    let reduced = evolve_with(&drive, &cfg.grid, cfg.tol)?;

    let (mut max_pop_err, mut max_coh_err) = (0.0f64, 0.0f64);
    for (k, (f, r)) in full.iter().zip(&reduced.states).enumerate() {
        let t = cfg.grid.time(k);
        max_pop_err = max_pop_err.max((f.rho_n - r.rn).abs());
        let aligned = f.rho_gn * Complex64::from_polar(1.0, cfg.detunings.omega_gn * t);
        max_coh_err = max_coh_err.max((aligned - r.rgn).norm());
    }
    Ok(OracleReport { config: *cfg, max_pop_err, max_coh_err, adiabatic: report.overall })
}
