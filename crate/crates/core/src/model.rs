//! Drive and medium descriptions, and the algebra that turns one-photon Rabi
//! envelopes into the quantities of the generalized two-level scheme.
//!
//! Near two-photon resonance the detunings of the upper legs are tied to the
//! lower ones, `Ω_mn = -Ω_gm` and `Ω_gl = -Ω_ln`, so a medium is fully
//! described by `Ω_gm`, `Ω_ln` and `Ω_nf`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pulse::PulseSpec;

/// Which beat of the pump pair the probe mixes with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum MixingMode {
    /// Generated wave at `2ω₁ - ω₂`.
    #[default]
    Difference,
    /// Generated wave at `2ω₁ + ω₂`.
    Sum,
}

impl std::str::FromStr for MixingMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "difference" => Ok(MixingMode::Difference),
            "sum" => Ok(MixingMode::Sum),
            other => Err(format!("unknown mixing mode `{other}` (expected sum|difference)")),
        }
    }
}

/// Atomic constants of the five-level ladder, in scaled units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MediumSpec {
    /// Dipole ratio `d_mn / d_gm`.
    pub a: f64,
    /// Propagation coupling of the pump.
    pub k1: f64,
    /// Propagation coupling of the probe.
    pub k2: f64,
    /// Propagation coupling of the generated wave (1 when lengths are
    /// measured in its absorption length).
    pub k_mix: f64,
    /// `Ω_gm τ₁`.
    pub det_gm: f64,
    /// `Ω_ln τ₁`.
    pub det_ln: f64,
    /// `Ω_nf τ₁`.
    pub det_nf: f64,
    #[serde(default)]
    pub mixing_mode: MixingMode,
}

impl MediumSpec {
    pub fn det_mn(&self) -> f64 {
        -self.det_gm
    }

    pub fn det_gl(&self) -> f64 {
        -self.det_ln
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [
            ("a", self.a),
            ("k1", self.k1),
            ("k2", self.k2),
            ("k_mix", self.k_mix),
            ("det_gm", self.det_gm),
            ("det_ln", self.det_ln),
            ("det_nf", self.det_nf),
        ];
        for (name, v) in vals {
            if !v.is_finite() {
                return Err(Error::Config(format!("medium `{name}` is not finite")));
            }
        }
        for (name, v) in [("det_gm", self.det_gm), ("det_ln", self.det_ln), ("det_nf", self.det_nf)] {
            if v == 0.0 {
                return Err(Error::Config(format!("medium detuning `{name}` is zero")));
            }
        }
        Ok(())
    }
}

/// Returns a copy of `m` mixing in `mode`.
pub fn set_mixing_mode(m: &MediumSpec, mode: MixingMode) -> MediumSpec {
    MediumSpec { mixing_mode: mode, ..*m }
}

/// Probe-related contributions to the two-photon drive, all following the
/// probe pulse's timing with the two-photon (squared) profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeTerms {
    /// Timing and peak of the probe-assisted coupling `r₂`.
    pub pulse: PulseSpec,
    /// Peak probe Stark shift `s₂`.
    #[serde(default)]
    pub s2: f64,
    /// Peak Stark shift `s₋` of the generated wave.
    #[serde(default)]
    pub s_mix: f64,
}

/// Drive of the generalized two-level scheme in angular scaled units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveConfig {
    /// Static two-photon detuning `δ = Ω_gn τ₁`.
    pub delta: f64,
    /// Two-photon Rabi frequency pulse; its amplitude is `R = r₁₀ τ₁`.
    pub pump: PulseSpec,
    /// Auxiliary Stark shift pulse; its amplitude is `S = s₀ τ₁`.
    pub stark: PulseSpec,
    /// Self-shift coefficient, `s₁ = β |r₁|`.
    #[serde(default)]
    pub beta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<ProbeTerms>,
}

impl DriveConfig {
    /// Gaussian pump of peak `r` centred at zero with unit width, no Stark pulse.
    pub fn pump_only(delta: f64, r: f64) -> Self {
        DriveConfig { delta, pump: PulseSpec::gaussian(r, 1.0, 0.0), stark: PulseSpec::off(), beta: 0.0, probe: None }
    }

    /// Pump of peak `r` plus a Stark pulse of peak `s`, width `tau_st` and
    /// delay `dtau` relative to the pump.
    pub fn scrap(delta: f64, s: f64, r: f64, dtau: f64, tau_st: f64) -> Self {
        DriveConfig {
            delta,
            pump: PulseSpec::gaussian(r, 1.0, 0.0),
            stark: PulseSpec::gaussian(s, tau_st, dtau),
            beta: 0.0,
            probe: None,
        }
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.delta.is_finite() || !self.beta.is_finite() {
            return Err(Error::Config("drive delta and beta must be finite".into()));
        }
        self.pump.validate()?;
        self.stark.validate()?;
        if let Some(p) = &self.probe {
            p.pulse.validate()?;
            if !(p.s2.is_finite() && p.s_mix.is_finite()) {
                return Err(Error::Config("probe shifts must be finite".into()));
            }
        }
        Ok(())
    }

    /// Two-photon coupling `r₁`, total coupling `r₁ + r₂` and total shift
    /// `Ω_St = s + s₁ + s₂ + s₋` at time `t`.
    pub fn sample(&self, t: f64) -> (f64, Complex64, f64) {
        let r1 = self.pump.two_photon_envelope(t);
        let s = self.stark.two_photon_envelope(t);
        let s1 = self.beta * r1.abs();
        let (r2, s2, s_mix) = match &self.probe {
            Some(p) => {
                let shape = PulseSpec { amplitude: 1.0, ..p.pulse }.two_photon_envelope(t);
                (p.pulse.amplitude * shape, p.s2 * shape, p.s_mix * shape)
            }
            None => (0.0, 0.0, 0.0),
        };
        (r1, Complex64::new(r1 + r2, 0.0), s + s1 + s2 + s_mix)
    }
}

/// Reduced atomic state: upper population and two-photon coherence.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TwoLevelState {
    pub rn: f64,
    pub rgn: Complex64,
}

impl TwoLevelState {
    pub const GROUND: TwoLevelState = TwoLevelState { rn: 0.0, rgn: Complex64 { re: 0.0, im: 0.0 } };

    pub fn new(rn: f64, rgn: Complex64) -> Self {
        TwoLevelState { rn, rgn }
    }

    pub fn rg(&self) -> f64 {
        1.0 - self.rn
    }

    /// `| |r_gn|² - r_n (1 - r_n) |`, zero for a pure state.
    pub fn purity_defect(&self) -> f64 {
        (self.rgn.norm_sqr() - self.rn * (1.0 - self.rn)).abs()
    }
}

/// One-photon envelopes (angular scaled units) of the four fields at one instant.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct OnePhotonFields {
    pub g1: Complex64,
    pub g2: Complex64,
    pub gmix: Complex64,
    pub gst: Complex64,
}

/// Generalized two-level quantities derived from one-photon envelopes.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TwoPhotonQuantities {
    pub r1: Complex64,
    pub r2: Complex64,
    pub s: f64,
    pub s1: f64,
    pub s2: f64,
    pub s_mix: f64,
}

impl TwoPhotonQuantities {
    /// Laser-induced shift of the two-photon resonance.
    pub fn total_shift(&self) -> f64 {
        self.s + self.s1 + self.s2 + self.s_mix
    }

    pub fn coupling(&self) -> Complex64 {
        self.r1 + self.r2
    }
}

/// Maps one-photon envelopes onto two-photon couplings and Stark shifts:
///
/// ```text
/// r₁ = -2a g₁² / Ω_gm          s₁ = (a²/Ω_gm + 1/Ω_mn) |g₁|²
/// r₂ = -2 g₂ g₋ / Ω_gl         s₂ = |g₂|² / Ω_gl
/// s  = |g_St|² / Ω_nf          s₋ = |g₋|² / Ω_ln
/// ```
///
/// In sum-frequency mode the probe enters `r₂` conjugated.
pub fn two_photon_quantities(
    g1: Complex64,
    g2: Complex64,
    gmix: Complex64,
    gst: Complex64,
    m: &MediumSpec,
) -> Result<TwoPhotonQuantities> {
    if m.det_gm == 0.0 || m.det_ln == 0.0 || m.det_nf == 0.0 {
        return Err(Error::Config("two-photon quantities need nonzero one-photon detunings".into()));
    }
    Ok(two_photon_quantities_unchecked(&OnePhotonFields { g1, g2, gmix, gst }, m))
}

pub(crate) fn two_photon_quantities_unchecked(f: &OnePhotonFields, m: &MediumSpec) -> TwoPhotonQuantities {
    let det_gl = m.det_gl();
    let probe = match m.mixing_mode {
        MixingMode::Difference => f.g2,
        MixingMode::Sum => f.g2.conj(),
    };
    TwoPhotonQuantities {
        r1: -2.0 * m.a * f.g1 * f.g1 / m.det_gm,
        r2: -2.0 * probe * f.gmix / det_gl,
        s: f.gst.norm_sqr() / m.det_nf,
        s1: (m.a * m.a / m.det_gm + 1.0 / m.det_mn()) * f.g1.norm_sqr(),
        s2: f.g2.norm_sqr() / det_gl,
        s_mix: f.gmix.norm_sqr() / m.det_ln,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::TAU;

    fn hg() -> MediumSpec {
        MediumSpec {
            a: 0.345,
            k1: 0.67,
            k2: 0.04,
            k_mix: 1.0,
            det_gm: -2.4e5,
            det_ln: -2.2e4,
            det_nf: 8.9e3,
            mixing_mode: MixingMode::Difference,
        }
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn zero_fields_give_zero_quantities() {
        let z = Complex64::default();
        let q = two_photon_quantities(z, z, z, z, &hg()).unwrap();
        assert_eq!(q, TwoPhotonQuantities::default());
        assert_eq!(q.total_shift(), 0.0);
    }

    #[test]
    fn mercury_pump_amplitude_in_cycles() {
        // 2·0.345·(910·2π)² / (2.4e5 · 2π)
        let q = two_photon_quantities(c(910.0 * TAU), c(0.0), c(0.0), c(325.0 * TAU), &hg()).unwrap();
        let r_cyc = q.r1.norm() / TAU;
        let s_cyc = q.s / TAU;
        assert!((r_cyc - 14.96).abs() < 0.01, "R = {r_cyc}");
        assert!((s_cyc - 74.6).abs() < 0.1, "S = {s_cyc}");
        assert!(q.r1.re > 0.0 && q.r1.im.abs() < 1e-9);
    }

    #[test]
    fn mercury_self_shift_is_positive() {
        let q = two_photon_quantities(c(910.0 * TAU), c(0.0), c(0.0), c(0.0), &hg()).unwrap();
        let beta = q.s1 / q.r1.norm();
        assert!((beta - (1.0 - 0.345f64.powi(2)) / (2.0 * 0.345)).abs() < 1e-12);
        assert!(beta > 0.0);
    }

    #[test]
    fn zero_detuning_is_a_config_error() {
        let mut m = hg();
        m.det_nf = 0.0;
        let z = Complex64::default();
        assert!(matches!(two_photon_quantities(z, z, z, z, &m), Err(Error::Config(_))));
    }

    #[test]
    fn sum_mode_conjugates_probe_in_r2() {
        let g2 = Complex64::new(0.3, 0.4);
        let gm = Complex64::new(-0.1, 0.2);
        let d = two_photon_quantities(c(0.0), g2, gm, c(0.0), &hg()).unwrap();
        let s = two_photon_quantities(c(0.0), g2, gm, c(0.0), &set_mixing_mode(&hg(), MixingMode::Sum)).unwrap();
        assert!((d.r2 - (-2.0 * g2 * gm / 2.2e4)).norm() < 1e-15);
        assert!((s.r2 - (-2.0 * g2.conj() * gm / 2.2e4)).norm() < 1e-15);
    }

    #[test]
    fn drive_sample_assembles_shift() {
        let d = DriveConfig {
            delta: 1.0,
            pump: PulseSpec::gaussian(2.0, 1.0, 0.0),
            stark: PulseSpec::gaussian(3.0, 1.6, 0.5),
            beta: -0.5,
            probe: Some(ProbeTerms { pulse: PulseSpec::gaussian(0.1, 1.0, 1.0), s2: 0.2, s_mix: 0.05 }),
        };
        let t = 0.3;
        let (r1, c, shift) = d.sample(t);
        let e = (-(t - 1.0f64).powi(2)).exp();
        let expect = 3.0 * (-(t - 0.5f64).powi(2) / 2.56).exp() - 0.5 * r1 + 0.2 * e + 0.05 * e;
        assert!((shift - expect).abs() < 1e-14);
        assert!((c.re - (r1 + 0.1 * e)).abs() < 1e-14);
    }

    fn cplx() -> impl Strategy<Value = Complex64> {
        (-50.0f64..50.0, -50.0f64..50.0).prop_map(|(a, b)| Complex64::new(a, b))
    }

    proptest! {
        #[test]
        fn homogeneous_in_pump(g1 in cplx(), lam in cplx()) {
            let z = Complex64::default();
            let base = two_photon_quantities(g1, z, z, z, &hg()).unwrap();
            let scaled = two_photon_quantities(lam * g1, z, z, z, &hg()).unwrap();
            let r_expect = lam * lam * base.r1;
            prop_assert!((scaled.r1 - r_expect).norm() <= 1e-12 * (1.0 + r_expect.norm()));
            let s_expect = lam.norm_sqr() * base.s1;
            prop_assert!((scaled.s1 - s_expect).abs() <= 1e-12 * (1.0 + s_expect.abs()));
        }

        #[test]
        fn shift_is_sum_of_parts(g1 in cplx(), g2 in cplx(), gm in cplx(), gs in cplx()) {
            let q = two_photon_quantities(g1, g2, gm, gs, &hg()).unwrap();
            prop_assert_eq!(q.total_shift(), q.s + q.s1 + q.s2 + q.s_mix);
        }
    }
}
