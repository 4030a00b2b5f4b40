//! Laser pulse envelopes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum PulseShape {
    #[default]
    Gaussian,
    Rectangular,
}

/// One pulse envelope in scaled units.
///
/// `amplitude` is the peak value in `1/τ₁` (angular), `width_ratio` is the
/// duration `τ_i/τ₁` and `delay` the centre `Δτ_i/τ₁`. For a Gaussian the
/// one-photon envelope falls to `e^{-1/2}` (power `e^{-1}`) at
/// `delay ± width_ratio`. For a rectangle the pulse is on over the closed
/// interval `[delay - width_ratio/2, delay + width_ratio/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseSpec {
    #[serde(default)]
    pub shape: PulseShape,
    pub amplitude: f64,
    #[serde(default = "unit_width")]
    pub width_ratio: f64,
    #[serde(default)]
    pub delay: f64,
}

fn unit_width() -> f64 {
    1.0
}

impl PulseSpec {
    pub fn gaussian(amplitude: f64, width_ratio: f64, delay: f64) -> Self {
        PulseSpec { shape: PulseShape::Gaussian, amplitude, width_ratio, delay }
    }

    pub fn rectangular(amplitude: f64, width_ratio: f64, delay: f64) -> Self {
        PulseSpec { shape: PulseShape::Rectangular, amplitude, width_ratio, delay }
    }

    /// A pulse that is identically zero.
    pub fn off() -> Self {
        PulseSpec::gaussian(0.0, 1.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width_ratio.is_finite() && self.width_ratio > 0.0) {
            return Err(Error::Config(format!("pulse width_ratio must be > 0, got {}", self.width_ratio)));
        }
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return Err(Error::Config(format!("pulse amplitude must be >= 0, got {}", self.amplitude)));
        }
        if !self.delay.is_finite() {
            return Err(Error::Config("pulse delay must be finite".into()));
        }
        Ok(())
    }

    pub fn is_off(&self) -> bool {
        self.amplitude == 0.0
    }

    /// One-photon envelope `g(t)`.
    pub fn envelope(&self, t: f64) -> f64 {
        self.shaped(t, 2.0)
    }

    /// Envelope of the two-photon quantities built from this pulse
    /// (`r_i`, `s_i`), which follow the squared one-photon profile:
    /// `amplitude · exp(-(t - delay)² / width²)`.
    pub fn two_photon_envelope(&self, t: f64) -> f64 {
        self.shaped(t, 1.0)
    }

    fn shaped(&self, t: f64, denom: f64) -> f64 {
        if self.amplitude == 0.0 {
            return 0.0;
        }
        let x = t - self.delay;
        match self.shape {
            PulseShape::Gaussian => self.amplitude * (-(x * x) / (denom * self.width_ratio * self.width_ratio)).exp(),
            PulseShape::Rectangular => {
                if x.abs() <= 0.5 * self.width_ratio {
                    self.amplitude
                } else {
                    0.0
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn peak_value_at_delay() {
        let p = PulseSpec::gaussian(1.0, 1.3, 0.7);
        assert_eq!(p.envelope(0.7), 1.0);
        assert_eq!(p.two_photon_envelope(0.7), 1.0);
    }

    #[test]
    fn power_falls_to_e_inverse_at_one_width() {
        let g0 = 2.5;
        let p = PulseSpec::gaussian(g0, 1.6, -3.0);
        let v = p.envelope(-3.0 + 1.6);
        assert!((v - g0 * (-0.5f64).exp()).abs() < 1e-15);
        assert!(((v / g0).powi(2) - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn two_photon_profile_is_square_of_one_photon() {
        let p = PulseSpec::gaussian(1.0, 1.6, 0.4);
        for &t in &[-2.0, 0.0, 0.4, 1.1, 3.7] {
            assert!((p.two_photon_envelope(t) - p.envelope(t).powi(2)).abs() < 1e-15);
        }
    }

    #[test]
    fn null_pulse_is_zero() {
        let p = PulseSpec::gaussian(0.0, 1.0, 0.0);
        assert_eq!(p.envelope(0.0), 0.0);
        assert_eq!(p.envelope(-17.0), 0.0);
    }

    #[test]
    fn rectangular_is_on_over_closed_interval() {
        let p = PulseSpec::rectangular(2.0, 4.0, 1.0);
        assert_eq!(p.envelope(-1.0), 2.0);
        assert_eq!(p.envelope(3.0), 2.0);
        assert_eq!(p.envelope(3.0 + 1e-9), 0.0);
        assert_eq!(p.two_photon_envelope(1.0), 2.0);
    }

    #[test]
    fn rejects_bad_widths() {
        assert!(PulseSpec::gaussian(1.0, 0.0, 0.0).validate().is_err());
        assert!(PulseSpec::gaussian(-1.0, 1.0, 0.0).validate().is_err());
        assert!(PulseSpec::gaussian(1.0, 1.0, 0.0).validate().is_ok());
    }

    proptest! {
        #[test]
        fn gaussian_is_symmetric(a in 0.0f64..100.0, w in 0.1f64..5.0, d in -5.0f64..5.0, x in 0.0f64..10.0) {
            let p = PulseSpec::gaussian(a, w, d);
            let (l, r) = (p.envelope(d + x), p.envelope(d - x));
            prop_assert!((l - r).abs() <= 1e-12 * a.max(1.0));
        }
    }
}
