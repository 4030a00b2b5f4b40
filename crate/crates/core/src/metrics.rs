//! Photon-conversion observables.
//!
//! Energies are compared in photon numbers, scaled to the entry photon
//! number of the probe. With `K_j ∝ ω_j |d_j|²` and the generated wave's
//! coupling normalized to 1, the factor `ω₂|d_ln|² / (ω_j|d_j|²)` reduces to
//! a ratio of coupling constants:
//!
//! ```text
//! w₂ = 1      w₋ = K₂ / K₋      w₁ = K₂ / K₁
//! ```
//!
//! where `d₁ = d_gm`, `d₂ = d_ln` and `d₋ = d_gl`.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::MediumSpec;
use crate::propagation::FieldSlice;
use crate::twolevel::fmt;

/// One value per propagating field.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FieldValues {
    pub g1: f64,
    pub g2: f64,
    pub gmix: f64,
}

pub fn photon_weights(m: &MediumSpec) -> Result<FieldValues> {
    for (name, k) in [("k1", m.k1), ("k2", m.k2), ("k_mix", m.k_mix)] {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::Config(format!("coupling `{name}` must be positive, got {k}")));
        }
    }
    Ok(FieldValues { g1: m.k2 / m.k1, g2: 1.0, gmix: m.k2 / m.k_mix })
}

/// Trapezoidal `∫|g|² dt` on a uniform grid of spacing `dt`.
pub fn pulse_energy(g: &[Complex64], dt: f64) -> f64 {
    match g.len() {
        0 | 1 => 0.0,
        n => {
            let inner: f64 = g[1..n - 1].iter().map(|x| x.norm_sqr()).sum();
            dt * (inner + 0.5 * (g[0].norm_sqr() + g[n - 1].norm_sqr()))
        }
    }
}

pub fn peak_power(g: &[Complex64]) -> f64 {
    g.iter().map(|x| x.norm_sqr()).fold(0.0, f64::max)
}

fn check_grids(slice: &FieldSlice, entry: &FieldSlice) -> Result<()> {
    if slice.grid != entry.grid {
        return Err(Error::Config("metrics need both slices on the same time grid".into()));
    }
    Ok(())
}

fn scaled_gain(now: [f64; 3], then: [f64; 3], w: FieldValues, what: &str) -> Result<FieldValues> {
    let norm = then[1];
    if norm <= 0.0 {
        return Err(Error::Undefined(format!("{what} is undefined for a probe with zero entry {what}")));
    }
    let g = |k: usize| (now[k] - then[k]) / norm;
    Ok(FieldValues { g1: g(0) * w.g1, g2: g(1) * w.g2, gmix: g(2) * w.gmix })
}

fn energies(s: &FieldSlice) -> [f64; 3] {
    let dt = s.grid.dt();
    [pulse_energy(&s.g1, dt), pulse_energy(&s.g2, dt), pulse_energy(&s.gmix, dt)]
}

fn peaks(s: &FieldSlice) -> [f64; 3] {
    [peak_power(&s.g1), peak_power(&s.g2), peak_power(&s.gmix)]
}

/// Photon-weighted energy gain of every field relative to the entry probe.
pub fn eps_ph(slice: &FieldSlice, entry: &FieldSlice, m: &MediumSpec) -> Result<FieldValues> {
    check_grids(slice, entry)?;
    scaled_gain(energies(slice), energies(entry), photon_weights(m)?, "energy")
}

/// Photon-weighted peak-power gain of every field relative to the entry probe.
pub fn w_ph_max(slice: &FieldSlice, entry: &FieldSlice, m: &MediumSpec) -> Result<FieldValues> {
    check_grids(slice, entry)?;
    scaled_gain(peaks(slice), peaks(entry), photon_weights(m)?, "peak power")
}

/// `L∞` distance between two pulses after scaling each to unit peak.
pub fn shape_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::Config(format!("pulse lengths differ: {} vs {}", a.len(), b.len())));
    }
    let pa = a.iter().copied().fold(0.0, f64::max);
    let pb = b.iter().copied().fold(0.0, f64::max);
    if !(pa > 0.0 && pb > 0.0) {
        return Err(Error::Undefined("shape distance needs pulses with a positive peak".into()));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x / pa - y / pb).abs()).fold(0.0, f64::max))
}

/// Intensity profile `|g|²` of an envelope.
pub fn intensity(g: &[Complex64]) -> Vec<f64> {
    g.iter().map(|x| x.norm_sqr()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConversionMetrics {
    pub eps_ph: FieldValues,
    pub w_ph_max: FieldValues,
    pub g1_energy_ratio: f64,
}

impl ConversionMetrics {
    pub fn compute(slice: &FieldSlice, entry: &FieldSlice, m: &MediumSpec) -> Result<Self> {
        let e1 = energies(entry)[0];
        let g1_energy_ratio = if e1 > 0.0 { energies(slice)[0] / e1 } else { 1.0 };
        Ok(ConversionMetrics {
            eps_ph: eps_ph(slice, entry, m)?,
            w_ph_max: w_ph_max(slice, entry, m)?,
            g1_energy_ratio,
        })
    }
}

pub const METRICS_CSV_HEADER: &str = "Z,eps_ph_g1,eps_ph_g2,eps_ph_gmix,wph_g2,wph_gmix,g1_energy_ratio";

pub fn write_metrics_csv<W: Write>(mut w: W, rows: &[(f64, ConversionMetrics)]) -> std::io::Result<()> {
    writeln!(w, "{METRICS_CSV_HEADER}")?;
    for (z, m) in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            fmt(*z),
            fmt(m.eps_ph.g1),
            fmt(m.eps_ph.g2),
            fmt(m.eps_ph.gmix),
            fmt(m.w_ph_max.g2),
            fmt(m.w_ph_max.gmix),
            fmt(m.g1_energy_ratio)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::PulseSpec;
    use crate::twolevel::TimeGrid;

    fn medium(k1: f64, k2: f64, k_mix: f64) -> MediumSpec {
        MediumSpec {
            a: 0.345,
            k1,
            k2,
            k_mix,
            det_gm: -2.4e5,
            det_ln: -2.2e4,
            det_nf: 8.9e3,
            mixing_mode: Default::default(),
        }
    }

    fn entry(grid: TimeGrid) -> FieldSlice {
        FieldSlice::from_pulses(
            grid,
            &PulseSpec::gaussian(3.0, 1.0, 0.0),
            &PulseSpec::gaussian(0.1, 1.0, 1.0),
            &PulseSpec::off(),
        )
    }

    #[test]
    fn weights() {
        let w = photon_weights(&medium(0.67, 0.04, 1.0)).unwrap();
        assert_eq!(w.g2, 1.0);
        assert!((w.gmix - 0.04).abs() < 1e-15);
        assert!((w.g1 - 0.0597).abs() < 1e-4);
        assert_eq!(photon_weights(&medium(1.0, 1.0, 1.0)).unwrap(), FieldValues { g1: 1.0, g2: 1.0, gmix: 1.0 });
        assert!((photon_weights(&medium(0.67, 0.4, 1.0)).unwrap().gmix - 0.4).abs() < 1e-15);
        assert!(photon_weights(&medium(0.0, 0.04, 1.0)).is_err());
    }

    #[test]
    fn unchanged_slice_has_zero_gain() {
        let m = medium(0.67, 0.04, 1.0);
        let e = entry(TimeGrid::default());
        let c = ConversionMetrics::compute(&e, &e, &m).unwrap();
        assert_eq!(c.eps_ph, FieldValues::default());
        assert_eq!(c.w_ph_max, FieldValues::default());
        assert_eq!(c.g1_energy_ratio, 1.0);
    }

    #[test]
    fn generated_from_zero_is_nonnegative() {
        let m = medium(0.67, 0.04, 1.0);
        let e = entry(TimeGrid::default());
        let mut s = e.clone();
        let gen = PulseSpec::gaussian(0.3, 1.0, 0.5);
        s.gmix = s.grid.times().iter().map(|&t| Complex64::new(0.0, gen.envelope(t))).collect();
        let eps = eps_ph(&s, &e, &m).unwrap();
        let dt = e.grid.dt();
        let expected = 0.04 * pulse_energy(&s.gmix, dt) / pulse_energy(&e.g2, dt);
        assert!(eps.gmix > 0.0);
        assert!((eps.gmix - expected).abs() < 1e-15);
    }

    #[test]
    fn zero_probe_is_undefined() {
        let m = medium(0.67, 0.04, 1.0);
        let mut e = entry(TimeGrid::default());
        e.g2.iter_mut().for_each(|x| *x = Complex64::default());
        assert!(matches!(eps_ph(&e, &e, &m), Err(Error::Undefined(_))));
        assert!(matches!(w_ph_max(&e, &e, &m), Err(Error::Undefined(_))));
    }

    #[test]
    fn energy_converges_with_resolution() {
        let coarse = entry(TimeGrid::new(-6.0, 12.0, 513).unwrap());
        let fine = entry(TimeGrid::new(-6.0, 12.0, 1025).unwrap());
        let ec = pulse_energy(&coarse.g2, coarse.grid.dt());
        let ef = pulse_energy(&fine.g2, fine.grid.dt());
        assert!(((ec - ef) / ef).abs() < 1e-3);
        // ∫ exp(-t²) dt = √π for unit amplitude
        assert!((ef / 0.01 - std::f64::consts::PI.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn shape_distance_properties() {
        let grid = TimeGrid::default();
        let p = |d: f64| -> Vec<f64> { grid.times().iter().map(|&t| (-(t - d) * (t - d)).exp()).collect() };
        let a = p(0.0);
        let scaled: Vec<f64> = a.iter().map(|x| 7.0 * x).collect();
        assert!(shape_distance(&a, &scaled).unwrap() < 1e-15);
        assert_eq!(shape_distance(&a, &a).unwrap(), 0.0);
        let shifted = p(1.0);
        let d = shape_distance(&a, &shifted).unwrap();
        assert!(d > 0.3, "{d}");
        assert_eq!(d, shape_distance(&shifted, &a).unwrap());
        assert!(shape_distance(&a, &vec![0.0; a.len()]).is_err());
        assert!(shape_distance(&a, &a[1..]).is_err());
    }

    #[test]
    fn metrics_csv_header_and_rows() {
        let m = medium(0.67, 0.04, 1.0);
        let e = entry(TimeGrid::default());
        let c = ConversionMetrics::compute(&e, &e, &m).unwrap();
        let mut buf = Vec::new();
        write_metrics_csv(&mut buf, &[(0.0, c), (1e6, c)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], METRICS_CSV_HEADER);
        assert_eq!(lines.len(), 3);
        assert!(lines[2].starts_with("1.000000000000e6,"));
    }
}
