//! Scaled-unit conventions.
//!
//! Every rate in the crate (Rabi amplitudes, detunings, Stark shifts) is
//! measured in units of the inverse pump duration `1/τ₁`. Two conventions
//! are in circulation for those scaled numbers:
//!
//! * **angular**: the quantity is `ω·τ₁` (used for the generalized two-level
//!   studies and everywhere internally);
//! * **cyclic**: the quantity is `ω·τ₁/2π`, i.e. the number of cycles per
//!   pump duration (used for the mercury scenario amplitudes `G_i`).
//!
//! Internal computation is always angular; the cyclic convention exists only
//! at the edges (presets, CLI input).

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum UnitConvention {
    #[default]
    Angular,
    Cyclic,
}

impl UnitConvention {
    /// Factor that turns a value in this convention into angular units.
    pub fn to_angular_factor(self) -> f64 {
        match self {
            UnitConvention::Angular => 1.0,
            UnitConvention::Cyclic => TAU,
        }
    }
}

impl std::str::FromStr for UnitConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "angular" => Ok(UnitConvention::Angular),
            "cyclic" => Ok(UnitConvention::Cyclic),
            other => Err(format!("unknown unit convention `{other}` (expected angular|cyclic)")),
        }
    }
}

/// Re-expresses a scaled rate `x` given in `from` in the `to` convention.
pub fn convert_units(x: f64, from: UnitConvention, to: UnitConvention) -> f64 {
    match (from, to) {
        (UnitConvention::Angular, UnitConvention::Cyclic) => x / TAU,
        (UnitConvention::Cyclic, UnitConvention::Angular) => x * TAU,
        _ => x,
    }
}
