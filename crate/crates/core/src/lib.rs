//! Two-photon coherence control and four-wave mixing in a five-level ladder.
//!
//! The crate models a ladder `g → m → n` driven by a two-photon pump, with
//! an auxiliary level `l` coupled by a probe and a generated wave, and a
//! far level `f` reached by a Stark-shifting field. Adiabatically eliminating
//! the intermediate coherences leaves a driven two-level system whose
//! resonance can be swept by a delayed Stark pulse; that sweep freezes the
//! two-photon coherence near its maximum and so maximizes nonlinear
//! conversion.
//!
//! Modules, bottom-up:
//!
//! - [`units`], [`pulse`], [`model`]: conventions, envelopes, medium and drive.
//! - [`twolevel`]: the reduced equations and their closed forms.
//! - [`multilevel`]: the full five-level density matrix, used as an oracle.
//! - [`propagation`]: coupled field/atom propagation through the medium.
//! - [`metrics`]: photon-conversion efficiencies and shape distances.
//! - [`scenarios`]: the named parameter presets.
//!
//! ```
//! use scrap_fwm::{evolve, DriveConfig, TimeGrid};
//!
//! // a resonant Gaussian π/2 pulse leaves maximal coherence behind
//! let drive = DriveConfig::pump_only(0.0, std::f64::consts::PI.sqrt() / 2.0);
//! let tr = evolve(&drive, &TimeGrid::default(), 1e-9).unwrap();
//! assert!((tr.final_coherence() - 0.5).abs() < 1e-4);
//! ```

pub mod error;
pub mod metrics;
pub mod model;
pub mod multilevel;
pub mod ode;
pub mod propagation;
pub mod pulse;
pub mod scenarios;
pub mod twolevel;
pub mod units;

pub use error::{Error, Result};

/// Version of this crate, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use model::{
    set_mixing_mode, two_photon_quantities, DriveConfig, MediumSpec, MixingMode, OnePhotonFields, ProbeTerms,
    TwoLevelState, TwoPhotonQuantities,
};
pub use pulse::{PulseShape, PulseSpec};
pub use twolevel::{
    analytic_rectangular, coherence_stats, crossing_times, evolve, evolve_with, pi_half_detuning, CoherenceStats,
    TimeGrid, Trajectory,
};
pub use units::{convert_units, UnitConvention};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/two-level.md")]
    mod two_level {}
    #[doc = include_str!("../../../book/src/stark-control.md")]
    mod stark_control {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/propagation.md")]
    mod propagation {}
    #[doc = include_str!("../../../book/src/presets.md")]
    mod presets {}
}
