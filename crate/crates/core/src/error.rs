use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input parameter set is inconsistent or outside the supported domain.
    #[error("configuration error: {0}")]
    Config(String),

    /// The integrated state stopped being finite.
    #[error("non-finite state at t = {time}")]
    NonFinite { time: f64 },

    /// The adaptive step shrank below the representable resolution.
    #[error("step size underflow at t = {time} (h = {step:e}){}", detail.as_deref().map(|d| format!(": {d}")).unwrap_or_default())]
    StepUnderflow { time: f64, step: f64, detail: Option<String> },

    /// A propagated field became non-finite.
    #[error("non-finite field at depth Z = {depth}, time index {time_index}")]
    NonFiniteField { depth: f64, time_index: usize },

    /// A quantity needed for normalisation vanished.
    #[error("undefined: {0}")]
    Undefined(String),

    /// Unknown preset name.
    #[error("unknown preset `{name}`; known presets: {}", known.join(", "))]
    UnknownPreset { name: String, known: Vec<String> },
}

pub type Result<T> = std::result::Result<T, Error>;
