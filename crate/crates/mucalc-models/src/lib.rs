//! Finite labeled transition systems and integer-time timed transition
//! systems, with predecessor sets, delay trajectories and valuations.

mod delay;
mod load;
mod model;
mod valuation;

pub use delay::{delay_table, validate_tts, DelayProfile, Horizon, TtsViolation};
pub use load::{load_model, load_valuation, LoadError};
pub use model::{BuildError, Modality, Model, ModelKind, StateSet};
pub use valuation::Valuation;
