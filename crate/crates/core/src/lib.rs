//! Bergman-space norms and pairwise interaction energies of simple partial
//! fractions with poles on the unit circle.

pub mod error;
pub mod interaction;
pub mod moments;
pub mod norms;
pub mod optimize;
pub mod quadrature;
pub mod sequences;
pub mod special;
pub mod trig_series;

pub use error::{Error, Result};
pub use interaction::{Interaction, SpaceParams, TruncatedCosineSeries};
pub use norms::CircleConfig;
pub use optimize::OptimizationResult;
pub use sequences::{ConvexifyResult, RealSequencePrefix};
pub use trig_series::ValueWithError;
