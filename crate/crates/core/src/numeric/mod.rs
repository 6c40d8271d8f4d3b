//! Vector arithmetic, splittable random streams, streaming statistics and
//! double-double arithmetic shared by the rest of the crate.

pub mod extended;
pub mod rng;
pub mod stats;
pub mod vector;

pub use extended::DoubleDouble;
pub use rng::{gaussian_vector, make_stream, purpose, RngStream, StreamRng};
pub use stats::{moments, MomentAccumulator, NeumaierSum};
