//! Linear codes encodable by shallow circuits of weighted-addition gates
//! over finite fields, with the machinery to build and check them: field
//! arithmetic, layered linear circuits, symmetric channels and typical
//! sets, dispersers, range-detector gadgets, and the capacity-approaching
//! code built from a good mother code and a random disperser layer.
//!
//! Probability-valued code is generic over [`scalar::Real`] and count-valued
//! code over [`scalar::Count`]; the aliases below fix the usual choices.

pub mod ackermann;
pub mod channel;
pub mod circuit;
pub mod codec;
pub mod disperser;
pub mod gadgets;
pub mod galois;
pub mod limits;
pub mod linalg;
pub mod rng;
pub mod scalar;
pub mod typical;

pub use ackermann::BigCount;
pub use circuit::LinearCircuit;
pub use codec::{CodeInstance, CodecConfig};
pub use galois::{FieldElement, FieldSpec};
pub use rng::Stream;

pub type Channel = channel::ChannelSpec<f64>;
pub type ChannelF32 = channel::ChannelSpec<f32>;
pub type TypicalParams<'a> = typical::TypicalParams<'a, f64>;
