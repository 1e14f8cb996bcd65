//! Tensor products of Reed-Muller codes: encoding, erasure completion,
//! inner decoders, the adversarial tensor decoder and the random-error
//! decoder for tensor Reed-Muller codes, plus channel simulation.

pub mod adversarial;
pub mod bits;
pub mod channel;
pub mod erasure;
pub mod error;
pub mod gf2;
pub mod inner;
pub mod oracles;
pub mod rm;
pub mod tensor;
pub mod trm;

pub use bits::{BitWord, TriWord};
pub use error::{CodeError, Result};
pub use rm::RmCode;
pub use tensor::{BitTensor, TriTensor};
pub use trm::TrmCode;
