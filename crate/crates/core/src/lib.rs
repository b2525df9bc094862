//! A k-deletion correcting code over binary sequences.
//!
//! A message `c` is mapped to a dense sequence `T(c)` that carries
//! synchronization patterns at bounded spacing, followed by a moment hash of
//! its synchronization vector, a block-wise Reed–Solomon hash, and a repeated
//! small-block hash protecting that redundancy. [`Codec`] ties the layers
//! together; the lower-level modules are public so each layer can be tested
//! and inspected on its own.

pub mod bitseq;
pub mod codec;
pub mod dense_hash;
pub mod error;
pub mod moment;
pub mod rs;
pub mod small_hash;
pub mod syncvec;
pub mod transform;
pub mod vt;

pub use bitseq::BitSeq;
pub use codec::{make_layout, CodeLayout, Codec, Codeword};
pub use dense_hash::BlockBound;
pub use error::{Error, Phase, Result};
pub use syncvec::SyncParams;
