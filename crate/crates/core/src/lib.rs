//! Staircase-generator (St-Gen) binary linear codes for steganographic
//! matrix embedding.
//!
//! - [`gf2`]: packed GF(2) vectors and matrices.
//! - [`code`]: code construction, the base-code catalog and descriptors.
//! - [`decoder`]: the bounded-list decoder that finds a close codeword.
//! - [`embed`]: embedding and extraction on single cover blocks.
//! - [`distortion`]: expected distortion and list sizes, entropy bound.
//! - [`oracle`]: exhaustive checks for small codes.
//! - [`harness`]: payload framing, experiments and self-verification used by
//!   the command-line tool.

pub mod code;
pub mod decoder;
pub mod distortion;
pub mod embed;
pub mod error;
pub mod gf2;
pub mod harness;
pub mod oracle;

pub use code::{base_catalog, BaseCode, CodeDescriptor, StGenCode, StGenParams, TABLE2};
pub use decoder::{decode_close, DecodeResult, DecoderConfig, ListEntry};
pub use distortion::{
    binary_entropy, distortion_profile, efficiency_bound, entropy_inverse, list_dynamics_report,
    DistortionProfile, DynamicsReport,
};
pub use embed::{Embedding, StegoContext};
pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVector};
pub use oracle::{Nearest, OracleBudget};
