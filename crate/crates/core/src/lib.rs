//! CV-QKD post-processing: key-rate calculus, distance adaptation and information
//! reconciliation over a rate-adaptive LDPC code.

pub mod adaptation;
pub mod error;
pub mod harness;
pub mod ldpc;
pub mod link;
pub mod mdr;
pub mod octonion;
pub mod security;

pub use error::{Error, Result};
