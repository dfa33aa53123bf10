//! Rate-adaptive raptor-like LDPC codes: construction, encoding and sum-product decoding.

mod code;
mod decoder;
mod encoder;
mod matrix;

pub use code::{
    build_code, extend_base, CodeParams, CodeSpec, DegreeProfile, ExtensionParams, HrcParams, RateGrid,
    CONTAINER_VERSION, PRODUCTION_MAX_N, PRODUCTION_MIN_N,
};
pub use decoder::{decode, DecodeResult, Subgraph, DEFAULT_MAX_ITER, LLR_CLIP};
pub use encoder::Encoder;
pub use matrix::ParityCheckMatrix;

/// Codeword at `rate`: systematic base encoding followed by the extension parities in use.
pub fn encode(spec: &CodeSpec, rate: f64, payload: &[u8]) -> crate::Result<Vec<u8>> {
    RateEncoder::new(spec)?.encode(rate, payload)
}

/// Encoder reusable across rates of one code.
#[derive(Debug, Clone)]
pub struct RateEncoder<'a> {
    spec: &'a CodeSpec,
    base: Encoder,
}

impl<'a> RateEncoder<'a> {
    pub fn new(spec: &'a CodeSpec) -> crate::Result<Self> {
        Ok(Self { spec, base: Encoder::new(spec.base())? })
    }

    pub fn encode(&self, rate: f64, payload: &[u8]) -> crate::Result<Vec<u8>> {
        let p = self.spec.rows_for_rate(rate)?;
        let mut word = self.base.encode(payload)?;
        word.reserve(p);
        for row in &self.spec.extension()[..p] {
            let bit = row.iter().fold(0u8, |acc, &c| acc ^ word[c as usize]);
            word.push(bit);
        }
        Ok(word)
    }
}

/// Syndrome of `word` against the rate-`rate` subcode.
pub fn syndrome(spec: &CodeSpec, rate: f64, word: &[u8]) -> crate::Result<Vec<u8>> {
    spec.syndrome(rate, word)
}
