//! Matrix embedding of `n - k` message bits into an `n`-bit cover block.

use crate::code::StGenCode;
use crate::decoder::{decode_close, DecoderConfig};
use crate::error::{check_len, Error, Result};
use crate::gf2::BitVector;

#[derive(Clone, Debug)]
pub struct StegoContext {
    pub code: StGenCode,
    pub decoder: DecoderConfig,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    pub stego: BitVector,
    /// Number of flipped cover bits, `d(y, y')`.
    pub changes: usize,
}

impl StegoContext {
    pub fn new(code: StGenCode, decoder: DecoderConfig) -> Result<Self> {
        decoder.validate()?;
        if code.n() == code.k() {
            return Err(Error::Parameter(
                "code carries no message bits (n = k)".into(),
            ));
        }
        Ok(StegoContext { code, decoder })
    }

    pub fn message_len(&self) -> usize {
        self.code.n() - self.code.k()
    }

    pub fn block_len(&self) -> usize {
        self.code.n()
    }

    /// Flips as few bits of `cover` as the decoder can manage so that the
    /// syndrome of the result equals `message`.
    pub fn emb(&self, cover: &BitVector, message: &BitVector) -> Result<Embedding> {
        check_len("cover block", self.block_len(), cover.len())?;
        check_len("message block", self.message_len(), message.len())?;
        let mut z = self.code.syndrome(cover)?;
        z.xor_assign(message)?;
        // Systematic coset representative: its syndrome is z itself.
        let c0 = BitVector::zeros(self.code.k()).concat(&z);
        debug_assert_eq!(self.code.syndrome(&c0)?, z);
        let found = decode_close(&self.code, &c0, &self.decoder)?;
        let stego = cover.xor(&found.e)?;
        Ok(Embedding {
            stego,
            changes: found.weight,
        })
    }

    pub fn ext(&self, stego: &BitVector) -> Result<BitVector> {
        self.code.syndrome(stego)
    }

    /// Embedding rate `(n-k)/n` and efficiency `(n-k)/R_a` for a measured
    /// mean distortion.
    pub fn rate_and_efficiency(&self, mean_distortion: f64) -> Result<(f64, f64)> {
        if mean_distortion.is_nan() || mean_distortion <= 0.0 {
            return Err(Error::Parameter(format!(
                "mean distortion must be positive, got {mean_distortion}"
            )));
        }
        let m = self.message_len() as f64;
        Ok((m / self.block_len() as f64, m / mean_distortion))
    }
}
