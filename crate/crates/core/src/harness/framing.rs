//! Multi-block payload framing.
//!
//! A cover file is read as a bit string (MSB-first within each byte) and cut
//! into consecutive `n`-bit blocks; any trailing remainder is never touched.
//! Each block carries `n - k` bits of the stream
//!
//! ```text
//! [ message bit length: u32, big-endian ][ message bytes ]
//! ```
//!
//! Blocks past the end of the stream are left as they are. In the last
//! used block, slots past the end of the stream take the block's current
//! syndrome bits, so they cost nothing to embed.

use rayon::prelude::*;
use serde::Serialize;

use crate::embed::StegoContext;
use crate::error::{Error, Result};
use crate::gf2::BitVector;

pub const LENGTH_PREFIX_BITS: usize = 32;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmbedStats {
    pub blocks: usize,
    pub blocks_used: usize,
    pub message_bytes: usize,
    pub total_changes: usize,
    /// Mean changes over the blocks that carry payload.
    pub mean_changes_per_block: f64,
}

/// Usable cover blocks for a cover of `cover_bytes` bytes.
pub fn block_count(ctx: &StegoContext, cover_bytes: usize) -> usize {
    cover_bytes * 8 / ctx.block_len()
}

/// Largest message, in bytes, that fits in a cover of `cover_bytes` bytes.
pub fn capacity_bytes(ctx: &StegoContext, cover_bytes: usize) -> usize {
    let bits = block_count(ctx, cover_bytes) * ctx.message_len();
    bits.saturating_sub(LENGTH_PREFIX_BITS) / 8
}

fn block(bits: &BitVector, index: usize, n: usize) -> BitVector {
    bits.slice(index * n, (index + 1) * n)
}

pub fn embed_payload(
    ctx: &StegoContext,
    cover: &[u8],
    message: &[u8],
) -> Result<(Vec<u8>, EmbedStats)> {
    let max_bytes = capacity_bytes(ctx, cover.len());
    let blocks = block_count(ctx, cover.len());
    if blocks == 0 || message.len() > max_bytes {
        return Err(Error::Capacity {
            needed: message.len(),
            max_bytes,
        });
    }
    let (n, r) = (ctx.block_len(), ctx.message_len());
    let bit_len = u32::try_from(message.len() * 8).map_err(|_| Error::Capacity {
        needed: message.len(),
        max_bytes,
    })?;
    let mut stream = BitVector::from_bytes_msb(&bit_len.to_be_bytes(), LENGTH_PREFIX_BITS)?;
    stream.extend_from(&BitVector::from_bytes_msb(message, message.len() * 8)?);
    let used = stream.len().div_ceil(r);

    let cover_bits = BitVector::from_bytes_msb(cover, cover.len() * 8)?;
    let embedded = (0..used)
        .into_par_iter()
        .map(|b| {
            let y = block(&cover_bits, b, n);
            let start = b * r;
            let end = (start + r).min(stream.len());
            let mut m = stream.slice(start, end);
            if m.len() < r {
                let current = ctx.ext(&y)?;
                for j in m.len()..r {
                    m.push(current.get(j));
                }
            }
            ctx.emb(&y, &m)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut out_bits = cover_bits;
    let mut total_changes = 0;
    for (b, emb) in embedded.iter().enumerate() {
        total_changes += emb.changes;
        for j in 0..n {
            out_bits.set(b * n + j, emb.stego.get(j));
        }
    }
    Ok((
        out_bits.to_bytes_msb(),
        EmbedStats {
            blocks,
            blocks_used: used,
            message_bytes: message.len(),
            total_changes,
            mean_changes_per_block: total_changes as f64 / used as f64,
        },
    ))
}

pub fn extract_payload(ctx: &StegoContext, stego: &[u8]) -> Result<Vec<u8>> {
    let (n, r) = (ctx.block_len(), ctx.message_len());
    let blocks = block_count(ctx, stego.len());
    let capacity_bits = blocks * r;
    if capacity_bits < LENGTH_PREFIX_BITS {
        return Err(Error::Integrity(format!(
            "{} bytes hold only {capacity_bits} payload bits, too few for a length prefix",
            stego.len()
        )));
    }
    let bits = BitVector::from_bytes_msb(stego, stego.len() * 8)?;
    let read = |upto: usize| -> Result<BitVector> {
        let need = upto.div_ceil(r);
        let parts = (0..need)
            .into_par_iter()
            .map(|b| ctx.ext(&block(&bits, b, n)))
            .collect::<Result<Vec<_>>>()?;
        let mut s = BitVector::with_capacity(need * r);
        for p in &parts {
            s.extend_from(p);
        }
        Ok(s)
    };

    let head = read(LENGTH_PREFIX_BITS)?;
    let prefix: [u8; 4] = head
        .slice(0, LENGTH_PREFIX_BITS)
        .to_bytes_msb()
        .try_into()
        .expect("4 bytes");
    let bit_len = u32::from_be_bytes(prefix) as usize;
    if !bit_len.is_multiple_of(8) {
        return Err(Error::Integrity(format!(
            "length prefix {bit_len} is not a whole number of bytes"
        )));
    }
    if LENGTH_PREFIX_BITS + bit_len > capacity_bits {
        return Err(Error::Integrity(format!(
            "length prefix {bit_len} exceeds the {capacity_bits}-bit capacity"
        )));
    }
    let stream = read(LENGTH_PREFIX_BITS + bit_len)?;
    Ok(stream
        .slice(LENGTH_PREFIX_BITS, LENGTH_PREFIX_BITS + bit_len)
        .to_bytes_msb())
}
