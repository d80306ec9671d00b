//! Exhaustive ground truth for small codes.
//!
//! Nothing here samples or approximates: inputs beyond the budget are
//! refused with [`Error::Budget`].

use crate::error::{check_len, Error, Result};
use crate::gf2::{BitMatrix, BitVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleBudget {
    /// Cap on `k` for `2^k` codeword scans.
    pub max_k: usize,
    /// Cap on `n` for scans over all `2^n` words.
    pub max_n: usize,
}

impl Default for OracleBudget {
    fn default() -> Self {
        OracleBudget {
            max_k: 20,
            max_n: 24,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nearest {
    pub x: BitVector,
    pub distance: usize,
}

/// Word-packing limits of the scans, whatever the configured budget.
const HARD_MAX_K: usize = 63;
const HARD_MAX_N: usize = 31;

impl OracleBudget {
    fn check_k(&self, k: usize) -> Result<()> {
        let limit = self.max_k.min(HARD_MAX_K);
        if k > limit {
            return Err(Error::Budget {
                what: "k",
                value: k,
                limit,
            });
        }
        Ok(())
    }

    fn check_n(&self, n: usize) -> Result<()> {
        let limit = self.max_n.min(HARD_MAX_N);
        if n > limit {
            return Err(Error::Budget {
                what: "n",
                value: n,
                limit,
            });
        }
        Ok(())
    }

    /// Closest codeword `x·G` to `word` over all `2^k` messages. Ties go to
    /// the lexicographically smallest `x`.
    pub fn nearest_codeword(&self, g: &BitMatrix, word: &BitVector) -> Result<Nearest> {
        let k = g.rows();
        self.check_k(k)?;
        check_len("word", g.cols(), word.len())?;

        // Gray-code walk: step t flips message bit tz(t). `key` orders
        // messages lexicographically (bit 0 most significant).
        let mut diff = word.clone();
        let mut gray = 0u64;
        let mut best = (diff.weight(), 0u64);
        for t in 1..(1u64 << k) {
            let bit = t.trailing_zeros() as usize;
            diff.xor_assign(g.row(bit))?;
            gray ^= 1 << bit;
            let d = diff.weight();
            let key = lex_key(gray, k);
            if d < best.0 || (d == best.0 && key < best.1) {
                best = (d, key);
            }
        }
        let x = BitVector::from_bits((0..k).map(|i| (best.1 >> (k - 1 - i)) & 1 == 1));
        Ok(Nearest {
            x,
            distance: best.0,
        })
    }

    pub fn covering_radius(&self, g: &BitMatrix) -> Result<usize> {
        let dist = self.coset_distances(g)?;
        Ok(dist.iter().copied().max().unwrap_or(0) as usize)
    }

    /// `2^-n · Σ_y d(y, C)`; exact up to the final division.
    pub fn average_distance(&self, g: &BitMatrix) -> Result<f64> {
        let dist = self.coset_distances(g)?;
        let total: u64 = dist.iter().map(|&d| d as u64).sum();
        Ok(total as f64 / dist.len() as f64)
    }

    /// Distance to the code for every coset of `C` in `F_2^n`.
    ///
    /// `d(y, C)` only depends on the coset of `y`, and all cosets have
    /// `|C|` elements, so covering radius and mean distance over all `2^n`
    /// words follow from one breadth-first pass over the `2^(n - rank)`
    /// cosets, with unit vectors as edges.
    fn coset_distances(&self, g: &BitMatrix) -> Result<Vec<u8>> {
        let n = g.cols();
        self.check_n(n)?;
        self.check_k(g.rows())?;

        let mut basis: Vec<(usize, u32)> = Vec::new();
        for row in g.row_iter() {
            let mut r = to_mask(row);
            for &(p, b) in &basis {
                if (r >> p) & 1 == 1 {
                    r ^= b;
                }
            }
            if r != 0 {
                let p = r.trailing_zeros() as usize;
                for (_, b) in basis.iter_mut() {
                    if (*b >> p) & 1 == 1 {
                        *b ^= r;
                    }
                }
                basis.push((p, r));
            }
        }
        let pivots: u32 = basis.iter().fold(0, |m, &(p, _)| m | (1 << p));
        let free: Vec<usize> = (0..n).filter(|&c| (pivots >> c) & 1 == 0).collect();

        let coset_of = |y: u32| -> usize {
            let mut y = y;
            for &(p, b) in &basis {
                if (y >> p) & 1 == 1 {
                    y ^= b;
                }
            }
            free.iter().enumerate().fold(0usize, |acc, (i, &c)| {
                acc | ((((y >> c) & 1) as usize) << i)
            })
        };
        let edges: Vec<usize> = (0..n).map(|j| coset_of(1 << j)).collect();

        let cosets = 1usize << free.len();
        let mut dist = vec![u8::MAX; cosets];
        let mut frontier = vec![0usize];
        dist[0] = 0;
        let mut level = 0u8;
        while !frontier.is_empty() {
            level += 1;
            let mut next = Vec::new();
            for &s in &frontier {
                for &e in &edges {
                    let t = s ^ e;
                    if dist[t] == u8::MAX {
                        dist[t] = level;
                        next.push(t);
                    }
                }
            }
            frontier = next;
        }
        Ok(dist)
    }
}

fn to_mask(row: &BitVector) -> u32 {
    row.ones_iter().fold(0, |m, c| m | (1 << c))
}

/// Reverses the low `k` bits so that integer order is lexicographic order
/// on the message with bit 0 most significant.
fn lex_key(x: u64, k: usize) -> u64 {
    if k == 0 {
        0
    } else {
        x.reverse_bits() >> (64 - k)
    }
}
