//! Staircase-generator codes.
//!
//! A code is assembled from `v` column groups. Group `i` contributes `k_i`
//! message coordinates and `n_i` parity coordinates. Parity group `i` is
//! driven by the message bits of group `i` through a small diagonal block
//! `B_i`, and by all earlier message bits through a random feedback block
//! `B'_i` of shape `K_{i-1} x n_i`:
//!
//! ```text
//!        | I_k |  B_1  B'_2  B'_3 ...  B'_v |
//!   G =  |     |   0   B_2   .         .   |
//!        |     |   0    0   B_3        .   |
//!        |     |   .              ...  B_v |
//! ```
//!
//! Only the blocks are stored. Dense `G`/`H` are exported on demand.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::gf2::{BitMatrix, BitVector};

/// Small systematic code `[I_k | B]` used on the staircase diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseCode {
    pub n: usize,
    pub k: usize,
    pub radius: usize,
    pub b: BitMatrix,
}

impl BaseCode {
    fn all_ones(n: usize, k: usize) -> BaseCode {
        let row = BitVector::ones(n - k);
        BaseCode {
            n,
            k,
            radius: 1,
            b: BitMatrix::from_rows(vec![row; k], n - k).expect("consistent shape"),
        }
    }

    /// Identifier in `(n,k)R` form, e.g. `(3,2)1`.
    pub fn id(&self) -> String {
        format!("({},{}){}", self.n, self.k, self.radius)
    }

    /// Accepts `(n,k)R`, `(n,k)` or `n,k`.
    pub fn from_id(id: &str) -> Result<BaseCode> {
        let bad = || Error::Parameter(format!("unknown base code id {id:?}"));
        let s = id.trim();
        let (inner, radius) = match s.strip_prefix('(') {
            Some(rest) => {
                let (inner, tail) = rest.split_once(')').ok_or_else(bad)?;
                let radius = if tail.is_empty() {
                    None
                } else {
                    Some(tail.parse::<usize>().map_err(|_| bad())?)
                };
                (inner, radius)
            }
            None => (s, None),
        };
        let (n, k) = inner.split_once(',').ok_or_else(bad)?;
        let n: usize = n.trim().parse().map_err(|_| bad())?;
        let k: usize = k.trim().parse().map_err(|_| bad())?;
        base_catalog()
            .into_iter()
            .find(|c| c.n == n && c.k == k && radius.is_none_or(|r| r == c.radius))
            .ok_or_else(bad)
    }

    pub fn generator(&self) -> BitMatrix {
        BitMatrix::identity(self.k)
            .hstack(&self.b)
            .expect("base block has k rows")
    }
}

/// The six covering-radius-1 base codes usable on the staircase diagonal.
pub fn base_catalog() -> Vec<BaseCode> {
    [(2, 1), (3, 1), (3, 2), (4, 3), (5, 3), (5, 4)]
        .into_iter()
        .map(|(n, k)| BaseCode::all_ones(n, k))
        .collect()
}

/// One row of the practical parameter table, with the `(n, k)` pairs it
/// quotes for covers of roughly 1000 and 1500 bits.
#[derive(Clone, Copy, Debug)]
pub struct Table2Row {
    pub n1: usize,
    pub k1: usize,
    pub n2: usize,
    pub k2: usize,
    pub base: (usize, usize),
    pub quoted_1000: (usize, usize),
    pub quoted_1500: (usize, usize),
}

pub const TABLE2: [Table2Row; 6] = [
    Table2Row {
        n1: 2,
        k1: 14,
        n2: 2,
        k2: 1,
        base: (3, 1),
        quoted_1000: (1000, 343),
        quoted_1500: (1501, 509),
    },
    Table2Row {
        n1: 1,
        k1: 14,
        n2: 1,
        k2: 1,
        base: (2, 1),
        quoted_1000: (1001, 507),
        quoted_1500: (1501, 757),
    },
    Table2Row {
        n1: 2,
        k1: 14,
        n2: 2,
        k2: 3,
        base: (5, 3),
        quoted_1000: (999, 603),
        quoted_1500: (1499, 903),
    },
    Table2Row {
        n1: 1,
        k1: 14,
        n2: 1,
        k2: 2,
        base: (3, 2),
        quoted_1000: (1002, 672),
        quoted_1500: (1500, 1004),
    },
    Table2Row {
        n1: 1,
        k1: 14,
        n2: 1,
        k2: 3,
        base: (4, 3),
        quoted_1000: (1003, 755),
        quoted_1500: (1503, 1130),
    },
    Table2Row {
        n1: 1,
        k1: 14,
        n2: 1,
        k2: 4,
        base: (5, 4),
        quoted_1000: (1000, 802),
        quoted_1500: (1500, 1202),
    },
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StGenParams {
    pub k1: usize,
    pub n1: usize,
    pub k2: usize,
    pub n2: usize,
    pub base: BaseCode,
    pub v: usize,
    pub seed: u64,
}

impl StGenParams {
    pub fn new(k1: usize, n1: usize, base: BaseCode, v: usize, seed: u64) -> Result<Self> {
        let params = StGenParams {
            k1,
            n1,
            k2: base.k,
            n2: base.n - base.k,
            base,
            v,
            seed,
        };
        params.validate()?;
        Ok(params)
    }

    /// Parameters for row `row` (1-based) of [`TABLE2`], with the block count
    /// chosen so that `n` lands as close as possible to `target_n`.
    /// Ties go to the shorter code.
    pub fn from_table2(row: usize, target_n: usize, seed: u64) -> Result<Self> {
        let r = row
            .checked_sub(1)
            .and_then(|i| TABLE2.get(i))
            .ok_or_else(|| Error::Parameter(format!("table row {row} not in 1..=6")))?;
        let base = BaseCode::from_id(&format!("({},{})1", r.base.0, r.base.1))?;
        let first = r.k1 + r.n1;
        let step = r.k2 + r.n2;
        let n_of = |v: usize| first + (v - 1) * step;
        let below = 1 + target_n.saturating_sub(first) / step;
        let v = if n_of(below) >= target_n || target_n - n_of(below) <= n_of(below + 1) - target_n {
            below
        } else {
            below + 1
        };
        StGenParams::new(r.k1, r.n1, base, v, seed)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Parameter(msg));
        if self.v == 0 {
            return fail("block count v must be at least 1".into());
        }
        if self.k1 == 0 || self.n1 == 0 || self.k2 == 0 || self.n2 == 0 {
            return fail("block dimensions must be positive".into());
        }
        if self.base.k != self.k2 || self.base.n - self.base.k != self.n2 {
            return fail(format!(
                "base code {} does not match k_2={}, n_2={}",
                self.base.id(),
                self.k2,
                self.n2
            ));
        }
        if self.k1 > 64 {
            return fail(format!("k_1 = {} exceeds 64", self.k1));
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.k1 + (self.v - 1) * self.k2
    }

    pub fn n(&self) -> usize {
        self.k() + self.n1 + (self.v - 1) * self.n2
    }

    /// `(k_i, n_i)` for 1-based block `i`.
    pub fn block_dims(&self, i: usize) -> (usize, usize) {
        if i == 1 {
            (self.k1, self.n1)
        } else {
            (self.k2, self.n2)
        }
    }
}

/// Column masks of a small block: bit `r` of mask `c` is `B[r][c]`.
fn column_masks(b: &BitMatrix) -> Vec<u64> {
    (0..b.cols())
        .map(|c| {
            (0..b.rows())
                .filter(|&r| b.row(r).get(c))
                .fold(0u64, |m, r| m | (1 << r))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StGenCode {
    params: StGenParams,
    b1: BitMatrix,
    /// `B'_i` for `i = 2..=v`, stored transposed: `n_i` rows of `K_{i-1}` bits.
    feedback: Vec<BitMatrix>,
    k_cum: Vec<usize>,
    n_cum: Vec<usize>,
    b1_cols: Vec<u64>,
    base_cols: Vec<u64>,
}

impl StGenCode {
    /// Builds the code, drawing `B_1` and every `B'_i` from a ChaCha8 stream
    /// seeded with `params.seed` (row-major, `B_1` first).
    pub fn build(params: StGenParams) -> Result<Self> {
        params.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let mut b1 = BitMatrix::zeros(params.k1, params.n1);
        for r in 0..params.k1 {
            for c in 0..params.n1 {
                b1.set(r, c, rng.gen())?;
            }
        }
        let mut feedback = Vec::with_capacity(params.v.saturating_sub(1));
        for i in 2..=params.v {
            let rows = params.k1 + (i - 2) * params.k2;
            let mut t = BitMatrix::zeros(params.n2, rows);
            for r in 0..rows {
                for c in 0..params.n2 {
                    t.set(c, r, rng.gen())?;
                }
            }
            feedback.push(t);
        }
        Self::assemble(params, b1, feedback)
    }

    /// Builds a code from explicit blocks. `b_prime[j]` is `B'_{j+2}` in its
    /// natural `K_{i-1} x n_i` orientation.
    pub fn from_parts(params: StGenParams, b1: BitMatrix, b_prime: Vec<BitMatrix>) -> Result<Self> {
        params.validate()?;
        let feedback = b_prime.iter().map(BitMatrix::transpose).collect();
        Self::assemble(params, b1, feedback)
    }

    fn assemble(params: StGenParams, b1: BitMatrix, feedback: Vec<BitMatrix>) -> Result<Self> {
        check_len("B_1 rows", params.k1, b1.rows())?;
        check_len("B_1 columns", params.n1, b1.cols())?;
        check_len("feedback block count", params.v - 1, feedback.len())?;
        let mut k_cum = vec![0];
        let mut n_cum = vec![0];
        for i in 1..=params.v {
            let (ki, ni) = params.block_dims(i);
            k_cum.push(k_cum[i - 1] + ki);
            n_cum.push(n_cum[i - 1] + ni);
        }
        for (j, t) in feedback.iter().enumerate() {
            let i = j + 2;
            check_len("B' columns", params.block_dims(i).1, t.rows())?;
            check_len("B' rows", k_cum[i - 1], t.cols())?;
        }
        Ok(StGenCode {
            b1_cols: column_masks(&b1),
            base_cols: column_masks(&params.base.b),
            params,
            b1,
            feedback,
            k_cum,
            n_cum,
        })
    }

    pub fn params(&self) -> &StGenParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.k() + self.n_cum[self.params.v]
    }

    pub fn k(&self) -> usize {
        self.k_cum[self.params.v]
    }

    pub fn v(&self) -> usize {
        self.params.v
    }

    /// `K_i`, the number of message bits in blocks `1..=i`.
    pub fn k_prefix(&self, i: usize) -> usize {
        self.k_cum[i]
    }

    /// `N_i`, the number of parity bits in blocks `1..=i`.
    pub fn n_prefix(&self, i: usize) -> usize {
        self.n_cum[i]
    }

    pub fn block_b(&self, i: usize) -> &BitMatrix {
        if i == 1 {
            &self.b1
        } else {
            &self.params.base.b
        }
    }

    /// `B'_i` as a `K_{i-1} x n_i` matrix.
    pub fn b_prime(&self, i: usize) -> Result<BitMatrix> {
        self.check_block(i)?;
        if i == 1 {
            return Err(Error::OutOfRange {
                context: "feedback block",
                index: i,
                size: self.params.v,
            });
        }
        Ok(self.feedback[i - 2].transpose())
    }

    fn check_block(&self, i: usize) -> Result<()> {
        if i == 0 || i > self.params.v {
            Err(Error::OutOfRange {
                context: "staircase block",
                index: i,
                size: self.params.v,
            })
        } else {
            Ok(())
        }
    }

    /// `x_block · B_i` for the `k_i` message bits of block `i` packed into
    /// `x_block` (bit 0 = first bit of the block).
    #[inline]
    pub fn diagonal_product(&self, i: usize, x_block: u64) -> u64 {
        let cols = if i == 1 {
            &self.b1_cols
        } else {
            &self.base_cols
        };
        cols.iter().enumerate().fold(0, |acc, (c, m)| {
            acc | ((((x_block & m).count_ones() & 1) as u64) << c)
        })
    }

    /// `x_prev · B'_i` where `x_prev` holds at least `K_{i-1}` message bits.
    /// Block 1 has no feedback.
    #[inline]
    pub fn feedback_product(&self, i: usize, x_prev: &BitVector) -> u64 {
        assert!(i == 1 || x_prev.len() >= self.k_cum[i - 1]);
        self.feedback_product_words(i, x_prev.words())
    }

    /// As [`Self::feedback_product`], on the packed words of `x_prev`.
    #[inline]
    pub(crate) fn feedback_product_words(&self, i: usize, x_prev: &[u64]) -> u64 {
        if i == 1 {
            return 0;
        }
        self.feedback[i - 2]
            .row_iter()
            .enumerate()
            .fold(0, |acc, (c, col)| {
                let ones: u32 = col
                    .words()
                    .iter()
                    .zip(x_prev)
                    .map(|(a, b)| (a & b).count_ones())
                    .sum();
                acc | (((ones & 1) as u64) << c)
            })
    }

    /// Parity part `x · P` of the codeword for a message prefix covering
    /// whole blocks `1..=i`.
    pub fn parity_prefix(&self, x: &BitVector, blocks: usize) -> Result<BitVector> {
        self.check_block(blocks)?;
        check_len("message prefix", self.k_cum[blocks], x.len())?;
        let mut out = BitVector::with_capacity(self.n_cum[blocks]);
        for i in 1..=blocks {
            let (ki, ni) = self.params.block_dims(i);
            let x_block = x.bits_at(self.k_cum[i - 1], ki);
            let p = self.diagonal_product(i, x_block) ^ self.feedback_product(i, x);
            out.push_bits(p, ni);
        }
        Ok(out)
    }

    /// `x · G`, computed block by block.
    pub fn encode(&self, x: &BitVector) -> Result<BitVector> {
        check_len("message", self.k(), x.len())?;
        let parity = self.parity_prefix(x, self.params.v)?;
        Ok(x.concat(&parity))
    }

    /// `y · H^T` for `H = [P^T | I]`.
    pub fn syndrome(&self, y: &BitVector) -> Result<BitVector> {
        check_len("word", self.n(), y.len())?;
        let k = self.k();
        let mut s = self.parity_prefix(&y.slice(0, k), self.params.v)?;
        s.xor_assign(&y.slice(k, y.len()))?;
        Ok(s)
    }

    /// The `k x (n-k)` block `P` of `G = [I_k | P]`.
    pub fn parity_block(&self) -> BitMatrix {
        let k = self.k();
        let mut p = BitMatrix::zeros(k, self.n() - k);
        for i in 1..=self.params.v {
            let (ki, ni) = self.params.block_dims(i);
            let b = self.block_b(i);
            for r in 0..ki {
                for c in b.row(r).ones_iter() {
                    p.set(self.k_cum[i - 1] + r, self.n_cum[i - 1] + c, true)
                        .expect("in range");
                }
            }
            if i >= 2 {
                for (c, col) in self.feedback[i - 2].row_iter().enumerate().take(ni) {
                    for r in col.ones_iter() {
                        p.set(r, self.n_cum[i - 1] + c, true).expect("in range");
                    }
                }
            }
        }
        p
    }

    pub fn generator_matrix(&self) -> BitMatrix {
        BitMatrix::identity(self.k())
            .hstack(&self.parity_block())
            .expect("P has k rows")
    }

    pub fn parity_check_matrix(&self) -> BitMatrix {
        let p = self.parity_block();
        p.transpose()
            .hstack(&BitMatrix::identity(self.n() - self.k()))
            .expect("P^T has n-k rows")
    }

    /// `G_i = [I_{K_i} | P[0..K_i, 0..N_i]]`.
    pub fn g_prefix(&self, i: usize) -> Result<BitMatrix> {
        self.check_block(i)?;
        let (kk, nn) = (self.k_cum[i], self.n_cum[i]);
        let p = self.parity_block().submatrix(0..kk, 0..nn);
        BitMatrix::identity(kk).hstack(&p)
    }

    pub fn to_descriptor(&self) -> CodeDescriptor {
        let hex_rows = |m: &BitMatrix| {
            m.row_iter()
                .map(|r| hex::encode(r.to_bytes_msb()))
                .collect()
        };
        CodeDescriptor {
            version: DESCRIPTOR_VERSION,
            k_1: self.params.k1,
            n_1: self.params.n1,
            k_2: self.params.k2,
            n_2: self.params.n2,
            v: self.params.v,
            base: self.params.base.id(),
            seed: self.params.seed,
            b_1: hex_rows(&self.b1),
            b_prime: self
                .feedback
                .iter()
                .map(|t| hex_rows(&t.transpose()))
                .collect(),
        }
    }

    /// Reconstructs the code exactly as stored, without regenerating any
    /// random block from the seed.
    pub fn from_descriptor(d: &CodeDescriptor) -> Result<Self> {
        if d.version != DESCRIPTOR_VERSION {
            return Err(Error::Descriptor(format!(
                "unsupported version {}",
                d.version
            )));
        }
        let base = BaseCode::from_id(&d.base).map_err(|e| Error::Descriptor(e.to_string()))?;
        let params = StGenParams {
            k1: d.k_1,
            n1: d.n_1,
            k2: d.k_2,
            n2: d.n_2,
            base,
            v: d.v,
            seed: d.seed,
        };
        params
            .validate()
            .map_err(|e| Error::Descriptor(e.to_string()))?;
        if d.b_prime.len() + 1 != d.v {
            return Err(Error::Descriptor(format!(
                "expected {} feedback blocks, found {}",
                d.v - 1,
                d.b_prime.len()
            )));
        }
        let b1 = parse_hex_rows(&d.b_1, d.n_1)?;
        let b_prime = d
            .b_prime
            .iter()
            .zip(2..)
            .map(|(rows, i)| parse_hex_rows(rows, params.block_dims(i).1))
            .collect::<Result<Vec<_>>>()?;
        StGenCode::from_parts(params, b1, b_prime).map_err(|e| Error::Descriptor(e.to_string()))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_descriptor())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let d: CodeDescriptor =
            serde_json::from_str(s).map_err(|e| Error::Descriptor(e.to_string()))?;
        Self::from_descriptor(&d)
    }
}

pub const DESCRIPTOR_VERSION: u32 = 1;

/// On-disk form of a code. Every random block is stored explicitly, so a
/// reader never depends on the generator that produced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeDescriptor {
    pub version: u32,
    pub k_1: usize,
    pub n_1: usize,
    pub k_2: usize,
    pub n_2: usize,
    pub v: usize,
    pub base: String,
    pub seed: u64,
    /// Rows of `B_1`, each hex-encoded MSB-first.
    pub b_1: Vec<String>,
    /// Rows of `B'_2 .. B'_v`, each hex-encoded MSB-first.
    pub b_prime: Vec<Vec<String>>,
}

fn parse_hex_rows(rows: &[String], width: usize) -> Result<BitMatrix> {
    let parsed = rows
        .iter()
        .map(|h| {
            let bytes =
                hex::decode(h).map_err(|e| Error::Descriptor(format!("bad hex row {h:?}: {e}")))?;
            if bytes.len() != width.div_ceil(8) {
                return Err(Error::Descriptor(format!(
                    "row {h:?} is not {width} bits wide"
                )));
            }
            let row = BitVector::from_bytes_msb(&bytes, width)?;
            if row.to_bytes_msb() != bytes {
                return Err(Error::Descriptor(format!("row {h:?} has padding bits set")));
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    BitMatrix::from_rows(parsed, width)
}
