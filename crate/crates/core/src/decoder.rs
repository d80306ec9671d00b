//! Bounded-list decoder for staircase-generator codes.
//!
//! Finds `x` and a low-weight `e` with `x·G = e + c_0` by walking the
//! staircase one block at a time. After block `i` the list holds partial
//! solutions `(x_i, e_i)` with `x_i` the first `K_i` message bits and `e_i`
//! the error on the first `K_i` message and first `N_i` parity coordinates.
//! Block `i` only sees earlier message bits through `x_{i-1}·B'_i`, so each
//! parent is extended independently against the residual target
//!
//! ```text
//! t_i = c_0[msg block i] || (c_0[parity block i] + x_{i-1}·B'_i)
//! ```
//!
//! The list is cut to the `list_cap` lightest entries after every step and
//! the cumulative weight cap grows by one whenever the list is not full.

use crate::code::StGenCode;
use crate::error::{check_len, Error, Result};
use crate::gf2::BitVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecoderConfig {
    /// Weight limit for the first block.
    pub w1: usize,
    /// Maximum weight a single step may add.
    pub wb: usize,
    /// List size bound `L`.
    pub list_cap: usize,
    /// How many times a step that produced an empty list is retried with a
    /// larger weight limit.
    pub retry_limit: usize,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            w1: 2,
            wb: 2,
            list_cap: 256,
            retry_limit: 3,
        }
    }
}

impl DecoderConfig {
    pub fn validate(&self) -> Result<()> {
        if self.wb == 0 {
            return Err(Error::Parameter(
                "round weight limit w_b must be at least 1".into(),
            ));
        }
        if self.list_cap == 0 {
            return Err(Error::Parameter("list cap L must be at least 1".into()));
        }
        Ok(())
    }
}

/// A partial solution after some block `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ListEntry {
    /// First `K_i` message bits.
    pub x: BitVector,
    /// Error on the first `K_i` message coordinates.
    pub e_msg: BitVector,
    /// Error on the first `N_i` parity coordinates.
    pub e_par: BitVector,
    pub weight: usize,
}

impl ListEntry {
    /// `e_i` laid out like the columns of `G_i`: message part, then parity.
    pub fn e(&self) -> BitVector {
        self.e_msg.concat(&self.e_par)
    }

    /// Whether `x_i·G_i = e_i + c_0|_{prefix}` holds, recomputed from scratch.
    pub fn satisfies(&self, code: &StGenCode, c0: &BitVector, block: usize) -> bool {
        let (kk, nn, k) = (code.k_prefix(block), code.n_prefix(block), code.k());
        if self.x.len() != kk || self.e_msg.len() != kk || self.e_par.len() != nn {
            return false;
        }
        let Ok(parity) = code.parity_prefix(&self.x, block) else {
            return false;
        };
        let msg_ok = self.x.xor(&self.e_msg).ok() == Some(c0.slice(0, kk));
        let par_ok = parity.xor(&self.e_par).ok() == Some(c0.slice(k, k + nn));
        msg_ok && par_ok && self.weight == self.e_msg.weight() + self.e_par.weight()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeResult {
    pub x: BitVector,
    /// Error over all `n` coordinates in codeword order.
    pub e: BitVector,
    pub weight: usize,
    /// Weight limit in force at the last step.
    pub final_w: usize,
    /// List size after each step.
    pub list_trace: Vec<usize>,
}

/// Next cumulative weight limit: grow by one unless the list is full.
pub fn weight_schedule_update(current_w: usize, list_size: usize, cfg: &DecoderConfig) -> usize {
    if list_size < cfg.list_cap {
        current_w + 1
    } else {
        current_w
    }
}

#[inline]
fn lex_key(x: u64, bits: usize) -> u64 {
    if bits == 0 {
        0
    } else {
        x.reverse_bits() >> (64 - bits)
    }
}

#[inline]
fn popcount(x: u64) -> usize {
    x.count_ones() as usize
}

/// Working list: message prefixes packed `stride` words apiece, kept in
/// output order (weight, then lexicographic `x`).
#[derive(Default)]
struct Beam {
    bits: usize,
    stride: usize,
    xs: Vec<u64>,
    weight: Vec<usize>,
    /// Position of each entry in lexicographic order of `x`.
    rank: Vec<u32>,
}

impl Beam {
    fn len(&self) -> usize {
        self.weight.len()
    }

    fn x(&self, j: usize) -> &[u64] {
        &self.xs[j * self.stride..(j + 1) * self.stride]
    }

    fn reset(&mut self, bits: usize) {
        self.bits = bits;
        self.stride = bits.div_ceil(64);
        self.xs.clear();
        self.weight.clear();
        self.rank.clear();
    }

    fn set_ranks(&mut self, keys: impl Fn(usize) -> u64) {
        let mut order: Vec<u32> = (0..self.len() as u32).collect();
        order.sort_unstable_by_key(|&j| keys(j as usize));
        self.rank.resize(self.len(), 0);
        for (r, &j) in order.iter().enumerate() {
            self.rank[j as usize] = r as u32;
        }
    }

    fn from_entries(entries: &[ListEntry], bits: usize) -> Beam {
        let mut beam = Beam::default();
        beam.reset(bits);
        let mut order: Vec<usize> = (0..entries.len()).collect();
        order.sort_by(|&a, &b| entries[a].x.lex_cmp(&entries[b].x));
        beam.rank = vec![0; entries.len()];
        for (r, &j) in order.iter().enumerate() {
            beam.rank[j] = r as u32;
        }
        for e in entries {
            beam.xs.extend_from_slice(e.x.words());
            beam.weight.push(e.weight);
        }
        beam
    }

    fn to_entries(&self, code: &StGenCode, c0: &BitVector, block: usize) -> Vec<ListEntry> {
        let (kk, k) = (code.k_prefix(block), code.k());
        let (msg, par) = (c0.slice(0, kk), c0.slice(k, k + code.n_prefix(block)));
        (0..self.len())
            .map(|j| {
                let x =
                    BitVector::from_bits((0..kk).map(|b| (self.x(j)[b / 64] >> (b % 64)) & 1 == 1));
                let parity = code
                    .parity_prefix(&x, block)
                    .expect("prefix length matches");
                ListEntry {
                    e_msg: x.xor(&msg).expect("same length"),
                    e_par: parity.xor(&par).expect("same length"),
                    x,
                    weight: self.weight[j],
                }
            })
            .collect()
    }
}

/// First block: every message prefix whose error fits under `cfg.w1`.
pub fn step_init(code: &StGenCode, c0: &BitVector, cfg: &DecoderConfig) -> Result<Vec<ListEntry>> {
    check_len("c_0", code.n(), c0.len())?;
    let mut beam = Beam::default();
    init_beam(code, c0, cfg.w1, cfg.list_cap, &mut beam);
    Ok(beam.to_entries(code, c0, 1))
}

fn init_beam(code: &StGenCode, c0: &BitVector, w: usize, cap: usize, out: &mut Beam) {
    let (k1, n1) = code.params().block_dims(1);
    let target_msg = c0.bits_at(0, k1);
    let target_par = c0.bits_at(code.k(), n1);
    let mut found: Vec<(usize, u64, u64)> = Vec::new();
    for x in 0..(1u64 << k1) {
        let em = x ^ target_msg;
        let ep = code.diagonal_product(1, x) ^ target_par;
        let wt = popcount(em) + popcount(ep);
        if wt <= w {
            found.push((wt, lex_key(x, k1), x));
        }
    }
    found.sort_unstable();
    found.truncate(cap);
    out.reset(k1);
    for &(wt, _, x) in &found {
        out.xs.push(x);
        out.weight.push(wt);
    }
    out.set_ranks(|j| found[j].1);
}

struct Candidate {
    weight: usize,
    parent: u32,
    x_new: u64,
}

/// Extends every parent through block `i` (2-based). Children add at most
/// `cfg.wb` to the weight and stay within `w`; the lightest `cfg.list_cap`
/// survive, ties going to the lexicographically smaller message prefix.
pub fn step_extend(
    code: &StGenCode,
    i: usize,
    entries: &[ListEntry],
    c0: &BitVector,
    w: usize,
    cfg: &DecoderConfig,
) -> Result<Vec<ListEntry>> {
    if i < 2 || i > code.v() {
        return Err(Error::OutOfRange {
            context: "extension step",
            index: i,
            size: code.v(),
        });
    }
    check_len("c_0", code.n(), c0.len())?;
    let msg_at = code.k_prefix(i - 1);
    for p in entries {
        check_len("parent prefix", msg_at, p.x.len())?;
    }
    let beam = Beam::from_entries(entries, msg_at);
    let mut out = Beam::default();
    extend_beam(code, i, &beam, c0, w, cfg, &mut Vec::new(), &mut out);
    Ok(out.to_entries(code, c0, i))
}

#[allow(clippy::too_many_arguments)]
fn extend_beam(
    code: &StGenCode,
    i: usize,
    beam: &Beam,
    c0: &BitVector,
    w: usize,
    cfg: &DecoderConfig,
    cands: &mut Vec<Candidate>,
    out: &mut Beam,
) {
    let (ki, ni) = code.params().block_dims(i);
    let msg_at = code.k_prefix(i - 1);
    let target_msg = c0.bits_at(msg_at, ki);
    let target_par = c0.bits_at(code.k() + code.n_prefix(i - 1), ni);
    // New bits in lexicographic order, with their diagonal products.
    let block: Vec<(u64, u64)> = (0..1u64 << ki)
        .map(|key| {
            let x = lex_key(key, ki);
            (x, code.diagonal_product(i, x))
        })
        .collect();
    let mut by_rank = vec![0u32; beam.len()];
    for (j, &r) in beam.rank.iter().enumerate() {
        by_rank[r as usize] = j as u32;
    }

    // Candidates come out in lexicographic order of the child prefix.
    cands.clear();
    let mut hist = vec![0usize; w + 1];
    for &pi in &by_rank {
        let pw = beam.weight[pi as usize];
        if pw > w {
            continue;
        }
        let headroom = (w - pw).min(cfg.wb);
        let tp = target_par ^ code.feedback_product_words(i, beam.x(pi as usize));
        for &(x_new, d) in &block {
            let wt = popcount(x_new ^ target_msg) + popcount(d ^ tp);
            if wt <= headroom {
                hist[pw + wt] += 1;
                cands.push(Candidate {
                    weight: pw + wt,
                    parent: pi,
                    x_new,
                });
            }
        }
    }

    // Keep everything lighter than `cut`, and the lexicographically first
    // `quota` candidates of weight exactly `cut`.
    let (mut cut, mut below) = (w + 1, 0);
    for (wt, &count) in hist.iter().enumerate() {
        if below + count >= cfg.list_cap {
            cut = wt;
            break;
        }
        below += count;
    }
    let quota = cfg
        .list_cap
        .saturating_sub(below)
        .min(hist.get(cut).copied().unwrap_or(0));
    let mut slot = vec![0usize; w + 2];
    for wt in 0..=w {
        let kept = if wt < cut {
            hist[wt]
        } else if wt == cut {
            quota
        } else {
            0
        };
        slot[wt + 1] = slot[wt] + kept;
    }
    let survivors = slot[w + 1];

    out.reset(msg_at + ki);
    out.xs.resize(survivors * out.stride, 0);
    out.weight.resize(survivors, 0);
    out.rank.resize(survivors, 0);
    let (word, shift, stride) = (msg_at / 64, msg_at % 64, out.stride);
    let mut taken_at_cut = 0;
    let mut lex = 0u32;
    for c in cands.iter() {
        if c.weight > cut || (c.weight == cut && taken_at_cut == quota) {
            continue;
        }
        if c.weight == cut {
            taken_at_cut += 1;
        }
        let pos = slot[c.weight];
        slot[c.weight] += 1;
        let dst = &mut out.xs[pos * stride..(pos + 1) * stride];
        let src = beam.x(c.parent as usize);
        dst[..src.len()].copy_from_slice(src);
        dst[word] |= c.x_new << shift;
        if shift + ki > 64 {
            dst[word + 1] |= c.x_new >> (64 - shift);
        }
        out.weight[pos] = c.weight;
        out.rank[pos] = lex;
        lex += 1;
    }
}

/// Finds `x` and a low-weight `e` with `x·G = e + c_0`.
pub fn decode_close(code: &StGenCode, c0: &BitVector, cfg: &DecoderConfig) -> Result<DecodeResult> {
    cfg.validate()?;
    check_len("c_0", code.n(), c0.len())?;

    let mut w = cfg.w1;
    let mut list = Beam::default();
    init_beam(code, c0, w, cfg.list_cap, &mut list);
    let mut retries = 0;
    while list.len() == 0 {
        if retries == cfg.retry_limit {
            return Err(Error::DecodeFailure { step: 1, retries });
        }
        retries += 1;
        w += 1;
        init_beam(code, c0, w, cfg.list_cap, &mut list);
    }
    let mut trace = Vec::with_capacity(code.v());
    trace.push(list.len());

    let mut next = Beam::default();
    let mut cands = Vec::new();
    for i in 2..=code.v() {
        w = weight_schedule_update(w, list.len(), cfg);
        extend_beam(code, i, &list, c0, w, cfg, &mut cands, &mut next);
        let mut retries = 0;
        while next.len() == 0 {
            if retries == cfg.retry_limit {
                return Err(Error::DecodeFailure { step: i, retries });
            }
            retries += 1;
            w += 1;
            extend_beam(code, i, &list, c0, w, cfg, &mut cands, &mut next);
        }
        trace.push(next.len());
        std::mem::swap(&mut list, &mut next);
    }

    // The list is in output order, lightest and lexicographically smallest first.
    let k = code.k();
    let x = BitVector::from_bits((0..k).map(|b| (list.x(0)[b / 64] >> (b % 64)) & 1 == 1));
    let mut e = code.encode(&x)?;
    e.xor_assign(c0)?;
    let weight = e.weight();
    assert_eq!(
        weight, list.weight[0],
        "decoder weight bookkeeping diverged"
    );
    Ok(DecodeResult {
        x,
        e,
        weight,
        final_w: w,
        list_trace: trace,
    })
}
