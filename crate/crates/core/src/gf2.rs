//! Dense bit-packed vectors and matrices over GF(2).
//!
//! Bit `i` of a [`BitVector`] lives in word `i / 64` at position `i % 64`.
//! Bits past `len` are always zero, so word-level operations (`weight`,
//! equality, xor) never need masking on the way out.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{check_len, Error, Result};

const WORD_BITS: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = BitVector {
            len,
            words: vec![u64::MAX; words_for(len)],
        };
        v.clear_tail();
        v
    }

    pub fn with_capacity(bits: usize) -> Self {
        BitVector {
            len: 0,
            words: Vec::with_capacity(words_for(bits)),
        }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut v = BitVector::zeros(0);
        for b in bits {
            v.push(b);
        }
        v
    }

    /// Low `len` bits of `value`, bit 0 first.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= WORD_BITS);
        let mut v = BitVector::zeros(len);
        if len > 0 {
            v.words[0] = value;
            v.clear_tail();
        }
        v
    }

    /// Unpacks bytes MSB-first: bit 0 of the vector is the top bit of `bytes[0]`.
    pub fn from_bytes_msb(bytes: &[u8], len: usize) -> Result<Self> {
        if len > bytes.len() * 8 {
            return Err(Error::Dimension {
                context: "byte unpack",
                expected: len.div_ceil(8),
                found: bytes.len(),
            });
        }
        let mut v = BitVector::zeros(len);
        for i in 0..len {
            if (bytes[i / 8] >> (7 - i % 8)) & 1 == 1 {
                v.words[i / WORD_BITS] |= 1 << (i % WORD_BITS);
            }
        }
        Ok(v)
    }

    /// Packs MSB-first, zero-padding the final byte.
    pub fn to_bytes_msb(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.len.div_ceil(8)];
        for i in self.ones_iter() {
            out[i / 8] |= 0x80 >> (i % 8);
        }
        out
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    pub fn try_get(&self, i: usize) -> Result<bool> {
        if i < self.len {
            Ok(self.get(i))
        } else {
            Err(Error::OutOfRange {
                context: "bit vector",
                index: i,
                size: self.len,
            })
        }
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        let mask = 1u64 << (i % WORD_BITS);
        if bit {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(
            i < self.len,
            "bit index {i} out of range for length {}",
            self.len
        );
        self.words[i / WORD_BITS] ^= 1 << (i % WORD_BITS);
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(WORD_BITS) {
            self.words.push(0);
        }
        if bit {
            self.words[self.len / WORD_BITS] |= 1 << (self.len % WORD_BITS);
        }
        self.len += 1;
    }

    /// Appends the low `count` bits of `bits`, bit 0 first.
    pub fn push_bits(&mut self, bits: u64, count: usize) {
        for b in 0..count {
            self.push((bits >> b) & 1 == 1);
        }
    }

    pub fn extend_from(&mut self, other: &BitVector) {
        for i in 0..other.len {
            self.push(other.get(i));
        }
    }

    pub fn concat(&self, other: &BitVector) -> BitVector {
        let mut v = BitVector::with_capacity(self.len + other.len);
        v.extend_from(self);
        v.extend_from(other);
        v
    }

    pub fn slice(&self, start: usize, end: usize) -> BitVector {
        assert!(
            start <= end && end <= self.len,
            "slice {start}..{end} out of range for length {}",
            self.len
        );
        BitVector::from_bits((start..end).map(|i| self.get(i)))
    }

    /// Up to 64 bits starting at `start`, bit `start` landing in bit 0.
    pub fn bits_at(&self, start: usize, count: usize) -> u64 {
        assert!(count <= WORD_BITS && start + count <= self.len);
        if count == 0 {
            return 0;
        }
        let w = start / WORD_BITS;
        let off = start % WORD_BITS;
        let mut v = self.words[w] >> off;
        if off + count > WORD_BITS {
            v |= self.words[w + 1] << (WORD_BITS - off);
        }
        if count < WORD_BITS {
            v &= (1u64 << count) - 1;
        }
        v
    }

    #[inline]
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor(&self, other: &BitVector) -> Result<BitVector> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    pub fn xor_assign(&mut self, other: &BitVector) -> Result<()> {
        check_len("xor", self.len, other.len)?;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    pub fn distance(&self, other: &BitVector) -> Result<usize> {
        check_len("hamming distance", self.len, other.len)?;
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    /// Inner product of `other` with the first `other.len()` bits of `self`.
    pub fn dot_prefix(&self, other: &BitVector) -> bool {
        assert!(other.len <= self.len);
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    pub fn ones_iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let tz = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD_BITS + tz)
                }
            })
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Lexicographic order on the bit sequence, bit 0 most significant.
    /// Shorter vectors that are a prefix of longer ones sort first.
    pub fn lex_cmp(&self, other: &BitVector) -> Ordering {
        for (a, b) in self.words.iter().zip(&other.words) {
            let diff = a ^ b;
            if diff != 0 {
                let bit = diff.trailing_zeros();
                return if (a >> bit) & 1 == 0 {
                    Ordering::Less
                } else {
                    Ordering::Greater
                };
            }
        }
        self.len.cmp(&other.len)
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Parameter(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<bool>>>()
            .map(BitVector::from_bits)
    }
}

/// Row-major dense matrix; each row is a [`BitVector`] of length `cols`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVector>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            cols,
            rows: vec![BitVector::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = BitMatrix::zeros(n, n);
        for i in 0..n {
            m.rows[i].set(i, true);
        }
        m
    }

    /// `cols` must be given so that 0-row matrices keep their width.
    pub fn from_rows(rows: Vec<BitVector>, cols: usize) -> Result<Self> {
        for r in &rows {
            check_len("matrix row", cols, r.len())?;
        }
        Ok(BitMatrix { cols, rows })
    }

    /// Parses rows written as `"1011"` strings.
    pub fn parse(rows: &[&str]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| r.parse::<BitVector>())
            .collect::<Result<Vec<_>>>()?;
        let cols = parsed.first().map_or(0, BitVector::len);
        BitMatrix::from_rows(parsed, cols)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, r: usize) -> &BitVector {
        &self.rows[r]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &BitVector> {
        self.rows.iter()
    }

    pub fn get(&self, r: usize, c: usize) -> Result<bool> {
        self.check_index(r, c)?;
        Ok(self.rows[r].get(c))
    }

    pub fn set(&mut self, r: usize, c: usize, bit: bool) -> Result<()> {
        self.check_index(r, c)?;
        self.rows[r].set(c, bit);
        Ok(())
    }

    fn check_index(&self, r: usize, c: usize) -> Result<()> {
        if r >= self.rows.len() {
            return Err(Error::OutOfRange {
                context: "matrix row",
                index: r,
                size: self.rows.len(),
            });
        }
        if c >= self.cols {
            return Err(Error::OutOfRange {
                context: "matrix column",
                index: c,
                size: self.cols,
            });
        }
        Ok(())
    }

    /// `x · M` over GF(2).
    pub fn vec_mul(&self, x: &BitVector) -> Result<BitVector> {
        check_len("vector-matrix product", self.rows(), x.len())?;
        let mut out = BitVector::zeros(self.cols);
        for i in x.ones_iter() {
            out.xor_assign(&self.rows[i])?;
        }
        Ok(out)
    }

    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        check_len("matrix product", self.cols, other.rows())?;
        let rows = self
            .rows
            .iter()
            .map(|r| other.vec_mul(r))
            .collect::<Result<Vec<_>>>()?;
        BitMatrix::from_rows(rows, other.cols)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.ones_iter() {
                t.rows[c].set(r, true);
            }
        }
        t
    }

    pub fn hstack(&self, right: &BitMatrix) -> Result<BitMatrix> {
        check_len("hstack", self.rows(), right.rows())?;
        let rows = self
            .rows
            .iter()
            .zip(&right.rows)
            .map(|(a, b)| a.concat(b))
            .collect();
        BitMatrix::from_rows(rows, self.cols + right.cols)
    }

    pub fn submatrix(
        &self,
        rows: std::ops::Range<usize>,
        cols: std::ops::Range<usize>,
    ) -> BitMatrix {
        assert!(rows.end <= self.rows() && cols.end <= self.cols);
        let width = cols.len();
        let out = self.rows[rows]
            .iter()
            .map(|r| r.slice(cols.start, cols.end))
            .collect();
        BitMatrix {
            cols: width,
            rows: out,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVector::is_zero)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bv(s: &str) -> BitVector {
        s.parse().unwrap()
    }

    #[test]
    fn xor_examples() {
        assert_eq!(bv("1010").xor(&bv("0000")).unwrap(), bv("1010"));
        assert_eq!(bv("1010").xor(&bv("1010")).unwrap(), bv("0000"));
        assert_eq!(bv("1100").xor(&bv("0110")).unwrap(), bv("1010"));
    }

    #[test]
    fn xor_length_mismatch_is_error() {
        assert!(matches!(
            bv("101").xor(&bv("1010")),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn weight_examples() {
        assert_eq!(bv("0000").weight(), 0);
        assert_eq!(bv("1011").weight(), 3);
        assert_eq!(BitVector::ones(16).weight(), 16);
        assert_eq!(BitVector::ones(130).weight(), 130);
    }

    #[test]
    fn vec_mat_mul_examples() {
        let m = BitMatrix::parse(&["10", "11"]).unwrap();
        assert_eq!(m.vec_mul(&bv("00")).unwrap(), bv("00"));
        assert_eq!(m.vec_mul(&bv("11")).unwrap(), bv("01"));
        let x = bv("1101001");
        assert_eq!(BitMatrix::identity(7).vec_mul(&x).unwrap(), x);
        assert!(m.vec_mul(&bv("101")).is_err());
    }

    #[test]
    fn distance_examples() {
        assert_eq!(bv("1010").distance(&bv("1010")).unwrap(), 0);
        assert_eq!(bv("0000").distance(&bv("1111")).unwrap(), 4);
        assert_eq!(bv("110").distance(&bv("111")).unwrap(), 1);
        assert!(bv("11").distance(&bv("111")).is_err());
    }

    #[test]
    fn matrix_access_out_of_range() {
        let mut m = BitMatrix::zeros(2, 3);
        assert!(m.get(2, 0).is_err());
        assert!(m.get(0, 3).is_err());
        assert!(m.set(5, 5, true).is_err());
        m.set(1, 2, true).unwrap();
        assert!(m.get(1, 2).unwrap());
    }

    #[test]
    fn byte_packing_is_msb_first() {
        let v = bv("10000001 1");
        assert_eq!(v.to_bytes_msb(), vec![0x81, 0x80]);
        assert_eq!(BitVector::from_bytes_msb(&[0x81, 0x80], 9).unwrap(), v);
    }

    #[test]
    fn lex_order() {
        assert_eq!(bv("0111").lex_cmp(&bv("1000")), Ordering::Less);
        assert_eq!(bv("1000").lex_cmp(&bv("0111")), Ordering::Greater);
        assert_eq!(bv("101").lex_cmp(&bv("101")), Ordering::Equal);
    }

    #[test]
    fn bits_at_crosses_words() {
        let mut v = BitVector::zeros(130);
        v.set(62, true);
        v.set(65, true);
        assert_eq!(v.bits_at(62, 4), 0b1001);
        assert_eq!(v.bits_at(0, 3), 0);
    }

    fn arb_pair(max: usize) -> impl Strategy<Value = (Vec<bool>, Vec<bool>, Vec<bool>)> {
        (0..max).prop_flat_map(|n| {
            (
                proptest::collection::vec(any::<bool>(), n),
                proptest::collection::vec(any::<bool>(), n),
                proptest::collection::vec(any::<bool>(), n),
            )
        })
    }

    proptest! {
        #[test]
        fn xor_group_laws((a, b, c) in arb_pair(200)) {
            let (a, b, c) = (BitVector::from_bits(a), BitVector::from_bits(b), BitVector::from_bits(c));
            let ab = a.xor(&b).unwrap();
            prop_assert_eq!(&ab, &b.xor(&a).unwrap());
            prop_assert_eq!(ab.xor(&c).unwrap(), a.xor(&b.xor(&c).unwrap()).unwrap());
            prop_assert!(a.xor(&a).unwrap().is_zero());
            prop_assert_eq!(ab.weight(), a.distance(&b).unwrap());
        }

        #[test]
        fn vec_mul_distributes(rows in 1usize..70, cols in 1usize..90, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut m = BitMatrix::zeros(rows, cols);
            for r in 0..rows {
                for c in 0..cols {
                    m.set(r, c, rng.gen()).unwrap();
                }
            }
            let x = BitVector::from_bits((0..rows).map(|_| rng.gen()));
            let y = BitVector::from_bits((0..rows).map(|_| rng.gen()));
            let lhs = m.vec_mul(&x.xor(&y).unwrap()).unwrap();
            let rhs = m.vec_mul(&x).unwrap().xor(&m.vec_mul(&y).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
