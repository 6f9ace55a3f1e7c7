//! Dense bit-packed linear algebra over F2.
//!
//! Rows are stored as runs of 64-bit words; bits past `cols` are always zero,
//! which lets row operations work word-at-a-time without masking.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

/// A vector over F2.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self { len, words: vec![0; words_for(len)] }
    }

    pub fn from_indices(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.flip(i);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self::from_indices(bits.len(), bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i))
    }

    /// Parse a string of `0`/`1` characters; other characters are skipped.
    pub fn parse(s: &str) -> Self {
        let bits: Vec<bool> = s.chars().filter_map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        }).collect();
        Self::from_bools(&bits)
    }

    pub(crate) fn from_words(len: usize, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), words_for(len));
        Self { len, words }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Inner product mod 2.
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "length mismatch");
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones()).sum::<u32>() & 1 == 1
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + t)
            })
        })
    }

    pub fn concat(&self, other: &BitVec) -> BitVec {
        BitVec::from_indices(self.len + other.len, self.ones().chain(other.ones().map(|i| i + self.len)))
    }

    pub fn slice(&self, start: usize, end: usize) -> BitVec {
        BitVec::from_indices(end - start, self.ones().filter(|&i| i >= start && i < end).map(|i| i - start))
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

/// Dense matrix over F2, row-major, 64-bit packed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self { rows, cols, stride, data: vec![0; rows * stride] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if f(r, c) {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    /// Build from rows of 0/1 integers.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged rows");
            for (j, &b) in r.iter().enumerate() {
                if b & 1 == 1 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn from_bitvecs(cols: usize, rows: &[BitVec]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, v) in rows.iter().enumerate() {
            assert_eq!(v.len(), cols, "row length mismatch");
            m.row_words_mut(i).copy_from_slice(v.words());
        }
        m
    }

    /// Parse rows of `0`/`1` characters separated by newlines or `;`.
    pub fn parse(s: &str) -> Self {
        let rows: Vec<BitVec> = s
            .split(['\n', ';'])
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(BitVec::parse)
            .collect();
        let cols = rows.first().map_or(0, BitVec::len);
        Self::from_bitvecs(cols, &rows)
    }

    pub fn random<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if rng.gen::<bool>() {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        self.data[r * self.stride + c / 64] >> (c % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of {}x{}", self.rows, self.cols);
        let w = &mut self.data[r * self.stride + c / 64];
        let mask = 1u64 << (c % 64);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        assert!(r < self.rows && c < self.cols);
        self.data[r * self.stride + c / 64] ^= 1u64 << (c % 64);
    }

    #[inline]
    pub fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    pub fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> BitVec {
        BitVec::from_words(self.cols, self.row_words(r).to_vec())
    }

    pub fn row_vecs(&self) -> Vec<BitVec> {
        (0..self.rows).map(|r| self.row(r)).collect()
    }

    pub fn col(&self, c: usize) -> BitVec {
        BitVec::from_indices(self.rows, (0..self.rows).filter(|&r| self.get(r, c)))
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn max_row_weight(&self) -> usize {
        (0..self.rows).map(|r| self.row_weight(r)).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `row[dst] ^= row[src]`.
    #[inline]
    pub fn xor_row(&mut self, dst: usize, src: usize) {
        debug_assert_ne!(dst, src);
        let s = self.stride;
        let (a, b) = if dst < src {
            let (lo, hi) = self.data.split_at_mut(src * s);
            (&mut lo[dst * s..(dst + 1) * s], &hi[..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(dst * s);
            (&mut hi[..s], &lo[src * s..(src + 1) * s])
        };
        for (x, y) in a.iter_mut().zip(b) {
            *x ^= y;
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.data.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    pub fn push_row(&mut self, v: &BitVec) {
        assert_eq!(v.len(), self.cols, "row length mismatch");
        self.data.extend_from_slice(v.words());
        self.rows += 1;
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.row(r).ones() {
                t.set(c, r, true);
            }
        }
        t
    }

    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!("cannot multiply {:?} by {:?}", self.shape(), other.shape())));
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let ones: Vec<usize> = self.row(r).ones().collect();
            let dst = r * out.stride;
            for k in ones {
                let src = other.row_words(k);
                for (x, y) in out.data[dst..dst + out.stride].iter_mut().zip(src) {
                    *x ^= y;
                }
            }
        }
        Ok(out)
    }

    /// `M v` for a column vector `v`.
    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.cols, "length mismatch");
        BitVec::from_indices(
            self.rows,
            (0..self.rows).filter(|&r| {
                self.row_words(r).iter().zip(v.words()).map(|(a, b)| (a & b).count_ones()).sum::<u32>() & 1 == 1
            }),
        )
    }

    /// `vᵀ M` for a row vector `v`.
    pub fn vec_mul(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.rows, "length mismatch");
        let mut out = BitVec::zeros(self.cols);
        for r in v.ones() {
            for (x, y) in out.words.iter_mut().zip(self.row_words(r)) {
                *x ^= y;
            }
        }
        out
    }

    pub fn add(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.shape() != other.shape() {
            return Err(Error::Shape(format!("cannot add {:?} and {:?}", self.shape(), other.shape())));
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            *a ^= b;
        }
        Ok(out)
    }

    pub fn hstack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.rows != other.rows {
            return Err(Error::Shape(format!("hstack row mismatch {} vs {}", self.rows, other.rows)));
        }
        let mut out = BitMatrix::zeros(self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in self.row(r).ones() {
                out.set(r, c, true);
            }
            for c in other.row(r).ones() {
                out.set(r, self.cols + c, true);
            }
        }
        Ok(out)
    }

    pub fn vstack(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.cols {
            return Err(Error::Shape(format!("vstack column mismatch {} vs {}", self.cols, other.cols)));
        }
        let mut out = self.clone();
        out.data.extend_from_slice(&other.data);
        out.rows += other.rows;
        Ok(out)
    }

    /// `[[a, b], [c, d]]` with absent blocks zero-filled. Block sizes are
    /// inferred from whichever blocks are present.
    pub fn block2x2(
        a: Option<&BitMatrix>,
        b: Option<&BitMatrix>,
        c: Option<&BitMatrix>,
        d: Option<&BitMatrix>,
    ) -> Result<BitMatrix> {
        let pick = |x: Option<&BitMatrix>, y: Option<&BitMatrix>, f: fn(&BitMatrix) -> usize| {
            match (x.map(f), y.map(f)) {
                (Some(p), Some(q)) if p != q => Err(Error::Shape(format!("block mismatch {p} vs {q}"))),
                (Some(p), _) | (None, Some(p)) => Ok(p),
                (None, None) => Err(Error::Shape("cannot infer block size".into())),
            }
        };
        let r0 = pick(a, b, BitMatrix::rows)?;
        let r1 = pick(c, d, BitMatrix::rows)?;
        let c0 = pick(a, c, BitMatrix::cols)?;
        let c1 = pick(b, d, BitMatrix::cols)?;
        let blk = |m: Option<&BitMatrix>, r, c| m.cloned().unwrap_or_else(|| BitMatrix::zeros(r, c));
        let top = blk(a, r0, c0).hstack(&blk(b, r0, c1))?;
        let bot = blk(c, r1, c0).hstack(&blk(d, r1, c1))?;
        top.vstack(&bot)
    }

    pub fn select_rows(&self, idx: &[usize]) -> BitMatrix {
        let rows: Vec<BitVec> = idx.iter().map(|&r| self.row(r)).collect();
        BitMatrix::from_bitvecs(self.cols, &rows)
    }

    pub fn select_cols(&self, idx: &[usize]) -> BitMatrix {
        BitMatrix::from_fn(self.rows, idx.len(), |r, c| self.get(r, idx[c]))
    }

    /// In-place reduced row echelon form; returns pivot columns in order.
    /// Pivot rows end up as rows `0..pivots.len()`.
    pub fn rref_in_place(&mut self) -> Vec<usize> {
        self.rref_cols_in_place(&(0..self.cols).collect::<Vec<_>>())
    }

    /// RREF visiting columns in the given order, so that pivots favour the
    /// earliest listed columns.
    pub fn rref_cols_in_place(&mut self, order: &[usize]) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for &c in order {
            if r == self.rows {
                break;
            }
            let (w, bit) = (c / 64, 1u64 << (c % 64));
            let Some(p) = (r..self.rows).find(|&i| self.data[i * self.stride + w] & bit != 0) else {
                continue;
            };
            self.swap_rows(r, p);
            for i in 0..self.rows {
                if i != r && self.data[i * self.stride + w] & bit != 0 {
                    self.xor_row(i, r);
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rref(&self) -> (BitMatrix, Vec<usize>) {
        let mut m = self.clone();
        let p = m.rref_in_place();
        (m, p)
    }

    pub fn rank(&self) -> usize {
        self.clone().rref_in_place().len()
    }

    /// Basis of the right kernel `{v : M v = 0}`, one vector per row.
    pub fn kernel_basis(&self) -> BitMatrix {
        let (r, pivots) = self.rref();
        let mut is_pivot = vec![false; self.cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let free: Vec<usize> = (0..self.cols).filter(|&c| !is_pivot[c]).collect();
        let mut out = BitMatrix::zeros(free.len(), self.cols);
        for (k, &f) in free.iter().enumerate() {
            out.set(k, f, true);
            for (i, &p) in pivots.iter().enumerate() {
                if r.get(i, f) {
                    out.set(k, p, true);
                }
            }
        }
        out
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    pub fn row_space_contains(&self, v: &BitVec) -> Result<bool> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!("vector length {} vs {} columns", v.len(), self.cols)));
        }
        Ok(RowSpan::new(self).contains(v))
    }

    /// A matrix `G` whose right kernel is exactly the row space of `self`.
    pub fn cokernel_matrix(&self) -> BitMatrix {
        self.kernel_basis()
    }

    /// Independent rows spanning the same space.
    pub fn row_basis(&self) -> BitMatrix {
        let (mut r, p) = self.rref();
        r.rows = p.len();
        r.data.truncate(p.len() * r.stride);
        r
    }

    pub fn same_row_space(&self, other: &BitMatrix) -> bool {
        if self.cols != other.cols {
            return false;
        }
        let a = self.rank();
        a == other.rank() && self.vstack(other).map(|m| m.rank() == a).unwrap_or(false)
    }

    pub fn to_rows_string(&self) -> Vec<String> {
        (0..self.rows).map(|r| self.row(r).to_string()).collect()
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            writeln!(f, "{}", self.row(r))?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for BitMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_rows_string().serialize(s)
    }
}

/// Echelon basis of a row space, for repeated membership and reduction.
#[derive(Clone, Debug)]
pub struct RowSpan {
    cols: usize,
    basis: Vec<BitVec>,
    pivots: Vec<usize>,
}

impl RowSpan {
    pub fn new(m: &BitMatrix) -> Self {
        let b = m.row_basis();
        let mut pivots = Vec::with_capacity(b.rows());
        for r in 0..b.rows() {
            pivots.push(b.row(r).ones().next().expect("basis rows are nonzero"));
        }
        Self { cols: m.cols(), basis: b.row_vecs(), pivots }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Reduce `v` against the basis; the result is zero iff `v` is in the span.
    pub fn reduce(&self, v: &BitVec) -> BitVec {
        let mut v = v.clone();
        for (b, &p) in self.basis.iter().zip(&self.pivots) {
            if v.get(p) {
                v.xor_assign(b);
            }
        }
        v
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        self.reduce(v).is_zero()
    }

    /// Add `v` to the span; returns false if it was already contained.
    pub fn insert(&mut self, v: &BitVec) -> bool {
        let r = self.reduce(v);
        let Some(p) = r.ones().next() else {
            return false;
        };
        for b in &mut self.basis {
            if b.get(p) {
                b.xor_assign(&r);
            }
        }
        self.basis.push(r);
        self.pivots.push(p);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_and_zero_ranks() {
        assert_eq!(BitMatrix::identity(5).rank(), 5);
        assert_eq!(BitMatrix::zeros(3, 7).rank(), 0);
        assert_eq!(BitMatrix::identity(4).kernel_basis().rows(), 0);
        assert_eq!(BitMatrix::zeros(2, 3).kernel_basis().rank(), 3);
    }

    #[test]
    fn cokernel_of_small_span() {
        let s = BitMatrix::parse("110;011");
        let g = s.cokernel_matrix();
        assert_eq!(g, BitMatrix::parse("111"));
        assert_eq!(BitMatrix::identity(3).cokernel_matrix().rows(), 0);
        assert_eq!(BitMatrix::zeros(0, 4).cokernel_matrix(), BitMatrix::identity(4));
    }

    #[test]
    fn membership() {
        let i3 = BitMatrix::identity(3);
        assert!(i3.row_space_contains(&BitVec::parse("101")).unwrap());
        assert!(!BitMatrix::zeros(2, 3).row_space_contains(&BitVec::parse("010")).unwrap());
        assert!(i3.row_space_contains(&BitVec::parse("10")).is_err());
    }

    #[test]
    fn rank_nullity_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let r = rng.gen_range(1..=64);
            let c = rng.gen_range(1..=64);
            let m = BitMatrix::random(r, c, &mut rng);
            let k = m.kernel_basis();
            assert_eq!(m.rank() + k.rows(), c);
            assert!(m.mul(&k.transpose()).unwrap().is_zero());
            assert_eq!(k.rank(), k.rows());
        }
    }

    #[test]
    fn transpose_of_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = BitMatrix::random(20, 20, &mut rng);
        let b = BitMatrix::random(20, 20, &mut rng);
        let lhs = a.mul(&b).unwrap().transpose();
        let rhs = b.transpose().mul(&a.transpose()).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(a.mul(&BitMatrix::identity(20)).unwrap(), a);
    }

    #[test]
    fn cokernel_exhaustive_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let c = rng.gen_range(1..=12);
            let r = rng.gen_range(0..=c);
            let s = BitMatrix::random(r, c, &mut rng);
            let g = s.cokernel_matrix();
            let span = RowSpan::new(&s);
            for bits in 0u32..(1 << c) {
                let v = BitVec::from_indices(c, (0..c).filter(|&i| bits >> i & 1 == 1));
                assert_eq!(g.mul_vec(&v).is_zero(), span.contains(&v));
            }
        }
    }

    #[test]
    fn block_shapes() {
        let a = BitMatrix::identity(2);
        let m = BitMatrix::block2x2(Some(&a), None, None, Some(&a)).unwrap();
        assert_eq!(m, BitMatrix::identity(4));
        assert!(BitMatrix::block2x2(Some(&a), Some(&BitMatrix::zeros(3, 1)), None, None).is_err());
    }

    #[test]
    fn span_insert_tracks_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = BitMatrix::random(30, 40, &mut rng);
        let mut s = RowSpan::new(&BitMatrix::zeros(0, 40));
        for r in 0..m.rows() {
            s.insert(&m.row(r));
        }
        assert_eq!(s.dim(), m.rank());
    }
}
