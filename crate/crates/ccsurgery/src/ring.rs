//! The quotient ring `R = F2[x]/(x^l + 1)`, matrices over it, and the binary
//! lift to circulant blocks.

use std::fmt;
use std::ops::{Add, Mul};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;

/// Largest supported lift parameter (one machine word of coefficients).
pub const MAX_L: usize = 64;

/// An element of `F2[x]/(x^l + 1)`; bit `k` of `bits` is the coefficient of `x^k`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingElem {
    l: usize,
    bits: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryKind {
    Zero,
    Monomial,
    Binomial,
    Other,
}

#[inline]
fn mask(l: usize) -> u64 {
    if l == 64 {
        u64::MAX
    } else {
        (1u64 << l) - 1
    }
}

impl RingElem {
    pub fn new(l: usize, bits: u64) -> Self {
        assert!((1..=MAX_L).contains(&l), "lift parameter {l} outside 1..={MAX_L}");
        Self { l, bits: bits & mask(l) }
    }

    pub fn zero(l: usize) -> Self {
        Self::new(l, 0)
    }

    pub fn one(l: usize) -> Self {
        Self::new(l, 1)
    }

    pub fn monomial(l: usize, k: usize) -> Self {
        Self::new(l, 1 << (k % l))
    }

    /// The all-ones element `1 + x + ... + x^(l-1)`.
    pub fn chi(l: usize) -> Self {
        Self::new(l, mask(l))
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn coeff(&self, k: usize) -> bool {
        self.bits >> k & 1 == 1
    }

    pub fn weight(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn is_one(&self) -> bool {
        self.bits == 1
    }

    pub fn exponents(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.l).filter(|&k| self.coeff(k))
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.l != other.l {
            return Err(Error::MixedLift(self.l, other.l));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(Self { l: self.l, bits: self.bits ^ other.bits })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let l = self.l;
        let mut acc = 0u64;
        for k in self.exponents() {
            acc ^= rotate(other.bits, k, l);
        }
        Ok(Self { l, bits: acc })
    }

    /// `x^k -> x^((l - k) mod l)`.
    pub fn involution(&self) -> Self {
        let mut out = 0u64;
        for k in self.exponents() {
            out |= 1 << ((self.l - k) % self.l);
        }
        Self { l: self.l, bits: out }
    }

    pub fn classify(&self) -> EntryKind {
        match self.weight() {
            0 => EntryKind::Zero,
            1 => EntryKind::Monomial,
            2 => EntryKind::Binomial,
            _ => EntryKind::Other,
        }
    }

    /// The `l x l` circulant: row `i` holds the coefficients of `x^i * self`.
    pub fn lift(&self) -> BitMatrix {
        let l = self.l;
        BitMatrix::from_fn(l, l, |i, j| self.coeff((j + l - i) % l))
    }

    pub fn random<R: Rng + ?Sized>(l: usize, rng: &mut R) -> Self {
        Self::new(l, rng.gen())
    }
}

#[inline]
fn rotate(bits: u64, k: usize, l: usize) -> u64 {
    if k == 0 {
        return bits;
    }
    ((bits << k) | (bits >> (l - k))) & mask(l)
}

impl Add for RingElem {
    type Output = RingElem;
    fn add(self, rhs: RingElem) -> RingElem {
        self.try_add(&rhs).expect("ring elements with different lift parameters")
    }
}

impl Mul for RingElem {
    type Output = RingElem;
    fn mul(self, rhs: RingElem) -> RingElem {
        self.try_mul(&rhs).expect("ring elements with different lift parameters")
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let terms: Vec<String> = self
            .exponents()
            .map(|k| match k {
                0 => "1".to_string(),
                1 => "x".to_string(),
                _ => format!("x^{k}"),
            })
            .collect();
        f.write_str(&terms.join("+"))
    }
}

impl fmt::Debug for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} (l={})", self.l)
    }
}

/// Parse `poly := term ("+" term)*`, `term := "0" | "1" | "x" | "x^" uint`.
/// Whitespace is ignored; exponents are reduced mod `l`.
pub fn parse_poly(text: &str, l: usize) -> Result<RingElem> {
    if !(1..=MAX_L).contains(&l) {
        return Err(Error::Input(format!("lift parameter {l} outside 1..={MAX_L}")));
    }
    let chars: Vec<(usize, char)> = text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
    let err = |pos: usize, msg: &str| Error::Parse { pos, msg: msg.to_string() };
    if chars.is_empty() {
        return Err(err(0, "empty polynomial"));
    }
    let mut out = RingElem::zero(l);
    let mut i = 0;
    loop {
        let Some(&(pos, c)) = chars.get(i) else {
            return Err(err(text.len(), "expected a term"));
        };
        match c {
            '0' => i += 1,
            '1' => {
                out.bits ^= 1;
                i += 1;
            }
            'x' => {
                i += 1;
                let mut k: u64 = 1;
                if let Some(&(_, '^')) = chars.get(i) {
                    i += 1;
                    let start = i;
                    let mut digits = String::new();
                    while let Some(&(_, d)) = chars.get(i) {
                        if !d.is_ascii_digit() {
                            break;
                        }
                        digits.push(d);
                        i += 1;
                    }
                    if digits.is_empty() {
                        let p = chars.get(start).map_or(text.len(), |x| x.0);
                        return Err(err(p, "expected exponent after '^'"));
                    }
                    k = digits.parse().map_err(|_| err(chars[start].0, "exponent overflow"))?;
                }
                out.bits ^= 1 << (k % l as u64);
            }
            _ => return Err(err(pos, &format!("unexpected character '{c}'"))),
        }
        match chars.get(i) {
            None => break,
            Some(&(_, '+')) => i += 1,
            Some(&(p, c)) => return Err(err(p, &format!("expected '+' but found '{c}'"))),
        }
    }
    Ok(out)
}

/// A matrix over `R`, row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RingMatrix {
    l: usize,
    rows: usize,
    cols: usize,
    entries: Vec<RingElem>,
}

impl RingMatrix {
    pub fn zeros(l: usize, rows: usize, cols: usize) -> Self {
        Self { l, rows, cols, entries: vec![RingElem::zero(l); rows * cols] }
    }

    pub fn identity(l: usize, n: usize) -> Self {
        let mut m = Self::zeros(l, n, n);
        for i in 0..n {
            m.set(i, i, RingElem::one(l));
        }
        m
    }

    pub fn from_elems(l: usize, rows: Vec<Vec<RingElem>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::Shape("ragged ring matrix".into()));
            }
            for e in row {
                if e.l() != l {
                    return Err(Error::MixedLift(l, e.l()));
                }
                entries.push(e);
            }
        }
        Ok(Self { l, rows: r, cols: c, entries })
    }

    pub fn parse<S: AsRef<str>>(l: usize, rows: &[Vec<S>]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|row| row.iter().map(|s| parse_poly(s.as_ref(), l)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_elems(l, parsed)
    }

    /// Interpret a binary matrix as a matrix of 0/1 ring entries.
    pub fn from_binary(l: usize, m: &BitMatrix) -> Self {
        let mut out = Self::zeros(l, m.rows(), m.cols());
        for r in 0..m.rows() {
            for c in m.row(r).ones() {
                out.set(r, c, RingElem::one(l));
            }
        }
        out
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, r: usize, c: usize) -> RingElem {
        self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, e: RingElem) {
        assert_eq!(e.l(), self.l, "mixed lift parameters");
        self.entries[r * self.cols + c] = e;
    }

    pub fn entries(&self) -> &[RingElem] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(RingElem::is_zero)
    }

    pub fn is_zero_one(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero() || e.is_one())
    }

    /// Binary matrix marking the nonzero entries.
    pub fn pattern(&self) -> BitMatrix {
        BitMatrix::from_fn(self.rows, self.cols, |r, c| !self.get(r, c).is_zero())
    }

    fn check_l(&self, other: &Self) -> Result<()> {
        if self.l != other.l {
            return Err(Error::MixedLift(self.l, other.l));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_l(other)?;
        if self.shape() != other.shape() {
            return Err(Error::Shape(format!("cannot add {:?} and {:?}", self.shape(), other.shape())));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| *a + *b).collect();
        Ok(Self { entries, ..*self })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_l(other)?;
        if self.cols != other.rows {
            return Err(Error::Shape(format!("cannot multiply {:?} by {:?}", self.shape(), other.shape())));
        }
        let mut out = Self::zeros(self.l, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let idx = i * out.cols + j;
                    out.entries[idx] = out.entries[idx] + a * other.get(k, j);
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product; index `(i, j)` maps to `i * other.rows + j`.
    pub fn kron(&self, other: &Self) -> Result<Self> {
        self.check_l(other)?;
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        let mut out = Self::zeros(self.l, r, c);
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let a = self.get(i1, j1);
                if a.is_zero() {
                    continue;
                }
                for i2 in 0..other.rows {
                    for j2 in 0..other.cols {
                        out.set(i1 * other.rows + i2, j1 * other.cols + j2, a * other.get(i2, j2));
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn hstack(&self, other: &Self) -> Result<Self> {
        self.check_l(other)?;
        if self.rows != other.rows {
            return Err(Error::Shape("hstack row mismatch".into()));
        }
        let mut out = Self::zeros(self.l, self.rows, self.cols + other.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c));
            }
            for c in 0..other.cols {
                out.set(r, self.cols + c, other.get(r, c));
            }
        }
        Ok(out)
    }

    pub fn vstack(&self, other: &Self) -> Result<Self> {
        self.check_l(other)?;
        if self.cols != other.cols {
            return Err(Error::Shape("vstack column mismatch".into()));
        }
        let mut entries = self.entries.clone();
        entries.extend_from_slice(&other.entries);
        Ok(Self { l: self.l, rows: self.rows + other.rows, cols: self.cols, entries })
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.l, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c));
            }
        }
        out
    }

    /// `M* = (M_{j,i}^*)`.
    pub fn conj_transpose(&self) -> Self {
        let mut out = Self::zeros(self.l, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).involution());
            }
        }
        out
    }

    /// Entry-wise circulant lift to an `(l*rows) x (l*cols)` binary matrix.
    pub fn binary_lift(&self) -> BitMatrix {
        let l = self.l;
        let mut out = BitMatrix::zeros(l * self.rows, l * self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let e = self.get(r, c);
                for k in e.exponents() {
                    for i in 0..l {
                        out.set(r * l + i, c * l + (i + k) % l, true);
                    }
                }
            }
        }
        out
    }

    pub fn random<R: Rng + ?Sized>(l: usize, rows: usize, cols: usize, rng: &mut R) -> Self {
        let mut m = Self::zeros(l, rows, cols);
        for e in &mut m.entries {
            *e = RingElem::random(l, rng);
        }
        m
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|r| (0..self.cols).map(|c| self.get(r, c).to_string()).collect()).collect()
    }
}

impl fmt::Display for RingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.to_strings() {
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for RingMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RingMatrix {}x{} over l={}", self.rows, self.cols, self.l)?;
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for RingMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str, l: usize) -> RingElem {
        parse_poly(s, l).unwrap()
    }

    #[test]
    fn parse_examples() {
        assert_eq!(p("1+x^2", 3).bits(), 0b101);
        assert_eq!(p("x^3", 3), RingElem::one(3));
        assert_eq!(p("x^13+x^16", 17).to_string(), "x^13+x^16");
        assert_eq!(p(" x + x ", 5), RingElem::zero(5));
        assert_eq!(p("0", 4), RingElem::zero(4));
    }

    #[test]
    fn parse_errors_report_position() {
        match parse_poly("1+y", 3) {
            Err(Error::Parse { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_poly("x^", 3).is_err());
        assert!(parse_poly("1+", 3).is_err());
        assert!(parse_poly("", 3).is_err());
        assert!(parse_poly("x^99999999999999999999999", 3).is_err());
    }

    #[test]
    fn involution_examples() {
        assert_eq!(RingElem::one(3).involution(), RingElem::one(3));
        assert_eq!(p("1+x", 3).involution(), p("1+x^2", 3));
        assert_eq!(p("x^2", 3).involution(), p("x", 3));
    }

    #[test]
    fn chi_annihilates_binomials() {
        for l in [2usize, 3, 5, 7, 11, 13, 17] {
            let chi = RingElem::chi(l);
            assert_eq!(chi * chi, if l % 2 == 1 { chi } else { RingElem::zero(l) });
            assert_eq!(chi.lift().rank(), 1);
            for a in 0..l {
                for b in 1..l {
                    let e = RingElem::monomial(l, a) * (RingElem::one(l) + RingElem::monomial(l, b));
                    assert!((chi * e).is_zero());
                }
            }
        }
    }

    #[test]
    fn classify_entries() {
        assert_eq!(RingElem::zero(5).classify(), EntryKind::Zero);
        assert_eq!(p("x^3+x^4", 5).classify(), EntryKind::Binomial);
        assert_eq!(RingElem::chi(5).classify(), EntryKind::Other);
        assert_eq!(p("x", 5).classify(), EntryKind::Monomial);
    }

    #[test]
    fn mixed_lift_is_an_error() {
        assert!(RingElem::one(3).try_add(&RingElem::one(5)).is_err());
        let a = RingMatrix::identity(3, 2);
        let b = RingMatrix::identity(5, 2);
        assert!(a.mul(&b).is_err());
    }

    #[test]
    fn lift_homomorphism_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..300 {
            let l = [1usize, 2, 3, 5, 7, 11, 13, 17][rng.gen_range(0..8)];
            let (a, b, c) = (rng.gen_range(1..=4), rng.gen_range(1..=4), rng.gen_range(1..=4));
            let x = RingMatrix::random(l, a, b, &mut rng);
            let y = RingMatrix::random(l, a, b, &mut rng);
            let z = RingMatrix::random(l, b, c, &mut rng);
            assert_eq!(x.add(&y).unwrap().binary_lift(), x.binary_lift().add(&y.binary_lift()).unwrap());
            assert_eq!(x.mul(&z).unwrap().binary_lift(), x.binary_lift().mul(&z.binary_lift()).unwrap());
            assert_eq!(x.conj_transpose().binary_lift(), x.binary_lift().transpose());
        }
    }

    #[test]
    fn display_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..200 {
            let e = RingElem::random(13, &mut rng);
            assert_eq!(p(&e.to_string(), 13), e);
        }
    }
}
