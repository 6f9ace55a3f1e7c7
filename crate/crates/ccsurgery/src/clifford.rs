//! Symplectic Clifford algebra over F2, a sign-tracked stabilizer tableau and
//! the constructions showing which gate sets generate the Clifford group.

use std::collections::HashSet;
use std::fmt;

use rand::Rng;
use serde::Serialize;

use crate::error::{ensure, Error, Result};
use crate::gf2::{BitMatrix, BitVec};

/// A Clifford gate on 0-based qubit indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Gate {
    Cnot(usize, usize),
    Cz(usize, usize),
    Swap(usize, usize),
    S(usize),
    Sdg(usize),
    H(usize),
    /// `H` on every qubit.
    Hall,
    /// `S_i S_j^dagger`.
    SSdg(usize, usize),
    X(usize),
    Y(usize),
    Z(usize),
}

impl Gate {
    fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::Cnot(a, b) | Gate::Cz(a, b) | Gate::Swap(a, b) | Gate::SSdg(a, b) => vec![a, b],
            Gate::S(a) | Gate::Sdg(a) | Gate::H(a) | Gate::X(a) | Gate::Y(a) | Gate::Z(a) => vec![a],
            Gate::Hall => vec![],
        }
    }

    fn check(&self, m: usize) -> Result<()> {
        let q = self.qubits();
        if q.iter().any(|&i| i >= m) || (q.len() == 2 && q[0] == q[1]) {
            return Err(Error::Input(format!("gate {self} invalid on {m} qubits")));
        }
        Ok(())
    }

    /// Parse names such as `CNOT(1,3)`, `S1S2dg`, `H`, `Hall`, `SWAP(2,3)` (1-based).
    pub fn parse(s: &str) -> Result<Gate> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Input(format!("cannot parse gate '{s}'"));
        let (name, args) = match t.find('(') {
            Some(i) if t.ends_with(')') => (&t[..i], &t[i + 1..t.len() - 1]),
            _ => (t.as_str(), ""),
        };
        let nums: Vec<usize> = if args.is_empty() {
            Vec::new()
        } else {
            args.split(',').map(|a| a.parse::<usize>().map_err(|_| bad())).collect::<Result<_>>()?
        };
        if nums.contains(&0) {
            return Err(bad());
        }
        let one = |f: fn(usize) -> Gate| if nums.len() == 1 { Ok(f(nums[0] - 1)) } else { Err(bad()) };
        let two = |f: fn(usize, usize) -> Gate| if nums.len() == 2 { Ok(f(nums[0] - 1, nums[1] - 1)) } else { Err(bad()) };
        match name.to_ascii_uppercase().as_str() {
            "CNOT" | "CX" => two(Gate::Cnot),
            "CZ" => two(Gate::Cz),
            "SWAP" => two(Gate::Swap),
            "SSDG" => two(Gate::SSdg),
            "S" => one(Gate::S),
            "SDG" => one(Gate::Sdg),
            "H" if nums.is_empty() => Ok(Gate::Hall),
            "H" => one(Gate::H),
            "HALL" => Ok(Gate::Hall),
            "X" => one(Gate::X),
            "Y" => one(Gate::Y),
            "Z" => one(Gate::Z),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::Cnot(a, b) => write!(f, "CNOT({},{})", a + 1, b + 1),
            Gate::Cz(a, b) => write!(f, "CZ({},{})", a + 1, b + 1),
            Gate::Swap(a, b) => write!(f, "SWAP({},{})", a + 1, b + 1),
            Gate::SSdg(a, b) => write!(f, "SSdg({},{})", a + 1, b + 1),
            Gate::S(a) => write!(f, "S({})", a + 1),
            Gate::Sdg(a) => write!(f, "Sdg({})", a + 1),
            Gate::H(a) => write!(f, "H({})", a + 1),
            Gate::Hall => write!(f, "Hall"),
            Gate::X(a) => write!(f, "X({})", a + 1),
            Gate::Y(a) => write!(f, "Y({})", a + 1),
            Gate::Z(a) => write!(f, "Z({})", a + 1),
        }
    }
}

/// Time-ordered gate sequence: the first gate acts first.
pub type Word = Vec<Gate>;

pub fn word_to_string(w: &[Gate]) -> String {
    w.iter().map(Gate::to_string).collect::<Vec<_>>().join(" ")
}

/// Inverse of a word, up to Paulis (which have trivial symplectic action).
pub fn inverse_word(w: &[Gate]) -> Word {
    w.iter()
        .rev()
        .map(|g| match *g {
            Gate::S(a) => Gate::Sdg(a),
            Gate::Sdg(a) => Gate::S(a),
            Gate::SSdg(a, b) => Gate::SSdg(b, a),
            g => g,
        })
        .collect()
}

/// Column-vector convention: a Pauli `(x|z)` maps to `mat * (x|z)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymplecticOp {
    pub m: usize,
    pub mat: BitMatrix,
}

impl fmt::Debug for SymplecticOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymplecticOp(m={})\n{}", self.m, self.mat)
    }
}

impl Serialize for SymplecticOp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.mat.serialize(s)
    }
}

pub fn omega(m: usize) -> BitMatrix {
    BitMatrix::from_fn(2 * m, 2 * m, |i, j| (i < m) != (j < m) && i % m == j % m)
}

/// Inverse over F2, or an error if singular.
pub fn gl_inverse(a: &BitMatrix) -> Result<BitMatrix> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::Shape("inverse of a non-square matrix".into()));
    }
    let aug = a.hstack(&BitMatrix::identity(n))?;
    let (r, piv) = aug.rref();
    if piv.len() < n || piv.iter().enumerate().any(|(i, &p)| p != i) {
        return Err(Error::Input("matrix is singular".into()));
    }
    Ok(r.select_cols(&(n..2 * n).collect::<Vec<_>>()))
}

impl SymplecticOp {
    pub fn identity(m: usize) -> Self {
        Self { m, mat: BitMatrix::identity(2 * m) }
    }

    pub fn from_matrix(mat: BitMatrix) -> Result<Self> {
        if mat.rows() != mat.cols() || !mat.rows().is_multiple_of(2) {
            return Err(Error::Shape("symplectic matrix must be 2m x 2m".into()));
        }
        let op = Self { m: mat.rows() / 2, mat };
        ensure!(op.is_symplectic(), "matrix does not preserve the symplectic form");
        Ok(op)
    }

    /// `[[I, 0], [C, I]]` for symmetric `C`.
    pub fn lambda_of(c: &BitMatrix) -> Result<Self> {
        let m = c.rows();
        if c.cols() != m || *c != c.transpose() {
            return Err(Error::Input("C must be square and symmetric".into()));
        }
        let mat = BitMatrix::block2x2(Some(&BitMatrix::identity(m)), None, Some(c), Some(&BitMatrix::identity(m)))?;
        Ok(Self { m, mat })
    }

    /// `[[A, 0], [0, (A^-1)^T]]`.
    pub fn l_of(a: &BitMatrix) -> Result<Self> {
        let inv = gl_inverse(a)?;
        let mat = BitMatrix::block2x2(Some(a), None, None, Some(&inv.transpose()))?;
        Ok(Self { m: a.rows(), mat })
    }

    pub fn of_gate(g: Gate, m: usize) -> Result<Self> {
        g.check(m)?;
        let mut mat = BitMatrix::identity(2 * m);
        let id = |i| i;
        let zc = |i| m + i;
        match g {
            Gate::Cnot(c, t) => {
                mat.set(id(t), id(c), true);
                mat.set(zc(c), zc(t), true);
            }
            Gate::Cz(a, b) => {
                mat.set(zc(a), id(b), true);
                mat.set(zc(b), id(a), true);
            }
            Gate::Swap(a, b) => {
                for off in [0, m] {
                    mat.set(off + a, off + a, false);
                    mat.set(off + b, off + b, false);
                    mat.set(off + a, off + b, true);
                    mat.set(off + b, off + a, true);
                }
            }
            Gate::S(a) | Gate::Sdg(a) => mat.set(zc(a), id(a), true),
            Gate::SSdg(a, b) => {
                mat.set(zc(a), id(a), true);
                mat.set(zc(b), id(b), true);
            }
            Gate::H(a) => {
                mat.set(id(a), id(a), false);
                mat.set(zc(a), zc(a), false);
                mat.set(id(a), zc(a), true);
                mat.set(zc(a), id(a), true);
            }
            Gate::Hall => mat = omega(m),
            Gate::X(_) | Gate::Y(_) | Gate::Z(_) => {}
        }
        Ok(Self { m, mat })
    }

    pub fn of_word(w: &[Gate], m: usize) -> Result<Self> {
        let mut op = Self::identity(m);
        for &g in w {
            op = op.then(&Self::of_gate(g, m)?);
        }
        Ok(op)
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &SymplecticOp) -> SymplecticOp {
        SymplecticOp { m: self.m, mat: next.mat.mul(&self.mat).expect("matching sizes") }
    }

    /// Operator product `self * other` (other acts first).
    pub fn compose(&self, other: &SymplecticOp) -> SymplecticOp {
        other.then(self)
    }

    pub fn inverse(&self) -> SymplecticOp {
        let w = omega(self.m);
        let inv = w.mul(&self.mat.transpose()).and_then(|t| t.mul(&w)).expect("square");
        SymplecticOp { m: self.m, mat: inv }
    }

    pub fn is_symplectic(&self) -> bool {
        let w = omega(self.m);
        self.mat.transpose().mul(&w).and_then(|t| t.mul(&self.mat)).map(|t| t == w).unwrap_or(false)
    }

    pub fn apply(&self, v: &BitVec) -> BitVec {
        self.mat.mul_vec(v)
    }

    /// Row-major bits packed into one word (requires `4 m^2 <= 64`).
    pub fn key(&self) -> u64 {
        pack(&self.mat)
    }

    /// If the matrix has block form `[[I, 0], [C, I]]`, return `C`.
    pub fn as_lambda(&self) -> Option<BitMatrix> {
        let m = self.m;
        let ok = (0..2 * m).all(|i| {
            (0..m).all(|j| {
                let v = self.mat.get(i, m + j);
                if i < m {
                    v == (i == j) && self.mat.get(i, j) == (i == j)
                } else {
                    v == (i - m == j)
                }
            })
        });
        ok.then(|| BitMatrix::from_fn(m, m, |i, j| self.mat.get(m + i, j)))
    }
}

fn pack(m: &BitMatrix) -> u64 {
    let n = m.rows();
    assert!(n * n <= 64, "matrix too large to pack");
    let mut k = 0u64;
    for i in 0..n {
        for j in m.row(i).ones() {
            k |= 1 << (i * n + j);
        }
    }
    k
}

/// Rows of a packed `n x n` matrix as bitmasks.
fn unpack_rows(k: u64, n: usize) -> [u64; 8] {
    let mut r = [0u64; 8];
    let mask = (1u64 << n) - 1;
    for (i, row) in r.iter_mut().enumerate().take(n) {
        *row = (k >> (i * n)) & mask;
    }
    r
}

fn pack_rows(r: &[u64; 8], n: usize) -> u64 {
    (0..n).fold(0, |k, i| k | r[i] << (i * n))
}

/// `|Sp(2m, 2)| = 2^(m^2) * prod_{i=1..m} (4^i - 1)`.
pub fn sp_order(m: usize) -> u128 {
    (1..=m).fold(1u128 << (m * m), |acc, i| acc * ((1u128 << (2 * i)) - 1))
}

#[derive(Clone, Debug, Serialize)]
pub struct GenerationReport {
    pub m: usize,
    pub order: u64,
    pub target: u128,
    pub full: bool,
}

/// Closure of the generators under multiplication by breadth-first search.
/// `max_elements` bounds the visited set (about 16 bytes per element).
pub fn generation_check(m: usize, generators: &[SymplecticOp], max_elements: usize) -> Result<GenerationReport> {
    let n = 2 * m;
    if n * n > 64 {
        return Err(Error::Budget(format!("exhaustive closure supports m <= 4, got m = {m}")));
    }
    let gens: Vec<[u64; 8]> = generators.iter().map(|g| unpack_rows(g.key(), n)).collect();
    let start = pack(&BitMatrix::identity(n));
    let mut seen: HashSet<u64> = HashSet::with_capacity(1 << 16);
    seen.insert(start);
    let mut frontier = vec![start];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &k in &frontier {
            let rows = unpack_rows(k, n);
            for g in &gens {
                let mut out = [0u64; 8];
                for i in 0..n {
                    let mut acc = 0;
                    let mut bits = g[i];
                    while bits != 0 {
                        let c = bits.trailing_zeros() as usize;
                        acc ^= rows[c];
                        bits &= bits - 1;
                    }
                    out[i] = acc;
                }
                let key = pack_rows(&out, n);
                if seen.insert(key) {
                    if seen.len() > max_elements {
                        return Err(Error::Budget(format!("closure exceeded {max_elements} elements")));
                    }
                    next.push(key);
                }
            }
        }
        frontier = next;
    }
    let target = sp_order(m);
    Ok(GenerationReport { m, order: seen.len() as u64, target, full: seen.len() as u128 == target })
}

/// The generator set `{CNOT(i,j), S_i S_j^dagger, H^{(x)m}}`.
pub fn standard_generators(m: usize, with_phase_pairs: bool) -> Vec<SymplecticOp> {
    let mut g = Vec::new();
    for i in 0..m {
        for j in 0..m {
            if i != j {
                g.push(SymplecticOp::of_gate(Gate::Cnot(i, j), m).unwrap());
                if with_phase_pairs && i < j {
                    g.push(SymplecticOp::of_gate(Gate::SSdg(i, j), m).unwrap());
                }
            }
        }
    }
    g.push(SymplecticOp::of_gate(Gate::Hall, m).unwrap());
    g
}

/// CNOT words for `U_1, U_2, U_3` (time order) and the matrices `A_k` they realize.
pub fn phase_synthesis_words() -> [(Word, BitMatrix); 3] {
    [
        (
            vec![Gate::Cnot(0, 2), Gate::Cnot(2, 0), Gate::Cnot(0, 2)],
            BitMatrix::parse("001;010;100"),
        ),
        (
            vec![Gate::Cnot(1, 2), Gate::Cnot(2, 1), Gate::Cnot(1, 0), Gate::Cnot(0, 2)],
            BitMatrix::parse("101;001;110"),
        ),
        (
            vec![Gate::Cnot(0, 1), Gate::Cnot(1, 0), Gate::Cnot(2, 0), Gate::Cnot(0, 1)],
            BitMatrix::parse("011;101;001"),
        ),
    ]
}

fn embed(a: &BitMatrix, m: usize) -> BitMatrix {
    BitMatrix::from_fn(m, m, |i, j| if i < 3 && j < 3 { a.get(i, j) } else { i == j })
}

#[derive(Clone, Debug, Serialize)]
pub struct SynthesisReport {
    pub m: usize,
    pub word: Vec<String>,
    pub c_matrices: Vec<BitMatrix>,
    pub c_sum_is_e11: bool,
    pub action_matches: bool,
}

/// `S_1` from CNOTs and `S_1 S_2^dagger`: `G_k = U_k P U_k^-1` with
/// `pi(U_k) = L(A_k)`, and `Lambda(C_1) Lambda(C_2) Lambda(C_3) = Lambda(E_11)`.
pub fn synthesize_s1(m: usize) -> Result<(Word, SynthesisReport)> {
    if m < 3 {
        return Err(Error::Input("phase synthesis needs m >= 3".into()));
    }
    let d12 = BitMatrix::from_fn(m, m, |i, j| i == j && i < 2);
    let mut sum = BitMatrix::zeros(m, m);
    let mut word = Word::new();
    let mut cs = Vec::new();
    for (u, a) in phase_synthesis_words() {
        let at = embed(&a, m);
        let pu = SymplecticOp::of_word(&u, m)?;
        ensure!(pu == SymplecticOp::l_of(&at)?, "CNOT word does not realize L(A_k)");
        let inv = gl_inverse(&at)?;
        let c = inv.transpose().mul(&d12)?.mul(&inv)?;
        let g = SymplecticOp::l_of(&at)?.compose(&SymplecticOp::lambda_of(&d12)?).compose(&SymplecticOp::l_of(&inv)?);
        ensure!(g == SymplecticOp::lambda_of(&c)?, "conjugation identity fails for A_k");
        sum = sum.add(&c)?;
        cs.push(c);
        word.extend(inverse_word(&u));
        word.push(Gate::SSdg(0, 1));
        word.extend(u);
    }
    let e11 = BitMatrix::from_fn(m, m, |i, j| i == 0 && j == 0);
    let c_sum_is_e11 = sum == e11;
    ensure!(c_sum_is_e11, "C_1 + C_2 + C_3 differs from E_11");
    let action_matches = SymplecticOp::of_word(&word, m)? == SymplecticOp::of_gate(Gate::S(0), m)?;
    ensure!(action_matches, "synthesized word does not act as S_1");
    let report = SynthesisReport { m, word: word.iter().map(Gate::to_string).collect(), c_matrices: cs, c_sum_is_e11, action_matches };
    Ok((word, report))
}

fn swap_as_cnots(a: usize, b: usize) -> Word {
    vec![Gate::Cnot(a, b), Gate::Cnot(b, a), Gate::Cnot(a, b)]
}

/// `S_i` by conjugating the `S_1` word with a CNOT-built SWAP.
pub fn synthesize_si(i: usize, m: usize) -> Result<Word> {
    let (s1, _) = synthesize_s1(m)?;
    let w = if i == 0 {
        s1
    } else {
        let sw = swap_as_cnots(0, i);
        sw.iter().chain(&s1).chain(&sw).copied().collect()
    };
    ensure!(SymplecticOp::of_word(&w, m)? == SymplecticOp::of_gate(Gate::S(i), m)?, "S_{} synthesis failed", i + 1);
    Ok(w)
}

/// `H_i = S_i (H^m S_i H^m) S_i`.
pub fn synthesize_hi(i: usize, m: usize) -> Result<Word> {
    let s = synthesize_si(i, m)?;
    let mut w = s.clone();
    w.push(Gate::Hall);
    w.extend(&s);
    w.push(Gate::Hall);
    w.extend(&s);
    ensure!(SymplecticOp::of_word(&w, m)? == SymplecticOp::of_gate(Gate::H(i), m)?, "H_{} synthesis failed", i + 1);
    Ok(w)
}

/// A Pauli operator with sign; `x = z = 1` on a qubit denotes `Y`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliVec {
    pub n: usize,
    pub x: u64,
    pub z: u64,
    pub neg: bool,
}

impl PauliVec {
    pub fn identity(n: usize) -> Self {
        assert!(n <= 64, "at most 64 qubits");
        Self { n, x: 0, z: 0, neg: false }
    }

    pub fn xs(n: usize, qubits: &[usize]) -> Self {
        Self { x: qubits.iter().fold(0, |a, &q| a | 1 << q), ..Self::identity(n) }
    }

    pub fn zs(n: usize, qubits: &[usize]) -> Self {
        Self { z: qubits.iter().fold(0, |a, &q| a | 1 << q), ..Self::identity(n) }
    }

    pub fn single(n: usize, q: usize, p: char) -> Self {
        let b = 1u64 << q;
        match p {
            'X' => Self { x: b, ..Self::identity(n) },
            'Z' => Self { z: b, ..Self::identity(n) },
            'Y' => Self { x: b, z: b, ..Self::identity(n) },
            _ => Self::identity(n),
        }
    }

    /// Parse `+XIZ`, `-YY`, `ZZI`.
    pub fn parse(s: &str) -> Result<Self> {
        let (neg, body) = match s.as_bytes().first() {
            Some(b'-') => (true, &s[1..]),
            Some(b'+') => (false, &s[1..]),
            _ => (false, s),
        };
        let mut p = Self::identity(body.len());
        p.neg = neg;
        for (q, c) in body.chars().enumerate() {
            match c {
                'I' | '_' => {}
                'X' => p.x |= 1 << q,
                'Z' => p.z |= 1 << q,
                'Y' => {
                    p.x |= 1 << q;
                    p.z |= 1 << q;
                }
                _ => return Err(Error::Input(format!("bad Pauli character '{c}'"))),
            }
        }
        Ok(p)
    }

    pub fn negate(mut self) -> Self {
        self.neg = !self.neg;
        self
    }

    pub fn commutes(&self, o: &PauliVec) -> bool {
        ((self.x & o.z).count_ones() + (self.z & o.x).count_ones()).is_multiple_of(2)
    }

    /// Product `self * other` with sign tracking (Hermitian result required).
    pub fn mul(&self, o: &PauliVec) -> PauliVec {
        let e = 2 * (self.neg as i32) + 2 * (o.neg as i32) + phase_exponent(self.x, self.z, o.x, o.z);
        let e = e.rem_euclid(4);
        debug_assert!(e % 2 == 0, "product of anticommuting Paulis");
        PauliVec { n: self.n, x: self.x ^ o.x, z: self.z ^ o.z, neg: e == 2 }
    }

    pub fn weight(&self) -> u32 {
        (self.x | self.z).count_ones()
    }

    /// Restrict to the first `n` qubits after checking the rest is identity.
    pub fn truncate(&self, n: usize) -> Option<PauliVec> {
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        ((self.x | self.z) & !mask == 0).then_some(PauliVec { n, x: self.x, z: self.z, neg: self.neg })
    }
}

impl fmt::Display for PauliVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(if self.neg { "-" } else { "+" })?;
        for q in 0..self.n {
            let c = match (self.x >> q & 1, self.z >> q & 1) {
                (0, 0) => 'I',
                (1, 0) => 'X',
                (0, 1) => 'Z',
                _ => 'Y',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Exponent of `i` picked up when multiplying the single-qubit Paulis,
/// summed over qubits.
fn phase_exponent(x1: u64, z1: u64, x2: u64, z2: u64) -> i32 {
    let mut e = 0i32;
    let mut bits = (x1 | z1) & (x2 | z2);
    while bits != 0 {
        let q = bits.trailing_zeros();
        bits &= bits - 1;
        let (a, b, c, d) = ((x1 >> q & 1) as i32, (z1 >> q & 1) as i32, (x2 >> q & 1) as i32, (z2 >> q & 1) as i32);
        e += match (a, b) {
            (1, 1) => d - c,
            (1, 0) => d * (2 * c - 1),
            (0, 1) => c * (1 - 2 * d),
            _ => 0,
        };
    }
    e
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Outcome {
    /// `true` for eigenvalue `-1`.
    pub value: bool,
    pub deterministic: bool,
}

/// Source of outcomes for non-deterministic measurements.
pub trait OutcomeSource {
    fn next(&mut self) -> bool;
}

impl<R: Rng> OutcomeSource for R {
    fn next(&mut self) -> bool {
        self.gen()
    }
}

/// Sign-tracked stabilizer tableau with destabilizers, `n <= 64`.
#[derive(Clone, Debug)]
pub struct StabTableau {
    pub n: usize,
    /// Rows `0..n` are destabilizers, `n..2n` stabilizers.
    rows: Vec<PauliVec>,
    /// Pending Pauli corrections, recorded rather than applied.
    pub frame: PauliVec,
}

impl StabTableau {
    /// `|0...0>`.
    pub fn new(n: usize) -> Self {
        let mut rows = Vec::with_capacity(2 * n);
        for q in 0..n {
            rows.push(PauliVec::single(n, q, 'X'));
        }
        for q in 0..n {
            rows.push(PauliVec::single(n, q, 'Z'));
        }
        Self { n, rows, frame: PauliVec::identity(n) }
    }

    pub fn stabilizers(&self) -> &[PauliVec] {
        &self.rows[self.n..]
    }

    pub fn destabilizers(&self) -> &[PauliVec] {
        &self.rows[..self.n]
    }

    pub fn apply(&mut self, g: Gate) -> Result<()> {
        g.check(self.n)?;
        for r in &mut self.rows {
            conj(r, g, self.n);
        }
        Ok(())
    }

    pub fn apply_word(&mut self, w: &[Gate]) -> Result<()> {
        for &g in w {
            self.apply(g)?;
        }
        Ok(())
    }

    /// Multiply the state by a Pauli (as an operator), flipping signs.
    pub fn apply_pauli(&mut self, p: &PauliVec) {
        for r in &mut self.rows {
            if !r.commutes(p) {
                r.neg = !r.neg;
            }
        }
    }

    pub fn record_frame(&mut self, p: &PauliVec) {
        self.frame = self.frame.mul(&PauliVec { neg: false, ..*p });
        self.frame.neg = false;
    }

    pub fn flush_frame(&mut self) {
        let f = self.frame;
        self.apply_pauli(&f);
        self.frame = PauliVec::identity(self.n);
    }

    /// Sign of `p` if `+-p` is in the stabilizer group (`Some(true)` means `-p` is).
    pub fn peek(&self, p: &PauliVec) -> Option<bool> {
        let n = self.n;
        if self.rows[n..].iter().any(|s| !s.commutes(p)) {
            return None;
        }
        let mut acc = PauliVec::identity(n);
        for i in 0..n {
            if !self.rows[i].commutes(p) {
                acc = acc.mul(&self.rows[n + i]);
            }
        }
        debug_assert!(acc.x == p.x && acc.z == p.z);
        Some(acc.neg != p.neg)
    }

    /// Measure `p`; non-deterministic outcomes come from `src`.
    pub fn measure(&mut self, p: &PauliVec, src: &mut dyn OutcomeSource) -> Outcome {
        if let Some(v) = self.peek(p) {
            return Outcome { value: v, deterministic: true };
        }
        let n = self.n;
        let piv = (n..2 * n).find(|&i| !self.rows[i].commutes(p)).expect("anticommuting stabilizer");
        let pr = self.rows[piv];
        for i in 0..2 * n {
            if i != piv && !self.rows[i].commutes(p) {
                self.rows[i] = self.rows[i].mul(&pr);
            }
        }
        let value = src.next();
        self.rows[piv - n] = pr;
        self.rows[piv] = PauliVec { neg: p.neg ^ value, ..*p };
        Outcome { value, deterministic: false }
    }

    /// Reset qubit `q` to `|0>` (measure Z, flip if needed).
    pub fn reset(&mut self, q: usize, src: &mut dyn OutcomeSource) {
        let z = PauliVec::single(self.n, q, 'Z');
        if self.measure(&z, src).value {
            self.apply_pauli(&PauliVec::single(self.n, q, 'X'));
        }
    }
}

/// Conjugate a Pauli by a gate in place, signs included.
pub fn conjugate(r: &mut PauliVec, g: Gate) {
    let n = r.n;
    conj(r, g, n);
}

fn conj(r: &mut PauliVec, g: Gate, n: usize) {
    let bit = |v: u64, q: usize| v >> q & 1 == 1;
    match g {
        Gate::H(a) => {
            let (x, z) = (bit(r.x, a), bit(r.z, a));
            r.neg ^= x && z;
            r.x = (r.x & !(1 << a)) | (z as u64) << a;
            r.z = (r.z & !(1 << a)) | (x as u64) << a;
        }
        Gate::Hall => {
            for q in 0..n {
                conj(r, Gate::H(q), n);
            }
        }
        Gate::S(a) => {
            let (x, z) = (bit(r.x, a), bit(r.z, a));
            r.neg ^= x && z;
            r.z ^= (x as u64) << a;
        }
        Gate::Sdg(a) => {
            let (x, z) = (bit(r.x, a), bit(r.z, a));
            r.neg ^= x && !z;
            r.z ^= (x as u64) << a;
        }
        Gate::SSdg(a, b) => {
            conj(r, Gate::S(a), n);
            conj(r, Gate::Sdg(b), n);
        }
        Gate::Cnot(c, t) => {
            let (xc, zc, xt, zt) = (bit(r.x, c), bit(r.z, c), bit(r.x, t), bit(r.z, t));
            r.neg ^= xc && zt && (xt == zc);
            r.x ^= (xc as u64) << t;
            r.z ^= (zt as u64) << c;
        }
        Gate::Cz(a, b) => {
            conj(r, Gate::H(b), n);
            conj(r, Gate::Cnot(a, b), n);
            conj(r, Gate::H(b), n);
        }
        Gate::Swap(a, b) => {
            for v in [&mut r.x, &mut r.z] {
                let (pa, pb) = (*v >> a & 1, *v >> b & 1);
                *v = (*v & !(1 << a) & !(1 << b)) | pa << b | pb << a;
            }
        }
        Gate::X(a) => r.neg ^= bit(r.z, a),
        Gate::Z(a) => r.neg ^= bit(r.x, a),
        Gate::Y(a) => r.neg ^= bit(r.x, a) ^ bit(r.z, a),
    }
}

/// Replays a procedure once per combination of random outcomes. The
/// procedure asks `ctx.next()` for each random outcome; every branch is
/// visited exactly once.
pub fn for_each_branch<T>(mut f: impl FnMut(&mut BranchCtx) -> T) -> Vec<(Vec<bool>, T)> {
    let mut out = Vec::new();
    let mut stack = vec![Vec::new()];
    while let Some(prefix) = stack.pop() {
        let mut ctx = BranchCtx { taken: Vec::new(), prefix: prefix.clone() };
        let r = f(&mut ctx);
        for j in prefix.len()..ctx.taken.len() {
            let mut alt = ctx.taken[..j].to_vec();
            alt.push(true);
            stack.push(alt);
        }
        out.push((ctx.taken, r));
    }
    out
}

pub struct BranchCtx {
    taken: Vec<bool>,
    prefix: Vec<bool>,
}

impl OutcomeSource for BranchCtx {
    fn next(&mut self) -> bool {
        let v = self.prefix.get(self.taken.len()).copied().unwrap_or(false);
        self.taken.push(v);
        v
    }
}

/// The six single-qubit stabilizer states as preparation words from `|0>`.
pub fn single_qubit_states(q: usize) -> [(&'static str, Word); 6] {
    [
        ("|0>", vec![]),
        ("|1>", vec![Gate::X(q)]),
        ("|+>", vec![Gate::H(q)]),
        ("|->", vec![Gate::X(q), Gate::H(q)]),
        ("|+i>", vec![Gate::H(q), Gate::S(q)]),
        ("|-i>", vec![Gate::H(q), Gate::Sdg(q)]),
    ]
}

/// PPM-induced CNOT on `(control, aux, target) = (0, 1, 2)`: prepare the
/// auxiliary in `|+>`, measure `Z_c Z_a`, then `X_a X_t`, then `Z_a`.
/// Corrections: `Z_c` if the `XX` outcome is `-1`, `X_t` if the `ZZ` and
/// final `Z_a` outcomes differ.
pub fn ppm_cnot(t: &mut StabTableau, c: usize, a: usize, tg: usize, src: &mut dyn OutcomeSource) -> [Outcome; 3] {
    let n = t.n;
    t.apply(Gate::H(a)).expect("valid qubit");
    let m1 = t.measure(&PauliVec::zs(n, &[c, a]), src);
    let m2 = t.measure(&PauliVec::xs(n, &[a, tg]), src);
    let m3 = t.measure(&PauliVec::zs(n, &[a]), src);
    if m2.value {
        t.record_frame(&PauliVec::zs(n, &[c]));
    }
    if m1.value != m3.value {
        t.record_frame(&PauliVec::xs(n, &[tg]));
    }
    [m1, m2, m3]
}

#[derive(Clone, Debug, Serialize)]
pub struct PpmCnotReport {
    pub inputs_checked: usize,
    pub branches_per_input: usize,
    pub failures: Vec<String>,
    pub choi_ok: bool,
}

/// Checks the PPM CNOT against a direct CNOT on all 36 product stabilizer
/// inputs and on a maximally entangled reference, over every branch.
pub fn verify_ppm_cnot() -> PpmCnotReport {
    let mut failures = Vec::new();
    let mut branches = 0;
    let mut inputs = 0;
    for (cn, cw) in single_qubit_states(0) {
        for (tn, tw) in single_qubit_states(2) {
            inputs += 1;
            let mut expect = StabTableau::new(3);
            expect.apply_word(&cw).unwrap();
            expect.apply_word(&tw).unwrap();
            expect.apply(Gate::Cnot(0, 2)).unwrap();
            let runs = for_each_branch(|ctx| {
                let mut t = StabTableau::new(3);
                t.apply_word(&cw).unwrap();
                t.apply_word(&tw).unwrap();
                ppm_cnot(&mut t, 0, 1, 2, ctx);
                t.flush_frame();
                t
            });
            branches = branches.max(runs.len());
            for (path, t) in runs {
                for s in expect.stabilizers() {
                    // Expected generators live on qubits 0 and 2 only.
                    if s.x & 2 != 0 || s.z & 2 != 0 {
                        continue;
                    }
                    if t.peek(s) != Some(false) {
                        failures.push(format!("{cn} {tn} branch {path:?}: {s} not stabilized"));
                    }
                }
            }
        }
    }
    // Choi check: qubits 0 and 2 are Bell-paired with references 3 and 4.
    let mut choi_ok = true;
    for (_, t) in for_each_branch(|ctx| {
        let mut t = StabTableau::new(5);
        for (d, r) in [(0, 3), (2, 4)] {
            t.apply(Gate::H(r)).unwrap();
            t.apply(Gate::Cnot(r, d)).unwrap();
        }
        ppm_cnot(&mut t, 0, 1, 2, ctx);
        t.flush_frame();
        t
    }) {
        let mut e = StabTableau::new(5);
        for (d, r) in [(0, 3), (2, 4)] {
            e.apply(Gate::H(r)).unwrap();
            e.apply(Gate::Cnot(r, d)).unwrap();
        }
        e.apply(Gate::Cnot(0, 2)).unwrap();
        for s in e.stabilizers() {
            if (s.x | s.z) & 2 == 0 && t.peek(s) != Some(false) {
                choi_ok = false;
            }
        }
    }
    PpmCnotReport { inputs_checked: inputs, branches_per_input: branches, failures, choi_ok }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn all_gates(m: usize) -> Vec<Gate> {
        let mut g = vec![Gate::Hall];
        for i in 0..m {
            g.extend([Gate::S(i), Gate::Sdg(i), Gate::H(i), Gate::X(i), Gate::Y(i), Gate::Z(i)]);
            for j in 0..m {
                if i != j {
                    g.extend([Gate::Cnot(i, j), Gate::Cz(i, j), Gate::Swap(i, j), Gate::SSdg(i, j)]);
                }
            }
        }
        g
    }

    #[test]
    fn gates_are_symplectic() {
        for m in 1..=4 {
            for g in all_gates(m) {
                assert!(SymplecticOp::of_gate(g, m).unwrap().is_symplectic(), "{g}");
            }
        }
        let sw = SymplecticOp::of_gate(Gate::Swap(0, 2), 3).unwrap();
        assert_eq!(sw.then(&sw), SymplecticOp::identity(3));
        let h = SymplecticOp::of_gate(Gate::H(1), 3).unwrap();
        assert_eq!(h.then(&h), SymplecticOp::identity(3));
    }

    #[test]
    fn paired_phase_is_lambda() {
        let d = BitMatrix::from_fn(4, 4, |i, j| i == j && (i == 1 || i == 3));
        assert_eq!(SymplecticOp::of_gate(Gate::SSdg(1, 3), 4).unwrap(), SymplecticOp::lambda_of(&d).unwrap());
        assert_eq!(SymplecticOp::lambda_of(&BitMatrix::zeros(3, 3)).unwrap(), SymplecticOp::identity(3));
    }

    #[test]
    fn lambda_and_l_identities_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut done = 0;
        while done < 500 {
            let m = rng.gen_range(1..=5);
            let a = BitMatrix::random(m, m, &mut rng);
            let Ok(inv) = gl_inverse(&a) else { continue };
            let mut c = BitMatrix::random(m, m, &mut rng);
            c = c.add(&c.transpose()).unwrap();
            for i in 0..m {
                c.set(i, i, rng.gen());
            }
            let c2 = {
                let mut t = BitMatrix::random(m, m, &mut rng);
                t = t.add(&t.transpose()).unwrap();
                t
            };
            let la = SymplecticOp::l_of(&a).unwrap();
            let lhs = la.compose(&SymplecticOp::lambda_of(&c).unwrap()).compose(&la.inverse());
            let rhs = SymplecticOp::lambda_of(&inv.transpose().mul(&c).unwrap().mul(&inv).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
            let sum = SymplecticOp::lambda_of(&c.add(&c2).unwrap()).unwrap();
            assert_eq!(SymplecticOp::lambda_of(&c).unwrap().compose(&SymplecticOp::lambda_of(&c2).unwrap()), sum);
            assert!(la.is_symplectic());
            done += 1;
        }
    }

    #[test]
    fn first_word_matrix_is_an_involution() {
        let (_, a1) = &phase_synthesis_words()[0];
        assert_eq!(a1.mul(a1).unwrap(), BitMatrix::identity(3));
    }

    #[test]
    fn phase_and_hadamard_synthesis() {
        for m in [3, 4] {
            let (_, rep) = synthesize_s1(m).unwrap();
            assert!(rep.c_sum_is_e11 && rep.action_matches);
            for i in 0..m {
                let h = synthesize_hi(i, m).unwrap();
                let twice: Word = h.iter().chain(&h).copied().collect();
                assert_eq!(SymplecticOp::of_word(&twice, m).unwrap(), SymplecticOp::identity(m));
            }
        }
        assert!(synthesize_s1(2).is_err());
    }

    #[test]
    fn small_closures() {
        let m1 = generation_check(1, &[SymplecticOp::of_gate(Gate::H(0), 1).unwrap()], 100).unwrap();
        assert_eq!((m1.order, m1.target), (2, 6));
        let m2 = generation_check(2, &standard_generators(2, true), 1 << 20).unwrap();
        assert!(!m2.full && m2.order < 720);
        assert_eq!(sp_order(3), 1_451_520);
    }

    #[test]
    fn tableau_agrees_with_symplectic_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for m in 1..=4 {
            let gates = all_gates(m);
            for _ in 0..20 {
                let w: Word = (0..12).map(|_| gates[rng.gen_range(0..gates.len())]).collect();
                let op = SymplecticOp::of_word(&w, m).unwrap();
                for q in 0..2 * m {
                    let (x, z) = if q < m { (1u64 << q, 0) } else { (0, 1u64 << (q - m)) };
                    let mut r = PauliVec { n: m, x, z, neg: false };
                    for &g in &w {
                        conj(&mut r, g, m);
                    }
                    let col = op.apply(&BitVec::from_indices(2 * m, [q]));
                    let bits: u64 = (0..m).fold(0, |a, i| a | (col.get(i) as u64) << i);
                    let zbits: u64 = (0..m).fold(0, |a, i| a | (col.get(m + i) as u64) << i);
                    assert_eq!((r.x, r.z), (bits, zbits), "{}", word_to_string(&w));
                }
            }
        }
    }

    #[test]
    fn phase_gate_signs() {
        let mut t = StabTableau::new(1);
        t.apply(Gate::H(0)).unwrap();
        t.apply(Gate::S(0)).unwrap();
        assert_eq!(t.peek(&PauliVec::parse("Y").unwrap()), Some(false));
        let mut t = StabTableau::new(1);
        t.apply(Gate::H(0)).unwrap();
        t.apply(Gate::Sdg(0)).unwrap();
        assert_eq!(t.peek(&PauliVec::parse("Y").unwrap()), Some(true));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut z = StabTableau::new(1);
        let o = z.measure(&PauliVec::parse("Z").unwrap(), &mut rng);
        assert!(o.deterministic && !o.value);
    }

    #[test]
    fn ppm_cnot_matches_cnot() {
        let rep = verify_ppm_cnot();
        assert!(rep.failures.is_empty(), "{:?}", rep.failures);
        assert!(rep.choi_ok);
        assert_eq!(rep.inputs_checked, 36);
    }

    #[test]
    fn gate_names_round_trip() {
        for g in all_gates(3) {
            assert_eq!(Gate::parse(&g.to_string()).unwrap(), g);
        }
        assert!(Gate::parse("CNOT(1,1)").is_ok());
        assert!(Gate::parse("FOO").is_err());
    }
}
