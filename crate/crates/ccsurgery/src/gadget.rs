//! Logical gadgets of the [[24,8,3]] CC code: fold-transversal CZ-S and
//! H-SWAP, automorphism SWAPs, surgery-based CNOT schedules, paired phase
//! gates and the four-qubit Clifford toolbox built from them.
//!
//! Logical qubits 2, 4, 6, 8 carry data and 1, 3, 5, 7 are auxiliaries.
//! Physical qubit labels follow the printed numbering, in which the qubits
//! of each cluster are listed in reverse cyclic order relative to the lift.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::clifford::{
    for_each_branch, generation_check, inverse_word, standard_generators, synthesize_hi, synthesize_s1, Gate,
    GenerationReport, OutcomeSource, PauliVec, StabTableau, SymplecticOp, Word,
};
use crate::codes::{builtin, CcCode};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec, RowSpan};
use crate::logical::{clustered_basis, LogicalBasis};
use crate::ring::RingMatrix;
use crate::surgery::{merge_complex, merge_targets, overhead_report, ConnectionCode, MergeKind};

pub const DATA: [usize; 4] = [2, 4, 6, 8];
pub const AUX: [usize; 4] = [1, 3, 5, 7];
const K: usize = 8;

pub fn code() -> Result<CcCode> {
    builtin("24_8_3")
}

/// Internal 0-based qubit of a printed 1-based physical label.
pub fn physical_index(label: usize, p: usize) -> usize {
    let (c, t) = ((label - 1) / p, (label - 1) % p);
    c * p + (p - t) % p
}

/// Parse space-separated gates (1-based), e.g. `SWAP(1,6) Hall`.
pub fn parse_gates(s: &str) -> Result<Vec<Gate>> {
    s.split_whitespace().map(Gate::parse).collect()
}

/// An operator product `g_1 g_2 ... g_n` as a time-ordered word.
pub fn operator_product(s: &str) -> Result<Word> {
    let mut w = parse_gates(s)?;
    w.reverse();
    Ok(w)
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PhysOp {
    /// Time-ordered transpositions of printed labels, then an optional global `H`.
    Swaps { swaps: Vec<(usize, usize)>, global_h: bool },
    /// `S` on the left-sector diagonal of `A_S`, `S^dagger` on the right,
    /// `CZ` along the lifted off-diagonal entries of `A_CZ`.
    Fold { a_s: RingMatrix, a_cz: RingMatrix },
}

impl PhysOp {
    pub fn swaps(list: &[(usize, usize)], global_h: bool) -> Self {
        PhysOp::Swaps { swaps: list.to_vec(), global_h }
    }

    pub fn word(&self, code: &CcCode) -> Result<Word> {
        let (n, p) = (code.n(), code.p);
        match self {
            PhysOp::Swaps { swaps, global_h } => {
                let mut w = Vec::with_capacity(swaps.len() + 1);
                for &(a, b) in swaps {
                    if a == 0 || b == 0 || a > n || b > n || a == b {
                        return Err(Error::Input(format!("bad physical swap ({a},{b})")));
                    }
                    w.push(Gate::Swap(physical_index(a, p), physical_index(b, p)));
                }
                if *global_h {
                    w.push(Gate::Hall);
                }
                Ok(w)
            }
            PhysOp::Fold { a_s, a_cz } => {
                let k = code.css.hx.cols();
                if a_s.shape() != (k, k) || a_cz.shape() != (k, k) {
                    return Err(Error::Shape(format!("fold matrices must be {k} x {k}")));
                }
                let mut w = Vec::new();
                for c in 0..k {
                    if a_s.get(c, c).is_one() {
                        let g: fn(usize) -> Gate = if c < k / 2 { Gate::S } else { Gate::Sdg };
                        w.extend((c * p..(c + 1) * p).map(g));
                    }
                }
                let b = a_cz.binary_lift();
                for u in 0..n {
                    for v in b.row(u).ones().filter(|&v| v > u) {
                        w.push(Gate::Cz(u, v));
                    }
                }
                Ok(w)
            }
        }
    }
}

fn symplectic_dot(u: &BitVec, v: &BitVec, n: usize) -> bool {
    let mut s = false;
    for i in u.ones() {
        if i < n {
            s ^= v.get(n + i);
        } else {
            s ^= v.get(i - n);
        }
    }
    s
}

fn stabilizer_rows(code: &CcCode) -> BitMatrix {
    let n = code.n();
    let hx = &code.css.bhx;
    let hz = &code.css.bhz;
    let mut m = BitMatrix::zeros(0, 2 * n);
    for r in 0..hx.rows() {
        m.push_row(&hx.row(r).concat(&BitVec::zeros(n)));
    }
    for r in 0..hz.rows() {
        m.push_row(&BitVec::zeros(n).concat(&hz.row(r)));
    }
    m
}

/// Action of a physical word on the clustered basis: whether the stabilizer
/// group is preserved, and the induced `2k x 2k` logical symplectic matrix.
pub fn logical_symplectic(code: &CcCode, basis: &LogicalBasis, word: &[Gate]) -> Result<(bool, SymplecticOp)> {
    let n = code.n();
    let k = basis.k();
    let u = SymplecticOp::of_word(word, n)?;
    let stab = stabilizer_rows(code);
    let span = RowSpan::new(&stab);
    let preserved = (0..stab.rows()).all(|r| span.contains(&u.apply(&stab.row(r))));
    let xs: Vec<BitVec> = basis.x_reps.iter().map(|x| x.concat(&BitVec::zeros(n))).collect();
    let zs: Vec<BitVec> = basis.z_reps.iter().map(|z| BitVec::zeros(n).concat(z)).collect();
    let mut mat = BitMatrix::zeros(2 * k, 2 * k);
    for (col, v) in xs.iter().chain(&zs).enumerate() {
        let img = u.apply(v);
        if (0..stab.rows()).any(|r| symplectic_dot(&img, &stab.row(r), n)) {
            return Err(Error::Verification(format!("image of logical generator {col} is not a logical operator")));
        }
        let mut rest = img.clone();
        for j in 0..k {
            if symplectic_dot(&img, &zs[j], n) {
                mat.set(j, col, true);
                rest.xor_assign(&xs[j]);
            }
            if symplectic_dot(&img, &xs[j], n) {
                mat.set(k + j, col, true);
                rest.xor_assign(&zs[j]);
            }
        }
        if !span.contains(&rest) {
            return Err(Error::Verification(format!("image of logical generator {col} leaves the logical span")));
        }
    }
    Ok((preserved, SymplecticOp { m: k, mat }))
}

struct Fixed(bool);

impl OutcomeSource for Fixed {
    fn next(&mut self) -> bool {
        self.0
    }
}

/// Code stabilizers plus `X_i X_ref` and `Z_i Z_ref` on `n + k` qubits.
fn encoded_choi(code: &CcCode, basis: &LogicalBasis) -> StabTableau {
    let n = code.n();
    let k = basis.k();
    let total = n + k;
    let mut t = StabTableau::new(total);
    let to_mask = |v: &BitVec| v.ones().fold(0u64, |a, q| a | 1 << q);
    let mut xs: Vec<u64> = (0..code.css.bhx.rows()).map(|r| to_mask(&code.css.bhx.row(r))).collect();
    let mut zs: Vec<u64> = (0..code.css.bhz.rows()).map(|r| to_mask(&code.css.bhz.row(r))).collect();
    for i in 0..k {
        xs.push(to_mask(&basis.x_reps[i]) | 1 << (n + i));
        zs.push(to_mask(&basis.z_reps[i]) | 1 << (n + i));
    }
    for x in xs {
        t.measure(&PauliVec { n: total, x, z: 0, neg: false }, &mut Fixed(false));
    }
    for z in zs {
        debug_assert_eq!(t.peek(&PauliVec { n: total, x: 0, z, neg: false }), Some(false));
    }
    t
}

/// Whether the physical word acts on the encoded Choi state exactly as the
/// logical word, signs included. Gates used here are symmetric matrices, so
/// the logical word is mirrored onto the reference qubits in reverse order.
fn sign_level_matches(code: &CcCode, basis: &LogicalBasis, phys: &[Gate], logical: &[Gate]) -> Result<bool> {
    let n = code.n();
    let base = encoded_choi(code, basis);
    let mut actual = base.clone();
    for &g in phys {
        if g == Gate::Hall {
            for q in 0..n {
                actual.apply(Gate::H(q))?;
            }
        } else {
            actual.apply(g)?;
        }
    }
    let mut expect = base;
    let k = basis.k();
    for &g in logical.iter().rev() {
        let shifted = match g {
            Gate::Hall => {
                for i in 0..k {
                    expect.apply(Gate::H(n + i))?;
                }
                continue;
            }
            Gate::Cnot(a, b) => Gate::Cnot(n + a, n + b),
            Gate::Cz(a, b) => Gate::Cz(n + a, n + b),
            Gate::Swap(a, b) => Gate::Swap(n + a, n + b),
            Gate::SSdg(a, b) => Gate::SSdg(n + a, n + b),
            Gate::S(a) => Gate::S(n + a),
            Gate::Sdg(a) => Gate::Sdg(n + a),
            Gate::H(a) => Gate::H(n + a),
            Gate::X(a) => Gate::X(n + a),
            Gate::Y(a) => Gate::Y(n + a),
            Gate::Z(a) => Gate::Z(n + a),
        };
        expect.apply(shifted)?;
    }
    Ok(expect.stabilizers().iter().all(|s| actual.peek(s) == Some(false)))
}

fn conjugate_phases(w: &[Gate]) -> Word {
    w.iter()
        .map(|g| match *g {
            Gate::S(a) => Gate::Sdg(a),
            Gate::Sdg(a) => Gate::S(a),
            g => g,
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignLevel {
    /// Signs agree with the label.
    Label,
    /// Signs agree with the label after exchanging every `S` and `S^dagger`.
    ConjugatePhases,
    /// Matches only up to Pauli signs.
    Undetermined,
}

#[derive(Clone, Debug, Serialize)]
pub struct LogicalAction {
    pub name: String,
    /// Operator product, rightmost factor first.
    pub label: String,
    pub physical_gates: usize,
    pub stabilizers_preserved: bool,
    pub symplectic_matches: bool,
    pub sign_level: SignLevel,
    /// The induced action as a permutation (with optional `Hall`), if it is one.
    pub observed: Option<String>,
    pub logical: SymplecticOp,
}

impl LogicalAction {
    pub fn passed(&self) -> bool {
        self.stabilizers_preserved && self.symplectic_matches
    }
}

pub fn verify_physical(name: &str, label: &str, op: &PhysOp) -> Result<LogicalAction> {
    let code = code()?;
    let basis = clustered_basis(&code);
    let phys = op.word(&code)?;
    let (preserved, logical) = logical_symplectic(&code, &basis, &phys)?;
    let want = operator_product(label)?;
    let symplectic_matches = logical == SymplecticOp::of_word(&want, K)?;
    let sign_level = if !symplectic_matches {
        SignLevel::Undetermined
    } else if sign_level_matches(&code, &basis, &phys, &want)? {
        SignLevel::Label
    } else if sign_level_matches(&code, &basis, &phys, &conjugate_phases(&want))? {
        SignLevel::ConjugatePhases
    } else {
        SignLevel::Undetermined
    };
    Ok(LogicalAction {
        name: name.into(),
        label: label.into(),
        physical_gates: phys.len(),
        stabilizers_preserved: preserved,
        symplectic_matches,
        sign_level,
        observed: describe_permutation(&logical),
        logical,
    })
}

/// `SWAP` cycles (and `Hall`) of a logical action that permutes qubits.
pub fn describe_permutation(op: &SymplecticOp) -> Option<String> {
    let m = op.m;
    let hall = SymplecticOp::of_gate(Gate::Hall, m).ok()?;
    for (with_h, base) in [(false, op.clone()), (true, op.then(&hall))] {
        let mut perm = vec![usize::MAX; m];
        let ok = (0..m).all(|i| {
            let col = base.mat.col(i);
            let ones: Vec<usize> = col.ones().collect();
            if ones.len() != 1 || ones[0] >= m {
                return false;
            }
            let j = ones[0];
            perm[i] = j;
            let zc = base.mat.col(m + i);
            zc.ones().eq([m + j])
        });
        if !ok {
            continue;
        }
        let mut seen = vec![false; m];
        let mut parts = Vec::new();
        for s in 0..m {
            if seen[s] || perm[s] == s {
                continue;
            }
            let mut cyc = vec![s];
            seen[s] = true;
            let mut c = perm[s];
            while c != s {
                seen[c] = true;
                cyc.push(c);
                c = perm[c];
            }
            let names: Vec<String> = cyc.iter().map(|x| (x + 1).to_string()).collect();
            parts.push(format!("({})", names.join(" ")));
        }
        let mut out = if with_h { vec!["Hall".to_string()] } else { vec![] };
        if parts.is_empty() && !with_h {
            out.push("identity".into());
        }
        out.extend(parts);
        return Some(out.join(" "));
    }
    None
}

pub fn czs_matrices(l: usize) -> (RingMatrix, RingMatrix) {
    let mut a_s = RingMatrix::zeros(l, K, K);
    for c in [0, 3, 4, 7] {
        a_s.set(c, c, crate::ring::RingElem::one(l));
    }
    let mut a_cz = RingMatrix::zeros(l, K, K);
    for (a, b) in [(1, 2), (5, 6)] {
        a_cz.set(a, b, crate::ring::RingElem::one(l));
        a_cz.set(b, a, crate::ring::RingElem::one(l));
    }
    (a_s, a_cz)
}

pub const CZS_LABEL: &str = "S(1) S(4) Sdg(5) Sdg(8) CZ(2,3) CZ(6,7)";
pub const HSWAP_LABEL: &str = "SWAP(1,6) SWAP(4,7) SWAP(5,8) SWAP(6,7) Hall";
pub const AUT_LABELS: [&str; 3] = [
    "SWAP(1,6) SWAP(3,5) SWAP(2,8) SWAP(4,7) SWAP(5,8) SWAP(6,7)",
    "SWAP(2,3) SWAP(6,7)",
    "SWAP(5,3) SWAP(8,2)",
];

pub const HSWAP_PHYS: [(usize, usize); 12] = [
    (18, 21), (17, 20), (16, 19), (15, 22), (14, 24), (13, 23),
    (12, 19), (11, 21), (10, 20), (3, 16), (2, 18), (1, 17),
];
pub const AUT1_PHYS: [(usize, usize); 18] = [
    (1, 17), (1, 10), (1, 20), (2, 16), (2, 11), (2, 19), (3, 18), (3, 12), (3, 21),
    (4, 22), (4, 7), (4, 15), (5, 24), (5, 8), (5, 14), (6, 23), (6, 9), (6, 13),
];
pub const AUT2_PHYS: [(usize, usize); 10] = [
    (2, 3), (4, 7), (5, 9), (6, 8), (11, 12), (13, 14), (16, 21), (17, 20), (18, 19), (23, 24),
];
pub const AUT3_PHYS: [(usize, usize); 6] = [(4, 22), (5, 23), (6, 24), (7, 15), (8, 13), (9, 14)];
pub const GLOBAL_H_PHYS: [(usize, usize); 10] = [
    (2, 3), (4, 7), (5, 9), (6, 8), (11, 12), (13, 24), (14, 23), (15, 22), (16, 18), (19, 21),
];

#[derive(Clone, Debug, Serialize)]
pub struct CzsReport {
    /// `H_X A_{CZ-S} H_X^* = 0` over the ring.
    pub identity_zero: bool,
    pub action: LogicalAction,
    pub squared_is_identity: bool,
}

impl CzsReport {
    pub fn passed(&self) -> bool {
        self.identity_zero && self.action.passed() && self.squared_is_identity
    }
}

pub fn verify_cz_s() -> Result<CzsReport> {
    let code = code()?;
    let (a_s, a_cz) = czs_matrices(code.p);
    let a = a_s.add(&a_cz)?;
    let prod = code.css.hx.mul(&a)?.mul(&code.css.hx.conj_transpose())?;
    let action = verify_physical("CZ-S", CZS_LABEL, &PhysOp::Fold { a_s, a_cz })?;
    let squared_is_identity = action.logical.then(&action.logical) == SymplecticOp::identity(K);
    Ok(CzsReport { identity_zero: prod.is_zero(), action, squared_is_identity })
}

pub fn verify_h_swap() -> Result<LogicalAction> {
    verify_physical("H-SWAP", HSWAP_LABEL, &PhysOp::swaps(&HSWAP_PHYS, true))
}

pub fn verify_automorphisms() -> Result<Vec<LogicalAction>> {
    let phys: [&[(usize, usize)]; 3] = [&AUT1_PHYS, &AUT2_PHYS, &AUT3_PHYS];
    (0..3).map(|i| verify_physical(&format!("Aut({})", i + 1), AUT_LABELS[i], &PhysOp::swaps(phys[i], false))).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct GlobalHReport {
    /// `(H-SWAP) Aut(1) Aut(3) Aut(1) Aut(1)` at the logical level.
    pub logical_composition_is_hall: bool,
    /// The same composition of the physical words, pushed through the code.
    pub physical_composition_is_hall: bool,
    pub composition_sign_level: SignLevel,
    pub squared_is_identity: bool,
    /// The printed single physical word for `H^{(x)8}`.
    pub printed_word: LogicalAction,
}

impl GlobalHReport {
    pub fn passed(&self) -> bool {
        self.logical_composition_is_hall && self.physical_composition_is_hall && self.squared_is_identity
    }
}

pub fn simplified_global_hadamard() -> Result<GlobalHReport> {
    let code = code()?;
    let basis = clustered_basis(&code);
    let hall = SymplecticOp::of_gate(Gate::Hall, K)?;
    let hs = operator_product(HSWAP_LABEL)?;
    let auts: Vec<Word> = AUT_LABELS.iter().map(|l| operator_product(l)).collect::<Result<_>>()?;
    // Operator product HS A1 A3 A1 A1: A1 acts first.
    let logical: Word = [&auts[0], &auts[0], &auts[2], &auts[0], &hs].into_iter().flatten().copied().collect();
    let logical_composition_is_hall = SymplecticOp::of_word(&logical, K)? == hall;
    let ph = |s: &[(usize, usize)], h| PhysOp::swaps(s, h).word(&code);
    let a1 = ph(&AUT1_PHYS, false)?;
    let a3 = ph(&AUT3_PHYS, false)?;
    let hsw = ph(&HSWAP_PHYS, true)?;
    let phys: Word = [&a1, &a1, &a3, &a1, &hsw].into_iter().flatten().copied().collect();
    let (preserved, op) = logical_symplectic(&code, &basis, &phys)?;
    let physical_composition_is_hall = preserved && op == hall;
    let composition_sign_level = if sign_level_matches(&code, &basis, &phys, &[Gate::Hall])? {
        SignLevel::Label
    } else {
        SignLevel::Undetermined
    };
    let squared_is_identity = op.then(&op) == SymplecticOp::identity(K);
    let printed_word = verify_physical("H^8 (printed word)", "Hall", &PhysOp::swaps(&GLOBAL_H_PHYS, true))?;
    Ok(GlobalHReport {
        logical_composition_is_hall,
        physical_composition_is_hall,
        composition_sign_level,
        squared_is_identity,
        printed_word,
    })
}

// ---------------------------------------------------------------------------
// Slot-level replay of surgery schedules.

/// `content[s]` is the logical (1-based) currently held by slot `s + 1`.
pub type Arrangement = [u8; K];

pub const HOME: Arrangement = [1, 2, 3, 4, 5, 6, 7, 8];

fn aut_word(k: usize) -> Word {
    operator_product(AUT_LABELS[k - 1]).expect("static label")
}

fn apply_word_to(arr: &mut Arrangement, w: &[Gate]) {
    for g in w {
        if let Gate::Swap(a, b) = *g {
            arr.swap(a, b);
        }
    }
}

fn letters_word(letters: &str) -> Result<Word> {
    let mut w = Word::new();
    for c in letters.chars() {
        match c {
            '1' | '2' | '3' => w.extend(aut_word(c as usize - '0' as usize)),
            _ => return Err(Error::Input(format!("automorphism word '{letters}' uses letters other than 1, 2, 3"))),
        }
    }
    Ok(w)
}

/// The arrangements reachable by automorphism words, with a shortest word for each.
pub fn arrangement_group() -> Vec<(Arrangement, String)> {
    bfs_words(HOME)
}

fn bfs_words(start: Arrangement) -> Vec<(Arrangement, String)> {
    let mut seen: HashMap<Arrangement, String> = HashMap::new();
    let mut order = vec![start];
    seen.insert(start, String::new());
    let mut q = VecDeque::from([start]);
    while let Some(a) = q.pop_front() {
        for k in 1..=3 {
            let mut b = a;
            apply_word_to(&mut b, &aut_word(k));
            if !seen.contains_key(&b) {
                let w = format!("{}{}", seen[&a], k);
                seen.insert(b, w);
                order.push(b);
                q.push_back(b);
            }
        }
    }
    order.into_iter().map(|a| (a, seen[&a].clone())).collect()
}

/// A connection matrix as printed: four rows over the eight cluster columns.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PrintedConnection {
    pub kind: MergeKind,
    pub rows: [&'static str; 4],
}

const fn px(rows: [&'static str; 4]) -> PrintedConnection {
    PrintedConnection { kind: MergeKind::X, rows }
}

const fn pz(rows: [&'static str; 4]) -> PrintedConnection {
    PrintedConnection { kind: MergeKind::Z, rows }
}

pub const INI: PrintedConnection = px(["00001000", "00000000", "00000010", "00000000"]);
pub const FIN: PrintedConnection = pz(["01000000", "00000000", "00010000", "00000000"]);
pub const Z1_PAIRS: PrintedConnection = pz(["00001010", "00000101", "00000000", "00000000"]);
pub const X2_PAIRS: PrintedConnection = px(["00101000", "00010100", "00000010", "00000001"]);
pub const X2_CROSSED: PrintedConnection = px(["00100100", "00011000", "00000001", "00000010"]);
pub const Z1_28: PrintedConnection = pz(["01000000", "10000000", "00011000", "00100100"]);
pub const X2_28: PrintedConnection = px(["10100000", "01010000", "00000000", "00000000"]);
pub const Z1_2X: PrintedConnection = pz(["10000000", "00000000", "00101000", "00000100"]);
pub const X2_24: PrintedConnection = px(["00100100", "00010000", "00000001", "00000000"]);
pub const X2_26: PrintedConnection = px(["10000000", "01000100", "00000000", "00000001"]);
pub const FIN_26: PrintedConnection = pz(["10000000", "00000000", "00100000", "00000000"]);
pub const Z1_28S: PrintedConnection = pz(["00000000", "10000000", "00001010", "00100101"]);
pub const FIN_28S: PrintedConnection = pz(["00000000", "00000000", "00000010", "00000001"]);

#[derive(Clone, Debug, Serialize)]
pub struct ConnectionCheck {
    pub kind: MergeKind,
    pub rows: Vec<String>,
    pub h_a_prime: Option<Vec<String>>,
    pub h_b_prime: Option<Vec<String>>,
    /// Merged code passes the commuting-square check and its targets equal the printed rows.
    pub valid: bool,
    pub targets: Vec<Vec<usize>>,
}

impl PrintedConnection {
    pub fn matrix(&self) -> BitMatrix {
        BitMatrix::from_rows(&self.rows)
    }

    /// Find `(H_a', H_b')` reproducing the printed matrix and validate the surgery.
    pub fn check(&self, code: &CcCode) -> Result<ConnectionCheck> {
        let want = self.matrix();
        let rows: Vec<String> = self.rows.iter().map(|s| s.to_string()).collect();
        let printed_targets: Vec<Vec<usize>> = (0..4)
            .map(|r| want.row(r).ones().map(|c| c + 1).collect::<Vec<_>>())
            .filter(|v: &Vec<usize>| !v.is_empty())
            .collect();
        for idx in 0..ConnectionCode::count_for(code) {
            let conn = ConnectionCode::from_index(code, idx)?;
            let (ring, _) = conn.checks(self.kind);
            if ring.pattern() != want {
                continue;
            }
            let valid = merge_complex(&code.css, &conn, self.kind).is_ok()
                && merge_targets(code, &conn, self.kind)
                    .map(|t| t.into_iter().map(|t| t.logicals).collect::<Vec<_>>() == printed_targets)
                    .unwrap_or(false);
            return Ok(ConnectionCheck {
                kind: self.kind,
                rows,
                h_a_prime: Some(conn.h_a_prime.to_strings().into_iter().map(|r| r.join(" ")).collect()),
                h_b_prime: Some(conn.h_b_prime.to_strings().into_iter().map(|r| r.join(" ")).collect()),
                valid,
                targets: printed_targets,
            });
        }
        Ok(ConnectionCheck { kind: self.kind, rows, h_a_prime: None, h_b_prime: None, valid: false, targets: printed_targets })
    }

    fn slot_sets(&self) -> Vec<Vec<usize>> {
        let m = self.matrix();
        (0..4).map(|r| m.row(r).ones().collect::<Vec<_>>()).filter(|v| !v.is_empty()).collect()
    }
}

#[derive(Clone, Debug)]
enum Op {
    Word(Word),
    Measure(MergeKind, Vec<Vec<usize>>),
    Logical(Word),
}

const NQ: usize = 2 * K;

fn choi_slots() -> StabTableau {
    let mut t = StabTableau::new(NQ);
    for s in 0..K {
        t.apply(Gate::H(K + s)).unwrap();
        t.apply(Gate::Cnot(K + s, s)).unwrap();
    }
    t
}

struct Replay {
    tab: StabTableau,
    content: Arrangement,
    outcomes: Vec<bool>,
    labels: Vec<String>,
}

fn replay(ops: &[Op], src: &mut dyn OutcomeSource) -> Replay {
    let mut r = Replay { tab: choi_slots(), content: HOME, outcomes: Vec::new(), labels: Vec::new() };
    for op in ops {
        match op {
            Op::Word(w) => {
                r.tab.apply_word(w).unwrap();
                apply_word_to(&mut r.content, w);
            }
            Op::Logical(w) => r.tab.apply_word(w).unwrap(),
            Op::Measure(kind, sets) => {
                for set in sets {
                    let p = match kind {
                        MergeKind::X => PauliVec::xs(NQ, set),
                        MergeKind::Z => PauliVec::zs(NQ, set),
                    };
                    let o = r.tab.measure(&p, src);
                    r.outcomes.push(o.value);
                    let names: Vec<String> = set.iter().map(|&s| r.content[s].to_string()).collect();
                    r.labels.push(format!("{kind:?}{}", names.join("")));
                }
            }
        }
    }
    r
}

fn slot_of(arr: &Arrangement, logical: usize) -> usize {
    arr.iter().position(|&c| c as usize == logical).expect("logical present")
}

/// Expected data generators after `gates` (on logical labels) act on the
/// Choi state, placed according to `arr`.
fn expected_generators(arr: &Arrangement, gates: &[Gate]) -> Vec<PauliVec> {
    let mut out = Vec::new();
    for &d in &DATA {
        let s = slot_of(arr, d);
        for (x, z) in [(true, false), (false, true)] {
            let mut p = PauliVec::identity(NQ);
            let bits = 1u64 << s | 1u64 << (K + d - 1);
            if x {
                p.x = bits;
            }
            if z {
                p.z = bits;
            }
            out.push(p);
        }
    }
    let mapped: Word = gates.iter().map(|g| map_gate(*g, |l| slot_of(arr, l + 1))).collect();
    for p in &mut out {
        for &g in &mapped {
            crate::clifford::conjugate(p, g);
        }
    }
    out
}

fn map_gate(g: Gate, f: impl Fn(usize) -> usize) -> Gate {
    match g {
        Gate::Cnot(a, b) => Gate::Cnot(f(a), f(b)),
        Gate::Cz(a, b) => Gate::Cz(f(a), f(b)),
        Gate::Swap(a, b) => Gate::Swap(f(a), f(b)),
        Gate::SSdg(a, b) => Gate::SSdg(f(a), f(b)),
        Gate::S(a) => Gate::S(f(a)),
        Gate::Sdg(a) => Gate::Sdg(f(a)),
        Gate::H(a) => Gate::H(f(a)),
        Gate::X(a) => Gate::X(f(a)),
        Gate::Y(a) => Gate::Y(f(a)),
        Gate::Z(a) => Gate::Z(f(a)),
        Gate::Hall => Gate::Hall,
    }
}

/// Solve `a x = b` over F2.
fn solve(a: &BitMatrix, b: &BitVec) -> Option<BitVec> {
    let n = a.cols();
    let aug = a.hstack(&BitMatrix::from_fn(b.len(), 1, |i, _| b.get(i))).ok()?;
    let (r, piv) = aug.rref();
    if piv.contains(&n) {
        return None;
    }
    let mut x = BitVec::zeros(n);
    for (row, &c) in piv.iter().enumerate() {
        x.set(c, r.get(row, n));
    }
    Some(x)
}

/// The data-slot Pauli that fixes the signs of `gens`, or `None` if some
/// generator is not in the stabilizer group.
fn frame_fix(t: &StabTableau, arr: &Arrangement, gens: &[PauliVec]) -> Option<BitVec> {
    let mut signs = BitVec::zeros(gens.len());
    for (i, g) in gens.iter().enumerate() {
        signs.set(i, t.peek(g)?);
    }
    let slots: Vec<usize> = DATA.iter().map(|&d| slot_of(arr, d)).collect();
    // Unknowns: x then z on each data slot. X_s anticommutes with g iff g has z on s.
    let a = BitMatrix::from_fn(gens.len(), 2 * slots.len(), |i, j| {
        let s = slots[j % slots.len()];
        if j < slots.len() {
            gens[i].z >> s & 1 == 1
        } else {
            gens[i].x >> s & 1 == 1
        }
    });
    solve(&a, &signs)
}

#[derive(Clone, Debug, Serialize)]
pub struct FrameRule {
    /// Correction name, e.g. `X on logical 4`.
    pub correction: String,
    /// Measurements whose parity triggers it (plus a constant flip).
    pub parity_of: Vec<String>,
    pub constant: bool,
}

struct BranchSummary {
    branches: usize,
    failures: usize,
    affine: bool,
    rules: Vec<FrameRule>,
}

fn run_branches(ops: &[Op], gates: &[Gate]) -> BranchSummary {
    let runs = for_each_branch(|ctx| {
        let r = replay(ops, ctx);
        let gens = expected_generators(&r.content, gates);
        let fix = frame_fix(&r.tab, &r.content, &gens);
        (r.outcomes, r.labels, r.content, fix)
    });
    let branches = runs.len();
    let failures = runs.iter().filter(|(_, (_, _, _, f))| f.is_none()).count();
    if failures > 0 || branches == 0 {
        return BranchSummary { branches, failures, affine: false, rules: vec![] };
    }
    let (_, (o0, labels, arr, _)) = &runs[0];
    let m = o0.len();
    let nd = DATA.len();
    // Fit correction = [outcomes | 1] * M over all branches.
    let a = BitMatrix::from_fn(branches, m + 1, |b, j| if j < m { runs[b].1 .0[j] } else { true });
    let mut affine = true;
    let mut rules = Vec::new();
    for bit in 0..2 * nd {
        let col = BitVec::from_bools(&runs.iter().map(|(_, (_, _, _, f))| f.as_ref().unwrap().get(bit)).collect::<Vec<_>>());
        match solve(&a, &col) {
            Some(coef) => {
                if coef.is_zero() {
                    continue;
                }
                let d = DATA[bit % nd];
                let pauli = if bit < nd { 'X' } else { 'Z' };
                let _ = arr;
                rules.push(FrameRule {
                    correction: format!("{pauli} on logical {d}"),
                    parity_of: (0..m).filter(|&j| coef.get(j)).map(|j| format!("m{}:{}", j + 1, labels[j])).collect(),
                    constant: coef.get(m),
                });
            }
            None => affine = false,
        }
    }
    BranchSummary { branches, failures, affine, rules }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScheduleSpec {
    pub id: &'static str,
    /// `(control, target)` logical pairs.
    pub cnots: Vec<(usize, usize)>,
    /// INI (X), first merge (Z), second merge (X), FIN (Z).
    pub steps: [PrintedConnection; 4],
    /// Automorphism letters applied before each step, when the text fixes them.
    pub printed_words: Option<[&'static str; 4]>,
    /// Alternative printed connection sets the planner may use instead.
    pub alternatives: Vec<[PrintedConnection; 4]>,
}

fn set62() -> [PrintedConnection; 4] {
    [INI, Z1_PAIRS, X2_PAIRS, FIN]
}
fn set64() -> [PrintedConnection; 4] {
    [INI, Z1_PAIRS, X2_CROSSED, FIN]
}
fn set28() -> [PrintedConnection; 4] {
    [INI, Z1_28, X2_28, FIN]
}
fn set24() -> [PrintedConnection; 4] {
    [INI, Z1_2X, X2_24, FIN]
}
fn set26() -> [PrintedConnection; 4] {
    [INI, Z1_2X, X2_26, FIN_26]
}
fn set2to8() -> [PrintedConnection; 4] {
    [INI, Z1_28S, X2_26, FIN_28S]
}

pub fn schedule_specs() -> Vec<ScheduleSpec> {
    let s = |id, cnots: &[(usize, usize)], steps, words, alts: Vec<[PrintedConnection; 4]>| ScheduleSpec {
        id,
        cnots: cnots.to_vec(),
        steps,
        printed_words: words,
        alternatives: alts,
    };
    let described = Some(["", "2", "12", "2"]);
    let reordered = Some(["123", "2", "12", "2"]);
    let mixed = || vec![set64(), set28()];
    vec![
        s("62x84", &[(6, 2), (8, 4)], set62(), described, vec![]),
        s("64x82", &[(6, 4), (8, 2)], set64(), described, vec![]),
        s("26x48", &[(2, 6), (4, 8)], set62(), None, vec![]),
        s("28x46", &[(2, 8), (4, 6)], set28(), None, vec![]),
        s("86x24", &[(8, 6), (2, 4)], set62(), reordered, mixed()),
        s("68x42", &[(6, 8), (4, 2)], set62(), reordered, mixed()),
        s("42x86", &[(4, 2), (8, 6)], set62(), reordered, vec![]),
        s("24x68", &[(2, 4), (6, 8)], set62(), None, vec![]),
        s("2to4", &[(2, 4)], set24(), None, vec![]),
        s("2to6", &[(2, 6)], set26(), None, vec![]),
        s("2to8", &[(2, 8)], set2to8(), None, vec![]),
        s("8to4", &[(8, 4)], set24(), None, vec![]),
        s("8to6", &[(8, 6)], set26(), None, vec![]),
        s("8to2", &[(8, 2)], set2to8(), None, vec![]),
    ]
}

pub fn schedule_spec(id: &str) -> Result<ScheduleSpec> {
    let norm = id.replace(['|', '‖', '/'], "x").replace("->", "to").replace('→', "to");
    schedule_specs()
        .into_iter()
        .find(|s| s.id == norm)
        .ok_or_else(|| Error::Input(format!("unknown schedule '{id}'")))
}

fn cnot_gates(cnots: &[(usize, usize)]) -> Word {
    cnots.iter().map(|&(c, t)| Gate::Cnot(c - 1, t - 1)).collect()
}

fn schedule_ops(steps: &[PrintedConnection; 4], words: &[String; 4]) -> Result<Vec<Op>> {
    let mut ops = Vec::new();
    for (st, w) in steps.iter().zip(words) {
        ops.push(Op::Word(letters_word(w)?));
        ops.push(Op::Measure(st.kind, st.slot_sets()));
    }
    Ok(ops)
}

/// Single-branch replay with all outcomes `+1`; cheap filter for the planner.
fn quick_ok(ops: &[Op], gates: &[Gate]) -> bool {
    let r = replay(ops, &mut Fixed(false));
    frame_fix(&r.tab, &r.content, &expected_generators(&r.content, gates)).is_some()
}

/// Search automorphism words (one before each step) under which the printed
/// connections implement `cnots`. Returns the cheapest words found.
pub fn plan_schedule(cnots: &[(usize, usize)], steps: &[PrintedConnection; 4]) -> Option<[String; 4]> {
    let group = arrangement_group();
    let idx: HashMap<Arrangement, usize> = group.iter().enumerate().map(|(i, (a, _))| (*a, i)).collect();
    let words: Vec<Vec<String>> = group
        .iter()
        .map(|(a, _)| {
            let from = bfs_words(*a);
            let mut w = vec![String::new(); group.len()];
            for (b, s) in from {
                w[idx[&b]] = s;
            }
            w
        })
        .collect();
    let gates = cnot_gates(cnots);
    let sets: Vec<Vec<Vec<usize>>> = steps.iter().map(|s| s.slot_sets()).collect();
    let roles: Vec<usize> = cnots.iter().flat_map(|&(c, t)| [c, t]).collect();
    // Single-logical measurements may only touch auxiliaries.
    let single_ok = |a: &Arrangement, k: usize| {
        sets[k].iter().all(|s| s.len() > 1 || AUX.contains(&(a[s[0]] as usize)))
    };
    let pair_ok = |a: &Arrangement, k: usize| {
        sets[k].iter().all(|s| s.iter().any(|&x| AUX.contains(&(a[x] as usize))))
    };
    let n = group.len();
    let mut best: Option<(usize, [String; 4])> = None;
    for i0 in 0..n {
        if !single_ok(&group[i0].0, 0) {
            continue;
        }
        for i1 in 0..n {
            if !pair_ok(&group[i1].0, 1) || !single_ok(&group[i1].0, 1) {
                continue;
            }
            for i2 in 0..n {
                if !pair_ok(&group[i2].0, 2) || !single_ok(&group[i2].0, 2) {
                    continue;
                }
                // Every data logical in a CNOT must meet an auxiliary in some merge.
                let touched = |k: usize, a: &Arrangement| -> Vec<usize> {
                    sets[k].iter().flat_map(|s| s.iter().map(|&x| a[x] as usize)).collect()
                };
                let t1 = touched(1, &group[i1].0);
                let t2 = touched(2, &group[i2].0);
                if !roles.iter().all(|r| t1.contains(r) || t2.contains(r)) {
                    continue;
                }
                for i3 in 0..n {
                    if !single_ok(&group[i3].0, 3) {
                        continue;
                    }
                    let w = [
                        group[i0].1.clone(),
                        words[i0][i1].clone(),
                        words[i1][i2].clone(),
                        words[i2][i3].clone(),
                    ];
                    let cost: usize = w.iter().map(String::len).sum();
                    if best.as_ref().is_some_and(|(c, _)| *c <= cost) {
                        continue;
                    }
                    let ops = match schedule_ops(steps, &w) {
                        Ok(o) => o,
                        Err(_) => continue,
                    };
                    if quick_ok(&ops, &gates) {
                        best = Some((cost, w));
                    }
                }
            }
        }
    }
    best.map(|(_, w)| w)
}

#[derive(Clone, Debug, Serialize)]
pub struct ScheduleReport {
    pub id: String,
    pub cnots: Vec<(usize, usize)>,
    pub words: [String; 4],
    pub words_source: String,
    pub connections: Vec<ConnectionCheck>,
    pub branches: usize,
    pub failed_branches: usize,
    pub frame_affine: bool,
    pub frame_rules: Vec<FrameRule>,
    pub final_arrangement: Arrangement,
    pub restore_word: String,
    pub aux_cost: usize,
    /// CNOT sets the replay realizes when the labeled one fails.
    pub realized_instead: Vec<String>,
    pub passed: bool,
}

fn restore_word(arr: &Arrangement) -> String {
    bfs_words(*arr)
        .into_iter()
        .find(|(a, _)| DATA.iter().all(|&d| a[d - 1] as usize == d))
        .map(|(_, w)| w)
        .unwrap_or_else(|| "unreachable".into())
}

fn candidate_cnot_sets() -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for &c in &DATA {
        for &t in &DATA {
            if c != t {
                out.push(vec![(c, t)]);
            }
        }
    }
    let singles: Vec<(usize, usize)> = out.iter().map(|v| v[0]).collect();
    for (i, &a) in singles.iter().enumerate() {
        for &b in &singles[i + 1..] {
            if a.0 != b.0 && a.0 != b.1 && a.1 != b.0 && a.1 != b.1 {
                out.push(vec![a, b]);
            }
        }
    }
    out
}

fn fmt_cnots(c: &[(usize, usize)]) -> String {
    c.iter().map(|(a, b)| format!("CNOT({a}->{b})")).collect::<Vec<_>>().join(" ")
}

fn verify_with(spec: &ScheduleSpec, steps: &[PrintedConnection; 4], words: [String; 4], source: &str) -> Result<ScheduleReport> {
    let code = code()?;
    let connections: Vec<ConnectionCheck> = steps.iter().map(|c| c.check(&code)).collect::<Result<_>>()?;
    let ops = schedule_ops(steps, &words)?;
    let gates = cnot_gates(&spec.cnots);
    let summary = run_branches(&ops, &gates);
    let fin = replay(&ops, &mut Fixed(false)).content;
    let ok = summary.failures == 0 && summary.affine && connections.iter().all(|c| c.valid);
    let realized_instead = if summary.failures > 0 {
        candidate_cnot_sets()
            .into_iter()
            .filter(|c| run_branches(&ops, &cnot_gates(c)).failures == 0)
            .map(|c| fmt_cnots(&c))
            .collect()
    } else {
        vec![]
    };
    let ov = overhead_report(&code, 3, code.k() / 2)?;
    Ok(ScheduleReport {
        id: spec.id.into(),
        cnots: spec.cnots.clone(),
        words,
        words_source: source.into(),
        connections,
        branches: summary.branches,
        failed_branches: summary.failures,
        frame_affine: summary.affine,
        frame_rules: summary.rules,
        final_arrangement: fin,
        restore_word: restore_word(&fin),
        aux_cost: ov.data_aux + ov.check_aux,
        realized_instead,
        passed: ok,
    })
}

/// Replays the schedule over every measurement branch. Described words are
/// tried first; otherwise (or if they fail) the planner searches the
/// printed connection sets.
pub fn run_cnot_schedule(id: &str) -> Result<ScheduleReport> {
    let spec = schedule_spec(id)?;
    let mut first_failure = None;
    if let Some(w) = spec.printed_words {
        let r = verify_with(&spec, &spec.steps, w.map(String::from), "described")?;
        if r.passed {
            return Ok(r);
        }
        first_failure = Some(r);
    }
    let sets: Vec<[PrintedConnection; 4]> = std::iter::once(spec.steps).chain(spec.alternatives.iter().copied()).collect();
    for steps in &sets {
        if let Some(w) = plan_schedule(&spec.cnots, steps) {
            let r = verify_with(&spec, steps, w, "planned")?;
            if r.passed {
                return Ok(r);
            }
            first_failure.get_or_insert(r);
        }
    }
    match first_failure {
        Some(r) => Ok(r),
        None => {
            let mut r = verify_with(&spec, &spec.steps, Default::default(), "none found")?;
            r.passed = false;
            Ok(r)
        }
    }
}

pub fn run_all_schedules() -> Result<Vec<ScheduleReport>> {
    schedule_specs().iter().map(|s| run_cnot_schedule(s.id)).collect()
}

// ---------------------------------------------------------------------------
// Paired phase gates.

#[derive(Clone, Debug, Serialize)]
pub struct PhaseGadgetReport {
    pub i: usize,
    pub j: usize,
    /// Steps: automorphism letters or `Z{slots}` measurement rounds.
    pub plan: Vec<String>,
    pub branches: usize,
    pub failed_branches: usize,
    /// Realized action, e.g. `S(4) Sdg(8)`.
    pub realized: String,
    pub passed: bool,
}

/// Z-type 0/1 connections whose targets are all single logicals.
fn single_z_connections(code: &CcCode) -> Result<Vec<Vec<usize>>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for idx in 0..ConnectionCode::count_for(code) {
        let conn = ConnectionCode::from_index(code, idx)?;
        let t = merge_targets(code, &conn, MergeKind::Z)?;
        if !t.is_empty() && t.iter().all(|t| t.logicals.len() == 1) {
            let mut slots: Vec<usize> = t.iter().map(|t| t.logicals[0] - 1).collect();
            slots.sort_unstable();
            if !out.contains(&slots) {
                out.push(slots);
            }
        }
    }
    Ok(out)
}

/// Plan: prepare every auxiliary in `|0>` through single-Z merges on slots
/// holding auxiliaries, then route so that CZ-S acts on the data as
/// `S_i S_j^dagger` (one application) or `S_j S_i^dagger` (three).
/// `s_slots` are the slots receiving `S`, `sdg_slots` those receiving `S^dagger`.
fn plan_phase(i: usize, j: usize, s_slots: [usize; 2], sdg_slots: [usize; 2], rounds: &[Vec<usize>]) -> Option<(Vec<Op>, usize)> {
    type State = (Arrangement, u8);
    let start: State = (HOME, 0);
    let aux_bit = |l: u8| AUX.iter().position(|&a| a == l as usize).map(|p| 1u8 << p);
    let is_aux = |l: u8| AUX.contains(&(l as usize));
    let reps = |s: &State| -> Option<usize> {
        if s.1 != 0b1111 || !(is_aux(s.0[1]) || is_aux(s.0[2])) || !(is_aux(s.0[5]) || is_aux(s.0[6])) {
            return None;
        }
        let at = |slots: [usize; 2]| -> Vec<usize> {
            slots.iter().map(|&x| s.0[x] as usize).filter(|l| !AUX.contains(l)).collect()
        };
        match (at(s_slots).as_slice(), at(sdg_slots).as_slice()) {
            ([a], [b]) if (*a, *b) == (i, j) => Some(1),
            ([a], [b]) if (*a, *b) == (j, i) => Some(3),
            _ => None,
        }
    };
    let mut prev: HashMap<State, (State, Op)> = HashMap::new();
    let mut q = VecDeque::from([start]);
    let mut seen = std::collections::HashSet::from([start]);
    let mut goal = None;
    let mut fallback = None;
    while let Some(s) = q.pop_front() {
        match reps(&s) {
            Some(1) => {
                goal = Some((s, 1));
                break;
            }
            Some(r) => {
                fallback.get_or_insert((s, r));
            }
            None => {}
        }
        let mut next: Vec<(State, Op)> = Vec::new();
        for k in 1..=3 {
            let w = aut_word(k);
            let mut a = s.0;
            apply_word_to(&mut a, &w);
            next.push(((a, s.1), Op::Word(w)));
        }
        for r in rounds {
            let bits: Option<Vec<u8>> = r.iter().map(|&x| aux_bit(s.0[x])).collect();
            if let Some(b) = bits {
                let m = b.iter().fold(s.1, |acc, x| acc | x);
                if m != s.1 {
                    next.push(((s.0, m), Op::Measure(MergeKind::Z, r.iter().map(|&x| vec![x]).collect())));
                }
            }
        }
        for (ns, op) in next {
            if seen.insert(ns) {
                prev.insert(ns, (s, op));
                q.push_back(ns);
            }
        }
    }
    let (mut s, reps) = goal.or(fallback)?;
    let mut ops = Vec::new();
    while s != start {
        let (p, op) = prev.remove(&s)?;
        ops.push(op);
        s = p;
    }
    ops.reverse();
    Some((ops, reps))
}

fn describe_ops(ops: &[Op]) -> Vec<String> {
    let mut out = Vec::new();
    for op in ops {
        match op {
            Op::Word(w) => {
                let k = (1..=3).find(|&k| aut_word(k) == *w);
                out.push(k.map(|k| format!("Aut({k})")).unwrap_or_else(|| "word".into()));
            }
            Op::Measure(kind, sets) => {
                let s: Vec<String> = sets.iter().map(|v| (v[0] + 1).to_string()).collect();
                out.push(format!("{kind:?}-measure slots {{{}}}", s.join(",")));
            }
            Op::Logical(_) => out.push("CZ-S".into()),
        }
    }
    out
}

/// `S_i S_j^dagger` on data qubits from the CZ-S gate with auxiliaries in `|0>`.
/// `czs_logical` is the sign-level logical word of CZ-S on slots.
pub fn verify_sisj_gadget(i: usize, j: usize) -> Result<PhaseGadgetReport> {
    if !DATA.contains(&i) || !DATA.contains(&j) || i == j {
        return Err(Error::Input(format!("S_i S_j^dagger needs distinct data qubits, got ({i},{j})")));
    }
    let code = code()?;
    let czs = verify_cz_s()?;
    let mut czs_word = operator_product(CZS_LABEL)?;
    if czs.action.sign_level == SignLevel::ConjugatePhases {
        czs_word = conjugate_phases(&czs_word);
    }
    let rounds = single_z_connections(&code)?;
    let (s_slots, sdg_slots) = if czs.action.sign_level == SignLevel::ConjugatePhases { ([4, 7], [0, 3]) } else { ([0, 3], [4, 7]) };
    let single = |a: usize, b: usize| -> Option<(Vec<Op>, Vec<String>)> {
        let (mut ops, reps) = plan_phase(a, b, s_slots, sdg_slots, &rounds)?;
        let mut desc = describe_ops(&ops);
        desc.push(if reps == 1 { "CZ-S".into() } else { format!("CZ-S x{reps}") });
        let mut arr = HOME;
        for op in &ops {
            if let Op::Word(w) = op {
                apply_word_to(&mut arr, w);
            }
        }
        for _ in 0..reps {
            ops.push(Op::Logical(czs_word.clone()));
        }
        let back = bfs_words(arr).into_iter().find(|(x, _)| *x == HOME).map(|(_, w)| w)?;
        for c in back.chars() {
            ops.push(Op::Word(aut_word(c as usize - '0' as usize)));
            desc.push(format!("Aut({c})"));
        }
        Some((ops, desc))
    };
    // S_i S_k^dagger S_k S_j^dagger when no single routing exists.
    let (ops, plan) = single(i, j)
        .or_else(|| {
            DATA.iter().filter(|&&k| k != i && k != j).find_map(|&k| {
                let (mut o1, mut d1) = single(i, k)?;
                let (o2, d2) = single(k, j)?;
                o1.extend(o2);
                d1.extend(d2);
                Some((o1, d1))
            })
        })
        .ok_or_else(|| Error::Verification(format!("no routing for ({i},{j})")))?;
    let want = vec![Gate::S(i - 1), Gate::Sdg(j - 1)];
    let runs = for_each_branch(|ctx| {
        let r = replay_with_prep(&ops, ctx);
        let gens = expected_generators(&r.content, &want);
        gens.iter().all(|g| r.tab.peek(g) == Some(false))
    });
    let failed = runs.iter().filter(|(_, ok)| !ok).count();
    Ok(PhaseGadgetReport {
        i,
        j,
        plan,
        branches: runs.len(),
        failed_branches: failed,
        realized: format!("S({i}) Sdg({j})"),
        passed: failed == 0 && czs.passed(),
    })
}

/// Like `replay`, but every single-slot Z measurement is followed by an `X`
/// correction when its outcome is `-1`.
fn replay_with_prep(ops: &[Op], src: &mut dyn OutcomeSource) -> Replay {
    let mut r = Replay { tab: choi_slots(), content: HOME, outcomes: Vec::new(), labels: Vec::new() };
    for op in ops {
        match op {
            Op::Word(w) => {
                r.tab.apply_word(w).unwrap();
                apply_word_to(&mut r.content, w);
            }
            Op::Logical(w) => r.tab.apply_word(w).unwrap(),
            Op::Measure(kind, sets) => {
                for set in sets {
                    let p = match kind {
                        MergeKind::X => PauliVec::xs(NQ, set),
                        MergeKind::Z => PauliVec::zs(NQ, set),
                    };
                    let o = r.tab.measure(&p, src);
                    r.outcomes.push(o.value);
                    if o.value && *kind == MergeKind::Z && set.len() == 1 {
                        r.tab.apply_pauli(&PauliVec::xs(NQ, set));
                    }
                }
            }
        }
    }
    r
}

// ---------------------------------------------------------------------------
// Toolbox certificate.

#[derive(Clone, Debug, Serialize)]
pub struct GeneratorEntry {
    pub generator: String,
    pub realization: String,
    pub verified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ToolboxCertificate {
    pub generators: Vec<GeneratorEntry>,
    pub phase_synthesis_ok: bool,
    pub hadamard_synthesis_ok: bool,
    pub restricted_m3: GenerationReport,
    pub restricted_m3_without_phase_pairs: GenerationReport,
    pub passed: bool,
}

/// Data qubit `d` (2, 4, 6, 8) as index 0..4.
fn di(d: usize) -> usize {
    DATA.iter().position(|&x| x == d).expect("data qubit")
}

pub fn clifford_toolbox_certificate() -> Result<ToolboxCertificate> {
    let m = 4;
    let mut gens = Vec::new();
    let code = code()?;
    let basis = clustered_basis(&code);
    let paulis_ok = crate::logical::verify_clustered(&basis, &code).ok;
    for &d in &DATA {
        for p in ['X', 'Z'] {
            gens.push(GeneratorEntry {
                generator: format!("{p}({d})"),
                realization: format!("physical {p} on cluster {d}"),
                verified: paulis_ok,
            });
        }
    }
    let gh = simplified_global_hadamard()?;
    let hall_ok = gh.passed();
    gens.push(GeneratorEntry {
        generator: "H^4".into(),
        realization: "(H-SWAP) Aut(1) Aut(3) Aut(1) Aut(1), restricted to data".into(),
        verified: hall_ok,
    });
    let schedules = run_all_schedules()?;
    let direct: HashMap<(usize, usize), bool> = schedules
        .iter()
        .filter(|r| r.cnots.len() == 1)
        .map(|r| (r.cnots[0], r.passed))
        .collect();
    let cn = |c: usize, t: usize| Gate::Cnot(di(c), di(t));
    for &c in &DATA {
        for &t in &DATA {
            if c == t {
                continue;
            }
            let (word, how, base_ok): (Word, String, bool) = if let Some(&ok) = direct.get(&(c, t)) {
                (vec![cn(c, t)], format!("schedule {c}to{t}"), ok)
            } else if let Some(&ok) = direct.get(&(t, c)) {
                (vec![Gate::Hall, cn(t, c), Gate::Hall], format!("H^4 . schedule {t}to{c} . H^4"), ok && hall_ok)
            } else {
                // CNOT(c->t) = CNOT(2->t) CNOT(c->2) CNOT(2->t) CNOT(c->2), time order reversed.
                let ok = [(2, t), (c, 2)].iter().all(|&(a, b)| direct.get(&(a, b)).or(direct.get(&(b, a))).copied().unwrap_or(false));
                let c2 = if direct.contains_key(&(c, 2)) { vec![cn(c, 2)] } else { vec![Gate::Hall, cn(2, c), Gate::Hall] };
                let w: Word = c2.iter().chain(&[cn(2, t)]).chain(&c2).chain(&[cn(2, t)]).copied().collect();
                (w, format!("CNOT({c}->2), CNOT(2->{t}) repeated twice"), ok && hall_ok)
            };
            let verified = base_ok && SymplecticOp::of_word(&word, m)? == SymplecticOp::of_gate(cn(c, t), m)?;
            gens.push(GeneratorEntry { generator: format!("CNOT({c}->{t})"), realization: how, verified });
        }
    }
    for &i in &DATA {
        for &j in &DATA {
            if i < j {
                let r = verify_sisj_gadget(i, j)?;
                gens.push(GeneratorEntry {
                    generator: format!("S({i})Sdg({j})"),
                    realization: r.plan.join(", "),
                    verified: r.passed,
                });
                let r = verify_sisj_gadget(j, i)?;
                gens.push(GeneratorEntry {
                    generator: format!("S({j})Sdg({i})"),
                    realization: r.plan.join(", "),
                    verified: r.passed,
                });
            }
        }
    }
    let (s_word, rep) = synthesize_s1(m)?;
    let uses_only_generators = |w: &[Gate]| w.iter().all(|g| matches!(g, Gate::Cnot(..) | Gate::SSdg(..) | Gate::Hall));
    let phase_synthesis_ok = rep.action_matches && uses_only_generators(&s_word);
    let mut hadamard_synthesis_ok = true;
    for q in 0..m {
        let w = synthesize_hi(q, m)?;
        let inv = inverse_word(&w);
        hadamard_synthesis_ok &= uses_only_generators(&w)
            && SymplecticOp::of_word(&w, m)?.then(&SymplecticOp::of_word(&inv, m)?) == SymplecticOp::identity(m);
    }
    let restricted_m3 = generation_check(3, &standard_generators(3, true), 4_000_000)?;
    let restricted_m3_without_phase_pairs = generation_check(3, &standard_generators(3, false), 4_000_000)?;
    let passed = gens.iter().all(|g| g.verified)
        && phase_synthesis_ok
        && hadamard_synthesis_ok
        && restricted_m3.full
        && !restricted_m3_without_phase_pairs.full;
    Ok(ToolboxCertificate {
        generators: gens,
        phase_synthesis_ok,
        hadamard_synthesis_ok,
        restricted_m3,
        restricted_m3_without_phase_pairs,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn physical_labels_reverse_each_cluster() {
        assert_eq!(physical_index(1, 3), 0);
        assert_eq!(physical_index(2, 3), 2);
        assert_eq!(physical_index(3, 3), 1);
        assert_eq!(physical_index(4, 3), 3);
    }

    #[test]
    fn fold_gate() {
        let r = verify_cz_s().unwrap();
        assert!(r.identity_zero && r.action.passed() && r.squared_is_identity, "{r:?}");
    }

    #[test]
    fn swaps_and_hadamard_fold() {
        for a in verify_automorphisms().unwrap() {
            assert!(a.passed(), "{}: {:?}", a.name, a.observed);
        }
        let hs = verify_h_swap().unwrap();
        assert!(hs.passed(), "{:?}", hs.observed);
        let a2 = &verify_automorphisms().unwrap()[1];
        assert_eq!(a2.logical.then(&a2.logical), SymplecticOp::identity(K));
    }

    #[test]
    fn global_hadamard() {
        let g = simplified_global_hadamard().unwrap();
        assert!(g.passed());
        assert!(g.printed_word.stabilizers_preserved);
    }

    #[test]
    fn group_has_32_arrangements() {
        assert_eq!(arrangement_group().len(), 32);
    }

    #[test]
    fn printed_connections_factor() {
        let c = code().unwrap();
        for p in [INI, FIN, Z1_PAIRS, X2_PAIRS, X2_CROSSED, Z1_28, X2_28, Z1_2X, X2_24, X2_26, FIN_26, Z1_28S, FIN_28S] {
            let r = p.check(&c).unwrap();
            assert!(r.valid && r.h_a_prime.is_some(), "{:?}", p.rows);
        }
    }

    #[test]
    fn described_schedule() {
        let r = run_cnot_schedule("62x84").unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.words_source, "described");
        assert_eq!(r.aux_cost, 48);
    }

    #[test]
    fn phase_pair_at_home() {
        let r = verify_sisj_gadget(4, 8).unwrap();
        assert!(r.passed, "{r:?}");
        let r = verify_sisj_gadget(2, 6).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn reordered_pairing_is_not_reached() {
        let r = run_cnot_schedule("86x24").unwrap();
        assert!(!r.passed);
        assert_eq!(r.realized_instead, vec!["CNOT(4->2) CNOT(8->6)".to_string()]);
    }

    #[test]
    fn operator_products_reverse_into_time_order() {
        let w = operator_product("SWAP(1,2) CNOT(2,3)").unwrap();
        assert_eq!(w, vec![Gate::Cnot(1, 2), Gate::Swap(0, 1)]);
    }
}
