//! Parallel product surgery: connection codes, merged codes, merge
//! accounting, pair connections, the staged procedure, fault-tolerance scans,
//! overhead and boostability.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codes::{lp_checks, CcCode, CssCode};
use crate::distance::{exhaustive_min_weight, randomized_min_weight, LogicalProblem, PauliType, DEFAULT_BUDGET};
use crate::error::{ensure, Error, Result};
use crate::gf2::{BitMatrix, BitVec};
use crate::logical::Sector;
use crate::ring::{RingElem, RingMatrix};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MergeKind {
    #[default]
    Z,
    X,
}

/// A product connection code `LP(H_a', H_b')`.
#[derive(Clone, Debug)]
pub struct ConnectionCode {
    pub h_a_prime: RingMatrix,
    pub h_b_prime: RingMatrix,
    pub hx_prime: RingMatrix,
    pub hz_prime: RingMatrix,
    pub bhx_prime: BitMatrix,
    pub bhz_prime: BitMatrix,
}

impl ConnectionCode {
    pub fn new(h_a_prime: RingMatrix, h_b_prime: RingMatrix) -> Result<Self> {
        let (hx_prime, hz_prime) = lp_checks(&h_a_prime, &h_b_prime)?;
        let bhx_prime = hx_prime.binary_lift();
        let bhz_prime = hz_prime.binary_lift();
        Ok(Self { h_a_prime, h_b_prime, hx_prime, hz_prime, bhx_prime, bhz_prime })
    }

    /// 0/1 seeds from binary patterns.
    pub fn from_patterns(l: usize, a: &BitMatrix, b: &BitMatrix) -> Result<Self> {
        Self::new(RingMatrix::from_binary(l, a), RingMatrix::from_binary(l, b))
    }

    /// The connection numbered `index` for a code with `n_a x n_a` and
    /// `n_b x n_b` seeds: the low `n_a^2` bits fill `H_a'` row-major, the next
    /// `n_b^2` bits fill `H_b'`.
    pub fn from_index(code: &CcCode, index: u64) -> Result<Self> {
        let (na, nb) = (code.n_a, code.n_b);
        if na * na + nb * nb >= 64 || index >> (na * na + nb * nb) != 0 {
            return Err(Error::Input(format!("connection index {index} out of range")));
        }
        let a = BitMatrix::from_fn(na, na, |i, j| index >> (i * na + j) & 1 == 1);
        let b = BitMatrix::from_fn(nb, nb, |i, j| index >> (na * na + i * nb + j) & 1 == 1);
        Self::from_patterns(code.p, &a, &b)
    }

    pub fn count_for(code: &CcCode) -> u64 {
        1 << (code.n_a * code.n_a + code.n_b * code.n_b)
    }

    pub fn is_zero_one(&self) -> bool {
        self.h_a_prime.is_zero_one() && self.h_b_prime.is_zero_one()
    }

    pub fn a_pattern(&self) -> BitMatrix {
        self.h_a_prime.pattern()
    }

    pub fn b_pattern(&self) -> BitMatrix {
        self.h_b_prime.pattern()
    }

    pub fn checks(&self, kind: MergeKind) -> (&RingMatrix, &BitMatrix) {
        match kind {
            MergeKind::Z => (&self.hz_prime, &self.bhz_prime),
            MergeKind::X => (&self.hx_prime, &self.bhx_prime),
        }
    }
}

fn ring_block(a: &RingMatrix, b: Option<&RingMatrix>, c: Option<&RingMatrix>, d: &RingMatrix) -> Result<RingMatrix> {
    let l = a.l();
    let zb = RingMatrix::zeros(l, a.rows(), d.cols());
    let zc = RingMatrix::zeros(l, d.rows(), a.cols());
    let top = a.hstack(b.unwrap_or(&zb))?;
    let bottom = c.unwrap_or(&zc).hstack(d)?;
    top.vstack(&bottom)
}

/// Data qubits `0..N`, auxiliary qubits `N..2N`.
#[derive(Clone, Debug)]
pub struct MergedCode {
    pub kind: MergeKind,
    pub css: CssCode,
    pub parent_n: usize,
}

fn check_square(code: &CssCode, conn: &ConnectionCode) -> Result<()> {
    if conn.hx_prime.shape() != code.hx.shape() || conn.hz_prime.shape() != code.hz.shape() {
        return Err(Error::Shape(format!(
            "connection checks {:?}/{:?} vs data checks {:?}/{:?}",
            conn.hx_prime.shape(),
            conn.hz_prime.shape(),
            code.hx.shape(),
            code.hz.shape()
        )));
    }
    if conn.hx_prime.l() != code.l() {
        return Err(Error::MixedLift(code.l(), conn.hx_prime.l()));
    }
    let lhs = code.bhx.mul(&conn.bhz_prime.transpose())?;
    let rhs = conn.bhx_prime.mul(&code.bhz.transpose())?;
    ensure!(lhs == rhs, "commuting square H_X H_Z'^T = H_X' H_Z^T fails");
    Ok(())
}

/// Z-merge: `[[H_X, H_X'], [0, H_X]]`, `[[H_Z, 0], [H_Z', H_Z]]`; the X-merge
/// is the transposed dual `[[H_X, 0], [H_X', H_X]]`, `[[H_Z, H_Z'], [0, H_Z]]`.
pub fn merge_complex(code: &CssCode, conn: &ConnectionCode, kind: MergeKind) -> Result<MergedCode> {
    check_square(code, conn)?;
    let (hx, hz) = match kind {
        MergeKind::Z => (
            ring_block(&code.hx, Some(&conn.hx_prime), None, &code.hx)?,
            ring_block(&code.hz, None, Some(&conn.hz_prime), &code.hz)?,
        ),
        MergeKind::X => (
            ring_block(&code.hx, None, Some(&conn.hx_prime), &code.hx)?,
            ring_block(&code.hz, Some(&conn.hz_prime), None, &code.hz)?,
        ),
    };
    let css = CssCode::new(hx, hz)?;
    Ok(MergedCode { kind, css, parent_n: code.n })
}

/// `(data checks, connection checks)` on the side that carries the merge.
fn merge_side<'a>(code: &'a CssCode, conn: &'a ConnectionCode, kind: MergeKind) -> (&'a BitMatrix, &'a BitMatrix) {
    match kind {
        MergeKind::Z => (&code.bhz, &conn.bhz_prime),
        MergeKind::X => (&code.bhx, &conn.bhx_prime),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MergeCount {
    /// `dim H'^T [ker H^T]`.
    pub image: usize,
    /// The same image counted modulo data stabilizers.
    pub modulo_stabilizers: usize,
    /// F2 rank of the 0/1 pattern of the ring-level connection checks.
    pub pattern_rank: Option<usize>,
}

pub fn merge_count_detail(code: &CssCode, conn: &ConnectionCode, kind: MergeKind) -> Result<MergeCount> {
    let (h, hp) = merge_side(code, conn, kind);
    let k = h.transpose().kernel_basis();
    let img = k.mul(hp)?;
    let image = img.rank();
    let modulo_stabilizers = h.vstack(&img)?.rank() - h.rank();
    let pattern_rank = conn.is_zero_one().then(|| conn.checks(kind).0.pattern().rank());
    Ok(MergeCount { image, modulo_stabilizers, pattern_rank })
}

/// Number of logical PPMs by the image formula.
pub fn count_merges(code: &CssCode, conn: &ConnectionCode, kind: MergeKind) -> Result<usize> {
    Ok(merge_count_detail(code, conn, kind)?.image)
}

/// For CC codes with 0/1 connections the image formula, the
/// modulo-stabilizer count and the pattern rank must all agree.
pub fn count_merges_cc(code: &CcCode, conn: &ConnectionCode, kind: MergeKind) -> Result<usize> {
    let c = merge_count_detail(&code.css, conn, kind)?;
    let r = c.pattern_rank.ok_or_else(|| Error::Input("connection entries must be 0/1".into()))?;
    ensure!(
        c.image == r && c.modulo_stabilizers == r,
        "merge count formulas disagree: image {}, modulo stabilizers {}, pattern rank {r}",
        c.image,
        c.modulo_stabilizers
    );
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MergeTarget {
    /// 1-based row of the connection check matrix.
    pub row: usize,
    /// 1-based logical indices measured jointly by this row.
    pub logicals: Vec<usize>,
}

/// For each nonzero row of the connection checks, the logicals whose
/// clusters carry `chi` in `chi * (H' | H)_row`. The lifted sum of the row's
/// `p` stabilizers is checked against the joint logical support.
pub fn merge_targets(code: &CcCode, conn: &ConnectionCode, kind: MergeKind) -> Result<Vec<MergeTarget>> {
    if !conn.is_zero_one() {
        return Err(Error::Input("merge targets need 0/1 connection entries".into()));
    }
    let merged = merge_complex(&code.css, conn, kind)?;
    let p = code.p;
    let n = code.n();
    let (ring_h, _) = conn.checks(kind);
    let bottom = match kind {
        MergeKind::Z => &merged.css.bhz,
        MergeKind::X => &merged.css.bhx,
    };
    let offset = bottom.rows() / 2;
    let mut out = Vec::new();
    for r in 0..ring_h.rows() {
        let logicals: Vec<usize> = (0..ring_h.cols()).filter(|&c| ring_h.get(r, c).is_one()).map(|c| c + 1).collect();
        let mut sum = BitVec::zeros(2 * n);
        for t in 0..p {
            sum.xor_assign(&bottom.row(offset + r * p + t));
        }
        let expect = BitVec::from_indices(2 * n, logicals.iter().flat_map(|&c| (c - 1) * p..c * p));
        ensure!(sum == expect, "row {} of the connection does not multiply to its joint logical", r + 1);
        if !logicals.is_empty() {
            out.push(MergeTarget { row: r + 1, logicals });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct MergeReport {
    pub kind: MergeKind,
    pub n_tilde: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub k_tilde: usize,
    pub r_tilde: usize,
    pub targets: Vec<MergeTarget>,
    pub maximally_parallel: bool,
}

/// `k~ = k + dim ker H~_Z^T - 2 dim ker H_Z^T`, `r~` likewise on the X side;
/// for a Z-merge the Z side loses the merged logicals (roles swap for X).
fn lemma_counts(code: &CssCode, merged: &MergedCode) -> (usize, usize) {
    let k = code.k as isize;
    let dk = |m: &BitMatrix| (m.rows() - m.rank()) as isize;
    let z = k + dk(&merged.css.bhz) - 2 * dk(&code.bhz);
    let x = k + dk(&merged.css.bhx) - 2 * dk(&code.bhx);
    match merged.kind {
        MergeKind::Z => (z as usize, x as usize),
        MergeKind::X => (x as usize, z as usize),
    }
}

/// Logical and gauge counts of the merged code with their cross-checks.
pub fn merged_counts_css(code: &CssCode, conn: &ConnectionCode, kind: MergeKind) -> Result<(usize, usize, usize)> {
    let merged = merge_complex(code, conn, kind)?;
    let detail = merge_count_detail(code, conn, kind)?;
    let m = detail.image;
    let other = match kind {
        MergeKind::Z => MergeKind::X,
        MergeKind::X => MergeKind::Z,
    };
    let gauge_loss = merge_count_detail(code, conn, other)?.modulo_stabilizers;
    let k_tilde = code.k - detail.modulo_stabilizers;
    let r_tilde = code.k - gauge_loss;
    let (k_lemma, r_lemma) = lemma_counts(code, &merged);
    ensure!(k_tilde == k_lemma, "k~ = {k_tilde} but the kernel lemma gives {k_lemma}");
    ensure!(r_tilde == r_lemma, "r~ = {r_tilde} but the kernel lemma gives {r_lemma}");
    ensure!(
        k_tilde + r_tilde == merged.css.k,
        "k~ + r~ = {} but the merged code has {} logical-or-gauge qubits",
        k_tilde + r_tilde,
        merged.css.k
    );
    Ok((m, k_tilde, r_tilde))
}

pub fn merged_counts(code: &CcCode, conn: &ConnectionCode, kind: MergeKind) -> Result<MergeReport> {
    let (_, k_tilde, r_tilde) = merged_counts_css(&code.css, conn, kind)?;
    let m = count_merges_cc(code, conn, kind)?;
    ensure!(k_tilde == code.k() - m, "k~ = {k_tilde} differs from k - M = {}", code.k() - m);
    let targets = merge_targets(code, conn, kind)?;
    Ok(MergeReport {
        kind,
        n_tilde: 2 * code.n(),
        m,
        k_tilde,
        r_tilde,
        targets,
        maximally_parallel: m == code.sector_size(),
    })
}

/// `dim ker [[A, B], [0, A]] = 2 dim ker A + rank A - rank [A | B K]`, `K` a kernel basis of `A`.
pub fn block_kernel_dim(a: &BitMatrix, b: &BitMatrix) -> Result<usize> {
    let k = a.kernel_basis();
    let bk = b.mul(&k.transpose())?;
    let ra = a.rank();
    Ok(2 * (a.cols() - ra) + ra - a.hstack(&bk)?.rank())
}

/// Position of a logical on the `n_a x n_b` cluster grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridPos {
    pub sector: Sector,
    pub a: usize,
    pub b: usize,
}

pub fn grid_pos(logical: usize, grid: (usize, usize)) -> Result<GridPos> {
    let per = grid.0 * grid.1;
    if logical == 0 || logical > 2 * per {
        return Err(Error::Input(format!("logical index {logical} outside 1..={}", 2 * per)));
    }
    let i = logical - 1;
    let sector = if i < per { Sector::Left } else { Sector::Right };
    let c = i % per;
    Ok(GridPos { sector, a: c / grid.1, b: c % grid.1 })
}

/// Different sectors, or the same sector and aligned on the cluster grid.
pub fn is_compatible(alpha: usize, beta: usize, grid: (usize, usize)) -> bool {
    match (grid_pos(alpha, grid), grid_pos(beta, grid)) {
        (Ok(x), Ok(y)) if alpha != beta => x.sector != y.sector || x.a == y.a || x.b == y.b,
        _ => false,
    }
}

/// A 0/1 connection whose Z-check row span contains `chi (e_alpha + e_beta)`.
pub fn pair_connection(code: &CcCode, alpha: usize, beta: usize) -> Result<ConnectionCode> {
    let grid = (code.n_a, code.n_b);
    if !is_compatible(alpha, beta, grid) {
        return Err(Error::Incompatible(format!("logicals {alpha} and {beta} are in one sector and not aligned")));
    }
    let (mut x, mut y) = (grid_pos(alpha, grid)?, grid_pos(beta, grid)?);
    if x.sector == Sector::Right && y.sector == Sector::Left {
        std::mem::swap(&mut x, &mut y);
    }
    let mut a = BitMatrix::zeros(code.n_a, code.n_a);
    let mut b = BitMatrix::zeros(code.n_b, code.n_b);
    // Row (i, j) of H_Z' touches left (i, j') when H_b'[j'][j] = 1 and right
    // (i', j) when H_a'[i'][i] = 1.
    match (x.sector, y.sector) {
        (Sector::Left, Sector::Right) => {
            b.set(x.b, y.b, true);
            a.set(y.a, x.a, true);
        }
        (Sector::Left, Sector::Left) if x.a == y.a => {
            b.set(x.b, 0, true);
            b.set(y.b, 0, true);
        }
        (Sector::Left, Sector::Left) => {
            a.set(0, x.a, true);
            a.set(0, y.a, true);
            b.set(x.b, 0, true);
        }
        (Sector::Right, Sector::Right) if x.b == y.b => {
            a.set(x.a, 0, true);
            a.set(y.a, 0, true);
        }
        _ => {
            a.set(x.a, 0, true);
            b.set(0, x.b, true);
            b.set(0, y.b, true);
        }
    }
    let conn = ConnectionCode::from_patterns(code.p, &a, &b)?;
    let pattern = conn.hz_prime.pattern();
    let want = BitVec::from_indices(pattern.cols(), [alpha - 1, beta - 1]);
    ensure!(
        pattern.row_space_contains(&want)?,
        "pair connection for ({alpha}, {beta}) does not span the joint logical"
    );
    merge_targets(code, &conn, MergeKind::Z)?;
    Ok(conn)
}

#[derive(Clone, Debug, Serialize)]
pub struct SurgeryStage {
    pub label: String,
    pub hx: BitMatrix,
    pub hz: BitMatrix,
}

#[derive(Clone, Debug, Serialize)]
pub struct SurgeryTrace {
    pub stages: Vec<SurgeryStage>,
    pub d_rounds: usize,
    pub split_basis: String,
}

/// Stages of a Z-type product surgery: auxiliary preparation, merge, merged code.
pub fn surgery_trace(code: &CssCode, conn: &ConnectionCode, d_rounds: usize) -> Result<SurgeryTrace> {
    let merged = merge_complex(code, conn, MergeKind::Z)?;
    let n = code.n;
    let (hx, hz) = (&code.bhx, &code.bhz);
    let s1x = BitMatrix::block2x2(Some(hx), None, None, Some(&BitMatrix::identity(n)))?;
    let s1z = hz.hstack(&BitMatrix::zeros(hz.rows(), n))?;
    let g = hz.cokernel_matrix();
    ensure!(g.mul(&hz.transpose())?.is_zero(), "G does not annihilate im H_Z^T");
    ensure!(g.kernel_basis().same_row_space(hz), "ker G differs from im H_Z^T");
    let s2x = BitMatrix::block2x2(Some(hx), Some(&conn.bhx_prime), None, Some(&g))?;
    let s2z = merged.css.bhz.clone();
    let stages = vec![
        SurgeryStage { label: "prepare auxiliary in |+>".into(), hx: s1x, hz: s1z },
        SurgeryStage { label: "measure merged Z checks".into(), hx: s2x, hz: s2z },
        SurgeryStage { label: "merged code".into(), hx: merged.css.bhx.clone(), hz: merged.css.bhz.clone() },
    ];
    for s in &stages {
        ensure!(s.hx.mul(&s.hz.transpose())?.is_zero(), "stage '{}' is not abelian", s.label);
    }
    Ok(SurgeryTrace { stages, d_rounds, split_basis: "X".into() })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanMode {
    Exhaustive,
    Randomized,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanEntry {
    pub index: u64,
    pub h_a_prime: Vec<String>,
    pub h_b_prime: Vec<String>,
    #[serde(rename = "M")]
    pub m: usize,
    /// Smallest logical weight found in the merged code (either type).
    pub found: Option<usize>,
    /// Certified lower bound on the merged distance.
    pub certified_at_least: Option<usize>,
    pub passes: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FtScanReport {
    pub label: Option<String>,
    pub d: usize,
    pub mode: ScanMode,
    pub trials: usize,
    pub seed: u64,
    pub total: usize,
    pub passed: usize,
    /// Smallest merged distance established over the scan.
    pub min_d_tilde: Option<usize>,
    pub failures: Vec<ScanEntry>,
    pub entries: Vec<ScanEntry>,
}

#[derive(Clone, Debug)]
pub struct FtScanOptions {
    pub d: usize,
    pub mode: ScanMode,
    pub trials: usize,
    pub seed: u64,
    pub connections: Option<Vec<u64>>,
}

fn scan_one(code: &CcCode, index: u64, opts: &FtScanOptions) -> Result<ScanEntry> {
    let conn = ConnectionCode::from_index(code, index)?;
    let merged = merge_complex(&code.css, &conn, MergeKind::Z)?;
    let m = count_merges_cc(code, &conn, MergeKind::Z)?;
    let mut found: Option<usize> = None;
    let mut certified = None;
    for t in [PauliType::X, PauliType::Z] {
        let prob = LogicalProblem::of(&merged.css, t);
        let r = randomized_min_weight(&prob, opts.trials, opts.seed);
        found = match (found, r.weight) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        if opts.mode == ScanMode::Exhaustive {
            let e = exhaustive_min_weight(&prob, opts.d - 1, false, DEFAULT_BUDGET)?;
            if let Some(w) = e.weight {
                found = Some(found.map_or(w, |f| f.min(w)));
            }
            certified = Some(certified.map_or(e.exhausted_below, |c: usize| c.min(e.exhausted_below)));
        }
    }
    if let (Some(c), Some(f)) = (certified, found) {
        if f == c {
            certified = Some(f);
        }
    }
    let passes = found.is_none_or(|f| f >= opts.d) && certified.is_none_or(|c| c >= opts.d);
    Ok(ScanEntry {
        index,
        h_a_prime: conn.a_pattern().to_rows_string(),
        h_b_prime: conn.b_pattern().to_rows_string(),
        m,
        found,
        certified_at_least: certified,
        passes,
    })
}

/// Merged-code distance over every 0/1 connection (or a given list). The
/// merged code is treated as a stabilizer code with its gauge qubits counted
/// as logical, so the bound is on the smaller, undressed distance.
pub fn ft_scan(code: &CcCode, opts: &FtScanOptions) -> Result<FtScanReport> {
    let indices: Vec<u64> = match &opts.connections {
        Some(v) => v.clone(),
        None => (0..ConnectionCode::count_for(code)).collect(),
    };
    let entries: Vec<ScanEntry> = indices.par_iter().map(|&i| scan_one(code, i, opts)).collect::<Result<_>>()?;
    let passed = entries.iter().filter(|e| e.passes).count();
    let min_d_tilde = entries
        .iter()
        .map(|e| match (e.certified_at_least, e.found) {
            (Some(c), Some(f)) if c == f => Some(f),
            (Some(c), _) => Some(c),
            (None, f) => f,
        })
        .min()
        .flatten();
    Ok(FtScanReport {
        label: code.label.clone(),
        d: opts.d,
        mode: opts.mode,
        trials: opts.trials,
        seed: opts.seed,
        total: entries.len(),
        passed,
        min_d_tilde,
        failures: entries.iter().filter(|e| !e.passes).cloned().collect(),
        entries,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Overhead {
    pub space: usize,
    pub data_aux: usize,
    pub check_aux: usize,
    pub time_per_merge: f64,
    pub spacetime: f64,
    /// Set when `M < k/2`, where the per-merge time is an extrapolation.
    pub extrapolated: bool,
}

pub fn overhead_report(code: &CcCode, d: usize, m: usize) -> Result<Overhead> {
    let k = code.k();
    if m == 0 || 2 * m > k {
        return Err(Error::Input(format!("merge count {m} outside 1..={}", k / 2)));
    }
    let n = code.n();
    // M merges share one round of d syndrome cycles.
    let time = d as f64 / m as f64;
    Ok(Overhead {
        space: 2 * n,
        data_aux: n,
        check_aux: n,
        time_per_merge: time,
        spacetime: 2.0 * n as f64 * time,
        extrapolated: 2 * m != k,
    })
}

/// A set of disjoint single- and two-logical Z measurements, as bitmasks.
pub type Configuration = Vec<u8>;

/// All nonempty configurations on eight logicals.
pub fn enumerate_configurations() -> Vec<Configuration> {
    fn rec(free: u8, parts: &mut Vec<u8>, out: &mut Vec<Configuration>) {
        if free == 0 {
            if !parts.is_empty() {
                out.push(parts.clone());
            }
            return;
        }
        let i = free.trailing_zeros();
        let rest = free & !(1 << i);
        rec(rest, parts, out);
        parts.push(1 << i);
        rec(rest, parts, out);
        parts.pop();
        let mut others = rest;
        while others != 0 {
            let j = others.trailing_zeros();
            others &= others - 1;
            parts.push(1 << i | 1 << j);
            rec(rest & !(1 << j), parts, out);
            parts.pop();
        }
    }
    let mut out = Vec::new();
    rec(0xff, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct BoostCensus {
    pub total: usize,
    pub boostable: usize,
    pub predicate: String,
    pub reference: usize,
    pub agrees: bool,
    /// Counts under alternative readings of the predicate.
    pub variants: Vec<(String, usize)>,
}

/// Target families of all 0/1 connections for an `n_a = n_b = 2` code.
pub fn target_families(code: &CcCode) -> Result<Vec<BTreeSet<u8>>> {
    if code.k() != 8 {
        return Err(Error::Input("boost census needs k = 8".into()));
    }
    (0..ConnectionCode::count_for(code))
        .into_par_iter()
        .map(|i| {
            let conn = ConnectionCode::from_index(code, i)?;
            let t = merge_targets(code, &conn, MergeKind::Z)?;
            Ok(t.iter().map(|t| t.logicals.iter().fold(0u8, |m, &l| m | 1 << (l - 1))).collect())
        })
        .collect()
}

pub fn boost_census(code: &CcCode) -> Result<BoostCensus> {
    let families: Vec<BTreeSet<u8>> = target_families(code)?.into_iter().filter(|f| !f.is_empty()).collect();
    let configs = enumerate_configurations();
    let count = |pred: &(dyn Fn(&BTreeSet<u8>, &BTreeSet<u8>) -> bool + Sync)| -> usize {
        configs
            .par_iter()
            .filter(|c| {
                let set: BTreeSet<u8> = c.iter().copied().collect();
                families.iter().any(|f| pred(f, &set))
            })
            .count()
    };
    let subset = count(&|f, c| f.is_subset(c));
    let pairs_only = count(&|f, c| f.is_subset(c) && f.iter().all(|m| m.count_ones() == 2));
    let with_pair = count(&|f, c| f.is_subset(c) && f.iter().any(|m| m.count_ones() == 2));
    let exact = count(&|f, c| f == c);
    Ok(BoostCensus {
        total: configs.len(),
        boostable: subset,
        predicate: "some 0/1 connection has a nonempty target family contained in the configuration".into(),
        reference: 867,
        agrees: subset == 867,
        variants: vec![
            ("family of pairs only".into(), pairs_only),
            ("family with at least one pair".into(), with_pair),
            ("family equals the configuration".into(), exact),
        ],
    })
}

/// Identity-like connection used in examples: `H_a' = H_b' = I`.
pub fn identity_connection(code: &CcCode) -> Result<ConnectionCode> {
    ConnectionCode::from_patterns(code.p, &BitMatrix::identity(code.n_a), &BitMatrix::identity(code.n_b))
}

/// Ring-level 0/1 matrix from rows such as `"10"`.
pub fn zero_one(l: usize, rows: &[&str]) -> RingMatrix {
    let m = BitMatrix::from_rows(rows);
    let mut out = RingMatrix::zeros(l, m.rows(), m.cols());
    for r in 0..m.rows() {
        for c in m.row(r).ones() {
            out.set(r, c, RingElem::one(l));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{builtin, hypergraph_product};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c24() -> CcCode {
        builtin("24_8_3").unwrap()
    }

    #[test]
    fn example_one() {
        let code = c24();
        let conn = identity_connection(&code).unwrap();
        let rep = merged_counts(&code, &conn, MergeKind::Z).unwrap();
        assert_eq!((rep.m, rep.k_tilde, rep.r_tilde, rep.n_tilde), (4, 4, 4, 48));
        assert!(rep.maximally_parallel);
        let t: Vec<Vec<usize>> = rep.targets.iter().map(|t| t.logicals.clone()).collect();
        assert_eq!(t, vec![vec![1, 5], vec![2, 6], vec![3, 7], vec![4, 8]]);
    }

    #[test]
    fn example_three() {
        let code = c24();
        let conn = ConnectionCode::new(zero_one(3, &["10", "10"]), zero_one(3, &["00", "00"])).unwrap();
        let rep = merged_counts(&code, &conn, MergeKind::Z).unwrap();
        assert_eq!((rep.m, rep.k_tilde, rep.r_tilde), (2, 6, 6));
    }

    #[test]
    fn zero_connection_is_two_copies() {
        let code = c24();
        let conn = ConnectionCode::from_index(&code, 0).unwrap();
        let rep = merged_counts(&code, &conn, MergeKind::Z).unwrap();
        assert_eq!((rep.m, rep.k_tilde, rep.r_tilde), (0, 8, 8));
        assert!(rep.targets.is_empty());
    }

    #[test]
    fn formulas_agree_on_all_connections() {
        for label in ["24_8_3", "40_8_5"] {
            let code = builtin(label).unwrap();
            for i in 0..256 {
                let conn = ConnectionCode::from_index(&code, i).unwrap();
                for kind in [MergeKind::Z, MergeKind::X] {
                    merged_counts(&code, &conn, kind).unwrap();
                }
            }
        }
    }

    #[test]
    fn pair_connections() {
        let code = c24();
        for a in 1..=8 {
            for b in 1..=8 {
                let ok = is_compatible(a, b, (2, 2));
                assert_eq!(pair_connection(&code, a, b).is_ok(), ok, "{a} {b}");
            }
        }
        assert!(matches!(pair_connection(&code, 1, 4), Err(Error::Incompatible(_))));
        let c = pair_connection(&code, 5, 7).unwrap();
        assert_eq!(c.a_pattern().to_rows_string(), ["10", "10"]);
        assert!(c.b_pattern().is_zero());
    }

    #[test]
    fn block_kernel_lemma_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let (r, c) = (rng.gen_range(1..=12), rng.gen_range(1..=12));
            let a = BitMatrix::random(r, c, &mut rng);
            let b = BitMatrix::random(r, c, &mut rng);
            let full = BitMatrix::block2x2(Some(&a), Some(&b), None, Some(&a)).unwrap();
            assert_eq!(block_kernel_dim(&a, &b).unwrap(), full.nullity());
        }
    }

    #[test]
    fn random_hgp_merges_are_css() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..30 {
            let (ma, na, mb, nb) = (rng.gen_range(1..4), rng.gen_range(2..5), rng.gen_range(1..4), rng.gen_range(2..5));
            let ha = BitMatrix::random(ma, na, &mut rng);
            let hb = BitMatrix::random(mb, nb, &mut rng);
            let code = hypergraph_product(&ha, &hb).unwrap();
            let conn = ConnectionCode::from_patterns(1, &BitMatrix::random(ma, na, &mut rng), &BitMatrix::random(mb, nb, &mut rng))
                .unwrap();
            for kind in [MergeKind::Z, MergeKind::X] {
                merge_complex(&code, &conn, kind).unwrap();
                merged_counts_css(&code, &conn, kind).unwrap();
            }
            let tr = surgery_trace(&code, &conn, 3).unwrap();
            assert_eq!(tr.stages.len(), 3);
        }
    }

    #[test]
    fn configuration_count() {
        assert_eq!(enumerate_configurations().len(), 7192);
    }

    #[test]
    fn overhead_formulas() {
        let code = c24();
        let o = overhead_report(&code, 3, 4).unwrap();
        assert_eq!((o.space, o.time_per_merge, o.spacetime), (48, 0.75, 36.0));
        assert!(overhead_report(&code, 3, 5).is_err());
    }
}
