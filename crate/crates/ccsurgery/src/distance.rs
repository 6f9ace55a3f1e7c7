//! Minimum distance of CSS codes: exhaustive enumeration and randomized
//! information-set search.

use std::sync::atomic::{AtomicBool, Ordering};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::codes::CssCode;
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec, RowSpan};

/// Default ceiling on the number of supports visited by an exhaustive search.
pub const DEFAULT_BUDGET: f64 = 2e11;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PauliType {
    X,
    Z,
}

/// One side of a distance problem: vectors in `ker check` that are not in
/// `rowspan stab` are logical.
#[derive(Clone, Debug)]
pub struct LogicalProblem {
    pub check: BitMatrix,
    /// `k x n`; a kernel vector is logical iff it pairs nontrivially with some row.
    pub dual_logicals: BitMatrix,
}

impl LogicalProblem {
    pub fn new(check: &BitMatrix, stab: &BitMatrix) -> Self {
        let n = check.cols();
        // Representatives of ker(stab) modulo rowspan(check).
        let mut span = RowSpan::new(check);
        let mut reps = Vec::new();
        let kb = stab.kernel_basis();
        for r in 0..kb.rows() {
            let v = kb.row(r);
            if span.insert(&v) {
                reps.push(v);
            }
        }
        Self { check: check.clone(), dual_logicals: BitMatrix::from_bitvecs(n, &reps) }
    }

    /// Z-type problem of a CSS code: `ker H_X` modulo `rowspan H_Z`.
    pub fn of(code: &CssCode, t: PauliType) -> Self {
        match t {
            PauliType::Z => Self::new(&code.bhx, &code.bhz),
            PauliType::X => Self::new(&code.bhz, &code.bhx),
        }
    }

    pub fn n(&self) -> usize {
        self.check.cols()
    }

    pub fn k(&self) -> usize {
        self.dual_logicals.rows()
    }

    pub fn is_logical(&self, v: &BitVec) -> bool {
        self.check.mul_vec(v).is_zero() && !self.dual_logicals.mul_vec(v).is_zero()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DistanceEstimate {
    pub d_x_est: Option<usize>,
    pub d_z_est: Option<usize>,
    pub n_bar_x: f64,
    pub n_bar_z: f64,
    pub fail_bound_x: f64,
    pub fail_bound_z: f64,
    pub trials: usize,
    pub rng_seed: Option<u64>,
    pub exhaustive: bool,
    pub no_logicals: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_x: Option<BitVec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_z: Option<BitVec>,
}

impl DistanceEstimate {
    pub fn d(&self) -> Option<usize> {
        match (self.d_x_est, self.d_z_est) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Packed per-qubit columns: syndrome bits followed by logical-pairing bits.
struct Columns {
    words: usize,
    synd_words: usize,
    data: Vec<u64>,
}

impl Columns {
    fn new(p: &LogicalProblem) -> Self {
        let r = p.check.rows();
        let k = p.k();
        let synd_words = r.div_ceil(64);
        let words = synd_words + k.div_ceil(64).max(1);
        let mut data = vec![0u64; p.n() * words];
        for q in 0..p.n() {
            let base = q * words;
            for i in 0..r {
                if p.check.get(i, q) {
                    data[base + i / 64] |= 1 << (i % 64);
                }
            }
            for i in 0..k {
                if p.dual_logicals.get(i, q) {
                    data[base + synd_words + i / 64] |= 1 << (i % 64);
                }
            }
        }
        Self { words, synd_words, data }
    }

    #[inline]
    fn col(&self, q: usize) -> &[u64] {
        &self.data[q * self.words..(q + 1) * self.words]
    }

    #[inline]
    fn is_hit(&self, acc: &[u64]) -> bool {
        acc[..self.synd_words].iter().all(|&w| w == 0) && acc[self.synd_words..].iter().any(|&w| w != 0)
    }
}

/// Result of scanning one weight level.
struct Level {
    count: u64,
    witness: Option<Vec<usize>>,
}

fn scan_level(cols: &Columns, n: usize, w: usize, count_all: bool) -> Level {
    let stop = AtomicBool::new(false);
    let words = cols.words;
    let results: Vec<Level> = (0..n.saturating_sub(w - 1))
        .into_par_iter()
        .map(|first| {
            let mut level = Level { count: 0, witness: None };
            if stop.load(Ordering::Relaxed) {
                return level;
            }
            // acc[d] holds the XOR of the first d+1 chosen columns.
            let mut acc = vec![0u64; w * words];
            acc[..words].copy_from_slice(cols.col(first));
            let mut idx = vec![0usize; w];
            idx[0] = first;
            if w == 1 {
                if cols.is_hit(&acc[..words]) {
                    level.count = 1;
                    level.witness = Some(vec![first]);
                    if !count_all {
                        stop.store(true, Ordering::Relaxed);
                    }
                }
                return level;
            }
            let mut depth = 1;
            idx[1] = first;
            loop {
                idx[depth] += 1;
                if idx[depth] > n - (w - depth) {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                    continue;
                }
                let (prev, cur) = acc.split_at_mut(depth * words);
                let prev = &prev[(depth - 1) * words..];
                let c = cols.col(idx[depth]);
                for t in 0..words {
                    cur[t] = prev[t] ^ c[t];
                }
                if depth + 1 == w {
                    if cols.is_hit(&cur[..words]) {
                        level.count += 1;
                        if level.witness.is_none() {
                            level.witness = Some(idx.clone());
                        }
                        if !count_all {
                            stop.store(true, Ordering::Relaxed);
                            break;
                        }
                    }
                } else {
                    depth += 1;
                    idx[depth] = idx[depth - 1];
                }
                if depth == 1 && stop.load(Ordering::Relaxed) && !count_all {
                    break;
                }
            }
            level
        })
        .collect();
    let count = results.iter().map(|l| l.count).sum();
    let witness = results.into_iter().find_map(|l| l.witness);
    Level { count, witness }
}

/// Outcome of an exhaustive search for one Pauli type.
#[derive(Clone, Debug, Serialize)]
pub struct ExhaustiveResult {
    /// Minimum logical weight, if one was found at or below the cap.
    pub weight: Option<usize>,
    /// Every weight below this value was exhausted without a logical.
    pub exhausted_below: usize,
    /// Number of logicals at the minimum weight (only when counted).
    pub count: u64,
    pub witness: Option<BitVec>,
}

/// Search weights `1..=cap` in order. With `count_all` the whole minimum
/// level is enumerated so the multiplicity is exact.
pub fn exhaustive_min_weight(p: &LogicalProblem, cap: usize, count_all: bool, budget: f64) -> Result<ExhaustiveResult> {
    let n = p.n();
    let cap = cap.min(n);
    let cost: f64 = (1..=cap).map(|w| binom(n, w)).sum();
    if cost > budget {
        return Err(Error::Budget(format!("{cost:.3e} supports for n = {n}, cap = {cap} exceeds {budget:.1e}")));
    }
    if p.k() == 0 {
        return Ok(ExhaustiveResult { weight: None, exhausted_below: cap + 1, count: 0, witness: None });
    }
    let cols = Columns::new(p);
    for w in 1..=cap {
        let level = scan_level(&cols, n, w, count_all);
        if let Some(idx) = level.witness {
            let v = BitVec::from_indices(n, idx);
            debug_assert!(p.is_logical(&v));
            return Ok(ExhaustiveResult { weight: Some(w), exhausted_below: w, count: level.count, witness: Some(v) });
        }
    }
    Ok(ExhaustiveResult { weight: None, exhausted_below: cap + 1, count: 0, witness: None })
}

/// Exact distance by enumerating supports of increasing weight up to `weight_cap`.
pub fn exhaustive_distance(code: &CssCode, weight_cap: usize) -> Result<DistanceEstimate> {
    exhaustive_distance_with_budget(code, weight_cap, DEFAULT_BUDGET)
}

pub fn exhaustive_distance_with_budget(code: &CssCode, weight_cap: usize, budget: f64) -> Result<DistanceEstimate> {
    let rx = exhaustive_min_weight(&LogicalProblem::of(code, PauliType::X), weight_cap, true, budget)?;
    let rz = exhaustive_min_weight(&LogicalProblem::of(code, PauliType::Z), weight_cap, true, budget)?;
    let nb = |r: &ExhaustiveResult| r.count as f64;
    Ok(DistanceEstimate {
        d_x_est: rx.weight,
        d_z_est: rz.weight,
        n_bar_x: nb(&rx),
        n_bar_z: nb(&rz),
        fail_bound_x: 0.0,
        fail_bound_z: 0.0,
        trials: 0,
        rng_seed: None,
        exhaustive: rx.weight.is_some() && rz.weight.is_some(),
        no_logicals: code.k == 0,
        witness_x: rx.witness,
        witness_z: rz.witness,
    })
}

/// Running minimum of a randomized search.
#[derive(Clone, Debug, Default)]
pub struct RandomResult {
    pub weight: Option<usize>,
    /// Raw number of times a logical of the minimum weight was produced.
    pub hits: u64,
    pub witness: Option<BitVec>,
    pub trials: usize,
}

impl RandomResult {
    fn merge(mut self, other: RandomResult) -> RandomResult {
        self.trials += other.trials;
        match (self.weight, other.weight) {
            (_, None) => self,
            (None, Some(_)) => RandomResult { trials: self.trials, ..other },
            (Some(a), Some(b)) if b < a => RandomResult { trials: self.trials, ..other },
            (Some(a), Some(b)) if a == b => {
                self.hits += other.hits;
                self
            }
            _ => self,
        }
    }

    pub fn n_bar(&self) -> f64 {
        self.hits as f64
    }

    pub fn fail_bound(&self) -> f64 {
        (-self.n_bar()).exp()
    }
}

/// Randomized information-set search. Trial `t` permutes the columns with a
/// ChaCha8 stream `(seed, t)`, row-reduces a generator of `ker check` in that
/// order and inspects every reduced row. Parallel and serial runs agree.
pub fn randomized_min_weight(p: &LogicalProblem, trials: usize, seed: u64) -> RandomResult {
    let n = p.n();
    if p.k() == 0 {
        return RandomResult { trials, ..Default::default() };
    }
    let gen = p.check.kernel_basis();
    const CHUNK: usize = 64;
    let chunks = trials.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut best = RandomResult::default();
            let mut g = gen.clone();
            let mut order: Vec<usize> = (0..n).collect();
            let lo = c * CHUNK;
            let hi = ((c + 1) * CHUNK).min(trials);
            for t in lo..hi {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(t as u64);
                order.shuffle(&mut rng);
                g.clone_from(&gen);
                g.rref_cols_in_place(&order);
                let mut local = RandomResult { trials: 1, ..Default::default() };
                for r in 0..g.rows() {
                    let w = g.row_weight(r);
                    if local.weight.is_some_and(|b| w > b) {
                        continue;
                    }
                    let v = g.row(r);
                    if p.dual_logicals.mul_vec(&v).is_zero() {
                        continue;
                    }
                    match local.weight {
                        Some(b) if b == w => local.hits += 1,
                        _ => {
                            local.weight = Some(w);
                            local.hits = 1;
                            local.witness = Some(v);
                        }
                    }
                }
                best = best.merge(local);
            }
            best
        })
        .reduce(RandomResult::default, RandomResult::merge)
}

pub fn randomized_distance(code: &CssCode, trials: usize, seed: u64) -> DistanceEstimate {
    let rx = randomized_min_weight(&LogicalProblem::of(code, PauliType::X), trials, seed);
    let rz = randomized_min_weight(&LogicalProblem::of(code, PauliType::Z), trials, seed);
    DistanceEstimate {
        d_x_est: rx.weight,
        d_z_est: rz.weight,
        n_bar_x: rx.n_bar(),
        n_bar_z: rz.n_bar(),
        fail_bound_x: rx.fail_bound(),
        fail_bound_z: rz.fail_bound(),
        trials,
        rng_seed: Some(seed),
        exhaustive: false,
        no_logicals: code.k == 0,
        witness_x: rx.witness,
        witness_z: rz.witness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{builtin, hypergraph_product};

    #[test]
    fn surface_code_from_repetition_seeds() {
        let h = BitMatrix::parse("110;011");
        assert_eq!(hypergraph_product(&h, &h).unwrap().k, 0);
        let code = hypergraph_product(&h, &h.transpose()).unwrap();
        assert_eq!((code.n, code.k), (13, 1));
        let d = exhaustive_distance(&code, 5).unwrap();
        assert_eq!((d.d_x_est, d.d_z_est), (Some(3), Some(3)));
        assert!(d.exhaustive);
        let r = randomized_distance(&code, 200, 1);
        assert_eq!(r.d(), Some(3));
    }

    #[test]
    fn small_cc_code_is_distance_three() {
        let code = builtin("12_4_3").unwrap();
        let d = exhaustive_distance(&code.css, 4).unwrap();
        assert_eq!(d.d(), Some(3));
    }

    #[test]
    fn seeds_reproduce() {
        let code = builtin("40_8_5").unwrap();
        let a = randomized_distance(&code.css, 300, 9);
        let b = randomized_distance(&code.css, 300, 9);
        assert_eq!(a.d_z_est, b.d_z_est);
        assert_eq!(a.n_bar_z, b.n_bar_z);
        assert_eq!(a.witness_z, b.witness_z);
    }

    #[test]
    fn no_logicals_is_signalled() {
        let one = BitMatrix::identity(1);
        let code = hypergraph_product(&one, &one).unwrap();
        let r = randomized_distance(&code, 10, 0);
        assert!(r.no_logicals && r.d().is_none());
    }

    #[test]
    fn budget_is_enforced() {
        let code = builtin("136_8_14").unwrap();
        assert!(matches!(exhaustive_distance_with_budget(&code.css, 13, 1e6), Err(Error::Budget(_))));
    }

    #[test]
    fn randomized_bounds_exhaustive() {
        for label in ["24_8_3", "40_8_5"] {
            let code = builtin(label).unwrap();
            let e = exhaustive_distance(&code.css, code.p).unwrap().d().unwrap();
            let r = randomized_distance(&code.css, 2000, 3).d().unwrap();
            assert!(r >= e);
            assert_eq!(e, code.p);
        }
    }
}
