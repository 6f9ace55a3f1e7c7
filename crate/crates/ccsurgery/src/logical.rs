//! Clustered logical basis of a CC code.

use serde::Serialize;

use crate::codes::CcCode;
use crate::gf2::{BitVec, RowSpan};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sector {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Cluster {
    pub sector: Sector,
    /// 1-based position inside the sector.
    pub position: usize,
    /// Row index into `H_a` (left) / `H_a*` (right) blocks.
    pub a_index: usize,
    pub b_index: usize,
    pub start: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct LogicalBasis {
    pub n: usize,
    pub p: usize,
    pub x_reps: Vec<BitVec>,
    pub z_reps: Vec<BitVec>,
    pub clusters: Vec<Cluster>,
}

impl LogicalBasis {
    pub fn k(&self) -> usize {
        self.x_reps.len()
    }

    /// Physical qubit range of logical `i` (0-based).
    pub fn cluster_qubits(&self, i: usize) -> std::ops::Range<usize> {
        let s = self.clusters[i].start;
        s..s + self.p
    }
}

pub fn clustered_basis(code: &CcCode) -> LogicalBasis {
    let p = code.p;
    let n = code.n();
    let per = code.sector_size();
    let mut clusters = Vec::with_capacity(2 * per);
    let mut reps = Vec::with_capacity(2 * per);
    for (s, sector) in [Sector::Left, Sector::Right].into_iter().enumerate() {
        for c in 0..per {
            let start = (s * per + c) * p;
            clusters.push(Cluster { sector, position: c + 1, a_index: c / code.n_b, b_index: c % code.n_b, start });
            reps.push(BitVec::from_indices(n, start..start + p));
        }
    }
    LogicalBasis { n, p, x_reps: reps.clone(), z_reps: reps, clusters }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ClusterReport {
    pub ok: bool,
    pub violations: Vec<String>,
}

fn is_full_cluster(v: &BitVec, p: usize) -> Option<usize> {
    let ones: Vec<usize> = v.ones().collect();
    if ones.len() != p || !ones[0].is_multiple_of(p) {
        return None;
    }
    ones.windows(2).all(|w| w[1] == w[0] + 1).then_some(ones[0] / p)
}

/// Checks cluster support, pairing, disjointness and logical membership.
pub fn verify_clustered(basis: &LogicalBasis, code: &CcCode) -> ClusterReport {
    let p = basis.p;
    let mut v = Vec::new();
    let k = basis.k();
    if k != code.k() {
        v.push(format!("basis has {k} logicals but k = {}", code.k()));
    }
    if basis.z_reps.len() != k {
        v.push("X and Z rep counts differ".into());
    }
    for (kind, reps) in [("X", &basis.x_reps), ("Z", &basis.z_reps)] {
        for (i, r) in reps.iter().enumerate() {
            if is_full_cluster(r, p).is_none() {
                v.push(format!("{kind}{} is not a full cluster", i + 1));
            }
            for j in 0..i {
                if reps[j].ones().any(|q| r.get(q)) {
                    v.push(format!("{kind}{} and {kind}{} overlap", j + 1, i + 1));
                }
            }
        }
    }
    for (i, x) in basis.x_reps.iter().enumerate() {
        let mut partners = 0;
        for (j, z) in basis.z_reps.iter().enumerate() {
            let overlap = x.ones().filter(|&q| z.get(q)).count();
            if overlap != 0 && overlap != p {
                v.push(format!("X{} and Z{} overlap partially", i + 1, j + 1));
            }
            if x.dot(z) {
                partners += 1;
                if i != j {
                    v.push(format!("X{} anticommutes with Z{}", i + 1, j + 1));
                }
            }
        }
        if partners != 1 {
            v.push(format!("X{} anticommutes with {partners} Z reps", i + 1));
        }
    }
    let sx = RowSpan::new(&code.css.bhx);
    let sz = RowSpan::new(&code.css.bhz);
    for (i, x) in basis.x_reps.iter().enumerate() {
        if !code.css.bhz.mul_vec(x).is_zero() {
            v.push(format!("X{} violates a Z check", i + 1));
        }
        if sx.contains(x) {
            v.push(format!("X{} is a stabilizer", i + 1));
        }
    }
    for (i, z) in basis.z_reps.iter().enumerate() {
        if !code.css.bhx.mul_vec(z).is_zero() {
            v.push(format!("Z{} violates an X check", i + 1));
        }
        if sz.contains(z) {
            v.push(format!("Z{} is a stabilizer", i + 1));
        }
    }
    ClusterReport { ok: v.is_empty(), violations: v }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{builtin, seed_labels};

    #[test]
    fn every_bundled_code_is_clustered() {
        for label in seed_labels() {
            let code = builtin(label).unwrap();
            let b = clustered_basis(&code);
            let rep = verify_clustered(&b, &code);
            assert!(rep.ok, "{label}: {:?}", rep.violations);
            assert_eq!(b.clusters.len() * b.p, code.n());
        }
    }

    #[test]
    fn stabilizer_multiplied_rep_fails() {
        let code = builtin("24_8_3").unwrap();
        let mut b = clustered_basis(&code);
        b.x_reps[0].xor_assign(&code.css.bhx.row(0));
        assert!(!verify_clustered(&b, &code).ok);
    }

    #[test]
    fn small_example_supports() {
        let code = builtin("12_4_3").unwrap();
        let b = clustered_basis(&code);
        assert_eq!(b.z_reps[0].to_string(), "111000000000");
        assert_eq!(b.z_reps[3].to_string(), "000000000111");
    }
}
