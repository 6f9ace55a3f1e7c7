use ccsurgery::gf2::{BitMatrix, BitVec};
use ccsurgery::ring::{RingElem, RingMatrix};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn matrix(rows: usize, cols: usize, seed: u64) -> BitMatrix {
    BitMatrix::random(rows, cols, &mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #[test]
    fn rank_nullity(rows in 1usize..20, cols in 1usize..40, seed: u64) {
        let m = matrix(rows, cols, seed);
        prop_assert_eq!(m.rank() + m.nullity(), cols);
        let k = m.kernel_basis();
        prop_assert_eq!(k.rank(), m.nullity());
        for v in k.row_vecs() {
            prop_assert!(m.mul_vec(&v).is_zero());
        }
    }

    #[test]
    fn rank_is_transpose_invariant(rows in 1usize..20, cols in 1usize..20, seed: u64) {
        let m = matrix(rows, cols, seed);
        prop_assert_eq!(m.rank(), m.transpose().rank());
    }

    #[test]
    fn row_space_membership(rows in 1usize..12, cols in 1usize..30, seed: u64, pick: u16) {
        let m = matrix(rows, cols, seed);
        let mut v = BitVec::zeros(cols);
        for r in 0..rows {
            if pick >> (r % 16) & 1 == 1 {
                v.xor_assign(&m.row(r));
            }
        }
        prop_assert!(m.row_space_contains(&v).unwrap());
    }

    #[test]
    fn lift_is_a_ring_homomorphism(l in 1usize..18, a: u64, b: u64) {
        let mask = if l == 64 { u64::MAX } else { (1u64 << l) - 1 };
        let x = RingElem::new(l, a & mask);
        let y = RingElem::new(l, b & mask);
        let sum = x.try_add(&y).unwrap().lift();
        prop_assert_eq!(sum, x.lift().add(&y.lift()).unwrap());
        let prod = x.try_mul(&y).unwrap().lift();
        prop_assert_eq!(prod, x.lift().mul(&y.lift()).unwrap());
        prop_assert_eq!(x.involution().lift(), x.lift().transpose());
    }

    #[test]
    fn matrix_lift_respects_products(l in 1usize..8, r in 1usize..4, c in 1usize..4, s in 1usize..4, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = RingMatrix::random(l, r, c, &mut rng);
        let b = RingMatrix::random(l, c, s, &mut rng);
        let lhs = a.mul(&b).unwrap().binary_lift();
        prop_assert_eq!(lhs, a.binary_lift().mul(&b.binary_lift()).unwrap());
        prop_assert_eq!(a.conj_transpose().binary_lift(), a.binary_lift().transpose());
    }
}
