use std::time::Instant;

use ccsurgery::clifford::{
    generation_check, standard_generators, synthesize_hi, synthesize_s1, verify_ppm_cnot, Gate,
    SymplecticOp,
};
use ccsurgery::codes::{builtin, hypergraph_product, CcCode};
use ccsurgery::distance::{exhaustive_distance, exhaustive_min_weight, randomized_distance, LogicalProblem, DEFAULT_BUDGET};
use ccsurgery::gadget;
use ccsurgery::gf2::BitMatrix;
use ccsurgery::logical::{clustered_basis, verify_clustered};
use ccsurgery::ring::{RingElem, RingMatrix};
use ccsurgery::surgery::{
    block_kernel_dim, ft_scan, merge_complex, merged_counts, overhead_report, ConnectionCode, FtScanOptions, MergeKind,
    ScanMode,
};
use ccsurgery::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TABLE_CODES: [(&str, usize); 10] = [
    ("24_8_3", 3),
    ("40_8_5", 5),
    ("56_8_7", 7),
    ("88_8_10", 10),
    ("104_8_11", 11),
    ("136_8_14", 14),
    ("54_18_3", 3),
    ("90_18_5", 5),
    ("126_18_7", 7),
    ("198_18_10", 10),
];

type Check = Result<(bool, String)>;

fn lift_fidelity() -> Check {
    let m = RingMatrix::parse(3, &[vec!["1", "1+x"], vec!["x^2", "x+x^2"]])?;
    let printed = BitMatrix::from_rows(&["100110", "010011", "001101", "001011", "100101", "010110"]);
    let printed_t = BitMatrix::from_rows(&["100010", "010001", "001100", "101011", "110101", "011110"]);
    let star = RingMatrix::parse(3, &[vec!["1", "x"], vec!["1+x^2", "x+x^2"]])?;
    let mut ok = m.binary_lift() == printed && m.binary_lift().transpose() == printed_t && m.conj_transpose() == star;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut bad = 0;
    for t in 0..1000 {
        let l = [3, 5, 7, 11, 13, 17][t % 6];
        let (r, c) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let a = RingMatrix::random(l, r, c, &mut rng);
        if a.conj_transpose().binary_lift() != a.binary_lift().transpose() {
            bad += 1;
        }
    }
    ok &= bad == 0;
    Ok((ok, format!("printed 6x6 lift and transpose reproduced; {bad} mismatches in 1000 random B(M*) = B(M)^T")))
}

fn code_parameters() -> Check {
    let mut ok = true;
    let mut rows = Vec::new();
    for (label, _) in TABLE_CODES {
        let code = builtin(label)?;
        let rank_k = code.css.n - code.css.bhx.rank() - code.css.bhz.rank();
        let p = code.css.params();
        let good = p.n == 2 * code.p * code.n_a * code.n_b && rank_k == 2 * code.n_a * code.n_b && p.k == rank_k && p.w_max == 8;
        ok &= good;
        rows.push(format!("[[{},{}]] W={}", p.n, rank_k, p.w_max));
    }
    Ok((ok, rows.join(" ")))
}

fn exhaustive_distances() -> Check {
    let mut ok = true;
    let mut rows = Vec::new();
    for label in ["24_8_3", "40_8_5", "56_8_7", "54_18_3", "90_18_5"] {
        let code = builtin(label)?;
        let d = label_d(label);
        let e = exhaustive_distance(&code.css, d)?;
        let good = e.d_x_est == Some(d) && e.d_z_est == Some(d) && e.exhaustive;
        ok &= good;
        rows.push(format!("{label}: {:?}", e.d()));
    }
    Ok((ok, rows.join(", ")))
}

fn label_d(label: &str) -> usize {
    TABLE_CODES.iter().find(|(l, _)| *l == label).map(|(_, d)| *d).unwrap()
}

fn randomized_distances() -> Check {
    let mut ok = true;
    let mut rows = Vec::new();
    for label in ["88_8_10", "104_8_11", "136_8_14", "126_18_7", "198_18_10"] {
        let code = builtin(label)?;
        let est = randomized_distance(&code.css, 100_000, 2024);
        let d = est.d();
        let note = match d {
            Some(x) if x == label_d(label) => "",
            Some(x) if x < label_d(label) => " (smaller than listed)",
            _ => " (larger; more trials needed)",
        };
        ok &= d == Some(label_d(label));
        rows.push(format!("{label}: {d:?}{note}"));
    }
    Ok((ok, rows.join(", ")))
}

fn clustered_bases() -> Check {
    let mut ok = true;
    for (label, _) in TABLE_CODES {
        let code = builtin(label)?;
        let b = clustered_basis(&code);
        let rep = verify_clustered(&b, &code);
        let weights = b.x_reps.iter().chain(&b.z_reps).all(|v| v.weight() == code.p);
        let pairing = (0..b.k()).all(|i| (0..b.k()).all(|j| b.x_reps[i].dot(&b.z_reps[j]) == (i == j)));
        ok &= rep.ok && weights && pairing;
    }
    Ok((ok, "all 10 codes: weight-p cluster representatives, identity pairing".into()))
}

fn c24() -> Result<CcCode> {
    builtin("24_8_3")
}

fn index_of(code: &CcCode, a: &[&str], b: &[&str]) -> Result<u64> {
    let (a, b) = (BitMatrix::from_rows(a), BitMatrix::from_rows(b));
    for i in 0..ConnectionCode::count_for(code) {
        let c = ConnectionCode::from_index(code, i)?;
        if c.a_pattern() == a && c.b_pattern() == b {
            return Ok(i);
        }
    }
    unreachable!("every 0/1 pattern has an index")
}

fn example_one() -> Check {
    let code = c24()?;
    let conn = ConnectionCode::from_patterns(3, &BitMatrix::identity(2), &BitMatrix::identity(2))?;
    let rep = merged_counts(&code, &conn, MergeKind::Z)?;
    let targets: Vec<Vec<usize>> = rep.targets.iter().map(|t| t.logicals.clone()).collect();
    let mut ok = (rep.m, rep.k_tilde, rep.r_tilde) == (4, 4, 4) && targets == [vec![1, 5], vec![2, 6], vec![3, 7], vec![4, 8]];
    // Row 2 of (H_Z' | H_Z) as printed, and its product with chi.
    let printed = RingMatrix::parse(
        3,
        &[vec!["0", "1", "0", "0", "0", "1", "0", "0", "x+x^2", "1+x^2", "0", "0", "0", "1+x", "0", "1+x^2"]],
    )?;
    let block = conn.hz_prime.hstack(&code.css.hz)?;
    let row = RingMatrix::from_elems(3, vec![(0..16).map(|c| block.get(1, c)).collect()])?;
    ok &= row == printed;
    let chi = RingElem::chi(3);
    let times: Vec<RingElem> = (0..16).map(|c| row.get(0, c).try_mul(&chi)).collect::<Result<_>>()?;
    let want: Vec<RingElem> = (0..16).map(|c| if c == 1 || c == 5 { chi } else { RingElem::zero(3) }).collect();
    ok &= times == want;
    let opts = FtScanOptions {
        d: 3,
        mode: ScanMode::Exhaustive,
        trials: 0,
        seed: 0,
        connections: Some(vec![index_of(&code, &["10", "01"], &["10", "01"])?]),
    };
    let scan = ft_scan(&code, &opts)?;
    ok &= scan.min_d_tilde == Some(3);
    Ok((
        ok,
        format!(
            "M={} k~={} r~={} d~={:?}; targets {:?}; chi * row 2 = chi e_2 + chi e_6",
            rep.m, rep.k_tilde, rep.r_tilde, scan.min_d_tilde, targets
        ),
    ))
}

fn examples_two_three() -> Check {
    let code = c24()?;
    let two = ConnectionCode::from_patterns(3, &BitMatrix::zeros(2, 2), &BitMatrix::identity(2))?;
    let r2 = merged_counts(&code, &two, MergeKind::Z)?;
    let t2: Vec<Vec<usize>> = r2.targets.iter().map(|t| t.logicals.clone()).collect();
    let three = ConnectionCode::from_patterns(3, &BitMatrix::from_rows(&["10", "10"]), &BitMatrix::zeros(2, 2))?;
    let r3 = merged_counts(&code, &three, MergeKind::Z)?;
    let ok = r2.m == 4 && t2 == [vec![1], vec![2], vec![3], vec![4]] && (r3.m, r3.k_tilde, r3.r_tilde) == (2, 6, 6);
    Ok((ok, format!("Ex.2 M={} targets {t2:?}; Ex.3 M={} k~={} r~={}", r2.m, r3.m, r3.k_tilde, r3.r_tilde)))
}

fn ft_scans() -> Check {
    let mut ok = true;
    let mut rows = Vec::new();
    for (label, mode) in [
        ("24_8_3", ScanMode::Exhaustive),
        ("40_8_5", ScanMode::Exhaustive),
        ("56_8_7", ScanMode::Randomized),
        ("88_8_10", ScanMode::Randomized),
        ("104_8_11", ScanMode::Randomized),
        ("136_8_14", ScanMode::Randomized),
    ] {
        let t = Instant::now();
        let code = builtin(label)?;
        let opts = FtScanOptions { d: label_d(label), mode, trials: 10_000, seed: 7, connections: None };
        let rep = ft_scan(&code, &opts)?;
        ok &= rep.passed == rep.total && rep.total == 256;
        rows.push(format!("{label} {}/{} ({:.0}s)", rep.passed, rep.total, t.elapsed().as_secs_f64()));
    }
    Ok((ok, rows.join(", ")))
}

fn block_kernel_lemma() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut bad = 0;
    for _ in 0..200 {
        let (r, c) = (rng.gen_range(1..=12), rng.gen_range(1..=12));
        let a = BitMatrix::random(r, c, &mut rng);
        let b = BitMatrix::random(r, c, &mut rng);
        let full = BitMatrix::block2x2(Some(&a), Some(&b), None, Some(&a))?;
        if block_kernel_dim(&a, &b)? != full.nullity() {
            bad += 1;
        }
    }
    Ok((bad == 0, format!("200 random pairs, {bad} mismatches against the block-matrix kernel")))
}

fn min_z_weight(check: &BitMatrix, stab: &BitMatrix, cap: usize) -> Result<Option<usize>> {
    Ok(exhaustive_min_weight(&LogicalProblem::new(check, stab), cap, false, DEFAULT_BUDGET)?.weight)
}

fn hgp_distance_preserved() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut tested, mut violations, mut attempts) = (0, 0, 0);
    while tested < 60 && attempts < 10_000 {
        attempts += 1;
        let (ma, na, mb, nb) = (rng.gen_range(1..=3), rng.gen_range(2..=5), rng.gen_range(1..=3), rng.gen_range(2..=5));
        let ha = BitMatrix::random(ma, na, &mut rng);
        let hb = BitMatrix::random(mb, nb, &mut rng);
        let code = hypergraph_product(&ha, &hb)?;
        if code.k == 0 || code.n > 40 {
            continue;
        }
        let Some(dz) = min_z_weight(&code.bhx, &code.bhz, code.n)? else { continue };
        let conn =
            ConnectionCode::from_patterns(1, &BitMatrix::random(ma, na, &mut rng), &BitMatrix::random(mb, nb, &mut rng))?;
        let merged = merge_complex(&code, &conn, MergeKind::Z)?;
        tested += 1;
        if dz > 1 && min_z_weight(&merged.css.bhx, &merged.css.bhz, dz - 1)?.is_some() {
            violations += 1;
        }
    }
    Ok((tested >= 50 && violations == 0, format!("{tested} random HGP merges, {violations} with merged d_Z below data d_Z")))
}

fn overhead() -> Check {
    let code = builtin("136_8_14")?;
    let o = overhead_report(&code, 14, 4)?;
    let ok = (o.space, o.data_aux, o.check_aux, o.time_per_merge, o.spacetime) == (272, 136, 136, 3.5, 952.0);
    Ok((ok, format!("space {} ({}, {}), time {}, spacetime {}", o.space, o.data_aux, o.check_aux, o.time_per_merge, o.spacetime)))
}

fn boost() -> Check {
    let r = ccsurgery::surgery::boost_census(&c24()?)?;
    Ok((
        r.total == 7192,
        format!(
            "total {}; boostable {} vs reference {} ({}; predicate: {}; variants {:?})",
            r.total,
            r.boostable,
            r.reference,
            if r.agrees { "agrees" } else { "differs" },
            r.predicate,
            r.variants
        ),
    ))
}

fn clifford_small() -> Check {
    let m3 = generation_check(3, &standard_generators(3, true), 4_000_000)?;
    let m2 = generation_check(2, &standard_generators(2, true), 4_000_000)?;
    let (_, s1) = synthesize_s1(3)?;
    let c_sum = s1.c_matrices.iter().try_fold(BitMatrix::zeros(3, 3), |acc, c| acc.add(c))?;
    let mut e11 = BitMatrix::zeros(3, 3);
    e11.set(0, 0, true);
    let h1 = SymplecticOp::of_word(&synthesize_hi(0, 3)?, 3)? == SymplecticOp::of_gate(Gate::H(0), 3)?;
    let ok = m3.order == 1_451_520 && m3.full && m2.order < 720 && c_sum == e11 && s1.c_sum_is_e11 && s1.action_matches && h1;
    Ok((ok, format!("m=3 closure {}, m=2 closure {} < 720, C1+C2+C3 = E11 {}, S_1 {}, H_1 {h1}", m3.order, m2.order, c_sum == e11, s1.action_matches)))
}

fn ppm_cnot() -> Check {
    let r = verify_ppm_cnot();
    let ok = r.failures.is_empty() && r.choi_ok && r.inputs_checked == 36;
    Ok((ok, format!("{} stabilizer inputs x {} outcome branches, {} failures, Choi state {}", r.inputs_checked, r.branches_per_input, r.failures.len(), r.choi_ok)))
}

fn gadget_suite() -> Check {
    let czs = gadget::verify_cz_s()?;
    let hs = gadget::verify_h_swap()?;
    let auts = gadget::verify_automorphisms()?;
    let schedules = gadget::run_all_schedules()?;
    let toolbox = gadget::clifford_toolbox_certificate()?;
    let failed: Vec<String> = schedules
        .iter()
        .filter(|r| !r.passed || r.aux_cost != 48)
        .map(|r| format!("{} (realizes {})", r.id, r.realized_instead.join(" | ")))
        .collect();
    let ok = czs.identity_zero
        && czs.action.passed()
        && hs.passed()
        && auts.iter().all(|a| a.passed())
        && failed.is_empty()
        && toolbox.passed;
    Ok((
        ok,
        format!(
            "CZ-S identity {}, CZ-S/H-SWAP/Aut actions {}, {}/{} schedules verified{}, toolbox {}",
            czs.identity_zero,
            czs.action.passed() && hs.passed() && auts.iter().all(|a| a.passed()),
            schedules.len() - failed.len(),
            schedules.len(),
            if failed.is_empty() { String::new() } else { format!(" (failing: {})", failed.join(", ")) },
            toolbox.passed
        ),
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 15] = [
        ("binary lift fidelity", lift_fidelity),
        ("code parameters", code_parameters),
        ("exhaustive distances", exhaustive_distances),
        ("randomized distances", randomized_distances),
        ("clustered bases", clustered_bases),
        ("identity merge example", example_one),
        ("single and partial merge examples", examples_two_three),
        ("merged-code distance scan", ft_scans),
        ("block kernel lemma", block_kernel_lemma),
        ("HGP distance preservation", hgp_distance_preserved),
        ("overhead formulas", overhead),
        ("boost census", boost),
        ("Clifford closure and synthesis", clifford_small),
        ("PPM-based CNOT", ppm_cnot),
        ("[[24,8,3]] gadget suite", gadget_suite),
    ];
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut passed = 0;
    let mut run = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let n = i + 1;
        if only.as_ref().is_some_and(|o| !o.contains(&n)) {
            continue;
        }
        run += 1;
        let t = Instant::now();
        let (ok, detail) = match f() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        passed += ok as usize;
        println!(
            "criterion {n:2} {}: {name}: {detail} [{:.1}s]",
            if ok { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {passed}/{run} criteria passed");
}
