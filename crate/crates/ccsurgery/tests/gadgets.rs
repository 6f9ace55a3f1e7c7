use ccsurgery::gadget::{
    arrangement_group, run_cnot_schedule, simplified_global_hadamard, verify_automorphisms, verify_cz_s,
    verify_h_swap, verify_sisj_gadget,
};

#[test]
fn fold_and_automorphism_gates() {
    let czs = verify_cz_s().unwrap();
    assert!(czs.identity_zero && czs.squared_is_identity && czs.action.passed());
    assert!(verify_h_swap().unwrap().passed());
    for aut in verify_automorphisms().unwrap() {
        assert!(aut.passed(), "{}", aut.name);
    }
    let h = simplified_global_hadamard().unwrap();
    assert!(h.logical_composition_is_hall && h.physical_composition_is_hall && h.squared_is_identity);
}

#[test]
fn arrangement_group_order() {
    assert_eq!(arrangement_group().len(), 32);
}

#[test]
fn schedules_over_all_branches() {
    for id in ["62x84", "64x82", "42x86", "24x68", "2to4"] {
        let r = run_cnot_schedule(id).unwrap();
        assert!(r.passed, "{id}");
        assert_eq!(r.failed_branches, 0, "{id}");
        assert_eq!(r.branches, 1024, "{id}");
    }
    let r = run_cnot_schedule("86x24").unwrap();
    assert!(!r.passed);
}

#[test]
fn phase_pairs() {
    for (i, j) in [(2, 4), (4, 8), (2, 8)] {
        let r = verify_sisj_gadget(i, j).unwrap();
        assert!(r.passed, "S_{i} S_{j}^dagger");
        assert_eq!(r.failed_branches, 0);
    }
}
