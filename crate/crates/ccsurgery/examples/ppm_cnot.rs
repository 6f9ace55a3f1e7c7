use ccsurgery::clifford::verify_ppm_cnot;

fn main() {
    let r = verify_ppm_cnot();
    println!(
        "{} product inputs x {} branches: {} failures; Choi check {}",
        r.inputs_checked,
        r.branches_per_input,
        r.failures.len(),
        r.choi_ok
    );
}
