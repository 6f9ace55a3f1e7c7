use ccsurgery::gadget::clifford_toolbox_certificate;

fn main() -> ccsurgery::Result<()> {
    let c = clifford_toolbox_certificate()?;
    for g in &c.generators {
        println!("{:14} {:5} {}", g.generator, g.verified, g.realization);
    }
    println!("S_1 synthesis: {}  H_i synthesis: {}", c.phase_synthesis_ok, c.hadamard_synthesis_ok);
    println!(
        "m=3 closure: {} of {} (without S_i S_j^dagger: {})",
        c.restricted_m3.order, c.restricted_m3.target, c.restricted_m3_without_phase_pairs.order
    );
    println!("certificate passed: {}", c.passed);
    Ok(())
}
