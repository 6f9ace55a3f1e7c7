use ccsurgery::codes::builtin;
use ccsurgery::logical::{clustered_basis, verify_clustered};

fn main() -> ccsurgery::Result<()> {
    let code = builtin("24_8_3")?;
    let basis = clustered_basis(&code);
    for i in 0..basis.k() {
        let q: Vec<usize> = basis.x_reps[i].ones().collect();
        println!("logical {}: X and Z on qubits {:?}", i + 1, q);
    }
    println!("{:?}", verify_clustered(&basis, &code));
    Ok(())
}
