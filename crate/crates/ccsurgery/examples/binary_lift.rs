use ccsurgery::ring::RingMatrix;

fn main() -> ccsurgery::Result<()> {
    let m = RingMatrix::parse(3, &[vec!["1", "1+x"], vec!["x^2", "x+x^2"]])?;
    println!("M* = {:?}", m.conj_transpose().to_strings());
    println!("B(M):");
    for row in m.binary_lift().to_rows_string() {
        println!("  {row}");
    }
    println!("B(M*) = B(M)^T: {}", m.conj_transpose().binary_lift() == m.binary_lift().transpose());
    Ok(())
}
