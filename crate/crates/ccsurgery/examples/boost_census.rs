use ccsurgery::codes::builtin;
use ccsurgery::surgery::boost_census;

fn main() -> ccsurgery::Result<()> {
    let rep = boost_census(&builtin("24_8_3")?)?;
    println!("configurations {}, boostable {} (reference {})", rep.total, rep.boostable, rep.reference);
    for (name, n) in &rep.variants {
        println!("  {name}: {n}");
    }
    Ok(())
}
