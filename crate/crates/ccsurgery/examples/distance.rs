use ccsurgery::codes::builtin;
use ccsurgery::distance::{exhaustive_distance, randomized_distance};

fn main() -> ccsurgery::Result<()> {
    let code = builtin("40_8_5")?;
    let e = exhaustive_distance(&code.css, 5)?;
    println!("[[40,8,5]] exhaustive: d_X={:?} d_Z={:?}", e.d_x_est, e.d_z_est);
    let code = builtin("88_8_10")?;
    let r = randomized_distance(&code.css, 20_000, 7);
    println!("[[88,8,10]] randomized ({} trials): d <= {:?}, n_bar = {}", r.trials, r.d(), r.n_bar_z);
    Ok(())
}
