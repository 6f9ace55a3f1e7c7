use ccsurgery::codes::{builtin, seed_labels};

fn main() -> ccsurgery::Result<()> {
    for label in seed_labels() {
        let code = builtin(label)?;
        let p = code.css.params();
        println!("{label:>10}: N={:3} k={:2} W={} p={} n_a={} n_b={}", p.n, p.k, p.w_max, code.p, code.n_a, code.n_b);
    }
    Ok(())
}
