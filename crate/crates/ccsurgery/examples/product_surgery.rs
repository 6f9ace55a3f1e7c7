use ccsurgery::codes::builtin;
use ccsurgery::surgery::{identity_connection, merged_counts, surgery_trace, MergeKind};

fn main() -> ccsurgery::Result<()> {
    let code = builtin("24_8_3")?;
    let conn = identity_connection(&code)?;
    let rep = merged_counts(&code, &conn, MergeKind::Z)?;
    println!("M={} k~={} r~={} n~={}", rep.m, rep.k_tilde, rep.r_tilde, rep.n_tilde);
    for t in &rep.targets {
        println!("row {}: Z on logicals {:?}", t.row, t.logicals);
    }
    for s in surgery_trace(&code.css, &conn, 3)?.stages {
        println!("{}: H_X {}x{}, H_Z {}x{}", s.label, s.hx.rows(), s.hx.cols(), s.hz.rows(), s.hz.cols());
    }
    Ok(())
}
