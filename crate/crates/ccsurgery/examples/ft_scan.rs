use ccsurgery::codes::builtin;
use ccsurgery::surgery::{ft_scan, FtScanOptions, ScanMode};

fn main() -> ccsurgery::Result<()> {
    let code = builtin("24_8_3")?;
    let opts = FtScanOptions { d: 3, mode: ScanMode::Exhaustive, trials: 0, seed: 0, connections: None };
    let rep = ft_scan(&code, &opts)?;
    println!("{}/{} merged codes keep distance 3, min d~ = {:?}", rep.passed, rep.total, rep.min_d_tilde);
    Ok(())
}
