use ccsurgery::codes::builtin;
use ccsurgery::surgery::overhead_report;

fn main() -> ccsurgery::Result<()> {
    for (label, d) in [("24_8_3", 3), ("136_8_14", 14)] {
        let code = builtin(label)?;
        let o = overhead_report(&code, d, code.k() / 2)?;
        println!("{label}: space {} ({}+{}), time {}, spacetime {}", o.space, o.data_aux, o.check_aux, o.time_per_merge, o.spacetime);
    }
    Ok(())
}
