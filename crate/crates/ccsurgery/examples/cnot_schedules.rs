use ccsurgery::gadget::{run_all_schedules, verify_cz_s};

fn main() -> ccsurgery::Result<()> {
    println!("CZ-S sign level: {:?}", verify_cz_s()?.action.sign_level);
    for r in run_all_schedules()? {
        println!(
            "{:6} {:?} words={:?} ({}) branches={} failed={} final={:?} restore={} passed={}",
            r.id, r.cnots, r.words, r.words_source, r.branches, r.failed_branches, r.final_arrangement, r.restore_word, r.passed
        );
        for f in &r.frame_rules {
            println!("    {} <- {:?} const={}", f.correction, f.parity_of, f.constant);
        }
        if !r.realized_instead.is_empty() {
            println!("    realizes instead: {:?}", r.realized_instead);
        }
    }
    Ok(())
}
