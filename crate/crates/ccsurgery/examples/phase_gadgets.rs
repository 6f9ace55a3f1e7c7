use ccsurgery::gadget::{verify_sisj_gadget, DATA};

fn main() -> ccsurgery::Result<()> {
    for &i in &DATA {
        for &j in &DATA {
            if i != j {
                let r = verify_sisj_gadget(i, j)?;
                println!("{:12} {:5} {}", r.realized, r.passed, r.plan.join(", "));
            }
        }
    }
    Ok(())
}
