use ccsurgery::gadget::{simplified_global_hadamard, verify_automorphisms, verify_cz_s, verify_h_swap};

fn main() -> ccsurgery::Result<()> {
    let czs = verify_cz_s()?;
    println!("CZ-S: H_X A H_X^* = 0 {}, action {} ({:?})", czs.identity_zero, czs.action.symplectic_matches, czs.action.sign_level);
    let hs = verify_h_swap()?;
    println!("H-SWAP: {:?} {:?}", hs.observed, hs.sign_level);
    for a in verify_automorphisms()? {
        println!("{}: {:?}", a.name, a.observed);
    }
    let g = simplified_global_hadamard()?;
    println!("H^8 from H-SWAP and automorphisms: {}", g.physical_composition_is_hall);
    println!("printed H^8 word acts as {:?}", g.printed_word.observed);
    Ok(())
}
