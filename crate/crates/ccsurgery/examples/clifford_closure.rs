use ccsurgery::clifford::{generation_check, standard_generators, synthesize_s1, word_to_string};

fn main() -> ccsurgery::Result<()> {
    for m in 1..=3 {
        let r = generation_check(m, &standard_generators(m, true), 4_000_000)?;
        println!("m={m}: closure {} of |Sp({},2)| = {}", r.order, 2 * m, r.target);
    }
    let (w, rep) = synthesize_s1(3)?;
    println!("S_1 = {}", word_to_string(&w));
    println!("C_1+C_2+C_3 = E_11: {}, action matches: {}", rep.c_sum_is_e11, rep.action_matches);
    Ok(())
}
