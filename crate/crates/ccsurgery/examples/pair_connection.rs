use ccsurgery::codes::builtin;
use ccsurgery::surgery::{merge_targets, pair_connection, MergeKind};

fn main() -> ccsurgery::Result<()> {
    let code = builtin("24_8_3")?;
    for (a, b) in [(1, 5), (2, 6), (1, 2), (3, 8)] {
        match pair_connection(&code, a, b) {
            Ok(c) => {
                let t: Vec<_> = merge_targets(&code, &c, MergeKind::Z)?.into_iter().map(|t| t.logicals).collect();
                println!("({a},{b}): H_a'={:?} H_b'={:?} targets {t:?}", c.a_pattern().to_rows_string(), c.b_pattern().to_rows_string());
            }
            Err(e) => println!("({a},{b}): {e}"),
        }
    }
    Ok(())
}
