//! Stabilizer characters on the I^0 x I^0 double cosets.

use cuspidal_whittaker::orbits::double_coset_scan;

fn main() -> cuspidal_whittaker::error::Result<()> {
    let report = double_coset_scan(2, -2, 2, 3, 8)?;
    for r in &report.points {
        println!(
            "{:<22} stabilizer {:>4}, nontrivial {:>4}{}",
            r.point.to_string(),
            r.stabilizer_size,
            r.nontrivial,
            if r.passes { "  <- passes" } else { "" }
        );
    }
    let set: Vec<String> = report.pass_set.iter().map(ToString::to_string).collect();
    println!("A x A pass-set: {}", set.join(", "));
    Ok(())
}
