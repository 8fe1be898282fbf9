//! Reducing upper triangular elements to the representatives R_{n,k}.

use cuspidal_whittaker::fqlaurent::parse_series;
use cuspidal_whittaker::group::BorelForm;
use cuspidal_whittaker::model::enumerate_representatives;
use cuspidal_whittaker::orbits::{
    reduce_to_representative, relevance_bruteforce, relevance_closed_form, LevelParams, Reduction,
};

fn main() -> cuspidal_whittaker::error::Result<()> {
    let p = 3;
    let level = LevelParams::new(p, 3, 1)?;
    let reps = enumerate_representatives(&level);
    println!("|R_(1,3)| at p = 3: {}", reps.len());

    for (a, b) in [("t+t^2", "t^-1"), ("t", "2 + t^5"), ("t", "t^-1"), ("2*t", "0")] {
        let g = BorelForm::new(parse_series(a, p, 8)?, parse_series(b, p, 8)?)?;
        print!("[[{a}, {b}], [0, 1]]: ");
        match reduce_to_representative(&g, &level)? {
            Reduction::Relevant { rep, corrector } => {
                println!("{rep}, corrector {}", corrector.reassemble())
            }
            Reduction::Irrelevant => println!("irrelevant"),
        }
        println!(
            "  relevant by closed form {}, by brute force {}",
            relevance_closed_form(&g, level.k)?,
            relevance_bruteforce(&g, &level)?
        );
    }
    Ok(())
}
