//! Writing elements of PGL_2(F_p((t))) as (upper triangular) * (element of A).

use cuspidal_whittaker::group::{a_factor, chi_eval, GroupElem, SigmaSign};
use cuspidal_whittaker::orbits::decompose_ba;

fn main() -> cuspidal_whittaker::error::Result<()> {
    let p = 3;
    for text in ["t^2+t^3;1+t^-1;0;2", "1;1;t;1", "t;1;t;0", "1+t;t^-1;t^-1;t^3"] {
        let g = GroupElem::parse(text, p, 8)?;
        let (b, a) = decompose_ba(&g)?;
        let back = b.to_matrix().mul_raw(&a.reassemble());
        println!("g = {g}");
        println!("  b = {}", b.to_matrix());
        println!("  a = sigma^{} * {}", a.sigma_power, a.iwahori.reassemble());
        println!("  chi(a) = {}", chi_eval(&a, SigmaSign::Plus)?);
        println!("  b * a == g: {}", back.projectively_eq(&g));
    }

    let sigma = GroupElem::sigma(p, 8);
    let factored = a_factor(&sigma)?.expect("sigma lies in A");
    println!("sigma factors with sigma_power {}", factored.sigma_power);
    Ok(())
}
