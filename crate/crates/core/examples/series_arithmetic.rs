//! Laurent series over F_p with per-element precision.

use cuspidal_whittaker::fqlaurent::parse_series;

fn main() -> cuspidal_whittaker::error::Result<()> {
    let p = 3;
    let x = parse_series("t^-1 + 2*t", p, 8)?;
    let y = parse_series("1 + t", p, 8)?;
    println!("x = {x}, val {:?}", x.valuation()?);
    println!("y = {y}");
    println!("x + y = {}", &x + &y);
    println!("x * y = {}", &x * &y);

    // exact monomials invert exactly, everything else to the session precision
    println!("1/x = {}", x.inv()?);
    println!("1/t^2 = {}", parse_series("t^2", p, 8)?.inv()?);
    let q = x.checked_div(&y)?;
    println!("x / y = {q}");
    println!("coefficient of t^0 in x / y: {}", q.coeff(0)?);
    println!("low part below t^1: {}", q.low_part(1)?);

    // coefficients reduce mod p
    println!("\"3*t^2\" at p = 3 is exact zero: {}", parse_series("3*t^2", p, 8)?.is_exact_zero());
    Ok(())
}
