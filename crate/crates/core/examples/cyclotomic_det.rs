//! Exact scalars in Q(zeta_p) and fraction-free determinants.

use cuspidal_whittaker::cycnum::{exact_det, psi, CycMatrix, CycScalar};
use cuspidal_whittaker::fqlaurent::PrimeField;

fn main() -> cuspidal_whittaker::error::Result<()> {
    let p = 5;
    let z = psi(PrimeField::new(p, 1));
    println!("psi(1) = {z}");
    println!("psi(1) * psi(4) = {}", &z * &psi(PrimeField::new(p, 4)));
    let gauss = PrimeField::elements(p).fold(CycScalar::zero(p), |acc, x| &acc + &psi(x));
    println!("sum of psi over F_5 = {gauss}");
    println!("1 / (1 + zeta) = {}", (&CycScalar::one(p) + &z).inv()?);

    // the character table of F_5 is a Vandermonde matrix in zeta
    let rows = (0..p as i64)
        .map(|a| (0..p as i64).map(|b| CycScalar::zeta_pow(p, a * b)).collect())
        .collect();
    let table = CycMatrix::from_rows(p, rows)?;
    let det = exact_det(&table)?;
    println!("det of the character table = {det}");
    println!("as JSON: {}", det.to_json());

    let small = CycMatrix::from_int_rows(2, &[&[1, 1], &[1, -1]]);
    println!("det [[1,1],[1,-1]] = {}", exact_det(&small)?);
    Ok(())
}
