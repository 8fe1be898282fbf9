//! Sections, the Whittaker functional and torus translation.

use cuspidal_whittaker::fqlaurent::PrimeField;
use cuspidal_whittaker::model::{
    enumerate_representatives, enumerate_torus_classes, phi_apply, torus_translate,
    whittaker_functional, whittaker_functional_integral, SectionVector, TorusClass,
};
use cuspidal_whittaker::orbits::LevelParams;

fn main() -> cuspidal_whittaker::error::Result<()> {
    let level = LevelParams::new(3, 2, 0)?;
    let reps = enumerate_representatives(&level);
    for m in &reps {
        let f = SectionVector::delta(&level, m)?;
        println!(
            "delta {m}: average over U(O) {}, over U(K) {}",
            whittaker_functional_integral(&f)?,
            whittaker_functional(&f)?
        );
    }

    let y = TorusClass {
        n: 1,
        a_lead: PrimeField::new(3, 2),
        unit_tail: vec![PrimeField::new(3, 1)],
    };
    let f = SectionVector::delta(&level, &reps[4])?;
    let moved = torus_translate(&f, &y)?;
    println!("translating by {y} moves block {} to block {}", level.n, moved.level.n);
    for x in enumerate_torus_classes(&moved.level) {
        let lhs = phi_apply(&moved, &x)?;
        let rhs = phi_apply(&f, &y.mul(&x)?)?;
        println!("  x = {x}: phi(y.f)(x) = {lhs}, phi(f)(yx) = {rhs}");
    }
    Ok(())
}
