//! The matrix of phi on the delta basis against the closed-form kernel.

use std::env;

use cuspidal_whittaker::model::{kernel_matrix, phi_matrix};
use cuspidal_whittaker::orbits::LevelParams;

fn main() -> cuspidal_whittaker::error::Result<()> {
    let args: Vec<i64> = env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (p, k, n) = match args[..] {
        [p, k, n] => (p as u32, k as u32, n),
        _ => (2, 2, 0),
    };
    let level = LevelParams::new(p, k, n)?;
    let phi = phi_matrix(&level)?;
    let kernel = kernel_matrix(&level)?;
    print!("{}", phi.to_csv());
    println!("phi == kernel: {}", phi.entries == kernel.entries);
    for (a, det) in phi.block_dets()? {
        println!("det of block a = {a}: {det}");
    }
    Ok(())
}
