//! An independent evaluation of `phi` at `k = 2`, `n = 0` using plain
//! integer polynomial arithmetic, without the decomposition or reduction
//! code paths.
//!
//! For `x = a (1 + c t)` and `M = [[a, beta t^-1], [0, 1]]`,
//! `M^-1 [[x, x u], [0, 1]]` is proportional to `[[x, x u - beta t^-1], [0, a]]`,
//! which lies in `I^0` iff `x_0 = a` and `(x u)_-1 = beta`; its character is
//! then `psi(a^-1 (x u)_0)`. The sum runs over `u` in a domain strictly wider
//! than the support, so the truncation of `U(K)` is exercised too.

use num_bigint::BigInt;

use cuspidal_whittaker::cycnum::{exact_det, CycMatrix, CycScalar, RootTally, UnitRoot};
use cuspidal_whittaker::fqlaurent::PrimeField;
use cuspidal_whittaker::model::{kernel_matrix, phi_matrix};
use cuspidal_whittaker::orbits::LevelParams;

/// Coefficient of `t^deg` in `x u`, where `x = x0 + x1 t` and `u` has
/// digits `u[j]` at degree `low + j`.
fn product_coeff(p: i64, x: [i64; 2], u: &[i64], low: i64, deg: i64) -> i64 {
    let mut acc = 0;
    for (i, &xi) in x.iter().enumerate() {
        let j = deg - i as i64 - low;
        if j >= 0 && (j as usize) < u.len() {
            acc += xi * u[j as usize];
        }
    }
    acc.rem_euclid(p)
}

fn inv_mod(p: i64, a: i64) -> i64 {
    (1..p).find(|b| (a * b).rem_euclid(p) == 1).unwrap()
}

/// Rows `(a, c)` and columns `(a, beta)` in lexicographic order.
fn oracle_matrix(p: i64, depth: u32) -> CycMatrix {
    let low = -3i64;
    let len = depth as usize + 3; // digits from t^-3 up to t^(depth - 1)
    let labels: Vec<(i64, i64)> = (1..p).flat_map(|a| (0..p).map(move |c| (a, c))).collect();
    let mut rows = Vec::new();
    for &(a, c) in &labels {
        let x = [a, (a * c).rem_euclid(p)];
        let mut tallies = vec![RootTally::new(p as u32); labels.len()];
        let mut u = vec![0i64; len];
        loop {
            let beta = product_coeff(p, x, &u, low, -1);
            let supported = (-3..-1).all(|d| product_coeff(p, x, &u, low, d) == 0);
            if supported {
                let col = labels.iter().position(|&(aa, bb)| aa == a && bb == beta).unwrap();
                let chi = product_coeff(p, x, &u, low, 0) * inv_mod(p, a);
                let u0 = u[(0 - low) as usize];
                let value = UnitRoot::psi(PrimeField::new(p as u32, chi - u0));
                tallies[col].push(value);
            }
            // odometer
            let mut i = 0;
            while i < len {
                u[i] += 1;
                if u[i] < p {
                    break;
                }
                u[i] = 0;
                i += 1;
            }
            if i == len {
                break;
            }
        }
        // each u-cell has volume p^-depth
        let den = BigInt::from(p).pow(depth);
        rows.push(tallies.iter().map(|t| t.to_scalar(&den)).collect());
    }
    CycMatrix::from_rows(p as u32, rows).unwrap()
}

#[test]
fn two_by_two_block_by_brute_force() {
    let m = oracle_matrix(2, 2);
    assert_eq!(m, CycMatrix::from_int_rows(2, &[&[1, 1], &[1, -1]]));
    assert_eq!(exact_det(&m).unwrap(), CycScalar::from_int(2, -2));
}

#[test]
fn oracle_agrees_with_phi_and_kernel() {
    for p in [2u32, 3, 5] {
        let oracle = oracle_matrix(p as i64, 2);
        let level = LevelParams::new(p, 2, 0).unwrap();
        assert_eq!(phi_matrix(&level).unwrap().entries, oracle, "p = {p}");
        assert_eq!(kernel_matrix(&level).unwrap().entries, oracle, "p = {p}");
        assert_eq!(oracle_matrix(p as i64, 3), oracle, "depth, p = {p}");
    }
}
