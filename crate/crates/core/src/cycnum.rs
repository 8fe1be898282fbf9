//! Exact arithmetic in the cyclotomic field `Q(zeta_p)`.
//!
//! Elements are stored in the power basis `1, zeta, ..., zeta^(p-2)` with
//! the relation `1 + zeta + ... + zeta^(p-1) = 0` applied eagerly, over a
//! single positive denominator. The representation is canonical, so
//! equality is componentwise.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fqlaurent::PrimeField;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CycScalar {
    p: u32,
    num: Vec<BigInt>,
    den: BigInt,
}

impl CycScalar {
    pub fn zero(p: u32) -> Self {
        CycScalar {
            p,
            num: vec![BigInt::zero(); (p - 1) as usize],
            den: BigInt::one(),
        }
    }

    pub fn one(p: u32) -> Self {
        Self::from_int(p, 1)
    }

    pub fn from_int(p: u32, n: i64) -> Self {
        let mut out = Self::zero(p);
        out.num[0] = BigInt::from(n);
        out
    }

    pub fn from_ratio(p: u32, n: i64, d: i64) -> Result<Self> {
        if d == 0 {
            return Err(Error::DivisionByZero);
        }
        let mut out = Self::zero(p);
        out.num[0] = BigInt::from(n);
        out.den = BigInt::from(d);
        out.normalize();
        Ok(out)
    }

    /// Builds `(sum num[i] zeta^i) / den` from basis coordinates.
    pub fn from_parts(p: u32, num: Vec<BigInt>, den: BigInt) -> Result<Self> {
        if num.len() != (p - 1) as usize {
            return Err(Error::InvalidParams(format!(
                "expected {} basis coordinates, got {}",
                p - 1,
                num.len()
            )));
        }
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut out = CycScalar { p, num, den };
        out.normalize();
        Ok(out)
    }

    /// `zeta_p^e`.
    pub fn zeta_pow(p: u32, e: i64) -> Self {
        let e = e.rem_euclid(p as i64) as usize;
        let mut out = Self::zero(p);
        if e < (p - 1) as usize {
            out.num[e] = BigInt::one();
        } else {
            for c in out.num.iter_mut() {
                *c = BigInt::from(-1);
            }
        }
        out
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.den.is_one() && self.num[0].is_one() && self.num[1..].iter().all(Zero::is_zero)
    }

    /// The value as a rational, when it lies in `Q`.
    pub fn as_rational(&self) -> Option<(BigInt, BigInt)> {
        if self.num[1..].iter().all(Zero::is_zero) {
            Some((self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    fn normalize(&mut self) {
        if self.is_zero() {
            self.den = BigInt::one();
            return;
        }
        if self.den.is_negative() {
            self.den = -&self.den;
            for c in self.num.iter_mut() {
                *c = -&*c;
            }
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                break;
            }
            g = g.gcd(c);
        }
        if !g.is_one() {
            self.den /= &g;
            for c in self.num.iter_mut() {
                *c /= &g;
            }
        }
    }

    /// Reduces a length-`p` coefficient vector of `Z[x]/(x^p - 1)` to the basis.
    fn from_full(p: u32, mut full: Vec<BigInt>, den: BigInt) -> Self {
        let top = full.pop().unwrap();
        if !top.is_zero() {
            for c in full.iter_mut() {
                *c -= &top;
            }
        }
        let mut out = CycScalar { p, num: full, den };
        out.normalize();
        out
    }

    fn check(&self, other: &CycScalar) -> Result<()> {
        if self.p != other.p {
            Err(Error::ModulusMismatch(self.p, other.p))
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &CycScalar) -> Result<CycScalar> {
        self.check(other)?;
        Ok(self.add_impl(other, false))
    }

    pub fn checked_sub(&self, other: &CycScalar) -> Result<CycScalar> {
        self.check(other)?;
        Ok(self.add_impl(other, true))
    }

    fn add_impl(&self, other: &CycScalar, negate: bool) -> CycScalar {
        let (num, den) = if self.den == other.den {
            let num = self
                .num
                .iter()
                .zip(&other.num)
                .map(|(a, b)| if negate { a - b } else { a + b })
                .collect();
            (num, self.den.clone())
        } else {
            let num = self
                .num
                .iter()
                .zip(&other.num)
                .map(|(a, b)| {
                    let l = a * &other.den;
                    let r = b * &self.den;
                    if negate {
                        l - r
                    } else {
                        l + r
                    }
                })
                .collect();
            (num, &self.den * &other.den)
        };
        let mut out = CycScalar {
            p: self.p,
            num,
            den,
        };
        out.normalize();
        out
    }

    pub fn neg(&self) -> CycScalar {
        CycScalar {
            p: self.p,
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }

    pub fn checked_mul(&self, other: &CycScalar) -> Result<CycScalar> {
        self.check(other)?;
        Ok(self.mul_impl(other))
    }

    fn mul_impl(&self, other: &CycScalar) -> CycScalar {
        let p = self.p as usize;
        let mut full = vec![BigInt::zero(); p];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.num.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                full[(i + j) % p] += a * b;
            }
        }
        Self::from_full(self.p, full, &self.den * &other.den)
    }

    /// Image under the automorphism `zeta -> zeta^j`, `j` prime to `p`.
    fn conjugate(&self, j: u32) -> CycScalar {
        let p = self.p as usize;
        let mut full = vec![BigInt::zero(); p];
        for (i, c) in self.num.iter().enumerate() {
            full[(i * j as usize) % p] += c;
        }
        Self::from_full(self.p, full, self.den.clone())
    }

    /// Inverse through the norm: `a^-1 = prod_{j != 1} sigma_j(a) / N(a)`.
    pub fn inv(&self) -> Result<CycScalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut others = CycScalar::one(self.p);
        for j in 2..self.p {
            others = others.mul_impl(&self.conjugate(j));
        }
        let norm = self.mul_impl(&others);
        let (n, d) = norm
            .as_rational()
            .expect("field norm of a cyclotomic element is rational");
        let mut out = CycScalar {
            p: self.p,
            num: others.num.iter().map(|c| c * &d).collect(),
            den: &others.den * &n,
        };
        out.normalize();
        Ok(out)
    }

    pub fn checked_div(&self, other: &CycScalar) -> Result<CycScalar> {
        self.check(other)?;
        Ok(self.mul_impl(&other.inv()?))
    }

    /// Encodes as `{"num":[...],"den":d}`. Integers that overflow `i64`
    /// are written as decimal strings.
    pub fn to_json(&self) -> Value {
        json!({
            "num": self.num.iter().map(bigint_json).collect::<Vec<_>>(),
            "den": bigint_json(&self.den),
        })
    }

    pub fn from_json(p: u32, v: &Value) -> Result<CycScalar> {
        let bad = || Error::InvalidParams(format!("malformed scalar {v}"));
        let num = v
            .get("num")
            .and_then(Value::as_array)
            .ok_or_else(bad)?
            .iter()
            .map(|x| bigint_from_json(x).ok_or_else(bad))
            .collect::<Result<Vec<_>>>()?;
        let den = v.get("den").and_then(bigint_from_json).ok_or_else(bad)?;
        CycScalar::from_parts(p, num, den)
    }

    /// CSV rendering `n0+n1*z+n2*z^2+.../d`, all coordinates written.
    pub fn to_csv_cell(&self) -> String {
        let mut out = String::new();
        for (i, c) in self.num.iter().enumerate() {
            if i > 0 {
                out.push('+');
            }
            match i {
                0 => out.push_str(&c.to_string()),
                1 => out.push_str(&format!("{c}*z")),
                _ => out.push_str(&format!("{c}*z^{i}")),
            }
        }
        out.push('/');
        out.push_str(&self.den.to_string());
        out
    }
}

fn bigint_json(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => json!(v),
        None => json!(n.to_string()),
    }
}

fn bigint_from_json(v: &Value) -> Option<BigInt> {
    match v {
        Value::Number(n) => n.as_i64().map(BigInt::from),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

impl fmt::Display for CycScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if wrote {
                write!(f, " + ")?;
            }
            wrote = true;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*z")?,
                _ => write!(f, "{c}*z^{i}")?,
            }
        }
        if !wrote {
            write!(f, "0")?;
        }
        if !self.den.is_one() {
            write!(f, " (/{})", self.den)?;
        }
        Ok(())
    }
}

macro_rules! forward_op {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl std::ops::$tr<&CycScalar> for &CycScalar {
            type Output = CycScalar;
            fn $method(self, rhs: &CycScalar) -> CycScalar {
                self.$checked(rhs).expect("cyclotomic modulus mismatch")
            }
        }
    };
}

forward_op!(Add, add, checked_add);
forward_op!(Sub, sub, checked_sub);
forward_op!(Mul, mul, checked_mul);

/// The additive character `psi(x) = zeta_p^x` of `F_p`.
pub fn psi(x: PrimeField) -> CycScalar {
    CycScalar::zeta_pow(x.modulus(), x.value() as i64)
}

/// A value `+-zeta_p^e`; every character value in this crate has this
/// shape, and the hot loops accumulate these instead of full scalars.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct UnitRoot {
    pub p: u32,
    pub exp: u32,
    pub negative: bool,
}

impl UnitRoot {
    pub fn one(p: u32) -> Self {
        UnitRoot {
            p,
            exp: 0,
            negative: false,
        }
    }

    pub fn psi(x: PrimeField) -> Self {
        UnitRoot {
            p: x.modulus(),
            exp: x.value(),
            negative: false,
        }
    }

    pub fn sign(p: u32, negative: bool) -> Self {
        UnitRoot {
            p,
            exp: 0,
            negative,
        }
    }

    fn product(self, other: UnitRoot) -> UnitRoot {
        debug_assert_eq!(self.p, other.p);
        UnitRoot {
            p: self.p,
            exp: (self.exp + other.exp) % self.p,
            negative: self.negative ^ other.negative,
        }
    }

    pub fn inv(self) -> UnitRoot {
        UnitRoot {
            p: self.p,
            exp: (self.p - self.exp) % self.p,
            negative: self.negative,
        }
    }

    /// Equality with 1 in `Q(zeta_p)`; for p = 2, `-zeta = 1`.
    pub fn is_one(self) -> bool {
        self.to_scalar().is_one()
    }

    pub fn to_scalar(self) -> CycScalar {
        let z = CycScalar::zeta_pow(self.p, self.exp as i64);
        if self.negative {
            z.neg()
        } else {
            z
        }
    }
}

impl std::ops::Mul for UnitRoot {
    type Output = UnitRoot;

    fn mul(self, other: UnitRoot) -> UnitRoot {
        self.product(other)
    }
}

/// Integer tallies of `+-zeta^e`, turned into a scalar once at the end.
#[derive(Clone, Debug)]
pub struct RootTally {
    p: u32,
    counts: Vec<i64>,
}

impl RootTally {
    pub fn new(p: u32) -> Self {
        RootTally {
            p,
            counts: vec![0; p as usize],
        }
    }

    pub fn push(&mut self, r: UnitRoot) {
        let slot = &mut self.counts[r.exp as usize];
        *slot += if r.negative { -1 } else { 1 };
    }

    pub fn is_empty(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    /// `(sum of pushed roots) / den`.
    pub fn to_scalar(&self, den: &BigInt) -> CycScalar {
        let full = self.counts.iter().map(|&c| BigInt::from(c)).collect();
        CycScalar::from_full(self.p, full, den.clone())
    }
}

/// Dense matrix over `Q(zeta_p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycMatrix {
    p: u32,
    rows: usize,
    cols: usize,
    data: Vec<CycScalar>,
}

impl CycMatrix {
    pub fn zeros(p: u32, rows: usize, cols: usize) -> Self {
        CycMatrix {
            p,
            rows,
            cols,
            data: vec![CycScalar::zero(p); rows * cols],
        }
    }

    pub fn identity(p: u32, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.set(i, i, CycScalar::one(p));
        }
        m
    }

    pub fn from_rows(p: u32, rows: Vec<Vec<CycScalar>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::InvalidParams("ragged matrix rows".into()));
            }
            for x in row {
                if x.modulus() != p {
                    return Err(Error::ModulusMismatch(p, x.modulus()));
                }
                data.push(x);
            }
        }
        Ok(CycMatrix {
            p,
            rows: r,
            cols: c,
            data,
        })
    }

    pub fn from_int_rows(p: u32, rows: &[&[i64]]) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|&x| CycScalar::from_int(p, x)).collect())
            .collect();
        Self::from_rows(p, rows).expect("integer rows are well formed")
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &CycScalar {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: CycScalar) {
        self.data[i * self.cols + j] = x;
    }

    pub fn row(&self, i: usize) -> &[CycScalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Submatrix on the given row and column indices.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> CycMatrix {
        let mut out = CycMatrix::zeros(self.p, rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out.set(a, b, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            (0..self.rows)
                .map(|i| Value::Array(self.row(i).iter().map(CycScalar::to_json).collect()))
                .collect(),
        )
    }

    pub fn from_json(p: u32, v: &Value) -> Result<Self> {
        let rows = v
            .as_array()
            .ok_or_else(|| Error::InvalidParams("matrix JSON must be an array".into()))?
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| Error::InvalidParams("matrix row must be an array".into()))?
                    .iter()
                    .map(|x| CycScalar::from_json(p, x))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(p, rows)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(CycScalar::to_csv_cell).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn exact_det(m: &CycMatrix) -> Result<CycScalar> {
    if m.rows != m.cols {
        return Err(Error::NonSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    let n = m.rows;
    let p = m.p;
    if n == 0 {
        return Ok(CycScalar::one(p));
    }
    let mut a: Vec<Vec<CycScalar>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut negate = false;
    let mut prev = CycScalar::one(p);
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    negate = !negate;
                }
                None => return Ok(CycScalar::zero(p)),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.checked_div(&prev)?;
            }
            a[i][k] = CycScalar::zero(p);
        }
        prev = a[k][k].clone();
    }
    let det = a[n - 1][n - 1].clone();
    Ok(if negate { det.neg() } else { det })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(p: u32, e: i64) -> CycScalar {
        CycScalar::zeta_pow(p, e)
    }

    #[test]
    fn psi_basics() {
        assert_eq!(psi(PrimeField::new(2, 1)), CycScalar::from_int(2, -1));
        assert!(psi(PrimeField::new(7, 0)).is_one());
        let s = &psi(PrimeField::new(3, 1)) + &psi(PrimeField::new(3, 2));
        assert_eq!(s, CycScalar::from_int(3, -1));
    }

    #[test]
    fn ring_operations() {
        assert!((&z(3, 1) * &z(3, 2)).is_one());
        assert!((&CycScalar::one(2) + &z(2, 1)).is_zero());
        let half = CycScalar::from_ratio(5, 1, 2).unwrap();
        assert!((&half + &half).is_one());
        let x = &z(5, 1) + &CycScalar::from_int(5, 3);
        let q = x.checked_div(&x).unwrap();
        assert!(q.is_one());
        assert_eq!(
            CycScalar::one(3).checked_div(&CycScalar::zero(3)),
            Err(Error::DivisionByZero)
        );
        assert_eq!(
            z(3, 1).checked_add(&z(5, 1)),
            Err(Error::ModulusMismatch(3, 5))
        );
    }

    #[test]
    fn zero_tests() {
        let mut total = CycScalar::zero(7);
        for x in PrimeField::elements(7) {
            total = &total + &psi(x);
        }
        assert!(total.is_zero());
        assert!(!(&z(3, 1) - &z(3, 2)).is_zero());
        let zero = CycScalar::from_parts(5, vec![BigInt::zero(); 4], BigInt::from(9)).unwrap();
        assert!(zero.is_zero());
        assert_eq!(zero.denominator(), &BigInt::one());
    }

    #[test]
    fn inverse_of_gauss_sum_like_element() {
        for p in [3u32, 5, 7, 11, 13] {
            let x = &(&z(p, 1) - &z(p, 3)) + &CycScalar::from_int(p, 2);
            let y = x.inv().unwrap();
            assert!((&x * &y).is_one(), "p = {p}");
        }
    }

    #[test]
    fn determinants() {
        let m = CycMatrix::from_int_rows(2, &[&[1, 1], &[1, -1]]);
        assert_eq!(exact_det(&m).unwrap(), CycScalar::from_int(2, -2));
        assert!(exact_det(&CycMatrix::identity(5, 6)).unwrap().is_one());
        let rep = CycMatrix::from_rows(
            3,
            vec![
                vec![z(3, 1), z(3, 2), CycScalar::one(3)],
                vec![CycScalar::one(3), z(3, 1), z(3, 2)],
                vec![z(3, 1), z(3, 2), CycScalar::one(3)],
            ],
        )
        .unwrap();
        assert!(exact_det(&rep).unwrap().is_zero());
        let rect = CycMatrix::zeros(3, 2, 3);
        assert_eq!(exact_det(&rect), Err(Error::NonSquare { rows: 2, cols: 3 }));
        // a zero leading pivot forces a row swap
        let swap = CycMatrix::from_int_rows(3, &[&[0, 1], &[1, 0]]);
        assert_eq!(exact_det(&swap).unwrap(), CycScalar::from_int(3, -1));
    }

    #[test]
    fn json_and_csv_encodings() {
        let x = &z(5, 2) - &CycScalar::from_ratio(5, 3, 5).unwrap();
        let m = CycMatrix::from_rows(5, vec![vec![x.clone(), CycScalar::one(5)]]).unwrap();
        let v = m.to_json();
        assert_eq!(CycMatrix::from_json(5, &v).unwrap(), m);
        assert_eq!(x.to_csv_cell(), "-3+0*z+5*z^2+0*z^3/5");
        assert_eq!(m.to_csv(), "-3+0*z+5*z^2+0*z^3/5,1+0*z+0*z^2+0*z^3/1\n");
        let big = CycScalar::from_parts(3, vec![BigInt::from(1) << 80, BigInt::zero()], BigInt::one())
            .unwrap();
        assert_eq!(CycScalar::from_json(3, &big.to_json()).unwrap(), big);
    }

    #[test]
    fn unit_roots() {
        let r = UnitRoot::psi(PrimeField::new(5, 3));
        assert!((r * r.inv()).is_one());
        assert!(UnitRoot { p: 2, exp: 1, negative: true }.is_one());
        let mut tally = RootTally::new(3);
        tally.push(UnitRoot::psi(PrimeField::new(3, 1)));
        tally.push(UnitRoot::psi(PrimeField::new(3, 2)));
        assert_eq!(tally.to_scalar(&BigInt::one()), CycScalar::from_int(3, -1));
    }
}
