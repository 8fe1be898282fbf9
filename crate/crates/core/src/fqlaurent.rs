//! Truncated Laurent series over a prime field.
//!
//! A [`Series`] is an element of `K = F_p((t))` stored as
//! `t^val * (c_0 + c_1 t + ...)` with `c_0 != 0`, together with an absolute
//! precision: a bounded element is only known modulo `t^abs_prec`. Finite
//! Laurent polynomials that are known exactly (parsed literals, enumerated
//! points, group generators) carry no bound at all.
//!
//! Precision follows the usual p-adic rules. Addition keeps the smaller
//! absolute precision, so cancellation lowers the relative precision
//! honestly. Multiplication and inversion keep the smaller relative
//! precision. Expanding the inverse of an exact non-monomial needs a
//! truncation length; every series carries that length as its `cap`, the
//! session relative precision.

use std::fmt;

use serde::{Serialize, Serializer};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// The primes this crate supports as residue characteristics.
pub const SUPPORTED_PRIMES: [u32; 6] = [2, 3, 5, 7, 11, 13];

pub fn check_prime(p: u32) -> Result<()> {
    if SUPPORTED_PRIMES.contains(&p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// An element of `F_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeField {
    p: u32,
    value: u32,
}

impl PrimeField {
    /// Reduces `value` modulo `p`.
    pub fn new(p: u32, value: i64) -> Self {
        PrimeField {
            p,
            value: value.rem_euclid(p as i64) as u32,
        }
    }

    pub fn zero(p: u32) -> Self {
        PrimeField { p, value: 0 }
    }

    pub fn one(p: u32) -> Self {
        PrimeField { p, value: 1 }
    }

    pub fn modulus(self) -> u32 {
        self.p
    }

    pub fn value(self) -> u32 {
        self.value
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn inv(self) -> Result<Self> {
        if self.value == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(PrimeField {
            p: self.p,
            value: inv_mod(self.value, self.p),
        })
    }

    /// All nonzero residues in increasing order.
    pub fn units(p: u32) -> impl Iterator<Item = PrimeField> {
        (1..p).map(move |v| PrimeField { p, value: v })
    }

    /// All residues in increasing order.
    pub fn elements(p: u32) -> impl Iterator<Item = PrimeField> {
        (0..p).map(move |v| PrimeField { p, value: v })
    }
}

impl std::ops::Add for PrimeField {
    type Output = PrimeField;
    fn add(self, rhs: PrimeField) -> PrimeField {
        debug_assert_eq!(self.p, rhs.p);
        PrimeField {
            p: self.p,
            value: (self.value + rhs.value) % self.p,
        }
    }
}

impl std::ops::Sub for PrimeField {
    type Output = PrimeField;
    fn sub(self, rhs: PrimeField) -> PrimeField {
        debug_assert_eq!(self.p, rhs.p);
        PrimeField {
            p: self.p,
            value: (self.value + self.p - rhs.value) % self.p,
        }
    }
}

impl std::ops::Mul for PrimeField {
    type Output = PrimeField;
    fn mul(self, rhs: PrimeField) -> PrimeField {
        debug_assert_eq!(self.p, rhs.p);
        PrimeField {
            p: self.p,
            value: (self.value * rhs.value) % self.p,
        }
    }
}

impl std::ops::Neg for PrimeField {
    type Output = PrimeField;
    fn neg(self) -> PrimeField {
        PrimeField {
            p: self.p,
            value: (self.p - self.value) % self.p,
        }
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Serialize for PrimeField {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u32(self.value)
    }
}

fn inv_mod(a: u32, p: u32) -> u32 {
    // p is tiny; Fermat is plenty.
    let mut result = 1u32;
    let mut base = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    result
}

type Coeffs = SmallVec<[u8; 16]>;

/// An element of `F_p((t))` with tracked absolute precision.
#[derive(Clone, Debug)]
pub struct Series {
    p: u32,
    val: i64,
    /// Unit part; empty for zero. `unit[0] != 0`, no trailing zeros.
    unit: Coeffs,
    /// `None` for exactly known values.
    prec: Option<i64>,
    cap: u32,
}

impl PartialEq for Series {
    /// Structural equality: same value and same precision.
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p
            && self.prec == other.prec
            && self.unit == other.unit
            && (self.unit.is_empty() || self.val == other.val)
    }
}

fn min_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => Some(a.min(b)),
    }
}

impl Series {
    pub fn exact_zero(p: u32, cap: u32) -> Self {
        Series {
            p,
            val: 0,
            unit: Coeffs::new(),
            prec: None,
            cap,
        }
    }

    /// Zero known only modulo `t^abs_prec`.
    pub fn zero_mod(p: u32, abs_prec: i64, cap: u32) -> Self {
        Series {
            p,
            val: 0,
            unit: Coeffs::new(),
            prec: Some(abs_prec),
            cap,
        }
    }

    pub fn one(p: u32, cap: u32) -> Self {
        Self::monomial(PrimeField::one(p), 0, cap)
    }

    /// The exact monomial `c t^e`.
    pub fn monomial(c: PrimeField, e: i64, cap: u32) -> Self {
        if c.is_zero() {
            return Self::exact_zero(c.p, cap);
        }
        let mut unit = Coeffs::new();
        unit.push(c.value as u8);
        Series {
            p: c.p,
            val: e,
            unit,
            prec: None,
            cap,
        }
    }

    /// `sum_i coeffs[i] t^(low + i)`, known modulo `t^prec` (or exactly).
    /// Coefficients are reduced mod `p`; terms at or above `prec` are dropped.
    pub fn from_coeffs(p: u32, low: i64, coeffs: &[i64], prec: Option<i64>, cap: u32) -> Self {
        let mut buf: Vec<u32> = coeffs
            .iter()
            .map(|&c| c.rem_euclid(p as i64) as u32)
            .collect();
        if let Some(pr) = prec {
            let keep = (pr - low).clamp(0, buf.len() as i64) as usize;
            buf.truncate(keep);
        }
        Self::normalized(p, low, &buf, prec, cap)
    }

    /// Builds from reduced residues; strips leading and trailing zeros.
    fn normalized(p: u32, low: i64, buf: &[u32], prec: Option<i64>, cap: u32) -> Self {
        let Some(first) = buf.iter().position(|&c| c != 0) else {
            return Series {
                p,
                val: 0,
                unit: Coeffs::new(),
                prec,
                cap,
            };
        };
        let last = buf.iter().rposition(|&c| c != 0).unwrap();
        Series {
            p,
            val: low + first as i64,
            unit: buf[first..=last].iter().map(|&c| c as u8).collect(),
            prec,
            cap,
        }
    }

    pub fn modulus(&self) -> u32 {
        self.p
    }

    /// Relative precision used when an exact value must be expanded.
    pub fn cap(&self) -> u32 {
        self.cap
    }

    pub fn with_cap(mut self, cap: u32) -> Self {
        self.cap = cap;
        self
    }

    /// Absolute precision; `None` means the value is known exactly.
    pub fn abs_prec(&self) -> Option<i64> {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    /// True for exact zero and for zero modulo `t^P`.
    pub fn is_zero(&self) -> bool {
        self.unit.is_empty()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.unit.is_empty() && self.prec.is_none()
    }

    /// The unit-part coefficients `c_0, c_1, ...` (trailing zeros trimmed).
    pub fn unit_coeffs(&self) -> Vec<PrimeField> {
        self.unit
            .iter()
            .map(|&c| PrimeField {
                p: self.p,
                value: c as u32,
            })
            .collect()
    }

    /// Valuation; `Ok(None)` is `+inf` for exact zero. Zero modulo `t^P`
    /// has no determinate valuation.
    pub fn valuation(&self) -> Result<Option<i64>> {
        if !self.unit.is_empty() {
            Ok(Some(self.val))
        } else {
            match self.prec {
                None => Ok(None),
                Some(p) => Err(Error::IndeterminateValuation(p)),
            }
        }
    }

    /// Largest `v` with the value certainly in `t^v O`; `None` for exact zero.
    pub fn valuation_lower_bound(&self) -> Option<i64> {
        if self.unit.is_empty() {
            self.prec
        } else {
            Some(self.val)
        }
    }

    /// Leading coefficient of a nonzero element.
    pub fn leading_coeff(&self) -> Option<PrimeField> {
        self.unit.first().map(|&c| PrimeField {
            p: self.p,
            value: c as u32,
        })
    }

    /// Relative precision of a bounded nonzero element.
    pub fn rel_prec(&self) -> Option<i64> {
        match (self.prec, self.unit.is_empty()) {
            (Some(p), false) => Some(p - self.val),
            _ => None,
        }
    }

    /// Coefficient of `t^i`; a hard error past the known precision.
    pub fn coeff(&self, i: i64) -> Result<PrimeField> {
        if let Some(p) = self.prec {
            if i >= p {
                return Err(Error::PrecisionExceeded {
                    index: i,
                    abs_prec: p,
                });
            }
        }
        let value = if self.unit.is_empty() || i < self.val {
            0
        } else {
            let j = (i - self.val) as usize;
            self.unit.get(j).copied().unwrap_or(0) as u32
        };
        Ok(PrimeField { p: self.p, value })
    }

    fn check_modulus(&self, other: &Series) -> Result<()> {
        if self.p != other.p {
            Err(Error::ModulusMismatch(self.p, other.p))
        } else {
            Ok(())
        }
    }

    pub fn checked_add(&self, other: &Series) -> Result<Series> {
        self.check_modulus(other)?;
        Ok(self.add_impl(other, false))
    }

    pub fn checked_sub(&self, other: &Series) -> Result<Series> {
        self.check_modulus(other)?;
        Ok(self.add_impl(other, true))
    }

    fn add_impl(&self, other: &Series, negate: bool) -> Series {
        let p = self.p;
        let prec = min_prec(self.prec, other.prec);
        let cap = self.cap.min(other.cap);
        let lo = match (self.unit.is_empty(), other.unit.is_empty()) {
            (true, true) => {
                return Series {
                    p,
                    val: 0,
                    unit: Coeffs::new(),
                    prec,
                    cap,
                }
            }
            (false, true) => self.val,
            (true, false) => other.val,
            (false, false) => self.val.min(other.val),
        };
        let end = |s: &Series| {
            if s.unit.is_empty() {
                lo
            } else {
                s.val + s.unit.len() as i64
            }
        };
        let mut hi = end(self).max(end(other));
        if let Some(pr) = prec {
            hi = hi.min(pr);
        }
        if hi <= lo {
            return Series {
                p,
                val: 0,
                unit: Coeffs::new(),
                prec,
                cap,
            };
        }
        let mut buf = vec![0u32; (hi - lo) as usize];
        for (i, &c) in self.unit.iter().enumerate() {
            let e = self.val + i as i64;
            if e >= hi {
                break;
            }
            buf[(e - lo) as usize] += c as u32;
        }
        for (i, &c) in other.unit.iter().enumerate() {
            let e = other.val + i as i64;
            if e >= hi {
                break;
            }
            let c = if negate { (p - c as u32) % p } else { c as u32 };
            buf[(e - lo) as usize] += c;
        }
        for c in buf.iter_mut() {
            *c %= p;
        }
        Self::normalized(p, lo, &buf, prec, cap)
    }

    pub fn neg(&self) -> Series {
        let mut out = self.clone();
        for c in out.unit.iter_mut() {
            *c = ((self.p - *c as u32) % self.p) as u8;
        }
        out
    }

    pub fn checked_mul(&self, other: &Series) -> Result<Series> {
        self.check_modulus(other)?;
        Ok(self.mul_impl(other))
    }

    fn mul_impl(&self, other: &Series) -> Series {
        let p = self.p;
        let cap = self.cap.min(other.cap);
        if self.is_exact_zero() || other.is_exact_zero() {
            return Series::exact_zero(p, cap);
        }
        match (self.unit.is_empty(), other.unit.is_empty()) {
            (true, _) | (_, true) => {
                // At least one factor is zero mod t^P; bound the product.
                let bound = self.valuation_lower_bound().unwrap()
                    + other.valuation_lower_bound().unwrap();
                return Series::zero_mod(p, bound, cap);
            }
            _ => {}
        }
        let val = self.val + other.val;
        let rel = match (self.rel_prec(), other.rel_prec()) {
            (None, None) => None,
            (a, b) => Some(a.unwrap_or(i64::MAX).min(b.unwrap_or(i64::MAX))),
        };
        let full = self.unit.len() + other.unit.len() - 1;
        let len = match rel {
            Some(r) => (r.max(0) as usize).min(full),
            None => full,
        };
        let mut buf = vec![0u32; len];
        for (i, &a) in self.unit.iter().enumerate() {
            if i >= len || a == 0 {
                continue;
            }
            let upper = (len - i).min(other.unit.len());
            for (j, &b) in other.unit[..upper].iter().enumerate() {
                buf[i + j] = (buf[i + j] + a as u32 * b as u32) % p;
            }
        }
        Self::normalized(p, val, &buf, rel.map(|r| val + r), cap)
    }

    /// Multiplicative inverse. Exact monomials invert exactly; other exact
    /// values expand to `cap` terms of relative precision.
    pub fn inv(&self) -> Result<Series> {
        if self.unit.is_empty() {
            return Err(Error::DivisionByZero);
        }
        let p = self.p;
        let c0_inv = inv_mod(self.unit[0] as u32, p);
        if self.prec.is_none() && self.unit.len() == 1 {
            let mut unit = Coeffs::new();
            unit.push(c0_inv as u8);
            return Ok(Series {
                p,
                val: -self.val,
                unit,
                prec: None,
                cap: self.cap,
            });
        }
        let rel = self.rel_prec().unwrap_or(self.cap as i64).max(1) as usize;
        let mut out = vec![0u32; rel];
        out[0] = c0_inv;
        for i in 1..rel {
            let mut acc = 0u32;
            for j in 1..=i.min(self.unit.len() - 1) {
                acc = (acc + self.unit[j] as u32 * out[i - j]) % p;
            }
            out[i] = (p - acc) % p * c0_inv % p;
        }
        let val = -self.val;
        Ok(Self::normalized(p, val, &out, Some(val + rel as i64), self.cap))
    }

    pub fn checked_div(&self, other: &Series) -> Result<Series> {
        self.check_modulus(other)?;
        Ok(self.mul_impl(&other.inv()?))
    }

    /// Multiplication by `t^k`.
    pub fn shift(&self, k: i64) -> Series {
        let mut out = self.clone();
        if !out.unit.is_empty() {
            out.val += k;
        }
        out.prec = out.prec.map(|p| p + k);
        out
    }

    pub fn scale(&self, c: PrimeField) -> Series {
        if c.is_zero() {
            return Series::exact_zero(self.p, self.cap);
        }
        let mut out = self.clone();
        for x in out.unit.iter_mut() {
            *x = ((*x as u32 * c.value) % self.p) as u8;
        }
        out
    }

    /// The exact polynomial made of the terms of degree `< d`.
    pub fn low_part(&self, d: i64) -> Result<Series> {
        if let Some(p) = self.prec {
            if p < d {
                return Err(Error::PrecisionExceeded {
                    index: d - 1,
                    abs_prec: p,
                });
            }
        }
        if self.unit.is_empty() || self.val >= d {
            return Ok(Series::exact_zero(self.p, self.cap));
        }
        let keep = ((d - self.val) as usize).min(self.unit.len());
        let buf: Vec<u32> = self.unit[..keep].iter().map(|&c| c as u32).collect();
        Ok(Self::normalized(self.p, self.val, &buf, None, self.cap))
    }

    /// True when `self - other` is zero within the common precision.
    pub fn eq_within_precision(&self, other: &Series) -> bool {
        self.p == other.p && self.add_impl(other, true).is_zero()
    }
}

/// Every exact polynomial `sum_{j < len} c_j t^(low + j)`, in lexicographic
/// order of `(c_0, ..., c_{len-1})`. These are the coset representatives of
/// `t^low O / t^(low + len) O`.
pub fn window_polys(p: u32, low: i64, len: usize, cap: u32) -> impl Iterator<Item = Series> {
    let total = (p as u64).pow(len as u32);
    (0..total).map(move |mut idx| {
        let mut digits = vec![0i64; len];
        for slot in digits.iter_mut().rev() {
            *slot = (idx % p as u64) as i64;
            idx /= p as u64;
        }
        Series::from_coeffs(p, low, &digits, None, cap)
    })
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.unit.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let e = self.val + i as i64;
            match e {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*t")?,
                _ => write!(f, "{c}*t^{e}")?,
            }
        }
        match (first, self.prec) {
            (true, None) => write!(f, "0"),
            (true, Some(p)) => write!(f, "O(t^{p})"),
            (false, Some(p)) => write!(f, " + O(t^{p})"),
            (false, None) => Ok(()),
        }
    }
}

macro_rules! forward_op {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl std::ops::$tr<&Series> for &Series {
            type Output = Series;
            /// Panics on a modulus mismatch; use the `checked_` form to recover.
            fn $method(self, rhs: &Series) -> Series {
                self.$checked(rhs).expect("series modulus mismatch")
            }
        }
    };
}

forward_op!(Add, add, checked_add);
forward_op!(Sub, sub, checked_sub);
forward_op!(Mul, mul, checked_mul);

/// Parses a Laurent expression such as `t^-1 + 2*t`.
///
/// Grammar: `expr := term ('+' term)*`, `term := int | int '*' 't' |
/// int '*' 't^' int | 't' | 't^' int`. Integers are decimal (an optional
/// leading `-` is accepted) and coefficients are reduced mod `p`.
/// Whitespace is ignored. The literal is exact; `rel_prec` becomes its cap.
pub fn parse_series(text: &str, p: u32, rel_prec: u32) -> Result<Series> {
    check_prime(p)?;
    let chars: Vec<(usize, char)> = text
        .char_indices()
        .filter(|(_, c)| !c.is_whitespace())
        .collect();
    let mut parser = Parser {
        chars: &chars,
        pos: 0,
        len: text.len(),
    };
    let mut terms: Vec<(i64, i64)> = Vec::new();
    loop {
        terms.push(parser.term()?);
        if parser.eat('+') {
            continue;
        }
        if let Some((at, c)) = parser.peek() {
            return Err(Error::Syntax {
                pos: at,
                msg: format!("unexpected `{c}`"),
            });
        }
        break;
    }
    let lo = terms.iter().map(|t| t.1).min().unwrap();
    let hi = terms.iter().map(|t| t.1).max().unwrap();
    let width = hi - lo + 1;
    if width > 1 << 20 {
        return Err(Error::Syntax {
            pos: 0,
            msg: "exponent range too wide".into(),
        });
    }
    let mut coeffs = vec![0i64; width as usize];
    for (c, e) in terms {
        let slot = &mut coeffs[(e - lo) as usize];
        *slot = (*slot + c.rem_euclid(p as i64)) % p as i64;
    }
    Ok(Series::from_coeffs(p, lo, &coeffs, None, rel_prec))
}

struct Parser<'a> {
    chars: &'a [(usize, char)],
    pos: usize,
    len: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<(usize, char)> {
        self.chars.get(self.pos).copied()
    }

    fn here(&self) -> usize {
        self.peek().map(|(i, _)| i).unwrap_or(self.len)
    }

    fn eat(&mut self, c: char) -> bool {
        if matches!(self.peek(), Some((_, x)) if x == c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn int(&mut self) -> Result<i64> {
        let start = self.here();
        let neg = self.eat('-');
        let mut digits = String::new();
        while let Some((_, c)) = self.peek() {
            if c.is_ascii_digit() {
                digits.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        if digits.is_empty() {
            return Err(Error::Syntax {
                pos: start,
                msg: "expected an integer".into(),
            });
        }
        let v: i64 = digits.parse().map_err(|_| Error::Syntax {
            pos: start,
            msg: "integer out of range".into(),
        })?;
        Ok(if neg { -v } else { v })
    }

    /// Returns `(coefficient, exponent)`.
    fn term(&mut self) -> Result<(i64, i64)> {
        match self.peek() {
            Some((_, 't')) => self.power().map(|e| (1, e)),
            Some((_, c)) if c.is_ascii_digit() || c == '-' => {
                let c = self.int()?;
                if self.eat('*') {
                    Ok((c, self.power()?))
                } else {
                    Ok((c, 0))
                }
            }
            Some((at, c)) => Err(Error::Syntax {
                pos: at,
                msg: format!("unexpected `{c}`"),
            }),
            None => Err(Error::Syntax {
                pos: self.len,
                msg: "expected a term".into(),
            }),
        }
    }

    fn power(&mut self) -> Result<i64> {
        let at = self.here();
        if !self.eat('t') {
            return Err(Error::Syntax {
                pos: at,
                msg: "expected `t`".into(),
            });
        }
        if self.eat('^') {
            self.int()
        } else {
            Ok(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str, p: u32) -> Series {
        parse_series(text, p, 8).unwrap()
    }

    fn fp(p: u32, v: i64) -> PrimeField {
        PrimeField::new(p, v)
    }

    #[test]
    fn parse_normalizes() {
        let x = s("t^-1+2*t", 3);
        assert_eq!(x.valuation().unwrap(), Some(-1));
        assert_eq!(x.unit_coeffs(), vec![fp(3, 1), fp(3, 0), fp(3, 2)]);
        assert!(s("0", 2).is_exact_zero());
        assert!(s("3*t^2", 3).is_exact_zero());
        assert_eq!(s(" 2 * t ^ -3 + t", 5).valuation().unwrap(), Some(-3));
        assert_eq!(s("-1*t", 5).coeff(1).unwrap(), fp(5, 4));
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_series("1+", 3, 8), Err(Error::Syntax { .. })));
        assert!(matches!(parse_series("2*x", 3, 8), Err(Error::Syntax { .. })));
        assert!(matches!(parse_series("t^", 3, 8), Err(Error::Syntax { .. })));
        assert!(matches!(parse_series("1 t", 3, 8), Err(Error::Syntax { .. })));
        assert_eq!(parse_series("1", 4, 8), Err(Error::NotPrime(4)));
        assert_eq!(parse_series("1", 17, 8), Err(Error::NotPrime(17)));
    }

    #[test]
    fn addition() {
        assert_eq!(&s("1+t", 3) + &s("1+2*t", 3), s("2", 3));
        let y = &s("1+t", 3) + &s("2", 3);
        assert_eq!(y.valuation().unwrap(), Some(1));
        assert_eq!(y, s("t", 3));
        let x = s("t^-1+2*t", 3);
        assert_eq!(&x + &Series::exact_zero(3, 8), x);
        assert_eq!(
            s("1", 3).checked_add(&s("1", 5)),
            Err(Error::ModulusMismatch(3, 5))
        );
    }

    #[test]
    fn cancellation_lowers_precision() {
        let x = s("1+t", 3).inv().unwrap();
        let y = x.neg();
        let z = &x + &y;
        assert!(z.is_zero());
        assert_eq!(z.abs_prec(), Some(8));
        assert_eq!(z.valuation(), Err(Error::IndeterminateValuation(8)));
        assert!(z.coeff(8).is_err());
        assert_eq!(z.coeff(7).unwrap(), fp(3, 0));
    }

    #[test]
    fn multiplication() {
        assert_eq!(&s("t+t^2", 3) * &s("t^-1", 3), s("1+t", 3));
        // schoolbook: (1+t)(1+2t) = 1 + 3t + 2t^2 = 1 + 2t^2 over F_3
        assert_eq!(&s("1+t", 3) * &s("1+2*t", 3), s("1+2*t^2", 3));
        let x = s("2*t^-2+t", 5);
        assert_eq!(&x * &s("1", 5), x);
    }

    #[test]
    fn inversion() {
        let x = s("1+t", 2).inv().unwrap();
        assert_eq!(x.abs_prec(), Some(8));
        for i in 0..8 {
            assert_eq!(x.coeff(i).unwrap(), fp(2, 1));
        }
        let back = &x * &s("1+t", 2);
        assert!(back.eq_within_precision(&s("1", 2)));
        assert_eq!(s("t^2", 3).inv().unwrap(), s("t^-2", 3));
        assert_eq!(s("2", 3).inv().unwrap(), s("2", 3));
        assert_eq!(Series::exact_zero(3, 8).inv(), Err(Error::DivisionByZero));
        assert_eq!(Series::zero_mod(3, 4, 8).inv(), Err(Error::DivisionByZero));
    }

    #[test]
    fn coefficients() {
        let x = s("t^-1+2*t", 3);
        assert_eq!(x.coeff(-1).unwrap(), fp(3, 1));
        assert_eq!(x.coeff(0).unwrap(), fp(3, 0));
        assert_eq!(x.coeff(1).unwrap(), fp(3, 2));
        assert_eq!(x.coeff(-5).unwrap(), fp(3, 0));
        let z = Series::exact_zero(3, 8);
        for i in -3..40 {
            assert!(z.coeff(i).unwrap().is_zero());
        }
        // 1/(1+t) = 1 - t + t^2 - ..., so the t^1 coefficient is -1 = 2 mod 3
        let g = s("1+t", 3).inv().unwrap();
        assert_eq!(g.coeff(1).unwrap(), fp(3, 2));
        assert_eq!(
            g.coeff(8),
            Err(Error::PrecisionExceeded {
                index: 8,
                abs_prec: 8
            })
        );
    }

    #[test]
    fn valuations() {
        assert_eq!(s("t^2+t^3", 3).valuation().unwrap(), Some(2));
        assert_eq!(Series::exact_zero(2, 8).valuation().unwrap(), None);
        // 5 t^-3 reduces to zero over F_5: literal is exact zero
        assert_eq!(s("5*t^-3", 5).valuation().unwrap(), None);
        assert!(Series::zero_mod(5, -3, 8).valuation().is_err());
    }

    #[test]
    fn display_round_trips_exact_values() {
        let x = s("t^-1+2*t+4*t^3", 5);
        assert_eq!(x.to_string(), "1*t^-1 + 2*t + 4*t^3");
        assert_eq!(s(&x.to_string(), 5), x);
        assert_eq!(Series::zero_mod(3, 2, 8).to_string(), "O(t^2)");
    }

    #[test]
    fn window_enumeration() {
        let all: Vec<Series> = window_polys(3, -1, 2, 8).collect();
        assert_eq!(all.len(), 9);
        assert!(all[0].is_exact_zero());
        assert_eq!(all[1], s("t^0", 3));
        assert_eq!(all[3], s("t^-1", 3));
        assert_eq!(all[8], s("2*t^-1+2", 3));
    }

    #[test]
    fn low_part_splits() {
        let x = s("t^-2+t^-1+1+t", 3);
        assert_eq!(x.low_part(0).unwrap(), s("t^-2+t^-1", 3));
        let bounded = s("1+t", 3).inv().unwrap();
        assert!(bounded.low_part(9).is_err());
    }
}
