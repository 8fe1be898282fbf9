//! `PGL_2(K)` elements, the subgroups `B`, `I^0`, `A = I^0 ⋊ <sigma>`, and
//! the character `chi` of `A`.
//!
//! `I^0` is the set of classes of `[[1+ta, b], [tc, 1+td]]` with
//! `a, b, c, d` in `O`, `sigma = [[0, 1], [t, 0]]`, and
//! `chi(i) = psi(b_0 + c_0)` on `I^0`. The value `chi(sigma)` is a
//! configuration choice, see [`SigmaSign`].

use std::fmt;

use serde::Serialize;

use crate::cycnum::{CycScalar, UnitRoot};
use crate::error::{Error, Result};
use crate::fqlaurent::{check_prime, parse_series, PrimeField, Series};

/// The value of `chi(sigma)`. `sigma^2 = e` allows either sign.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub enum SigmaSign {
    #[default]
    #[serde(rename = "+1")]
    Plus,
    #[serde(rename = "-1")]
    Minus,
}

impl SigmaSign {
    pub fn flipped(self) -> Self {
        match self {
            SigmaSign::Plus => SigmaSign::Minus,
            SigmaSign::Minus => SigmaSign::Plus,
        }
    }

    pub fn root(self, p: u32) -> UnitRoot {
        UnitRoot::sign(p, self == SigmaSign::Minus)
    }
}

impl std::str::FromStr for SigmaSign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+1" | "1" | "+" => Ok(SigmaSign::Plus),
            "-1" | "-" => Ok(SigmaSign::Minus),
            other => Err(Error::InvalidParams(format!(
                "chi(sigma) must be +1 or -1, got `{other}`"
            ))),
        }
    }
}

impl fmt::Display for SigmaSign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SigmaSign::Plus => "+1",
            SigmaSign::Minus => "-1",
        })
    }
}

/// A 2x2 matrix over `K` representing a class in `PGL_2(K)`.
#[derive(Clone, Debug)]
pub struct GroupElem {
    m: [Series; 4],
    canonical: bool,
}

impl GroupElem {
    /// Row-major entries. Fails unless the determinant is nonzero within
    /// precision.
    pub fn new(m11: Series, m12: Series, m21: Series, m22: Series) -> Result<Self> {
        let p = m11.modulus();
        for e in [&m12, &m21, &m22] {
            if e.modulus() != p {
                return Err(Error::ModulusMismatch(p, e.modulus()));
            }
        }
        let g = GroupElem {
            m: [m11, m12, m21, m22],
            canonical: false,
        };
        let det = g.det();
        if det.is_exact_zero() {
            return Err(Error::Singular);
        }
        det.valuation()?;
        Ok(g)
    }

    /// Parses `"e11;e12;e21;e22"`, each entry a Laurent expression.
    pub fn parse(text: &str, p: u32, rel_prec: u32) -> Result<Self> {
        check_prime(p)?;
        let parts: Vec<&str> = text.split(';').collect();
        if parts.len() != 4 {
            return Err(Error::Syntax {
                pos: 0,
                msg: format!("expected 4 `;`-separated entries, got {}", parts.len()),
            });
        }
        let e = parts
            .iter()
            .map(|s| parse_series(s, p, rel_prec))
            .collect::<Result<Vec<_>>>()?;
        let [a, b, c, d]: [Series; 4] = e.try_into().unwrap();
        GroupElem::new(a, b, c, d)
    }

    pub fn identity(p: u32, cap: u32) -> Self {
        let one = Series::one(p, cap);
        let zero = Series::exact_zero(p, cap);
        GroupElem {
            m: [one.clone(), zero.clone(), zero, one],
            canonical: true,
        }
    }

    /// `sigma = [[0, 1], [t, 0]]`.
    pub fn sigma(p: u32, cap: u32) -> Self {
        let zero = Series::exact_zero(p, cap);
        GroupElem {
            m: [
                zero.clone(),
                Series::one(p, cap),
                Series::monomial(PrimeField::one(p), 1, cap),
                zero,
            ],
            canonical: false,
        }
    }

    pub fn modulus(&self) -> u32 {
        self.m[0].modulus()
    }

    pub fn cap(&self) -> u32 {
        self.m.iter().map(Series::cap).min().unwrap()
    }

    /// Entry `(i, j)`, zero-based.
    pub fn entry(&self, i: usize, j: usize) -> &Series {
        &self.m[2 * i + j]
    }

    pub fn entries(&self) -> &[Series; 4] {
        &self.m
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    pub fn det(&self) -> Series {
        &(&self.m[0] * &self.m[3]) - &(&self.m[1] * &self.m[2])
    }

    /// Matrix product without canonicalization.
    pub fn mul_raw(&self, h: &GroupElem) -> GroupElem {
        let [a, b, c, d] = &self.m;
        let [e, f, g, k] = &h.m;
        GroupElem {
            m: [
                &(a * e) + &(b * g),
                &(a * f) + &(b * k),
                &(c * e) + &(d * g),
                &(c * f) + &(d * k),
            ],
            canonical: false,
        }
    }

    /// Adjugate, a projective inverse.
    pub fn adjugate(&self) -> GroupElem {
        let [a, b, c, d] = &self.m;
        GroupElem {
            m: [d.clone(), b.neg(), c.neg(), a.clone()],
            canonical: false,
        }
    }

    /// Equality in `PGL_2`: the entry vectors are proportional, i.e. all
    /// cross products `g_i h_j - g_j h_i` vanish within precision.
    pub fn projectively_eq(&self, other: &GroupElem) -> bool {
        if self.modulus() != other.modulus() {
            return false;
        }
        for i in 0..4 {
            for j in i + 1..4 {
                let cross = &(&self.m[i] * &other.m[j]) - &(&self.m[j] * &other.m[i]);
                if !cross.is_zero() {
                    return false;
                }
            }
        }
        // Proportional vectors; rule out the zero vector on one side.
        self.m.iter().any(|e| !e.is_zero()) && other.m.iter().any(|e| !e.is_zero())
    }

    /// Minimal valuation among the entries, certified against entries that
    /// are only known to be zero modulo some power of `t`.
    fn min_valuation(&self) -> Result<i64> {
        let min = self
            .m
            .iter()
            .filter(|e| !e.is_zero())
            .map(|e| e.valuation_lower_bound().unwrap())
            .min()
            .ok_or(Error::Singular)?;
        for e in &self.m {
            if e.is_zero() {
                if let Some(bound) = e.abs_prec() {
                    if bound <= min {
                        return Err(Error::IndeterminateValuation(bound));
                    }
                }
            }
        }
        Ok(min)
    }
}

impl fmt::Display for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            self.m[0], self.m[1], self.m[2], self.m[3]
        )
    }
}

/// Divides by the first entry (row-major) of minimal valuation, which
/// becomes exactly 1; all entries then lie in `O`.
pub fn canonicalize(g: &GroupElem) -> Result<GroupElem> {
    let min = g.min_valuation()?;
    let pivot = g
        .m
        .iter()
        .position(|e| !e.is_zero() && e.valuation_lower_bound() == Some(min))
        .unwrap();
    let inv = g.m[pivot].inv()?;
    let mut m = g.m.clone();
    for (i, e) in m.iter_mut().enumerate() {
        *e = if i == pivot {
            Series::one(g.modulus(), e.cap())
        } else {
            &*e * &inv
        };
    }
    Ok(GroupElem { m, canonical: true })
}

pub fn mat_mul(g: &GroupElem, h: &GroupElem) -> Result<GroupElem> {
    if g.modulus() != h.modulus() {
        return Err(Error::ModulusMismatch(g.modulus(), h.modulus()));
    }
    canonicalize(&g.mul_raw(h))
}

pub fn mat_inv(g: &GroupElem) -> Result<GroupElem> {
    canonicalize(&g.adjugate())
}

/// Coordinates `(a, b, c, d)` of `[[1+ta, b], [tc, 1+td]]` in `I^0`.
#[derive(Clone, Debug, PartialEq)]
pub struct Iwahori0Params {
    pub a: Series,
    pub b: Series,
    pub c: Series,
    pub d: Series,
}

impl Iwahori0Params {
    pub fn new(a: Series, b: Series, c: Series, d: Series) -> Self {
        Iwahori0Params { a, b, c, d }
    }

    pub fn identity(p: u32, cap: u32) -> Self {
        let z = Series::exact_zero(p, cap);
        Iwahori0Params {
            a: z.clone(),
            b: z.clone(),
            c: z.clone(),
            d: z,
        }
    }

    pub fn modulus(&self) -> u32 {
        self.a.modulus()
    }

    pub fn reassemble(&self) -> GroupElem {
        let p = self.modulus();
        let cap = self.a.cap();
        let one = Series::one(p, cap);
        GroupElem {
            m: [
                &one + &self.a.shift(1),
                self.b.clone(),
                self.c.shift(1),
                &one + &self.d.shift(1),
            ],
            canonical: false,
        }
    }

    /// Equality as elements of `I^0` (the coordinates are only defined up
    /// to a scalar in `1 + tO`).
    pub fn same_element(&self, other: &Iwahori0Params) -> bool {
        self.reassemble().projectively_eq(&other.reassemble())
    }
}

/// Membership in `I^0`: scale so the entries lie in `O` with a unit
/// determinant, require an upper-triangular reduction mod `t` with equal
/// nonzero diagonal, then divide by `m22`. The result has `d = 0`.
pub fn iwahori0_params(g: &GroupElem) -> Result<Option<Iwahori0Params>> {
    let shift = -g.min_valuation()?;
    let [m11, m12, m21, m22] = g.m.clone().map(|e| e.shift(shift));
    let det = &(&m11 * &m22) - &(&m12 * &m21);
    if det.valuation()? != Some(0) {
        return Ok(None);
    }
    if !m21.coeff(0)?.is_zero() {
        return Ok(None);
    }
    let d0 = m22.coeff(0)?;
    if d0.is_zero() || m11.coeff(0)? != d0 {
        return Ok(None);
    }
    let p = g.modulus();
    let cap = g.cap();
    let inv = m22.inv()?;
    let a = (&(&m11 * &inv) - &Series::one(p, cap)).shift(-1);
    let b = &m12 * &inv;
    let c = (&m21 * &inv).shift(-1);
    Ok(Some(Iwahori0Params {
        a,
        b,
        c,
        d: Series::exact_zero(p, cap),
    }))
}

/// An element `sigma^sigma_power * i` of `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct AElem {
    pub sigma_power: u8,
    pub iwahori: Iwahori0Params,
}

impl AElem {
    pub fn identity(p: u32, cap: u32) -> Self {
        AElem {
            sigma_power: 0,
            iwahori: Iwahori0Params::identity(p, cap),
        }
    }

    pub fn sigma(p: u32, cap: u32) -> Self {
        AElem {
            sigma_power: 1,
            iwahori: Iwahori0Params::identity(p, cap),
        }
    }

    pub fn from_iwahori(iwahori: Iwahori0Params) -> Self {
        AElem {
            sigma_power: 0,
            iwahori,
        }
    }

    pub fn reassemble(&self) -> GroupElem {
        let i = self.iwahori.reassemble();
        if self.sigma_power == 1 {
            GroupElem::sigma(i.modulus(), i.cap()).mul_raw(&i)
        } else {
            i
        }
    }
}

/// Factors `g` as `sigma^s * i` with `i` in `I^0`, if `g` lies in `A`.
pub fn a_factor(g: &GroupElem) -> Result<Option<AElem>> {
    if let Some(i) = iwahori0_params(g)? {
        return Ok(Some(AElem::from_iwahori(i)));
    }
    // sigma^-1 = sigma in PGL_2
    let s = GroupElem::sigma(g.modulus(), g.cap()).mul_raw(g);
    Ok(iwahori0_params(&s)?.map(|iwahori| AElem {
        sigma_power: 1,
        iwahori,
    }))
}

/// `chi` on `I^0` as a root of unity: `psi(b_0 + c_0)`.
pub fn chi_iwahori(i: &Iwahori0Params) -> Result<UnitRoot> {
    Ok(UnitRoot::psi(i.b.coeff(0)? + i.c.coeff(0)?))
}

pub fn chi_root(x: &AElem, sign: SigmaSign) -> Result<UnitRoot> {
    let r = chi_iwahori(&x.iwahori)?;
    Ok(if x.sigma_power == 1 {
        r * sign.root(r.p)
    } else {
        r
    })
}

pub fn chi_eval(x: &AElem, sign: SigmaSign) -> Result<CycScalar> {
    Ok(chi_root(x, sign)?.to_scalar())
}

/// `[[a, b], [0, 1]]`, a normalized element of `B(K)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BorelForm {
    pub a: Series,
    pub b: Series,
}

impl BorelForm {
    pub fn new(a: Series, b: Series) -> Result<Self> {
        if a.is_zero() {
            return Err(Error::Singular);
        }
        if a.modulus() != b.modulus() {
            return Err(Error::ModulusMismatch(a.modulus(), b.modulus()));
        }
        Ok(BorelForm { a, b })
    }

    pub fn to_matrix(&self) -> GroupElem {
        let p = self.a.modulus();
        let cap = self.a.cap();
        GroupElem {
            m: [
                self.a.clone(),
                self.b.clone(),
                Series::exact_zero(p, cap),
                Series::one(p, cap),
            ],
            canonical: false,
        }
    }
}

pub fn to_borel_form(g: &GroupElem) -> Result<BorelForm> {
    let m21 = g.entry(1, 0);
    if !m21.is_zero() {
        return Err(Error::NotBorel);
    }
    if let Some(bound) = m21.abs_prec() {
        return Err(Error::IndeterminateValuation(bound));
    }
    let m22 = g.entry(1, 1);
    if m22.is_zero() {
        return Err(Error::Singular);
    }
    let inv = m22.inv()?;
    BorelForm::new(g.entry(0, 0) * &inv, g.entry(0, 1) * &inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(text: &str, p: u32) -> Series {
        parse_series(text, p, 8).unwrap()
    }

    fn mat(text: &str, p: u32) -> GroupElem {
        GroupElem::parse(text, p, 8).unwrap()
    }

    fn params(p: u32, a: &str, b: &str, c: &str, d: &str) -> Iwahori0Params {
        Iwahori0Params::new(s(a, p), s(b, p), s(c, p), s(d, p))
    }

    fn assert_entries(g: &GroupElem, expected: [&str; 4]) {
        let p = g.modulus();
        for (e, x) in g.entries().iter().zip(expected) {
            assert!(e.eq_within_precision(&s(x, p)), "{g} vs {expected:?}");
        }
    }

    #[test]
    fn canonical_forms() {
        let g = canonicalize(&mat("t;0;0;t", 3)).unwrap();
        assert_entries(&g, ["1", "0", "0", "1"]);
        let g = canonicalize(&mat("2;0;0;1", 3)).unwrap();
        assert_entries(&g, ["1", "0", "0", "2"]);
        let again = canonicalize(&g).unwrap();
        assert_entries(&again, ["1", "0", "0", "2"]);
        assert!(g.is_canonical());
        // pivot is the first entry of minimal valuation
        let g = canonicalize(&mat("t;t^-1;1;t^-1", 5)).unwrap();
        assert_entries(&g, ["t^2", "1", "t", "1"]);
    }

    #[test]
    fn products_and_inverses() {
        let sigma = GroupElem::sigma(3, 8);
        let sq = mat_mul(&sigma, &sigma).unwrap();
        assert!(sq.projectively_eq(&GroupElem::identity(3, 8)));
        let g = mat("1+t;t^-1;2*t;1", 3);
        assert!(mat_mul(&GroupElem::identity(3, 8), &g).unwrap().projectively_eq(&g));
        let u = mat("1;1;0;1", 5);
        assert_entries(&mat_mul(&u, &u).unwrap(), ["1", "2", "0", "1"]);
        let back = mat_mul(&g, &mat_inv(&g).unwrap()).unwrap();
        assert!(back.projectively_eq(&GroupElem::identity(3, 8)));
    }

    #[test]
    fn singular_matrices_are_rejected() {
        assert_eq!(GroupElem::parse("1;1;1;1", 3, 8).unwrap_err(), Error::Singular);
        assert!(GroupElem::parse("1;1;1", 3, 8).is_err());
    }

    #[test]
    fn borel_forms() {
        let b = to_borel_form(&mat("t;1;0;2", 3)).unwrap();
        assert_eq!(b.a, s("2*t", 3));
        assert_eq!(b.b, s("2", 3));
        let b = to_borel_form(&GroupElem::identity(5, 8)).unwrap();
        assert_eq!((b.a, b.b), (s("1", 5), s("0", 5)));
        assert_eq!(to_borel_form(&mat("1;0;t;1", 3)).unwrap_err(), Error::NotBorel);
    }

    #[test]
    fn iwahori_membership() {
        let i = iwahori0_params(&mat("1+t;1;2*t;1", 3)).unwrap().unwrap();
        assert_eq!(i, params(3, "1", "1", "2", "0"));
        let i = iwahori0_params(&mat("2+2*t;2;4*t;2", 5)).unwrap().unwrap();
        assert_eq!(i, params(5, "1", "1", "2", "0"));
        assert!(iwahori0_params(&GroupElem::sigma(3, 8)).unwrap().is_none());
        // diagonal constants differ
        assert!(iwahori0_params(&mat("1;0;0;2", 3)).unwrap().is_none());
        // lower-left entry is a unit
        assert!(iwahori0_params(&mat("1;0;1;1", 3)).unwrap().is_none());
        // upper-right entry outside O after scaling
        assert!(iwahori0_params(&mat("1;t^-1;0;1", 3)).unwrap().is_none());
    }

    #[test]
    fn reassembly_round_trip() {
        let i = params(5, "1+t", "3+t^4", "2", "4*t");
        let back = iwahori0_params(&i.reassemble()).unwrap().unwrap();
        assert!(back.same_element(&i));
        assert!(back.d.is_exact_zero());
    }

    #[test]
    fn a_factorization() {
        let x = a_factor(&GroupElem::sigma(3, 8)).unwrap().unwrap();
        assert_eq!(x.sigma_power, 1);
        assert!(x.iwahori.same_element(&Iwahori0Params::identity(3, 8)));
        let x = a_factor(&GroupElem::identity(3, 8)).unwrap().unwrap();
        assert_eq!(x.sigma_power, 0);
        assert!(x.iwahori.same_element(&Iwahori0Params::identity(3, 8)));
        assert!(a_factor(&mat("1;t^-1;0;1", 3)).unwrap().is_none());
        let g = GroupElem::sigma(5, 8).mul_raw(&params(5, "2", "1+t", "3", "0").reassemble());
        let x = a_factor(&g).unwrap().unwrap();
        assert_eq!(x.sigma_power, 1);
        assert!(x.reassemble().projectively_eq(&g));
    }

    #[test]
    fn chi_values() {
        let x = AElem::from_iwahori(params(5, "1", "1+2*t", "3", "0"));
        assert_eq!(chi_eval(&x, SigmaSign::Plus).unwrap(), CycScalar::zeta_pow(5, 4));
        assert!(chi_eval(&AElem::identity(5, 8), SigmaSign::Plus).unwrap().is_one());
        assert!(chi_eval(&AElem::sigma(5, 8), SigmaSign::Plus).unwrap().is_one());
        assert_eq!(
            chi_eval(&AElem::sigma(5, 8), SigmaSign::Minus).unwrap(),
            CycScalar::from_int(5, -1)
        );
    }

    #[test]
    fn sigma_sign_parsing() {
        assert_eq!("+1".parse::<SigmaSign>().unwrap(), SigmaSign::Plus);
        assert_eq!("-1".parse::<SigmaSign>().unwrap(), SigmaSign::Minus);
        assert!("0".parse::<SigmaSign>().is_err());
    }
}
