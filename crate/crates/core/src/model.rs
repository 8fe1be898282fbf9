//! The finite-level representation: sections on `R_{n,k}`, the Whittaker
//! functional, the map `phi` to functions on `K_{n,k}`, and its kernel.
//!
//! Integrals are averages over the Haar measure with `vol(O) = 1`. The
//! unipotent integral runs over `U(K)`; a section at level `k` is supported
//! on `u` in `t^-(k-1) O`, so the sum runs over `u` in
//! `t^-(k-1) O / t^(m_int - k + 1) O` (exactly `m_int` digits) with each point
//! weighing `p^-(m_int - k + 1)`.

use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cycnum::{exact_det, psi, CycMatrix, CycScalar, RootTally, UnitRoot};
use crate::error::{Error, Result};
use crate::fqlaurent::{window_polys, PrimeField, Series};
use crate::group::{chi_root, BorelForm, GroupElem};
use crate::orbits::{decompose_ba, reduce_with_inverse, LevelParams, OrbitRep, Reduction};

/// A point of `K_{n,k} = t^n O^x / (1 + t^k O)`, encoding
/// `a_lead t^n (1 + c_1 t + ... + c_{k-1} t^{k-1})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TorusClass {
    pub n: i64,
    pub a_lead: PrimeField,
    pub unit_tail: Vec<PrimeField>,
}

impl TorusClass {
    pub fn one(p: u32, k: u32) -> Self {
        TorusClass {
            n: 0,
            a_lead: PrimeField::one(p),
            unit_tail: vec![PrimeField::zero(p); k as usize - 1],
        }
    }

    pub fn p(&self) -> u32 {
        self.a_lead.modulus()
    }

    pub fn level_k(&self) -> u32 {
        self.unit_tail.len() as u32 + 1
    }

    /// The polynomial lift `a_lead t^n (1 + c_1 t + ...)`.
    pub fn lift(&self, cap: u32) -> Series {
        let mut coeffs = vec![self.a_lead.value() as i64];
        coeffs.extend(self.unit_tail.iter().map(|c| (self.a_lead * *c).value() as i64));
        Series::from_coeffs(self.p(), self.n, &coeffs, None, cap)
    }

    /// The class of a nonzero `x` modulo `1 + t^k O`.
    pub fn from_series(x: &Series, k: u32) -> Result<Self> {
        let n = x.valuation()?.ok_or(Error::DivisionByZero)?;
        let a_lead = x.leading_coeff().unwrap();
        let a_inv = a_lead.inv()?;
        let unit_tail = (1..k as i64)
            .map(|i| Ok(x.coeff(n + i)? * a_inv))
            .collect::<Result<Vec<_>>>()?;
        Ok(TorusClass {
            n,
            a_lead,
            unit_tail,
        })
    }

    /// Product in `K^x / (1 + t^k O)`.
    pub fn mul(&self, other: &TorusClass) -> Result<TorusClass> {
        let k = self.level_k().min(other.level_k());
        let cap = k + 1;
        TorusClass::from_series(&(&self.lift(cap) * &other.lift(cap)), k)
    }

    /// `diag(x, 1)` for the polynomial lift.
    pub fn diag(&self, cap: u32) -> GroupElem {
        let p = self.p();
        BorelForm {
            a: self.lift(cap),
            b: Series::exact_zero(p, cap),
        }
        .to_matrix()
    }
}

impl fmt::Display for TorusClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K(n={}, a={}, tail=[", self.n, self.a_lead)?;
        for (i, c) in self.unit_tail.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "])")
    }
}

/// Lexicographic enumeration of `(a_lead, digits)` with `a_lead` a unit and
/// `len` digits in `F_p`, the first digit most significant.
fn lead_digit_pairs(p: u32, len: usize) -> impl Iterator<Item = (PrimeField, Vec<PrimeField>)> {
    let per = (p as u64).pow(len as u32);
    PrimeField::units(p).flat_map(move |a| {
        (0..per).map(move |mut idx| {
            let mut digits = vec![PrimeField::zero(p); len];
            for slot in digits.iter_mut().rev() {
                *slot = PrimeField::new(p, (idx % p as u64) as i64);
                idx /= p as u64;
            }
            (a, digits)
        })
    })
}

fn lead_digit_index(a_lead: PrimeField, digits: &[PrimeField]) -> usize {
    let p = a_lead.modulus() as usize;
    let tail = digits.iter().fold(0, |acc, d| acc * p + d.value() as usize);
    (a_lead.value() as usize - 1) * p.pow(digits.len() as u32) + tail
}

pub fn enumerate_representatives(level: &LevelParams) -> Vec<OrbitRep> {
    lead_digit_pairs(level.p, level.k as usize - 1)
        .map(|(a_lead, b_window)| OrbitRep {
            n: level.n,
            a_lead,
            b_window,
        })
        .collect()
}

pub fn enumerate_torus_classes(level: &LevelParams) -> Vec<TorusClass> {
    lead_digit_pairs(level.p, level.k as usize - 1)
        .map(|(a_lead, unit_tail)| TorusClass {
            n: level.n,
            a_lead,
            unit_tail,
        })
        .collect()
}

/// Position of `rep` in [`enumerate_representatives`].
pub fn rep_index(rep: &OrbitRep) -> usize {
    lead_digit_index(rep.a_lead, &rep.b_window)
}

/// Position of `x` in [`enumerate_torus_classes`].
pub fn torus_index(x: &TorusClass) -> usize {
    lead_digit_index(x.a_lead, &x.unit_tail)
}

/// A vector of `V` at level `(n, k)`, stored as its values on `R_{n,k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SectionVector {
    pub level: LevelParams,
    pub values: Vec<CycScalar>,
}

impl SectionVector {
    pub fn zero(level: &LevelParams) -> Self {
        SectionVector {
            level: *level,
            values: vec![CycScalar::zero(level.p); level.block_size()],
        }
    }

    /// The basis vector `delta_M`.
    pub fn delta(level: &LevelParams, rep: &OrbitRep) -> Result<Self> {
        let mut f = Self::zero(level);
        check_rep(level, rep)?;
        f.values[rep_index(rep)] = CycScalar::one(level.p);
        Ok(f)
    }

    pub fn value(&self, rep: &OrbitRep) -> CycScalar {
        if check_rep(&self.level, rep).is_err() {
            return CycScalar::zero(self.level.p);
        }
        self.values[rep_index(rep)].clone()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(CycScalar::is_zero)
    }
}

fn check_rep(level: &LevelParams, rep: &OrbitRep) -> Result<()> {
    if rep.p() != level.p {
        return Err(Error::ModulusMismatch(rep.p(), level.p));
    }
    if rep.n != level.n {
        return Err(Error::LevelMismatch {
            expected: level.n,
            found: rep.n,
        });
    }
    if rep.level_k() != level.k {
        return Err(Error::InvalidParams(format!(
            "representative has level {} but k = {}",
            rep.level_k(),
            level.k
        )));
    }
    Ok(())
}

/// Locates `g` in the model: `f(g) = f(M) * r` for every section `f` at
/// this level. `None` when `g` lies in an irrelevant orbit or in another
/// valuation block.
pub fn section_coordinate(g: &GroupElem, level: &LevelParams) -> Result<Option<(OrbitRep, UnitRoot)>> {
    let (b, a1) = decompose_ba(g)?;
    let Some((rep, r)) = borel_coordinate(&b, level)? else {
        return Ok(None);
    };
    Ok(Some((rep, r * chi_root(&a1, level.chi_sigma)?)))
}

fn borel_coordinate(b: &BorelForm, level: &LevelParams) -> Result<Option<(OrbitRep, UnitRoot)>> {
    borel_coordinate_with(b, None, level)
}

fn borel_coordinate_with(
    b: &BorelForm,
    a_inv: Option<&Series>,
    level: &LevelParams,
) -> Result<Option<(OrbitRep, UnitRoot)>> {
    match reduce_with_inverse(b, a_inv, level) {
        Ok(Reduction::Relevant { rep, corrector }) => {
            Ok(Some((rep, chi_root(&corrector, level.chi_sigma)?.inv())))
        }
        Ok(Reduction::Irrelevant) | Err(Error::LevelMismatch { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// `f(g)`: with `g = b a_1` and `b a_2 = M`, this is
/// `f(M) chi(a_1) chi(a_2)^-1`.
pub fn evaluate_section(f: &SectionVector, g: &GroupElem) -> Result<CycScalar> {
    Ok(match section_coordinate(g, &f.level)? {
        Some((rep, r)) => &f.value(&rep) * &r.to_scalar(),
        None => CycScalar::zero(f.level.p),
    })
}

fn integration_weight(level: &LevelParams) -> BigInt {
    BigInt::from(level.p).pow(level.m_int - level.k + 1)
}

/// Per-representative tallies of `sum_u f_M([[x, x u], [0, 1]]) psi(-u_0)`.
fn phi_tallies(level: &LevelParams, x: &TorusClass) -> Result<Vec<RootTally>> {
    if x.level_k() != level.k {
        return Err(Error::InvalidParams(format!(
            "torus class has level {} but k = {}",
            x.level_k(),
            level.k
        )));
    }
    let p = level.p;
    let cap = level.n_rel;
    let lift = x.lift(cap);
    let lift_inv = lift.inv()?;
    let mut tallies = vec![RootTally::new(p); level.block_size()];
    let low = -(level.k as i64 - 1);
    for u in window_polys(p, low, level.m_int as usize, cap) {
        let b = BorelForm {
            a: lift.clone(),
            b: &lift * &u,
        };
        if let Some((rep, r)) = borel_coordinate_with(&b, Some(&lift_inv), level)? {
            tallies[rep_index(&rep)].push(r * UnitRoot::psi(-u.coeff(0)?));
        }
    }
    Ok(tallies)
}

/// The row `(phi(delta_M)(x))_M`, one pass over the integration domain.
pub fn phi_row(level: &LevelParams, x: &TorusClass) -> Result<Vec<CycScalar>> {
    let den = integration_weight(level);
    Ok(phi_tallies(level, x)?
        .iter()
        .map(|t| t.to_scalar(&den))
        .collect())
}

/// `phi(f)(x) = l(x.f) = int_{U(K)} f([[x, x u], [0, 1]]) psi(-u_0) du`.
/// Vanishes when `x` lies in another valuation block than `f`.
pub fn phi_apply(f: &SectionVector, x: &TorusClass) -> Result<CycScalar> {
    let row = phi_row(&f.level, x)?;
    let mut acc = CycScalar::zero(f.level.p);
    for (v, r) in f.values.iter().zip(&row) {
        if !v.is_zero() && !r.is_zero() {
            acc = &acc + &(v * r);
        }
    }
    Ok(acc)
}

/// `l(f) = int_{U(K)} f(u) psi(-u_0) du`; zero off the `n = 0` block.
pub fn whittaker_functional(f: &SectionVector) -> Result<CycScalar> {
    if f.level.n != 0 {
        return Ok(CycScalar::zero(f.level.p));
    }
    phi_apply(f, &TorusClass::one(f.level.p, f.level.k))
}

/// The average over `U(O)` only: `p^-m_int sum_{u in O / t^m_int}
/// f([[1, u], [0, 1]]) psi(-u_0)`.
pub fn whittaker_functional_integral(f: &SectionVector) -> Result<CycScalar> {
    let level = &f.level;
    let cap = level.n_rel;
    let mut tallies = vec![RootTally::new(level.p); level.block_size()];
    for u in window_polys(level.p, 0, level.m_int as usize, cap) {
        let b = BorelForm {
            a: Series::one(level.p, cap),
            b: u.clone(),
        };
        if let Some((rep, r)) = borel_coordinate(&b, level)? {
            tallies[rep_index(&rep)].push(r * UnitRoot::psi(-u.coeff(0)?));
        }
    }
    let den = BigInt::from(level.p).pow(level.m_int);
    let mut acc = CycScalar::zero(level.p);
    for (v, t) in f.values.iter().zip(&tallies) {
        if !v.is_zero() && !t.is_empty() {
            acc = &acc + &(v * &t.to_scalar(&den));
        }
    }
    Ok(acc)
}

/// `psi(-(b / x)_0)` when `x / a_M` lies in `1 + t O`, else 0.
pub fn kernel_eval(rep: &OrbitRep, x: &TorusClass, cap: u32) -> Result<CycScalar> {
    let p = rep.p();
    if x.n != rep.n || x.a_lead != rep.a_lead {
        return Ok(CycScalar::zero(p));
    }
    let ratio = rep.b_series(cap).checked_div(&x.lift(cap))?;
    Ok(psi(-ratio.coeff(0)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    Phi,
    Kernel,
}

/// Rows indexed by `K_{n,k}`, columns by `R_{n,k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformMatrix {
    pub kind: TransformKind,
    pub level: LevelParams,
    pub rows: Vec<TorusClass>,
    pub cols: Vec<OrbitRep>,
    pub entries: CycMatrix,
}

/// Entry `(x, M) = phi(delta_M)(x)`.
pub fn phi_matrix(level: &LevelParams) -> Result<TransformMatrix> {
    let rows = enumerate_torus_classes(level);
    let cols = enumerate_representatives(level);
    let requested = rows.len() as u128 * (level.p as u128).pow(level.m_int);
    if requested > crate::orbits::ENUMERATION_GUARD {
        return Err(Error::GuardExceeded {
            requested,
            bound: crate::orbits::ENUMERATION_GUARD,
        });
    }
    let data = rows
        .iter()
        .map(|x| phi_row(level, x))
        .collect::<Result<Vec<_>>>()?;
    Ok(TransformMatrix {
        kind: TransformKind::Phi,
        level: *level,
        entries: CycMatrix::from_rows(level.p, data)?,
        rows,
        cols,
    })
}

/// Entry `(x, M) = kernel_eval(M, x)`.
pub fn kernel_matrix(level: &LevelParams) -> Result<TransformMatrix> {
    let rows = enumerate_torus_classes(level);
    let cols = enumerate_representatives(level);
    let data = rows
        .iter()
        .map(|x| cols.iter().map(|m| kernel_eval(m, x, level.n_rel)).collect())
        .collect::<Result<Vec<_>>>()?;
    Ok(TransformMatrix {
        kind: TransformKind::Kernel,
        level: *level,
        entries: CycMatrix::from_rows(level.p, data)?,
        rows,
        cols,
    })
}

impl TransformMatrix {
    /// The square block of rows and columns with this leading coefficient.
    pub fn block(&self, a_lead: PrimeField) -> CycMatrix {
        let rows: Vec<usize> = (0..self.rows.len())
            .filter(|&i| self.rows[i].a_lead == a_lead)
            .collect();
        let cols: Vec<usize> = (0..self.cols.len())
            .filter(|&j| self.cols[j].a_lead == a_lead)
            .collect();
        self.entries.select(&rows, &cols)
    }

    pub fn block_dets(&self) -> Result<Vec<(PrimeField, CycScalar)>> {
        PrimeField::units(self.level.p)
            .map(|a| Ok((a, exact_det(&self.block(a))?)))
            .collect()
    }

    /// Entries with `x.a_lead != M.a_lead` are all zero.
    pub fn off_block_zero(&self) -> bool {
        self.rows.iter().enumerate().all(|(i, x)| {
            self.cols
                .iter()
                .enumerate()
                .all(|(j, m)| x.a_lead == m.a_lead || self.entries.get(i, j).is_zero())
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": self.kind,
            "p": self.level.p,
            "k": self.level.k,
            "n": self.level.n,
            "n_rel": self.level.n_rel,
            "m_int": self.level.m_int,
            "rows": self.rows,
            "cols": self.cols,
            "entries": self.entries.to_json(),
        })
    }

    /// Header row of representative labels, then one labelled row per class.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x\\M");
        for m in &self.cols {
            out.push(',');
            out.push_str(&csv_label(m.a_lead, m.n, &m.b_window));
        }
        out.push('\n');
        for (i, x) in self.rows.iter().enumerate() {
            out.push_str(&csv_label(x.a_lead, x.n, &x.unit_tail));
            for cell in self.entries.row(i) {
                out.push(',');
                out.push_str(&cell.to_csv_cell());
            }
            out.push('\n');
        }
        out
    }
}

fn csv_label(a: PrimeField, n: i64, digits: &[PrimeField]) -> String {
    let digits: Vec<String> = digits.iter().map(ToString::to_string).collect();
    format!("a={a};n={n};[{}]", digits.join(" "))
}

/// `(y.f)(g) = f(diag(y, 1) g)`, a section at block `n - y.n`.
pub fn torus_translate(f: &SectionVector, y: &TorusClass) -> Result<SectionVector> {
    let level = f.level.at_block(f.level.n - y.n);
    let cap = level.n_rel;
    let ylift = y.lift(cap);
    let values = enumerate_representatives(&level)
        .iter()
        .map(|m| {
            let b = m.to_borel(cap);
            let moved = BorelForm {
                a: &ylift * &b.a,
                b: &ylift * &b.b,
            };
            evaluate_section(f, &moved.to_matrix())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SectionVector { level, values })
}
