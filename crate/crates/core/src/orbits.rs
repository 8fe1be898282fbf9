//! Orbit structure of `PGL_2(K)` under `B`, `A` and the congruence tori.
//!
//! * [`decompose_ba`] writes any element as `b * a` with `b` upper
//!   triangular and `a` in `A`.
//! * [`reduce_to_representative`] moves a Borel element into the finite set
//!   `R_{n,k}` of matrices `[[a_n t^n, b_{n-k+1} t^{n-k+1} + ... +
//!   b_{n-1} t^{n-1}], [0, 1]]`, or reports the orbit irrelevant.
//! * [`double_coset_scan`] enumerates truncated `I^0` stabilizers of the
//!   `I^0 x I^0` double cosets and tests the character `(chi, chi)` on them.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::cycnum::{CycScalar, UnitRoot};
use crate::error::{Error, Result};
use crate::fqlaurent::{check_prime, window_polys, PrimeField, Series};
use crate::group::{
    a_factor, chi_iwahori, chi_root, iwahori0_params, to_borel_form, AElem, BorelForm,
    GroupElem, Iwahori0Params, SigmaSign,
};

/// Refuse enumerations beyond this many elementary group operations.
pub const ENUMERATION_GUARD: u128 = 10_000_000;

/// Default session relative precision.
pub const DEFAULT_REL_PREC: u32 = 8;

/// Finite-level parameters: prime, congruence level `k`, valuation block
/// `n`, relative precision, integration depth and the sign of `chi(sigma)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LevelParams {
    pub p: u32,
    pub k: u32,
    pub n: i64,
    pub n_rel: u32,
    pub m_int: u32,
    pub chi_sigma: SigmaSign,
}

impl LevelParams {
    /// Defaults: `n_rel = max(8, k + 3)`, `m_int = k + 2`.
    pub fn new(p: u32, k: u32, n: i64) -> Result<Self> {
        Self::with_precision(p, k, n, DEFAULT_REL_PREC.max(k + 3), k + 2)
    }

    pub fn with_precision(p: u32, k: u32, n: i64, n_rel: u32, m_int: u32) -> Result<Self> {
        check_prime(p)?;
        if k < 1 {
            return Err(Error::InvalidParams("congruence level k must be >= 1".into()));
        }
        if n_rel < k + 3 {
            return Err(Error::InvalidParams(format!(
                "relative precision {n_rel} is below k + 3 = {}",
                k + 3
            )));
        }
        if m_int < k + 1 {
            return Err(Error::InvalidParams(format!(
                "integration depth {m_int} is below k + 1 = {}",
                k + 1
            )));
        }
        Ok(LevelParams {
            p,
            k,
            n,
            n_rel,
            m_int,
            chi_sigma: SigmaSign::Plus,
        })
    }

    /// Same level at `(n_rel + 2, m_int + 2)`.
    pub fn refined(&self) -> Self {
        LevelParams {
            n_rel: self.n_rel + 2,
            m_int: self.m_int + 2,
            ..*self
        }
    }

    pub fn with_chi_sigma(self, chi_sigma: SigmaSign) -> Self {
        LevelParams { chi_sigma, ..self }
    }

    /// The same `(p, k)` and precision at another block `n`.
    pub fn at_block(&self, n: i64) -> Self {
        LevelParams { n, ..*self }
    }

    /// `|R_{n,k}| = |K_{n,k}| = (p - 1) p^(k - 1)`.
    pub fn block_size(&self) -> usize {
        (self.p as usize - 1) * (self.p as usize).pow(self.k - 1)
    }
}

/// A point of `R_{n,k}`: `[[a_lead t^n, sum b_i t^i], [0, 1]]` with the
/// window `(b_{n-k+1}, ..., b_{n-1})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct OrbitRep {
    pub n: i64,
    pub a_lead: PrimeField,
    pub b_window: Vec<PrimeField>,
}

impl OrbitRep {
    pub fn p(&self) -> u32 {
        self.a_lead.modulus()
    }

    /// `k`, recovered from the window length.
    pub fn level_k(&self) -> u32 {
        self.b_window.len() as u32 + 1
    }

    pub fn b_series(&self, cap: u32) -> Series {
        let coeffs: Vec<i64> = self.b_window.iter().map(|c| c.value() as i64).collect();
        let low = self.n - self.b_window.len() as i64;
        Series::from_coeffs(self.p(), low, &coeffs, None, cap)
    }

    pub fn to_borel(&self, cap: u32) -> BorelForm {
        BorelForm {
            a: Series::monomial(self.a_lead, self.n, cap),
            b: self.b_series(cap),
        }
    }

    pub fn to_matrix(&self, cap: u32) -> GroupElem {
        self.to_borel(cap).to_matrix()
    }
}

impl fmt::Display for OrbitRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "R(n={}, a={}, b=[", self.n, self.a_lead)?;
        for (i, b) in self.b_window.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, "])")
    }
}

/// Writes `g = b * a` with `b` in `B(K)` and `a` in `A`.
///
/// * `m21 = 0`: `g` is already Borel.
/// * `val(m21) > val(m22)`: after dividing by `m22`,
///   `g = [[m11 - m12 m21, m12], [0, 1]] * [[1, 0], [m21, 1]]`.
/// * otherwise (including `m22 = 0`): after scaling to `m21 = t`,
///   `g = [[m12 - m11 m22 / t, m11 / t], [0, 1]] * sigma * [[1, m22 / t], [0, 1]]`.
pub fn decompose_ba(g: &GroupElem) -> Result<(BorelForm, AElem)> {
    let p = g.modulus();
    let cap = g.cap();
    let [m11, m12, m21, m22] = g.entries();
    if m21.is_exact_zero() {
        return Ok((to_borel_form(g)?, AElem::identity(p, cap)));
    }
    let v21 = m21.valuation()?.expect("nonzero entry has a valuation");
    let zero = Series::exact_zero(p, cap);
    match m22.valuation()? {
        Some(v22) if v21 > v22 => {
            let inv = m22.inv()?;
            let y = m12 * &inv;
            let c = m21 * &inv;
            let x = &(m11 * &inv) - &(&y * &c);
            let iw = Iwahori0Params::new(zero.clone(), zero.clone(), c.shift(-1), zero);
            Ok((borel(x, y)?, AElem::from_iwahori(iw)))
        }
        _ => {
            let scale = Series::monomial(PrimeField::one(p), 1, cap).checked_div(m21)?;
            let n11 = m11 * &scale;
            let n12 = m12 * &scale;
            let n22 = m22 * &scale;
            let y = n11.shift(-1);
            let x = &n12 - &(&n11 * &n22).shift(-1);
            let iw = Iwahori0Params::new(zero.clone(), n22.shift(-1), zero.clone(), zero);
            Ok((
                borel(x, y)?,
                AElem {
                    sigma_power: 1,
                    iwahori: iw,
                },
            ))
        }
    }
}

fn borel(a: Series, b: Series) -> Result<BorelForm> {
    if a.is_zero() {
        return Err(match a.abs_prec() {
            Some(bound) => Error::IndeterminateValuation(bound),
            None => Error::Singular,
        });
    }
    BorelForm::new(a, b)
}

/// Outcome of [`reduce_to_representative`].
#[derive(Clone, Debug, PartialEq)]
pub enum Reduction {
    /// `input * corrector = rep`, with the corrector in `I^0 ∩ B`.
    Relevant { rep: OrbitRep, corrector: Box<AElem> },
    /// `B` has a nonzero coefficient below degree `n - k + 1`.
    Irrelevant,
}

/// Right-multiplies `[[A, B], [0, 1]]` by `[[a_n t^n / A, -B_hi / A], [0, 1]]`
/// where `B_hi` collects the terms of `B` of degree `>= n`, landing on the
/// window representative.
pub fn reduce_to_representative(b: &BorelForm, level: &LevelParams) -> Result<Reduction> {
    reduce_with_inverse(b, None, level)
}

/// [`reduce_to_representative`] with `1 / A` supplied by a caller that
/// reduces many elements sharing the same `A`.
pub fn reduce_with_inverse(
    b: &BorelForm,
    a_inv: Option<&Series>,
    level: &LevelParams,
) -> Result<Reduction> {
    let n = level.n;
    let p = level.p;
    let cap = b.a.cap();
    let va = b.a.valuation()?.ok_or(Error::Singular)?;
    if va != n {
        return Err(Error::LevelMismatch {
            expected: n,
            found: va,
        });
    }
    let low = n - level.k as i64 + 1;
    let window = b.b.low_part(n)?;
    if !window.is_zero() && window.valuation()?.unwrap() < low {
        return Ok(Reduction::Irrelevant);
    }
    let a_lead = b.a.leading_coeff().unwrap();
    let b_window = (low..n)
        .map(|i| window.coeff(i))
        .collect::<Result<Vec<_>>>()?;
    let owned;
    let inv = match a_inv {
        Some(inv) => inv,
        None => {
            owned = b.a.inv()?;
            &owned
        }
    };
    let alpha = &Series::monomial(a_lead, n, cap) * inv;
    let high = &b.b - &window;
    let beta = (&high * inv).neg();
    let zero = Series::exact_zero(p, cap);
    let corrector = AElem::from_iwahori(Iwahori0Params::new(
        (&alpha - &Series::one(p, cap)).shift(-1),
        beta,
        zero.clone(),
        zero,
    ));
    Ok(Reduction::Relevant {
        rep: OrbitRep { n, a_lead, b_window },
        corrector: Box::new(corrector),
    })
}

/// Relevance of the orbit of `[[A, B], [0, 1]]` under `(1 + t^k O) x A`:
/// `B = 0` or `val(B / A) >= -k + 1`.
pub fn relevance_closed_form(b: &BorelForm, k: u32) -> Result<bool> {
    let va = b.a.valuation()?.ok_or(Error::Singular)?;
    let floor = va - k as i64 + 1;
    if b.b.is_exact_zero() {
        return Ok(true);
    }
    if b.b.is_zero() {
        let bound = b.b.abs_prec().unwrap();
        return if bound >= floor {
            Ok(true)
        } else {
            Err(Error::IndeterminateValuation(bound))
        };
    }
    Ok(b.b.valuation()?.unwrap() >= floor)
}

/// Ground truth for [`relevance_closed_form`]: for every truncated
/// `z = diag(1 + t^k x, 1)`, `x` in `O / t^m_int`, the element
/// `g^-1 z^-1 g` must have trivial `chi` whenever it lies in `A`.
pub fn relevance_bruteforce(b: &BorelForm, level: &LevelParams) -> Result<bool> {
    Ok(relevance_witness(b, level)?.is_none())
}

/// The first `x` whose stabilizer element has nontrivial `chi`.
pub fn relevance_witness(b: &BorelForm, level: &LevelParams) -> Result<Option<Series>> {
    let p = level.p;
    let cap = b.a.cap();
    let g = b.to_matrix();
    let g_adj = g.adjugate();
    let one = Series::one(p, cap);
    let zero = Series::exact_zero(p, cap);
    for x in window_polys(p, 0, level.m_int as usize, cap) {
        let w = &one + &x.shift(level.k as i64);
        // diag(w, 1)^-1 = diag(1, w) projectively
        let z_inv = GroupElem::new(one.clone(), zero.clone(), zero.clone(), w)?;
        let i = g_adj.mul_raw(&z_inv).mul_raw(&g);
        if let Some(a) = a_factor(&i)? {
            if !chi_root(&a, SigmaSign::Plus)?.is_one() {
                return Ok(Some(x));
            }
        }
    }
    Ok(None)
}

/// Whether two representatives are joined by some `z = diag(1 + t^k x, 1)`
/// with `x` in `O / t^m_int` and some `a` in `A`: `z * first * a = second`.
pub fn reps_connected(first: &OrbitRep, second: &OrbitRep, level: &LevelParams) -> Result<bool> {
    let p = level.p;
    let cap = level.n_rel;
    let m1 = first.to_matrix(cap);
    let m2 = second.to_matrix(cap);
    let one = Series::one(p, cap);
    let zero = Series::exact_zero(p, cap);
    for x in window_polys(p, 0, level.m_int as usize, cap) {
        let w = &one + &x.shift(level.k as i64);
        let z = GroupElem::new(w, zero.clone(), zero.clone(), one.clone())?;
        let candidate = z.mul_raw(&m1).adjugate().mul_raw(&m2);
        if a_factor(&candidate)?.is_some() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// For `g = [[a, b], [0, 1]]` and `u = a`, the element
/// `g^-1 [[1, u], [0, 1]] g = [[1, 1], [0, 1]]` lies in `I^0` with
/// `chi = psi(1) != 1`, so no orbit of `U(K) x A` carries an invariant
/// functional. Returns the stabilizer element and its character.
pub fn cuspidality_witness(b: &BorelForm) -> Result<(GroupElem, Option<(Iwahori0Params, UnitRoot)>)> {
    let p = b.a.modulus();
    let cap = b.a.cap();
    let g = b.to_matrix();
    let u = GroupElem::new(
        Series::one(p, cap),
        b.a.clone(),
        Series::exact_zero(p, cap),
        Series::one(p, cap),
    )?;
    let i = g.adjugate().mul_raw(&u).mul_raw(&g);
    let member = match iwahori0_params(&i)? {
        Some(params) => {
            let chi = chi_iwahori(&params)?;
            Some((params, chi))
        }
        None => None,
    };
    Ok((i, member))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CosetShape {
    Diagonal,
    Antidiagonal,
}

/// `diag(a t^n, 1)` or `[[0, a t^n], [1, 0]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DoubleCosetPoint {
    pub shape: CosetShape,
    pub n: i64,
    pub a_lead: PrimeField,
}

impl DoubleCosetPoint {
    pub fn identity(p: u32) -> Self {
        DoubleCosetPoint {
            shape: CosetShape::Diagonal,
            n: 0,
            a_lead: PrimeField::one(p),
        }
    }

    pub fn to_matrix(&self, cap: u32) -> GroupElem {
        let p = self.a_lead.modulus();
        let at = Series::monomial(self.a_lead, self.n, cap);
        let zero = Series::exact_zero(p, cap);
        let one = Series::one(p, cap);
        match self.shape {
            CosetShape::Diagonal => GroupElem::new(at, zero.clone(), zero, one),
            CosetShape::Antidiagonal => GroupElem::new(zero.clone(), at, one, zero),
        }
        .expect("double coset points are invertible")
    }

    /// Label of the `A x A` double coset containing this point, given as
    /// its diagonal point with `n >= 0` (and the smaller of `a`, `a^-1`
    /// when `n = 0`). Uses `sigma diag(a t^m, 1) = antidiag(a^-1 t^(-m-1))`
    /// and `sigma diag(a t^m, 1) sigma = diag(a^-1 t^-m, 1)`.
    pub fn aa_orbit(&self) -> DoubleCosetPoint {
        let inv = self.a_lead.inv().expect("a_lead is a unit");
        let (a, n) = match self.shape {
            CosetShape::Diagonal => (self.a_lead, self.n),
            CosetShape::Antidiagonal => (inv, -self.n - 1),
        };
        let a_inv = a.inv().unwrap();
        let (a, n) = if n < 0 || (n == 0 && a_inv < a) {
            (a_inv, -n)
        } else {
            (a, n)
        };
        DoubleCosetPoint {
            shape: CosetShape::Diagonal,
            n,
            a_lead: a,
        }
    }
}

impl fmt::Display for DoubleCosetPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shape = match self.shape {
            CosetShape::Diagonal => "diag",
            CosetShape::Antidiagonal => "antidiag",
        };
        write!(f, "{shape}(a={}, n={})", self.a_lead, self.n)
    }
}

/// `chi(g h g^-1) * chi(h)^-1` when `g h g^-1` lies in `I^0`, otherwise
/// `None`. A `(chi, chi)`-equivariant distribution at `g` is multiplied by
/// this factor under the stabilizer pair determined by `h`.
pub fn double_coset_multiplier(
    g: &DoubleCosetPoint,
    h: &Iwahori0Params,
) -> Result<Option<CycScalar>> {
    let cap = h.a.cap();
    let gm = g.to_matrix(cap);
    Ok(multiplier_root(&gm, &gm.adjugate(), h)?.map(UnitRoot::to_scalar))
}

fn multiplier_root(g: &GroupElem, g_adj: &GroupElem, h: &Iwahori0Params) -> Result<Option<UnitRoot>> {
    let conj = g.mul_raw(&h.reassemble()).mul_raw(g_adj);
    match iwahori0_params(&conj)? {
        Some(c) => Ok(Some(chi_iwahori(&c)? * chi_iwahori(h)?.inv())),
        None => Ok(None),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanWitness {
    /// `(a, b, c, d)` of the stabilizer element `h`.
    pub h: [String; 4],
    pub multiplier: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointResult {
    pub point: DoubleCosetPoint,
    pub aa_orbit: DoubleCosetPoint,
    /// Truncated `h` with `g h g^-1` in `I^0`.
    pub stabilizer_size: u64,
    /// Those among them with a nontrivial multiplier.
    pub nontrivial: u64,
    pub passes: bool,
    pub witness: Option<ScanWitness>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanReport {
    pub p: u32,
    pub n_min: i64,
    pub n_max: i64,
    pub depth: u32,
    pub points: Vec<PointResult>,
    /// `I^0 x I^0` points whose stabilizer character is trivial.
    pub i0_pass_points: Vec<DoubleCosetPoint>,
    /// `A x A` double cosets all of whose scanned points pass.
    pub pass_set: Vec<DoubleCosetPoint>,
    pub notes: String,
}

/// Scans every double coset point with `n_min <= n <= n_max`, enumerating
/// `h` with `a, b, c` in `O / t^depth` and `d = 0` (every element of `I^0`
/// has such coordinates).
pub fn double_coset_scan(
    p: u32,
    n_min: i64,
    n_max: i64,
    depth: u32,
    rel_prec: u32,
) -> Result<ScanReport> {
    check_prime(p)?;
    if depth < 1 {
        return Err(Error::InvalidParams("scan depth must be >= 1".into()));
    }
    let mut points = Vec::new();
    if n_min <= n_max {
        for shape in [CosetShape::Diagonal, CosetShape::Antidiagonal] {
            for n in n_min..=n_max {
                for a_lead in PrimeField::units(p) {
                    points.push(DoubleCosetPoint { shape, n, a_lead });
                }
            }
        }
    }
    let per_point = (p as u128).pow(3 * depth);
    let requested = per_point * points.len() as u128;
    if requested > ENUMERATION_GUARD {
        return Err(Error::GuardExceeded {
            requested,
            bound: ENUMERATION_GUARD,
        });
    }
    let window: Vec<Series> = window_polys(p, 0, depth as usize, rel_prec).collect();
    let zero = Series::exact_zero(p, rel_prec);
    let mut results = Vec::with_capacity(points.len());
    for point in points {
        let g = point.to_matrix(rel_prec);
        let g_adj = g.adjugate();
        let mut stabilizer_size = 0;
        let mut nontrivial = 0;
        let mut witness = None;
        for a in &window {
            for b in &window {
                for c in &window {
                    let h = Iwahori0Params::new(a.clone(), b.clone(), c.clone(), zero.clone());
                    let Some(m) = multiplier_root(&g, &g_adj, &h)? else {
                        continue;
                    };
                    stabilizer_size += 1;
                    if !m.is_one() {
                        nontrivial += 1;
                        if witness.is_none() {
                            witness = Some(ScanWitness {
                                h: [a, b, c, &zero].map(ToString::to_string),
                                multiplier: m.to_scalar().to_string(),
                            });
                        }
                    }
                }
            }
        }
        results.push(PointResult {
            point,
            aa_orbit: point.aa_orbit(),
            stabilizer_size,
            nontrivial,
            passes: nontrivial == 0,
            witness,
        });
    }
    let i0_pass_points = results
        .iter()
        .filter(|r| r.passes)
        .map(|r| r.point)
        .collect();
    let mut by_orbit: BTreeMap<DoubleCosetPoint, bool> = BTreeMap::new();
    for r in &results {
        *by_orbit.entry(r.aa_orbit).or_insert(true) &= r.passes;
    }
    let pass_set = by_orbit
        .into_iter()
        .filter_map(|(orbit, ok)| ok.then_some(orbit))
        .collect();
    Ok(ScanReport {
        p,
        n_min,
        n_max,
        depth,
        points: results,
        i0_pass_points,
        pass_set,
        notes: SCAN_NOTES.to_string(),
    })
}

const SCAN_NOTES: &str = "multiplier convention chi(g h g^-1) * chi(h)^-1; \
under it the n = 0 diagonal point passes for a = 1 only (a literal sum of the \
two characters would single out a = -1 instead). sigma = antidiag(1, -1) \
normalizes I^0 and preserves chi, so it passes at the I^0 level and lies in \
the A x A double coset of the identity.";
