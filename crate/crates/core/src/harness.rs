//! Claim suites, stability sweeps and reports.
//!
//! Every suite is deterministic in its seed and compares exactly. Each
//! report also carries a fingerprint of the computed values (not
//! serialized) so a rerun at higher precision or under the other sign of
//! `chi(sigma)` can be compared value for value.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::cycnum::{CycMatrix, CycScalar};
use crate::error::{Error, Result};
use crate::fqlaurent::{window_polys, PrimeField, Series};
use crate::group::{
    a_factor, chi_iwahori, chi_root, iwahori0_params, AElem, BorelForm, GroupElem,
    Iwahori0Params, SigmaSign,
};
use crate::model::{
    enumerate_representatives, enumerate_torus_classes, evaluate_section, kernel_matrix,
    phi_apply, phi_matrix, phi_row, rep_index, section_coordinate, torus_translate,
    SectionVector, TorusClass,
};
use crate::orbits::{
    cuspidality_witness, decompose_ba, double_coset_scan, reduce_to_representative,
    relevance_bruteforce, relevance_closed_form, reps_connected, DoubleCosetPoint, LevelParams,
    Reduction, DEFAULT_REL_PREC, ENUMERATION_GUARD,
};

/// Every claim with a suite, in report order.
pub const CLAIM_IDS: [&str; 13] = [
    "sigma_normalizes",
    "chi_character",
    "decomposition",
    "cuspidality",
    "hom_dim",
    "relevance_iff",
    "representatives",
    "restriction",
    "dimension_match",
    "kernel_formula",
    "bijectivity",
    "block_partition",
    "equivariance",
];

/// Witness lists keep at most this many entries.
const MAX_WITNESSES: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    #[serde(rename = "pass")]
    Pass,
    #[serde(rename = "fail")]
    Fail,
    #[serde(rename = "pass-with-deviation")]
    PassWithDeviation,
}

impl Status {
    pub fn is_fail(self) -> bool {
        self == Status::Fail
    }

    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::PassWithDeviation => "pass-with-deviation",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClaimReport {
    pub claim: String,
    pub params: Value,
    pub status: Status,
    pub witnesses: Vec<Value>,
    pub notes: String,
    pub seed: u64,
    pub runtime_ms: u64,
    #[serde(skip)]
    pub fingerprint: Vec<String>,
}

impl ClaimReport {
    /// Zeroes the runtime so equal runs serialize byte for byte.
    pub fn without_timing(mut self) -> Self {
        self.runtime_ms = 0;
        self
    }
}

/// Parameters shared by all suites. The scan bounds are used by `hom_dim`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteParams {
    pub p: u32,
    pub k: u32,
    pub n: i64,
    pub n_rel: u32,
    pub m_int: u32,
    pub trials: u32,
    pub chi_sigma: SigmaSign,
    pub n_min: i64,
    pub n_max: i64,
    pub depth: u32,
}

impl SuiteParams {
    /// Defaults: 100 trials, scan over `|n| <= 3` at the largest depth up to
    /// 3 that fits the enumeration guard.
    pub fn new(p: u32, k: u32, n: i64) -> Result<Self> {
        let level = LevelParams::new(p, k, n)?;
        let mut out = SuiteParams {
            p,
            k,
            n,
            n_rel: level.n_rel,
            m_int: level.m_int,
            trials: 100,
            chi_sigma: SigmaSign::Plus,
            n_min: -3,
            n_max: 3,
            depth: 3,
        };
        while out.depth > 1 && out.scan_cost() > ENUMERATION_GUARD {
            out.depth -= 1;
        }
        Ok(out)
    }

    pub fn level(&self) -> Result<LevelParams> {
        Ok(LevelParams::with_precision(self.p, self.k, self.n, self.n_rel, self.m_int)?
            .with_chi_sigma(self.chi_sigma))
    }

    /// `(n_rel + 2, m_int + 2)`.
    pub fn refined(&self) -> Self {
        SuiteParams {
            n_rel: self.n_rel + 2,
            m_int: self.m_int + 2,
            ..*self
        }
    }

    pub fn flipped(&self) -> Self {
        SuiteParams {
            chi_sigma: self.chi_sigma.flipped(),
            ..*self
        }
    }

    fn scan_cost(&self) -> u128 {
        let points = if self.n_min <= self.n_max {
            2 * (self.n_max - self.n_min + 1) as u128 * (self.p as u128 - 1)
        } else {
            0
        };
        points * (self.p as u128).pow(3 * self.depth)
    }
}

/// Collects the outcome of one suite.
struct Outcome {
    failures: Vec<Value>,
    confirmations: Vec<Value>,
    fingerprint: Vec<String>,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            failures: Vec::new(),
            confirmations: Vec::new(),
            fingerprint: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        self.fingerprint.push(ok.to_string());
        if !ok {
            if self.failures.len() < MAX_WITNESSES {
                self.failures.push(witness());
            }
        } else if self.confirmations.len() < MAX_WITNESSES {
            self.confirmations.push(witness());
        }
    }

    fn record(&mut self, value: impl ToString) {
        self.fingerprint.push(value.to_string());
    }

    fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }
}

/// Runs one claim suite.
pub fn run_claim_suite(claim: &str, params: &SuiteParams, seed: u64) -> Result<ClaimReport> {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Outcome::new();
    let level = params.level()?;
    let deviation = match claim {
        "sigma_normalizes" => sigma_normalizes(params, &mut rng, &mut out)?,
        "chi_character" => chi_character(params, &mut rng, &mut out)?,
        "decomposition" => decomposition(params, &mut rng, &mut out)?,
        "cuspidality" => cuspidality(params, &mut rng, &mut out)?,
        "hom_dim" => hom_dim(params, &mut out)?,
        "relevance_iff" => relevance_iff(&level, params, &mut rng, &mut out)?,
        "representatives" => representatives(&level, params, &mut rng, &mut out)?,
        "restriction" => restriction(&level, params, &mut rng, &mut out)?,
        "dimension_match" => dimension_match(&level, &mut out)?,
        "kernel_formula" => kernel_formula(&level, &mut out)?,
        "bijectivity" => bijectivity(&level, &mut out)?,
        "block_partition" => block_partition(&level, &mut out)?,
        "equivariance" => equivariance(&level, params, &mut rng, &mut out)?,
        other => return Err(Error::UnknownClaim(other.to_string())),
    };
    let failed = !out.failures.is_empty();
    let status = match (failed, deviation) {
        (true, _) => Status::Fail,
        (false, true) => Status::PassWithDeviation,
        (false, false) => Status::Pass,
    };
    Ok(ClaimReport {
        claim: claim.to_string(),
        params: serde_json::to_value(params).expect("params serialize"),
        status,
        witnesses: if failed { out.failures } else { out.confirmations },
        notes: out.notes.join("; "),
        seed,
        runtime_ms: start.elapsed().as_millis() as u64,
        fingerprint: out.fingerprint,
    })
}

/// Every claim in [`CLAIM_IDS`] order.
pub fn run_all(params: &SuiteParams, seed: u64) -> Result<Vec<ClaimReport>> {
    CLAIM_IDS
        .iter()
        .map(|c| run_claim_suite(c, params, seed))
        .collect()
}

/// Reruns a suite at `(n_rel + 2, m_int + 2)` and under the other sign of
/// `chi(sigma)`; passes when all three verdicts and value fingerprints agree.
pub fn stability_sweep(claim: &str, params: &SuiteParams, seed: u64) -> Result<ClaimReport> {
    let start = Instant::now();
    let base = run_claim_suite(claim, params, seed)?;
    let mut witnesses = Vec::new();
    for (label, variant) in [("refined", params.refined()), ("chi_sigma_flipped", params.flipped())] {
        let rerun = run_claim_suite(claim, &variant, seed)?;
        if rerun.status != base.status {
            witnesses.push(json!({
                "variant": label,
                "base_status": base.status,
                "rerun_status": rerun.status,
            }));
        }
        if let Some(i) = first_divergence(&base.fingerprint, &rerun.fingerprint) {
            witnesses.push(json!({
                "variant": label,
                "index": i,
                "base": base.fingerprint.get(i),
                "rerun": rerun.fingerprint.get(i),
            }));
        }
    }
    let status = if !witnesses.is_empty() || base.status.is_fail() {
        Status::Fail
    } else {
        Status::Pass
    };
    if witnesses.is_empty() && base.status.is_fail() {
        witnesses = base.witnesses.clone();
    }
    Ok(ClaimReport {
        claim: format!("{claim}/stability"),
        params: base.params.clone(),
        status,
        witnesses,
        notes: format!(
            "base verdict {}; reruns at (n_rel + 2, m_int + 2) and with chi(sigma) flipped; {} values compared",
            base.status.as_str(),
            base.fingerprint.len()
        ),
        seed,
        runtime_ms: start.elapsed().as_millis() as u64,
        fingerprint: base.fingerprint,
    })
}

fn first_divergence(a: &[String], b: &[String]) -> Option<usize> {
    if a.len() != b.len() {
        return Some(a.len().min(b.len()));
    }
    a.iter().zip(b).position(|(x, y)| x != y)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Table,
}

/// A JSON array of reports, or one table line per report.
pub fn emit_report(reports: &[ClaimReport], format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(reports).expect("reports serialize");
            s.push('\n');
            s
        }
        ReportFormat::Table => {
            let mut s = String::new();
            for r in reports {
                let _ = writeln!(
                    s,
                    "{:<28} {:<20} witnesses={:<2} {:>7}ms  {}",
                    r.claim,
                    r.status.as_str(),
                    r.witnesses.len(),
                    r.runtime_ms,
                    if r.notes.is_empty() { "-" } else { &r.notes }
                );
            }
            s
        }
    }
}

// ---------------------------------------------------------------------------
// random elements

fn random_poly(rng: &mut ChaCha8Rng, p: u32, low: i64, len: usize, cap: u32) -> Series {
    let coeffs: Vec<i64> = (0..len).map(|_| rng.gen_range(0..p as i64)).collect();
    Series::from_coeffs(p, low, &coeffs, None, cap)
}

fn random_unit(rng: &mut ChaCha8Rng, p: u32) -> PrimeField {
    PrimeField::new(p, rng.gen_range(1..p as i64))
}

/// Valuation exactly `val`, `len` coefficients.
fn random_nonzero(rng: &mut ChaCha8Rng, p: u32, val: i64, len: usize, cap: u32) -> Series {
    let mut coeffs: Vec<i64> = (0..len).map(|_| rng.gen_range(0..p as i64)).collect();
    coeffs[0] = random_unit(rng, p).value() as i64;
    Series::from_coeffs(p, val, &coeffs, None, cap)
}

fn random_laurent(rng: &mut ChaCha8Rng, p: u32, cap: u32) -> Series {
    if rng.gen_ratio(1, 8) {
        return Series::exact_zero(p, cap);
    }
    let val = rng.gen_range(-2..=2);
    let len = rng.gen_range(1..=3);
    random_nonzero(rng, p, val, len, cap)
}

fn random_iwahori(rng: &mut ChaCha8Rng, p: u32, cap: u32) -> Iwahori0Params {
    let mut part = || random_poly(rng, p, 0, 3, cap);
    Iwahori0Params::new(part(), part(), part(), part())
}

fn random_aelem(rng: &mut ChaCha8Rng, p: u32, cap: u32) -> AElem {
    AElem {
        sigma_power: rng.gen_range(0..2),
        iwahori: random_iwahori(rng, p, cap),
    }
}

fn random_group_elem(rng: &mut ChaCha8Rng, p: u32, cap: u32) -> GroupElem {
    loop {
        let e = [(); 4].map(|_| random_laurent(rng, p, cap));
        let [a, b, c, d] = e;
        if let Ok(g) = GroupElem::new(a, b, c, d) {
            return g;
        }
    }
}

/// `[[A, B], [0, 1]]` with `val(A) = n` and `B` possibly irrelevant.
fn random_borel(rng: &mut ChaCha8Rng, level: &LevelParams, relevant: bool) -> BorelForm {
    let p = level.p;
    let cap = level.n_rel;
    let a = random_nonzero(rng, p, level.n, 3, cap);
    let low = if relevant {
        level.n - level.k as i64 + 1
    } else {
        level.n - level.k as i64 - 1
    };
    let b = random_poly(rng, p, low, level.k as usize + 2, cap);
    BorelForm { a, b }
}

fn random_torus(rng: &mut ChaCha8Rng, p: u32, k: u32, n: i64) -> TorusClass {
    TorusClass {
        n,
        a_lead: random_unit(rng, p),
        unit_tail: (1..k)
            .map(|_| PrimeField::new(p, rng.gen_range(0..p as i64)))
            .collect(),
    }
}

fn scalar_json(x: &CycScalar) -> Value {
    x.to_json()
}

// ---------------------------------------------------------------------------
// suites; each returns whether a documented deviation applies

fn sigma_normalizes(params: &SuiteParams, rng: &mut ChaCha8Rng, out: &mut Outcome) -> Result<bool> {
    let (p, cap) = (params.p, params.n_rel);
    let sigma = GroupElem::sigma(p, cap);
    for _ in 0..params.trials {
        let i = random_iwahori(rng, p, cap);
        let conj = sigma.mul_raw(&i.reassemble()).mul_raw(&sigma.adjugate());
        let swapped = Iwahori0Params::new(i.d.clone(), i.c.clone(), i.b.clone(), i.a.clone());
        let ok = match iwahori0_params(&conj)? {
            Some(c) => c.same_element(&swapped) && chi_iwahori(&c)? == chi_iwahori(&i)?,
            None => false,
        };
        out.check(ok, || json!({"i": i.reassemble().to_string(), "conjugate": conj.to_string()}));
    }
    Ok(false)
}

fn chi_character(params: &SuiteParams, rng: &mut ChaCha8Rng, out: &mut Outcome) -> Result<bool> {
    let (p, cap) = (params.p, params.n_rel);
    let sign = params.chi_sigma;
    let sigma = AElem::sigma(p, cap);
    let sq = chi_root(&sigma, sign)? * chi_root(&sigma, sign)?;
    out.check(sq.is_one(), || json!({"chi(sigma)^2": sq.to_scalar().to_string()}));
    for _ in 0..params.trials {
        let x = random_aelem(rng, p, cap);
        let y = random_aelem(rng, p, cap);
        let prod = x.reassemble().mul_raw(&y.reassemble());
        let ok = match a_factor(&prod)? {
            Some(z) => chi_root(&z, sign)? == chi_root(&x, sign)? * chi_root(&y, sign)?,
            None => false,
        };
        out.check(ok, || {
            json!({"x": x.reassemble().to_string(), "y": y.reassemble().to_string()})
        });
    }
    Ok(false)
}

fn decomposition(params: &SuiteParams, rng: &mut ChaCha8Rng, out: &mut Outcome) -> Result<bool> {
    let (p, cap) = (params.p, params.n_rel);
    let mut cases = [0u32; 3];
    let engineered = [
        // m21 = 0
        ["t^2+t^3", "1+t^-1", "0", "1"],
        // val(m21) > val(m22)
        ["1", "1", "t", "1"],
        // m22 = 0
        ["t", "1", "t", "0"],
        // val(m21) <= val(m22)
        ["1+t", "t^-1", "t^-1", "t^3"],
    ];
    let mut elems: Vec<GroupElem> = engineered
        .iter()
        .map(|e| GroupElem::parse(&e.join(";"), p, cap))
        .collect::<Result<_>>()?;
    elems.extend((0..params.trials).map(|_| random_group_elem(rng, p, cap)));
    for g in &elems {
        let (b, a) = decompose_ba(g)?;
        let case = if g.entry(1, 0).is_exact_zero() {
            0
        } else if a.sigma_power == 0 {
            1
        } else {
            2
        };
        cases[case] += 1;
        let back = b.to_matrix().mul_raw(&a.reassemble());
        let member = a_factor(&a.reassemble())?.is_some() && !b.a.is_zero();
        let ok = member && back.projectively_eq(g);
        out.record(case);
        out.check(ok, || {
            json!({
                "g": g.to_string(),
                "case": case + 1,
                "b": b.to_matrix().to_string(),
                "a": a.reassemble().to_string(),
            })
        });
    }
    for (i, &count) in cases.iter().enumerate() {
        out.check(count > 0, || json!({"case_not_hit": i + 1}));
    }
    out.note(format!(
        "cases hit: {} / {} / {}; case 2 uses g = [[m11 - m12 m21, m12], [0, 1]] * [[1, 0], [m21, 1]] \
         after dividing by m22, since the printed factorization does not multiply back",
        cases[0], cases[1], cases[2]
    ));
    Ok(true)
}

fn cuspidality(params: &SuiteParams, rng: &mut ChaCha8Rng, out: &mut Outcome) -> Result<bool> {
    let (p, cap) = (params.p, params.n_rel);
    for _ in 0..params.trials {
        let n = rng.gen_range(-3..=3);
        let level = LevelParams::with_precision(p, params.k, n, cap, params.m_int)?;
        let relevant = rng.gen_bool(0.5);
        let b = random_borel(rng, &level, relevant);
        let (i, member) = cuspidality_witness(&b)?;
        let ok = matches!(&member, Some((_, chi)) if !chi.is_one());
        out.check(ok, || {
            json!({
                "g": b.to_matrix().to_string(),
                "stabilizer": i.to_string(),
                "chi": member.as_ref().map(|(_, c)| c.to_scalar().to_string()),
            })
        });
    }
    Ok(false)
}

fn hom_dim(params: &SuiteParams, out: &mut Outcome) -> Result<bool> {
    let report = double_coset_scan(params.p, params.n_min, params.n_max, params.depth, params.n_rel)?;
    for r in &report.points {
        out.record(format!("{}:{}:{}", r.point, r.stabilizer_size, r.nontrivial));
    }
    let identity = DoubleCosetPoint::identity(params.p);
    let ok = report.pass_set == [identity];
    let labels = |v: &[DoubleCosetPoint]| v.iter().map(ToString::to_string).collect::<Vec<_>>();
    out.check(ok, || {
        json!({
            "pass_set": labels(&report.pass_set),
            "i0_pass_points": labels(&report.i0_pass_points),
        })
    });
    out.note(format!(
        "scan over {} points at depth {}; pass-set taken at the A x A level",
        report.points.len(),
        report.depth
    ));
    out.note(report.notes);
    Ok(true)
}

fn relevance_iff(
    level: &LevelParams,
    params: &SuiteParams,
    rng: &mut ChaCha8Rng,
    out: &mut Outcome,
) -> Result<bool> {
    let (p, cap) = (level.p, level.n_rel);
    let mut cases = vec![BorelForm {
        a: random_nonzero(rng, p, level.n, 3, cap),
        b: Series::exact_zero(p, cap),
    }];
    for _ in 0..params.trials {
        let relevant = rng.gen_bool(0.5);
        cases.push(random_borel(rng, level, relevant));
    }
    let mut relevant = 0;
    for b in &cases {
        let closed = relevance_closed_form(b, level.k)?;
        let brute = relevance_bruteforce(b, level)?;
        relevant += closed as u32;
        out.record(closed);
        out.check(closed == brute, || {
            json!({"g": b.to_matrix().to_string(), "closed_form": closed, "brute_force": brute})
        });
    }
    out.note(format!(
        "{relevant} of {} orbits relevant; B = 0 counts as relevant (val(0) = +inf)",
        cases.len()
    ));
    Ok(true)
}

fn representatives(
    level: &LevelParams,
    params: &SuiteParams,
    rng: &mut ChaCha8Rng,
    out: &mut Outcome,
) -> Result<bool> {
    let reps = enumerate_representatives(level);
    let pairs = reps.len() as u128 * (reps.len() as u128 - 1) / 2;
    let cost = pairs * (level.p as u128).pow(level.m_int);
    if cost <= ENUMERATION_GUARD / 5 {
        for (i, m1) in reps.iter().enumerate() {
            for m2 in &reps[i + 1..] {
                let linked = reps_connected(m1, m2, level)?;
                out.check(!linked, || json!({"first": m1.to_string(), "second": m2.to_string()}));
            }
        }
        out.note(format!("all {pairs} pairs checked exhaustively"));
    } else {
        for _ in 0..params.trials {
            let i = rng.gen_range(0..reps.len());
            let j = (i + rng.gen_range(1..reps.len())) % reps.len();
            let linked = reps_connected(&reps[i], &reps[j], level)?;
            out.check(!linked, || {
                json!({"first": reps[i].to_string(), "second": reps[j].to_string()})
            });
        }
        out.note(format!("{} random pairs of {pairs} checked", params.trials));
    }
    for _ in 0..params.trials {
        let b = random_borel(rng, level, true);
        let ok = match reduce_to_representative(&b, level)? {
            Reduction::Relevant { rep, corrector } => {
                out.record(&rep);
                let back = b.to_matrix().mul_raw(&corrector.reassemble());
                reps.get(rep_index(&rep)) == Some(&rep)
                    && back.projectively_eq(&rep.to_matrix(level.n_rel))
                    && a_factor(&corrector.reassemble())?.is_some()
            }
            Reduction::Irrelevant => false,
        };
        out.check(ok, || json!({"g": b.to_matrix().to_string()}));
    }
    Ok(false)
}

fn restriction(
    level: &LevelParams,
    params: &SuiteParams,
    rng: &mut ChaCha8Rng,
    out: &mut Outcome,
) -> Result<bool> {
    let (p, cap) = (level.p, level.n_rel);
    let reps = enumerate_representatives(level);
    let f = SectionVector {
        level: *level,
        values: (0..reps.len())
            .map(|_| CycScalar::from_int(p, rng.gen_range(-3..=3)))
            .collect(),
    };
    for m in &reps {
        let v = evaluate_section(&f, &m.to_matrix(cap))?;
        out.check(v == f.value(m), || json!({"rep": m.to_string()}));
    }
    let one = Series::one(p, cap);
    let zero = Series::exact_zero(p, cap);
    for _ in 0..params.trials {
        let m = &reps[rng.gen_range(0..reps.len())];
        let x = random_poly(rng, p, level.k as i64, 3, cap);
        let z = GroupElem::new(&one + &x, zero.clone(), zero.clone(), one.clone())?;
        let a = random_aelem(rng, p, cap);
        let g = z.mul_raw(&m.to_matrix(cap)).mul_raw(&a.reassemble());
        let located = section_coordinate(&g, level)?;
        let value = evaluate_section(&f, &g)?;
        let expected = &f.value(m) * &chi_root(&a, level.chi_sigma)?.to_scalar();
        let ok = located.as_ref().map(|(r, _)| r) == Some(m) && value == expected;
        out.check(ok, || {
            json!({"rep": m.to_string(), "g": g.to_string(), "value": scalar_json(&value)})
        });
    }
    Ok(false)
}

fn dimension_match(level: &LevelParams, out: &mut Outcome) -> Result<bool> {
    let (p, cap) = (level.p, level.n_rel);
    let expected = level.block_size();
    let reps = enumerate_representatives(level);
    let classes = enumerate_torus_classes(level);
    out.record(expected);
    let distinct_reps: BTreeSet<_> = reps.iter().collect();
    let distinct_classes: BTreeSet<_> = classes.iter().collect();
    out.check(
        reps.len() == expected && classes.len() == expected,
        || json!({"reps": reps.len(), "classes": classes.len(), "expected": expected}),
    );
    out.check(
        distinct_reps.len() == expected && distinct_classes.len() == expected,
        || json!({"distinct_reps": distinct_reps.len(), "distinct_classes": distinct_classes.len()}),
    );
    // Units t^n O^x modulo t^(n+k+1): each class has p preimages.
    let mut seen = BTreeSet::new();
    let mut units = 0usize;
    for x in window_polys(p, level.n, level.k as usize + 1, cap) {
        if x.is_zero() || x.valuation()? != Some(level.n) {
            continue;
        }
        units += 1;
        seen.insert(TorusClass::from_series(&x, level.k)?);
    }
    out.check(seen.len() == expected && units == expected * p as usize, || {
        json!({"classes_from_units": seen.len(), "units": units})
    });
    // Borel elements [[a t^n, B], [0, 1]] with B over k + 1 digits from
    // n - k + 1 reduce onto every representative.
    let mut hit = BTreeSet::new();
    for a in PrimeField::units(p) {
        let lead = Series::monomial(a, level.n, cap);
        for b in window_polys(p, level.n - level.k as i64 + 1, level.k as usize + 1, cap) {
            let borel = BorelForm { a: lead.clone(), b };
            if let Reduction::Relevant { rep, .. } = reduce_to_representative(&borel, level)? {
                hit.insert(rep);
            }
        }
    }
    out.check(hit.len() == expected, || json!({"reps_hit": hit.len()}));
    out.note(format!("|R| = |K| = {expected}"));
    Ok(false)
}

fn kernel_formula(level: &LevelParams, out: &mut Outcome) -> Result<bool> {
    let phi = phi_matrix(level)?;
    let kernel = kernel_matrix(level)?;
    for (i, x) in phi.rows.iter().enumerate() {
        for (j, m) in phi.cols.iter().enumerate() {
            let a = phi.entries.get(i, j);
            let b = kernel.entries.get(i, j);
            out.record(a);
            if a != b {
                out.check(false, || {
                    json!({"x": x.to_string(), "rep": m.to_string(), "phi": scalar_json(a), "kernel": scalar_json(b)})
                });
            }
        }
    }
    if out.failures.is_empty() {
        out.check(true, || {
            json!({"entries_compared": phi.rows.len() * phi.cols.len()})
        });
    }
    Ok(false)
}

fn bijectivity(level: &LevelParams, out: &mut Outcome) -> Result<bool> {
    let phi = phi_matrix(level)?;
    for (a, det) in phi.block_dets()? {
        out.record(&det);
        out.check(!det.is_zero(), || json!({"a_lead": a, "det": scalar_json(&det)}));
    }
    if level.p == 2 && level.k == 2 {
        let block = phi.block(PrimeField::one(2));
        let expected = CycMatrix::from_int_rows(2, &[&[1, 1], &[1, -1]]);
        out.check(block == expected, || json!({"block": block.to_json()}));
    }
    Ok(false)
}

fn block_partition(level: &LevelParams, out: &mut Outcome) -> Result<bool> {
    let phi = phi_matrix(level)?;
    out.check(phi.off_block_zero(), || json!({"off_block_nonzero": true}));
    let reps = enumerate_representatives(level);
    for shift in [-1, 1] {
        let other = level.at_block(level.n + shift);
        for x in enumerate_torus_classes(&other) {
            let row = phi_row(level, &x)?;
            let zero = row.iter().all(CycScalar::is_zero);
            out.check(zero, || json!({"x": x.to_string(), "block": level.n}));
        }
        // sections of the neighbouring block vanish on this block's classes
        let f = SectionVector::delta(&other, &enumerate_representatives(&other)[0])?;
        let x = &enumerate_torus_classes(level)[0];
        let v = phi_apply(&f, x)?;
        out.check(v.is_zero(), || json!({"x": x.to_string(), "section_block": other.n}));
    }
    out.note(format!("{} columns, neighbouring blocks n = {} and {}", reps.len(), level.n - 1, level.n + 1));
    Ok(false)
}

fn equivariance(
    level: &LevelParams,
    params: &SuiteParams,
    rng: &mut ChaCha8Rng,
    out: &mut Outcome,
) -> Result<bool> {
    let reps = enumerate_representatives(level);
    for _ in 0..params.trials.clamp(1, 50) {
        let shift = rng.gen_range(-1..=1);
        let y = random_torus(rng, level.p, level.k, shift);
        let target = level.at_block(level.n - y.n);
        let x = random_torus(rng, level.p, level.k, target.n);
        let yx = y.mul(&x)?;
        let row_x = phi_row(&target, &x)?;
        let row_yx = phi_row(level, &yx)?;
        for m in &reps {
            let moved = torus_translate(&SectionVector::delta(level, m)?, &y)?;
            let mut lhs = CycScalar::zero(level.p);
            for (v, r) in moved.values.iter().zip(&row_x) {
                if !v.is_zero() && !r.is_zero() {
                    lhs = &lhs + &(v * r);
                }
            }
            let rhs = &row_yx[rep_index(m)];
            out.record(&lhs);
            out.check(&lhs == rhs, || {
                json!({"y": y.to_string(), "x": x.to_string(), "rep": m.to_string(), "lhs": scalar_json(&lhs), "rhs": scalar_json(rhs)})
            });
        }
    }
    Ok(false)
}

/// Default precision for callers that build levels by hand.
pub fn default_rel_prec(k: u32) -> u32 {
    DEFAULT_REL_PREC.max(k + 3)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_claim_runs_and_passes_small() {
        let mut params = SuiteParams::new(2, 2, 0).unwrap();
        params.trials = 10;
        params.n_min = -1;
        params.n_max = 1;
        params.depth = 2;
        for claim in CLAIM_IDS {
            let r = run_claim_suite(claim, &params, 7).unwrap_or_else(|e| panic!("{claim}: {e}"));
            assert!(!r.status.is_fail(), "{claim}: {:?}", r.witnesses);
        }
    }

    #[test]
    fn statuses_and_errors() {
        let mut params = SuiteParams::new(2, 2, 0).unwrap();
        params.trials = 5;
        let r = run_claim_suite("kernel_formula", &params, 7).unwrap();
        assert_eq!(r.status, Status::Pass);
        let r = run_claim_suite("relevance_iff", &params, 7).unwrap();
        assert_eq!(r.status, Status::PassWithDeviation);
        assert!(matches!(
            run_claim_suite("nope", &params, 7),
            Err(Error::UnknownClaim(_))
        ));
        params.n_rel = 2;
        assert!(matches!(
            run_claim_suite("kernel_formula", &params, 7),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn reports_render() {
        let mut params = SuiteParams::new(3, 1, 0).unwrap();
        params.trials = 3;
        let r = run_claim_suite("decomposition", &params, 1).unwrap().without_timing();
        let table = emit_report(std::slice::from_ref(&r), ReportFormat::Table);
        assert_eq!(table.lines().count(), 1);
        assert!(table.contains("case 2"));
        let json = emit_report(std::slice::from_ref(&r), ReportFormat::Json);
        let back: Vec<ClaimReport> = serde_json::from_str(&json).unwrap();
        assert_eq!(back[0].claim, r.claim);
        assert_eq!(back[0].status, r.status);
        assert_eq!(emit_report(&[], ReportFormat::Table), "");
    }
}
