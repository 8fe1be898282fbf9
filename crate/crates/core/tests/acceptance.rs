//! End-to-end acceptance run. Prints one line per criterion and exits
//! nonzero if any criterion fails. Every comparison is exact.

use std::process::ExitCode;
use std::time::Instant;

use cuspidal_whittaker::cycnum::{exact_det, CycMatrix, CycScalar};
use cuspidal_whittaker::fqlaurent::{PrimeField, SUPPORTED_PRIMES};
use cuspidal_whittaker::harness::{run_claim_suite, ClaimReport, SuiteParams};
use cuspidal_whittaker::model::{
    enumerate_representatives, enumerate_torus_classes, kernel_matrix, phi_matrix,
};
use cuspidal_whittaker::orbits::LevelParams;

#[derive(Clone, Copy, PartialEq)]
enum Variant {
    Base,
    Refined,
    Flipped,
}

impl Variant {
    fn level(self, l: LevelParams) -> LevelParams {
        match self {
            Variant::Base => l,
            Variant::Refined => l.refined(),
            Variant::Flipped => l.with_chi_sigma(l.chi_sigma.flipped()),
        }
    }

    fn suite(self, s: SuiteParams) -> SuiteParams {
        match self {
            Variant::Base => s,
            Variant::Refined => s.refined(),
            Variant::Flipped => s.flipped(),
        }
    }
}

struct Outcome {
    title: &'static str,
    ok: bool,
    detail: String,
    values: Vec<String>,
    secs: f64,
}

impl Outcome {
    fn new(title: &'static str) -> Self {
        Outcome {
            title,
            ok: true,
            detail: String::new(),
            values: Vec::new(),
            secs: 0.0,
        }
    }

    fn absorb(&mut self, report: &ClaimReport) {
        if report.status.is_fail() {
            self.ok = false;
            eprintln!("  {} failed: {:?}", report.claim, report.witnesses);
        }
        self.values.push(format!("{}:{:?}", report.claim, report.status));
        self.values.extend(report.fingerprint.iter().cloned());
    }
}

/// Criteria 1 to 3 share the matrices of every level.
fn matrix_criteria(variant: Variant) -> [Outcome; 3] {
    let start = Instant::now();
    let mut kernel = Outcome::new("kernel formula");
    let mut bij = Outcome::new("bijectivity");
    let mut dims = Outcome::new("dimension match");
    let (mut levels, mut entries, mut blocks) = (0, 0, 0);
    for p in [2, 3, 5] {
        for k in 1..=3 {
            for n in -2..=2 {
                let level = variant.level(LevelParams::new(p, k, n).unwrap());
                let phi = phi_matrix(&level).unwrap();
                let ker = kernel_matrix(&level).unwrap();
                levels += 1;
                entries += phi.rows.len() * phi.cols.len();
                if phi.entries != ker.entries || phi.rows != ker.rows || phi.cols != ker.cols {
                    kernel.ok = false;
                    eprintln!("  phi != kernel at p={p} k={k} n={n}");
                }
                kernel.values.extend(
                    (0..phi.rows.len())
                        .flat_map(|i| phi.entries.row(i).iter().map(ToString::to_string)),
                );

                for (a, det) in phi.block_dets().unwrap() {
                    blocks += 1;
                    if det.is_zero() {
                        bij.ok = false;
                        eprintln!("  singular block a={a} at p={p} k={k} n={n}");
                    }
                    bij.values.push(det.to_string());
                }
                if p == 2 && k == 2 {
                    let block = phi.block(PrimeField::one(2));
                    let expected = CycMatrix::from_int_rows(2, &[&[1, 1], &[1, -1]]);
                    let det = exact_det(&block).unwrap();
                    if block != expected || det != CycScalar::from_int(2, -2) {
                        bij.ok = false;
                        eprintln!("  p=2 k=2 n={n} block is {:?}", block.to_csv());
                    }
                }

                let size = (p as usize - 1) * (p as usize).pow(k - 1);
                let reps = enumerate_representatives(&level).len();
                let classes = enumerate_torus_classes(&level).len();
                if reps != size || classes != size || phi.rows.len() != size || phi.cols.len() != size {
                    dims.ok = false;
                    eprintln!("  size mismatch at p={p} k={k} n={n}: {reps} {classes} {size}");
                }
                dims.values.push(format!("{reps}/{classes}"));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    kernel.detail = format!("phi = kernel entrywise on {levels} levels, {entries} entries");
    bij.detail = format!("{blocks} leading-coefficient blocks nonsingular; p=2 k=2 block [[1,1],[1,-1]], det -2");
    dims.detail = format!("|R| = |K| = (p-1)p^(k-1) on {levels} levels");
    for o in [&mut kernel, &mut bij, &mut dims] {
        o.secs = secs;
    }
    [kernel, bij, dims]
}

fn suite_criterion(
    title: &'static str,
    claim: &str,
    configs: &[SuiteParams],
    variant: Variant,
    detail: impl Fn(&[ClaimReport]) -> String,
) -> Outcome {
    let start = Instant::now();
    let mut out = Outcome::new(title);
    let mut reports = Vec::new();
    for (i, params) in configs.iter().enumerate() {
        let report = run_claim_suite(claim, &variant.suite(*params), 1000 + i as u64).unwrap();
        out.absorb(&report);
        reports.push(report);
    }
    out.detail = detail(&reports);
    out.secs = start.elapsed().as_secs_f64();
    out
}

fn params(p: u32, k: u32, n: i64, trials: u32) -> SuiteParams {
    let mut s = SuiteParams::new(p, k, n).unwrap();
    s.trials = trials;
    s
}

fn criteria(variant: Variant) -> Vec<Outcome> {
    let mut out: Vec<Outcome> = matrix_criteria(variant).into_iter().collect();

    let decomposition: Vec<_> = SUPPORTED_PRIMES.iter().map(|&p| params(p, 2, 0, 1000)).collect();
    out.push(suite_criterion("decomposition", "decomposition", &decomposition, variant, |r| {
        let notes: Vec<&str> = r.iter().map(|r| r.notes.split(';').next().unwrap_or("")).collect();
        format!("1000 random elements per p in {SUPPORTED_PRIMES:?} multiply back ({})", notes.join(", "))
    }));

    let mut uniqueness = Vec::new();
    for p in [2, 3] {
        for k in 1..=2 {
            for n in -1..=1 {
                uniqueness.push(params(p, k, n, 100));
            }
        }
    }
    out.push(suite_criterion("representative uniqueness", "representatives", &uniqueness, variant, |r| {
        let exhaustive = r.iter().all(|r| r.notes.contains("exhaustively"));
        format!(
            "p in {{2,3}}, k <= 2, M = k + 2: no two representatives connected (exhaustive: {exhaustive}); 100 relevant elements per level reduce into the list"
        )
    }));

    let cusp: Vec<_> = [2, 3, 5].iter().map(|&p| params(p, 2, 0, 100)).collect();
    out.push(suite_criterion("cuspidality witnesses", "cuspidality", &cusp, variant, |_| {
        "100 random Borel elements per p in {2,3,5}: stabilizer in I^0 with chi != 1".into()
    }));

    let scans: Vec<_> = [2, 3]
        .iter()
        .map(|&p| {
            let mut s = params(p, 1, 0, 1);
            s.n_min = -3;
            s.n_max = 3;
            s.depth = 3;
            s
        })
        .collect();
    out.push(suite_criterion("irreducibility scan", "hom_dim", &scans, variant, |r| {
        let sets: Vec<String> = r
            .iter()
            .map(|r| {
                let set = r.witnesses[0]["pass_set"].clone();
                format!("p={}: {}", r.params["p"], set)
            })
            .collect();
        format!("|n| <= 3, depth 3, pass-set {}", sets.join("; "))
    }));

    let equi = vec![
        params(2, 2, 0, 50),
        params(3, 2, 1, 50),
        params(5, 2, -1, 50),
        params(3, 3, 0, 50),
    ];
    out.push(suite_criterion("equivariance", "equivariance", &equi, variant, |_| {
        "50 random translations on the full delta basis at 4 levels".into()
    }));
    out
}

fn main() -> ExitCode {
    let total = Instant::now();
    let base = criteria(Variant::Base);
    for (i, o) in base.iter().enumerate() {
        println!(
            "criterion {} [{}] {}: {} ({:.1} s)",
            i + 1,
            if o.ok { "PASS" } else { "FAIL" },
            o.title,
            o.detail,
            o.secs
        );
    }

    let start = Instant::now();
    let mut stable = true;
    let mut compared = 0;
    for (label, variant) in [("(N_rel+2, M_int+2)", Variant::Refined), ("chi(sigma) = -1", Variant::Flipped)] {
        for (b, v) in base.iter().zip(criteria(variant)) {
            compared += b.values.len();
            if b.ok != v.ok || b.values != v.values {
                stable = false;
                eprintln!("  {} changed under {label}", b.title);
            }
        }
    }
    println!(
        "criterion 9 [{}] stability: verdicts and {} values of criteria 1-8 unchanged at (N_rel+2, M_int+2) and under chi(sigma) = -1 ({:.1} s)",
        if stable { "PASS" } else { "FAIL" },
        compared,
        start.elapsed().as_secs_f64()
    );

    let all = stable && base.iter().all(|o| o.ok);
    println!(
        "acceptance: {} ({:.1} s)",
        if all { "all criteria pass" } else { "FAILED" },
        total.elapsed().as_secs_f64()
    );
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
