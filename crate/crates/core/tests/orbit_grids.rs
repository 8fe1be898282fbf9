use cuspidal_whittaker::fqlaurent::{window_polys, PrimeField, Series};
use cuspidal_whittaker::group::{iwahori0_params, BorelForm};
use cuspidal_whittaker::model::enumerate_representatives;
use cuspidal_whittaker::orbits::{
    double_coset_scan, reduce_to_representative, relevance_bruteforce, relevance_closed_form,
    DoubleCosetPoint, LevelParams, Reduction,
};

fn leading_parts(p: u32, n: i64, cap: u32) -> Vec<Series> {
    let mut out: Vec<Series> = PrimeField::units(p)
        .map(|a| Series::monomial(a, n, cap))
        .collect();
    out.push(Series::from_coeffs(p, n, &[1, 1], None, cap));
    out
}

#[test]
fn relevance_closed_form_matches_bruteforce_on_grids() {
    let mut zero_cases = 0;
    for p in [2, 3] {
        for k in 1..=2 {
            for n in -1..=1 {
                let level = LevelParams::new(p, k, n).unwrap();
                let cap = level.n_rel;
                for a in leading_parts(p, n, cap) {
                    // every window of length 3 straddling the threshold
                    for b in window_polys(p, n - k as i64 - 1, 3, cap) {
                        if b.is_exact_zero() {
                            zero_cases += 1;
                        }
                        let g = BorelForm::new(a.clone(), b).unwrap();
                        assert_eq!(
                            relevance_closed_form(&g, k).unwrap(),
                            relevance_bruteforce(&g, &level).unwrap(),
                            "p={p} k={k} n={n} g={}",
                            g.to_matrix()
                        );
                    }
                }
            }
        }
    }
    assert!(zero_cases > 0, "B = 0 must be part of the grid");
}

#[test]
fn reduction_lands_in_the_list_and_is_idempotent() {
    for p in [2, 3, 5] {
        for k in 1..=3 {
            for n in -2..=2 {
                let level = LevelParams::new(p, k, n).unwrap();
                let cap = level.n_rel;
                let reps = enumerate_representatives(&level);
                for m in &reps {
                    let Reduction::Relevant { rep, corrector } =
                        reduce_to_representative(&m.to_borel(cap), &level).unwrap()
                    else {
                        panic!("representative {m} judged irrelevant");
                    };
                    assert_eq!(&rep, m);
                    assert!(iwahori0_params(&corrector.reassemble()).unwrap().is_some());
                }
                let a = Series::from_coeffs(p, n, &[1, 2, 1], None, cap);
                for b in window_polys(p, n - k as i64 + 1, k as usize + 1, cap).take(40) {
                    let g = BorelForm::new(a.clone(), b).unwrap();
                    let Reduction::Relevant { rep, corrector } =
                        reduce_to_representative(&g, &level).unwrap()
                    else {
                        panic!("relevant window judged irrelevant");
                    };
                    assert!(reps.contains(&rep));
                    assert_eq!(corrector.sigma_power, 0);
                    assert!(iwahori0_params(&corrector.reassemble()).unwrap().is_some());
                    let back = g.to_matrix().mul_raw(&corrector.reassemble());
                    assert!(back.projectively_eq(&rep.to_matrix(cap)));
                }
            }
        }
    }
}

#[test]
fn scan_examples() {
    let report = double_coset_scan(2, -2, 2, 3, 8).unwrap();
    assert_eq!(report.pass_set, vec![DoubleCosetPoint::identity(2)]);
    assert_eq!(report.points.len(), 10);
    let report = double_coset_scan(3, -1, 1, 2, 8).unwrap();
    assert_eq!(report.pass_set, vec![DoubleCosetPoint::identity(3)]);
    // sigma passes at the I^0 level, inside the identity A x A coset
    assert_eq!(report.i0_pass_points.len(), 2);
    assert!(report
        .i0_pass_points
        .iter()
        .all(|q| q.aa_orbit() == DoubleCosetPoint::identity(3)));
}
