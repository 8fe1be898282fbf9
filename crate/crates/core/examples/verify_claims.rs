//! Running claim suites and a stability sweep from library code.

use cuspidal_whittaker::harness::{
    emit_report, run_all, stability_sweep, ClaimReport, ReportFormat, SuiteParams,
};

fn main() -> cuspidal_whittaker::error::Result<()> {
    let mut params = SuiteParams::new(3, 2, 0)?;
    params.trials = 20;
    let reports: Vec<ClaimReport> = run_all(&params, 7)?
        .into_iter()
        .map(ClaimReport::without_timing)
        .collect();
    print!("{}", emit_report(&reports, ReportFormat::Table));

    let sweep = stability_sweep("kernel_formula", &params, 7)?;
    print!("{}", emit_report(&[sweep], ReportFormat::Table));
    Ok(())
}
