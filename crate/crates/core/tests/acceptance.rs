//! Runs every acceptance criterion and prints one PASS/FAIL line each.
//! Extra arguments filter criteria by substring, e.g. `-- C05`.

use std::process::ExitCode;
use std::time::Instant;

use outwave::experiments::{run_criterion, CRITERIA};

fn main() -> ExitCode {
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (k, name) in CRITERIA.iter().enumerate() {
        if !filters.is_empty() && !filters.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let o = run_criterion(k + 1).expect("criterion exists");
        ran += 1;
        println!("{}  [{:.1}s]", o.line(), start.elapsed().as_secs_f64());
        for v in &o.verdicts {
            println!("    {}", v.line());
        }
        if !o.passed() {
            failed += 1;
        }
    }
    println!("\nacceptance: {} passed, {failed} failed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
