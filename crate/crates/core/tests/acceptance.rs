//! Acceptance criteria 1 to 13. Prints one `[PASS]`/`[FAIL]` line per
//! criterion and exits non-zero if any fails. Optional arguments select
//! criteria by number.

use std::process::ExitCode;

use ra_bergman::suite::{criterion, CRITERIA};

fn main() -> ExitCode {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for &(id, _) in CRITERIA {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let result = criterion(id);
        println!("{}", result.line());
        if !result.pass {
            failed += 1;
        }
    }
    println!("acceptance: {failed} failing");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
