//! Acceptance suite: one line per criterion, then a nonzero exit if any
//! criterion failed. Runs without the libtest harness so the lines are
//! always shown.

use std::process::ExitCode;

use heckmort_cli::selftest::{run_criterion, DEFAULT_SEED};

fn main() -> ExitCode {
    // `cargo test` passes harness flags such as `--nocapture`; names select criteria
    let only: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let ids: Vec<u8> = if only.is_empty() { (1..=12).collect() } else { only };
    let mut failed = Vec::new();
    for id in ids {
        let outcome = run_criterion(id, DEFAULT_SEED);
        println!("{outcome}");
        if !outcome.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
