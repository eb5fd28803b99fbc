//! Runs the thirteen acceptance criteria and prints one PASS/FAIL line each.

use std::process::ExitCode;

use waterwave::checks::run_all;

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    let outcomes = run_all(|o| println!("{o}"));
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
