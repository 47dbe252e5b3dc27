//! Acceptance run: one PASS/FAIL line per criterion, each backed by the
//! corresponding property suite at its stated tolerance. Runs without the
//! libtest harness so the lines always reach the terminal.

use std::process::ExitCode;
use std::time::Instant;

use cmpairs::exec::Execution;
use cmpairs::harness::suites::{run_suite, SUITES};
use cmpairs::Lattice;

const SEED: u64 = 0;

fn main() -> ExitCode {
    let lattices = [
        ("square", Lattice::lemniscatic()),
        (
            "skew",
            Lattice::new(
                cmpairs::Complex64::new(1.0, 0.0),
                cmpairs::Complex64::new(0.3, 1.2),
            )
            .expect("valid lattice"),
        ),
    ];
    let mut failed = 0;
    for (k, (key, title)) in SUITES.iter().enumerate() {
        let start = Instant::now();
        let mut ok = true;
        let mut notes = Vec::new();
        for (name, lat) in &lattices {
            let r = run_suite(key, lat, SEED, Execution::Parallel);
            for c in r.checks.iter().filter(|c| !c.passed) {
                notes.push(format!("{name}: {c}"));
            }
            ok &= r.passed;
        }
        let status = if ok { "PASS" } else { "FAIL" };
        println!(
            "{status}  criterion {:>2}  {:<50} ({:.1}s)",
            k + 1,
            title,
            start.elapsed().as_secs_f64()
        );
        for n in &notes {
            println!("        {n}");
        }
        if !ok {
            failed += 1;
        }
    }
    if failed == 0 {
        println!("all {} criteria passed", SUITES.len());
        ExitCode::SUCCESS
    } else {
        println!("{failed} of {} criteria failed", SUITES.len());
        ExitCode::FAILURE
    }
}
