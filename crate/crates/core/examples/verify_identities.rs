// Runs the seeded identity suite, then again with the wrong discriminant.

use widthforge::verify::{run, VerifyOptions};

fn main() -> widthforge::Result<()> {
    run_example()
}

pub fn run_example() -> widthforge::Result<()> {
    for inject_erratum in [false, true] {
        let report = run(&VerifyOptions {
            cases: 6,
            inject_erratum,
            ..Default::default()
        })?;
        println!("inject_erratum = {inject_erratum}");
        for c in &report.checks {
            let mark = if c.passed { "ok  " } else { "FAIL" };
            println!(
                "  {mark} {:<34} {:.2e} / {:.0e}",
                c.name, c.worst, c.threshold
            );
        }
    }
    Ok(())
}
