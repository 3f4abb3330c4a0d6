// The width floor of a random body: the root field on the grid, its refined
// peaks, and a bisection on the area element for comparison.

use widthforge::{bodies, verify, w_floor, SphereGrid};

fn main() -> widthforge::Result<()> {
    run_example()
}

pub fn run_example() -> widthforge::Result<()> {
    let coeffs = bodies::random_odd(5, 3, 0.5)?;
    let grid = SphereGrid::new(24, 48)?;
    let fl = w_floor(&coeffs, &grid, 3)?;
    println!("grid maximum {:.10}", fl.grid_max);
    for step in &fl.refinement_record {
        println!(
            "  level {} radius {:.2e}: w0 {:.12}",
            step.level, step.radius, step.w0
        );
    }
    for p in fl.peaks.iter().take(3) {
        println!(
            "  peak at [{:+.4}, {:+.4}, {:+.4}] value {:.12}",
            p.u[0], p.u[1], p.u[2], p.w
        );
    }
    let b = verify::bisection_floor(&coeffs, &grid)?;
    println!("w0 {:.12}, bisection {:.12}", fl.w0, b);
    let doubled = w_floor(&coeffs.scaled(2.0), &grid, 3)?.w0;
    println!("w0(2h) / w0(h) = {:.12}", doubled / fl.w0);
    Ok(())
}
