// Parallel bodies of a degree-3 body, shrinking the width down to the floor.

use widthforge::harmonics::OddHarmonicCoeffs;
use widthforge::optimizer::normal_flow;
use widthforge::{w_floor, SphereGrid};

fn main() -> widthforge::Result<()> {
    run_example()
}

pub fn run_example() -> widthforge::Result<()> {
    let mut coeffs = OddHarmonicCoeffs::zeros(3, false)?;
    coeffs.set(3, 0, 0.25)?;
    let grid = SphereGrid::for_degree(9);
    let w0 = w_floor(&coeffs, &grid, 3)?.w0;
    println!(
        "{:>10} {:>12} {:>12} {:>10} {:>12}",
        "w", "volume", "area", "ratio", "min density"
    );
    for r in normal_flow(&coeffs, 2.0 * w0, w0, 8, &grid)? {
        println!(
            "{:10.6} {:12.6} {:12.6} {:10.6} {:12.3e}",
            r.w, r.volume, r.area, r.ratio, r.min_density
        );
    }
    Ok(())
}
