// The Reuleaux triangle revolved about a symmetry axis, pushed through the
// harmonic pipeline and compared with a Monte-Carlo volume estimate.
//
// ```text
// cargo run --release --example rotated_reuleaux
// ```

use std::f64::consts::PI;

use widthforge::bodies::{profile_to_coeffs, reuleaux_volume_monte_carlo, rotated_reuleaux};
use widthforge::{evaluate, w_floor, SphereGrid};

fn main() -> widthforge::Result<()> {
    let width = 2.0;
    let w = 0.5 * width;
    let profile = rotated_reuleaux(width)?;
    let mc = reuleaux_volume_monte_carlo(width, 2_000_000, 7)?;
    println!(
        "Monte-Carlo volume {:.5} ± {:.5}, ratio {:.5}",
        mc.volume,
        mc.std_error,
        mc.volume / (4.0 * PI / 3.0 * w.powi(3))
    );
    for lmax in [5, 7, 9, 13] {
        let coeffs = profile_to_coeffs(&profile, lmax)?;
        let grid = SphereGrid::for_degree(lmax);
        let at_w = evaluate(&coeffs, w, &grid)?;
        let floor = w_floor(&coeffs, &grid, 4)?;
        let at_floor = evaluate(&coeffs, floor.w0, &grid)?;
        println!(
            "lmax {lmax:2}: volume at w = {w} {:.5}  floor {:.5}  ratio at floor {:.5}",
            at_w.volume_direct, floor.w0, at_floor.ratio
        );
    }
    Ok(())
}
