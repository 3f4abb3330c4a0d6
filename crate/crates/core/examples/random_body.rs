// Boundary geometry of a seeded random odd body: area element, principal
// curvatures and both volume paths.

use widthforge::geometry::BodyGeometry;
use widthforge::{bodies, evaluate, synth_jet, w_floor, SphereGrid};

fn main() -> widthforge::Result<()> {
    run_example()
}

pub fn run_example() -> widthforge::Result<()> {
    let coeffs = bodies::random_odd(7, 42, 0.3)?;
    let grid = SphereGrid::new(32, 64)?;
    let w0 = w_floor(&coeffs, &grid, 3)?.w0;
    let w = 1.5 * w0;
    let geo = BodyGeometry::new(&synth_jet(&coeffs, &grid)?, w, &grid);
    let (mut kmin, mut kmax) = (f64::INFINITY, 0.0f64);
    for k in geo.curvature.iter().flatten() {
        kmin = kmin.min(k.k2);
        kmax = kmax.max(k.k1);
    }
    println!("w0 {w0:.6}, evaluating at w = {w:.6}");
    println!(
        "area element in [{:.4}, {:.4}]",
        geo.min_density(),
        geo.density.iter().copied().fold(0.0, f64::max)
    );
    println!("principal curvatures in [{kmin:.4}, {kmax:.4}]");
    let r = evaluate(&coeffs, w, &grid)?;
    println!(
        "volume {:.10} (closed) {:.10} (quadrature)",
        r.volume, r.volume_direct
    );
    println!(
        "area   {:.10} (closed) {:.10} (quadrature)",
        r.area, r.area_direct
    );
    println!(
        "ratio {:.6}, Blaschke residual {:.1e}",
        r.ratio, r.blaschke_residual
    );
    Ok(())
}
