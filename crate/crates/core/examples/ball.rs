// The ball of radius 1: `h = 0`, `w = 1`.

use std::f64::consts::PI;

use widthforge::{bodies, evaluate, SphereGrid};

fn main() -> widthforge::Result<()> {
    run_example()
}

pub fn run_example() -> widthforge::Result<()> {
    let r = evaluate(&bodies::ball(), 1.0, &SphereGrid::for_degree(3))?;
    println!("volume {:.15}  (4π/3 = {:.15})", r.volume, 4.0 * PI / 3.0);
    println!("area   {:.15}  (4π   = {:.15})", r.area, 4.0 * PI);
    println!("ratio  {:.15}", r.ratio);
    println!("smallest area element {:.3}", r.min_density);
    Ok(())
}
