// Searches for a low-ratio body at its width floor and checks the
// necessary conditions on the result.
//
// ```text
// cargo run --release --example optimize -- [lmax] [restarts] [seed]
// ```

use widthforge::optimizer::{optimize, OptimizerConfig};

fn main() -> widthforge::Result<()> {
    let args: Vec<u64> = std::env::args()
        .skip(1)
        .map(|a| a.parse().expect("numeric argument"))
        .collect();
    let config = OptimizerConfig {
        lmax: args.first().copied().unwrap_or(5) as usize,
        restarts: args.get(1).copied().unwrap_or(4) as usize,
        seed: args.get(2).copied().unwrap_or(0),
        ..Default::default()
    };
    let t = std::time::Instant::now();
    let out = optimize(&config)?;
    let c = &out.candidate;
    for r in &out.restarts {
        println!(
            "restart {}: objective {:.6} -> {:.6} in {} iterations ({} evaluations)",
            r.index, r.start_objective, r.best_objective, r.iterations, r.evaluations
        );
    }
    println!("degree-3 start ratio  {:.6}", out.start_ratio);
    println!("best ratio            {:.6}", c.ratio);
    println!("w0                    {:.6}", c.w0);
    let v = &c.verification;
    println!(
        "antipodal score {:.3e}  k2 deviation {:.3e}  smooth {:.3}  pass {}",
        v.antipodal_vanishing_score, v.k2_deviation, v.smooth_fraction, v.pass
    );
    println!("elapsed {:.1}s", t.elapsed().as_secs_f64());
    Ok(())
}
