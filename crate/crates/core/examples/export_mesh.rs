// Writes the boundary of a body at its floor as an OBJ mesh and checks the
// mesh against the closed forms.
//
// ```text
// cargo run --release --example export_mesh -- [out.obj]
// ```

use std::path::{Path, PathBuf};

use widthforge::mesh::Mesh;
use widthforge::{bodies, functionals, w_floor, SphereGrid};

fn main() -> widthforge::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("widthforge_body.obj"));
    export(&out)
}

pub fn export(out: &Path) -> widthforge::Result<()> {
    let coeffs = bodies::random_odd(5, 11, 0.4)?;
    let w0 = w_floor(&coeffs, &SphereGrid::new(24, 48)?, 3)?.w0;
    let mesh = Mesh::from_body(&coeffs, w0, 64, 128)?;
    mesh.write_obj(std::io::BufWriter::new(std::fs::File::create(out)?))?;
    let dirs: Vec<_> = (0..50)
        .map(|k| {
            let z = -1.0 + (2 * k + 1) as f64 / 50.0;
            let phi = 2.4 * k as f64;
            let r = (1.0 - z * z).sqrt();
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect();
    println!(
        "wrote {} ({} vertices, {} faces)",
        out.display(),
        mesh.vertices.len(),
        mesh.faces.len()
    );
    println!(
        "mesh volume {:.6}, closed form {:.6}",
        mesh.volume(),
        functionals::volume(&coeffs, w0)
    );
    println!(
        "mesh area   {:.6}, closed form {:.6}",
        mesh.area(),
        functionals::area(&coeffs, w0)
    );
    println!(
        "largest width deviation {:.2e}",
        mesh.width_deviation(w0, &dirs)
    );
    Ok(())
}
