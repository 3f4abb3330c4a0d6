use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use widthforge::bodies::{self, AxisymmetricProfile, VolumeEstimate};
use widthforge::floor::{self, WidthFloorResult};
use widthforge::harmonics::{CoeffFile, OddHarmonicCoeffs};
use widthforge::mesh::Mesh;
use widthforge::optimizer::{self, OptimizerConfig, RestartLog, VerificationReport};
use widthforge::report::{self, GridParams, Report, RunManifest};
use widthforge::verify::{self, VerifyOptions};
use widthforge::{functionals, Error, FunctionalReport, SphereGrid};

#[derive(Parser)]
#[command(
    name = "widthforge",
    version,
    about = "Constant-width bodies from odd support functions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the seeded identity suite.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 12)]
        cases: usize,
        /// Use the α² - β discriminant for the floor; the floor checks must fail.
        #[arg(long)]
        inject_erratum: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate functionals, floor and necessary conditions of a body.
    Eval {
        coeffs: PathBuf,
        #[arg(long, default_value = "floor")]
        w: WidthArg,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for a low-ratio body at its width floor.
    Optimize {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        lmax: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        grid: GridArgs,
        /// Candidate file; the trajectory log goes next to it.
        #[arg(long)]
        out: PathBuf,
    },
    /// Follow the parallel bodies from `w_start` down to `w`.
    Flow {
        coeffs: PathBuf,
        #[arg(long)]
        w_start: f64,
        #[arg(long, default_value = "floor")]
        w: WidthArg,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the boundary as an OBJ mesh.
    Export {
        coeffs: PathBuf,
        #[arg(long, default_value = "floor")]
        w: WidthArg,
        /// Display grid rings.
        #[arg(long, default_value_t = 64)]
        grid_theta: usize,
        #[arg(long, default_value_t = 128)]
        grid_phi: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a reference body: `ball` or `rotated-reuleaux`.
    Reference {
        name: ReferenceName,
        #[arg(long, default_value_t = 13)]
        lmax: usize,
        /// Width of the body, i.e. `2w`.
        #[arg(long, default_value_t = 2.0)]
        width: f64,
        /// Monte-Carlo samples for the volume check; 0 skips it.
        #[arg(long, default_value_t = 10_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        grid: GridArgs,
        /// Coefficient file to write; the report goes to stdout.
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Clone, Copy)]
struct GridArgs {
    #[arg(long)]
    grid_theta: Option<usize>,
    #[arg(long)]
    grid_phi: Option<usize>,
}

impl GridArgs {
    /// Defaults to `4(lmax + 1) × 8(lmax + 1)`.
    fn grid(&self, lmax: usize) -> Result<SphereGrid, Error> {
        SphereGrid::new(
            self.grid_theta.unwrap_or(4 * (lmax + 1)),
            self.grid_phi.unwrap_or(8 * (lmax + 1)),
        )
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
enum WidthArg {
    Floor,
    Value(f64),
}

impl FromStr for WidthArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "floor" {
            return Ok(Self::Floor);
        }
        s.parse()
            .map(Self::Value)
            .map_err(|_| format!("expected a number or `floor`, got `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ReferenceName {
    Ball,
    RotatedReuleaux,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if let Some(n) = std::env::var("WIDTHFORGE_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn read_coeffs(path: &Path) -> Result<OddHarmonicCoeffs, Error> {
    let text = std::fs::read_to_string(path)?;
    let file: CoeffFile = serde_json::from_str(&text)?;
    OddHarmonicCoeffs::from_file(&file)
}

fn emit<T: Serialize>(out: Option<&Path>, value: &T) -> Result<(), Error> {
    match out {
        Some(p) => {
            report::write_json(p, value)?;
        }
        None => print!("{}", report::to_json_string(value)?),
    }
    Ok(())
}

fn resolve_w(
    w: WidthArg,
    coeffs: &OddHarmonicCoeffs,
    grid: &SphereGrid,
) -> Result<(f64, WidthFloorResult), Error> {
    let fl = floor::w_floor(coeffs, grid, 4)?;
    let w = match w {
        WidthArg::Floor => fl.w0,
        WidthArg::Value(v) => v,
    };
    if !(w > 0.0) {
        return Err(Error::NonPositiveWidth(w));
    }
    Ok((w, fl))
}

fn grid_params(g: &SphereGrid) -> Option<GridParams> {
    Some(GridParams {
        n_theta: g.n_theta(),
        n_phi: g.n_phi(),
    })
}

#[derive(Serialize)]
struct EvalBody {
    w_mode: WidthArg,
    report: FunctionalReport,
    floor: WidthFloorResult,
    verification: VerificationReport,
}

#[derive(Serialize)]
struct TrajectoryBody<'a> {
    candidate_file: String,
    start_ratio: f64,
    restarts: &'a [RestartLog],
}

#[derive(Serialize)]
struct FlowBody {
    w_start: f64,
    w_end: f64,
    w0: f64,
    trajectory: Vec<FunctionalReport>,
}

#[derive(Serialize)]
struct ExportBody {
    w: f64,
    w0: f64,
    vertices: usize,
    faces: usize,
    mesh_volume: f64,
    volume: f64,
}

#[derive(Serialize)]
struct ReferenceBody {
    name: ReferenceName,
    lmax: usize,
    profile: Option<AxisymmetricProfile>,
    report: FunctionalReport,
    floor: WidthFloorResult,
    ratio_at_floor: f64,
    monte_carlo: Option<VolumeEstimate>,
}

/// Returns `false` when the identity suite found a failing check.
fn run(command: Command) -> Result<bool, Error> {
    let start = Instant::now();
    match command {
        Command::Verify {
            seed,
            cases,
            inject_erratum,
            out,
        } => {
            let opts = VerifyOptions {
                seed,
                cases,
                inject_erratum,
            };
            let body = verify::run(&opts)?;
            for c in &body.checks {
                eprintln!(
                    "{} {:<34} worst {:.3e} (threshold {:.1e})",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.worst,
                    c.threshold
                );
            }
            let mut manifest = RunManifest::new("verify", serde_json::to_value(opts)?);
            manifest.seeds = vec![seed];
            manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
            let passed = body.passed;
            emit(out.as_deref(), &Report { manifest, body })?;
            Ok(passed)
        }
        Command::Eval {
            coeffs: path,
            w,
            grid,
            out,
        } => {
            let coeffs = read_coeffs(&path)?;
            let grid = grid.grid(coeffs.lmax())?;
            let (wv, fl) = resolve_w(w, &coeffs, &grid)?;
            let body = EvalBody {
                w_mode: w,
                report: functionals::evaluate(&coeffs, wv, &grid)?,
                verification: optimizer::verify_necessary_conditions(
                    &coeffs, wv, &grid, 1e-3, 5e-2,
                )?,
                floor: fl,
            };
            let mut manifest = RunManifest::new("eval", json!({ "coeffs": path, "w": w }));
            manifest.grid = grid_params(&grid);
            manifest.inputs = vec![report::file_digest(&path)?];
            manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
            emit(out.as_deref(), &Report { manifest, body }).map(|_| true)
        }
        Command::Optimize {
            config,
            lmax,
            seed,
            grid,
            out,
        } => {
            let mut cfg: OptimizerConfig = match &config {
                Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)
                    .map_err(|e| Error::InvalidConfig(e.to_string()))?,
                None => OptimizerConfig::default(),
            };
            cfg.lmax = lmax.unwrap_or(cfg.lmax);
            cfg.seed = seed.unwrap_or(cfg.seed);
            cfg.grid_theta = grid.grid_theta.or(cfg.grid_theta);
            cfg.grid_phi = grid.grid_phi.or(cfg.grid_phi);
            let outcome = optimizer::optimize(&cfg)?;
            // the candidate file carries no timing, so seeded runs match byte for byte
            let digest = report::write_json(
                &out,
                &json!({ "config": &cfg, "candidate": &outcome.candidate }),
            )?;
            let log_path = out.with_extension("trajectory.json");
            let mut manifest = RunManifest::new("optimize", serde_json::to_value(&cfg)?);
            manifest.seeds = vec![cfg.seed];
            manifest.grid = grid_params(&cfg.grid()?);
            if let Some(p) = &config {
                manifest.inputs = vec![report::file_digest(p)?];
            }
            manifest.outputs = vec![report::FileDigest {
                path: out.display().to_string(),
                sha256: digest,
            }];
            manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
            let c = &outcome.candidate;
            eprintln!(
                "ratio {:.8} at w0 {:.8}; verification {}",
                c.ratio,
                c.w0,
                if c.verification.pass { "PASS" } else { "FAIL" }
            );
            emit(
                Some(&log_path),
                &Report {
                    manifest,
                    body: TrajectoryBody {
                        candidate_file: out.display().to_string(),
                        start_ratio: outcome.start_ratio,
                        restarts: &outcome.restarts,
                    },
                },
            )
            .map(|_| true)
        }
        Command::Flow {
            coeffs: path,
            w_start,
            w,
            steps,
            grid,
            out,
        } => {
            let coeffs = read_coeffs(&path)?;
            let grid = grid.grid(coeffs.lmax())?;
            let (w_end, fl) = resolve_w(w, &coeffs, &grid)?;
            let body = FlowBody {
                w_start,
                w_end,
                w0: fl.w0,
                trajectory: optimizer::normal_flow(&coeffs, w_start, w_end, steps, &grid)?,
            };
            let mut manifest = RunManifest::new(
                "flow",
                json!({ "coeffs": path, "w_start": w_start, "w": w, "steps": steps }),
            );
            manifest.grid = grid_params(&grid);
            manifest.inputs = vec![report::file_digest(&path)?];
            manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
            emit(out.as_deref(), &Report { manifest, body }).map(|_| true)
        }
        Command::Export {
            coeffs: path,
            w,
            grid_theta,
            grid_phi,
            out,
        } => {
            let coeffs = read_coeffs(&path)?;
            let check = SphereGrid::new(4 * (coeffs.lmax() + 1), 8 * (coeffs.lmax() + 1))?;
            let (wv, fl) = resolve_w(w, &coeffs, &check)?;
            let mesh = Mesh::from_body(&coeffs, wv, grid_theta, grid_phi)?;
            let mut file = std::io::BufWriter::new(std::fs::File::create(&out)?);
            mesh.write_obj(&mut file)?;
            drop(file);
            let body = ExportBody {
                w: wv,
                w0: fl.w0,
                vertices: mesh.vertices.len(),
                faces: mesh.faces.len(),
                mesh_volume: mesh.volume(),
                volume: functionals::volume(&coeffs, wv),
            };
            let mut manifest = RunManifest::new("export", json!({ "coeffs": path, "w": w }));
            manifest.grid = Some(GridParams {
                n_theta: grid_theta,
                n_phi: grid_phi,
            });
            manifest.inputs = vec![report::file_digest(&path)?];
            manifest.outputs = vec![report::file_digest(&out)?];
            manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
            emit(None, &Report { manifest, body }).map(|_| true)
        }
        Command::Reference {
            name,
            lmax,
            width,
            samples,
            seed,
            grid,
            out,
        } => {
            let (coeffs, profile) = match name {
                ReferenceName::Ball => (bodies::ball(), None),
                ReferenceName::RotatedReuleaux => {
                    let p = bodies::rotated_reuleaux(width)?;
                    (bodies::profile_to_coeffs(&p, lmax)?, Some(p))
                }
            };
            let grid = grid.grid(coeffs.lmax())?;
            let w = 0.5 * width;
            let fl = floor::w_floor(&coeffs, &grid, 4)?;
            let ratio_at_floor = if fl.w0 > 0.0 {
                functionals::ratio_i(&coeffs, fl.w0)?
            } else {
                1.0
            };
            let monte_carlo = match (name, samples) {
                (ReferenceName::RotatedReuleaux, n) if n > 0 => {
                    Some(bodies::reuleaux_volume_monte_carlo(width, n, seed)?)
                }
                _ => None,
            };
            let digest = report::write_json(&out, &coeffs)?;
            let body = ReferenceBody {
                name,
                lmax: coeffs.lmax(),
                profile,
                report: functionals::evaluate(&coeffs, w, &grid)?,
                floor: fl,
                ratio_at_floor,
                monte_carlo,
            };
            let mut manifest = RunManifest::new(
                "reference",
                json!({ "name": name, "lmax": lmax, "width": width, "samples": samples }),
            );
            manifest.seeds = vec![seed];
            manifest.grid = grid_params(&grid);
            manifest.outputs = vec![report::FileDigest {
                path: out.display().to_string(),
                sha256: digest,
            }];
            manifest.wall_clock_seconds = start.elapsed().as_secs_f64();
            emit(None, &Report { manifest, body }).map(|_| true)
        }
    }
}
