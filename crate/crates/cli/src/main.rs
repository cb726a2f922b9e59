//! `rcassi` command-line pipeline: build phantoms and masks, simulate
//! snapshot measurements, reconstruct, evaluate, and stitch sub-bands.

mod args;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use rcassi::io::{self, Metrics, PointCorrelation, RunReport};
use rcassi::metrics::{psnr, spectral_correlation};
use rcassi::optics::{add_noise, SystemOperator};
use rcassi::phantoms::{letter_target, material_scene, random_mask, MaterialSpectrum};
use rcassi::solvers::{gaptv_solve, twist_solve, GapTvConfig, TwistConfig};
use rcassi::{stitch_cubes, Error as CoreError, DEFAULT_BOUNDARY_NM};

use args::{format_points, parse_points, resolve_grid, Band, GlyphSpec, GridSpec};

#[derive(Parser)]
#[command(name = "rcassi", version, about = "Coded-aperture snapshot spectral imaging simulator and reconstructor")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PhantomKind {
    Letters,
    Materials,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum, serde::Serialize)]
#[serde(rename_all = "lowercase")]
enum Algo {
    Twist,
    Gaptv,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic scene cube.
    Phantom {
        #[arg(long, value_enum)]
        kind: PhantomKind,
        #[arg(long, default_value_t = 64)]
        nx: usize,
        #[arg(long, default_value_t = 64)]
        ny: usize,
        /// MIN:MAX:N in nm.
        #[arg(long)]
        grid: GridSpec,
        /// Keep only one side of the sub-band split.
        #[arg(long, value_enum)]
        band: Option<Band>,
        #[arg(long, default_value_t = DEFAULT_BOUNDARY_NM)]
        boundary: f64,
        /// CHAR@CENTER_NM[:FWHM_NM|:led|:laser], repeatable (letters only).
        #[arg(long = "glyph")]
        glyphs: Vec<GlyphSpec>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a random binary coded aperture.
    Mask {
        #[arg(long)]
        nx: usize,
        #[arg(long)]
        ny: usize,
        #[arg(long)]
        nlam: usize,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Apply the forward model (plus optional noise) to a scene.
    Simulate {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        mask: PathBuf,
        /// Noise standard deviation as a fraction of the peak signal.
        #[arg(long, default_value_t = 0.0)]
        noise_sigma: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Recover a cube from a measurement.
    Reconstruct {
        #[arg(long)]
        meas: PathBuf,
        #[arg(long)]
        mask: PathBuf,
        #[arg(long)]
        grid: GridSpec,
        #[arg(long, value_enum)]
        band: Option<Band>,
        #[arg(long, default_value_t = DEFAULT_BOUNDARY_NM)]
        boundary: f64,
        #[arg(long, value_enum, default_value = "twist")]
        algo: Algo,
        /// Regularization weight (TV weight for gaptv). Defaults to a data-driven heuristic.
        #[arg(long)]
        tau: Option<f64>,
        #[arg(long, default_value_t = 1.9)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long)]
        iters: Option<usize>,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        #[arg(long, default_value_t = 10)]
        tv_iters: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: PathBuf,
    },
    /// Compare a reconstruction with ground truth.
    Evaluate {
        #[arg(long)]
        recon: PathBuf,
        #[arg(long)]
        truth: PathBuf,
        /// X,Y[;X,Y...]
        #[arg(long)]
        points: String,
        #[arg(long)]
        out: PathBuf,
        /// Reconstructed spectra at the probe points.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Ground-truth spectra at the probe points.
        #[arg(long)]
        truth_csv: Option<PathBuf>,
    },
    /// Join a low and a high sub-band cube.
    Stitch {
        #[arg(long)]
        low: PathBuf,
        #[arg(long)]
        high: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Export one band of a cube as an 8-bit grayscale image.
    BandImage {
        #[arg(long)]
        cube: PathBuf,
        /// Channel index; mutually exclusive with --wavelength.
        #[arg(long, conflicts_with = "wavelength")]
        channel: Option<usize>,
        /// Pick the channel nearest this wavelength (nm).
        #[arg(long)]
        wavelength: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Phantom { kind, nx, ny, grid, band, boundary, glyphs, out } => {
            let grid = resolve_grid(grid, band, boundary)?;
            let cube = match kind {
                PhantomKind::Letters => {
                    let glyphs: Vec<_> = glyphs.iter().map(|g| g.to_glyph(&grid)).collect();
                    letter_target(&glyphs, nx, ny, &grid)?
                }
                PhantomKind::Materials => {
                    if !glyphs.is_empty() {
                        bail!("--glyph only applies to --kind letters");
                    }
                    let real = MaterialSpectrum::real_apple_like(&grid);
                    let fake = MaterialSpectrum::fake_apple_like(&grid);
                    material_scene(nx, ny, &grid, &real, &fake)?
                }
            };
            io::write_cube(&cube, &out).with_context(|| format!("writing {}", out.display()))?;
        }
        Command::Mask { nx, ny, nlam, density, seed, out } => {
            let mask = random_mask(nx, ny, nlam, density, seed)?;
            io::write_mask(&mask, &out).with_context(|| format!("writing {}", out.display()))?;
        }
        Command::Simulate { scene, mask, noise_sigma, seed, out, report } => {
            let scene = io::read_cube(&scene).with_context(|| format!("reading {}", scene.display()))?;
            let mask = io::read_mask(&mask).with_context(|| format!("reading {}", mask.display()))?;
            let op = SystemOperator::with_default_dispersion(scene.nx(), scene.ny(), scene.grid().clone(), mask)?;
            let meas = add_noise(&op.forward(&scene)?, noise_sigma, seed)?;
            let tag = 0.5 * (scene.grid().first() + scene.grid().last());
            io::write_measurement(&meas, tag, &out).with_context(|| format!("writing {}", out.display()))?;
            if let Some(path) = report {
                let rep = RunReport::new("simulate")
                    .config("noise_sigma_fraction", noise_sigma)
                    .config("noise_sigma", meas.noise_sigma)
                    .config("scene_dims", [scene.nx(), scene.ny(), scene.n_bands()])
                    .seed("noise", seed);
                io::write_report(&rep, &path)?;
            }
        }
        Command::Reconstruct {
            meas,
            mask,
            grid,
            band,
            boundary,
            algo,
            tau,
            alpha,
            beta,
            iters,
            tol,
            tv_iters,
            out,
            report,
        } => {
            let grid_desc = json!({ "min": grid.min, "max": grid.max, "n": grid.n, "band": band, "boundary_nm": boundary });
            let grid = resolve_grid(grid, band, boundary)?;
            let meas = io::read_measurement(&meas).with_context(|| format!("reading {}", meas.display()))?;
            let mask = io::read_mask(&mask).with_context(|| format!("reading {}", mask.display()))?;
            let op = SystemOperator::with_default_dispersion(meas.nx(), meas.ny(), grid, mask)?;
            let (mut cube, solve, echo) = match algo {
                Algo::Twist => {
                    let cfg = TwistConfig {
                        tau,
                        alpha,
                        beta,
                        max_iters: iters.unwrap_or(TwistConfig::default().max_iters),
                        rel_obj_tol: tol,
                        tv_inner_iters: tv_iters,
                    };
                    let (cube, solve) = twist_solve(&op, &meas, &cfg)?;
                    let echo = json!({ "alpha": alpha, "beta": beta, "max_iters": cfg.max_iters, "rel_obj_tol": tol });
                    (cube, solve, echo)
                }
                Algo::Gaptv => {
                    let cfg = GapTvConfig {
                        tv_weight: tau,
                        max_iters: iters.unwrap_or(GapTvConfig::default().max_iters),
                        tv_inner_iters: tv_iters,
                    };
                    let (cube, solve) = gaptv_solve(&op, &meas, &cfg)?;
                    (cube, solve, json!({ "max_iters": cfg.max_iters }))
                }
            };
            cube.clamp_nonnegative();
            io::write_cube(&cube, &out).with_context(|| format!("writing {}", out.display()))?;
            let mut rep = RunReport::new("reconstruct")
                .with_solve(&solve)
                .config("algo", algo)
                .config("tau", solve.tau)
                .config("tau_source", if tau.is_some() { "user" } else { "default" })
                .config("tv_inner_iters", tv_iters)
                .config("grid", grid_desc)
                .config("solver", echo);
            if solve.stop_reason == rcassi::solvers::StopReason::Diverged {
                rep.warnings.push("solver diverged; returned the last finite iterate".into());
                eprintln!("warning: solver diverged");
            }
            io::write_report(&rep, &report).with_context(|| format!("writing {}", report.display()))?;
        }
        Command::Evaluate { recon, truth, points, out, csv, truth_csv } => {
            let recon = io::read_cube(&recon).with_context(|| format!("reading {}", recon.display()))?;
            let truth = io::read_cube(&truth).with_context(|| format!("reading {}", truth.display()))?;
            let points = parse_points(&points)?;
            for (x, y) in &points {
                recon.check_point(*x, *y)?;
            }
            let mut rep = RunReport::new("evaluate").config("points", format_points(&points));
            let mut metrics = Metrics { psnr_db: None, correlations: Vec::new() };
            match psnr(&recon, &truth) {
                Ok(p) => metrics.psnr_db = Some(p),
                Err(e @ CoreError::DimensionMismatch(_)) => return Err(e.into()),
                Err(e) => rep.warnings.push(format!("psnr: {e}")),
            }
            for &(x, y) in &points {
                let entry = match spectral_correlation(&recon, &truth, (x, y)) {
                    Ok(r) => PointCorrelation { x, y, r: Some(r), error: None },
                    Err(e @ CoreError::ZeroVariance { .. }) => {
                        eprintln!("warning: {e}");
                        rep.warnings.push(e.to_string());
                        PointCorrelation { x, y, r: None, error: Some(e.to_string()) }
                    }
                    Err(e) => return Err(e.into()),
                };
                metrics.correlations.push(entry);
            }
            rep.metrics = metrics;
            if let Some(path) = csv {
                io::export_spectrum_csv(&recon, &points, &path)?;
            }
            if let Some(path) = truth_csv {
                io::export_spectrum_csv(&truth, &points, &path)?;
            }
            io::write_report(&rep, &out).with_context(|| format!("writing {}", out.display()))?;
        }
        Command::Stitch { low, high, out } => {
            let low = io::read_cube(&low).with_context(|| format!("reading {}", low.display()))?;
            let high = io::read_cube(&high).with_context(|| format!("reading {}", high.display()))?;
            let cube = stitch_cubes(&low, &high)?;
            io::write_cube(&cube, &out).with_context(|| format!("writing {}", out.display()))?;
        }
        Command::BandImage { cube, channel, wavelength, out } => {
            let cube = io::read_cube(&cube).with_context(|| format!("reading {}", cube.display()))?;
            let channel = match (channel, wavelength) {
                (Some(c), _) => c,
                (None, Some(w)) => cube.grid().nearest_channel(w),
                (None, None) => bail!("give --channel or --wavelength"),
            };
            let info = io::export_band_image(&cube, channel, &out)?;
            if info.constant {
                eprintln!("warning: channel {channel} is constant; wrote an all-zero image");
            }
        }
    }
    Ok(())
}
