#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context as _, Result};
use clap::{Parser, Subcommand};
use taubnut::config_file::{self, ConfigFile, PRESETS};
use taubnut::manifest::RunManifest;
use taubnut::parallel::{init_workers, Rayon, WORKERS_ENV};
use taubnut::plot::{emit_plot_data, format_rows, plot_rows, PlotQuantity};
use taubnut::suite::{run_suite, CheckName, Context};
use taubnut_core::asymptotics::{decay_samples, fit_exponent, Quantity, SphereSampler};
use taubnut_core::integrals::{
    fiber_length, flux_additivity, mass, small_sphere_radius, tube_volume, IntegralOptions,
    VolumeOptions,
};

/// Build and verify multi-Taub-NUT gravitational instantons.
#[derive(Parser, Debug)]
#[command(name = "taubnut", version)]
struct Cli {
    /// Configuration file (JSON).
    #[arg(long, global = true, conflicts_with_all = ["preset", "manifest"])]
    config: Option<PathBuf>,
    /// Named configuration; see `preset-list`.
    #[arg(long, global = true, conflicts_with = "manifest")]
    preset: Option<String>,
    /// Full run manifest (JSON); flags given alongside override it.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Seed for all random point selection.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Multiplies every tolerance.
    #[arg(long, global = true)]
    tol_scale: Option<f64>,
    /// Comma-separated radius schedule for the subcommand.
    #[arg(long, global = true, value_delimiter = ',')]
    radii: Option<Vec<f64>>,
    /// Output file.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true, env = WORKERS_ENV)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the configuration and the checks of the suite.
    Describe,
    /// Run the verification suite. Exit status 1 if any check fails.
    Verify {
        /// Comma-separated check names (default: all).
        #[arg(long, value_delimiter = ',')]
        suite: Option<Vec<String>>,
    },
    /// Chern numbers of small spheres and of a large sphere.
    Flux,
    /// Boundary mass over a radius schedule and its extrapolation.
    Mass,
    /// Decay exponents of |Riem|, |g - h|_h and the fibre-length defect.
    Decay,
    /// Tube volume and its ratio to the cubic model.
    Volume,
    /// Fibre length at a point.
    FiberLength {
        /// Base point x1,x2,x3 (default: far out on the x3 axis).
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        point: Option<Vec<f64>>,
    },
    /// Write `radius,value` rows for one quantity.
    PlotData {
        /// riem_decay, metric_deviation, mass_convergence, fiber_length or volume_growth.
        quantity: PlotQuantity,
    },
    /// List the named configurations.
    PresetList,
}

fn manifest(cli: &Cli) -> Result<RunManifest> {
    let mut m = if let Some(path) = &cli.manifest {
        RunManifest::load(path)?
    } else if let Some(path) = &cli.config {
        RunManifest::new(ConfigFile::from_config(&config_file::load_config(path)?))
    } else if let Some(name) = &cli.preset {
        RunManifest::preset(name)?
    } else {
        bail!("one of --config, --preset or --manifest is required");
    };
    if let Some(seed) = cli.seed {
        m.seed = seed;
    }
    if let Some(s) = cli.tol_scale {
        if !(s > 0.0) {
            bail!("--tol-scale must be positive, got {s}");
        }
        m.tol_scale = s;
    }
    Ok(m)
}

fn run(cli: Cli) -> Result<ExitCode> {
    init_workers(cli.workers);
    if let Command::PresetList = cli.command {
        for p in PRESETS {
            println!("{:<22} {}", p.name, p.description);
        }
        return Ok(ExitCode::SUCCESS);
    }
    let mut m = manifest(&cli)?;
    let radii = cli.radii.clone();
    match &cli.command {
        Command::PresetList => unreachable!(),
        Command::Describe => {
            let ctx = Context::new(&m)?;
            let c = &ctx.config;
            println!(
                "k = {}, m = {}, total mass = {}",
                c.k(),
                c.mass(),
                c.total_mass()
            );
            println!("fibre period L = 8 pi m = {:.15}", c.fiber_period());
            println!(
                "exclusion radius = {:e}, length scale = {}",
                c.exclusion_radius(),
                c.length_scale()
            );
            for (i, a) in c.centers().iter().enumerate() {
                println!(
                    "center {i}: ({}, {}, {})  mass {}",
                    a[0],
                    a[1],
                    a[2],
                    c.center_mass(i)
                );
            }
            if c.is_perturbed() {
                println!("debug perturbation active: this is a negative-control configuration");
            }
            println!("seed = {}", m.seed);
            println!("checks:");
            for check in m.checks() {
                println!(
                    "  {:<24} tol {:<8.1e} {}",
                    check.as_str(),
                    m.tolerance(check),
                    check.description()
                );
            }
        }
        Command::Verify { suite } => {
            if radii.is_some() {
                bail!(
                    "--radii is ambiguous for verify; set radii.mass / radii.decay in a manifest"
                );
            }
            if let Some(names) = suite {
                m.suite = names
                    .iter()
                    .map(|n| CheckName::parse(n).with_context(|| format!("unknown check {n:?}")))
                    .collect::<Result<_>>()?;
            }
            let outcome = run_suite(&m)?;
            print!("{}", outcome.report.human_summary(Some(&outcome.timings)));
            if let Some(path) = cli.out.as_ref().or(m.outputs.report.as_ref()) {
                std::fs::write(path, outcome.report.to_json())
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
            return Ok(if outcome.report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            });
        }
        Command::Flux => {
            let ctx = Context::new(&m)?;
            let c = &ctx.config;
            let large = radii
                .and_then(|r| r.first().copied())
                .unwrap_or(8.0 * c.length_scale());
            let opts = IntegralOptions::default();
            let a = flux_additivity(c, large, small_sphere_radius(c), &opts, &Rayon)?;
            let l = c.fiber_period();
            for (i, f) in a.small.iter().enumerate() {
                println!("center {i}: chern = {:.12}", f / l);
            }
            println!("large sphere R = {large}: chern = {:.12}", a.large / l);
            println!("additivity residual = {:e}", a.residual);
        }
        Command::Mass => {
            m.radii.mass = radii.or(m.radii.mass);
            let ctx = Context::new(&m)?;
            let r = mass(
                &ctx.config,
                &ctx.mass_radii(),
                &IntegralOptions::default(),
                &Rayon,
            )?;
            println!("radius,estimate");
            for (radius, e) in r.radii.iter().zip(&r.estimates) {
                println!("{radius},{e:.12}");
            }
            println!(
                "extrapolated mass = {:.12} (sum of masses {})",
                r.extrapolated,
                ctx.config.total_mass()
            );
            println!("fibre-invariance defect = {:e}", r.fiber_defect);
        }
        Command::Decay => {
            m.radii.decay = radii.or(m.radii.decay);
            let ctx = Context::new(&m)?;
            let sampler = SphereSampler::from_seed(m.samples.sphere_nodes, m.seed);
            for q in Quantity::ALL {
                let s = decay_samples(&ctx.config, q, &ctx.decay_radii(), &sampler, &Rayon)?;
                match fit_exponent(&s) {
                    Ok(fit) => println!(
                        "{:<18} slope {:+.5} (expected {:+})",
                        q.name(),
                        fit.slope,
                        q.expected_slope()
                    ),
                    Err(e) => println!("{:<18} no fit: {e}", q.name()),
                }
            }
        }
        Command::Volume => {
            m.radii.volume = radii.and_then(|r| r.first().copied()).or(m.radii.volume);
            let ctx = Context::new(&m)?;
            let c = &ctx.config;
            let r = ctx.volume_radius();
            let v = tube_volume(c, r, &VolumeOptions::default())?;
            let v2 = tube_volume(c, 2.0 * r, &VolumeOptions::default())?;
            let model = 4.0 * std::f64::consts::PI / 3.0 * c.fiber_period();
            println!("R = {r}: volume = {v:.12e}");
            println!("volume / (4 pi L R^3 / 3) = {:.9}", v / (model * r * r * r));
            println!("vol(2R) / vol(R) = {:.9}", v2 / v);
        }
        Command::FiberLength { point } => {
            let ctx = Context::new(&m)?;
            let c = &ctx.config;
            let x = match point {
                Some(p) if p.len() == 3 => [p[0], p[1], p[2]],
                Some(p) => bail!("--point needs three coordinates, got {}", p.len()),
                None => {
                    let o = c.centroid();
                    [o[0], o[1], o[2] + 1e4 * c.length_scale()]
                }
            };
            let l = fiber_length(c, x)?;
            println!("L({}, {}, {}) = {l:.15}", x[0], x[1], x[2]);
            println!("L / (8 pi m) = {:.15}", l / c.fiber_period());
        }
        Command::PlotData { quantity } => {
            match quantity {
                PlotQuantity::MassConvergence => m.radii.mass = radii.or(m.radii.mass),
                PlotQuantity::VolumeGrowth => {
                    m.radii.volume = radii.and_then(|r| r.first().copied()).or(m.radii.volume)
                }
                _ => m.radii.decay = radii.or(m.radii.decay),
            }
            let out = cli.out.clone().or_else(|| {
                m.outputs
                    .plot_dir
                    .as_ref()
                    .map(|d| d.join(format!("{}.csv", quantity.as_str())))
            });
            match out {
                Some(path) => {
                    let rows = emit_plot_data(&m, *quantity, &path)?;
                    eprintln!("wrote {} rows to {}", rows.len(), path.display());
                }
                None => print!("{}", format_rows(&plot_rows(&m, *quantity)?)),
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
