//! The `fanbeam` command-line surface.
//!
//! Subcommands cover the full chain: `design-lens`, `simulate`,
//! `reconstruct`, `compare-oracle`, `capture-psf`, `deconvolve`, `validate`,
//! `cost`, and `pipeline` (end to end). Exit codes: 0 on success, 1 on
//! validation or runtime failure, 2 on usage errors.

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use ndarray::Axis;

use crate::deconv::{capture_psf_bank, deconvolve, deconvolve_magnitude, profile_fwhm, x_profile};
use crate::forward::{add_noise, simulate_echo, EchoVolume};
use crate::io::container;
use crate::io::pgm::emit_image;
use crate::io::scene::SceneConfig;
use crate::planning::{
    flop_cost, latency_budget, throughput, validate_sampling, CostReport, CriterionResult,
    LatencyBudget, SamplingPlan, Verdict,
};
use crate::quasioptics::{design_lens, LensSpec};
use crate::recon::{
    argmax_magnitude, backproject_oracle, peak_region_correlation, reconstruct_volume,
    ReconGrid, ReconOptions, SpectralPlan, StoltInterp,
};

/// Environment variable supplying the default worker count.
pub const WORKERS_ENV: &str = "FBH_WORKERS";

#[derive(Parser)]
#[command(
    name = "fanbeam",
    version,
    about = "Fan-beam millimeter-wave line-scan imaging toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Design the fan-beam lens and export its contour curves.
    DesignLens(DesignLensArgs),
    /// Synthesize an echo volume from a scene configuration.
    Simulate(SimulateArgs),
    /// Reconstruct an echo container into an image volume and PGM slices.
    Reconstruct(ReconstructArgs),
    /// Cross-check the fast reconstruction against brute-force
    /// backprojection on a small echo.
    CompareOracle(CompareOracleArgs),
    /// Capture a depth bank of x-profiles from simulated rod targets.
    CapturePsf(CapturePsfArgs),
    /// Wiener-deconvolve an image volume with a PSF bank.
    Deconvolve(DeconvolveArgs),
    /// Check a sampling plan against the acquisition criteria.
    Validate(ValidateArgs),
    /// Per-column FLOP cost, latency, and throughput budgeting.
    Cost(CostArgs),
    /// Run the whole chain on a scene configuration.
    Pipeline(PipelineArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum OutputFormat {
    Table,
    Toml,
}

#[derive(Args)]
struct DesignLensArgs {
    /// Object distance s1 (mm).
    #[arg(long, default_value_t = 300.0)]
    s1: f64,
    /// Object-side waist w01 (mm).
    #[arg(long, default_value_t = 8.51)]
    w01: f64,
    /// Image-side waist w02 (mm).
    #[arg(long, default_value_t = 17.02)]
    w02: f64,
    /// Wavelength (mm).
    #[arg(long, default_value_t = 11.11)]
    wavelength: f64,
    /// Refractive index of the lens material.
    #[arg(long, default_value_t = 1.45)]
    refractive_index: f64,
    /// Aperture rule factor: D = factor * w(s1).
    #[arg(long, default_value_t = 2.5)]
    aperture_factor: f64,
    /// Extrusion length of the cylindrical profile (mm).
    #[arg(long, default_value_t = 1600.0)]
    lens_length: f64,
    /// Write contour CSVs (`<prefix>_object.csv`, `<prefix>_image.csv`).
    #[arg(long)]
    csv_prefix: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    format: OutputFormat,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scene configuration (TOML).
    #[arg(long)]
    scene: PathBuf,
    /// Output echo container.
    #[arg(long)]
    out: PathBuf,
    /// Override the configured SNR (dB); omit for the config value.
    #[arg(long)]
    snr_db: Option<f64>,
    /// Override the configured noise seed.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ReconstructArgs {
    /// Input echo container.
    #[arg(long)]
    echo: PathBuf,
    /// Output prefix: writes `<prefix>.fbec` and `<prefix>_x###.pgm`.
    #[arg(long)]
    out_prefix: PathBuf,
    /// Reference depth override (mm); defaults to the container's hint.
    #[arg(long)]
    z0: Option<f64>,
    /// Hann window over element and frequency axes.
    #[arg(long)]
    window: bool,
    /// Apply the Stolt change-of-variables weight.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    jacobian: bool,
    /// Stolt interpolation kernel.
    #[arg(long, default_value = "linear")]
    stolt: StoltInterp,
    /// Worker threads (default: FBH_WORKERS, else all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Display dynamic range (dB).
    #[arg(long, default_value_t = 18.0)]
    dynamic_range: f64,
}

#[derive(Args)]
struct CompareOracleArgs {
    /// Input echo container (small grids only).
    #[arg(long)]
    echo: PathBuf,
    /// Required peak-region correlation.
    #[arg(long, default_value_t = 0.95)]
    min_correlation: f64,
    /// Largest element/tone counts accepted (backprojection is
    /// O(N_y^2 N_f N_z) per column).
    #[arg(long, default_value_t = 64)]
    max_elements: usize,
    #[arg(long, default_value_t = 64)]
    max_tones: usize,
}

#[derive(Args)]
struct CapturePsfArgs {
    /// Scene configuration supplying geometry, sweep, and beam.
    #[arg(long)]
    scene: PathBuf,
    /// Comma-separated capture depths (mm).
    #[arg(long, value_delimiter = ',', required = true)]
    depths: Vec<f64>,
    /// Output PSF bank container.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DeconvolveArgs {
    /// Input image container.
    #[arg(long)]
    image: PathBuf,
    /// PSF bank container.
    #[arg(long)]
    psf: PathBuf,
    /// Wiener regularization floor (relative).
    #[arg(long, default_value_t = 1e-2)]
    epsilon: f64,
    /// Operate on magnitudes instead of complex data.
    #[arg(long)]
    magnitude: bool,
    /// Output prefix: writes `<prefix>.fbec` and `<prefix>_x###.pgm`.
    #[arg(long)]
    out_prefix: PathBuf,
    /// Display dynamic range (dB).
    #[arg(long, default_value_t = 18.0)]
    dynamic_range: f64,
}

#[derive(Args)]
struct ValidateArgs {
    /// Belt sampling step (mm).
    #[arg(long, default_value_t = 5.2)]
    delta_x: f64,
    /// Element pitch (mm).
    #[arg(long, default_value_t = 5.2)]
    delta_y: f64,
    /// Frequency step (MHz).
    #[arg(long, default_value_t = 64.0)]
    delta_f_mhz: f64,
    /// Target scan-direction resolution (mm).
    #[arg(long, default_value_t = 10.4)]
    min_x_resolution: f64,
    /// Shortest wavelength in the band (mm).
    #[arg(long, default_value_t = 10.0)]
    lambda_min: f64,
    /// Array height (mm).
    #[arg(long, default_value_t = 960.0)]
    array_height: f64,
    /// Imaging-domain height (mm).
    #[arg(long, default_value_t = 2000.0)]
    domain_height: f64,
    /// Standoff distance (mm).
    #[arg(long, default_value_t = 1200.0)]
    standoff: f64,
    /// Maximum imaging range (mm).
    #[arg(long, default_value_t = 2300.0)]
    r_max: f64,
    #[arg(long, value_enum, default_value = "table")]
    format: OutputFormat,
}

#[derive(Args)]
struct CostArgs {
    /// Elements per column.
    n_y: usize,
    /// Frequency tones.
    n_f: usize,
    /// Depth bins.
    n_z: usize,
    /// Compute rate (TFLOP/s).
    #[arg(long, default_value_t = 6.5)]
    rate_tflops: f64,
    /// Belt speed (mm/s).
    #[arg(long, default_value_t = 500.0)]
    belt: f64,
    /// Belt sampling step (mm).
    #[arg(long, default_value_t = 5.2)]
    delta_x: f64,
    /// Spacing between screened subjects (mm).
    #[arg(long, default_value_t = 1000.0)]
    spacing: f64,
    #[arg(long, value_enum, default_value = "table")]
    format: OutputFormat,
}

#[derive(Args)]
struct PipelineArgs {
    /// Scene configuration (TOML).
    #[arg(long)]
    scene: PathBuf,
    /// Output directory.
    #[arg(long)]
    out_dir: PathBuf,
    /// Wiener regularization for the deconvolution stage.
    #[arg(long, default_value_t = 1e-2)]
    epsilon: f64,
    /// Display dynamic range (dB).
    #[arg(long, default_value_t = 18.0)]
    dynamic_range: f64,
    /// Worker threads (default: FBH_WORKERS, else all cores).
    #[arg(long)]
    workers: Option<usize>,
}

/// Run the CLI against an argument vector and return the process exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = err.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::DesignLens(args) => cmd_design_lens(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Reconstruct(args) => cmd_reconstruct(args),
        Command::CompareOracle(args) => cmd_compare_oracle(args),
        Command::CapturePsf(args) => cmd_capture_psf(args),
        Command::Deconvolve(args) => cmd_deconvolve(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Cost(args) => cmd_cost(args),
        Command::Pipeline(args) => cmd_pipeline(args),
    };
    match result {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            1
        }
    }
}

type CmdResult = Result<i32, Box<dyn std::error::Error>>;

fn workers_or_env(flag: Option<usize>) -> Option<usize> {
    flag.or_else(|| {
        std::env::var(WORKERS_ENV)
            .ok()
            .and_then(|v| v.parse().ok())
    })
}

fn with_pool<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> R {
    match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("worker pool")
            .install(f),
        None => f(),
    }
}

fn write_profile_csv(path: &Path, profile: &[(f64, f64)]) -> std::io::Result<()> {
    use std::io::Write;
    let mut file = std::fs::File::create(path)?;
    writeln!(file, "x_mm,z_mm")?;
    for (x, z) in profile {
        writeln!(file, "{x:.6},{z:.6}")?;
    }
    Ok(())
}

fn cmd_design_lens(args: DesignLensArgs) -> CmdResult {
    let spec = LensSpec {
        object_distance: args.s1,
        object_waist: args.w01,
        image_waist: args.w02,
        wavelength: args.wavelength,
        refractive_index: args.refractive_index,
        aperture_factor: args.aperture_factor,
        lens_length: args.lens_length,
    };
    let design = design_lens(&spec)?;

    match args.format {
        OutputFormat::Toml => print!("{}", toml::to_string(&design)?),
        OutputFormat::Table => {
            println!("lens design");
            println!("  focal length f        {:10.2} mm", design.focal_length);
            println!("  image distance s2     {:10.2} mm", design.image_distance);
            println!("  thickness T           {:10.2} mm", design.thickness);
            println!("  aperture D            {:10.2} mm", design.aperture);
            println!(
                "  focal plane s1+T+s2   {:10.2} mm",
                design.predicted_focal_plane
            );
            println!(
                "  interception          {:10.1} %",
                design.interception_efficiency * 100.0
            );
        }
    }

    if let Some(prefix) = args.csv_prefix {
        let stem = prefix.to_string_lossy();
        let object = PathBuf::from(format!("{stem}_object.csv"));
        let image = PathBuf::from(format!("{stem}_image.csv"));
        write_profile_csv(&object, &design.object_side_profile)?;
        write_profile_csv(&image, &design.image_side_profile)?;
        eprintln!("wrote {} and {}", object.display(), image.display());
    }
    Ok(0)
}

fn cmd_simulate(args: SimulateArgs) -> CmdResult {
    let config = SceneConfig::from_path(&args.scene)?;
    let scene = config.scene();
    let geometry = config.array_geometry();
    let sweep = config.frequency_sweep();
    let beam = config.fan_beam();

    let started = Instant::now();
    let mut echo = simulate_echo(&scene, &geometry, &sweep, &beam)?;
    echo.z0_hint = config.z0();

    let noise = match (args.snr_db, &config.noise) {
        (Some(snr), existing) => {
            let seed = args.seed.or(existing.as_ref().map(|n| n.seed)).unwrap_or(0);
            Some((snr, seed))
        }
        (None, Some(n)) => Some((n.snr_db, args.seed.unwrap_or(n.seed))),
        (None, None) => None,
    };
    if let Some((snr_db, seed)) = noise {
        echo = add_noise(&echo, snr_db, seed)?;
    }

    container::write_echo(&args.out, &echo)?;
    let (n_x, n_y, n_f) = echo.data.dim();
    println!(
        "simulated {n_x} x {n_y} x {n_f} echo ({} scatterers) in {:.2?}",
        scene.scatterers.len(),
        started.elapsed()
    );
    println!("wrote {}", args.out.display());
    Ok(0)
}

fn cmd_reconstruct(args: ReconstructArgs) -> CmdResult {
    let echo: EchoVolume<f64> = container::read_echo(&args.echo)?;
    let options = ReconOptions {
        interp: args.stolt,
        jacobian: args.jacobian,
        window: args.window,
    };
    let plan = SpectralPlan::for_echo(&echo, options)?;
    let z0 = args.z0.unwrap_or(echo.z0_hint);
    let grid = ReconGrid::from_plan(&plan, &echo.geometry, z0);

    let workers = workers_or_env(args.workers);
    let started = Instant::now();
    let image = with_pool(workers, || reconstruct_volume(&echo, &plan, &grid))?;
    let elapsed = started.elapsed();

    let paths = emit_image(
        &image,
        args.dynamic_range,
        &args.out_prefix,
        echo.geometry.x_start,
        echo.geometry.x_step,
    )?;

    let n_x = echo.data.dim().0;
    let (px, py, pz) = argmax_magnitude(&image.data);
    println!(
        "reconstructed {} columns in {:.2?} ({:.3} ms/column)",
        n_x,
        elapsed,
        elapsed.as_secs_f64() * 1e3 / n_x as f64
    );
    println!(
        "peak voxel at x index {px}, y = {:.1} mm, z = {:.1} mm",
        grid.y_centers[py], grid.z_centers[pz]
    );
    println!("wrote {} files under {}", paths.len(), args.out_prefix.display());
    Ok(0)
}

fn cmd_compare_oracle(args: CompareOracleArgs) -> CmdResult {
    let echo: EchoVolume<f64> = container::read_echo(&args.echo)?;
    let (n_x, n_y, n_f) = echo.data.dim();
    if n_y > args.max_elements || n_f > args.max_tones {
        eprintln!(
            "echo is {n_y} elements x {n_f} tones; backprojection is limited to \
             {} x {} (override with --max-elements/--max-tones)",
            args.max_elements, args.max_tones
        );
        return Ok(1);
    }

    let plan = SpectralPlan::for_echo(&echo, ReconOptions::default())?;
    let grid = ReconGrid::from_plan(&plan, &echo.geometry, echo.z0_hint);
    let fast = reconstruct_volume(&echo, &plan, &grid)?;
    let oracle = backproject_oracle(&echo, &grid);

    let fast_peak = argmax_magnitude(&fast.data);
    let oracle_peak = argmax_magnitude(&oracle.data);
    let (px, py, pz) = fast_peak;
    let correlation = peak_region_correlation(
        fast.data.index_axis(Axis(0), px),
        oracle.data.index_axis(Axis(0), px),
        (py, pz),
        (4, 2),
    );

    println!("oracle comparison over {n_x} column(s)");
    println!("  fast peak voxel    {fast_peak:?}");
    println!("  oracle peak voxel  {oracle_peak:?}");
    println!("  peak-region correlation {correlation:.4}");
    let ok = correlation >= args.min_correlation && fast_peak == oracle_peak;
    println!("  verdict: {}", if ok { "AGREE" } else { "DISAGREE" });
    Ok(if ok { 0 } else { 1 })
}

fn cmd_capture_psf(args: CapturePsfArgs) -> CmdResult {
    let config = SceneConfig::from_path(&args.scene)?;
    let geometry = config.array_geometry();
    let sweep = config.frequency_sweep();
    let beam = config.fan_beam();

    let bank = capture_psf_bank(&geometry, &sweep, &beam, &args.depths)?;
    container::write_psf_bank(&args.out, &bank)?;

    println!("captured {} profiles (pitch {:.2} mm)", bank.entries.len(), bank.x_pitch);
    for entry in &bank.entries {
        let fwhm = profile_fwhm(&entry.magnitudes(), bank.x_pitch)
            .map(|v| format!("{v:.2} mm"))
            .unwrap_or_else(|_| "n/a".to_string());
        println!("  z = {:7.1} mm: {} taps, FWHM {fwhm}", entry.depth, entry.len());
    }
    println!("wrote {}", args.out.display());
    Ok(0)
}

fn cmd_deconvolve(args: DeconvolveArgs) -> CmdResult {
    let stored = container::read_image::<f64>(&args.image)?;
    let bank = container::read_psf_bank::<f64>(&args.psf)?;

    let output = if args.magnitude {
        deconvolve_magnitude(&stored.image, &bank, args.epsilon)?
    } else {
        deconvolve(&stored.image, &bank, args.epsilon)?
    };

    let (_, py, pz) = argmax_magnitude(&stored.image.data);
    let before: Vec<f64> = x_profile(&stored.image, py, pz)
        .iter()
        .map(|c| c.norm())
        .collect();
    let after: Vec<f64> = x_profile(&output, py, pz).iter().map(|c| c.norm()).collect();
    let fmt = |r: Result<f64, _>| r.map(|v| format!("{v:.2} mm")).unwrap_or("n/a".into());
    println!(
        "peak-line x FWHM: {} -> {}",
        fmt(profile_fwhm(&before, stored.x_step)),
        fmt(profile_fwhm(&after, stored.x_step))
    );

    let paths = emit_image(
        &output,
        args.dynamic_range,
        &args.out_prefix,
        stored.x_start,
        stored.x_step,
    )?;
    println!("wrote {} files under {}", paths.len(), args.out_prefix.display());
    Ok(0)
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "PASS",
        Verdict::Warn => "WARN",
        Verdict::Fail => "FAIL",
    }
}

fn print_criterion(name: &str, c: &CriterionResult<f64>) {
    println!(
        "  {name:<28} {:9.3} vs limit {:9.3}  margin {:+7.1}%  {}",
        c.actual,
        c.limit,
        c.margin * 100.0,
        verdict_str(c.verdict)
    );
}

fn cmd_validate(args: ValidateArgs) -> CmdResult {
    let plan = SamplingPlan {
        delta_x: args.delta_x,
        delta_y: args.delta_y,
        delta_f_mhz: args.delta_f_mhz,
        min_x_resolution: args.min_x_resolution,
        lambda_min: args.lambda_min,
        array_height: args.array_height,
        domain_height: args.domain_height,
        standoff: args.standoff,
        r_max: args.r_max,
    };
    let report = validate_sampling(&plan);

    match args.format {
        OutputFormat::Toml => print!("{}", toml::to_string(&report)?),
        OutputFormat::Table => {
            println!("sampling criteria");
            print_criterion("belt step (mm)", &report.x_rule);
            print_criterion("pitch, angular rule (mm)", &report.y_rule_strict);
            print_criterion("pitch, half-wavelength (mm)", &report.y_rule_practical);
            print_criterion("frequency step (MHz)", &report.f_rule);
            if report.y_rule_practical.verdict == Verdict::Warn {
                println!(
                    "  warning: pitch exceeds the half-wavelength rule by {:.1}% \
                     (within engineering margin)",
                    -report.y_rule_practical.margin * 100.0
                );
            }
            println!(
                "overall: {}",
                if report.acceptable() { "ACCEPTABLE" } else { "REJECTED" }
            );
        }
    }
    Ok(if report.acceptable() { 0 } else { 1 })
}

/// Machine-readable bundle emitted by `cost --format toml`.
#[derive(serde::Serialize, serde::Deserialize)]
pub struct CostOutput {
    pub cost: CostReport<f64>,
    pub latency: LatencyBudget<f64>,
    pub throughput_per_hour: f64,
}

fn cmd_cost(args: CostArgs) -> CmdResult {
    let report = flop_cost::<f64>(args.n_y, args.n_f, args.n_z);
    let budget = latency_budget(&report, args.rate_tflops * 1e12, args.belt, args.delta_x);
    let people = throughput(args.belt, args.spacing);

    match args.format {
        OutputFormat::Toml => {
            let out = CostOutput {
                cost: report,
                latency: budget,
                throughput_per_hour: people,
            };
            print!("{}", toml::to_string(&out)?);
        }
        OutputFormat::Table => {
            println!(
                "per-column cost for N_y = {}, N_f = {}, N_z = {}",
                args.n_y, args.n_f, args.n_z
            );
            println!("  {:<32} {:>14} {:>14}", "stage", "multiplies", "adds");
            for stage in &report.stages {
                println!(
                    "  {:<32} {:>14.0} {:>14.0}",
                    stage.name, stage.multiplications, stage.additions
                );
            }
            println!(
                "  total {:.3} MFLOPs (closed form {:.3} MFLOPs)",
                report.total_flops / 1e6,
                report.closed_form_flops / 1e6
            );
            println!(
                "  per-column time at {:.1} TFLOP/s: {:.3} us",
                args.rate_tflops,
                budget.per_column_seconds * 1e6
            );
            println!(
                "  inter-column interval at {:.0} mm/s, dx = {:.1} mm: {:.1} ms",
                args.belt,
                args.delta_x,
                budget.inter_column_seconds * 1e3
            );
            println!(
                "  real-time: {}",
                if budget.real_time { "yes" } else { "no" }
            );
            println!(
                "  throughput at {:.0} mm spacing: {:.0} people/hour",
                args.spacing, people
            );
        }
    }
    Ok(0)
}

fn cmd_pipeline(args: PipelineArgs) -> CmdResult {
    std::fs::create_dir_all(&args.out_dir)?;
    let config = SceneConfig::from_path(&args.scene)?;
    let scene = config.scene();
    let geometry = config.array_geometry();
    let sweep = config.frequency_sweep();
    let beam = config.fan_beam();
    let workers = workers_or_env(args.workers);

    println!("== simulate ==");
    let started = Instant::now();
    let mut echo = with_pool(workers, || simulate_echo(&scene, &geometry, &sweep, &beam))?;
    echo.z0_hint = config.z0();
    if let Some(noise) = &config.noise {
        echo = add_noise(&echo, noise.snr_db, noise.seed)?;
    }
    let echo_path = args.out_dir.join("echo.fbec");
    container::write_echo(&echo_path, &echo)?;
    let (n_x, n_y, n_f) = echo.data.dim();
    println!(
        "  {n_x} x {n_y} x {n_f} samples in {:.2?} -> {}",
        started.elapsed(),
        echo_path.display()
    );

    println!("== reconstruct ==");
    let plan = SpectralPlan::for_echo(&echo, ReconOptions::default())?;
    let grid = ReconGrid::from_plan(&plan, &echo.geometry, echo.z0_hint);
    let started = Instant::now();
    let image = with_pool(workers, || reconstruct_volume(&echo, &plan, &grid))?;
    let recon_elapsed = started.elapsed();
    let per_column_ms = recon_elapsed.as_secs_f64() * 1e3 / n_x as f64;
    println!(
        "  {} columns in {:.2?} ({per_column_ms:.3} ms/column)",
        n_x, recon_elapsed
    );
    let image_prefix = args.out_dir.join("image");
    let paths = emit_image(
        &image,
        args.dynamic_range,
        &image_prefix,
        echo.geometry.x_start,
        echo.geometry.x_step,
    )?;
    println!("  wrote {} files under {}", paths.len(), image_prefix.display());

    let (px, py, pz) = argmax_magnitude(&image.data);
    println!(
        "  peak voxel: x index {px}, y = {:.1} mm, z = {:.1} mm",
        grid.y_centers[py], grid.z_centers[pz]
    );

    if geometry.tx_rx_offset != 0.0 {
        println!("== capture psf + deconvolve ==");
        let z_lo = scene.min_z().unwrap_or(1200.0);
        let z_hi = scene
            .scatterers
            .iter()
            .map(|s| s.z)
            .fold(z_lo, f64::max);
        let mut depths = vec![z_lo];
        let mut z = z_lo + 50.0;
        while z < z_hi + 25.0 {
            depths.push(z);
            z += 50.0;
        }
        let bank = with_pool(workers, || {
            capture_psf_bank(&geometry, &sweep, &beam, &depths)
        })?;
        let bank_path = args.out_dir.join("psf.fbec");
        container::write_psf_bank(&bank_path, &bank)?;
        println!("  captured {} profiles -> {}", bank.entries.len(), bank_path.display());

        let sharpened = deconvolve(&image, &bank, args.epsilon)?;
        let sharp_prefix = args.out_dir.join("deconvolved");
        let paths = emit_image(
            &sharpened,
            args.dynamic_range,
            &sharp_prefix,
            echo.geometry.x_start,
            echo.geometry.x_step,
        )?;
        println!("  wrote {} files under {}", paths.len(), sharp_prefix.display());

        let before: Vec<f64> = x_profile(&image, py, pz).iter().map(|c| c.norm()).collect();
        let after: Vec<f64> = x_profile(&sharpened, py, pz)
            .iter()
            .map(|c| c.norm())
            .collect();
        if let (Ok(b), Ok(a)) = (
            profile_fwhm(&before, echo.geometry.x_step),
            profile_fwhm(&after, echo.geometry.x_step),
        ) {
            println!("  peak-line x FWHM: {b:.2} mm -> {a:.2} mm");
        }
    }

    println!("== budget ==");
    let report = flop_cost::<f64>(n_y, n_f, plan.n_z);
    let budget = latency_budget(&report, 6.5e12, 500.0, echo.geometry.x_step);
    println!(
        "  model: {:.3} MFLOPs/column, {:.3} us at 6.5 TFLOP/s, interval {:.1} ms",
        report.total_flops / 1e6,
        budget.per_column_seconds * 1e6,
        budget.inter_column_seconds * 1e3
    );
    println!(
        "  measured: {per_column_ms:.3} ms/column ({})",
        if per_column_ms <= budget.inter_column_seconds * 1e3 {
            "within the inter-column interval"
        } else {
            "over the inter-column interval"
        }
    );
    Ok(0)
}
