mod commands;
mod files;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "roughbody", version, about = "Flat chains, rough bodies and Cauchy fluxes on simplicial meshes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mesh checks.
    Mesh {
        #[command(subcommand)]
        action: MeshAction,
    },
    /// Flat norm of a chain, optionally on a barycentric subdivision.
    Flatnorm {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        chain: PathBuf,
        /// Number of barycentric subdivisions of the ambient mesh.
        #[arg(long, default_value_t = 0)]
        subdivide: usize,
        #[command(flatten)]
        out: Output,
    },
    /// Prefractal bodies.
    Fractal {
        #[arg(long = "type", value_enum)]
        kind: FractalKind,
        #[arg(long)]
        level: usize,
        /// Body file; the mesh is written next to it as `<stem>.mesh.json`.
        #[arg(long = "out")]
        body_out: PathBuf,
        /// Cauchy threshold on the last flat distance.
        #[arg(long, default_value_t = 0.05)]
        epsilon: f64,
        /// JSON report path (stdout when absent).
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Cauchy fluxes.
    Flux {
        #[command(subcommand)]
        action: FluxAction,
    },
    /// Property checks.
    Verify {
        #[command(subcommand)]
        action: VerifyAction,
    },
    /// Stress representations.
    Stress {
        #[command(subcommand)]
        action: StressAction,
    },
}

#[derive(Subcommand)]
enum MeshAction {
    /// Builds the complex and reports its validation summary.
    Validate {
        #[arg(long)]
        mesh: PathBuf,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FractalKind {
    Koch,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum FluxKind {
    /// `Φ(T, v) = Σᵢ Xᵢ(vᵢ T)` for the given cochains.
    Cochains,
    /// Averages the test field over each facet and ignores facet size.
    Counting,
}

#[derive(Subcommand)]
enum FluxAction {
    /// Writes a flux file.
    Build {
        #[arg(long)]
        mesh: PathBuf,
        /// One (n−1)-cochain per component.
        #[arg(long = "cochain")]
        cochains: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "cochains")]
        kind: FluxKind,
        /// Declared balance constant s (counting fluxes only).
        #[arg(long, default_value_t = 1.0)]
        s: f64,
        /// Declared balance constant b (counting fluxes only).
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        #[arg(long = "out")]
        flux_out: PathBuf,
    },
    /// Evaluates a flux on a surface chain and a velocity.
    Eval {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        flux: PathBuf,
        #[arg(long)]
        surface: PathBuf,
        #[arg(long)]
        velocity: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Recovers cochains from a flux and audits them.
    Roundtrip {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        flux: PathBuf,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
enum VerifyAction {
    /// Normal-built boundary surface against the chain boundary.
    Stokes {
        #[arg(long)]
        mesh: PathBuf,
        /// Body chain; all top simplices when absent.
        #[arg(long)]
        body: Option<PathBuf>,
        /// Additional random sub-bodies.
        #[arg(long, default_value_t = 0)]
        trials: usize,
        #[command(flatten)]
        run: Campaign,
        #[command(flatten)]
        out: Output,
    },
    /// Product rule and product bounds for PL fields times chains.
    ProductRule {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        chain: Option<PathBuf>,
        #[arg(long)]
        field: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        /// Subdivision cap for the flat-norm bound.
        #[arg(long, default_value_t = 1)]
        levels: usize,
        #[command(flatten)]
        run: Campaign,
        #[command(flatten)]
        out: Output,
    },
    /// The virtual-power identity.
    VirtualPower {
        #[command(flatten)]
        inputs: PowerInputs,
        #[command(flatten)]
        run: Campaign,
        #[command(flatten)]
        out: Output,
    },
    /// Empirical balance constants against the declared ones.
    Balance {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        flux: PathBuf,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[command(flatten)]
        run: Campaign,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand)]
enum StressAction {
    /// Material-frame power integrals and the Piola–Kirchhoff stress.
    Report {
        #[command(flatten)]
        inputs: PowerInputs,
        #[command(flatten)]
        run: Campaign,
        #[command(flatten)]
        out: Output,
    },
}

/// Inputs of the power and stress reports. Spatial data is labelled by the
/// body mesh; missing pieces are drawn at random from the seed.
#[derive(Args)]
pub struct PowerInputs {
    #[arg(long)]
    pub mesh: PathBuf,
    /// Configuration; the identity when absent.
    #[arg(long)]
    pub map: Option<PathBuf>,
    /// One (n−1)-cochain per component.
    #[arg(long = "cochain")]
    pub cochains: Vec<PathBuf>,
    /// Vector field, one value array per component.
    #[arg(long)]
    pub velocity: Option<PathBuf>,
    #[arg(long)]
    pub body: Option<PathBuf>,
}

#[derive(Args)]
pub struct Campaign {
    /// Seed for random inputs; ROUGHBODY_SEED takes precedence.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args)]
pub struct Output {
    /// JSON report path (stdout when absent).
    #[arg(long = "out")]
    pub json: Option<PathBuf>,
    /// CSV report path.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Mesh {
            action: MeshAction::Validate { mesh, out },
        } => commands::mesh_validate(&mesh, &out),
        Command::Flatnorm {
            mesh,
            chain,
            subdivide,
            out,
        } => commands::flatnorm(&mesh, &chain, subdivide, &out),
        Command::Fractal {
            kind: FractalKind::Koch,
            level,
            body_out,
            epsilon,
            report,
            csv,
        } => commands::koch(level, &body_out, epsilon, &Output { json: report, csv }),
        Command::Flux { action } => match action {
            FluxAction::Build {
                mesh,
                cochains,
                kind,
                s,
                b,
                flux_out,
            } => commands::flux_build(&mesh, &cochains, kind, s, b, &flux_out),
            FluxAction::Eval {
                mesh,
                flux,
                surface,
                velocity,
                out,
            } => commands::flux_eval(&mesh, &flux, &surface, &velocity, &out),
            FluxAction::Roundtrip { mesh, flux, out } => commands::flux_roundtrip(&mesh, &flux, &out),
        },
        Command::Verify { action } => match action {
            VerifyAction::Stokes {
                mesh,
                body,
                trials,
                run,
                out,
            } => commands::verify_stokes(&mesh, body.as_deref(), trials, &run, &out),
            VerifyAction::ProductRule {
                mesh,
                chain,
                field,
                trials,
                levels,
                run,
                out,
            } => commands::verify_product_rule(&mesh, chain.as_deref(), field.as_deref(), trials, levels, &run, &out),
            VerifyAction::VirtualPower { inputs, run, out } => commands::verify_virtual_power(&inputs, &run, &out),
            VerifyAction::Balance {
                mesh,
                flux,
                trials,
                run,
                out,
            } => commands::verify_balance(&mesh, &flux, trials, &run, &out),
        },
        Command::Stress {
            action: StressAction::Report { inputs, run, out },
        } => commands::stress_report(&inputs, &run, &out),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
