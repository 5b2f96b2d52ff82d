use clap::{Args, Parser, Subcommand, ValueEnum};
use dissipa::config::{parse_assignments, resolve, Layer};
use dissipa::{constraints, derive, pde, registry, render_text, simulate, verify, CliError, VerifyOptions};
use simulate::Boundary;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "dissipa", version, about = "Contact mechanics of dissipative systems: derive, constrain, simulate, verify")]
struct Cli {
    /// JSON run configuration; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for randomized equivalence tests.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Parameter overrides, `name=value,...`.
    #[arg(long, short = 'p', global = true)]
    params: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in models.
    Models,
    /// Print the derivation document of a model.
    Derive {
        model: Option<String>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Run the constraint algorithm.
    Constraints {
        model: Option<String>,
        #[arg(long, default_value_t = unified::DEFAULT_MAX_GENERATIONS)]
        max_gen: usize,
    },
    /// Integrate a mechanical model and write a CSV trajectory.
    Simulate(SimulateArgs),
    /// Evolve a 1+1-dimensional field model and write per-field CSVs.
    Pde(PdeArgs),
    /// Run the verification suites.
    Verify {
        #[arg(default_value = "all")]
        target: String,
        #[arg(long, hide = true)]
        inject_bug: bool,
    },
}

#[derive(Args)]
struct SimulateArgs {
    model: Option<String>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    /// Initial state, `coord=value,...`.
    #[arg(long)]
    init: Option<String>,
    /// Expression evaluated along the trajectory; repeatable.
    #[arg(long)]
    monitor: Vec<String>,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PdeArgs {
    model: Option<String>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    bc: Option<Boundary>,
    #[arg(long)]
    length: Option<f64>,
    #[arg(long)]
    mode: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn layers(cli: &Cli) -> Result<(Layer, Layer), CliError> {
    let file = match &cli.config {
        Some(p) => Layer::load(p)?,
        None => Layer::default(),
    };
    let mut flags = Layer {
        seed: cli.seed,
        ..Layer::default()
    };
    if let Some(p) = &cli.params {
        flags.params = parse_assignments(p)?;
    }
    match &cli.command {
        Command::Simulate(a) => {
            flags.ode.dt = a.dt;
            flags.ode.t_end = a.t_end;
            flags.ode.monitor = a.monitor.clone();
            if let Some(init) = &a.init {
                flags.ode.init = parse_assignments(init)?;
            }
        }
        Command::Pde(a) => {
            flags.pde.nx = a.nx;
            flags.pde.t_end = a.t_end;
            flags.pde.dt = a.dt;
            flags.pde.bc = a.bc;
            flags.pde.length = a.length;
            flags.pde.mode = a.mode;
        }
        _ => {}
    }
    Ok((file, flags))
}

fn print_json(v: &impl serde::Serialize) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let (file, flags) = layers(&cli)?;
    let resolved = |model: &Option<String>| resolve(model.as_deref(), &file, &flags);
    match &cli.command {
        Command::Models => {
            println!("{:<22} {:<20} {:>2} {:>2}  section", "name", "kind", "n", "k");
            for m in registry() {
                println!("{:<22} {:<20} {:>2} {:>2}  {}  {}", m.name, m.kind.label(), m.n, m.k, m.section, m.summary);
            }
        }
        Command::Derive { model, format } => {
            let doc = derive(&resolved(model)?)?;
            match format {
                Format::Json => print_json(&doc)?,
                Format::Text => print!("{}", render_text(&doc)),
            }
        }
        Command::Constraints { model, max_gen } => {
            let out = constraints(&resolved(model)?, *max_gen)?;
            print_json(&out.document)?;
            if let Some(e) = out.failure() {
                return Err(e);
            }
        }
        Command::Simulate(a) => {
            let traj = simulate(&resolved(&a.model)?)?;
            match &a.out {
                Some(p) => traj.write_csv(std::fs::File::create(p)?)?,
                None => traj.write_csv(std::io::stdout().lock())?,
            }
        }
        Command::Pde(a) => {
            let out = pde(&resolved(&a.model)?)?;
            for p in out.write(&a.out)? {
                eprintln!("wrote {}", p.display());
            }
        }
        Command::Verify { target, inject_bug } => {
            let opts = VerifyOptions {
                inject_bug: *inject_bug,
                seed: flags.seed.or(file.seed),
            };
            let report = verify(target, &opts)?;
            print!("{}", report.table());
            report.into_result()?;
        }
    }
    Ok(dissipa::EXIT_OK)
}
