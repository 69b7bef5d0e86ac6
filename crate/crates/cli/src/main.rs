use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use toml::Value;

use bowtie_cli::commands::{cmd_cost, cmd_evolve, cmd_lightcones, cmd_skqd, cmd_spsa, Extras};
use bowtie_cli::config::{apply_override, finish, load_table, set_path};
use bowtie_cli::CliError;

#[derive(Parser)]
#[command(name = "bowtie", version, about = "Light-cone McLachlan evolution, SKQD and cost studies")]
struct Cli {
    /// TOML config file; relative paths inside it are resolved against its directory.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads for the parallel parts (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Config override, e.g. `--set evolve.dt=0.005`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Also write SVG line plots.
    #[arg(long, global = true)]
    svg: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bowtie inventory and cone-size histogram.
    Lightcones {
        /// Circuit text file (sets circuit.kind = file).
        #[arg(long)]
        circuit: Option<PathBuf>,
        /// Pauli-sum text file (sets model.terms_file).
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Variational real- or imaginary-time evolution.
    Evolve {
        #[arg(long)]
        mode: Option<String>,
        #[arg(long)]
        t_final: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        /// Add a per-step infidelity column against exact evolution.
        #[arg(long)]
        compare_exact: bool,
    },
    /// Imaginary-time warm start, Krylov family, sampling and projection.
    Skqd {
        #[arg(long)]
        shots: Option<usize>,
        /// Report energies rescaled so the ground state is 0 and the initial state 1.
        #[arg(long)]
        normalized: bool,
    },
    /// FLOP models and cone histogram.
    Cost {
        #[arg(long)]
        chi: Option<u64>,
        #[arg(long)]
        z: Option<u32>,
        /// Time one simulation of every bowtie (not reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// SPSA metric-estimation error against sample count.
    Spsa {
        /// Comma-separated sample counts.
        #[arg(long, value_delimiter = ',')]
        schedule: Option<Vec<usize>>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long)]
        simulated: bool,
    },
}

fn path_value(p: &std::path::Path) -> Value {
    Value::String(p.to_string_lossy().into_owned())
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(k) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
    }
    let mut table = load_table(cli.config.as_deref())?;
    for s in &cli.set {
        apply_override(&mut table, s)?;
    }
    if let Some(seed) = cli.seed {
        set_path(&mut table, "seed", Value::Integer(seed as i64))?;
    }
    let mut extras = Extras {
        svg: cli.svg,
        timings: false,
    };
    let mut flags: Vec<(&str, Value)> = Vec::new();
    let name = match &cli.command {
        Command::Lightcones { circuit, model } => {
            if let Some(c) = circuit {
                flags.push(("circuit.kind", Value::String("file".into())));
                flags.push(("circuit.file", path_value(c)));
            }
            if let Some(m) = model {
                flags.push(("model.terms_file", path_value(m)));
            }
            "lightcones"
        }
        Command::Evolve {
            mode,
            t_final,
            dt,
            compare_exact,
        } => {
            if let Some(m) = mode {
                flags.push(("evolve.mode", Value::String(m.clone())));
            }
            if let Some(t) = t_final {
                flags.push(("evolve.t_final", Value::Float(*t)));
            }
            if let Some(d) = dt {
                flags.push(("evolve.dt", Value::Float(*d)));
            }
            if *compare_exact {
                flags.push(("evolve.compare_exact", Value::Boolean(true)));
            }
            "evolve"
        }
        Command::Skqd { shots, normalized } => {
            if let Some(s) = shots {
                flags.push(("skqd.shots", Value::Integer(*s as i64)));
            }
            if *normalized {
                flags.push(("skqd.normalized", Value::Boolean(true)));
            }
            "skqd"
        }
        Command::Cost { chi, z, timings } => {
            if let Some(c) = chi {
                flags.push(("cost.chi", Value::Integer(*c as i64)));
            }
            if let Some(z) = z {
                flags.push(("cost.z", Value::Integer(*z as i64)));
            }
            extras.timings = *timings;
            "cost"
        }
        Command::Spsa {
            schedule,
            epsilon,
            simulated,
        } => {
            if let Some(s) = schedule {
                flags.push((
                    "spsa.schedule",
                    Value::Array(s.iter().map(|&k| Value::Integer(k as i64)).collect()),
                ));
            }
            if let Some(e) = epsilon {
                flags.push(("spsa.epsilon", Value::Float(*e)));
            }
            if *simulated {
                flags.push(("spsa.simulated", Value::Boolean(true)));
            }
            "spsa"
        }
    };
    for (k, v) in flags {
        set_path(&mut table, k, v)?;
    }
    let cfg = finish(table)?;
    log::debug!("resolved config: {cfg:?}");
    let out = cli.out.as_path();
    match name {
        "lightcones" => cmd_lightcones(&cfg, out, &extras),
        "evolve" => cmd_evolve(&cfg, out, &extras),
        "skqd" => cmd_skqd(&cfg, out, &extras),
        "cost" => cmd_cost(&cfg, out, &extras),
        _ => cmd_spsa(&cfg, out, &extras),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
