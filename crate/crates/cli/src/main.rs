use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use slowtorus_cli::{config::Coupling, exit, CliError, Mode, RunConfig, THREADS_ENV};
use slowtorus_core::Mutation;

/// Certified construction of slowly growing torus maps.
#[derive(Parser)]
#[command(name = "slowtorus", version)]
struct Cli {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Worker threads for the N schedule.
    #[arg(long, global = true, env = THREADS_ENV)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build, verify and write state, certificate and growth table.
    Run(Overrides),
    /// Write Γ/φ ratio bounds from the growth table of a previous run.
    Plotdata(Overrides),
    /// Re-verify a saved state.
    Verify {
        /// State JSON written by `run`.
        #[arg(long)]
        state: PathBuf,
        /// Corrupt the state before checking.
        #[arg(long)]
        mutate: Option<Mutation>,
        #[command(flatten)]
        overrides: Overrides,
    },
}

#[derive(Args, Default)]
struct Overrides {
    /// Growth function, e.g. `log2:2,1` or `power:2,1,1/2`.
    #[arg(long)]
    phi: Option<String>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    /// Coupling: `auto` or a rational such as `1/400`.
    #[arg(long)]
    c: Option<Coupling>,
    /// Last N of the dense part of the growth table.
    #[arg(long)]
    n_max: Option<u64>,
    /// Last N checked densely by the verifier.
    #[arg(long)]
    dense_to: Option<u64>,
    #[arg(long)]
    log_samples: Option<usize>,
    #[arg(long)]
    grid: Option<usize>,
    /// Starting precision in bits.
    #[arg(long)]
    precision: Option<u32>,
    #[arg(long)]
    max_precision: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    interior_samples: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    state_out: Option<PathBuf>,
    #[arg(long)]
    certificate_out: Option<PathBuf>,
    #[arg(long)]
    csv_out: Option<PathBuf>,
    #[arg(long)]
    plot_out: Option<PathBuf>,
}

impl Overrides {
    fn apply(self, cfg: &mut RunConfig) {
        fn set<T>(slot: &mut T, v: Option<T>) {
            if let Some(v) = v {
                *slot = v;
            }
        }
        set(&mut cfg.phi, self.phi);
        set(&mut cfg.depth, self.depth);
        set(&mut cfg.mode, self.mode);
        set(&mut cfg.c, self.c);
        set(&mut cfg.n_max, self.n_max);
        set(&mut cfg.schedule.dense_to, self.dense_to);
        set(&mut cfg.schedule.log_samples, self.log_samples);
        set(&mut cfg.grid, self.grid);
        set(&mut cfg.precision, self.precision);
        set(&mut cfg.max_precision, self.max_precision);
        set(&mut cfg.seed, self.seed);
        set(&mut cfg.interior_samples, self.interior_samples);
        set(&mut cfg.output.dir, self.out_dir);
        for (slot, v) in [
            (&mut cfg.output.state, self.state_out),
            (&mut cfg.output.certificate, self.certificate_out),
            (&mut cfg.output.csv, self.csv_out),
            (&mut cfg.output.plot, self.plot_out),
        ] {
            if v.is_some() {
                *slot = v;
            }
        }
    }
}

fn load(path: Option<&PathBuf>, overrides: Overrides) -> Result<RunConfig, CliError> {
    let mut cfg = match path {
        Some(p) => RunConfig::from_toml_file(p)?,
        None => RunConfig::default(),
    };
    overrides.apply(&mut cfg);
    Ok(cfg)
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("threads: {e}")))?;
    }
    let config = cli.config.as_ref();
    match cli.command {
        Command::Run(o) => {
            let cfg = load(config, o)?;
            let outcome = slowtorus_cli::run(&cfg)?;
            let cert = &outcome.certificate;
            for r in cert.failing() {
                eprintln!(
                    "{}: {:?}{}",
                    r.name,
                    r.status,
                    r.level.map_or(String::new(), |l| format!(" at level {l}"))
                );
            }
            println!(
                "{:?}: {} checks, {} table rows",
                cert.status,
                cert.checks.len(),
                outcome.records.len()
            );
            for p in &outcome.written {
                println!("wrote {}", p.display());
            }
            Ok(outcome.exit_code())
        }
        Command::Plotdata(o) => {
            let cfg = load(config, o)?;
            let rows = slowtorus_cli::plotdata(&cfg)?;
            println!(
                "wrote {} ({} rows)",
                cfg.output.plot().display(),
                rows.len()
            );
            Ok(exit::PASS)
        }
        Command::Verify {
            state,
            mutate,
            overrides,
        } => {
            let cfg = load(config, overrides)?;
            cfg.validate()?;
            let cert = slowtorus_cli::verify(&state, mutate, &cfg)?;
            for r in cert.failing() {
                eprintln!(
                    "{}: {:?}{}",
                    r.name,
                    r.status,
                    r.level.map_or(String::new(), |l| format!(" at level {l}"))
                );
            }
            println!("{:?}: {} checks", cert.status, cert.checks.len());
            println!("wrote {}", cfg.output.certificate().display());
            Ok(slowtorus_cli::status_exit_code(cert.status))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                exit::CONFIG as u8
            } else {
                0
            });
        }
    };
    let code = match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("slowtorus: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
