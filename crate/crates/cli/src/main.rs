mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};

use xihom::instance::{catalog, Instance};
use xihom::modcat::ModuleRef;
use xihom::verify::VerifyOptions;

use commands::Outcome;
use output::{emit, Format, Report, SCHEMA_VERSION};

/// Relative and complete cohomology of modules over finite-dimensional algebras.
#[derive(Parser)]
#[command(name = "xihom", version)]
struct Cli {
    /// Where to write results: JSON on stdout, a table on stderr, or both.
    #[arg(long, value_enum, default_value_t = Format::Both, global = true)]
    format: Format,
    /// Include wall-clock time in the report.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Instance file.
    #[arg(short = 'i', long = "instance", value_name = "FILE")]
    file: Option<PathBuf>,
    /// A bundled catalog instance.
    #[arg(long, value_name = "NAME")]
    catalog: Option<String>,
}

#[derive(Args)]
struct Degrees {
    /// A single degree.
    #[arg(long = "deg", allow_hyphen_values = true, conflicts_with = "range")]
    deg: Option<i64>,
    /// An inclusive range such as `-6..6`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_range)]
    range: Option<(i64, i64)>,
}

#[derive(Subcommand)]
enum Command {
    /// Print a basis of the algebra.
    Basis {
        #[command(flatten)]
        source: Source,
    },
    /// Summarize a relative projective resolution.
    Resolve {
        #[command(flatten)]
        source: Source,
        module: String,
        #[arg(long, default_value_t = 12)]
        length: usize,
    },
    /// Relative projective dimension.
    Pd {
        #[command(flatten)]
        source: Source,
        module: String,
        #[arg(long, default_value_t = 12)]
        window: usize,
    },
    /// Relative ext, computed along every available route.
    Ext {
        #[command(flatten)]
        source: Source,
        m: String,
        n: String,
        #[command(flatten)]
        degrees: Degrees,
    },
    /// Complete cohomology, with the oracles where they apply.
    CompleteExt {
        #[command(flatten)]
        source: Source,
        m: String,
        n: String,
        #[command(flatten)]
        degrees: Degrees,
        #[arg(long, default_value_t = 12)]
        window: usize,
        #[arg(long, default_value_t = 4)]
        stability: usize,
    },
    /// Relative Gorenstein projective dimension.
    Gpd {
        #[command(flatten)]
        source: Source,
        module: String,
        #[arg(long, default_value_t = 12)]
        window: usize,
    },
    /// Randomized audit of the proper class axioms.
    Audit {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Audit the deliberately broken split-over-zero class instead.
        #[arg(long)]
        fixture: bool,
    },
    /// Run the full verification suite.
    Verify {
        /// Instance files; omit together with --catalog to verify the bundled catalog.
        files: Vec<PathBuf>,
        #[arg(long, conflicts_with = "files")]
        catalog: bool,
        #[arg(long, default_value_t = 12)]
        window: usize,
        #[arg(long, default_value_t = 12)]
        length: usize,
        #[arg(long, default_value_t = 4)]
        stability: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 100)]
        homotopy_trials: usize,
        #[arg(long, default_value_t = VerifyOptions::default().seed)]
        seed: u64,
    },
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s.split_once("..").ok_or_else(|| format!("expected a..b, got `{s}`"))?;
    let a: i64 = a.trim().parse().map_err(|e| format!("bad range start: {e}"))?;
    let b: i64 = b.trim().parse().map_err(|e| format!("bad range end: {e}"))?;
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok((a, b))
}

impl Degrees {
    fn resolve(&self) -> (i64, i64) {
        match (self.deg, self.range) {
            (Some(d), _) => (d, d),
            (None, Some(r)) => r,
            (None, None) => (1, 1),
        }
    }
}

fn load_file(path: &PathBuf) -> anyhow::Result<Instance> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Instance::from_json(&text).with_context(|| format!("loading {}", path.display()))
}

impl Source {
    fn load(&self) -> anyhow::Result<(String, Instance)> {
        match (&self.file, &self.catalog) {
            (_, Some(name)) => {
                let inst = catalog::load(name)
                    .ok_or_else(|| anyhow!("no catalog instance `{name}`; known: {}", catalog::names().collect::<Vec<_>>().join(", ")))??;
                Ok((format!("catalog:{name}"), inst))
            }
            (Some(path), None) => Ok((path.display().to_string(), load_file(path)?)),
            (None, None) => bail!("an instance file or --catalog is required"),
        }
    }
}

fn module<'a>(inst: &'a Instance, name: &str) -> anyhow::Result<&'a ModuleRef> {
    Ok(inst.module(name)?)
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Basis { .. } => "basis",
        Command::Resolve { .. } => "resolve",
        Command::Pd { .. } => "pd",
        Command::Ext { .. } => "ext",
        Command::CompleteExt { .. } => "complete-ext",
        Command::Gpd { .. } => "gpd",
        Command::Audit { .. } => "audit",
        Command::Verify { .. } => "verify",
    }
}

fn dispatch(command: &Command) -> anyhow::Result<(String, Outcome)> {
    Ok(match command {
        Command::Basis { source } => {
            let (input, inst) = source.load()?;
            (input, commands::basis(&inst))
        }
        Command::Resolve { source, module: name, length } => {
            let (input, inst) = source.load()?;
            let m = module(&inst, name)?;
            (input, commands::resolve(&inst, name, m, *length))
        }
        Command::Pd { source, module: name, window } => {
            let (input, inst) = source.load()?;
            let m = module(&inst, name)?;
            (input, commands::pd(&inst, name, m, *window))
        }
        Command::Ext { source, m, n, degrees } => {
            let (input, inst) = source.load()?;
            let (mm, nn) = (module(&inst, m)?, module(&inst, n)?);
            (input, commands::ext(&inst, (m, n), mm, nn, degrees.resolve())?)
        }
        Command::CompleteExt {
            source,
            m,
            n,
            degrees,
            window,
            stability,
        } => {
            let (input, inst) = source.load()?;
            let (mm, nn) = (module(&inst, m)?, module(&inst, n)?);
            let out = commands::complete_ext(&inst, (m, n), mm, nn, degrees.resolve(), *window, *stability);
            (input, out)
        }
        Command::Gpd { source, module: name, window } => {
            let (input, inst) = source.load()?;
            let m = module(&inst, name)?;
            (input, commands::gorenstein(&inst, name, m, *window))
        }
        Command::Audit {
            source,
            trials,
            seed,
            fixture,
        } => {
            let (input, inst) = source.load()?;
            (input, commands::audit(&inst, *trials, *seed, *fixture))
        }
        Command::Verify {
            files,
            catalog: _,
            window,
            length,
            stability,
            trials,
            homotopy_trials,
            seed,
        } => {
            let opts = VerifyOptions {
                window: *window,
                length: *length,
                stability: *stability,
                audit_trials: *trials,
                homotopy_trials: *homotopy_trials,
                seed: *seed,
            };
            if files.is_empty() {
                ("catalog".into(), commands::run_verify(None, opts))
            } else {
                let list = files
                    .iter()
                    .map(|f| Ok((f.display().to_string(), load_file(f)?)))
                    .collect::<anyhow::Result<Vec<_>>>()?;
                let input = list.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>().join(",");
                (input, commands::run_verify(Some(list), opts))
            }
        }
    })
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(value) = std::env::var("XIHOM_THREADS") else {
        return Ok(());
    };
    let n: usize = value.trim().parse().with_context(|| format!("XIHOM_THREADS must be a number, got `{value}`"))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    let start = Instant::now();
    let (input, outcome) = match dispatch(&cli.command) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let report = Report {
        schema_version: SCHEMA_VERSION,
        command: command_name(&cli.command),
        input,
        flags: outcome.flags,
        seed: outcome.seed,
        result: outcome.result,
        wall_clock_ms: cli.timing.then(|| start.elapsed().as_secs_f64() * 1000.0),
    };
    emit(cli.format, &report, &outcome.table);
    if outcome.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    }
}
