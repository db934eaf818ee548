use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use chernoff_core::approx::fmt_f64;
use chernoff_core::kato::{KatoFunction, KatoReport, REGISTRY};
use chernoff_core::linalg::Operator;
use chernoff_core::range::{range_boundary, range_verdict, RangeBoundary, SectorSpec, DEFAULT_POINTS};
use chernoff_core::scenario::{
    execute_rate, execute_sweep, output_dir, run_scenario, write_artifacts, Scenario, Status,
};
use chernoff_core::Error;

/// Chernoff approximations of matrix semigroups: error curves, bound
/// verification and numerical ranges.
#[derive(Parser)]
#[command(name = "chernoff-kit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Error curve of a scenario's family and its fitted rate.
    Rate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Error curve plus the scenario's bound suite.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Numerical range of a matrix against the sector and lens of semi-angle `alpha`.
    Range {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = DEFAULT_POINTS)]
        points: usize,
        /// Directory for `boundary.csv` and `verdict.json`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validation report for a built-in Kato function.
    Kato {
        #[arg(long)]
        id: String,
    },
    /// The bound suite over seeds `seed .. seed + k`.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        seeds: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn configure_threads() -> Result<(), Error> {
    let Ok(v) = std::env::var("CHERNOFF_KIT_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("CHERNOFF_KIT_THREADS must be an integer, got `{v}`")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    }
    Ok(())
}

fn boundary_csv(b: &RangeBoundary) -> String {
    let mut s = String::from("theta,re,im\n");
    for (theta, z) in b.angles.iter().zip(&b.points) {
        writeln!(s, "{},{},{}", fmt_f64(*theta), fmt_f64(z.re), fmt_f64(z.im)).ok();
    }
    s
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("plain data serializes") + "\n"
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |e| Error::Io(format!("{}: {e}", path.display()))
}

fn run(cmd: Command) -> Result<Status, Error> {
    match cmd {
        Command::Rate { config, out } => {
            let s = Scenario::load(&config)?;
            let run = execute_rate(&s, s.seed.unwrap_or(0))?;
            write_artifacts(&output_dir(&s, out.as_deref()), &run)?;
            match run.curves[0].fitted {
                Some(f) => println!("rho {:.6} C {:.6e} residual {:.3e}", f.rho, f.c, f.residual),
                None => println!("rho not fitted: too few errors above the floor"),
            }
            Ok(Status::AllPass)
        }
        Command::Verify { config, out } => {
            let s = Scenario::load(&config)?;
            let (status, run) = run_scenario(&s, &output_dir(&s, out.as_deref()))?;
            println!("{}", run.pass_line());
            Ok(status)
        }
        Command::Sweep { config, seeds, out } => {
            let s = Scenario::load(&config)?;
            let run = execute_sweep(&s, seeds)?;
            write_artifacts(&output_dir(&s, out.as_deref()), &run)?;
            println!("{}", run.pass_line());
            Ok(Status::of(&run))
        }
        Command::Range {
            matrix,
            alpha,
            points,
            out,
        } => {
            let text = fs::read_to_string(&matrix).map_err(io_err(&matrix))?;
            let a: Operator = serde_json::from_str(&text)
                .map_err(|e| Error::InvalidConfig(format!("{}: line {}: {e}", matrix.display(), e.line())))?;
            let b = range_boundary(&a, points)?;
            let verdict = range_verdict(&b, SectorSpec::new(alpha)?);
            if let Some(dir) = out {
                fs::create_dir_all(&dir).map_err(io_err(&dir))?;
                fs::write(dir.join("boundary.csv"), boundary_csv(&b)).map_err(io_err(&dir))?;
                fs::write(dir.join("verdict.json"), json(&verdict)).map_err(io_err(&dir))?;
            }
            print!("{}", json(&verdict));
            Ok(Status::AllPass)
        }
        Command::Kato { id } => {
            let r = KatoFunction::builtin(&id);
            if let Err(Error::UnknownKato(_)) = r {
                return Err(Error::InvalidConfig(format!(
                    "unknown Kato function `{id}`; known: {}",
                    REGISTRY.join(", ")
                )));
            }
            let report = KatoReport::from_result(&id, &r);
            print!("{}", json(&report));
            Ok(if report.valid { Status::AllPass } else { Status::Violated })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let status = configure_threads().and_then(|()| run(cli.command)).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        Status::Invalid
    });
    ExitCode::from(status.code() as u8)
}
