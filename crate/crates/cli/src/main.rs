use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use num_traits::Signed;
use tverberg::{
    enumerate_tverberg, random_instance, solve, solve_partition, Distribution, ModelError,
    SolverConfig,
};

mod doc;
mod svg;

#[derive(Parser)]
#[command(
    name = "tverberg",
    version,
    about = "Exact Tverberg partitions by moving the points"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a Tverberg partition with an exact certificate.
    Solve {
        input: PathBuf,
        /// Number of parts (overrides the instance file).
        #[arg(long)]
        r: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Perturbation radius is 2^-k times the input extent.
        #[arg(long, default_value_t = 40)]
        perturb_exponent: u32,
        #[arg(long, default_value_t = 5)]
        max_restarts: usize,
        /// Only certify the perturbed point set.
        #[arg(long)]
        no_certify_original: bool,
        /// Per-stage pivot budget (default 10 n r).
        #[arg(long)]
        pivot_cap: Option<usize>,
        /// Write one JSON line per singular event.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Render the result (d = 2 only).
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Result document path (default: stdout).
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Check whether a given partition is a Tverberg partition.
    Verify {
        input: PathBuf,
        partition: PathBuf,
        #[arg(long)]
        r: Option<usize>,
    },
    /// Enumerate every proper partition and report the valid ones.
    Oracle {
        input: PathBuf,
        #[arg(long)]
        r: Option<usize>,
        /// Require strictly positive coefficients.
        #[arg(long)]
        strict: bool,
    },
    /// Write a random instance.
    Gen {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        r: usize,
        #[arg(long, value_enum, default_value_t = Dist::Grid)]
        dist: Dist,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Dist {
    /// Integers in [-50, 50].
    Grid,
    /// Multiples of 2^-16 in [0, 1].
    Cube,
}

/// Maps onto the process exit codes 1, 2 and 3.
enum Failure {
    Negative,
    Input(anyhow::Error),
    Internal(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text)
            .with_context(|| format!("cannot write {}", p.display()))
            .map_err(Failure::Internal),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Solve {
            input,
            r,
            seed,
            perturb_exponent,
            max_restarts,
            no_certify_original,
            pivot_cap,
            trace,
            svg,
            out,
        } => {
            let inst = doc::parse_instance(&read(&input)?, r)?;
            if svg.is_some() && inst.d() != 2 {
                return Err(
                    anyhow!("--svg is only supported for d = 2 (got d = {})", inst.d()).into(),
                );
            }
            let cfg = SolverConfig {
                perturb_exponent,
                max_restarts,
                rng_seed: seed,
                pivot_cap,
                certify_original: !no_certify_original,
            };
            let res = match solve(&inst, &cfg) {
                Ok(res) => res,
                Err(tverberg::SolveError::Input(msg)) => return Err(anyhow!(msg).into()),
                Err(e) => return Err(Failure::Internal(e.into())),
            };
            if let Some(path) = &trace {
                write_out(Some(path), &doc::trace_jsonl(&res.trace))?;
            }
            if let Some(path) = &svg {
                let shown = match res.certified_for {
                    tverberg::CertifiedFor::Original => inst.clone(),
                    tverberg::CertifiedFor::Perturbed => {
                        tverberg::Instance::new(2, inst.r(), res.perturbed_points.clone())
                            .map_err(|e| Failure::Internal(e.into()))?
                    }
                };
                write_out(
                    Some(path),
                    &svg::render(&shown, &res.partition, &res.certificate.z),
                )?;
            }
            let trace_name = trace.as_ref().map(|p| p.display().to_string());
            write_out(
                out.as_deref(),
                &doc::result_json(&inst, &res, seed, trace_name.as_deref()),
            )
        }
        Command::Verify {
            input,
            partition,
            r,
        } => {
            let inst = doc::parse_instance(&read(&input)?, r)?;
            let part = doc::parse_partition(&read(&partition)?, inst.n())?;
            if part.parts() != inst.r() {
                return Err(anyhow!(
                    "partition has {} blocks, instance expects {}",
                    part.parts(),
                    inst.r()
                )
                .into());
            }
            match solve_partition(&inst, &part, None) {
                Ok(cert) => {
                    if let Some(i) = cert.alpha.iter().position(Signed::is_negative) {
                        let reason = format!("coefficient of point {i} is negative");
                        print!(
                            "{}",
                            doc::verify_json("negative", Some(reason), Some((&part, &cert)))
                        );
                        return Err(Failure::Negative);
                    }
                    tverberg::verify_certificate(&inst, &part, &cert, false)
                        .map_err(|v| Failure::Internal(anyhow!("certificate rejected: {v}")))?;
                    print!("{}", doc::verify_json("valid", None, Some((&part, &cert))));
                    Ok(())
                }
                Err(ModelError::Singular) => {
                    let reason =
                        "singular system: the block affine hulls do not meet in a single point";
                    print!(
                        "{}",
                        doc::verify_json("singular", Some(reason.into()), None)
                    );
                    Err(Failure::Negative)
                }
                Err(e) => Err(anyhow::Error::from(e).into()),
            }
        }
        Command::Oracle { input, r, strict } => {
            let inst = doc::parse_instance(&read(&input)?, r)?;
            let report = enumerate_tverberg(&inst, strict).map_err(anyhow::Error::from)?;
            write_out(None, &doc::oracle_json(&report))
        }
        Command::Gen {
            d,
            r,
            dist,
            seed,
            out,
        } => {
            if d == 0 || r < 2 {
                return Err(anyhow!("need d >= 1 and r >= 2").into());
            }
            let dist = match dist {
                Dist::Grid => Distribution::default(),
                Dist::Cube => Distribution::UnitCube,
            };
            let inst = random_instance(d, r, dist, seed);
            write_out(out.as_deref(), &doc::instance_json(&inst))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Negative) => ExitCode::from(1),
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("internal error: {e:#}");
            ExitCode::from(3)
        }
    }
}
