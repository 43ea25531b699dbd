use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gtails_cli as cli;

/// Ideal-structure invariants of self-similar group actions on graphs and
/// k-graphs: maximal G-tails, quasi-orbit spaces, primitive-spectrum
/// diagrams, simplicity verdicts and periodicity lattices.
#[derive(Parser)]
#[command(name = "gtails", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and validate a system description.
    Validate { file: PathBuf },
    /// Enumerate the maximal G-tails.
    Tails {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Tails with classification plus the singular-vertex case split.
    Classify {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Quasi-orbit space and primitive-spectrum components.
    Spectrum {
        file: PathBuf,
        /// Periodicity search box for rank ≥ 2.
        #[arg(long = "box")]
        box_bound: Option<u32>,
        #[arg(long)]
        json: bool,
    },
    /// Simplicity verdict for rank-one systems.
    Simplicity {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Box-certified periodicity groups Per per maximal G-tail.
    Per {
        file: PathBuf,
        #[arg(long = "box")]
        box_bound: Option<u32>,
        #[arg(long)]
        json: bool,
    },
    /// M_Per vertex sets per maximal G-tail.
    Mperg {
        file: PathBuf,
        #[arg(long = "box")]
        box_bound: Option<u32>,
        #[arg(long)]
        json: bool,
    },
    /// Check a convergence certificate against the spectrum topology.
    Converge {
        file: PathBuf,
        /// JSON query with target, sequence and bounds.
        #[arg(long)]
        query: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Run the brute-force oracles and compare with the main computations.
    Oracle {
        file: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        window: Option<u32>,
        #[arg(long)]
        json: bool,
    },
    /// Re-emit the system canonically, or export the specialization DAG.
    Export {
        file: PathBuf,
        /// `quasi` or `spectrum`
        #[arg(long)]
        dot: Option<String>,
    },
}

fn run(cmd: &Cmd) -> gtails_core::Result<String> {
    match cmd {
        Cmd::Validate { file } => {
            let spec = cli::load_spec(file)?;
            if spec.rank == 1 {
                let sys = spec.build_rank1()?;
                Ok(format!(
                    "ok: rank 1, {} vertices, {} edges, group of order {}\n",
                    sys.graph.num_vertices(),
                    sys.graph.num_edges(),
                    sys.group.size()
                ))
            } else {
                let sys = spec.build_kgraph()?;
                Ok(format!(
                    "ok: rank {}, {} vertices, {} edges, group of order {}\n",
                    spec.rank,
                    sys.skeleton.num_vertices(),
                    sys.skeleton.num_edges(),
                    sys.group.size()
                ))
            }
        }
        Cmd::Tails { file, json } => {
            let spec = cli::load_spec(file)?;
            let report = cli::tails_report(&spec)?;
            Ok(if *json {
                cli::to_json(&report)
            } else {
                cli::render_tails(&report)
            })
        }
        Cmd::Classify { file, json } => {
            let spec = cli::load_spec(file)?;
            let report = cli::classify_report(&spec)?;
            Ok(if *json {
                cli::to_json(&report)
            } else {
                cli::render_classify(&report)
            })
        }
        Cmd::Spectrum {
            file,
            box_bound,
            json,
        } => {
            let spec = cli::load_spec(file)?;
            if spec.rank == 1 {
                let report = cli::spectrum_report_rank1(&spec)?;
                Ok(if *json {
                    cli::to_json(&report)
                } else {
                    cli::render_spectrum(&report)
                })
            } else {
                let bound = box_bound.unwrap_or(spec.options.per_box);
                let report = cli::spectrum_report_kgraph(&spec, bound)?;
                Ok(if *json {
                    cli::to_json(&report)
                } else {
                    cli::render_kspectrum(&report)
                })
            }
        }
        Cmd::Simplicity { file, json } => {
            let spec = cli::load_spec(file)?;
            let report = cli::simplicity_report(&spec)?;
            Ok(if *json {
                cli::to_json(&report)
            } else {
                cli::render_simplicity(&report)
            })
        }
        Cmd::Per {
            file,
            box_bound,
            json,
        } => {
            let spec = cli::load_spec(file)?;
            let bound = box_bound.unwrap_or(spec.options.per_box);
            let report = cli::per_report(&spec, bound, false)?;
            Ok(if *json {
                cli::to_json(&report)
            } else {
                cli::render_per(&report)
            })
        }
        Cmd::Mperg {
            file,
            box_bound,
            json,
        } => {
            let spec = cli::load_spec(file)?;
            let bound = box_bound.unwrap_or(spec.options.per_box);
            let report = cli::per_report(&spec, bound, true)?;
            Ok(if *json {
                cli::to_json(&report)
            } else {
                cli::render_per(&report)
            })
        }
        Cmd::Converge { file, query, json } => {
            let spec = cli::load_spec(file)?;
            let text = std::fs::read_to_string(query).map_err(|e| {
                gtails_core::Error::Schema(format!("{}: {e}", query.display()))
            })?;
            let q: cli::ConvergeQueryFile = serde_json::from_str(&text)
                .map_err(|e| gtails_core::Error::MalformedSequence(e.to_string()))?;
            let report = cli::converge_report(&spec, &q)?;
            Ok(if *json {
                cli::to_json(&report)
            } else {
                cli::render_converge(&report)
            })
        }
        Cmd::Oracle {
            file,
            depth,
            window,
            json,
        } => {
            let spec = cli::load_spec(file)?;
            let depth = depth.unwrap_or(spec.options.oracle_depth);
            let window = window.unwrap_or(spec.options.omega_window);
            let report = cli::oracle_report(&spec, depth, window)?;
            if !(report.tails_agree && report.order_agree && report.pseudo_free_agree) {
                // disagreement is a hard failure
                eprint!("{}", cli::render_oracle(&report));
                std::process::exit(1);
            }
            Ok(if *json {
                cli::to_json(&report)
            } else {
                cli::render_oracle(&report)
            })
        }
        Cmd::Export { file, dot } => {
            let spec = cli::load_spec(file)?;
            match dot.as_deref() {
                None => Ok(spec.canonical_json()),
                Some("quasi") => cli::export_dot(&spec, cli::DotTarget::Quasi),
                Some("spectrum") => cli::export_dot(&spec, cli::DotTarget::Spectrum),
                Some(other) => Err(gtails_core::Error::Schema(format!(
                    "unknown dot target `{other}` (expected quasi or spectrum)"
                ))),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.cmd) {
        Ok(output) => {
            print!("{output}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(cli::exit_code_for(&err) as u8)
        }
    }
}
