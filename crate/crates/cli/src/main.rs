use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use trl_cli::experiments::{run_experiment, PresetParams};
use trl_cli::report::Report;
use trl_core::approx::{exact_min_violations, heuristic_min_violations, min_target_size};
use trl_core::arith::{lambda_direct, lambda_spectral};
use trl_core::construct::{build_ap_free_set, partial_binary_blowup, rs_graph, ApMethod};
use trl_core::entropy::{bisection_audit, pinsker_gap, BisectionInstance};
use trl_core::graph::{Graph, Pattern};
use trl_core::io;
use trl_core::removal::{greedy_bounded_codegree, removal_distance, RemovalMode};
use trl_core::sumfree::{tricolor_search, verify_tricolor, TricolorSearchMode};
use trl_cli::CliError;

#[derive(Parser)]
#[command(name = "trl", version, about = "Triangle-removal workbench")]
struct Cli {
    /// Seed for every randomized stage.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Short human-readable summary.
    Text,
    /// Full line-oriented report (schema trl-report v1).
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a named graph and print it as an edge list.
    Build {
        /// bowtie | triangle | complete:N | path:N | cycle:N |
        /// friendship:T | rs-graph:N
        #[arg(long)]
        kind: String,
        /// Progression-free set method for rs-graph.
        #[arg(long, value_enum, default_value_t = Method::BehrendSpheres)]
        method: Method,
    },
    /// Binary blow-up of a host graph, emitted with vertex labels.
    Blowup {
        #[arg(long)]
        graph: PathBuf,
        /// Pattern edge-list file; defaults to the triangle.
        #[arg(long)]
        pattern: Option<PathBuf>,
    },
    /// Search for a low-violation vertex map into a target graph.
    ApproxHom {
        #[arg(long)]
        graph: PathBuf,
        /// Target edge-list file, or `enumerate:M` to search all
        /// triangle-free targets on up to M vertices.
        #[arg(long)]
        target: String,
        /// Violation budget as a fraction of |V(G)|^2.
        #[arg(long)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = ApMode::Exact)]
        mode: ApMode,
        /// Annealing iterations in heuristic mode.
        #[arg(long, default_value_t = 200_000)]
        iterations: u64,
    },
    /// Pinsker grid and, optionally, one bisection instance.
    EntropyAudit {
        #[arg(long, default_value_t = 100_000)]
        pinsker_points: u64,
        /// Side labels, e.g. 010110 (0 = first half of the bipartition).
        #[arg(long)]
        side: Option<String>,
        /// Comma-separated part index per element, aligned with --side.
        #[arg(long)]
        part: Option<String>,
        #[arg(long, default_value_t = 0.1)]
        eta: f64,
    },
    /// Delete edges until no triangle remains (or the schedule stops).
    Remove {
        #[arg(long)]
        graph: PathBuf,
        /// schedule = bounded-codegree process emitting a replayable trace.
        #[arg(long, value_enum, default_value_t = RmMode::Schedule)]
        mode: RmMode,
        #[arg(long, default_value_t = 1.0)]
        eps: f64,
    },
    /// Arithmetic-side tools.
    #[command(subcommand)]
    Arith(ArithCommand),
    /// Run a named preset and print its report.
    Experiment {
        /// One of: tfl-ingredients, rs-pipeline, deletion-schedule,
        /// arith-roundtrip, arith-expansion, cp-table.
        #[arg(long)]
        preset: String,
        #[command(flatten)]
        knobs: Knobs,
    },
    /// Re-serialize a file, proving the round-trip is lossless.
    Convert {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        kind: FileKind,
        /// Force the table form when re-writing a density.
        #[arg(long, default_value_t = false)]
        table: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    BehrendSpheres,
    Greedy,
}

#[derive(Clone, Copy, ValueEnum)]
enum ApMode {
    Exact,
    Heuristic,
}

#[derive(Clone, Copy, ValueEnum)]
enum RmMode {
    Schedule,
    Exact,
    Greedy,
}

#[derive(Clone, Copy, ValueEnum)]
enum FileKind {
    Graph,
    Density,
    Tricolor,
    Trace,
}

#[derive(Args)]
struct Knobs {
    #[arg(long)]
    host: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    reps: Option<usize>,
    /// Comma-separated primes for cp-table.
    #[arg(long)]
    primes: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Done(text)) => {
            emit(&cli, &text);
            ExitCode::SUCCESS
        }
        Ok(Outcome::Checked(report)) => {
            emit(&cli, &render(&cli, &report));
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

enum Outcome {
    /// Plain payload (a graph, a trace, a converted file).
    Done(String),
    /// A report whose assertions decide the exit code.
    Checked(Report),
}

fn emit(cli: &Cli, text: &str) {
    match &cli.out {
        Some(path) => {
            if let Err(e) = fs::write(path, text) {
                eprintln!("error: cannot write {}: {e}", path.display());
                std::process::exit(2);
            }
        }
        None => print!("{text}"),
    }
}

fn render(cli: &Cli, report: &Report) -> String {
    match cli.format {
        Format::Structured => report.render(),
        Format::Text => {
            let mut out = format!("{} (seed {})\n", report.experiment, report.seed);
            for (name, value) in &report.values {
                out.push_str(&format!("  {name} = {value}\n"));
            }
            for a in &report.assertions {
                out.push_str(&format!(
                    "  [{}] {}: {} {} {}\n",
                    if a.pass { "ok" } else { "FAIL" },
                    a.id,
                    a.lhs,
                    a.op,
                    a.rhs
                ));
            }
            out.push_str(if report.passed() { "PASS\n" } else { "FAIL\n" });
            out
        }
    }
}

fn read(path: &PathBuf) -> trl_cli::Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> trl_cli::Result<Outcome> {
    match &cli.command {
        Command::Build { kind, method } => {
            let g = match kind.strip_prefix("rs-graph:") {
                Some(ns) => {
                    let n: usize = ns.parse().map_err(|e| CliError::Usage(format!("rs-graph size: {e}")))?;
                    let ap = match method {
                        Method::BehrendSpheres => ApMethod::BehrendSpheres,
                        Method::Greedy => ApMethod::Greedy,
                    };
                    rs_graph(n, &build_ap_free_set(n, ap))?
                }
                None => trl_cli::experiments::parse_host_graph(kind)?,
            };
            Ok(Outcome::Done(io::write_graph(&g)))
        }

        Command::Blowup { graph, pattern } => {
            let host = io::read_graph(&read(graph)?)?;
            let pat = match pattern {
                Some(path) => Pattern::new(io::read_graph(&read(path)?)?)?,
                None => Pattern::new(Graph::complete(3))?,
            };
            let bu = partial_binary_blowup(&host, &pat, None)?;
            Ok(Outcome::Done(io::write_blowup(&bu)))
        }

        Command::ApproxHom {
            graph,
            target,
            eps,
            mode,
            iterations,
        } => {
            let text = read(graph)?;
            let g = io::read_graph(&text)?;
            let mut r = Report::new("approx-hom", cli.seed);
            r.input_digest("graph", text.as_bytes());
            r.param("eps", eps);
            let budget = eps * (g.n() as f64) * (g.n() as f64);
            if let Some(ms) = target.strip_prefix("enumerate:") {
                let m_max: usize = ms.parse().map_err(|e| CliError::Usage(format!("enumerate bound: {e}")))?;
                r.param("target", format!("enumerate:{m_max}"));
                let pattern = Pattern::new(Graph::complete(3))?;
                let witness = min_target_size(&g, &pattern, *eps, m_max)?;
                match witness {
                    Some(w) => {
                        r.value("target-size", w.m);
                        r.value("violations", w.report.violations);
                        r.value("map", map_string(w.map.table()));
                        r.check(
                            "violation-budget",
                            "violations <= eps |V(G)|^2",
                            w.report.violations as f64,
                            "<=",
                            budget,
                        );
                    }
                    None => r.check_bool(
                        "target-found",
                        "some triangle-free target admits a map within budget",
                        false,
                    ),
                }
            } else {
                let ttext = read(&PathBuf::from(target))?;
                let f = io::read_graph(&ttext)?;
                r.input_digest("target", ttext.as_bytes());
                let (map, rep) = match mode {
                    ApMode::Exact => exact_min_violations(&g, &f)?,
                    ApMode::Heuristic => heuristic_min_violations(&g, &f, cli.seed, *iterations)?,
                };
                r.value("violations", rep.violations);
                r.value("eps-achieved", rep.epsilon_achieved);
                r.value("map", map_string(map.table()));
                r.check(
                    "violation-budget",
                    "violations <= eps |V(G)|^2",
                    rep.violations as f64,
                    "<=",
                    budget,
                );
            }
            Ok(Outcome::Checked(r))
        }

        Command::EntropyAudit {
            pinsker_points,
            side,
            part,
            eta,
        } => {
            let mut r = Report::new("entropy-audit", cli.seed);
            r.param("pinsker-points", pinsker_points);
            let mut violations = 0u64;
            for i in 0..=*pinsker_points {
                let q = i as f64 / *pinsker_points as f64;
                let (lhs, rhs) = pinsker_gap(q)?;
                if lhs > rhs {
                    violations += 1;
                }
            }
            r.check(
                "pinsker-grid",
                "grid points with 2(q - 1/2)^2 > ln 2 - H(q) == 0",
                violations as f64,
                "==",
                0.0,
            );
            if let (Some(side), Some(part)) = (side, part) {
                r.param("eta", eta);
                let sides: Vec<u8> = side
                    .chars()
                    .map(|c| match c {
                        '0' => Ok(0),
                        '1' => Ok(1),
                        other => Err(CliError::Usage(format!("side label {other:?}"))),
                    })
                    .collect::<Result<_, _>>()?;
                let parts: Vec<usize> = part
                    .split(',')
                    .map(|t| {
                        t.trim().parse().map_err(|e| CliError::Usage(format!("part index {t:?}: {e}")))
                    })
                    .collect::<Result<_, _>>()?;
                let inst = BisectionInstance::new(sides, parts)?;
                let audit = bisection_audit(&inst, *eta)?;
                r.value("mutual-info", audit.mutual_info);
                r.value("nb-fraction", audit.nb_fraction);
                r.value("tv-to-uniform", audit.tv_to_uniform);
                r.check(
                    "nb-mass",
                    "nearly-bisected fraction >= 1 - eta",
                    audit.nb_fraction,
                    ">=",
                    1.0 - eta,
                );
                r.check(
                    "tv-bound",
                    "TV(mu, uniform) <= 4 eta",
                    audit.tv_to_uniform,
                    "<=",
                    4.0 * eta,
                );
            }
            Ok(Outcome::Checked(r))
        }

        Command::Remove { graph, mode, eps } => {
            let g = io::read_graph(&read(graph)?)?;
            match mode {
                RmMode::Schedule => {
                    let run = greedy_bounded_codegree(&g, *eps, None)?;
                    Ok(Outcome::Done(io::write_trace(&run.trace)))
                }
                RmMode::Exact | RmMode::Greedy => {
                    let rm = match mode {
                        RmMode::Exact => removal_distance(&g, RemovalMode::Exact)?,
                        _ => removal_distance(&g, RemovalMode::Greedy)?,
                    };
                    let mut r = Report::new("remove", cli.seed);
                    r.value("distance", rm.distance);
                    r.value(
                        "deleted",
                        rm.deleted
                            .iter()
                            .map(|(u, v)| format!("{u}-{v}"))
                            .collect::<Vec<_>>()
                            .join(","),
                    );
                    r.check_bool("provably-minimal", "distance is exact", rm.exact);
                    Ok(Outcome::Checked(r))
                }
            }
        }

        Command::Arith(cmd) => arith(cli, cmd),

        Command::Experiment { preset, knobs } => {
            let params = PresetParams {
                host: knobs.host.clone(),
                n: knobs.n,
                p: knobs.p,
                m: knobs.m,
                eps: knobs.eps,
                reps: knobs.reps,
                primes: knobs
                    .primes
                    .as_deref()
                    .map(|s| {
                        s.split(',')
                            .map(|t| {
                                t.trim().parse::<usize>().map_err(|e| CliError::Usage(format!("prime {t:?}: {e}")))
                            })
                            .collect::<Result<Vec<_>, _>>()
                    })
                    .transpose()?,
            };
            Ok(Outcome::Checked(run_experiment(preset, &params, cli.seed)?))
        }

        Command::Convert { input, kind, table } => {
            let text = read(input)?;
            let out = match kind {
                FileKind::Graph => io::write_graph(&io::read_graph(&text)?),
                FileKind::Density => {
                    let f = io::read_density(&text)?;
                    if *table {
                        io::write_density_table(&f)
                    } else {
                        io::write_density(&f)
                    }
                }
                FileKind::Tricolor => io::write_tricolor(&io::read_tricolor(&text)?),
                FileKind::Trace => {
                    let records = io::read_trace(&text)?;
                    let mut s = String::new();
                    for rec in &records {
                        s.push_str(&format!(
                            "{} {} {} {} {}\n",
                            rec.step, rec.edge.0, rec.edge.1, rec.beta, rec.threshold
                        ));
                    }
                    s
                }
            };
            Ok(Outcome::Done(out))
        }
    }
}

#[derive(Subcommand)]
enum ArithCommand {
    /// Solution density of three weight functions, two ways.
    Lambda {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        h: PathBuf,
    },
    /// Search for a maximal tricolor sum-free triple and print it.
    Search {
        #[arg(long)]
        p: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = false)]
        greedy: bool,
        #[arg(long, default_value_t = 1 << 20)]
        budget: u64,
    },
    /// c_p table row for one prime.
    Cp {
        #[arg(long)]
        p: usize,
    },
}

fn arith(cli: &Cli, cmd: &ArithCommand) -> trl_cli::Result<Outcome> {
    match cmd {
        ArithCommand::Lambda { f, g, h } => {
            let df = io::read_density(&read(f)?)?;
            let dg = io::read_density(&read(g)?)?;
            let dh = io::read_density(&read(h)?)?;
            let mut r = Report::new("arith-lambda", cli.seed);
            let direct = lambda_direct(&df, &dg, &dh)?;
            let spectral = lambda_spectral(&df, &dg, &dh)?;
            r.value("lambda-direct", direct);
            r.value("lambda-spectral", spectral);
            r.check(
                "lambda-agreement",
                "|direct - spectral| <= 1e-9",
                (direct - spectral).abs(),
                "<=",
                1e-9,
            );
            Ok(Outcome::Checked(r))
        }
        ArithCommand::Search { p, n, greedy, budget } => {
            let space = trl_core::arith::FpnSpace::new(*p, *n)?;
            let mode = if *greedy {
                TricolorSearchMode::Greedy { budget: *budget }
            } else {
                TricolorSearchMode::Exhaustive
            };
            let out = tricolor_search(&space, mode)?;
            debug_assert!(verify_tricolor(&out.triple)?);
            Ok(Outcome::Done(io::write_tricolor(&out.triple)))
        }
        ArithCommand::Cp { p } => {
            let mut params = PresetParams::default();
            params.primes = Some(vec![*p]);
            Ok(Outcome::Checked(run_experiment("cp-table", &params, cli.seed)?))
        }
    }
}

fn map_string(table: &[usize]) -> String {
    table
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}
