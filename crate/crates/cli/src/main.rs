//! `iwg`: verification, invariants, ID diagrams and the cut-vertex pipeline
//! from the command line.
//!
//! Exit codes: 0 success, 1 checked failure, 2 usage or I/O error,
//! 3 inconclusive search.

use std::fs;
use std::io::{self, Read};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use iwg_core::diagram::{build_id_diagram, DiagramOptions};
use iwg_core::nielsen::{is_legalizing_prevention_sequence, DEFAULT_MAX_STATES};
use iwg_core::synthesis::{cut_vertex_pipeline, example, realize_glued, GluingSide, GluingSpec};
use iwg_core::whitehead::{ideal_whitehead_graph, index_list};
use iwg_core::{
    build_ltt, search_inps, Bounds, Decomposition, Error, Index, NielsenGenerator, PnpCertificate, RoseMap, Verdict,
};

#[derive(Parser)]
#[command(
    name = "iwg",
    version,
    about = "Ideal Whitehead graphs of rose automorphisms given as Nielsen generator sequences"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Emit::Text)]
    emit: Emit,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Search pass limit.
    #[arg(long = "bounds.max-passes", alias = "max-passes", global = true)]
    max_passes: Option<usize>,
    /// Search length limit on |ρ1| + |ρ2|.
    #[arg(long = "bounds.max-len", alias = "max-len", global = true)]
    max_len: Option<usize>,
    /// Search state limit.
    #[arg(long = "bounds.max-states", alias = "max-states", global = true)]
    max_states: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Text,
    Dot,
    Json,
}

#[derive(clap::Args)]
struct Input {
    /// Decomposition file (JSON or generator list); stdin when absent or `-`.
    input: Option<PathBuf>,
    /// Inline generator list such as "a- -> ba-, b -> a-b".
    #[arg(long, conflicts_with = "input")]
    inline: Option<String>,
    /// Rank for generator lists (default: largest letter used).
    #[arg(long)]
    rank: Option<usize>,
}

#[derive(Subcommand)]
enum Verb {
    /// Train track, admissibility, irreducibility and prevention checks.
    Verify(Input),
    /// Ideal Whitehead graph.
    Iwg(Input),
    /// Index list of the ideal Whitehead graph.
    Index(Input),
    /// Lamination train track structure.
    Ltt(Input),
    /// ID diagram seeded at the decomposition's ltt structure.
    IdDiagram {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
    },
    /// Search for indivisible periodic Nielsen paths.
    Pnp(Input),
    /// Glue two decompositions' structures along shared indices and realize the result.
    Glue {
        /// JSON {"left": decomposition, "right": decomposition, "shared": [0, 1]}.
        input: Option<PathBuf>,
    },
    /// Build a rank-r automorphism whose ideal Whitehead graph has a cut vertex.
    Pipeline {
        #[arg(long)]
        rank: usize,
    },
    /// Print a built-in decomposition as JSON.
    Example {
        #[arg(default_value = "phi")]
        name: String,
    },
}

#[derive(Debug)]
enum Failure {
    Checked(String),
    Usage(String),
    Inconclusive(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidLetter { .. } | Error::Parse(_) | Error::RankError { .. } | Error::InvalidGenerator(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Checked(e.to_string()),
        }
    }
}

type Outcome = Result<String, Failure>;

fn read_source(path: Option<&PathBuf>) -> Result<String, Failure> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            fs::read_to_string(p).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", p.display())))
        }
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(|e| Failure::Usage(format!("cannot read stdin: {e}")))?;
            Ok(s)
        }
    }
}

fn parse_decomposition(text: &str, rank: Option<usize>) -> Result<Decomposition, Failure> {
    let text = text.trim();
    if text.starts_with('{') {
        let d = Decomposition::from_json(text)?;
        return match rank {
            Some(r) if r != d.rank() => d.extend_rank(r).map_err(Failure::from),
            _ => Ok(d),
        };
    }
    let gens: Vec<NielsenGenerator> = text
        .split([',', ';', '\n'])
        .map(str::trim)
        .filter(|s| !s.is_empty() && !s.starts_with('#'))
        .map(NielsenGenerator::parse)
        .collect::<Result<_, _>>()?;
    if gens.is_empty() {
        return Err(Failure::Usage("no generators given".into()));
    }
    let used = gens.iter().map(|g| g.x().edge().max(g.y().edge()) + 1).max().unwrap_or(2);
    Ok(Decomposition::new(rank.unwrap_or(used), gens)?)
}

fn load(input: &Input) -> Result<Decomposition, Failure> {
    let text = match &input.inline {
        Some(s) => s.clone(),
        None => read_source(input.input.as_ref())?,
    };
    parse_decomposition(&text, input.rank)
}

fn bounds(cli: &Cli, d: &Decomposition) -> Bounds {
    let mut b = Bounds::default_for(&d.power(d.rotationless_power().exponent));
    if let Some(p) = cli.max_passes {
        b.max_passes = p;
    }
    if let Some(l) = cli.max_len {
        b.max_len = l;
    }
    if let Some(m) = cli.max_states {
        b.max_states = m;
    }
    b
}

/// Overrides for searches on composites built inside glue and pipeline runs;
/// fields left unset fall back to fixed generous values.
fn fixed_bounds(cli: &Cli) -> Option<Bounds> {
    if cli.max_passes.is_none() && cli.max_len.is_none() && cli.max_states.is_none() {
        return None;
    }
    Some(Bounds {
        max_passes: cli.max_passes.unwrap_or(3),
        max_len: cli.max_len.unwrap_or(10_000),
        max_states: cli.max_states.unwrap_or(DEFAULT_MAX_STATES),
    })
}

/// Runs the search once so inconclusive outcomes get their own exit code.
fn certify(cli: &Cli, d: &Decomposition) -> Result<PnpCertificate, Failure> {
    let b = bounds(cli, d);
    if let Verdict::Inconclusive { frontier, .. } = search_inps(d, Some(b))? {
        return Err(Failure::Inconclusive(format!("search inconclusive with {} open branches", frontier.len())));
    }
    Ok(PnpCertificate::certify(d, Some(b))?)
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn mark(ok: bool) -> &'static str {
    if ok {
        "✓"
    } else {
        "✗"
    }
}

fn verify(cli: &Cli, d: &Decomposition) -> Outcome {
    let power = d.power(d.rotationless_power().exponent);
    let square = d.power(2);
    let checks = [
        ("cyclically admissible", d.is_cyclically_admissible()),
        ("graph map composite", d.is_graph_map_composite()),
        ("train track", power.is_train_track()),
        ("irreducible", d.is_irreducible()),
        ("expanding", d.is_expanding()),
        ("prevention sequence (square)", is_legalizing_prevention_sequence(&square, Some(bounds(cli, &square))).0),
    ];
    let pass = checks.iter().all(|(_, ok)| *ok);
    let out = match cli.emit {
        Emit::Json => json(&serde_json::json!({
            "pass": pass,
            "checks": checks.iter().map(|(n, ok)| (n.to_string(), *ok)).collect::<std::collections::BTreeMap<_, _>>(),
        })),
        _ => checks.iter().map(|(n, ok)| format!("{n}: {}\n", mark(*ok))).collect(),
    };
    if pass {
        Ok(out)
    } else {
        print!("{out}");
        Err(Failure::Checked("verification failed".into()))
    }
}

fn show_index(list: &[Index]) -> String {
    let items: Vec<String> = list.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

fn run(cli: &Cli) -> Outcome {
    match &cli.verb {
        Verb::Verify(input) => verify(cli, &load(input)?),
        Verb::Iwg(input) => {
            let d = load(input)?;
            let iw = ideal_whitehead_graph(&d, &certify(cli, &d)?)?;
            Ok(match cli.emit {
                Emit::Dot => iw.to_dot_named("IW"),
                Emit::Json => json(&iw),
                Emit::Text => {
                    let mut s = format!("{} vertices, {} edges\n", iw.vertex_count(), iw.edge_count());
                    for e in iw.edges() {
                        s.push_str(&format!("{}\n", e.ends));
                    }
                    s
                }
            })
        }
        Verb::Index(input) => {
            let d = load(input)?;
            let iw = ideal_whitehead_graph(&d, &certify(cli, &d)?)?;
            let list: Vec<Index> = index_list(&iw);
            Ok(match cli.emit {
                Emit::Json => json(&list),
                _ => format!("{}\n", show_index(&list)),
            })
        }
        Verb::Ltt(input) => {
            let d = load(input)?;
            let s = build_ltt(&d, &certify(cli, &d)?)?;
            Ok(match cli.emit {
                Emit::Dot => s.to_dot(),
                Emit::Json => json(&s),
                Emit::Text => format!("{s}\n"),
            })
        }
        Verb::IdDiagram { input, budget } => {
            let d = load(input)?;
            let seed = build_ltt(&d, &certify(cli, &d)?)?;
            let dg = build_id_diagram(&seed, DiagramOptions { budget: *budget, reverse: false })?;
            Ok(match cli.emit {
                Emit::Dot => dg.to_dot(),
                Emit::Json => json(&dg),
                Emit::Text => {
                    let mut s = format!(
                        "{} structures, {} moves{}\n",
                        dg.nodes.len(),
                        dg.edges.len(),
                        if dg.truncated { " (truncated)" } else { "" }
                    );
                    for (i, (n, e)) in dg.census().into_iter().enumerate() {
                        let tag = if dg.seed_component == Some(i) { " (seed)" } else { "" };
                        s.push_str(&format!("component {i}{tag}: {n} nodes, {e} edges\n"));
                    }
                    s
                }
            })
        }
        Verb::Pnp(input) => {
            let d = load(input)?;
            let verdict = search_inps(&d, Some(bounds(cli, &d)))?;
            let text = match cli.emit {
                Emit::Json => json(&verdict),
                _ => match &verdict {
                    Verdict::NoneLegalized { trace } => {
                        format!("no iNPs: {} branches, all legalized or mismatched\n", trace.len())
                    }
                    Verdict::Found { rho, period, .. } => format!("Nielsen path {rho} of period {period}\n"),
                    Verdict::Inconclusive { frontier, .. } => {
                        format!("inconclusive: {} open branches\n", frontier.len())
                    }
                },
            };
            match verdict {
                Verdict::NoneLegalized { .. } => Ok(text),
                Verdict::Found { .. } => {
                    print!("{text}");
                    Err(Failure::Checked("periodic Nielsen path found".into()))
                }
                Verdict::Inconclusive { .. } => {
                    print!("{text}");
                    Err(Failure::Inconclusive("search exhausted its bounds".into()))
                }
            }
        }
        Verb::Glue { input } => {
            let text = read_source(input.as_ref())?;
            let v: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("glue input: {e}")))?;
            let side = |key: &str| -> Result<GluingSide, Failure> {
                let raw = v.get(key).ok_or_else(|| Failure::Usage(format!("glue input needs {key:?}")))?;
                Ok(GluingSide::normalized(&parse_decomposition(&raw.to_string(), None)?)?)
            };
            let mut spec = GluingSpec::new(side("left")?, side("right")?);
            if let Some(shared) = v.get("shared") {
                let shared: Vec<usize> = serde_json::from_value(shared.clone())
                    .map_err(|e| Failure::Usage(format!("shared indices: {e}")))?;
                spec = spec.with_shared(shared);
            }
            let b = fixed_bounds(cli);
            let glued = realize_glued(&spec, b)?;
            Ok(match cli.emit {
                Emit::Dot => glued.graph.to_dot_named("glued"),
                Emit::Json => json(&glued),
                Emit::Text => format!(
                    "rank {} decomposition of {} generators\n{}\n{}\n",
                    glued.decomposition.rank(),
                    glued.decomposition.len(),
                    glued.certificate.pnp,
                    glued.decomposition
                ),
            })
        }
        Verb::Pipeline { rank } => {
            let b = fixed_bounds(cli);
            let out = cut_vertex_pipeline(*rank, b)?;
            if !out.bundle.all_pass() {
                print!("{}", out.to_text());
                return Err(Failure::Checked("certificate bundle incomplete".into()));
            }
            Ok(match cli.emit {
                Emit::Dot => out.bundle.ideal_whitehead.to_dot_named("IW"),
                Emit::Json => json(&out),
                Emit::Text => out.to_text(),
            })
        }
        Verb::Example { name } => match name.as_str() {
            "phi" | "lemma-3-6" => Ok(format!("{}\n", example().to_json())),
            other => Err(Failure::Usage(format!("unknown example {other:?}; available: phi"))),
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(&cli).and_then(|text| match &cli.out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checked(m)) => {
            eprintln!("iwg: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("iwg: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Inconclusive(m)) => {
            eprintln!("iwg: {m}");
            ExitCode::from(3)
        }
    }
}
