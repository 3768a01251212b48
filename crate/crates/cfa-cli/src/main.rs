//! `cfa`: batch front end for combinatorial fusion analysis.
//!
//! Every subcommand is byte-deterministic for fixed inputs, flags and seed.
//! Exit codes: 0 success, 1 data error (one-line diagnostic on stderr),
//! 2 usage error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cfa_core::diversity::diversity_matrix;
use cfa_core::fusion::{fusion_report_csv, run_subsets_with, FuseOptions};
use cfa_core::kemeny::{
    build_bubble_sort_graph, enumerate_weak_orders, verify_recursive_structure,
    vertex_connectivity, MAX_CONNECTIVITY_N,
};
use cfa_core::metrics::LexicalScorer;
use cfa_core::pipeline::{emit_reports, load_corpus, run_corpus};
use cfa_core::scoring::{rank_score_function, ScoreMatrix, TiePolicy};
use cfa_core::simulate::{diversity_study, SyntheticSpec};

#[derive(Parser)]
#[command(
    name = "cfa",
    version,
    about = "Combinatorial fusion analysis over multiple scoring systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum TieArg {
    /// Tied items share the mean of the positions they span.
    #[default]
    Fractional,
    /// Tied items get consecutive integer ranks in item order.
    FirstOccurrence,
}

impl From<TieArg> for TiePolicy {
    fn from(arg: TieArg) -> Self {
        match arg {
            TieArg::Fractional => TiePolicy::Fractional,
            TieArg::FirstOccurrence => TiePolicy::FirstOccurrence,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, ValueEnum)]
enum ScorerArg {
    /// Term-frequency cosine against each profile text.
    #[default]
    Lexical,
}

#[derive(Args)]
struct FusionFlags {
    /// Skip per-system min-max normalization before score combination.
    #[arg(long)]
    no_normalize: bool,
    /// Tie policy for rankings derived from fused values.
    #[arg(long, value_enum, default_value_t)]
    tie_policy: TieArg,
}

impl FusionFlags {
    fn options(&self) -> FuseOptions {
        FuseOptions {
            normalize: !self.no_normalize,
            tie_policy: self.tie_policy.into(),
            ..FuseOptions::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fuse every system subset of a score matrix by all four methods.
    Fuse {
        /// Score matrix CSV (`item_id,<system>,...`).
        #[arg(long)]
        input: PathBuf,
        /// Fusion report CSV to write.
        #[arg(long)]
        output: PathBuf,
        /// Smallest subset size to enumerate (1 emits per-system baselines).
        #[arg(long, default_value_t = 2)]
        min_size: usize,
        #[command(flatten)]
        flags: FusionFlags,
    },
    /// Pairwise cognitive diversity and per-system diversity strength.
    Diversity {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Rank-score curves: one rank column, one score column per system.
    Rsf {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Bubble-sort graph properties or weak-order enumeration.
    Kemeny {
        /// Build the graph on all n! permutations and print its properties.
        #[arg(
            long,
            conflicts_with = "enumerate",
            required_unless_present = "enumerate"
        )]
        graph: Option<usize>,
        /// Count all weak orders (rankings with ties) on n items.
        #[arg(long)]
        enumerate: Option<usize>,
        /// Write the graph as a tab-separated edge list of digit strings.
        #[arg(long, requires = "graph")]
        export: Option<PathBuf>,
    },
    /// Score, fuse and evaluate a question corpus; write CSV reports.
    Pipeline {
        /// Line-delimited corpus of question records.
        #[arg(long)]
        corpus: PathBuf,
        /// Report directory (summary.csv plus per-question curves).
        #[arg(long, env = "CFA_OUT_DIR")]
        out_dir: PathBuf,
        /// Unit scorer for questions without precomputed scores.
        #[arg(long, value_enum, default_value_t)]
        scorer: ScorerArg,
        #[command(flatten)]
        flags: FusionFlags,
    },
    /// Run the seeded synthetic diversity-vs-accuracy study.
    Simulate {
        #[arg(long, default_value_t = 2000)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        items: usize,
        #[arg(long, default_value_t = 5)]
        systems: usize,
        #[arg(long, default_value_t = 1.0)]
        signal: f64,
        /// Per-system noise magnitudes, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "0.2,0.35,0.5,0.65,0.8")]
        noise_scales: Vec<f64>,
        /// Per-system score scales, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1,3,10,30,100")]
        score_scales: Vec<f64>,
        /// Study report CSV to write.
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        flags: FusionFlags,
    },
}

fn read_matrix(path: &PathBuf) -> Result<ScoreMatrix> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("failed to read score matrix {}", path.display()))?;
    ScoreMatrix::from_csv(&text).with_context(|| format!("failed to parse {}", path.display()))
}

fn write_output(path: &PathBuf, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .with_context(|| format!("failed to create {}", parent.display()))?;
        }
    }
    fs::write(path, contents).with_context(|| format!("failed to write {}", path.display()))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Fuse {
            input,
            output,
            min_size,
            flags,
        } => {
            let matrix = read_matrix(&input)?;
            let results = run_subsets_with(&matrix, min_size, &flags.options())?;
            write_output(&output, &fusion_report_csv(&results))?;
            println!(
                "fused {} configurations of {} systems over {} items -> {}",
                results.len(),
                matrix.n_systems(),
                matrix.n_items(),
                output.display()
            );
        }
        Command::Diversity { input, output } => {
            let matrix = read_matrix(&input)?;
            let dm = diversity_matrix(&matrix)?;
            write_output(&output, &dm.to_csv())?;
            println!(
                "diversity of {} systems (mean pairwise CD {}) -> {}",
                matrix.n_systems(),
                dm.mean_pairwise_cd(),
                output.display()
            );
        }
        Command::Rsf { input, output } => {
            let matrix = read_matrix(&input)?;
            let mut csv = String::from("rank");
            for id in matrix.system_ids() {
                csv.push(',');
                csv.push_str(id);
            }
            csv.push('\n');
            let curves: Vec<Vec<f64>> = (0..matrix.n_systems())
                .map(|j| Ok(rank_score_function(&matrix.system(j))?.values().to_vec()))
                .collect::<Result<_>>()?;
            for i in 0..matrix.n_items() {
                csv.push_str(&format!("{}", i + 1));
                for curve in &curves {
                    csv.push(',');
                    csv.push_str(&format!("{}", curve[i]));
                }
                csv.push('\n');
            }
            write_output(&output, &csv)?;
            println!(
                "rank-score curves for {} systems -> {}",
                matrix.n_systems(),
                output.display()
            );
        }
        Command::Kemeny {
            graph,
            enumerate,
            export,
        } => match (graph, enumerate) {
            (Some(n), None) => {
                let g = build_bubble_sort_graph(n)?;
                let degree = g
                    .regular_degree()
                    .map(|d| format!("{d}-regular"))
                    .unwrap_or_else(|| "irregular".into());
                let connectivity = if n <= MAX_CONNECTIVITY_N {
                    format!(", connectivity {}", vertex_connectivity(&g)?)
                } else {
                    String::new()
                };
                println!(
                    "{} vertices, {degree}, {}{connectivity}",
                    g.vertex_count(),
                    if g.is_connected() {
                        "connected"
                    } else {
                        "disconnected"
                    }
                );
                if n >= 3 {
                    let report = verify_recursive_structure(&g)?;
                    println!("{report}");
                }
                if let Some(path) = export {
                    write_output(&path, &g.to_edge_list())?;
                    println!("edge list -> {}", path.display());
                }
            }
            (None, Some(n)) => {
                let orders = enumerate_weak_orders(n)?;
                let factorial: usize = (1..=n).product();
                println!(
                    "{} weak orders on {n} items (strict orders: {factorial})",
                    orders.len()
                );
            }
            _ => unreachable!("clap enforces exactly one of --graph/--enumerate"),
        },
        Command::Pipeline {
            corpus,
            out_dir,
            scorer,
            flags,
        } => {
            let records = load_corpus(&corpus)
                .with_context(|| format!("failed to load corpus {}", corpus.display()))?;
            let ScorerArg::Lexical = scorer;
            let report = run_corpus(&records, &LexicalScorer, &flags.options())?;
            let files = emit_reports(&report, &out_dir)?;
            for (method, mean) in &report.method_means {
                println!("{method} mean ROUGE-L F1: {mean}");
            }
            println!(
                "{} questions -> {} report files in {}",
                records.len(),
                files.len(),
                out_dir.display()
            );
        }
        Command::Simulate {
            trials,
            seed,
            items,
            systems,
            signal,
            noise_scales,
            score_scales,
            output,
            flags,
        } => {
            if noise_scales.len() != systems || score_scales.len() != systems {
                bail!(
                    "expected {systems} noise and score scales, got {} and {}",
                    noise_scales.len(),
                    score_scales.len()
                );
            }
            let template = SyntheticSpec {
                n_items: items,
                k_systems: systems,
                signal_strength: signal,
                noise_scales,
                score_scales,
                seed,
            };
            let report = diversity_study(&template, trials, &flags.options())?;
            write_output(&output, &report.to_csv())?;
            for (idx, method) in cfa_core::fusion::FusionMethod::ALL.iter().enumerate() {
                println!("{method} top-1 accuracy: {}", report.accuracy[idx]);
            }
            println!("{trials} trials -> {}", output.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
