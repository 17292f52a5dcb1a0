//! Command-line driver: dataset generation, exact checking, training,
//! prediction, benchmarking and SMV export.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or processing error.

use clap::{Args, Parser, Subcommand};
use predmc::checker::check;
use predmc::gbrt::{GbrtModel, GbrtParams};
use predmc::kripke::{decode_kripke, decode_kripke_extended, KripkeStructure};
use predmc::ltl::{parse_ltl, LtlFormula};
use predmc::pipeline::{
    benchmark, build_dataset, export_smv, load_dataset, run_experiment, save_dataset, GenSeeds,
    KripkeGeometry, SplitParams,
};
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "predmc",
    version,
    about = "Exact LTL model checking and a learned verdict predictor"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a labeled dataset with the exact checker
    Gen(GenArgs),
    /// Check one structure against one formula
    Check(CheckArgs),
    /// Train a predictor on a dataset and report held-out accuracy
    Train(TrainArgs),
    /// Predict the verdict for one pair with a trained model
    Predict(PredictArgs),
    /// Compare mean check time against mean predict time on a dataset
    Bench(BenchArgs),
    /// Write an SMV model with an LTLSPEC line for one pair
    ExportSmv(ExportSmvArgs),
}

#[derive(Args)]
struct GenArgs {
    /// States per structure
    #[arg(long, default_value_t = 5)]
    states: u16,
    /// Atomic propositions per state
    #[arg(long, default_value_t = 3)]
    props: u8,
    /// Transitions per structure
    #[arg(long, default_value_t = 8)]
    transitions: usize,
    /// Number of random structures
    #[arg(long, default_value_t = 25)]
    kripke_count: usize,
    /// Number of random formulas
    #[arg(long, default_value_t = 25)]
    formula_count: usize,
    /// Token length of every formula
    #[arg(long, default_value_t = 25)]
    length: usize,
    /// Checked pairs, taken in (structure, formula) order; defaults to all
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long, default_value_t = 1)]
    kripke_seed: u64,
    #[arg(long, default_value_t = 2)]
    formula_seed: u64,
    /// Output CSV path; a `<path>.meta.json` sidecar is written next to it
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CheckArgs {
    /// Structure text: digit string, or extended `S:..;T:..` form
    #[arg(long)]
    k: String,
    #[arg(long, default_value_t = 5)]
    states: u16,
    #[arg(long, default_value_t = 3)]
    props: u8,
    /// Formula text
    #[arg(long)]
    f: String,
}

#[derive(Args)]
struct TrainArgs {
    /// Dataset CSV produced by `gen`
    #[arg(long)]
    data: PathBuf,
    /// Seed of the train/test split
    #[arg(long, default_value_t = 1988)]
    seed: u64,
    /// Training fraction in (0, 1)
    #[arg(long, default_value_t = 0.83)]
    fraction: f64,
    #[arg(long, default_value_t = 100)]
    trees: usize,
    #[arg(long, default_value_t = 4)]
    depth: usize,
    #[arg(long, default_value_t = 0.1)]
    rate: f64,
    #[arg(long, default_value_t = 1)]
    min_leaf: usize,
    #[arg(long, default_value_t = 0.5)]
    threshold: f64,
    /// Where to write the trained model
    #[arg(long)]
    model_out: PathBuf,
    /// Optional JSON report path
    #[arg(long)]
    report_out: Option<PathBuf>,
}

#[derive(Args)]
struct PredictArgs {
    /// Trained model file
    #[arg(long)]
    model: PathBuf,
    /// Structure text (geometry comes from the model layout)
    #[arg(long)]
    k: String,
    /// Formula text
    #[arg(long)]
    f: String,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    model: PathBuf,
}

#[derive(Args)]
struct ExportSmvArgs {
    #[arg(long)]
    k: String,
    #[arg(long, default_value_t = 5)]
    states: u16,
    #[arg(long, default_value_t = 3)]
    props: u8,
    #[arg(long)]
    f: String,
    /// Output path
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help and version are not failures
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Check(args) => cmd_check(args),
        Command::Train(args) => cmd_train(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Bench(args) => cmd_bench(args),
        Command::ExportSmv(args) => cmd_export_smv(args),
    }
}

fn parse_structure(text: &str, states: u16, props: u8) -> Result<KripkeStructure, String> {
    if text.starts_with("S:") {
        decode_kripke_extended(text).map_err(|e| e.to_string())
    } else {
        decode_kripke(text, states, props).map_err(|e| e.to_string())
    }
}

fn parse_formula(text: &str) -> Result<LtlFormula, String> {
    parse_ltl(text).map_err(|e| e.to_string())
}

fn cmd_gen(args: GenArgs) -> Result<(), String> {
    let pairs = args.pairs.unwrap_or(args.kripke_count * args.formula_count);
    let dataset = build_dataset(
        args.kripke_count,
        args.formula_count,
        args.length,
        KripkeGeometry {
            n_states: args.states,
            n_props: args.props,
            n_transitions: args.transitions,
        },
        pairs,
        GenSeeds {
            kripke_seed: args.kripke_seed,
            formula_seed: args.formula_seed,
        },
    )
    .map_err(|e| e.to_string())?;
    save_dataset(&dataset, &args.out).map_err(|e| e.to_string())?;
    let yes = dataset.records.iter().filter(|r| r.r).count();
    println!(
        "wrote {} records ({} yes / {} no) to {}",
        dataset.records.len(),
        yes,
        dataset.records.len() - yes,
        args.out.display()
    );
    Ok(())
}

fn cmd_check(args: CheckArgs) -> Result<(), String> {
    let k = parse_structure(&args.k, args.states, args.props)?;
    let f = parse_formula(&args.f)?;
    let verdict = check(&k, &f).map_err(|e| e.to_string())?;
    if verdict.holds {
        println!("holds: true");
    } else {
        println!("holds: false");
        let ce = verdict.counterexample.expect("failing check has a lasso");
        let join = |states: &[u16]| {
            states
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        println!("counterexample prefix: {}", join(&ce.prefix));
        println!("counterexample cycle: {}", join(&ce.cycle));
    }
    Ok(())
}

fn cmd_train(args: TrainArgs) -> Result<(), String> {
    let dataset = load_dataset(&args.data).map_err(|e| e.to_string())?;
    let report = run_experiment(
        &dataset,
        &SplitParams {
            seed: args.seed,
            fraction: args.fraction,
        },
        &GbrtParams {
            n_trees: args.trees,
            max_depth: args.depth,
            learning_rate: args.rate,
            min_leaf: args.min_leaf,
            threshold: args.threshold,
            seed: 0,
        },
    )
    .map_err(|e| e.to_string())?;
    fs::write(&args.model_out, report.model.serialize())
        .map_err(|e| format!("write {}: {e}", args.model_out.display()))?;
    if let Some(path) = &args.report_out {
        fs::write(path, report.to_json()).map_err(|e| format!("write {}: {e}", path.display()))?;
    }
    print!("{report}");
    println!("model written to {}", args.model_out.display());
    Ok(())
}

fn load_model(path: &PathBuf) -> Result<GbrtModel, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("read {}: {e}", path.display()))?;
    GbrtModel::deserialize(&text).map_err(|e| e.to_string())
}

fn cmd_predict(args: PredictArgs) -> Result<(), String> {
    let model = load_model(&args.model)?;
    let layout = parse_layout(model.feature_layout())?;
    let k = parse_structure(&args.k, layout.n_states, layout.n_props)?;
    let f = parse_formula(&args.f)?;
    let x = predmc::features::featurize(&k, &f, &layout).map_err(|e| e.to_string())?;
    let bit = model.classify(&x).map_err(|e| e.to_string())?;
    println!("{}", u8::from(bit));
    Ok(())
}

/// Recover the feature layout a model was trained with from its tag,
/// e.g. `k5x3t8f25`.
fn parse_layout(tag: &str) -> Result<predmc::features::FeatureConfig, String> {
    let fail = || format!("model layout tag {tag:?} is not k<S>x<P>t<T>f<L>");
    let rest = tag.strip_prefix('k').ok_or_else(fail)?;
    let (states, rest) = rest.split_once('x').ok_or_else(fail)?;
    let (props, rest) = rest.split_once('t').ok_or_else(fail)?;
    let (transitions, tokens) = rest.split_once('f').ok_or_else(fail)?;
    Ok(predmc::features::FeatureConfig {
        n_states: states.parse().map_err(|_| fail())?,
        n_props: props.parse().map_err(|_| fail())?,
        n_transitions: transitions.parse().map_err(|_| fail())?,
        max_formula_tokens: tokens.parse().map_err(|_| fail())?,
    })
}

fn cmd_bench(args: BenchArgs) -> Result<(), String> {
    let dataset = load_dataset(&args.data).map_err(|e| e.to_string())?;
    let model = load_model(&args.model)?;
    let result = benchmark(&dataset, &model).map_err(|e| e.to_string())?;
    print!("{result}");
    Ok(())
}

fn cmd_export_smv(args: ExportSmvArgs) -> Result<(), String> {
    let k = parse_structure(&args.k, args.states, args.props)?;
    let f = parse_formula(&args.f)?;
    let text = export_smv(&k, &f).map_err(|e| e.to_string())?;
    fs::write(&args.out, text).map_err(|e| format!("write {}: {e}", args.out.display()))?;
    println!("wrote {}", args.out.display());
    Ok(())
}
