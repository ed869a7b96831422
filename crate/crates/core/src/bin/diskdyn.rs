use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use diskdyn::cli::{run, ExperimentConfig, Format, MapSpec, Operation, PresetName, EXIT_VALIDATION};

#[derive(Parser)]
#[command(name = "diskdyn", version, about = "Iteration of holomorphic self-maps of the unit disk")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Locate the Denjoy-Wolff point and classify the map.
    Classify(Knobs),
    /// Hyperbolic step sequence and verdict.
    Step(Knobs),
    /// Forward orbit of the base point.
    Orbit(Knobs),
    /// Truncated grand orbit with multiplicities.
    GrandOrbit(Knobs),
    /// Truncated Blaschke eigenfunction and its eigenvalue estimate.
    Eigen(Knobs),
    /// Abel-equation residuals of the approximants h_n.
    Abel(Knobs),
    /// Nevanlinna counting function and comparability scan.
    Nevanlinna(Knobs),
    /// Julia-lemma horodisk containment check.
    JuliaCheck(Knobs),
    /// Reproduce every reference check.
    PaperSuite(Knobs),
    /// Run an experiment described by a JSON config file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args, Clone)]
struct Knobs {
    #[arg(long, value_enum)]
    preset: Option<PresetName>,
    #[arg(long)]
    alpha: Option<f64>,
    /// JSON map description (preset, blaschke or compose).
    #[arg(long, conflicts_with_all = ["preset", "alpha"])]
    map_file: Option<PathBuf>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    forward_n: Option<usize>,
    #[arg(long)]
    n_max: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    tol: Option<f64>,
    /// Base point as re,im.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    base_point: Option<[f64; 2]>,
    /// Horodisk level for julia-check.
    #[arg(long)]
    level: Option<f64>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn parse_point(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [re, im] => Ok([
            re.trim().parse().map_err(|e| format!("{e}"))?,
            im.trim().parse().map_err(|e| format!("{e}"))?,
        ]),
        _ => Err("expected re,im".into()),
    }
}

fn config_from(op: Operation, k: Knobs) -> Result<ExperimentConfig, String> {
    let map = match (&k.map_file, k.preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            serde_json::from_str::<MapSpec>(&text).map_err(|e| format!("invalid map file: {e}"))?
        }
        (None, Some(name)) => MapSpec::Preset { name, alpha: k.alpha },
        (None, None) if k.alpha.is_some() => MapSpec::Preset {
            name: PresetName::Example61,
            alpha: k.alpha,
        },
        (None, None) => MapSpec::default(),
    };
    Ok(ExperimentConfig {
        map,
        operation: op,
        depth: k.depth,
        forward_n: k.forward_n,
        n_max: k.n_max,
        samples: k.samples,
        seed: k.seed,
        tol: k.tol,
        base_point: k.base_point,
        level: k.level,
        out_dir: k.out_dir,
        format: k.format,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match cli.command {
        Command::Classify(k) => config_from(Operation::Classify, k),
        Command::Step(k) => config_from(Operation::Step, k),
        Command::Orbit(k) => config_from(Operation::Orbit, k),
        Command::GrandOrbit(k) => config_from(Operation::GrandOrbit, k),
        Command::Eigen(k) => config_from(Operation::Eigen, k),
        Command::Abel(k) => config_from(Operation::Abel, k),
        Command::Nevanlinna(k) => config_from(Operation::Nevanlinna, k),
        Command::JuliaCheck(k) => config_from(Operation::JuliaCheck, k),
        Command::PaperSuite(k) => config_from(Operation::PaperSuite, k),
        Command::Run { config } => std::fs::read_to_string(&config)
            .map_err(|e| format!("{}: {e}", config.display()))
            .and_then(|text| ExperimentConfig::from_json(&text)),
    };
    let config = match config {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_VALIDATION as u8);
        }
    };
    let output = run(&config);
    if let Some(dir) = &config.out_dir {
        if let Err(e) = output.write_to(dir) {
            eprintln!("error: writing {}: {e}", dir.display());
            return ExitCode::from(EXIT_VALIDATION as u8);
        }
    }
    print!("{}", output.stdout_text(config.format));
    if output.exit_code != 0 {
        if let Some(err) = output.summary.get("error") {
            eprintln!("error: {}", err.as_str().unwrap_or_default());
        }
        if let Some(failed) = output.summary["result"].get("failed") {
            eprintln!("failed criteria: {failed}");
        }
    }
    ExitCode::from(output.exit_code as u8)
}
