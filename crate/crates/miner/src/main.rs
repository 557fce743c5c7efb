use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use miner::pipeline::{self, Overrides, PipelineConfig, PipelineError, SynthArgs};

/// Hand-history mining pipeline: parse logs, replay games, extract
/// per-decision features, cluster plays and players, and report the
/// resulting models.
#[derive(Parser)]
#[command(name = "miner", version, disable_help_subcommand = true)]
struct Cli {
    /// Plain-text key = value config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory stage files are read from and written to.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(flatten)]
    knobs: Knobs,
    #[command(subcommand)]
    command: Command,
}

/// One optional flag per config key so any value can be pinned per run.
#[derive(Args)]
struct Knobs {
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    preflop_samples: Option<usize>,
    #[arg(long, global = true)]
    flop_board_cap: Option<usize>,
    #[arg(long, global = true)]
    min_variance: Option<f64>,
    #[arg(long, global = true)]
    max_dominance: Option<f64>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    #[arg(long, global = true)]
    folds: Option<usize>,
    #[arg(long, global = true)]
    k_max: Option<usize>,
    #[arg(long, global = true)]
    dominance_threshold: Option<f64>,
    #[arg(long, global = true)]
    starts: Option<usize>,
    #[arg(long, global = true)]
    min_gain: Option<f64>,
    #[arg(long, global = true)]
    min_actions: Option<usize>,
    #[arg(long, global = true)]
    histogram_bins: Option<usize>,
}

impl Knobs {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            preflop_samples: self.preflop_samples,
            flop_board_cap: self.flop_board_cap,
            min_variance: self.min_variance,
            max_dominance: self.max_dominance,
            tol: self.tol,
            max_iter: self.max_iter,
            folds: self.folds,
            k_max: self.k_max,
            dominance_threshold: self.dominance_threshold,
            starts: self.starts,
            min_gain: self.min_gain,
            min_actions: self.min_actions,
            histogram_bins: self.histogram_bins,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Parse raw hand logs into a replay-validated archive.
    Ingest {
        /// Raw log files, processed in order.
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Replay the archive and extract feature rows and action tallies.
    Extract,
    /// Write the feature datasets in the interchange text format.
    ExportArff,
    /// Fit the pre-flop and post-flop play mixtures (k by cross-validation).
    ClusterActions,
    /// Aggregate per-player cluster-frequency profiles.
    Profile,
    /// Cluster complete player profiles into strategy types.
    ClusterPlayers,
    /// Label each profiled player with its nearest strategy type.
    Classify,
    /// Tabulate next-action distributions per strategy type and street.
    Predict,
    /// Emit centroid tables and feature histograms for existing outputs.
    Report {
        /// Read models from this directory instead of --out.
        #[arg(long)]
        models: Option<PathBuf>,
    },
    /// Generate a scripted-archetype corpus as a raw log file.
    Synth {
        /// Destination log file.
        out_file: PathBuf,
        #[arg(long, default_value_t = SynthArgs::default().hands)]
        hands: usize,
        #[arg(long, default_value_t = SynthArgs::default().players_per_archetype)]
        players_per_archetype: usize,
        #[arg(long, default_value_t = SynthArgs::default().seats_per_hand)]
        seats_per_hand: usize,
        #[arg(long, default_value_t = SynthArgs::default().seed)]
        synth_seed: u64,
    },
    /// Write the published-table centroid models as loadable model files.
    Fixtures,
}

fn run(cli: &Cli) -> Result<Vec<String>, PipelineError> {
    let cfg = PipelineConfig::resolve(cli.config.as_deref(), &cli.knobs.overrides())?;
    let out = cli.out.as_path();
    match &cli.command {
        Command::Ingest { inputs } => pipeline::cmd_ingest(&cfg, inputs, out),
        Command::Extract => pipeline::cmd_extract(&cfg, out),
        Command::ExportArff => pipeline::cmd_export_arff(&cfg, out),
        Command::ClusterActions => pipeline::cmd_cluster_actions(&cfg, out),
        Command::Profile => pipeline::cmd_profile(&cfg, out),
        Command::ClusterPlayers => pipeline::cmd_cluster_players(&cfg, out),
        Command::Classify => pipeline::cmd_classify(&cfg, out),
        Command::Predict => pipeline::cmd_predict(&cfg, out),
        Command::Report { models } => pipeline::cmd_report(&cfg, out, models.as_deref()),
        Command::Synth { out_file, hands, players_per_archetype, seats_per_hand, synth_seed } => {
            let args = SynthArgs {
                hands: *hands,
                players_per_archetype: *players_per_archetype,
                seats_per_hand: *seats_per_hand,
                seed: *synth_seed,
            };
            pipeline::cmd_synth(&cfg, &args, out_file)
        }
        Command::Fixtures => pipeline::cmd_fixtures(&cfg, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap exits 2 by default; keep 0 for --help/--version and map
            // genuine usage errors to 1.
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(lines) => {
            for line in lines {
                println!("{line}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
