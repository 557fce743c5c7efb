//! File-based pipeline stages behind the `miner` binary.
//!
//! Every command reads its inputs from files, writes its outputs to files in
//! the chosen directory, and drops a `<stage>_manifest.json` recording the
//! config snapshot, input/output content digests, row counts and model ids —
//! enough to reproduce the run bit-for-bit. Stage wiring:
//!
//! ```text
//! ingest → hands.jsonl → extract → extract.json ┬→ export-arff → *.arff
//!                                               ├→ cluster-actions → *_model.json
//!                                               └→ profile → profiles.json
//! profiles.json + action models → cluster-players → strategy_model.json
//! strategy_model.json → classify / predict / report
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::arff;
use crate::em::{self, EmConfig, EmError, MixtureModel};
use crate::equity::EquityConfig;
use crate::features::{self, Extraction, StreetGroup};
use crate::handlog::{parse_stream, ParsedHand, StreamItem};
use crate::profile::{self, PlayerProfile, ProfileConfig, ProfileError, StrategyModel};
use crate::replay::{self, Game};
use crate::report;
use crate::synth::{self, SynthConfig};
use crate::util::derive_seed;
use crate::{fixtures, money};

pub const HANDS_FILE: &str = "hands.jsonl";
pub const EXTRACT_FILE: &str = "extract.json";
pub const PRE_MODEL_FILE: &str = "preflop_model.json";
pub const POST_MODEL_FILE: &str = "postflop_model.json";
pub const PROFILES_FILE: &str = "profiles.json";
pub const STRATEGY_FILE: &str = "strategy_model.json";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("missing upstream output {0} (run the earlier stages first)")]
    MissingUpstream(PathBuf),
    #[error("model mismatch: {0}")]
    ModelMismatch(String),
}

impl PipelineError {
    /// 1 usage, 2 data/missing-upstream, 3 model mismatch.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Usage(_) => 1,
            PipelineError::Data(_) | PipelineError::MissingUpstream(_) => 2,
            PipelineError::ModelMismatch(_) => 3,
        }
    }
}

impl From<EmError> for PipelineError {
    fn from(e: EmError) -> Self {
        match e {
            EmError::SchemaMismatch(m) => PipelineError::ModelMismatch(m),
            other => PipelineError::Data(other.to_string()),
        }
    }
}

impl From<ProfileError> for PipelineError {
    fn from(e: ProfileError) -> Self {
        match e {
            ProfileError::ModelMismatch(m) => PipelineError::ModelMismatch(m),
            ProfileError::Em(EmError::SchemaMismatch(m)) => PipelineError::ModelMismatch(m),
            other => PipelineError::Data(other.to_string()),
        }
    }
}

// ---------------------------------------------------------------------------
// Configuration

/// Knobs for every stage, loadable from a `key = value` file and overridable
/// by flags (flags win). All randomness flows from `seed`; each stage derives
/// its own stream so adding a stage never perturbs another.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    /// Monte-Carlo deals for pre-flop win probability.
    pub preflop_samples: usize,
    /// Runout budget per hand for flop potential; full enumeration when the
    /// space is smaller.
    pub flop_board_cap: usize,
    pub min_variance: f64,
    pub max_dominance: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub folds: usize,
    pub k_max: usize,
    pub dominance_threshold: f64,
    pub starts: usize,
    pub min_gain: f64,
    pub min_actions: usize,
    pub histogram_bins: usize,
}

impl Default for PipelineConfig {
    fn default() -> PipelineConfig {
        PipelineConfig {
            seed: 0,
            preflop_samples: 2000,
            flop_board_cap: 1000,
            min_variance: 1e-4,
            max_dominance: 0.99,
            tol: 1e-6,
            max_iter: 100,
            folds: 10,
            k_max: 12,
            dominance_threshold: 0.65,
            starts: 1,
            min_gain: 0.0,
            min_actions: 20,
            histogram_bins: 10,
        }
    }
}

/// Flag-level overrides; `None` keeps the file/default value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub preflop_samples: Option<usize>,
    pub flop_board_cap: Option<usize>,
    pub min_variance: Option<f64>,
    pub max_dominance: Option<f64>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub folds: Option<usize>,
    pub k_max: Option<usize>,
    pub dominance_threshold: Option<f64>,
    pub starts: Option<usize>,
    pub min_gain: Option<f64>,
    pub min_actions: Option<usize>,
    pub histogram_bins: Option<usize>,
}

impl PipelineConfig {
    pub fn resolve(file: Option<&Path>, ov: &Overrides) -> Result<PipelineConfig, PipelineError> {
        let mut cfg = match file {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    PipelineError::Usage(format!("cannot read config {}: {e}", path.display()))
                })?;
                toml::from_str(&text).map_err(|e| {
                    PipelineError::Usage(format!("bad config {}: {e}", path.display()))
                })?
            }
            None => PipelineConfig::default(),
        };
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = ov.$f { cfg.$f = v; } )* };
        }
        take!(
            seed, preflop_samples, flop_board_cap, min_variance, max_dominance, tol, max_iter,
            folds, k_max, dominance_threshold, starts, min_gain, min_actions, histogram_bins
        );
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: &str| Err(PipelineError::Usage(m.to_string()));
        if self.preflop_samples == 0 || self.flop_board_cap == 0 {
            return bad("sampling budgets must be at least 1");
        }
        if self.min_variance < 0.0 || !(self.max_dominance > 0.0 && self.max_dominance <= 1.0) {
            return bad("min_variance must be >= 0 and max_dominance in (0,1]");
        }
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return bad("tol must be positive and max_iter nonzero");
        }
        if self.folds < 2 || self.k_max == 0 {
            return bad("folds must be >= 2 and k_max >= 1");
        }
        if !(self.dominance_threshold > 0.0 && self.dominance_threshold <= 1.0) {
            return bad("dominance_threshold must be in (0,1]");
        }
        if self.starts == 0 || self.min_gain < 0.0 {
            return bad("starts must be >= 1 and min_gain >= 0");
        }
        if self.histogram_bins == 0 {
            return bad("histogram_bins must be >= 1");
        }
        Ok(())
    }

    pub fn equity(&self) -> EquityConfig {
        EquityConfig {
            preflop_samples: self.preflop_samples,
            flop_board_cap: self.flop_board_cap,
            seed: derive_seed(self.seed, 0xE9, 0),
        }
    }

    fn em_base(&self) -> EmConfig {
        EmConfig {
            tol: self.tol,
            max_iter: self.max_iter,
            folds: self.folds,
            k_max: self.k_max,
            dominance_threshold: self.dominance_threshold,
            starts: self.starts,
            min_gain: self.min_gain,
            ..EmConfig::default()
        }
    }

    pub fn action_em(&self) -> EmConfig {
        EmConfig { seed: derive_seed(self.seed, 0xAC, 0), ..self.em_base() }
    }

    pub fn strategy_em(&self) -> EmConfig {
        EmConfig { seed: derive_seed(self.seed, 0x57, 0), ..self.em_base() }
    }

    pub fn profile_cfg(&self) -> ProfileConfig {
        ProfileConfig {
            min_actions: self.min_actions,
            min_variance: self.min_variance,
            max_dominance: self.max_dominance,
            em: self.strategy_em(),
        }
    }
}

// ---------------------------------------------------------------------------
// Run manifest

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

/// Written next to every stage's outputs; the digests change iff the bytes
/// they cover change, so diffing two manifests answers "same run?" exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Unix seconds; `SOURCE_DATE_EPOCH` overrides the clock so archives of
    /// the same run are byte-identical.
    pub timestamp_unix: u64,
    pub config: PipelineConfig,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub counts: BTreeMap<String, u64>,
    pub model_ids: BTreeMap<String, String>,
}

fn timestamp() -> u64 {
    if let Ok(v) = std::env::var("SOURCE_DATE_EPOCH") {
        if let Ok(t) = v.trim().parse() {
            return t;
        }
    }
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    hex::encode(h.finalize())
}

struct Stage<'a> {
    out: &'a Path,
    manifest: RunManifest,
}

impl<'a> Stage<'a> {
    fn new(command: &str, cfg: &PipelineConfig, out: &'a Path) -> Result<Stage<'a>, PipelineError> {
        fs::create_dir_all(out)
            .map_err(|e| PipelineError::Data(format!("cannot create {}: {e}", out.display())))?;
        Ok(Stage {
            out,
            manifest: RunManifest {
                command: command.to_string(),
                timestamp_unix: timestamp(),
                config: cfg.clone(),
                inputs: Vec::new(),
                outputs: Vec::new(),
                counts: BTreeMap::new(),
                model_ids: BTreeMap::new(),
            },
        })
    }

    /// Reads a file produced by an earlier stage, recording its digest.
    /// Stage files are recorded by bare name so manifests compare equal no
    /// matter where the output directory lives.
    fn read_upstream(&mut self, name: &str) -> Result<String, PipelineError> {
        let path = self.out.join(name);
        self.read_named(&path, name)
    }

    /// Reads a caller-supplied file, recording the path as given.
    fn read_input(&mut self, path: &Path) -> Result<String, PipelineError> {
        self.read_named(path, &path.display().to_string())
    }

    fn read_named(&mut self, path: &Path, display: &str) -> Result<String, PipelineError> {
        if !path.is_file() {
            return Err(PipelineError::MissingUpstream(path.to_path_buf()));
        }
        let text = fs::read_to_string(path)
            .map_err(|e| PipelineError::Data(format!("cannot read {}: {e}", path.display())))?;
        self.manifest.inputs.push(FileDigest {
            path: display.to_string(),
            sha256: sha256_hex(text.as_bytes()),
        });
        Ok(text)
    }

    fn write_output(&mut self, name: &str, contents: &str) -> Result<PathBuf, PipelineError> {
        let path = self.out.join(name);
        fs::write(&path, contents)
            .map_err(|e| PipelineError::Data(format!("cannot write {}: {e}", path.display())))?;
        self.manifest.outputs.push(FileDigest {
            path: name.to_string(),
            sha256: sha256_hex(contents.as_bytes()),
        });
        Ok(path)
    }

    fn count(&mut self, key: &str, value: u64) {
        self.manifest.counts.insert(key.to_string(), value);
    }

    fn model_id(&mut self, key: &str, id: &str) {
        self.manifest.model_ids.insert(key.to_string(), id.to_string());
    }

    /// Writes `<command>_manifest.json` and returns the summary lines.
    fn finish(self, mut lines: Vec<String>) -> Result<Vec<String>, PipelineError> {
        let name = format!("{}_manifest.json", self.manifest.command);
        let path = self.out.join(&name);
        let text = serde_json::to_string_pretty(&self.manifest)
            .expect("manifest serializes")
            + "\n";
        fs::write(&path, &text)
            .map_err(|e| PipelineError::Data(format!("cannot write {}: {e}", path.display())))?;
        lines.push(format!("manifest {}", path.display()));
        Ok(lines)
    }
}

// ---------------------------------------------------------------------------
// Stage commands

/// Parses raw logs into a line-delimited archive of replay-validated hands.
pub fn cmd_ingest(
    cfg: &PipelineConfig,
    inputs: &[PathBuf],
    out: &Path,
) -> Result<Vec<String>, PipelineError> {
    if inputs.is_empty() {
        return Err(PipelineError::Usage("ingest needs at least one input file".into()));
    }
    let mut stage = Stage::new("ingest", cfg, out)?;
    let mut hands: Vec<ParsedHand> = Vec::new();
    let mut parse_skipped = 0u64;
    let mut inconsistent = 0u64;
    for input in inputs {
        let text = stage.read_input(input)?;
        for item in parse_stream(BufReader::new(text.as_bytes())) {
            match item {
                StreamItem::Hand(hand) => match replay::replay(&hand) {
                    Ok(_) => hands.push(hand),
                    Err(_) => inconsistent += 1,
                },
                StreamItem::Skipped(_) => parse_skipped += 1,
            }
        }
    }
    if hands.is_empty() {
        return Err(PipelineError::Data("no hands parsed from the inputs".into()));
    }
    let mut archive = String::new();
    for hand in &hands {
        archive.push_str(&serde_json::to_string(hand).expect("hand serializes"));
        archive.push('\n');
    }
    stage.write_output(HANDS_FILE, &archive)?;
    stage.count("hands", hands.len() as u64);
    stage.count("skipped_parse", parse_skipped);
    stage.count("skipped_inconsistent", inconsistent);
    stage.finish(vec![
        format!("{} hands, {} skipped", hands.len(), parse_skipped + inconsistent),
        format!("archive {}", out.join(HANDS_FILE).display()),
    ])
}

fn load_games(archive: &str) -> Result<Vec<Game>, PipelineError> {
    let mut games = Vec::new();
    for (i, line) in archive.lines().enumerate() {
        let hand: ParsedHand = serde_json::from_str(line)
            .map_err(|e| PipelineError::Data(format!("archive line {}: {e}", i + 1)))?;
        let game = replay::replay(&hand)
            .map_err(|e| PipelineError::Data(format!("archive line {}: {e}", i + 1)))?;
        games.push(game);
    }
    Ok(games)
}

/// Replays the archive and extracts per-decision feature rows and tallies.
pub fn cmd_extract(cfg: &PipelineConfig, out: &Path) -> Result<Vec<String>, PipelineError> {
    let mut stage = Stage::new("extract", cfg, out)?;
    let archive = stage.read_upstream(HANDS_FILE)?;
    let games = load_games(&archive)?;
    let extraction = features::extract_corpus(&games, &cfg.equity());
    stage.write_output(
        EXTRACT_FILE,
        &serde_json::to_string(&extraction).expect("extraction serializes"),
    )?;
    stage.count("hands", games.len() as u64);
    stage.count("preflop_rows", extraction.preflop.dataset.n_rows() as u64);
    stage.count("postflop_rows", extraction.postflop.dataset.n_rows() as u64);
    stage.count("players", extraction.tallies.len() as u64);
    stage.count("folds_skipped", extraction.stats.folds_skipped);
    stage.count("possible_earnings_clamped", extraction.stats.possible_earnings_clamped);
    stage.finish(vec![format!(
        "{} pre-flop rows, {} post-flop rows from {} hands",
        extraction.preflop.dataset.n_rows(),
        extraction.postflop.dataset.n_rows(),
        games.len()
    )])
}

fn load_extraction(stage: &mut Stage) -> Result<Extraction, PipelineError> {
    let text = stage.read_upstream(EXTRACT_FILE)?;
    serde_json::from_str(&text).map_err(|e| PipelineError::Data(format!("{EXTRACT_FILE}: {e}")))
}

/// Writes the plays datasets in the interchange text format.
pub fn cmd_export_arff(cfg: &PipelineConfig, out: &Path) -> Result<Vec<String>, PipelineError> {
    let mut stage = Stage::new("export-arff", cfg, out)?;
    let extraction = load_extraction(&mut stage)?;
    let mut lines = Vec::new();
    for (name, ds) in
        [("preflop.arff", &extraction.preflop.dataset), ("postflop.arff", &extraction.postflop.dataset)]
    {
        let path = stage.write_output(name, &arff::write_arff_to_string(ds))?;
        lines.push(format!("{} ({} rows)", path.display(), ds.n_rows()));
    }
    stage.finish(lines)
}

/// Caps cross-validation folds at the number of rows (leave-one-out at the
/// extreme) so small inputs degrade instead of erroring; the effective value
/// is recorded in the manifest.
fn clamp_folds(em: &mut EmConfig, rows: usize) -> usize {
    if rows >= 2 && em.folds > rows {
        em.folds = rows;
    }
    em.folds
}

/// Fits the pre-flop and post-flop action mixtures with CV-selected k.
pub fn cmd_cluster_actions(cfg: &PipelineConfig, out: &Path) -> Result<Vec<String>, PipelineError> {
    let mut stage = Stage::new("cluster-actions", cfg, out)?;
    let extraction = load_extraction(&mut stage)?;
    let mut lines = Vec::new();
    for (street, data, file) in [
        ("preflop", &extraction.preflop, PRE_MODEL_FILE),
        ("postflop", &extraction.postflop, POST_MODEL_FILE),
    ] {
        let (ds, removed) =
            features::remove_useless(&data.dataset, cfg.min_variance, cfg.max_dominance)
                .map_err(|e| PipelineError::Data(e.to_string()))?;
        let mut em_cfg = cfg.action_em();
        let folds = clamp_folds(&mut em_cfg, ds.n_rows());
        stage.count(&format!("{street}_folds"), folds as u64);
        let (k, model) = em::select_k(&ds, &em_cfg)?;
        stage.write_output(file, &model.to_json())?;
        stage.count(&format!("{street}_k"), k as u64);
        stage.count(&format!("{street}_removed"), removed.len() as u64);
        stage.model_id(street, &model.model_id());
        lines.push(format!(
            "{street}: k={k}, removed {removed:?}, model {}",
            &model.model_id()[..12]
        ));
    }
    stage.finish(lines)
}

fn load_mixture(stage: &mut Stage, name: &str) -> Result<MixtureModel, PipelineError> {
    let text = stage.read_upstream(name)?;
    Ok(MixtureModel::from_json(&text)?)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProfilesDoc {
    pub pre_model_id: String,
    pub post_model_id: String,
    pub min_actions: usize,
    pub profiles: Vec<PlayerProfile>,
}

/// Assigns every row to its action cluster and aggregates per-player
/// frequency profiles.
pub fn cmd_profile(cfg: &PipelineConfig, out: &Path) -> Result<Vec<String>, PipelineError> {
    let mut stage = Stage::new("profile", cfg, out)?;
    let extraction = load_extraction(&mut stage)?;
    let pre_model = load_mixture(&mut stage, PRE_MODEL_FILE)?;
    let post_model = load_mixture(&mut stage, POST_MODEL_FILE)?;
    let pre_assign = em::assign_all(&extraction.preflop.dataset, &pre_model)?;
    let post_assign = em::assign_all(&extraction.postflop.dataset, &post_model)?;
    let pre_counts = profile::cluster_counts(&extraction.preflop.meta, &pre_assign, pre_model.k());
    let post_counts =
        profile::cluster_counts(&extraction.postflop.meta, &post_assign, post_model.k());
    let profiles =
        profile::build_profiles(&pre_counts, &post_counts, &extraction.tallies, cfg.min_actions);
    let complete = profiles.iter().filter(|p| p.is_complete()).count();
    let doc = ProfilesDoc {
        pre_model_id: pre_model.model_id(),
        post_model_id: post_model.model_id(),
        min_actions: cfg.min_actions,
        profiles,
    };
    stage.write_output(
        PROFILES_FILE,
        &(serde_json::to_string_pretty(&doc).expect("profiles serialize") + "\n"),
    )?;
    stage.count("profiles", doc.profiles.len() as u64);
    stage.count("complete", complete as u64);
    stage.model_id("preflop", &doc.pre_model_id);
    stage.model_id("postflop", &doc.post_model_id);
    stage.finish(vec![format!("{} profiles, {} complete", doc.profiles.len(), complete)])
}

fn load_profiles(stage: &mut Stage) -> Result<ProfilesDoc, PipelineError> {
    let text = stage.read_upstream(PROFILES_FILE)?;
    serde_json::from_str(&text).map_err(|e| PipelineError::Data(format!("{PROFILES_FILE}: {e}")))
}

/// Clusters the strategy vectors of complete profiles into player types.
pub fn cmd_cluster_players(cfg: &PipelineConfig, out: &Path) -> Result<Vec<String>, PipelineError> {
    let mut stage = Stage::new("cluster-players", cfg, out)?;
    let doc = load_profiles(&mut stage)?;
    let pre_model = load_mixture(&mut stage, PRE_MODEL_FILE)?;
    let post_model = load_mixture(&mut stage, POST_MODEL_FILE)?;
    for (street, want, got) in [
        ("pre-flop", &doc.pre_model_id, pre_model.model_id()),
        ("post-flop", &doc.post_model_id, post_model.model_id()),
    ] {
        if *want != got {
            return Err(PipelineError::ModelMismatch(format!(
                "profiles were built against a different {street} action model"
            )));
        }
    }
    let mut profile_cfg = cfg.profile_cfg();
    let complete = doc.profiles.iter().filter(|p| p.is_complete()).count();
    let folds = clamp_folds(&mut profile_cfg.em, complete);
    stage.count("strategy_folds", folds as u64);
    let strategy = profile::cluster_players(&doc.profiles, &pre_model, &post_model, &profile_cfg)?;
    stage.write_output(STRATEGY_FILE, &strategy.to_json())?;
    stage.count("k", strategy.k() as u64);
    stage.count("removed_attributes", strategy.removed_attributes.len() as u64);
    stage.model_id("strategy", &strategy.model_id());
    stage.finish(vec![format!(
        "k={} player types, removed {:?}, model {}",
        strategy.k(),
        strategy.removed_attributes,
        &strategy.model_id()[..12]
    )])
}

fn load_strategy(stage: &mut Stage) -> Result<StrategyModel, PipelineError> {
    let text = stage.read_upstream(STRATEGY_FILE)?;
    Ok(StrategyModel::from_json(&text)?)
}

/// Labels every complete profile with its nearest player type and a
/// tight/loose–aggressive/passive style readout.
pub fn cmd_classify(cfg: &PipelineConfig, out: &Path) -> Result<Vec<String>, PipelineError> {
    let mut stage = Stage::new("classify", cfg, out)?;
    let doc = load_profiles(&mut stage)?;
    let strategy = load_strategy(&mut stage)?;
    for (street, want, got) in [
        ("pre-flop", &strategy.pre_model_id, &doc.pre_model_id),
        ("post-flop", &strategy.post_model_id, &doc.post_model_id),
    ] {
        if want != got {
            return Err(PipelineError::ModelMismatch(format!(
                "strategy model was trained against a different {street} action model"
            )));
        }
    }
    let mut csv = String::from("player,cluster,distance,style\n");
    let mut classified = 0u64;
    let mut per_cluster = vec![0u64; strategy.k()];
    for p in doc.profiles.iter().filter(|p| p.is_complete()) {
        let (cluster, distance) = profile::classify_player(p, &strategy)?;
        let style = profile::sklansky_classify(p);
        csv.push_str(&format!(
            "{},{cluster},{distance:.6},{}\n",
            p.player_id,
            style.describe()
        ));
        per_cluster[cluster] += 1;
        classified += 1;
    }
    let path = stage.write_output("classifications.csv", &csv)?;
    stage.count("classified", classified);
    for (c, n) in per_cluster.iter().enumerate() {
        stage.count(&format!("cluster_{c}"), *n);
    }
    stage.finish(vec![format!(
        "{classified} players classified into {} types ({})",
        strategy.k(),
        path.display()
    )])
}

/// Predicts the next-action distribution for every player type and street.
pub fn cmd_predict(cfg: &PipelineConfig, out: &Path) -> Result<Vec<String>, PipelineError> {
    let mut stage = Stage::new("predict", cfg, out)?;
    let strategy = load_strategy(&mut stage)?;
    let pre_model = load_mixture(&mut stage, PRE_MODEL_FILE)?;
    let post_model = load_mixture(&mut stage, POST_MODEL_FILE)?;
    let mut csv = String::from("cluster,street,p_call,p_raise,expected_bet_fraction\n");
    for cluster in 0..strategy.k() {
        for (street, model, label) in [
            (StreetGroup::PreFlop, &pre_model, "PreFlop"),
            (StreetGroup::PostFlop, &post_model, "PostFlop"),
        ] {
            let p = profile::predict_action(cluster, &strategy, model, street)?;
            csv.push_str(&format!(
                "{cluster},{label},{:.6},{:.6},{:.6}\n",
                p.p_call, p.p_raise, p.expected_bet_fraction
            ));
        }
    }
    let path = stage.write_output("predictions.csv", &csv)?;
    stage.count("rows", 2 * strategy.k() as u64);
    stage.finish(vec![format!("{} predictions ({})", 2 * strategy.k(), path.display())])
}

/// Emits centroid tables for whichever models exist (in `models_dir` when
/// given, else the output directory) and histograms when an extraction does.
pub fn cmd_report(
    cfg: &PipelineConfig,
    out: &Path,
    models_dir: Option<&Path>,
) -> Result<Vec<String>, PipelineError> {
    let mut stage = Stage::new("report", cfg, out)?;
    let models = models_dir.unwrap_or(out);
    let mut lines = Vec::new();

    for (input, output, label) in [
        (PRE_MODEL_FILE, "preflop_centroids.csv", "preflop"),
        (POST_MODEL_FILE, "postflop_centroids.csv", "postflop"),
    ] {
        let path = models.join(input);
        if !path.is_file() {
            continue;
        }
        let text = stage.read_input(&path)?;
        let model = MixtureModel::from_json(&text)?;
        let table = report::centroid_table(&model, cfg.dominance_threshold);
        let written = stage.write_output(output, &table)?;
        stage.model_id(label, &model.model_id());
        lines.push(format!("{}", written.display()));
    }
    let strategy_path = models.join(STRATEGY_FILE);
    if strategy_path.is_file() {
        let text = stage.read_input(&strategy_path)?;
        let strategy = StrategyModel::from_json(&text)?;
        let table = report::centroid_table(&strategy.mixture, cfg.dominance_threshold);
        let written = stage.write_output("strategy_centroids.csv", &table)?;
        stage.model_id("strategy", &strategy.model_id());
        lines.push(format!("{}", written.display()));
    }
    if out.join(EXTRACT_FILE).is_file() {
        let extraction = load_extraction(&mut stage)?;
        for (name, ds) in [
            ("preflop_histograms.csv", &extraction.preflop.dataset),
            ("postflop_histograms.csv", &extraction.postflop.dataset),
        ] {
            let written =
                stage.write_output(name, &report::histogram_csv(ds, cfg.histogram_bins))?;
            lines.push(format!("{}", written.display()));
        }
    }
    if lines.is_empty() {
        return Err(PipelineError::MissingUpstream(models.join(PRE_MODEL_FILE)));
    }
    stage.finish(lines)
}

/// Arguments for the bundled corpus generator.
#[derive(Debug, Clone)]
pub struct SynthArgs {
    pub hands: usize,
    pub players_per_archetype: usize,
    pub seats_per_hand: usize,
    pub seed: u64,
}

impl Default for SynthArgs {
    fn default() -> SynthArgs {
        let d = SynthConfig::default();
        SynthArgs {
            hands: d.hands,
            players_per_archetype: d.players_per_archetype,
            seats_per_hand: d.seats_per_hand,
            seed: d.seed,
        }
    }
}

/// Generates a scripted-archetype corpus and writes it as raw log text.
pub fn cmd_synth(
    cfg: &PipelineConfig,
    args: &SynthArgs,
    out_file: &Path,
) -> Result<Vec<String>, PipelineError> {
    let synth_cfg = SynthConfig {
        hands: args.hands,
        players_per_archetype: args.players_per_archetype,
        seats_per_hand: args.seats_per_hand,
        seed: args.seed,
        ..SynthConfig::default()
    };
    let text = synth::generate(&synth_cfg);
    let dir = out_file.parent().filter(|p| !p.as_os_str().is_empty());
    let mut stage = Stage::new("synth", cfg, dir.unwrap_or(Path::new(".")))?;
    fs::write(out_file, &text)
        .map_err(|e| PipelineError::Data(format!("cannot write {}: {e}", out_file.display())))?;
    stage.manifest.outputs.push(FileDigest {
        path: out_file.display().to_string(),
        sha256: sha256_hex(text.as_bytes()),
    });
    stage.count("hands", args.hands as u64);
    stage.count("players", (args.players_per_archetype * 3) as u64);
    stage.count("synth_seed", args.seed);
    stage.finish(vec![format!(
        "{} hands ({} bytes) written to {}",
        args.hands,
        text.len(),
        out_file.display()
    )])
}

/// Writes the published-table centroid models as loadable model files.
pub fn cmd_fixtures(cfg: &PipelineConfig, out: &Path) -> Result<Vec<String>, PipelineError> {
    let mut stage = Stage::new("fixtures", cfg, out)?;
    let pre = fixtures::preflop_centroids();
    let post = fixtures::postflop_centroids();
    let strategy = fixtures::strategy_centroids();
    let mut lines = Vec::new();
    for (name, text, label, id) in [
        (PRE_MODEL_FILE, pre.to_json(), "preflop", pre.model_id()),
        (POST_MODEL_FILE, post.to_json(), "postflop", post.model_id()),
        (STRATEGY_FILE, strategy.to_json(), "strategy", strategy.model_id()),
    ] {
        let path = stage.write_output(name, &text)?;
        stage.model_id(label, &id);
        lines.push(format!("{} ({label} {})", path.display(), &id[..12]));
    }
    stage.finish(lines)
}

// A tiny re-export so the binary can print money in diagnostics without
// reaching into the module tree.
pub use money::Cents;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_overrides_beat_the_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.toml");
        fs::write(&path, "seed = 9\nfolds = 4\n").unwrap();
        let ov = Overrides { folds: Some(6), ..Overrides::default() };
        let cfg = PipelineConfig::resolve(Some(&path), &ov).unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.folds, 6);
        assert_eq!(cfg.k_max, PipelineConfig::default().k_max);
    }

    #[test]
    fn bad_config_values_are_usage_errors() {
        let ov = Overrides { folds: Some(1), ..Overrides::default() };
        let err = PipelineConfig::resolve(None, &ov).unwrap_err();
        assert_eq!(err.exit_code(), 1);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.toml");
        fs::write(&path, "not_a_known_key = 1\n").unwrap();
        let err = PipelineConfig::resolve(Some(&path), &Overrides::default()).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn stage_seeds_are_distinct_per_purpose() {
        let cfg = PipelineConfig::default();
        let seeds = [cfg.equity().seed, cfg.action_em().seed, cfg.strategy_em().seed];
        assert_ne!(seeds[0], seeds[1]);
        assert_ne!(seeds[1], seeds[2]);
        assert_ne!(seeds[0], seeds[2]);
    }

    #[test]
    fn manifest_digests_track_content() {
        assert_eq!(sha256_hex(b"a"), sha256_hex(b"a"));
        assert_ne!(sha256_hex(b"a"), sha256_hex(b"b"));
    }
}
