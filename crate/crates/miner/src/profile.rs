//! Per-player strategy profiles.
//!
//! A profile is the player's relative frequency over the action clusters of
//! each street model, plus raw fold/aggression statistics. Profiles with both
//! street vectors feed a second clustering that groups players into strategy
//! types; any profile can then be classified against that model, and the
//! model predicts an opponent's next action as a frequency-weighted blend of
//! the action clusters it favors.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::data::{Attr, AttrKind, Dataset, Value};
use crate::em::{
    self, assign_nearest, AttrParams, ClusterAssignment, Coord, EmConfig, EmError, MixtureModel,
};
use crate::features::{ActionTally, FeatureError, RowMeta, StreetGroup};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("need at least 2 complete profiles, got {0}")]
    TooFewProfiles(usize),
    #[error("profile {0:?} is missing a street vector")]
    ProfileIncomplete(String),
    #[error("model mismatch: {0}")]
    ModelMismatch(String),
    #[error(transparent)]
    Em(#[from] EmError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlayerProfile {
    pub player_id: String,
    /// Frequency over pre-flop action clusters; absent below `min_actions`.
    pub pre_freq: Option<Vec<f64>>,
    pub post_freq: Option<Vec<f64>>,
    pub n_pre_actions: usize,
    pub n_post_actions: usize,
    /// Over every observed decision, folds included.
    pub fold_rate: f64,
    /// Bets plus raises per call; `None` when the player never called.
    pub aggression_factor: Option<f64>,
}

impl PlayerProfile {
    pub fn is_complete(&self) -> bool {
        self.pre_freq.is_some() && self.post_freq.is_some()
    }
}

/// Per-player action counts in each cluster of one street model.
pub fn cluster_counts(
    meta: &[RowMeta],
    assignments: &[ClusterAssignment],
    k: usize,
) -> BTreeMap<String, Vec<usize>> {
    assert_eq!(meta.len(), assignments.len(), "one assignment per row");
    let mut counts: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for (m, a) in meta.iter().zip(assignments) {
        counts.entry(m.player_id.clone()).or_insert_with(|| vec![0; k])[a.cluster] += 1;
    }
    counts
}

fn to_freq(counts: &[usize], min_actions: usize) -> (Option<Vec<f64>>, usize) {
    let total: usize = counts.iter().sum();
    if total < min_actions {
        return (None, total);
    }
    (Some(counts.iter().map(|&c| c as f64 / total as f64).collect()), total)
}

/// Builds one profile per player seen in the tallies. Street vectors appear
/// only when the player has `min_actions` clustered rows on that street;
/// fold rate and aggression always come from the raw tallies.
pub fn build_profiles(
    pre_counts: &BTreeMap<String, Vec<usize>>,
    post_counts: &BTreeMap<String, Vec<usize>>,
    tallies: &BTreeMap<String, ActionTally>,
    min_actions: usize,
) -> Vec<PlayerProfile> {
    tallies
        .iter()
        .map(|(player, tally)| {
            let empty = Vec::new();
            let (pre_freq, n_pre) =
                to_freq(pre_counts.get(player).unwrap_or(&empty), min_actions.max(1));
            let (post_freq, n_post) =
                to_freq(post_counts.get(player).unwrap_or(&empty), min_actions.max(1));
            PlayerProfile {
                player_id: player.clone(),
                pre_freq,
                post_freq,
                n_pre_actions: n_pre,
                n_post_actions: n_post,
                fold_rate: tally.fold_rate(),
                aggression_factor: tally.aggression_factor(),
            }
        })
        .collect()
}

/// Names of the strategy attributes for given street model sizes:
/// `Pre_c0..`, then `Post_c0..`.
pub fn strategy_attr_names(pre_k: usize, post_k: usize) -> Vec<String> {
    (0..pre_k)
        .map(|i| format!("Pre_c{i}"))
        .chain((0..post_k).map(|i| format!("Post_c{i}")))
        .collect()
}

/// Dataset of concatenated frequency vectors over the complete profiles.
/// The player id stays out of the data (it is a label, not a feature) and is
/// returned alongside, row-aligned.
pub fn strategy_dataset(
    profiles: &[PlayerProfile],
    pre_k: usize,
    post_k: usize,
) -> Result<(Dataset, Vec<String>), ProfileError> {
    let attrs: Vec<Attr> =
        strategy_attr_names(pre_k, post_k).into_iter().map(Attr::numeric).collect();
    let mut ds = Dataset::new("player_strategies", attrs)
        .expect("generated attribute names are unique");
    let mut players = Vec::new();
    for p in profiles.iter().filter(|p| p.is_complete()) {
        let pre = p.pre_freq.as_ref().unwrap();
        let post = p.post_freq.as_ref().unwrap();
        if pre.len() != pre_k || post.len() != post_k {
            return Err(ProfileError::ModelMismatch(format!(
                "profile {:?} has vector sizes {}/{}, models have {}/{}",
                p.player_id,
                pre.len(),
                post.len(),
                pre_k,
                post_k
            )));
        }
        ds.push_row(pre.iter().chain(post).map(|&x| Value::Num(x)).collect())
            .expect("frequencies are finite");
        players.push(p.player_id.clone());
    }
    Ok((ds, players))
}

/// A mixture over strategy vectors, pinned to the action models it was built
/// from so later predictions cannot silently mix models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyModel {
    pub mixture: MixtureModel,
    pub removed_attributes: Vec<String>,
    pub pre_k: usize,
    pub post_k: usize,
    pub pre_model_id: String,
    pub post_model_id: String,
}

impl StrategyModel {
    pub fn k(&self) -> usize {
        self.mixture.k()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn model_id(&self) -> String {
        let compact = serde_json::to_string(self).expect("model serializes");
        let mut hasher = Sha256::new();
        hasher.update(compact.as_bytes());
        hex::encode(hasher.finalize())
    }

    pub fn from_json(text: &str) -> Result<StrategyModel, ProfileError> {
        let model: StrategyModel = serde_json::from_str(text)
            .map_err(|e| ProfileError::Em(EmError::Persistence(e.to_string())))?;
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<(), ProfileError> {
        self.mixture.validate()?;
        let names = strategy_attr_names(self.pre_k, self.post_k);
        for attr in &self.mixture.schema {
            if !names.contains(&attr.name) || attr.kind != AttrKind::Numeric {
                return Err(ProfileError::ModelMismatch(format!(
                    "unexpected strategy attribute {:?}",
                    attr.name
                )));
            }
        }
        for removed in &self.removed_attributes {
            if !names.contains(removed) {
                return Err(ProfileError::ModelMismatch(format!(
                    "removed attribute {removed:?} is not a strategy attribute"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileConfig {
    pub min_actions: usize,
    pub min_variance: f64,
    pub max_dominance: f64,
    pub em: EmConfig,
}

impl Default for ProfileConfig {
    fn default() -> ProfileConfig {
        ProfileConfig {
            min_actions: 20,
            min_variance: 1e-4,
            max_dominance: 0.99,
            em: EmConfig::default(),
        }
    }
}

/// Clusters complete profiles into strategy types: concatenated frequency
/// vectors pass through the useless-attribute filter, then automatic-k EM.
pub fn cluster_players(
    profiles: &[PlayerProfile],
    pre_model: &MixtureModel,
    post_model: &MixtureModel,
    cfg: &ProfileConfig,
) -> Result<StrategyModel, ProfileError> {
    let complete = profiles.iter().filter(|p| p.is_complete()).count();
    if complete < 2 {
        return Err(ProfileError::TooFewProfiles(complete));
    }
    let (full, _players) = strategy_dataset(profiles, pre_model.k(), post_model.k())?;
    let (filtered, removed) =
        crate::features::remove_useless(&full, cfg.min_variance, cfg.max_dominance)?;
    let (_k, mixture) = em::select_k(&filtered, &cfg.em)?;
    Ok(StrategyModel {
        mixture,
        removed_attributes: removed,
        pre_k: pre_model.k(),
        post_k: post_model.k(),
        pre_model_id: pre_model.model_id(),
        post_model_id: post_model.model_id(),
    })
}

/// Coordinates of a profile in the (possibly filtered) strategy schema.
fn profile_coords(
    profile: &PlayerProfile,
    model: &StrategyModel,
) -> Result<Vec<Coord>, ProfileError> {
    let (Some(pre), Some(post)) = (&profile.pre_freq, &profile.post_freq) else {
        return Err(ProfileError::ProfileIncomplete(profile.player_id.clone()));
    };
    if pre.len() != model.pre_k || post.len() != model.post_k {
        return Err(ProfileError::ModelMismatch(format!(
            "profile {:?} has vector sizes {}/{}, model expects {}/{}",
            profile.player_id,
            pre.len(),
            post.len(),
            model.pre_k,
            model.post_k
        )));
    }
    let names = strategy_attr_names(model.pre_k, model.post_k);
    let full: Vec<f64> = pre.iter().chain(post).copied().collect();
    model
        .mixture
        .schema
        .iter()
        .map(|attr| {
            let idx = names
                .iter()
                .position(|n| n == &attr.name)
                .ok_or_else(|| ProfileError::ModelMismatch(attr.name.clone()))?;
            Ok(Coord::Num(full[idx]))
        })
        .collect()
}

/// Nearest strategy cluster for a complete profile.
pub fn classify_player(
    profile: &PlayerProfile,
    model: &StrategyModel,
) -> Result<(usize, f64), ProfileError> {
    let coords = profile_coords(profile, model)?;
    Ok(assign_nearest(&coords, &model.mixture)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionPrediction {
    pub p_call: f64,
    pub p_raise: f64,
    /// Expected wager as a fraction of stack, blended the same way.
    pub expected_bet_fraction: f64,
}

/// The strategy cluster's frequency centroid over one street's action
/// clusters. Attributes dropped by the useless filter count as frequency 0;
/// the vector renormalizes so the blend stays a distribution.
fn street_frequencies(
    model: &StrategyModel,
    cluster: usize,
    street: StreetGroup,
) -> Vec<f64> {
    let (prefix, k) = match street {
        StreetGroup::PreFlop => ("Pre_c", model.pre_k),
        StreetGroup::PostFlop => ("Post_c", model.post_k),
    };
    let mut freq = vec![0.0; k];
    for (attr, params) in model.mixture.schema.iter().zip(&model.mixture.clusters[cluster]) {
        if let Some(idx) = attr.name.strip_prefix(prefix).and_then(|s| s.parse::<usize>().ok()) {
            if let AttrParams::Gaussian { mean, .. } = params {
                freq[idx] = mean.max(0.0);
            }
        }
    }
    let total: f64 = freq.iter().sum();
    if total > 0.0 {
        for f in &mut freq {
            *f /= total;
        }
    } else {
        freq = vec![1.0 / k as f64; k];
    }
    freq
}

fn action_model_stats(model: &MixtureModel) -> Result<(Vec<f64>, Vec<f64>), ProfileError> {
    let action_j = model
        .schema
        .iter()
        .position(|a| a.name == "action")
        .ok_or_else(|| ProfileError::ModelMismatch("action model lacks 'action'".into()))?;
    let raise_v = match &model.schema[action_j].kind {
        AttrKind::Nominal(domain) => domain
            .iter()
            .position(|v| v == "Raise")
            .ok_or_else(|| ProfileError::ModelMismatch("'action' lacks a Raise value".into()))?,
        AttrKind::Numeric => {
            return Err(ProfileError::ModelMismatch("'action' is not nominal".into()))
        }
    };
    let bet_j = model
        .schema
        .iter()
        .position(|a| a.name == "betted_money")
        .ok_or_else(|| ProfileError::ModelMismatch("action model lacks 'betted_money'".into()))?;
    let mut p_raise = Vec::with_capacity(model.k());
    let mut bet_mean = Vec::with_capacity(model.k());
    for cluster in &model.clusters {
        match &cluster[action_j] {
            AttrParams::Multinomial { probs } => p_raise.push(probs[raise_v]),
            _ => return Err(ProfileError::ModelMismatch("'action' params not nominal".into())),
        }
        match &cluster[bet_j] {
            AttrParams::Gaussian { mean, .. } => bet_mean.push(mean.clamp(0.0, 1.0)),
            _ => return Err(ProfileError::ModelMismatch("'betted_money' not numeric".into())),
        }
    }
    Ok((p_raise, bet_mean))
}

/// Predicts the action distribution for a strategy cluster on one street by
/// mixing the street's action-cluster parameters with the cluster's
/// frequencies: a player who lives in raising clusters predicts as a raiser.
pub fn predict_action(
    cluster: usize,
    strategy: &StrategyModel,
    action_model: &MixtureModel,
    street: StreetGroup,
) -> Result<ActionPrediction, ProfileError> {
    let (expected_id, k) = match street {
        StreetGroup::PreFlop => (&strategy.pre_model_id, strategy.pre_k),
        StreetGroup::PostFlop => (&strategy.post_model_id, strategy.post_k),
    };
    let actual = action_model.model_id();
    if &actual != expected_id {
        return Err(ProfileError::ModelMismatch(format!(
            "strategy model was built against action model {}..., got {}...",
            &expected_id[..12.min(expected_id.len())],
            &actual[..12]
        )));
    }
    if action_model.k() != k || cluster >= strategy.k() {
        return Err(ProfileError::ModelMismatch(
            "cluster counts disagree with the strategy model".into(),
        ));
    }
    let freq = street_frequencies(strategy, cluster, street);
    let (p_raise_c, bet_c) = action_model_stats(action_model)?;
    let p_raise: f64 = freq.iter().zip(&p_raise_c).map(|(f, p)| f * p).sum();
    let bet: f64 = freq.iter().zip(&bet_c).map(|(f, b)| f * b).sum();
    Ok(ActionPrediction {
        p_call: 1.0 - p_raise,
        p_raise,
        expected_bet_fraction: bet.clamp(0.0, 1.0),
    })
}

/// Loose/tight × passive/aggressive label in the style of hand-book player
/// taxonomies: tight folds 72% or more of decisions, aggressive bets and
/// raises more often than it calls. A player who never called has infinite
/// aggression: reported aggressive, with the flag set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StyleLabel {
    pub tight: bool,
    pub aggressive: bool,
    /// True when the aggression factor was undefined (no calls).
    pub af_undefined: bool,
}

impl StyleLabel {
    pub fn describe(&self) -> String {
        format!(
            "{}-{}{}",
            if self.tight { "tight" } else { "loose" },
            if self.aggressive { "aggressive" } else { "passive" },
            if self.af_undefined { " (AF undefined)" } else { "" },
        )
    }
}

pub fn sklansky_classify(profile: &PlayerProfile) -> StyleLabel {
    let tight = profile.fold_rate >= 0.72;
    let (aggressive, af_undefined) = match profile.aggression_factor {
        Some(af) => (af > 1.0, false),
        None => (true, true),
    };
    StyleLabel { tight, aggressive, af_undefined }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::em::FitLog;
    use crate::handlog::Street;
    use crate::replay::ActionKind;

    fn meta(player: &str) -> RowMeta {
        RowMeta {
            player_id: player.into(),
            stage_id: 1,
            decision_index: 0,
            street: Street::PreFlop,
            raw_kind: ActionKind::Call,
        }
    }

    fn assignment(row: usize, cluster: usize) -> ClusterAssignment {
        ClusterAssignment { row, cluster, distance: 0.0 }
    }

    #[test]
    fn frequencies_are_exact_ratios() {
        let meta: Vec<RowMeta> = ["a", "a", "a", "a", "b"].iter().map(|p| meta(p)).collect();
        let assigns = vec![
            assignment(0, 0),
            assignment(1, 2),
            assignment(2, 0),
            assignment(3, 2),
            assignment(4, 5),
        ];
        let counts = cluster_counts(&meta, &assigns, 6);
        assert_eq!(counts["a"], vec![2, 0, 2, 0, 0, 0]);

        let mut tallies = BTreeMap::new();
        tallies.insert("a".to_string(), ActionTally { calls: 4, ..Default::default() });
        tallies.insert("b".to_string(), ActionTally { calls: 1, ..Default::default() });
        let profiles = build_profiles(&counts, &BTreeMap::new(), &tallies, 1);
        let a = &profiles[0];
        assert_eq!(a.player_id, "a");
        assert_eq!(a.pre_freq, Some(vec![0.5, 0.0, 0.5, 0.0, 0.0, 0.0]));
        assert_eq!(a.n_pre_actions, 4);
        assert!(a.post_freq.is_none(), "no post rows at all");
        let sum: f64 = a.pre_freq.as_ref().unwrap().iter().sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn min_actions_gates_the_vectors() {
        let meta: Vec<RowMeta> = (0..3).map(|_| meta("thin")).collect();
        let assigns = (0..3).map(|i| assignment(i, 0)).collect::<Vec<_>>();
        let counts = cluster_counts(&meta, &assigns, 2);
        let mut tallies = BTreeMap::new();
        tallies.insert("thin".to_string(), ActionTally { calls: 3, ..Default::default() });
        let profiles = build_profiles(&counts, &BTreeMap::new(), &tallies, 5);
        assert!(profiles[0].pre_freq.is_none());
        assert_eq!(profiles[0].n_pre_actions, 3);
        assert!(!profiles[0].is_complete());
    }

    #[test]
    fn scaling_all_counts_leaves_the_profile_unchanged() {
        let counts_1: BTreeMap<String, Vec<usize>> =
            [("p".to_string(), vec![2, 1, 1])].into_iter().collect();
        let counts_3: BTreeMap<String, Vec<usize>> =
            [("p".to_string(), vec![6, 3, 3])].into_iter().collect();
        let mut tallies = BTreeMap::new();
        tallies.insert("p".to_string(), ActionTally { calls: 4, raises: 4, ..Default::default() });
        let a = build_profiles(&counts_1, &counts_1, &tallies, 1);
        let b = build_profiles(&counts_3, &counts_3, &tallies, 1);
        assert_eq!(a[0].pre_freq, b[0].pre_freq);
        assert_eq!(a[0].post_freq, b[0].post_freq);
    }

    /// Action-model stand-in with chosen raise probabilities and bet means.
    fn action_model(p_raise: &[f64], bet_mean: &[f64]) -> MixtureModel {
        let k = p_raise.len();
        MixtureModel {
            schema: vec![
                Attr::numeric("win_prob"),
                Attr::nominal("position", &["Early", "Late"]),
                Attr::numeric("possible_earnings"),
                Attr::nominal("action", &["Call", "Raise"]),
                Attr::numeric("min_bet"),
                Attr::numeric("betted_money"),
            ],
            weights: vec![1.0 / k as f64; k],
            clusters: (0..k)
                .map(|c| {
                    vec![
                        AttrParams::Gaussian { mean: 0.5, variance: 0.01 },
                        AttrParams::Multinomial { probs: vec![0.5, 0.5] },
                        AttrParams::Gaussian { mean: 0.1, variance: 0.01 },
                        AttrParams::Multinomial {
                            probs: vec![1.0 - p_raise[c], p_raise[c]],
                        },
                        AttrParams::Gaussian { mean: 0.1, variance: 0.01 },
                        AttrParams::Gaussian { mean: bet_mean[c], variance: 0.01 },
                    ]
                })
                .collect(),
            fit_log: FitLog {
                seed: 0,
                iterations: 1,
                log_likelihood: 0.0,
                restarts: 0,
                trace: vec![0.0],
            },
        }
    }

    fn profile(id: &str, pre: Vec<f64>, post: Vec<f64>) -> PlayerProfile {
        PlayerProfile {
            player_id: id.into(),
            pre_freq: Some(pre),
            post_freq: Some(post),
            n_pre_actions: 50,
            n_post_actions: 50,
            fold_rate: 0.5,
            aggression_factor: Some(1.0),
        }
    }

    /// Smooth jitter in roughly [-0.045, 0.045], different for every tag.
    fn jitter(tag: u64) -> f64 {
        let u = |t: u64| crate::util::mix64(t) as f64 / u64::MAX as f64;
        (u(tag) + u(tag ^ 0xABCD) + u(tag.rotate_left(17)) - 1.5) * 0.03
    }

    fn two_archetype_profiles() -> Vec<PlayerProfile> {
        let mut profiles = Vec::new();
        for i in 0..20u64 {
            // Noise moves between Pre_c0 and Pre_c2 so Pre_c1 stays constant
            // (it must fall to the useless-attribute filter) and sums hold.
            let e = jitter(2 * i);
            let f = jitter(2 * i + 1);
            profiles.push(profile(
                &format!("rock{i}"),
                vec![0.8 - e, 0.1, 0.1 + e],
                vec![0.9 - f, 0.1 + f],
            ));
            let e = jitter(1000 + 2 * i);
            let f = jitter(1001 + 2 * i);
            profiles.push(profile(
                &format!("wild{i}"),
                vec![0.1 + e, 0.1, 0.8 - e],
                vec![0.2 + f, 0.8 - f],
            ));
        }
        profiles
    }

    fn models_3_2() -> (MixtureModel, MixtureModel) {
        (
            action_model(&[0.1, 0.5, 0.9], &[0.05, 0.2, 0.6]),
            action_model(&[0.2, 0.8], &[0.1, 0.5]),
        )
    }

    fn strategy_cfg() -> ProfileConfig {
        ProfileConfig {
            min_actions: 20,
            min_variance: 1e-4,
            max_dominance: 0.99,
            em: EmConfig { seed: 5, folds: 5, ..EmConfig::default() },
        }
    }

    #[test]
    fn players_cluster_by_archetype_and_centroids_classify_to_themselves() {
        let profiles = two_archetype_profiles();
        let (pre_m, post_m) = models_3_2();
        let strategy = cluster_players(&profiles, &pre_m, &post_m, &strategy_cfg()).unwrap();
        assert_eq!(strategy.k(), 2, "two planted archetypes");
        // Pre_c1 is constant 0.1 across players: filtered out.
        assert_eq!(strategy.removed_attributes, vec!["Pre_c1".to_string()]);

        // All rocks land together, all wilds land together, apart.
        let mut rock_cluster = None;
        for p in &profiles {
            let (c, _) = classify_player(p, &strategy).unwrap();
            if p.player_id.starts_with("rock") {
                *rock_cluster.get_or_insert(c) = c;
                assert_eq!(Some(c), rock_cluster);
            } else {
                assert_ne!(Some(c), rock_cluster);
            }
        }

        // A profile equal to a centroid classifies to it at distance zero.
        let names = strategy_attr_names(strategy.pre_k, strategy.post_k);
        for c in 0..strategy.k() {
            let mut full = vec![0.0; names.len()];
            for (attr, params) in
                strategy.mixture.schema.iter().zip(&strategy.mixture.clusters[c])
            {
                let AttrParams::Gaussian { mean, .. } = params else { panic!() };
                full[names.iter().position(|n| n == &attr.name).unwrap()] = *mean;
            }
            let p = profile("centroid", full[..3].to_vec(), full[3..].to_vec());
            let (got, d) = classify_player(&p, &strategy).unwrap();
            assert_eq!(got, c);
            assert_eq!(d, 0.0);
        }

        // Classification ignores profile list order.
        let mut reversed = profiles.clone();
        reversed.reverse();
        for p in &reversed {
            let direct = classify_player(p, &strategy).unwrap();
            assert_eq!(direct, classify_player(p, &strategy).unwrap());
        }
    }

    #[test]
    fn incomplete_profiles_are_rejected_for_classification() {
        let profiles = two_archetype_profiles();
        let (pre_m, post_m) = models_3_2();
        let strategy = cluster_players(&profiles, &pre_m, &post_m, &strategy_cfg()).unwrap();
        let broken = PlayerProfile { post_freq: None, ..profiles[0].clone() };
        assert!(matches!(
            classify_player(&broken, &strategy),
            Err(ProfileError::ProfileIncomplete(_))
        ));
        let two: Vec<PlayerProfile> = profiles.into_iter().map(|p| PlayerProfile {
            pre_freq: None,
            ..p
        }).collect();
        assert_eq!(
            cluster_players(&two, &pre_m, &post_m, &strategy_cfg()),
            Err(ProfileError::TooFewProfiles(0))
        );
    }

    #[test]
    fn predictions_blend_cluster_frequencies() {
        let (pre_m, post_m) = models_3_2();
        // Hand-built strategy model over the full attribute set.
        let names = strategy_attr_names(3, 2);
        let schema: Vec<Attr> = names.iter().map(|n| Attr::numeric(n.clone())).collect();
        let mk = |pre: [f64; 3], post: [f64; 2]| -> Vec<AttrParams> {
            pre.iter()
                .chain(post.iter())
                .map(|&m| AttrParams::Gaussian { mean: m, variance: 0.01 })
                .collect()
        };
        let strategy = StrategyModel {
            mixture: MixtureModel {
                schema,
                weights: vec![0.5, 0.5],
                clusters: vec![
                    mk([0.0, 0.0, 1.0], [0.0, 1.0]), // lives in the raisiest clusters
                    mk([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], [0.5, 0.5]), // uniform
                ],
                fit_log: FitLog {
                    seed: 0,
                    iterations: 1,
                    log_likelihood: 0.0,
                    restarts: 0,
                    trace: vec![0.0],
                },
            },
            removed_attributes: vec![],
            pre_k: 3,
            post_k: 2,
            pre_model_id: pre_m.model_id(),
            post_model_id: post_m.model_id(),
        };
        strategy.validate().unwrap();

        let p = predict_action(0, &strategy, &pre_m, StreetGroup::PreFlop).unwrap();
        assert!((p.p_raise - 0.9).abs() < 1e-12, "concentrated on the 0.9 cluster");
        assert!((p.p_call + p.p_raise - 1.0).abs() < 1e-12);
        assert!((p.expected_bet_fraction - 0.6).abs() < 1e-12);

        let u = predict_action(1, &strategy, &pre_m, StreetGroup::PreFlop).unwrap();
        assert!((u.p_raise - (0.1 + 0.5 + 0.9) / 3.0).abs() < 1e-12, "uniform average");

        let post = predict_action(0, &strategy, &post_m, StreetGroup::PostFlop).unwrap();
        assert!((post.p_raise - 0.8).abs() < 1e-12);

        // Using the wrong action model is detected via the stored id.
        assert!(matches!(
            predict_action(0, &strategy, &post_m, StreetGroup::PreFlop),
            Err(ProfileError::ModelMismatch(_))
        ));
    }

    #[test]
    fn style_labels_follow_the_thresholds() {
        let base = PlayerProfile {
            player_id: "x".into(),
            pre_freq: None,
            post_freq: None,
            n_pre_actions: 0,
            n_post_actions: 0,
            fold_rate: 0.80,
            aggression_factor: Some(2.0),
        };
        let l = sklansky_classify(&base);
        assert!(l.tight && l.aggressive && !l.af_undefined);
        assert_eq!(l.describe(), "tight-aggressive");

        let boundary = PlayerProfile { fold_rate: 0.72, ..base.clone() };
        assert!(sklansky_classify(&boundary).tight, "72% folds is already tight");
        let below = PlayerProfile { fold_rate: 0.7199, ..base.clone() };
        assert!(!sklansky_classify(&below).tight);

        // Direct arithmetic: 10 bets, 5 raises, 5 calls.
        let tally = ActionTally { bets: 10, raises: 5, calls: 5, ..Default::default() };
        assert_eq!(tally.aggression_factor(), Some(3.0));

        let never_calls = PlayerProfile { aggression_factor: None, ..base };
        let nl = sklansky_classify(&never_calls);
        assert!(nl.aggressive && nl.af_undefined);
        assert_eq!(nl.describe(), "tight-aggressive (AF undefined)");

        let passive = PlayerProfile {
            player_id: "y".into(),
            pre_freq: None,
            post_freq: None,
            n_pre_actions: 0,
            n_post_actions: 0,
            fold_rate: 0.3,
            aggression_factor: Some(1.0),
        };
        let pl = sklansky_classify(&passive);
        assert!(!pl.tight && !pl.aggressive, "AF of exactly 1 is not aggressive");
        assert_eq!(pl.describe(), "loose-passive");
    }
}
