//! Turns replayed decisions into normalized feature rows.
//!
//! Each showdown-revealed decision becomes one row of six features —
//! win_prob, position, possible_earnings, action, min_bet, betted_money —
//! every numeric expressed as a fraction of the actor's stack or probability,
//! so all values live in [0, 1]. Folds never become rows (there is nothing to
//! learn about an action that ends participation) but are tallied per player
//! for the fold-rate/aggression baseline. Rows split into a pre-flop and a
//! post-flop dataset.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{Attr, Dataset, Value};
use crate::equity::{self, EquityConfig};
use crate::handlog::Street;
use crate::replay::{position_label, ActionKind, DecisionRecord, Game, Position};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FeatureError {
    #[error("folds are discarded before simplification")]
    FoldNotAllowed,
    #[error("every attribute was filtered as useless")]
    AllAttributesRemoved,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StreetGroup {
    PreFlop,
    PostFlop,
}

impl From<Street> for StreetGroup {
    fn from(street: Street) -> StreetGroup {
        match street {
            Street::PreFlop => StreetGroup::PreFlop,
            _ => StreetGroup::PostFlop,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SimpleAction {
    Call,
    Raise,
}

/// Collapses the raw action alphabet to Call/Raise: a check is a call of
/// zero, a bet opens the raising, an all-in is an extreme raise.
pub fn simplify_action(kind: ActionKind) -> Result<SimpleAction, FeatureError> {
    match kind {
        ActionKind::Fold => Err(FeatureError::FoldNotAllowed),
        ActionKind::Check | ActionKind::Call => Ok(SimpleAction::Call),
        ActionKind::Bet | ActionKind::Raise | ActionKind::AllIn => Ok(SimpleAction::Raise),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionFeatures {
    pub player_id: String,
    pub street_group: StreetGroup,
    pub win_prob: f64,
    pub position: Position,
    pub possible_earnings: f64,
    pub action: SimpleAction,
    pub min_bet: f64,
    pub betted_money: f64,
}

impl ActionFeatures {
    pub fn to_row(&self) -> Vec<Value> {
        vec![
            Value::Num(self.win_prob),
            Value::Sym(match self.position {
                Position::Early => 0,
                Position::Late => 1,
            }),
            Value::Num(self.possible_earnings),
            Value::Sym(match self.action {
                SimpleAction::Call => 0,
                SimpleAction::Raise => 1,
            }),
            Value::Num(self.min_bet),
            Value::Num(self.betted_money),
        ]
    }
}

/// Schema of a plays dataset, in the fixed column order rows are written.
pub fn play_attrs() -> Vec<Attr> {
    vec![
        Attr::numeric("win_prob"),
        Attr::nominal("position", &["Early", "Late"]),
        Attr::numeric("possible_earnings"),
        Attr::nominal("action", &["Call", "Raise"]),
        Attr::numeric("min_bet"),
        Attr::numeric("betted_money"),
    ]
}

pub fn empty_play_dataset() -> Dataset {
    Dataset::new("poker_plays", play_attrs()).expect("static schema is valid")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SkipReason {
    Fold,
    MissingHoleCards,
    NoOpponents,
    ZeroStack,
    BoardMismatch,
    CardConflict,
    OvercallAmount,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Extracted {
    Row(ActionFeatures),
    Skip(SkipReason),
}

/// Where a row came from; kept alongside datasets so cluster assignments can
/// be folded back onto players and hands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowMeta {
    pub player_id: String,
    pub stage_id: u64,
    pub decision_index: usize,
    pub street: Street,
    pub raw_kind: ActionKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreetData {
    pub dataset: Dataset,
    pub meta: Vec<RowMeta>,
}

impl StreetData {
    fn empty() -> StreetData {
        StreetData { dataset: empty_play_dataset(), meta: Vec::new() }
    }
}

/// Raw per-player action counts over every replayed decision, folds included.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionTally {
    pub folds: u64,
    pub checks: u64,
    pub calls: u64,
    pub bets: u64,
    pub raises: u64,
    pub all_ins: u64,
}

impl ActionTally {
    pub fn record(&mut self, kind: ActionKind) {
        match kind {
            ActionKind::Fold => self.folds += 1,
            ActionKind::Check => self.checks += 1,
            ActionKind::Call => self.calls += 1,
            ActionKind::Bet => self.bets += 1,
            ActionKind::Raise => self.raises += 1,
            ActionKind::AllIn => self.all_ins += 1,
        }
    }

    pub fn decisions(&self) -> u64 {
        self.folds + self.checks + self.calls + self.bets + self.raises + self.all_ins
    }

    pub fn fold_rate(&self) -> f64 {
        let total = self.decisions();
        if total == 0 {
            0.0
        } else {
            self.folds as f64 / total as f64
        }
    }

    /// Bets plus raises per call; all-ins count as raises. `None` when the
    /// player never called.
    pub fn aggression_factor(&self) -> Option<f64> {
        if self.calls == 0 {
            None
        } else {
            Some((self.bets + self.raises + self.all_ins) as f64 / self.calls as f64)
        }
    }

    fn merge(&mut self, other: &ActionTally) {
        self.folds += other.folds;
        self.checks += other.checks;
        self.calls += other.calls;
        self.bets += other.bets;
        self.raises += other.raises;
        self.all_ins += other.all_ins;
    }
}

/// Row, skip and clamp counters for one extraction run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionStats {
    pub rows: u64,
    pub folds_skipped: u64,
    pub unrevealed_skipped: u64,
    pub no_opponents_skipped: u64,
    pub zero_stack_skipped: u64,
    pub board_mismatch_skipped: u64,
    pub card_conflict_skipped: u64,
    pub overcall_skipped: u64,
    pub possible_earnings_clamped: u64,
    pub min_bet_clamped: u64,
}

impl ExtractionStats {
    fn count_skip(&mut self, reason: SkipReason) {
        match reason {
            SkipReason::Fold => self.folds_skipped += 1,
            SkipReason::MissingHoleCards => self.unrevealed_skipped += 1,
            SkipReason::NoOpponents => self.no_opponents_skipped += 1,
            SkipReason::ZeroStack => self.zero_stack_skipped += 1,
            SkipReason::BoardMismatch => self.board_mismatch_skipped += 1,
            SkipReason::CardConflict => self.card_conflict_skipped += 1,
            SkipReason::OvercallAmount => self.overcall_skipped += 1,
        }
    }

    fn merge(&mut self, other: &ExtractionStats) {
        self.rows += other.rows;
        self.folds_skipped += other.folds_skipped;
        self.unrevealed_skipped += other.unrevealed_skipped;
        self.no_opponents_skipped += other.no_opponents_skipped;
        self.zero_stack_skipped += other.zero_stack_skipped;
        self.board_mismatch_skipped += other.board_mismatch_skipped;
        self.card_conflict_skipped += other.card_conflict_skipped;
        self.overcall_skipped += other.overcall_skipped;
        self.possible_earnings_clamped += other.possible_earnings_clamped;
        self.min_bet_clamped += other.min_bet_clamped;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extraction {
    pub preflop: StreetData,
    pub postflop: StreetData,
    pub tallies: BTreeMap<String, ActionTally>,
    pub stats: ExtractionStats,
}

/// Per-decision RNG seed, from the global seed, hand id and decision index.
pub use crate::util::derive_seed;

struct RowOutcome {
    extracted: Extracted,
    pe_clamped: bool,
    mb_clamped: bool,
}

fn extract_inner(record: &DecisionRecord, cfg: &EquityConfig, seed: u64) -> RowOutcome {
    let skip = |reason| RowOutcome {
        extracted: Extracted::Skip(reason),
        pe_clamped: false,
        mb_clamped: false,
    };
    let action = &record.action;
    if action.kind == ActionKind::Fold {
        return skip(SkipReason::Fold);
    }
    let Some(hole) = record.hole_cards else {
        return skip(SkipReason::MissingHoleCards);
    };
    let state = &record.state;
    let player = state
        .player(&action.actor)
        .expect("replay guarantees the actor is seated");
    debug_assert!(!player.folded, "replay guarantees the actor is active");
    if player.stack.is_zero() {
        return skip(SkipReason::ZeroStack);
    }
    let n_opponents = state.active_opponents(&action.actor);
    if n_opponents == 0 {
        return skip(SkipReason::NoOpponents);
    }
    let expected_board = match state.round {
        Street::PreFlop => 0,
        Street::Flop => 3,
        Street::Turn => 4,
        Street::River => 5,
    };
    if state.board.len() != expected_board {
        return skip(SkipReason::BoardMismatch);
    }

    let n_opponents = n_opponents as u32;
    let win_prob = match state.round {
        Street::PreFlop => {
            match equity::preflop_win_prob(hole, n_opponents, cfg.preflop_samples, seed) {
                Ok(p) => p,
                Err(_) => return skip(SkipReason::CardConflict),
            }
        }
        _ => {
            let outcome = equity::hand_strength(hole, &state.board, n_opponents).and_then(|hs| {
                let (ppot, npot) =
                    equity::hand_potential(hole, &state.board, cfg.flop_board_cap, seed)?;
                equity::win_probability(hs, ppot, npot)
            });
            match outcome {
                Ok(p) => p,
                Err(_) => return skip(SkipReason::CardConflict),
            }
        }
    };

    let stack = player.stack.as_f64();
    let to_call_net = state.to_call.saturating_sub(player.committed_this_round);
    let wagered = action.chips_wagered;
    // A "call" above the owed amount means replay state and log disagree.
    if action.kind == ActionKind::Call && wagered > to_call_net {
        return skip(SkipReason::OvercallAmount);
    }

    let pe_raw = state.pot.as_f64() / stack;
    let mb_raw = to_call_net.as_f64() / stack;
    let betted_money = wagered.as_f64() / stack;
    debug_assert!(betted_money <= 1.0, "replay caps wagers at the stack");

    let position = position_label(state, &action.actor)
        .expect("replay guarantees the actor is active");
    let simple = simplify_action(action.kind).expect("folds returned above");

    RowOutcome {
        extracted: Extracted::Row(ActionFeatures {
            player_id: action.actor.clone(),
            street_group: state.round.into(),
            win_prob,
            position,
            possible_earnings: pe_raw.min(1.0),
            action: simple,
            min_bet: mb_raw.min(1.0),
            betted_money,
        }),
        pe_clamped: pe_raw > 1.0,
        mb_clamped: mb_raw > 1.0,
    }
}

/// Extracts the feature row for one decision, or says why there is none.
pub fn extract_features(record: &DecisionRecord, cfg: &EquityConfig, seed: u64) -> Extracted {
    extract_inner(record, cfg, seed).extracted
}

/// Splits rows into the pre-flop and post-flop datasets, preserving order.
pub fn split_by_street(rows: Vec<(ActionFeatures, RowMeta)>) -> (StreetData, StreetData) {
    let mut pre = StreetData::empty();
    let mut post = StreetData::empty();
    for (features, meta) in rows {
        let side = match features.street_group {
            StreetGroup::PreFlop => &mut pre,
            StreetGroup::PostFlop => &mut post,
        };
        side.dataset
            .push_row(features.to_row())
            .expect("extracted rows match the static schema");
        side.meta.push(meta);
    }
    (pre, post)
}

/// Runs extraction over a corpus of replayed games. Per-game work runs in
/// parallel; results merge in input order, so output is deterministic for a
/// given seed.
pub fn extract_corpus(games: &[Game], cfg: &EquityConfig) -> Extraction {
    struct GameOut {
        rows: Vec<(ActionFeatures, RowMeta)>,
        tallies: BTreeMap<String, ActionTally>,
        stats: ExtractionStats,
    }

    let per_game: Vec<GameOut> = games
        .par_iter()
        .map(|game| {
            let mut out = GameOut {
                rows: Vec::new(),
                tallies: BTreeMap::new(),
                stats: ExtractionStats::default(),
            };
            for record in &game.decisions {
                out.tallies
                    .entry(record.action.actor.clone())
                    .or_default()
                    .record(record.action.kind);
                let seed = derive_seed(cfg.seed, game.stage_id, record.decision_index as u64);
                let outcome = extract_inner(record, cfg, seed);
                if outcome.pe_clamped {
                    out.stats.possible_earnings_clamped += 1;
                }
                if outcome.mb_clamped {
                    out.stats.min_bet_clamped += 1;
                }
                match outcome.extracted {
                    Extracted::Row(features) => {
                        out.stats.rows += 1;
                        out.rows.push((
                            features,
                            RowMeta {
                                player_id: record.action.actor.clone(),
                                stage_id: game.stage_id,
                                decision_index: record.decision_index,
                                street: record.state.round,
                                raw_kind: record.action.kind,
                            },
                        ));
                    }
                    Extracted::Skip(reason) => out.stats.count_skip(reason),
                }
            }
            out
        })
        .collect();

    let mut rows = Vec::new();
    let mut tallies: BTreeMap<String, ActionTally> = BTreeMap::new();
    let mut stats = ExtractionStats::default();
    for out in per_game {
        rows.extend(out.rows);
        for (player, tally) in &out.tallies {
            tallies.entry(player.clone()).or_default().merge(tally);
        }
        stats.merge(&out.stats);
    }
    let (preflop, postflop) = split_by_street(rows);
    Extraction { preflop, postflop, tallies, stats }
}

/// Drops near-constant attributes: numerics with population variance below
/// `min_variance`, nominals where one value exceeds `max_dominance` of rows.
/// Returns the surviving projection and the removed names.
pub fn remove_useless(
    ds: &Dataset,
    min_variance: f64,
    max_dominance: f64,
) -> Result<(Dataset, Vec<String>), FeatureError> {
    let mut keep = Vec::new();
    let mut removed = Vec::new();
    for (j, attr) in ds.attrs.iter().enumerate() {
        let useless = match &attr.kind {
            crate::data::AttrKind::Numeric => ds.numeric_variance(j) < min_variance,
            crate::data::AttrKind::Nominal(_) => ds.nominal_dominance(j) > max_dominance,
        };
        if useless {
            removed.push(attr.name.clone());
        } else {
            keep.push(j);
        }
    }
    if keep.is_empty() {
        return Err(FeatureError::AllAttributesRemoved);
    }
    Ok((ds.project(&keep), removed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::handlog::{parse_hand, SAMPLE_HAND};
    use crate::replay::replay;

    fn cfg() -> EquityConfig {
        EquityConfig { preflop_samples: 200, flop_board_cap: 200, seed: 7 }
    }

    fn games(texts: &[&str]) -> Vec<Game> {
        texts
            .iter()
            .map(|t| replay(&parse_hand(t).unwrap()).unwrap())
            .collect()
    }

    #[test]
    fn simplification_matches_the_two_value_scheme() {
        use ActionKind::*;
        assert_eq!(simplify_action(Check).unwrap(), SimpleAction::Call);
        assert_eq!(simplify_action(Call).unwrap(), SimpleAction::Call);
        assert_eq!(simplify_action(Bet).unwrap(), SimpleAction::Raise);
        assert_eq!(simplify_action(Raise).unwrap(), SimpleAction::Raise);
        assert_eq!(simplify_action(AllIn).unwrap(), SimpleAction::Raise);
        assert_eq!(simplify_action(Fold), Err(FeatureError::FoldNotAllowed));
    }

    #[test]
    fn unrevealed_hands_produce_no_rows() {
        let games = games(&[SAMPLE_HAND]);
        let ex = extract_corpus(&games, &cfg());
        assert_eq!(ex.stats.rows, 0);
        assert_eq!(ex.preflop.dataset.n_rows(), 0);
        assert_eq!(ex.postflop.dataset.n_rows(), 0);
        // The raise is unusable without hole cards; the fold is discarded.
        assert_eq!(ex.stats.unrevealed_skipped, 1);
        assert_eq!(ex.stats.folds_skipped, 1);
        let sb = &ex.tallies["nZE2Jjzd6N7Iw/f/mLLEXA"];
        assert_eq!(sb.raises, 1);
        assert_eq!(ex.tallies["PtgusfQqsttogld64pQOGw"].folds, 1);
    }

    const CHECKED_DOWN: &str = "\
Stage #9: Holdem No Limit $2
Table: RENO (Real Money) Seat #1 is the dealer
Seat 1 - alpha ($200 in chips)
Seat 2 - bravo ($200 in chips)
alpha - Posts small blind $1
bravo - Posts big blind $2
*** POCKET CARDS ***
alpha - Calls $1
bravo - Checks
*** FLOP *** [Qs Jd 2c]
bravo - Checks
alpha - Checks
*** TURN *** [Qs Jd 2c] [5h]
bravo - Checks
alpha - Checks
*** RIVER *** [Qs Jd 2c 5h] [9d]
bravo - Checks
alpha - Checks
*** SHOW DOWN ***
bravo - Shows [Ah Kh]
alpha - Shows [Ad Qc]
alpha Collects $4 from main pot
*** SUMMARY ***
Total Pot($4)
";

    #[test]
    fn checked_down_hand_extracts_every_row() {
        let games = games(&[CHECKED_DOWN]);
        let equity_cfg = cfg();
        let ex = extract_corpus(&games, &equity_cfg);
        assert_eq!(ex.stats.rows, 8);
        assert_eq!(ex.preflop.dataset.n_rows(), 2);
        assert_eq!(ex.postflop.dataset.n_rows(), 6);
        assert_eq!(
            ex.preflop.dataset.n_rows() + ex.postflop.dataset.n_rows(),
            ex.stats.rows as usize
        );

        // alpha's limp: $199 stack, $3 pot, $1 owed, $1 paid, first to act.
        let row = &ex.preflop.dataset.rows[0];
        assert_eq!(row[1], Value::Sym(0), "first of two actors is Early");
        assert_eq!(row[3], Value::Sym(0), "a flat call maps to Call");
        assert!((row[2].as_num().unwrap() - 300.0 / 19900.0).abs() < 1e-12);
        assert!((row[4].as_num().unwrap() - 100.0 / 19900.0).abs() < 1e-12);
        assert!((row[5].as_num().unwrap() - 100.0 / 19900.0).abs() < 1e-12);
        let seed = derive_seed(equity_cfg.seed, 9, 0);
        let expect_wp =
            equity::preflop_win_prob(row_hole("Ad Qc"), 1, equity_cfg.preflop_samples, seed)
                .unwrap();
        assert_eq!(row[0].as_num().unwrap(), expect_wp);

        // bravo's big-blind option: everything zero-cost.
        let row = &ex.preflop.dataset.rows[1];
        assert_eq!(row[3], Value::Sym(0), "a check maps to Call");
        assert_eq!(row[4].as_num().unwrap(), 0.0);
        assert_eq!(row[5].as_num().unwrap(), 0.0);
        assert_eq!(row[1], Value::Sym(1), "second of two actors is Late");

        // River rows carry pure hand strength: no cards to come.
        let river = &ex.postflop.dataset.rows[5]; // alpha acts second on river
        let board = crate::cards::parse_cards("Qs Jd 2c 5h 9d").unwrap();
        let hs = equity::hand_strength(row_hole("Ad Qc"), &board, 1).unwrap();
        assert_eq!(river[0].as_num().unwrap(), hs);

        // Metadata lines up with rows.
        assert_eq!(ex.postflop.meta[5].player_id, "alpha");
        assert_eq!(ex.postflop.meta[5].street, Street::River);
        assert_eq!(ex.postflop.meta[5].raw_kind, ActionKind::Check);
        assert_eq!(ex.stats.possible_earnings_clamped, 0);
    }

    fn row_hole(text: &str) -> [crate::cards::Card; 2] {
        let v = crate::cards::parse_cards(text).unwrap();
        [v[0], v[1]]
    }

    const SHOVE_HAND: &str = "\
Stage #11: Holdem No Limit $2
Table: RENO (Real Money) Seat #1 is the dealer
Seat 1 - alpha ($200 in chips)
Seat 2 - bravo ($200 in chips)
alpha - Posts small blind $1
bravo - Posts big blind $2
*** POCKET CARDS ***
alpha - All-In $199
bravo - All-In $198
*** FLOP *** [2h 7d 9c]
*** TURN *** [2h 7d 9c] [Ts]
*** RIVER *** [2h 7d 9c Ts] [3d]
*** SHOW DOWN ***
alpha - Shows [Ah Ad]
bravo - Shows [Kh Kd]
alpha Collects $400 from main pot
*** SUMMARY ***
Total Pot($400)
";

    #[test]
    fn full_stack_shove_scores_betted_money_one() {
        let games = games(&[SHOVE_HAND]);
        let ex = extract_corpus(&games, &cfg());
        assert_eq!(ex.preflop.dataset.n_rows(), 2);
        let shove = &ex.preflop.dataset.rows[0];
        assert_eq!(shove[5].as_num().unwrap(), 1.0, "all-in wagers the stack");
        assert_eq!(shove[3], Value::Sym(1), "all-in maps to Raise");
        let call = &ex.preflop.dataset.rows[1];
        assert_eq!(call[5].as_num().unwrap(), 1.0);
        assert_eq!(ex.tallies["alpha"].all_ins, 1);
        assert_eq!(ex.tallies["bravo"].all_ins, 1);
    }

    const SHORT_STACK_HAND: &str = "\
Stage #12: Holdem No Limit $2
Table: RENO (Real Money) Seat #3 is the dealer
Seat 1 - alpha ($1,000 in chips)
Seat 2 - bravo ($1,000 in chips)
Seat 3 - candy ($5 in chips)
alpha - Posts small blind $1
bravo - Posts big blind $2
*** POCKET CARDS ***
candy - Calls $2
alpha - Calls $1
bravo - Checks
*** FLOP *** [2h 7d 9c]
alpha - Bets $3.50
bravo - Folds
candy - All-In $3
alpha - returned ($0.50) : not called
*** TURN *** [2h 7d 9c] [Ts]
*** RIVER *** [2h 7d 9c Ts] [3d]
*** SHOW DOWN ***
alpha - Shows [Ah Kh]
candy - Shows [2s 2d]
candy Collects $12 from main pot
*** SUMMARY ***
Total Pot($12)
";

    #[test]
    fn short_stack_ratios_clamp_to_one() {
        let games = games(&[SHORT_STACK_HAND]);
        let ex = extract_corpus(&games, &cfg());
        // candy's flop all-in: $3 stack, $9.50 pot, $3.50 owed.
        let row = ex
            .postflop
            .meta
            .iter()
            .position(|m| m.player_id == "candy")
            .map(|i| &ex.postflop.dataset.rows[i])
            .unwrap();
        assert_eq!(row[2].as_num().unwrap(), 1.0, "pot above stack clamps");
        assert_eq!(row[4].as_num().unwrap(), 1.0, "owed above stack clamps");
        assert_eq!(row[5].as_num().unwrap(), 1.0, "all-in wagers the stack");
        assert_eq!(ex.stats.possible_earnings_clamped, 1);
        assert_eq!(ex.stats.min_bet_clamped, 1);
        // Fold rate counts bravo's fold even though it made no row.
        assert_eq!(ex.tallies["bravo"].folds, 1);
        assert_eq!(ex.tallies["bravo"].fold_rate(), 0.5);
        assert_eq!(ex.tallies["alpha"].aggression_factor(), Some(1.0));
        assert_eq!(ex.tallies["bravo"].aggression_factor(), None);
    }

    #[test]
    fn call_rows_never_outbet_the_owed_amount() {
        let games = games(&[CHECKED_DOWN, SHOVE_HAND, SHORT_STACK_HAND]);
        let ex = extract_corpus(&games, &cfg());
        for side in [&ex.preflop, &ex.postflop] {
            for row in &side.dataset.rows {
                for &j in &[0usize, 2, 4, 5] {
                    let x = row[j].as_num().unwrap();
                    assert!((0.0..=1.0).contains(&x), "feature {j} out of range: {x}");
                }
                if row[3] == Value::Sym(0) {
                    assert!(row[5].as_num().unwrap() <= row[4].as_num().unwrap() + 1e-12);
                }
            }
        }
    }

    #[test]
    fn extraction_is_deterministic_and_seed_sensitive() {
        let games = games(&[CHECKED_DOWN, SHOVE_HAND]);
        let a = extract_corpus(&games, &cfg());
        let b = extract_corpus(&games, &cfg());
        assert_eq!(a, b);
        let other = extract_corpus(&games, &EquityConfig { seed: 8, ..cfg() });
        assert_ne!(
            a.preflop.dataset.rows[0][0],
            other.preflop.dataset.rows[0][0],
            "pre-flop sampling must respond to the seed"
        );
    }

    #[test]
    fn useless_filter_drops_constant_columns_only() {
        let mut ds = empty_play_dataset();
        for i in 0..50 {
            let wp = 0.3 + 0.4 * (i % 2) as f64;
            ds.push_row(vec![
                Value::Num(wp),
                Value::Sym(i % 2),
                Value::Num(0.25), // constant
                Value::Sym(1),    // always Raise
                Value::Num(0.1 * (i % 3) as f64),
                Value::Num(0.5),
            ])
            .unwrap();
        }
        let (kept, removed) = remove_useless(&ds, 1e-4, 0.99).unwrap();
        assert_eq!(removed, vec!["possible_earnings", "action", "betted_money"]);
        assert_eq!(
            kept.attrs.iter().map(|a| a.name.as_str()).collect::<Vec<_>>(),
            vec!["win_prob", "position", "min_bet"]
        );
        // 50/50 nominal is maximally variable: kept.
        assert!(kept.attrs.iter().any(|a| a.name == "position"));
        let all_const = ds.project(&[2, 3]);
        assert_eq!(
            remove_useless(&all_const, 1e-4, 0.99),
            Err(FeatureError::AllAttributesRemoved)
        );
    }

    #[test]
    fn seeds_differ_across_hands_and_decisions() {
        let a = derive_seed(1, 100, 0);
        assert_eq!(a, derive_seed(1, 100, 0));
        assert_ne!(a, derive_seed(1, 100, 1));
        assert_ne!(a, derive_seed(1, 101, 0));
        assert_ne!(a, derive_seed(2, 100, 0));
    }
}
