//! Replays a parsed hand into per-decision game states with exact chip
//! accounting. Blinds are forced commitments, not decisions; every voluntary
//! action line produces one [`DecisionRecord`] whose state snapshot describes
//! the table the instant before the actor moved. Any bookkeeping mismatch
//! against the log's own summary rejects the hand — there is no tolerance on
//! chip conservation.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cards::Card;
use crate::handlog::{EventKind, ParsedHand, Street};
use crate::money::Cents;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ActionError {
    #[error("unknown actor {0:?}")]
    UnknownActor(String),
    #[error("illegal action: {0}")]
    IllegalAction(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReplayError {
    #[error("hand {stage_id} is inconsistent: {reason}")]
    InconsistentHand { stage_id: u64, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ActionKind {
    Fold,
    Check,
    Call,
    Bet,
    Raise,
    AllIn,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Action {
    pub actor: String,
    pub kind: ActionKind,
    /// Chips this action moves into the pot.
    pub chips_wagered: Cents,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlayerAtTable {
    pub player_id: String,
    pub stack: Cents,
    pub committed_this_round: Cents,
    pub folded: bool,
    pub all_in: bool,
    /// 1-based order of this player's first action in the current round;
    /// unset until they act.
    pub position_index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameState {
    pub round: Street,
    pub pot: Cents,
    pub to_call: Cents,
    pub board: Vec<Card>,
    pub players: Vec<PlayerAtTable>,
    /// Number of unfolded players when the current round began.
    pub active_at_round_start: usize,
    /// The action that closed this state, once known.
    pub action_taken: Option<Action>,
}

impl GameState {
    pub fn player(&self, id: &str) -> Option<&PlayerAtTable> {
        self.players.iter().find(|p| p.player_id == id)
    }

    /// Unfolded players other than `actor`.
    pub fn active_opponents(&self, actor: &str) -> usize {
        self.players
            .iter()
            .filter(|p| !p.folded && p.player_id != actor)
            .count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Position {
    Early,
    Late,
}

/// One voluntary action and the state it was taken in. `hole_cards` is
/// filled when the actor later revealed at showdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionRecord {
    pub decision_index: usize,
    pub state: GameState,
    pub action: Action,
    pub hole_cards: Option<[Card; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Game {
    pub stage_id: u64,
    pub decisions: Vec<DecisionRecord>,
    pub final_state: GameState,
    pub uncalled_returns: Vec<(String, Cents)>,
    pub awards: Vec<(String, Cents)>,
}

impl Game {
    /// Every recorded state in order: one per decision, then the settled end
    /// state.
    pub fn states(&self) -> impl Iterator<Item = &GameState> {
        self.decisions
            .iter()
            .map(|d| &d.state)
            .chain(std::iter::once(&self.final_state))
    }

    /// Human-readable state trace for debugging.
    pub fn trace(&self) -> String {
        let mut out = format!("hand {}\n", self.stage_id);
        for d in &self.decisions {
            out.push_str(&format!(
                "  [{}] pot {} to_call {} | {} {:?} {}\n",
                d.state.round,
                d.state.pot,
                d.state.to_call,
                d.action.actor,
                d.action.kind,
                d.action.chips_wagered,
            ));
        }
        for (who, amount) in &self.uncalled_returns {
            out.push_str(&format!("  uncalled {amount} returned to {who}\n"));
        }
        for (who, amount) in &self.awards {
            out.push_str(&format!("  {who} collects {amount}\n"));
        }
        out.push_str("  final stacks:");
        for p in &self.final_state.players {
            out.push_str(&format!(" {}={}", p.player_id, p.stack));
        }
        out.push('\n');
        out
    }
}

/// Applies one action to a state, returning the successor. The input state is
/// untouched; the caller records the action on the snapshot it keeps.
pub fn apply_action(state: &GameState, action: &Action) -> Result<GameState, ActionError> {
    let idx = state
        .players
        .iter()
        .position(|p| p.player_id == action.actor)
        .ok_or_else(|| ActionError::UnknownActor(action.actor.clone()))?;
    let player = &state.players[idx];
    if player.folded {
        return Err(ActionError::IllegalAction(format!(
            "{} has already folded",
            action.actor
        )));
    }
    let wagered = action.chips_wagered;
    if wagered > player.stack {
        return Err(ActionError::IllegalAction(format!(
            "wager {wagered} exceeds stack {}",
            player.stack
        )));
    }

    let mut next = state.clone();
    next.action_taken = None;
    let p = &mut next.players[idx];
    match action.kind {
        ActionKind::Fold => {
            if !wagered.is_zero() {
                return Err(ActionError::IllegalAction("fold moves no chips".into()));
            }
            p.folded = true;
        }
        ActionKind::Check => {
            if !wagered.is_zero() {
                return Err(ActionError::IllegalAction("check moves no chips".into()));
            }
            if p.committed_this_round < state.to_call {
                return Err(ActionError::IllegalAction(
                    "cannot check while facing a bet".into(),
                ));
            }
        }
        ActionKind::Call => {
            p.stack -= wagered;
            p.committed_this_round += wagered;
            next.pot += wagered;
        }
        ActionKind::Bet | ActionKind::Raise | ActionKind::AllIn => {
            p.stack -= wagered;
            p.committed_this_round += wagered;
            next.pot += wagered;
            let total = p.committed_this_round;
            if action.kind == ActionKind::Raise && total <= state.to_call {
                return Err(ActionError::IllegalAction(format!(
                    "raise to {total} does not exceed current bet {}",
                    state.to_call
                )));
            }
            if total > next.to_call {
                next.to_call = total;
            }
            if action.kind == ActionKind::AllIn {
                p.all_in = true;
            }
        }
    }
    Ok(next)
}

/// Early/Late label for `actor` in `state`: with `n` players still in when
/// the round began, acting order `k` (1-based) is Early in the first half
/// (`2k <= n`) and Late after it. Heads-up this makes the first actor Early
/// and the second Late; five-handed the third actor is already Late.
pub fn position_label(state: &GameState, actor: &str) -> Result<Position, ActionError> {
    let player = state
        .player(actor)
        .ok_or_else(|| ActionError::UnknownActor(actor.to_string()))?;
    if player.folded {
        return Err(ActionError::IllegalAction(format!(
            "{actor} is no longer active"
        )));
    }
    let k = player.position_index.unwrap_or_else(|| {
        1 + state
            .players
            .iter()
            .filter(|p| p.position_index.is_some())
            .count()
    });
    let n = state.active_at_round_start;
    Ok(if 2 * k <= n { Position::Early } else { Position::Late })
}

fn inconsistent(stage_id: u64, reason: impl Into<String>) -> ReplayError {
    ReplayError::InconsistentHand {
        stage_id,
        reason: reason.into(),
    }
}

/// Replays a hand into decision records and a settled final state, enforcing
/// exact chip conservation against the log's own summary.
pub fn replay(hand: &ParsedHand) -> Result<Game, ReplayError> {
    let stage_id = hand.stage_id;
    let starting_total: Cents = hand.seats.iter().map(|s| s.starting_stack).sum();

    let players: Vec<PlayerAtTable> = hand
        .seats
        .iter()
        .map(|s| PlayerAtTable {
            player_id: s.player_id.clone(),
            stack: s.starting_stack,
            committed_this_round: Cents::ZERO,
            folded: false,
            all_in: false,
            position_index: None,
        })
        .collect();
    let mut state = GameState {
        round: Street::PreFlop,
        pot: Cents::ZERO,
        to_call: Cents::ZERO,
        board: Vec::new(),
        players,
        active_at_round_start: hand.seats.len(),
        action_taken: None,
    };

    let mut decisions: Vec<DecisionRecord> = Vec::new();
    let mut uncalled_returns: Vec<(String, Cents)> = Vec::new();
    let mut awards: Vec<(String, Cents)> = Vec::new();
    let mut pot_at_first_award: Option<Cents> = None;

    let find = |state: &GameState, actor: &Option<String>| -> Result<usize, ReplayError> {
        let id = actor
            .as_deref()
            .ok_or_else(|| inconsistent(stage_id, "event without an actor"))?;
        state
            .players
            .iter()
            .position(|p| p.player_id == id)
            .ok_or_else(|| inconsistent(stage_id, format!("unknown player {id:?}")))
    };

    for event in &hand.events {
        match event.kind {
            EventKind::PostSmallBlind | EventKind::PostBigBlind => {
                let idx = find(&state, &event.actor)?;
                let p = &mut state.players[idx];
                if event.amount > p.stack {
                    return Err(inconsistent(stage_id, "blind exceeds stack"));
                }
                p.stack -= event.amount;
                p.committed_this_round += event.amount;
                if p.committed_this_round > state.to_call {
                    state.to_call = p.committed_this_round;
                }
                state.pot += event.amount;
            }
            EventKind::StreetMarker => {
                if event.street != Street::PreFlop {
                    state.round = event.street;
                    state.to_call = Cents::ZERO;
                    for p in &mut state.players {
                        p.committed_this_round = Cents::ZERO;
                        p.position_index = None;
                    }
                    state.active_at_round_start =
                        state.players.iter().filter(|p| !p.folded).count();
                }
                if !event.cards.is_empty() {
                    state.board = event.cards.clone();
                }
            }
            EventKind::Fold
            | EventKind::Check
            | EventKind::Call
            | EventKind::Bet
            | EventKind::RaiseTo
            | EventKind::AllIn => {
                let idx = find(&state, &event.actor)?;
                if state.players[idx].position_index.is_none() {
                    let next_k = 1 + state
                        .players
                        .iter()
                        .filter(|p| p.position_index.is_some())
                        .count();
                    state.players[idx].position_index = Some(next_k);
                }
                let committed = state.players[idx].committed_this_round;
                let (kind, wagered) = match event.kind {
                    EventKind::Fold => (ActionKind::Fold, Cents::ZERO),
                    EventKind::Check => (ActionKind::Check, Cents::ZERO),
                    EventKind::Call => (ActionKind::Call, event.amount),
                    EventKind::Bet => (ActionKind::Bet, event.amount),
                    EventKind::RaiseTo => {
                        let total = event.raise_to.unwrap_or(event.amount);
                        let wagered = total.checked_sub(committed).ok_or_else(|| {
                            inconsistent(stage_id, "raise total below prior commitment")
                        })?;
                        (ActionKind::Raise, wagered)
                    }
                    EventKind::AllIn => (ActionKind::AllIn, event.amount),
                    _ => unreachable!(),
                };
                let action = Action {
                    actor: event.actor.clone().unwrap(),
                    kind,
                    chips_wagered: wagered,
                };
                let mut snapshot = state.clone();
                snapshot.action_taken = Some(action.clone());
                let hole_cards = hand.revealed_hole(&action.actor);
                state = apply_action(&state, &action)
                    .map_err(|e| inconsistent(stage_id, e.to_string()))?;
                decisions.push(DecisionRecord {
                    decision_index: decisions.len(),
                    state: snapshot,
                    action,
                    hole_cards,
                });
            }
            EventKind::ReturnUncalled => {
                let idx = find(&state, &event.actor)?;
                let p = &mut state.players[idx];
                let new_committed =
                    p.committed_this_round.checked_sub(event.amount).ok_or_else(|| {
                        inconsistent(stage_id, "uncalled return exceeds commitment")
                    })?;
                let new_pot = state.pot.checked_sub(event.amount).ok_or_else(|| {
                    inconsistent(stage_id, "uncalled return exceeds pot")
                })?;
                p.committed_this_round = new_committed;
                p.stack += event.amount;
                state.pot = new_pot;
                uncalled_returns.push((p.player_id.clone(), event.amount));
            }
            EventKind::Show | EventKind::DoesNotShow => {}
            EventKind::Collect => {
                let idx = find(&state, &event.actor)?;
                pot_at_first_award.get_or_insert(state.pot);
                let new_pot = state.pot.checked_sub(event.amount).ok_or_else(|| {
                    inconsistent(stage_id, "awards exceed the pot")
                })?;
                state.pot = new_pot;
                let p = &mut state.players[idx];
                p.stack += event.amount;
                awards.push((p.player_id.clone(), event.amount));
            }
        }

        // Chip conservation holds after every event: chips missing from
        // stacks are exactly the live pot plus anything already awarded.
        debug_assert_eq!(
            starting_total,
            state.players.iter().map(|p| p.stack).sum::<Cents>() + state.pot,
        );
    }

    let contested = match pot_at_first_award {
        Some(pot) => pot,
        None => return Err(inconsistent(stage_id, "hand has no pot award")),
    };
    if contested != hand.pot_total {
        return Err(inconsistent(
            stage_id,
            format!(
                "replayed pot {contested} does not match summary {}",
                hand.pot_total
            ),
        ));
    }
    if !state.pot.is_zero() {
        return Err(inconsistent(
            stage_id,
            format!("pot not fully awarded: {} left", state.pot),
        ));
    }
    let final_total: Cents = state.players.iter().map(|p| p.stack).sum();
    if final_total != starting_total {
        return Err(inconsistent(stage_id, "chips created or destroyed"));
    }

    Ok(Game {
        stage_id,
        decisions,
        final_state: state,
        uncalled_returns,
        awards,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::handlog::{parse_hand, SAMPLE_HAND};

    #[test]
    fn replays_the_sample_hand_exactly() {
        let hand = parse_hand(SAMPLE_HAND).unwrap();
        let game = replay(&hand).unwrap();

        // Blinds posted before the first decision: pot $9, $6 to call.
        let first = &game.decisions[0];
        assert_eq!(first.state.pot, Cents(900));
        assert_eq!(first.state.to_call, Cents(600));
        assert_eq!(first.action.kind, ActionKind::Raise);
        assert_eq!(first.action.chips_wagered, Cents(1500));

        let second = &game.decisions[1];
        assert_eq!(second.action.kind, ActionKind::Fold);
        assert_eq!(second.state.to_call, Cents(1800));
        assert_eq!(second.state.pot, Cents(2400));

        assert_eq!(game.decisions.len(), 2);
        assert_eq!(
            game.uncalled_returns,
            vec![("nZE2Jjzd6N7Iw/f/mLLEXA".to_string(), Cents(1200))]
        );
        assert_eq!(
            game.awards,
            vec![("nZE2Jjzd6N7Iw/f/mLLEXA".to_string(), Cents(1200))]
        );

        // Winner paid the $6 blind call portion, loser paid their big blind.
        let final_sb = game.final_state.player("nZE2Jjzd6N7Iw/f/mLLEXA").unwrap();
        let final_bb = game.final_state.player("PtgusfQqsttogld64pQOGw").unwrap();
        assert_eq!(final_sb.stack, Cents(117900 + 600));
        assert_eq!(final_bb.stack, Cents(221425 - 600));
        assert_eq!(game.final_state.pot, Cents::ZERO);
    }

    #[test]
    fn summary_pot_mismatch_is_rejected() {
        let text = SAMPLE_HAND.replace("Total Pot($12)", "Total Pot($13)");
        let hand = parse_hand(&text).unwrap();
        assert!(matches!(
            replay(&hand),
            Err(ReplayError::InconsistentHand { .. })
        ));
    }

    #[test]
    fn overdrawn_stack_is_rejected() {
        let text = SAMPLE_HAND.replace("($1,179 in chips)", "($10 in chips)");
        let hand = parse_hand(&text).unwrap();
        let e = replay(&hand).unwrap_err();
        let ReplayError::InconsistentHand { reason, .. } = e;
        assert!(reason.contains("exceeds stack"), "{reason}");
    }

    #[test]
    fn apply_action_is_pure_and_tracks_raises() {
        let hand = parse_hand(SAMPLE_HAND).unwrap();
        let game = replay(&hand).unwrap();
        let state = &game.decisions[0].state;
        let raise = Action {
            actor: "nZE2Jjzd6N7Iw/f/mLLEXA".into(),
            kind: ActionKind::Raise,
            chips_wagered: Cents(1500),
        };
        let next = apply_action(state, &raise).unwrap();
        assert_eq!(next.to_call, Cents(1800));
        assert_eq!(next.pot, state.pot + Cents(1500));
        // The input state is untouched.
        assert_eq!(state.pot, Cents(900));
        assert_eq!(state.to_call, Cents(600));
    }

    #[test]
    fn check_requires_matched_bet() {
        let hand = parse_hand(SAMPLE_HAND).unwrap();
        let state = &replay(&hand).unwrap().decisions[0].state;
        // Small blind has only $3 in: checking would dodge the big blind.
        let check = Action {
            actor: "nZE2Jjzd6N7Iw/f/mLLEXA".into(),
            kind: ActionKind::Check,
            chips_wagered: Cents::ZERO,
        };
        assert!(matches!(
            apply_action(state, &check),
            Err(ActionError::IllegalAction(_))
        ));
    }

    #[test]
    fn undersized_raise_is_illegal() {
        let hand = parse_hand(SAMPLE_HAND).unwrap();
        let state = &replay(&hand).unwrap().decisions[0].state;
        let weak = Action {
            actor: "nZE2Jjzd6N7Iw/f/mLLEXA".into(),
            kind: ActionKind::Raise,
            chips_wagered: Cents(100), // totals $4, below the $6 big blind
        };
        assert!(matches!(
            apply_action(state, &weak),
            Err(ActionError::IllegalAction(_))
        ));
    }

    #[test]
    fn position_rule_splits_the_field_in_half() {
        // Enumerate the rule directly over field sizes 2..=10.
        let label = |k: usize, n: usize| if 2 * k <= n { Position::Early } else { Position::Late };
        assert_eq!(label(1, 2), Position::Early);
        assert_eq!(label(2, 2), Position::Late);
        assert_eq!(label(1, 6), Position::Early);
        assert_eq!(label(6, 6), Position::Late);
        assert_eq!(label(3, 5), Position::Late);
        for n in 2..=10usize {
            let mut last = Position::Early;
            for k in 1..=n {
                let now = label(k, n);
                assert!(now >= last, "label must never move back to Early");
                last = now;
            }
            assert_eq!(label(1, n), Position::Early);
            assert_eq!(label(n, n), Position::Late);
        }
    }

    #[test]
    fn position_label_uses_first_action_order() {
        let hand = parse_hand(SAMPLE_HAND).unwrap();
        let game = replay(&hand).unwrap();
        let d0 = &game.decisions[0];
        let d1 = &game.decisions[1];
        assert_eq!(
            position_label(&d0.state, "nZE2Jjzd6N7Iw/f/mLLEXA").unwrap(),
            Position::Early
        );
        assert_eq!(
            position_label(&d1.state, "PtgusfQqsttogld64pQOGw").unwrap(),
            Position::Late
        );
    }

    #[test]
    fn hole_cards_come_from_showdown_reveals() {
        let text = "\
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
        let hand = parse_hand(text).unwrap();
        let game = replay(&hand).unwrap();
        assert_eq!(game.decisions.len(), 8);
        for d in &game.decisions {
            assert!(d.hole_cards.is_some());
        }
        // Board grows with the streets recorded in each decision state.
        assert_eq!(game.decisions[2].state.board.len(), 3);
        assert_eq!(game.decisions[4].state.board.len(), 4);
        assert_eq!(game.decisions[6].state.board.len(), 5);
        // Everyone-checks hand: the pot stays at the blinds.
        assert_eq!(game.final_state.players[0].stack, Cents(20200));
    }
}
