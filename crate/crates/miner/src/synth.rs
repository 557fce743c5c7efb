//! Scripted-archetype hand generator.
//!
//! Produces hand-history text in the same dialect the parser reads, played
//! by three scripted player types:
//!
//! * `rock_*` — folds most hands before the flop, plays on with strong
//!   cards, raises only made hands;
//! * `maniac_*` — never folds, raises most opportunities;
//! * `station_*` — never folds, never raises, checks and calls everything.
//!
//! Every hand that reaches showdown reveals all remaining holdings, so the
//! corpus is rich in labeled decisions. The archetype is recoverable from
//! the player id, which makes generated corpora usable as planted ground
//! truth for end-to-end mining checks.
//!
//! Players in a hand always start from equal stacks, and betting keeps every
//! active player's total commitment equal, so no side pots arise: an all-in
//! can only happen at a matched amount.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cards::Card;
use crate::eval::{best5_rank, Category};
use crate::handlog::{parse_hand, render_hand, EventKind, LogEvent, ParsedHand, SeatEntry, Street};
use crate::money::Cents;
use crate::replay;
use crate::util::derive_seed;

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum Archetype {
    Rock,
    Maniac,
    Station,
}

impl Archetype {
    pub const ALL: [Archetype; 3] = [Archetype::Rock, Archetype::Maniac, Archetype::Station];

    pub fn tag(self) -> &'static str {
        match self {
            Archetype::Rock => "rock",
            Archetype::Maniac => "maniac",
            Archetype::Station => "station",
        }
    }

    /// Ground truth from a generated player id (`"maniac_07"` → `Maniac`).
    pub fn of_player(id: &str) -> Option<Archetype> {
        let tag = id.split('_').next()?;
        Archetype::ALL.into_iter().find(|a| a.tag() == tag)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub hands: usize,
    pub players_per_archetype: usize,
    pub seats_per_hand: usize,
    pub starting_stack: Cents,
    pub big_blind: Cents,
    pub seed: u64,
    pub first_stage_id: u64,
}

impl Default for SynthConfig {
    fn default() -> SynthConfig {
        SynthConfig {
            hands: 100,
            players_per_archetype: 3,
            seats_per_hand: 6,
            starting_stack: Cents(120_000),
            big_blind: Cents(600),
            seed: 20_240_601,
            first_stage_id: 4_000_000_001,
        }
    }
}

pub fn player_pool(cfg: &SynthConfig) -> Vec<String> {
    Archetype::ALL
        .iter()
        .flat_map(|a| (0..cfg.players_per_archetype).map(move |i| format!("{}_{i:02}", a.tag())))
        .collect()
}

/// Rough pre-flop strength in [0, 1]: pairs high, big cards good, suited
/// and connected worth a nudge. Only relative order matters.
fn preflop_strength(hole: [Card; 2]) -> f64 {
    let hi = hole[0].rank().max(hole[1].rank()) as f64;
    let lo = hole[0].rank().min(hole[1].rank()) as f64;
    if hole[0].rank() == hole[1].rank() {
        return 0.55 + (hi - 2.0) / 12.0 * 0.45;
    }
    let mut s = (hi - 2.0) / 12.0 * 0.38 + (lo - 2.0) / 12.0 * 0.22;
    if hole[0].suit() == hole[1].suit() {
        s += 0.06;
    }
    if hi - lo <= 2.0 {
        s += 0.04;
    }
    s
}

/// Made-hand strength of hole + visible board, as the hand category.
fn made_category(hole: [Card; 2], board: &[Card]) -> Category {
    let mut cards = board.to_vec();
    cards.extend_from_slice(&hole);
    best5_rank(&cards).expect("generated cards are distinct").category
}

enum Move {
    FoldOrCheck,
    CheckCall,
    /// Raise (or open) to this round total; clamped to stack by the caller.
    RaiseTo(Cents),
}

struct SimPlayer {
    id: String,
    archetype: Archetype,
    hole: [Card; 2],
    stack_left: Cents,
    committed_round: Cents,
    folded: bool,
    all_in: bool,
}

struct Sim {
    players: Vec<SimPlayer>,
    events: Vec<LogEvent>,
    street: Street,
    board: Vec<Card>,
    pot: Cents,
    to_call: Cents,
    raises_this_round: u32,
    bb: Cents,
}

impl Sim {
    fn active(&self) -> usize {
        self.players.iter().filter(|p| !p.folded).count()
    }

    fn push(&mut self, actor: usize, kind: EventKind, amount: Cents, raise_to: Option<Cents>) {
        self.events.push(LogEvent {
            actor: Some(self.players[actor].id.clone()),
            kind,
            amount,
            raise_to,
            street: self.street,
            cards: Vec::new(),
        });
    }

    fn pay(&mut self, actor: usize, amount: Cents) {
        let p = &mut self.players[actor];
        assert!(amount <= p.stack_left, "policies never overbet the stack");
        p.stack_left -= amount;
        p.committed_round += amount;
        self.pot += amount;
    }

    fn post_blind(&mut self, actor: usize, amount: Cents, kind: EventKind) {
        self.pay(actor, amount);
        self.push(actor, kind, amount, None);
        if self.players[actor].committed_round > self.to_call {
            self.to_call = self.players[actor].committed_round;
        }
    }

    fn owed(&self, actor: usize) -> Cents {
        self.to_call.saturating_sub(self.players[actor].committed_round)
    }

    fn fold(&mut self, actor: usize) {
        self.players[actor].folded = true;
        self.push(actor, EventKind::Fold, Cents::ZERO, None);
    }

    fn check_or_call(&mut self, actor: usize) {
        let owed = self.owed(actor);
        if owed.is_zero() {
            self.push(actor, EventKind::Check, Cents::ZERO, None);
            return;
        }
        let all_in = owed == self.players[actor].stack_left;
        self.pay(actor, owed);
        if all_in {
            self.players[actor].all_in = true;
            self.push(actor, EventKind::AllIn, owed, None);
        } else {
            self.push(actor, EventKind::Call, owed, None);
        }
    }

    fn raise_to(&mut self, actor: usize, target_total: Cents) {
        let cap = self.players[actor].committed_round + self.players[actor].stack_left;
        let total = target_total.min(cap);
        if total <= self.to_call {
            // Cannot raise legally (stack too short); flat it instead.
            self.check_or_call(actor);
            return;
        }
        let add = total - self.players[actor].committed_round;
        let opened = self.to_call.is_zero();
        let all_in = add == self.players[actor].stack_left;
        self.pay(actor, add);
        self.to_call = total;
        self.raises_this_round += 1;
        if all_in {
            self.players[actor].all_in = true;
            if opened {
                self.push(actor, EventKind::AllIn, add, None);
            } else {
                self.push(actor, EventKind::AllIn, add, Some(total));
            }
        } else if opened {
            self.push(actor, EventKind::Bet, add, None);
        } else {
            self.push(actor, EventKind::RaiseTo, add, Some(total));
        }
    }

    /// What the archetype wants to do here; legality is applied on top.
    /// Maniacs apply big pressure with any cards, rocks make small value
    /// raises with made hands only, stations flat everything — three signal
    /// profiles that differ in action mix, bet sizing and card quality.
    fn decide(&self, actor: usize, rng: &mut ChaCha8Rng) -> Move {
        let p = &self.players[actor];
        let owed = self.owed(actor);
        let pot = self.pot;
        let bb = self.bb;
        let can_raise = self.raises_this_round < 2;
        match p.archetype {
            Archetype::Station => Move::CheckCall,
            Archetype::Maniac => {
                if can_raise && rng.gen_bool(0.8) {
                    let step = pot.max(bb * 6).min(bb * 10);
                    Move::RaiseTo(self.to_call + step)
                } else {
                    Move::CheckCall
                }
            }
            Archetype::Rock => {
                if self.street == Street::PreFlop {
                    let s = preflop_strength(p.hole);
                    if s >= 0.55 && can_raise && rng.gen_bool(0.9) {
                        Move::RaiseTo(self.to_call + bb * 3)
                    } else if s >= 0.42 || owed.is_zero() {
                        Move::CheckCall
                    } else {
                        Move::FoldOrCheck
                    }
                } else {
                    // Post-flop rocks never fold, but only value-raise.
                    let made = made_category(p.hole, &self.board);
                    let raisy = match made {
                        Category::HighCard => 0.0,
                        Category::Pair => 0.7,
                        Category::TwoPair | Category::Trips => 0.9,
                        _ => 0.95,
                    };
                    if can_raise && raisy > 0.0 && rng.gen_bool(raisy) {
                        let step = (pot / 2).max(bb).min(bb * 4);
                        Move::RaiseTo(self.to_call + step)
                    } else {
                        Move::CheckCall
                    }
                }
            }
        }
    }

    /// Runs one betting round. `start` indexes the first player to speak.
    fn betting_round(&mut self, start: usize, rng: &mut ChaCha8Rng) {
        let n = self.players.len();
        let mut acted = vec![false; n];
        let mut turn = start;
        for _ in 0..10_000 {
            if self.active() <= 1 {
                return;
            }
            let settled = (0..n).all(|j| {
                let p = &self.players[j];
                p.folded || p.all_in || (acted[j] && p.committed_round == self.to_call)
            });
            if settled {
                return;
            }
            let j = turn % n;
            turn += 1;
            {
                let p = &self.players[j];
                if p.folded || p.all_in || (acted[j] && p.committed_round == self.to_call) {
                    continue;
                }
            }
            acted[j] = true;
            match self.decide(j, rng) {
                Move::FoldOrCheck => {
                    if self.owed(j).is_zero() {
                        self.push(j, EventKind::Check, Cents::ZERO, None);
                    } else {
                        self.fold(j);
                    }
                }
                Move::CheckCall => self.check_or_call(j),
                Move::RaiseTo(total) => self.raise_to(j, total),
            }
        }
        unreachable!("betting rounds settle: raises are capped");
    }

    fn street_marker(&mut self, street: Street, board_len: usize, full_board: &[Card]) {
        self.street = street;
        self.board = full_board[..board_len].to_vec();
        self.to_call = Cents::ZERO;
        self.raises_this_round = 0;
        for p in &mut self.players {
            p.committed_round = Cents::ZERO;
        }
        self.events.push(LogEvent {
            actor: None,
            kind: EventKind::StreetMarker,
            amount: Cents::ZERO,
            raise_to: None,
            street,
            cards: self.board.clone(),
        });
    }
}

/// Plays out one hand; returns it already parsed back from its own rendering
/// (so the text form is authoritative) plus the rendered text.
fn play_hand(
    stage_id: u64,
    table_players: &[(String, Archetype)],
    cfg: &SynthConfig,
    rng: &mut ChaCha8Rng,
) -> (ParsedHand, String) {
    let n = table_players.len();
    let mut deck = Card::deck();
    deck.shuffle(rng);
    let full_board: Vec<Card> = deck[2 * n..2 * n + 5].to_vec();

    let mut sim = Sim {
        players: table_players
            .iter()
            .enumerate()
            .map(|(i, (id, archetype))| SimPlayer {
                id: id.clone(),
                archetype: *archetype,
                hole: [deck[2 * i], deck[2 * i + 1]],
                stack_left: cfg.starting_stack,
                committed_round: Cents::ZERO,
                folded: false,
                all_in: false,
            })
            .collect(),
        events: Vec::new(),
        street: Street::PreFlop,
        board: Vec::new(),
        pot: Cents::ZERO,
        to_call: Cents::ZERO,
        raises_this_round: 0,
        bb: cfg.big_blind,
    };

    // Seats run SB, BB, ..., dealer; the dealer is the last seat.
    let sb = cfg.big_blind / 2;
    sim.post_blind(0, sb, EventKind::PostSmallBlind);
    sim.post_blind(1, cfg.big_blind, EventKind::PostBigBlind);
    sim.events.push(LogEvent {
        actor: None,
        kind: EventKind::StreetMarker,
        amount: Cents::ZERO,
        raise_to: None,
        street: Street::PreFlop,
        cards: Vec::new(),
    });
    sim.betting_round(2 % n, rng);

    for (street, board_len) in
        [(Street::Flop, 3), (Street::Turn, 4), (Street::River, 5)]
    {
        if sim.active() < 2 {
            break;
        }
        sim.street_marker(street, board_len, &full_board);
        sim.betting_round(0, rng);
    }

    // Return any uncalled excess: the amount the round's leader put in beyond
    // the highest amount anyone else matched this round.
    let leader = (0..n)
        .max_by_key(|&j| sim.players[j].committed_round)
        .expect("hand has players");
    let matched = (0..n)
        .filter(|&j| j != leader)
        .map(|j| sim.players[j].committed_round)
        .max()
        .unwrap_or(Cents::ZERO);
    let excess = sim.players[leader].committed_round - matched;
    if !excess.is_zero() {
        sim.players[leader].stack_left += excess;
        sim.pot -= excess;
        sim.push(leader, EventKind::ReturnUncalled, excess, None);
    }

    // Award the pot.
    let survivors: Vec<usize> = (0..n).filter(|&j| !sim.players[j].folded).collect();
    let winners: Vec<usize> = if survivors.len() == 1 {
        sim.push(survivors[0], EventKind::DoesNotShow, Cents::ZERO, None);
        survivors
    } else {
        let mut best: Option<(crate::eval::HandRank, Vec<usize>)> = None;
        for &j in &survivors {
            let mut cards = full_board.clone();
            cards.extend_from_slice(&sim.players[j].hole);
            let rank = best5_rank(&cards).expect("distinct cards");
            match &mut best {
                Some((top, who)) if rank == *top => who.push(j),
                Some((top, who)) if rank > *top => {
                    *top = rank;
                    *who = vec![j];
                }
                None => best = Some((rank, vec![j])),
                _ => {}
            }
        }
        for &j in &survivors {
            let hole = sim.players[j].hole;
            sim.events.push(LogEvent {
                actor: Some(sim.players[j].id.clone()),
                kind: EventKind::Show,
                amount: Cents::ZERO,
                raise_to: None,
                street: sim.street,
                cards: hole.to_vec(),
            });
        }
        best.expect("at least one survivor").1
    };

    let pot_total = sim.pot;
    let share = Cents(pot_total.0 / winners.len() as u64);
    let mut remainder = Cents(pot_total.0 % winners.len() as u64);
    for &j in &winners {
        let take = share + std::mem::take(&mut remainder);
        sim.push(j, EventKind::Collect, take, None);
    }

    let hand = ParsedHand {
        stage_id,
        variant: "Holdem".to_string(),
        stakes: cfg.big_blind,
        table_name: "SYNTH".to_string(),
        dealer_seat: n as u32,
        seats: table_players
            .iter()
            .enumerate()
            .map(|(i, (id, _))| SeatEntry {
                seat_index: i as u32 + 1,
                player_id: id.clone(),
                starting_stack: cfg.starting_stack,
            })
            .collect(),
        events: sim.events,
        showdown: Vec::new(), // re-derived from the rendered text below
        pot_total,
    };
    let text = render_hand(&hand);
    let reparsed = parse_hand(&text).expect("generated hands parse");
    replay::replay(&reparsed).expect("generated hands replay");
    (reparsed, text)
}

/// Seating schedule that deals every player a near-equal number of hands:
/// shuffled passes over the pool, chunked per hand, with within-hand
/// duplicates (at pass boundaries) swapped forward.
fn seating_schedule(pool: &[String], cfg: &SynthConfig, rng: &mut ChaCha8Rng) -> Vec<String> {
    let need = cfg.hands * cfg.seats_per_hand;
    let mut schedule: Vec<String> = Vec::with_capacity(need + pool.len());
    while schedule.len() < need {
        let mut pass = pool.to_vec();
        pass.shuffle(rng);
        schedule.extend(pass);
    }
    for h in 0..cfg.hands {
        let start = h * cfg.seats_per_hand;
        for i in start..start + cfg.seats_per_hand {
            if schedule[start..i].contains(&schedule[i]) {
                let j = (i + 1..schedule.len())
                    .find(|&j| !schedule[start..i].contains(&schedule[j]))
                    .expect("a full later pass always holds a non-duplicate");
                schedule.swap(i, j);
            }
        }
    }
    schedule.truncate(need);
    schedule
}

/// Generates the full corpus as hand-history text. Deterministic in the
/// config; every hand parses and replays cleanly.
pub fn generate(cfg: &SynthConfig) -> String {
    let pool = player_pool(cfg);
    assert!(
        cfg.seats_per_hand >= 2 && cfg.seats_per_hand < pool.len().min(11),
        "need 2..=10 seats and more players than seats"
    );
    let mut schedule_rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 0, 1));
    let schedule = seating_schedule(&pool, cfg, &mut schedule_rng);
    let mut out = String::new();
    for h in 0..cfg.hands {
        let stage_id = cfg.first_stage_id + h as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, stage_id, 0));
        let table: Vec<(String, Archetype)> = schedule
            [h * cfg.seats_per_hand..(h + 1) * cfg.seats_per_hand]
            .iter()
            .map(|id| {
                let a = Archetype::of_player(id).expect("pool ids carry the archetype");
                (id.clone(), a)
            })
            .collect();
        let (_, text) = play_hand(stage_id, &table, cfg, &mut rng);
        out.push_str(&text);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::handlog::{parse_stream, StreamItem};
    use std::io::BufReader;

    #[test]
    fn archetypes_are_recoverable_from_ids() {
        let cfg = SynthConfig::default();
        for id in player_pool(&cfg) {
            assert!(Archetype::of_player(&id).is_some(), "{id}");
        }
        assert_eq!(Archetype::of_player("maniac_07"), Some(Archetype::Maniac));
        assert_eq!(Archetype::of_player("somebody"), None);
    }

    #[test]
    fn generated_corpus_parses_replays_and_is_deterministic() {
        let cfg = SynthConfig { hands: 40, ..SynthConfig::default() };
        let text = generate(&cfg);
        assert_eq!(text, generate(&cfg), "same config, same bytes");

        let items = parse_stream(BufReader::new(text.as_bytes()));
        assert_eq!(items.len(), 40);
        let mut showdowns = 0usize;
        for item in &items {
            match item {
                StreamItem::Hand(hand) => {
                    let game = crate::replay::replay(hand).unwrap();
                    assert!(!game.decisions.is_empty(), "hands contain decisions");
                    if hand.showdown.iter().any(|(_, c)| c.is_some()) {
                        showdowns += 1;
                    }
                }
                StreamItem::Skipped(d) => panic!("generated hand skipped: {d:?}"),
            }
        }
        assert!(showdowns >= 20, "most hands reach showdown, got {showdowns}");
    }

    #[test]
    fn different_seeds_give_different_corpora() {
        let a = generate(&SynthConfig { hands: 3, ..SynthConfig::default() });
        let b = generate(&SynthConfig { hands: 3, seed: 1, ..SynthConfig::default() });
        assert_ne!(a, b);
    }

    #[test]
    fn stations_never_raise_or_fold_and_maniacs_never_fold() {
        let cfg = SynthConfig { hands: 60, ..SynthConfig::default() };
        let text = generate(&cfg);
        for item in parse_stream(BufReader::new(text.as_bytes())) {
            let StreamItem::Hand(hand) = item else { panic!() };
            for ev in &hand.events {
                let Some(actor) = &ev.actor else { continue };
                let archetype = Archetype::of_player(actor).unwrap();
                match ev.kind {
                    EventKind::Fold => {
                        assert_eq!(archetype, Archetype::Rock, "only rocks fold")
                    }
                    EventKind::Bet | EventKind::RaiseTo => {
                        assert_ne!(archetype, Archetype::Station, "stations never raise")
                    }
                    EventKind::AllIn if ev.raise_to.is_some() => {
                        // A plain all-in can be a forced flat call, but an
                        // all-in raise is always voluntary aggression.
                        assert_ne!(archetype, Archetype::Station, "stations never raise")
                    }
                    _ => {}
                }
            }
        }
    }
}
