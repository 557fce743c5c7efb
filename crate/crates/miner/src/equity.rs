//! Equity estimates for a known hole pair: immediate hand strength against
//! enumerated opponent holdings, positive/negative hand potential via
//! future-board lookahead, and the blended win probability
//! `HS * (1 - NPot) + (1 - HS) * PPot`.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cards::{ensure_distinct, Card, CardError};
use crate::eval::{best5_rank, HandRank};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EquityError {
    #[error(transparent)]
    Card(#[from] CardError),
    #[error("board must be non-empty here; use the pre-flop estimator")]
    PreFlopBoard,
    #[error("board has {0} cards; expected 3, 4 or 5")]
    WrongBoardSize(usize),
    #[error("opponent count must be at least 1")]
    InvalidOpponentCount,
    #[error("input {name} = {value} outside [0, 1]")]
    OutOfRangeInput { name: &'static str, value: f64 },
}

/// Tunables for the equity estimators. `flop_board_cap` bounds how many
/// two-card board completions the flop lookahead enumerates (sampled without
/// replacement when the full count exceeds the cap).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquityConfig {
    pub preflop_samples: usize,
    pub flop_board_cap: usize,
    pub seed: u64,
}

impl Default for EquityConfig {
    fn default() -> Self {
        EquityConfig {
            preflop_samples: 2000,
            flop_board_cap: 1000,
            seed: 0,
        }
    }
}

fn remaining_deck(used: &[Card]) -> Vec<Card> {
    let mut gone = [false; Card::COUNT];
    for &c in used {
        gone[c.index()] = true;
    }
    Card::deck()
        .into_iter()
        .filter(|c| !gone[c.index()])
        .collect()
}

fn rank_with(hole: [Card; 2], board: &[Card], extra: &[Card]) -> HandRank {
    let mut cards = Vec::with_capacity(2 + board.len() + extra.len());
    cards.push(hole[0]);
    cards.push(hole[1]);
    cards.extend_from_slice(board);
    cards.extend_from_slice(extra);
    best5_rank(&cards).expect("cards validated by caller")
}

/// Probability that `hole` beats `n_opponents` independent random holdings on
/// the given board: every remaining two-card combination is enumerated, ties
/// count half, and the single-opponent figure is raised to the power of the
/// opponent count.
pub fn hand_strength(
    hole: [Card; 2],
    board: &[Card],
    n_opponents: u32,
) -> Result<f64, EquityError> {
    if board.is_empty() {
        return Err(EquityError::PreFlopBoard);
    }
    if !(3..=5).contains(&board.len()) {
        return Err(EquityError::WrongBoardSize(board.len()));
    }
    if n_opponents < 1 {
        return Err(EquityError::InvalidOpponentCount);
    }
    let mut used = vec![hole[0], hole[1]];
    used.extend_from_slice(board);
    ensure_distinct(&used)?;

    let ours = rank_with(hole, board, &[]);
    let deck = remaining_deck(&used);
    let (mut ahead, mut tied, mut total) = (0u64, 0u64, 0u64);
    for i in 0..deck.len() {
        for j in (i + 1)..deck.len() {
            let theirs = rank_with([deck[i], deck[j]], board, &[]);
            match ours.cmp(&theirs) {
                std::cmp::Ordering::Greater => ahead += 1,
                std::cmp::Ordering::Equal => tied += 1,
                std::cmp::Ordering::Less => {}
            }
            total += 1;
        }
    }
    let hs1 = (ahead as f64 + tied as f64 / 2.0) / total as f64;
    Ok(hs1.powi(n_opponents as i32))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Standing {
    Ahead,
    Tied,
    Behind,
}

fn standing(ours: HandRank, theirs: HandRank) -> Standing {
    match ours.cmp(&theirs) {
        std::cmp::Ordering::Greater => Standing::Ahead,
        std::cmp::Ordering::Equal => Standing::Tied,
        std::cmp::Ordering::Less => Standing::Behind,
    }
}

/// Positive and negative potential of `hole` on a flop or turn board.
///
/// All future board completions (pairs on the flop, single rivers on the
/// turn) are crossed with every opponent holding drawn from the cards left
/// after that completion. Transition counts between the current standing and
/// the river standing yield
/// `PPot = (B->A + B->T/2 + T->A/2) / (B + T/2)` and the mirror-image NPot.
/// When the flop has more completions than `board_cap`, a seeded uniform
/// sample without replacement is used instead.
///
/// A 5-card board has no cards to come and returns `(0.0, 0.0)`.
pub fn hand_potential(
    hole: [Card; 2],
    board: &[Card],
    board_cap: usize,
    seed: u64,
) -> Result<(f64, f64), EquityError> {
    if board.is_empty() {
        return Err(EquityError::PreFlopBoard);
    }
    if board.len() == 5 {
        let mut used = vec![hole[0], hole[1]];
        used.extend_from_slice(board);
        ensure_distinct(&used)?;
        return Ok((0.0, 0.0));
    }
    if !(3..=4).contains(&board.len()) {
        return Err(EquityError::WrongBoardSize(board.len()));
    }
    let mut used = vec![hole[0], hole[1]];
    used.extend_from_slice(board);
    ensure_distinct(&used)?;

    let deck = remaining_deck(&used);
    let ours_now = rank_with(hole, board, &[]);

    // Future board completions, by index pairs into `deck`.
    let mut completions: Vec<Vec<usize>> = Vec::new();
    if board.len() == 3 {
        for i in 0..deck.len() {
            for j in (i + 1)..deck.len() {
                completions.push(vec![i, j]);
            }
        }
        if completions.len() > board_cap {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // Partial Fisher-Yates: the first `board_cap` slots are a uniform
            // sample without replacement.
            for k in 0..board_cap {
                let pick = rng.gen_range(k..completions.len());
                completions.swap(k, pick);
            }
            completions.truncate(board_cap);
        }
    } else {
        for i in 0..deck.len() {
            completions.push(vec![i]);
        }
    }

    // Cached standing vs each opponent holding on the current board.
    let mut now_cache: Vec<Option<Standing>> = vec![None; deck.len() * deck.len()];
    // hp[now][river] transition counts; totals indexed by now.
    let mut hp = [[0u64; 3]; 3];
    let mut hp_total = [0u64; 3];
    let idx = |s: Standing| match s {
        Standing::Ahead => 0,
        Standing::Tied => 1,
        Standing::Behind => 2,
    };

    for completion in &completions {
        let future: Vec<Card> = completion.iter().map(|&i| deck[i]).collect();
        let ours_river = rank_with(hole, board, &future);
        for i in 0..deck.len() {
            if completion.contains(&i) {
                continue;
            }
            for j in (i + 1)..deck.len() {
                if completion.contains(&j) {
                    continue;
                }
                let opp = [deck[i], deck[j]];
                let now = *now_cache[i * deck.len() + j]
                    .get_or_insert_with(|| standing(ours_now, rank_with(opp, board, &[])));
                let river = standing(ours_river, rank_with(opp, board, &future));
                hp[idx(now)][idx(river)] += 1;
                hp_total[idx(now)] += 1;
            }
        }
    }

    let (a, t, b) = (0, 1, 2);
    let ppot_num = hp[b][a] as f64 + hp[b][t] as f64 / 2.0 + hp[t][a] as f64 / 2.0;
    let ppot_den = hp_total[b] as f64 + hp_total[t] as f64 / 2.0;
    let npot_num = hp[a][b] as f64 + hp[a][t] as f64 / 2.0 + hp[t][b] as f64 / 2.0;
    let npot_den = hp_total[a] as f64 + hp_total[t] as f64 / 2.0;
    let ppot = if ppot_den > 0.0 { ppot_num / ppot_den } else { 0.0 };
    let npot = if npot_den > 0.0 { npot_num / npot_den } else { 0.0 };
    Ok((ppot, npot))
}

/// Blends hand strength with potentials:
/// `hs * (1 - npot) + (1 - hs) * ppot`, clamped to [0, 1].
pub fn win_probability(hs: f64, ppot: f64, npot: f64) -> Result<f64, EquityError> {
    for (name, value) in [("hs", hs), ("ppot", ppot), ("npot", npot)] {
        if !(0.0..=1.0).contains(&value) {
            return Err(EquityError::OutOfRangeInput { name, value });
        }
    }
    Ok((hs * (1.0 - npot) + (1.0 - hs) * ppot).clamp(0.0, 1.0))
}

/// Canonical suit relabeling: estimates depend only on ranks and on whether
/// the hole cards are suited, so isomorphic holes share one sampling path.
fn canonical_hole(hole: [Card; 2]) -> [Card; 2] {
    let (hi, lo) = if (hole[0].rank(), hole[0].suit()) >= (hole[1].rank(), hole[1].suit()) {
        (hole[0], hole[1])
    } else {
        (hole[1], hole[0])
    };
    if hi.suit() == lo.suit() {
        [Card::new(hi.rank(), 0), Card::new(lo.rank(), 0)]
    } else {
        [Card::new(hi.rank(), 0), Card::new(lo.rank(), 1)]
    }
}

/// Monte Carlo pre-flop win probability against `n_opponents` random
/// holdings: deal opponents and a full board `samples` times, score a win as
/// 1 and a k-way tie for best as 1/k. Deterministic for a given seed.
pub fn preflop_win_prob(
    hole: [Card; 2],
    n_opponents: u32,
    samples: usize,
    seed: u64,
) -> Result<f64, EquityError> {
    if n_opponents < 1 {
        return Err(EquityError::InvalidOpponentCount);
    }
    ensure_distinct(&hole)?;
    let hole = canonical_hole(hole);
    let mut deck = remaining_deck(&hole);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let need = 2 * n_opponents as usize + 5;
    let mut score = 0.0f64;
    for _ in 0..samples {
        deck.partial_shuffle(&mut rng, need);
        let board = &deck[2 * n_opponents as usize..need];
        let ours = rank_with(hole, board, &[]);
        let mut best_opp: Option<HandRank> = None;
        let mut best_count = 0u32;
        for o in 0..n_opponents as usize {
            let theirs = rank_with([deck[2 * o], deck[2 * o + 1]], board, &[]);
            match best_opp {
                Some(b) if theirs < b => {}
                Some(b) if theirs == b => best_count += 1,
                _ => {
                    best_opp = Some(theirs);
                    best_count = 1;
                }
            }
        }
        let best = best_opp.expect("at least one opponent");
        if ours > best {
            score += 1.0;
        } else if ours == best {
            score += 1.0 / (1.0 + best_count as f64);
        }
    }
    Ok(score / samples as f64)
}
