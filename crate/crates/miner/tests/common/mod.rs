//! Brute-force reference computations shared by integration tests. These are
//! written as plain nested loops, independent of the library's cached /
//! sampled code paths, so they can serve as enumeration oracles.

#![allow(dead_code)]

use miner::cards::Card;
use miner::eval::best5_rank;

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn deck_without(used: &[Card]) -> Vec<Card> {
    Card::deck()
        .into_iter()
        .filter(|c| !used.contains(c))
        .collect()
}

fn rank(hole: [Card; 2], rest: &[Card]) -> miner::eval::HandRank {
    let mut cards = vec![hole[0], hole[1]];
    cards.extend_from_slice(rest);
    best5_rank(&cards).unwrap()
}

/// Single-opponent hand strength by direct enumeration:
/// (ahead + tied/2) / total over every remaining two-card holding.
pub fn hand_strength_oracle(hole: [Card; 2], board: &[Card]) -> f64 {
    let mut used = vec![hole[0], hole[1]];
    used.extend_from_slice(board);
    let deck = deck_without(&used);
    let ours = rank(hole, board);
    let (mut ahead, mut tied, mut total) = (0u64, 0u64, 0u64);
    for i in 0..deck.len() {
        for j in (i + 1)..deck.len() {
            let theirs = rank([deck[i], deck[j]], board);
            if ours > theirs {
                ahead += 1;
            } else if ours == theirs {
                tied += 1;
            }
            total += 1;
        }
    }
    (ahead as f64 + tied as f64 / 2.0) / total as f64
}

/// Exhaustive hand potential: opponents outer, future boards inner (the
/// library enumerates the other way around), full cross product, no caps.
pub fn hand_potential_oracle(hole: [Card; 2], board: &[Card]) -> (f64, f64) {
    let mut used = vec![hole[0], hole[1]];
    used.extend_from_slice(board);
    let deck = deck_without(&used);
    let to_come = 5 - board.len();
    let ours_now = rank(hole, board);

    // hp[now][river]: 0 = ahead, 1 = tied, 2 = behind.
    let mut hp = [[0u64; 3]; 3];
    let mut hp_total = [0u64; 3];
    let standing = |a: miner::eval::HandRank, b: miner::eval::HandRank| -> usize {
        match a.cmp(&b) {
            std::cmp::Ordering::Greater => 0,
            std::cmp::Ordering::Equal => 1,
            std::cmp::Ordering::Less => 2,
        }
    };

    for i in 0..deck.len() {
        for j in (i + 1)..deck.len() {
            let opp = [deck[i], deck[j]];
            let now = standing(ours_now, rank(opp, board));
            let rest: Vec<Card> = deck
                .iter()
                .copied()
                .filter(|c| *c != deck[i] && *c != deck[j])
                .collect();
            let mut futures: Vec<Vec<Card>> = Vec::new();
            if to_come == 2 {
                for a in 0..rest.len() {
                    for b in (a + 1)..rest.len() {
                        futures.push(vec![rest[a], rest[b]]);
                    }
                }
            } else {
                for a in 0..rest.len() {
                    futures.push(vec![rest[a]]);
                }
            }
            for future in futures {
                let mut full_board = board.to_vec();
                full_board.extend_from_slice(&future);
                let river = standing(rank(hole, &full_board), rank(opp, &full_board));
                hp[now][river] += 1;
                hp_total[now] += 1;
            }
        }
    }

    let ppot_num = hp[2][0] as f64 + hp[2][1] as f64 / 2.0 + hp[1][0] as f64 / 2.0;
    let ppot_den = hp_total[2] as f64 + hp_total[1] as f64 / 2.0;
    let npot_num = hp[0][2] as f64 + hp[0][1] as f64 / 2.0 + hp[1][2] as f64 / 2.0;
    let npot_den = hp_total[0] as f64 + hp_total[1] as f64 / 2.0;
    (
        if ppot_den > 0.0 { ppot_num / ppot_den } else { 0.0 },
        if npot_den > 0.0 { npot_num / npot_den } else { 0.0 },
    )
}

/// Pre-flop reference estimate: enumerate all opponent holdings, sample
/// `boards_per_opp` five-card boards for each, score win = 1 / k-way tie = 1/k.
pub fn preflop_oracle(hole: [Card; 2], boards_per_opp: usize, seed: u64) -> f64 {
    let deck = deck_without(&hole);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut score = 0.0f64;
    let mut n = 0u64;
    for i in 0..deck.len() {
        for j in (i + 1)..deck.len() {
            let opp = [deck[i], deck[j]];
            let mut rest: Vec<Card> = deck
                .iter()
                .copied()
                .filter(|c| *c != deck[i] && *c != deck[j])
                .collect();
            for _ in 0..boards_per_opp {
                rest.partial_shuffle(&mut rng, 5);
                let board = rest[..5].to_vec();
                let ours = rank(hole, &board);
                let theirs = rank(opp, &board);
                if ours > theirs {
                    score += 1.0;
                } else if ours == theirs {
                    score += 0.5;
                }
                n += 1;
            }
        }
    }
    score / n as f64
}

/// Twenty-plus deterministic hole/board fixtures spanning flop, turn and
/// river boards, built from a seeded shuffle so they stay stable.
pub fn strength_fixtures() -> Vec<([Card; 2], Vec<Card>)> {
    let mut fixtures = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_F17E);
    for round in 0..7 {
        for board_len in [3usize, 4, 5] {
            let mut deck = Card::deck();
            deck.shuffle(&mut rng);
            let hole = [deck[0], deck[1]];
            let board = deck[2..2 + board_len].to_vec();
            let _ = round;
            fixtures.push((hole, board));
        }
    }
    fixtures
}
