//! Five-card hand ranking with best-of-5/6/7 selection.
//!
//! Ranks are totally ordered: compare the category first, then the tiebreak
//! ranks left to right. The evaluator works analytically on rank counts and
//! suit masks instead of enumerating 5-card subsets, which keeps the hot
//! equity loops fast; tests pin it against subset enumeration.

use serde::{Deserialize, Serialize};

use crate::cards::{ensure_distinct, Card, CardError};

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum Category {
    HighCard,
    Pair,
    TwoPair,
    Trips,
    Straight,
    Flush,
    FullHouse,
    Quads,
    StraightFlush,
}

/// Rank of a 5-card hand. `tiebreak` holds the deciding card ranks in
/// significance order, zero-padded (e.g. a full house stores trip rank then
/// pair rank).
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub struct HandRank {
    pub category: Category,
    pub tiebreak: [u8; 5],
}

impl HandRank {
    fn new(category: Category, ranks: &[u8]) -> HandRank {
        let mut tiebreak = [0u8; 5];
        tiebreak[..ranks.len()].copy_from_slice(ranks);
        HandRank { category, tiebreak }
    }
}

/// Highest straight top rank in a 13-bit rank mask (bit 0 = deuce), if any.
/// The wheel A-5 counts with top rank 5.
fn straight_high(mask: u16) -> Option<u8> {
    for high in (5..=14u8).rev() {
        let need = if high == 5 {
            // A 2 3 4 5
            (1 << 12) | 0b1111
        } else {
            0b11111 << (high - 6)
        };
        if mask & need == need {
            return Some(high);
        }
    }
    None
}

/// Best 5-card rank over 5, 6 or 7 distinct cards.
pub fn best5_rank(cards: &[Card]) -> Result<HandRank, CardError> {
    if !(5..=7).contains(&cards.len()) {
        return Err(CardError::WrongCount {
            expected: 5,
            got: cards.len(),
        });
    }
    ensure_distinct(cards)?;

    let mut counts = [0u8; 15]; // indexed by rank 2..=14
    let mut suit_masks = [0u16; 4]; // rank bit masks per suit
    let mut rank_mask = 0u16;
    for &c in cards {
        counts[c.rank() as usize] += 1;
        suit_masks[c.suit() as usize] |= 1 << (c.rank() - 2);
        rank_mask |= 1 << (c.rank() - 2);
    }

    // Straight flush.
    let flush_suit = (0..4).find(|&s| suit_masks[s].count_ones() >= 5);
    if let Some(s) = flush_suit {
        if let Some(high) = straight_high(suit_masks[s]) {
            return Ok(HandRank::new(Category::StraightFlush, &[high]));
        }
    }

    // Rank groups, highest rank first within each multiplicity.
    let mut quads = None;
    let mut trips: Vec<u8> = Vec::new();
    let mut pairs: Vec<u8> = Vec::new();
    let mut singles: Vec<u8> = Vec::new();
    for rank in (2..=14u8).rev() {
        match counts[rank as usize] {
            4 => quads = quads.or(Some(rank)),
            3 => trips.push(rank),
            2 => pairs.push(rank),
            1 => singles.push(rank),
            _ => {}
        }
    }
    let kickers_excluding = |exclude: &[u8], n: usize| -> Vec<u8> {
        (2..=14u8)
            .rev()
            .filter(|r| counts[*r as usize] > 0 && !exclude.contains(r))
            .take(n)
            .collect()
    };

    if let Some(q) = quads {
        let k = kickers_excluding(&[q], 1);
        return Ok(HandRank::new(Category::Quads, &[q, k[0]]));
    }
    // Full house: best trips plus best remaining pair (a second set of trips
    // supplies the pair with 6+ cards).
    if !trips.is_empty() {
        let pair_part = trips
            .get(1)
            .copied()
            .into_iter()
            .chain(pairs.first().copied())
            .max();
        if let Some(p) = pair_part {
            return Ok(HandRank::new(Category::FullHouse, &[trips[0], p]));
        }
    }
    if let Some(s) = flush_suit {
        let mut ranks: Vec<u8> = (2..=14u8)
            .rev()
            .filter(|r| suit_masks[s] & (1 << (r - 2)) != 0)
            .take(5)
            .collect();
        ranks.truncate(5);
        return Ok(HandRank::new(Category::Flush, &ranks));
    }
    if let Some(high) = straight_high(rank_mask) {
        return Ok(HandRank::new(Category::Straight, &[high]));
    }
    if let Some(&t) = trips.first() {
        let ks = kickers_excluding(&[t], 2);
        return Ok(HandRank::new(Category::Trips, &[t, ks[0], ks[1]]));
    }
    if pairs.len() >= 2 {
        let k = kickers_excluding(&pairs[..2], 1);
        return Ok(HandRank::new(
            Category::TwoPair,
            &[pairs[0], pairs[1], k[0]],
        ));
    }
    if let Some(&p) = pairs.first() {
        let ks = kickers_excluding(&[p], 3);
        return Ok(HandRank::new(Category::Pair, &[p, ks[0], ks[1], ks[2]]));
    }
    Ok(HandRank::new(Category::HighCard, &singles[..5]))
}
