//! Playing cards and their text form. A card is written rank-then-suit:
//! ranks `2..9 T J Q K A`, suits `s h d c`, e.g. `As` or `Th`.

use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CardError {
    #[error("invalid card text {0:?}")]
    InvalidText(String),
    #[error("duplicate card {0}")]
    DuplicateCard(Card),
    #[error("wrong number of cards: expected {expected}, got {got}")]
    WrongCount { expected: usize, got: usize },
}

const RANK_CHARS: [char; 13] = [
    '2', '3', '4', '5', '6', '7', '8', '9', 'T', 'J', 'Q', 'K', 'A',
];
const SUIT_CHARS: [char; 4] = ['s', 'h', 'd', 'c'];

/// A single card, packed as `(rank - 2) * 4 + suit`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Card(u8);

impl Card {
    pub const COUNT: usize = 52;

    /// `rank` is 2..=14 (14 = ace), `suit` is 0..=3 (s, h, d, c).
    pub fn new(rank: u8, suit: u8) -> Card {
        assert!((2..=14).contains(&rank) && suit < 4);
        Card((rank - 2) * 4 + suit)
    }

    pub fn from_index(index: u8) -> Card {
        assert!((index as usize) < Card::COUNT);
        Card(index)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// 2..=14, ace high.
    pub fn rank(self) -> u8 {
        self.0 / 4 + 2
    }

    /// 0..=3 in the order spades, hearts, diamonds, clubs.
    pub fn suit(self) -> u8 {
        self.0 % 4
    }

    pub fn deck() -> Vec<Card> {
        (0..Card::COUNT as u8).map(Card).collect()
    }
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}",
            RANK_CHARS[(self.rank() - 2) as usize],
            SUIT_CHARS[self.suit() as usize]
        )
    }
}

impl FromStr for Card {
    type Err = CardError;

    fn from_str(s: &str) -> Result<Card, CardError> {
        let mut chars = s.chars();
        let (r, u) = match (chars.next(), chars.next(), chars.next()) {
            (Some(r), Some(u), None) => (r, u),
            _ => return Err(CardError::InvalidText(s.to_string())),
        };
        let rank = RANK_CHARS
            .iter()
            .position(|&c| c == r.to_ascii_uppercase())
            .ok_or_else(|| CardError::InvalidText(s.to_string()))?;
        let suit = SUIT_CHARS
            .iter()
            .position(|&c| c == u.to_ascii_lowercase())
            .ok_or_else(|| CardError::InvalidText(s.to_string()))?;
        Ok(Card::new(rank as u8 + 2, suit as u8))
    }
}

impl Serialize for Card {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Card {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Card, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// Parses a whitespace-separated card list such as `"As Kh 7d"`.
pub fn parse_cards(text: &str) -> Result<Vec<Card>, CardError> {
    text.split_whitespace().map(Card::from_str).collect()
}

/// Errors if any card appears twice.
pub fn ensure_distinct(cards: &[Card]) -> Result<(), CardError> {
    let mut seen = [false; Card::COUNT];
    for &c in cards {
        if seen[c.index()] {
            return Err(CardError::DuplicateCard(c));
        }
        seen[c.index()] = true;
    }
    Ok(())
}
