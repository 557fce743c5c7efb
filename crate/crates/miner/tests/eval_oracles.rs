//! Evaluator checks against enumeration: exhaustive 5-card category counts
//! and best-of-6/7 agreement with brute-force subset maximisation.

use miner::cards::{parse_cards, Card};
use miner::eval::{best5_rank, Category, HandRank};

use proptest::prelude::*;

/// Frequency of each category over all C(52,5) five-card hands.
const EXPECTED_COUNTS: [(Category, u64); 9] = [
    (Category::HighCard, 1_302_540),
    (Category::Pair, 1_098_240),
    (Category::TwoPair, 123_552),
    (Category::Trips, 54_912),
    (Category::Straight, 10_200),
    (Category::Flush, 5_108),
    (Category::FullHouse, 3_744),
    (Category::Quads, 624),
    (Category::StraightFlush, 40),
];

#[test]
fn exhaustive_five_card_category_counts() {
    let deck = Card::deck();
    let mut counts = std::collections::BTreeMap::new();
    let mut hand = [deck[0]; 5];
    for a in 0..48 {
        hand[0] = deck[a];
        for b in (a + 1)..49 {
            hand[1] = deck[b];
            for c in (b + 1)..50 {
                hand[2] = deck[c];
                for d in (c + 1)..51 {
                    hand[3] = deck[d];
                    for e in (d + 1)..52 {
                        hand[4] = deck[e];
                        let rank = best5_rank(&hand).unwrap();
                        *counts.entry(rank.category).or_insert(0u64) += 1;
                    }
                }
            }
        }
    }
    let total: u64 = counts.values().sum();
    assert_eq!(total, 2_598_960);
    for (category, expected) in EXPECTED_COUNTS {
        assert_eq!(counts.get(&category), Some(&expected), "{category:?}");
    }
}

/// Brute-force best rank: max over all 5-card subsets.
fn subset_max_rank(cards: &[Card]) -> HandRank {
    let n = cards.len();
    let mut best: Option<HandRank> = None;
    let mut pick = [cards[0]; 5];
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                for d in (c + 1)..n {
                    for e in (d + 1)..n {
                        pick[0] = cards[a];
                        pick[1] = cards[b];
                        pick[2] = cards[c];
                        pick[3] = cards[d];
                        pick[4] = cards[e];
                        let r = best5_rank(&pick).unwrap();
                        if best.map_or(true, |b| r > b) {
                            best = Some(r);
                        }
                    }
                }
            }
        }
    }
    best.unwrap()
}

fn distinct_cards(n: usize) -> impl Strategy<Value = Vec<Card>> {
    Just(()).prop_perturb(move |_, mut rng| {
        let mut deck = Card::deck();
        for i in 0..n {
            let j = rng.gen_range(i..deck.len());
            deck.swap(i, j);
        }
        deck.truncate(n);
        deck
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn seven_card_rank_matches_subset_enumeration(cards in distinct_cards(7)) {
        prop_assert_eq!(best5_rank(&cards).unwrap(), subset_max_rank(&cards));
    }

    #[test]
    fn six_card_rank_matches_subset_enumeration(cards in distinct_cards(6)) {
        prop_assert_eq!(best5_rank(&cards).unwrap(), subset_max_rank(&cards));
    }
}

#[test]
fn known_seven_card_spot_checks() {
    // Board plays: everyone holding nothing still has the board's straight.
    let r = best5_rank(&parse_cards("2c 2d 5h 6s 7d 8c 9h").unwrap()).unwrap();
    assert_eq!(r.category, Category::Straight);
    assert_eq!(r.tiebreak[0], 9);

    // Flush beats the straight hiding in the same seven cards.
    let r = best5_rank(&parse_cards("5h 6h 7h 8s 9s Th Kh").unwrap()).unwrap();
    assert_eq!(r.category, Category::Flush);
}
