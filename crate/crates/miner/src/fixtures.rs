//! Published reference models, usable without refitting.
//!
//! These are the centroid tables from the original large-corpus study (51M
//! games): six pre-flop action clusters, five post-flop action clusters, and
//! seven player-strategy clusters. They are NOT reproducible from data at
//! this repository's scale, so they ship as read-only constants: load one to
//! classify new observations or predict opponent behavior with the published
//! model instead of a locally fitted one.
//!
//! The source tables publish only cluster means, mixing percentages and a
//! modal label per nominal attribute. Where a parameter is needed that the
//! tables do not give, a documented stand-in is used: every Gaussian gets
//! variance [`FIXTURE_VARIANCE`], a single-label nominal becomes 0.8/0.2 in
//! the label's favor, and a dual label ("Early/Late") becomes an even split.
//! Means, labels and percentages round-trip verbatim; densities computed
//! from a fixture are indicative only.

use crate::data::Attr;
use crate::em::{AttrParams, FitLog, MixtureModel};
use crate::profile::StrategyModel;

/// Stand-in variance for fixture Gaussians (the tables publish only means).
pub const FIXTURE_VARIANCE: f64 = 0.01;

fn gauss(mean: f64) -> AttrParams {
    AttrParams::Gaussian { mean, variance: FIXTURE_VARIANCE }
}

/// First-listed value dominant, runner-up kept plausible.
fn modal(first: bool) -> AttrParams {
    let probs = if first { vec![0.8, 0.2] } else { vec![0.2, 0.8] };
    AttrParams::Multinomial { probs }
}

fn split() -> AttrParams {
    AttrParams::Multinomial { probs: vec![0.5, 0.5] }
}

fn fixture_log() -> FitLog {
    FitLog { seed: 0, iterations: 0, log_likelihood: 0.0, restarts: 0, trace: Vec::new() }
}

/// The action-cluster tables omit `min_bet` (dropped by the useless-attribute
/// filter in the original run), so fixture models carry five attributes.
fn action_schema() -> Vec<Attr> {
    vec![
        Attr::numeric("win_prob"),
        Attr::nominal("position", &["Early", "Late"]),
        Attr::numeric("possible_earnings"),
        Attr::nominal("action", &["Call", "Raise"]),
        Attr::numeric("betted_money"),
    ]
}

#[derive(Clone, Copy)]
enum Label {
    Early,
    Late,
    EarlyLate,
    Call,
    Raise,
    CallRaise,
}

fn label_params(label: Label) -> AttrParams {
    match label {
        Label::Early | Label::Call => modal(true),
        Label::Late | Label::Raise => modal(false),
        Label::EarlyLate | Label::CallRaise => split(),
    }
}

struct ActionTable {
    percents: &'static [f64],
    win_prob: &'static [f64],
    position: &'static [Label],
    possible_earnings: &'static [f64],
    action: &'static [Label],
    betted_money: &'static [f64],
}

fn action_model(t: &ActionTable) -> MixtureModel {
    let total: f64 = t.percents.iter().sum();
    let clusters = (0..t.percents.len())
        .map(|c| {
            vec![
                gauss(t.win_prob[c]),
                label_params(t.position[c]),
                gauss(t.possible_earnings[c]),
                label_params(t.action[c]),
                gauss(t.betted_money[c]),
            ]
        })
        .collect();
    let model = MixtureModel {
        schema: action_schema(),
        weights: t.percents.iter().map(|p| p / total).collect(),
        clusters,
        fit_log: fixture_log(),
    };
    model.validate().expect("fixture constants are consistent");
    model
}

/// Six published pre-flop action clusters.
pub fn preflop_centroids() -> MixtureModel {
    use Label::*;
    action_model(&ActionTable {
        percents: &[22.0, 9.0, 38.0, 7.0, 9.0, 15.0],
        win_prob: &[0.4532, 0.5502, 0.4893, 0.5539, 0.4824, 0.4703],
        position: &[Early, EarlyLate, Late, EarlyLate, Early, Early],
        possible_earnings: &[0.0264, 0.0323, 0.0056, 0.3585, 0.0862, 0.004],
        action: &[Call, Raise, Raise, CallRaise, Call, Raise],
        betted_money: &[0.0093, 0.0543, 0.0128, 0.4755, 0.0387, 0.008],
    })
}

/// Five published post-flop action clusters. The published percentages sum
/// to 101; weights store the normalized shares, and integer-percent rounding
/// of those shares reproduces the published figures.
pub fn postflop_centroids() -> MixtureModel {
    use Label::*;
    action_model(&ActionTable {
        percents: &[13.0, 15.0, 14.0, 17.0, 42.0],
        win_prob: &[0.6946, 0.5297, 0.7052, 0.6463, 0.5306],
        position: &[Late, Late, EarlyLate, Early, Early],
        possible_earnings: &[0.1118, 0.0867, 0.6305, 0.1133, 0.1186],
        action: &[Raise, Call, CallRaise, CallRaise, Call],
        betted_money: &[0.0574, 0.0008, 0.3586, 0.0558, 0.0],
    })
}

/// Rows of the published strategy table: attribute name, then the mean in
/// each of the seven clusters. `Pre_c1` was removed by the original run's
/// useless-attribute filter and so has no row.
const STRATEGY_ROWS: [(&str, [f64; 7]); 10] = [
    ("Pre_c0", [0.3345, 0.1007, 0.4626, 0.0093, 0.2281, 0.0019, 0.0212]),
    ("Pre_c2", [0.2167, 0.1909, 0.0, 0.7364, 0.3157, 0.0404, 0.0104]),
    ("Pre_c3", [0.0201, 0.174, 0.0, 0.0, 0.0075, 0.0094, 0.0535]),
    ("Pre_c4", [0.1971, 0.1836, 0.0051, 0.1504, 0.1009, 0.6254, 0.0261]),
    ("Pre_c5", [0.2316, 0.3508, 0.5322, 0.1039, 0.3477, 0.3228, 0.8889]),
    ("Post_c0", [0.1091, 0.2132, 0.0, 0.3059, 0.0807, 0.1022, 0.0666]),
    ("Post_c1", [0.2033, 0.0572, 0.0, 0.4297, 0.2511, 0.8755, 0.0765]),
    ("Post_c2", [0.1378, 0.7045, 0.0578, 0.1536, 0.0172, 0.0222, 0.1722]),
    ("Post_c3", [0.2674, 0.0126, 0.1564, 0.0604, 0.1194, 0.0, 0.2684]),
    ("Post_c4", [0.2824, 0.0125, 0.7858, 0.0504, 0.5315, 0.0002, 0.4163]),
];

const STRATEGY_PERCENTS: [f64; 7] = [13.0, 3.0, 21.0, 15.0, 33.0, 10.0, 5.0];

/// Seven published player-strategy clusters over action-cluster frequencies,
/// pinned to the published action models above.
pub fn strategy_centroids() -> StrategyModel {
    let total: f64 = STRATEGY_PERCENTS.iter().sum();
    let schema: Vec<Attr> =
        STRATEGY_ROWS.iter().map(|(name, _)| Attr::numeric(*name)).collect();
    let clusters = (0..STRATEGY_PERCENTS.len())
        .map(|c| STRATEGY_ROWS.iter().map(|(_, means)| gauss(means[c])).collect())
        .collect();
    let model = StrategyModel {
        mixture: MixtureModel {
            schema,
            weights: STRATEGY_PERCENTS.iter().map(|p| p / total).collect(),
            clusters,
            fit_log: fixture_log(),
        },
        removed_attributes: vec!["Pre_c1".to_string()],
        pre_k: 6,
        post_k: 5,
        pre_model_id: preflop_centroids().model_id(),
        post_model_id: postflop_centroids().model_id(),
    };
    model.validate().expect("fixture constants are consistent");
    model
}

/// True for the attribute layouts the fixture builders produce; lets callers
/// sanity-check a deserialized fixture file against the built-ins.
pub fn is_action_schema(schema: &[Attr]) -> bool {
    schema.len() == action_schema().len()
        && schema.iter().zip(action_schema()).all(|(a, b)| a.name == b.name && a.kind == b.kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::em::{assign_nearest, centroid_coords, centroids, CentroidEntry};
    use crate::features::StreetGroup;
    use crate::profile::predict_action;

    #[test]
    fn weights_round_back_to_the_published_percents() {
        let pre = preflop_centroids();
        let pre_pct: Vec<i64> =
            pre.weights.iter().map(|w| (w * 100.0).round() as i64).collect();
        assert_eq!(pre_pct, vec![22, 9, 38, 7, 9, 15]);
        assert!((pre.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);

        let post = postflop_centroids();
        let post_pct: Vec<i64> =
            post.weights.iter().map(|w| (w * 100.0).round() as i64).collect();
        assert_eq!(post_pct, vec![13, 15, 14, 17, 42], "101% table renormalized");
        assert!((post.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);

        let strat = strategy_centroids();
        let strat_pct: Vec<i64> =
            strat.mixture.weights.iter().map(|w| (w * 100.0).round() as i64).collect();
        assert_eq!(strat_pct, vec![13, 3, 21, 15, 33, 10, 5]);
    }

    #[test]
    fn labels_and_means_match_the_published_tables() {
        let cs = centroids(&preflop_centroids(), 0.65);
        assert_eq!(cs.len(), 6);
        let labels: Vec<String> = cs
            .iter()
            .map(|c| match &c.entries[1] {
                CentroidEntry::Cat(s) => s.clone(),
                _ => panic!("position is nominal"),
            })
            .collect();
        assert_eq!(
            labels,
            ["Early", "Early/Late", "Late", "Early/Late", "Early", "Early"]
        );
        match &cs[3].entries[3] {
            CentroidEntry::Cat(s) => assert_eq!(s, "Call/Raise"),
            _ => panic!(),
        }
        match cs[0].entries[0] {
            CentroidEntry::Num(m) => assert_eq!(m, 0.4532),
            _ => panic!(),
        }
        match cs[5].entries[4] {
            CentroidEntry::Num(m) => assert_eq!(m, 0.008),
            _ => panic!(),
        }

        let post = centroids(&postflop_centroids(), 0.65);
        match post[4].entries[4] {
            CentroidEntry::Num(m) => assert_eq!(m, 0.0, "cluster 4 checks"),
            _ => panic!(),
        }
    }

    #[test]
    fn every_centroid_assigns_to_itself_at_distance_zero() {
        let strat = strategy_centroids();
        let models =
            [preflop_centroids(), postflop_centroids(), strat.mixture.clone()];
        for model in &models {
            for c in 0..model.k() {
                let coords = centroid_coords(model, c);
                let (got, d) = assign_nearest(&coords, model).unwrap();
                assert_eq!(got, c);
                assert_eq!(d, 0.0);
            }
        }
    }

    #[test]
    fn the_fixture_strategy_model_predicts_with_the_fixture_action_models() {
        let strat = strategy_centroids();
        let pre = preflop_centroids();
        let post = postflop_centroids();
        for c in 0..strat.k() {
            let p = predict_action(c, &strat, &pre, StreetGroup::PreFlop).unwrap();
            assert!((p.p_call + p.p_raise - 1.0).abs() < 1e-9);
            assert!((0.0..=1.0).contains(&p.p_raise));
            assert!((0.0..=1.0).contains(&p.expected_bet_fraction));
            let q = predict_action(c, &strat, &post, StreetGroup::PostFlop).unwrap();
            assert!((q.p_call + q.p_raise - 1.0).abs() < 1e-9);
        }
        // Mixing up the street models is caught.
        assert!(predict_action(0, &strat, &post, StreetGroup::PreFlop).is_err());
        assert!(predict_action(0, &strat, &pre, StreetGroup::PostFlop).is_err());
    }

    #[test]
    fn fixture_models_survive_json_round_trips() {
        let pre = preflop_centroids();
        let back = MixtureModel::from_json(&pre.to_json()).unwrap();
        assert_eq!(back, pre);
        assert_eq!(back.model_id(), pre.model_id());

        let strat = strategy_centroids();
        let back = StrategyModel::from_json(&strat.to_json()).unwrap();
        assert_eq!(back, strat);
        assert!(is_action_schema(&pre.schema));
    }
}
