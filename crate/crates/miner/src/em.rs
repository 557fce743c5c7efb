//! Finite mixture models over mixed numeric/nominal rows, fitted by EM.
//!
//! Each cluster is a product density: a diagonal Gaussian per numeric
//! attribute and an independent multinomial per nominal attribute. The number
//! of clusters can be chosen automatically by cross-validated held-out
//! log-likelihood, and fitted models assign new rows to clusters by Euclidean
//! distance to the cluster parameters.
//!
//! Fits are deterministic for a given seed and invariant to row order: all
//! reductions run over a canonical sorting of the rows, so permuting the
//! input changes nothing, bit for bit.
//!
//! Two guardrails keep fits well-posed on small or duplicated data: every
//! variance is floored, and every multinomial cell is floored via a
//! water-filling renormalization. Both floors are constrained M-step maxima,
//! so the EM monotonicity guarantee survives them.

use std::cmp::Ordering;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::data::{Attr, AttrKind, Dataset, Value};
use crate::util::derive_seed;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EmError {
    #[error("dataset has no rows")]
    EmptyDataset,
    #[error("a cluster weight collapsed below 1/(2n) after reinitialization")]
    DegenerateFit,
    #[error("row does not match model schema: {0}")]
    SchemaMismatch(String),
    #[error("{rows} rows cannot be split into {folds} folds")]
    TooFewRows { rows: usize, folds: usize },
    #[error("bad clustering parameter: {0}")]
    BadConfig(String),
    #[error("model document invalid: {0}")]
    Persistence(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmConfig {
    pub seed: u64,
    pub max_iter: usize,
    /// Absolute log-likelihood change below which iteration stops.
    pub tol: f64,
    pub variance_floor: f64,
    pub prob_floor: f64,
    pub folds: usize,
    pub k_max: usize,
    /// Nominal centroid prints a single value only above this probability.
    pub dominance_threshold: f64,
    /// Independent initializations per fit; the best final likelihood wins.
    pub starts: usize,
    /// Held-out gain per row a larger k must beat in select_k. Zero keeps
    /// the classic any-improvement rule; raise it on near-compositional
    /// data where extra components tile noise indefinitely.
    pub min_gain: f64,
}

impl Default for EmConfig {
    fn default() -> EmConfig {
        EmConfig {
            seed: 0,
            max_iter: 100,
            tol: 1e-6,
            variance_floor: 1e-6,
            prob_floor: 1e-6,
            folds: 10,
            k_max: 12,
            dominance_threshold: 0.65,
            starts: 1,
            min_gain: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AttrParams {
    Gaussian { mean: f64, variance: f64 },
    Multinomial { probs: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitLog {
    pub seed: u64,
    pub iterations: usize,
    pub log_likelihood: f64,
    pub restarts: u32,
    /// Per-iteration log-likelihood, non-decreasing within 1e-9.
    pub trace: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureModel {
    pub schema: Vec<Attr>,
    pub weights: Vec<f64>,
    /// Per cluster, one parameter set per schema attribute, in order.
    pub clusters: Vec<Vec<AttrParams>>,
    pub fit_log: FitLog,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterAssignment {
    pub row: usize,
    pub cluster: usize,
    pub distance: f64,
}

/// A coordinate of a row being assigned: a number, a concrete nominal value,
/// or a full distribution over a nominal domain (used when the "row" is
/// itself an aggregate such as a model centroid).
#[derive(Debug, Clone, PartialEq)]
pub enum Coord {
    Num(f64),
    Sym(usize),
    Dist(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum CentroidEntry {
    Num(f64),
    Cat(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Centroid {
    pub weight: f64,
    pub entries: Vec<CentroidEntry>,
}

// ---------------------------------------------------------------------------
// Canonical row order

fn cmp_values(a: &Value, b: &Value) -> Ordering {
    match (a, b) {
        (Value::Num(x), Value::Num(y)) => x.partial_cmp(y).expect("dataset values are finite"),
        (Value::Sym(x), Value::Sym(y)) => x.cmp(y),
        (Value::Num(_), Value::Sym(_)) => Ordering::Less,
        (Value::Sym(_), Value::Num(_)) => Ordering::Greater,
    }
}

fn cmp_rows(a: &[Value], b: &[Value]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = cmp_values(x, y);
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// Row indices sorted by row content. All reductions iterate this order, so
/// fitted parameters cannot depend on how the input happened to be sorted.
fn canonical_order(ds: &Dataset) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..ds.rows.len()).collect();
    idx.sort_by(|&i, &j| cmp_rows(&ds.rows[i], &ds.rows[j]));
    idx
}

// ---------------------------------------------------------------------------
// Densities

fn log_gauss(x: f64, mean: f64, variance: f64) -> f64 {
    let d = x - mean;
    -0.5 * (d * d / variance + (std::f64::consts::TAU * variance).ln())
}

fn log_density(row: &[Value], params: &[AttrParams]) -> f64 {
    let mut total = 0.0;
    for (value, p) in row.iter().zip(params) {
        total += match (value, p) {
            (Value::Num(x), AttrParams::Gaussian { mean, variance }) => {
                log_gauss(*x, *mean, *variance)
            }
            (Value::Sym(v), AttrParams::Multinomial { probs }) => probs[*v].ln(),
            _ => unreachable!("schema validated before fitting"),
        };
    }
    total
}

// ---------------------------------------------------------------------------
// Simplex flooring

/// Projects a probability vector onto `{p : p_v >= floor, sum p = 1}` the way
/// a constrained maximum-likelihood step would: cells below the floor are
/// pinned there and the remainder rescales, repeating until stable. Keeping
/// the M-step an exact constrained maximizer preserves EM monotonicity.
fn floor_simplex(mut probs: Vec<f64>, floor: f64) -> Vec<f64> {
    let n = probs.len();
    if n == 0 {
        return probs;
    }
    debug_assert!(floor * n as f64 <= 1.0, "floor too large for domain");
    let mut pinned = vec![false; n];
    loop {
        let pinned_count = pinned.iter().filter(|&&p| p).count();
        let free_mass = 1.0 - floor * pinned_count as f64;
        let free_sum: f64 = probs
            .iter()
            .zip(&pinned)
            .filter(|(_, &p)| !p)
            .map(|(x, _)| *x)
            .sum();
        if free_sum <= 0.0 {
            // No mass left to scale: spread the remainder evenly.
            let free_count = n - pinned_count;
            for (x, &p) in probs.iter_mut().zip(&pinned) {
                if !p {
                    *x = free_mass / free_count as f64;
                }
            }
        } else {
            let scale = free_mass / free_sum;
            for (x, &p) in probs.iter_mut().zip(&pinned) {
                if !p {
                    *x *= scale;
                }
            }
        }
        let mut newly_pinned = false;
        for (x, p) in probs.iter_mut().zip(pinned.iter_mut()) {
            if !*p && *x < floor {
                *x = floor;
                *p = true;
                newly_pinned = true;
            }
        }
        if !newly_pinned {
            return probs;
        }
    }
}

// ---------------------------------------------------------------------------
// Initialization

struct Params {
    weights: Vec<f64>,
    clusters: Vec<Vec<AttrParams>>,
}

fn numeric_indices(attrs: &[Attr]) -> Vec<usize> {
    attrs
        .iter()
        .enumerate()
        .filter(|(_, a)| a.kind == AttrKind::Numeric)
        .map(|(j, _)| j)
        .collect()
}

fn numeric_sq_dist(a: &[Value], b: &[Value], numeric_js: &[usize]) -> f64 {
    numeric_js
        .iter()
        .map(|&j| {
            let (Value::Num(x), Value::Num(y)) = (&a[j], &b[j]) else { return 0.0 };
            (x - y) * (x - y)
        })
        .sum()
}

/// k-means++-style seeding over the numeric subspace: the first center is
/// uniform, each further center is drawn proportional to squared distance
/// from the nearest existing center (uniform when all distances vanish).
fn pick_centers(
    ds: &Dataset,
    canonical: &[usize],
    k: usize,
    numeric_js: &[usize],
    rng: &mut ChaCha8Rng,
) -> Vec<usize> {
    let n = canonical.len();
    let mut centers = vec![canonical[rng.gen_range(0..n)]];
    let mut best_d2: Vec<f64> = canonical
        .iter()
        .map(|&i| numeric_sq_dist(&ds.rows[i], &ds.rows[centers[0]], numeric_js))
        .collect();
    while centers.len() < k {
        let total: f64 = best_d2.iter().sum();
        let chosen_pos = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut pos = n - 1;
            for (p, &d) in best_d2.iter().enumerate() {
                if target < d {
                    pos = p;
                    break;
                }
                target -= d;
            }
            pos
        } else {
            rng.gen_range(0..n)
        };
        let chosen = canonical[chosen_pos];
        centers.push(chosen);
        for (p, &i) in canonical.iter().enumerate() {
            let d = numeric_sq_dist(&ds.rows[i], &ds.rows[chosen], numeric_js);
            if d < best_d2[p] {
                best_d2[p] = d;
            }
        }
    }
    centers
}

/// Empirical value frequencies of each nominal attribute, floored.
fn empirical_nominals(ds: &Dataset, cfg: &EmConfig) -> Vec<Option<Vec<f64>>> {
    ds.attrs
        .iter()
        .enumerate()
        .map(|(j, a)| match &a.kind {
            AttrKind::Numeric => None,
            AttrKind::Nominal(_) => {
                let counts = ds.nominal_counts(j);
                let total: usize = counts.iter().sum();
                let probs = if total == 0 {
                    vec![1.0 / counts.len() as f64; counts.len()]
                } else {
                    counts.iter().map(|&c| c as f64 / total as f64).collect()
                };
                Some(floor_simplex(probs, cfg.prob_floor))
            }
        })
        .collect()
}

fn cluster_from_row(
    ds: &Dataset,
    row: usize,
    global_var: &[f64],
    empirical: &[Option<Vec<f64>>],
    rng: &mut ChaCha8Rng,
    cfg: &EmConfig,
) -> Vec<AttrParams> {
    let mut var_it = global_var.iter();
    ds.attrs
        .iter()
        .enumerate()
        .map(|(j, attr)| match &attr.kind {
            AttrKind::Numeric => AttrParams::Gaussian {
                mean: ds.rows[row][j].as_num().expect("validated dataset"),
                variance: *var_it.next().expect("one variance per numeric attr"),
            },
            AttrKind::Nominal(_) => {
                let base = empirical[j].as_ref().expect("nominal attr has frequencies");
                // Per-cluster jitter breaks symmetry between identical inits.
                let jittered: Vec<f64> = base.iter().map(|p| p + 0.1 * rng.gen::<f64>()).collect();
                let total: f64 = jittered.iter().sum();
                AttrParams::Multinomial {
                    probs: floor_simplex(jittered.iter().map(|p| p / total).collect(), cfg.prob_floor),
                }
            }
        })
        .collect()
}

fn init_params(
    ds: &Dataset,
    canonical: &[usize],
    k: usize,
    rng: &mut ChaCha8Rng,
    cfg: &EmConfig,
) -> Params {
    let numeric_js = numeric_indices(&ds.attrs);
    let global_var: Vec<f64> = numeric_js
        .iter()
        .map(|&j| ds.numeric_variance(j).max(cfg.variance_floor))
        .collect();
    let empirical = empirical_nominals(ds, cfg);
    let centers = pick_centers(ds, canonical, k, &numeric_js, rng);
    let clusters = centers
        .iter()
        .map(|&row| cluster_from_row(ds, row, &global_var, &empirical, rng, cfg))
        .collect();
    Params { weights: vec![1.0 / k as f64; k], clusters }
}

// ---------------------------------------------------------------------------
// E and M steps

/// Per-row responsibilities (canonical order) and the data log-likelihood.
fn e_step(ds: &Dataset, canonical: &[usize], params: &Params) -> (Vec<Vec<f64>>, f64) {
    let log_w: Vec<f64> = params.weights.iter().map(|w| w.ln()).collect();
    let per_row: Vec<(Vec<f64>, f64)> = canonical
        .par_iter()
        .map(|&i| {
            let row = &ds.rows[i];
            let logp: Vec<f64> = params
                .clusters
                .iter()
                .zip(&log_w)
                .map(|(cl, lw)| lw + log_density(row, cl))
                .collect();
            let m = logp.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let sum: f64 = logp.iter().map(|lp| (lp - m).exp()).sum();
            let ll_i = m + sum.ln();
            let resp = logp.iter().map(|lp| (lp - ll_i).exp()).collect();
            (resp, ll_i)
        })
        .collect();
    let mut resp = Vec::with_capacity(per_row.len());
    let mut ll = 0.0;
    for (r, ll_i) in per_row {
        resp.push(r);
        ll += ll_i;
    }
    (resp, ll)
}

/// Weighted MLE update of all parameters. Returns the index of a cluster
/// whose effective count collapsed, if any, without touching the parameters.
fn m_step(
    params: &mut Params,
    ds: &Dataset,
    canonical: &[usize],
    resp: &[Vec<f64>],
    cfg: &EmConfig,
) -> Result<(), usize> {
    let n = canonical.len();
    let k = params.weights.len();
    let mut nc = vec![0.0f64; k];
    for r in resp {
        for (c, v) in r.iter().enumerate() {
            nc[c] += v;
        }
    }
    // Weight below 1/(2n) means the count dropped under one half row.
    if let Some(dead) = nc.iter().position(|&v| v < 0.5) {
        return Err(dead);
    }

    for (c, count) in nc.iter().enumerate() {
        params.weights[c] = count / n as f64;
        for (j, attr) in ds.attrs.iter().enumerate() {
            match &attr.kind {
                AttrKind::Numeric => {
                    let mut mean = 0.0;
                    for (pos, &i) in canonical.iter().enumerate() {
                        let x = ds.rows[i][j].as_num().expect("validated dataset");
                        mean += resp[pos][c] * x;
                    }
                    mean /= count;
                    let mut var = 0.0;
                    for (pos, &i) in canonical.iter().enumerate() {
                        let x = ds.rows[i][j].as_num().expect("validated dataset");
                        var += resp[pos][c] * (x - mean) * (x - mean);
                    }
                    var = (var / count).max(cfg.variance_floor);
                    params.clusters[c][j] = AttrParams::Gaussian { mean, variance: var };
                }
                AttrKind::Nominal(domain) => {
                    let mut counts = vec![0.0f64; domain.len()];
                    for (pos, &i) in canonical.iter().enumerate() {
                        let v = ds.rows[i][j].as_sym().expect("validated dataset");
                        counts[v] += resp[pos][c];
                    }
                    let probs = counts.iter().map(|x| x / count).collect();
                    params.clusters[c][j] =
                        AttrParams::Multinomial { probs: floor_simplex(probs, cfg.prob_floor) };
                }
            }
        }
    }
    Ok(())
}

fn reinit_cluster(
    params: &mut Params,
    dead: usize,
    ds: &Dataset,
    canonical: &[usize],
    rng: &mut ChaCha8Rng,
    cfg: &EmConfig,
) {
    let numeric_js = numeric_indices(&ds.attrs);
    let global_var: Vec<f64> = numeric_js
        .iter()
        .map(|&j| ds.numeric_variance(j).max(cfg.variance_floor))
        .collect();
    let empirical = empirical_nominals(ds, cfg);
    let row = canonical[rng.gen_range(0..canonical.len())];
    params.clusters[dead] = cluster_from_row(ds, row, &global_var, &empirical, rng, cfg);
    params.weights[dead] = 1.0 / params.weights.len() as f64;
    let total: f64 = params.weights.iter().sum();
    for w in &mut params.weights {
        *w /= total;
    }
}

// ---------------------------------------------------------------------------
// Fitting

fn validate_for_fit(ds: &Dataset, k: usize, cfg: &EmConfig) -> Result<(), EmError> {
    if ds.rows.is_empty() {
        return Err(EmError::EmptyDataset);
    }
    if k < 1 {
        return Err(EmError::BadConfig("k must be at least 1".into()));
    }
    if !(cfg.tol > 0.0) || cfg.max_iter == 0 {
        return Err(EmError::BadConfig("tol must be positive, max_iter nonzero".into()));
    }
    if !(cfg.variance_floor > 0.0) || !(cfg.prob_floor > 0.0) {
        return Err(EmError::BadConfig("floors must be positive".into()));
    }
    for attr in &ds.attrs {
        if let AttrKind::Nominal(domain) = &attr.kind {
            if cfg.prob_floor * domain.len() as f64 > 1.0 {
                return Err(EmError::BadConfig(format!(
                    "prob_floor {} too large for {}-value attribute {:?}",
                    cfg.prob_floor,
                    domain.len(),
                    attr.name
                )));
            }
        }
    }
    ds.validate().map_err(|e| EmError::SchemaMismatch(e.to_string()))
}

/// Fits a k-component mixture. Deterministic for a given seed; invariant to
/// row order. With `starts > 1` the fit is repeated from independent seeds
/// and the highest final likelihood wins (a start that degenerates is only
/// fatal when every start does). Within one start a collapsed cluster is
/// reseeded once; a second collapse fails with [`EmError::DegenerateFit`].
pub fn em_fit(ds: &Dataset, k: usize, cfg: &EmConfig) -> Result<MixtureModel, EmError> {
    validate_for_fit(ds, k, cfg)?;
    if cfg.starts <= 1 {
        return fit_once(ds, k, cfg);
    }
    let mut best: Option<MixtureModel> = None;
    for start in 0..cfg.starts {
        let start_cfg =
            EmConfig { seed: derive_seed(cfg.seed, 0x57A2, start as u64), ..*cfg };
        match fit_once(ds, k, &start_cfg) {
            Ok(m) => {
                if best
                    .as_ref()
                    .is_none_or(|b| m.fit_log.log_likelihood > b.fit_log.log_likelihood)
                {
                    best = Some(m);
                }
            }
            Err(EmError::DegenerateFit) => continue,
            Err(e) => return Err(e),
        }
    }
    best.ok_or(EmError::DegenerateFit)
}

fn fit_once(ds: &Dataset, k: usize, cfg: &EmConfig) -> Result<MixtureModel, EmError> {
    let canonical = canonical_order(ds);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut params = init_params(ds, &canonical, k, &mut rng, cfg);
    let mut restarts = 0u32;

    let trace = 'fit: loop {
        let mut trace: Vec<f64> = Vec::new();
        for _ in 0..cfg.max_iter {
            let (resp, ll) = e_step(ds, &canonical, &params);
            if let Err(dead) = m_step(&mut params, ds, &canonical, &resp, cfg) {
                if restarts >= 1 {
                    return Err(EmError::DegenerateFit);
                }
                restarts += 1;
                reinit_cluster(&mut params, dead, ds, &canonical, &mut rng, cfg);
                continue 'fit;
            }
            let converged = trace.last().is_some_and(|prev| (ll - prev).abs() < cfg.tol);
            trace.push(ll);
            if converged {
                break;
            }
        }
        break trace;
    };

    // One more evaluation so the reported likelihood matches the reported
    // parameters (the last trace entry predates the final M-step).
    let (_, final_ll) = e_step(ds, &canonical, &params);
    let mut trace = trace;
    trace.push(final_ll);

    Ok(MixtureModel {
        schema: ds.attrs.clone(),
        weights: params.weights,
        clusters: params.clusters,
        fit_log: FitLog {
            seed: cfg.seed,
            iterations: trace.len(),
            log_likelihood: final_ll,
            restarts,
            trace,
        },
    })
}

/// Picks k by `folds`-fold cross-validated mean held-out log-likelihood:
/// k grows from 1 while the score improves by more than `min_gain` per row;
/// the returned model is refit on the full data at the chosen k. A
/// degenerate fit at some k ends the search at the previous k rather than
/// failing.
pub fn select_k(ds: &Dataset, cfg: &EmConfig) -> Result<(usize, MixtureModel), EmError> {
    if ds.rows.is_empty() {
        return Err(EmError::EmptyDataset);
    }
    if cfg.folds < 2 || ds.rows.len() < cfg.folds {
        return Err(EmError::TooFewRows { rows: ds.rows.len(), folds: cfg.folds });
    }
    if cfg.k_max < 1 {
        return Err(EmError::BadConfig("k_max must be at least 1".into()));
    }

    // Fold assignment: canonical order, seeded shuffle, round-robin. The
    // canonical base keeps the split invariant to input row order.
    let mut order = canonical_order(ds);
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, 0xC0DE, 0));
    order.shuffle(&mut rng);

    let subset = |keep: &dyn Fn(usize) -> bool| -> Dataset {
        let mut d = Dataset::new(ds.relation.clone(), ds.attrs.clone()).expect("schema reuse");
        d.rows = order
            .iter()
            .enumerate()
            .filter(|(pos, _)| keep(*pos))
            .map(|(_, &i)| ds.rows[i].clone())
            .collect();
        d
    };

    let mut best: Option<(usize, f64)> = None;
    'search: for k in 1..=cfg.k_max {
        let mut held_out_ll = 0.0;
        let mut held_out_rows = 0usize;
        for fold in 0..cfg.folds {
            let train = subset(&|pos| pos % cfg.folds != fold);
            let test = subset(&|pos| pos % cfg.folds == fold);
            let fold_cfg =
                EmConfig { seed: derive_seed(cfg.seed, k as u64, fold as u64), ..*cfg };
            let model = match em_fit(&train, k, &fold_cfg) {
                Ok(m) => m,
                Err(EmError::DegenerateFit) => break 'search,
                Err(e) => return Err(e),
            };
            held_out_ll += log_likelihood(&model, &test)?;
            held_out_rows += test.rows.len();
        }
        let score = held_out_ll / held_out_rows as f64;
        match best {
            Some((_, best_score)) if score <= best_score + cfg.min_gain => break,
            _ => best = Some((k, score)),
        }
    }

    let (best_k, _) = best.expect("k = 1 is always evaluated");
    let final_cfg = EmConfig { seed: derive_seed(cfg.seed, best_k as u64, u64::MAX), ..*cfg };
    let model = em_fit(ds, best_k, &final_cfg)?;
    Ok((best_k, model))
}

// ---------------------------------------------------------------------------
// Model queries

fn check_schema(model: &MixtureModel, attrs: &[Attr]) -> Result<(), EmError> {
    if model.schema != attrs {
        return Err(EmError::SchemaMismatch(format!(
            "model fitted on {:?}, data has {:?}",
            model.schema.iter().map(|a| &a.name).collect::<Vec<_>>(),
            attrs.iter().map(|a| &a.name).collect::<Vec<_>>()
        )));
    }
    Ok(())
}

/// Total log-likelihood of a dataset under a fitted model.
pub fn log_likelihood(model: &MixtureModel, ds: &Dataset) -> Result<f64, EmError> {
    check_schema(model, &ds.attrs)?;
    let log_w: Vec<f64> = model.weights.iter().map(|w| w.ln()).collect();
    Ok(ds
        .rows
        .iter()
        .map(|row| {
            let logp: Vec<f64> = model
                .clusters
                .iter()
                .zip(&log_w)
                .map(|(cl, lw)| lw + log_density(row, cl))
                .collect();
            let m = logp.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            m + logp.iter().map(|lp| (lp - m).exp()).sum::<f64>().ln()
        })
        .sum())
}

/// Per-row cluster membership probabilities; each row sums to 1.
pub fn responsibilities(model: &MixtureModel, ds: &Dataset) -> Result<Vec<Vec<f64>>, EmError> {
    check_schema(model, &ds.attrs)?;
    let log_w: Vec<f64> = model.weights.iter().map(|w| w.ln()).collect();
    Ok(ds
        .rows
        .iter()
        .map(|row| {
            let logp: Vec<f64> = model
                .clusters
                .iter()
                .zip(&log_w)
                .map(|(cl, lw)| lw + log_density(row, cl))
                .collect();
            let m = logp.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let ll = m + logp.iter().map(|lp| (lp - m).exp()).sum::<f64>().ln();
            logp.iter().map(|lp| (lp - ll).exp()).collect()
        })
        .collect())
}

/// Human-facing cluster summaries: numeric means, and for nominals the modal
/// value — or all values joined as "A/B" when no value reaches the dominance
/// threshold (the cluster genuinely mixes them).
pub fn centroids(model: &MixtureModel, dominance_threshold: f64) -> Vec<Centroid> {
    model
        .clusters
        .iter()
        .zip(&model.weights)
        .map(|(cluster, &weight)| {
            let entries = cluster
                .iter()
                .zip(&model.schema)
                .map(|(p, attr)| match (p, &attr.kind) {
                    (AttrParams::Gaussian { mean, .. }, _) => CentroidEntry::Num(*mean),
                    (AttrParams::Multinomial { probs }, AttrKind::Nominal(domain)) => {
                        let (arg, best) = probs
                            .iter()
                            .enumerate()
                            .max_by(|a, b| a.1.partial_cmp(b.1).expect("probs are finite"))
                            .expect("nonempty domain");
                        if *best >= dominance_threshold {
                            CentroidEntry::Cat(domain[arg].clone())
                        } else {
                            CentroidEntry::Cat(domain.join("/"))
                        }
                    }
                    _ => unreachable!("params parallel schema"),
                })
                .collect();
            Centroid { weight, entries }
        })
        .collect()
}

/// The row that sits exactly on cluster `c`: numeric means and full nominal
/// distributions. `assign_nearest` returns distance 0 for it by construction.
pub fn centroid_coords(model: &MixtureModel, c: usize) -> Vec<Coord> {
    model.clusters[c]
        .iter()
        .map(|p| match p {
            AttrParams::Gaussian { mean, .. } => Coord::Num(*mean),
            AttrParams::Multinomial { probs } => Coord::Dist(probs.clone()),
        })
        .collect()
}

pub fn coords_from_values(row: &[Value]) -> Vec<Coord> {
    row.iter()
        .map(|v| match v {
            Value::Num(x) => Coord::Num(*x),
            Value::Sym(i) => Coord::Sym(*i),
        })
        .collect()
}

fn coord_sq_dist(coord: &Coord, params: &AttrParams) -> Result<f64, EmError> {
    match (coord, params) {
        (Coord::Num(x), AttrParams::Gaussian { mean, .. }) => Ok((x - mean) * (x - mean)),
        (Coord::Sym(v), AttrParams::Multinomial { probs }) => {
            let p = *probs.get(*v).ok_or_else(|| {
                EmError::SchemaMismatch(format!("nominal index {v} out of range"))
            })?;
            Ok((1.0 - p) * (1.0 - p))
        }
        // Aggregate coordinate: half squared distance between distributions,
        // which reduces to (1 - p)^2 for a one-hot target on two values and
        // to 0 when the row carries the cluster's own distribution.
        (Coord::Dist(q), AttrParams::Multinomial { probs }) => {
            if q.len() != probs.len() {
                return Err(EmError::SchemaMismatch(format!(
                    "distribution arity {} vs domain {}",
                    q.len(),
                    probs.len()
                )));
            }
            Ok(q.iter().zip(probs).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / 2.0)
        }
        _ => Err(EmError::SchemaMismatch("coordinate kind mismatch".into())),
    }
}

/// Nearest cluster by Euclidean distance over the embedded coordinates;
/// ties break toward the lowest cluster id.
pub fn assign_nearest(coords: &[Coord], model: &MixtureModel) -> Result<(usize, f64), EmError> {
    if coords.len() != model.schema.len() {
        return Err(EmError::SchemaMismatch(format!(
            "row arity {} vs schema {}",
            coords.len(),
            model.schema.len()
        )));
    }
    let mut best: Option<(usize, f64)> = None;
    for (c, cluster) in model.clusters.iter().enumerate() {
        let mut d2 = 0.0;
        for (coord, params) in coords.iter().zip(cluster) {
            d2 += coord_sq_dist(coord, params)?;
        }
        if best.map_or(true, |(_, bd)| d2 < bd) {
            best = Some((c, d2));
        }
    }
    let (cluster, d2) = best.expect("model has at least one cluster");
    Ok((cluster, d2.sqrt()))
}

/// Assigns every dataset row to its nearest cluster.
pub fn assign_all(ds: &Dataset, model: &MixtureModel) -> Result<Vec<ClusterAssignment>, EmError> {
    check_schema(model, &ds.attrs)?;
    ds.rows
        .iter()
        .enumerate()
        .map(|(row, values)| {
            let (cluster, distance) = assign_nearest(&coords_from_values(values), model)?;
            Ok(ClusterAssignment { row, cluster, distance })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Persistence

impl MixtureModel {
    pub fn k(&self) -> usize {
        self.weights.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    /// Content hash identifying the model; stable across save/load.
    pub fn model_id(&self) -> String {
        let compact = serde_json::to_string(self).expect("model serializes");
        let mut hasher = Sha256::new();
        hasher.update(compact.as_bytes());
        hex::encode(hasher.finalize())
    }

    pub fn from_json(text: &str) -> Result<MixtureModel, EmError> {
        let model: MixtureModel =
            serde_json::from_str(text).map_err(|e| EmError::Persistence(e.to_string()))?;
        model.validate()?;
        Ok(model)
    }

    /// Structural invariants every model must satisfy, fitted or loaded.
    pub fn validate(&self) -> Result<(), EmError> {
        let bad = |m: String| EmError::Persistence(m);
        let k = self.weights.len();
        if k == 0 || self.clusters.len() != k {
            return Err(bad(format!("{} weights vs {} clusters", k, self.clusters.len())));
        }
        let wsum: f64 = self.weights.iter().sum();
        if (wsum - 1.0).abs() > 1e-9 || self.weights.iter().any(|w| !(0.0..=1.0).contains(w)) {
            return Err(bad("weights must be probabilities summing to 1".into()));
        }
        for cluster in &self.clusters {
            if cluster.len() != self.schema.len() {
                return Err(bad("cluster arity differs from schema".into()));
            }
            for (p, attr) in cluster.iter().zip(&self.schema) {
                match (p, &attr.kind) {
                    (AttrParams::Gaussian { mean, variance }, AttrKind::Numeric) => {
                        if !mean.is_finite() || !(*variance > 0.0) {
                            return Err(bad(format!("bad gaussian in {:?}", attr.name)));
                        }
                    }
                    (AttrParams::Multinomial { probs }, AttrKind::Nominal(domain)) => {
                        let sum: f64 = probs.iter().sum();
                        if probs.len() != domain.len()
                            || (sum - 1.0).abs() > 1e-9
                            || probs.iter().any(|p| !(0.0..=1.0).contains(p))
                        {
                            return Err(bad(format!("bad multinomial in {:?}", attr.name)));
                        }
                    }
                    _ => {
                        return Err(bad(format!(
                            "parameter kind does not match attribute {:?}",
                            attr.name
                        )))
                    }
                }
            }
        }
        Ok(())
    }
}
