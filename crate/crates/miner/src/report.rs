//! Report rendering: centroid tables and feature histograms as CSV.
//!
//! The centroid table prints features as rows and one column per cluster,
//! headed by the cluster's integer percent weight — the layout model
//! summaries are usually quoted in. Histograms summarize how each attribute
//! of a dataset is distributed, one line per bin or nominal value, so the
//! distributions can be plotted without re-reading the corpus.

use crate::data::{AttrKind, Dataset, Value};
use crate::em::{centroids, CentroidEntry, MixtureModel};

/// Means are quoted to four decimals with trailing zeros dropped, so an
/// exact zero prints as `0` and 0.0040 prints as `0.004`.
fn fmt4(x: f64) -> String {
    let s = format!("{x:.4}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s.is_empty() || s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

/// Renders a fitted model as a centroid-table CSV. Numeric cells are
/// component means; nominal cells are the modal value, or the full domain
/// joined with `/` when no value reaches `dominance_threshold`.
pub fn centroid_table(model: &MixtureModel, dominance_threshold: f64) -> String {
    let cents = centroids(model, dominance_threshold);
    let mut out = String::from("Feature");
    for (i, c) in cents.iter().enumerate() {
        let pct = (c.weight * 100.0).round() as i64;
        out.push_str(&format!(",Cluster #{i} {pct}%"));
    }
    out.push('\n');
    for (j, attr) in model.schema.iter().enumerate() {
        out.push_str(&attr.name);
        for c in &cents {
            let cell = match &c.entries[j] {
                CentroidEntry::Num(mean) => fmt4(*mean),
                CentroidEntry::Cat(label) => label.clone(),
            };
            out.push(',');
            out.push_str(&cell);
        }
        out.push('\n');
    }
    out
}

/// Value histograms for every attribute of a dataset, as CSV with the
/// header `attribute,bin,lo,hi,count`. Numeric attributes (normalized to
/// [0,1] upstream) get `bins` equal-width bins with the top edge inclusive;
/// nominal attributes get one line per domain value with empty edges.
pub fn histogram_csv(ds: &Dataset, bins: usize) -> String {
    let bins = bins.max(1);
    let mut out = String::from("attribute,bin,lo,hi,count\n");
    for (j, attr) in ds.attrs.iter().enumerate() {
        match &attr.kind {
            AttrKind::Numeric => {
                let mut counts = vec![0u64; bins];
                for row in &ds.rows {
                    if let Value::Num(x) = row[j] {
                        let idx = ((x.max(0.0) * bins as f64) as usize).min(bins - 1);
                        counts[idx] += 1;
                    }
                }
                for (b, n) in counts.iter().enumerate() {
                    let lo = b as f64 / bins as f64;
                    let hi = (b + 1) as f64 / bins as f64;
                    out.push_str(&format!("{},{b},{lo:.3},{hi:.3},{n}\n", attr.name));
                }
            }
            AttrKind::Nominal(domain) => {
                let mut counts = vec![0u64; domain.len()];
                for row in &ds.rows {
                    if let Value::Sym(v) = row[j] {
                        counts[v] += 1;
                    }
                }
                for (value, n) in domain.iter().zip(&counts) {
                    out.push_str(&format!("{},{value},,,{n}\n", attr.name));
                }
            }
        }
    }
    out
}
