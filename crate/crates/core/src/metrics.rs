//! External clustering metrics computed from a contingency table.
//!
//! Labels may be arbitrary `usize` ids; both partitions are compacted to
//! `0..c` before counting, so every metric is invariant to relabeling.

use serde::{Deserialize, Serialize};

use crate::dataset::remap_labels;
use crate::error::{Error, Result};

/// Counts of samples per (predicted cluster, true class) pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    /// `counts[p][t]`, predicted clusters by true classes.
    pub counts: Vec<Vec<u64>>,
    pub n: u64,
}

impl ContingencyTable {
    pub fn new(pred: &[usize], truth: &[usize]) -> Result<Self> {
        if pred.len() != truth.len() {
            return Err(Error::LengthMismatch {
                left: pred.len(),
                right: truth.len(),
            });
        }
        let p = remap_labels(pred);
        let t = remap_labels(truth);
        let cp = p.iter().max().map_or(0, |m| m + 1);
        let ct = t.iter().max().map_or(0, |m| m + 1);
        let mut counts = vec![vec![0u64; ct]; cp];
        for (&a, &b) in p.iter().zip(&t) {
            counts[a][b] += 1;
        }
        Ok(Self {
            counts,
            n: pred.len() as u64,
        })
    }

    pub fn n_pred(&self) -> usize {
        self.counts.len()
    }

    pub fn n_true(&self) -> usize {
        self.counts.first().map_or(0, Vec::len)
    }

    fn row_sums(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    fn col_sums(&self) -> Vec<u64> {
        (0..self.n_true())
            .map(|t| self.counts.iter().map(|r| r[t]).sum())
            .collect()
    }

    /// Pair counts: `(co-clustered in both, in pred, in truth, total)`.
    fn pair_counts(&self) -> (u128, u128, u128, u128) {
        let both = self.counts.iter().flatten().map(|&x| pairs(x)).sum();
        let pred = self.row_sums().into_iter().map(pairs).sum();
        let truth = self.col_sums().into_iter().map(pairs).sum();
        (both, pred, truth, pairs(self.n))
    }
}

fn pairs(x: u64) -> u128 {
    let x = x as u128;
    x * x.saturating_sub(1) / 2
}

/// All six scores for one prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub acc: f64,
    pub nmi: f64,
    pub purity: f64,
    pub ari: f64,
    pub f_score: f64,
    pub precision: f64,
}

pub fn evaluate(pred: &[usize], truth: &[usize]) -> Result<Metrics> {
    let table = ContingencyTable::new(pred, truth)?;
    let (f_score, precision) = table_f_precision(&table);
    Ok(Metrics {
        acc: table_accuracy(&table),
        nmi: table_nmi(&table),
        purity: table_purity(&table),
        ari: table_ari(&table),
        f_score,
        precision,
    })
}

/// Best one-to-one matching of clusters to classes, as a fraction of samples.
pub fn accuracy(pred: &[usize], truth: &[usize]) -> Result<f64> {
    Ok(table_accuracy(&ContingencyTable::new(pred, truth)?))
}

fn table_accuracy(table: &ContingencyTable) -> f64 {
    if table.n == 0 {
        return 0.0;
    }
    let size = table.n_pred().max(table.n_true());
    let mut weights = vec![vec![0i64; size]; size];
    for (p, row) in table.counts.iter().enumerate() {
        for (t, &x) in row.iter().enumerate() {
            weights[p][t] = x as i64;
        }
    }
    let matched = max_weight_assignment(&weights);
    matched as f64 / table.n as f64
}

/// Maximum total weight of a perfect matching on a square weight table.
pub fn max_weight_assignment(weights: &[Vec<i64>]) -> i64 {
    if weights.is_empty() {
        return 0;
    }
    let table = pathfinding::matrix::Matrix::from_rows(weights.iter().cloned())
        .expect("weight table rows have equal length");
    pathfinding::kuhn_munkres::kuhn_munkres(&table).0
}

/// Mutual information normalized by the geometric mean of the entropies.
pub fn nmi(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let table = ContingencyTable::new(pred, truth)?;
    Ok(table_nmi(&table))
}

fn entropy(sums: &[u64], n: f64) -> f64 {
    sums.iter()
        .filter(|&&x| x > 0)
        .map(|&x| {
            let p = x as f64 / n;
            -p * p.ln()
        })
        .sum()
}

fn table_nmi(table: &ContingencyTable) -> f64 {
    if table.n == 0 {
        return 0.0;
    }
    let n = table.n as f64;
    let rows = table.row_sums();
    let cols = table.col_sums();
    let hp = entropy(&rows, n);
    let ht = entropy(&cols, n);
    if hp == 0.0 && ht == 0.0 {
        // Both partitions are a single cluster, hence identical.
        return 1.0;
    }
    if hp == 0.0 || ht == 0.0 {
        return 0.0;
    }
    let mut mi = 0.0;
    for (p, row) in table.counts.iter().enumerate() {
        for (t, &x) in row.iter().enumerate() {
            if x > 0 {
                let x = x as f64;
                mi += x / n * (n * x / (rows[p] as f64 * cols[t] as f64)).ln();
            }
        }
    }
    (mi / (hp * ht).sqrt()).clamp(0.0, 1.0)
}

/// Fraction of samples belonging to the majority class of their cluster.
pub fn purity(pred: &[usize], truth: &[usize]) -> Result<f64> {
    Ok(table_purity(&ContingencyTable::new(pred, truth)?))
}

fn table_purity(table: &ContingencyTable) -> f64 {
    if table.n == 0 {
        return 0.0;
    }
    let majority: u64 = table
        .counts
        .iter()
        .map(|r| r.iter().copied().max().unwrap_or(0))
        .sum();
    majority as f64 / table.n as f64
}

/// Adjusted Rand index.
pub fn ari(pred: &[usize], truth: &[usize]) -> Result<f64> {
    Ok(table_ari(&ContingencyTable::new(pred, truth)?))
}

fn table_ari(table: &ContingencyTable) -> f64 {
    let (both, pred, truth, total) = table.pair_counts();
    ari_from_pair_counts(both, pred, truth, total)
}

/// `(index − expected) / (max − expected)` scaled by `2·total` so that only
/// one rounding happens. Identical trivial partitions score 1.
pub fn ari_from_pair_counts(both: u128, pred: u128, truth: u128, total: u128) -> f64 {
    let (both, pred, truth, total) = (both as i128, pred as i128, truth as i128, total as i128);
    let num = 2 * (total * both - pred * truth);
    let den = total * (pred + truth) - 2 * pred * truth;
    if den == 0 {
        return 1.0;
    }
    num as f64 / den as f64
}

/// Pair-counting `(F-score, precision)`; `0/0` counts as zero.
pub fn pairwise_f_precision(pred: &[usize], truth: &[usize]) -> Result<(f64, f64)> {
    Ok(table_f_precision(&ContingencyTable::new(pred, truth)?))
}

fn table_f_precision(table: &ContingencyTable) -> (f64, f64) {
    let (both, pred, truth, _) = table.pair_counts();
    f_precision_from_pair_counts(both, pred, truth)
}

/// `F = 2PR/(P+R)`, evaluated as `2·TP/(pred + truth)` to round once.
pub fn f_precision_from_pair_counts(both: u128, pred: u128, truth: u128) -> (f64, f64) {
    let precision = if pred == 0 {
        0.0
    } else {
        both as f64 / pred as f64
    };
    let f = if pred + truth == 0 {
        0.0
    } else {
        (2 * both) as f64 / (pred + truth) as f64
    };
    (f, precision)
}
