//! Full-sample similarity graph `B = S D⁻¹ Sᵀ` recovered from an anchor graph,
//! for inspecting the learned consensus structure.

use nalgebra::DVector;

use crate::error::{Error, Result, Warning};
use crate::Matrix;

/// Largest `n` for which a dense `n × n` graph is materialized.
pub const MAX_DENSE_SAMPLES: usize = 20_000;

#[derive(Debug, Clone, PartialEq)]
pub struct FullGraph {
    /// Symmetric `n × n` similarity.
    pub b: Matrix,
    /// Column sums of the source anchor graph (length `m`, before dropping
    /// zero columns).
    pub d: DVector<f64>,
    pub warnings: Vec<Warning>,
}

/// Column sums plus `S · D^{-1/2}` restricted to columns with positive mass.
fn scaled_anchor_graph(s: &Matrix) -> Result<(Matrix, DVector<f64>, Vec<Warning>)> {
    if s.iter().any(|&a| !(a >= 0.0 && a.is_finite())) {
        return Err(Error::InvalidParameter(
            "anchor graph must be finite and non-negative".into(),
        ));
    }
    let d = DVector::from_iterator(s.ncols(), s.column_iter().map(|c| c.sum()));
    let keep: Vec<usize> = (0..s.ncols()).filter(|&j| d[j] > 0.0).collect();
    if keep.is_empty() {
        return Err(Error::AllZeroGraph);
    }
    let mut warnings = Vec::new();
    if keep.len() < s.ncols() {
        warnings.push(
            Warning::ZeroColumnsDropped {
                count: s.ncols() - keep.len(),
            }
            .emit(),
        );
    }
    let mut t = s.select_columns(&keep);
    for (col, &j) in keep.iter().enumerate() {
        t.column_mut(col).scale_mut(1.0 / d[j].sqrt());
    }
    Ok((t, d, warnings))
}

/// `B = S D⁻¹ Sᵀ` with `D = diag(column sums of S)`. Zero-mass columns are
/// dropped (with a warning).
pub fn reconstruct_full_graph(s: &Matrix) -> Result<FullGraph> {
    if s.nrows() > MAX_DENSE_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "dense full graph limited to {MAX_DENSE_SAMPLES} samples, got {}; use the top-k form",
            s.nrows()
        )));
    }
    let (t, d, warnings) = scaled_anchor_graph(s)?;
    let mut b = &t * t.transpose();
    // Exact symmetry regardless of the GEMM's reduction order.
    let n = b.nrows();
    for i in 0..n {
        for j in 0..i {
            let avg = 0.5 * (b[(i, j)] + b[(j, i)]);
            b[(i, j)] = avg;
            b[(j, i)] = avg;
        }
    }
    Ok(FullGraph { b, d, warnings })
}

/// The `top_k` largest entries of every row of `B`, as `(row, col, value)`
/// triplets, without materializing `B`. Costs `O(n² m)` time and `O(n)` memory
/// per row.
pub fn reconstruct_top_k(s: &Matrix, top_k: usize) -> Result<Vec<(usize, usize, f64)>> {
    if top_k == 0 {
        return Err(Error::InvalidParameter("top-k must be at least 1".into()));
    }
    let (t, _, _) = scaled_anchor_graph(s)?;
    let tt = t.transpose();
    let n = s.nrows();
    let mut out = Vec::with_capacity(n * top_k.min(n));
    let mut row: Vec<(usize, f64)> = Vec::with_capacity(n);
    for i in 0..n {
        let ti = tt.column(i);
        row.clear();
        row.extend((0..n).map(|j| (j, ti.dot(&tt.column(j)))));
        row.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        out.extend(row.iter().take(top_k).map(|&(j, v)| (i, j, v)));
    }
    Ok(out)
}
