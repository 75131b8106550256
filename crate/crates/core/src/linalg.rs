//! Dense kernels shared by the solver: thin SVD of tall matrices, singular
//! value thresholding, orthogonal Procrustes and Euclidean simplex projection.

use nalgebra::{DMatrix, DVector, SVD};

use crate::Matrix;

/// `A = U · diag(σ) · Vᵀ` with `U: n×r`, `Vᵀ: r×m`, `r = min(n, m)`.
#[derive(Debug, Clone)]
pub struct ThinSvd {
    pub u: Matrix,
    pub singular_values: DVector<f64>,
    pub v_t: Matrix,
}

/// Thin SVD in `O(n·m²)` for an `n × m` matrix with `n ≥ m`: a Householder QR
/// reduces the problem to the `m × m` factor `R`, whose SVD is cheap.
///
/// Working on `R` instead of the Gram matrix `AᵀA` keeps small singular values
/// accurate to `ε·σ_max` rather than `√ε·σ_max`.
pub fn thin_svd(a: &Matrix) -> ThinSvd {
    if a.nrows() < a.ncols() {
        let t = thin_svd(&a.transpose());
        return ThinSvd {
            u: t.v_t.transpose(),
            singular_values: t.singular_values,
            v_t: t.u.transpose(),
        };
    }
    let qr = a.clone().qr();
    let q = qr.q();
    let svd = checked_svd(&qr.r());
    ThinSvd {
        u: q * svd.u.expect("requested U"),
        singular_values: svd.singular_values,
        v_t: svd.v_t.expect("requested Vᵀ"),
    }
}

/// Full SVD that is checked against `a` before it is returned.
///
/// nalgebra's bidiagonal iteration occasionally stops on a wrong
/// decomposition at its default tolerance (off by ~10% on some triangular
/// inputs). The transpose and an explicit tolerance are tried in turn.
fn checked_svd(a: &Matrix) -> SVD<f64, nalgebra::Dyn, nalgebra::Dyn> {
    let scale = a.amax().max(f64::MIN_POSITIVE);
    let tol = 1e3 * f64::EPSILON * scale * (a.nrows().max(a.ncols()) as f64);
    let ok = |s: &SVD<f64, nalgebra::Dyn, nalgebra::Dyn>| {
        let u = s.u.as_ref().expect("requested U");
        let v_t = s.v_t.as_ref().expect("requested Vᵀ");
        let mut us = u.clone();
        for (j, &sv) in s.singular_values.iter().enumerate() {
            us.column_mut(j).scale_mut(sv);
        }
        (us * v_t - a).amax() <= tol
            && orthonormality_error(u) <= 1e-10
            && orthonormality_error(&v_t.transpose()) <= 1e-10
    };
    let first = a.clone().svd(true, true);
    if ok(&first) {
        return first;
    }
    let t = a.transpose().svd(true, true);
    let flipped = SVD {
        u: t.v_t.map(|v| v.transpose()),
        v_t: t.u.map(|u| u.transpose()),
        singular_values: t.singular_values,
    };
    if ok(&flipped) {
        return flipped;
    }
    for eps in [1e-15, 1e-14, 1e-13] {
        if let Some(s) = a.clone().try_svd(true, true, eps, 100_000) {
            if ok(&s) {
                return s;
            }
        }
    }
    log::debug!("no SVD attempt passed the reconstruction check");
    first
}

/// Singular values of `a`, unordered.
pub fn singular_values(a: &Matrix) -> DVector<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return DVector::zeros(0);
    }
    if a.nrows() < a.ncols() {
        return singular_values(&a.transpose());
    }
    checked_svd(&a.clone().qr().r()).singular_values
}

pub fn nuclear_norm(a: &Matrix) -> f64 {
    singular_values(a).sum()
}

/// Proximal operator of `τ‖·‖_*`: soft-thresholds the singular values of `m`.
pub fn svt(m: &Matrix, tau: f64) -> Matrix {
    assert!(tau >= 0.0, "threshold must be non-negative");
    if tau == 0.0 {
        return m.clone();
    }
    let svd = thin_svd(m);
    let keep: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > tau)
        .map(|(i, _)| i)
        .collect();
    if keep.is_empty() {
        return DMatrix::zeros(m.nrows(), m.ncols());
    }
    let mut u = svd.u.select_columns(&keep);
    for (col, &i) in keep.iter().enumerate() {
        u.column_mut(col).scale_mut(svd.singular_values[i] - tau);
    }
    u * svd.v_t.select_rows(&keep)
}

/// Column-orthonormal `G` maximizing `Tr(Gᵀ W)` for `W: m × c`, `c ≤ m`.
///
/// Returns `G = U Vᵀ` from the thin SVD of `W`, together with the smallest
/// singular value (the solution is unique iff it is positive).
pub fn procrustes(w: &Matrix) -> (Matrix, f64) {
    assert!(w.ncols() <= w.nrows(), "procrustes needs c <= m");
    let svd = checked_svd(w);
    let sigma_min = svd.singular_values.min();
    let g = svd.u.expect("requested U") * svd.v_t.expect("requested Vᵀ");
    if orthonormality_error(&g) > 1e-12 {
        // Only reachable with (near-)zero singular values.
        return (orthonormalize(&g), sigma_min);
    }
    (g, sigma_min)
}

/// `max |GᵀG − I|`.
pub fn orthonormality_error(g: &Matrix) -> f64 {
    let gram = g.transpose() * g;
    let c = gram.nrows();
    (gram - DMatrix::identity(c, c)).amax()
}

/// Orthonormal basis spanning the columns of `a` in order, completed with
/// standard basis vectors wherever a column is (numerically) dependent.
pub fn orthonormalize(a: &Matrix) -> Matrix {
    let (m, c) = a.shape();
    assert!(
        c <= m,
        "cannot fit {c} orthonormal columns in dimension {m}"
    );
    let mut out = DMatrix::<f64>::zeros(m, c);
    let mut next_basis = 0;
    for j in 0..c {
        let mut v = a.column(j).into_owned();
        let scale = v.norm();
        loop {
            // Two passes of modified Gram-Schmidt.
            for _ in 0..2 {
                for i in 0..j {
                    let q = out.column(i);
                    let proj = q.dot(&v);
                    v.axpy(-proj, &q, 1.0);
                }
            }
            let norm = v.norm();
            if norm > 1e-10 * scale.max(1.0) {
                out.column_mut(j).copy_from(&(v / norm));
                break;
            }
            assert!(next_basis < m, "ran out of basis vectors");
            v = DVector::zeros(m);
            v[next_basis] = 1.0;
            next_basis += 1;
        }
    }
    out
}

/// Euclidean projection onto the probability simplex `{x ≥ 0, Σx = 1}`.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    assert!(!v.is_empty(), "cannot project onto an empty simplex");
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &s) in sorted.iter().enumerate() {
        cumsum += s;
        let t = (cumsum - 1.0) / (i + 1) as f64;
        if s - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}
