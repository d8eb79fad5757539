//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A linear operator written in the fixed orthonormal basis; `m[(k, i)]` is
/// the `e_k` component of the image of `e_i`.
pub type Operator = DMatrix<f64>;

/// A vector in the fixed orthonormal basis.
pub type Vector = DVector<f64>;

/// Reciprocal condition number below which an operator counts as singular.
pub const SINGULAR_RCOND: f64 = 1e-13;

/// Symmetric part `S(A) = (A + A^t)/2`.
pub fn sym(a: &Operator) -> Operator {
    (a + a.transpose()) * 0.5
}

/// `[A, B] = AB - BA`.
pub fn commutator(a: &Operator, b: &Operator) -> Operator {
    a * b - b * a
}

/// `[A, A^t]`, symmetric by construction.
pub fn self_commutator(a: &Operator) -> Operator {
    let at = a.transpose();
    a * &at - &at * a
}

/// Frobenius inner product `tr(A B^t)`.
pub fn inner(a: &Operator, b: &Operator) -> f64 {
    a.component_mul(b).sum()
}

pub fn frob_sq(a: &Operator) -> f64 {
    a.norm_squared()
}

/// Largest absolute entry.
pub fn max_abs(a: &Operator) -> f64 {
    a.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

pub fn check_finite(a: &Operator) -> Result<()> {
    if a.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

/// Reciprocal 2-norm condition number `sigma_min / sigma_max`.
pub fn rcond(a: &Operator) -> f64 {
    if a.nrows() == 0 {
        return 1.0;
    }
    let sv = a.clone().svd(false, false).singular_values;
    let max = sv.max();
    let min = sv.min();
    if max == 0.0 || !max.is_finite() {
        0.0
    } else {
        min / max
    }
}

/// Inverse of a square operator, refusing ill-conditioned input.
pub fn checked_inverse(a: &Operator) -> Result<Operator> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    check_finite(a)?;
    if rcond(a) < SINGULAR_RCOND {
        return Err(Error::Singular);
    }
    a.clone().try_inverse().ok_or(Error::Singular)
}

/// SVD with singular triplets sorted by decreasing singular value.
fn sorted_svd(m: &DMatrix<f64>) -> (DMatrix<f64>, Vec<f64>, DMatrix<f64>) {
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("u requested");
    let vt = svd.v_t.expect("v_t requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let u_sorted = DMatrix::from_fn(u.nrows(), order.len(), |r, c| u[(r, order[c])]);
    let vt_sorted = DMatrix::from_fn(order.len(), vt.ncols(), |r, c| vt[(order[r], c)]);
    let sv = order.iter().map(|&i| svd.singular_values[i]).collect();
    (u_sorted, sv, vt_sorted)
}

/// Numerical rank with a threshold relative to the largest singular value.
pub fn numerical_rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let (_, sv, _) = sorted_svd(m);
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * top).count()
}

/// Orthonormal basis (as columns) of the column span of `m`, using the
/// relative singular-value threshold `rel_tol`.
pub fn range_basis(m: &DMatrix<f64>, rel_tol: f64) -> DMatrix<f64> {
    let rank = numerical_rank(m, rel_tol);
    top_left_singular(m, rank)
}

/// Orthonormal basis of the column span of `m`; singular values at most
/// `abs_tol` count as zero.
pub fn range_basis_abs(m: &DMatrix<f64>, abs_tol: f64) -> DMatrix<f64> {
    if m.is_empty() {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let (_, sv, _) = sorted_svd(m);
    let rank = sv.iter().filter(|&&s| s > abs_tol).count();
    top_left_singular(m, rank)
}

/// The `k` leading left singular vectors of `m`.
pub fn top_left_singular(m: &DMatrix<f64>, k: usize) -> DMatrix<f64> {
    if k == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let (u, _, _) = sorted_svd(m);
    u.columns(0, k).into_owned()
}

/// Orthonormal basis (as columns) of the null space of `m`; singular values
/// at most `abs_tol` count as zero.
pub fn null_space(m: &DMatrix<f64>, abs_tol: f64) -> DMatrix<f64> {
    let ncols = m.ncols();
    if m.nrows() < ncols {
        // pad so the SVD returns a full V
        let mut padded = DMatrix::zeros(ncols, ncols);
        padded.rows_mut(0, m.nrows()).copy_from(m);
        return null_space(&padded, abs_tol);
    }
    let (_, sv, vt) = sorted_svd(m);
    let rank = sv.iter().filter(|&&s| s > abs_tol).count();
    vt.rows(rank, ncols - rank).transpose()
}

/// Matrix exponential.
pub fn expm(e: &Operator) -> Operator {
    e.exp()
}

/// Serializes an operator as a list of rows.
pub fn serialize_rows<S: serde::Serializer>(
    m: &Operator,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.nrows()))?;
    for r in m.row_iter() {
        seq.serialize_element(&r.iter().copied().collect::<Vec<f64>>())?;
    }
    seq.end()
}
