//! Structure constants of metric Lie algebras.
//!
//! A [`LieBracket`] stores `c[i][j][k] = <[e_i, e_j], e_k>` with respect to a
//! fixed orthonormal basis. Operators act on column vectors, so the image of
//! `e_i` under `D` is the column `D[(.., i)]`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, Operator, Vector};

/// Jacobi residual allowed on a unit-norm bracket.
pub const JACOBI_TOL: f64 = 1e-10;
/// Relative singular-value threshold used for subspace ranks.
pub const RANK_TOL: f64 = 1e-9;
/// Absolute antisymmetry defect allowed at ingestion.
pub const ANTISYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LieBracket {
    dim: usize,
    c: Vec<f64>,
}

impl LieBracket {
    /// The abelian bracket on `R^dim`.
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            c: vec![0.0; dim * dim * dim],
        }
    }

    /// Builds a bracket from relations `[e_i, e_j] += v e_k` (0-based), filling
    /// in the antisymmetric partner. Relations with `i == j` are rejected.
    pub fn from_relations(dim: usize, relations: &[(usize, usize, usize, f64)]) -> Result<Self> {
        let mut out = Self::zero(dim);
        for &(i, j, k, v) in relations {
            let top = i.max(j).max(k);
            if top >= dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: top + 1,
                });
            }
            if !v.is_finite() {
                return Err(Error::NonFinite);
            }
            if i == j {
                if v != 0.0 {
                    return Err(Error::NotAntisymmetric(v.abs()));
                }
                continue;
            }
            let (ijk, jik) = (out.idx(i, j, k), out.idx(j, i, k));
            out.c[ijk] += v;
            out.c[jik] -= v;
        }
        Ok(out)
    }

    /// Wraps a raw tensor (`c[(i*dim + j)*dim + k]`), checking shape,
    /// finiteness and antisymmetry. The Jacobi identity is not checked here;
    /// see [`LieBracket::validate`].
    pub fn from_tensor(dim: usize, c: Vec<f64>) -> Result<Self> {
        if c.len() != dim * dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim * dim,
                got: c.len(),
            });
        }
        if c.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        let scale = c.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        let out = Self { dim, c };
        let defect = out.antisymmetry_defect();
        if defect > ANTISYMMETRY_TOL * scale {
            return Err(Error::NotAntisymmetric(defect));
        }
        Ok(out)
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dim + j) * self.dim + k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `<[e_i, e_j], e_k>`.
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.c[self.idx(i, j, k)]
    }

    pub fn tensor(&self) -> &[f64] {
        &self.c
    }

    /// Nonzero entries `(i, j, k, c_ijk)` with `i < j`.
    pub fn relations(&self) -> Vec<(usize, usize, usize, f64)> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    let v = self.get(i, j, k);
                    if v != 0.0 {
                        out.push((i, j, k, v));
                    }
                }
            }
        }
        out
    }

    pub fn is_abelian(&self) -> bool {
        self.c.iter().all(|&v| v == 0.0)
    }

    fn antisymmetry_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    worst = worst.max((self.get(i, j, k) + self.get(j, i, k)).abs());
                }
            }
        }
        worst
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                got,
            })
        } else {
            Ok(())
        }
    }

    /// `[X, Y] = sum X_i Y_j c_ijk e_k`.
    pub fn bracket_eval(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        self.check_dim(x.len())?;
        self.check_dim(y.len())?;
        let n = self.dim;
        let mut out = Vector::zeros(n);
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let w = x[i] * y[j];
                if w == 0.0 {
                    continue;
                }
                for k in 0..n {
                    out[k] += w * self.get(i, j, k);
                }
            }
        }
        Ok(out)
    }

    /// Matrix of `ad X`, whose column `j` is `[X, e_j]`.
    pub fn ad(&self, x: &Vector) -> Result<Operator> {
        self.check_dim(x.len())?;
        let n = self.dim;
        Ok(DMatrix::from_fn(n, n, |k, j| {
            (0..n).map(|i| x[i] * self.get(i, j, k)).sum()
        }))
    }

    /// Matrix of `ad e_i`.
    pub fn ad_basis(&self, i: usize) -> Operator {
        let n = self.dim;
        DMatrix::from_fn(n, n, |k, j| self.get(i, j, k))
    }

    /// Max-norm of `Jac(e_i, e_j, e_k)` over all basis triples.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    for m in 0..n {
                        let mut s = 0.0;
                        for p in 0..n {
                            s += self.get(i, j, p) * self.get(p, k, m)
                                + self.get(j, k, p) * self.get(p, i, m)
                                + self.get(k, i, p) * self.get(p, j, m);
                        }
                        worst = worst.max(s.abs());
                    }
                }
            }
        }
        worst
    }

    /// Checks the Jacobi identity on the unit-normalized bracket.
    pub fn validate(&self) -> Result<()> {
        let norm = self.norm();
        if norm == 0.0 {
            return Ok(());
        }
        let residual = self.jacobi_residual() / (norm * norm);
        if residual > JACOBI_TOL {
            return Err(Error::NotLie(residual));
        }
        Ok(())
    }

    /// Jacobi plus nilpotency, as required of nilradical data.
    pub fn validate_nilpotent(&self) -> Result<()> {
        self.validate()?;
        self.descending_central_decomposition().map(|_| ())
    }

    /// `|lambda| = sqrt(sum c_ijk^2)` summed over ordered pairs `(i, j)`.
    pub fn norm(&self) -> f64 {
        self.c.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            dim: self.dim,
            c: self.c.iter().map(|v| v * t).collect(),
        }
    }

    /// Returns `(t lambda, t)` with `|t lambda| = target`.
    pub fn normalized(&self, target: f64) -> Result<(Self, f64)> {
        if !(target > 0.0) || !target.is_finite() {
            return Err(Error::Domain(format!("normalization target {target}")));
        }
        let norm = self.norm();
        if norm == 0.0 {
            return Err(Error::Degenerate("cannot normalize the zero bracket"));
        }
        let t = target / norm;
        Ok((self.scaled(t), t))
    }

    /// `(h . lambda)(X, Y) = h lambda(h^-1 X, h^-1 Y)`.
    pub fn act(&self, h: &Operator) -> Result<Self> {
        self.check_dim(h.nrows())?;
        let g = linalg::checked_inverse(h)?;
        let n = self.dim;
        let mut t1 = vec![0.0; n * n * n];
        for p in 0..n {
            for q in 0..n {
                for k in 0..n {
                    let mut s = 0.0;
                    for r in 0..n {
                        s += self.get(p, q, r) * h[(k, r)];
                    }
                    t1[(p * n + q) * n + k] = s;
                }
            }
        }
        let mut t2 = vec![0.0; n * n * n];
        for p in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut s = 0.0;
                    for q in 0..n {
                        s += g[(q, j)] * t1[(p * n + q) * n + k];
                    }
                    t2[(p * n + j) * n + k] = s;
                }
            }
        }
        let mut c = vec![0.0; n * n * n];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut s = 0.0;
                    for p in 0..n {
                        s += g[(p, i)] * t2[(p * n + j) * n + k];
                    }
                    c[(i * n + j) * n + k] = s;
                }
            }
        }
        // restore exact antisymmetry lost to rounding
        for i in 0..n {
            for j in i..n {
                for k in 0..n {
                    let (ijk, jik) = ((i * n + j) * n + k, (j * n + i) * n + k);
                    let v = 0.5 * (c[ijk] - c[jik]);
                    c[ijk] = v;
                    c[jik] = -v;
                }
            }
        }
        Ok(Self { dim: n, c })
    }

    /// Max over basis pairs of `|D[e_i,e_j] - [De_i,e_j] - [e_i,De_j]|`.
    pub fn derivation_residual(&self, d: &Operator) -> Result<f64> {
        self.check_dim(d.nrows())?;
        self.check_dim(d.ncols())?;
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                for k in 0..n {
                    let mut s = 0.0;
                    for r in 0..n {
                        s += d[(k, r)] * self.get(i, j, r)
                            - d[(r, i)] * self.get(r, j, k)
                            - d[(r, j)] * self.get(i, r, k);
                    }
                    worst = worst.max(s.abs());
                }
            }
        }
        Ok(worst)
    }

    /// Orthonormal basis of `Der(lambda)` inside `gl(n)` (Frobenius inner
    /// product), computed as the null space of the derivation equations.
    pub fn derivation_algebra(&self) -> Vec<Operator> {
        let n = self.dim;
        let rows = n * n * n;
        let mut l = DMatrix::zeros(rows.max(1), n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let row = (i * n + j) * n + k;
                    for b in 0..n {
                        // D[k][b] c[i][j][b]
                        l[(row, k * n + b)] += self.get(i, j, b);
                    }
                    for a in 0..n {
                        // -D[a][i] c[a][j][k]
                        l[(row, a * n + i)] -= self.get(a, j, k);
                        // -D[a][j] c[i][a][k]
                        l[(row, a * n + j)] -= self.get(i, a, k);
                    }
                }
            }
        }
        let tol = RANK_TOL * self.norm().max(1.0);
        let ns = linalg::null_space(&l, tol);
        ns.column_iter()
            .map(|col| DMatrix::from_fn(n, n, |a, b| col[a * n + b]))
            .collect()
    }

    /// Orthogonal decomposition `n = n_1 + ... + n_k` adapted to the
    /// descending central series.
    pub fn descending_central_decomposition(&self) -> Result<CentralSeriesBlocks> {
        let n = self.dim;
        let mut series: Vec<DMatrix<f64>> = vec![DMatrix::identity(n, n)];
        loop {
            let current = series.last().expect("nonempty");
            let d = current.ncols();
            if d == 0 {
                break;
            }
            let mut images = DMatrix::zeros(n, n * d);
            for i in 0..n {
                for (col, v) in current.column_iter().enumerate() {
                    let v: Vector = v.into_owned();
                    let mut w = Vector::zeros(n);
                    for j in 0..n {
                        if v[j] == 0.0 {
                            continue;
                        }
                        for k in 0..n {
                            w[k] += v[j] * self.get(i, j, k);
                        }
                    }
                    images.set_column(i * d + col, &w);
                }
            }
            let next = linalg::range_basis_abs(&images, RANK_TOL * self.norm());
            if next.ncols() >= d {
                return Err(Error::NotNilpotent(d));
            }
            series.push(next);
        }

        let mut blocks = Vec::with_capacity(series.len() - 1);
        for w in series.windows(2) {
            let (outer, inner) = (&w[0], &w[1]);
            let proj = DMatrix::<f64>::identity(n, n) - inner * inner.transpose();
            let complement = &proj * outer;
            let k = outer.ncols() - inner.ncols();
            blocks.push(linalg::top_left_singular(&complement, k));
        }
        let dims = blocks.iter().map(|b| b.ncols()).collect();
        Ok(CentralSeriesBlocks { blocks, dims })
    }
}

/// Orthonormal bases of the blocks `n_1, ..., n_k`, with
/// `n_{i+1} + ... + n_k` the `i`-th derived term `C^{i+1}(n)`.
#[derive(Debug, Clone)]
pub struct CentralSeriesBlocks {
    /// Each block is an `n x d_i` matrix with orthonormal columns.
    pub blocks: Vec<DMatrix<f64>>,
    pub dims: Vec<usize>,
}

impl CentralSeriesBlocks {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Orthogonal projector onto block `i`.
    pub fn projector(&self, i: usize) -> Operator {
        &self.blocks[i] * self.blocks[i].transpose()
    }

    /// Orthonormal basis of `n_i + ... + n_k` (the tail starting at `i`).
    pub fn tail(&self, i: usize) -> DMatrix<f64> {
        let n = self.blocks.first().map_or(0, |b| b.nrows());
        let cols: usize = self.dims[i..].iter().sum();
        let mut out = DMatrix::zeros(n, cols);
        let mut at = 0;
        for b in &self.blocks[i..] {
            out.columns_mut(at, b.ncols()).copy_from(b);
            at += b.ncols();
        }
        out
    }

    /// The operator acting as `weights[i]` on block `i`.
    pub fn block_scalar(&self, weights: &[f64]) -> Operator {
        let n = self.blocks.first().map_or(0, |b| b.nrows());
        let mut out = DMatrix::zeros(n, n);
        for (b, w) in self.blocks.iter().zip(weights) {
            out += (b * b.transpose()) * *w;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;

    fn e(n: usize, i: usize) -> Vector {
        let mut v = Vector::zeros(n);
        v[i] = 1.0;
        v
    }

    #[test]
    fn heisenberg_bracket_of_basis_vectors() {
        let h = samples::heisenberg();
        assert_eq!(h.bracket_eval(&e(3, 0), &e(3, 1)).unwrap(), e(3, 2));
        let x = Vector::from_vec(vec![0.3, -1.2, 2.0]);
        assert_eq!(h.bracket_eval(&x, &x).unwrap().norm(), 0.0);
    }

    #[test]
    fn bracket_dimension_mismatch() {
        let h = samples::heisenberg();
        assert!(matches!(
            h.bracket_eval(&e(2, 0), &e(3, 1)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(h.derivation_residual(&Operator::identity(2, 2)).is_err());
    }

    #[test]
    fn derivation_residuals() {
        let h = samples::heisenberg();
        let d = Operator::from_diagonal(&Vector::from_vec(vec![2.0, 2.0, 4.0]));
        assert_eq!(h.derivation_residual(&d).unwrap(), 0.0);
        let d = Operator::from_diagonal(&Vector::from_vec(vec![1.0, 0.0, 0.0]));
        assert_eq!(h.derivation_residual(&d).unwrap(), 1.0);
        let ab = LieBracket::zero(3);
        let any = Operator::from_fn(3, 3, |i, j| (i * 3 + j) as f64 - 2.5);
        assert_eq!(ab.derivation_residual(&any).unwrap(), 0.0);
    }

    #[test]
    fn heisenberg_derivation_algebra_has_dimension_six() {
        // gl(2) on the generators plus the two maps e_i -> e_3.
        let ders = samples::heisenberg().derivation_algebra();
        assert_eq!(ders.len(), 6);
        for d in &ders {
            assert!(samples::heisenberg().derivation_residual(d).unwrap() < 1e-12);
        }
    }

    #[test]
    fn grading_action_fixes_heisenberg() {
        let t = 1.7;
        let h = Operator::from_diagonal(&Vector::from_vec(vec![t, t, t * t]));
        let moved = samples::heisenberg().act(&h).unwrap();
        assert!((moved.get(0, 1, 2) - 1.0).abs() < 1e-14);
        assert!((moved.get(1, 0, 2) + 1.0).abs() < 1e-14);
        assert_eq!(
            samples::heisenberg()
                .act(&Operator::identity(3, 3))
                .unwrap(),
            samples::heisenberg()
        );
    }

    #[test]
    fn singular_action_is_rejected() {
        let h = Operator::from_diagonal(&Vector::from_vec(vec![1.0, 0.0, 1.0]));
        assert_eq!(samples::heisenberg().act(&h), Err(Error::Singular));
    }

    #[test]
    fn norms_and_normalization() {
        let h = samples::heisenberg();
        assert!((h.norm() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(LieBracket::zero(4).norm(), 0.0);
        let (h2, t) = h.normalized(2.0).unwrap();
        assert!((t - 2f64.sqrt()).abs() < 1e-15);
        assert!((h2.norm() - 2.0).abs() < 1e-15);
        assert!(matches!(
            LieBracket::zero(3).normalized(2.0),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn central_series_blocks() {
        let ab = LieBracket::zero(4)
            .descending_central_decomposition()
            .unwrap();
        assert_eq!(ab.dims, vec![4]);
        let heis = samples::heisenberg()
            .descending_central_decomposition()
            .unwrap();
        assert_eq!(heis.dims, vec![2, 1]);
        assert!((heis.projector(1) - Operator::from_diagonal(&e(3, 2))).norm() < 1e-12);
        let fil = samples::filiform4()
            .descending_central_decomposition()
            .unwrap();
        assert_eq!(fil.dims, vec![2, 1, 1]);
    }

    #[test]
    fn non_nilpotent_is_rejected() {
        // aff(R): [e1, e2] = e2
        let aff = LieBracket::from_relations(2, &[(0, 1, 1, 1.0)]).unwrap();
        assert!(matches!(
            aff.descending_central_decomposition(),
            Err(Error::NotNilpotent(1))
        ));
    }

    #[test]
    fn non_jacobi_is_rejected() {
        // [e1,e2]=e3, [e2,e3]=e1, [e1,e3]=e1 breaks Jacobi
        let bad = LieBracket::from_relations(3, &[(0, 1, 2, 1.0), (1, 2, 0, 1.0), (0, 2, 0, 1.0)])
            .unwrap();
        assert!(matches!(bad.validate(), Err(Error::NotLie(_))));
    }

    #[test]
    fn antisymmetry_is_enforced_on_raw_tensors() {
        let idx = |i: usize, j: usize, k: usize| (i * 3 + j) * 3 + k;
        let mut c = vec![0.0; 27];
        c[idx(0, 1, 2)] = 1.0;
        c[idx(1, 0, 2)] = -0.5;
        assert!(matches!(
            LieBracket::from_tensor(3, c),
            Err(Error::NotAntisymmetric(_))
        ));
    }
}
