//! Ricci curvature of left-invariant metrics.
//!
//! Three routes are provided: the nilmanifold Ricci operator, the block
//! formulas for rank-one and abelian-nilradical solvmanifolds, and a generic
//! oracle `Ric = M - B/2 - S(ad H)` valid for any metric Lie algebra. The
//! block formulas are checked against the generic oracle in tests.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::LieBracket;
use crate::linalg::{self, Operator, Vector};

/// Tolerance for derivation and commutation checks at construction,
/// relative to the size of the data.
pub const DATA_TOL: f64 = 1e-9;
/// `|Ric|^2` at or below this counts as flat.
pub const FLAT_TOL: f64 = 1e-24;

/// `(A, lambda)`: `A = ad Y|_n` and the bracket of the codimension-one
/// nilradical `n`, for the orthonormal basis `{Y, e_1, ..., e_{n}}` of
/// `s = R Y + n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneData {
    a: Operator,
    bracket: LieBracket,
}

impl RankOneData {
    /// Validates that `lambda` is a nilpotent Lie bracket and `A` a
    /// derivation of it.
    pub fn new(a: Operator, bracket: LieBracket) -> Result<Self> {
        let data = Self::new_unchecked(a, bracket)?;
        data.bracket.validate_nilpotent()?;
        let residual = data.bracket.derivation_residual(&data.a)?;
        let scale = (data.a.norm() * data.bracket.norm()).max(1.0);
        if residual > DATA_TOL * scale {
            return Err(Error::NotDerivation(residual));
        }
        Ok(data)
    }

    /// Only checks shapes and finiteness.
    pub fn new_unchecked(a: Operator, bracket: LieBracket) -> Result<Self> {
        if !a.is_square() || a.nrows() != bracket.dim() {
            return Err(Error::DimensionMismatch {
                expected: bracket.dim(),
                got: a.nrows().max(a.ncols()),
            });
        }
        linalg::check_finite(&a)?;
        Ok(Self { a, bracket })
    }

    pub fn a(&self) -> &Operator {
        &self.a
    }

    pub fn bracket(&self) -> &LieBracket {
        &self.bracket
    }

    pub fn dim_n(&self) -> usize {
        self.bracket.dim()
    }

    /// Multiplies every structure constant of `s` by `t`; this is the
    /// metric rescaling `<,> -> t^-2 <,>`.
    pub fn scaled(&self, t: f64) -> Self {
        Self {
            a: &self.a * t,
            bracket: self.bracket.scaled(t),
        }
    }

    /// Rescales so that `|lambda| = 2`.
    pub fn normalized(&self) -> Result<Self> {
        let (_, t) = self
            .bracket
            .normalized(2.0)
            .map_err(|_| Error::FlatNilradical)?;
        Ok(self.scaled(t))
    }

    /// Structure constants of `s`, with `Y` as basis vector 0.
    pub fn solvable_bracket(&self) -> LieBracket {
        let n = self.dim_n();
        let m = n + 1;
        let mut c = vec![0.0; m * m * m];
        let at = |i: usize, j: usize, k: usize| (i * m + j) * m + k;
        for j in 0..n {
            for k in 0..n {
                c[at(0, j + 1, k + 1)] = self.a[(k, j)];
                c[at(j + 1, 0, k + 1)] = -self.a[(k, j)];
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    c[at(i + 1, j + 1, k + 1)] = self.bracket.get(i, j, k);
                }
            }
        }
        LieBracket::from_tensor(m, c).expect("antisymmetric by construction")
    }
}

/// Commuting `r`-tuple `(A_1, ..., A_r)` on an abelian nilradical, for
/// `s = a + n` with `a` orthonormally spanned by `Y_1, ..., Y_r` and
/// `a` orthogonal to `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct AbelianNilData {
    ops: Vec<Operator>,
}

impl AbelianNilData {
    pub fn new(ops: Vec<Operator>) -> Result<Self> {
        let data = Self::new_unchecked(ops)?;
        let scale = data
            .ops
            .iter()
            .map(|a| a.norm())
            .fold(0.0, f64::max)
            .max(1.0);
        let comm = data.commutator_residual();
        if comm > DATA_TOL * scale * scale {
            return Err(Error::NotCommuting(comm));
        }
        let n = data.dim_n();
        let stacked = DMatrix::from_fn(n * n, data.ops.len(), |p, i| data.ops[i][(p / n, p % n)]);
        if linalg::numerical_rank(&stacked, DATA_TOL) < data.ops.len() {
            return Err(Error::LinearlyDependent);
        }
        Ok(data)
    }

    pub fn new_unchecked(ops: Vec<Operator>) -> Result<Self> {
        let first = ops
            .first()
            .ok_or(Error::Degenerate("empty operator tuple"))?;
        let n = first.nrows();
        for a in &ops {
            if !a.is_square() || a.nrows() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: a.nrows().max(a.ncols()),
                });
            }
            linalg::check_finite(a)?;
        }
        Ok(Self { ops })
    }

    pub fn ops(&self) -> &[Operator] {
        &self.ops
    }

    pub fn dim_a(&self) -> usize {
        self.ops.len()
    }

    pub fn dim_n(&self) -> usize {
        self.ops[0].nrows()
    }

    /// Max over pairs of `|[A_i, A_j]|`.
    pub fn commutator_residual(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.ops.len() {
            for j in (i + 1)..self.ops.len() {
                worst = worst.max(linalg::commutator(&self.ops[i], &self.ops[j]).norm());
            }
        }
        worst
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            ops: self.ops.iter().map(|a| a * t).collect(),
        }
    }

    /// Gram matrix `tr S(A_i) S(A_j)`.
    pub fn gram(&self) -> DMatrix<f64> {
        let syms: Vec<Operator> = self.ops.iter().map(linalg::sym).collect();
        let r = syms.len();
        DMatrix::from_fn(r, r, |i, j| linalg::inner(&syms[i], &syms[j]))
    }

    pub fn traces(&self) -> Vector {
        Vector::from_iterator(self.ops.len(), self.ops.iter().map(|a| a.trace()))
    }

    /// Structure constants of `s = a + n`, with `Y_i` as basis vectors
    /// `0..r`.
    pub fn solvable_bracket(&self) -> LieBracket {
        let r = self.dim_a();
        let n = self.dim_n();
        let m = r + n;
        let mut c = vec![0.0; m * m * m];
        let at = |i: usize, j: usize, k: usize| (i * m + j) * m + k;
        for (i, a) in self.ops.iter().enumerate() {
            for j in 0..n {
                for k in 0..n {
                    c[at(i, r + j, r + k)] = a[(k, j)];
                    c[at(r + j, i, r + k)] = -a[(k, j)];
                }
            }
        }
        LieBracket::from_tensor(m, c).expect("antisymmetric by construction")
    }
}

/// Curvature summary of a left-invariant metric.
#[derive(Debug, Clone, Serialize)]
pub struct RicciReport {
    #[serde(serialize_with = "linalg::serialize_rows")]
    pub ric: Operator,
    pub scal: f64,
    pub ric_norm_sq: f64,
    /// `scal^2 / |Ric|^2`; `None` for flat metrics.
    pub f: Option<f64>,
    /// Remainder `G` of the rank-one denominator; only for rank-one data.
    pub g: Option<f64>,
}

impl RicciReport {
    pub fn from_ricci(ric: Operator) -> Self {
        let scal = ric.trace();
        let ric_norm_sq = linalg::frob_sq(&ric);
        let f = pinching_f(&ric).ok();
        Self {
            ric,
            scal,
            ric_norm_sq,
            f,
            g: None,
        }
    }

    pub fn is_flat(&self) -> bool {
        self.f.is_none()
    }
}

/// `<M X, Y> = -1/2 sum <[X,e_i],e_j><[Y,e_i],e_j> + 1/4 sum <[e_i,e_j],X><[e_i,e_j],Y>`.
fn m_operator(bracket: &LieBracket) -> Operator {
    let n = bracket.dim();
    let mut m = Operator::zeros(n, n);
    for p in 0..n {
        for q in p..n {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += -0.5 * bracket.get(p, i, j) * bracket.get(q, i, j)
                        + 0.25 * bracket.get(i, j, p) * bracket.get(i, j, q);
                }
            }
            m[(p, q)] = s;
            m[(q, p)] = s;
        }
    }
    m
}

/// Ricci operator of a nilmanifold.
pub fn nil_ricci(bracket: &LieBracket) -> Operator {
    m_operator(bracket)
}

/// Mean curvature vector: `<H, X> = tr ad X`.
pub fn mean_curvature_vector(bracket: &LieBracket) -> Vector {
    let n = bracket.dim();
    Vector::from_fn(n, |p, _| (0..n).map(|i| bracket.get(p, i, i)).sum())
}

/// Killing form `tr(ad e_p ad e_q)`.
pub fn killing_form(bracket: &LieBracket) -> Operator {
    let n = bracket.dim();
    let ads: Vec<Operator> = (0..n).map(|p| bracket.ad_basis(p)).collect();
    DMatrix::from_fn(n, n, |p, q| (&ads[p] * &ads[q]).trace())
}

/// Ricci operator of any metric Lie algebra given in an orthonormal basis:
/// `Ric = M - B/2 - S(ad H)`.
pub fn generic_ricci(bracket: &LieBracket) -> Result<Operator> {
    bracket.validate()?;
    Ok(generic_ricci_unchecked(bracket))
}

/// [`generic_ricci`] without the Jacobi check, for brackets known to be Lie
/// (or when the formula is only used as a residual).
pub fn generic_ricci_unchecked(bracket: &LieBracket) -> Operator {
    let m = m_operator(bracket);
    let b = killing_form(bracket);
    let h = mean_curvature_vector(bracket);
    let ad_h = bracket.ad(&h).expect("dimensions agree");
    m - b * 0.5 - linalg::sym(&ad_h)
}

pub fn generic_report(bracket: &LieBracket) -> Result<RicciReport> {
    Ok(RicciReport::from_ricci(generic_ricci(bracket)?))
}

/// Diagonal blocks of the rank-one Ricci operator:
/// `(-tr S(A)^2, Ric_lambda + [A, A^t]/2 - (tr A) S(A))`.
pub fn rank_one_ricci_blocks(d: &RankOneData) -> (f64, Operator) {
    let s = linalg::sym(d.a());
    let corner = -linalg::frob_sq(&s);
    let nblock = nil_ricci(d.bracket()) + linalg::self_commutator(d.a()) * 0.5 - s * d.a().trace();
    (corner, nblock)
}

/// Mixed entries `<Ric Y, e_j> = -<S(A), ad_n e_j>`; they vanish when `S(A)`
/// preserves a grading of `n`, e.g. at a soliton.
pub fn rank_one_ricci_mixed(d: &RankOneData) -> Vector {
    let s = linalg::sym(d.a());
    let n = d.dim_n();
    Vector::from_fn(n, |j, _| -linalg::inner(&s, &d.bracket().ad_basis(j)))
}

/// Full rank-one Ricci operator assembled from the block formulas, with `Y`
/// as basis vector 0.
pub fn rank_one_ricci(d: &RankOneData) -> Operator {
    let n = d.dim_n();
    let (corner, nblock) = rank_one_ricci_blocks(d);
    let mixed = rank_one_ricci_mixed(d);
    let mut ric = Operator::zeros(n + 1, n + 1);
    ric[(0, 0)] = corner;
    ric.view_mut((1, 1), (n, n)).copy_from(&nblock);
    for j in 0..n {
        ric[(0, j + 1)] = mixed[j];
        ric[(j + 1, 0)] = mixed[j];
    }
    ric
}

/// Terms of the rank-one `|Ric|^2` decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankOneTerms {
    /// `tr S(A)^2`
    pub tr_sym_sq: f64,
    /// `(tr A)^2`
    pub tr_sq: f64,
    /// `|Ric_lambda|^2`
    pub nil_ric_norm_sq: f64,
    /// `|[A, A^t]|^2 / 4`
    pub comm_term: f64,
}

impl RankOneTerms {
    pub fn of(d: &RankOneData) -> Self {
        let s = linalg::sym(d.a());
        Self {
            tr_sym_sq: linalg::frob_sq(&s),
            tr_sq: d.a().trace().powi(2),
            nil_ric_norm_sq: linalg::frob_sq(&nil_ricci(d.bracket())),
            comm_term: 0.25 * linalg::frob_sq(&linalg::self_commutator(d.a())),
        }
    }

    /// The explicit part of the denominator, without `G`.
    pub fn explicit_denominator(&self) -> f64 {
        self.tr_sym_sq * (self.tr_sym_sq + self.tr_sq) + self.nil_ric_norm_sq + self.comm_term
    }
}

/// Generic-oracle report for rank-one data, including the remainder `G`.
pub fn rank_one_report(d: &RankOneData) -> Result<RicciReport> {
    let mut report = generic_report(&d.solvable_bracket())?;
    let terms = RankOneTerms::of(d);
    report.g = Some(report.ric_norm_sq - terms.explicit_denominator());
    Ok(report)
}

/// Block-diagonal Ricci operator of abelian-nilradical data.
pub fn abelian_ricci(d: &AbelianNilData) -> Operator {
    let r = d.dim_a();
    let n = d.dim_n();
    let gram = d.gram();
    let mut nblock = Operator::zeros(n, n);
    for a in d.ops() {
        nblock += linalg::self_commutator(a) * 0.5 - linalg::sym(a) * a.trace();
    }
    let mut ric = Operator::zeros(r + n, r + n);
    ric.view_mut((0, 0), (r, r)).copy_from(&(-gram));
    ric.view_mut((r, r), (n, n)).copy_from(&nblock);
    ric
}

pub fn abelian_report(d: &AbelianNilData) -> RicciReport {
    RicciReport::from_ricci(abelian_ricci(d))
}

/// The Ricci pinching functional `scal^2 / |Ric|^2`.
pub fn pinching_f(ric: &Operator) -> Result<f64> {
    let norm_sq = linalg::frob_sq(ric);
    if !(norm_sq > FLAT_TOL) {
        return Err(Error::Flat);
    }
    Ok(ric.trace().powi(2) / norm_sq)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn diag(v: &[f64]) -> Operator {
        Operator::from_diagonal(&Vector::from_vec(v.to_vec()))
    }

    /// Double sum written straight from the definition, over ordered index
    /// pairs and without symmetry shortcuts.
    fn nil_ricci_oracle(b: &LieBracket) -> Operator {
        let n = b.dim();
        Operator::from_fn(n, n, |p, q| {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s -= 0.5 * b.get(p, i, j) * b.get(q, i, j);
                    s += 0.25 * b.get(i, j, p) * b.get(i, j, q);
                }
            }
            s
        })
    }

    #[test]
    fn heisenberg_ricci() {
        assert_eq!(nil_ricci(&samples::heisenberg()), diag(&[-0.5, -0.5, 0.5]));
        assert_eq!(
            nil_ricci_oracle(&samples::heisenberg()),
            diag(&[-0.5, -0.5, 0.5])
        );
        let (h2, _) = samples::heisenberg().normalized(2.0).unwrap();
        let ric = nil_ricci(&h2);
        assert!((ric - diag(&[-1.0, -1.0, 1.0])).norm() < 1e-15);
        assert_eq!(nil_ricci(&LieBracket::zero(3)), Operator::zeros(3, 3));
    }

    #[test]
    fn trace_identity_on_random_brackets() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let n = rand::Rng::random_range(&mut rng, 3..=6);
            let b = samples::random_nilpotent(&mut rng, n).scaled(0.7);
            let ric = nil_ricci(&b);
            assert!((ric.trace() + 0.25 * b.norm().powi(2)).abs() < 1e-10);
            assert!((&ric - nil_ricci_oracle(&b)).norm() < 1e-12);
            assert!((&ric - ric.transpose()).norm() == 0.0);
        }
    }

    #[test]
    fn rank_one_blocks_heisenberg_soliton() {
        let d = samples::heisenberg_soliton();
        let (corner, nblock) = rank_one_ricci_blocks(&d);
        assert!((corner + 3.0).abs() < 1e-14);
        assert!((nblock + Operator::identity(3, 3) * 3.0).norm() < 1e-14);
    }

    #[test]
    fn rank_one_blocks_with_zero_operator() {
        let (h2, _) = samples::heisenberg().normalized(2.0).unwrap();
        let d = RankOneData::new(Operator::zeros(3, 3), h2.clone()).unwrap();
        let (corner, nblock) = rank_one_ricci_blocks(&d);
        assert_eq!(corner, 0.0);
        assert_eq!(nblock, nil_ricci(&h2));
    }

    #[test]
    fn generic_matches_blocks_for_heisenberg_soliton() {
        let d = samples::heisenberg_soliton();
        let report = rank_one_report(&d).unwrap();
        assert!((&report.ric + Operator::identity(4, 4) * 3.0).norm() < 1e-13);
        assert!((report.scal + 12.0).abs() < 1e-13);
        assert!((report.ric_norm_sq - 36.0).abs() < 1e-12);
        assert!((report.f.unwrap() - 4.0).abs() < 1e-13);
        assert!(report.g.unwrap().abs() < 1e-12);
    }

    #[test]
    fn abelian_formula_examples() {
        // hyperbolic plane
        let d = AbelianNilData::new(vec![diag(&[1.0])]).unwrap();
        let ric = abelian_ricci(&d);
        assert_eq!(ric, diag(&[-1.0, -1.0]));
        assert_eq!(pinching_f(&ric).unwrap(), 2.0);

        let d = samples::diagonal_pair();
        assert_eq!(abelian_ricci(&d), diag(&[-1.0, -1.0, -1.0, -1.0]));

        let skew = Operator::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        let d = AbelianNilData::new(vec![skew]).unwrap();
        assert_eq!(abelian_ricci(&d), Operator::zeros(3, 3));
    }

    #[test]
    fn hyperbolic_plane_from_generic_oracle() {
        let d = AbelianNilData::new(vec![diag(&[1.0])]).unwrap();
        let ric = generic_ricci(&d.solvable_bracket()).unwrap();
        assert!((ric - diag(&[-1.0, -1.0])).norm() < 1e-15);
    }

    #[test]
    fn pinching_values() {
        assert_eq!(pinching_f(&(Operator::identity(4, 4) * -3.0)).unwrap(), 4.0);
        assert_eq!(pinching_f(&diag(&[1.0, -1.0])).unwrap(), 0.0);
        assert!((pinching_f(&diag(&[-1.0, -1.0, 1.0])).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(pinching_f(&Operator::zeros(3, 3)), Err(Error::Flat));
    }

    #[test]
    fn flat_abelian_algebra() {
        let report = generic_report(&LieBracket::zero(4)).unwrap();
        assert!(report.is_flat());
        assert_eq!(report.ric, Operator::zeros(4, 4));
    }

    #[test]
    fn generic_rejects_non_lie() {
        let bad = LieBracket::from_relations(3, &[(0, 1, 2, 1.0), (1, 2, 0, 1.0), (0, 2, 0, 1.0)])
            .unwrap();
        assert!(matches!(generic_ricci(&bad), Err(Error::NotLie(_))));
    }

    #[test]
    fn rank_one_data_rejects_non_derivation() {
        let (h2, _) = samples::heisenberg().normalized(2.0).unwrap();
        assert!(matches!(
            RankOneData::new(Operator::identity(3, 3), h2),
            Err(Error::NotDerivation(_))
        ));
    }

    #[test]
    fn abelian_data_validation() {
        let a = Operator::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let b = Operator::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 0.0]);
        assert!(matches!(
            AbelianNilData::new(vec![a.clone(), b]),
            Err(Error::NotCommuting(_))
        ));
        assert_eq!(
            AbelianNilData::new(vec![a.clone(), a * 2.0]),
            Err(Error::LinearlyDependent)
        );
        assert!(AbelianNilData::new(vec![]).is_err());
    }
}
