//! Standard algebras, soliton fixtures and random generators used by tests,
//! benchmarks and the command-line front-end.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::curvature::{AbelianNilData, RankOneData};
use crate::lie::LieBracket;
use crate::linalg::{self, Operator, Vector};

/// `[e_1, e_2] = e_3` with unit coefficient.
pub fn heisenberg() -> LieBracket {
    LieBracket::from_relations(3, &[(0, 1, 2, 1.0)]).expect("valid relations")
}

/// `[e_1, e_2] = e_3`, `[e_1, e_3] = e_4`.
pub fn filiform4() -> LieBracket {
    LieBracket::from_relations(4, &[(0, 1, 2, 1.0), (0, 2, 3, 1.0)]).expect("valid relations")
}

/// Five-dimensional Heisenberg algebra `[e_1, e_2] = [e_3, e_4] = e_5`.
pub fn heisenberg5() -> LieBracket {
    LieBracket::from_relations(5, &[(0, 1, 4, 1.0), (2, 3, 4, 1.0)]).expect("valid relations")
}

/// Free two-step nilpotent algebra on three generators (dimension six).
pub fn free_two_step3() -> LieBracket {
    LieBracket::from_relations(6, &[(0, 1, 3, 1.0), (0, 2, 4, 1.0), (1, 2, 5, 1.0)])
        .expect("valid relations")
}

/// Five-dimensional filiform `L_5`: `[e_1, e_i] = e_{i+1}`, `i = 2, 3, 4`.
pub fn filiform5() -> LieBracket {
    LieBracket::from_relations(5, &[(0, 1, 2, 1.0), (0, 2, 3, 1.0), (0, 3, 4, 1.0)])
        .expect("valid relations")
}

/// Heisenberg rank-one solvsoliton: `|lambda| = 2`, `A = diag(1, 1, 2)/sqrt 2`.
pub fn heisenberg_soliton() -> RankOneData {
    let (bracket, _) = heisenberg().normalized(2.0).expect("nonzero");
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let a = Operator::from_diagonal(&Vector::from_vec(vec![s, s, 2.0 * s]));
    RankOneData::new(a, bracket).expect("valid rank-one data")
}

/// Real hyperbolic space of dimension `n + 1` as `R Y + R^n` with
/// `A = I / sqrt n`, so that `tr S(A)^2 = 1`.
pub fn hyperbolic(n: usize) -> AbelianNilData {
    let a = Operator::identity(n, n) / (n as f64).sqrt();
    AbelianNilData::new(vec![a]).expect("valid abelian data")
}

/// `A_1 = diag(1, 0)`, `A_2 = diag(0, 1)` on `R^2` (a product of two
/// hyperbolic planes).
pub fn diagonal_pair() -> AbelianNilData {
    let a1 = Operator::from_diagonal(&Vector::from_vec(vec![1.0, 0.0]));
    let a2 = Operator::from_diagonal(&Vector::from_vec(vec![0.0, 1.0]));
    AbelianNilData::new(vec![a1, a2]).expect("valid abelian data")
}

pub fn gaussian_matrix<R: Rng + ?Sized>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    sigma: f64,
) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        let z: f64 = StandardNormal.sample(rng);
        sigma * z
    })
}

pub fn gaussian_vector<R: Rng + ?Sized>(rng: &mut R, n: usize, sigma: f64) -> Vector {
    Vector::from_fn(n, |_, _| {
        let z: f64 = StandardNormal.sample(rng);
        sigma * z
    })
}

/// `exp(E)` with `E` entrywise `N(0, sigma^2)`; always invertible.
pub fn random_invertible<R: Rng + ?Sized>(rng: &mut R, n: usize, sigma: f64) -> Operator {
    linalg::expm(&gaussian_matrix(rng, n, n, sigma))
}

/// Random orthogonal matrix from the QR factorization of a Gaussian matrix.
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Operator {
    let qr = gaussian_matrix(rng, n, n, 1.0).qr();
    let (q, r) = qr.unpack();
    let signs = Vector::from_fn(n, |i, _| if r[(i, i)] < 0.0 { -1.0 } else { 1.0 });
    q * Operator::from_diagonal(&signs)
}

/// Random two-step nilpotent bracket with `gens` generators and a center of
/// dimension `center`; any such tensor satisfies Jacobi.
pub fn random_two_step<R: Rng + ?Sized>(rng: &mut R, gens: usize, center: usize) -> LieBracket {
    let mut rel = Vec::new();
    for i in 0..gens {
        for j in (i + 1)..gens {
            for k in 0..center {
                let z: f64 = StandardNormal.sample(rng);
                rel.push((i, j, gens + k, z));
            }
        }
    }
    LieBracket::from_relations(gens + center, &rel).expect("valid relations")
}

/// Random non-abelian nilpotent bracket of dimension `n` (3..=6): a random
/// two-step bracket or a known algebra moved by a random invertible map.
pub fn random_nilpotent<R: Rng + ?Sized>(rng: &mut R, n: usize) -> LieBracket {
    assert!((3..=6).contains(&n), "supported dimensions are 3..=6");
    let base = match (n, rng.random_range(0..3)) {
        (3, _) => heisenberg(),
        (4, 0) => filiform4(),
        (5, 0) => filiform5(),
        (5, 1) => heisenberg5(),
        (6, 0) => free_two_step3(),
        _ => {
            let gens = rng.random_range(2..n);
            random_two_step(rng, gens, n - gens)
        }
    };
    let h = random_invertible(rng, n, 0.4);
    let moved = base.act(&h).expect("exp is invertible");
    moved.normalized(2.0).expect("non-abelian").0
}

/// Random element of `Der(lambda)` with Frobenius norm `scale`.
pub fn random_derivation<R: Rng + ?Sized>(
    rng: &mut R,
    bracket: &LieBracket,
    scale: f64,
) -> Operator {
    let basis = bracket.derivation_algebra();
    let n = bracket.dim();
    let mut d = Operator::zeros(n, n);
    for b in &basis {
        let z: f64 = StandardNormal.sample(rng);
        d += b * z;
    }
    let norm = d.norm();
    if norm == 0.0 {
        d
    } else {
        d * (scale / norm)
    }
}

/// Random rank-one data with `dim n` in 3..=6, `|lambda| = 2` and `|A| <= 10`.
pub fn random_rank_one<R: Rng + ?Sized>(rng: &mut R) -> RankOneData {
    let n = rng.random_range(3..=6);
    let bracket = random_nilpotent(rng, n);
    let scale = rng.random_range(0.1..10.0);
    let a = random_derivation(rng, &bracket, scale);
    RankOneData::new(a, bracket).expect("derivation of a nilpotent bracket")
}

/// Random commuting, linearly independent tuple `A_i = P diag(d_i) P^-1`,
/// with `r <= n`; operators are rescaled so that `|A_i| <= 10`.
pub fn random_abelian<R: Rng + ?Sized>(rng: &mut R, r: usize, n: usize) -> AbelianNilData {
    assert!(r >= 1 && r <= n, "need 1 <= r <= n");
    loop {
        let p = if rng.random_bool(0.3) {
            random_orthogonal(rng, n)
        } else {
            random_invertible(rng, n, 0.5)
        };
        let pinv = linalg::checked_inverse(&p).expect("exp is invertible");
        let ops: Vec<Operator> = (0..r)
            .map(|_| {
                let d = gaussian_vector(rng, n, 1.0);
                let a = &p * Operator::from_diagonal(&d) * &pinv;
                let norm = a.norm();
                a * (rng.random_range(0.1..10.0) / norm)
            })
            .collect();
        if let Ok(data) = AbelianNilData::new(ops) {
            return data;
        }
    }
}
