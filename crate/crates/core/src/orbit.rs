//! Metric moves on rank-one and abelian-nilradical data, and a multi-start
//! search for the maximum of `F` over them.
//!
//! A rank-one move `(c, X, h)` is the isomorphism
//! `Y -> Y/c + X`, `v -> h v` of `s = R Y + n`; it sends `(A, lambda)` to
//! `(c h (A - ad h^-1 X) h^-1, h . lambda)`. An abelian move `(h1, h2)` acts
//! block-diagonally on `a + n`. Every moved metric is isometric to some
//! left-invariant metric on the same group, and conversely.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::curvature::{self, AbelianNilData, RankOneData};
use crate::error::{Error, Result};
use crate::linalg::{self, Operator, Vector};
use crate::optim;
use crate::samples;
use crate::soliton::{self, SolitonCertificate};

/// `(c, X, h)` acting on rank-one data.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneMove {
    pub c: f64,
    pub x: Vector,
    pub h: Operator,
}

impl RankOneMove {
    pub fn identity(n: usize) -> Self {
        Self {
            c: 1.0,
            x: Vector::zeros(n),
            h: Operator::identity(n, n),
        }
    }

    pub fn scalar(n: usize, c: f64) -> Self {
        Self {
            c,
            ..Self::identity(n)
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.c == 0.0 || !self.c.is_finite() {
            return Err(Error::Domain(format!("move scalar c = {}", self.c)));
        }
        if self.x.len() != n || self.h.nrows() != n || self.h.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.x.len().max(self.h.nrows()),
            });
        }
        Ok(())
    }

    /// `h (A - ad_n h^-1 X) h^-1`, without the factor `c`.
    pub fn moved_operator(&self, d: &RankOneData) -> Result<Operator> {
        self.validate(d.dim_n())?;
        let hinv = linalg::checked_inverse(&self.h)?;
        let ad = d.bracket().ad(&(&hinv * &self.x))?;
        Ok(&self.h * (d.a() - ad) * hinv)
    }

    /// The move `other` after `self`, i.e. the product of the block matrices.
    pub fn then(&self, other: &RankOneMove) -> RankOneMove {
        RankOneMove {
            c: self.c * other.c,
            x: &other.x / self.c + &other.h * &self.x,
            h: &other.h * &self.h,
        }
    }
}

/// `(h1, h2)` acting on abelian-nilradical data.
#[derive(Debug, Clone, PartialEq)]
pub struct AbelianMove {
    pub h1: Operator,
    pub h2: Operator,
}

impl AbelianMove {
    pub fn identity(r: usize, n: usize) -> Self {
        Self {
            h1: Operator::identity(r, r),
            h2: Operator::identity(n, n),
        }
    }

    /// `A_i -> h2 (sum_j c_ji A_j) h2^-1` with `[c_ij] = h1^-1`.
    pub fn apply(&self, d: &AbelianNilData) -> Result<AbelianNilData> {
        let (r, n) = (d.dim_a(), d.dim_n());
        if self.h1.nrows() != r || self.h1.ncols() != r {
            return Err(Error::DimensionMismatch {
                expected: r,
                got: self.h1.nrows(),
            });
        }
        if self.h2.nrows() != n || self.h2.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: self.h2.nrows(),
            });
        }
        let c = linalg::checked_inverse(&self.h1)?;
        let h2inv = linalg::checked_inverse(&self.h2)?;
        let ops = (0..r)
            .map(|i| {
                let combo = d
                    .ops()
                    .iter()
                    .enumerate()
                    .fold(Operator::zeros(n, n), |acc, (j, a)| acc + a * c[(j, i)]);
                &self.h2 * combo * &h2inv
            })
            .collect();
        AbelianNilData::new_unchecked(ops)
    }

    /// The move `other` after `self`.
    pub fn then(&self, other: &AbelianMove) -> AbelianMove {
        AbelianMove {
            h1: &other.h1 * &self.h1,
            h2: &other.h2 * &self.h2,
        }
    }
}

/// Tolerance on the derivation residual of moved rank-one data, relative to
/// `|A'| |lambda'|`.
const MOVE_DERIVATION_TOL: f64 = 1e-8;

fn move_rank_one_raw(d: &RankOneData, m: &RankOneMove) -> Result<RankOneData> {
    let op = m.moved_operator(d)? * m.c;
    let bracket = d.bracket().act(&m.h)?;
    let (bracket, t) = bracket.normalized(2.0).map_err(|_| Error::FlatNilradical)?;
    RankOneData::new_unchecked(op * t, bracket)
}

/// Applies the move and renormalizes to `|h . lambda| = 2`, scaling the
/// operator by the same factor.
pub fn apply_move_rank_one(d: &RankOneData, m: &RankOneMove) -> Result<RankOneData> {
    let moved = move_rank_one_raw(d, m)?;
    let residual = moved.bracket().derivation_residual(moved.a())?;
    let scale = (moved.a().norm() * moved.bracket().norm()).max(1.0);
    if residual > MOVE_DERIVATION_TOL * scale {
        return Err(Error::NotDerivation(residual));
    }
    Ok(moved)
}

/// Applies the move; the outputs still commute pairwise.
pub fn apply_move_abelian(d: &AbelianNilData, m: &AbelianMove) -> Result<AbelianNilData> {
    let moved = m.apply(d)?;
    let scale = moved
        .ops()
        .iter()
        .map(|a| a.norm())
        .fold(0.0, f64::max)
        .max(1.0);
    let comm = moved.commutator_residual();
    if comm > MOVE_DERIVATION_TOL * scale * scale {
        return Err(Error::NotCommuting(comm));
    }
    Ok(moved)
}

fn f_moved_rank_one(d: &RankOneData, m: &RankOneMove) -> Option<f64> {
    let moved = move_rank_one_raw(d, m).ok()?;
    curvature::pinching_f(&curvature::generic_ricci_unchecked(
        &moved.solvable_bracket(),
    ))
    .ok()
}

fn f_moved_abelian(d: &AbelianNilData, m: &AbelianMove) -> Option<f64> {
    let moved = m.apply(d).ok()?;
    curvature::pinching_f(&curvature::abelian_ricci(&moved)).ok()
}

// ---------------------------------------------------------------------------
// search

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    RandomSearch,
    GradientAscent,
    Hybrid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub strategy: Strategy,
    /// Random samples (random and hybrid), or ascent starts (gradient).
    pub trials: usize,
    /// Extra ascent starts for the hybrid strategy.
    pub starts: usize,
    /// Iteration cap per ascent.
    pub iters: usize,
    pub seed: u64,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    /// Radii of the Gaussian generators `E` in `h = exp(E)`.
    pub sigmas: Vec<f64>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            strategy: Strategy::Hybrid,
            trials: 10_000,
            starts: 100,
            iters: 500,
            seed: 42,
            threads: None,
            sigmas: vec![0.1, 0.5, 2.0],
        }
    }
}

/// Candidates this close to the soliton value are treated as equality cases.
pub const EQUALITY_GAP: f64 = 1e-7;
/// Gaps below this are a contradiction of the global-maximum property.
pub const ALERT_GAP: f64 = -1e-7;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MoveRecord {
    RankOne {
        c: f64,
        x: Vec<f64>,
        h: Vec<Vec<f64>>,
    },
    Abelian {
        h1: Vec<Vec<f64>>,
        h2: Vec<Vec<f64>>,
    },
}

fn rows(m: &Operator) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

impl From<&RankOneMove> for MoveRecord {
    fn from(m: &RankOneMove) -> Self {
        MoveRecord::RankOne {
            c: m.c,
            x: m.x.iter().copied().collect(),
            h: rows(&m.h),
        }
    }
}

impl From<&AbelianMove> for MoveRecord {
    fn from(m: &AbelianMove) -> Self {
        MoveRecord::Abelian {
            h1: rows(&m.h1),
            h2: rows(&m.h2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchReport {
    pub strategy: Strategy,
    pub best_f: f64,
    pub best_move: MoveRecord,
    pub soliton_f: f64,
    /// `soliton_f - best_f`.
    pub gap: f64,
    /// Random samples plus ascent starts.
    pub trials: usize,
    /// Samples skipped because the move was numerically singular.
    pub skipped: usize,
    pub seed: u64,
    /// Whether the best move's metric certifies as a soliton.
    pub converged_to_soliton: bool,
    /// Candidates with `F >= soliton_f - EQUALITY_GAP`.
    pub equality_cases: usize,
    /// Equality candidates that certify as solitons, directly or after
    /// refinement.
    pub equality_certified: usize,
    /// Largest certificate residual among refined equality candidates.
    pub equality_max_residual: f64,
    /// Largest Euclidean length of a refinement in local coordinates.
    pub equality_max_refinement: f64,
    /// `gap < ALERT_GAP`.
    pub alert: bool,
}

/// Outcome of [`verify_equality_case`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum EqualityCheck {
    Checked {
        f: f64,
        certificate: SolitonCertificate,
    },
    Skipped {
        f: f64,
        soliton_f: f64,
    },
}

impl EqualityCheck {
    pub fn is_certified(&self) -> bool {
        matches!(self, EqualityCheck::Checked { certificate, .. } if certificate.is_soliton())
    }
}

/// Data that can be searched: a certified soliton and its move space.
trait MoveSpace: Sync {
    type Move: Clone + Send + Sync;
    fn soliton_f(&self) -> Result<f64>;
    fn f(&self, m: &Self::Move) -> Option<f64>;
    fn sample(&self, rng: &mut ChaCha8Rng, sigma: f64) -> Self::Move;
    /// Number of local coordinates around a move.
    fn local_dim(&self) -> usize;
    /// The move reached from `m` by local coordinates `theta`.
    fn local(&self, m: &Self::Move, theta: &[f64]) -> Option<Self::Move>;
    fn certify(&self, m: &Self::Move) -> Result<SolitonCertificate>;
    fn record(&self, m: &Self::Move) -> MoveRecord;
}

struct RankOneSpace<'a> {
    d: &'a RankOneData,
    a_norm: f64,
}

impl MoveSpace for RankOneSpace<'_> {
    type Move = RankOneMove;

    fn soliton_f(&self) -> Result<f64> {
        curvature::rank_one_report(self.d)?.f.ok_or(Error::Flat)
    }

    fn f(&self, m: &RankOneMove) -> Option<f64> {
        f_moved_rank_one(self.d, m)
    }

    fn sample(&self, rng: &mut ChaCha8Rng, sigma: f64) -> RankOneMove {
        let n = self.d.dim_n();
        let z: f64 = StandardNormal.sample(rng);
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        RankOneMove {
            c: sign * z.exp(),
            x: samples::gaussian_vector(rng, n, self.a_norm.max(1.0)),
            h: samples::random_invertible(rng, n, sigma),
        }
    }

    fn local_dim(&self) -> usize {
        let n = self.d.dim_n();
        1 + n + n * n
    }

    fn local(&self, m: &RankOneMove, theta: &[f64]) -> Option<RankOneMove> {
        let n = self.d.dim_n();
        let e = Operator::from_fn(n, n, |i, j| theta[1 + n + i * n + j]);
        let h = linalg::expm(&e) * &m.h;
        let x = &m.x + Vector::from_fn(n, |i, _| theta[1 + i]);
        let c = m.c * theta[0].exp();
        h.iter()
            .all(|v| v.is_finite())
            .then_some(RankOneMove { c, x, h })
    }

    fn certify(&self, m: &RankOneMove) -> Result<SolitonCertificate> {
        soliton::certify_rank_one(&move_rank_one_raw(self.d, m)?)
    }

    fn record(&self, m: &RankOneMove) -> MoveRecord {
        m.into()
    }
}

struct AbelianSpace<'a> {
    d: &'a AbelianNilData,
}

impl MoveSpace for AbelianSpace<'_> {
    type Move = AbelianMove;

    fn soliton_f(&self) -> Result<f64> {
        curvature::pinching_f(&curvature::abelian_ricci(self.d))
    }

    fn f(&self, m: &AbelianMove) -> Option<f64> {
        f_moved_abelian(self.d, m)
    }

    fn sample(&self, rng: &mut ChaCha8Rng, sigma: f64) -> AbelianMove {
        AbelianMove {
            h1: samples::random_invertible(rng, self.d.dim_a(), sigma),
            h2: samples::random_invertible(rng, self.d.dim_n(), sigma),
        }
    }

    fn local_dim(&self) -> usize {
        let (r, n) = (self.d.dim_a(), self.d.dim_n());
        r * r + n * n
    }

    fn local(&self, m: &AbelianMove, theta: &[f64]) -> Option<AbelianMove> {
        let (r, n) = (self.d.dim_a(), self.d.dim_n());
        let e1 = Operator::from_fn(r, r, |i, j| theta[i * r + j]);
        let e2 = Operator::from_fn(n, n, |i, j| theta[r * r + i * n + j]);
        let h1 = linalg::expm(&e1) * &m.h1;
        let h2 = linalg::expm(&e2) * &m.h2;
        (h1.iter().chain(h2.iter()).all(|v| v.is_finite())).then_some(AbelianMove { h1, h2 })
    }

    fn certify(&self, m: &AbelianMove) -> Result<SolitonCertificate> {
        soliton::certify_abelian(&m.apply(self.d)?)
    }

    fn record(&self, m: &AbelianMove) -> MoveRecord {
        m.into()
    }
}

const ASCENT_FD_STEP: f64 = 1e-6;
const ASCENT_REL_STOP: f64 = 1e-12;

/// Gradient ascent of `F` from `start`, in local exponential coordinates
/// re-centred at every iterate.
fn ascend<S: MoveSpace>(space: &S, start: S::Move, iters: usize) -> Option<(S::Move, f64)> {
    let mut current = start;
    let mut value = space.f(&current)?;
    let mut alpha = 1.0;
    let dim = space.local_dim();
    for _ in 0..iters {
        let grad = optim::central_gradient(
            |theta| {
                space
                    .local(&current, theta)
                    .and_then(|m| space.f(&m))
                    .unwrap_or(f64::NAN)
            },
            dim,
            ASCENT_FD_STEP,
        );
        if grad.iter().any(|g| !g.is_finite()) {
            break;
        }
        let Some(step) = optim::backtrack(
            |theta| space.local(&current, theta).and_then(|m| space.f(&m)),
            &grad,
            value,
            alpha,
            1.0,
        ) else {
            break;
        };
        let theta: Vec<f64> = grad.iter().map(|g| step.alpha * g).collect();
        let Some(next) = space.local(&current, &theta) else {
            break;
        };
        let improvement = (step.value - value) / value.abs().max(1e-300);
        current = next;
        value = step.value;
        alpha = (step.alpha * 2.0).min(1e3);
        if improvement < ASCENT_REL_STOP {
            break;
        }
    }
    Some((current, value))
}

const NEWTON_GRAD_STEP: f64 = 1e-5;
const NEWTON_HESS_STEP: f64 = 1e-4;
const NEWTON_ITERS: usize = 8;
/// Relative cutoff for the pseudo-inverse of the Hessian; the isometry
/// directions make it singular.
const NEWTON_RCOND: f64 = 1e-7;
/// F may drop by rounding noise during refinement.
const NEWTON_F_SLACK: f64 = 1e-13;

fn local_hessian<S: MoveSpace>(space: &S, m: &S::Move, f0: f64) -> Option<Operator> {
    let dim = space.local_dim();
    let h = NEWTON_HESS_STEP;
    let eval = |theta: &[f64]| space.local(m, theta).and_then(|mv| space.f(&mv));
    let mut out = Operator::zeros(dim, dim);
    let mut theta = vec![0.0; dim];
    for i in 0..dim {
        theta[i] = 2.0 * h;
        let up = eval(&theta)?;
        theta[i] = -2.0 * h;
        let down = eval(&theta)?;
        theta[i] = 0.0;
        out[(i, i)] = (up - 2.0 * f0 + down) / (4.0 * h * h);
        for j in 0..i {
            let mut corner = |si: f64, sj: f64| {
                theta[i] = si * h;
                theta[j] = sj * h;
                let v = eval(&theta);
                theta[i] = 0.0;
                theta[j] = 0.0;
                v
            };
            let v = (corner(1.0, 1.0)? - corner(1.0, -1.0)? - corner(-1.0, 1.0)?
                + corner(-1.0, -1.0)?)
                / (4.0 * h * h);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    Some(out)
}

/// Newton iteration on the critical-point equation `grad F = 0` in local
/// coordinates, started from a near-maximal move. `F` is quadratic in the
/// distance to its maximizers, so near-equality in `F` alone only locates
/// them to about the square root of the gap; the gradient is linear in that
/// distance and pins them down to rounding level. Returns the refined move and
/// the total length of the steps taken.
fn refine<S: MoveSpace>(space: &S, start: &S::Move) -> (S::Move, f64) {
    let mut current = start.clone();
    let mut shift = 0.0;
    let Some(mut value) = space.f(&current) else {
        return (current, shift);
    };
    let dim = space.local_dim();
    for _ in 0..NEWTON_ITERS {
        let grad = optim::central_gradient(
            |theta| {
                space
                    .local(&current, theta)
                    .and_then(|m| space.f(&m))
                    .unwrap_or(f64::NAN)
            },
            dim,
            NEWTON_GRAD_STEP,
        );
        if grad.iter().any(|g| !g.is_finite()) {
            break;
        }
        let Some(hess) = local_hessian(space, &current, value) else {
            break;
        };
        let svd = hess.svd(true, true);
        let cutoff = NEWTON_RCOND * svd.singular_values.max();
        let Ok(pinv) = svd.pseudo_inverse(cutoff) else {
            break;
        };
        let step = -(pinv * Vector::from_vec(grad));
        let mut scale = 1.0;
        let mut accepted = false;
        for _ in 0..10 {
            let theta: Vec<f64> = step.iter().map(|v| v * scale).collect();
            if let Some(next) = space.local(&current, &theta) {
                if let Some(v) = space.f(&next) {
                    if v >= value - NEWTON_F_SLACK {
                        current = next;
                        value = value.max(v);
                        shift += step.norm() * scale;
                        accepted = true;
                        break;
                    }
                }
            }
            scale *= 0.5;
        }
        if !accepted || step.norm() * scale < 1e-13 {
            break;
        }
    }
    (current, shift)
}

struct Candidate<M> {
    index: usize,
    f: f64,
    mv: M,
}

fn trial_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Radius for trial `index`: the configured radii in turn, with every fourth
/// sample drawn from a heavy-tailed log-normal radius.
fn trial_sigma(rng: &mut ChaCha8Rng, sigmas: &[f64], index: usize) -> f64 {
    if index % 4 == 3 || sigmas.is_empty() {
        let z: f64 = StandardNormal.sample(rng);
        0.5 * z.exp()
    } else {
        sigmas[index % sigmas.len()]
    }
}

fn run_search<S: MoveSpace>(space: &S, cfg: &SearchConfig) -> Result<SearchReport> {
    if cfg.trials == 0 {
        return Err(Error::Precondition("at least one trial is required".into()));
    }
    let soliton_f = space.soliton_f()?;
    let (n_random, n_starts) = match cfg.strategy {
        Strategy::RandomSearch => (cfg.trials, 0),
        Strategy::GradientAscent => (0, cfg.trials),
        Strategy::Hybrid => (cfg.trials, cfg.starts),
    };

    let evaluate = |index: usize| -> Option<Candidate<S::Move>> {
        let mut rng = trial_rng(cfg.seed, index);
        let sigma = trial_sigma(&mut rng, &cfg.sigmas, index);
        let mv = space.sample(&mut rng, sigma);
        if index >= n_random {
            let (mv, f) = ascend(space, mv, cfg.iters)?;
            Some(Candidate { index, f, mv })
        } else {
            let f = space.f(&mv)?;
            Some(Candidate { index, f, mv })
        }
    };

    let total = n_random + n_starts;
    let run = || -> Vec<Option<Candidate<S::Move>>> {
        (0..total).into_par_iter().map(evaluate).collect()
    };
    let results = match cfg.threads {
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build()
            .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    };

    let skipped = results.iter().filter(|c| c.is_none()).count();
    let candidates: Vec<Candidate<S::Move>> = results.into_iter().flatten().collect();
    let best = candidates
        .iter()
        .fold(None::<&Candidate<S::Move>>, |best, c| match best {
            Some(b) if b.f > c.f || (b.f == c.f && b.index < c.index) => Some(b),
            _ => Some(c),
        })
        .ok_or(Error::Degenerate("every trial was numerically singular"))?;

    let equality: Vec<(f64, f64, bool)> = candidates
        .par_iter()
        .filter(|c| c.f >= soliton_f - EQUALITY_GAP)
        .map(|c| {
            if let Ok(cert) = space.certify(&c.mv) {
                if cert.is_soliton() {
                    return (cert.max_residual(), 0.0, true);
                }
            }
            let (mv, shift) = refine(space, &c.mv);
            match space.certify(&mv) {
                Ok(cert) => (cert.max_residual(), shift, cert.is_soliton()),
                Err(_) => (f64::INFINITY, shift, false),
            }
        })
        .collect();
    let equality_cases = equality.len();
    let equality_certified = equality.iter().filter(|e| e.2).count();
    let equality_max_residual = equality.iter().fold(0.0_f64, |m, e| m.max(e.0));
    let equality_max_refinement = equality.iter().fold(0.0_f64, |m, e| m.max(e.1));
    let converged_to_soliton = space
        .certify(&best.mv)
        .map(|c| c.is_soliton())
        .unwrap_or(false);
    let gap = soliton_f - best.f;
    Ok(SearchReport {
        strategy: cfg.strategy,
        best_f: best.f,
        best_move: space.record(&best.mv),
        soliton_f,
        gap,
        trials: total,
        skipped,
        seed: cfg.seed,
        converged_to_soliton,
        equality_cases,
        equality_certified,
        equality_max_residual,
        equality_max_refinement,
        alert: gap < ALERT_GAP,
    })
}

/// Searches the moves of a certified rank-one solvsoliton for larger `F`.
pub fn maximize_f_rank_one(d: &RankOneData, cfg: &SearchConfig) -> Result<SearchReport> {
    let cert = soliton::certify_rank_one(d)?;
    if !cert.is_soliton() {
        return Err(Error::Precondition(format!(
            "base point is not a solvsoliton (max residual {:.3e})",
            cert.max_residual()
        )));
    }
    let d = d.normalized()?;
    let space = RankOneSpace {
        a_norm: d.a().norm(),
        d: &d,
    };
    run_search(&space, cfg)
}

/// Searches the moves of a certified abelian-nilradical solvsoliton.
pub fn maximize_f_abelian(d: &AbelianNilData, cfg: &SearchConfig) -> Result<SearchReport> {
    let cert = soliton::certify_abelian(d)?;
    if !cert.is_soliton() {
        return Err(Error::Precondition(format!(
            "base point is not a solvsoliton (max residual {:.3e})",
            cert.max_residual()
        )));
    }
    run_search(&AbelianSpace { d }, cfg)
}

/// Certifies the moved data when the move attains the soliton value of `F`
/// to within [`EQUALITY_GAP`].
pub fn verify_equality_case_rank_one(d: &RankOneData, m: &RankOneMove) -> Result<EqualityCheck> {
    let soliton_f = curvature::rank_one_report(d)?.f.ok_or(Error::Flat)?;
    let moved = apply_move_rank_one(d, m)?;
    let f = curvature::rank_one_report(&moved)?.f.ok_or(Error::Flat)?;
    if f < soliton_f - EQUALITY_GAP {
        return Ok(EqualityCheck::Skipped { f, soliton_f });
    }
    Ok(EqualityCheck::Checked {
        f,
        certificate: soliton::certify_rank_one(&moved)?,
    })
}

pub fn verify_equality_case_abelian(d: &AbelianNilData, m: &AbelianMove) -> Result<EqualityCheck> {
    let soliton_f = curvature::pinching_f(&curvature::abelian_ricci(d))?;
    let moved = apply_move_abelian(d, m)?;
    let f = curvature::pinching_f(&curvature::abelian_ricci(&moved))?;
    if f < soliton_f - EQUALITY_GAP {
        return Ok(EqualityCheck::Skipped { f, soliton_f });
    }
    Ok(EqualityCheck::Checked {
        f,
        certificate: soliton::certify_abelian(&moved)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pinching;

    #[test]
    fn identity_moves_are_trivial() {
        let d = samples::heisenberg_soliton();
        let moved = apply_move_rank_one(&d, &RankOneMove::identity(3)).unwrap();
        assert!((moved.a() - d.a()).norm() < 1e-15);
        assert!(moved
            .bracket()
            .tensor()
            .iter()
            .zip(d.bracket().tensor())
            .all(|(x, y)| (x - y).abs() < 1e-15));
        let ab = samples::diagonal_pair();
        assert_eq!(
            apply_move_abelian(&ab, &AbelianMove::identity(2, 2)).unwrap(),
            ab
        );
    }

    #[test]
    fn scalar_move_follows_the_c_profile() {
        let d = samples::heisenberg_soliton();
        let params = pinching::RankOneParams::from_soliton(&d).unwrap();
        for c in [-2.0, -1.0, 0.3, 1.0, 1.5] {
            let moved = apply_move_rank_one(&d, &RankOneMove::scalar(3, c)).unwrap();
            let f = curvature::rank_one_report(&moved).unwrap().f.unwrap();
            assert!((f - params.f(params.x0, c)).abs() < 1e-12, "c = {c}");
        }
    }

    #[test]
    fn halving_move() {
        let d = samples::diagonal_pair();
        let m = AbelianMove {
            h1: Operator::identity(2, 2) * 2.0,
            h2: Operator::identity(2, 2),
        };
        let moved = apply_move_abelian(&d, &m).unwrap();
        for (a, b) in moved.ops().iter().zip(d.ops()) {
            assert!((a - b * 0.5).norm() < 1e-15);
        }
        let f0 = curvature::pinching_f(&curvature::abelian_ricci(&d)).unwrap();
        let f1 = curvature::pinching_f(&curvature::abelian_ricci(&moved)).unwrap();
        assert!((f0 - f1).abs() < 1e-14);
    }

    #[test]
    fn singular_moves_are_rejected() {
        let d = samples::heisenberg_soliton();
        let m = RankOneMove {
            h: Operator::zeros(3, 3),
            ..RankOneMove::identity(3)
        };
        assert_eq!(apply_move_rank_one(&d, &m), Err(Error::Singular));
        let m = AbelianMove {
            h1: Operator::zeros(2, 2),
            h2: Operator::identity(2, 2),
        };
        assert_eq!(
            apply_move_abelian(&samples::diagonal_pair(), &m),
            Err(Error::Singular)
        );
    }

    #[test]
    fn equality_cases() {
        let d = samples::heisenberg_soliton();
        let check = verify_equality_case_rank_one(&d, &RankOneMove::identity(3)).unwrap();
        assert!(check.is_certified());
        let check = verify_equality_case_rank_one(&d, &RankOneMove::scalar(3, -1.0)).unwrap();
        assert!(check.is_certified());
        let check = verify_equality_case_rank_one(&d, &RankOneMove::scalar(3, 0.5)).unwrap();
        assert!(matches!(check, EqualityCheck::Skipped { .. }));

        let ab = samples::diagonal_pair();
        let theta = 0.4_f64;
        let q =
            Operator::from_row_slice(2, 2, &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()]);
        let m = AbelianMove {
            h1: Operator::identity(2, 2),
            h2: q,
        };
        assert!(verify_equality_case_abelian(&ab, &m)
            .unwrap()
            .is_certified());
    }

    #[test]
    fn zero_trials_is_an_error() {
        let cfg = SearchConfig {
            trials: 0,
            ..SearchConfig::default()
        };
        assert!(matches!(
            maximize_f_rank_one(&samples::heisenberg_soliton(), &cfg),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn non_soliton_base_is_rejected() {
        let (h2, _) = samples::heisenberg().normalized(2.0).unwrap();
        let d = RankOneData::new(Operator::zeros(3, 3), h2).unwrap();
        assert!(matches!(
            maximize_f_rank_one(&d, &SearchConfig::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn small_random_search_respects_the_bound() {
        let cfg = SearchConfig {
            strategy: Strategy::RandomSearch,
            trials: 400,
            ..SearchConfig::default()
        };
        let report = maximize_f_rank_one(&samples::heisenberg_soliton(), &cfg).unwrap();
        assert!(report.gap >= -1e-7, "{report:?}");
        assert!(!report.alert);
        assert_eq!(report.trials, 400);
    }
}
