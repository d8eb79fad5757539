//! Solvsoliton and nilsoliton certificates, the moment map of the
//! conjugation action, a numerical nilsoliton finder and the rank-one
//! soliton constructor.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::curvature::{self, AbelianNilData, RankOneData};
use crate::error::{Error, Result};
use crate::lie::LieBracket;
use crate::linalg::{self, Operator};
use crate::optim;
use crate::samples;

/// Residual threshold for the soliton verdict.
pub const SOLITON_TOL: f64 = 1e-7;

/// `m(A) = [A, A^t] / |A|^2`.
pub fn moment_map(a: &Operator) -> Result<Operator> {
    let norm_sq = linalg::frob_sq(a);
    if norm_sq == 0.0 {
        return Err(Error::Degenerate("moment map of the zero operator"));
    }
    Ok(linalg::self_commutator(a) / norm_sq)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Soliton,
    NotSoliton,
}

/// Raw residuals of the soliton conditions; `verdict` applies
/// [`SOLITON_TOL`] to all of them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolitonCertificate {
    /// `|[A, A^t]|`, or the max over `i` of `|[A_i, A_i^t]|`.
    pub normality_residual: f64,
    /// `|tr S(A)^2 - |Ric_l|^2|`, or `max |tr S(A_i)S(A_j) - delta_ij|`.
    pub trace_residual: f64,
    /// `Ric_l + |Ric_l|^2 I` tested as a derivation of the nilradical.
    pub derivation_residual: f64,
    /// `A` tested as a derivation of the nilradical (rank-one only).
    pub operator_derivation_residual: Option<f64>,
    /// `Ric - c I` tested as a derivation of the whole solvable algebra.
    pub full_derivation_residual: f64,
    /// The constant `c` in `Ric = c I + D` on the normalized data.
    pub constant: f64,
    pub flat: bool,
    pub verdict: Verdict,
}

impl SolitonCertificate {
    pub fn is_soliton(&self) -> bool {
        self.verdict == Verdict::Soliton
    }

    pub fn max_residual(&self) -> f64 {
        [
            self.normality_residual,
            self.trace_residual,
            self.derivation_residual,
            self.operator_derivation_residual.unwrap_or(0.0),
            self.full_derivation_residual,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    fn with_verdict(mut self) -> Self {
        self.verdict = if self.max_residual() <= SOLITON_TOL {
            Verdict::Soliton
        } else {
            Verdict::NotSoliton
        };
        self
    }
}

/// Nilsoliton test for a nilpotent bracket, on `|lambda| = 2`: `Ric + |Ric|^2 I`
/// must be a derivation. The abelian bracket is reported as a flat soliton.
pub fn certify_nilpotent(bracket: &LieBracket) -> Result<SolitonCertificate> {
    if bracket.is_abelian() {
        return Ok(SolitonCertificate {
            normality_residual: 0.0,
            trace_residual: 0.0,
            derivation_residual: 0.0,
            operator_derivation_residual: None,
            full_derivation_residual: 0.0,
            constant: 0.0,
            flat: true,
            verdict: Verdict::Soliton,
        });
    }
    let (b, _) = bracket.normalized(2.0)?;
    let residual = nilsoliton_residual(&b)?;
    let ric = curvature::nil_ricci(&b);
    Ok(SolitonCertificate {
        normality_residual: 0.0,
        trace_residual: 0.0,
        derivation_residual: residual,
        operator_derivation_residual: None,
        full_derivation_residual: residual,
        constant: -linalg::frob_sq(&ric),
        flat: false,
        verdict: Verdict::NotSoliton,
    }
    .with_verdict())
}

/// `is_derivation(lambda, Ric_lambda + |Ric_lambda|^2 I)`; meaningful at `|lambda| = 2`.
pub fn nilsoliton_residual(b: &LieBracket) -> Result<f64> {
    let ric = curvature::nil_ricci(b);
    let n = b.dim();
    let d = &ric + Operator::identity(n, n) * linalg::frob_sq(&ric);
    b.derivation_residual(&d)
}

/// Certifies `(A, lambda)` after rescaling to `|lambda| = 2`:
/// `[A, A^t] = 0`, `tr S(A)^2 = |Ric_lambda|^2` and `Ric_lambda + |Ric_lambda|^2 I` a
/// derivation; additionally checks `Ric = -|Ric_lambda|^2 I + D` on all of `s`.
pub fn certify_rank_one(d: &RankOneData) -> Result<SolitonCertificate> {
    let d = d.normalized()?;
    let n = d.dim_n();
    let ric_n = curvature::nil_ricci(d.bracket());
    let ric_n_sq = linalg::frob_sq(&ric_n);
    let s = linalg::sym(d.a());
    let normality = linalg::self_commutator(d.a()).norm();
    let trace = (linalg::frob_sq(&s) - ric_n_sq).abs();
    let der = d
        .bracket()
        .derivation_residual(&(&ric_n + Operator::identity(n, n) * ric_n_sq))?;
    let op_der = d.bracket().derivation_residual(d.a())?;
    let full = d.solvable_bracket();
    let ric = curvature::generic_ricci_unchecked(&full);
    let full_der =
        full.derivation_residual(&(ric + Operator::identity(n + 1, n + 1) * ric_n_sq))?;
    Ok(SolitonCertificate {
        normality_residual: normality,
        trace_residual: trace,
        derivation_residual: der,
        operator_derivation_residual: Some(op_der),
        full_derivation_residual: full_der,
        constant: -ric_n_sq,
        flat: false,
        verdict: Verdict::NotSoliton,
    }
    .with_verdict())
}

/// Certifies an abelian-nilradical tuple after a global rescaling that makes
/// the mean diagonal entry of the Gram matrix `tr S(A_i)S(A_j)` equal to 1.
pub fn certify_abelian(d: &AbelianNilData) -> Result<SolitonCertificate> {
    let mean = d.gram().trace() / d.dim_a() as f64;
    let normality = d
        .ops()
        .iter()
        .map(|a| linalg::self_commutator(a).norm())
        .fold(0.0, f64::max);
    if !(mean > 0.0) {
        // every A_i skew-symmetric, hence normal: Ric = 0
        return Ok(SolitonCertificate {
            normality_residual: normality,
            trace_residual: 0.0,
            derivation_residual: 0.0,
            operator_derivation_residual: None,
            full_derivation_residual: 0.0,
            constant: 0.0,
            flat: true,
            verdict: Verdict::Soliton,
        });
    }
    let d = d.scaled(mean.sqrt().recip());
    let normality = normality / mean;
    let gram = d.gram();
    let r = d.dim_a();
    let trace = (gram - Operator::identity(r, r)).abs().max();
    let full = d.solvable_bracket();
    let m = full.dim();
    let ric = curvature::abelian_ricci(&d);
    let full_der = full.derivation_residual(&(ric + Operator::identity(m, m)))?;
    Ok(SolitonCertificate {
        normality_residual: normality,
        trace_residual: trace,
        derivation_residual: 0.0,
        operator_derivation_residual: None,
        full_derivation_residual: full_der,
        constant: -1.0,
        flat: false,
        verdict: Verdict::NotSoliton,
    }
    .with_verdict())
}

/// Settings for [`nilsoliton_search`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NilsolitonSearch {
    pub max_iters: usize,
    /// Initial line-search step.
    pub step: f64,
    pub seed: u64,
    /// Target for the nilsoliton residual.
    pub tol: f64,
}

impl Default for NilsolitonSearch {
    fn default() -> Self {
        Self {
            max_iters: 5000,
            step: 1.0,
            seed: 0,
            tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone)]
pub struct NilsolitonResult {
    /// `h` with `h . lambda0 = bracket`.
    pub h: Operator,
    pub bracket: LieBracket,
    pub residual: f64,
    pub converged: bool,
    pub flat: bool,
    /// `|Ric|^2 / |lambda|^4` after each accepted step, starting value first.
    pub energies: Vec<f64>,
}

/// Scale-invariant energy `|Ric_lambda|^2 / |lambda|^4`.
pub fn orbit_energy(b: &LieBracket) -> f64 {
    let norm = b.norm();
    linalg::frob_sq(&curvature::nil_ricci(b)) / norm.powi(4)
}

const FD_STEP: f64 = 1e-6;

/// Gradient descent of the energy over the orbit `GL(n) . lambda0`, moving by
/// `exp(-alpha grad)` with Armijo backtracking and renormalizing to
/// `|lambda| = 2` after every step.
pub fn nilsoliton_search(
    lambda0: &LieBracket,
    opts: &NilsolitonSearch,
) -> Result<NilsolitonResult> {
    lambda0.validate_nilpotent()?;
    let n = lambda0.dim();
    if lambda0.is_abelian() {
        return Ok(NilsolitonResult {
            h: Operator::identity(n, n),
            bracket: lambda0.clone(),
            residual: 0.0,
            converged: true,
            flat: true,
            energies: vec![0.0],
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let (mut current, t0) = lambda0.normalized(2.0)?;
    let mut h = Operator::identity(n, n) / t0;
    let mut energy = orbit_energy(&current);
    let mut energies = vec![energy];
    let mut residual = nilsoliton_residual(&current)?;
    let mut alpha = opts.step;
    let mut stalls = 0;

    let as_matrix = |theta: &[f64]| Operator::from_fn(n, n, |i, j| theta[i * n + j]);

    for _ in 0..opts.max_iters {
        if residual <= opts.tol {
            break;
        }
        let grad = optim::central_gradient(
            |theta| {
                let g = Operator::identity(n, n) + as_matrix(theta);
                current
                    .act(&g)
                    .map(|b| orbit_energy(&b))
                    .unwrap_or(f64::NAN)
            },
            n * n,
            FD_STEP,
        );
        let step = optim::backtrack(
            |theta| {
                let g = linalg::expm(&as_matrix(theta));
                current.act(&g).ok().map(|b| orbit_energy(&b))
            },
            &grad,
            energy,
            alpha,
            -1.0,
        );
        let Some(step) = step else {
            // FD noise floor or a saddle: nudge once, then give up
            stalls += 1;
            if stalls > 3 {
                break;
            }
            let nudge = samples::random_invertible(&mut rng, n, 1e-4);
            let nudged = current.act(&nudge)?;
            let (b, t) = nudged.normalized(2.0)?;
            let e = orbit_energy(&b);
            if e <= energy {
                current = b;
                h = (nudge * h) / t;
                energy = e;
                energies.push(energy);
                residual = nilsoliton_residual(&current)?;
            }
            continue;
        };
        let theta: Vec<f64> = grad.iter().map(|g| -step.alpha * g).collect();
        let g = linalg::expm(&as_matrix(&theta));
        let (b, t) = current.act(&g)?.normalized(2.0)?;
        // (s I) . lambda = lambda / s
        h = (g * h) / t;
        current = b;
        energy = step.value;
        energies.push(energy);
        residual = nilsoliton_residual(&current)?;
        alpha = (step.alpha * 2.0).min(opts.step * 64.0);
    }
    Ok(NilsolitonResult {
        h,
        bracket: current,
        residual,
        converged: residual <= opts.tol.max(1e-6),
        flat: false,
        energies,
    })
}

/// Builds the rank-one solvsoliton `(t D, lambda)` over a nilsoliton, with
/// `D` the given normal derivation (default `Ric_lambda + |Ric_lambda|^2 I`) and
/// `t > 0` fixed by `tr S(tD)^2 = |Ric_lambda|^2`. The bracket is rescaled to
/// `|lambda| = 2` first.
pub fn rank_one_extension(
    nilsoliton: &LieBracket,
    direction: Option<&Operator>,
) -> Result<RankOneData> {
    if nilsoliton.is_abelian() {
        return Err(Error::FlatNilradical);
    }
    nilsoliton.validate_nilpotent()?;
    let (b, _) = nilsoliton.normalized(2.0)?;
    let residual = nilsoliton_residual(&b)?;
    if residual > SOLITON_TOL {
        return Err(Error::Precondition(format!(
            "bracket is not a nilsoliton (residual {residual:.3e})"
        )));
    }
    let n = b.dim();
    let ric = curvature::nil_ricci(&b);
    let ric_sq = linalg::frob_sq(&ric);
    let dir = match direction {
        Some(d) => {
            if d.nrows() != n || d.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: d.nrows(),
                });
            }
            d.clone()
        }
        // project onto Der(b) to remove the search's residual error
        None => {
            let target = &ric + Operator::identity(n, n) * ric_sq;
            let proj = b
                .derivation_algebra()
                .iter()
                .fold(Operator::zeros(n, n), |acc, d| acc + d * d.dot(&target));
            linalg::sym(&proj)
        }
    };
    let scale = dir.norm().max(1.0);
    let der = b.derivation_residual(&dir)?;
    if der > curvature::DATA_TOL * scale * 2.0 {
        return Err(Error::NotDerivation(der));
    }
    let comm = linalg::self_commutator(&dir).norm();
    if comm > curvature::DATA_TOL * scale * scale {
        return Err(Error::NotNormal(comm));
    }
    let sym_sq = linalg::frob_sq(&linalg::sym(&dir));
    if !(sym_sq > 1e-24) {
        return Err(Error::Degenerate("direction has zero symmetric part"));
    }
    let t = (ric_sq / sym_sq).sqrt();
    RankOneData::new(dir * t, b)
}
