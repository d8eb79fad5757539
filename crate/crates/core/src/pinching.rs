//! The pinching functional in its rank-one and abelian-nilradical forms, the
//! scalar reductions `f(x, c)` and `f(x_1, ..., x_r)`, and per-parameter
//! certificates for the two scalar inequalities `f <= f(max)`.

use serde::Serialize;

use crate::curvature::{self, AbelianNilData, RankOneData, RankOneTerms, FLAT_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, Operator};
use crate::orbit::{AbelianMove, RankOneMove};

/// Equality-case classification thresholds.
pub const EQ_F_TOL: f64 = 1e-9;
pub const EQ_X_TOL: f64 = 1e-6;
pub const EQ_C_TOL: f64 = 1e-6;

// ---------------------------------------------------------------------------
// rank-one

/// `F` of rank-one data through the decomposition
/// `(tr S(A)^2 + (tr A)^2 + 1)^2 / (tr S(A)^2 (tr S(A)^2 + (tr A)^2) + |Ric_l|^2 + |[A,A^t]|^2/4 + G)`
/// evaluated at `|lambda| = 2`, with `G` taken from the generic oracle.
pub fn f_rank_one_data(d: &RankOneData) -> Result<f64> {
    let d = d.normalized()?;
    let terms = RankOneTerms::of(&d);
    let g = curvature::rank_one_report(&d)?
        .g
        .expect("rank-one report carries G");
    let num = (terms.tr_sym_sq + terms.tr_sq + 1.0).powi(2);
    let den = terms.explicit_denominator() + g;
    if !(den > FLAT_TOL) {
        return Err(Error::Flat);
    }
    Ok(num / den)
}

/// The soliton constants `x0 = |A|^2/2`, `b = tr(A^2)/2`, `a = b + (tr A)^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankOneParams {
    pub x0: f64,
    pub a: f64,
    pub b: f64,
}

impl RankOneParams {
    pub fn new(x0: f64, a: f64, b: f64) -> Result<Self> {
        let p = Self { x0, a, b };
        p.validate()?;
        Ok(p)
    }

    /// Reads the constants off a soliton normalized to `|lambda| = 2`.
    pub fn from_soliton(d: &RankOneData) -> Result<Self> {
        let d = d.normalized()?;
        let a = d.a();
        let b = 0.5 * (a * a).trace();
        Self::new(0.5 * linalg::frob_sq(a), b + a.trace().powi(2), b)
    }

    /// `x0 > 0`, `x0 + b > 0` and `a >= b`.
    pub fn validate(&self) -> Result<()> {
        let Self { x0, a, b } = *self;
        if !(x0.is_finite() && a.is_finite() && b.is_finite()) {
            return Err(Error::NonFinite);
        }
        if !(x0 > 0.0) {
            return Err(Error::Domain(format!("x0 = {x0} must be positive")));
        }
        if !(x0 + b > 0.0) {
            return Err(Error::Domain(format!(
                "x0 + b = {} must be positive",
                x0 + b
            )));
        }
        if a < b {
            return Err(Error::Domain(format!("a = {a} must be at least b = {b}")));
        }
        Ok(())
    }

    /// `d = x0 + b`, which equals `|Ric_lambda|^2` at a soliton.
    pub fn d(&self) -> f64 {
        self.x0 + self.b
    }

    /// `f(x0, 1) = (x0 + a + 1)/(x0 + b)`.
    pub fn max_value(&self) -> f64 {
        (self.x0 + self.a + 1.0) / (self.x0 + self.b)
    }

    /// Denominator `q(x) = c^4 (x + b)(x + a) + x0 + b`.
    pub fn q(&self, x: f64, c: f64) -> f64 {
        let c2 = c * c;
        c2 * c2 * (x + self.b) * (x + self.a) + self.x0 + self.b
    }

    /// `f(x, c) = (c^2 (x + a) + 1)^2 / q(x)`.
    pub fn f(&self, x: f64, c: f64) -> f64 {
        let num = c * c * (x + self.a) + 1.0;
        num * num / self.q(x, c)
    }

    /// Analytic partial derivatives `(df/dx, df/dc)`.
    pub fn grad(&self, x: f64, c: f64) -> (f64, f64) {
        let u = c * c;
        let n = u * (x + self.a) + 1.0;
        let q = self.q(x, c);
        let dq_dx = u * u * (2.0 * x + self.a + self.b);
        let dq_du = 2.0 * u * (x + self.b) * (x + self.a);
        let dfdx = (2.0 * n * u * q - n * n * dq_dx) / (q * q);
        let dfdu = (2.0 * n * (x + self.a) * q - n * n * dq_du) / (q * q);
        (dfdx, dfdu * 2.0 * c)
    }
}

/// `f(x, c)` for explicit parameters.
pub fn f_rank_one(x: f64, c: f64, params: &RankOneParams) -> f64 {
    params.f(x, c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateVerdict {
    /// `p > 0` on `[x0, inf)`.
    PositiveOnHalfline,
    /// `p(x0) = 0` (the case `c = +-1`) and `p >= 0` on the half-line.
    EqualityAtX0,
    /// `p >= 0` with a double root inside the half-line; happens only when
    /// `a = b`, where `f(x, c) = f(x0, 1)` along `c^2 (x + b) = x0 + b`.
    Tangency,
    Violated,
}

/// Coefficients of `p(x) = r x^2 + s x + t`, whose nonnegativity on
/// `x >= x0` is equivalent to `f(x, c) <= f(x0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolynomialCertificate {
    pub params: RankOneParams,
    pub c: f64,
    pub r: f64,
    pub s: f64,
    pub t: f64,
    /// `s^2 - 4 r t` from the coefficients.
    pub disc: f64,
    /// `c^4 (a-b)(x0+a+1) (c^4 (a-b)(x0+a+1) + 4 (c^2-1)(x0+b))`.
    pub disc_factored: f64,
    pub p_x0: f64,
    pub dp_x0: f64,
    pub verdict: CertificateVerdict,
}

impl PolynomialCertificate {
    pub fn p(&self, x: f64) -> f64 {
        (self.r * x + self.s) * x + self.t
    }

    /// Scale against which roundoff in `disc` is judged.
    pub fn disc_scale(&self) -> f64 {
        self.s * self.s + (4.0 * self.r * self.t).abs()
    }
}

/// Relative tolerance on sign decisions about `p`.
const CERT_REL_TOL: f64 = 1e-12;

pub fn lemma_fan_certificate(params: &RankOneParams, c: f64) -> Result<PolynomialCertificate> {
    params.validate()?;
    if !c.is_finite() {
        return Err(Error::NonFinite);
    }
    let RankOneParams { x0, a, b } = *params;
    let c2 = c * c;
    let c4 = c2 * c2;
    let r = c4 * (a - b + 1.0);
    let s = c4 * (a * (a - b + 1.0) - x0 * (a - b) + b) - 2.0 * c2 * (x0 + b);
    let t = a * c4 * (x0 * (b - a) + b) - 2.0 * a * c2 * (x0 + b) + (x0 + a) * (x0 + b);
    let disc = s * s - 4.0 * r * t;
    let k = c4 * (a - b) * (x0 + a + 1.0);
    let disc_factored = k * (k + 4.0 * (c2 - 1.0) * (x0 + b));
    let p_x0 = (r * x0 + s) * x0 + t;
    let dp_x0 = 2.0 * r * x0 + s;

    let p_scale = (r * x0 * x0).abs() + (s * x0).abs() + t.abs();
    let on_unit_circle = (c.abs() - 1.0).abs() <= EQ_C_TOL;
    let verdict = if p_x0 < -CERT_REL_TOL * p_scale {
        CertificateVerdict::Violated
    } else if dp_x0 >= 0.0 {
        if on_unit_circle {
            CertificateVerdict::EqualityAtX0
        } else {
            CertificateVerdict::PositiveOnHalfline
        }
    } else {
        // minimum of p on the half-line sits at the vertex, where p = -disc/(4r)
        let scale = s * s + (4.0 * r * t).abs();
        if disc < -CERT_REL_TOL * scale {
            if on_unit_circle {
                CertificateVerdict::EqualityAtX0
            } else {
                CertificateVerdict::PositiveOnHalfline
            }
        } else if disc <= CERT_REL_TOL * scale {
            CertificateVerdict::Tangency
        } else {
            CertificateVerdict::Violated
        }
    };
    Ok(PolynomialCertificate {
        params: *params,
        c,
        r,
        s,
        t,
        disc,
        disc_factored,
        p_x0,
        dp_x0,
        verdict,
    })
}

/// A point of the curve `c^2 (x + b) = d`, `d = x0 + b`, on which `df/dc`
/// vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalPoint {
    pub x: f64,
    pub c: f64,
    pub value: f64,
    pub dfdx: f64,
    pub dfdc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalSet {
    pub params: RankOneParams,
    pub d: f64,
    pub points: Vec<CriticalPoint>,
    /// `max f` along the curve; never above `f(x0, 1)`.
    pub max_value: f64,
}

/// Samples `count` points of the curve `c^2 (x + b) = x0 + b` for
/// `x in [x0, x0 + span]`, `c > 0`, with the critical value
/// `(c^2 (x + a) + 1)/d` and the analytic gradient of `f`.
///
/// Along the curve `df/dc = 0`; `df/dx = 0` holds only when `a = b`, so for
/// `a > b` the maximum `(x0, 1)` lies on the boundary `x = x0`.
pub fn critical_set_fan(params: &RankOneParams, span: f64, count: usize) -> Result<CriticalSet> {
    params.validate()?;
    let d = params.d();
    let points: Vec<CriticalPoint> = (0..count.max(1))
        .map(|i| {
            let x = if count <= 1 {
                params.x0
            } else {
                params.x0 + span * i as f64 / (count - 1) as f64
            };
            let c = (d / (x + params.b)).sqrt();
            let (dfdx, dfdc) = params.grad(x, c);
            CriticalPoint {
                x,
                c,
                value: (c * c * (x + params.a) + 1.0) / d,
                dfdx,
                dfdc,
            }
        })
        .collect();
    let max_value = points
        .iter()
        .map(|p| p.value)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(CriticalSet {
        params: *params,
        d,
        points,
        max_value,
    })
}

/// Scalars of the reduction of a moved metric `(c h (A - ad h^-1 X) h^-1, h . lambda)`
/// to `f(x, c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RankOneReduction {
    pub x0: f64,
    pub a: f64,
    pub b: f64,
    /// `tr S(A')^2` of the moved operator (before the `c` factor).
    pub t: f64,
    /// `|A'|^2 / 2`.
    pub x: f64,
    /// Effective `c` after renormalizing `|h . lambda| = 2`.
    pub c: f64,
}

impl RankOneReduction {
    pub fn params(&self) -> RankOneParams {
        RankOneParams {
            x0: self.x0,
            a: self.a,
            b: self.b,
        }
    }

    /// `f(x, c)`, an upper bound for `F` of the moved metric.
    pub fn bound(&self) -> f64 {
        self.params().f(self.x, self.c)
    }
}

/// Reduction scalars for `move` applied to a rank-one soliton.
pub fn reduce_rank_one(soliton: &RankOneData, mv: &RankOneMove) -> Result<RankOneReduction> {
    let soliton = soliton.normalized()?;
    let params = RankOneParams::from_soliton(&soliton)?;
    let moved_op = mv.moved_operator(&soliton)?;
    let moved_bracket = soliton.bracket().act(&mv.h)?;
    let c = mv.c * 2.0 / moved_bracket.norm();
    Ok(RankOneReduction {
        x0: params.x0,
        a: params.a,
        b: params.b,
        t: linalg::frob_sq(&linalg::sym(&moved_op)),
        x: 0.5 * linalg::frob_sq(&moved_op),
        c,
    })
}

// ---------------------------------------------------------------------------
// abelian nilradical

/// `f(x_1, ..., x_r) = (sum x_i + a)^2 / (sum x_i^2 + a x_1)`.
pub fn f_abelian(xs: &[f64], a: f64) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::Degenerate("empty x vector"));
    }
    if xs.iter().any(|&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::Domain("all x_i must be positive".into()));
    }
    if !(a >= 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!("a = {a} must be nonnegative")));
    }
    let sum: f64 = xs.iter().sum();
    let sq: f64 = xs.iter().map(|x| x * x).sum();
    Ok((sum + a).powi(2) / (sq + a * xs[0]))
}

/// The decomposition `(r + a)(sum x^2 + a x_1) - (sum x + a)^2 = t1 + t2 + t3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbelianLemmaCheck {
    /// `(r - 1) sum x_i^2 - sum_{i != j} x_i x_j`, nonnegative by Cauchy-Schwarz.
    pub t1: f64,
    /// `a^2 (x_1 - 1)`.
    pub t2: f64,
    /// `a (sum x_i^2 - 2 sum x_i + r x_1)`.
    pub t3: f64,
    /// `a sum (x_i - 1)^2`, a lower bound for `t3` when `x_1 >= 1`.
    pub t3_lower: f64,
    pub f: f64,
    pub max: f64,
    pub holds: bool,
    pub equality: bool,
}

impl AbelianLemmaCheck {
    pub fn total(&self) -> f64 {
        self.t1 + self.t2 + self.t3
    }
}

pub fn lemma_fai_check(xs: &[f64], a: f64) -> Result<AbelianLemmaCheck> {
    let f = f_abelian(xs, a)?;
    if xs[0] < 1.0 {
        return Err(Error::Domain(format!("x_1 = {} must be at least 1", xs[0])));
    }
    let r = xs.len() as f64;
    let sum: f64 = xs.iter().sum();
    let sq: f64 = xs.iter().map(|x| x * x).sum();
    let cross = sum * sum - sq;
    let t1 = (r - 1.0) * sq - cross;
    let t2 = a * a * (xs[0] - 1.0);
    let t3 = a * (sq - 2.0 * sum + r * xs[0]);
    let t3_lower = a * xs.iter().map(|x| (x - 1.0).powi(2)).sum::<f64>();
    let max = r + a;
    let scale = (r + a) * (sq + a * xs[0]);
    let total = t1 + t2 + t3;
    Ok(AbelianLemmaCheck {
        t1,
        t2,
        t3,
        t3_lower,
        f,
        max,
        holds: total >= -1e-12 * scale,
        equality: total.abs() <= 1e-12 * scale,
    })
}

/// Orthogonal `r x r` matrix whose first row is `traces / |traces|`,
/// completed by Gram-Schmidt against the standard basis; the identity when
/// every trace vanishes.
pub fn trace_normalizing_rotation(traces: &[f64]) -> Operator {
    let r = traces.len();
    let norm = traces.iter().map(|t| t * t).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Operator::identity(r, r);
    }
    let mut rows: Vec<linalg::Vector> = vec![linalg::Vector::from_iterator(
        r,
        traces.iter().map(|t| t / norm),
    )];
    for k in 0..r {
        if rows.len() == r {
            break;
        }
        let mut v = linalg::Vector::zeros(r);
        v[k] = 1.0;
        for u in &rows {
            let proj = u.dot(&v);
            v -= u * proj;
        }
        let len = v.norm();
        if len > 1e-8 {
            rows.push(v / len);
        }
    }
    Operator::from_fn(r, r, |i, j| rows[i][j])
}

/// Rotates the `a`-basis so that `tr A_i = 0` for `i >= 2` and
/// `tr A_1 = |(tr A_1, ..., tr A_r)| >= 0`.
pub fn trace_normalized(d: &AbelianNilData) -> AbelianNilData {
    let q = trace_normalizing_rotation(d.traces().as_slice());
    let n = d.dim_n();
    let ops = (0..d.dim_a())
        .map(|i| {
            d.ops()
                .iter()
                .enumerate()
                .fold(Operator::zeros(n, n), |acc, (j, a)| acc + a * q[(i, j)])
        })
        .collect();
    AbelianNilData::new_unchecked(ops).expect("same shapes")
}

/// `F` of abelian-nilradical data after the trace normalization:
/// `(sum tr S(A_i)^2 + (tr A_1)^2)^2 / (sum (tr S(A_i)S(A_j))^2 + (tr A_1)^2 tr S(A_1)^2 + |sum [A_i,A_i^t]|^2/4)`.
pub fn f_abelian_data(d: &AbelianNilData) -> Result<f64> {
    let d = trace_normalized(d);
    let gram = d.gram();
    let tr1_sq = d.ops()[0].trace().powi(2);
    let n = d.dim_n();
    let comm = d.ops().iter().fold(Operator::zeros(n, n), |acc, a| {
        acc + linalg::self_commutator(a)
    });
    let num = (gram.trace() + tr1_sq).powi(2);
    let den = linalg::frob_sq(&gram) + tr1_sq * gram[(0, 0)] + 0.25 * linalg::frob_sq(&comm);
    if !(den > FLAT_TOL) {
        return Err(Error::Flat);
    }
    Ok(num / den)
}

/// `x_i = tr S(A'_i)^2` of a moved tuple and `a = (tr A_1)^2` of the soliton.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbelianReduction {
    pub xs: Vec<f64>,
    pub a: f64,
}

impl AbelianReduction {
    /// `f(x_1, ..., x_r)`, an upper bound for `F` of the moved metric.
    pub fn bound(&self) -> Result<f64> {
        f_abelian(&self.xs, self.a)
    }
}

/// Brings a soliton tuple to the normal form used by the reduction: traces
/// concentrated on `A_1` and Gram matrix `I`.
pub fn abelian_soliton_normal_form(d: &AbelianNilData) -> Result<AbelianNilData> {
    let d = trace_normalized(d);
    let mean = d.gram().trace() / d.dim_a() as f64;
    if !(mean > 0.0) {
        return Err(Error::Degenerate("all operators are skew-symmetric"));
    }
    Ok(d.scaled(mean.sqrt().recip()))
}

/// Reduction scalars for a move applied to an abelian-nilradical soliton.
///
/// The moved tuple is rotated so that only its first operator has nonzero
/// trace, then rescaled so that this trace equals `tr A_1` of the soliton's normal form
/// (or, when every trace vanishes, so that `x_1 = 1`).
pub fn reduce_abelian(soliton: &AbelianNilData, mv: &AbelianMove) -> Result<AbelianReduction> {
    let base = abelian_soliton_normal_form(soliton)?;
    let tr1 = base.ops()[0].trace();
    let moved = trace_normalized(&mv.apply(soliton)?);
    let moved_tr1 = moved.ops()[0].trace();
    let scale = if tr1.abs() > 1e-12 && moved_tr1.abs() > 1e-12 {
        tr1 / moved_tr1
    } else {
        let x1 = moved.gram()[(0, 0)];
        if !(x1 > 0.0) {
            return Err(Error::Degenerate("moved first operator is skew-symmetric"));
        }
        x1.sqrt().recip()
    };
    let moved = moved.scaled(scale);
    let gram = moved.gram();
    Ok(AbelianReduction {
        xs: (0..moved.dim_a()).map(|i| gram[(i, i)]).collect(),
        a: tr1 * tr1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Vector;
    use crate::samples;

    fn heis_params() -> RankOneParams {
        RankOneParams::from_soliton(&samples::heisenberg_soliton()).unwrap()
    }

    #[test]
    fn heisenberg_soliton_constants() {
        let p = heis_params();
        assert!((p.x0 - 1.5).abs() < 1e-14);
        assert!((p.b - 1.5).abs() < 1e-14);
        assert!((p.a - 9.5).abs() < 1e-13);
        assert!((p.max_value() - 4.0).abs() < 1e-14);
        assert!((p.f(p.x0, 1.0) - p.max_value()).abs() < 1e-14);
    }

    #[test]
    fn f_special_values() {
        let p = RankOneParams::new(1.3, 4.0, 0.7).unwrap();
        assert!((p.f(p.x0, 1.0) - (p.x0 + p.a + 1.0) / (p.x0 + p.b)).abs() < 1e-15);
        for x in [1.3, 5.0, 100.0] {
            assert!((p.f(x, 0.0) - 1.0 / (p.x0 + p.b)).abs() < 1e-15);
        }
        assert!((p.f(1e9, 0.8) - 1.0).abs() < 1e-6);
        assert!((p.f(4.0, 1e5) - (4.0 + p.a) / (4.0 + p.b)).abs() < 1e-9);
    }

    #[test]
    fn f_rank_one_on_fixtures() {
        let f = f_rank_one_data(&samples::heisenberg_soliton()).unwrap();
        assert!((f - 4.0).abs() < 1e-12);
        let (h2, _) = samples::heisenberg().normalized(2.0).unwrap();
        let zero = RankOneData::new(Operator::zeros(3, 3), h2).unwrap();
        assert!((f_rank_one_data(&zero).unwrap() - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn certificate_unit_c_is_equality() {
        let cert = lemma_fan_certificate(&heis_params(), 1.0).unwrap();
        assert!(cert.p_x0.abs() < 1e-12);
        assert_eq!(cert.verdict, CertificateVerdict::EqualityAtX0);
        let cert = lemma_fan_certificate(&heis_params(), -1.0).unwrap();
        assert_eq!(cert.verdict, CertificateVerdict::EqualityAtX0);
    }

    #[test]
    fn certificate_zero_c_is_constant() {
        let p = heis_params();
        let cert = lemma_fan_certificate(&p, 0.0).unwrap();
        assert_eq!((cert.r, cert.s), (0.0, 0.0));
        assert!((cert.t - (p.x0 + p.a) * (p.x0 + p.b)).abs() < 1e-12);
        assert_eq!(cert.verdict, CertificateVerdict::PositiveOnHalfline);
    }

    #[test]
    fn certificate_p_matches_cross_multiplied_inequality() {
        // p(x) = f(x0,1)(x0+b) q(x) - (x0+b)(c^2(x+a)+1)^2
        let p = RankOneParams::new(0.8, 3.0, 0.4).unwrap();
        for c in [-2.0, -0.3, 0.5, 1.7] {
            let cert = lemma_fan_certificate(&p, c).unwrap();
            for x in [0.8, 2.0, 13.0] {
                let n = c * c * (x + p.a) + 1.0;
                let direct = (p.x0 + p.a + 1.0) * p.q(x, c) - p.d() * n * n;
                assert!((cert.p(x) - direct).abs() < 1e-9 * direct.abs().max(1.0));
            }
        }
    }

    #[test]
    fn certificate_domain_errors() {
        assert!(RankOneParams::new(0.0, 1.0, 0.5).is_err());
        assert!(RankOneParams::new(1.0, 0.5, 1.0).is_err());
        assert!(RankOneParams::new(1.0, 2.0, -1.5).is_err());
    }

    #[test]
    fn unimodular_parameters_give_tangency() {
        // a = b: f(x, c) = f(x0, 1) along c^2 (x + b) = x0 + b
        let p = RankOneParams::new(1.0, 0.5, 0.5).unwrap();
        let cert = lemma_fan_certificate(&p, 0.6).unwrap();
        assert_eq!(cert.verdict, CertificateVerdict::Tangency);
        let x = p.d() / 0.36 - p.b;
        assert!((p.f(x, 0.6) - p.max_value()).abs() < 1e-12);
    }

    #[test]
    fn critical_curve_kills_the_c_derivative() {
        let p = RankOneParams::new(1.2, 5.0, 0.9).unwrap();
        let set = critical_set_fan(&p, 50.0, 40).unwrap();
        assert!((set.points[0].c - 1.0).abs() < 1e-14);
        for pt in &set.points {
            assert!(pt.dfdc.abs() < 1e-12);
            assert!((pt.value - p.f(pt.x, pt.c)).abs() < 1e-12);
            assert!(pt.value <= p.max_value() + 1e-12);
            // boundary maximum: f decreases into the interior
            assert!(pt.dfdx < 0.0);
        }
        assert!((set.max_value - p.max_value()).abs() < 1e-12);
    }

    #[test]
    fn f_abelian_values() {
        assert_eq!(f_abelian(&[1.0, 1.0, 1.0], 2.5).unwrap(), 5.5);
        assert_eq!(f_abelian(&[2.0, 1.0], 1.0).unwrap(), 16.0 / 7.0);
        assert_eq!(f_abelian(&[3.7], 0.0).unwrap(), 1.0);
        assert!(f_abelian(&[1.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn abelian_lemma_terms() {
        let chk = lemma_fai_check(&[1.0, 1.0, 1.0, 1.0], 3.0).unwrap();
        assert_eq!((chk.t1, chk.t2, chk.t3), (0.0, 0.0, 0.0));
        assert!(chk.equality && chk.holds);
        let chk = lemma_fai_check(&[2.0, 1.0], 1.0).unwrap();
        assert_eq!(chk.f, 16.0 / 7.0);
        assert!(chk.holds && !chk.equality);
        assert!(chk.t1 >= 0.0 && chk.t2 >= 0.0 && chk.t3 >= chk.t3_lower);
        assert!(matches!(
            lemma_fai_check(&[0.9, 1.0], 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn trace_rotation_is_orthogonal() {
        let q = trace_normalizing_rotation(&[1.0, 2.0, -2.0]);
        assert!((&q * q.transpose() - Operator::identity(3, 3)).norm() < 1e-14);
        let tau = Vector::from_vec(vec![1.0, 2.0, -2.0]);
        let rotated = &q * tau;
        assert!((rotated[0] - 3.0).abs() < 1e-14);
        assert!(rotated[1].abs() < 1e-14 && rotated[2].abs() < 1e-14);
        assert_eq!(
            trace_normalizing_rotation(&[0.0, 0.0]),
            Operator::identity(2, 2)
        );
    }

    #[test]
    fn f_abelian_on_fixtures() {
        let hyp = AbelianNilData::new(vec![Operator::identity(1, 1)]).unwrap();
        assert!((f_abelian_data(&hyp).unwrap() - 2.0).abs() < 1e-15);
        let pair = samples::diagonal_pair();
        assert!((f_abelian_data(&pair).unwrap() - 4.0).abs() < 1e-14);
        let normal = abelian_soliton_normal_form(&pair).unwrap();
        let a = normal.ops()[0].trace().powi(2);
        assert!((a - 2.0).abs() < 1e-14);
        assert!((normal.gram() - Operator::identity(2, 2)).norm() < 1e-14);
    }
}
