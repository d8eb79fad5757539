//! Parameter sweeps for the two scalar lemmas.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use ricci_pinch::pinching::{
    self, CertificateVerdict, PolynomialCertificate, RankOneParams, EQ_C_TOL, EQ_F_TOL, EQ_X_TOL,
};

use crate::{CliError, Outcome, Range, EXIT_ALERT, EXIT_OK, SCHEMA};

/// Relative slack on `f <= f_max` and on sign decisions about `p`.
const REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FanOptions {
    pub x0: Range,
    pub a: Range,
    pub b: Range,
    pub c: Range,
    /// `x` runs over `[x0, x0 + x_span]`.
    pub x_span: f64,
    /// Points per axis.
    pub grid: usize,
    /// Certificate rows to include in the report.
    pub table: usize,
}

impl Default for FanOptions {
    fn default() -> Self {
        Self {
            x0: Range { lo: 0.1, hi: 10.0 },
            a: Range { lo: 0.1, hi: 10.0 },
            b: Range { lo: 0.1, hi: 10.0 },
            c: Range { lo: -5.0, hi: 5.0 },
            x_span: 100.0,
            grid: 50,
            table: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct VerdictCounts {
    pub positive_on_halfline: usize,
    pub equality_at_x0: usize,
    pub tangency: usize,
    pub violated: usize,
}

impl VerdictCounts {
    fn add(&mut self, v: CertificateVerdict) {
        match v {
            CertificateVerdict::PositiveOnHalfline => self.positive_on_halfline += 1,
            CertificateVerdict::EqualityAtX0 => self.equality_at_x0 += 1,
            CertificateVerdict::Tangency => self.tangency += 1,
            CertificateVerdict::Violated => self.violated += 1,
        }
    }

    fn merge(&mut self, o: &VerdictCounts) {
        self.positive_on_halfline += o.positive_on_halfline;
        self.equality_at_x0 += o.equality_at_x0;
        self.tangency += o.tangency;
        self.violated += o.violated;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocusPoint {
    pub x0: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub x: f64,
    pub f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FanReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub which: &'static str,
    pub settings: FanOptions,
    /// `(x0, a, b)` triples with `a >= b`.
    pub parameter_sets: usize,
    pub certificates: usize,
    pub points: usize,
    /// Grid points with `f(x, c) > f(x0, 1)` beyond rounding.
    pub violations: usize,
    /// `min (f(x0, 1) - f(x, c)) / f(x0, 1)` over the grid.
    pub min_margin: f64,
    pub verdicts: VerdictCounts,
    /// Certificates whose verdict contradicts the grid values of `p`.
    pub verdict_disagreements: usize,
    /// Certificates with `p'(x0) < 0` and `a > b` but no negative discriminant.
    pub discriminant_failures: usize,
    /// Certificates with `p'(x0) < 0` and `a = b`, where `p` has a double
    /// root and the discriminant vanishes identically.
    pub double_root_cases: usize,
    /// Grid points classified as the equality case `x = x0`, `|c| = 1`.
    pub equality_points: usize,
    /// Grid points attaining `f(x0, 1)` away from `x = x0`, `|c| = 1`, with
    /// `a = b` (on the curve `c^2 (x + b) = x0 + b`).
    pub tangency_curve_points: usize,
    /// Same, with `a > b`; the lemma says there are none.
    pub off_locus_equalities: usize,
    pub equality_sample: Vec<LocusPoint>,
    pub table: Vec<PolynomialCertificate>,
}

#[derive(Default)]
struct FanPartial {
    certificates: usize,
    points: usize,
    violations: usize,
    min_margin: f64,
    verdicts: VerdictCounts,
    disagreements: usize,
    disc_failures: usize,
    double_roots: usize,
    equality: usize,
    curve: usize,
    off_locus: usize,
    sample: Vec<LocusPoint>,
    table: Vec<PolynomialCertificate>,
}

const SAMPLE_LIMIT: usize = 20;

fn c_grid(range: Range, k: usize) -> Vec<f64> {
    let mut cs = range.grid(k);
    for unit in [-1.0, 1.0] {
        if range.lo <= unit && unit <= range.hi && !cs.contains(&unit) {
            cs.push(unit);
        }
    }
    cs.retain(|c| *c != 0.0);
    cs.sort_by(f64::total_cmp);
    cs
}

fn sweep_params(
    p: &RankOneParams,
    cs: &[f64],
    xs_rel: &[f64],
    table: usize,
) -> Result<FanPartial, CliError> {
    let fmax = p.max_value();
    let mut out = FanPartial {
        min_margin: f64::INFINITY,
        ..FanPartial::default()
    };
    for &c in cs {
        let cert = pinching::lemma_fan_certificate(p, c)?;
        out.certificates += 1;
        out.verdicts.add(cert.verdict);
        if out.table.len() < table {
            out.table.push(cert);
        }
        if cert.dp_x0 < 0.0 {
            if p.a == p.b {
                out.double_roots += 1;
            } else if !(cert.disc < -REL_TOL * cert.disc_scale()) {
                out.disc_failures += 1;
            }
        }
        let mut p_negative = false;
        for &dx in xs_rel {
            let x = p.x0 + dx;
            let f = p.f(x, c);
            out.points += 1;
            let margin = (fmax - f) / fmax;
            out.min_margin = out.min_margin.min(margin);
            if margin < -REL_TOL {
                out.violations += 1;
            }
            let p_scale = (cert.r * x * x).abs() + (cert.s * x).abs() + cert.t.abs();
            if cert.p(x) < -REL_TOL * p_scale {
                p_negative = true;
            }
            if (f - fmax).abs() <= EQ_F_TOL {
                if (x - p.x0).abs() <= EQ_X_TOL && (c.abs() - 1.0).abs() <= EQ_C_TOL {
                    out.equality += 1;
                    if out.sample.len() < SAMPLE_LIMIT {
                        out.sample.push(LocusPoint {
                            x0: p.x0,
                            a: p.a,
                            b: p.b,
                            c,
                            x,
                            f,
                        });
                    }
                } else if p.a == p.b {
                    out.curve += 1;
                } else {
                    out.off_locus += 1;
                }
            }
        }
        let p0_scale = (cert.r * p.x0 * p.x0).abs() + (cert.s * p.x0).abs() + cert.t.abs();
        let agrees = match cert.verdict {
            CertificateVerdict::PositiveOnHalfline | CertificateVerdict::Tangency => !p_negative,
            CertificateVerdict::EqualityAtX0 => !p_negative && cert.p_x0.abs() <= 1e-9 * p0_scale,
            CertificateVerdict::Violated => false,
        };
        if !agrees {
            out.disagreements += 1;
        }
    }
    Ok(out)
}

pub fn sweep_fan(opts: &FanOptions) -> Result<FanReport, CliError> {
    if opts.grid == 0 {
        return Err(CliError::Usage("--grid must be positive".into()));
    }
    if !(opts.x_span >= 0.0) {
        return Err(CliError::Usage("--x-span must be nonnegative".into()));
    }
    let cs = c_grid(opts.c, opts.grid);
    let xs_rel = Range::new(0.0, opts.x_span)
        .map_err(CliError::Usage)?
        .grid(opts.grid);
    let mut params = Vec::new();
    for &x0 in &opts.x0.grid(opts.grid) {
        for &a in &opts.a.grid(opts.grid) {
            for &b in &opts.b.grid(opts.grid) {
                if a >= b {
                    params.push(
                        RankOneParams::new(x0, a, b).map_err(|e| CliError::Usage(e.to_string()))?,
                    );
                }
            }
        }
    }
    let partials: Vec<FanPartial> = params
        .par_iter()
        .map(|p| sweep_params(p, &cs, &xs_rel, opts.table))
        .collect::<Result<_, _>>()?;

    let mut total = FanPartial {
        min_margin: f64::INFINITY,
        ..FanPartial::default()
    };
    for part in partials {
        total.certificates += part.certificates;
        total.points += part.points;
        total.violations += part.violations;
        total.min_margin = total.min_margin.min(part.min_margin);
        total.verdicts.merge(&part.verdicts);
        total.disagreements += part.disagreements;
        total.disc_failures += part.disc_failures;
        total.double_roots += part.double_roots;
        total.equality += part.equality;
        total.curve += part.curve;
        total.off_locus += part.off_locus;
        let room = SAMPLE_LIMIT.saturating_sub(total.sample.len());
        total.sample.extend(part.sample.into_iter().take(room));
        let room = opts.table.saturating_sub(total.table.len());
        total.table.extend(part.table.into_iter().take(room));
    }
    Ok(FanReport {
        schema: SCHEMA,
        command: "lemma",
        which: "fAn",
        settings: opts.clone(),
        parameter_sets: params.len(),
        certificates: total.certificates,
        points: total.points,
        violations: total.violations,
        min_margin: total.min_margin,
        verdicts: total.verdicts,
        verdict_disagreements: total.disagreements,
        discriminant_failures: total.disc_failures,
        double_root_cases: total.double_roots,
        equality_points: total.equality,
        tangency_curve_points: total.curve,
        off_locus_equalities: total.off_locus,
        equality_sample: total.sample,
        table: total.table,
    })
}

// ---------------------------------------------------------------------------
// abelian lemma

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AiOptions {
    pub r: usize,
    pub a: Range,
    /// Upper end of every `x_i`; `x_1` starts at 1.
    pub x_max: f64,
    /// Points per axis for the grid mode.
    pub grid: usize,
    /// Monte-Carlo samples; 0 selects the grid.
    pub samples: usize,
    pub seed: u64,
}

impl Default for AiOptions {
    fn default() -> Self {
        Self {
            r: 3,
            a: Range { lo: 0.0, hi: 10.0 },
            x_max: 10.0,
            grid: 10,
            samples: 0,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AiReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub which: &'static str,
    pub settings: AiOptions,
    pub points: usize,
    /// Points with `f > r + a + 1e-12`, or a negative decomposition total.
    pub violations: usize,
    /// `min (r + a - f)` over the points.
    pub min_margin: f64,
    pub t1_negative: usize,
    pub t2_negative: usize,
    /// Points with `t3 < a sum (x_i - 1)^2` beyond rounding.
    pub t3_below_bound: usize,
    /// Points classified as equality (all `x_i = 1` up to rounding).
    pub equality_points: usize,
    /// `f(1, ..., 1) = r + a` at every sampled `a`, with all terms zero.
    pub equality_at_ones: bool,
}

/// Largest grid the `fAi` sweep accepts.
const MAX_AI_POINTS: usize = 50_000_000;

#[derive(Default)]
struct AiTally {
    points: usize,
    violations: usize,
    min_margin: f64,
    t1: usize,
    t2: usize,
    t3: usize,
    equality: usize,
    ones_ok: bool,
}

impl AiTally {
    fn visit(&mut self, xs: &[f64], a: f64) -> Result<(), CliError> {
        let check = pinching::lemma_fai_check(xs, a)?;
        let sq: f64 = xs.iter().map(|x| x * x).sum();
        let scale = (xs.len() as f64 + a) * (sq + a * xs[0]);
        self.points += 1;
        let margin = check.max - check.f;
        self.min_margin = self.min_margin.min(margin);
        if margin < -1e-12 || !check.holds {
            self.violations += 1;
        }
        if check.t1 < -REL_TOL * scale {
            self.t1 += 1;
        }
        if check.t2 < 0.0 {
            self.t2 += 1;
        }
        if check.t3 < check.t3_lower - REL_TOL * scale {
            self.t3 += 1;
        }
        if check.equality {
            self.equality += 1;
        }
        Ok(())
    }

    fn check_ones(&mut self, r: usize, a: f64) -> Result<(), CliError> {
        let ones = vec![1.0; r];
        let check = pinching::lemma_fai_check(&ones, a)?;
        let exact = (check.f - check.max).abs() <= 1e-12 * check.max
            && check.t1.abs() <= 1e-12
            && check.t2 == 0.0
            && check.t3.abs() <= 1e-12 * (1.0 + a);
        self.ones_ok &= exact && check.equality;
        Ok(())
    }
}

pub fn sweep_fai(opts: &AiOptions) -> Result<AiReport, CliError> {
    let r = opts.r;
    if !(1..=6).contains(&r) {
        return Err(CliError::Usage(format!("--r must be in 1..=6, got {r}")));
    }
    if !(opts.x_max > 1.0) {
        return Err(CliError::Usage("--x-max must exceed 1".into()));
    }
    if opts.a.lo < 0.0 {
        return Err(CliError::Usage("a must be nonnegative".into()));
    }
    let mut tally = AiTally {
        min_margin: f64::INFINITY,
        ones_ok: true,
        ..AiTally::default()
    };
    let mut xs = vec![0.0; r];
    if opts.samples > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        for _ in 0..opts.samples {
            let a = rng.random_range(opts.a.lo..=opts.a.hi);
            // mix uniform and near-1 draws to probe the equality point
            let near = rng.random_bool(0.25);
            for (i, x) in xs.iter_mut().enumerate() {
                let lo = if i == 0 { 1.0 } else { f64::MIN_POSITIVE };
                *x = if near {
                    (1.0 + rng.random_range(-0.01..0.01_f64)).max(lo)
                } else {
                    rng.random_range(lo..=opts.x_max)
                };
            }
            tally.visit(&xs, a)?;
            tally.check_ones(r, a)?;
        }
    } else {
        let k = opts.grid.max(1);
        let total = k.checked_pow(r as u32 + 1).unwrap_or(usize::MAX);
        if total > MAX_AI_POINTS {
            return Err(CliError::Usage(format!(
                "grid of {k}^{} points is too large; lower --grid or use --samples",
                r + 1
            )));
        }
        let first = Range::new(1.0, opts.x_max)
            .map_err(CliError::Usage)?
            .grid(k);
        let rest: Vec<f64> = (1..=k).map(|i| opts.x_max * i as f64 / k as f64).collect();
        let mut idx = vec![0usize; r];
        for a in opts.a.grid(k) {
            tally.check_ones(r, a)?;
            idx.iter_mut().for_each(|i| *i = 0);
            loop {
                xs[0] = first[idx[0]];
                for i in 1..r {
                    xs[i] = rest[idx[i]];
                }
                tally.visit(&xs, a)?;
                // odometer increment
                let mut pos = 0;
                loop {
                    if pos == r {
                        break;
                    }
                    idx[pos] += 1;
                    if idx[pos] < k {
                        break;
                    }
                    idx[pos] = 0;
                    pos += 1;
                }
                if pos == r {
                    break;
                }
            }
        }
    }
    Ok(AiReport {
        schema: SCHEMA,
        command: "lemma",
        which: "fAi",
        settings: opts.clone(),
        points: tally.points,
        violations: tally.violations,
        min_margin: tally.min_margin,
        t1_negative: tally.t1,
        t2_negative: tally.t2,
        t3_below_bound: tally.t3,
        equality_points: tally.equality,
        equality_at_ones: tally.ones_ok,
    })
}

fn outcome<T: Serialize>(report: &T, failed: bool) -> Outcome {
    let mut stdout = serde_json::to_string_pretty(report).expect("reports serialize");
    stdout.push('\n');
    Outcome {
        stdout,
        code: if failed { EXIT_ALERT } else { EXIT_OK },
    }
}

/// Exit 3 if the sweep finds a counterexample to the lemma.
pub fn fan(opts: &FanOptions) -> Result<Outcome, CliError> {
    let r = sweep_fan(opts)?;
    let failed = r.violations > 0
        || r.verdicts.violated > 0
        || r.discriminant_failures > 0
        || r.off_locus_equalities > 0;
    Ok(outcome(&r, failed))
}

pub fn fai(opts: &AiOptions) -> Result<Outcome, CliError> {
    let r = sweep_fai(opts)?;
    let failed = r.violations > 0 || r.t1_negative > 0 || r.t2_negative > 0 || r.t3_below_bound > 0;
    Ok(outcome(&r, failed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_fan_sweep_is_clean() {
        let opts = FanOptions {
            grid: 6,
            ..FanOptions::default()
        };
        let r = sweep_fan(&opts).unwrap();
        assert_eq!(r.violations, 0);
        assert_eq!(r.verdicts.violated, 0);
        assert_eq!(r.verdict_disagreements, 0);
        assert_eq!(r.discriminant_failures, 0);
        assert_eq!(r.off_locus_equalities, 0);
        assert!(r.equality_points > 0);
        for p in &r.equality_sample {
            assert!((p.c.abs() - 1.0).abs() < 1e-12 && p.x == p.x0);
        }
    }

    #[test]
    fn unit_c_values_are_added() {
        let cs = c_grid(Range { lo: -5.0, hi: 5.0 }, 4);
        assert!(cs.contains(&1.0) && cs.contains(&-1.0));
        let cs = c_grid(Range { lo: -1.0, hi: 1.0 }, 3);
        assert_eq!(cs, vec![-1.0, 1.0]);
    }

    #[test]
    fn fai_grid_and_samples() {
        let r = sweep_fai(&AiOptions {
            grid: 6,
            ..AiOptions::default()
        })
        .unwrap();
        assert_eq!(r.points, 6usize.pow(4));
        assert_eq!(r.violations, 0);
        assert!(r.equality_at_ones);
        let r = sweep_fai(&AiOptions {
            samples: 2000,
            r: 5,
            ..AiOptions::default()
        })
        .unwrap();
        assert_eq!(r.violations + r.t1_negative + r.t3_below_bound, 0);
    }

    #[test]
    fn oversized_grid_is_rejected() {
        let opts = AiOptions {
            r: 6,
            grid: 50,
            ..AiOptions::default()
        };
        assert!(matches!(sweep_fai(&opts), Err(CliError::Usage(_))));
    }
}
