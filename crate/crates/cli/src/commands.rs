//! `ricci`, `certify` and `maximize`.

use std::fmt::Write as _;

use serde::Serialize;

use ricci_pinch::curvature::{self, RankOneTerms, RicciReport};
use ricci_pinch::orbit::{self, SearchConfig, SearchReport, Strategy};
use ricci_pinch::soliton::{self, SolitonCertificate};
use ricci_pinch::Operator;

use crate::file::{Algebra, Kind};
use crate::{CliError, Outcome, EXIT_ALERT, EXIT_INPUT, EXIT_NEGATIVE, EXIT_OK, SCHEMA};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Form {
    Blocks,
    Generic,
    Both,
}

pub const FLAT_MESSAGE: &str = "flat metric: F undefined";

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn write_matrix(out: &mut String, m: &Operator) {
    for row in m.row_iter() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:>16.10}")).collect();
        let _ = writeln!(out, "  [{} ]", cells.join(""));
    }
}

// ---------------------------------------------------------------------------
// ricci

/// Ricci operator from the block formulas (nilpotent: the nilpotent formula).
fn blocks_ricci(alg: &Algebra) -> Operator {
    match alg {
        Algebra::Nilpotent(b) => curvature::nil_ricci(b),
        Algebra::RankOne(d) => curvature::rank_one_ricci(d),
        Algebra::Abelian(d) => curvature::abelian_ricci(d),
    }
}

fn generic_ricci(alg: &Algebra) -> Result<Operator, CliError> {
    let bracket = match alg {
        Algebra::Nilpotent(b) => b.clone(),
        Algebra::RankOne(d) => d.solvable_bracket(),
        Algebra::Abelian(d) => d.solvable_bracket(),
    };
    Ok(curvature::generic_ricci(&bracket)?)
}

fn with_remainder(alg: &Algebra, ric: Operator) -> RicciReport {
    let mut report = RicciReport::from_ricci(ric);
    if let Algebra::RankOne(d) = alg {
        report.g = Some(report.ric_norm_sq - RankOneTerms::of(d).explicit_denominator());
    }
    report
}

#[derive(Serialize)]
struct RicciOutput<'a> {
    schema: &'static str,
    command: &'static str,
    kind: Kind,
    form: Form,
    #[serde(skip_serializing_if = "Option::is_none")]
    blocks: Option<&'a RicciReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    generic: Option<&'a RicciReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cross_check_residual: Option<f64>,
    flat: bool,
}

fn write_report(out: &mut String, title: &str, r: &RicciReport) {
    let _ = writeln!(out, "[{title}]");
    let _ = writeln!(out, "Ric =");
    write_matrix(out, &r.ric);
    let _ = writeln!(out, "scal = {}", r.scal);
    let _ = writeln!(out, "|Ric|^2 = {}", r.ric_norm_sq);
    match r.f {
        Some(f) => {
            let _ = writeln!(out, "F = {f}");
        }
        None => {
            let _ = writeln!(out, "F = undefined");
        }
    }
    if let Some(g) = r.g {
        let _ = writeln!(out, "G = {g:.3e}");
    }
}

pub fn ricci(alg: &Algebra, form: Form, format: Format) -> Result<Outcome, CliError> {
    let blocks =
        matches!(form, Form::Blocks | Form::Both).then(|| with_remainder(alg, blocks_ricci(alg)));
    let generic = match form {
        Form::Generic | Form::Both => Some(with_remainder(alg, generic_ricci(alg)?)),
        Form::Blocks => None,
    };
    let residual = match (&blocks, &generic) {
        (Some(b), Some(g)) => Some((&b.ric - &g.ric).abs().max()),
        _ => None,
    };
    let flat = blocks
        .as_ref()
        .or(generic.as_ref())
        .is_some_and(|r| r.is_flat());

    let mut out = String::new();
    match format {
        Format::Json => {
            out = json(&RicciOutput {
                schema: SCHEMA,
                command: "ricci",
                kind: alg.kind(),
                form,
                blocks: blocks.as_ref(),
                generic: generic.as_ref(),
                cross_check_residual: residual,
                flat,
            });
        }
        Format::Text => {
            if let Some(b) = &blocks {
                write_report(&mut out, "block formulas", b);
            }
            if let Some(g) = &generic {
                write_report(&mut out, "generic formula", g);
            }
            if let Some(r) = residual {
                let _ = writeln!(out, "cross-check residual = {r:.3e}");
            }
        }
    }
    if flat {
        if format == Format::Text {
            out.push_str(FLAT_MESSAGE);
            out.push('\n');
        }
        return Ok(Outcome {
            stdout: out,
            code: EXIT_INPUT,
        });
    }
    Ok(Outcome {
        stdout: out,
        code: EXIT_OK,
    })
}

// ---------------------------------------------------------------------------
// certify

#[derive(Serialize)]
struct CertifyOutput<'a> {
    schema: &'static str,
    command: &'static str,
    kind: Kind,
    certificate: &'a SolitonCertificate,
}

pub fn certificate(alg: &Algebra) -> Result<SolitonCertificate, CliError> {
    Ok(match alg {
        Algebra::Nilpotent(b) => soliton::certify_nilpotent(b)?,
        Algebra::RankOne(d) => soliton::certify_rank_one(d)?,
        Algebra::Abelian(d) => soliton::certify_abelian(d)?,
    })
}

pub fn certify(alg: &Algebra, format: Format) -> Result<Outcome, CliError> {
    let cert = certificate(alg)?;
    let code = if cert.is_soliton() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    };
    let stdout = match format {
        Format::Json => json(&CertifyOutput {
            schema: SCHEMA,
            command: "certify",
            kind: alg.kind(),
            certificate: &cert,
        }),
        Format::Text => {
            let mut out = String::new();
            let verdict = if cert.is_soliton() {
                "soliton"
            } else {
                "not a soliton"
            };
            let _ = writeln!(
                out,
                "verdict: {verdict}{}",
                if cert.flat { " (flat)" } else { "" }
            );
            let _ = writeln!(
                out,
                "normality residual:          {:.2e}",
                cert.normality_residual
            );
            let _ = writeln!(
                out,
                "trace residual:              {:.2e}",
                cert.trace_residual
            );
            let _ = writeln!(
                out,
                "derivation residual:         {:.2e}",
                cert.derivation_residual
            );
            if let Some(r) = cert.operator_derivation_residual {
                let _ = writeln!(out, "operator derivation residual: {r:.2e}");
            }
            let _ = writeln!(
                out,
                "full derivation residual:    {:.2e}",
                cert.full_derivation_residual
            );
            let _ = writeln!(out, "soliton constant:            {:.6}", cert.constant);
            let _ = writeln!(
                out,
                "tolerance:                   {:.2e}",
                soliton::SOLITON_TOL
            );
            out
        }
    };
    Ok(Outcome { stdout, code })
}

// ---------------------------------------------------------------------------
// maximize

#[derive(Serialize)]
struct SearchSettings {
    strategy: Strategy,
    trials: usize,
    starts: usize,
    iters: usize,
    seed: u64,
    sigmas: Vec<f64>,
}

#[derive(Serialize)]
struct MaximizeOutput<'a> {
    schema: &'static str,
    command: &'static str,
    kind: Kind,
    dim_a: usize,
    dim_n: usize,
    settings: SearchSettings,
    report: &'a SearchReport,
}

/// Runs the orbit search; the report never depends on `cfg.threads`.
pub fn maximize(alg: &Algebra, cfg: &SearchConfig) -> Result<Outcome, CliError> {
    let report = match alg {
        Algebra::RankOne(d) => orbit::maximize_f_rank_one(d, cfg)?,
        Algebra::Abelian(d) => orbit::maximize_f_abelian(d, cfg)?,
        Algebra::Nilpotent(_) => {
            return Err(CliError::Usage(
                "maximize needs rank-one or abelian-nilradical data (use a solvable extension)"
                    .into(),
            ))
        }
    };
    let stdout = json(&MaximizeOutput {
        schema: SCHEMA,
        command: "maximize",
        kind: alg.kind(),
        dim_a: alg.dim_a(),
        dim_n: alg.dim_n(),
        settings: SearchSettings {
            strategy: cfg.strategy,
            trials: cfg.trials,
            starts: cfg.starts,
            iters: cfg.iters,
            seed: cfg.seed,
            sigmas: cfg.sigmas.clone(),
        },
        report: &report,
    });
    let code = if report.alert { EXIT_ALERT } else { EXIT_OK };
    Ok(Outcome { stdout, code })
}
