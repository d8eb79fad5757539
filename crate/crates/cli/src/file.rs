//! JSON algebra files.
//!
//! ```json
//! {
//!   "kind": "rank-one",
//!   "dim_n": 3,
//!   "dim_a": 1,
//!   "brackets": [[1, 2, 3, "1.4142135623730951"]],
//!   "operators": [[["0.7071067811865476", "0", "0"], ["0", "0.7071067811865476", "0"], ["0", "0", "1.4142135623730951"]]],
//!   "labels": ["Y", "X1", "X2", "X3"]
//! }
//! ```
//!
//! Brackets are sparse 1-based triples `[i, j, k, c]` meaning
//! `<[e_i, e_j], e_k> = c` on the nilradical; the antisymmetric partner is
//! filled in. Operators are dense and row-major. Numbers are decimal strings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use ricci_pinch::{AbelianNilData, LieBracket, Operator, RankOneData};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Nilpotent,
    RankOne,
    AbelianNilradical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraFile {
    pub kind: Kind,
    pub dim_n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_a: Option<usize>,
    #[serde(default)]
    pub brackets: Vec<(usize, usize, usize, String)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub operators: Vec<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

/// Ingested data.
#[derive(Debug, Clone, PartialEq)]
pub enum Algebra {
    Nilpotent(LieBracket),
    RankOne(RankOneData),
    Abelian(AbelianNilData),
}

impl Algebra {
    pub fn kind(&self) -> Kind {
        match self {
            Algebra::Nilpotent(_) => Kind::Nilpotent,
            Algebra::RankOne(_) => Kind::RankOne,
            Algebra::Abelian(_) => Kind::AbelianNilradical,
        }
    }

    pub fn dim_a(&self) -> usize {
        match self {
            Algebra::Nilpotent(_) => 0,
            Algebra::RankOne(_) => 1,
            Algebra::Abelian(d) => d.dim_a(),
        }
    }

    pub fn dim_n(&self) -> usize {
        match self {
            Algebra::Nilpotent(b) => b.dim(),
            Algebra::RankOne(d) => d.dim_n(),
            Algebra::Abelian(d) => d.dim_n(),
        }
    }
}

pub fn parse(text: &str) -> Result<AlgebraFile, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        msg: e.to_string(),
    })
}

pub fn read(path: &str) -> Result<AlgebraFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_string(),
        source,
    })?;
    parse(&text)
}

fn field(field: impl Into<String>, msg: impl Into<String>) -> CliError {
    CliError::Field {
        field: field.into(),
        msg: msg.into(),
    }
}

fn number(name: String, text: &str) -> Result<f64, CliError> {
    let v: f64 = text
        .trim()
        .parse()
        .map_err(|_| field(name.clone(), format!("`{text}` is not a decimal number")))?;
    if !v.is_finite() {
        return Err(field(name, "value must be finite"));
    }
    Ok(v)
}

fn bracket(file: &AlgebraFile) -> Result<LieBracket, CliError> {
    let n = file.dim_n;
    let mut entries: BTreeMap<(usize, usize, usize), (usize, f64)> = BTreeMap::new();
    for (pos, (i, j, k, v)) in file.brackets.iter().enumerate() {
        let name = format!("brackets[{pos}]");
        for idx in [i, j, k] {
            if *idx < 1 || *idx > n {
                return Err(field(name, format!("index {idx} outside 1..={n}")));
            }
        }
        let v = number(format!("{name}.value"), v)?;
        if i == j {
            if v != 0.0 {
                return Err(field(name, format!("c[{i}][{i}][{k}] must vanish")));
            }
            continue;
        }
        let key = (i - 1, j - 1, k - 1);
        if entries.contains_key(&key) {
            return Err(field(name, format!("duplicate entry c[{i}][{j}][{k}]")));
        }
        if let Some(&(other, w)) = entries.get(&(j - 1, i - 1, k - 1)) {
            let scale = v.abs().max(w.abs()).max(1.0);
            if (v + w).abs() > ricci_pinch::lie::ANTISYMMETRY_TOL * scale {
                return Err(field(
                    name,
                    format!(
                        "c[{i}][{j}][{k}] = {v} is not -c[{j}][{i}][{k}] = {} (brackets[{other}])",
                        -w
                    ),
                ));
            }
        }
        entries.insert(key, (pos, v));
    }
    let mut c = vec![0.0; n * n * n];
    for (&(i, j, k), &(_, v)) in &entries {
        c[(i * n + j) * n + k] = v;
        c[(j * n + i) * n + k] = -v;
    }
    let b = LieBracket::from_tensor(n, c).map_err(|source| CliError::Ingest {
        check: "antisymmetry",
        source,
    })?;
    b.validate().map_err(|source| CliError::Ingest {
        check: "Jacobi identity",
        source,
    })?;
    b.validate_nilpotent().map_err(|source| CliError::Ingest {
        check: "nilpotency",
        source,
    })?;
    Ok(b)
}

fn operator(file: &AlgebraFile, idx: usize) -> Result<Operator, CliError> {
    let n = file.dim_n;
    let rows = &file.operators[idx];
    if rows.len() != n {
        return Err(field(
            format!("operators[{idx}]"),
            format!("expected {n} rows, got {}", rows.len()),
        ));
    }
    let mut m = Operator::zeros(n, n);
    for (r, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(field(
                format!("operators[{idx}][{r}]"),
                format!("expected {n} entries, got {}", row.len()),
            ));
        }
        for (c, v) in row.iter().enumerate() {
            m[(r, c)] = number(format!("operators[{idx}][{r}][{c}]"), v)?;
        }
    }
    Ok(m)
}

/// Validates a parsed file and builds the corresponding data.
pub fn ingest(file: &AlgebraFile) -> Result<Algebra, CliError> {
    if file.dim_n == 0 {
        return Err(field("dim_n", "must be positive"));
    }
    let dim_a = match (file.kind, file.dim_a) {
        (Kind::Nilpotent, None | Some(0)) => 0,
        (Kind::RankOne, None | Some(1)) => 1,
        (Kind::AbelianNilradical, Some(r)) if r >= 1 => r,
        (Kind::AbelianNilradical, None) => file.operators.len(),
        (_, Some(r)) => {
            return Err(field(
                "dim_a",
                format!("{r} does not match kind {:?}", file.kind),
            ))
        }
    };
    if file.operators.len() != dim_a {
        return Err(field(
            "operators",
            format!("expected {dim_a} operator(s), got {}", file.operators.len()),
        ));
    }
    if let Some(labels) = &file.labels {
        if labels.len() != dim_a + file.dim_n {
            return Err(field(
                "labels",
                format!(
                    "expected {} labels, got {}",
                    dim_a + file.dim_n,
                    labels.len()
                ),
            ));
        }
    }
    let b = bracket(file)?;
    match file.kind {
        Kind::Nilpotent => Ok(Algebra::Nilpotent(b)),
        Kind::RankOne => {
            if b.is_abelian() {
                return Err(CliError::Ingest {
                    check: "non-abelian nilradical",
                    source: ricci_pinch::Error::FlatNilradical,
                });
            }
            let a = operator(file, 0)?;
            RankOneData::new(a, b)
                .map(Algebra::RankOne)
                .map_err(|source| CliError::Ingest {
                    check: "A is a derivation",
                    source,
                })
        }
        Kind::AbelianNilradical => {
            if !b.is_abelian() {
                return Err(field("brackets", "the nilradical must be abelian"));
            }
            let ops = (0..dim_a)
                .map(|i| operator(file, i))
                .collect::<Result<Vec<_>, _>>()?;
            AbelianNilData::new(ops)
                .map(Algebra::Abelian)
                .map_err(|source| CliError::Ingest {
                    check: "commuting, independent operators",
                    source,
                })
        }
    }
}

fn rows(m: &Operator) -> Vec<Vec<String>> {
    m.row_iter()
        .map(|r| r.iter().map(|v| v.to_string()).collect())
        .collect()
}

/// Writes data back in file form; `f64` formatting is shortest round-trip.
pub fn to_file(alg: &Algebra) -> AlgebraFile {
    let (bracket, operators) = match alg {
        Algebra::Nilpotent(b) => (b.clone(), vec![]),
        Algebra::RankOne(d) => (d.bracket().clone(), vec![rows(d.a())]),
        Algebra::Abelian(d) => (
            LieBracket::zero(d.dim_n()),
            d.ops().iter().map(rows).collect(),
        ),
    };
    AlgebraFile {
        kind: alg.kind(),
        dim_n: alg.dim_n(),
        dim_a: (alg.kind() != Kind::Nilpotent).then(|| alg.dim_a()),
        brackets: bracket
            .relations()
            .into_iter()
            .map(|(i, j, k, v)| (i + 1, j + 1, k + 1, v.to_string()))
            .collect(),
        operators,
        labels: None,
    }
}
