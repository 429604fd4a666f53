//! Sparse SDP text format and block output.
//!
//! ```text
//! # n m field
//! 4 2 real
//! MATRIX 0 0 0 1.0        # C[0,0] = 1
//! MATRIX 1 0 1 0.5        # A_1[0,1] = A_1[1,0] = 0.5
//! MATRIX 2 2 3 0.0 1.0    # complex entry: re im
//! B 1.0 2.0
//! ```
//!
//! Matrix 0 is the objective, `1..=m` the constraints. Indices are 0-based
//! and only one triangle is given; the other is filled by conjugation.
//! Repeated entries add up.

use std::fs;
use std::path::Path;

use serde::Serialize;

use super::{fmt_f64, strip_comment};
use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix, C64};
use crate::sdp::{BlockDiagonalizedSdp, SdpProblem};

pub fn parse(text: &str) -> Result<SdpProblem> {
    let mut header: Option<(usize, usize, Field)> = None;
    let mut mats: Vec<Matrix> = Vec::new();
    let mut b: Option<Vec<f64>> = None;
    let mut last_line = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        last_line = line_no;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        let Some((n, m, field)) = header else {
            if words.len() != 3 {
                return Err(Error::parse(line_no, "expected header `n m field`"));
            }
            let n = parse_usize(words[0], line_no)?;
            let m = parse_usize(words[1], line_no)?;
            if n == 0 {
                return Err(Error::parse(line_no, "matrix size must be positive"));
            }
            let field = words[2].parse::<Field>().map_err(|e| Error::parse(line_no, e))?;
            header = Some((n, m, field));
            mats = vec![Matrix::zeros(n, n); m + 1];
            continue;
        };
        match words[0] {
            "MATRIX" => {
                let expected = if field == Field::Real { 5 } else { 6 };
                if words.len() != expected && words.len() != 5 {
                    return Err(Error::parse(line_no, "expected `MATRIX k i j re [im]`"));
                }
                let k = parse_usize(words[1], line_no)?;
                let i = parse_usize(words[2], line_no)?;
                let j = parse_usize(words[3], line_no)?;
                if k > m {
                    return Err(Error::parse(line_no, format!("matrix index {k} exceeds m = {m}")));
                }
                if i >= n || j >= n {
                    return Err(Error::parse(line_no, format!("entry ({i}, {j}) outside {n}x{n}")));
                }
                let re = parse_f64(words[4], line_no)?;
                let im = match words.get(5) {
                    Some(w) => parse_f64(w, line_no)?,
                    None => 0.0,
                };
                if i == j && im != 0.0 {
                    return Err(Error::parse(line_no, "diagonal entries of a Hermitian matrix are real"));
                }
                let z = C64::new(re, im);
                mats[k][(i, j)] += z;
                if i != j {
                    mats[k][(j, i)] += z.conj();
                }
            }
            "B" => {
                if b.is_some() {
                    return Err(Error::parse(line_no, "duplicate `B` line"));
                }
                let values = words[1..]
                    .iter()
                    .map(|w| parse_f64(w, line_no))
                    .collect::<Result<Vec<_>>>()?;
                if values.len() != m {
                    return Err(Error::parse(line_no, format!("expected {m} values after `B`, got {}", values.len())));
                }
                b = Some(values);
            }
            other => return Err(Error::parse(line_no, format!("unknown record `{other}`"))),
        }
    }
    let Some((_, m, field)) = header else {
        return Err(Error::parse(last_line.max(1), "missing header"));
    };
    let b = match b {
        Some(b) => b,
        None if m == 0 => Vec::new(),
        None => return Err(Error::parse(last_line.max(1), "missing `B` line")),
    };
    let mut mats = mats.into_iter();
    let c = mats.next().expect("objective matrix");
    SdpProblem::new(field, c, mats.collect(), b)
}

fn parse_usize(word: &str, line: usize) -> Result<usize> {
    word.parse().map_err(|_| Error::parse(line, format!("expected a non-negative integer, got `{word}`")))
}

fn parse_f64(word: &str, line: usize) -> Result<f64> {
    let v: f64 = word.parse().map_err(|_| Error::parse(line, format!("expected a number, got `{word}`")))?;
    if !v.is_finite() {
        return Err(Error::parse(line, format!("non-finite value `{word}`")));
    }
    Ok(v)
}

/// Writes the upper triangle of every nonzero entry.
pub fn to_text(field: Field, c: &Matrix, a: &[Matrix], b: &[f64]) -> String {
    let n = c.nrows();
    let mut out = format!("{n} {} {}\n", a.len(), field);
    for (k, mat) in std::iter::once(c).chain(a).enumerate() {
        for i in 0..n {
            for j in i..n {
                let z = mat[(i, j)];
                if z.re == 0.0 && z.im == 0.0 {
                    continue;
                }
                out.push_str(&format!("MATRIX {k} {i} {j} {}", fmt_f64(z.re)));
                if field == Field::Complex {
                    out.push_str(&format!(" {}", fmt_f64(if i == j { 0.0 } else { z.im })));
                }
                out.push('\n');
            }
        }
    }
    out.push('B');
    for v in b {
        out.push(' ');
        out.push_str(&fmt_f64(*v));
    }
    out.push('\n');
    out
}

pub fn problem_to_text(problem: &SdpProblem) -> String {
    to_text(problem.field, &problem.c, &problem.a, &problem.b)
}

#[derive(Debug, Serialize)]
struct ManifestBlock {
    file: String,
    dimension: usize,
    multiplicity: usize,
    field: Field,
    residual: f64,
    real_type: String,
}

#[derive(Debug, Serialize)]
struct Manifest {
    schema_version: u32,
    field: Field,
    n: usize,
    m: usize,
    residual: f64,
    b: Vec<f64>,
    blocks: Vec<ManifestBlock>,
}

/// Writes `manifest.json` and one `block_<k>.sdp` per isotypic component.
/// The block programs share `b`; each block objective and constraint stands
/// for `D` identical copies, recorded in the manifest.
pub fn write_blocks(dir: &Path, result: &BlockDiagonalizedSdp) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut blocks = Vec::with_capacity(result.blocks.len());
    for (k, (block, comp)) in result
        .blocks
        .iter()
        .zip(result.decomposition.components())
        .enumerate()
    {
        let file = format!("block_{k}.sdp");
        fs::write(dir.join(&file), to_text(result.field, &block.c, &block.a, &result.b))?;
        blocks.push(ManifestBlock {
            file,
            dimension: block.dimension,
            multiplicity: block.multiplicity,
            field: result.field,
            residual: block.residual,
            real_type: comp.real_type.as_str().to_string(),
        });
    }
    let manifest = Manifest {
        schema_version: 1,
        field: result.field,
        n: result.decomposition.dimension(),
        m: result.b.len(),
        residual: result.residual,
        b: result.b.clone(),
        blocks,
    };
    let mut json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Shape(e.to_string()))?;
    json.push('\n');
    fs::write(dir.join("manifest.json"), json)?;
    Ok(())
}
