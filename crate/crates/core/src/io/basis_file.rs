//! Change-of-basis files written by `decompose --emit-basis`.
//!
//! ```text
//! n 3 field real
//! components 2:1:real 1:1:real
//! <row 0 of U>
//! ...
//! ```
//!
//! Rows hold `n` numbers for a real basis and `n` pairs `re im` for a complex
//! one, each printed with 17 significant digits.

use super::{fmt_f64, strip_comment};
use crate::decompose::{IrrepDecomposition, RealType};
use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix, C64};

pub fn to_text(decomp: &IrrepDecomposition) -> String {
    let n = decomp.dimension();
    let field = decomp.field();
    let mut out = format!("n {n} field {field}\ncomponents");
    for c in decomp.components() {
        out.push_str(&format!(" {}:{}:{}", c.dimension, c.multiplicity, c.real_type.as_str()));
    }
    out.push('\n');
    let u = decomp.basis();
    for i in 0..n {
        let row: Vec<String> = (0..n)
            .map(|j| {
                let z = u[(i, j)];
                match field {
                    Field::Real => fmt_f64(z.re),
                    Field::Complex => format!("{} {}", fmt_f64(z.re), fmt_f64(z.im)),
                }
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse(text: &str) -> Result<IrrepDecomposition> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, strip_comment(l)))
        .filter(|(_, l)| !l.is_empty());

    let (line_no, header) = lines.next().ok_or_else(|| Error::parse(1, "empty basis file"))?;
    let words: Vec<&str> = header.split_whitespace().collect();
    let (n, field) = match words.as_slice() {
        ["n", n, "field", f] => (
            n.parse::<usize>()
                .map_err(|_| Error::parse(line_no, format!("bad dimension `{n}`")))?,
            f.parse::<Field>().map_err(|e| Error::parse(line_no, e))?,
        ),
        _ => return Err(Error::parse(line_no, "expected `n <dim> field <real|complex>`")),
    };

    let (line_no, comps) = lines
        .next()
        .ok_or_else(|| Error::parse(line_no, "missing `components` line"))?;
    let mut words = comps.split_whitespace();
    if words.next() != Some("components") {
        return Err(Error::parse(line_no, "expected `components D:M:type ...`"));
    }
    let mut layout = Vec::new();
    for w in words {
        let parts: Vec<&str> = w.split(':').collect();
        let bad = || Error::parse(line_no, format!("bad component `{w}`"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let d = parts[0].parse::<usize>().map_err(|_| bad())?;
        let m = parts[1].parse::<usize>().map_err(|_| bad())?;
        let t = parts[2].parse::<RealType>().map_err(|_| bad())?;
        layout.push((d, m, t));
    }

    let per_row = if field == Field::Real { n } else { 2 * n };
    let mut u = Matrix::zeros(n, n);
    let mut rows = 0;
    for (line_no, line) in lines {
        if rows == n {
            return Err(Error::parse(line_no, "more rows than the dimension"));
        }
        let values = line
            .split_whitespace()
            .map(|w| {
                w.parse::<f64>()
                    .map_err(|_| Error::parse(line_no, format!("expected a number, got `{w}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        if values.len() != per_row {
            return Err(Error::parse(line_no, format!("expected {per_row} numbers, got {}", values.len())));
        }
        for j in 0..n {
            u[(rows, j)] = match field {
                Field::Real => C64::new(values[j], 0.0),
                Field::Complex => C64::new(values[2 * j], values[2 * j + 1]),
            };
        }
        rows += 1;
    }
    if rows != n {
        return Err(Error::parse(text.lines().count().max(1), format!("expected {n} rows, got {rows}")));
    }
    IrrepDecomposition::from_basis(u, &layout, field)
}
