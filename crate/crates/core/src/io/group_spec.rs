//! Group description files.
//!
//! ```text
//! # symmetric group on three points
//! degree: 3
//! generators: [1,0,2] [1,2,0]
//! ```
//!
//! `generators:` may be empty (the trivial group). A compact group is written
//! `compact: unitary 3` or `compact: orthogonal 3`; the command line also
//! accepts the shorthands `unitary:3` and `orthogonal:3` in place of a path.
//! Blank lines and `#` comments are ignored. [`GroupSpec::to_text`] produces
//! the canonical form, which parses back to the same spec and re-serializes
//! to identical bytes.

use std::sync::Arc;

use super::strip_comment;
use crate::compact::{CompactGroup, CompactKind};
use crate::error::{Error, Result};
use crate::perm::{Permutation, PermutationGroup};
use crate::rep::Group;

#[derive(Debug, Clone, PartialEq)]
pub enum GroupSpec {
    Permutation {
        degree: usize,
        generators: Vec<Permutation>,
    },
    Compact(CompactGroup),
}

impl GroupSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let mut degree: Option<(usize, usize)> = None;
        let mut generators: Option<(usize, Vec<Vec<usize>>)> = None;
        let mut compact: Option<CompactGroup> = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = strip_comment(raw);
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once(':')
                .ok_or_else(|| Error::parse(line_no, format!("expected `key: value`, got `{line}`")))?;
            let value = value.trim();
            match key.trim() {
                "degree" => {
                    let d = value
                        .parse::<usize>()
                        .map_err(|_| Error::parse(line_no, format!("invalid degree `{value}`")))?;
                    if d == 0 {
                        return Err(Error::parse(line_no, "degree must be positive"));
                    }
                    degree = Some((d, line_no));
                }
                "generators" => generators = Some((line_no, parse_image_lists(value, line_no)?)),
                "compact" => compact = Some(parse_compact(value, line_no)?),
                other => return Err(Error::parse(line_no, format!("unknown key `{other}`"))),
            }
        }
        let last_line = text.lines().count().max(1);
        if let Some(c) = compact {
            if degree.is_some() || generators.is_some() {
                return Err(Error::parse(last_line, "a compact group takes no degree or generators"));
            }
            return Ok(GroupSpec::Compact(c));
        }
        let (degree, degree_line) =
            degree.ok_or_else(|| Error::parse(last_line, "missing `degree:`"))?;
        let (gen_line, lists) = generators.unwrap_or((degree_line, Vec::new()));
        let generators = lists
            .into_iter()
            .map(|images| {
                if images.len() != degree {
                    return Err(Error::parse(
                        gen_line,
                        format!("generator {images:?} has {} points, degree is {degree}", images.len()),
                    ));
                }
                Permutation::new(images).map_err(|e| Error::parse(gen_line, e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GroupSpec::Permutation { degree, generators })
    }

    /// Accepts `unitary:d`, `orthogonal:d`, `symmetric:n` and `cyclic:n`.
    pub fn parse_shorthand(s: &str) -> Option<Result<Self>> {
        let (kind, d) = s.split_once(':')?;
        let kind = match kind {
            "unitary" => CompactKind::Unitary,
            "orthogonal" => CompactKind::Orthogonal,
            "symmetric" | "cyclic" => {
                let group = d
                    .parse::<usize>()
                    .map_err(|_| Error::parse(1, format!("invalid degree `{d}`")))
                    .and_then(|n| match kind {
                        "symmetric" => PermutationGroup::symmetric(n),
                        _ => PermutationGroup::cyclic(n),
                    });
                return Some(group.map(|g| GroupSpec::Permutation {
                    degree: g.degree(),
                    generators: g.generators().to_vec(),
                }));
            }
            _ => return None,
        };
        Some(
            d.parse::<usize>()
                .map_err(|_| Error::parse(1, format!("invalid dimension `{d}`")))
                .and_then(|d| CompactGroup::new(kind, d).map_err(|e| Error::parse(1, e.to_string())))
                .map(GroupSpec::Compact),
        )
    }

    pub fn to_text(&self) -> String {
        match self {
            GroupSpec::Permutation { degree, generators } => {
                let gens: Vec<String> = generators.iter().map(|g| g.to_string()).collect();
                if gens.is_empty() {
                    format!("degree: {degree}\ngenerators:\n")
                } else {
                    format!("degree: {degree}\ngenerators: {}\n", gens.join(" "))
                }
            }
            GroupSpec::Compact(c) => {
                let kind = match c.kind() {
                    CompactKind::Unitary => "unitary",
                    CompactKind::Orthogonal => "orthogonal",
                };
                format!("compact: {kind} {}\n", c.dimension())
            }
        }
    }

    pub fn build(&self) -> Result<Group> {
        Ok(match self {
            GroupSpec::Permutation { degree, generators } => Group::Finite(Arc::new(
                PermutationGroup::from_generators(*degree, generators.clone())?,
            )),
            GroupSpec::Compact(c) => Group::Compact(*c),
        })
    }
}

fn parse_compact(value: &str, line_no: usize) -> Result<CompactGroup> {
    let mut parts = value.split_whitespace();
    let kind = match parts.next() {
        Some("unitary") => CompactKind::Unitary,
        Some("orthogonal") => CompactKind::Orthogonal,
        other => {
            return Err(Error::parse(
                line_no,
                format!("unknown compact group `{}`", other.unwrap_or("")),
            ))
        }
    };
    let d = parts
        .next()
        .and_then(|d| d.parse::<usize>().ok())
        .ok_or_else(|| Error::parse(line_no, "expected a dimension after the group kind"))?;
    if parts.next().is_some() {
        return Err(Error::parse(line_no, "trailing input after compact group"));
    }
    CompactGroup::new(kind, d).map_err(|e| Error::parse(line_no, e.to_string()))
}

/// `[1,0,2] [1,2,0]` into image lists.
fn parse_image_lists(value: &str, line_no: usize) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    let mut rest = value.trim();
    while !rest.is_empty() {
        let body = rest
            .strip_prefix('[')
            .ok_or_else(|| Error::parse(line_no, format!("expected `[` at `{rest}`")))?;
        let close = body
            .find(']')
            .ok_or_else(|| Error::parse(line_no, "unterminated `[`"))?;
        let images = body[..close]
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::parse(line_no, format!("invalid point `{}`", t.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(images);
        rest = body[close + 1..].trim_start();
    }
    Ok(out)
}
