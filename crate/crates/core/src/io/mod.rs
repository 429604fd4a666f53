//! Text formats read and written by the command-line tool.

pub mod basis_file;
pub mod group_spec;
pub mod rep_spec;
pub mod sdp_file;

/// Strips a `#` comment and surrounding whitespace.
pub(crate) fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

/// Shortest decimal with 17 significant digits, so values round-trip exactly.
pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
