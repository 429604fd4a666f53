//! Representation description files.
//!
//! ```text
//! field: complex
//! rep: tensor(defining, conj(defining))
//! ```
//!
//! The optional `field:` line picks `real` or `complex`. Everything after
//! `rep:` (possibly spanning several lines) is one expression:
//!
//! ```text
//! expr   := "natural" | "defining" | "trivial" "(" INT ")"
//!         | "generator-images" "(" matrix { "," matrix } ")"
//!         | "tensor" "(" expr "," expr ")" | "dsum" "(" expr "," expr ")"
//!         | "conj" "(" expr ")" | "power" "(" INT "," expr ")"
//! matrix := "[" row { ";" row } "]"
//! row    := number { [","] number }
//! number := REAL | REAL "i" | REAL ("+"|"-") REAL "i"
//! ```
//!
//! `generator-images` lists one matrix per group generator, in the order of
//! the group file. `#` starts a comment.

use super::strip_comment;
use crate::error::{Error, Result};
use crate::linalg::{Field, Matrix, C64};
use crate::rep::{Group, Representation};

#[derive(Debug, Clone, PartialEq)]
pub enum RepExpr {
    Natural,
    Defining,
    Trivial(usize),
    GeneratorImages(Vec<Matrix>),
    Tensor(Box<RepExpr>, Box<RepExpr>),
    DirectSum(Box<RepExpr>, Box<RepExpr>),
    Conjugate(Box<RepExpr>),
    Power(usize, Box<RepExpr>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RepSpec {
    pub field: Option<Field>,
    pub expr: RepExpr,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Number(C64),
    Open,
    Close,
    OpenBracket,
    CloseBracket,
    Comma,
    Semicolon,
}

struct Lexer {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    last_line: usize,
}

fn lex_real(chars: &[char], i: &mut usize) -> Option<f64> {
    let start = *i;
    let mut j = *i;
    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
        j += 1;
    }
    let digits_start = j;
    while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
        j += 1;
    }
    if j == digits_start {
        return None;
    }
    if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') {
        let mut k = j + 1;
        if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
            k += 1;
        }
        if k < chars.len() && chars[k].is_ascii_digit() {
            while k < chars.len() && chars[k].is_ascii_digit() {
                k += 1;
            }
            j = k;
        }
    }
    let s: String = chars[start..j].iter().collect();
    let v = s.parse::<f64>().ok()?;
    *i = j;
    Some(v)
}

fn starts_number(chars: &[char], i: usize) -> bool {
    let c = chars[i];
    if c.is_ascii_digit() || c == '.' {
        return true;
    }
    (c == '+' || c == '-')
        && i + 1 < chars.len()
        && (chars[i + 1].is_ascii_digit() || chars[i + 1] == '.')
}

fn tokenize_line(line: &str, line_no: usize, out: &mut Vec<(Tok, usize)>) -> Result<()> {
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let simple = match c {
            '(' => Some(Tok::Open),
            ')' => Some(Tok::Close),
            '[' => Some(Tok::OpenBracket),
            ']' => Some(Tok::CloseBracket),
            ',' => Some(Tok::Comma),
            ';' => Some(Tok::Semicolon),
            _ => None,
        };
        if let Some(t) = simple {
            out.push((t, line_no));
            i += 1;
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '-' || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), line_no));
        } else if starts_number(&chars, i) {
            let first = lex_real(&chars, &mut i)
                .ok_or_else(|| Error::parse(line_no, "malformed number"))?;
            let value = if i < chars.len() && chars[i] == 'i' {
                i += 1;
                C64::new(0.0, first)
            } else if i < chars.len() && (chars[i] == '+' || chars[i] == '-') && starts_number(&chars, i) {
                let second = lex_real(&chars, &mut i)
                    .ok_or_else(|| Error::parse(line_no, "malformed imaginary part"))?;
                if i >= chars.len() || chars[i] != 'i' {
                    return Err(Error::parse(line_no, "expected `i` after the imaginary part"));
                }
                i += 1;
                C64::new(first, second)
            } else {
                C64::new(first, 0.0)
            };
            out.push((Tok::Number(value), line_no));
        } else {
            return Err(Error::parse(line_no, format!("unexpected character `{c}`")));
        }
    }
    Ok(())
}

impl Lexer {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn line(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|(_, l)| *l)
            .unwrap_or(self.last_line)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        let line = self.line();
        match self.next() {
            Some(t) if t == want => Ok(()),
            Some(t) => Err(Error::parse(line, format!("expected {what}, found {t:?}"))),
            None => Err(Error::parse(line, format!("expected {what}, found end of input"))),
        }
    }

    fn integer(&mut self) -> Result<usize> {
        let line = self.line();
        match self.next() {
            Some(Tok::Number(z)) if z.im == 0.0 && z.re >= 0.0 && z.re.fract() == 0.0 => Ok(z.re as usize),
            other => Err(Error::parse(line, format!("expected a non-negative integer, found {other:?}"))),
        }
    }

    fn expr(&mut self) -> Result<RepExpr> {
        let line = self.line();
        let name = match self.next() {
            Some(Tok::Ident(s)) => s,
            other => return Err(Error::parse(line, format!("expected a representation, found {other:?}"))),
        };
        let expr = match name.as_str() {
            "natural" => RepExpr::Natural,
            "defining" => RepExpr::Defining,
            "trivial" => {
                self.expect(Tok::Open, "`(`")?;
                let n = self.integer()?;
                self.expect(Tok::Close, "`)`")?;
                RepExpr::Trivial(n)
            }
            "generator-images" => {
                self.expect(Tok::Open, "`(`")?;
                let mut mats = vec![self.matrix()?];
                while self.peek() == Some(&Tok::Comma) {
                    self.next();
                    mats.push(self.matrix()?);
                }
                self.expect(Tok::Close, "`)`")?;
                RepExpr::GeneratorImages(mats)
            }
            "tensor" | "dsum" => {
                self.expect(Tok::Open, "`(`")?;
                let a = self.expr()?;
                self.expect(Tok::Comma, "`,`")?;
                let b = self.expr()?;
                self.expect(Tok::Close, "`)`")?;
                if name == "tensor" {
                    RepExpr::Tensor(Box::new(a), Box::new(b))
                } else {
                    RepExpr::DirectSum(Box::new(a), Box::new(b))
                }
            }
            "conj" => {
                self.expect(Tok::Open, "`(`")?;
                let a = self.expr()?;
                self.expect(Tok::Close, "`)`")?;
                RepExpr::Conjugate(Box::new(a))
            }
            "power" => {
                self.expect(Tok::Open, "`(`")?;
                let k = self.integer()?;
                self.expect(Tok::Comma, "`,`")?;
                let a = self.expr()?;
                self.expect(Tok::Close, "`)`")?;
                RepExpr::Power(k, Box::new(a))
            }
            other => return Err(Error::parse(line, format!("unknown construction `{other}`"))),
        };
        Ok(expr)
    }

    fn matrix(&mut self) -> Result<Matrix> {
        let line = self.line();
        self.expect(Tok::OpenBracket, "`[`")?;
        let mut rows: Vec<Vec<C64>> = vec![Vec::new()];
        loop {
            let l = self.line();
            match self.next() {
                Some(Tok::Number(z)) => rows.last_mut().unwrap().push(z),
                Some(Tok::Comma) => {}
                Some(Tok::Semicolon) => rows.push(Vec::new()),
                Some(Tok::CloseBracket) => break,
                other => return Err(Error::parse(l, format!("unexpected {other:?} in matrix"))),
            }
        }
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::parse(line, "generator image must be a square matrix"));
        }
        Ok(Matrix::from_fn(n, n, |i, j| rows[i][j]))
    }
}

impl RepSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let mut field = None;
        let mut tokens = Vec::new();
        let mut in_expr = false;
        let mut rep_line = 0;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = strip_comment(raw);
            if in_expr {
                tokenize_line(line, line_no, &mut tokens)?;
                continue;
            }
            if line.is_empty() {
                continue;
            }
            if let Some(v) = line.strip_prefix("field:") {
                field = Some(v.trim().parse::<Field>().map_err(|e| Error::parse(line_no, e))?);
            } else if let Some(v) = line.strip_prefix("rep:") {
                in_expr = true;
                rep_line = line_no;
                tokenize_line(v, line_no, &mut tokens)?;
            } else {
                return Err(Error::parse(line_no, format!("expected `field:` or `rep:`, got `{line}`")));
            }
        }
        let last_line = text.lines().count().max(1);
        if !in_expr {
            return Err(Error::parse(last_line, "missing `rep:`"));
        }
        let mut lexer = Lexer {
            tokens,
            pos: 0,
            last_line: last_line.max(rep_line),
        };
        let expr = lexer.expr()?;
        if lexer.pos < lexer.tokens.len() {
            return Err(Error::parse(lexer.line(), "trailing input after the expression"));
        }
        Ok(RepSpec { field, expr })
    }

    /// Field to use: explicit override, then the file's `field:`, then the
    /// group's natural field (complex for permutation groups).
    pub fn resolve_field(&self, group: &Group, override_field: Option<Field>) -> Field {
        override_field.or(self.field).unwrap_or(match group {
            Group::Compact(c) => c.field(),
            Group::Finite(_) => Field::Complex,
        })
    }

    pub fn build(&self, group: &Group, field: Field) -> Result<Representation> {
        build_expr(&self.expr, group, field)
    }
}

fn build_expr(expr: &RepExpr, group: &Group, field: Field) -> Result<Representation> {
    match expr {
        RepExpr::Natural => Representation::natural(group.clone(), field),
        RepExpr::Defining => match group {
            Group::Compact(c) => Representation::defining_over(*c, field),
            Group::Finite(_) => Err(Error::UnsupportedField(
                "`defining` needs a compact group".into(),
            )),
        },
        RepExpr::Trivial(n) => Representation::trivial(group.clone(), *n, field),
        RepExpr::GeneratorImages(images) => match group {
            Group::Finite(g) => Representation::from_generator_images(g.clone(), images.clone(), field),
            Group::Compact(_) => Err(Error::NotFinite),
        },
        RepExpr::Tensor(a, b) => build_expr(a, group, field)?.tensor(&build_expr(b, group, field)?),
        RepExpr::DirectSum(a, b) => build_expr(a, group, field)?.direct_sum(&build_expr(b, group, field)?),
        RepExpr::Conjugate(a) => build_expr(a, group, field)?.conjugate(),
        RepExpr::Power(k, a) => build_expr(a, group, field)?.tensor_power(*k),
    }
}
