//! Line-oriented text form: one `α₁ α₂ … α_N : coefficient` line per non-zero term,
//! in canonical graded order. Coefficients use the shortest round-trip exponent
//! notation, so parsing the text back is bit-faithful.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use super::{MultiIndex, PolyContext, TruncatedPolynomial};
use crate::error::{Error, Result};

impl TruncatedPolynomial {
    /// Writes the non-zero terms, one per line. A zero polynomial yields no lines.
    pub fn write_terms(&self, out: &mut String) {
        for (alpha, c) in self.terms() {
            for (i, e) in alpha.exponents().iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{e}");
            }
            let _ = writeln!(out, " : {c:e}");
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        self.write_terms(&mut s);
        s
    }

    /// Parses term lines produced by [`write_terms`](Self::write_terms).
    ///
    /// `first_line` is the line number reported for the first entry of `lines`.
    pub fn parse_terms<'a>(
        ctx: &PolyContext,
        lines: impl IntoIterator<Item = &'a str>,
        first_line: usize,
    ) -> Result<Self> {
        let mut coeffs = alloc::vec![0.0; ctx.len()];
        for (offset, raw) in lines.into_iter().enumerate() {
            let line = first_line + offset;
            let raw = raw.trim();
            if raw.is_empty() {
                continue;
            }
            let (alpha, c) = parse_term(raw, ctx.n_vars()).map_err(|message| Error::Parse { line, message })?;
            let idx = ctx.index_of(&alpha).ok_or_else(|| Error::Parse {
                line,
                message: format!("monomial {alpha:?} is not retained by the context"),
            })?;
            coeffs[idx] = c;
        }
        Ok(TruncatedPolynomial { ctx: ctx.clone(), coeffs })
    }

    pub fn from_text(ctx: &PolyContext, text: &str) -> Result<Self> {
        Self::parse_terms(ctx, text.lines(), 1)
    }
}

fn parse_term(line: &str, n_vars: usize) -> core::result::Result<(MultiIndex, f64), String> {
    let (lhs, rhs) = line.split_once(':').ok_or_else(|| String::from("missing ':' separator"))?;
    let exps: Vec<u8> = lhs
        .split_whitespace()
        .map(|t| t.parse::<u8>().map_err(|e| format!("bad exponent {t:?}: {e}")))
        .collect::<core::result::Result<_, _>>()?;
    if exps.len() != n_vars {
        return Err(format!("expected {n_vars} exponents, found {}", exps.len()));
    }
    let c = rhs.trim().parse::<f64>().map_err(|e| format!("bad coefficient {:?}: {e}", rhs.trim()))?;
    Ok((MultiIndex::new(exps), c))
}
