//! Reading and writing of CPLEX-style `.lp` files.
//!
//! The writer emits a fixed layout:
//!
//! ```text
//! \ Problem: name
//! Minimize
//!  obj: + 2 x - 1 y
//! Subject To
//!  c1: + 1 x + 1 y >= 3
//! Bounds
//!  0 <= x <= 10
//!  y free
//! End
//! ```
//!
//! Every variable gets exactly one line in `Bounds`, in problem order, and
//! rows keep problem order. Numbers are written with shortest round-trip
//! precision, so parsing an exported file reproduces the problem exactly up
//! to renamed identifiers.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write;

use super::SolverError;
use crate::lp::{LpProblem, Sense};

const MAX_NAME_LEN: usize = 255;
const TERMS_PER_LINE: usize = 8;

fn allowed(c: char) -> bool {
    c.is_ascii_alphanumeric() || "!\"#$%&()/,.;?@_`'{}|~".contains(c)
}

/// Maps an arbitrary identifier onto the LP-file name alphabet.
///
/// Disallowed characters become `_`; names that would read as a number or
/// exponent get a leading `_`; the result is cut to 255 characters.
pub fn sanitize_name(name: &str) -> String {
    let mut out: String = name
        .chars()
        .map(|c| if allowed(c) { c } else { '_' })
        .collect();
    match out.chars().next() {
        None => out.push('_'),
        Some(c) if c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' => out.insert(0, '_'),
        _ => {}
    }
    out.truncate(MAX_NAME_LEN);
    out
}

/// Sanitizes all names and disambiguates collisions with a `~k` suffix.
fn unique_names<'a>(names: impl Iterator<Item = &'a str>) -> Vec<String> {
    let mut seen = HashSet::new();
    names
        .map(|n| {
            let base = sanitize_name(n);
            let mut candidate = base.clone();
            let mut k = 1;
            while !seen.insert(candidate.clone()) {
                let mut stem = base.clone();
                let suffix = format!("~{k}");
                stem.truncate(MAX_NAME_LEN - suffix.len());
                candidate = stem + &suffix;
                k += 1;
            }
            candidate
        })
        .collect()
}

fn num(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:?}")
    }
}

fn write_terms(out: &mut String, terms: &[(usize, f64)], names: &[String]) {
    for (k, &(j, a)) in terms.iter().enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            out.push_str("\n   ");
        }
        let sign = if a.is_sign_negative() { '-' } else { '+' };
        let _ = write!(out, " {sign} {} {}", num(a.abs()), names[j]);
    }
}

/// Renders `problem` as LP-file text.
pub fn export_lp_file(problem: &LpProblem) -> String {
    let var_names = unique_names(problem.variables.iter().map(|v| v.name.as_str()));
    let row_names = unique_names(problem.constraints.iter().map(|c| c.name.as_str()));

    let mut merged: BTreeMap<usize, f64> = BTreeMap::new();
    for &(j, c) in &problem.objective {
        *merged.entry(j).or_insert(0.0) += c;
    }
    let objective: Vec<_> = merged.into_iter().filter(|&(_, c)| c != 0.0).collect();

    let mut out = String::new();
    let _ = writeln!(out, "\\ Problem: {}", problem.name.replace('\n', " "));
    out.push_str("Minimize\n obj:");
    write_terms(&mut out, &objective, &var_names);
    out.push_str("\nSubject To\n");
    for (row, name) in problem.constraints.iter().zip(&row_names) {
        let _ = write!(out, " {name}:");
        write_terms(&mut out, &row.terms, &var_names);
        let _ = writeln!(out, " {} {}", row.sense, num(row.rhs));
    }
    out.push_str("Bounds\n");
    for (v, name) in problem.variables.iter().zip(&var_names) {
        let line = match (v.lower, v.upper) {
            (l, u) if l == u => format!(" {name} = {}", num(l)),
            (l, u) if l == f64::NEG_INFINITY && u == f64::INFINITY => format!(" {name} free"),
            (l, u) if u == f64::INFINITY => format!(" {name} >= {}", num(l)),
            (l, u) => format!(" {} <= {name} <= {}", num(l), num(u)),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out.push_str("End\n");
    out
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Section {
    Preamble,
    Objective,
    Constraints,
    Bounds,
    End,
}

fn section_header(line: &str) -> Option<(Section, bool)> {
    let lower = line.trim().to_ascii_lowercase();
    match lower.as_str() {
        "minimize" | "minimise" | "minimum" | "min" => Some((Section::Objective, false)),
        "maximize" | "maximise" | "maximum" | "max" => Some((Section::Objective, true)),
        "subject to" | "such that" | "st" | "s.t." | "st." => Some((Section::Constraints, false)),
        "bounds" | "bound" => Some((Section::Bounds, false)),
        "end" => Some((Section::End, false)),
        _ => None,
    }
}

fn parse_number(tok: &str) -> Option<f64> {
    match tok.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" => Some(f64::INFINITY),
        "-inf" | "-infinity" => Some(f64::NEG_INFINITY),
        _ => tok.parse::<f64>().ok().filter(|v| v.is_finite()),
    }
}

fn parse_sense(tok: &str) -> Option<Sense> {
    match tok {
        "<=" | "=<" | "<" => Some(Sense::Le),
        ">=" | "=>" | ">" => Some(Sense::Ge),
        "=" => Some(Sense::Eq),
        _ => None,
    }
}

struct Builder {
    order: Vec<String>,
    index: HashMap<String, usize>,
}

impl Builder {
    fn var(&mut self, name: &str) -> usize {
        if let Some(&j) = self.index.get(name) {
            return j;
        }
        self.order.push(name.to_string());
        self.index.insert(name.to_string(), self.order.len() - 1);
        self.order.len() - 1
    }
}

fn err(line: usize, message: impl Into<String>) -> SolverError {
    SolverError::Format {
        line,
        message: message.into(),
    }
}

type Terms = Vec<(usize, f64)>;

/// Parses a linear expression; returns the terms and the unconsumed tail.
fn parse_expr<'a>(tokens: &'a Tokens, b: &mut Builder) -> Result<(Terms, &'a Tokens), SolverError> {
    let mut terms = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let (line, tok) = &tokens[i];
        if parse_sense(tok).is_some() {
            break;
        }
        let mut sign = 1.0;
        let mut coef = None;
        let mut j = i;
        loop {
            let Some((_, t)) = tokens.get(j) else {
                return Err(err(*line, "expression ends without a variable"));
            };
            match t.as_str() {
                "+" => {}
                "-" => sign = -sign,
                _ => {
                    if let Some(v) = parse_number(t) {
                        if coef.is_some() {
                            return Err(err(*line, format!("unexpected number {t}")));
                        }
                        coef = Some(v);
                    } else if parse_sense(t).is_some() {
                        return Err(err(*line, "sense without a preceding variable"));
                    } else {
                        terms.push((b.var(t), sign * coef.unwrap_or(1.0)));
                        break;
                    }
                }
            }
            j += 1;
        }
        i = j + 1;
    }
    Ok((terms, &tokens[i..]))
}

type Tokens = [(usize, String)];

/// Splits on whitespace and makes `:` a token of its own.
fn tokenize(line: usize, content: &str) -> impl Iterator<Item = (usize, String)> + '_ {
    content.split_whitespace().flat_map(move |word| {
        let mut out = Vec::new();
        for (k, piece) in word.split(':').enumerate() {
            if k > 0 {
                out.push((line, ":".to_string()));
            }
            if !piece.is_empty() {
                out.push((line, piece.to_string()));
            }
        }
        out
    })
}

/// Strips a leading `name :` label.
fn split_label(tokens: &Tokens) -> (Option<&str>, &Tokens) {
    match tokens {
        [(_, name), (_, colon), rest @ ..] if colon == ":" => (Some(name.as_str()), rest),
        _ => (None, tokens),
    }
}

/// Parses LP-file text produced by [`export_lp_file`] (or any file in the
/// same continuous subset of the format) into a minimisation problem.
pub fn parse_lp_file(text: &str) -> Result<LpProblem, SolverError> {
    let mut problem = LpProblem::new("");
    let mut b = Builder {
        order: Vec::new(),
        index: HashMap::new(),
    };
    let mut section = Section::Preamble;
    let mut maximize = false;
    let mut objective_tokens: Vec<(usize, String)> = Vec::new();
    let mut row_tokens: Vec<(usize, String)> = Vec::new();
    let mut bounds: Vec<(usize, Vec<String>)> = Vec::new();

    for (k, raw) in text.lines().enumerate() {
        let lineno = k + 1;
        if let Some(rest) = raw.trim_start().strip_prefix("\\ Problem:") {
            problem.name = rest.trim().to_string();
            continue;
        }
        let content = raw.split('\\').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        if let Some((s, max)) = section_header(content) {
            if s == Section::Objective {
                maximize = max;
            }
            section = s;
            continue;
        }
        let toks = tokenize(lineno, content);
        match section {
            Section::Preamble => return Err(err(lineno, "content before the objective section")),
            Section::Objective => objective_tokens.extend(toks),
            Section::Constraints => row_tokens.extend(toks),
            Section::Bounds => bounds.push((lineno, content.split_whitespace().map(String::from).collect())),
            Section::End => return Err(err(lineno, "content after End")),
        }
    }
    if section != Section::End {
        return Err(err(text.lines().count(), "missing End"));
    }

    let (_, objective_tokens) = split_label(&objective_tokens);
    let (objective, rest) = parse_expr(objective_tokens, &mut b)?;
    if let Some((line, t)) = rest.first() {
        return Err(err(*line, format!("unexpected token {t} in objective")));
    }
    let flip = if maximize { -1.0 } else { 1.0 };

    let mut rows = Vec::new();
    let mut rest: &Tokens = &row_tokens;
    let mut unnamed = 0;
    while let Some((line, _)) = rest.first() {
        let line = *line;
        let (label, body) = split_label(rest);
        let name = label.map(str::to_string).unwrap_or_else(|| {
            unnamed += 1;
            format!("R{unnamed}")
        });
        let (terms, tail) = parse_expr(body, &mut b)?;
        let Some((_, sense_tok)) = tail.first() else {
            return Err(err(line, format!("row {name} has no sense")));
        };
        let sense = parse_sense(sense_tok).expect("parse_expr stops at a sense token");
        let Some(rhs) = tail.get(1).and_then(|(_, t)| parse_number(t)) else {
            return Err(err(line, format!("row {name} has no finite right-hand side")));
        };
        rows.push((name, terms, sense, rhs));
        rest = &tail[2..];
    }

    let mut bound_of: HashMap<usize, (f64, f64)> = HashMap::new();
    let mut bound_order = Vec::new();
    for (line, toks) in &bounds {
        let t: Vec<&str> = toks.iter().map(String::as_str).collect();
        let (name, lo, hi): (&str, Option<f64>, Option<f64>) = match t.as_slice() {
            [name, free] if free.eq_ignore_ascii_case("free") => {
                (name, Some(f64::NEG_INFINITY), Some(f64::INFINITY))
            }
            [lo, s1, name, s2, hi] if parse_sense(s1) == Some(Sense::Le) && parse_sense(s2) == Some(Sense::Le) => {
                (name, parse_number(lo), parse_number(hi))
            }
            [name, s, v] => {
                let v = parse_number(v);
                match parse_sense(s) {
                    Some(Sense::Ge) => (name, v, None),
                    Some(Sense::Le) => (name, None, v),
                    Some(Sense::Eq) => (name, v, v),
                    None => return Err(err(*line, "unrecognised bound")),
                }
            }
            _ => return Err(err(*line, "unrecognised bound")),
        };
        if (lo.is_none() && hi.is_none()) || parse_number(name).is_some() {
            return Err(err(*line, "unrecognised bound"));
        }
        let j = b.var(name);
        bound_order.push(j);
        let entry = bound_of.entry(j).or_insert((0.0, f64::INFINITY));
        if let Some(lo) = lo {
            entry.0 = lo;
        }
        if let Some(hi) = hi {
            entry.1 = hi;
            // a negative upper bound with the default lower bound
            if hi < 0.0 && lo.is_none() && entry.0 == 0.0 {
                entry.0 = f64::NEG_INFINITY;
            }
        }
    }

    // Variables listed in Bounds come first, in that order.
    let mut position = vec![usize::MAX; b.order.len()];
    let mut next = 0;
    for j in bound_order.iter().copied().chain(0..b.order.len()) {
        if position[j] == usize::MAX {
            position[j] = next;
            next += 1;
        }
    }
    let mut slots: Vec<Option<usize>> = vec![None; b.order.len()];
    for (j, &p) in position.iter().enumerate() {
        slots[p] = Some(j);
    }
    for j in slots.into_iter().flatten() {
        let (lo, hi) = bound_of.get(&j).copied().unwrap_or((0.0, f64::INFINITY));
        problem.add_variable(b.order[j].clone(), lo, hi, 0.0);
    }
    for (j, c) in objective {
        problem.objective.push((position[j], flip * c));
    }
    for (name, terms, sense, rhs) in rows {
        let terms = terms.into_iter().map(|(j, a)| (position[j], a));
        problem.add_constraint(name, terms, sense, rhs);
    }
    problem.validate().map_err(|e| err(0, e.0))?;
    Ok(problem)
}
