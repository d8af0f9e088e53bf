use std::fmt;
use std::thread;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};

/// Largest variable count accepted by the exhaustive oracles.
pub const ENUMERATION_CAP: usize = 24;

/// A 3-CNF instance. Literals are 1-based variable indices, negative for
/// negation, exactly as in DIMACS.
///
/// The same syntax is read with ONE-IN-THREE semantics by the reductions in
/// this module: a clause is satisfied when exactly one of its literals is true.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfInstance {
    nvars: usize,
    clauses: Vec<[i32; 3]>,
}

impl CnfInstance {
    pub fn new(nvars: usize, clauses: Vec<[i32; 3]>) -> Result<Self> {
        if nvars == 0 {
            return Err(Error::Invalid("instance needs at least one variable".into()));
        }
        if clauses.is_empty() {
            return Err(Error::Invalid("instance has no clauses".into()));
        }
        for c in &clauses {
            for &l in c {
                if l == 0 || l.unsigned_abs() as usize > nvars {
                    return Err(Error::Invalid(format!(
                        "literal {l} out of range for {nvars} variables"
                    )));
                }
            }
        }
        Ok(CnfInstance { nvars, clauses })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn clauses(&self) -> &[[i32; 3]] {
        &self.clauses
    }

    /// True when every clause has exactly one true literal.
    pub fn one_in_three(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .filter(|&&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0))
                .count()
                == 1
        })
    }

    fn one_in_three_mask(&self, mask: u32) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .filter(|&&l| ((mask >> (l.unsigned_abs() - 1)) & 1 == 1) == (l > 0))
                .count()
                == 1
        })
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.nvars, self.clauses.len());
        for c in &self.clauses {
            s.push_str(&format!("{} {} {} 0\n", c[0], c[1], c[2]));
        }
        s
    }
}

impl fmt::Display for CnfInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lit = |l: i32| {
            if l > 0 {
                format!("x{l}")
            } else {
                format!("!x{}", -l)
            }
        };
        let parts: Vec<String> = self
            .clauses
            .iter()
            .map(|c| format!("({} | {} | {})", lit(c[0]), lit(c[1]), lit(c[2])))
            .collect();
        write!(f, "{}", parts.join(" & "))
    }
}

fn perr(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
    }
}

/// Reads DIMACS CNF restricted to clauses of exactly three literals.
///
/// Lines starting with `c` are comments and a line starting with `%` ends the
/// clause list. Clauses may span lines and are terminated by `0`.
pub fn parse_cnf(text: &str) -> std::result::Result<CnfInstance, ParseError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    let mut clause_start = (0, 0);
    let mut last = (1, 1);
    for (li, line) in text.lines().enumerate() {
        let lineno = li + 1;
        let trimmed = line.trim_start();
        if trimmed.starts_with('c') || trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('%') {
            break;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(perr(lineno, 1, "duplicate header"));
            }
            let fields: Vec<&str> = trimmed.split_whitespace().collect();
            if fields.len() != 4 || fields[0] != "p" || fields[1] != "cnf" {
                return Err(perr(lineno, 1, "malformed header, expected `p cnf <nvars> <nclauses>`"));
            }
            let nvars = fields[2]
                .parse::<usize>()
                .map_err(|_| perr(lineno, 1, "malformed variable count in header"))?;
            let ncl = fields[3]
                .parse::<usize>()
                .map_err(|_| perr(lineno, 1, "malformed clause count in header"))?;
            if nvars == 0 {
                return Err(perr(lineno, 1, "header declares zero variables"));
            }
            header = Some((nvars, ncl, lineno));
            continue;
        }
        let Some((nvars, _, _)) = header else {
            return Err(perr(lineno, 1, "clause before `p cnf` header"));
        };
        let mut col = 0;
        for tok in line.split_whitespace() {
            col = line[col..].find(tok).map(|p| p + col).unwrap_or(col);
            let column = col + 1;
            col += tok.len();
            last = (lineno, column);
            let lit: i32 = tok
                .parse()
                .map_err(|_| perr(lineno, column, format!("expected an integer literal, found `{tok}`")))?;
            if lit == 0 {
                if current.len() != 3 {
                    return Err(perr(
                        clause_start.0,
                        clause_start.1,
                        format!("clause has {} literals, expected 3", current.len()),
                    ));
                }
                clauses.push([current[0], current[1], current[2]]);
                current.clear();
                continue;
            }
            if lit.unsigned_abs() as usize > nvars {
                return Err(perr(lineno, column, format!("literal {lit} out of range for {nvars} variables")));
            }
            if current.is_empty() {
                clause_start = (lineno, column);
            }
            current.push(lit);
        }
    }
    let Some((nvars, ncl, hline)) = header else {
        return Err(perr(1, 1, "missing `p cnf` header"));
    };
    if !current.is_empty() {
        return Err(perr(last.0, last.1, "last clause is not terminated by 0"));
    }
    if clauses.is_empty() {
        return Err(perr(hline, 1, "instance has no clauses"));
    }
    if clauses.len() != ncl {
        return Err(perr(
            hline,
            1,
            format!("header declares {ncl} clauses, found {}", clauses.len()),
        ));
    }
    CnfInstance::new(nvars, clauses).map_err(|e| perr(hline, 1, e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", content = "assignment", rename_all = "lowercase")]
pub enum OneInThree {
    Satisfiable(Vec<bool>),
    Unsatisfiable,
}

impl OneInThree {
    pub fn is_satisfiable(&self) -> bool {
        matches!(self, OneInThree::Satisfiable(_))
    }
}

pub(crate) fn check_cap(nvars: usize) -> Result<()> {
    if nvars > ENUMERATION_CAP {
        Err(Error::CapExceeded {
            nvars,
            cap: ENUMERATION_CAP,
        })
    } else {
        Ok(())
    }
}

pub(crate) fn mask_to_bools(mask: u32, n: usize) -> Vec<bool> {
    (0..n).map(|i| (mask >> i) & 1 == 1).collect()
}

/// Smallest mask in `0..2^n` satisfying `pred`, where bit `i` is variable
/// `i + 1`. The range is split across threads for large `n`.
pub(crate) fn first_mask<F>(n: usize, pred: F) -> Option<u32>
where
    F: Fn(u32) -> bool + Sync,
{
    let total: u64 = 1 << n;
    let threads = if n < 14 {
        1
    } else {
        thread::available_parallelism().map_or(1, |t| t.get()).min(16) as u64
    };
    if threads == 1 {
        return (0..total as u32).find(|&m| pred(m));
    }
    let chunk = total.div_ceil(threads);
    let pred = &pred;
    thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                let lo = t * chunk;
                let hi = ((t + 1) * chunk).min(total);
                s.spawn(move || (lo..hi).map(|m| m as u32).find(|&m| pred(m)))
            })
            .collect();
        handles.into_iter().filter_map(|h| h.join().unwrap()).min()
    })
}

/// Exhaustive ONE-IN-THREE oracle. The witness is the first assignment in
/// binary counting order with `x1` as the least significant bit.
pub fn one_in_three_brute_force(inst: &CnfInstance) -> Result<OneInThree> {
    check_cap(inst.nvars)?;
    Ok(match first_mask(inst.nvars, |m| inst.one_in_three_mask(m)) {
        Some(m) => OneInThree::Satisfiable(mask_to_bools(m, inst.nvars)),
        None => OneInThree::Unsatisfiable,
    })
}
