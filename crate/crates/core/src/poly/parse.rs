//! Text format for polynomials and vector fields.
//!
//! Expressions use variables `x1..xn`, integer/decimal/rational literals and
//! `+ - * / ^` with parentheses. Division is only allowed by constants and
//! exponents must be nonnegative integer literals. `#` starts a comment.
//!
//! A vector field file holds one equation per line, `dx1 = ...` (or
//! `x1' = ...`), for every `i` in `1..=n`.

use num_traits::{ToPrimitive, Zero};

use super::field::VectorField;
use super::polynomial::Polynomial;
use super::rational::{parse_rational, Rational};
use crate::error::ParseError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Rational),
    Var(usize),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        column,
        message: message.into(),
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Tokenizes `src`, which starts at `(line, col0)` in the original text.
fn tokenize(src: &str, line: usize, col0: usize, out: &mut Vec<Token>) -> Result<(), ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = col0 + i;
        let simple = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = simple {
            out.push(Token { tok, line, col });
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // scientific exponent such as 1e-3
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value = parse_rational(&text)
                .ok_or_else(|| err(line, col, format!("malformed number '{}'", text)))?;
            out.push(Token {
                tok: Tok::Num(value),
                line,
                col,
            });
            continue;
        }
        if c == 'x' {
            let start = i + 1;
            let mut j = start;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let digits: String = chars[start..j].iter().collect();
            let idx: usize = digits
                .parse()
                .map_err(|_| err(line, col, "expected a variable index after 'x'"))?;
            if idx == 0 {
                return Err(err(line, col, "variables are numbered from x1"));
            }
            out.push(Token {
                tok: Tok::Var(idx - 1),
                line,
                col,
            });
            i = j;
            continue;
        }
        return Err(err(line, col, format!("unexpected character '{}'", c)));
    }
    Ok(())
}

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    nvars: usize,
    end: (usize, usize),
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|t| (t.line, t.col))
            .unwrap_or(self.end)
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let (l, c) = self.here();
        Err(err(l, c, message))
    }

    fn expr(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    acc = acc + self.term()?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let (l, c) = self.here();
                    let d = self.unary()?;
                    let k = as_constant(&d)
                        .filter(|k| !k.is_zero())
                        .ok_or_else(|| err(l, c, "division is only allowed by a nonzero constant"))?;
                    acc = acc.scale(&(Rational::from_integer(1.into()) / k));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Polynomial, ParseError> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let (l, c) = self.here();
            let e = match self.peek() {
                Some(Tok::Num(r)) if r.is_integer() => r.to_integer().to_u32(),
                _ => None,
            }
            .ok_or_else(|| err(l, c, "exponent must be a nonnegative integer literal"))?;
            self.pos += 1;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial, ParseError> {
        let tok = self.peek().cloned();
        match tok {
            Some(Tok::Num(r)) => {
                self.pos += 1;
                Ok(Polynomial::constant(self.nvars, r))
            }
            Some(Tok::Var(i)) => {
                if i >= self.nvars {
                    return self.fail(format!(
                        "variable x{} is out of range for {} variables",
                        i + 1,
                        self.nvars
                    ));
                }
                self.pos += 1;
                Ok(Polynomial::var(self.nvars, i))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.fail("expected ')'");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(_) => self.fail("expected a number, variable or '('"),
            None => self.fail("unexpected end of expression"),
        }
    }
}

fn as_constant(p: &Polynomial) -> Option<Rational> {
    if p.is_zero() {
        return Some(Rational::zero());
    }
    if p.degree() == 0 {
        p.terms().next().map(|(_, c)| c.clone())
    } else {
        None
    }
}

fn parse_tokens(toks: &[Token], nvars: usize, end: (usize, usize)) -> Result<Polynomial, ParseError> {
    let mut p = Parser {
        toks,
        pos: 0,
        nvars,
        end,
    };
    if toks.is_empty() {
        return p.fail("empty expression");
    }
    let out = p.expr()?;
    if p.pos != toks.len() {
        return p.fail("unexpected trailing input");
    }
    Ok(out)
}

/// Parses a polynomial. Without an explicit `nvars` the variable count is the
/// largest index used (at least one).
pub fn parse_polynomial(text: &str, nvars: Option<usize>) -> Result<Polynomial, ParseError> {
    let mut toks = Vec::new();
    let mut end = (1, 1);
    for (ln, line) in text.lines().enumerate() {
        let body = strip_comment(line);
        tokenize(body, ln + 1, 1, &mut toks)?;
        end = (ln + 1, body.chars().count() + 1);
    }
    let used = toks
        .iter()
        .filter_map(|t| match t.tok {
            Tok::Var(i) => Some(i + 1),
            _ => None,
        })
        .max()
        .unwrap_or(1);
    parse_tokens(&toks, nvars.unwrap_or(used), end)
}

/// Parses a vector field file.
pub fn parse_vector_field(text: &str) -> Result<VectorField, ParseError> {
    let mut eqs: Vec<(usize, usize, usize, Vec<Token>, (usize, usize))> = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line_no = ln + 1;
        let body = strip_comment(line);
        if body.trim().is_empty() {
            continue;
        }
        let eq = body
            .find('=')
            .ok_or_else(|| err(line_no, 1, "expected an equation of the form 'dxi = expression'"))?;
        let lhs = body[..eq].trim();
        let lhs_col = body.len() - body.trim_start().len() + 1;
        let idx = lhs
            .strip_prefix("dx")
            .or_else(|| lhs.strip_prefix('x').and_then(|r| r.strip_suffix('\'')))
            .and_then(|d| d.parse::<usize>().ok())
            .filter(|&i| i >= 1)
            .ok_or_else(|| err(line_no, lhs_col, format!("malformed left-hand side '{}'", lhs)))?;
        let rhs = &body[eq + 1..];
        let col0 = body[..eq + 1].chars().count() + 1;
        let mut toks = Vec::new();
        tokenize(rhs, line_no, col0, &mut toks)?;
        let end = (line_no, body.chars().count() + 1);
        eqs.push((idx, line_no, lhs_col, toks, end));
    }
    let n = eqs.len();
    if n == 0 {
        return Err(err(1, 1, "no equations found"));
    }
    let mut comps: Vec<Option<Polynomial>> = vec![None; n];
    for (idx, line, col, toks, end) in eqs {
        if idx > n {
            return Err(err(line, col, format!("equation for x{} but only {} equations", idx, n)));
        }
        if comps[idx - 1].is_some() {
            return Err(err(line, col, format!("duplicate equation for x{}", idx)));
        }
        comps[idx - 1] = Some(parse_tokens(&toks, n, end)?);
    }
    let comps: Vec<Polynomial> = comps.into_iter().map(|c| c.expect("all slots filled")).collect();
    VectorField::new(comps).map_err(|e| err(1, 1, e.to_string()))
}
