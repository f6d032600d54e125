//! Expression grammar for exact multivector input and output.
//!
//! Atoms: integer literals, the imaginary unit `i`, variables (`x1..`, with
//! `y` as an alias), and basis directions `e1..` (meaning `∂/∂x_k`; in
//! homogeneous mode the indices are 0-based, `x0..xn`/`e0..en`). Operators,
//! loosest to tightest: `+ -`, wedge `^`, `* /`, power `**` (right
//! associative, scalar bases only). A Pratt parser keeps the table explicit;
//! the formatter emits canonical strings that parse back to the same
//! multivector.

use std::fmt;

use schouten_core::multivector::MultiVector;
use schouten_core::poly::Monomial;
use schouten_core::scalar::Scalar;
use schouten_core::Error as CoreError;

/// Variable-naming convention of an expression.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Mode {
    /// `x1..xn` / `e1..en` are the affine coordinates (1-based names).
    Affine,
    /// `x0..xn` / `e0..en` are the homogeneous coordinates (0-based names).
    Homogeneous,
}

impl Mode {
    /// Map a user-facing index to the internal 0-based variable index.
    fn resolve(&self, user: usize, vars: usize) -> Option<usize> {
        match self {
            Mode::Affine => {
                if (1..=vars).contains(&user) {
                    Some(user - 1)
                } else {
                    None
                }
            }
            Mode::Homogeneous => {
                if user < vars {
                    Some(user)
                } else {
                    None
                }
            }
        }
    }

    /// Inverse of `resolve`, for formatting.
    fn display_index(&self, internal: usize) -> usize {
        match self {
            Mode::Affine => internal + 1,
            Mode::Homogeneous => internal,
        }
    }
}

/// Parse error with position and expectation information.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at {}:{}: {}", self.line, self.col, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Int(u64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    DoubleStar,
    LParen,
    RParen,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Int(v) => write!(f, "{v}"),
            Tok::Ident(s) => write!(f, "{s}"),
            Tok::Plus => write!(f, "+"),
            Tok::Minus => write!(f, "-"),
            Tok::Star => write!(f, "*"),
            Tok::Slash => write!(f, "/"),
            Tok::Caret => write!(f, "^"),
            Tok::DoubleStar => write!(f, "**"),
            Tok::LParen => write!(f, "("),
            Tok::RParen => write!(f, ")"),
        }
    }
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
    end: (usize, usize),
}

fn lex(text: &str) -> Result<Lexer, ParseError> {
    let mut toks = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c.is_ascii_digit() {
            let mut v: u64 = 0;
            while let Some(&d) = chars.peek() {
                if !d.is_ascii_digit() {
                    break;
                }
                bump(&mut chars);
                v = v
                    .checked_mul(10)
                    .and_then(|v| v.checked_add(u64::from(d as u8 - b'0')))
                    .ok_or(ParseError {
                        line: tline,
                        col: tcol,
                        message: "integer literal too large".into(),
                    })?;
            }
            toks.push((Tok::Int(v), tline, tcol));
            continue;
        }
        if c.is_ascii_alphabetic() {
            let mut s = String::new();
            while let Some(&d) = chars.peek() {
                if !d.is_ascii_alphanumeric() {
                    break;
                }
                s.push(bump(&mut chars));
            }
            toks.push((Tok::Ident(s), tline, tcol));
            continue;
        }
        let tok = match c {
            '+' => {
                bump(&mut chars);
                Tok::Plus
            }
            '-' => {
                bump(&mut chars);
                Tok::Minus
            }
            '*' => {
                bump(&mut chars);
                if chars.peek() == Some(&'*') {
                    bump(&mut chars);
                    Tok::DoubleStar
                } else {
                    Tok::Star
                }
            }
            '/' => {
                bump(&mut chars);
                Tok::Slash
            }
            '^' => {
                bump(&mut chars);
                Tok::Caret
            }
            '(' => {
                bump(&mut chars);
                Tok::LParen
            }
            ')' => {
                bump(&mut chars);
                Tok::RParen
            }
            other => {
                return Err(ParseError {
                    line: tline,
                    col: tcol,
                    message: format!("unexpected character {other:?}"),
                })
            }
        };
        toks.push((tok, tline, tcol));
    }
    Ok(Lexer {
        toks,
        pos: 0,
        end: (line, col),
    })
}

impl Lexer {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _, _)| t)
    }

    fn here(&self) -> (usize, usize) {
        self.toks
            .get(self.pos)
            .map(|&(_, l, c)| (l, c))
            .unwrap_or(self.end)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, message: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        ParseError {
            line,
            col,
            message: message.into(),
        }
    }
}

struct Parser {
    lexer: Lexer,
    mode: Mode,
    vars: usize,
}

impl Parser {
    fn core_err(&self, e: CoreError) -> ParseError {
        self.lexer.err(e.to_string())
    }

    fn resolve_ident(
        &self,
        name: &str,
        at: (usize, usize),
    ) -> Result<MultiVector, ParseError> {
        let err_at = |message: String| ParseError {
            line: at.0,
            col: at.1,
            message,
        };
        if name == "i" || name == "I" {
            return Ok(MultiVector::term(
                self.vars,
                &[],
                Monomial::one(self.vars),
                Scalar::imaginary_unit(),
            )
            .expect("constant term"));
        }
        let (head, digits) = name.split_at(1);
        let index: usize = digits.parse().map_err(|_| {
            err_at(format!(
                "unknown identifier {name:?}; expected i, x<k>, y<k> or e<k>"
            ))
        })?;
        let Some(internal) = self.mode.resolve(index, self.vars) else {
            return Err(err_at(format!(
                "identifier {name:?} out of range for {} {} variables",
                self.vars,
                match self.mode {
                    Mode::Affine => "affine (1-based)",
                    Mode::Homogeneous => "homogeneous (0-based)",
                }
            )));
        };
        match head {
            "x" | "y" => Ok(MultiVector::term(
                self.vars,
                &[],
                Monomial::var(self.vars, internal),
                Scalar::one(),
            )
            .expect("variable term")),
            "e" => Ok(MultiVector::direction(self.vars, internal)),
            _ => Err(err_at(format!(
                "unknown identifier {name:?}; expected i, x<k>, y<k> or e<k>"
            ))),
        }
    }

    fn parse_prefix(&mut self) -> Result<MultiVector, ParseError> {
        let at = self.lexer.here();
        match self.lexer.next() {
            Some(Tok::Int(v)) => Ok(MultiVector::term(
                self.vars,
                &[],
                Monomial::one(self.vars),
                Scalar::from_int(v as i64),
            )
            .expect("constant term")),
            Some(Tok::Ident(name)) => self.resolve_ident(&name, at),
            Some(Tok::Minus) => {
                // binds looser than * and ^, tighter than +
                let operand = self.parse_expr(15)?;
                Ok(operand.neg())
            }
            Some(Tok::LParen) => {
                let inner = self.parse_expr(0)?;
                match self.lexer.next() {
                    Some(Tok::RParen) => Ok(inner),
                    got => Err(self.lexer.err(match got {
                        Some(t) => format!("expected ')', found {t}"),
                        None => "expected ')', found end of input".into(),
                    })),
                }
            }
            Some(t) => Err(self
                .lexer
                .err(format!("expected a value, found {t}"))),
            None => Err(self.lexer.err("expected a value, found end of input")),
        }
    }

    fn parse_expr(&mut self, min_bp: u8) -> Result<MultiVector, ParseError> {
        let mut lhs = self.parse_prefix()?;
        loop {
            let (l_bp, r_bp, tok) = match self.lexer.peek() {
                Some(Tok::Plus) => (10, 11, Tok::Plus),
                Some(Tok::Minus) => (10, 11, Tok::Minus),
                Some(Tok::Caret) => (20, 21, Tok::Caret),
                Some(Tok::Star) => (30, 31, Tok::Star),
                Some(Tok::Slash) => (30, 31, Tok::Slash),
                Some(Tok::DoubleStar) => (41, 40, Tok::DoubleStar),
                _ => break,
            };
            if l_bp < min_bp {
                break;
            }
            self.lexer.next();
            let rhs = self.parse_expr(r_bp)?;
            lhs = self.apply(tok, lhs, rhs)?;
        }
        Ok(lhs)
    }

    fn apply(
        &self,
        op: Tok,
        lhs: MultiVector,
        rhs: MultiVector,
    ) -> Result<MultiVector, ParseError> {
        match op {
            Tok::Plus => lhs.try_add(&rhs).map_err(|e| match e {
                CoreError::GradeMismatch { expected, found } => self.lexer.err(format!(
                    "inconsistent grades in a sum: grade {expected} vs grade {found}"
                )),
                other => self.core_err(other),
            }),
            Tok::Minus => lhs.try_sub(&rhs).map_err(|e| match e {
                CoreError::GradeMismatch { expected, found } => self.lexer.err(format!(
                    "inconsistent grades in a difference: grade {expected} vs grade {found}"
                )),
                other => self.core_err(other),
            }),
            Tok::Caret => lhs.wedge(&rhs).map_err(|e| self.core_err(e)),
            Tok::Star => {
                if lhs.grade() == 0 || lhs.is_zero() || rhs.grade() == 0 || rhs.is_zero() {
                    lhs.wedge(&rhs).map_err(|e| self.core_err(e))
                } else {
                    Err(self.lexer.err(
                        "'*' needs a scalar factor; use '^' for the wedge of two multivectors",
                    ))
                }
            }
            Tok::Slash => {
                let divisor = as_constant_scalar(&rhs).ok_or_else(|| {
                    self.lexer
                        .err("'/' needs a nonzero constant scalar divisor")
                })?;
                let inv = divisor
                    .inv()
                    .ok_or_else(|| self.lexer.err("division by zero"))?;
                Ok(lhs.scale(&inv))
            }
            Tok::DoubleStar => {
                if lhs.grade() != 0 && !lhs.is_zero() {
                    return Err(self
                        .lexer
                        .err("'**' applies to scalars and variables only"));
                }
                let exp = as_constant_scalar(&rhs)
                    .and_then(|s| s.as_integer())
                    .and_then(|v| u32::try_from(v).ok())
                    .ok_or_else(|| {
                        self.lexer
                            .err("'**' needs a non-negative integer exponent")
                    })?;
                if exp > 64 {
                    return Err(self.lexer.err("exponent too large (max 64)"));
                }
                let mut acc = MultiVector::term(
                    self.vars,
                    &[],
                    Monomial::one(self.vars),
                    Scalar::one(),
                )
                .expect("constant");
                for _ in 0..exp {
                    acc = acc.wedge(&lhs).map_err(|e| self.core_err(e))?;
                }
                Ok(acc)
            }
            _ => unreachable!("not an infix operator"),
        }
    }
}

/// Grade-0 single-constant value, if that is what the multivector is.
fn as_constant_scalar(mv: &MultiVector) -> Option<Scalar> {
    if mv.is_zero() {
        return Some(Scalar::zero());
    }
    if mv.grade() != 0 || mv.len() != 1 {
        return None;
    }
    let (_, mono, c) = mv.iter_terms().next().unwrap();
    if mono.degree() != 0 {
        return None;
    }
    Some(c.clone())
}

/// Parse an expression into an exact multivector over `vars` ambient
/// variables under the given naming mode.
pub fn parse_expression(text: &str, mode: Mode, vars: usize) -> Result<MultiVector, ParseError> {
    let lexer = lex(text)?;
    let mut parser = Parser { lexer, mode, vars };
    let value = parser.parse_expr(0)?;
    if let Some(t) = parser.lexer.peek() {
        return Err(parser.lexer.err(format!(
            "expected an operator or end of input, found {t}"
        )));
    }
    Ok(value)
}

fn format_scalar_factor(c: &Scalar) -> String {
    // rational scalars print bare; Gaussian ones need parentheses and an
    // explicit multiplication for the imaginary unit
    if c.is_rational() {
        return format!("{c}");
    }
    let re = c.re_scalar();
    let im = c.im_scalar();
    let im_negative = im.is_display_negative();
    let im_abs = if im_negative { im.neg() } else { im.clone() };
    let mut s = String::from("(");
    if !re.is_zero() {
        s.push_str(&format!("{re}"));
        if !im_negative {
            s.push('+');
        }
    }
    if im_negative {
        s.push('-');
    }
    if im_abs.is_one() {
        s.push('i');
    } else {
        s.push_str(&format!("{im_abs}*i"));
    }
    s.push(')');
    s
}

/// Canonical expression string; `parse_expression(format_expression(A)) == A`.
pub fn format_expression(mv: &MultiVector, mode: Mode) -> String {
    if mv.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (idx, (dirs, mono, coeff)) in mv.iter_terms().enumerate() {
        // fold a rational sign into the separator
        let (negative, coeff_abs) = if coeff.is_rational() && coeff.is_display_negative() {
            (true, coeff.neg())
        } else {
            (false, coeff.clone())
        };
        if idx == 0 {
            if negative {
                out.push('-');
            }
        } else if negative {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        let mut factors: Vec<String> = Vec::new();
        if !coeff_abs.is_one() || (mono.degree() == 0 && dirs.is_empty()) {
            factors.push(format_scalar_factor(&coeff_abs));
        }
        for (k, &e) in mono.exponents().iter().enumerate() {
            if e == 0 {
                continue;
            }
            let name = format!("x{}", mode.display_index(k));
            if e == 1 {
                factors.push(name);
            } else {
                factors.push(format!("{name}**{e}"));
            }
        }
        if !dirs.is_empty() {
            let names: Vec<String> = dirs
                .indices()
                .iter()
                .map(|&s| format!("e{}", mode.display_index(usize::from(s))))
                .collect();
            if names.len() == 1 {
                factors.push(names.into_iter().next().unwrap());
            } else {
                factors.push(format!("({})", names.join("^")));
            }
        }
        out.push_str(&factors.join("*"));
    }
    out
}
