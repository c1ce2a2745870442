//! Vector-field description language.
//!
//! ```text
//! file       := {param_decl} var_decl eq eq ;
//! param_decl := "param" IDENT [">" "0"] ";" ;
//! var_decl   := "var" IDENT IDENT ";" ;
//! eq         := "d" IDENT "/dt" "=" expr ";" ;
//! expr       := term {("+"|"-") term} ;
//! term       := factor {"*" factor} ;
//! factor     := ["-"] base ["^" NAT] ;
//! base       := IDENT | RATIONAL | "(" expr ")" ;
//! ```
//!
//! Rational literals are `p`, `p/q` or decimals; decimals are read exactly.

use std::collections::BTreeMap;
use std::fmt;

use exactalg::{parse_rational, Poly, Rat};
use num_traits::{One, Zero};
use thiserror::Error;

use crate::field::{Param, VectorField};

/// Largest accepted exponent literal.
pub const MAX_EXPONENT: u32 = 255;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("malformed number `{0}`")]
    BadNumber(String),
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: String, found: String },
    #[error("undeclared identifier `{0}`")]
    Undeclared(String),
    #[error("identifier `{0}` declared twice")]
    Duplicate(String),
    #[error("negative exponent")]
    NegativeExponent,
    #[error("exponent must be a natural number, found `{0}`")]
    NonIntegerExponent(String),
    #[error("exponent {0} exceeds the limit of {MAX_EXPONENT}")]
    ExponentTooLarge(String),
    #[error("expected exactly two equations, one per state variable, found {0}")]
    WrongArity(usize),
    #[error("`{0}` is a reserved word")]
    Reserved(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Var(String),
    Num(Rat),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

impl Expr {
    /// Direct interpretation of the tree, without expanding to a polynomial.
    pub fn eval(&self, env: &BTreeMap<String, Rat>) -> Option<Rat> {
        Some(match self {
            Expr::Var(v) => env.get(v)?.clone(),
            Expr::Num(r) => r.clone(),
            Expr::Neg(e) => -e.eval(env)?,
            Expr::Add(a, b) => a.eval(env)? + b.eval(env)?,
            Expr::Sub(a, b) => a.eval(env)? - b.eval(env)?,
            Expr::Mul(a, b) => a.eval(env)? * b.eval(env)?,
            Expr::Pow(a, n) => {
                let base = a.eval(env)?;
                (0..*n).fold(Rat::one(), |acc, _| acc * &base)
            }
        })
    }

    /// Exact expansion into canonical polynomial form.
    pub fn to_poly(&self) -> Poly {
        match self {
            Expr::Var(v) => Poly::var(v),
            Expr::Num(r) => Poly::constant(r.clone()),
            Expr::Neg(e) => -e.to_poly(),
            Expr::Add(a, b) => a.to_poly() + b.to_poly(),
            Expr::Sub(a, b) => a.to_poly() - b.to_poly(),
            Expr::Mul(a, b) => a.to_poly() * b.to_poly(),
            Expr::Pow(a, n) => a.to_poly().pow(*n),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 0,
            Expr::Mul(..) => 1,
            Expr::Neg(_) => 2,
            Expr::Pow(..) => 3,
            Expr::Var(_) => 4,
            Expr::Num(r) if r < &Rat::zero() => 2,
            Expr::Num(_) => 4,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "(")?;
            self.write_at(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Num(r) if r < &Rat::zero() => write!(f, "-{}", -r),
            Expr::Num(r) => write!(f, "{r}"),
            Expr::Neg(e) => {
                write!(f, "-")?;
                e.write_at(f, 3)
            }
            Expr::Add(a, b) => {
                a.write_at(f, 0)?;
                write!(f, " + ")?;
                b.write_at(f, 1)
            }
            Expr::Sub(a, b) => {
                a.write_at(f, 0)?;
                write!(f, " - ")?;
                b.write_at(f, 1)
            }
            Expr::Mul(a, b) => {
                a.write_at(f, 1)?;
                write!(f, "*")?;
                b.write_at(f, 2)
            }
            Expr::Pow(a, n) => {
                a.write_at(f, 4)?;
                write!(f, "^{n}")
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

/// Parsed field description, before expansion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldSpec {
    pub state_vars: (String, String),
    pub params: Vec<Param>,
    /// Right-hand sides for the first and second state variable.
    pub rhs: [Expr; 2],
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.params {
            if p.positive {
                writeln!(f, "param {} > 0;", p.name)?;
            } else {
                writeln!(f, "param {};", p.name)?;
            }
        }
        let (x, y) = &self.state_vars;
        writeln!(f, "var {x} {y};")?;
        writeln!(f, "d{x}/dt = {};", self.rhs[0])?;
        writeln!(f, "d{y}/dt = {};", self.rhs[1])
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Semi,
    Eq,
    Gt,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "identifier `{s}`"),
            Tok::Number(s) => write!(f, "number `{s}`"),
            Tok::Plus => write!(f, "`+`"),
            Tok::Minus => write!(f, "`-`"),
            Tok::Star => write!(f, "`*`"),
            Tok::Slash => write!(f, "`/`"),
            Tok::Caret => write!(f, "`^`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::Semi => write!(f, "`;`"),
            Tok::Eq => write!(f, "`=`"),
            Tok::Gt => write!(f, "`>`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let ch = chars[i];
        let (tl, tc) = (line, col);
        if ch == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if ch.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let start = i;
        let tok = if ch.is_ascii_alphabetic() || ch == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else if ch.is_ascii_digit() || ch == '.' {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let fraction = chars.get(i) == Some(&'.');
            let ratio = chars.get(i) == Some(&'/') && chars.get(i + 1).is_some_and(char::is_ascii_digit);
            if fraction || ratio {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let text: String = chars[start..i].iter().collect();
            if text == "." {
                return Err(ParseError {
                    line: tl,
                    col: tc,
                    kind: ParseErrorKind::BadNumber(text),
                });
            }
            Tok::Number(text)
        } else {
            i += 1;
            match ch {
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '/' => Tok::Slash,
                '^' => Tok::Caret,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                ';' => Tok::Semi,
                '=' => Tok::Eq,
                '>' => Tok::Gt,
                other => {
                    return Err(ParseError {
                        line: tl,
                        col: tc,
                        kind: ParseErrorKind::UnexpectedChar(other),
                    })
                }
            }
        };
        col += i - start;
        out.push(Spanned {
            tok,
            line: tl,
            col: tc,
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

const RESERVED: [&str; 3] = ["param", "var", "dt"];

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    /// Identifiers allowed in expressions; `None` accepts any.
    declared: Option<Vec<String>>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        let s = &self.toks[self.pos];
        ParseError {
            line: s.line,
            col: s.col,
            kind,
        }
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        self.error(ParseErrorKind::Unexpected {
            expected: expected.to_string(),
            found: self.peek().to_string(),
        })
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                if RESERVED.contains(&s.as_str()) {
                    return Err(self.error(ParseErrorKind::Reserved(s)));
                }
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn file(&mut self) -> Result<FieldSpec, ParseError> {
        let mut params: Vec<Param> = Vec::new();
        while self.keyword("param") {
            self.bump();
            let name = self.ident("parameter name")?;
            if params.iter().any(|p| p.name == name) {
                return Err(self.error(ParseErrorKind::Duplicate(name)));
            }
            let positive = if *self.peek() == Tok::Gt {
                self.bump();
                match self.bump() {
                    Tok::Number(n) if n == "0" => true,
                    _ => {
                        self.pos -= 1;
                        return Err(self.unexpected("`0`"));
                    }
                }
            } else {
                false
            };
            self.expect(Tok::Semi, "`;`")?;
            params.push(Param { name, positive });
        }
        if !self.keyword("var") {
            return Err(self.unexpected("`param` or `var`"));
        }
        self.bump();
        let x = self.ident("state variable name")?;
        let y = self.ident("second state variable name")?;
        for v in [&x, &y] {
            if params.iter().any(|p| &p.name == v) {
                return Err(self.error(ParseErrorKind::Duplicate(v.clone())));
            }
        }
        if x == y {
            return Err(self.error(ParseErrorKind::Duplicate(y)));
        }
        self.expect(Tok::Semi, "`;`")?;

        let mut declared: Vec<String> = params.iter().map(|p| p.name.clone()).collect();
        declared.push(x.clone());
        declared.push(y.clone());
        self.declared = Some(declared);

        let mut eqs: Vec<(String, Expr)> = Vec::new();
        while *self.peek() != Tok::Eof {
            let (var, rhs) = self.equation(&x, &y)?;
            if eqs.iter().any(|(v, _)| v == &var) {
                return Err(self.error(ParseErrorKind::Duplicate(format!("d{var}/dt"))));
            }
            eqs.push((var, rhs));
            if eqs.len() > 2 {
                return Err(self.error(ParseErrorKind::WrongArity(eqs.len())));
            }
        }
        if eqs.len() != 2 {
            return Err(self.error(ParseErrorKind::WrongArity(eqs.len())));
        }
        let take = |name: &str, eqs: &mut Vec<(String, Expr)>| {
            let i = eqs.iter().position(|(v, _)| v == name).unwrap();
            eqs.remove(i).1
        };
        let fx = take(&x, &mut eqs);
        let fy = take(&y, &mut eqs);
        Ok(FieldSpec {
            state_vars: (x, y),
            params,
            rhs: [fx, fy],
        })
    }

    fn equation(&mut self, x: &str, y: &str) -> Result<(String, Expr), ParseError> {
        let var = match self.peek().clone() {
            Tok::Ident(s) if s == "d" => {
                self.bump();
                self.ident("state variable after `d`")?
            }
            Tok::Ident(s) if s.len() > 1 && s.starts_with('d') => {
                self.bump();
                s[1..].to_string()
            }
            _ => return Err(self.unexpected("equation `d<var>/dt = ...`")),
        };
        if var != x && var != y {
            self.pos -= 1;
            return Err(self.error(ParseErrorKind::Undeclared(var)));
        }
        self.expect(Tok::Slash, "`/dt`")?;
        if !self.keyword("dt") {
            return Err(self.unexpected("`dt`"));
        }
        self.bump();
        self.expect(Tok::Eq, "`=`")?;
        let rhs = self.expr()?;
        self.expect(Tok::Semi, "`;`")?;
        Ok((var, rhs))
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        while *self.peek() == Tok::Star {
            self.bump();
            lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let mut base = self.base()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            base = Expr::Pow(Box::new(base), self.exponent()?);
        }
        Ok(if neg { Expr::Neg(Box::new(base)) } else { base })
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        // Only NAT is grammatical; the other shapes are recognized to give a
        // precise message.
        let paren = *self.peek() == Tok::LParen;
        let k = usize::from(paren);
        if *self.peek_at(k) == Tok::Minus {
            return Err(self.error(ParseErrorKind::NegativeExponent));
        }
        match self.peek_at(k).clone() {
            Tok::Number(n) => {
                if !n.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(self.error(ParseErrorKind::NonIntegerExponent(n)));
                }
                if paren {
                    return Err(self.unexpected("natural-number exponent"));
                }
                let value: u32 = match n.parse() {
                    Ok(v) if v <= MAX_EXPONENT => v,
                    _ => return Err(self.error(ParseErrorKind::ExponentTooLarge(n))),
                };
                self.bump();
                Ok(value)
            }
            _ => Err(self.unexpected("natural-number exponent")),
        }
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                if let Some(decl) = &self.declared {
                    if !decl.contains(&name) {
                        return Err(self.error(ParseErrorKind::Undeclared(name)));
                    }
                }
                self.bump();
                Ok(Expr::Var(name))
            }
            Tok::Number(n) => {
                let r = parse_rational(&n)
                    .map_err(|_| self.error(ParseErrorKind::BadNumber(n.clone())))?;
                self.bump();
                Ok(Expr::Num(r))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            _ => Err(self.unexpected("identifier, number or `(`")),
        }
    }
}

/// Parses a complete field description.
pub fn parse_field_spec(source: &str) -> Result<FieldSpec, ParseError> {
    let mut p = Parser {
        toks: lex(source)?,
        pos: 0,
        declared: None,
    };
    p.file()
}

/// Parses a standalone expression; any identifier is accepted.
pub fn parse_expr(source: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(source)?,
        pos: 0,
        declared: None,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("end of expression"));
    }
    Ok(e)
}

/// Parses an expression and expands it, e.g. for comparing against a
/// hand-written closed form.
pub fn parse_poly(source: &str) -> Result<Poly, ParseError> {
    parse_expr(source).map(|e| e.to_poly())
}

pub fn lower_to_polynomials(spec: &FieldSpec) -> VectorField {
    let (x, y) = &spec.state_vars;
    VectorField::new(
        x,
        y,
        spec.params.clone(),
        spec.rhs[0].to_poly(),
        spec.rhs[1].to_poly(),
    )
}

/// Parse and lower in one step.
pub fn parse_field(source: &str) -> Result<VectorField, ParseError> {
    parse_field_spec(source).map(|s| lower_to_polynomials(&s))
}

/// Renders a field back into the description language, with each
/// right-hand side in canonical polynomial form.
pub fn render_field(f: &VectorField) -> String {
    let mut out = String::new();
    for p in f.params() {
        if p.positive {
            out.push_str(&format!("param {} > 0;\n", p.name));
        } else {
            out.push_str(&format!("param {};\n", p.name));
        }
    }
    out.push_str(&format!("var {} {};\n", f.x(), f.y()));
    out.push_str(&format!("d{}/dt = {};\n", f.x(), f.f1()));
    out.push_str(&format!("d{}/dt = {};\n", f.y(), f.f2()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use exactalg::rat;

    const REFERENCE: &str = "param a > 0; var x y; dx/dt = a*x^2 - 2*x*y; dy/dt = y^2 - a*x*y;";

    #[test]
    fn parses_example_system() {
        let spec = parse_field_spec(REFERENCE).unwrap();
        assert_eq!(spec.state_vars, ("x".into(), "y".into()));
        assert_eq!(
            spec.params,
            vec![Param {
                name: "a".into(),
                positive: true
            }]
        );
        let f = lower_to_polynomials(&spec);
        assert_eq!(f.f1().to_string(), "a*x^2 - 2*x*y");
        assert_eq!(f.f2().to_string(), "-a*x*y + y^2");
    }

    #[test]
    fn zero_field() {
        let spec = parse_field_spec("var x y; dx/dt = 0; dy/dt = 0;").unwrap();
        assert_eq!(spec.rhs[0], Expr::Num(rat(0, 1)));
        let f = lower_to_polynomials(&spec);
        assert!(f.is_zero());
    }

    #[test]
    fn equation_order_is_free() {
        let f = parse_field("var x y; dy/dt = x; dx/dt = y;").unwrap();
        assert_eq!(f.f1().to_string(), "y");
        assert_eq!(f.f2().to_string(), "x");
    }

    #[test]
    fn negative_exponent_rejected() {
        for src in [
            "var x y; dx/dt = x^(-1); dy/dt = 0;",
            "var x y; dx/dt = x^-1; dy/dt = 0;",
        ] {
            let err = parse_field_spec(src).unwrap_err();
            assert_eq!(err.kind, ParseErrorKind::NegativeExponent, "{src}");
        }
    }

    #[test]
    fn error_positions_and_kinds() {
        let err = parse_field_spec("var x y;\ndx/dt = x $ y;").unwrap_err();
        assert_eq!((err.line, err.col), (2, 11));
        assert_eq!(err.kind, ParseErrorKind::UnexpectedChar('$'));

        let err = parse_field_spec("var x y; dx/dt = b*x; dy/dt = 0;").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Undeclared("b".into()));

        let err = parse_field_spec("var x y; dx/dt = x^1.5; dy/dt = 0;").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::NonIntegerExponent("1.5".into()));

        let err = parse_field_spec("var x y; dx/dt = x;").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::WrongArity(1));

        let err = parse_field_spec("var x y; dx/dt = x; dy/dt = y; dx/dt = 1;").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Duplicate(_)));

        let err = parse_field_spec("param x; var x y; dx/dt = x; dy/dt = y;").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Duplicate("x".into()));

        let err = parse_field_spec("var x y; dx/dt = 2x; dy/dt = y;").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Unexpected { .. }));

        let err = parse_field_spec("var x y; dx/dt = x^300; dy/dt = y;").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::ExponentTooLarge(_)));

        let err = parse_field_spec("param a > 1; var x y; dx/dt = x; dy/dt = y;").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Unexpected { .. }));
    }

    #[test]
    fn binomial_identity() {
        let p = parse_poly("(x+y)^2 - x^2 - y^2").unwrap();
        assert_eq!(p, parse_poly("2*x*y").unwrap());
    }

    #[test]
    fn decimals_and_fractions() {
        let p = parse_poly("0.5*x + 1/2*x - 3/6").unwrap();
        assert_eq!(p.to_string(), "x - 1/2");
    }

    #[test]
    fn spaced_derivative_form() {
        let f = parse_field("var u v; d u/dt = v; dv/dt = -u;").unwrap();
        assert_eq!(f.f2().to_string(), "-u");
    }

    #[test]
    fn pretty_printing_is_stable() {
        let spec = parse_field_spec(
            "param b; var x y; dx/dt = -(x - y)*(x + -y)^2 - -x; dy/dt = (-x)^2*b - 2/3;",
        )
        .unwrap();
        let once = spec.to_string();
        let twice = parse_field_spec(&once).unwrap().to_string();
        assert_eq!(once, twice);
        assert_eq!(parse_field_spec(&once).unwrap(), spec);
    }

    #[test]
    fn canonical_render_reparses() {
        let f = parse_field(REFERENCE).unwrap();
        let text = render_field(&f);
        assert_eq!(parse_field(&text).unwrap(), f);
        assert_eq!(render_field(&parse_field(&text).unwrap()), text);
    }
}
