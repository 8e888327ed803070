//! Text front-end for polynomials and rational functions.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := factor (('*' | '/') factor)*
//! factor   := atom ('^' signed-integer)?
//! atom     := rational | 'i' | identifier | '(' expr ')' | '-' atom
//! rational := digits ('/' digits)?
//! ```
//!
//! `i` is the imaginary unit and cannot name a variable. Implicit
//! multiplication (`2x`) is a syntax error. Note that `-` in an atom binds
//! tighter than `^`, so `-x^2` is `(-x)^2`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::poly::{GaussianRational, LaurentPoly, PolyError, RationalFn};

/// Largest accepted exponent magnitude, in literals and in results.
pub const MAX_EXPONENT: i64 = 1 << 31;
/// Largest exponent applied to a base with more than one term.
pub const MAX_EXPANDED_POWER: i64 = 1024;
/// Cap on the number of term products in a single multiplication.
const MAX_TERM_PRODUCTS: usize = 1 << 20;
const MAX_DEPTH: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {position}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        position: usize,
        expected: Vec<&'static str>,
        found: String,
    },
    #[error("division by zero at offset {position}")]
    ZeroDenominator { position: usize },
    #[error("exponent overflow at offset {position} (|exponent| > 2^31)")]
    ExponentOverflow { position: usize },
    #[error("expression too large to expand at offset {position}")]
    TooLarge { position: usize },
    #[error("nesting deeper than {MAX_DEPTH} at offset {position}")]
    NestingTooDeep { position: usize },
    #[error("expected a polynomial, found a rational function with denominator {denominator}")]
    NotPolynomial { denominator: String },
}

impl ParseError {
    pub fn position(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { position, .. }
            | ParseError::ZeroDenominator { position }
            | ParseError::ExponentOverflow { position }
            | ParseError::TooLarge { position }
            | ParseError::NestingTooDeep { position } => Some(*position),
            ParseError::NotPolynomial { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(BigRational),
    Ident(String),
    I,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(r) => format!("number `{r}`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::I => "`i`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let digits = |mut j: usize| {
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
        j
    };
    while i < bytes.len() {
        let b = bytes[i];
        if b.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match b {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                let end = digits(i);
                let num: BigInt = src[i..end].parse().unwrap();
                // `digits/digits` with no spaces is a single rational literal.
                if end + 1 < bytes.len() && bytes[end] == b'/' && bytes[end + 1].is_ascii_digit() {
                    let dend = digits(end + 1);
                    let den: BigInt = src[end + 1..dend].parse().unwrap();
                    if den.is_zero() {
                        return Err(ParseError::ZeroDenominator { position: end });
                    }
                    i = dend;
                    out.push((Tok::Num(BigRational::new(num, den)), start));
                    continue;
                }
                i = end;
                out.push((Tok::Num(BigRational::from_integer(num)), start));
                continue;
            }
            b if b.is_ascii_alphabetic() => {
                let mut j = i + 1;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                let name = &src[i..j];
                i = j;
                out.push((if name == "i" { Tok::I } else { Tok::Ident(name.to_string()) }, start));
                continue;
            }
            _ => {
                let ch = src[i..].chars().next().unwrap();
                return Err(ParseError::Syntax {
                    position: i,
                    expected: vec!["number", "identifier", "operator", "parenthesis"],
                    found: format!("character `{ch}`"),
                });
            }
        };
        i += 1;
        out.push((tok, start));
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
    depth: usize,
    seen: Vec<String>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, expected: Vec<&'static str>) -> ParseError {
        ParseError::Syntax {
            position: self.pos(),
            expected,
            found: self.peek().describe(),
        }
    }

    fn expr(&mut self) -> Result<RationalFn, ParseError> {
        let mut acc = self.term()?;
        loop {
            let pos = self.pos();
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = lift(acc.add(&rhs), pos)?;
                }
                Tok::Minus => {
                    self.bump();
                    let rhs = self.term()?;
                    acc = lift(acc.sub(&rhs), pos)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<RationalFn, ParseError> {
        let mut acc = self.factor()?;
        loop {
            let pos = self.pos();
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    let rhs = self.factor()?;
                    guard_product(&acc, &rhs, pos)?;
                    acc = lift(acc.mul(&rhs), pos)?;
                }
                Tok::Slash => {
                    self.bump();
                    let rhs = self.factor()?;
                    if rhs.is_zero() {
                        return Err(ParseError::ZeroDenominator { position: pos });
                    }
                    guard_product(&acc, &rhs, pos)?;
                    acc = lift(acc.div(&rhs), pos)?;
                }
                _ => return Ok(acc),
            }
            check_exponents(&acc, pos)?;
        }
    }

    fn factor(&mut self) -> Result<RationalFn, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        let caret = self.pos();
        self.bump();
        let negative = match self.peek() {
            Tok::Minus => {
                self.bump();
                true
            }
            Tok::Plus => {
                self.bump();
                false
            }
            _ => false,
        };
        let epos = self.pos();
        let Tok::Num(r) = self.peek().clone() else {
            return Err(self.unexpected(vec!["integer exponent"]));
        };
        if !r.is_integer() {
            return Err(self.unexpected(vec!["integer exponent"]));
        }
        self.bump();
        let mag: i64 = i64::try_from(r.to_integer())
            .ok()
            .filter(|m| *m <= MAX_EXPONENT)
            .ok_or(ParseError::ExponentOverflow { position: epos })?;
        let exp = if negative { -mag } else { mag };
        let single = base.is_polynomial() && base.numerator().num_terms() <= 1;
        if !single && exp.abs() > MAX_EXPANDED_POWER {
            return Err(ParseError::TooLarge { position: caret });
        }
        if !single {
            let n = base.numerator().num_terms().max(base.denominator().num_terms());
            // Crude bound on the size of the expansion.
            let est = (n as f64).powf(exp.unsigned_abs() as f64 / 2.0);
            if est > MAX_TERM_PRODUCTS as f64 {
                return Err(ParseError::TooLarge { position: caret });
            }
        }
        let out = lift(base.pow(exp), caret)?;
        check_exponents(&out, caret)?;
        Ok(out)
    }

    fn atom(&mut self) -> Result<RationalFn, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Num(r) => Ok(RationalFn::from_poly(LaurentPoly::constant(GaussianRational::real(r)))),
            Tok::I => Ok(RationalFn::from_poly(LaurentPoly::constant(GaussianRational::i()))),
            Tok::Ident(name) => {
                if !self.seen.contains(&name) {
                    self.seen.push(name.clone());
                }
                Ok(RationalFn::from_poly(LaurentPoly::var(&name)))
            }
            Tok::LParen => {
                self.depth += 1;
                if self.depth > MAX_DEPTH {
                    return Err(ParseError::NestingTooDeep { position: pos });
                }
                let inner = self.expr()?;
                self.depth -= 1;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected(vec!["`)`", "operator"]));
                }
                self.bump();
                Ok(inner)
            }
            Tok::Minus => {
                self.depth += 1;
                if self.depth > MAX_DEPTH {
                    return Err(ParseError::NestingTooDeep { position: pos });
                }
                let inner = self.atom()?;
                self.depth -= 1;
                Ok(inner.neg())
            }
            other => {
                self.at = self.at.saturating_sub(1);
                let _ = other;
                Err(self.unexpected(vec!["number", "identifier", "`i`", "`(`", "`-`"]))
            }
        }
    }
}

fn lift<T>(r: Result<T, PolyError>, position: usize) -> Result<T, ParseError> {
    r.map_err(|e| match e {
        PolyError::ZeroDenominator => ParseError::ZeroDenominator { position },
        _ => ParseError::ExponentOverflow { position },
    })
}

fn guard_product(a: &RationalFn, b: &RationalFn, position: usize) -> Result<(), ParseError> {
    let size = |r: &RationalFn| r.numerator().num_terms().max(r.denominator().num_terms()).max(1);
    if size(a).saturating_mul(size(b)) > MAX_TERM_PRODUCTS {
        return Err(ParseError::TooLarge { position });
    }
    Ok(())
}

fn check_exponents(r: &RationalFn, position: usize) -> Result<(), ParseError> {
    if r.numerator().max_abs_exponent() > MAX_EXPONENT || r.denominator().max_abs_exponent() > MAX_EXPONENT {
        return Err(ParseError::ExponentOverflow { position });
    }
    Ok(())
}

/// Parses an expression into a rational function. Pure polynomials come back
/// with denominator 1; the variable list is in order of first appearance.
pub fn parse(src: &str) -> Result<RationalFn, ParseError> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        at: 0,
        depth: 0,
        seen: Vec::new(),
    };
    let out = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected(vec!["operator", "end of input"]));
    }
    Ok(out.embed(&p.seen))
}

/// Parses an expression that must denote a (Laurent) polynomial.
pub fn parse_polynomial(src: &str) -> Result<LaurentPoly, ParseError> {
    let r = parse(src)?;
    if !r.is_polynomial() {
        return Err(ParseError::NotPolynomial {
            denominator: r.denominator().to_string(),
        });
    }
    Ok(r.into_parts().0)
}

/// Canonical text: graded-lexicographic terms with explicit `*` and `^`;
/// `parse(&print(p)) == p` for every `p`.
pub fn print(p: &RationalFn) -> String {
    p.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(src: &str) -> LaurentPoly {
        parse_polynomial(src).unwrap()
    }

    #[test]
    fn condon_polynomial_has_six_monomials() {
        let r = parse("x+1+(x-1)*(y+z)").unwrap();
        assert!(r.is_polynomial());
        assert_eq!(r.numerator().num_terms(), 6);
        assert_eq!(r.variables(), ["x", "y", "z"]);
    }

    #[test]
    fn zero_parses_to_zero() {
        let r = parse("0").unwrap();
        assert!(r.is_zero() && r.is_polynomial());
        assert_eq!(print(&r), "0");
    }

    #[test]
    fn rational_function() {
        let r = parse("(1-x1)/(1+x1)").unwrap();
        assert!(!r.is_polynomial());
        assert_eq!(r.numerator(), &poly("1 - x1"));
        assert_eq!(r.denominator(), &poly("1 + x1"));
    }

    #[test]
    fn constant_division_rescales() {
        let r = parse("(x+2)/2").unwrap();
        assert!(r.is_polynomial());
        assert_eq!(r.numerator(), &poly("1/2*x + 1"));
    }

    #[test]
    fn like_terms_merge() {
        assert_eq!(print(&parse("1+x+x").unwrap()), "2*x + 1");
    }

    #[test]
    fn round_trip_example() {
        let p = parse("(x^2-1)*(y+z) + x^2+x+1").unwrap();
        assert_eq!(parse(&print(&p)).unwrap(), p);
    }

    #[test]
    fn gaussian_coefficients() {
        let p = poly("i*x + (1 - i)");
        assert_eq!(p.conjugate_coeffs(), poly("-i*x + 1 + i"));
        assert_eq!(poly("(3+4*i)/5").constant_value().unwrap().norm_sqr(), BigRational::from_integer(1.into()));
    }

    #[test]
    fn negative_exponents_and_atom_minus() {
        let p = poly("x^-1 + 1");
        assert_eq!(p.min_degree_in("x"), -1);
        // '-' binds to the atom before '^'.
        assert_eq!(poly("-x^2"), poly("x^2"));
        assert_eq!(poly("-1*x^2"), poly("0 - x^2"));
    }

    #[test]
    fn variable_order_is_first_appearance() {
        let r = parse("y*x + z - y").unwrap();
        assert_eq!(r.variables(), ["y", "x", "z"]);
    }

    #[test]
    fn errors_are_positioned() {
        match parse("2x") {
            Err(ParseError::Syntax { position, .. }) => assert_eq!(position, 1),
            other => panic!("{other:?}"),
        }
        match parse("x + * y") {
            Err(ParseError::Syntax { position, .. }) => assert_eq!(position, 4),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("(x+1"), Err(ParseError::Syntax { position: 4, .. })));
        assert!(matches!(parse("x/0"), Err(ParseError::ZeroDenominator { position: 1 })));
        assert!(matches!(parse("x/(y-y)"), Err(ParseError::ZeroDenominator { .. })));
        assert!(matches!(parse("1/0"), Err(ParseError::ZeroDenominator { .. })));
        assert!(matches!(parse("x^2147483649"), Err(ParseError::ExponentOverflow { position: 2 })));
        assert!(matches!(parse("(x^2147483648)^2"), Err(ParseError::ExponentOverflow { .. })));
        assert!(parse("x^2147483648").is_ok());
        assert!(matches!(parse("i^2 + i_1"), Ok(_)));
        assert!(matches!(parse("x$"), Err(ParseError::Syntax { position: 1, .. })));
        assert!(matches!(parse("(x+y+z)^5000"), Err(ParseError::TooLarge { .. })));
        assert!(matches!(parse(""), Err(ParseError::Syntax { position: 0, .. })));
    }

    #[test]
    fn deep_nesting_is_an_error_not_a_crash() {
        let src = format!("{}x{}", "(".repeat(10_000), ")".repeat(10_000));
        assert!(matches!(parse(&src), Err(ParseError::NestingTooDeep { .. })));
        let src = format!("{}x", "-".repeat(10_000));
        assert!(matches!(parse(&src), Err(ParseError::NestingTooDeep { .. })));
    }

    #[test]
    fn not_polynomial() {
        assert!(matches!(parse_polynomial("1/(x+1)"), Err(ParseError::NotPolynomial { .. })));
    }
}
