//! Text syntax for coefficients, variable polynomials and families.
//!
//! ```text
//! family := poly (';' poly)*          (optionally wrapped in braces)
//! sum    := product (('+' | '-') product)*
//! product:= unary (('*' unary) | ('/' growth))*
//! unary  := ('-' | '+') unary | primary
//! primary:= REAL | '(' sum ')' | 'n' ('^' INT)? | 'h'INT ('^' INT)?
//! growth := factor | '(' factor ('*' factor)* ')'
//! factor := ('N' | 'logN' | 'loglogN') '^' exponent
//! exponent := '-'? REAL | '(' '-'? INT '/' INT ')'
//! ```
//!
//! Only constants may be divided by a growth symbol, and two non-constant
//! coefficients may not be multiplied; this keeps every coefficient inside
//! the span of reciprocals `1/g`.

use std::fmt;

use ergopet_core::coeffalg::{Exponent, GrowthSymbol, HardyCoefficient};
use ergopet_core::polyfam::{ExtendedCoefficient, PolynomialFamily, ShiftPowers, ShiftSym, VariablePolynomial};

/// A syntax error at a byte offset of the parsed text.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DslError {
    pub offset: usize,
    pub message: String,
}

impl DslError {
    fn new(offset: usize, message: impl Into<String>) -> Self {
        Self { offset, message: message.into() }
    }

    /// 1-based column.
    pub fn column(&self) -> usize {
        self.offset + 1
    }
}

impl fmt::Display for DslError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "column {}: {}", self.column(), self.message)
    }
}

impl std::error::Error for DslError {}

type Parsed<T> = Result<T, DslError>;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    /// Value and source text.
    Num(f64, String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Num(_, s) | Tok::Ident(s) => write!(f, "'{s}'"),
            Tok::Plus => f.write_str("'+'"),
            Tok::Minus => f.write_str("'-'"),
            Tok::Star => f.write_str("'*'"),
            Tok::Slash => f.write_str("'/'"),
            Tok::Caret => f.write_str("'^'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn lex(src: &str, base: usize) -> Parsed<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let at = base + i;
        match c {
            b' ' | b'\t' => i += 1,
            b'+' | b'-' | b'*' | b'/' | b'^' | b'(' | b')' => {
                out.push((
                    match c {
                        b'+' => Tok::Plus,
                        b'-' => Tok::Minus,
                        b'*' => Tok::Star,
                        b'/' => Tok::Slash,
                        b'^' => Tok::Caret,
                        b'(' => Tok::LParen,
                        _ => Tok::RParen,
                    },
                    at,
                ));
                i += 1;
            }
            b'0'..=b'9' | b'.' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &src[start..i];
                let v: f64 = text.parse().map_err(|_| DslError::new(at, format!("malformed number '{text}'")))?;
                out.push((Tok::Num(v, text.to_string()), at));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), at));
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(DslError::new(at, format!("unexpected character '{ch}'")));
            }
        }
    }
    out.push((Tok::End, base + src.len()));
    Ok(out)
}

/// Exact rational value of a decimal literal such as `0.3` or `15e-1`.
fn decimal_to_rational(text: &str) -> Option<Exponent> {
    let (mantissa, exp) = match text.find(['e', 'E']) {
        Some(k) => (&text[..k], text[k + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (int, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits = format!("{int}{frac}");
    let mut num: i64 = if digits.is_empty() { return None } else { digits.parse().ok()? };
    let mut den: i64 = 1;
    let mut scale = exp - frac.len() as i32;
    while scale > 0 {
        num = num.checked_mul(10)?;
        scale -= 1;
    }
    while scale < 0 {
        den = den.checked_mul(10)?;
        scale += 1;
    }
    Some(Exponent::new(num, den))
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

fn hardy_mul(a: &HardyCoefficient, b: &HardyCoefficient, at: usize) -> Parsed<HardyCoefficient> {
    if a.is_constant() {
        Ok(b.scale(a.constant_term()))
    } else if b.is_constant() {
        Ok(a.scale(b.constant_term()))
    } else {
        Err(DslError::new(at, "product of two non-constant coefficients leaves the reciprocal span"))
    }
}

fn ext_mul(a: &ExtendedCoefficient, b: &ExtendedCoefficient, at: usize) -> Parsed<ExtendedCoefficient> {
    let mut items = Vec::new();
    for (p, c) in a.monomials() {
        for (q, d) in b.monomials() {
            items.push((p.mul(q), hardy_mul(c, d, at)?));
        }
    }
    Ok(ExtendedCoefficient::from_monomials(items))
}

fn poly_mul(a: &VariablePolynomial, b: &VariablePolynomial, at: usize) -> Parsed<VariablePolynomial> {
    if a.is_zero() || b.is_zero() {
        return Ok(VariablePolynomial::zero());
    }
    let mut out = vec![ExtendedCoefficient::zero(); a.coeffs().len() + b.coeffs().len() - 1];
    for (i, x) in a.coeffs().iter().enumerate() {
        for (j, y) in b.coeffs().iter().enumerate() {
            out[i + j] = out[i + j].add(&ext_mul(x, y, at)?);
        }
    }
    Ok(VariablePolynomial::new(out))
}

fn poly_div(a: &VariablePolynomial, g: GrowthSymbol, at: usize) -> Parsed<VariablePolynomial> {
    let mut out = Vec::with_capacity(a.coeffs().len());
    for c in a.coeffs() {
        let mut items = Vec::new();
        for (p, h) in c.monomials() {
            if !h.is_constant() {
                return Err(DslError::new(at, "only constants may be divided by a growth symbol"));
            }
            items.push((p.clone(), HardyCoefficient::reciprocal(h.constant_term(), g)));
        }
        out.push(ExtendedCoefficient::from_monomials(items));
    }
    Ok(VariablePolynomial::new(out))
}

fn constant(c: f64) -> VariablePolynomial {
    VariablePolynomial::from_hardy([HardyCoefficient::constant(c)])
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn at(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Parsed<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(DslError::new(self.at(), format!("expected {want}, found {}", self.peek())))
        }
    }

    fn finish(&self) -> Parsed<()> {
        match self.peek() {
            Tok::End => Ok(()),
            t => Err(DslError::new(self.at(), format!("unexpected {t}"))),
        }
    }

    fn sum(&mut self) -> Parsed<VariablePolynomial> {
        let mut acc = self.product()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = acc.add(&self.product()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc.sub(&self.product()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Parsed<VariablePolynomial> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    let at = self.bump().1;
                    let rhs = self.unary()?;
                    acc = poly_mul(&acc, &rhs, at)?;
                }
                Tok::Slash => {
                    let at = self.bump().1;
                    let g = self.growth()?;
                    acc = poly_div(&acc, g, at)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Parsed<VariablePolynomial> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(self.unary()?.scale(-1.0))
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.primary(),
        }
    }

    fn small_int(&mut self, what: &str) -> Parsed<u32> {
        let at = self.at();
        match self.bump().0 {
            Tok::Num(_, s) => s.parse().map_err(|_| DslError::new(at, format!("{what} must be a non-negative integer"))),
            t => Err(DslError::new(at, format!("expected {what}, found {t}"))),
        }
    }

    fn optional_power(&mut self) -> Parsed<u32> {
        if *self.peek() == Tok::Caret {
            self.bump();
            self.small_int("power")
        } else {
            Ok(1)
        }
    }

    fn primary(&mut self) -> Parsed<VariablePolynomial> {
        let at = self.at();
        match self.bump().0 {
            Tok::Num(v, _) => Ok(constant(v)),
            Tok::LParen => {
                let inner = self.sum()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            Tok::Ident(name) if name == "n" => {
                let d = self.optional_power()?;
                Ok(VariablePolynomial::monomial(HardyCoefficient::constant(1.0), d as usize))
            }
            Tok::Ident(name) if name.starts_with('h') && name.len() > 1 && name[1..].bytes().all(|b| b.is_ascii_digit()) => {
                let k: u32 = name[1..].parse().map_err(|_| DslError::new(at, "shift index out of range"))?;
                if k == 0 {
                    return Err(DslError::new(at, "shift symbols are numbered from h1"));
                }
                let e = self.optional_power()?;
                Ok(VariablePolynomial::new(vec![ExtendedCoefficient::monomial(
                    HardyCoefficient::constant(1.0),
                    ShiftPowers::single(ShiftSym(k), e),
                )]))
            }
            Tok::Ident(name) if matches!(name.as_str(), "N" | "logN" | "loglogN") => {
                Err(DslError::new(at, format!("growth symbol '{name}' may only appear after '/'")))
            }
            Tok::Ident(name) => Err(DslError::new(at, format!("unknown name '{name}'"))),
            t => Err(DslError::new(at, format!("expected a term, found {t}"))),
        }
    }

    fn exponent(&mut self) -> Parsed<Exponent> {
        let at = self.at();
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let e = match self.bump().0 {
            Tok::Num(_, s) => decimal_to_rational(&s).ok_or_else(|| DslError::new(at, format!("exponent '{s}' is not an exact decimal")))?,
            Tok::LParen => {
                let neg_num = if *self.peek() == Tok::Minus {
                    self.bump();
                    true
                } else {
                    false
                };
                let p = self.small_int("numerator")? as i64;
                self.expect(Tok::Slash)?;
                let q_at = self.at();
                let q = self.small_int("denominator")? as i64;
                if q == 0 {
                    return Err(DslError::new(q_at, "zero denominator"));
                }
                self.expect(Tok::RParen)?;
                Exponent::new(if neg_num { -p } else { p }, q)
            }
            t => return Err(DslError::new(at, format!("expected an exponent, found {t}"))),
        };
        Ok(if neg { -e } else { e })
    }

    fn growth_factor(&mut self, triple: &mut [Option<Exponent>; 3]) -> Parsed<()> {
        let at = self.at();
        let slot = match self.bump().0 {
            Tok::Ident(s) if s == "N" => 0,
            Tok::Ident(s) if s == "logN" => 1,
            Tok::Ident(s) if s == "loglogN" => 2,
            t => return Err(DslError::new(at, format!("expected N, logN or loglogN, found {t}"))),
        };
        if triple[slot].is_some() {
            return Err(DslError::new(at, "repeated growth factor"));
        }
        self.expect(Tok::Caret)?;
        triple[slot] = Some(self.exponent()?);
        Ok(())
    }

    fn growth(&mut self) -> Parsed<GrowthSymbol> {
        let at = self.at();
        let mut triple = [None; 3];
        if *self.peek() == Tok::LParen {
            self.bump();
            self.growth_factor(&mut triple)?;
            while *self.peek() == Tok::Star {
                self.bump();
                self.growth_factor(&mut triple)?;
            }
            self.expect(Tok::RParen)?;
        } else {
            self.growth_factor(&mut triple)?;
            if *self.peek() == Tok::Star {
                if let Tok::Ident(s) = &self.toks[self.pos + 1].0 {
                    if matches!(s.as_str(), "N" | "logN" | "loglogN") {
                        return Err(DslError::new(self.at(), "write multi-factor growth symbols in parentheses"));
                    }
                }
            }
        }
        let zero = Exponent::from_integer(0);
        GrowthSymbol::new(triple[0].unwrap_or(zero), triple[1].unwrap_or(zero), triple[2].unwrap_or(zero))
            .map_err(|e| DslError::new(at, e.to_string()))
    }
}

fn parse_with_base(src: &str, base: usize) -> Parsed<VariablePolynomial> {
    let mut p = Parser { toks: lex(src, base)?, pos: 0 };
    if *p.peek() == Tok::End {
        return Err(DslError::new(base, "empty expression"));
    }
    let out = p.sum()?;
    p.finish()?;
    Ok(out)
}

pub fn parse_polynomial(src: &str) -> Parsed<VariablePolynomial> {
    parse_with_base(src, 0)
}

/// A coefficient: an expression free of `n` and of shift symbols.
pub fn parse_coefficient(src: &str) -> Parsed<HardyCoefficient> {
    coefficient_at(src, 0)
}

fn coefficient_at(src: &str, base: usize) -> Parsed<HardyCoefficient> {
    let p = parse_with_base(src, base)?;
    if p.degree().unwrap_or(0) > 0 {
        return Err(DslError::new(base, "coefficient depends on n"));
    }
    if !p.shifts().is_empty() {
        return Err(DslError::new(base, "coefficient contains shift symbols"));
    }
    Ok(p.hardy_coeffs().map_err(|e| DslError::new(base, e.to_string()))?.into_iter().next().unwrap_or_else(HardyCoefficient::zero))
}

/// Pieces of `src` separated by top-level `;`, with their offsets.
fn split_members(src: &str) -> Vec<(&str, usize)> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, c) in src.char_indices() {
        if c == ';' {
            out.push((&src[start..i], start));
            start = i + 1;
        }
    }
    out.push((&src[start..], start));
    out
}

fn strip_braces(src: &str) -> Parsed<(&str, usize)> {
    let trimmed = src.trim_start();
    let lead = src.len() - trimmed.len();
    if let Some(rest) = trimmed.strip_prefix('{') {
        let rest = rest.trim_end();
        let inner = rest
            .strip_suffix('}')
            .ok_or_else(|| DslError::new(lead + 1 + rest.len(), "expected '}'"))?;
        Ok((inner, lead + 1))
    } else {
        Ok((src, 0))
    }
}

/// `p1; p2; …`, optionally as `{p1; p2}`.
pub fn parse_family(src: &str) -> Parsed<PolynomialFamily> {
    let (inner, base) = strip_braces(src)?;
    let mut members = Vec::new();
    for (piece, off) in split_members(inner) {
        members.push(parse_with_base(piece, base + off)?);
    }
    PolynomialFamily::new(members).map_err(|e| DslError::new(0, e.to_string()))
}

/// `c1; c2; …` as coefficients.
pub fn parse_coefficients(src: &str) -> Parsed<Vec<HardyCoefficient>> {
    let (inner, base) = strip_braces(src)?;
    split_members(inner).into_iter().map(|(piece, off)| coefficient_at(piece, base + off)).collect()
}

/// Members joined by `"; "`; parses back to the same family.
pub fn print_family(f: &PolynomialFamily) -> String {
    f.members().iter().map(|p| p.to_string()).collect::<Vec<_>>().join("; ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_example_parses() {
        let p = parse_polynomial("(1.41421356/ N^0.5 + 1/(N^0.3*logN^1))*n^3 + -31/logN^1*n + 1").unwrap();
        assert_eq!(p.degree(), Some(3));
        let c3 = p.coeff(3).as_hardy().unwrap();
        assert_eq!(c3.terms().len(), 2);
        assert_eq!(p.coeff(0).as_hardy().unwrap(), HardyCoefficient::constant(1.0));
        assert_eq!(p.to_string(), "(1.41421356/N^0.5 + 1/(N^0.3*logN^1))*n^3 + -31/logN^1*n + 1");
    }

    #[test]
    fn exponents_are_exact() {
        let c = parse_coefficient("1/N^(1/3)").unwrap();
        assert_eq!(c.terms()[0].1, GrowthSymbol::power(1, 3).unwrap());
        let c = parse_coefficient("2.5/(N^0.3*logN^1.5)").unwrap();
        assert_eq!(c.terms()[0].1.delta(), Exponent::new(3, 2));
        assert_eq!(c.to_string(), "2.5/(N^0.3*logN^1.5)");
    }

    #[test]
    fn shifted_terms_round_trip() {
        let src = "1/N^0.5*n^2 + 2/N^0.5*h3*n + 1/N^0.5*h3^2";
        let p = parse_polynomial(src).unwrap();
        assert_eq!(p.to_string(), src);
        assert_eq!(parse_polynomial("n^2/N^0.5").unwrap(), parse_polynomial("1/N^0.5*n^2").unwrap());
    }

    #[test]
    fn errors_carry_columns() {
        let e = parse_polynomial("1/N^0.5*n +").unwrap_err();
        assert_eq!(e.column(), 12);
        let e = parse_polynomial("1/N^0.3*logN^1").unwrap_err();
        assert!(e.message.contains("parentheses"), "{e}");
        let e = parse_polynomial("1/N^1.5*n").unwrap_err();
        assert_eq!(e.column(), 3);
        assert!(parse_polynomial("1/N^0.5 * 1/N^0.5").is_err());
        assert!(parse_polynomial("2 $ n").unwrap_err().message.contains("unexpected character"));
    }

    #[test]
    fn family_offsets_point_into_member() {
        let e = parse_family("1/N^0.3*n; 1/N^0.6*m").unwrap_err();
        assert_eq!(e.column(), 20);
        let f = parse_family("{1/N^0.3*n; 1/N^0.6*n}").unwrap();
        assert_eq!(print_family(&f), "1/N^0.3*n; 1/N^0.6*n");
    }
}
