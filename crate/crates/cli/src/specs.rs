//! Spec strings for systems, observables, sets and real constants.
//!
//! ```text
//! rot:d=1,alpha=0.41421356        skew:alpha=sqrt(2)        cyclic:M=64
//! trig:(1)=1.0,(0,-1)=(0.5,0.5)   vec:0,1,1,0               vec:(1,0),(0,1)
//! arc:start=0.2,length=0.3        0..31   res:0,1,5..9      2..100:2
//! ```

use std::f64::consts::{E, PI};

use ergopet_core::combinatorics::{IntegerSet, MeasurableSet};
use ergopet_core::dynsys::{Observable, System};
use ergopet_core::Complex64;

use crate::dsl::DslError;

type Parsed<T> = Result<T, DslError>;

fn err(at: usize, msg: impl Into<String>) -> DslError {
    DslError { offset: at, message: msg.into() }
}

/// Recursive-descent evaluator for `+ - * /`, parentheses, `pi`, `e` and
/// `sqrt(·)` over decimal literals.
struct Real<'a> {
    s: &'a [u8],
    i: usize,
    base: usize,
}

impl Real<'_> {
    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i] == b' ' {
            self.i += 1;
        }
    }

    fn at(&self) -> usize {
        self.base + self.i
    }

    fn eat(&mut self, c: u8) -> bool {
        self.ws();
        if self.s.get(self.i) == Some(&c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Parsed<f64> {
        let mut v = self.term()?;
        loop {
            if self.eat(b'+') {
                v += self.term()?;
            } else if self.eat(b'-') {
                v -= self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Parsed<f64> {
        let mut v = self.unary()?;
        loop {
            if self.eat(b'*') {
                v *= self.unary()?;
            } else if self.eat(b'/') {
                v /= self.unary()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn unary(&mut self) -> Parsed<f64> {
        if self.eat(b'-') {
            Ok(-self.unary()?)
        } else if self.eat(b'+') {
            self.unary()
        } else {
            self.atom()
        }
    }

    fn atom(&mut self) -> Parsed<f64> {
        self.ws();
        let start = self.i;
        if self.eat(b'(') {
            let v = self.expr()?;
            if !self.eat(b')') {
                return Err(err(self.at(), "expected ')'"));
            }
            return Ok(v);
        }
        while self.i < self.s.len() && (self.s[self.i].is_ascii_alphanumeric() || self.s[self.i] == b'.') {
            let c = self.s[self.i];
            // allow exponent signs in literals such as 1e-5
            if (c == b'e' || c == b'E')
                && self.s[start].is_ascii_digit()
                && matches!(self.s.get(self.i + 1), Some(b'+') | Some(b'-'))
            {
                self.i += 2;
                continue;
            }
            self.i += 1;
        }
        let word = std::str::from_utf8(&self.s[start..self.i]).unwrap_or("");
        match word {
            "" => Err(err(self.base + start, "expected a number")),
            "pi" => Ok(PI),
            "e" => Ok(E),
            "sqrt" => {
                if !self.eat(b'(') {
                    return Err(err(self.at(), "expected '(' after sqrt"));
                }
                let v = self.expr()?;
                if !self.eat(b')') {
                    return Err(err(self.at(), "expected ')'"));
                }
                Ok(v.sqrt())
            }
            w => w.parse().map_err(|_| err(self.base + start, format!("malformed number '{w}'"))),
        }
    }
}

/// A real constant such as `0.5`, `sqrt(2)-1` or `pi/3`.
pub fn parse_real_at(src: &str, base: usize) -> Parsed<f64> {
    let mut r = Real { s: src.as_bytes(), i: 0, base };
    let v = r.expr()?;
    r.ws();
    if r.i != src.len() {
        return Err(err(r.at(), format!("unexpected '{}'", &src[r.i..])));
    }
    if !v.is_finite() {
        return Err(err(base, "value is not finite"));
    }
    Ok(v)
}

pub fn parse_real(src: &str) -> Parsed<f64> {
    parse_real_at(src, 0)
}

/// Split on `sep` outside parentheses, keeping byte offsets.
pub fn split_top(src: &str, sep: char) -> Vec<(&str, usize)> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in src.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push((&src[start..i], start));
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push((&src[start..], start));
    out
}

fn trimmed(piece: &str, off: usize) -> (&str, usize) {
    let t = piece.trim_start();
    (t.trim_end(), off + piece.len() - t.len())
}

/// `key=value` pairs after a `kind:` prefix.
fn params(src: &str, base: usize) -> Parsed<Vec<(String, &str, usize)>> {
    let mut out = Vec::new();
    for (piece, off) in split_top(src, ',') {
        let (piece, off) = trimmed(piece, base + off);
        let (k, v) = piece.split_once('=').ok_or_else(|| err(off, format!("expected key=value, found '{piece}'")))?;
        let voff = off + k.len() + 1;
        let (v, voff) = trimmed(v, voff);
        out.push((k.trim().to_string(), v, voff));
    }
    Ok(out)
}

fn prefix(src: &str) -> Option<(&str, &str, usize)> {
    let (kind, rest) = src.split_once(':')?;
    Some((kind.trim(), rest, kind.len() + 1))
}

pub fn parse_system(src: &str) -> Parsed<System> {
    let Some((kind, rest, off)) = prefix(src) else {
        return Err(err(0, "expected rot:, skew: or cyclic:"));
    };
    let ps = params(rest, off)?;
    match kind {
        "rot" => {
            let mut d = None;
            let mut alpha = Vec::new();
            let mut ergodic = true;
            for (k, v, at) in ps {
                match k.as_str() {
                    "d" => d = Some((v.parse::<usize>().map_err(|_| err(at, "d must be a positive integer"))?, at)),
                    "alpha" => alpha.push(parse_real_at(v, at)?),
                    "ergodic" => {
                        ergodic = v.parse().map_err(|_| err(at, "ergodic must be true or false"))?;
                    }
                    _ => return Err(err(at, format!("unknown rotation parameter '{k}'"))),
                }
            }
            if alpha.is_empty() {
                return Err(err(off, "rotation needs alpha"));
            }
            if let Some((d, at)) = d {
                if d != alpha.len() {
                    return Err(err(at, format!("d={d} but {} rotation numbers given", alpha.len())));
                }
            }
            Ok(System::TorusRotation { alpha, declared_ergodic: ergodic })
        }
        "skew" => match ps.as_slice() {
            [(k, v, at)] if k == "alpha" => Ok(System::SkewTorus { alpha: parse_real_at(v, *at)? }),
            _ => Err(err(off, "skew takes exactly alpha=<real>")),
        },
        "cyclic" => match ps.as_slice() {
            [(k, v, at)] if k == "M" => {
                let m: u64 = v.parse().map_err(|_| err(*at, "M must be a positive integer"))?;
                System::cyclic(m).map_err(|e| err(*at, e.to_string()))
            }
            _ => Err(err(off, "cyclic takes exactly M=<int>")),
        },
        k => Err(err(0, format!("unknown system kind '{k}'"))),
    }
}

/// A real or `(re,im)`.
fn parse_complex(src: &str, base: usize) -> Parsed<Complex64> {
    let (s, base) = trimmed(src, base);
    if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        let parts = split_top(inner, ',');
        if let [(re, o1), (im, o2)] = parts.as_slice() {
            return Ok(Complex64::new(parse_real_at(re, base + 1 + o1)?, parse_real_at(im, base + 1 + o2)?));
        }
    }
    Ok(Complex64::new(parse_real_at(s, base)?, 0.0))
}

pub fn parse_observable(src: &str) -> Parsed<Observable> {
    let Some((kind, rest, off)) = prefix(src) else {
        return Err(err(0, "expected trig: or vec:"));
    };
    match kind {
        "trig" => {
            let mut terms = Vec::new();
            for (piece, o) in split_top(rest, ',') {
                let (piece, o) = trimmed(piece, off + o);
                let (freq, amp) = piece.split_once('=').ok_or_else(|| err(o, "expected (k1,…)=amplitude"))?;
                let f = freq.trim();
                let inner = f
                    .strip_prefix('(')
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| err(o, "frequency must be parenthesized, e.g. (1) or (0,-1)"))?;
                let mut k = Vec::new();
                for (x, xo) in split_top(inner, ',') {
                    k.push(x.trim().parse::<i64>().map_err(|_| err(o + 1 + xo, "frequencies are integers"))?);
                }
                terms.push((k, parse_complex(amp, o + freq.len() + 1)?));
            }
            Observable::trig(terms).map_err(|e| err(off, e.to_string()))
        }
        "vec" => {
            let vals = split_top(rest, ',')
                .into_iter()
                .map(|(p, o)| parse_complex(p, off + o))
                .collect::<Parsed<Vec<_>>>()?;
            Observable::vector(vals).map_err(|e| err(off, e.to_string()))
        }
        k => Err(err(0, format!("unknown observable kind '{k}'"))),
    }
}

/// `a`, `a..b` (inclusive) or `a..b:step`, comma separated.
pub fn parse_integer_list(src: &str, base: usize) -> Parsed<Vec<u64>> {
    let mut out = Vec::new();
    for (piece, o) in split_top(src, ',') {
        let (piece, o) = trimmed(piece, base + o);
        if piece.is_empty() {
            continue;
        }
        let num = |s: &str| s.trim().parse::<u64>().map_err(|_| err(o, format!("malformed integer range '{piece}'")));
        match piece.split_once("..") {
            Some((a, b)) => {
                let (b, step) = match b.split_once(':') {
                    Some((b, s)) => (b, num(s)?),
                    None => (b, 1),
                };
                if step == 0 {
                    return Err(err(o, "range step must be positive"));
                }
                let (a, b) = (num(a)?, num(b)?);
                if b < a {
                    return Err(err(o, "empty range"));
                }
                out.extend((a..=b).step_by(step as usize));
            }
            None => out.push(num(piece)?),
        }
    }
    Ok(out)
}

pub fn parse_measurable_set(src: &str) -> Parsed<MeasurableSet> {
    match prefix(src) {
        Some(("arc", rest, off)) => {
            let (mut start, mut length) = (None, None);
            for (k, v, at) in params(rest, off)? {
                match k.as_str() {
                    "start" => start = Some(parse_real_at(v, at)?),
                    "length" => length = Some(parse_real_at(v, at)?),
                    _ => return Err(err(at, format!("unknown arc parameter '{k}'"))),
                }
            }
            match (start, length) {
                (Some(start), Some(length)) => Ok(MeasurableSet::Arc { start, length }),
                _ => Err(err(off, "arc needs start and length")),
            }
        }
        Some(("res", rest, off)) => Ok(MeasurableSet::residues(parse_integer_list(rest, off)?)),
        Some((k, _, _)) => Err(err(0, format!("unknown set kind '{k}'"))),
        None => Ok(MeasurableSet::residues(parse_integer_list(src, 0)?)),
    }
}

/// Elements as in [`parse_integer_list`]; the bound defaults to the largest element.
pub fn parse_integer_set(src: &str, bound: Option<u64>) -> Parsed<IntegerSet> {
    let elems = parse_integer_list(src, 0)?;
    let m = bound.unwrap_or_else(|| elems.iter().copied().max().unwrap_or(0));
    IntegerSet::new(elems, m).map_err(|e| err(0, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn systems() {
        assert_eq!(
            parse_system("rot:d=1,alpha=0.41421356").unwrap(),
            System::TorusRotation { alpha: vec![0.41421356], declared_ergodic: true }
        );
        assert_eq!(parse_system("skew:alpha=sqrt(2)").unwrap(), System::SkewTorus { alpha: 2f64.sqrt() });
        assert_eq!(parse_system("cyclic:M=64").unwrap(), System::CyclicShift { modulus: 64 });
        assert!(parse_system("rot:d=2,alpha=0.1").is_err());
        assert_eq!(parse_system("cyclic:M=x").unwrap_err().column(), 10);
    }

    #[test]
    fn observables() {
        let f = parse_observable("trig:(1)=1.0").unwrap();
        assert_eq!(f, Observable::character(vec![1]));
        let g = parse_observable("trig:(0,-1)=(0.5,-2),(1,1)=3").unwrap();
        assert_eq!(
            g,
            Observable::Trig(vec![(vec![0, -1], Complex64::new(0.5, -2.0)), (vec![1, 1], Complex64::new(3.0, 0.0))])
        );
        let v = parse_observable("vec:0,1,1,0").unwrap();
        assert_eq!(v.mean(), Complex64::new(0.5, 0.0));
    }

    #[test]
    fn reals_and_sets() {
        assert_eq!(parse_real("pi/3").unwrap(), PI / 3.0);
        assert_eq!(parse_real("sqrt(2)-1").unwrap(), 2f64.sqrt() - 1.0);
        assert_eq!(parse_real("1e-5").unwrap(), 1e-5);
        assert_eq!(parse_integer_list("2..10:4, 1,0..1", 0).unwrap(), vec![2, 6, 10, 1, 0, 1]);
        assert_eq!(parse_measurable_set("0..3").unwrap(), MeasurableSet::Residues(vec![0, 1, 2, 3]));
        assert_eq!(
            parse_measurable_set("arc:start=0.2,length=0.3").unwrap(),
            MeasurableSet::Arc { start: 0.2, length: 0.3 }
        );
        let e = parse_integer_set("2..100:2", Some(100)).unwrap();
        assert_eq!(e.elements().len(), 50);
    }
}
