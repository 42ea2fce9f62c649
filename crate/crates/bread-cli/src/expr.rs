//! Element expressions for the `opnorm` command.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr   := ['-'] term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := atom ['^' nat]
//! atom   := 'g' | 'e(' nat ')' | 'gn(' nat ')' | 'pn(' nat ')'
//!         | rational | '(' expr ')'
//! rational := nat ['/' nat]
//! ```
//!
//! `g` is the diagonal generator, `e(i)` a coordinate idempotent, `gn(k)`
//! the truncated rescaling `2^k·g ∧ 1`, `pn(k)` the partial identity
//! `e_1 + … + e_k`.  Evaluation runs in the unitization — scalars are legal
//! inside products, e.g. `(1 - g) * g` — but the *result* must land back in
//! the algebra: a nonzero leftover constant term is rejected, because a
//! sequence with a constant offset does not vanish at infinity.

use bread_core::algebra::Element;
use bread_core::numeric::{rint, Rational};

/// A parse or typing problem; maps to the usage exit code.
#[derive(Debug, PartialEq)]
pub struct ExprError(pub String);

impl std::fmt::Display for ExprError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ExprError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ExprError> {
    Err(ExprError(msg.into()))
}

/// An element of the unitization: `constant·1 + element`.
#[derive(Debug, Clone)]
struct Unitized {
    constant: Rational,
    element: Element,
}

impl Unitized {
    fn scalar(c: Rational) -> Self {
        Unitized { constant: c, element: Element::zero() }
    }

    fn element(e: Element) -> Self {
        Unitized { constant: Rational::from_integer(0.into()), element: e }
    }

    fn add(&self, other: &Self) -> Self {
        Unitized {
            constant: &self.constant + &other.constant,
            element: self.element.add(&other.element),
        }
    }

    fn neg(&self) -> Self {
        Unitized { constant: -self.constant.clone(), element: self.element.neg() }
    }

    fn mul(&self, other: &Self) -> Self {
        // (c + x)(d + y) = cd + (c·y + d·x + x·y)
        let element = other
            .element
            .scale(&self.constant)
            .add(&self.element.scale(&other.constant))
            .add(&self.element.mul(&other.element));
        Unitized { constant: &self.constant * &other.constant, element }
    }

    fn pow(&self, k: u64) -> Self {
        let mut out = Unitized::scalar(rint(1));
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src: src.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    fn expect(&mut self, c: u8) -> Result<(), ExprError> {
        match self.bump() {
            Some(got) if got == c => Ok(()),
            Some(got) => err(format!(
                "expected `{}` at offset {}, found `{}`",
                c as char,
                self.pos - 1,
                got as char
            )),
            None => err(format!("expected `{}` at end of input", c as char)),
        }
    }

    fn nat(&mut self) -> Result<u64, ExprError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return err(format!("expected a number at offset {start}"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("digits are utf8")
            .parse::<u64>()
            .map_err(|_| ExprError("number too large".to_string()))
    }

    fn ident(&mut self) -> String {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn atom(&mut self) -> Result<Unitized, ExprError> {
        match self.peek() {
            Some(b'(') => {
                self.bump();
                let inner = self.expr()?;
                self.expect(b')')?;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let num = self.nat()?;
                if self.peek() == Some(b'/') {
                    self.bump();
                    let den = self.nat()?;
                    if den == 0 {
                        return err("zero denominator");
                    }
                    Ok(Unitized::scalar(Rational::new(num.into(), den.into())))
                } else {
                    Ok(Unitized::scalar(Rational::from_integer(num.into())))
                }
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let name = self.ident();
                match name.as_str() {
                    "g" => Ok(Unitized::element(Element::g())),
                    "e" | "gn" | "pn" => {
                        self.expect(b'(')?;
                        let arg = self.nat()?;
                        self.expect(b')')?;
                        if arg == 0 && name == "e" {
                            return err("coordinates are 1-based");
                        }
                        let el = match name.as_str() {
                            "e" => Element::e(arg),
                            "gn" => {
                                if arg > 1 << 12 {
                                    return err(format!("gn({arg}) is too steep to materialize"));
                                }
                                Element::gn(arg)
                            }
                            _ => {
                                if arg > 1 << 16 {
                                    return err(format!("pn({arg}) has too many coordinates"));
                                }
                                Element::pn(arg)
                            }
                        };
                        Ok(Unitized::element(el))
                    }
                    other => err(format!("unknown name `{other}` (expected g, e, gn, pn)")),
                }
            }
            Some(c) => err(format!("unexpected `{}` at offset {}", c as char, self.pos)),
            None => err("unexpected end of input"),
        }
    }

    fn factor(&mut self) -> Result<Unitized, ExprError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.bump();
            let k = self.nat()?;
            if k > 1 << 12 {
                return err(format!("exponent {k} is unreasonably large"));
            }
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn term(&mut self) -> Result<Unitized, ExprError> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.bump();
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn expr(&mut self) -> Result<Unitized, ExprError> {
        let mut acc = if self.peek() == Some(b'-') {
            self.bump();
            self.term()?.neg()
        } else {
            self.term()?
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.bump();
                    acc = acc.add(&self.term()?.neg());
                }
                _ => return Ok(acc),
            }
        }
    }
}

/// Parse an element expression; the result must have no constant term.
pub fn parse_element(src: &str) -> Result<Element, ExprError> {
    let mut p = Parser::new(src);
    let value = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return err(format!("trailing input at offset {}", p.pos));
    }
    if !num_traits::Zero::is_zero(&value.constant) {
        return err(format!(
            "expression has constant term {} — not a vanishing sequence",
            value.constant
        ));
    }
    Ok(value.element)
}

#[cfg(test)]
mod tests {
    use super::*;
    use bread_core::numeric::{pow2, rat};

    #[test]
    fn generators_and_arithmetic_parse() {
        assert_eq!(parse_element("g").unwrap(), Element::g());
        assert_eq!(parse_element("e(3)").unwrap(), Element::e(3));
        assert_eq!(parse_element("gn(2)").unwrap(), Element::gn(2));
        assert_eq!(parse_element("pn(4)").unwrap(), Element::pn(4));
        assert_eq!(
            parse_element("g^2 - 3 * e(2)").unwrap(),
            Element::monomial(2, rint(1)).sub(&Element::e(2).scale(&rint(3)))
        );
        assert_eq!(
            parse_element("1/2 * g + g").unwrap(),
            Element::g().scale(&rat(3, 2))
        );
    }

    #[test]
    fn unitization_is_transit_only() {
        // (1 - g) * g = g - g²: constants may appear inside, not survive
        let x = parse_element("(1 - g) * g").unwrap();
        assert_eq!(x, Element::g().sub(&Element::monomial(2, rint(1))));
        assert!(parse_element("1").is_err());
        assert!(parse_element("g + 1/2").is_err());
        // cancellation is fine
        let y = parse_element("(1 + g) * (1 - g) - 1").unwrap();
        assert_eq!(y, Element::monomial(2, rint(1)).neg());
    }

    #[test]
    fn coordinates_check_out() {
        let x = parse_element("gn(3)^2 * (g + e(1))").unwrap();
        // at coordinate 1: gn(3) = 1 there, so value is 2^(−1) + 1
        assert_eq!(x.coord(1), rat(3, 2));
        // at coordinate 5: gn(3)² = 2^(−4), g = 2^(−5), e(1) = 0
        assert_eq!(x.coord(5), pow2(-9));
    }

    #[test]
    fn junk_is_rejected_with_positions() {
        assert!(parse_element("").is_err());
        assert!(parse_element("q").is_err());
        assert!(parse_element("g +").is_err());
        assert!(parse_element("e()").is_err());
        assert!(parse_element("g)").is_err());
        assert!(parse_element("1/0").is_err());
        assert!(parse_element("e(0)").is_err());
        assert!(parse_element("g ^ 99999999").is_err());
    }
}
