//! Small arithmetic language for angles and amplitudes.
//!
//! Grammar: `+ - * /`, parentheses, decimal numbers, `pi`, `i`, `sqrt(...)` and
//! `sqrt2`-style shorthand, and implicit multiplication (`2pi/5`, `3.59pi/5`, `i/sqrt2`).

use qwalk::Complex64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("cannot parse `{input}`: {reason}")]
pub struct ParseError {
    input: String,
    reason: String,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Complex64, String> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc += self.term()?;
            } else if self.eat('-') {
                acc -= self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Complex64, String> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc *= self.unary()?;
            } else if self.eat('/') {
                let d = self.unary()?;
                if d.norm() == 0.0 {
                    return Err("division by zero".into());
                }
                // a real divisor divides componentwise, avoiding the rounding of |d|²
                acc = if d.im == 0.0 { acc / d.re } else { acc / d };
            } else if self.starts_factor() {
                acc *= self.factor()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Complex64, String> {
        if self.eat('-') {
            Ok(-self.unary()?)
        } else if self.eat('+') {
            self.unary()
        } else {
            self.factor()
        }
    }

    fn starts_factor(&mut self) -> bool {
        self.skip_ws();
        self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == '.' || c == '(')
    }

    fn factor(&mut self) -> Result<Complex64, String> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        if self.eat('(') {
            let v = self.expr()?;
            return if self.eat(')') { Ok(v) } else { Err("missing `)`".into()) };
        }
        if rest.starts_with("pi") {
            self.pos += 2;
            return Ok(Complex64::new(std::f64::consts::PI, 0.0));
        }
        if rest.starts_with("π") {
            self.pos += "π".len();
            return Ok(Complex64::new(std::f64::consts::PI, 0.0));
        }
        if rest.starts_with("sqrt") {
            self.pos += 4;
            let arg = if self.eat('(') {
                let v = self.expr()?;
                if !self.eat(')') {
                    return Err("missing `)`".into());
                }
                v
            } else {
                self.number()?
            };
            // real square root where possible, it is correctly rounded
            return Ok(if arg.im == 0.0 && arg.re >= 0.0 { Complex64::new(arg.re.sqrt(), 0.0) } else { arg.sqrt() });
        }
        if rest.starts_with('i') {
            self.pos += 1;
            return Ok(Complex64::new(0.0, 1.0));
        }
        self.number()
    }

    fn number(&mut self) -> Result<Complex64, String> {
        self.skip_ws();
        let start = self.pos;
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && (bytes[self.pos].is_ascii_digit() || bytes[self.pos] == b'.') {
            self.pos += 1;
        }
        // exponent, only when followed by digits so `2e` is never swallowed
        if self.pos < bytes.len() && (bytes[self.pos] == b'e' || bytes[self.pos] == b'E') {
            let mut end = self.pos + 1;
            if end < bytes.len() && (bytes[end] == b'+' || bytes[end] == b'-') {
                end += 1;
            }
            if end < bytes.len() && bytes[end].is_ascii_digit() {
                while end < bytes.len() && bytes[end].is_ascii_digit() {
                    end += 1;
                }
                self.pos = end;
            }
        }
        let text = &self.src[start..self.pos];
        if text.is_empty() {
            return Err(match self.peek() {
                Some(c) => format!("unexpected `{c}`"),
                None => "unexpected end of input".into(),
            });
        }
        text.parse::<f64>().map(|x| Complex64::new(x, 0.0)).map_err(|_| format!("bad number `{text}`"))
    }
}

pub fn parse_complex(input: &str) -> Result<Complex64, ParseError> {
    let fail = |reason: String| ParseError { input: input.to_string(), reason };
    let mut p = Parser { src: input, pos: 0 };
    let v = p.expr().map_err(fail)?;
    p.skip_ws();
    if p.pos != input.len() {
        return Err(fail(format!("trailing input `{}`", &input[p.pos..])));
    }
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(fail("value is not finite".into()));
    }
    Ok(v)
}

/// Real-valued expression such as `pi/3` or `3.59pi/5`.
pub fn parse_real(input: &str) -> Result<f64, ParseError> {
    let v = parse_complex(input)?;
    if v.im.abs() > 1e-12 * v.re.abs().max(1.0) {
        return Err(ParseError { input: input.to_string(), reason: "expected a real number".into() });
    }
    Ok(v.re)
}
