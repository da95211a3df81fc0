//! Recursive-descent parser for the expression language used in bundle files.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('+' | '-') unary | factor
//! factor := atom ('^' signed-int)?
//! atom   := number | 'i' | var | 'conj' '(' expr ')' | '(' expr ')'
//! var    := 't' positive-int
//! number := decimal ('e' signed-int)? 'i'?
//! ```
//!
//! A number immediately followed by `i` is an imaginary literal, so `a+bi`
//! reads as the sum of a real and an imaginary literal.

use num_complex::Complex64;

use crate::error::ParseError;
use crate::expr::ScalarExpr;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num {
        value: f64,
        imag: bool,
        integer: bool,
    },
    I,
    Var(usize),
    Conj,
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Eof,
}

impl Tok {
    fn describe(&self, text: &str) -> String {
        match self {
            Tok::Eof => "end of input".to_string(),
            _ => format!("`{text}`"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    text: String,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut line, mut col) = (1usize, 1usize);
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        let (start_line, start_col) = (line, col);
        if ch == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if ch.is_whitespace() {
            col += 1;
            i += 1;
            continue;
        }
        let start = i;
        let tok = match ch {
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            c if c.is_ascii_digit() || c == '.' => {
                let mut integer = true;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if i < chars.len() && chars[i] == '.' {
                    integer = false;
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut k = i + 1;
                    if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
                        k += 1;
                    }
                    if k < chars.len() && chars[k].is_ascii_digit() {
                        integer = false;
                        i = k;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let value: f64 = text.parse().map_err(|_| ParseError {
                    line: start_line,
                    column: start_col,
                    found: format!("`{text}`"),
                    expected: vec!["number".into()],
                })?;
                let imag = i < chars.len()
                    && chars[i] == 'i'
                    && !chars.get(i + 1).is_some_and(|c| c.is_ascii_alphanumeric());
                if imag {
                    i += 1;
                }
                col += i - start;
                out.push(Spanned {
                    tok: Tok::Num {
                        value,
                        imag,
                        integer: integer && !imag,
                    },
                    text: chars[start..i].iter().collect(),
                    line: start_line,
                    column: start_col,
                });
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                col += i - start;
                let tok = match word.as_str() {
                    "i" => Tok::I,
                    "conj" => Tok::Conj,
                    w if w.starts_with('t') && w.len() > 1 => match w[1..].parse::<usize>() {
                        Ok(n) if n >= 1 && w[1..].chars().all(|c| c.is_ascii_digit()) => {
                            Tok::Var(n - 1)
                        }
                        _ => return Err(bad_word(&word, start_line, start_col)),
                    },
                    _ => return Err(bad_word(&word, start_line, start_col)),
                };
                out.push(Spanned {
                    tok,
                    text: word,
                    line: start_line,
                    column: start_col,
                });
                continue;
            }
            other => {
                return Err(ParseError {
                    line: start_line,
                    column: start_col,
                    found: format!("`{other}`"),
                    expected: atom_expected(),
                })
            }
        };
        i += 1;
        col += 1;
        out.push(Spanned {
            tok,
            text: ch.to_string(),
            line: start_line,
            column: start_col,
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        text: String::new(),
        line,
        column: col,
    });
    Ok(out)
}

fn bad_word(word: &str, line: usize, column: usize) -> ParseError {
    ParseError {
        line,
        column,
        found: format!("`{word}`"),
        expected: vec!["`i`".into(), "`conj`".into(), "variable t<n>".into()],
    }
}

fn atom_expected() -> Vec<String> {
    ["number", "`i`", "variable t<n>", "`conj`", "`(`", "`-`"]
        .iter()
        .map(|s| s.to_string())
        .collect()
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: Vec<String>) -> ParseError {
        let here = &self.toks[self.pos];
        ParseError {
            line: here.line,
            column: here.column,
            found: here.tok.describe(&here.text),
            expected,
        }
    }

    fn expect(&mut self, tok: Tok, name: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(vec![format!("`{name}`")]))
        }
    }

    fn expr(&mut self) -> Result<ScalarExpr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    lhs = lhs.add(&self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    lhs = lhs.sub(&self.term()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<ScalarExpr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    lhs = lhs.mul(&self.unary()?);
                }
                Tok::Slash => {
                    self.bump();
                    lhs = lhs.div(&self.unary()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<ScalarExpr, ParseError> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                Ok(self.unary()?.neg())
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.factor(),
        }
    }

    fn factor(&mut self) -> Result<ScalarExpr, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
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
        match *self.peek() {
            Tok::Num {
                value,
                integer: true,
                ..
            } if value <= f64::from(i32::MAX) => {
                self.bump();
                let n = value as i32;
                Ok(base.powi(if negative { -n } else { n }))
            }
            _ => Err(self.error(vec!["integer exponent".into()])),
        }
    }

    fn atom(&mut self) -> Result<ScalarExpr, ParseError> {
        match self.peek().clone() {
            Tok::Num { value, imag, .. } => {
                self.bump();
                Ok(ScalarExpr::constant(if imag {
                    Complex64::new(0.0, value)
                } else {
                    Complex64::new(value, 0.0)
                }))
            }
            Tok::I => {
                self.bump();
                Ok(ScalarExpr::i())
            }
            Tok::Var(j) => {
                self.bump();
                Ok(ScalarExpr::coord(j))
            }
            Tok::Conj => {
                self.bump();
                self.expect(Tok::LParen, "(")?;
                let inner = self.expr()?;
                self.expect(Tok::RParen, ")")?;
                Ok(inner.conj())
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, ")")?;
                Ok(inner)
            }
            _ => Err(self.error(atom_expected())),
        }
    }
}

/// Parses a complete expression; trailing input is an error.
pub fn parse_expr(text: &str) -> Result<ScalarExpr, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.error(vec!["operator".into(), "`)`".into(), "end of input".into()]));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn half_difference_is_i_times_imaginary_part() {
        let e = parse_expr("0.5*(t1 - conj(t1))").unwrap();
        let v = e.eval(&[c(0.4, 1.7)]).unwrap();
        assert!((v - c(0.0, 1.7)).norm() < 1e-15);
    }

    #[test]
    fn inverse_imaginary_part() {
        let e = parse_expr("((t1-conj(t1))/(0+2i))^-1").unwrap();
        let v = e.eval(&[c(-0.3, 4.0)]).unwrap();
        assert!((v - c(0.25, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn dangling_caret_is_an_error() {
        let err = parse_expr("t1 ^").unwrap_err();
        assert_eq!((err.line, err.column), (1, 5));
        assert_eq!(err.found, "end of input");
        assert!(err.expected.contains(&"integer exponent".to_string()));
    }

    #[test]
    fn precedence() {
        // 2 + 3*t1^2 at t1 = 2 -> 14
        let e = parse_expr("2 + 3*t1^2").unwrap();
        assert_eq!(e.eval(&[c(2.0, 0.0)]).unwrap(), c(14.0, 0.0));
        let e = parse_expr("-t1^2").unwrap();
        assert_eq!(e.eval(&[c(3.0, 0.0)]).unwrap(), c(-9.0, 0.0));
        let e = parse_expr("1 - 2 - 3").unwrap();
        assert_eq!(e.eval(&[]).unwrap(), c(-4.0, 0.0));
        let e = parse_expr("8 / 2 / 2").unwrap();
        assert_eq!(e.eval(&[]).unwrap(), c(2.0, 0.0));
    }

    #[test]
    fn complex_literals() {
        let e = parse_expr("3-1.5i").unwrap();
        assert_eq!(e.eval(&[]).unwrap(), c(3.0, -1.5));
        let e = parse_expr("2*i*t2").unwrap();
        assert_eq!(e.eval(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap(), c(0.0, 2.0));
        let e = parse_expr("1e-3").unwrap();
        assert_eq!(e.eval(&[]).unwrap(), c(1e-3, 0.0));
    }

    #[test]
    fn errors_carry_location() {
        let err = parse_expr("t1 +\n  * t2").unwrap_err();
        assert_eq!((err.line, err.column), (2, 3));
        assert!(parse_expr("t0").is_err());
        assert!(parse_expr("x1").is_err());
        assert!(parse_expr("conj t1").is_err());
        assert!(parse_expr("(t1").is_err());
        assert!(parse_expr("t1 t2").is_err());
        assert!(parse_expr("t1^0.5").is_err());
        assert!(parse_expr("").is_err());
    }

    #[test]
    fn printed_form_reparses() {
        let src = "conj(t1)*(2-3i)/(t2^-2 + 0.25) - conj(t1^3)";
        let e = parse_expr(src).unwrap();
        let back = parse_expr(&e.to_string()).unwrap();
        let pt = [c(0.3, -0.8), c(1.1, 0.4)];
        assert_eq!(e.eval(&pt).unwrap(), back.eval(&pt).unwrap());
    }
}
